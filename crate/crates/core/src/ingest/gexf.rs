//! GEXF 1.2/1.3 reader and writer for static, flat graphs.
//!
//! Supported: `defaultedgetype`, node ids and labels, declared node
//! attributes (with defaults), edge weights, and the `viz` extension's
//! position, color, size and shape. Dynamic graphs (`mode="dynamic"`,
//! spells, timed attvalues), hierarchies (nested nodes, `pid`) and mixed
//! edge types are rejected.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use quick_xml::escape::escape;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{IngestError, InitialViewPolicy};
use crate::exploration::{Rgb, Shape, StyleOverride, ViewState};
use crate::graph::{AttributeValue, Attributes, Edge, Graph, Node, NodeId};
use crate::layout::{LayoutParams, Point};

/// Layout and style hints carried by the `viz` namespace.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GexfViz {
    pub positions: BTreeMap<NodeId, Point>,
    pub overrides: BTreeMap<NodeId, StyleOverride>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GexfDocument {
    pub graph: Graph,
    pub viz: GexfViz,
}

impl GexfDocument {
    /// [`super::initial_view`], then any `viz` positions and styles on top.
    pub fn initial_view(
        &self,
        policy: InitialViewPolicy,
        params: &LayoutParams,
    ) -> Result<ViewState, IngestError> {
        let mut view = super::initial_view(&self.graph, policy, params)?;
        for (id, p) in &self.viz.positions {
            if view.visible.contains(id) {
                view.layout.positions.insert(id.clone(), *p);
            }
        }
        view.overrides
            .extend(self.viz.overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        Ok(view)
    }
}

/// The graph only; `viz` data is dropped.
pub fn parse_gexf(bytes: &[u8]) -> Result<Graph, IngestError> {
    parse_gexf_document(bytes).map(|d| d.graph)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AttrType {
    Number,
    Bool,
    Text,
}

#[derive(Debug)]
struct AttrDecl {
    title: String,
    kind: AttrType,
    default: Option<String>,
}

#[derive(Debug, Default)]
struct PendingNode {
    id: String,
    label: Option<String>,
    values: Vec<(String, String)>,
    position: Option<Point>,
    style: StyleOverride,
}

pub fn parse_gexf_document(bytes: &[u8]) -> Result<GexfDocument, IngestError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();

    let mut directed = false;
    let mut saw_graph = false;
    let mut attr_class: Option<String> = None;
    let mut decls: HashMap<String, AttrDecl> = HashMap::new();
    let mut decl_order: Vec<String> = Vec::new();
    let mut in_default: Option<String> = None;
    let mut node_depth = 0usize;
    let mut current: Option<PendingNode> = None;
    let mut pending_nodes: Vec<PendingNode> = Vec::new();
    let mut raw_edges: Vec<(String, String, String, Option<f64>)> = Vec::new();

    loop {
        let position = reader.buffer_position();
        let event = reader.read_event_into(&mut buf).map_err(|e| IngestError::Xml {
            position: reader.error_position(),
            message: e.to_string(),
        })?;
        let xml_err = |message: String| IngestError::Xml { position, message };
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                let name = e.local_name();
                let attrs = attributes(e).map_err(xml_err)?;
                match name.as_ref() {
                    b"graph" => {
                        saw_graph = true;
                        if attrs.get("mode").map(String::as_str) == Some("dynamic") {
                            return Err(unsupported("dynamic graph"));
                        }
                        directed = match attrs.get("defaultedgetype").map(String::as_str) {
                            None | Some("undirected") => false,
                            Some("directed") => true,
                            Some(other) => {
                                return Err(unsupported(&format!("defaultedgetype=\"{other}\"")))
                            }
                        };
                    }
                    b"attributes" => {
                        if attrs.get("mode").map(String::as_str) == Some("dynamic") {
                            return Err(unsupported("dynamic attributes"));
                        }
                        attr_class = attrs.get("class").cloned();
                    }
                    b"attribute" if attr_class.as_deref() == Some("node") => {
                        let id = required(&attrs, "id", "attribute").map_err(xml_err)?;
                        let title = attrs.get("title").cloned().unwrap_or_else(|| id.clone());
                        let kind = match attrs.get("type").map(String::as_str) {
                            Some("integer" | "long" | "float" | "double" | "short" | "byte") => {
                                AttrType::Number
                            }
                            Some("boolean") => AttrType::Bool,
                            _ => AttrType::Text,
                        };
                        if !empty {
                            in_default = Some(id.clone());
                        }
                        decl_order.push(id.clone());
                        decls.insert(
                            id,
                            AttrDecl {
                                title,
                                kind,
                                default: None,
                            },
                        );
                    }
                    b"spells" | b"spell" => return Err(unsupported("dynamic graph (spells)")),
                    b"nodes" if node_depth > 0 => return Err(unsupported("hierarchical graph")),
                    b"node" => {
                        if attrs.contains_key("pid") {
                            return Err(unsupported("hierarchical graph"));
                        }
                        let node = PendingNode {
                            id: required(&attrs, "id", "node").map_err(xml_err)?,
                            label: attrs.get("label").cloned(),
                            ..Default::default()
                        };
                        if empty {
                            pending_nodes.push(node);
                        } else {
                            node_depth += 1;
                            current = Some(node);
                        }
                    }
                    b"attvalue" => {
                        if attrs.contains_key("start") || attrs.contains_key("end") {
                            return Err(unsupported("dynamic attribute values"));
                        }
                        if let Some(node) = current.as_mut() {
                            let key = attrs
                                .get("for")
                                .or_else(|| attrs.get("id"))
                                .cloned()
                                .ok_or_else(|| xml_err("attvalue without `for`".into()))?;
                            let value = required(&attrs, "value", "attvalue").map_err(xml_err)?;
                            node.values.push((key, value));
                        }
                    }
                    b"position" => {
                        if let Some(node) = current.as_mut() {
                            let x = number(&attrs, "x").map_err(xml_err)?;
                            let y = number(&attrs, "y").map_err(xml_err)?;
                            if let (Some(x), Some(y)) = (x, y) {
                                node.position = Some(Point::new(x, y));
                            }
                        }
                    }
                    b"color" => {
                        if let Some(node) = current.as_mut() {
                            node.style.color = viz_color(&attrs).map_err(xml_err)?;
                        }
                    }
                    b"size" => {
                        if let Some(node) = current.as_mut() {
                            node.style.size =
                                number(&attrs, "value").map_err(xml_err)?.filter(|s| *s > 0.0);
                        }
                    }
                    b"shape" => {
                        if let Some(node) = current.as_mut() {
                            node.style.shape = match attrs.get("value").map(String::as_str) {
                                Some("disc") => Some(Shape::Circle),
                                Some("square") => Some(Shape::Square),
                                Some("triangle") => Some(Shape::Triangle),
                                _ => None,
                            };
                        }
                    }
                    b"edge" => {
                        let edge_type = attrs.get("type").map(String::as_str);
                        let declared = if directed { "directed" } else { "undirected" };
                        if edge_type.is_some_and(|t| t != declared) {
                            return Err(unsupported("mixed edge types"));
                        }
                        let label = attrs
                            .get("id")
                            .cloned()
                            .unwrap_or_else(|| format!("#{}", raw_edges.len()));
                        let source = required(&attrs, "source", "edge").map_err(xml_err)?;
                        let target = required(&attrs, "target", "edge").map_err(xml_err)?;
                        let weight = number(&attrs, "weight").map_err(xml_err)?;
                        raw_edges.push((label, source, target, weight));
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let Some(attr_id) = &in_default {
                    let text = t.unescape().map_err(|e| xml_err(e.to_string()))?;
                    if let Some(decl) = decls.get_mut(attr_id) {
                        decl.default = Some(text.into_owned());
                    }
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"attribute" => in_default = None,
                b"attributes" => attr_class = None,
                b"node" => {
                    node_depth = node_depth.saturating_sub(1);
                    if let Some(node) = current.take() {
                        pending_nodes.push(node);
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if !saw_graph {
        return Err(IngestError::Xml {
            position: reader.buffer_position(),
            message: "no <graph> element".into(),
        });
    }

    let mut viz = GexfViz::default();
    let mut nodes = Vec::with_capacity(pending_nodes.len());
    for pending in pending_nodes {
        let id = NodeId::new(pending.id.clone())?;
        let mut attributes = Attributes::new();
        if let Some(label) = pending.label {
            attributes.insert("label".into(), AttributeValue::Text(label));
        }
        let given: HashMap<&str, &str> = pending
            .values
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect();
        for key in &decl_order {
            let decl = &decls[key];
            let raw = match given.get(key.as_str()) {
                Some(v) => *v,
                None => match &decl.default {
                    Some(d) => d.as_str(),
                    None => continue,
                },
            };
            let value = typed_value(decl.kind, raw).ok_or_else(|| {
                IngestError::InvalidAttributeValue {
                    node: pending.id.clone(),
                    attribute: decl.title.clone(),
                    value: raw.to_owned(),
                }
            })?;
            attributes.insert(decl.title.clone(), value);
        }
        if let Some(p) = pending.position {
            viz.positions.insert(id.clone(), p);
        }
        if !pending.style.is_empty() {
            viz.overrides.insert(id.clone(), pending.style);
        }
        nodes.push(Node { id, attributes });
    }

    let known: HashMap<&str, ()> = nodes.iter().map(|n| (n.id.as_str(), ())).collect();
    let mut edges = Vec::with_capacity(raw_edges.len());
    for (label, source, target, weight) in raw_edges {
        if !known.contains_key(source.as_str()) || !known.contains_key(target.as_str()) {
            return Err(IngestError::UnknownNodeReference(label));
        }
        let (source, target) = (NodeId::new(source)?, NodeId::new(target)?);
        edges.push(match weight {
            Some(w) => Edge::weighted(source, target, w)?,
            None => Edge::new(source, target),
        });
    }

    Ok(GexfDocument {
        graph: Graph::build(nodes, edges, directed)?,
        viz,
    })
}

/// Serialize as GEXF 1.3. Text attribute `label` becomes the node label;
/// other attributes are declared with a type inferred from their values
/// (`double`, `boolean`, or `string` when kinds are mixed). With a view,
/// positions and style overrides are written through the `viz` namespace.
pub fn write_gexf(graph: &Graph, view: Option<&ViewState>) -> String {
    let label_is_text = graph
        .nodes()
        .iter()
        .all(|n| !matches!(n.attributes.get("label"), Some(v) if !matches!(v, AttributeValue::Text(_))));

    let mut kinds: BTreeMap<&str, Option<AttrType>> = BTreeMap::new();
    for node in graph.nodes() {
        for (name, value) in &node.attributes {
            if name == "label" && label_is_text {
                continue;
            }
            let kind = match value {
                AttributeValue::Number(_) => AttrType::Number,
                AttributeValue::Bool(_) => AttrType::Bool,
                AttributeValue::Text(_) => AttrType::Text,
            };
            let slot = kinds.entry(name).or_insert(Some(kind));
            if *slot != Some(kind) {
                *slot = None;
            }
        }
    }
    let ids: BTreeMap<&str, usize> = kinds.keys().enumerate().map(|(i, k)| (*k, i)).collect();

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<gexf xmlns=\"http://gexf.net/1.3\" xmlns:viz=\"http://gexf.net/1.3/viz\" version=\"1.3\">\n",
    );
    let edge_type = if graph.is_directed() { "directed" } else { "undirected" };
    let _ = writeln!(out, "  <graph mode=\"static\" defaultedgetype=\"{edge_type}\">");
    if !kinds.is_empty() {
        out.push_str("    <attributes class=\"node\">\n");
        for (name, kind) in &kinds {
            let ty = match kind {
                Some(AttrType::Number) => "double",
                Some(AttrType::Bool) => "boolean",
                _ => "string",
            };
            let _ = writeln!(
                out,
                "      <attribute id=\"{}\" title=\"{}\" type=\"{ty}\"/>",
                ids[name],
                escape(*name)
            );
        }
        out.push_str("    </attributes>\n");
    }

    out.push_str("    <nodes>\n");
    for node in graph.nodes() {
        let _ = write!(out, "      <node id=\"{}\"", escape(node.id.as_str()));
        if label_is_text {
            if let Some(AttributeValue::Text(label)) = node.attributes.get("label") {
                let _ = write!(out, " label=\"{}\"", escape(label.as_str()));
            }
        }
        out.push_str(">\n");
        let values: Vec<_> = node
            .attributes
            .iter()
            .filter(|(name, _)| ids.contains_key(name.as_str()))
            .collect();
        if !values.is_empty() {
            out.push_str("        <attvalues>\n");
            for (name, value) in values {
                let _ = writeln!(
                    out,
                    "          <attvalue for=\"{}\" value=\"{}\"/>",
                    ids[name.as_str()],
                    escape(value.to_string())
                );
            }
            out.push_str("        </attvalues>\n");
        }
        if let Some(view) = view {
            if let Some(p) = view.layout.position(node.id.as_str()) {
                let _ = writeln!(out, "        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>", p.x, p.y);
            }
            if let Some(o) = view.overrides.get(&node.id) {
                if let Some(c) = o.color {
                    let _ = writeln!(out, "        <viz:color r=\"{}\" g=\"{}\" b=\"{}\"/>", c.r, c.g, c.b);
                }
                if let Some(s) = o.size {
                    let _ = writeln!(out, "        <viz:size value=\"{s}\"/>");
                }
                if let Some(shape) = o.shape {
                    let v = match shape {
                        Shape::Circle => "disc",
                        other => other.as_str(),
                    };
                    let _ = writeln!(out, "        <viz:shape value=\"{v}\"/>");
                }
            }
        }
        out.push_str("      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (i, edge) in graph.edges().iter().enumerate() {
        let _ = write!(
            out,
            "      <edge id=\"e{i}\" source=\"{}\" target=\"{}\"",
            escape(edge.source.as_str()),
            escape(edge.target.as_str())
        );
        if let Some(w) = edge.weight {
            let _ = write!(out, " weight=\"{w}\"");
        }
        out.push_str("/>\n");
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

fn unsupported(what: &str) -> IngestError {
    IngestError::UnsupportedGexfFeature(what.to_owned())
}

fn attributes(e: &BytesStart<'_>) -> Result<HashMap<String, String>, String> {
    let mut out = HashMap::new();
    for attr in e.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = String::from_utf8_lossy(attr.key.local_name().as_ref()).into_owned();
        let value = attr.unescape_value().map_err(|e| e.to_string())?.into_owned();
        out.insert(key, value);
    }
    Ok(out)
}

fn required(attrs: &HashMap<String, String>, key: &str, element: &str) -> Result<String, String> {
    attrs
        .get(key)
        .cloned()
        .ok_or_else(|| format!("<{element}> is missing `{key}`"))
}

fn number(attrs: &HashMap<String, String>, key: &str) -> Result<Option<f64>, String> {
    match attrs.get(key) {
        None => Ok(None),
        Some(raw) => match raw.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(format!("`{key}` is not a finite number: `{raw}`")),
        },
    }
}

fn viz_color(attrs: &HashMap<String, String>) -> Result<Option<Rgb>, String> {
    if let Some(hex) = attrs.get("hex") {
        return hex.parse().map(Some);
    }
    let channel = |k: &str| -> Result<Option<u8>, String> {
        attrs
            .get(k)
            .map(|v| v.trim().parse::<u8>().map_err(|_| format!("bad color channel `{v}`")))
            .transpose()
    };
    Ok(match (channel("r")?, channel("g")?, channel("b")?) {
        (Some(r), Some(g), Some(b)) => Some(Rgb::new(r, g, b)),
        _ => None,
    })
}

fn typed_value(kind: AttrType, raw: &str) -> Option<AttributeValue> {
    match kind {
        AttrType::Number => raw
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(AttributeValue::Number),
        AttrType::Bool => match raw.trim() {
            "true" | "1" => Some(AttributeValue::Bool(true)),
            "false" | "0" => Some(AttributeValue::Bool(false)),
            _ => None,
        },
        AttrType::Text => Some(AttributeValue::Text(raw.to_owned())),
    }
}
