//! Versioned JSON documents holding a full graph together with its view.
//!
//! Layout of a version 1 document (keys are written in this order):
//!
//! ```text
//! version      1
//! metadata     {name, created, generator}
//! graph        {directed, nodes: [{id, attributes}], edges: [{source, target, weight?}]}
//! view         {visible, positions: {id: [x, y]}, pinned, overrides: {id: {size?, color?, shape?, label?}},
//!               global_style: {size_by, size_range, color_by, color_scale, shape, label_by?, label_size},
//!               layout?: {temperature, iteration}}
//! ```
//!
//! Map keys are sorted, node and edge arrays keep graph order, and floats
//! use the shortest representation that reads back to the same value, so
//! encoding is deterministic and lossless. Unknown fields are ignored on
//! read. [`validate`] and [`decode`] run the same checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::ser::{Serialize, Serializer};
use serde_json::{Map, Value};
use thiserror::Error;
use uuid::Uuid;

use crate::exploration::{Quantity, Rgb, Shape, StyleMapping, StyleOverride, ViewState};
use crate::graph::{AttributeValue, Attributes, Edge, Graph, Node, NodeId};
use crate::layout::{LayoutParams, LayoutState, Point};

pub const CURRENT_VERSION: i64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapshotError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {reason}")]
    Schema { path: String, reason: String },
    #[error("unsupported snapshot version {0}")]
    UnsupportedVersion(i64),
    #[error("{path}: unknown node `{id}`")]
    DanglingReference { path: String, id: String },
    #[error("view does not match graph: {0}")]
    InconsistentView(String),
}

impl SnapshotError {
    fn schema(path: &str, reason: impl Into<String>) -> Self {
        SnapshotError::Schema {
            path: path.to_owned(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub name: String,
    pub created: DateTime<Utc>,
    pub generator: String,
}

impl Metadata {
    /// Stamped with the current time and this library's name and version.
    pub fn new(name: impl Into<String>) -> Self {
        Metadata {
            name: name.into(),
            created: Utc::now(),
            generator: concat!("nodeglass ", env!("CARGO_PKG_VERSION")).to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub graph: Graph,
    pub view: ViewState,
    pub metadata: Metadata,
}

impl Snapshot {
    pub fn encode(&self) -> Result<Vec<u8>, SnapshotError> {
        encode(&self.graph, &self.view, &self.metadata)
    }
}

/// A random (version 4) UUID in lowercase hyphenated form, as used in
/// share URLs (`#<uuid>`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SnapshotId(Uuid);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a lowercase hyphenated UUIDv4")]
pub struct InvalidSnapshotId(pub String);

impl SnapshotId {
    pub fn new_v4() -> Self {
        SnapshotId(Uuid::new_v4())
    }

    pub fn as_uuid(&self) -> &Uuid {
        &self.0
    }

    /// `#` followed by the id.
    pub fn url_fragment(&self) -> String {
        format!("#{self}")
    }

    pub fn from_url_fragment(fragment: &str) -> Result<Self, InvalidSnapshotId> {
        fragment
            .strip_prefix('#')
            .ok_or_else(|| InvalidSnapshotId(fragment.to_owned()))?
            .parse()
    }
}

impl FromStr for SnapshotId {
    type Err = InvalidSnapshotId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || InvalidSnapshotId(s.to_owned());
        let shape_ok = s.len() == 36
            && s.bytes().enumerate().all(|(i, b)| match i {
                8 | 13 | 18 | 23 => b == b'-',
                _ => b.is_ascii_digit() || (b'a'..=b'f').contains(&b),
            });
        if !shape_ok {
            return Err(bad());
        }
        let uuid = Uuid::parse_str(s).map_err(|_| bad())?;
        if uuid.get_version_num() != 4 || uuid.get_variant() != uuid::Variant::RFC4122 {
            return Err(bad());
        }
        Ok(SnapshotId(uuid))
    }
}

impl fmt::Display for SnapshotId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0.hyphenated(), f)
    }
}

// ---------------------------------------------------------------- encode

/// Serialize `graph` and `view`. Fails if the view mentions nodes the graph
/// lacks, leaves a visible node without a position, or holds a style the
/// reader would reject.
pub fn encode(graph: &Graph, view: &ViewState, metadata: &Metadata) -> Result<Vec<u8>, SnapshotError> {
    view.check_consistency(graph)
        .map_err(SnapshotError::InconsistentView)?;
    view.global_style
        .validate()
        .map_err(|e| SnapshotError::InconsistentView(e.to_string()))?;
    for (id, o) in &view.overrides {
        if o.size.is_some_and(|s| !(s.is_finite() && s > 0.0)) {
            return Err(SnapshotError::InconsistentView(format!(
                "override size for `{id}` must be positive"
            )));
        }
    }
    let t = view.layout.temperature;
    if !(t.is_finite() && t >= 0.0) {
        return Err(SnapshotError::InconsistentView(format!("temperature {t} is not usable")));
    }
    if view.layout.positions.values().any(|p| !p.is_finite()) {
        return Err(SnapshotError::InconsistentView("non-finite position".into()));
    }

    let doc = DocOut {
        version: CURRENT_VERSION,
        metadata: MetaOut {
            name: &metadata.name,
            created: metadata.created.to_rfc3339_opts(SecondsFormat::AutoSi, true),
            generator: &metadata.generator,
        },
        graph: GraphOut {
            directed: graph.is_directed(),
            nodes: graph
                .nodes()
                .iter()
                .map(|n| NodeOut {
                    id: n.id.as_str(),
                    attributes: AttrsOut(&n.attributes),
                })
                .collect(),
            edges: graph
                .edges()
                .iter()
                .map(|e| EdgeOut {
                    source: e.source.as_str(),
                    target: e.target.as_str(),
                    weight: e.weight,
                })
                .collect(),
        },
        view: ViewOut {
            visible: view.visible.iter().map(NodeId::as_str).collect(),
            positions: view
                .layout
                .positions
                .iter()
                .map(|(id, p)| (id.as_str(), [p.x, p.y]))
                .collect(),
            pinned: view.layout.pinned.iter().map(NodeId::as_str).collect(),
            overrides: view
                .overrides
                .iter()
                .map(|(id, o)| {
                    (
                        id.as_str(),
                        OverrideOut {
                            size: o.size,
                            color: o.color.map(Rgb::to_hex),
                            shape: o.shape.map(Shape::as_str),
                            label: o.label.as_deref(),
                        },
                    )
                })
                .collect(),
            global_style: StyleOut {
                size_by: view.global_style.size_by.to_string(),
                size_range: [view.global_style.size_range.0, view.global_style.size_range.1],
                color_by: view.global_style.color_by.to_string(),
                color_scale: view.global_style.color_scale.iter().map(|c| c.to_hex()).collect(),
                shape: view.global_style.shape.as_str(),
                label_by: view.global_style.label_by.as_deref(),
                label_size: view.global_style.label_size,
            },
            layout: LayoutOut {
                temperature: view.layout.temperature,
                iteration: view.layout.iteration,
            },
        },
    };
    Ok(serde_json::to_vec(&doc).expect("snapshot serialization cannot fail"))
}

#[derive(serde::Serialize)]
struct DocOut<'a> {
    version: i64,
    metadata: MetaOut<'a>,
    graph: GraphOut<'a>,
    view: ViewOut<'a>,
}

#[derive(serde::Serialize)]
struct MetaOut<'a> {
    name: &'a str,
    created: String,
    generator: &'a str,
}

#[derive(serde::Serialize)]
struct GraphOut<'a> {
    directed: bool,
    nodes: Vec<NodeOut<'a>>,
    edges: Vec<EdgeOut<'a>>,
}

#[derive(serde::Serialize)]
struct NodeOut<'a> {
    id: &'a str,
    attributes: AttrsOut<'a>,
}

struct AttrsOut<'a>(&'a Attributes);

impl Serialize for AttrsOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| {
            let v = match v {
                AttributeValue::Number(x) => Value::from(*x),
                AttributeValue::Text(t) => Value::from(t.as_str()),
                AttributeValue::Bool(b) => Value::from(*b),
            };
            (k, v)
        }))
    }
}

#[derive(serde::Serialize)]
struct EdgeOut<'a> {
    source: &'a str,
    target: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<f64>,
}

#[derive(serde::Serialize)]
struct ViewOut<'a> {
    visible: Vec<&'a str>,
    positions: BTreeMap<&'a str, [f64; 2]>,
    pinned: Vec<&'a str>,
    overrides: BTreeMap<&'a str, OverrideOut<'a>>,
    global_style: StyleOut<'a>,
    layout: LayoutOut,
}

#[derive(serde::Serialize)]
struct OverrideOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    color: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    shape: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

#[derive(serde::Serialize)]
struct StyleOut<'a> {
    size_by: String,
    size_range: [f64; 2],
    color_by: String,
    color_scale: Vec<String>,
    shape: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label_by: Option<&'a str>,
    label_size: f64,
}

#[derive(serde::Serialize)]
struct LayoutOut {
    temperature: f64,
    iteration: u64,
}

// ---------------------------------------------------------------- decode

pub fn decode(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    check(bytes).map_err(|mut errors| errors.swap_remove(0))
}

/// Every problem [`decode`] would reject, without building anything the
/// caller can keep. An empty list means `decode` succeeds.
pub fn validate(bytes: &[u8]) -> Result<(), Vec<SnapshotError>> {
    check(bytes).map(|_| ())
}

fn check(bytes: &[u8]) -> Result<Snapshot, Vec<SnapshotError>> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| {
        vec![SnapshotError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }]
    })?;
    let mut w = Walker::default();
    let snapshot = w.document(&root);
    match snapshot {
        Some(s) if w.errors.is_empty() => Ok(s),
        _ => {
            debug_assert!(!w.errors.is_empty());
            Err(w.errors)
        }
    }
}

#[derive(Default)]
struct Walker {
    errors: Vec<SnapshotError>,
}

impl Walker {
    fn fail(&mut self, path: &str, reason: impl Into<String>) {
        self.errors.push(SnapshotError::schema(path, reason));
    }

    fn dangling(&mut self, path: String, id: &str) {
        self.errors.push(SnapshotError::DanglingReference {
            path,
            id: id.to_owned(),
        });
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.fail(path, "expected an object");
        }
        o
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Vec<Value>> {
        let a = v.as_array();
        if a.is_none() {
            self.fail(path, "expected an array");
        }
        a
    }

    fn field<'v>(&mut self, o: &'v Map<String, Value>, key: &str, path: &str) -> Option<&'v Value> {
        let v = o.get(key);
        if v.is_none() {
            self.fail(&join(path, key), "missing field");
        }
        v
    }

    /// Absent and `null` both mean "not set".
    fn optional<'v>(o: &'v Map<String, Value>, key: &str) -> Option<&'v Value> {
        o.get(key).filter(|v| !v.is_null())
    }

    fn string<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v str> {
        let s = v.as_str();
        if s.is_none() {
            self.fail(path, "expected a string");
        }
        s
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        let b = v.as_bool();
        if b.is_none() {
            self.fail(path, "expected a boolean");
        }
        b
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = v.as_f64().filter(|x| x.is_finite());
        if x.is_none() {
            self.fail(path, "expected a finite number");
        }
        x
    }

    fn positive(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = self.number(v, path)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.fail(path, "expected a positive number");
            None
        }
    }

    fn node_id(&mut self, v: &Value, path: &str) -> Option<NodeId> {
        let s = self.string(v, path)?;
        let id = NodeId::new(s).ok();
        if id.is_none() {
            self.fail(path, "node id must not be empty");
        }
        id
    }

    fn parsed<T: FromStr<Err = String>>(&mut self, v: &Value, path: &str) -> Option<T> {
        let s = self.string(v, path)?;
        match s.parse() {
            Ok(t) => Some(t),
            Err(reason) => {
                self.fail(path, reason);
                None
            }
        }
    }

    fn document(&mut self, root: &Value) -> Option<Snapshot> {
        let o = self.object(root, "")?;

        let version = self.field(o, "version", "")?;
        let Some(v) = version.as_i64() else {
            self.fail("version", "expected an integer");
            return None;
        };
        if v != CURRENT_VERSION {
            self.errors.push(SnapshotError::UnsupportedVersion(v));
            return None;
        }

        let metadata = self.field(o, "metadata", "").and_then(|m| self.metadata(m));
        let graph = self.field(o, "graph", "").and_then(|g| self.graph(g));
        let view = match (graph.as_ref(), o.get("view")) {
            (Some(g), Some(v)) => self.view(v, g),
            (_, None) => {
                self.fail("view", "missing field");
                None
            }
            (None, Some(_)) => None,
        };
        Some(Snapshot {
            graph: graph?,
            view: view?,
            metadata: metadata?,
        })
    }

    fn metadata(&mut self, v: &Value) -> Option<Metadata> {
        let path = "metadata";
        let o = self.object(v, path)?;
        let name = self.field(o, "name", path).and_then(|v| self.string(v, "metadata.name"));
        let generator = self
            .field(o, "generator", path)
            .and_then(|v| self.string(v, "metadata.generator"));
        let created = self
            .field(o, "created", path)
            .and_then(|v| self.string(v, "metadata.created"))
            .and_then(|s| match parse_utc(s) {
                Some(t) => Some(t),
                None => {
                    self.fail("metadata.created", "expected an ISO-8601 UTC timestamp");
                    None
                }
            });
        Some(Metadata {
            name: name?.to_owned(),
            created: created?,
            generator: generator?.to_owned(),
        })
    }

    fn graph(&mut self, v: &Value) -> Option<Graph> {
        let path = "graph";
        let o = self.object(v, path)?;
        let errors_before = self.errors.len();
        let directed = self
            .field(o, "directed", path)
            .and_then(|v| self.boolean(v, "graph.directed"));

        let mut nodes = Vec::new();
        let mut seen = HashSet::new();
        if let Some(list) = self.field(o, "nodes", path).and_then(|v| self.array(v, "graph.nodes")) {
            nodes.reserve(list.len());
            for (i, item) in list.iter().enumerate() {
                let p = format!("graph.nodes[{i}]");
                if let Some(node) = self.node(item, &p) {
                    if seen.insert(node.id.clone()) {
                        nodes.push(node);
                    } else {
                        self.fail(&format!("{p}.id"), format!("duplicate node id `{}`", node.id));
                    }
                }
            }
        }

        let mut edges = Vec::new();
        if let Some(list) = self.field(o, "edges", path).and_then(|v| self.array(v, "graph.edges")) {
            edges.reserve(list.len());
            for (i, item) in list.iter().enumerate() {
                let p = format!("graph.edges[{i}]");
                if let Some(edge) = self.edge(item, &p, &seen) {
                    edges.push(edge);
                }
            }
        }

        if self.errors.len() > errors_before {
            return None;
        }
        match Graph::build(nodes, edges, directed?) {
            Ok(g) => Some(g),
            Err(e) => {
                self.fail(path, e.to_string());
                None
            }
        }
    }

    fn node(&mut self, v: &Value, path: &str) -> Option<Node> {
        let o = self.object(v, path)?;
        let id = self.field(o, "id", path).and_then(|v| self.node_id(v, &join(path, "id")));
        let attributes = match Self::optional(o, "attributes") {
            None => Some(Attributes::new()),
            Some(a) => self.attributes(a, &join(path, "attributes")),
        };
        Some(Node {
            id: id?,
            attributes: attributes?,
        })
    }

    fn attributes(&mut self, v: &Value, path: &str) -> Option<Attributes> {
        let o = self.object(v, path)?;
        let mut out = Attributes::new();
        let mut ok = true;
        for (k, v) in o {
            let value = match v {
                Value::Bool(b) => Some(AttributeValue::Bool(*b)),
                Value::String(s) => Some(AttributeValue::Text(s.clone())),
                Value::Number(_) => self.number(v, &join(path, k)).map(AttributeValue::Number),
                _ => {
                    self.fail(&join(path, k), "expected a number, string or boolean");
                    None
                }
            };
            match value {
                Some(value) => {
                    out.insert(k.clone(), value);
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn edge(&mut self, v: &Value, path: &str, known: &HashSet<NodeId>) -> Option<Edge> {
        let o = self.object(v, path)?;
        let endpoint = |w: &mut Self, key: &str| {
            let p = join(path, key);
            let id = w.field(o, key, path).and_then(|v| w.node_id(v, &p))?;
            if known.contains(&id) {
                Some(id)
            } else {
                w.dangling(p, id.as_str());
                None
            }
        };
        let source = endpoint(self, "source");
        let target = endpoint(self, "target");
        let weight = match Self::optional(o, "weight") {
            None => Some(None),
            Some(w) => self.positive(w, &join(path, "weight")).map(Some),
        };
        Some(Edge {
            source: source?,
            target: target?,
            weight: weight?,
        })
    }

    fn id_list(&mut self, v: &Value, path: &str, graph: &Graph) -> Option<BTreeSet<NodeId>> {
        let list = self.array(v, path)?;
        let mut out = BTreeSet::new();
        let mut ok = true;
        for (i, item) in list.iter().enumerate() {
            let p = format!("{path}[{i}]");
            match self.node_id(item, &p) {
                Some(id) if !graph.contains(id.as_str()) => {
                    self.dangling(p, id.as_str());
                    ok = false;
                }
                Some(id) => {
                    if !out.insert(id) {
                        self.fail(&p, "duplicate id");
                        ok = false;
                    }
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn view(&mut self, v: &Value, graph: &Graph) -> Option<ViewState> {
        let path = "view";
        let o = self.object(v, path)?;
        let errors_before = self.errors.len();

        let visible = self
            .field(o, "visible", path)
            .and_then(|v| self.id_list(v, "view.visible", graph));
        let pinned = self
            .field(o, "pinned", path)
            .and_then(|v| self.id_list(v, "view.pinned", graph));
        let positions = self
            .field(o, "positions", path)
            .and_then(|v| self.positions(v, graph));
        let overrides = self
            .field(o, "overrides", path)
            .and_then(|v| self.overrides(v, graph));
        let global_style = self
            .field(o, "global_style", path)
            .and_then(|v| self.style(v));
        let defaults = LayoutParams::default();
        let (temperature, iteration) = match Self::optional(o, "layout") {
            None => (Some(defaults.initial_temperature), Some(0)),
            Some(l) => self.layout_progress(l),
        };

        if let (Some(visible), Some(pinned), Some(positions)) = (&visible, &pinned, &positions) {
            for id in visible {
                if !positions.contains_key(id) {
                    self.fail(&format!("view.positions.{id}"), "visible node has no position");
                }
            }
            for id in pinned {
                if !positions.contains_key(id) {
                    self.fail(&format!("view.positions.{id}"), "pinned node has no position");
                }
            }
        }
        if self.errors.len() > errors_before {
            return None;
        }
        Some(ViewState {
            visible: visible?,
            layout: LayoutState {
                positions: positions?,
                pinned: pinned?,
                temperature: temperature?,
                iteration: iteration?,
            },
            global_style: global_style?,
            overrides: overrides?,
            pagerank_cache: None,
        })
    }

    fn positions(&mut self, v: &Value, graph: &Graph) -> Option<BTreeMap<NodeId, Point>> {
        let o = self.object(v, "view.positions")?;
        let mut out = BTreeMap::new();
        let mut ok = true;
        for (k, v) in o {
            let p = join("view.positions", k);
            let Some(id) = self.known_key(k, &p, graph) else {
                ok = false;
                continue;
            };
            let point = self.array(v, &p).and_then(|xy| {
                if xy.len() != 2 {
                    self.fail(&p, "expected 2 elements");
                    return None;
                }
                let x = self.number(&xy[0], &format!("{p}[0]"));
                let y = self.number(&xy[1], &format!("{p}[1]"));
                Some(Point::new(x?, y?))
            });
            match point {
                Some(point) => {
                    out.insert(id, point);
                }
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn known_key(&mut self, key: &str, path: &str, graph: &Graph) -> Option<NodeId> {
        match NodeId::new(key) {
            Err(_) => {
                self.fail(path, "node id must not be empty");
                None
            }
            Ok(id) if !graph.contains(key) => {
                self.dangling(path.to_owned(), id.as_str());
                None
            }
            Ok(id) => Some(id),
        }
    }

    fn overrides(&mut self, v: &Value, graph: &Graph) -> Option<BTreeMap<NodeId, StyleOverride>> {
        let o = self.object(v, "view.overrides")?;
        let mut out = BTreeMap::new();
        let mut ok = true;
        for (k, v) in o {
            let p = join("view.overrides", k);
            let id = self.known_key(k, &p, graph);
            match (id, self.style_override(v, &p)) {
                (Some(id), Some(style)) => {
                    out.insert(id, style);
                }
                _ => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn style_override(&mut self, v: &Value, path: &str) -> Option<StyleOverride> {
        let o = self.object(v, path)?;
        let size = Self::optional(o, "size").map(|v| self.positive(v, &join(path, "size")));
        let color = Self::optional(o, "color").map(|v| self.parsed::<Rgb>(v, &join(path, "color")));
        let shape = Self::optional(o, "shape").map(|v| self.parsed::<Shape>(v, &join(path, "shape")));
        let label = Self::optional(o, "label")
            .map(|v| self.string(v, &join(path, "label")).map(str::to_owned));
        Some(StyleOverride {
            size: size.map_or(Some(None), |s| s.map(Some))?,
            color: color.map_or(Some(None), |c| c.map(Some))?,
            shape: shape.map_or(Some(None), |s| s.map(Some))?,
            label: label.map_or(Some(None), |l| l.map(Some))?,
        })
    }

    fn style(&mut self, v: &Value) -> Option<StyleMapping> {
        let path = "view.global_style";
        let o = self.object(v, path)?;
        let size_by = self
            .field(o, "size_by", path)
            .and_then(|v| self.parsed::<Quantity>(v, "view.global_style.size_by"));
        let size_range = self.field(o, "size_range", path).and_then(|v| {
            let p = "view.global_style.size_range";
            let a = self.array(v, p)?;
            if a.len() != 2 {
                self.fail(p, "expected 2 elements");
                return None;
            }
            let lo = self.positive(&a[0], &format!("{p}[0]"));
            let hi = self.positive(&a[1], &format!("{p}[1]"));
            let (lo, hi) = (lo?, hi?);
            if lo > hi {
                self.fail(p, "minimum exceeds maximum");
                return None;
            }
            Some((lo, hi))
        });
        let color_by = self
            .field(o, "color_by", path)
            .and_then(|v| self.parsed::<Quantity>(v, "view.global_style.color_by"));
        let color_scale = self.field(o, "color_scale", path).and_then(|v| {
            let p = "view.global_style.color_scale";
            let a = self.array(v, p)?;
            if a.is_empty() {
                self.fail(p, "expected at least 1 element");
                return None;
            }
            let stops: Vec<Option<Rgb>> = a
                .iter()
                .enumerate()
                .map(|(i, c)| self.parsed::<Rgb>(c, &format!("{p}[{i}]")))
                .collect();
            stops.into_iter().collect::<Option<Vec<_>>>()
        });
        let shape = self
            .field(o, "shape", path)
            .and_then(|v| self.parsed::<Shape>(v, "view.global_style.shape"));
        let label_by = match Self::optional(o, "label_by") {
            None => Some(None),
            Some(v) => self
                .string(v, "view.global_style.label_by")
                .map(|s| Some(s.to_owned())),
        };
        let label_size = self
            .field(o, "label_size", path)
            .and_then(|v| self.positive(v, "view.global_style.label_size"));
        Some(StyleMapping {
            size_by: size_by?,
            size_range: size_range?,
            color_by: color_by?,
            color_scale: color_scale?,
            shape: shape?,
            label_by: label_by?,
            label_size: label_size?,
        })
    }

    fn layout_progress(&mut self, v: &Value) -> (Option<f64>, Option<u64>) {
        let path = "view.layout";
        let Some(o) = self.object(v, path) else {
            return (None, None);
        };
        let temperature = self.field(o, "temperature", path).and_then(|v| {
            let t = self.number(v, "view.layout.temperature")?;
            if t < 0.0 {
                self.fail("view.layout.temperature", "expected a non-negative number");
                return None;
            }
            Some(t)
        });
        let iteration = self.field(o, "iteration", path).and_then(|v| {
            let i = v.as_u64();
            if i.is_none() {
                self.fail("view.layout.iteration", "expected a non-negative integer");
            }
            i
        });
        (temperature, iteration)
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

/// RFC 3339 with a `Z` or zero offset.
fn parse_utc(s: &str) -> Option<DateTime<Utc>> {
    let t = DateTime::parse_from_rfc3339(s).ok()?;
    (t.offset().local_minus_utc() == 0).then(|| t.with_timezone(&Utc))
}
