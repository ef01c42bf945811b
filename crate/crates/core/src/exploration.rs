//! Exploration state: which nodes are visible, where they sit, how they are
//! styled, and the operations that grow or shrink the visible subgraph.
//!
//! PageRank is computed over the full graph the first time anything needs
//! it and cached in the view. Every ordering this module produces breaks
//! ties by ascending node id, so the same state always lists nodes the same
//! way.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algorithms::{self, AlgorithmError, PageRankParams, ScoreMap};
use crate::graph::{AttributeValue, Attributes, DegreeMode, Edge, Graph, GraphError, NodeId};
use crate::layout::{self, LayoutError, LayoutParams, LayoutState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExplorationError {
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("node `{0}` is not visible")]
    NotVisible(NodeId),
    #[error("no node has attribute `{0}`")]
    UnknownAttribute(String),
    #[error("expansion count must be positive")]
    ZeroExpansion,
    #[error("invalid style: {0}")]
    InvalidStyle(&'static str),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}

impl From<GraphError> for ExplorationError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::UnknownNode(id) => ExplorationError::UnknownNode(id),
            other => ExplorationError::Layout(LayoutError::Graph(other)),
        }
    }
}

/// What a size or color mapping is driven by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    PageRank,
    Degree,
    Attribute(String),
    Constant,
}

impl FromStr for Quantity {
    type Err = String;

    /// `pagerank`, `degree`, `constant` or `attribute:<name>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pagerank" => Ok(Quantity::PageRank),
            "degree" => Ok(Quantity::Degree),
            "constant" => Ok(Quantity::Constant),
            _ => match s.strip_prefix("attribute:") {
                Some(name) if !name.is_empty() => Ok(Quantity::Attribute(name.to_owned())),
                _ => Err(format!("unknown quantity `{s}`")),
            },
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::PageRank => f.write_str("pagerank"),
            Quantity::Degree => f.write_str("degree"),
            Quantity::Constant => f.write_str("constant"),
            Quantity::Attribute(name) => write!(f, "attribute:{name}"),
        }
    }
}

/// Ordering key for neighbour tables, expansion and the data sheet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SortKey {
    PageRank,
    Degree,
    Attribute(String),
}

impl FromStr for SortKey {
    type Err = String;

    /// `pagerank`, `degree` or `attribute:<name>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pagerank" => Ok(SortKey::PageRank),
            "degree" => Ok(SortKey::Degree),
            _ => match s.strip_prefix("attribute:") {
                Some(name) if !name.is_empty() => Ok(SortKey::Attribute(name.to_owned())),
                _ => Err(format!("unknown sort key `{s}`")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Rgb { r, g, b }
    }

    pub fn to_hex(self) -> String {
        format!("#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

impl FromStr for Rgb {
    type Err = String;

    /// `#rrggbb`, either case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let hex = s
            .strip_prefix('#')
            .filter(|h| h.len() == 6 && h.bytes().all(|b| b.is_ascii_hexdigit()))
            .ok_or_else(|| format!("expected #rrggbb, got `{s}`"))?;
        let byte = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).expect("checked hex");
        Ok(Rgb::new(byte(0), byte(2), byte(4)))
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Continuous color produced by interpolating a color scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Color {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Color {
    pub fn to_rgb(self) -> Rgb {
        let q = |c: f64| c.round().clamp(0.0, 255.0) as u8;
        Rgb::new(q(self.r), q(self.g), q(self.b))
    }
}

impl From<Rgb> for Color {
    fn from(c: Rgb) -> Self {
        Color {
            r: c.r as f64,
            g: c.g as f64,
            b: c.b as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shape {
    #[default]
    Circle,
    Square,
    Triangle,
}

impl Shape {
    pub fn as_str(self) -> &'static str {
        match self {
            Shape::Circle => "circle",
            Shape::Square => "square",
            Shape::Triangle => "triangle",
        }
    }
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circle" => Ok(Shape::Circle),
            "square" => Ok(Shape::Square),
            "triangle" => Ok(Shape::Triangle),
            _ => Err(format!("unknown shape `{s}`")),
        }
    }
}

/// Global rule turning node quantities into visual size and color.
#[derive(Debug, Clone, PartialEq)]
pub struct StyleMapping {
    pub size_by: Quantity,
    /// `(min, max)`; a constant mapping uses `min`.
    pub size_range: (f64, f64),
    pub color_by: Quantity,
    /// Stops spread evenly over the observed range of `color_by`.
    pub color_scale: Vec<Rgb>,
    pub shape: Shape,
    /// Attribute whose value becomes the node label.
    pub label_by: Option<String>,
    pub label_size: f64,
}

impl Default for StyleMapping {
    fn default() -> Self {
        StyleMapping {
            size_by: Quantity::PageRank,
            size_range: (3.0, 15.0),
            color_by: Quantity::Constant,
            color_scale: vec![Rgb::new(0x4a, 0x90, 0xd9), Rgb::new(0xd9, 0x4a, 0x4a)],
            shape: Shape::Circle,
            label_by: None,
            label_size: 12.0,
        }
    }
}

impl StyleMapping {
    pub fn validate(&self) -> Result<(), ExplorationError> {
        let (lo, hi) = self.size_range;
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(ExplorationError::InvalidStyle(
                "size range must satisfy 0 < min <= max",
            ));
        }
        if self.color_scale.is_empty() {
            return Err(ExplorationError::InvalidStyle("color scale needs at least one stop"));
        }
        if !(self.label_size.is_finite() && self.label_size > 0.0) {
            return Err(ExplorationError::InvalidStyle("label size must be positive"));
        }
        Ok(())
    }
}

/// Per-node style; each set field wins over the global mapping.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StyleOverride {
    pub size: Option<f64>,
    pub color: Option<Rgb>,
    pub shape: Option<Shape>,
    pub label: Option<String>,
}

impl StyleOverride {
    pub fn is_empty(&self) -> bool {
        self.size.is_none() && self.color.is_none() && self.shape.is_none() && self.label.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedStyle {
    pub size: f64,
    pub color: Color,
    pub shape: Shape,
    pub label: Option<String>,
}

/// A row of the neighbour table or the data sheet.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborCandidate {
    pub id: NodeId,
    pub pagerank: f64,
    pub degree: usize,
    pub attributes: Attributes,
    pub already_visible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Page {
    pub offset: usize,
    pub limit: usize,
}

impl Page {
    pub fn all() -> Self {
        Page {
            offset: 0,
            limit: usize::MAX,
        }
    }
}

/// Equality ignores `pagerank_cache`, which is derived from the graph.
#[derive(Debug, Clone)]
pub struct ViewState {
    pub visible: BTreeSet<NodeId>,
    pub layout: LayoutState,
    pub global_style: StyleMapping,
    pub overrides: BTreeMap<NodeId, StyleOverride>,
    pub pagerank_cache: Option<ScoreMap>,
}

impl PartialEq for ViewState {
    fn eq(&self, other: &Self) -> bool {
        self.visible == other.visible
            && self.layout == other.layout
            && self.global_style == other.global_style
            && self.overrides == other.overrides
    }
}

impl ViewState {
    /// Nothing visible yet.
    pub fn new(params: &LayoutParams) -> Self {
        ViewState {
            visible: BTreeSet::new(),
            layout: LayoutState::empty(params),
            global_style: StyleMapping::default(),
            overrides: BTreeMap::new(),
            pagerank_cache: None,
        }
    }

    /// Every node visible at a seeded random position.
    pub fn whole_graph(graph: &Graph, params: &LayoutParams) -> Self {
        let ids: Vec<&NodeId> = graph.nodes().iter().map(|n| &n.id).collect();
        ViewState {
            visible: ids.iter().map(|&id| id.clone()).collect(),
            layout: layout::seed_positions(ids, params),
            ..ViewState::new(params)
        }
    }

    pub fn is_visible(&self, id: &str) -> bool {
        self.visible.contains(id)
    }

    pub fn visible_edges<'g>(&self, graph: &'g Graph) -> Result<Vec<&'g Edge>, ExplorationError> {
        Ok(graph.induced_edges(&self.visible)?)
    }

    /// Make `ids` visible. Nodes seen before get their old position back;
    /// the rest are seeded at random. Returns the newly visible ids.
    pub fn show<'a, I>(
        &mut self,
        graph: &Graph,
        ids: I,
        params: &LayoutParams,
    ) -> Result<Vec<NodeId>, ExplorationError>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        let ids = check_known(graph, ids)?;
        let mut added = Vec::new();
        for id in ids {
            if !self.layout.positions.contains_key(&id) {
                let at = layout::random_position(&id, params);
                self.layout.positions.insert(id.clone(), at);
            }
            if self.visible.insert(id.clone()) {
                added.push(id);
            }
        }
        Ok(added)
    }

    /// Hide `ids`. Positions, pins and overrides are kept.
    pub fn hide<'a, I>(&mut self, graph: &Graph, ids: I) -> Result<(), ExplorationError>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        for id in check_known(graph, ids)? {
            self.visible.remove(&id);
        }
        Ok(())
    }

    /// Cached full-graph PageRank, computed with default parameters on
    /// first use.
    pub fn pagerank(&mut self, graph: &Graph) -> Result<&ScoreMap, ExplorationError> {
        if self.pagerank_cache.is_none() {
            let pr = algorithms::pagerank(graph, &PageRankParams::default())?;
            self.pagerank_cache = Some(pr.scores);
        }
        Ok(self.pagerank_cache.as_ref().expect("just filled"))
    }

    /// All neighbours of a visible node, ordered by `key`.
    pub fn neighbor_candidates(
        &mut self,
        graph: &Graph,
        id: &NodeId,
        key: &SortKey,
        descending: bool,
    ) -> Result<Vec<NeighborCandidate>, ExplorationError> {
        let anchor = graph
            .index_of(id.as_str())
            .ok_or_else(|| ExplorationError::UnknownNode(id.clone()))?;
        if !self.is_visible(id.as_str()) {
            return Err(ExplorationError::NotVisible(id.clone()));
        }
        check_sort_key(graph, key)?;
        let neighbors = graph.neighbor_indices(anchor);
        self.rows(graph, neighbors, key, descending)
    }

    /// Reveal the top `k` hidden neighbours of `id` by `key` (descending),
    /// placing newcomers next to `id`. Returns the ids added, in rank order.
    pub fn expand(
        &mut self,
        graph: &Graph,
        id: &NodeId,
        k: usize,
        key: &SortKey,
        params: &LayoutParams,
    ) -> Result<Vec<NodeId>, ExplorationError> {
        if k == 0 {
            return Err(ExplorationError::ZeroExpansion);
        }
        let chosen: Vec<NodeId> = self
            .neighbor_candidates(graph, id, key, true)?
            .into_iter()
            .filter(|c| !c.already_visible)
            .take(k)
            .map(|c| c.id)
            .collect();
        let anchor = self
            .layout
            .position(id.as_str())
            .ok_or_else(|| LayoutError::MissingPosition(id.clone()))?;
        for new in &chosen {
            if !self.layout.positions.contains_key(new) {
                let at = layout::position_near(id, anchor, new, params);
                self.layout.positions.insert(new.clone(), at);
            }
            self.visible.insert(new.clone());
        }
        Ok(chosen)
    }

    /// Every node of the graph, visible or not, sorted and paginated.
    pub fn data_sheet(
        &mut self,
        graph: &Graph,
        key: &SortKey,
        descending: bool,
        page: Page,
    ) -> Result<Vec<NeighborCandidate>, ExplorationError> {
        check_sort_key(graph, key)?;
        if graph.is_empty() {
            return Ok(Vec::new());
        }
        let rows = self.rows(graph, (0..graph.node_count()).collect(), key, descending)?;
        Ok(rows.into_iter().skip(page.offset).take(page.limit).collect())
    }

    pub fn set_override(
        &mut self,
        graph: &Graph,
        id: &NodeId,
        style: StyleOverride,
    ) -> Result<(), ExplorationError> {
        if !graph.contains(id.as_str()) {
            return Err(ExplorationError::UnknownNode(id.clone()));
        }
        if let Some(size) = style.size {
            if !(size.is_finite() && size > 0.0) {
                return Err(ExplorationError::InvalidStyle("override size must be positive"));
            }
        }
        if style.is_empty() {
            self.overrides.remove(id);
        } else {
            self.overrides.insert(id.clone(), style);
        }
        Ok(())
    }

    /// Precompute the quantity ranges needed to style many nodes.
    pub fn style_resolver<'v>(
        &'v mut self,
        graph: &'v Graph,
    ) -> Result<StyleResolver<'v>, ExplorationError> {
        self.global_style.validate()?;
        let needs_pagerank = [&self.global_style.size_by, &self.global_style.color_by]
            .contains(&&Quantity::PageRank);
        if needs_pagerank && !graph.is_empty() {
            self.pagerank(graph)?;
        }
        let view: &ViewState = self;
        let size = QuantityScale::new(graph, view, &view.global_style.size_by);
        let color = QuantityScale::new(graph, view, &view.global_style.color_by);
        Ok(StyleResolver {
            graph,
            view,
            size,
            color,
        })
    }

    pub fn resolve_style(
        &mut self,
        graph: &Graph,
        id: &NodeId,
    ) -> Result<RenderedStyle, ExplorationError> {
        self.style_resolver(graph)?.resolve(id)
    }

    /// Every id the view mentions exists in `graph`, and every visible node
    /// has a position.
    pub fn check_consistency(&self, graph: &Graph) -> Result<(), String> {
        let unknown = |what: &str, id: &NodeId| format!("{what} references unknown node `{id}`");
        for id in &self.visible {
            if !graph.contains(id.as_str()) {
                return Err(unknown("visible set", id));
            }
            if !self.layout.positions.contains_key(id) {
                return Err(format!("visible node `{id}` has no position"));
            }
        }
        for id in self.layout.positions.keys() {
            if !graph.contains(id.as_str()) {
                return Err(unknown("positions", id));
            }
        }
        for id in &self.layout.pinned {
            if !self.layout.positions.contains_key(id) {
                return Err(format!("pinned node `{id}` has no position"));
            }
        }
        for id in self.overrides.keys() {
            if !graph.contains(id.as_str()) {
                return Err(unknown("overrides", id));
            }
        }
        Ok(())
    }

    fn rows(
        &mut self,
        graph: &Graph,
        indices: Vec<usize>,
        key: &SortKey,
        descending: bool,
    ) -> Result<Vec<NeighborCandidate>, ExplorationError> {
        let scores = self.pagerank(graph)?.clone();
        let mut rows: Vec<NeighborCandidate> = indices
            .into_iter()
            .map(|i| {
                let node = &graph.nodes()[i];
                NeighborCandidate {
                    id: node.id.clone(),
                    pagerank: scores.get(node.id.as_str()).unwrap_or(0.0),
                    degree: graph.degree_of(i, DegreeMode::Total),
                    attributes: node.attributes.clone(),
                    already_visible: self.visible.contains(&node.id),
                }
            })
            .collect();
        sort_rows(&mut rows, key, descending);
        Ok(rows)
    }
}

/// Sort by `key`, ties by ascending id. Rows lacking the sort attribute go
/// last in either direction.
pub fn sort_rows(rows: &mut [NeighborCandidate], key: &SortKey, descending: bool) {
    let directed = |o: Ordering| if descending { o.reverse() } else { o };
    rows.sort_by(|a, b| {
        let primary = match key {
            SortKey::PageRank => directed(a.pagerank.total_cmp(&b.pagerank)),
            SortKey::Degree => directed(a.degree.cmp(&b.degree)),
            SortKey::Attribute(name) => {
                match (a.attributes.get(name), b.attributes.get(name)) {
                    (Some(x), Some(y)) => directed(compare_values(x, y)),
                    (Some(_), None) => Ordering::Less,
                    (None, Some(_)) => Ordering::Greater,
                    (None, None) => Ordering::Equal,
                }
            }
        };
        primary.then_with(|| a.id.cmp(&b.id))
    });
}

/// Booleans < numbers < text; natural order within each kind.
fn compare_values(a: &AttributeValue, b: &AttributeValue) -> Ordering {
    use AttributeValue::*;
    let rank = |v: &AttributeValue| match v {
        Bool(_) => 0,
        Number(_) => 1,
        Text(_) => 2,
    };
    match (a, b) {
        (Bool(x), Bool(y)) => x.cmp(y),
        (Number(x), Number(y)) => x.total_cmp(y),
        (Text(x), Text(y)) => x.cmp(y),
        _ => rank(a).cmp(&rank(b)),
    }
}

fn check_known<'a, I>(graph: &Graph, ids: I) -> Result<Vec<NodeId>, ExplorationError>
where
    I: IntoIterator<Item = &'a NodeId>,
{
    ids.into_iter()
        .map(|id| {
            if graph.contains(id.as_str()) {
                Ok(id.clone())
            } else {
                Err(ExplorationError::UnknownNode(id.clone()))
            }
        })
        .collect()
}

fn check_sort_key(graph: &Graph, key: &SortKey) -> Result<(), ExplorationError> {
    if let SortKey::Attribute(name) = key {
        if !graph.nodes().iter().any(|n| n.attributes.contains_key(name)) {
            return Err(ExplorationError::UnknownAttribute(name.clone()));
        }
    }
    Ok(())
}

/// Per-node values of a [`Quantity`] and their observed extremes over the
/// whole graph.
#[derive(Debug)]
struct QuantityScale {
    values: Vec<Option<f64>>,
    lo: f64,
    hi: f64,
}

impl QuantityScale {
    fn new(graph: &Graph, view: &ViewState, quantity: &Quantity) -> Self {
        let values: Vec<Option<f64>> = graph
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, node)| match quantity {
                Quantity::Constant => None,
                Quantity::Degree => Some(graph.degree_of(i, DegreeMode::Total) as f64),
                Quantity::PageRank => view
                    .pagerank_cache
                    .as_ref()
                    .and_then(|s| s.get(node.id.as_str())),
                Quantity::Attribute(name) => node.attributes.get(name).and_then(|v| v.as_f64()),
            })
            .collect();
        let (lo, hi) = values
            .iter()
            .flatten()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        QuantityScale { values, lo, hi }
    }

    /// Position of node `i` within the observed range, in [0, 1]. Missing
    /// values and degenerate ranges map to 0.
    fn unit(&self, i: usize) -> f64 {
        match self.values[i] {
            Some(v) if self.hi > self.lo => ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0),
            _ => 0.0,
        }
    }
}

pub struct StyleResolver<'v> {
    graph: &'v Graph,
    view: &'v ViewState,
    size: QuantityScale,
    color: QuantityScale,
}

impl StyleResolver<'_> {
    pub fn resolve(&self, id: &NodeId) -> Result<RenderedStyle, ExplorationError> {
        let i = self
            .graph
            .index_of(id.as_str())
            .ok_or_else(|| ExplorationError::UnknownNode(id.clone()))?;
        let style = &self.view.global_style;
        let (lo, hi) = style.size_range;
        let size = lo + self.size.unit(i) * (hi - lo);
        let color = interpolate(&style.color_scale, self.color.unit(i));
        let label = style.label_by.as_ref().and_then(|name| {
            self.graph.nodes()[i]
                .attributes
                .get(name)
                .map(|v| v.to_string())
        });
        let mapped = RenderedStyle {
            size: size.clamp(lo, hi),
            color,
            shape: style.shape,
            label,
        };
        Ok(match self.view.overrides.get(id) {
            None => mapped,
            Some(o) => RenderedStyle {
                size: o.size.unwrap_or(mapped.size),
                color: o.color.map(Color::from).unwrap_or(mapped.color),
                shape: o.shape.unwrap_or(mapped.shape),
                label: o.label.clone().or(mapped.label),
            },
        })
    }
}

/// Piecewise-linear RGB interpolation over evenly spaced stops.
fn interpolate(stops: &[Rgb], t: f64) -> Color {
    if stops.len() == 1 {
        return stops[0].into();
    }
    let scaled = t.clamp(0.0, 1.0) * (stops.len() - 1) as f64;
    let seg = (scaled.floor() as usize).min(stops.len() - 2);
    let f = scaled - seg as f64;
    let (a, b) = (Color::from(stops[seg]), Color::from(stops[seg + 1]));
    Color {
        r: a.r + (b.r - a.r) * f,
        g: a.g + (b.g - a.g) * f,
        b: a.b + (b.b - a.b) * f,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Node;

    fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn graph(ids: &[&str], edges: &[(&str, &str)], directed: bool) -> Graph {
        Graph::build(
            ids.iter().map(|s| Node::new(id(s))).collect(),
            edges.iter().map(|(a, b)| Edge::new(id(a), id(b))).collect(),
            directed,
        )
        .unwrap()
    }

    fn star() -> Graph {
        graph(
            &["c", "l1", "l2", "l3", "l4"],
            &[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")],
            false,
        )
    }

    fn only(graph: &Graph, visible: &[&str], params: &LayoutParams) -> ViewState {
        let mut v = ViewState::new(params);
        let ids: Vec<NodeId> = visible.iter().map(|s| id(s)).collect();
        v.show(graph, &ids, params).unwrap();
        v
    }

    #[test]
    fn hide_then_show_restores_position() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        v.layout.positions.insert(id("l1"), layout::Point::new(1.0, 2.0));
        v.hide(&g, &[id("l1")]).unwrap();
        assert!(!v.is_visible("l1"));
        v.show(&g, &[id("l1")], &p).unwrap();
        assert_eq!(v.layout.position("l1"), Some(layout::Point::new(1.0, 2.0)));
    }

    #[test]
    fn show_is_idempotent() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        let before = v.clone();
        assert!(v.show(&g, &[id("c")], &p).unwrap().is_empty());
        assert_eq!(v, before);
    }

    #[test]
    fn hide_all() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        let all: Vec<NodeId> = g.nodes().iter().map(|n| n.id.clone()).collect();
        v.hide(&g, &all).unwrap();
        assert!(v.visible.is_empty());
        assert!(v.visible_edges(&g).unwrap().is_empty());
        assert!(matches!(
            v.hide(&g, &[id("nope")]),
            Err(ExplorationError::UnknownNode(_))
        ));
    }

    #[test]
    fn candidates_all_visible() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        let c = v
            .neighbor_candidates(&g, &id("c"), &SortKey::PageRank, true)
            .unwrap();
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|r| r.already_visible));
    }

    #[test]
    fn candidates_tie_break_by_id() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")], true);
        let p = LayoutParams::default();
        let mut v = only(&g, &["b"], &p);
        let c = v
            .neighbor_candidates(&g, &id("b"), &SortKey::Degree, true)
            .unwrap();
        let ids: Vec<_> = c.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
        assert!(c.iter().all(|r| r.degree == 1 && !r.already_visible));
    }

    #[test]
    fn candidates_errors() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = only(&g, &["c"], &p);
        assert!(matches!(
            v.neighbor_candidates(&g, &id("zz"), &SortKey::Degree, true),
            Err(ExplorationError::UnknownNode(_))
        ));
        assert!(matches!(
            v.neighbor_candidates(&g, &id("l1"), &SortKey::Degree, true),
            Err(ExplorationError::NotVisible(_))
        ));
        assert_eq!(
            v.neighbor_candidates(&g, &id("c"), &SortKey::Attribute("x".into()), true),
            Err(ExplorationError::UnknownAttribute("x".into()))
        );
    }

    #[test]
    fn expand_saturates_and_seeds_near_anchor() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = only(&g, &["c"], &p);
        let added = v.expand(&g, &id("c"), 10, &SortKey::Degree, &p).unwrap();
        assert_eq!(added.len(), 4);
        assert_eq!(v.visible.len(), 5);
        let anchor = v.layout.position("c").unwrap();
        for leaf in &added {
            let d = v.layout.position(leaf.as_str()).unwrap().distance(anchor);
            assert!(d <= 0.02 * 1000.0 + 1e-9, "{leaf} at {d}");
        }
        assert_eq!(
            v.expand(&g, &id("c"), 0, &SortKey::Degree, &p),
            Err(ExplorationError::ZeroExpansion)
        );
    }

    #[test]
    fn data_sheet_pages() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = only(&g, &["l2"], &p);
        let all = v.data_sheet(&g, &SortKey::Degree, true, Page::all()).unwrap();
        assert_eq!(all.len(), 5);
        assert_eq!(all[0].id.as_str(), "c");
        assert!(all.iter().find(|r| r.id.as_str() == "l2").unwrap().already_visible);
        let beyond = v
            .data_sheet(&g, &SortKey::Degree, true, Page { offset: 9, limit: 3 })
            .unwrap();
        assert!(beyond.is_empty());
        let mid = v
            .data_sheet(&g, &SortKey::Degree, false, Page { offset: 1, limit: 2 })
            .unwrap();
        let ids: Vec<_> = mid.iter().map(|r| r.id.as_str()).collect();
        assert_eq!(ids, ["l2", "l3"]);
    }

    #[test]
    fn attribute_sort_puts_missing_last() {
        let g = Graph::build(
            vec![
                Node::new(id("a")).with_attribute("year", AttributeValue::Number(2001.0)),
                Node::new(id("b")),
                Node::new(id("c")).with_attribute("year", AttributeValue::Number(2019.0)),
            ],
            vec![],
            false,
        )
        .unwrap();
        let p = LayoutParams::default();
        let mut v = ViewState::new(&p);
        let key = SortKey::Attribute("year".into());
        for (desc, want) in [(true, ["c", "a", "b"]), (false, ["a", "c", "b"])] {
            let rows = v.data_sheet(&g, &key, desc, Page::all()).unwrap();
            let ids: Vec<_> = rows.iter().map(|r| r.id.as_str()).collect();
            assert_eq!(ids, want);
        }
    }

    #[test]
    fn constant_size_and_override_precedence() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        v.global_style.size_by = Quantity::Constant;
        let s = v.resolve_style(&g, &id("l1")).unwrap();
        assert_eq!(s.size, 3.0);

        v.global_style.size_by = Quantity::Degree;
        let red = Rgb::new(255, 0, 0);
        v.set_override(
            &g,
            &id("c"),
            StyleOverride {
                color: Some(red),
                ..Default::default()
            },
        )
        .unwrap();
        let s = v.resolve_style(&g, &id("c")).unwrap();
        assert_eq!(s.size, 15.0);
        assert_eq!(s.color.to_rgb(), red);
        assert_eq!(s.shape, Shape::Circle);
    }

    #[test]
    fn degree_sizing_on_star() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        v.global_style.size_by = Quantity::Degree;
        // degrees: centre 4, leaves 1 => linear map hits both ends of the range
        let r = v.style_resolver(&g).unwrap();
        assert_eq!(r.resolve(&id("c")).unwrap().size, 15.0);
        for leaf in ["l1", "l2", "l3", "l4"] {
            assert_eq!(r.resolve(&id(leaf)).unwrap().size, 3.0);
        }
    }

    #[test]
    fn missing_attribute_maps_to_minimum() {
        let g = Graph::build(
            vec![
                Node::new(id("a")).with_attribute("w", AttributeValue::Number(1.0)),
                Node::new(id("b")).with_attribute("w", AttributeValue::Number(3.0)),
                Node::new(id("c")),
            ],
            vec![],
            false,
        )
        .unwrap();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        v.global_style.size_by = Quantity::Attribute("w".into());
        v.global_style.color_by = Quantity::Attribute("w".into());
        v.global_style.label_by = Some("w".into());
        let r = v.style_resolver(&g).unwrap();
        let c = r.resolve(&id("c")).unwrap();
        assert_eq!(c.size, 3.0);
        assert_eq!(c.color.to_rgb(), Rgb::new(0x4a, 0x90, 0xd9));
        assert_eq!(c.label, None);
        let b = r.resolve(&id("b")).unwrap();
        assert_eq!(b.color.to_rgb(), Rgb::new(0xd9, 0x4a, 0x4a));
        assert_eq!(b.label.as_deref(), Some("3"));
    }

    #[test]
    fn interpolation_midpoints() {
        let stops = [Rgb::new(0, 0, 0), Rgb::new(200, 100, 0), Rgb::new(200, 200, 200)];
        assert_eq!(interpolate(&stops, 0.25), Color { r: 100.0, g: 50.0, b: 0.0 });
        assert_eq!(interpolate(&stops, 1.0), Color::from(stops[2]));
        assert_eq!(interpolate(&stops[..1], 0.7), Color::from(stops[0]));
    }

    #[test]
    fn parse_helpers() {
        assert_eq!("#FF8000".parse::<Rgb>().unwrap(), Rgb::new(255, 128, 0));
        assert!("ff8000".parse::<Rgb>().is_err());
        assert!("#ff80".parse::<Rgb>().is_err());
        assert_eq!(Rgb::new(1, 2, 255).to_hex(), "#0102ff");
        assert_eq!("attribute:year".parse::<SortKey>().unwrap(), SortKey::Attribute("year".into()));
        assert!("attribute:".parse::<SortKey>().is_err());
        assert_eq!("square".parse::<Shape>().unwrap(), Shape::Square);
    }

    #[test]
    fn invalid_styles() {
        let g = star();
        let p = LayoutParams::default();
        let mut v = ViewState::whole_graph(&g, &p);
        assert!(v
            .set_override(&g, &id("c"), StyleOverride { size: Some(-1.0), ..Default::default() })
            .is_err());
        v.global_style.color_scale.clear();
        assert!(matches!(
            v.resolve_style(&g, &id("c")),
            Err(ExplorationError::InvalidStyle(_))
        ));
    }
}
