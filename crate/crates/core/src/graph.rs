//! Immutable node/edge store with attribute maps and an incidence index.
//!
//! A [`Graph`] is built once through [`Graph::build`] and never mutated
//! afterwards. Exploration state (what is visible, where it sits, how it is
//! styled) lives in [`crate::exploration::ViewState`] instead.
//!
//! Node ids are opaque text. Dense `usize` indices are used internally for
//! speed and are exposed only through crate-private helpers.

use std::borrow::Borrow;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Errors raised while building or querying a [`Graph`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("node id must not be empty")]
    EmptyNodeId,
    #[error("duplicate node id `{0}`")]
    DuplicateNodeId(NodeId),
    #[error("edge {edge} references missing node `{missing}`")]
    DanglingEndpoint { edge: usize, missing: NodeId },
    #[error("unknown node `{0}`")]
    UnknownNode(NodeId),
    #[error("attribute values must be finite numbers, got {0}")]
    NonFiniteNumber(f64),
    #[error("edge weight must be a finite positive number, got {0}")]
    InvalidWeight(f64),
}

/// Opaque, non-empty node identifier. Compared by exact byte equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(value: impl Into<String>) -> Result<Self, GraphError> {
        let value = value.into();
        if value.is_empty() {
            return Err(GraphError::EmptyNodeId);
        }
        Ok(NodeId(value))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NodeId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for NodeId {
    type Error = GraphError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        NodeId::new(value)
    }
}

/// A scalar attribute value. Numbers are always finite.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Number(f64),
    Text(String),
    Bool(bool),
}

impl AttributeValue {
    pub fn number(value: f64) -> Result<Self, GraphError> {
        if value.is_finite() {
            Ok(AttributeValue::Number(value))
        } else {
            Err(GraphError::NonFiniteNumber(value))
        }
    }

    /// Numeric view used by style mapping and sorting: numbers as-is,
    /// booleans as 0/1, text has no numeric value.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttributeValue::Number(x) => Some(*x),
            AttributeValue::Bool(b) => Some(if *b { 1.0 } else { 0.0 }),
            AttributeValue::Text(_) => None,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Number(x) => write!(f, "{x}"),
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for AttributeValue {
    fn from(value: &str) -> Self {
        AttributeValue::Text(value.to_owned())
    }
}

impl From<String> for AttributeValue {
    fn from(value: String) -> Self {
        AttributeValue::Text(value)
    }
}

impl From<bool> for AttributeValue {
    fn from(value: bool) -> Self {
        AttributeValue::Bool(value)
    }
}

pub type Attributes = BTreeMap<String, AttributeValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub attributes: Attributes,
}

impl Node {
    pub fn new(id: NodeId) -> Self {
        Node {
            id,
            attributes: Attributes::new(),
        }
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: AttributeValue) -> Self {
        self.attributes.insert(name.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: NodeId,
    pub target: NodeId,
    /// `None` means the default weight of 1.0.
    pub weight: Option<f64>,
}

impl Edge {
    pub fn new(source: NodeId, target: NodeId) -> Self {
        Edge {
            source,
            target,
            weight: None,
        }
    }

    pub fn weighted(source: NodeId, target: NodeId, weight: f64) -> Result<Self, GraphError> {
        check_weight(weight)?;
        Ok(Edge {
            source,
            target,
            weight: Some(weight),
        })
    }

    pub fn weight_or_default(&self) -> f64 {
        self.weight.unwrap_or(1.0)
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

pub(crate) fn check_weight(weight: f64) -> Result<(), GraphError> {
    if weight.is_finite() && weight > 0.0 {
        Ok(())
    } else {
        Err(GraphError::InvalidWeight(weight))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeMode {
    In,
    Out,
    Total,
}

/// Validated graph with an incidence index consistent with its edge list.
#[derive(Debug, Clone)]
pub struct Graph {
    directed: bool,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
    /// Resolved `(source, target)` node indices, parallel to `edges`.
    endpoints: Vec<(usize, usize)>,
    /// Incident edge indices per node, ascending. A self-loop appears once.
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        // Everything else is derived from these three.
        self.directed == other.directed && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Graph {
    /// Validate nodes and edges and build the incidence index.
    pub fn build(nodes: Vec<Node>, edges: Vec<Edge>, directed: bool) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            for value in node.attributes.values() {
                if let AttributeValue::Number(x) = value {
                    if !x.is_finite() {
                        return Err(GraphError::NonFiniteNumber(*x));
                    }
                }
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNodeId(node.id.clone()));
            }
        }

        let mut endpoints = Vec::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); nodes.len()];
        for (e, edge) in edges.iter().enumerate() {
            if let Some(w) = edge.weight {
                check_weight(w)?;
            }
            let resolve = |id: &NodeId| {
                index.get(id).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: e,
                    missing: id.clone(),
                })
            };
            let s = resolve(&edge.source)?;
            let t = resolve(&edge.target)?;
            endpoints.push((s, t));
            incidence[s].push(e);
            if t != s {
                incidence[t].push(e);
            }
        }

        Ok(Graph {
            directed,
            nodes,
            edges,
            index,
            endpoints,
            incidence,
        })
    }

    pub fn empty(directed: bool) -> Self {
        Graph::build(Vec::new(), Vec::new(), directed).expect("empty graph is valid")
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn self_loop_count(&self) -> usize {
        self.endpoints.iter().filter(|(s, t)| s == t).count()
    }

    /// Incident edge indices of `id`, in ascending edge order.
    pub fn incident_edges(&self, id: &str) -> Result<&[usize], GraphError> {
        Ok(&self.incidence[self.require(id)?])
    }

    pub fn degree(&self, id: &str, mode: DegreeMode) -> Result<usize, GraphError> {
        Ok(self.degree_of(self.require(id)?, mode))
    }

    /// Union of in- and out-neighbours; contains `id` itself only when a
    /// self-loop exists.
    pub fn neighbors(&self, id: &str) -> Result<BTreeSet<NodeId>, GraphError> {
        let i = self.require(id)?;
        Ok(self
            .neighbor_indices(i)
            .into_iter()
            .map(|j| self.nodes[j].id.clone())
            .collect())
    }

    /// Edges with both endpoints in `visible`, in edge order.
    pub fn induced_edges<'a, I>(&self, visible: I) -> Result<Vec<&Edge>, GraphError>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        let mask = self.mask(visible)?;
        Ok(self
            .endpoints
            .iter()
            .zip(&self.edges)
            .filter(|((s, t), _)| mask[*s] && mask[*t])
            .map(|(_, e)| e)
            .collect())
    }

    fn require(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(NodeId(id.to_owned())))
    }

    // ---- index-based helpers shared by the other modules ----

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    pub(crate) fn id_at(&self, i: usize) -> &NodeId {
        &self.nodes[i].id
    }

    pub(crate) fn degree_of(&self, i: usize, mode: DegreeMode) -> usize {
        let mut incoming = 0;
        let mut outgoing = 0;
        for &e in &self.incidence[i] {
            let (s, t) = self.endpoints[e];
            if s == i {
                outgoing += 1;
            }
            if t == i {
                incoming += 1;
            }
        }
        if !self.directed {
            return incoming + outgoing;
        }
        match mode {
            DegreeMode::In => incoming,
            DegreeMode::Out => outgoing,
            DegreeMode::Total => incoming + outgoing,
        }
    }

    /// Sorted, deduplicated neighbour indices (direction ignored).
    pub(crate) fn neighbor_indices(&self, i: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incidence[i]
            .iter()
            .map(|&e| {
                let (s, t) = self.endpoints[e];
                if s == i {
                    t
                } else {
                    s
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Boolean membership mask over node indices.
    pub(crate) fn mask<'a, I>(&self, ids: I) -> Result<Vec<bool>, GraphError>
    where
        I: IntoIterator<Item = &'a NodeId>,
    {
        let mut mask = vec![false; self.nodes.len()];
        for id in ids {
            mask[self.require(id.as_str())?] = true;
        }
        Ok(mask)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn empty_build() {
        let g = Graph::build(vec![], vec![], false).unwrap();
        assert_eq!(g.node_count(), 0);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn single_edge_degrees() {
        let g = graph(&["a", "b"], &[("a", "b")], false);
        assert_eq!(g.degree("a", DegreeMode::Total).unwrap(), 1);
        assert_eq!(g.degree("b", DegreeMode::Total).unwrap(), 1);
    }

    #[test]
    fn dangling_endpoint() {
        let err = Graph::build(
            vec![Node::new(id("a"))],
            vec![Edge::new(id("a"), id("x"))],
            false,
        )
        .unwrap_err();
        assert_eq!(
            err,
            GraphError::DanglingEndpoint {
                edge: 0,
                missing: id("x")
            }
        );
    }

    #[test]
    fn duplicate_node() {
        let err = Graph::build(vec![Node::new(id("a")), Node::new(id("a"))], vec![], true)
            .unwrap_err();
        assert_eq!(err, GraphError::DuplicateNodeId(id("a")));
    }

    #[test]
    fn empty_id_rejected() {
        assert_eq!(NodeId::new(""), Err(GraphError::EmptyNodeId));
    }

    #[test]
    fn non_finite_attribute_rejected() {
        assert!(AttributeValue::number(f64::NAN).is_err());
        let node = Node::new(id("a")).with_attribute("x", AttributeValue::Number(f64::INFINITY));
        assert!(matches!(
            Graph::build(vec![node], vec![], false),
            Err(GraphError::NonFiniteNumber(_))
        ));
    }

    #[test]
    fn invalid_weight_rejected() {
        assert!(Edge::weighted(id("a"), id("b"), 0.0).is_err());
        assert!(Edge::weighted(id("a"), id("b"), -1.0).is_err());
        assert!(Edge::weighted(id("a"), id("b"), f64::NAN).is_err());
    }

    #[test]
    fn triangle_degree() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")], false);
        for v in ["a", "b", "c"] {
            assert_eq!(g.degree(v, DegreeMode::Total).unwrap(), 2);
            assert_eq!(g.degree(v, DegreeMode::In).unwrap(), 2);
        }
    }

    #[test]
    fn directed_chain_degree() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")], true);
        assert_eq!(g.degree("b", DegreeMode::In).unwrap(), 1);
        assert_eq!(g.degree("b", DegreeMode::Out).unwrap(), 1);
        assert_eq!(g.degree("b", DegreeMode::Total).unwrap(), 2);
    }

    #[test]
    fn star_center_degree_matches_enumeration() {
        let leaves = ["l1", "l2", "l3", "l4", "l5"];
        let mut ids = vec!["c"];
        ids.extend(leaves);
        let edges: Vec<_> = leaves.iter().map(|l| ("c", *l)).collect();
        let g = graph(&ids, &edges, false);
        let by_enumeration = g
            .edges()
            .iter()
            .filter(|e| e.source.as_str() == "c" || e.target.as_str() == "c")
            .count();
        assert_eq!(by_enumeration, 5);
        assert_eq!(g.degree("c", DegreeMode::Total).unwrap(), by_enumeration);
    }

    #[test]
    fn self_loop_degree() {
        let g = graph(&["a"], &[("a", "a")], false);
        assert_eq!(g.degree("a", DegreeMode::Total).unwrap(), 2);
        let g = graph(&["a"], &[("a", "a")], true);
        assert_eq!(g.degree("a", DegreeMode::In).unwrap(), 1);
        assert_eq!(g.degree("a", DegreeMode::Out).unwrap(), 1);
        assert_eq!(g.degree("a", DegreeMode::Total).unwrap(), 2);
        assert_eq!(g.self_loop_count(), 1);
    }

    #[test]
    fn parallel_edges_count() {
        let g = graph(&["a", "b"], &[("a", "b"), ("a", "b")], false);
        assert_eq!(g.degree("a", DegreeMode::Total).unwrap(), 2);
        assert_eq!(g.neighbors("a").unwrap().len(), 1);
    }

    #[test]
    fn neighbor_rules() {
        let g = graph(&["a", "b", "c", "z"], &[("a", "b"), ("b", "c")], true);
        let n: Vec<_> = g.neighbors("b").unwrap().into_iter().collect();
        assert_eq!(n, vec![id("a"), id("c")]);
        assert!(g.neighbors("z").unwrap().is_empty());
        assert!(matches!(g.neighbors("q"), Err(GraphError::UnknownNode(_))));

        let g = graph(&["s"], &[("s", "s")], true);
        assert_eq!(g.neighbors("s").unwrap().into_iter().collect::<Vec<_>>(), vec![id("s")]);
    }

    #[test]
    fn induced_edges_cases() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")], false);
        let all = [id("a"), id("b"), id("c")];
        assert_eq!(g.induced_edges(&all).unwrap().len(), 3);
        assert_eq!(g.induced_edges(&all[..2]).unwrap().len(), 1);
        assert!(g.induced_edges(&[]).unwrap().is_empty());
        assert!(matches!(
            g.induced_edges(&[id("x")]),
            Err(GraphError::UnknownNode(_))
        ));
    }
}
