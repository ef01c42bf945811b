//! Whole-graph analytics: PageRank, density, weakly connected components,
//! diameter and average local clustering coefficient.
//!
//! Everything here treats directed graphs as undirected except PageRank,
//! which follows arc direction. Results are deterministic and independent of
//! the order in which callers query them.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgorithmError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("need at least 2 nodes, graph has {0}")]
    TooFewNodes(usize),
    #[error("invalid PageRank parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    /// Stop once the L1 change between iterates drops below this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PageRankParams {
    fn default() -> Self {
        PageRankParams {
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 200,
        }
    }
}

impl PageRankParams {
    pub fn validate(&self) -> Result<(), AlgorithmError> {
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(AlgorithmError::InvalidParams("damping must lie in (0, 1)"));
        }
        if !(self.tolerance > 0.0) {
            return Err(AlgorithmError::InvalidParams("tolerance must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(AlgorithmError::InvalidParams("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// One finite score per graph node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoreMap(BTreeMap<NodeId, f64>);

impl ScoreMap {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.0.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, f64)> {
        self.0.iter().map(|(k, v)| (k, *v))
    }

    pub fn sum(&self) -> f64 {
        self.0.values().sum()
    }

    /// The `k` highest scores, ties broken by ascending id.
    pub fn top(&self, k: usize) -> Vec<(NodeId, f64)> {
        let mut all: Vec<_> = self.0.iter().map(|(id, s)| (id.clone(), *s)).collect();
        all.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(k);
        all
    }
}

impl FromIterator<(NodeId, f64)> for ScoreMap {
    fn from_iter<T: IntoIterator<Item = (NodeId, f64)>>(iter: T) -> Self {
        ScoreMap(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub scores: ScoreMap,
    pub iterations: usize,
    /// False when `max_iterations` was hit first; `scores` is then the last
    /// iterate, still normalized.
    pub converged: bool,
}

/// Power-iteration PageRank with uniform teleport.
///
/// Undirected edges count as two arcs. Arc transition probability is
/// proportional to edge weight. Mass sitting on nodes without outgoing arcs
/// is spread uniformly over all nodes.
pub fn pagerank(graph: &Graph, params: &PageRankParams) -> Result<PageRank, AlgorithmError> {
    let (scores, iterations, converged) = pagerank_dense(graph, params)?;
    let scores = scores
        .into_iter()
        .enumerate()
        .map(|(i, s)| (graph.id_at(i).clone(), s))
        .collect();
    Ok(PageRank {
        scores,
        iterations,
        converged,
    })
}

/// PageRank scores indexed by node position.
pub(crate) fn pagerank_dense(
    graph: &Graph,
    params: &PageRankParams,
) -> Result<(Vec<f64>, usize, bool), AlgorithmError> {
    params.validate()?;
    let n = graph.node_count();
    if n == 0 {
        return Err(AlgorithmError::EmptyGraph);
    }

    let mut arcs: Vec<(usize, usize, f64)> = Vec::with_capacity(graph.edge_count() * 2);
    for (edge, &(s, t)) in graph.edges().iter().zip(graph.endpoints()) {
        let w = edge.weight_or_default();
        arcs.push((s, t, w));
        if !graph.is_directed() {
            arcs.push((t, s, w));
        }
    }
    let mut out_weight = vec![0.0; n];
    for &(s, _, w) in &arcs {
        out_weight[s] += w;
    }
    for arc in &mut arcs {
        arc.2 /= out_weight[arc.0];
    }
    let dangling: Vec<usize> = (0..n).filter(|&i| out_weight[i] == 0.0).collect();

    let d = params.damping;
    let inv_n = 1.0 / n as f64;
    let mut rank = vec![inv_n; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < params.max_iterations {
        iterations += 1;
        let dangling_mass: f64 = dangling.iter().map(|&i| rank[i]).sum();
        let base = (1.0 - d) * inv_n + d * dangling_mass * inv_n;
        next.iter_mut().for_each(|x| *x = base);
        for &(s, t, p) in &arcs {
            next[t] += d * rank[s] * p;
        }
        let change: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut rank, &mut next);
        if change < params.tolerance {
            converged = true;
            break;
        }
    }

    let total: f64 = rank.iter().sum();
    rank.iter_mut().for_each(|x| *x /= total);
    Ok((rank, iterations, converged))
}

/// Edge density; self-loops are excluded, parallel edges are not.
pub fn density(graph: &Graph) -> Result<f64, AlgorithmError> {
    let n = graph.node_count();
    if n < 2 {
        return Err(AlgorithmError::TooFewNodes(n));
    }
    let m = (graph.edge_count() - graph.self_loop_count()) as f64;
    let pairs = (n * (n - 1)) as f64;
    Ok(if graph.is_directed() {
        m / pairs
    } else {
        2.0 * m / pairs
    })
}

/// Weakly connected components, largest first; equal sizes are ordered by
/// their smallest member. Members are sorted ascending.
pub fn connected_components(graph: &Graph) -> Vec<Vec<NodeId>> {
    component_indices(graph)
        .into_iter()
        .map(|c| c.into_iter().map(|i| graph.id_at(i).clone()).collect())
        .collect()
}

pub(crate) fn component_indices(graph: &Graph) -> Vec<Vec<usize>> {
    let n = graph.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(v) = queue.pop_front() {
            members.push(v);
            for u in graph.neighbor_indices(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        members.sort_by(|&a, &b| graph.id_at(a).cmp(graph.id_at(b)));
        components.push(members);
    }
    components.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| graph.id_at(a[0]).cmp(graph.id_at(b[0])))
    });
    components
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DiameterReport {
    pub diameter: usize,
    /// Set when the graph has more than one weakly connected component; the
    /// diameter then describes the largest one only.
    pub disconnected: bool,
}

/// Longest shortest path (in hops, direction ignored) within the largest
/// weakly connected component, by BFS from every member.
pub fn diameter(graph: &Graph) -> Result<DiameterReport, AlgorithmError> {
    if graph.is_empty() {
        return Err(AlgorithmError::EmptyGraph);
    }
    let components = component_indices(graph);
    let largest = &components[0];
    let adjacency: Vec<Vec<usize>> = (0..graph.node_count())
        .map(|i| graph.neighbor_indices(i))
        .collect();

    let mut dist = vec![usize::MAX; graph.node_count()];
    let mut queue = VecDeque::new();
    let mut best = 0;
    for &source in largest {
        for &v in largest {
            dist[v] = usize::MAX;
        }
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            best = best.max(dv);
            for &u in &adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    Ok(DiameterReport {
        diameter: best,
        disconnected: components.len() > 1,
    })
}

/// Average local clustering coefficient over all nodes. Direction is
/// ignored, parallel edges collapse and self-loops are dropped; nodes with
/// fewer than two neighbours contribute 0.
pub fn clustering_coefficient(graph: &Graph) -> Result<f64, AlgorithmError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(AlgorithmError::EmptyGraph);
    }
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let mut nb = graph.neighbor_indices(i);
            nb.retain(|&j| j != i);
            nb
        })
        .collect();

    let mut marked = vec![false; n];
    let mut total = 0.0;
    for nbrs in &adjacency {
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        for &u in nbrs {
            marked[u] = true;
        }
        let mut links = 0usize;
        for &u in nbrs {
            links += adjacency[u].iter().filter(|&&w| w > u && marked[w]).count();
        }
        for &u in nbrs {
            marked[u] = false;
        }
        total += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    Ok(total / n as f64)
}

/// Everything the statistics panel and `stats` command show.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphSummary {
    pub nodes: usize,
    pub edges: usize,
    pub directed: bool,
    /// `None` for graphs with fewer than two nodes.
    pub density: Option<f64>,
    pub diameter: Option<usize>,
    pub disconnected: bool,
    pub clustering_coefficient: Option<f64>,
    pub components: usize,
    pub top_pagerank: Vec<RankedNode>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedNode {
    pub id: String,
    pub score: f64,
}

pub fn summarize(graph: &Graph, top: usize) -> GraphSummary {
    let diameter = diameter(graph).ok();
    let top_pagerank = match pagerank(graph, &PageRankParams::default()) {
        Ok(pr) => pr
            .scores
            .top(top)
            .into_iter()
            .map(|(id, score)| RankedNode {
                id: id.into_string(),
                score,
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    GraphSummary {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        directed: graph.is_directed(),
        density: density(graph).ok(),
        diameter: diameter.map(|d| d.diameter),
        disconnected: diameter.is_some_and(|d| d.disconnected),
        clustering_coefficient: clustering_coefficient(graph).ok(),
        components: component_indices(graph).len(),
        top_pagerank,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn build(n: usize, edges: &[(usize, usize)], directed: bool) -> Graph {
        let id = |i: usize| NodeId::new(format!("v{i:02}")).unwrap();
        Graph::build(
            (0..n).map(|i| Node::new(id(i))).collect(),
            edges.iter().map(|&(a, b)| Edge::new(id(a), id(b))).collect(),
            directed,
        )
        .unwrap()
    }

    fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        build(n, &edges, false)
    }

    /// Dense oracle: iterate the full Google matrix until the iterate stops
    /// moving at machine precision.
    fn dense_oracle(n: usize, arcs: &[(usize, usize)], d: f64) -> Vec<f64> {
        let mut m = vec![vec![0.0; n]; n];
        for &(s, t) in arcs {
            m[s][t] += 1.0;
        }
        for row in &mut m {
            let total: f64 = row.iter().sum();
            if total == 0.0 {
                row.iter_mut().for_each(|x| *x = 1.0 / n as f64);
            } else {
                row.iter_mut().for_each(|x| *x /= total);
            }
        }
        let mut x = vec![1.0 / n as f64; n];
        for _ in 0..5000 {
            let mut y = vec![(1.0 - d) / n as f64; n];
            for i in 0..n {
                for j in 0..n {
                    y[j] += d * x[i] * m[i][j];
                }
            }
            x = y;
        }
        x
    }

    #[test]
    fn pagerank_single_node() {
        let g = build(1, &[], false);
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        assert_eq!(pr.scores.get("v00"), Some(1.0));
    }

    #[test]
    fn pagerank_cycle_uniform() {
        let g = build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], false);
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        for (_, s) in pr.scores.iter() {
            assert!((s - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn pagerank_directed_chain_matches_dense_oracle() {
        let g = build(3, &[(0, 1), (1, 2)], true);
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        let oracle = dense_oracle(3, &[(0, 1), (1, 2)], 0.85);
        let got: Vec<f64> = ["v00", "v01", "v02"]
            .iter()
            .map(|v| pr.scores.get(v).unwrap())
            .collect();
        assert!(got[0] < got[1] && got[1] < got[2]);
        for (a, b) in got.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "{got:?} vs {oracle:?}");
        }
        // Frozen from an independent numpy run of the same dense iteration.
        let frozen = [0.184416781927, 0.341171046565, 0.474412171508];
        for (a, b) in got.iter().zip(frozen) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn pagerank_empty_and_bad_params() {
        let g = build(0, &[], false);
        assert_eq!(
            pagerank(&g, &PageRankParams::default()).unwrap_err(),
            AlgorithmError::EmptyGraph
        );
        let g = build(1, &[], false);
        let bad = PageRankParams {
            damping: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            pagerank(&g, &bad),
            Err(AlgorithmError::InvalidParams(_))
        ));
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let g = build(3, &[(0, 1), (1, 2)], true);
        let params = PageRankParams {
            max_iterations: 2,
            ..Default::default()
        };
        let pr = pagerank(&g, &params).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 2);
        assert!((pr.scores.sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pagerank_weights_scale_transitions() {
        // v0 -> v1 (weight 3), v0 -> v2 (weight 1): v1 must outrank v2.
        let id = |s: &str| NodeId::new(s).unwrap();
        let g = Graph::build(
            vec![Node::new(id("a")), Node::new(id("b")), Node::new(id("c"))],
            vec![
                Edge::weighted(id("a"), id("b"), 3.0).unwrap(),
                Edge::weighted(id("a"), id("c"), 1.0).unwrap(),
            ],
            true,
        )
        .unwrap();
        let pr = pagerank(&g, &PageRankParams::default()).unwrap();
        assert!(pr.scores.get("b").unwrap() > pr.scores.get("c").unwrap());
    }

    #[test]
    fn density_cases() {
        let tri = build(3, &[(0, 1), (1, 2), (2, 0)], false);
        assert_eq!(density(&tri).unwrap(), 1.0);
        let arc = build(2, &[(0, 1)], true);
        assert_eq!(density(&arc).unwrap(), 0.5);
        assert_eq!(density(&path(4)).unwrap(), 2.0 * 3.0 / (4.0 * 3.0));
        assert_eq!(
            density(&build(1, &[], false)).unwrap_err(),
            AlgorithmError::TooFewNodes(1)
        );
        let looped = build(2, &[(0, 1), (0, 0)], false);
        assert_eq!(density(&looped).unwrap(), 1.0);
    }

    #[test]
    fn components_cases() {
        let g = build(4, &[(0, 1), (2, 3)], false);
        let cc = connected_components(&g);
        assert_eq!(cc.len(), 2);
        assert!(cc.iter().all(|c| c.len() == 2));
        assert_eq!(cc[0][0].as_str(), "v00");
        assert!(connected_components(&build(0, &[], false)).is_empty());

        let g = build(5, &[(3, 4), (4, 2)], true);
        let sizes: Vec<_> = connected_components(&g).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![3, 1, 1]);
    }

    #[test]
    fn diameter_cases() {
        assert_eq!(diameter(&path(5)).unwrap().diameter, 4);
        let k4 = build(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], false);
        assert_eq!(
            diameter(&k4).unwrap(),
            DiameterReport {
                diameter: 1,
                disconnected: false
            }
        );
        // path-3 (v0..v2) and path-5 (v3..v7)
        let g = build(8, &[(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)], false);
        assert_eq!(
            diameter(&g).unwrap(),
            DiameterReport {
                diameter: 4,
                disconnected: true
            }
        );
        assert_eq!(diameter(&build(0, &[], false)).unwrap_err(), AlgorithmError::EmptyGraph);
    }

    #[test]
    fn diameter_of_paths() {
        for n in 2..=20 {
            assert_eq!(diameter(&path(n)).unwrap().diameter, n - 1);
        }
    }

    #[test]
    fn clustering_cases() {
        let tri = build(3, &[(0, 1), (1, 2), (2, 0)], false);
        assert_eq!(clustering_coefficient(&tri).unwrap(), 1.0);
        let star = build(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], false);
        assert_eq!(clustering_coefficient(&star).unwrap(), 0.0);
        let pendant = build(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], false);
        // per-node coefficients: v0 = 1, v1 = 1, v2 = 1/3 (1 link among 3
        // neighbours), v3 = 0.
        let expected = (1.0 + 1.0 + 1.0 / 3.0 + 0.0) / 4.0;
        assert!((clustering_coefficient(&pendant).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn summary_on_triangle() {
        let tri = build(3, &[(0, 1), (1, 2), (2, 0)], false);
        let s = summarize(&tri, 10);
        assert_eq!(s.density, Some(1.0));
        assert_eq!(s.diameter, Some(1));
        assert_eq!(s.clustering_coefficient, Some(1.0));
        assert_eq!(s.components, 1);
        assert_eq!(s.top_pagerank.len(), 3);
    }
}
