//! Reference implementations and random inputs for the acceptance suite.
//!
//! The oracles work on a bare [`EdgeList`] and share no code with the
//! engine: dense matrices, Floyd–Warshall, union–find and brute-force
//! triangle counting.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Nodes are `0..n`; ids are [`node_name`] of the index.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub directed: bool,
    pub edges: Vec<(usize, usize, Option<f64>)>,
}

/// Zero-padded so string order equals numeric order.
pub fn node_name(i: usize) -> String {
    format!("v{i:05}")
}

impl EdgeList {
    pub fn to_graph(&self) -> nodeglass::Graph {
        use nodeglass::{Edge, Graph, Node, NodeId};
        let id = |i: usize| NodeId::new(node_name(i)).unwrap();
        let nodes = (0..self.n).map(|i| Node::new(id(i))).collect();
        let edges = self
            .edges
            .iter()
            .map(|&(s, t, w)| Edge {
                source: id(s),
                target: id(t),
                weight: w,
            })
            .collect();
        Graph::build(nodes, edges, self.directed).unwrap()
    }

    fn undirected_adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n]; self.n];
        for &(s, t, _) in &self.edges {
            if s != t {
                adj[s][t] = true;
                adj[t][s] = true;
            }
        }
        adj
    }
}

/// Random graph: `n` nodes, each ordered pair present with probability
/// `p`, optional weights in `[0.1, 10)`, optional self-loops.
pub fn random_edge_list(rng: &mut ChaCha8Rng, n: usize, directed: bool, p: f64, weighted: bool, loops: bool) -> EdgeList {
    let mut edges = Vec::new();
    for s in 0..n {
        let targets = if directed { 0..n } else { s..n };
        for t in targets {
            if s == t && !loops {
                continue;
            }
            if rng.gen_bool(p) {
                let w = weighted.then(|| rng.gen_range(0.1..10.0));
                edges.push((s, t, w));
            }
        }
    }
    EdgeList { n, directed, edges }
}

/// PageRank by dense power iteration on the full Google matrix, run until
/// the iterate stops changing at machine precision.
pub fn pagerank_oracle(g: &EdgeList, damping: f64) -> Vec<f64> {
    let n = g.n;
    // w[i][j]: total weight of arcs i -> j.
    let mut w = vec![vec![0.0f64; n]; n];
    for &(s, t, weight) in &g.edges {
        let x = weight.unwrap_or(1.0);
        w[s][t] += x;
        if !g.directed {
            w[t][s] += x;
        }
    }
    let mut google = vec![vec![0.0f64; n]; n];
    let uniform = 1.0 / n as f64;
    for i in 0..n {
        let out: f64 = w[i].iter().sum();
        for j in 0..n {
            let walk = if out > 0.0 { w[i][j] / out } else { uniform };
            google[i][j] = damping * walk + (1.0 - damping) * uniform;
        }
    }
    let mut p = vec![uniform; n];
    for _ in 0..100_000 {
        let mut q = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                q[j] += p[i] * google[i][j];
            }
        }
        let s: f64 = q.iter().sum();
        q.iter_mut().for_each(|x| *x /= s);
        let change: f64 = q.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = q;
        if change < 1e-15 {
            break;
        }
    }
    p
}

/// Self-loops do not count; parallel edges do.
pub fn density_oracle(g: &EdgeList) -> Option<f64> {
    if g.n < 2 {
        return None;
    }
    let m = g.edges.iter().filter(|(s, t, _)| s != t).count() as f64;
    let pairs = (g.n * (g.n - 1)) as f64;
    Some(if g.directed { m / pairs } else { 2.0 * m / pairs })
}

/// Weak components by union–find: each as a sorted member list, largest
/// first, ties by smallest member.
pub fn components_oracle(g: &EdgeList) -> Vec<Vec<usize>> {
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    let mut parent: Vec<usize> = (0..g.n).collect();
    for &(s, t, _) in &g.edges {
        let (a, b) = (find(&mut parent, s), find(&mut parent, t));
        parent[a] = b;
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for v in 0..g.n {
        let r = find(&mut parent, v);
        groups.entry(r).or_default().push(v);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    out.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    out
}

/// Largest finite hop distance within the largest weak component
/// (direction ignored), by Floyd–Warshall.
pub fn diameter_oracle(g: &EdgeList) -> Option<(usize, bool)> {
    if g.n == 0 {
        return None;
    }
    let comps = components_oracle(g);
    let adj = g.undirected_adjacency();
    const INF: usize = usize::MAX / 4;
    let mut d = vec![vec![INF; g.n]; g.n];
    for i in 0..g.n {
        d[i][i] = 0;
        for j in 0..g.n {
            if adj[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..g.n {
        for i in 0..g.n {
            for j in 0..g.n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let largest = &comps[0];
    let mut best = 0;
    for &i in largest {
        for &j in largest {
            best = best.max(d[i][j]);
        }
    }
    Some((best, comps.len() > 1))
}

/// Mean over all nodes of (linked neighbour pairs) / (neighbour pairs),
/// counting 0 for nodes with fewer than two neighbours.
pub fn clustering_oracle(g: &EdgeList) -> Option<f64> {
    if g.n == 0 {
        return None;
    }
    let adj = g.undirected_adjacency();
    let mut total = 0.0;
    for v in 0..g.n {
        let nbrs: Vec<usize> = (0..g.n).filter(|&u| adj[v][u]).collect();
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut linked = 0;
        for a in 0..k {
            for b in a + 1..k {
                if adj[nbrs[a]][nbrs[b]] {
                    linked += 1;
                }
            }
        }
        total += linked as f64 / (k * (k - 1) / 2) as f64;
    }
    Some(total / g.n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(n: usize, directed: bool, edges: &[(usize, usize)]) -> EdgeList {
        EdgeList {
            n,
            directed,
            edges: edges.iter().map(|&(s, t)| (s, t, None)).collect(),
        }
    }

    #[test]
    fn oracles_on_hand_cases() {
        let tri_pendant = list(4, false, &[(0, 1), (1, 2), (2, 0), (2, 3)]);
        assert!((clustering_oracle(&tri_pendant).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert_eq!(diameter_oracle(&tri_pendant), Some((2, false)));
        assert_eq!(density_oracle(&tri_pendant), Some(8.0 / 12.0));

        let split = list(5, false, &[(0, 1), (2, 3), (3, 4)]);
        assert_eq!(components_oracle(&split), vec![vec![2, 3, 4], vec![0, 1]]);
        assert_eq!(diameter_oracle(&split), Some((2, true)));

        let cycle = list(3, true, &[(0, 1), (1, 2), (2, 0)]);
        for p in pagerank_oracle(&cycle, 0.85) {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
    }
}
