//! Fruchterman–Reingold force-directed layout.
//!
//! Ideal edge length is `k = c * sqrt(area / n)`. Every visible pair repels
//! with `k² / d`, every visible edge attracts with `d² / k`, and each
//! unpinned node moves along its net force by at most the current
//! temperature. The temperature cools geometrically down to a floor so an
//! interactive view keeps settling gently instead of freezing.
//!
//! Repulsion is the exact O(n²) pairwise sum, accumulated in a fixed node
//! order so successive states are bit-for-bit reproducible. An approximate
//! scheme (Barnes–Hut or a grid) would slot in behind [`step`] without
//! changing its contract.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, GraphError, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("node `{0}` has no position")]
    MissingPosition(NodeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid layout parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutParams {
    pub area_width: f64,
    pub area_height: f64,
    /// Scales the ideal edge length.
    pub c_constant: f64,
    pub initial_temperature: f64,
    /// Multiplicative cooling per step, in (0, 1).
    pub cooling: f64,
    /// Cooling never takes the temperature below this.
    pub min_temperature: f64,
    /// Distances below this count as coincident.
    pub min_separation: f64,
    pub seed: u64,
}

impl Default for LayoutParams {
    fn default() -> Self {
        LayoutParams {
            area_width: 1000.0,
            area_height: 1000.0,
            c_constant: 1.0,
            initial_temperature: 100.0,
            cooling: 0.95,
            min_temperature: 0.5,
            min_separation: 1e-4,
            seed: 0,
        }
    }
}

impl LayoutParams {
    /// Defaults for a `width` x `height` area, starting at a tenth of the
    /// width in temperature.
    pub fn with_area(width: f64, height: f64) -> Self {
        LayoutParams {
            area_width: width,
            area_height: height,
            initial_temperature: width / 10.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), LayoutError> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.area_width) || !positive(self.area_height) {
            return Err(LayoutError::InvalidParams("area must be positive"));
        }
        if !positive(self.c_constant) {
            return Err(LayoutError::InvalidParams("c_constant must be positive"));
        }
        if !positive(self.initial_temperature) {
            return Err(LayoutError::InvalidParams("initial_temperature must be positive"));
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(LayoutError::InvalidParams("cooling must lie in (0, 1)"));
        }
        if !(self.min_temperature.is_finite() && self.min_temperature >= 0.0) {
            return Err(LayoutError::InvalidParams("min_temperature must be non-negative"));
        }
        if !positive(self.min_separation) {
            return Err(LayoutError::InvalidParams("min_separation must be positive"));
        }
        Ok(())
    }

    /// The ideal edge length for `n` visible nodes.
    pub fn ideal_length(&self, n: usize) -> f64 {
        self.c_constant * (self.area_width * self.area_height / n.max(1) as f64).sqrt()
    }

    fn clamp(&self, p: Point) -> Point {
        Point {
            x: p.x.clamp(0.0, self.area_width),
            y: p.y.clamp(0.0, self.area_height),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayoutState {
    /// Positions are kept for hidden nodes too, so re-showing restores them.
    pub positions: BTreeMap<NodeId, Point>,
    pub pinned: BTreeSet<NodeId>,
    pub temperature: f64,
    pub iteration: u64,
}

impl LayoutState {
    pub fn empty(params: &LayoutParams) -> Self {
        LayoutState {
            positions: BTreeMap::new(),
            pinned: BTreeSet::new(),
            temperature: params.initial_temperature,
            iteration: 0,
        }
    }

    pub fn position(&self, id: &str) -> Option<Point> {
        self.positions.get(id).copied()
    }

    pub fn pin(&mut self, id: &NodeId) -> Result<(), LayoutError> {
        self.require(id)?;
        self.pinned.insert(id.clone());
        Ok(())
    }

    pub fn unpin(&mut self, id: &NodeId) -> Result<(), LayoutError> {
        self.require(id)?;
        self.pinned.remove(id);
        Ok(())
    }

    /// Move a node by hand (a drag); pins it so the layout leaves it there.
    pub fn place(&mut self, id: &NodeId, at: Point) -> Result<(), LayoutError> {
        self.require(id)?;
        self.positions.insert(id.clone(), at);
        self.pinned.insert(id.clone());
        Ok(())
    }

    fn require(&self, id: &NodeId) -> Result<(), LayoutError> {
        if self.positions.contains_key(id) {
            Ok(())
        } else {
            Err(LayoutError::MissingPosition(id.clone()))
        }
    }
}

/// Uniform random positions inside the area. Each node's position depends
/// only on the seed and its own id, so adding ids never moves the others.
pub fn seed_positions<'a, I>(ids: I, params: &LayoutParams) -> LayoutState
where
    I: IntoIterator<Item = &'a NodeId>,
{
    let mut state = LayoutState::empty(params);
    for id in ids {
        state.positions.insert(id.clone(), random_position(id, params));
    }
    state
}

pub(crate) fn random_position(id: &NodeId, params: &LayoutParams) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(params.seed, fnv1a(id.as_str().as_bytes())));
    Point {
        x: rng.gen_range(0.0..=params.area_width),
        y: rng.gen_range(0.0..=params.area_height),
    }
}

/// A point near `anchor`, deterministic in (seed, anchor, id), for nodes
/// revealed by expanding `anchor`.
pub(crate) fn position_near(
    anchor_id: &NodeId,
    anchor: Point,
    id: &NodeId,
    params: &LayoutParams,
) -> Point {
    let key = mix(fnv1a(anchor_id.as_str().as_bytes()), fnv1a(id.as_str().as_bytes()));
    let mut rng = ChaCha8Rng::seed_from_u64(mix(params.seed, key));
    let radius = 0.02 * params.area_width.min(params.area_height);
    let angle = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = radius * rng.gen_range(0.25..=1.0);
    params.clamp(Point {
        x: anchor.x + r * angle.cos(),
        y: anchor.y + r * angle.sin(),
    })
}

/// One layout iteration over the visible nodes.
pub fn step<'a, I>(
    graph: &Graph,
    visible: I,
    state: &LayoutState,
    params: &LayoutParams,
) -> Result<LayoutState, LayoutError>
where
    I: IntoIterator<Item = &'a NodeId>,
{
    params.validate()?;
    let mask = graph.mask(visible)?;
    // Fixed iteration order: graph node order.
    let order: Vec<usize> = (0..graph.node_count()).filter(|&i| mask[i]).collect();
    let mut pos = Vec::with_capacity(order.len());
    for &i in &order {
        let id = graph.id_at(i);
        pos.push(
            state
                .position(id.as_str())
                .ok_or_else(|| LayoutError::MissingPosition(id.clone()))?,
        );
    }

    let n = order.len();
    let mut disp = vec![(0.0f64, 0.0f64); n];
    if n > 1 {
        let k = params.ideal_length(n);
        let k2 = k * k;
        let min_sep = params.min_separation;
        let hashes: Vec<u64> = order
            .iter()
            .map(|&i| fnv1a(graph.id_at(i).as_str().as_bytes()))
            .collect();

        for a in 0..n {
            let (pa, ha) = (pos[a], hashes[a]);
            let (mut fx, mut fy) = (0.0, 0.0);
            for b in (a + 1)..n {
                let dx = pa.x - pos[b].x;
                let dy = pa.y - pos[b].y;
                let d2 = dx * dx + dy * dy;
                let (ux, uy, force) = if d2 < min_sep * min_sep {
                    let (ux, uy) = pair_direction(ha, hashes[b], params.seed);
                    (ux, uy, k2 / min_sep)
                } else {
                    // (dx, dy)/d * k²/d
                    (dx, dy, k2 / d2)
                };
                fx += ux * force;
                fy += uy * force;
                disp[b].0 -= ux * force;
                disp[b].1 -= uy * force;
            }
            disp[a].0 += fx;
            disp[a].1 += fy;
        }

        let mut slot = vec![usize::MAX; graph.node_count()];
        for (s, &i) in order.iter().enumerate() {
            slot[i] = s;
        }
        for &(s, t) in graph.endpoints() {
            if s == t || !mask[s] || !mask[t] {
                continue;
            }
            let (a, b) = (slot[s], slot[t]);
            let dx = pos[a].x - pos[b].x;
            let dy = pos[a].y - pos[b].y;
            let d = dx.hypot(dy);
            if d < min_sep {
                continue;
            }
            // (dx, dy)/d * d²/k
            let scale = d / k;
            disp[a].0 -= dx * scale;
            disp[a].1 -= dy * scale;
            disp[b].0 += dx * scale;
            disp[b].1 += dy * scale;
        }
    }

    let mut next = state.clone();
    let temperature = state.temperature;
    for (s, &i) in order.iter().enumerate() {
        let id = graph.id_at(i);
        if state.pinned.contains(id) {
            continue;
        }
        let moved = params.clamp(displace(pos[s], disp[s], temperature));
        next.positions.insert(id.clone(), moved);
    }
    next.temperature = cool(temperature, params);
    next.iteration += 1;
    Ok(next)
}

/// `iterations` consecutive steps. The observer sees every intermediate
/// state and may stop early with `ControlFlow::Break`.
pub fn run<'a, I, F>(
    graph: &Graph,
    visible: I,
    state: &LayoutState,
    params: &LayoutParams,
    iterations: usize,
    mut observer: F,
) -> Result<LayoutState, LayoutError>
where
    I: IntoIterator<Item = &'a NodeId>,
    F: FnMut(&LayoutState) -> ControlFlow<()>,
{
    let visible: Vec<&NodeId> = visible.into_iter().collect();
    let mut current = state.clone();
    for _ in 0..iterations {
        current = step(graph, visible.iter().copied(), &current, params)?;
        if observer(&current).is_break() {
            break;
        }
    }
    Ok(current)
}

fn cool(temperature: f64, params: &LayoutParams) -> f64 {
    (temperature * params.cooling).max(params.min_temperature.min(temperature))
}

/// Move `p` along `d` by `min(|d|, limit)`.
fn displace(p: Point, (dx, dy): (f64, f64), limit: f64) -> Point {
    let len = dx.hypot(dy);
    if len == 0.0 || limit <= 0.0 || len.is_nan() {
        return p;
    }
    let (ux, uy) = if len.is_finite() {
        (dx / len, dy / len)
    } else {
        // Overflowed force: normalise by the dominant component first.
        let m = dx.abs().max(dy.abs());
        let (sx, sy) = (finite_or_sign(dx / m), finite_or_sign(dy / m));
        let l = sx.hypot(sy);
        (sx / l, sy / l)
    };
    let step = len.min(limit);
    Point {
        x: p.x + ux * step,
        y: p.y + uy * step,
    }
}

fn finite_or_sign(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else if x.is_nan() {
        0.0
    } else {
        x.signum()
    }
}

/// Unit vector pushing the first node of a coincident pair away from the
/// second. Antisymmetric in the pair, deterministic in (ids, seed).
fn pair_direction(a: u64, b: u64, seed: u64) -> (f64, f64) {
    let (lo, hi, sign) = if a <= b { (a, b, 1.0) } else { (b, a, -1.0) };
    let h = mix(mix(seed, lo), hi);
    let angle = (h >> 11) as f64 / (1u64 << 53) as f64 * std::f64::consts::TAU;
    (sign * angle.cos(), sign * angle.sin())
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// splitmix64 finaliser over a combined key.
fn mix(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).rotate_left(17);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn id(s: &str) -> NodeId {
        NodeId::new(s).unwrap()
    }

    fn graph(ids: &[&str], edges: &[(&str, &str)]) -> Graph {
        Graph::build(
            ids.iter().map(|s| Node::new(id(s))).collect(),
            edges.iter().map(|(a, b)| Edge::new(id(a), id(b))).collect(),
            false,
        )
        .unwrap()
    }

    fn state_with(points: &[(&str, f64, f64)], params: &LayoutParams) -> LayoutState {
        let mut s = LayoutState::empty(params);
        for (n, x, y) in points {
            s.positions.insert(id(n), Point::new(*x, *y));
        }
        s
    }

    #[test]
    fn seed_empty() {
        let p = LayoutParams::default();
        let s = seed_positions([], &p);
        assert!(s.positions.is_empty());
        assert_eq!(s.temperature, p.initial_temperature);
    }

    #[test]
    fn seed_is_deterministic_and_bounded() {
        let p = LayoutParams {
            area_width: 300.0,
            area_height: 200.0,
            ..Default::default()
        };
        let ids: Vec<NodeId> = (0..100).map(|i| id(&format!("n{i}"))).collect();
        let a = seed_positions(&ids, &p);
        let b = seed_positions(&ids, &p);
        assert_eq!(a, b);
        for pt in a.positions.values() {
            assert!((0.0..=300.0).contains(&pt.x) && (0.0..=200.0).contains(&pt.y));
        }
        let other = seed_positions(&ids, &LayoutParams { seed: 7, ..p });
        assert_ne!(a.positions, other.positions);
    }

    #[test]
    fn single_node_only_cools() {
        let g = graph(&["a"], &[]);
        let p = LayoutParams::default();
        let s = state_with(&[("a", 10.0, 10.0)], &p);
        let next = step(&g, [&id("a")], &s, &p).unwrap();
        assert_eq!(next.position("a"), s.position("a"));
        assert_eq!(next.temperature, p.initial_temperature * p.cooling);
    }

    #[test]
    fn unconnected_pair_repels() {
        let g = graph(&["a", "b"], &[]);
        let p = LayoutParams::default();
        // k = sqrt(1e6 / 2) ≈ 707
        let s = state_with(&[("a", 500.0, 500.0), ("b", 510.0, 500.0)], &p);
        let vis = [id("a"), id("b")];
        let next = step(&g, &vis, &s, &p).unwrap();
        let before = s.position("a").unwrap().distance(s.position("b").unwrap());
        let after = next.position("a").unwrap().distance(next.position("b").unwrap());
        assert!(after > before);
    }

    #[test]
    fn connected_far_pair_attracts() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let p = LayoutParams::default();
        let k = p.ideal_length(2);
        let d = 900.0;
        // Net force sign at this distance: attraction d²/k beats repulsion k²/d.
        assert!(d * d / k - k * k / d > 0.0);
        let s = state_with(&[("a", 50.0, 500.0), ("b", 50.0 + d, 500.0)], &p);
        let vis = [id("a"), id("b")];
        let next = step(&g, &vis, &s, &p).unwrap();
        let after = next.position("a").unwrap().distance(next.position("b").unwrap());
        assert!(after < d);
    }

    #[test]
    fn missing_position_is_an_error() {
        let g = graph(&["a", "b"], &[]);
        let p = LayoutParams::default();
        let s = state_with(&[("a", 1.0, 1.0)], &p);
        let err = step(&g, &[id("a"), id("b")], &s, &p).unwrap_err();
        assert_eq!(err, LayoutError::MissingPosition(id("b")));
    }

    #[test]
    fn pinning() {
        let g = graph(&["a", "b"], &[("a", "b")]);
        let p = LayoutParams::default();
        let s = state_with(&[("a", 100.0, 100.0), ("b", 900.0, 900.0)], &p);
        let mut pinned = s.clone();
        pinned.pin(&id("a")).unwrap();
        let next = step(&g, &[id("a"), id("b")], &pinned, &p).unwrap();
        assert_eq!(next.position("a"), pinned.position("a"));
        assert_ne!(next.position("b"), pinned.position("b"));

        pinned.unpin(&id("a")).unwrap();
        assert_eq!(pinned, s);
        let mut t = s.clone();
        assert_eq!(
            t.pin(&id("zz")).unwrap_err(),
            LayoutError::MissingPosition(id("zz"))
        );
    }

    #[test]
    fn run_zero_and_composition() {
        let g = graph(&["a", "b", "c"], &[("a", "b"), ("b", "c")]);
        let p = LayoutParams::default();
        let vis = [id("a"), id("b"), id("c")];
        let s = seed_positions(&vis, &p);
        assert_eq!(run(&g, &vis, &s, &p, 0, |_| ControlFlow::Continue(())).unwrap(), s);

        let mut manual = s.clone();
        for _ in 0..10 {
            manual = step(&g, &vis, &manual, &p).unwrap();
        }
        let mut seen = 0;
        let ran = run(&g, &vis, &s, &p, 10, |_| {
            seen += 1;
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(ran, manual);
        assert_eq!(seen, 10);

        let stopped = run(&g, &vis, &s, &p, 10, |st| {
            if st.iteration == 3 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(stopped.iteration, 3);
    }

    #[test]
    fn coincident_nodes_separate() {
        let ids: Vec<String> = (0..20).map(|i| format!("n{i}")).collect();
        let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
        let g = graph(&refs, &[]);
        let p = LayoutParams::default();
        let pts: Vec<_> = refs.iter().map(|n| (*n, 500.0, 500.0)).collect();
        let s = state_with(&pts, &p);
        let vis: Vec<NodeId> = refs.iter().map(|n| id(n)).collect();
        let next = step(&g, &vis, &s, &p).unwrap();
        let distinct: BTreeSet<(u64, u64)> = next
            .positions
            .values()
            .map(|pt| (pt.x.to_bits(), pt.y.to_bits()))
            .collect();
        assert!(distinct.len() > 1);
        assert!(next.positions.values().all(|pt| pt.is_finite()));
    }

    #[test]
    fn temperature_floor() {
        let p = LayoutParams {
            initial_temperature: 1.0,
            cooling: 0.5,
            min_temperature: 0.3,
            ..Default::default()
        };
        assert_eq!(cool(1.0, &p), 0.5);
        assert_eq!(cool(0.5, &p), 0.3);
        assert_eq!(cool(0.3, &p), 0.3);
        // a temperature already below the floor is not raised
        assert_eq!(cool(0.1, &p), 0.1);
    }

    #[test]
    fn invalid_params() {
        let p = LayoutParams {
            cooling: 1.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        assert!(LayoutParams::default().validate().is_ok());
        assert_eq!(LayoutParams::with_area(1000.0, 1000.0).initial_temperature, 100.0);
    }

    #[test]
    fn pair_direction_is_antisymmetric_unit() {
        let (x1, y1) = pair_direction(3, 9, 1);
        let (x2, y2) = pair_direction(9, 3, 1);
        assert_eq!((x1, y1), (-x2, -y2));
        assert!((x1.hypot(y1) - 1.0).abs() < 1e-12);
    }
}
