//! Brute-force oracles for the fpp toolkit's tests.
//!
//! Everything here is deliberately naive: exhaustive self-avoiding-path
//! enumeration on tiny regions, exact expectation sums over complete edge
//! configurations, and hand-enumerated one- and two-level right-edge systems.
//! None of it shares code with the engine's search paths; agreement between
//! the two is the point.

use fpp_core::{Axis, EdgeId, EdgeWeights, Region, Vertex};
use std::cell::Cell;
use std::collections::BTreeSet;

/// A passage-time value in oracle units: integer ticks (exact in f64) for
/// quantized fields, plain time units otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleTime {
    /// Value in the accumulation unit (ticks or time).
    pub units: f64,
    /// Units per tick when the field is quantized.
    pub quantum: Option<f64>,
}

impl OracleTime {
    pub fn as_time(&self) -> f64 {
        match self.quantum {
            Some(q) => self.units * q,
            None => self.units,
        }
    }
}

fn unit_weight<W: EdgeWeights>(field: &W, e: EdgeId) -> f64 {
    match field.tick_domain() {
        Some(_) => field.weight_ticks(e) as f64,
        None => field.weight(e),
    }
}

/// Cost of the axis-first staircase from `s` to `t`; a real path inside any
/// box containing both, so a valid upper bound for pruning.
fn staircase_cost<W: EdgeWeights>(field: &W, s: Vertex, t: Vertex) -> f64 {
    let mut v = s;
    let mut total = 0.0;
    while v.x != t.x {
        let u = Vertex::new(v.x + (t.x - v.x).signum(), v.y);
        total += unit_weight(field, EdgeId::between(v, u));
        v = u;
    }
    while v.y != t.y {
        let u = Vertex::new(v.x, v.y + (t.y - v.y).signum());
        total += unit_weight(field, EdgeId::between(v, u));
        v = u;
    }
    total
}

struct Dfs<'a, W: EdgeWeights> {
    field: &'a W,
    region: &'a Region,
}

impl<'a, W: EdgeWeights> Dfs<'a, W> {
    fn new(field: &'a W, region: &'a Region) -> Self {
        assert!(region.len() <= 64, "oracle regions are capped at 64 vertices");
        Dfs { field, region }
    }

    /// Walk every self-avoiding path from `s`, invoking `visit(path, total)`
    /// at each vertex, skipping extensions where `prune(total)` says so.
    fn walk(&self, s: Vertex, prune: &dyn Fn(f64) -> bool, visit: &mut dyn FnMut(&[Vertex], f64)) {
        let mut path: Vec<Vertex> = vec![s];
        self.recurse(s, 1u64 << self.region.index(s), 0.0, &mut path, prune, visit);
    }

    fn recurse(
        &self,
        v: Vertex,
        visited: u64,
        total: f64,
        path: &mut Vec<Vertex>,
        prune: &dyn Fn(f64) -> bool,
        visit: &mut dyn FnMut(&[Vertex], f64),
    ) {
        visit(path, total);
        for (dx, dy) in [(1, 0), (0, 1), (-1, 0), (0, -1)] {
            let u = Vertex::new(v.x + dx, v.y + dy);
            if !self.region.contains(u) {
                continue;
            }
            let bit = 1u64 << self.region.index(u);
            if visited & bit != 0 {
                continue;
            }
            let nt = total + unit_weight(self.field, EdgeId::between(v, u));
            if prune(nt) {
                continue;
            }
            path.push(u);
            self.recurse(u, visited | bit, nt, path, prune, visit);
            path.pop();
        }
    }

    /// Min path cost from `s` to every vertex, exact wherever the minimum is
    /// at most `cap`; vertices farther than that stay infinite.
    fn min_times_from(&self, s: Vertex, cap: f64) -> Vec<f64> {
        let mut best = vec![f64::INFINITY; self.region.len()];
        let region = self.region;
        let mut record = |path: &[Vertex], total: f64| {
            let i = region.index(*path.last().unwrap());
            if total < best[i] {
                best[i] = total;
            }
        };
        self.walk(s, &|t| t > cap, &mut record);
        best
    }
}

/// Exhaustive minimum passage time between two vertices.
pub fn min_time<W: EdgeWeights>(field: &W, region: &Region, s: Vertex, t: Vertex) -> OracleTime {
    let dfs = Dfs::new(field, region);
    let best = Cell::new(staircase_cost(field, s, t));
    let mut record = |path: &[Vertex], total: f64| {
        if *path.last().unwrap() == t && total < best.get() {
            best.set(total);
        }
    };
    dfs.walk(s, &|tot| tot > best.get(), &mut record);
    OracleTime { units: best.get(), quantum: field.tick_domain().map(|d| d.quantum) }
}

/// Union of vertices on optimal self-avoiding paths from `s` to `t`.
pub fn optimal_sap_union<W: EdgeWeights>(
    field: &W,
    region: &Region,
    s: Vertex,
    t: Vertex,
) -> BTreeSet<Vertex> {
    let best = min_time(field, region, s, t).units;
    let dfs = Dfs::new(field, region);
    let mut members = BTreeSet::new();
    let mut record = |path: &[Vertex], total: f64| {
        if *path.last().unwrap() == t && total == best {
            members.extend(path.iter().copied());
        }
    };
    dfs.walk(s, &|tot| tot > best, &mut record);
    members
}

/// Vertices satisfying `T(s,v) + T(v,t) = T(s,t)` with both passage times
/// computed by enumeration. With zero-weight atoms this is the optimal-walk
/// union, a superset of the self-avoiding-path union.
pub fn criterion_set<W: EdgeWeights>(
    field: &W,
    region: &Region,
    s: Vertex,
    t: Vertex,
) -> BTreeSet<Vertex> {
    let total = min_time(field, region, s, t).units;
    let dfs = Dfs::new(field, region);
    let quantized = field.tick_domain().is_some();
    let tol = if quantized { 0.0 } else { 1e-9 * total.max(1.0) };
    // reversed-order float sums can land an ulp above the forward total, so
    // the enumeration cap needs the same slack as the equality test
    let cap = total + tol;
    let from_s = dfs.min_times_from(s, cap);
    let from_t = dfs.min_times_from(t, cap);
    let mut members = BTreeSet::new();
    for i in 0..region.len() {
        let sum = from_s[i] + from_t[i];
        if sum.is_finite() && (sum - total).abs() <= tol {
            members.insert(region.vertex(i));
        }
    }
    members
}

/// Exhaustive min over the column `x = line_x` of s-to-column passage times.
pub fn min_time_to_line<W: EdgeWeights>(
    field: &W,
    region: &Region,
    s: Vertex,
    line_x: i64,
) -> OracleTime {
    let dfs = Dfs::new(field, region);
    let best = Cell::new(staircase_cost(field, s, Vertex::new(line_x, s.y)));
    let mut record = |path: &[Vertex], total: f64| {
        if path.last().unwrap().x == line_x && total < best.get() {
            best.set(total);
        }
    };
    dfs.walk(s, &|tot| tot > best.get(), &mut record);
    OracleTime { units: best.get(), quantum: field.tick_domain().map(|d| d.quantum) }
}

/// All canonical edges inside a region.
pub fn region_edges(region: &Region) -> Vec<EdgeId> {
    let mut edges = Vec::new();
    for v in region.vertices() {
        if v.x < region.xmax {
            edges.push(EdgeId { base: v, axis: Axis::East });
        }
        if v.y < region.ymax {
            edges.push(EdgeId { base: v, axis: Axis::North });
        }
    }
    edges
}

/// A fixed assignment of weights to a region's edges.
pub struct FixedWeights {
    pub edges: Vec<(EdgeId, f64)>,
}

impl EdgeWeights for FixedWeights {
    fn tick_domain(&self) -> Option<fpp_core::TickDomain> {
        None
    }
    fn weight(&self, e: EdgeId) -> f64 {
        self.edges
            .iter()
            .find(|(id, _)| *id == e)
            .map(|(_, w)| *w)
            .expect("edge not in fixed assignment")
    }
    fn weight_ticks(&self, _e: EdgeId) -> u32 {
        unreachable!()
    }
}

/// Exact moments of `T(s, t)` for a two-atom edge law on a small region.
#[derive(Debug, Clone, Copy)]
pub struct Moments {
    pub mean: f64,
    pub var: f64,
    /// Fourth central moment.
    pub mu4: f64,
}

/// Sum over every configuration of the region's edges, each independently
/// `lo` with probability `p_lo` and `hi` otherwise.
pub fn exact_two_atom_moments(
    lo: f64,
    hi: f64,
    p_lo: f64,
    region: &Region,
    s: Vertex,
    t: Vertex,
) -> Moments {
    let edges = region_edges(region);
    let m = edges.len();
    assert!(m <= 20, "exact enumeration is exponential in the edge count");
    let mut values = Vec::with_capacity(1 << m);
    let mut probs = Vec::with_capacity(1 << m);
    for mask in 0u32..(1u32 << m) {
        let assignment = FixedWeights {
            edges: edges
                .iter()
                .enumerate()
                .map(|(k, &e)| (e, if mask >> k & 1 == 0 { lo } else { hi }))
                .collect(),
        };
        let lows = (m as u32 - mask.count_ones()) as i32;
        let prob = p_lo.powi(lows) * (1.0 - p_lo).powi(mask.count_ones() as i32);
        values.push(min_time(&assignment, region, s, t).units);
        probs.push(prob);
    }
    let mean: f64 = values.iter().zip(&probs).map(|(v, p)| v * p).sum();
    let var: f64 = values.iter().zip(&probs).map(|(v, p)| (v - mean) * (v - mean) * p).sum();
    let mu4: f64 = values.iter().zip(&probs).map(|(v, p)| (v - mean).powi(4) * p).sum();
    Moments { mean, var, mu4 }
}

/// Distribution of the origin-started right edge after one level,
/// conditioned on the cluster surviving that level: over the four
/// configurations of the two edges out of the origin, both-closed is
/// discarded. Returns `(P[r = 1], P[r = -1])`.
pub fn origin_r1_conditional(p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let mut mass = [0.0f64; 2];
    let mut alive = 0.0;
    for right in [true, false] {
        for left in [true, false] {
            let prob = (if right { p } else { q }) * (if left { p } else { q });
            if !right && !left {
                continue;
            }
            alive += prob;
            if right {
                mass[0] += prob;
            } else {
                mass[1] += prob;
            }
        }
    }
    (mass[0] / alive, mass[1] / alive)
}

/// Exact expectation of the two-level half-line right edge, with the same
/// finite window and restart clause as the simulator: initial sites
/// `{0, -2, -4, -6}` inside the window `[-6, 4]`, edges kept only when their
/// target stays in the window, and an empty level restarting at `{n+1}`.
pub fn halfline_r2_expectation(p: f64) -> f64 {
    let window = -6..=4i64;
    let level0: Vec<i64> = vec![0, -2, -4, -6];
    let level1: Vec<i64> = vec![1, -1, -3, -5];
    // (site, level, up_right) for every edge whose target stays in the window
    let mut edges: Vec<(i64, i64, bool)> = Vec::new();
    for (sites, level) in [(&level0, 0i64), (&level1, 1)] {
        for &m in sites {
            if window.contains(&(m + 1)) {
                edges.push((m, level, true));
            }
            if window.contains(&(m - 1)) {
                edges.push((m, level, false));
            }
        }
    }
    let k = edges.len();
    assert!(k <= 24);
    let q = 1.0 - p;
    let mut expectation = 0.0;
    for mask in 0u32..(1u32 << k) {
        let open = |site: i64, level: i64, dir: bool| -> bool {
            edges
                .iter()
                .position(|&e| e == (site, level, dir))
                .map(|i| mask >> i & 1 == 1)
                .unwrap_or(false)
        };
        let prob = (0..k).fold(1.0, |acc, i| acc * if mask >> i & 1 == 1 { p } else { q });

        let step = |sites: &[i64], level: i64| -> Vec<i64> {
            let mut out: Vec<i64> = Vec::new();
            for &m in sites {
                for (dir, target) in [(true, m + 1), (false, m - 1)] {
                    if window.contains(&target) && open(m, level, dir) && !out.contains(&target) {
                        out.push(target);
                    }
                }
            }
            out
        };
        let mut s1 = step(&level0, 0);
        if s1.is_empty() {
            s1 = vec![1]; // restart clause
        }
        let mut s2 = step(&s1, 1);
        if s2.is_empty() {
            s2 = vec![2];
        }
        expectation += prob * *s2.iter().max().unwrap() as f64;
    }
    expectation
}
