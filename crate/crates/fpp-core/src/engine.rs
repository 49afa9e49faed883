//! Exact passage times, geodesics and optimal-vertex sets on clipped regions.
//!
//! Two arithmetic lanes. Atomic distributions with commensurable atoms run in
//! integer ticks through a circular bucket queue (bucket width = one tick),
//! so every passage time is exact and the optimal-vertex membership test
//! `T(s,v) + T(v,t) = T(s,t)` is an integer equality. Continuous
//! distributions fall back to a binary-heap Dijkstra on `f64` with a relative
//! equality tolerance.
//!
//! Weights are recomputed from the counter-based field at every relaxation;
//! nothing is stored per edge, which is what makes `n ~ 10^3..10^4` regions
//! affordable.

use crate::error::{Error, Result};
use crate::lattice::{Axis, EdgeId, Region, Vertex};
use crate::weights::EdgeWeights;
use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

const UNREACHED_TICKS: u32 = u32::MAX;
const NO_PRED: u8 = u8::MAX;

/// Incoming directions in canonical tie-break order: a geodesic walking back
/// from the target prefers an EAST-entering edge, then NORTH, WEST, SOUTH.
const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

/// Nearest lattice vertex of a point of the plane; ties broken toward the
/// lexicographically (x, then y) smallest candidate.
pub fn continuum_lift(x: f64, y: f64) -> Vertex {
    let cands_x = [libm::floor(x) as i64, libm::ceil(x) as i64];
    let cands_y = [libm::floor(y) as i64, libm::ceil(y) as i64];
    let mut best: Option<(f64, Vertex)> = None;
    for &cx in &cands_x {
        for &cy in &cands_y {
            let d2 = (x - cx as f64) * (x - cx as f64) + (y - cy as f64) * (y - cy as f64);
            let v = Vertex::new(cx, cy);
            best = match best {
                None => Some((d2, v)),
                Some((bd, bv)) => {
                    if d2 < bd || (d2 == bd && (v.x, v.y) < (bv.x, bv.y)) {
                        Some((d2, v))
                    } else {
                        Some((bd, bv))
                    }
                }
            };
        }
    }
    best.unwrap().1
}

/// Confinement box `[-m n, m n]^2` for a scale-`n` query.
///
/// Geodesics stay inside a box of side proportional to `n` except with
/// exponentially small probability, but the proportionality constant is not
/// quantified, so results computed on a clipped region carry an a-posteriori
/// check: if an optimal path or vertex set touches the box ring, the caller
/// doubles `margin_factor` and reruns. Correctness never relies on the
/// constant.
pub fn clip_region(n: i64, margin_factor: f64) -> Region {
    assert!(n >= 1 && margin_factor >= 1.0, "clip_region preconditions");
    let half = libm::ceil(margin_factor * n as f64) as i64;
    Region { xmin: -half, xmax: half, ymin: -half, ymax: half }
}

/// Exact single-source passage times `T(source, .)` restricted to paths
/// inside `region`.
#[derive(Debug, Clone)]
pub struct PassageTimeMap {
    pub source: Vertex,
    pub region: Region,
    store: Store,
}

#[derive(Debug, Clone)]
enum Store {
    Ticks { dist: Vec<u32>, quantum: f64 },
    Time { dist: Vec<f64> },
}

impl PassageTimeMap {
    /// Passage time in time units; `None` outside the region or beyond the
    /// settled horizon of an early-stopped computation.
    pub fn time(&self, v: Vertex) -> Option<f64> {
        if !self.region.contains(v) {
            return None;
        }
        let i = self.region.index(v);
        match &self.store {
            Store::Ticks { dist, quantum } => {
                (dist[i] != UNREACHED_TICKS).then(|| dist[i] as f64 * quantum)
            }
            Store::Time { dist } => dist[i].is_finite().then(|| dist[i]),
        }
    }

    /// Exact tick value for integer-lane maps.
    pub fn ticks(&self, v: Vertex) -> Option<u64> {
        if !self.region.contains(v) {
            return None;
        }
        let i = self.region.index(v);
        match &self.store {
            Store::Ticks { dist, .. } => (dist[i] != UNREACHED_TICKS).then(|| dist[i] as u64),
            Store::Time { .. } => None,
        }
    }

    /// All finite `(vertex, time)` entries in row-major order.
    pub fn iter_times(&self) -> impl Iterator<Item = (Vertex, f64)> + '_ {
        self.region.vertices().filter_map(move |v| self.time(v).map(|t| (v, t)))
    }
}

/// One optimal path, canonical under the incoming-direction tie-break.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    pub vertices: Vec<Vertex>,
    pub total_time: f64,
}

/// The set `M` of vertices lying on some optimal path from `source` to
/// `target`, computed by the two-map criterion
/// `T(s,v) + T(v,t) = T(s,t)`, plus one canonical witness geodesic.
///
/// Paths here are walks in the model's sense, so with zero-weight atoms the
/// set can strictly contain the union of optimal self-avoiding paths. The
/// degenerate query `source == target` returns just the endpoint.
#[derive(Debug, Clone)]
pub struct OptimalVertexSet {
    pub source: Vertex,
    pub target: Vertex,
    pub total_time: f64,
    /// Members in row-major region order.
    pub members: Vec<Vertex>,
    pub witness: Geodesic,
}

enum Stop {
    Exhaust,
    /// Stop once every listed index has settled.
    AllTargets(Vec<usize>),
    /// Stop at the first settled vertex in the column `x = col`.
    AnyAtColumn(i64),
    /// Settle the target, then keep going through its distance value.
    ThroughTarget(usize),
    /// Keep going until the settled distance exceeds this tick value.
    ThroughTicks(u64),
    /// Same for the float lane.
    ThroughTime(f64),
}

struct SsspOut<D> {
    dist: Vec<D>,
    pred: Option<Vec<u8>>,
    column_hit: Option<(usize, f64)>,
}

#[derive(Clone, Copy)]
enum Lane {
    Ticks { quantum: f64 },
    Time,
}

fn lane_for<W: EdgeWeights>(field: &W, region: &Region) -> Lane {
    match field.tick_domain() {
        Some(td) => {
            let diam = (region.width() + region.height()) as u64;
            if diam * td.max_tick as u64 <= (u32::MAX - 1) as u64 {
                Lane::Ticks { quantum: td.quantum }
            } else {
                Lane::Time
            }
        }
        None => Lane::Time,
    }
}

#[inline]
fn edge_to(v: Vertex, dir: usize) -> EdgeId {
    match dir {
        // incoming EAST at u means the edge from v = u - (1,0); canonical ids
        // are spelled out here rather than via EdgeId::between to keep the
        // relaxation loop branch-light
        0 => EdgeId { base: v, axis: Axis::East },
        1 => EdgeId { base: v, axis: Axis::North },
        2 => EdgeId { base: Vertex::new(v.x - 1, v.y), axis: Axis::East },
        _ => EdgeId { base: Vertex::new(v.x, v.y - 1), axis: Axis::North },
    }
}

fn sssp_ticks<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    stop: Stop,
    record_pred: bool,
) -> SsspOut<u32> {
    let len = region.len();
    assert!(len < u32::MAX as usize, "region too large to index");
    let w = region.width();
    let max_tick = field.tick_domain().expect("tick lane").max_tick as u64;
    let nb = max_tick as usize + 1;

    let mut dist = vec![UNREACHED_TICKS; len];
    let mut pred = record_pred.then(|| vec![NO_PRED; len]);
    let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); nb];
    let src = region.index(source);
    dist[src] = 0;
    buckets[0].push(src as u32);
    let mut in_queue = 1usize;

    let mut targets_left = match &stop {
        Stop::AllTargets(t) => t.len(),
        _ => 0,
    };
    let mut through: Option<u64> = match &stop {
        Stop::ThroughTicks(v) => Some(*v),
        _ => None,
    };

    let mut d: u64 = 0;
    while in_queue > 0 {
        if let Some(limit) = through {
            if d > limit {
                break;
            }
        }
        let b = (d % nb as u64) as usize;
        while let Some(i) = buckets[b].pop() {
            in_queue -= 1;
            let i = i as usize;
            if dist[i] as u64 != d {
                continue; // stale entry, improved since push
            }
            match &stop {
                Stop::AnyAtColumn(col) => {
                    if region.vertex(i).x == *col {
                        return SsspOut { dist, pred, column_hit: Some((i, d as f64)) };
                    }
                }
                Stop::AllTargets(ts) => {
                    if ts.contains(&i) {
                        targets_left -= 1;
                        if targets_left == 0 {
                            return SsspOut { dist, pred, column_hit: None };
                        }
                    }
                }
                Stop::ThroughTarget(t) => {
                    if i == *t {
                        through = Some(d);
                    }
                }
                _ => {}
            }

            let v = region.vertex(i);
            for (dir, (dx, dy)) in DIRS.iter().enumerate() {
                let u = Vertex::new(v.x + dx, v.y + dy);
                if !region.contains(u) {
                    continue;
                }
                let j = if *dx != 0 { (i as i64 + dx) as usize } else { (i as i64 + dy * w as i64) as usize };
                let nd = d + field.weight_ticks(edge_to(v, dir)) as u64;
                if (nd as u32) < dist[j] {
                    dist[j] = nd as u32;
                    if let Some(p) = pred.as_mut() {
                        p[j] = dir as u8;
                    }
                    buckets[(nd % nb as u64) as usize].push(j as u32);
                    in_queue += 1;
                }
            }
        }
        d += 1;
    }
    SsspOut { dist, pred, column_hit: None }
}

#[derive(PartialEq)]
struct HeapKey(f64);

impl Eq for HeapKey {}
impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn sssp_time<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    stop: Stop,
    record_pred: bool,
) -> SsspOut<f64> {
    let len = region.len();
    assert!(len < u32::MAX as usize, "region too large to index");
    let w = region.width();
    let mut dist = vec![f64::INFINITY; len];
    let mut pred = record_pred.then(|| vec![NO_PRED; len]);
    let mut heap: BinaryHeap<Reverse<(HeapKey, u32)>> = BinaryHeap::new();
    let src = region.index(source);
    dist[src] = 0.0;
    heap.push(Reverse((HeapKey(0.0), src as u32)));

    let mut targets_left = match &stop {
        Stop::AllTargets(t) => t.len(),
        _ => 0,
    };
    let mut through: Option<f64> = match &stop {
        Stop::ThroughTime(v) => Some(*v),
        _ => None,
    };

    while let Some(Reverse((HeapKey(d), i))) = heap.pop() {
        let i = i as usize;
        if dist[i] != d {
            continue;
        }
        if let Some(limit) = through {
            if d > limit {
                break;
            }
        }
        match &stop {
            Stop::AnyAtColumn(col) => {
                if region.vertex(i).x == *col {
                    return SsspOut { dist, pred, column_hit: Some((i, d)) };
                }
            }
            Stop::AllTargets(ts) => {
                if ts.contains(&i) {
                    targets_left -= 1;
                    if targets_left == 0 {
                        return SsspOut { dist, pred, column_hit: None };
                    }
                }
            }
            Stop::ThroughTarget(t) => {
                if i == *t {
                    through = Some(d);
                }
            }
            _ => {}
        }

        let v = region.vertex(i);
        for (dir, (dx, dy)) in DIRS.iter().enumerate() {
            let u = Vertex::new(v.x + dx, v.y + dy);
            if !region.contains(u) {
                continue;
            }
            let j = if *dx != 0 { (i as i64 + dx) as usize } else { (i as i64 + dy * w as i64) as usize };
            let nd = d + field.weight(edge_to(v, dir));
            if nd < dist[j] {
                dist[j] = nd;
                if let Some(p) = pred.as_mut() {
                    p[j] = dir as u8;
                }
                heap.push(Reverse((HeapKey(nd), j as u32)));
            }
        }
    }
    SsspOut { dist, pred, column_hit: None }
}

/// Full passage-time map from `source` over the whole region.
pub fn passage_times<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
) -> Result<PassageTimeMap> {
    if !region.contains(source) {
        return Err(Error::OutsideRegion { what: "source" });
    }
    let store = match lane_for(field, region) {
        Lane::Ticks { quantum } => {
            let out = sssp_ticks(field, region, source, Stop::Exhaust, false);
            Store::Ticks { dist: out.dist, quantum }
        }
        Lane::Time => {
            let out = sssp_time(field, region, source, Stop::Exhaust, false);
            Store::Time { dist: out.dist }
        }
    };
    Ok(PassageTimeMap { source, region: *region, store })
}

/// Walk back from `target` along equality-satisfying incoming edges.
///
/// Ties prefer EAST over NORTH over WEST over SOUTH among strictly-descending
/// predecessors, so the output is a canonical representative of the (possibly
/// non-unique) optimal paths. Zero-weight plateaus, where no strictly smaller
/// predecessor exists, follow the settle-order predecessor recorded during the
/// search; settle order is acyclic, so the walk terminates and the path is
/// self-avoiding.
fn walk_back<W, D, FD, FW>(
    field: &W,
    region: &Region,
    dist: &[D],
    pred: &[u8],
    source: Vertex,
    target: Vertex,
    dval: FD,
    wval: FW,
) -> Vec<Vertex>
where
    W: EdgeWeights,
    D: Copy + PartialEq + PartialOrd,
    FD: Fn(D) -> Option<D>,
    FW: Fn(&W, EdgeId) -> D,
    D: core::ops::Add<Output = D>,
{
    let mut path = vec![target];
    let mut v = target;
    while v != source {
        let i = region.index(v);
        let dv = dist[i];
        let mut chosen: Option<Vertex> = None;
        for (dir, (dx, dy)) in DIRS.iter().enumerate() {
            let u = Vertex::new(v.x - dx, v.y - dy);
            if !region.contains(u) {
                continue;
            }
            let du = dist[region.index(u)];
            if let Some(du) = dval(du) {
                if du < dv && du + wval(field, edge_to(u, dir)) == dv {
                    chosen = Some(u);
                    break;
                }
            }
        }
        let u = chosen.unwrap_or_else(|| {
            // zero-weight plateau: follow the recorded predecessor
            let dir = pred[i] as usize;
            debug_assert!(dir < 4);
            Vertex::new(v.x - DIRS[dir].0, v.y - DIRS[dir].1)
        });
        path.push(u);
        v = u;
    }
    path.reverse();
    path
}

fn geodesic_from_walk<W: EdgeWeights>(field: &W, vertices: Vec<Vertex>, quantum: Option<f64>) -> Geodesic {
    let total_time = match quantum {
        Some(q) => {
            let ticks: u64 = vertices
                .windows(2)
                .map(|p| field.weight_ticks(EdgeId::between(p[0], p[1])) as u64)
                .sum();
            ticks as f64 * q
        }
        None => vertices
            .windows(2)
            .fold(0.0, |acc, p| acc + field.weight(EdgeId::between(p[0], p[1]))),
    };
    Geodesic { vertices, total_time }
}

/// One canonical optimal path, ignoring the confinement check. Exposed for
/// fixed-region studies and the enumeration-oracle tests; `geodesic` adds the
/// clip-box check.
pub fn geodesic_confined<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    target: Vertex,
) -> Result<Geodesic> {
    if !region.contains(source) {
        return Err(Error::OutsideRegion { what: "source" });
    }
    if !region.contains(target) {
        return Err(Error::OutsideRegion { what: "target" });
    }
    if source == target {
        return Ok(Geodesic { vertices: vec![source], total_time: 0.0 });
    }
    let t = region.index(target);
    match lane_for(field, region) {
        Lane::Ticks { quantum } => {
            let out = sssp_ticks(field, region, source, Stop::AllTargets(vec![t]), true);
            let path = walk_back(
                field,
                region,
                &out.dist,
                out.pred.as_ref().unwrap(),
                source,
                target,
                |d: u32| (d != UNREACHED_TICKS).then_some(d),
                |f, e| f.weight_ticks(e),
            );
            Ok(geodesic_from_walk(field, path, Some(quantum)))
        }
        Lane::Time => {
            let out = sssp_time(field, region, source, Stop::AllTargets(vec![t]), true);
            let path = walk_back(
                field,
                region,
                &out.dist,
                out.pred.as_ref().unwrap(),
                source,
                target,
                |d: f64| d.is_finite().then_some(d),
                |f, e| f.weight(e),
            );
            Ok(geodesic_from_walk(field, path, None))
        }
    }
}

fn touches_ring(region: &Region, vs: &[Vertex], source: Vertex, target: Vertex) -> bool {
    vs.iter().any(|&v| v != source && v != target && region.on_boundary(v))
}

/// One canonical optimal path. Fails with `RegionTooSmall` when the witness
/// touches the region ring away from its endpoints, which means the region
/// may have clipped a better path; enlarge and retry (see `clip_region`).
pub fn geodesic<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    target: Vertex,
) -> Result<Geodesic> {
    let g = geodesic_confined(field, region, source, target)?;
    if touches_ring(region, &g.vertices, source, target) {
        return Err(Error::RegionTooSmall { margin: f64::NAN });
    }
    Ok(g)
}

/// Optimal-vertex set ignoring the confinement check; see `optimal_vertex_set`.
pub fn optimal_vertex_set_confined<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    target: Vertex,
) -> Result<OptimalVertexSet> {
    if !region.contains(source) {
        return Err(Error::OutsideRegion { what: "source" });
    }
    if !region.contains(target) {
        return Err(Error::OutsideRegion { what: "target" });
    }
    if source == target {
        let witness = Geodesic { vertices: vec![source], total_time: 0.0 };
        return Ok(OptimalVertexSet {
            source,
            target,
            total_time: 0.0,
            members: vec![source],
            witness,
        });
    }
    let t = region.index(target);
    match lane_for(field, region) {
        Lane::Ticks { quantum } => {
            let fwd = sssp_ticks(field, region, source, Stop::ThroughTarget(t), true);
            let d_st = fwd.dist[t];
            debug_assert_ne!(d_st, UNREACHED_TICKS);
            let bwd = sssp_ticks(field, region, target, Stop::ThroughTicks(d_st as u64), false);
            let mut members = Vec::new();
            for i in 0..region.len() {
                let (a, b) = (fwd.dist[i], bwd.dist[i]);
                if a != UNREACHED_TICKS
                    && b != UNREACHED_TICKS
                    && a as u64 + b as u64 == d_st as u64
                {
                    members.push(region.vertex(i));
                }
            }
            let path = walk_back(
                field,
                region,
                &fwd.dist,
                fwd.pred.as_ref().unwrap(),
                source,
                target,
                |d: u32| (d != UNREACHED_TICKS).then_some(d),
                |f, e| f.weight_ticks(e),
            );
            let witness = geodesic_from_walk(field, path, Some(quantum));
            Ok(OptimalVertexSet {
                source,
                target,
                total_time: d_st as f64 * quantum,
                members,
                witness,
            })
        }
        Lane::Time => {
            let fwd = sssp_time(field, region, source, Stop::ThroughTarget(t), true);
            let d_st = fwd.dist[t];
            debug_assert!(d_st.is_finite());
            let bwd = sssp_time(field, region, target, Stop::ThroughTime(d_st), false);
            let tol = 1e-9 * if d_st > 0.0 { d_st } else { 1.0 };
            let mut members = Vec::new();
            for i in 0..region.len() {
                let s = fwd.dist[i] + bwd.dist[i];
                if s.is_finite() && (s - d_st).abs() <= tol {
                    members.push(region.vertex(i));
                }
            }
            let path = walk_back(
                field,
                region,
                &fwd.dist,
                fwd.pred.as_ref().unwrap(),
                source,
                target,
                |d: f64| d.is_finite().then_some(d),
                |f, e| f.weight(e),
            );
            let witness = geodesic_from_walk(field, path, None);
            Ok(OptimalVertexSet { source, target, total_time: d_st, members, witness })
        }
    }
}

/// The set of all vertices on some optimal `source -> target` path plus a
/// canonical witness. Fails with `RegionTooSmall` when the set touches the
/// region ring away from the endpoints.
pub fn optimal_vertex_set<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    target: Vertex,
) -> Result<OptimalVertexSet> {
    let m = optimal_vertex_set_confined(field, region, source, target)?;
    if touches_ring(region, &m.members, source, target) {
        return Err(Error::RegionTooSmall { margin: f64::NAN });
    }
    Ok(m)
}

/// Point-to-line time: min over vertices on `{x = line_x}` inside the region
/// of `T(source, .)`. The first settled vertex of the column is the minimum,
/// so the search stops there.
pub fn point_to_line_time<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    line_x: i64,
) -> Result<f64> {
    if !region.contains(source) {
        return Err(Error::OutsideRegion { what: "source" });
    }
    if line_x < region.xmin || line_x > region.xmax {
        return Err(Error::OutsideRegion { what: "line" });
    }
    if source.x > line_x {
        return Err(Error::Estimator(alloc::format!(
            "point_to_line_time wants source.x <= line_x, got {} > {line_x}",
            source.x
        )));
    }
    if source.x == line_x {
        return Ok(0.0);
    }
    match lane_for(field, region) {
        Lane::Ticks { quantum } => {
            let out = sssp_ticks(field, region, source, Stop::AnyAtColumn(line_x), false);
            let (_, ticks) = out.column_hit.expect("column reachable in a connected region");
            Ok(ticks * quantum)
        }
        Lane::Time => {
            let out = sssp_time(field, region, source, Stop::AnyAtColumn(line_x), false);
            Ok(out.column_hit.expect("column reachable in a connected region").1)
        }
    }
}

/// Passage times from `source` to each listed target, stopping as soon as all
/// targets have settled. Used by the estimators that read several radii off
/// one map.
pub fn times_at_targets<W: EdgeWeights>(
    field: &W,
    region: &Region,
    source: Vertex,
    targets: &[Vertex],
) -> Result<Vec<f64>> {
    if !region.contains(source) {
        return Err(Error::OutsideRegion { what: "source" });
    }
    for t in targets {
        if !region.contains(*t) {
            return Err(Error::OutsideRegion { what: "target" });
        }
    }
    let idx: Vec<usize> = targets.iter().map(|t| region.index(*t)).collect();
    match lane_for(field, region) {
        Lane::Ticks { quantum } => {
            let out = sssp_ticks(field, region, source, Stop::AllTargets(idx.clone()), false);
            Ok(idx.iter().map(|&i| out.dist[i] as f64 * quantum).collect())
        }
        Lane::Time => {
            let out = sssp_time(field, region, source, Stop::AllTargets(idx.clone()), false);
            Ok(idx.iter().map(|&i| out.dist[i]).collect())
        }
    }
}
