//! Transversal fluctuations and longitudinal variance.
//!
//! `h_n(u)` is the largest Euclidean distance from the optimal-vertex set
//! `M_n(u)` to the infinite line through the origin at angle theta. Its
//! growth exponent `xi` is estimated from the slope of `log median h_n`
//! against `log n`; the definition in the literature is a tail-probability
//! infimum with an unspecified constant, so the estimator deliberately tracks
//! the typical scale instead (medians are robust against the heavy upper
//! tail). The variance scan feeding `chi` works the same way on
//! `Var T(0, n u)`.

use crate::engine::{self, clip_region, continuum_lift, OptimalVertexSet};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, ExponentFit};
use crate::lattice::Vertex;
use crate::rng;
use crate::weights::{DistributionSpec, WeightField};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

/// Seed-derivation domains, one per task family, so partial reruns of any
/// slice reproduce the corresponding slice of a full run.
pub mod domain {
    pub const FLUCT: u64 = 0x01;
    pub const VARIANCE: u64 = 0x02;
    pub const MU: u64 = 0x03;
    pub const ALPHA: u64 = 0x04;
    pub const BREAKPOINTS: u64 = 0x05;
}

/// A direction of the plane in polar coordinates, angle in `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub r: f64,
    pub theta: f64,
}

impl Direction {
    pub fn new(r: f64, theta: f64) -> Result<Direction> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidSpec(format!("direction needs r > 0, got {r}")));
        }
        if !theta.is_finite() || !(0.0..=core::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidSpec(format!("theta must lie in [0, pi/2], got {theta}")));
        }
        Ok(Direction { r, theta })
    }

    /// Lattice endpoint of `n * u`.
    pub fn target(&self, n: u64) -> Vertex {
        let s = n as f64 * self.r;
        continuum_lift(s * libm::cos(self.theta), s * libm::sin(self.theta))
    }

    /// Scale parameter handed to `clip_region` for an `n`-query.
    pub fn clip_scale(&self, n: u64) -> i64 {
        (libm::ceil(n as f64 * self.r) as i64).max(1)
    }
}

/// Euclidean distance from a vertex to the infinite line `L_theta`.
#[inline]
pub fn line_distance(v: Vertex, theta: f64) -> f64 {
    libm::fabs(v.x as f64 * libm::sin(theta) - v.y as f64 * libm::cos(theta))
}

/// `h_n(u)`: max distance from the members of an optimal-vertex set to the
/// line through the origin at `dir.theta`.
pub fn transversal_fluctuation(mset: &OptimalVertexSet, dir: &Direction) -> Result<f64> {
    if mset.members.is_empty() {
        return Err(Error::Estimator("empty optimal-vertex set".into()));
    }
    Ok(mset
        .members
        .iter()
        .map(|&v| line_distance(v, dir.theta))
        .fold(0.0, f64::max))
}

/// One transversal-fluctuation measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluctuationSample {
    pub n: u64,
    pub hn: f64,
    pub replicate_id: u64,
    /// Field seed the sample was drawn with.
    pub seed: u64,
}

/// Margin schedule: start at the default confinement factor and double until
/// the optimal set stops touching the clip box.
const INITIAL_MARGIN: f64 = 3.0;
const MAX_MARGIN: f64 = 48.0;

pub(crate) fn mset_with_retry(
    field: &WeightField,
    dir: &Direction,
    n: u64,
) -> Result<(OptimalVertexSet, f64)> {
    let target = dir.target(n);
    let scale = dir.clip_scale(n);
    let mut margin = INITIAL_MARGIN;
    loop {
        let region = clip_region(scale, margin);
        match engine::optimal_vertex_set(field, &region, Vertex::new(0, 0), target) {
            Ok(m) => return Ok((m, margin)),
            Err(Error::RegionTooSmall { .. }) => {
                margin *= 2.0;
                if margin > MAX_MARGIN {
                    return Err(Error::RegionTooSmall { margin });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// An independent `(n, replicate)` fluctuation measurement. Tasks are pure
/// and may run on any thread; results are reduced in task order.
#[derive(Debug, Clone, Copy)]
pub struct FluctTask {
    pub spec: DistributionSpec,
    pub dir: Direction,
    pub n: u64,
    pub replicate_id: u64,
    pub field_seed: u64,
}

impl FluctTask {
    pub fn run(&self) -> Result<FluctuationSample> {
        let field = WeightField::new(self.spec, self.field_seed, self.replicate_id)?;
        let (mset, margin) = mset_with_retry(&field, &self.dir, self.n)?;
        let hn = transversal_fluctuation(&mset, &self.dir)?;
        debug_assert!(hn <= 2.0 * margin * self.dir.clip_scale(self.n) as f64 * 1.5);
        Ok(FluctuationSample { n: self.n, hn, replicate_id: self.replicate_id, seed: self.field_seed })
    }
}

fn check_grid(n_list: &[u64], replicates: u64) -> Result<()> {
    if n_list.is_empty() || !n_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Estimator("n grid must be non-empty and strictly ascending".into()));
    }
    if n_list[0] == 0 {
        return Err(Error::Estimator("n must be >= 1".into()));
    }
    if replicates == 0 {
        return Err(Error::Estimator("need at least one replicate".into()));
    }
    Ok(())
}

/// Task plan for a fluctuation scan, in canonical `(n, replicate)` order.
pub fn fluctuation_tasks(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<FluctTask>> {
    spec.validate()?;
    check_grid(n_list, replicates)?;
    let mut tasks = Vec::with_capacity(n_list.len() * replicates as usize);
    for &n in n_list {
        let field_seed = rng::derive_seed(seed, domain::FLUCT, n);
        for rep in 0..replicates {
            tasks.push(FluctTask { spec, dir, n, replicate_id: rep, field_seed });
        }
    }
    Ok(tasks)
}

/// Sequential driver: one sample per `(n, replicate)`, deterministic in `seed`.
pub fn sample_fluctuations(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<FluctuationSample>> {
    fluctuation_tasks(spec, dir, n_list, replicates, seed)?
        .iter()
        .map(FluctTask::run)
        .collect()
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Slope of `log median h_n` vs `log n`.
///
/// All-zero medians (constant weights on the axis) are a distinct signal, not
/// a fit of garbage.
pub fn estimate_xi(samples: &[FluctuationSample]) -> Result<ExponentFit> {
    let mut by_n: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for s in samples {
        by_n.entry(s.n).or_default().push(s.hn);
    }
    let medians: Vec<(u64, f64)> =
        by_n.into_iter().map(|(n, mut v)| (n, median(&mut v))).collect();
    if medians.iter().all(|&(_, m)| m == 0.0) {
        return Err(Error::DegenerateAllZero);
    }
    let positive = medians.iter().filter(|&&(_, m)| m > 0.0).count();
    if positive < 3 {
        return Err(Error::Estimator(format!(
            "xi needs >= 3 n values with positive median h_n, got {positive}"
        )));
    }
    fit_power_law(&medians)
}

/// Sample variance of `T(0, n u)` at one n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariancePoint {
    pub n: u64,
    pub var: f64,
    pub replicates: u64,
}

/// One replicate of passage times along a ray: a single search from the
/// origin serves every n in the grid. Shared by the variance scan and the
/// directional time-constant estimator.
#[derive(Debug, Clone)]
pub struct RadialTimesTask {
    pub spec: DistributionSpec,
    pub dir: Direction,
    pub n_list: Vec<u64>,
    pub replicate_id: u64,
    pub field_seed: u64,
}

impl RadialTimesTask {
    /// Passage times `T(0, n u)` for every n in the grid.
    pub fn run(&self) -> Result<Vec<f64>> {
        let field = WeightField::new(self.spec, self.field_seed, self.replicate_id)?;
        let n_max = *self.n_list.last().unwrap();
        let region = clip_region(self.dir.clip_scale(n_max), INITIAL_MARGIN);
        let targets: Vec<Vertex> = self.n_list.iter().map(|&n| self.dir.target(n)).collect();
        engine::times_at_targets(&field, &region, Vertex::new(0, 0), &targets)
    }
}

pub fn variance_tasks(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<RadialTimesTask>> {
    spec.validate()?;
    check_grid(n_list, replicates)?;
    if replicates < 30 {
        return Err(Error::Estimator(format!(
            "variance scan needs >= 30 replicates, got {replicates}"
        )));
    }
    Ok((0..replicates)
        .map(|rep| RadialTimesTask {
            spec,
            dir,
            n_list: n_list.into(),
            replicate_id: rep,
            field_seed: rng::derive_seed(seed, domain::VARIANCE, 0),
        })
        .collect())
}

/// Unbiased per-n sample variance over replicate passage times. Rows must be
/// in replicate order; columns follow `n_list`.
pub fn reduce_variances(n_list: &[u64], rows: &[Vec<f64>]) -> Vec<VariancePoint> {
    let reps = rows.len();
    n_list
        .iter()
        .enumerate()
        .map(|(j, &n)| {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / reps as f64;
            let ss = rows.iter().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>();
            VariancePoint { n, var: ss / (reps as f64 - 1.0), replicates: reps as u64 }
        })
        .collect()
}

/// Sequential variance scan.
pub fn variance_scan(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<VariancePoint>> {
    let tasks = variance_tasks(spec, dir, n_list, replicates, seed)?;
    let rows: Result<Vec<Vec<f64>>> = tasks.iter().map(RadialTimesTask::run).collect();
    Ok(reduce_variances(n_list, &rows?))
}

/// Longitudinal exponent: half the slope of `log Var T` vs `log n`
/// (`Var ~ n^{2 chi}`).
pub fn estimate_chi(scan: &[VariancePoint]) -> Result<ExponentFit> {
    if scan.iter().all(|p| p.var == 0.0) {
        return Err(Error::DegenerateAllZero);
    }
    let pts: Vec<(u64, f64)> = scan.iter().map(|p| (p.n, p.var)).collect();
    let fit = fit_power_law(&pts)?;
    Ok(ExponentFit {
        exponent: fit.exponent / 2.0,
        intercept: fit.intercept,
        stderr: fit.stderr / 2.0,
        n_range: fit.n_range,
        points_used: fit.points_used,
    })
}
