//! Supercritical oriented percolation on the rotated lattice: right-edge
//! process, percolation-point detection, break-point decomposition, speed
//! estimation and the percolation-cone endpoints.
//!
//! The lattice is `{(m, n): m + n even, n >= 0}` with edges from `(m, n)` to
//! `(m - 1, n + 1)` and `(m + 1, n + 1)`, each open with probability `p`
//! independently (deterministic per `(seed, replicate, edge)`). The right
//! edge evolves level by level over a window wide enough that truncation
//! cannot affect the reported values at the simulated horizon; when the
//! frontier dies out the inductive definition restarts it at `{n + 1}`, so
//! the trace is total.

use crate::error::{Error, Result};
use crate::fluct::domain;
use crate::rng;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Bernoulli edge environment on the oriented lattice.
#[derive(Debug, Clone, Copy)]
pub struct OrientedField {
    pub p: f64,
    pub seed: u64,
    pub replicate_id: u64,
    threshold: u128,
}

impl OrientedField {
    pub fn new(p: f64, seed: u64, replicate_id: u64) -> Result<OrientedField> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidSpec(format!("p is a probability, got {p}")));
        }
        Ok(OrientedField { p, seed, replicate_id, threshold: rng::bernoulli_threshold(p) })
    }

    /// Openness of the edge from `(m, level)` up-left (`dir = false`) or
    /// up-right (`dir = true`).
    #[inline]
    fn open(&self, m: i64, level: i64, up_right: bool) -> bool {
        let code = if up_right { 3 } else { 2 };
        (rng::edge_u64(self.seed, self.replicate_id, m, level, code) as u128) < self.threshold
    }
}

/// Initial condition of the right-edge process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialSet {
    /// All sites `{x <= 0}` of level 0: the classical right-hand edge.
    HalfLine,
    /// The origin alone, resampled (replicate id incremented) until its
    /// cluster survives to the horizon: realizes conditioning on survival.
    OriginConditioned,
}

/// Occupied sites of one level inside a fixed window.
struct Frontier {
    lo: i64,
    words: Vec<u64>,
}

impl Frontier {
    fn empty(lo: i64, hi: i64) -> Frontier {
        let width = (hi - lo + 1) as usize;
        Frontier { lo, words: vec![0; width.div_ceil(64)] }
    }

    #[inline]
    fn set(&mut self, m: i64) {
        let k = (m - self.lo) as usize;
        if k / 64 < self.words.len() {
            self.words[k / 64] |= 1u64 << (k % 64);
        }
    }

    #[inline]
    fn in_window(&self, m: i64) -> bool {
        m >= self.lo && ((m - self.lo) as usize) / 64 < self.words.len()
    }

    fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn sup(&self) -> Option<i64> {
        for (i, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                let bit = 63 - w.leading_zeros() as usize;
                return Some(self.lo + (i * 64 + bit) as i64);
            }
        }
        None
    }

    fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    /// Spread one level up through open edges, writing into `next`.
    fn step(&self, field: &OrientedField, level: i64, next: &mut Frontier) {
        next.clear();
        for (i, &word) in self.words.iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                let m = self.lo + (i * 64 + bit) as i64;
                if field.open(m, level, true) && next.in_window(m + 1) {
                    next.set(m + 1);
                }
                if field.open(m, level, false) && m - 1 >= next.lo {
                    next.set(m - 1);
                }
            }
        }
    }
}

/// A simulated right-edge path `r'_0 ..= r'_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RightEdgeTrace {
    pub p: f64,
    /// Number of simulated levels N; `values.len() == N + 1`.
    pub horizon: u64,
    pub values: Vec<i64>,
    pub initial: InitialSet,
    /// Replicate id that produced the trace; conditioning retries bump it.
    pub replicate_used: u64,
    /// Conditioning attempts consumed (1 when the first replicate survived).
    pub attempts: u64,
    /// Whether any level used the restart-at-`{n+1}` fallback.
    pub fell_back: bool,
}

fn run_trace(field: &OrientedField, n_levels: u64, initial: InitialSet) -> RightEdgeTrace {
    let n = n_levels as i64;
    // Sites left of `-2N` cannot influence the right edge at `x >= -N` within
    // N levels, so the half-line window is exact for the values we report.
    let (lo, hi) = match initial {
        InitialSet::HalfLine => (-2 * n - 2, n + 2),
        InitialSet::OriginConditioned => (-n - 2, n + 2),
    };
    let mut cur = Frontier::empty(lo, hi);
    match initial {
        InitialSet::HalfLine => {
            let mut m = 0;
            while m >= lo {
                cur.set(m);
                m -= 2;
            }
        }
        InitialSet::OriginConditioned => cur.set(0),
    }
    let mut next = Frontier::empty(lo, hi);
    let mut values = Vec::with_capacity(n_levels as usize + 1);
    values.push(0i64);
    let mut fell_back = false;
    for level in 0..n {
        cur.step(field, level, &mut next);
        if next.is_empty() {
            fell_back = true;
            next.set(level + 1);
        }
        values.push(next.sup().unwrap());
        core::mem::swap(&mut cur, &mut next);
    }
    RightEdgeTrace {
        p: field.p,
        horizon: n_levels,
        values,
        initial,
        replicate_used: field.replicate_id,
        attempts: 1,
        fell_back,
    }
}

const CONDITIONING_BUDGET: u64 = 10_000;

/// Level-by-level right-edge evolution.
///
/// `OriginConditioned` retries fresh replicates until the origin's cluster
/// survives all `n_levels` levels, which realizes the conditional law at the
/// horizon at a cost of `1 / P[survival]` attempts.
pub fn simulate_right_edge(
    field: &OrientedField,
    n_levels: u64,
    initial: InitialSet,
) -> Result<RightEdgeTrace> {
    if n_levels == 0 {
        return Err(Error::Estimator("need at least one level".into()));
    }
    match initial {
        InitialSet::HalfLine => Ok(run_trace(field, n_levels, initial)),
        InitialSet::OriginConditioned => {
            for attempt in 0..CONDITIONING_BUDGET {
                let f = OrientedField::new(field.p, field.seed, field.replicate_id + attempt)?;
                let mut trace = run_trace(&f, n_levels, initial);
                if !trace.fell_back {
                    trace.attempts = attempt + 1;
                    return Ok(trace);
                }
            }
            Err(Error::ConditioningBudget { attempts: CONDITIONING_BUDGET })
        }
    }
}

/// Right-edge speed estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaEstimate {
    pub p: f64,
    pub n_levels: u64,
    pub replicates: u64,
    pub alpha_hat: f64,
    pub stderr: f64,
    /// Fraction of replicates whose frontier emptied and restarted. The
    /// restart clause drives `r'_n` toward `n`, so a nonzero fraction means
    /// the speed estimate is not trustworthy (deeply subcritical p, or a
    /// horizon long enough for the windowed frontier to die).
    pub fallback_fraction: f64,
}

/// One half-line replicate for the speed estimate: the terminal speed and
/// whether the restart clause fired.
#[derive(Debug, Clone, Copy)]
pub struct AlphaTask {
    pub p: f64,
    pub n_levels: u64,
    pub replicate_id: u64,
    pub field_seed: u64,
}

impl AlphaTask {
    pub fn run(&self) -> Result<(f64, bool)> {
        let field = OrientedField::new(self.p, self.field_seed, self.replicate_id)?;
        let trace = simulate_right_edge(&field, self.n_levels, InitialSet::HalfLine)?;
        Ok((*trace.values.last().unwrap() as f64 / self.n_levels as f64, trace.fell_back))
    }
}

pub fn alpha_tasks(p: f64, n_levels: u64, replicates: u64, seed: u64) -> Result<Vec<AlphaTask>> {
    if replicates < 2 {
        return Err(Error::Estimator("alpha needs >= 2 replicates for a standard error".into()));
    }
    if n_levels == 0 {
        return Err(Error::Estimator("need at least one level".into()));
    }
    OrientedField::new(p, 0, 0)?;
    let field_seed = rng::derive_seed(seed, domain::ALPHA, n_levels);
    Ok((0..replicates)
        .map(|replicate_id| AlphaTask { p, n_levels, replicate_id, field_seed })
        .collect())
}

pub fn reduce_alpha(p: f64, n_levels: u64, speeds: &[f64]) -> AlphaEstimate {
    let k = speeds.len() as f64;
    let mean = speeds.iter().sum::<f64>() / k;
    let ss = speeds.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    AlphaEstimate {
        p,
        n_levels,
        replicates: speeds.len() as u64,
        alpha_hat: mean,
        stderr: libm::sqrt(ss / (k - 1.0) / k),
    }
}

/// Mean of `r_N / N` over independent half-line replicates.
pub fn estimate_alpha(p: f64, n_levels: u64, replicates: u64, seed: u64) -> Result<AlphaEstimate> {
    let tasks = alpha_tasks(p, n_levels, replicates, seed)?;
    let speeds: Result<Vec<f64>> = tasks.iter().map(AlphaTask::run).collect();
    Ok(reduce_alpha(p, n_levels, &speeds?))
}

/// One break-point entry: the level `T_i`, the level gap `tau_i` and the
/// horizontal increment `X_i` of the right edge across the gap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BreakPoint {
    pub level: u64,
    pub tau: u64,
    pub x: i64,
}

/// Break-point decomposition of an origin-conditioned right-edge trace.
///
/// A trace vertex `(r'_n, n)` is declared a percolation point when its
/// forward open cluster survives `horizon_h` further levels; the finite
/// look-ahead is a surrogate for survival to infinity whose error decays
/// exponentially in `horizon_h`.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakPointSequence {
    pub horizon_h: u64,
    pub entries: Vec<BreakPoint>,
    pub trace: RightEdgeTrace,
}

fn survives(field: &OrientedField, m: i64, level: i64, horizon: i64) -> bool {
    let (lo, hi) = (m - horizon - 2, m + horizon + 2);
    let mut cur = Frontier::empty(lo, hi);
    cur.set(m);
    let mut next = Frontier::empty(lo, hi);
    for step in 0..horizon {
        cur.step(field, level + step, &mut next);
        if next.is_empty() {
            return false;
        }
        core::mem::swap(&mut cur, &mut next);
    }
    true
}

/// Origin-conditioned trace plus its break points per the Kuczek
/// construction. Only levels up to `n_levels - horizon_h` can be certified.
pub fn break_points(
    field: &OrientedField,
    n_levels: u64,
    horizon_h: u64,
) -> Result<BreakPointSequence> {
    if horizon_h == 0 || n_levels <= horizon_h {
        return Err(Error::Estimator("need n_levels > horizon_h >= 1".into()));
    }
    let trace = simulate_right_edge(field, n_levels, InitialSet::OriginConditioned)?;
    let sim = OrientedField::new(field.p, field.seed, trace.replicate_used)?;
    let mut entries = Vec::new();
    let mut prev_level = 0u64;
    let mut prev_r = 0i64;
    for level in 1..=(n_levels - horizon_h) {
        let r = trace.values[level as usize];
        if survives(&sim, r, level as i64, horizon_h as i64) {
            let tau = level - prev_level;
            let x = r - prev_r;
            debug_assert!(tau >= 1);
            debug_assert!(x.unsigned_abs() <= tau);
            entries.push(BreakPoint { level, tau, x });
            prev_level = level;
            prev_r = r;
        }
    }
    if entries.is_empty() {
        return Err(Error::NoBreakPoints);
    }
    Ok(BreakPointSequence { horizon_h, entries, trace })
}

/// Percolation-cone endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEndpoints {
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// Set when alpha exceeded `1/sqrt(2)` and was clamped to the quadrant.
    pub clamped: bool,
}

/// Cone endpoints from the right-edge speed:
/// `theta_minus = arctan((1/2 - a/sqrt2) / (1/2 + a/sqrt2))`, and
/// `theta_plus = pi/2 - theta_minus` by the symmetry of the formula.
pub fn theta_endpoints(alpha: f64) -> Result<ThetaEndpoints> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::Estimator(format!("alpha must be >= 0, got {alpha}")));
    }
    let clamped = alpha > core::f64::consts::FRAC_1_SQRT_2;
    let a = alpha.min(core::f64::consts::FRAC_1_SQRT_2);
    let s = a / core::f64::consts::SQRT_2;
    let theta_minus = libm::atan2(0.5 - s, 0.5 + s);
    Ok(ThetaEndpoints { theta_minus, theta_plus: core::f64::consts::FRAC_PI_2 - theta_minus, clamped })
}
