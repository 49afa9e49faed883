//! Seedable i.i.d. edge-weight environments.
//!
//! A `WeightField` assigns every edge of `Z^2` a nonnegative passage time,
//! drawn i.i.d. from a `DistributionSpec`. Weights are counter-based: the
//! value of an edge depends only on `(spec, seed, replicate, edge id)`, never
//! on query order or region size.
//!
//! All shipped distributions have bounded or exponential tails, so the
//! exponential-moment condition needed by the concentration estimates holds
//! structurally; `validate` rejects parameters that would break it.

use crate::error::{Error, Result};
use crate::lattice::{Axis, EdgeId};
use crate::rng;
use alloc::format;

/// Distribution of a single edge weight.
///
/// `Constant` is degenerate (the theory assumes a non-constant law) and is
/// kept for oracle tests and metric sanity checks only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistributionSpec {
    /// Every edge costs `value`.
    Constant { value: f64 },
    /// Atom at 1 with probability `p`, atom at `high > 1` otherwise.
    /// infimum of the support is 1, so every path of k edges costs at least k.
    DurrettLiggett { p: f64, high: f64 },
    /// Atom at 0 with probability `p0`, atom at `high > 0` otherwise.
    /// Exercises the zero-weight regime boundary; `p0` is capped below the
    /// bond-percolation critical probability 1/2, beyond which the time
    /// constant collapses to zero.
    BernoulliZero { p0: f64, high: f64 },
    /// Exponential with the given rate.
    Exponential { rate: f64 },
}

impl DistributionSpec {
    pub fn validate(&self) -> Result<()> {
        fn finite_nonneg(v: f64, what: &str) -> Result<()> {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidSpec(format!("{what} must be finite and >= 0, got {v}")));
            }
            Ok(())
        }
        fn prob(v: f64, what: &str) -> Result<()> {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidSpec(format!("{what} is a probability, got {v}")));
            }
            Ok(())
        }
        match *self {
            DistributionSpec::Constant { value } => finite_nonneg(value, "value"),
            DistributionSpec::DurrettLiggett { p, high } => {
                prob(p, "p")?;
                finite_nonneg(high, "high")?;
                if high <= 1.0 {
                    return Err(Error::InvalidSpec(format!(
                        "high must exceed the atom at 1, got {high}"
                    )));
                }
                Ok(())
            }
            DistributionSpec::BernoulliZero { p0, high } => {
                prob(p0, "p0")?;
                finite_nonneg(high, "high")?;
                if high <= 0.0 {
                    return Err(Error::InvalidSpec("high must be positive".into()));
                }
                if p0 >= 0.5 {
                    return Err(Error::InvalidSpec(format!(
                        "p0 = {p0} >= 1/2 = p_c puts the field in the degenerate mu = 0 regime"
                    )));
                }
                Ok(())
            }
            DistributionSpec::Exponential { rate } => {
                if !rate.is_finite() || rate <= 0.0 {
                    return Err(Error::InvalidSpec(format!("rate must be positive, got {rate}")));
                }
                Ok(())
            }
        }
    }

    /// The atoms of an atomic spec, `None` for continuous ones.
    pub fn atoms(&self) -> Option<(f64, f64)> {
        match *self {
            DistributionSpec::Constant { value } => Some((value, value)),
            DistributionSpec::DurrettLiggett { high, .. } => Some((1.0, high)),
            DistributionSpec::BernoulliZero { high, .. } => Some((0.0, high)),
            DistributionSpec::Exponential { .. } => None,
        }
    }

    /// Integer-tick representation of an atomic spec, when its atoms are
    /// commensurable at a workable scale. Weights are then `tick * quantum`
    /// exactly and all passage-time arithmetic can run in integers.
    pub fn tick_domain(&self) -> Option<TickDomain> {
        let (a, b) = self.atoms()?;
        // Finite doubles are dyadic rationals: the common quantum is the
        // largest power of two dividing both atoms exactly.
        let e = match (dyadic_exponent(a), dyadic_exponent(b)) {
            (None, None) => 0,
            (Some(e), None) | (None, Some(e)) => e.min(0),
            (Some(ea), Some(eb)) => ea.min(eb).min(0),
        };
        if e < -32 {
            // Atoms like 1.1 decompose only at 2^-51; ticks would overflow.
            return None;
        }
        let quantum = libm::exp2(e as f64);
        let ta = a / quantum;
        let tb = b / quantum;
        if ta > u32::MAX as f64 || tb > u32::MAX as f64 {
            return None;
        }
        Some(TickDomain { quantum, max_tick: if ta > tb { ta as u32 } else { tb as u32 } })
    }
}

/// Largest `e` with `a / 2^e` integral; `None` for `a == 0`.
fn dyadic_exponent(a: f64) -> Option<i32> {
    if a == 0.0 {
        return None;
    }
    let mut v = a;
    let mut e = 0i32;
    while v != libm::floor(v) {
        v *= 2.0;
        e -= 1;
        if e < -1080 {
            return None;
        }
    }
    while v != 0.0 && libm::floor(v / 2.0) * 2.0 == v && e < 0 {
        v /= 2.0;
        e += 1;
    }
    Some(e)
}

/// Tick arithmetic domain of an atomic spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TickDomain {
    /// Time units per tick; every weight is an exact multiple.
    pub quantum: f64,
    /// Largest single-edge weight in ticks.
    pub max_tick: u32,
}

/// Source of edge weights for the engine. Implemented by `WeightField`; test
/// code wraps fields to perturb single edges.
pub trait EdgeWeights {
    /// `Some` when all weights are exact multiples of a quantum.
    fn tick_domain(&self) -> Option<TickDomain>;
    /// Weight in time units.
    fn weight(&self, e: EdgeId) -> f64;
    /// Weight in ticks. Only meaningful when `tick_domain` is `Some`.
    fn weight_ticks(&self, e: EdgeId) -> u32;
}

#[derive(Debug, Clone, Copy)]
enum Sampler {
    Constant { value: f64, tick: u32 },
    /// `lo` with probability `threshold / 2^64`, else `hi`.
    TwoAtom { threshold: u128, lo: f64, hi: f64, lo_tick: u32, hi_tick: u32 },
    Exponential { rate: f64 },
}

/// A deterministic i.i.d. weight environment over `Z^2`.
#[derive(Debug, Clone, Copy)]
pub struct WeightField {
    pub spec: DistributionSpec,
    pub seed: u64,
    pub replicate_id: u64,
    sampler: Sampler,
    ticks: Option<TickDomain>,
}

impl WeightField {
    pub fn new(spec: DistributionSpec, seed: u64, replicate_id: u64) -> Result<WeightField> {
        spec.validate()?;
        let ticks = spec.tick_domain();
        let quantum = ticks.map(|t| t.quantum).unwrap_or(1.0);
        let sampler = match spec {
            DistributionSpec::Constant { value } => {
                Sampler::Constant { value, tick: (value / quantum) as u32 }
            }
            DistributionSpec::DurrettLiggett { p, high } => Sampler::TwoAtom {
                threshold: rng::bernoulli_threshold(p),
                lo: 1.0,
                hi: high,
                lo_tick: (1.0 / quantum) as u32,
                hi_tick: (high / quantum) as u32,
            },
            DistributionSpec::BernoulliZero { p0, high } => Sampler::TwoAtom {
                threshold: rng::bernoulli_threshold(p0),
                lo: 0.0,
                hi: high,
                lo_tick: 0,
                hi_tick: (high / quantum) as u32,
            },
            DistributionSpec::Exponential { rate } => Sampler::Exponential { rate },
        };
        Ok(WeightField { spec, seed, replicate_id, sampler, ticks })
    }

    #[inline]
    fn hash(&self, e: EdgeId) -> u64 {
        let code = match e.axis {
            Axis::East => 0,
            Axis::North => 1,
        };
        rng::edge_u64(self.seed, self.replicate_id, e.base.x, e.base.y, code)
    }
}

impl EdgeWeights for WeightField {
    #[inline]
    fn tick_domain(&self) -> Option<TickDomain> {
        self.ticks
    }

    #[inline]
    fn weight(&self, e: EdgeId) -> f64 {
        match self.sampler {
            Sampler::Constant { value, .. } => value,
            Sampler::TwoAtom { threshold, lo, hi, .. } => {
                if (self.hash(e) as u128) < threshold {
                    lo
                } else {
                    hi
                }
            }
            Sampler::Exponential { rate } => {
                let u = rng::unit_f64(self.hash(e));
                -libm::log(1.0 - u) / rate
            }
        }
    }

    #[inline]
    fn weight_ticks(&self, e: EdgeId) -> u32 {
        match self.sampler {
            Sampler::Constant { tick, .. } => tick,
            Sampler::TwoAtom { threshold, lo_tick, hi_tick, .. } => {
                if (self.hash(e) as u128) < threshold {
                    lo_tick
                } else {
                    hi_tick
                }
            }
            Sampler::Exponential { .. } => unreachable!("exponential field has no tick domain"),
        }
    }
}
