//! Directional time constants, the asymptotic-shape boundary, support lines
//! and curvature exponents.
//!
//! The boundary is sampled radially: `r_B(theta) = 1 / mu((1, theta))`, with
//! the time constant estimated as the slope of mean `T(0, n u)` against `n`.
//! The affine intercept absorbs the sublinear mean correction, which is what
//! makes the slope usable at desk scale.
//!
//! Support lines at a boundary point are the extreme lines through the point
//! keeping every sample inside, up to a per-sample noise slack; curvature
//! exponents come from the growth of the line-to-boundary gap. On the side
//! where a support line separates from the body the gap opens; the PLUS line
//! (largest inclination) separates toward smaller angles and the MINUS line
//! toward larger angles, which is the pairing the flat-segment endpoint
//! analysis actually uses.

use crate::error::{Error, Result};
use crate::fit::{self, LineFit};
use crate::fluct::{domain, Direction, RadialTimesTask};
use crate::oriented::theta_endpoints;
use crate::rng;
use crate::weights::DistributionSpec;
use alloc::format;
use alloc::vec::Vec;

/// Estimated directional time constant, time per unit Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuEstimate {
    pub dir: Direction,
    pub mu: f64,
    pub stderr: f64,
    pub n_used: usize,
}

/// Replicate tasks for a directional time-constant estimate.
pub fn mu_tasks(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<Vec<RadialTimesTask>> {
    spec.validate()?;
    if n_list.len() < 3 || !n_list.windows(2).all(|w| w[0] < w[1]) || n_list[0] == 0 {
        return Err(Error::Estimator("mu needs >= 3 strictly ascending n values".into()));
    }
    if replicates == 0 {
        return Err(Error::Estimator("need at least one replicate".into()));
    }
    // Each angle gets its own weight environments, keyed by the angle bits.
    let field_seed = rng::derive_seed(seed, domain::MU, dir.theta.to_bits());
    Ok((0..replicates)
        .map(|rep| RadialTimesTask {
            spec,
            dir,
            n_list: n_list.into(),
            replicate_id: rep,
            field_seed,
        })
        .collect())
}

/// Slope fit of per-n mean passage times; rows in replicate order.
pub fn reduce_mu(dir: Direction, n_list: &[u64], rows: &[Vec<f64>]) -> Result<MuEstimate> {
    let reps = rows.len() as f64;
    let xs: Vec<f64> = n_list.iter().map(|&n| n as f64).collect();
    let means: Vec<f64> = (0..n_list.len())
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / reps)
        .collect();
    let line: LineFit = fit::ols(&xs, &means)?;
    Ok(MuEstimate { dir, mu: line.slope, stderr: line.slope_stderr, n_used: n_list.len() })
}

/// Directional time constant `mu((r, theta))` from the growth of
/// `T(0, n (r, theta))` over the n grid.
pub fn estimate_mu(
    spec: DistributionSpec,
    dir: Direction,
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<MuEstimate> {
    let tasks = mu_tasks(spec, dir, n_list, replicates, seed)?;
    let rows: Result<Vec<Vec<f64>>> = tasks.iter().map(RadialTimesTask::run).collect();
    reduce_mu(dir, n_list, &rows?)
}

/// One polar boundary sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    pub r_b: f64,
    pub stderr: f64,
}

/// Sampled shape boundary `{(r_B(theta), theta)}` over `[0, pi/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeBoundary {
    pub samples: Vec<BoundarySample>,
    /// Atom probability when the boundary came from a Durrett-Liggett field.
    pub p: Option<f64>,
}

impl ShapeBoundary {
    pub fn new(samples: Vec<BoundarySample>, p: Option<f64>) -> Result<ShapeBoundary> {
        if samples.len() < 2 {
            return Err(Error::Estimator("boundary needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if w[0].theta >= w[1].theta {
                return Err(Error::Estimator("boundary angles must strictly increase".into()));
            }
        }
        if samples.iter().any(|s| !(s.r_b > 0.0) || !s.r_b.is_finite()) {
            return Err(Error::Estimator("boundary radii must be positive".into()));
        }
        Ok(ShapeBoundary { samples, p })
    }

    fn sample_at(&self, theta0: f64) -> Result<usize> {
        self.samples
            .iter()
            .position(|s| libm::fabs(s.theta - theta0) < 1e-9)
            .ok_or_else(|| Error::Estimator(format!("theta0 = {theta0} is not a grid angle")))
    }

    fn point(&self, i: usize) -> (f64, f64) {
        let s = &self.samples[i];
        (s.r_b * libm::cos(s.theta), s.r_b * libm::sin(s.theta))
    }
}

/// Boundary estimate over a theta grid: `r_B = 1/mu` per angle with
/// delta-method standard errors.
pub fn estimate_shape_boundary(
    spec: DistributionSpec,
    theta_grid: &[f64],
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<ShapeBoundary> {
    if theta_grid.len() < 8 {
        return Err(Error::Estimator(format!(
            "boundary grid needs >= 8 angles, got {}",
            theta_grid.len()
        )));
    }
    boundary_on_grid(spec, theta_grid, n_list, replicates, seed)
}

/// Same as `estimate_shape_boundary` without the 8-angle floor; the curvature
/// driver builds small windowed grids.
pub fn boundary_on_grid(
    spec: DistributionSpec,
    theta_grid: &[f64],
    n_list: &[u64],
    replicates: u64,
    seed: u64,
) -> Result<ShapeBoundary> {
    if !theta_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Estimator("theta grid must strictly increase".into()));
    }
    if theta_grid
        .iter()
        .any(|&t| !(0.0..=core::f64::consts::FRAC_PI_2).contains(&t))
    {
        return Err(Error::Estimator("theta grid must lie in [0, pi/2]".into()));
    }
    let mut samples = Vec::with_capacity(theta_grid.len());
    for &theta in theta_grid {
        let dir = Direction::new(1.0, theta)?;
        let mu = estimate_mu(spec, dir, n_list, replicates, seed)?;
        if !(mu.mu > 0.0) {
            return Err(Error::Estimator(format!("nonpositive mu at theta = {theta}")));
        }
        samples.push(BoundarySample {
            theta,
            r_b: 1.0 / mu.mu,
            stderr: mu.stderr / (mu.mu * mu.mu),
        });
    }
    let p = match spec {
        DistributionSpec::DurrettLiggett { p, .. } => Some(p),
        _ => None,
    };
    ShapeBoundary::new(samples, p)
}

/// Flat-segment prediction and measured deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatSegment {
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// Radius of both segment endpoints, `sqrt(1/2 + alpha^2)`.
    pub segment_radius: f64,
    /// Max over in-cone grid angles of `|r_B(theta)(cos + sin) - 1|`;
    /// `None` when no grid angle falls strictly inside the cone.
    pub max_deviation: Option<f64>,
    pub samples_inside: usize,
}

/// Predicted cone endpoints from an estimated right-edge speed, plus the
/// distance of the measured boundary from the line `x + y = 1` inside the
/// cone.
pub fn flat_segment_detect(boundary: &ShapeBoundary, alpha_hat: f64) -> Result<FlatSegment> {
    if !(alpha_hat > 0.0) {
        return Err(Error::Estimator(format!(
            "alpha_hat = {alpha_hat} is subcritical: no percolation cone"
        )));
    }
    let ends = theta_endpoints(alpha_hat)?;
    let alpha = alpha_hat.min(core::f64::consts::FRAC_1_SQRT_2);
    let mut max_dev: Option<f64> = None;
    let mut inside = 0usize;
    for s in &boundary.samples {
        if s.theta > ends.theta_minus && s.theta < ends.theta_plus {
            inside += 1;
            let dev = libm::fabs(s.r_b * (libm::cos(s.theta) + libm::sin(s.theta)) - 1.0);
            max_dev = Some(max_dev.map_or(dev, |m: f64| m.max(dev)));
        }
    }
    Ok(FlatSegment {
        theta_minus: ends.theta_minus,
        theta_plus: ends.theta_plus,
        segment_radius: libm::sqrt(0.5 + alpha * alpha),
        max_deviation: max_dev,
        samples_inside: inside,
    })
}

/// Which extreme support line at an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Largest inclination; separates from the boundary toward smaller angles.
    Plus,
    /// Smallest inclination; separates toward larger angles.
    Minus,
}

/// A support line `x cos(nu) + y sin(nu) = c` through a boundary anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportLine {
    pub theta0: f64,
    pub side: Side,
    pub anchor_r: f64,
    /// Outward normal angle.
    pub normal: f64,
    /// Signed offset; positive since the body contains the origin.
    pub offset: f64,
}

impl SupportLine {
    /// Radial coordinate of the line at angle theta.
    pub fn radius_at(&self, theta: f64) -> f64 {
        self.offset / libm::cos(theta - self.normal)
    }

    /// Inclination against the x-axis in `[0, pi)`, the paper's "angle of
    /// the line": normal + pi/2.
    pub fn inclination(&self) -> f64 {
        self.normal + core::f64::consts::FRAC_PI_2
    }
}

/// space of feasible support normals at the anchor: every sample must stay
/// inside the half-plane up to twice its standard error.
fn feasible_normals(boundary: &ShapeBoundary, i0: usize) -> Result<(f64, f64)> {
    let (ax, ay) = boundary.point(i0);
    let theta0 = boundary.samples[i0].theta;
    let sigma0 = boundary.samples[i0].stderr;

    struct Constraint {
        phi: f64,
        norm: f64,
        slack: f64,
    }
    let mut cons = Vec::new();
    let mut scale: f64 = 0.0;
    for (i, s) in boundary.samples.iter().enumerate() {
        if i == i0 {
            continue;
        }
        let (px, py) = boundary.point(i);
        let (dx, dy) = (px - ax, py - ay);
        let norm = libm::hypot(dx, dy);
        scale = scale.max(norm);
        cons.push(Constraint {
            phi: libm::atan2(dy, dx),
            norm,
            slack: s.stderr + sigma0 + 1e-12,
        });
    }
    let tol = 1e-9 * scale.max(1.0);
    let violated = |nu: f64| -> bool {
        cons.iter()
            .any(|c| c.norm * libm::cos(nu - c.phi) > c.slack + tol)
    };

    // Candidate extremes: angles where some constraint is tight. The line
    // must keep the origin strictly inside, which bounds nu to an open
    // half-circle around theta0.
    let lo = theta0 - core::f64::consts::FRAC_PI_2;
    let hi = theta0 + core::f64::consts::FRAC_PI_2;
    let mut cands = Vec::new();
    for c in &cons {
        if c.slack < c.norm {
            let a = libm::acos(c.slack / c.norm);
            for nu in [c.phi + a, c.phi - a, c.phi + a - 2.0 * core::f64::consts::PI, c.phi - a + 2.0 * core::f64::consts::PI] {
                if nu > lo + 1e-12 && nu < hi - 1e-12 && !violated(nu) {
                    cands.push(nu);
                }
            }
        }
    }
    // A boundary with every other sample slack-dominated pins nothing.
    if cands.is_empty() {
        if !violated(theta0) {
            return Err(Error::Estimator(
                "support line unconstrained by samples; grid too sparse".into(),
            ));
        }
        return Err(Error::Estimator(
            "anchor is not supportable within noise; more replicates needed".into(),
        ));
    }
    let nu_min = cands.iter().copied().fold(f64::INFINITY, f64::min);
    let nu_max = cands.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((nu_min, nu_max))
}

/// The two extreme support lines at a grid angle: maximal inclination
/// (`Plus`) and minimal inclination (`Minus`).
pub fn support_lines(boundary: &ShapeBoundary, theta0: f64) -> Result<(SupportLine, SupportLine)> {
    let i0 = boundary.sample_at(theta0)?;
    let (nu_min, nu_max) = feasible_normals(boundary, i0)?;
    let r0 = boundary.samples[i0].r_b;
    let mk = |nu: f64, side: Side| SupportLine {
        theta0,
        side,
        anchor_r: r0,
        normal: nu,
        offset: r0 * libm::cos(theta0 - nu),
    };
    Ok((mk(nu_max, Side::Plus), mk(nu_min, Side::Minus)))
}

/// Curvature exponent estimate at a boundary anchor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureEstimate {
    pub theta0: f64,
    pub side: Side,
    /// In `[0, 1]`: 0 flat, 1 sharp corner.
    pub kappa: f64,
    pub fit_stderr: f64,
    /// Set when the boundary coincides with the support line within noise.
    pub flat: bool,
    /// Points used and largest line distance entering the fit.
    pub points_used: usize,
    pub max_d: f64,
}

/// The sampling window never reaches past this line distance from the anchor.
const DELTA_CAP: f64 = 0.15;

/// Kernel: exponent `m` of `gap ~ C d^m`, adaptively growing the window from
/// 3 points until the slope stderr stops improving. Returns the chosen fit
/// and window size.
pub fn fit_gap_exponent(ds: &[f64], gaps: &[f64]) -> Result<(LineFit, usize)> {
    debug_assert_eq!(ds.len(), gaps.len());
    let mut best: Option<(LineFit, usize)> = None;
    for k in 3..=ds.len() {
        let xs: Vec<f64> = ds[..k].iter().map(|&d| libm::log(d)).collect();
        let ys: Vec<f64> = gaps[..k].iter().map(|&g| libm::log(g)).collect();
        let fit = fit::ols(&xs, &ys)?;
        match &best {
            Some((b, _)) if b.slope_stderr <= fit.slope_stderr => {}
            _ => best = Some((fit, k)),
        }
    }
    best.ok_or_else(|| Error::Estimator("gap fit needs >= 3 points".into()))
}

struct GapPoint {
    d: f64,
    gap: f64,
    noise: f64,
}

/// Gaps `r_line - r_B` of the side's samples against a line, keyed by the
/// Euclidean distance from the line point to the anchor.
fn side_gaps(
    boundary: &ShapeBoundary,
    i0: usize,
    side: Side,
    line: &SupportLine,
) -> Vec<GapPoint> {
    let (ax, ay) = boundary.point(i0);
    let sigma0 = boundary.samples[i0].stderr;
    let mut pts = Vec::new();
    for (i, s) in boundary.samples.iter().enumerate() {
        if i == i0 {
            continue;
        }
        let on_side = match side {
            Side::Plus => s.theta < line.theta0,
            Side::Minus => s.theta > line.theta0,
        };
        if !on_side {
            continue;
        }
        let cosang = libm::cos(s.theta - line.normal);
        if cosang <= 1e-9 {
            continue; // line recedes to infinity before this angle
        }
        let r_s = line.offset / cosang;
        let (lx, ly) = (r_s * libm::cos(s.theta), r_s * libm::sin(s.theta));
        let d = libm::hypot(lx - ax, ly - ay);
        if d >= DELTA_CAP {
            continue;
        }
        pts.push(GapPoint { d, gap: r_s - s.r_b, noise: 3.0 * (s.stderr + sigma0) + 1e-12 });
    }
    pts.sort_unstable_by(|a, b| a.d.total_cmp(&b.d));
    pts
}

/// Curvature exponent at `theta0` on the chosen side: `kappa = 1/m` where
/// the boundary-to-support-line gap grows like `d^m` with the Euclidean
/// distance `d` along the line. The gap is read against the `Plus` line at
/// angles below `theta0` and against the `Minus` line above, the sides where
/// the respective lines separate from the body.
///
/// A side is flagged FLAT when its samples are consistent with lying on some
/// feasible support line, which is tested against the side's best-hugging
/// extreme (the opposite one): on noisy data the side's own extreme line
/// tilts into the body by the sample resolution, so testing against it would
/// misread genuinely flat arcs.
pub fn curvature_exponent(
    boundary: &ShapeBoundary,
    theta0: f64,
    side: Side,
) -> Result<CurvatureEstimate> {
    let (plus, minus) = support_lines(boundary, theta0)?;
    let (own, hugging) = match side {
        Side::Plus => (plus, minus),
        Side::Minus => (minus, plus),
    };
    let i0 = boundary.sample_at(theta0)?;
    let pts = side_gaps(boundary, i0, side, &own);
    if pts.len() < 5 {
        return Err(Error::Estimator(format!(
            "curvature window has {} samples on side {side:?}; need >= 5 within d < {DELTA_CAP}",
            pts.len()
        )));
    }
    let max_d = pts.last().unwrap().d;

    let hug = side_gaps(boundary, i0, side, &hugging);
    if hug.iter().all(|p| p.gap <= p.noise) {
        return Ok(CurvatureEstimate {
            theta0,
            side,
            kappa: 0.0,
            fit_stderr: 0.0,
            flat: true,
            points_used: pts.len(),
            max_d,
        });
    }
    let positive: Vec<&GapPoint> = pts.iter().filter(|p| p.gap > 0.0).collect();
    if positive.len() < 3 {
        return Ok(CurvatureEstimate {
            theta0,
            side,
            kappa: 0.0,
            fit_stderr: 0.0,
            flat: true,
            points_used: pts.len(),
            max_d,
        });
    }
    let ds: Vec<f64> = positive.iter().map(|p| p.d).collect();
    let gaps: Vec<f64> = positive.iter().map(|p| p.gap).collect();
    let (fit, used) = fit_gap_exponent(&ds, &gaps)?;
    let m = fit.slope;
    let kappa = (1.0 / m).clamp(0.0, 1.0);
    let fit_stderr = if m != 0.0 { fit.slope_stderr / (m * m) } else { 0.0 };
    Ok(CurvatureEstimate {
        theta0,
        side,
        kappa,
        fit_stderr,
        flat: false,
        points_used: used,
        max_d: ds[used - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn exact_boundary(f: impl Fn(f64) -> f64, thetas: &[f64]) -> ShapeBoundary {
        let samples = thetas
            .iter()
            .map(|&theta| BoundarySample { theta, r_b: f(theta), stderr: 0.0 })
            .collect();
        ShapeBoundary::new(samples, None).unwrap()
    }

    fn grid(lo: f64, hi: f64, k: usize) -> Vec<f64> {
        (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
    }

    #[test]
    fn mu_constant_axis_and_diagonal() {
        let spec = DistributionSpec::Constant { value: 1.0 };
        let axis = estimate_mu(spec, Direction::new(1.0, 0.0).unwrap(), &[16, 32, 64], 2, 1)
            .unwrap();
        assert!((axis.mu - 1.0).abs() < 1e-12, "mu = {}", axis.mu);
        let diag =
            estimate_mu(spec, Direction::new(1.0, FRAC_PI_4).unwrap(), &[32, 64, 128], 2, 1)
                .unwrap();
        assert!((diag.mu - SQRT_2).abs() < 0.02 * SQRT_2, "mu = {}", diag.mu);
    }

    #[test]
    fn mu_homogeneity_and_subadditivity() {
        let spec = DistributionSpec::DurrettLiggett { p: 0.8, high: 5.0 };
        let theta = 0.5;
        let n = &[16, 32, 64, 128];
        let one = estimate_mu(spec, Direction::new(1.0, theta).unwrap(), n, 6, 3).unwrap();
        let two = estimate_mu(spec, Direction::new(2.0, theta).unwrap(), n, 6, 3).unwrap();
        let joint = 2.0 * libm::sqrt(two.stderr * two.stderr + 4.0 * one.stderr * one.stderr);
        assert!(
            libm::fabs(two.mu - 2.0 * one.mu) <= joint.max(0.02 * two.mu),
            "homogeneity: mu(2u) = {}, 2 mu(u) = {}",
            two.mu,
            2.0 * one.mu
        );
        // subadditivity with r1 = r2 = 1: mu(2u) <= 2 mu(u) + slack
        assert!(two.mu <= 2.0 * one.mu + 3.0 * joint.max(0.02));
    }

    #[test]
    fn constant_boundary_is_the_l1_ball() {
        let spec = DistributionSpec::Constant { value: 1.0 };
        let thetas = grid(0.0, FRAC_PI_2, 8);
        let b = estimate_shape_boundary(spec, &thetas, &[32, 64, 128], 2, 7).unwrap();
        for s in &b.samples {
            let expect = 1.0 / (libm::cos(s.theta) + libm::sin(s.theta));
            assert!(
                libm::fabs(s.r_b - expect) < 0.01 * expect,
                "rB({}) = {}, want {}",
                s.theta,
                s.r_b,
                expect
            );
        }
        assert!(estimate_shape_boundary(spec, &thetas[..5], &[32, 64, 128], 2, 7).is_err());
    }

    #[test]
    fn flat_segment_formula_cases() {
        let b = exact_boundary(|t| 1.0 / (libm::cos(t) + libm::sin(t)), &grid(0.0, FRAC_PI_2, 9));
        assert!(flat_segment_detect(&b, 0.0).is_err());
        assert!(flat_segment_detect(&b, -0.1).is_err());

        let half = flat_segment_detect(&b, 0.5).unwrap();
        assert!((half.theta_minus - 0.16991845472706102).abs() < 1e-12);
        assert!((half.theta_minus + half.theta_plus - FRAC_PI_2).abs() < 1e-12);
        // exact L1 facet: zero deviation inside the cone
        assert!(half.max_deviation.unwrap() < 1e-12);
        assert!((half.segment_radius - libm::sqrt(0.75)).abs() < 1e-12);

        let full = flat_segment_detect(&b, core::f64::consts::FRAC_1_SQRT_2).unwrap();
        assert!(full.theta_minus.abs() < 1e-12);
        assert!((full.theta_plus - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn support_lines_on_l1_facet_coincide() {
        let b = exact_boundary(|t| 1.0 / (libm::cos(t) + libm::sin(t)), &grid(0.1, 1.4, 14));
        let theta0 = b.samples[3].theta;
        let (plus, minus) = support_lines(&b, theta0).unwrap();
        assert!((plus.normal - FRAC_PI_4).abs() < 1e-9);
        assert!((minus.normal - FRAC_PI_4).abs() < 1e-9);
        for t in [0.2, 0.7, 1.2] {
            assert!((plus.radius_at(t) - 1.0 / (libm::cos(t) + libm::sin(t))).abs() < 1e-9);
        }
    }

    #[test]
    fn support_lines_on_circle_pinch_to_the_tangent() {
        let thetas = grid(FRAC_PI_4 - 0.3, FRAC_PI_4 + 0.3, 31);
        let spacing = 0.02;
        let b = exact_boundary(|_| 1.0, &thetas);
        let (plus, minus) = support_lines(&b, thetas[15]).unwrap();
        assert!((plus.normal - FRAC_PI_4).abs() <= spacing);
        assert!((minus.normal - FRAC_PI_4).abs() <= spacing);
        assert!(plus.normal >= minus.normal);
    }

    #[test]
    fn support_lines_at_square_corner_are_distinct() {
        // unit ball of the sup norm: r = 1/max(cos, sin)
        let mut thetas = grid(0.15, FRAC_PI_2 - 0.15, 12);
        thetas.push(FRAC_PI_4);
        thetas.sort_unstable_by(f64::total_cmp);
        thetas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let b = exact_boundary(|t| 1.0 / libm::cos(t).max(libm::sin(t)), &thetas);
        let (plus, minus) = support_lines(&b, FRAC_PI_4).unwrap();
        // corner at (1,1): extreme support lines approach y = 1 and x = 1
        assert!(plus.normal > minus.normal + 0.5);
        assert!((plus.inclination() - minus.inclination()) > 0.5);
    }

    #[test]
    fn curvature_kernel_recovers_exact_exponents() {
        let ds: Vec<f64> = (1..=8).map(|k| 0.01 * k as f64).collect();
        let quad: Vec<f64> = ds.iter().map(|d| d * d).collect();
        let (fit, _) = fit_gap_exponent(&ds, &quad).unwrap();
        assert!((1.0 / fit.slope - 0.5).abs() < 1e-9);
        let lin: Vec<f64> = ds.iter().map(|d| 3.0 * d).collect();
        let (fit, _) = fit_gap_exponent(&ds, &lin).unwrap();
        assert!((1.0 / fit.slope - 1.0).abs() < 1e-9);
    }

    /// A boundary that is the facet x + y = 1 above theta0 and sags below it
    /// like the square of the line distance: the Plus side fits kappa = 0.5
    /// exactly and the Minus (in-facet) side is flat.
    #[test]
    fn curvature_on_half_flat_boundary() {
        let theta0 = FRAC_PI_4;
        let facet = |t: f64| 1.0 / (libm::cos(t) + libm::sin(t));
        let anchor = (0.5f64, 0.5f64);
        let mut thetas = grid(theta0 - 0.14, theta0 + 0.14, 15);
        thetas[7] = theta0;
        let b = exact_boundary(
            |t| {
                let r_s = facet(t);
                if t >= theta0 {
                    r_s
                } else {
                    let (lx, ly) = (r_s * libm::cos(t), r_s * libm::sin(t));
                    let d = libm::hypot(lx - anchor.0, ly - anchor.1);
                    r_s - d * d
                }
            },
            &thetas,
        );
        let plus = curvature_exponent(&b, theta0, Side::Plus).unwrap();
        assert!(!plus.flat);
        assert!((plus.kappa - 0.5).abs() < 1e-6, "kappa = {}", plus.kappa);
        let minus = curvature_exponent(&b, theta0, Side::Minus).unwrap();
        assert!(minus.flat);
        assert_eq!(minus.kappa, 0.0);
    }

    #[test]
    fn wedge_gap_is_a_sharp_point() {
        let theta0 = FRAC_PI_4;
        let facet = |t: f64| 1.0 / (libm::cos(t) + libm::sin(t));
        let anchor = (0.5f64, 0.5f64);
        let mut thetas = grid(theta0 - 0.14, theta0 + 0.14, 15);
        thetas[7] = theta0;
        let b = exact_boundary(
            |t| {
                let r_s = facet(t);
                if t >= theta0 {
                    r_s
                } else {
                    let (lx, ly) = (r_s * libm::cos(t), r_s * libm::sin(t));
                    let d = libm::hypot(lx - anchor.0, ly - anchor.1);
                    r_s - 0.5 * d
                }
            },
            &thetas,
        );
        let plus = curvature_exponent(&b, theta0, Side::Plus).unwrap();
        assert!((plus.kappa - 1.0).abs() < 1e-6, "kappa = {}", plus.kappa);
    }

    #[test]
    fn curvature_window_needs_five_samples() {
        let b = exact_boundary(|_| 1.0, &grid(0.5, 0.6, 4));
        assert!(curvature_exponent(&b, 0.5, Side::Minus).is_err());
    }
}
