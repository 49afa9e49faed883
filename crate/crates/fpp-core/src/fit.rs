//! Least-squares fits shared by the exponent estimators.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec::Vec;

/// Ordinary least squares `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals (0 for an exact fit).
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Estimator(format!("OLS needs >= 3 points, got {}", xs.len())));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Estimator("OLS abscissae are all equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let dof = n - 2.0;
    let slope_stderr = libm::sqrt((ssr / dof).max(0.0) / sxx);
    Ok(LineFit { slope, intercept, slope_stderr, points: xs.len() })
}

/// A fitted growth exponent from a log-log regression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    /// Intercept of the log-log line (log of the prefactor).
    pub intercept: f64,
    pub stderr: f64,
    /// Smallest and largest n entering the fit.
    pub n_range: (u64, u64),
    pub points_used: usize,
}

/// Fit `value ~ C * n^exponent` through `log value` vs `log n`.
/// Every value must be strictly positive.
pub fn fit_power_law(points: &[(u64, f64)]) -> Result<ExponentFit> {
    let usable: Vec<(u64, f64)> = points.iter().copied().filter(|&(_, v)| v > 0.0).collect();
    if usable.len() < 3 {
        return Err(Error::Estimator(format!(
            "power-law fit needs >= 3 positive points, got {}",
            usable.len()
        )));
    }
    let xs: Vec<f64> = usable.iter().map(|&(n, _)| libm::log(n as f64)).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, v)| libm::log(v)).collect();
    let line = ols(&xs, &ys)?;
    if !line.slope.is_finite() {
        return Err(Error::Estimator("non-finite exponent".into()));
    }
    let n_min = usable.iter().map(|&(n, _)| n).min().unwrap();
    let n_max = usable.iter().map(|&(n, _)| n).max().unwrap();
    Ok(ExponentFit {
        exponent: line.slope,
        intercept: line.intercept,
        stderr: line.slope_stderr,
        n_range: (n_min, n_max),
        points_used: line.points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws_recover_to_machine_precision() {
        let cubes: Vec<(u64, f64)> =
            [10u64, 100, 1000].iter().map(|&n| (n, (n as f64))).collect();
        let fit = fit_power_law(&cubes).unwrap();
        assert!((fit.exponent - 1.0).abs() < 1e-12);
        assert!(fit.stderr < 1e-12);

        let roots: Vec<(u64, f64)> =
            [16u64, 64, 256, 1024].iter().map(|&n| (n, libm::sqrt(n as f64))).collect();
        let fit = fit_power_law(&roots).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-12);
        assert_eq!(fit.n_range, (16, 1024));
    }

    #[test]
    fn scaling_values_changes_intercept_not_exponent() {
        let base: Vec<(u64, f64)> =
            [8u64, 32, 128, 512].iter().map(|&n| (n, libm::pow(n as f64, 0.63))).collect();
        let scaled: Vec<(u64, f64)> = base.iter().map(|&(n, v)| (n, 7.5 * v)).collect();
        let f0 = fit_power_law(&base).unwrap();
        let f1 = fit_power_law(&scaled).unwrap();
        assert!((f0.exponent - f1.exponent).abs() < 1e-12);
        assert!((f1.intercept - f0.intercept - libm::log(7.5)).abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law_within_tolerance() {
        let pts: Vec<(u64, f64)> = (0..8)
            .map(|k| {
                let n = 16u64 << k;
                let noise = if k % 2 == 0 { 1.1 } else { 0.9 };
                (n, libm::sqrt(n as f64) * noise)
            })
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.05, "exponent {}", fit.exponent);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(fit_power_law(&[(10, 1.0), (20, 2.0)]).is_err());
        assert!(fit_power_law(&[(10, 0.0), (20, 0.0), (40, 0.0)]).is_err());
        assert!(ols(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
