use serde::Serialize;

use super::eigen::Spectrum;
use crate::error::{FqgError, Result};
use crate::geometry::HanoiParams;
use crate::measure::{rs_product, MeasureParams, Regime};

/// Where on the spectrum the counting function is sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPolicy {
    /// Index of the eigenvalue opening the window.
    pub first_index: usize,
    pub points_per_decade: usize,
    pub min_trusted: usize,
}

impl Default for FitPolicy {
    fn default() -> Self {
        Self { first_index: 20, points_per_decade: 40, min_trusted: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub corr: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn line_fit(x: &[f64], y: &[f64]) -> LineFit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let stderr = if x.len() > 2 { (sse / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    LineFit { slope, intercept, stderr, corr: sxy / (sxx * syy).sqrt() }
}

/// Geometrically spaced points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let m = ((decades * per_decade as f64).floor() as usize).max(1) + 1;
    (0..m).map(|i| lo * (hi / lo).powf(i as f64 / (m - 1) as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogDiagnostic {
    pub slope: f64,
    pub corr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub params: FitParams,
    pub rs: f64,
    pub regime: Regime,
    pub predicted_exponent: f64,
    pub fitted_slope: f64,
    pub stderr: f64,
    pub window: [f64; 2],
    pub trusted: usize,
    pub grid_points: usize,
    /// `N(x)/sqrt(x)` against `ln x`; reported for the critical regime.
    pub log_diag: Option<LogDiagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitParams {
    pub alpha: f64,
    pub beta: f64,
    pub n0: usize,
    pub level: usize,
    pub p: usize,
    pub bc: super::model::Bc,
}

/// Least-squares slope of `log N(x)` against `log x` across the trusted window.
pub fn dimension_fit(spec: &Spectrum, hp: &HanoiParams, mp: &MeasureParams, policy: FitPolicy) -> Result<DimensionFit> {
    let rep = rs_product(hp, mp)?;
    let trusted = spec.trusted.unwrap_or(spec.eigenvalues.len());
    if trusted < policy.min_trusted.max(policy.first_index + 2) {
        return Err(FqgError::InsufficientData(format!(
            "{trusted} trusted eigenvalues, at least {} needed",
            policy.min_trusted
        )));
    }
    let ev = &spec.eigenvalues;
    let (lo, hi) = (ev[policy.first_index], ev[trusted - 1]);
    if !(lo > 0.0 && hi > lo) {
        return Err(FqgError::InsufficientData("degenerate fit window".into()));
    }
    let xs = geometric_grid(lo, hi, policy.points_per_decade);
    let counts: Vec<f64> = xs.iter().map(|&x| ev.partition_point(|&l| l <= x) as f64).collect();
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ln: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let f = line_fit(&lx, &ln);
    let log_diag = (rep.regime == Regime::Critical).then(|| {
        let y: Vec<f64> = counts.iter().zip(&xs).map(|(c, x)| c / x.sqrt()).collect();
        let d = line_fit(&lx, &y);
        LogDiagnostic { slope: d.slope, corr: d.corr }
    });
    Ok(DimensionFit {
        params: FitParams {
            alpha: hp.alpha,
            beta: mp.beta,
            n0: hp.n0,
            level: spec.disc.level,
            p: spec.disc.p,
            bc: spec.disc.bc,
        },
        rs: rep.rs,
        regime: rep.regime,
        predicted_exponent: rep.counting_exponent,
        fitted_slope: f.slope,
        stderr: f.stderr,
        window: [lo, hi],
        trusted,
        grid_points: xs.len(),
        log_diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let f = line_fit(&x, &y);
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert!(f.stderr.abs() < 1e-15 && (f.corr - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_density() {
        let g = geometric_grid(1.0, 100.0, 40);
        assert_eq!(g.len(), 81);
        assert!((g[80] - 100.0).abs() < 1e-12 && g[0] == 1.0);
        assert!((g[40] - 10.0).abs() < 1e-12);
    }
}
