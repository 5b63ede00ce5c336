//! The weakly self-similar probability measure `mu` on the attractor.
//!
//! Every level-1 joining segment carries mass `beta` and every first-level
//! copy mass `s`; deeper pieces inherit `s^|w|` scaling. Triangle edges of a
//! finite approximation carry no `mu`-mass (their cells are collapsed).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, FqgError, Result};
use crate::geometry::{Edge, EdgeKind, HanoiParams, Word};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureParams {
    pub beta: f64,
    pub n0: usize,
}

impl MeasureParams {
    /// Requires `0 < beta < 2/(n0(n0-1))`; the endpoints are excluded.
    pub fn new(beta: f64, n0: usize) -> Result<Self> {
        if n0 < 3 {
            return invalid(format!("n0 must be at least 3, got {n0}"));
        }
        let upper = Self::beta_upper(n0);
        if !(beta > 0.0 && beta < upper) {
            return invalid(format!("beta must lie in (0, {upper}), got {beta}"));
        }
        Ok(Self { beta, n0 })
    }

    pub fn beta_upper(n0: usize) -> f64 {
        2.0 / (n0 as f64 * (n0 as f64 - 1.0))
    }

    /// The `beta` for which `r * s = 1/n0^2`.
    pub fn critical(hp: HanoiParams) -> Result<Self> {
        let n0 = hp.n0 as f64;
        let s = 1.0 / (n0 * n0 * hp.r());
        let beta = (2.0 - 2.0 * n0 * s) / (n0 * (n0 - 1.0));
        Self::new(beta, hp.n0)
    }

    /// Mass of a first-level copy, `(2 - n0(n0-1) beta) / (2 n0)`.
    pub fn s(&self) -> f64 {
        if self.n0 == 3 {
            (1.0 - 3.0 * self.beta) / 3.0
        } else {
            let n0 = self.n0 as f64;
            (2.0 - n0 * (n0 - 1.0) * self.beta) / (2.0 * n0)
        }
    }

    /// Mass of a joining edge created at level `k >= 1`.
    pub fn joining_mass(&self, k: usize) -> f64 {
        self.s().powi(k as i32 - 1) * self.beta
    }
}

/// `mu`-mass of a joining edge; triangle edges are rejected.
pub fn edge_mass(mp: &MeasureParams, edge: &Edge) -> Result<f64> {
    match edge.kind {
        EdgeKind::Joining if edge.level >= 1 => Ok(mp.joining_mass(edge.level)),
        EdgeKind::Joining => invalid("joining edge with level 0"),
        EdgeKind::Triangle => Err(FqgError::InvalidParameter(
            "triangle edges carry no mu-mass; use the length measure".into(),
        )),
    }
}

/// Uniform `mu`-density along a joining edge of level `k`.
pub fn edge_density(hp: &HanoiParams, mp: &MeasureParams, k: usize) -> f64 {
    mp.joining_mass(k) / (hp.alpha * hp.r().powi(k as i32 - 1))
}

/// `s^|w|`.
pub fn cell_mass(mp: &MeasureParams, word: &Word) -> f64 {
    // repeated multiplication, so appending a symbol scales by exactly `s`
    let s = mp.s();
    (0..word.len()).fold(1.0, |m, _| m * s)
}

/// Total mass of the level-`n` decomposition: cells plus joining edges.
pub fn truncation_total(mp: &MeasureParams, n: usize) -> f64 {
    let n0 = mp.n0 as f64;
    let s = mp.s();
    let pairs = n0 * (n0 - 1.0) / 2.0;
    let edges: f64 = (1..=n).map(|k| pairs * n0.powi(k as i32 - 1) * s.powi(k as i32 - 1) * mp.beta).sum();
    (n0 * s).powi(n as i32) + edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `rs < 1/n0^2`
    #[serde(rename = "i")]
    Subcritical,
    /// `rs = 1/n0^2`
    #[serde(rename = "ii")]
    Critical,
    /// `1/n0^2 < rs < 1/(2 n0)`
    #[serde(rename = "iii")]
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsReport {
    pub rs: f64,
    pub regime: Regime,
    /// Predicted spectral dimension `d_S`.
    pub spectral_dimension: f64,
    /// Predicted growth exponent of the counting function, `d_S / 2`.
    pub counting_exponent: f64,
}

/// Tolerance for classifying `rs` as critical.
pub const CRITICAL_TOL: f64 = 1e-12;

/// The product `r*s` and its spectral regime.
pub fn rs_product(hp: &HanoiParams, mp: &MeasureParams) -> Result<RsReport> {
    if hp.n0 != mp.n0 {
        return invalid(format!("n0 mismatch: geometry {} vs measure {}", hp.n0, mp.n0));
    }
    let n0 = hp.n0 as f64;
    let rs = hp.r() * mp.s();
    if rs >= 1.0 / (2.0 * n0) {
        return invalid(format!("rs = {rs} is not below 1/(2 n0)"));
    }
    let crit = 1.0 / (n0 * n0);
    let (regime, ds) = if (rs - crit).abs() <= CRITICAL_TOL {
        (Regime::Critical, 1.0)
    } else if rs < crit {
        (Regime::Subcritical, 1.0)
    } else {
        (Regime::Supercritical, (n0 * n0).ln() / -rs.ln())
    };
    Ok(RsReport { rs, regime, spectral_dimension: ds, counting_exponent: ds / 2.0 })
}
