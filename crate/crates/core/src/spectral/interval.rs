use super::model::Bc;
use crate::error::{invalid, Result};

/// Eigenvalues `k^2 pi^2 / (len * mass)` of a uniform weighted interval
/// (`k >= 0` Neumann, `k >= 1` Dirichlet), as an endless ascending stream.
pub fn interval_spectrum(len: f64, mass: f64, bc: Bc) -> Result<impl Iterator<Item = f64>> {
    if !(len > 0.0 && mass > 0.0) {
        return invalid(format!("interval needs positive length and mass, got {len}, {mass}"));
    }
    let first = match bc {
        Bc::Neumann => 0u64,
        Bc::Dirichlet => 1,
    };
    let c = std::f64::consts::PI.powi(2) / (len * mass);
    Ok((first..).map(move |k| (k * k) as f64 * c))
}
