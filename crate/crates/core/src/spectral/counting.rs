use super::assemble::assemble;
use super::eigen::{solve_eig, trust_cutoff, EigenCount, Spectrum};
use super::model::Bc;
use crate::error::{invalid, Result};
use crate::geometry::MetricGraph;
use crate::measure::MeasureParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count {
    pub value: usize,
    /// False when `x` lies beyond the trusted (or computed) part of the spectrum.
    pub trusted: bool,
}

/// `#{k : lambda_k <= x}` with multiplicity.
pub fn counting_function(spec: &Spectrum, x: f64) -> Result<Count> {
    if !(x >= 0.0) {
        return invalid(format!("counting function needs x >= 0, got {x}"));
    }
    let value = spec.eigenvalues.partition_point(|&l| l <= x);
    let complete = spec.eigenvalues.len() == spec.disc.n_dofs || value < spec.eigenvalues.len();
    let in_window = spec.trusted_max().map_or(false, |m| x <= m) || (spec.trusted.is_none() && complete);
    Ok(Count { value, trusted: complete && in_window })
}

/// How many eigenvalues to compute when comparing `p` against `2p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementPolicy {
    /// Relative change that ends the trusted window.
    pub rel_change: f64,
    pub initial_count: usize,
    pub max_count: usize,
}

impl Default for RefinementPolicy {
    fn default() -> Self {
        Self { rel_change: 0.01, initial_count: 400, max_count: 40_000 }
    }
}

/// Spectrum at `2p` whose `trusted` prefix agrees with the `p` spectrum to
/// within `policy.rel_change`, index by index.
pub fn refined_spectrum(
    g: &MetricGraph,
    mp: &MeasureParams,
    p: usize,
    bc: Bc,
    policy: RefinementPolicy,
) -> Result<Spectrum> {
    let coarse_sys = assemble(g, mp, p, bc)?;
    let fine_sys = assemble(g, mp, 2 * p, bc)?;
    let limit = coarse_sys.n_dofs().min(policy.max_count);
    let mut k = policy.initial_count.min(limit);
    loop {
        let coarse = solve_eig(&coarse_sys, EigenCount::Lowest(k))?;
        let mut fine = solve_eig(&fine_sys, EigenCount::Lowest(k))?;
        let cut = trust_cutoff(&coarse.eigenvalues, &fine.eigenvalues, policy.rel_change);
        if cut < k || k >= limit {
            fine.trusted = Some(cut);
            return Ok(fine);
        }
        k = (2 * k).min(limit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::assemble::interval_system;

    #[test]
    fn counts_with_multiplicity() {
        let sys = interval_system(1.0, 1.0, 8, Bc::Neumann).unwrap();
        let mut spec = solve_eig(&sys, EigenCount::All).unwrap();
        spec.eigenvalues = vec![0.0, 1.0, 1.0, 2.0];
        spec.disc.n_dofs = 4;
        assert_eq!(counting_function(&spec, 0.0).unwrap().value, 1);
        assert_eq!(counting_function(&spec, 1.0).unwrap().value, 3);
        assert_eq!(counting_function(&spec, 5.0).unwrap().value, 4);
        assert!(counting_function(&spec, -1.0).is_err());
        spec.trusted = Some(2);
        assert!(!counting_function(&spec, 1.5).unwrap().trusted);
        assert!(counting_function(&spec, 0.5).unwrap().trusted);
    }
}
