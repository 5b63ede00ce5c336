use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};
use serde::Serialize;

use super::assemble::{AssembledSystem, Discretization};
use super::inertia::InertiaCounter;
use super::model::Bc;
use super::sparse::SymSparse;
use crate::error::{FqgError, Result};
use crate::fmt::num;

/// Largest system handled by the dense symmetric-definite solver.
pub const DENSE_CAP: usize = 4000;
/// Relative bracket width at which bisection stops.
pub const BISECTION_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenCount {
    All,
    Lowest(usize),
}

/// Sorted eigenvalues with their discretization.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub disc: Discretization,
    /// Number of leading eigenvalues that passed the refinement check.
    pub trusted: Option<usize>,
}

impl Spectrum {
    pub fn bc(&self) -> Bc {
        self.disc.bc
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest eigenvalue inside the trusted window.
    pub fn trusted_max(&self) -> Option<f64> {
        match self.trusted {
            Some(0) => None,
            Some(t) => Some(self.eigenvalues[t - 1]),
            None => self.eigenvalues.last().copied(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,lambda,trusted\n");
        let t = self.trusted.unwrap_or(self.eigenvalues.len());
        for (i, &l) in self.eigenvalues.iter().enumerate() {
            s.push_str(&format!("{i},{},{}\n", num(l), i < t));
        }
        s
    }
}

/// Eigenpairs of `K u = lambda M u` by Cholesky reduction of `M`.
///
/// Eigenvectors (columns) are `M`-orthonormal.
pub fn dense_eigen(k: &SymSparse, m: &SymSparse, vectors: bool) -> Result<(Vec<f64>, Option<Mat<f64>>)> {
    let n = k.n;
    if n == 0 {
        return Ok((Vec::new(), vectors.then(|| Mat::zeros(0, 0))));
    }
    let md = m.to_dense();
    let llt = md
        .llt(Side::Lower)
        .map_err(|e| FqgError::Numerical(format!("mass matrix not positive definite: {e:?}")))?;
    let l = llt.L();
    let mut x = k.to_dense();
    solve_lower_triangular_in_place(l, x.as_mut(), Par::Seq);
    let mut c = x.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    // symmetrize round-off before the self-adjoint solver
    let c = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    if vectors {
        let evd = c.self_adjoint_eigen(Side::Lower).map_err(|e| FqgError::Numerical(format!("{e:?}")))?;
        let vals: Vec<f64> = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        let mut u = evd.U().to_owned();
        solve_upper_triangular_in_place(l.transpose(), u.as_mut(), Par::Seq);
        Ok((vals, Some(u)))
    } else {
        let vals = c.self_adjoint_eigenvalues(Side::Lower).map_err(|e| FqgError::Numerical(format!("{e:?}")))?;
        Ok((vals, None))
    }
}

/// Eigenvalues of an assembled system.
///
/// Systems up to [`DENSE_CAP`] dofs are solved densely; larger ones by
/// inertia bisection, which requires a bounded count.
pub fn solve_eig(sys: &AssembledSystem, count: EigenCount) -> Result<Spectrum> {
    let n = sys.n_dofs();
    let want = match count {
        EigenCount::All => n,
        EigenCount::Lowest(k) => k.min(n),
    };
    let mut eigenvalues = if n <= DENSE_CAP {
        let (mut v, _) = dense_eigen(&sys.k, &sys.m, false)?;
        v.truncate(want);
        v
    } else if count == EigenCount::All {
        return Err(FqgError::ResourceCap(format!(
            "{n} dofs exceed the dense cap of {DENSE_CAP}; request the lowest k eigenvalues"
        )));
    } else {
        sturm_eigenvalues(sys, want)
    };
    let zeros = InertiaCounter::new(&sys.model).zero_modes();
    for v in eigenvalues.iter_mut().take(zeros) {
        *v = 0.0;
    }
    Ok(Spectrum { eigenvalues, disc: sys.disc.clone(), trusted: None })
}

/// Lowest `k` eigenvalues by inertia bisection, at any size.
pub fn sturm_eigenvalues(sys: &AssembledSystem, k: usize) -> Vec<f64> {
    InertiaCounter::new(&sys.model).lowest(k, BISECTION_RTOL)
}

/// Index of the first eigenvalue whose relative change between a coarse and
/// a refined discretization reaches `rel` (exact zeros are skipped).
pub fn trust_cutoff(coarse: &[f64], fine: &[f64], rel: f64) -> usize {
    let n = coarse.len().min(fine.len());
    (0..n)
        .find(|&i| {
            let (a, b) = (coarse[i], fine[i]);
            !(a == 0.0 && b == 0.0) && (a - b).abs() >= rel * b.abs()
        })
        .unwrap_or(n)
}
