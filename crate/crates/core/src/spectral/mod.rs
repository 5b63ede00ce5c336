//! `mu`-weighted Laplacian spectra on the collapsed-cell spaces `F_n`.

mod assemble;
mod counting;
mod eigen;
mod fit;
mod inertia;
mod interval;
mod model;
mod sparse;

pub use assemble::{
    assemble, assemble_cell, interval_system, length_measure_system, AssembledSystem, Discretization,
    DEFAULT_DOF_CAP,
};
pub use counting::{counting_function, refined_spectrum, Count, RefinementPolicy};
pub use eigen::{
    dense_eigen, solve_eig, sturm_eigenvalues, trust_cutoff, EigenCount, Spectrum, BISECTION_RTOL, DENSE_CAP,
};
pub use fit::{dimension_fit, geometric_grid, line_fit, DimensionFit, FitParams, FitPolicy, LineFit, LogDiagnostic};
pub use inertia::InertiaCounter;
pub use interval::interval_spectrum;
pub use model::{Bc, ChainEdge, ChainModel, EdgeClass};
pub use sparse::SymSparse;
