//! Finite approximations of Hanoi-type fractal quantum graphs.
//!
//! The crate builds the level-`n` metric graphs `G_n` of the Hanoi attractor
//! (and its `n0`-branch generalization), and computes on them:
//!
//! * effective resistances on the shorted and full approximations, plus the
//!   Delta-Y reduction behind the corner-resistance recurrence ([`network`]);
//! * the weakly self-similar measure `mu` ([`measure`]);
//! * Dirichlet/Neumann spectra of the `mu`-weighted Laplacian, counting
//!   functions and spectral-exponent fits ([`spectral`]);
//! * heat kernels on the full graph with length measure ([`heat`]);
//! * resistance pseudo-metrics of abstract length systems ([`fqg`]).

pub mod error;
pub mod fmt;
pub mod fqg;
pub mod geometry;
pub mod heat;
pub mod measure;
pub mod network;
pub mod spectral;

pub use error::{FqgError, Result};
