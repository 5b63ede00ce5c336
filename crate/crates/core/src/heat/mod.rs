//! Heat kernels on the full level-`n` graph with length measure.
//!
//! Only meaningful when the limit space has finite length (`n0 * r < 1`,
//! i.e. `alpha > 1/3` for `n0 = 3`).

mod diagnostics;
mod kernel;

pub use diagnostics::{gaussian_diagnostic, measure_regularity, GaussianReport, RegularityReport};
pub use kernel::{full_graph_spectrum, default_element_size, HeatSetup, TRUNCATION_RTOL};
