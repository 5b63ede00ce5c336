//! Resistor networks, effective resistance and Delta-Y reduction.

mod reduction;
mod resistor;
mod sequence;

pub use reduction::{delta_to_y, level1_reduction, y_to_delta, ReductionStep, ReductionTrace, StepKind};
pub use resistor::{effective_resistance, Resistor, ResistanceSolver, ResistorNetwork, DIRECT_LIMIT};
pub use sequence::{
    corner_resistance_limit, full_network, full_network_with_points, recurrence_sequence, recurrence_step, resistance_sequence,
    shorted_network, ResistanceRow, ResistanceSequence,
};
