//! Hanoi-type attractor approximations and their metric layer.

mod graph;
mod metric;
mod params;
mod simplex;

pub use graph::{
    build_level, build_level_capped, hausdorff_dimension, joining_edge_count, total_joining_length,
    Edge, EdgeKind, JoiningLength, MetricGraph, Subdivision, Vertex, DEFAULT_CELL_CAP,
    DEFAULT_VERTEX_CAP,
};
pub use metric::{ball_measure, distances_from, geodesic_distance, sample_points, Point};
pub use params::{HanoiParams, Word};
pub use simplex::simplex_vertices;
