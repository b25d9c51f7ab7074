//! Gromov hyperbolicity constants and metric-tree structure for finite
//! metric spaces.
//!
//! The crate computes the hyperbolicity delta of a finite metric space
//! under the four-point condition and under the Gromov-product
//! inequality (two independent scans that must agree exactly), measures
//! thin-triangle delta on weighted graphs, and provides the metric-tree
//! toolbox: unique segments, betweenness sets, nonexpansive projections,
//! segment gluing, and realization of 0-hyperbolic metrics as weighted
//! trees with Steiner points.
//!
//! Entry points:
//!
//! * [`FiniteMetricSpace`] and [`validate_metric`] — inputs and axioms.
//! * [`delta_four_point`], [`delta_gromov`], [`equivalence_report`] —
//!   hyperbolicity with verifiable witnesses.
//! * [`GeodesicSpace`], [`delta_thin`], [`tripod_points`],
//!   [`thin_relations`] — geodesic graphs and thin triangles.
//! * [`MetricTree`] — segments, projections, gluing.
//! * [`realize_tree`] / [`verify_embedding`] — 0-hyperbolic metrics as
//!   trees.
//! * [`generate`] and [`formats`] — example spaces and file formats.

pub mod formats;
pub mod generate;
pub mod graph;
pub mod hyperbolicity;
pub mod realize;
pub mod space;
pub mod thin;
pub mod tree;

pub use formats::{
    emit_csv, emit_graph_edge_list, emit_newick, emit_tree_edge_list, parse_distance_csv,
    parse_edge_list, parse_newick, FormatError,
};
pub use generate::{
    cycle_graph, dyadic_ball_family, grid_graph, poincare_space, radial_space, random_tree,
    random_ultrametric, sample_disk_points, sample_radial_points, ultrametric_filling, Ball,
    GenError, UltrametricBallFamily,
};
pub use graph::{
    all_pairs_shortest, Geodesic, GeodesicPoint, GeodesicSpace, GraphError, PointOnGraph,
    WeightedGraph,
};
pub use hyperbolicity::{
    delta_four_point, delta_gromov, equivalence_report, four_point_excess, gromov_excess,
    satisfies_four_point, DeltaWitness, FourPointCheck, HyperbolicityError, HyperbolicityReport,
    RelationCheck,
};
pub use realize::{realize_tree, verify_embedding, RealizeError, DEFAULT_ZERO_TOL};
pub use space::{
    validate_metric, Axiom, AxiomViolation, FiniteMetricSpace, MetricError, ValidationReport,
    REL_TOL,
};
pub use thin::{
    delta_thin, geodesic_report, max_tripod_spread, thin_relations, tripod_points, ThinWitness,
    TripodPoints,
};
pub use tree::{MetricTree, TreeError, TreeEdge, TreePoint};
