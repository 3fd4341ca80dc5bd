//! Dense-subgraph mining over graph histories.
//!
//! A graph history is a sequence of undirected snapshots over one node
//! universe. This crate finds node sets whose density stays high across the
//! snapshots (`peeling`), or across a chosen subset of `k` snapshots
//! (`o2bff`), and ships the exact oracles, generators and evaluation harness
//! used to check those solvers.
//!
//! Densities are computed generically over a [`Scalar`]; the exact
//! rational instantiation is the default used throughout the solvers and
//! tests, with `f64` available when exact arithmetic is not needed.

pub mod density;
pub mod error;
pub mod eval;
pub mod graph_model;
pub mod o2bff;
pub mod oracle;
pub mod peeling;
pub mod scalar;
pub mod synthetic;

pub use density::{AggregateKind, Aggregator, DensityKind};
pub use error::{BffError, Result};
pub use graph_model::{AverageGraph, GraphHistory, HistoryView, NodeId, Snapshot, SubHistory};
pub use peeling::Scorer;
pub use scalar::Scalar;

/// Exact density value: a reduced fraction with a positive denominator.
pub type Rational = num_rational::Ratio<i64>;

/// The density type used by default everywhere in the crate.
pub type DensityValue = Rational;

/// A BFF solution scored exactly.
pub type Solution = peeling::Solution<Rational>;
/// A BFF solution scored in double precision.
pub type SolutionF64 = peeling::Solution<f64>;

/// An O²BFF solution scored exactly.
pub type O2Solution = o2bff::O2Solution<Rational>;
/// An O²BFF solution scored in double precision.
pub type O2SolutionF64 = o2bff::O2Solution<f64>;
