//! Dataset-level selection among quantum compilation, noise-suppression and
//! error-mitigation strategies.
//!
//! For every circuit of a dataset, each candidate [`StrategySpec`] is
//! compiled against a [`BackendModel`] (and optionally executed on a noisy
//! shot simulator), scored with a weighted objective, optionally filtered to
//! its Pareto front over `(depth, 2q, err)`, and the best candidate is
//! recorded in a reproducible output directory together with baseline
//! comparisons and distribution diagnostics.
//!
//! Modules, bottom-up:
//!
//! - [`circuit`] and [`dataset`]: gate-level circuits, structural metrics,
//!   fingerprints, on-disk datasets.
//! - [`backend`]: coupling graphs, calibration data, synthetic backends.
//! - [`compiler`]: strategies, default candidates and the compile pipeline.
//! - [`metrics`]: error proxy, objective, Pareto front, distances.
//! - [`bandit`]: Bayesian linear candidate-ordering surrogate.
//! - [`executor`]: shot simulation, untwirling, ZNE and readout mitigation.
//! - [`orchestrator`]: the adjust / matrix / report workflows.

pub mod backend;
pub mod bandit;
pub mod canonical;
pub mod circuit;
pub mod compiler;
pub mod dataset;
pub mod executor;
pub mod metrics;
pub mod orchestrator;

pub use backend::{resolve_backend, BackendModel};
pub use circuit::{Circuit, Gate, GateKind};
pub use compiler::{compile, default_candidates, Clock, CompiledCandidate, StrategySpec};
pub use metrics::{MetricRecord, MetricValue, ObjectiveWeights};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
