//! Nonlocality of `(n, m, p)`-type acyclic quantum networks.
//!
//! * [`topology`] builds and validates network configurations.
//! * [`quantum`] holds source states and qubit observables.
//! * [`correlator`] computes full-network correlators three independent ways.
//! * [`inequality`] evaluates `I^0`, `I^1` and the witness `S`.
//! * [`lhv`] searches n-local hidden-variable models for the classical maximum of `S`.
//! * [`optimizer`] maximizes `S` over the extremal measurement angles.
//! * [`cli`] is the command-line front end.

pub mod cli;
pub mod correlator;
pub mod error;
pub mod inequality;
pub mod lhv;
pub mod optimizer;
pub mod quantum;
pub mod topology;

pub use correlator::{Correlations, CorrelatorRoute, JointDistribution, QuantumNetwork, SettingAssignment};
pub use error::{NetworkError, Result};
pub use inequality::{closed_form_s, closed_form_smax, evaluate_i, evaluate_s, EvaluationResult};
pub use lhv::{lhv_best_s, lhv_distribution, LhvModel, LhvNetwork, LhvSearchOptions, LhvSearchReport};
pub use optimizer::{optimize_alpha_equal, optimize_alpha_free, sweep, FreeOptimum, SweepRow};
pub use quantum::{BlochObservable, MeasurementPlan, SourceParam};
pub use topology::{build_chain, build_star, build_tree, AttachmentMap, NetworkConfig, NodeId, SourceId};
