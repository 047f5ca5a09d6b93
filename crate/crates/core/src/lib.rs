//! Dynamic interactive multi-attribute group decision making over
//! 2-dimensional uncertain linguistic variables.
//!
//! Experts score alternatives against attributes with interval-valued
//! linguistic evaluations paired with interval-valued reliabilities. The
//! engine aggregates the panel into a group matrix, measures each expert's
//! consistency with the group, derives entropy-based attribute weights, and
//! nudges every expert toward the group until all consistency indices fall
//! below their thresholds, then ranks the alternatives.
//!
//! - [`linguistic`]: the value types and their algebra
//! - [`aggregation`]: generalized weighted power-mean aggregation
//! - [`matrix`]: validated evaluation grids
//! - [`consensus`]: the round-based interaction procedure and ranking
//! - [`io`]: problem files and round-trace emission

pub mod aggregation;
pub mod consensus;
pub mod io;
pub mod linguistic;
pub mod matrix;

pub use aggregation::{power_mean, weighted_mean, AggregationError, Weights};
pub use consensus::{
    adjust_preferences, aggregate_group, check_termination, consistency_index, distance_matrices,
    entropy_weights, expectation_matrices, rank_alternatives, run_consensus, ConsensusError,
    ConsensusRun, EntropyWeights, ProblemError, ProblemSpec, RoundReport, DEFAULT_ALPHA,
    DEFAULT_MAX_ROUNDS,
};
pub use io::{
    parse_problem, parse_problem_str, problem_to_json, ProblemFileError, RankingEntry, TraceBundle,
    TraceError, TraceFormat,
};
pub use linguistic::{Interval, LinguisticError, Scale, TwoDimUlv};
pub use matrix::{DecisionMatrix, MatrixError};
