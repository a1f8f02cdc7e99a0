//! Fair multi-agent multi-armed bandits that maximize Nash social welfare.
//!
//! In the multi-agent bandit problem, `N` agents all receive rewards from
//! the single arm pulled each round, so a fair learner plays a probability
//! distribution over the `K` arms rather than a single arm. The objective is
//! the Nash social welfare — the product of the agents' expected rewards —
//! and performance is cumulative regret against the welfare-optimal policy.
//!
//! The crate provides:
//!
//! * [`welfare`] — domain types, the welfare function, its log gradient, and
//!   regret accounting;
//! * [`optimizer`] — projected gradient ascent over the simplex (and simplex
//!   cut by a half-space) for the log-concave and additive-bonus objectives;
//! * [`algorithms`] — the fair UCB algorithm, the high-start-up-cost
//!   variant, and the prior additive-bonus UCB baseline, plus the episode
//!   runner;
//! * [`environment`] — seeded instance generation and Bernoulli rewards;
//! * [`oracle`] — brute-force grid references used by the tests;
//! * [`harness`] — the batch experiment runner behind the `fair-bandits`
//!   CLI, with CSV persistence and SVG regret charts.

pub mod algorithms;
pub mod environment;
pub mod error;
pub mod harness;
pub mod optimizer;
pub mod oracle;
pub mod welfare;

pub use algorithms::{
    baseline_ucb_step, confidence_width, eta_vector, fair_ucb_step, high_startup_step,
    run_episode, AlgorithmKind, ConfidenceSpec, EpisodeOutcome, SolverSettings,
};
pub use environment::{derive_seed, generate_instance, sample_rewards, stream, BanditInstance};
pub use error::{Error, Result};
pub use harness::{emit_regret_chart, run_batch, AlgoName, BatchSummary, ExperimentConfig};
pub use optimizer::{
    maximize_log_nsw, maximize_nsw_plus_linear, project_to_simplex,
    project_to_simplex_halfspace, HalfSpace, TerminationRule,
};
pub use oracle::{grid_optimal_constrained, grid_optimal_policy};
pub use welfare::{
    instantaneous_regret, lipschitz_gap_bound, log_nsw_gradient, nsw, BanditState, Policy,
    RegretTrace, RewardMatrix, TraceRecord, EPS_OPT, MEAN_CLAMP,
};
