//! Numerics for sub-linear expectations over finite families of probability
//! laws: upper and lower expectations, capacities, Choquet integrals, the
//! truncation schedules used by self-normalized laws of the iterated
//! logarithm, scenario simulation of partial sums, and Monte-Carlo checks of
//! the exponential inequalities behind them.
//!
//! A sub-linear expectation is represented as the maximum of linear
//! expectations over a [`MeasureFamily`]. Sequences that are independent and
//! identically distributed under it are realized by a [`Policy`] that picks,
//! step by step, which member generates the next draw.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod distributions;
mod error;
pub mod inequalities;
mod quad;
pub mod rng;
pub mod schedules;
pub mod simulate;
pub mod sublinear;

pub use capacity::{
    capacity, choquet, loglog_moment, CapacityValue, ChoquetResult, Side, ThresholdEvent, Transform,
};
pub use distributions::{DiscreteDistribution, Distribution, ParametricDistribution};
pub use error::{Error, Result};
pub use inequalities::{
    borel_cantelli_diag, exp_bound_refined, exp_bound_simple, series_diagnostic, smallo_checks,
    verify_exp_ineq, verify_martingale_ineq, ExpIneqInputs, MartingaleSetup, SeriesClass,
    SeriesDiagnostic, SmallOReport, VerificationReport,
};
pub use rng::{derive_seed, SeedPair};
pub use schedules::{blocks, d, log_conv, loglog, t, AlphaRule, BlockSchedule, TruncationSchedule};
pub use simulate::{
    conditional_dominance_check, empirical_upper_capacity, estimate_cluster, mixture_weight,
    run_path, run_scenario, run_trajectory, CapacityEstimate, Checkpoint, CheckpointRule,
    ClusterEstimate, DominanceReport, Objective, PathEvent, Policy, Trajectory,
};
pub use sublinear::{MeasureFamily, SigmaBounds, TruncationLimit};
