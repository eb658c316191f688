//! Simulation toolkit for biased Q-learning automata.
//!
//! The crate simulates epsilon-greedy Q-learners whose action choice is
//! distorted by a scalar bias, in three environments: a two-armed decision
//! problem with a hidden two-state world, a repeated prisoner's dilemma with
//! deterministic or stochastic payoff channels, and a logit-demand price
//! duopoly. Monte-Carlo batches over many independent paths feed welfare
//! grids, phase-exit statistics, and bias-grid sweeps whose empirical gain
//! matrices are searched for pure-strategy equilibria in the bias parameter.
//!
//! The `parallel` feature (on by default) runs paths data-parallel via rayon;
//! disabling it yields a dependency-light serial build with bit-identical
//! results.

pub mod agent;
pub mod config;
pub mod engine;
pub mod env;
pub mod equilibrium;
pub mod error;
pub mod export;
pub mod metrics;
pub mod rng;

pub use agent::{AgentSpec, QTable};
pub use config::{preset, preset_names, RunConfig, RunPlan};
pub use engine::{
    run_batch, run_batch_serial, run_path, BatchResult, ExitDirection, PathResult, SimConfig,
    Trace, TraceLevel, Window,
};
pub use env::Environment;
pub use equilibrium::{
    pure_nash, sweep_bias_grid, sweep_bias_grid_with, BiasGrid, GainMatrix, SeedPolicy,
    SweepResult,
};
pub use error::QbError;
pub use export::run_to_dir;
