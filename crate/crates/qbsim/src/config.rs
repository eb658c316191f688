//! Run configuration: a single TOML file describing the environment, the
//! agents, the simulation budget, and the output options. Presets are data
//! files embedded in the binary; every preset expands to a valid config and
//! the expanded config is written alongside the outputs.

use serde::{Deserialize, Serialize};

use crate::agent::AgentSpec;
use crate::engine::{SimConfig, TraceLevel, Window};
use crate::env::{
    DecisionAutomatonEnv, Environment, LogitDuopolyEnv, PdGame, ShockMode, StochasticChannel,
};
use crate::equilibrium::BiasGrid;
use crate::error::QbError;

mod presets;

pub use presets::{preset, preset_names};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Decision,
    Pd,
    Duopoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Deterministic,
    Correlated,
    Independent,
}

/// Environment block. `kind` selects which optional fields are meaningful;
/// unknown keys are rejected at parse time and irrelevant keys at build time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub kind: EnvKind,
    /// Temptation payoff (decision and PD).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    /// Mismatch/sucker payoff (decision and PD).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    /// Payoff channel (PD only). Default: deterministic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelKind>,
    /// Good-outcome payoff V for stochastic channels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Initial hidden state, 1 or 2 (decision only). Default: 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<u8>,
    /// Duopoly parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub price_base: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub price_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub price_count: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasGridConfig {
    pub increment: f64,
    pub kappa_min: i32,
    pub kappa_max: i32,
}

/// Agents block. Exactly one of {scalar bias(es), bias_grid} applies; the
/// alpha/epsilon lists switch the run into parameter-grid mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentsConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub biases: Option<Vec<f64>>,
    /// Per-action distortion override; defaults to [1, 0] for two-action
    /// games and to the symmetric-profile profit for the duopoly.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distortion: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_list: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias_grid: Option<BiasGridConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub horizon: u64,
    pub paths: usize,
    pub seed: u64,
    pub initial_q: Vec<Vec<f64>>,
    #[serde(default = "default_window")]
    pub window: Window,
    #[serde(default = "default_trace")]
    pub trace: TraceLevel,
}

fn default_window() -> Window {
    Window::Full
}

fn default_trace() -> TraceLevel {
    TraceLevel::Aggregates
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Export every stride-th trace record.
    pub stride: u64,
    /// Emit the Pr(delta2 > 0 | delta1) curve (needs a full 2-agent trace).
    pub fk_curve: bool,
    pub fk_bin_width: f64,
    pub fk_min_count: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { stride: 1, fk_curve: false, fk_bin_width: 0.005, fk_min_count: 500 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub environment: EnvironmentConfig,
    pub agents: AgentsConfig,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// What a config expands to.
#[derive(Debug, Clone)]
pub enum RunPlan {
    /// One batch at fixed parameters.
    Single { env: Environment, specs: Vec<AgentSpec>, sim: SimConfig },
    /// A welfare grid over (alpha, epsilon) combinations.
    ParamGrid {
        env: Environment,
        specs: Vec<AgentSpec>,
        alphas: Vec<f64>,
        epsilons: Vec<f64>,
        sim: SimConfig,
    },
    /// A bias-grid sweep producing a gain matrix and Nash report.
    BiasSweep { env: Environment, specs: Vec<AgentSpec>, grid: BiasGrid, sim: SimConfig },
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, QbError> {
        toml::from_str(text).map_err(|e| QbError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    fn build_environment(&self) -> Result<Environment, QbError> {
        let env = &self.environment;
        let require = |field: Option<f64>, name: &str| {
            field.ok_or_else(|| {
                QbError::Config(format!("environment.{name} is required for kind {:?}", env.kind))
            })
        };
        match env.kind {
            EnvKind::Decision => {
                let state = match env.initial_state.unwrap_or(2) {
                    1 => 0,
                    2 => 1,
                    s => {
                        return Err(QbError::Config(format!(
                            "environment.initial_state must be 1 or 2, got {s}"
                        )))
                    }
                };
                Ok(Environment::Decision(DecisionAutomatonEnv::new(
                    require(env.y, "y")?,
                    require(env.x, "x")?,
                    state,
                )))
            }
            EnvKind::Pd => {
                let x = require(env.x, "x")?;
                let y = require(env.y, "y")?;
                let channel = match env.channel.unwrap_or(ChannelKind::Deterministic) {
                    ChannelKind::Deterministic => None,
                    ChannelKind::Correlated => Some(StochasticChannel::from_xy(
                        x,
                        y,
                        require(env.v, "v")?,
                        ShockMode::Correlated,
                    )?),
                    ChannelKind::Independent => Some(StochasticChannel::from_xy(
                        x,
                        y,
                        require(env.v, "v")?,
                        ShockMode::Independent,
                    )?),
                };
                Ok(Environment::PrisonersDilemma { game: PdGame::new(x, y), channel })
            }
            EnvKind::Duopoly => {
                let base = env.price_base.unwrap_or(1.4);
                let step = env.price_step.unwrap_or(0.1);
                let count = env.price_count.unwrap_or(7);
                let prices = (0..count).map(|k| base + step * k as f64).collect();
                Ok(Environment::Duopoly(LogitDuopolyEnv::new(
                    env.d.unwrap_or(2.0),
                    env.mu.unwrap_or(1.0 / 6.0),
                    env.c.unwrap_or(1.0),
                    env.scale.unwrap_or(10.0),
                    prices,
                )))
            }
        }
    }

    fn default_distortion(&self, env: &Environment) -> Vec<f64> {
        match env {
            Environment::Duopoly(d) => d.distortion(),
            _ => vec![1.0, 0.0],
        }
    }

    fn build_specs(&self, env: &Environment) -> Result<Vec<AgentSpec>, QbError> {
        let num_agents = env.num_agents();
        let distortion = self
            .agents
            .distortion
            .clone()
            .unwrap_or_else(|| self.default_distortion(env));
        let biases: Vec<f64> = match (&self.agents.bias, &self.agents.biases) {
            (Some(_), Some(_)) => {
                return Err(QbError::Config("set either agents.bias or agents.biases".into()))
            }
            (Some(b), None) => vec![*b; num_agents],
            (None, Some(bs)) => {
                if bs.len() != num_agents {
                    return Err(QbError::Config(format!(
                        "agents.biases has {} entries for {num_agents} agents",
                        bs.len()
                    )));
                }
                bs.clone()
            }
            (None, None) => vec![0.0; num_agents],
        };
        let specs: Vec<AgentSpec> = biases
            .into_iter()
            .map(|bias| AgentSpec {
                alpha: self.agents.alpha,
                epsilon: self.agents.epsilon,
                delta: self.agents.delta,
                bias,
                distortion: distortion.clone(),
            })
            .collect();
        for spec in &specs {
            spec.validate(env.num_actions())?;
        }
        Ok(specs)
    }

    fn build_sim(&self) -> SimConfig {
        SimConfig {
            horizon: self.simulation.horizon,
            num_paths: self.simulation.paths,
            initial_q: self.simulation.initial_q.clone(),
            master_seed: self.simulation.seed,
            trace_level: self.simulation.trace,
            window: self.simulation.window,
            seed_context: Vec::new(),
        }
    }

    /// Expands the config into an executable plan.
    pub fn build(&self) -> Result<RunPlan, QbError> {
        let env = self.build_environment()?;
        let specs = self.build_specs(&env)?;
        let sim = self.build_sim();

        let has_param_lists =
            self.agents.alpha_list.is_some() || self.agents.epsilon_list.is_some();
        match (&self.agents.bias_grid, has_param_lists) {
            (Some(_), true) => Err(QbError::Config(
                "bias_grid cannot be combined with alpha/epsilon lists".into(),
            )),
            (Some(g), false) => {
                if self.agents.bias.is_some() || self.agents.biases.is_some() {
                    return Err(QbError::Config(
                        "bias_grid cannot be combined with fixed biases".into(),
                    ));
                }
                Ok(RunPlan::BiasSweep {
                    env,
                    specs,
                    grid: BiasGrid::new(g.increment, g.kappa_min, g.kappa_max)?,
                    sim,
                })
            }
            (None, true) => {
                let alphas =
                    self.agents.alpha_list.clone().unwrap_or_else(|| vec![self.agents.alpha]);
                let epsilons = self
                    .agents
                    .epsilon_list
                    .clone()
                    .unwrap_or_else(|| vec![self.agents.epsilon]);
                if alphas.is_empty() || epsilons.is_empty() {
                    return Err(QbError::Config("alpha/epsilon lists must be nonempty".into()));
                }
                Ok(RunPlan::ParamGrid { env, specs, alphas, epsilons, sim })
            }
            (None, false) => Ok(RunPlan::Single { env, specs, sim }),
        }
    }
}
