//! Deterministic simulation of independent paths.
//!
//! A path is the unit of parallelism: it owns its environment, agents, and
//! random streams, and is fully determined by (master seed, seed context,
//! path index). The batch runner may execute paths on any number of workers;
//! results are merged by path index, so pooled aggregates are bit-identical
//! whether paths run serially or in parallel.

use serde::{Deserialize, Serialize};

use crate::agent::{AgentSpec, QTable};
use crate::env::Environment;
use crate::error::QbError;
use crate::rng::{RngStream, ENV_SLOT};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How much per-period data to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    None,
    Aggregates,
    Full,
}

/// Averaging window for per-path mean rewards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    Full,
    /// Mean over the last `n` periods of the horizon.
    Last(u64),
}

impl Window {
    pub fn start(&self, horizon: u64) -> u64 {
        match self {
            Window::Full => 0,
            Window::Last(n) => horizon.saturating_sub(*n),
        }
    }
}

/// Batch-level simulation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// Periods per path.
    pub horizon: u64,
    pub num_paths: usize,
    /// Initial Q-values, one vector per agent.
    pub initial_q: Vec<Vec<f64>>,
    pub master_seed: u64,
    pub trace_level: TraceLevel,
    pub window: Window,
    /// Extra words mixed into every stream derivation, used to give each
    /// sweep cell an independent seed space.
    #[serde(default)]
    pub seed_context: Vec<u64>,
}

impl SimConfig {
    pub fn new(horizon: u64, num_paths: usize, initial_q: Vec<Vec<f64>>, master_seed: u64) -> Self {
        Self {
            horizon,
            num_paths,
            initial_q,
            master_seed,
            trace_level: TraceLevel::Aggregates,
            window: Window::Full,
            seed_context: Vec::new(),
        }
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub fn with_trace(mut self, level: TraceLevel) -> Self {
        self.trace_level = level;
        self
    }

    pub fn with_seed_context(mut self, context: Vec<u64>) -> Self {
        self.seed_context = context;
        self
    }

    fn validate(&self, env: &Environment, specs: &[AgentSpec]) -> Result<(), QbError> {
        if self.horizon < 1 || self.num_paths < 1 {
            return Err(QbError::Usage("horizon and paths must be >= 1".into()));
        }
        if specs.len() != env.num_agents() {
            return Err(QbError::Usage(format!(
                "{} agent specs for a {}-agent environment",
                specs.len(),
                env.num_agents()
            )));
        }
        if self.initial_q.len() != env.num_agents() {
            return Err(QbError::Usage(format!(
                "{} initial Q-tables for {} agents",
                self.initial_q.len(),
                env.num_agents()
            )));
        }
        for (i, q) in self.initial_q.iter().enumerate() {
            if q.len() != env.num_actions() {
                return Err(QbError::Usage(format!(
                    "agent {i}: initial Q has {} entries for {} actions",
                    q.len(),
                    env.num_actions()
                )));
            }
        }
        for spec in specs {
            spec.validate(env.num_actions())?;
        }
        Ok(())
    }
}

/// One period of a full trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: u64,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Post-update Q snapshot per agent.
    pub q: Vec<Vec<f64>>,
    /// Environment-appropriate score difference per agent, post-update.
    pub delta: Vec<f64>,
}

/// Full per-period record of one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub initial_q: Vec<Vec<f64>>,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Per-agent delta series.
    pub fn delta_series(&self, agent: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.delta[agent]).collect()
    }

    /// Replays the trace's actions and rewards through the update rule and
    /// checks that every Q snapshot is reproduced exactly.
    pub fn replays_exactly(&self, specs: &[AgentSpec]) -> bool {
        let mut tables: Vec<QTable> =
            self.initial_q.iter().cloned().map(QTable::new).collect();
        for record in &self.records {
            for (i, table) in tables.iter_mut().enumerate() {
                table.update(record.actions[i], record.rewards[i], specs[i].alpha, specs[i].delta);
                if table.values() != record.q[i].as_slice() {
                    return false;
                }
            }
        }
        true
    }
}

/// Per-path aggregates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub path_index: usize,
    pub master_seed: u64,
    /// Mean reward per agent over the configured window.
    pub mean_reward: Vec<f64>,
    /// Mean reward per agent over the whole horizon.
    pub full_mean_reward: Vec<f64>,
    /// Joint-action counts, row-major over agents; sums to the horizon.
    pub profile_counts: Vec<u64>,
    /// First period opening two consecutive periods with every delta > 0.
    pub exit_to_cooperation: Option<u64>,
    /// First period opening two consecutive periods with every delta < 0.
    pub exit_to_defection: Option<u64>,
}

/// Direction of a phase exit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitDirection {
    ToCooperation,
    ToDefection,
}

/// Streaming detector: first date at which the sign condition holds for two
/// consecutive periods for every agent.
#[derive(Debug, Clone)]
pub struct ExitDetector {
    direction: ExitDirection,
    run: u64,
    hit: Option<u64>,
}

impl ExitDetector {
    pub fn new(direction: ExitDirection) -> Self {
        Self { direction, run: 0, hit: None }
    }

    #[inline]
    pub fn observe(&mut self, t: u64, deltas: &[f64]) {
        if self.hit.is_some() {
            return;
        }
        let qualifies = match self.direction {
            ExitDirection::ToCooperation => deltas.iter().all(|&d| d > 0.0),
            ExitDirection::ToDefection => deltas.iter().all(|&d| d < 0.0),
        };
        if qualifies {
            self.run += 1;
            if self.run == 2 {
                self.hit = Some(t - 1);
            }
        } else {
            self.run = 0;
        }
    }

    pub fn exit_time(&self) -> Option<u64> {
        self.hit
    }
}

/// How the per-agent delta is computed from the current table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DeltaRule {
    /// Biased score difference, action 0 minus action 1.
    TwoAction,
    /// Q of the lowest price minus the best Q among higher prices.
    DuopolyNaive,
    /// Best biased score at or above the split index minus the best below.
    DuopolyCollusive { split: usize },
}

fn delta_rule(env: &Environment, specs: &[AgentSpec]) -> DeltaRule {
    match env {
        Environment::Duopoly(_) => {
            if specs.iter().all(|s| s.bias == 0.0) {
                DeltaRule::DuopolyNaive
            } else {
                DeltaRule::DuopolyCollusive { split: 3 }
            }
        }
        _ => DeltaRule::TwoAction,
    }
}

#[inline]
fn compute_delta(rule: DeltaRule, q: &QTable, spec: &AgentSpec) -> f64 {
    match rule {
        DeltaRule::TwoAction => {
            let v = q.values();
            (v[0] + spec.bias * spec.distortion[0]) - (v[1] + spec.bias * spec.distortion[1])
        }
        DeltaRule::DuopolyNaive => {
            let v = q.values();
            let rest = v[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            v[0] - rest
        }
        DeltaRule::DuopolyCollusive { split } => {
            let mut high = f64::NEG_INFINITY;
            let mut low = f64::NEG_INFINITY;
            for (a, &v) in q.values().iter().enumerate() {
                let score = v + spec.bias * spec.distortion[a];
                if a >= split {
                    high = high.max(score);
                } else {
                    low = low.max(score);
                }
            }
            high - low
        }
    }
}

/// Simulates one path. Fully determined by (master seed, seed context, path
/// index).
pub fn run_path(
    env: &Environment,
    specs: &[AgentSpec],
    config: &SimConfig,
    path_index: usize,
) -> Result<(PathResult, Option<Trace>), QbError> {
    config.validate(env, specs)?;

    let num_agents = env.num_agents();
    let num_actions = env.num_actions();
    let rule = delta_rule(env, specs);

    let mut env = env.clone();
    let mut tables: Vec<QTable> = config.initial_q.iter().cloned().map(QTable::new).collect();

    let mut context = config.seed_context.clone();
    context.push(path_index as u64);
    context.push(0);
    let mut agent_rngs: Vec<RngStream> = (0..num_agents)
        .map(|i| {
            *context.last_mut().unwrap() = i as u64;
            RngStream::with_context(config.master_seed, &context)
        })
        .collect();
    *context.last_mut().unwrap() = ENV_SLOT;
    let mut env_rng = RngStream::with_context(config.master_seed, &context);

    let window_start = config.window.start(config.horizon);
    let mut window_sum = vec![0.0f64; num_agents];
    let mut full_sum = vec![0.0f64; num_agents];
    let mut profile_counts = vec![0u64; num_actions.pow(num_agents as u32)];
    let mut coop = ExitDetector::new(ExitDirection::ToCooperation);
    let mut defect = ExitDetector::new(ExitDirection::ToDefection);

    let mut actions = vec![0usize; num_agents];
    let mut rewards = vec![0.0f64; num_agents];
    let mut deltas = vec![0.0f64; num_agents];
    let mut trace = match config.trace_level {
        TraceLevel::Full => Some(Trace {
            initial_q: config.initial_q.clone(),
            records: Vec::with_capacity(config.horizon as usize),
        }),
        _ => None,
    };

    for t in 0..config.horizon {
        // All agents select from pre-period tables, then rewards realize,
        // then all agents update their played action.
        for i in 0..num_agents {
            actions[i] = specs[i].select_action(&tables[i], &mut agent_rngs[i]);
        }
        env.step(&actions, &mut env_rng, &mut rewards);
        for i in 0..num_agents {
            tables[i].update(actions[i], rewards[i], specs[i].alpha, specs[i].delta);
        }
        for i in 0..num_agents {
            deltas[i] = compute_delta(rule, &tables[i], &specs[i]);
        }

        let profile = actions.iter().fold(0usize, |acc, &a| acc * num_actions + a);
        profile_counts[profile] += 1;
        for i in 0..num_agents {
            full_sum[i] += rewards[i];
            if t >= window_start {
                window_sum[i] += rewards[i];
            }
        }
        coop.observe(t, &deltas);
        defect.observe(t, &deltas);

        if let Some(trace) = trace.as_mut() {
            trace.records.push(TraceRecord {
                t,
                actions: actions.clone(),
                rewards: rewards.clone(),
                q: tables.iter().map(|q| q.values().to_vec()).collect(),
                delta: deltas.clone(),
            });
        }
    }

    let window_len = (config.horizon - window_start).max(1) as f64;
    let result = PathResult {
        path_index,
        master_seed: config.master_seed,
        mean_reward: window_sum.iter().map(|s| s / window_len).collect(),
        full_mean_reward: full_sum.iter().map(|s| s / config.horizon as f64).collect(),
        profile_counts,
        exit_to_cooperation: coop.exit_time(),
        exit_to_defection: defect.exit_time(),
    };
    Ok((result, trace))
}

/// Results of a batch of independent paths, ordered by path index.
#[derive(Debug, Clone)]
pub struct BatchResult {
    pub paths: Vec<PathResult>,
    /// One trace per path when the trace level is `Full`, otherwise empty.
    pub traces: Vec<Trace>,
}

fn collect_batch(
    outputs: Vec<(PathResult, Option<Trace>)>,
) -> BatchResult {
    let mut paths = Vec::with_capacity(outputs.len());
    let mut traces = Vec::new();
    for (result, trace) in outputs {
        paths.push(result);
        traces.extend(trace);
    }
    BatchResult { paths, traces }
}

/// Runs every path on the current thread, in path order.
pub fn run_batch_serial(
    env: &Environment,
    specs: &[AgentSpec],
    config: &SimConfig,
) -> Result<BatchResult, QbError> {
    let outputs = (0..config.num_paths)
        .map(|p| run_path(env, specs, config, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_batch(outputs))
}

/// Runs the batch across the rayon pool; falls back to the serial runner
/// when the `parallel` feature is disabled. Output is identical either way.
#[cfg(feature = "parallel")]
pub fn run_batch(
    env: &Environment,
    specs: &[AgentSpec],
    config: &SimConfig,
) -> Result<BatchResult, QbError> {
    let outputs = (0..config.num_paths)
        .into_par_iter()
        .map(|p| run_path(env, specs, config, p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(collect_batch(outputs))
}

#[cfg(not(feature = "parallel"))]
pub fn run_batch(
    env: &Environment,
    specs: &[AgentSpec],
    config: &SimConfig,
) -> Result<BatchResult, QbError> {
    run_batch_serial(env, specs, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{DecisionAutomatonEnv, PdGame};

    fn pd_env(x: f64, y: f64) -> Environment {
        Environment::PrisonersDilemma { game: PdGame::new(x, y), channel: None }
    }

    fn pd_specs(alpha: f64, epsilon: f64) -> Vec<AgentSpec> {
        vec![AgentSpec::two_action(alpha, epsilon, 0.95, 0.0); 2]
    }

    fn unfavorable() -> Vec<Vec<f64>> {
        vec![vec![0.95, 1.0], vec![0.95, 1.0]]
    }

    #[test]
    fn greedy_lockin_without_randomness() {
        // Degenerate transitions, no experimentation, Q(1) > Q(2): the agent
        // plays action 0 forever and earns 2 every period.
        let env = Environment::Decision(
            DecisionAutomatonEnv::new(-0.5, 1.0, 0)
                .with_transitions([[0.0, 0.05], [0.05, 0.0]]),
        );
        let specs = vec![AgentSpec::two_action(0.5, 0.0, 0.95, 0.0)];
        let config = SimConfig::new(500, 1, vec![vec![1.5, 1.4]], 1).with_trace(TraceLevel::Full);
        let (result, trace) = run_path(&env, &specs, &config, 0).unwrap();
        assert_eq!(result.full_mean_reward[0], 2.0);
        let trace = trace.unwrap();
        assert!(trace.records.iter().all(|r| r.actions[0] == 0 && r.rewards[0] == 2.0));
    }

    #[test]
    fn same_path_twice_is_identical() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.5, 0.1);
        let config =
            SimConfig::new(2_000, 1, unfavorable(), 77).with_trace(TraceLevel::Full);
        let (r1, t1) = run_path(&env, &specs, &config, 0).unwrap();
        let (r2, t2) = run_path(&env, &specs, &config, 0).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn trace_replays_exactly() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.5, 0.1);
        let config =
            SimConfig::new(3_000, 1, unfavorable(), 5).with_trace(TraceLevel::Full);
        let (_, trace) = run_path(&env, &specs, &config, 0).unwrap();
        assert!(trace.unwrap().replays_exactly(&specs));
    }

    #[test]
    fn unplayed_actions_untouched() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.3, 0.2);
        let config =
            SimConfig::new(2_000, 1, unfavorable(), 9).with_trace(TraceLevel::Full);
        let (_, trace) = run_path(&env, &specs, &config, 0).unwrap();
        let trace = trace.unwrap();
        let mut prev = trace.initial_q.clone();
        for record in &trace.records {
            for i in 0..2 {
                for a in 0..2 {
                    if a != record.actions[i] {
                        assert_eq!(record.q[i][a], prev[i][a], "t = {}", record.t);
                    }
                }
            }
            prev = record.q.clone();
        }
    }

    #[test]
    fn serial_and_parallel_batches_bit_equal() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.5, 0.1);
        let config = SimConfig::new(1_000, 16, unfavorable(), 123);
        let serial = run_batch_serial(&env, &specs, &config).unwrap();
        let parallel = run_batch(&env, &specs, &config).unwrap();
        assert_eq!(serial.paths, parallel.paths);
    }

    #[test]
    fn batch_of_one_equals_run_path() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.5, 0.1);
        let config = SimConfig::new(1_000, 1, unfavorable(), 42);
        let batch = run_batch(&env, &specs, &config).unwrap();
        let (single, _) = run_path(&env, &specs, &config, 0).unwrap();
        assert_eq!(batch.paths, vec![single]);
    }

    #[test]
    fn profile_counts_sum_to_horizon() {
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.5, 0.1);
        let config = SimConfig::new(5_000, 4, unfavorable(), 8);
        let batch = run_batch(&env, &specs, &config).unwrap();
        for path in &batch.paths {
            assert_eq!(path.profile_counts.iter().sum::<u64>(), 5_000);
        }
    }

    #[test]
    fn arity_mismatch_is_usage_error() {
        let env = pd_env(2.5, -0.5);
        let specs = vec![AgentSpec::two_action(0.5, 0.1, 0.95, 0.0)];
        let config = SimConfig::new(100, 1, unfavorable(), 1);
        assert!(matches!(run_path(&env, &specs, &config, 0), Err(QbError::Usage(_))));
    }

    #[test]
    fn exit_detector_hand_series() {
        // Deltas (-,-,+,+): exit to cooperation at period 2 (0-indexed).
        let mut det = ExitDetector::new(ExitDirection::ToCooperation);
        for (t, d) in [-1.0, -1.0, 1.0, 1.0, 1.0].iter().enumerate() {
            det.observe(t as u64, &[*d, *d]);
        }
        assert_eq!(det.exit_time(), Some(2));
    }

    #[test]
    fn exit_detector_requires_all_agents() {
        let mut det = ExitDetector::new(ExitDirection::ToCooperation);
        let d1 = [1.0, 1.0, 1.0, 1.0];
        let d2 = [-1.0, 1.0, -1.0, 1.0];
        for t in 0..4 {
            det.observe(t as u64, &[d1[t], d2[t]]);
        }
        assert_eq!(det.exit_time(), None);
    }

    #[test]
    fn low_alpha_pd_has_no_exit_from_defection() {
        // alpha = 0.1 row of the exit table: exit probability ~ 0.
        let env = pd_env(2.5, -0.5);
        let specs = pd_specs(0.1, 0.1);
        let config = SimConfig::new(10_000, 30, unfavorable(), 314);
        let batch = run_batch(&env, &specs, &config).unwrap();
        let exits = batch
            .paths
            .iter()
            .filter(|p| p.exit_to_cooperation.is_some())
            .count();
        assert!(exits <= 1, "exits = {exits}/30");
    }
}
