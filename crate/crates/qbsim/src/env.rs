//! The three payoff/monitoring environments: a two-state decision automaton,
//! the repeated prisoner's dilemma (deterministic or stochastic payoff
//! channel), and a logit-demand duopoly on a fixed price grid.
//!
//! Action conventions: index 0 is the cooperative action (cooperate / the
//! automaton-friendly action / the lowest price), matching the lowest-index
//! tie rule of the policy.

use serde::{Deserialize, Serialize};

use crate::error::QbError;
use crate::rng::RngStream;

/// Single-agent environment driven by a hidden two-state automaton whose
/// transitions depend on the agent's action.
///
/// The agent observes rewards only; the state never leaks through the
/// interface.
#[derive(Debug, Clone)]
pub struct DecisionAutomatonEnv {
    /// switch[action][state] = probability of leaving `state` when `action`
    /// is played. Default: a stochastic TIT-for-TAT.
    switch: [[f64; 2]; 2],
    /// payoff[action][state].
    payoff: [[f64; 2]; 2],
    /// Current state: 0 is the favorable state, 1 the unfavorable one.
    state: usize,
}

impl DecisionAutomatonEnv {
    /// Default transition structure with payoff parameters `y` (mismatch
    /// payoff of the cooperative action) and `x` (temptation payoff).
    pub fn new(y: f64, x: f64, initial_state: usize) -> Self {
        assert!(initial_state < 2);
        Self {
            switch: [[0.01, 0.05], [0.05, 0.0]],
            payoff: [[2.0, y], [x, 1.0]],
            state: initial_state,
        }
    }

    pub fn with_transitions(mut self, switch: [[f64; 2]; 2]) -> Self {
        assert!(switch.iter().flatten().all(|p| (0.0..=1.0).contains(p)));
        self.switch = switch;
        self
    }

    /// Reward for the played action, then a hidden state transition.
    pub fn step(&mut self, action: usize, rng: &mut RngStream) -> f64 {
        let reward = self.payoff[action][self.state];
        if rng.uniform() < self.switch[action][self.state] {
            self.state = 1 - self.state;
        }
        reward
    }
}

/// Prisoner's dilemma stage payoffs: (C,C) -> 2, (C,D) -> y, (D,C) -> x,
/// (D,D) -> 1, with x > 2 and y < 1 in the cases of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdGame {
    pub x: f64,
    pub y: f64,
}

impl PdGame {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Deterministic payoffs for the joint action (0 = cooperate).
    pub fn payoffs(&self, a1: usize, a2: usize) -> (f64, f64) {
        match (a1, a2) {
            (0, 0) => (2.0, 2.0),
            (0, 1) => (self.y, self.x),
            (1, 0) => (self.x, self.y),
            (1, 1) => (1.0, 1.0),
            _ => panic!("PD actions must be 0 or 1"),
        }
    }
}

/// Whether the two players' binary payoff draws share one uniform per period
/// or use independent uniforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShockMode {
    Correlated,
    Independent,
}

/// Binary-outcome payoff channel: each player receives `V` with probability
/// `p_k` (k = number of cooperators), minus the cost `L` if they cooperated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StochasticChannel {
    pub v: f64,
    pub cost: f64,
    /// Good-outcome probability indexed by the number of cooperators.
    pub p: [f64; 3],
    pub mode: ShockMode,
}

impl StochasticChannel {
    pub fn new(v: f64, cost: f64, p: [f64; 3], mode: ShockMode) -> Result<Self, QbError> {
        if !(p[0] <= p[1] && p[1] <= p[2]) || p[0] < 0.0 || p[2] > 1.0 {
            return Err(QbError::InvalidParameter(format!(
                "probabilities must satisfy 0 <= p0 <= p1 <= p2 <= 1, got {p:?}"
            )));
        }
        if v <= 0.0 {
            return Err(QbError::InvalidParameter(format!("V must be positive, got {v}")));
        }
        Ok(Self { v, cost, p, mode })
    }

    /// Channel whose expected-payoff matrix equals the (x, y) PD matrix:
    /// p0 = 1/V, p1 = x/V, p2 = (2+x-y)/V, L = x-y. Requires V > 2+x-y.
    pub fn from_xy(x: f64, y: f64, v: f64, mode: ShockMode) -> Result<Self, QbError> {
        if v <= 2.0 + x - y {
            return Err(QbError::InvalidParameter(format!(
                "V must exceed 2+x-y = {}, got {v}",
                2.0 + x - y
            )));
        }
        Self::new(v, x - y, [1.0 / v, x / v, (2.0 + x - y) / v], mode)
    }

    /// Realized gains for one period.
    pub fn step(&self, a1: usize, a2: usize, rng: &mut RngStream) -> (f64, f64) {
        let k = (a1 == 0) as usize + (a2 == 0) as usize;
        let p = self.p[k];
        let (z1, z2) = match self.mode {
            ShockMode::Correlated => {
                let z = if rng.uniform() < p { self.v } else { 0.0 };
                (z, z)
            }
            ShockMode::Independent => {
                let z1 = if rng.uniform() < p { self.v } else { 0.0 };
                let z2 = if rng.uniform() < p { self.v } else { 0.0 };
                (z1, z2)
            }
        };
        (
            z1 - if a1 == 0 { self.cost } else { 0.0 },
            z2 - if a2 == 0 { self.cost } else { 0.0 },
        )
    }

    /// Expected payoff of player 1 under the joint action.
    pub fn expected_payoff(&self, a1: usize, a2: usize) -> f64 {
        let k = (a1 == 0) as usize + (a2 == 0) as usize;
        self.p[k] * self.v - if a1 == 0 { self.cost } else { 0.0 }
    }
}

/// Logit-demand duopoly with a finite price grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogitDuopolyEnv {
    /// Vertical differentiation index, common to both firms.
    pub d: f64,
    /// Horizontal differentiation index.
    pub mu: f64,
    /// Marginal cost.
    pub c: f64,
    /// Output multiplier applied to the raw profit formula.
    pub scale: f64,
    pub prices: Vec<f64>,
    #[serde(skip)]
    profit_grid: Vec<f64>,
}

impl Default for LogitDuopolyEnv {
    fn default() -> Self {
        Self::new(2.0, 1.0 / 6.0, 1.0, 10.0, (0..7).map(|k| 1.4 + 0.1 * k as f64).collect())
    }
}

impl LogitDuopolyEnv {
    pub fn new(d: f64, mu: f64, c: f64, scale: f64, prices: Vec<f64>) -> Self {
        let mut env = Self { d, mu, c, scale, prices, profit_grid: Vec::new() };
        env.rebuild_grid();
        env
    }

    /// Recompute the cached profit lookup; needed after deserialization.
    pub fn rebuild_grid(&mut self) {
        let n = self.prices.len();
        self.profit_grid = (0..n * n)
            .map(|idx| self.profit(self.prices[idx / n], self.prices[idx % n]))
            .collect();
    }

    /// Profit of the firm pricing at `p_i` against `p_j`:
    /// `scale * (p_i - c) * exp((d-p_i)/mu) / (1 + exp((d-p_i)/mu) + exp((d-p_j)/mu))`.
    pub fn profit(&self, p_i: f64, p_j: f64) -> f64 {
        let own = ((self.d - p_i) / self.mu).exp();
        let other = ((self.d - p_j) / self.mu).exp();
        self.scale * (p_i - self.c) * own / (1.0 + own + other)
    }

    /// Profit lookup by grid indices.
    #[inline]
    pub fn profit_at(&self, k_i: usize, k_j: usize) -> f64 {
        self.profit_grid[k_i * self.prices.len() + k_j]
    }

    /// Per-price distortion for the biased policy: the symmetric-profile
    /// profit `profit(p^k, p^k)` at each grid point.
    pub fn distortion(&self) -> Vec<f64> {
        (0..self.prices.len()).map(|k| self.profit_at(k, k)).collect()
    }

    /// Full profit matrix, row player's profit per (row price, column price).
    pub fn profit_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.prices.len();
        (0..n)
            .map(|i| (0..n).map(|j| self.profit_at(i, j)).collect())
            .collect()
    }
}

/// One of the three environments, ready to run.
#[derive(Debug, Clone)]
pub enum Environment {
    Decision(DecisionAutomatonEnv),
    PrisonersDilemma {
        game: PdGame,
        channel: Option<StochasticChannel>,
    },
    Duopoly(LogitDuopolyEnv),
}

impl Environment {
    pub fn num_agents(&self) -> usize {
        match self {
            Environment::Decision(_) => 1,
            Environment::PrisonersDilemma { .. } => 2,
            Environment::Duopoly(_) => 2,
        }
    }

    pub fn num_actions(&self) -> usize {
        match self {
            Environment::Decision(_) => 2,
            Environment::PrisonersDilemma { .. } => 2,
            Environment::Duopoly(env) => env.prices.len(),
        }
    }

    /// One period: joint actions in, per-agent rewards out.
    #[inline]
    pub fn step(&mut self, actions: &[usize], rng: &mut RngStream, rewards: &mut [f64]) {
        match self {
            Environment::Decision(env) => {
                rewards[0] = env.step(actions[0], rng);
            }
            Environment::PrisonersDilemma { game, channel } => {
                let (r1, r2) = match channel {
                    Some(ch) => ch.step(actions[0], actions[1], rng),
                    None => game.payoffs(actions[0], actions[1]),
                };
                rewards[0] = r1;
                rewards[1] = r2;
            }
            Environment::Duopoly(env) => {
                rewards[0] = env.profit_at(actions[0], actions[1]);
                rewards[1] = env.profit_at(actions[1], actions[0]);
            }
        }
    }
}
