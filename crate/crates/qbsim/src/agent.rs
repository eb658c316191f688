//! The learning kernel: Q-tables, the asynchronous update rule, and the
//! biased epsilon-greedy policy shared by every environment.

use serde::{Deserialize, Serialize};

use crate::error::QbError;
use crate::rng::RngStream;

/// Per-agent vector of Q-values, one entry per action, in stage-game payoff
/// units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QTable {
    values: Vec<f64>,
}

impl QTable {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Asynchronous Q-update of the played action only.
    ///
    /// `values[action] <- (1-alpha)*values[action]
    ///                    + alpha*((1-delta)*reward + delta*max values)`
    ///
    /// where the max is taken over the pre-update table. All other entries
    /// are untouched.
    #[inline]
    pub fn update(&mut self, action: usize, reward: f64, alpha: f64, delta: f64) {
        assert!(action < self.values.len(), "action index out of range");
        let target = (1.0 - delta) * reward + delta * self.max_value();
        self.values[action] = (1.0 - alpha) * self.values[action] + alpha * target;
    }
}

/// Learning parameters and policy bias for one agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSpec {
    /// Adjustment speed, in (0, 1].
    pub alpha: f64,
    /// Experimentation probability, in [0, 1].
    pub epsilon: f64,
    /// Discount factor, in [0, 1).
    pub delta: f64,
    /// Scalar policy bias, in payoff units. Zero reproduces naive Q-learning.
    pub bias: f64,
    /// Per-action distortion weights. The policy maximizes
    /// `Q(a) + bias * distortion[a]`.
    pub distortion: Vec<f64>,
}

impl AgentSpec {
    /// Naive spec for a two-action game, with the cooperative action at
    /// index 0 carrying the distortion weight.
    pub fn two_action(alpha: f64, epsilon: f64, delta: f64, bias: f64) -> Self {
        Self {
            alpha,
            epsilon,
            delta,
            bias,
            distortion: vec![1.0, 0.0],
        }
    }

    pub fn validate(&self, num_actions: usize) -> Result<(), QbError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(QbError::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(QbError::InvalidParameter(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(QbError::InvalidParameter(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        if self.distortion.len() != num_actions {
            return Err(QbError::InvalidParameter(format!(
                "distortion has {} entries for {} actions",
                self.distortion.len(),
                num_actions
            )));
        }
        Ok(())
    }

    /// Biased criterion per action: `score[a] = Q(a) + bias * distortion[a]`.
    pub fn biased_scores(&self, q: &QTable) -> Vec<f64> {
        q.values()
            .iter()
            .zip(&self.distortion)
            .map(|(&v, &g)| v + self.bias * g)
            .collect()
    }

    /// Greedy action under the biased criterion, ties broken in favor of the
    /// lowest index.
    #[inline]
    pub fn greedy_action(&self, q: &QTable) -> usize {
        let mut best = 0;
        let mut best_score = q.values()[0] + self.bias * self.distortion[0];
        for a in 1..q.len() {
            let score = q.values()[a] + self.bias * self.distortion[a];
            if score > best_score {
                best = a;
                best_score = score;
            }
        }
        best
    }

    /// Epsilon-greedy selection: with probability epsilon a uniform draw over
    /// all actions (including the greedy one), otherwise the biased greedy
    /// action.
    #[inline]
    pub fn select_action(&self, q: &QTable, rng: &mut RngStream) -> usize {
        if rng.uniform() < self.epsilon {
            rng.index(q.len())
        } else {
            self.greedy_action(q)
        }
    }
}
