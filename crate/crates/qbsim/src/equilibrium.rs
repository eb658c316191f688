//! Empirical bias equilibria: sweep a grid of policy biases, build gain
//! matrices from Monte-Carlo payoffs, anonymize seats, and detect pure Nash
//! bias profiles.

use serde::{Deserialize, Serialize};

use crate::agent::AgentSpec;
use crate::engine::{run_batch, SimConfig};
use crate::env::Environment;
use crate::error::QbError;
use crate::metrics;

/// Finite grid of biases b = kappa * increment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasGrid {
    pub increment: f64,
    pub kappa_min: i32,
    pub kappa_max: i32,
}

impl BiasGrid {
    pub fn new(increment: f64, kappa_min: i32, kappa_max: i32) -> Result<Self, QbError> {
        if increment <= 0.0 {
            return Err(QbError::InvalidParameter(format!(
                "grid increment must be positive, got {increment}"
            )));
        }
        if kappa_min > kappa_max {
            return Err(QbError::InvalidParameter(format!(
                "empty kappa range {kappa_min}..={kappa_max}"
            )));
        }
        Ok(Self { increment, kappa_min, kappa_max })
    }

    pub fn kappas(&self) -> Vec<i32> {
        (self.kappa_min..=self.kappa_max).collect()
    }

    pub fn len(&self) -> usize {
        (self.kappa_max - self.kappa_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn bias(&self, kappa: i32) -> f64 {
        kappa as f64 * self.increment
    }
}

/// Sweep provenance carried alongside every matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepMeta {
    pub num_paths: usize,
    pub horizon: u64,
    pub master_seed: u64,
}

/// Raw per-seat payoffs over ordered bias profiles: `seat1[i][j]` is player
/// 1's pooled welfare at (kappa_i, kappa_j), `seat2[i][j]` player 2's.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: BiasGrid,
    pub kappas: Vec<i32>,
    pub seat1: Vec<Vec<f64>>,
    pub seat2: Vec<Vec<f64>>,
    /// Standard error of the seat-averaged cell welfare across paths.
    pub std_errors: Vec<Vec<f64>>,
    /// Pooled frequency of the joint profile (0,0) (CC for the PD, the
    /// lowest-price profile for the duopoly) per cell.
    pub profile00_freq: Vec<Vec<f64>>,
    pub meta: SweepMeta,
}

/// Anonymized gain matrix: `values[i][j]` is the payoff of a bias
/// `kappa_i` player against a bias `kappa_j` opponent, averaged over seats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainMatrix {
    pub kappas: Vec<i32>,
    pub values: Vec<Vec<f64>>,
    pub std_errors: Vec<Vec<f64>>,
    pub meta: SweepMeta,
}

impl GainMatrix {
    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }

    /// Default noise tolerance for Nash detection: twice the mean cell
    /// standard error.
    pub fn default_tolerance(&self) -> f64 {
        let n = (self.len() * self.len()) as f64;
        let mean_se: f64 = self.std_errors.iter().flatten().sum::<f64>() / n;
        2.0 * mean_se
    }
}

/// How cells of a sweep draw their randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedPolicy {
    /// Each cell gets its own seed stream derived from (master seed,
    /// kappa1, kappa2, path index); cells are statistically independent.
    IndependentCells,
    /// Every cell reuses the same path seeds, so cross-cell comparisons
    /// share their exploration noise (common random numbers).
    CommonRandomNumbers,
}

/// Runs the full ordered-profile sweep with independent cell seeds.
pub fn sweep_bias_grid(
    env: &Environment,
    base_specs: &[AgentSpec],
    grid: &BiasGrid,
    config: &SimConfig,
) -> Result<SweepResult, QbError> {
    sweep_bias_grid_with(env, base_specs, grid, config, SeedPolicy::IndependentCells)
}

/// Runs the full ordered-profile sweep under the given seed policy.
pub fn sweep_bias_grid_with(
    env: &Environment,
    base_specs: &[AgentSpec],
    grid: &BiasGrid,
    config: &SimConfig,
    seed_policy: SeedPolicy,
) -> Result<SweepResult, QbError> {
    if env.num_agents() != 2 || base_specs.len() != 2 {
        return Err(QbError::Usage("bias sweeps need a 2-agent environment".into()));
    }
    let kappas = grid.kappas();
    let n = kappas.len();
    let mut seat1 = vec![vec![0.0; n]; n];
    let mut seat2 = vec![vec![0.0; n]; n];
    let mut std_errors = vec![vec![0.0; n]; n];
    let mut profile00 = vec![vec![0.0; n]; n];

    for (i, &k1) in kappas.iter().enumerate() {
        for (j, &k2) in kappas.iter().enumerate() {
            let mut specs = base_specs.to_vec();
            specs[0].bias = grid.bias(k1);
            specs[1].bias = grid.bias(k2);
            let cell_config = match seed_policy {
                SeedPolicy::IndependentCells => config
                    .clone()
                    .with_seed_context(vec![k1 as i64 as u64, k2 as i64 as u64]),
                SeedPolicy::CommonRandomNumbers => config.clone(),
            };
            let batch = run_batch(env, &specs, &cell_config)?;
            let welfare = metrics::pooled_mean_welfare(&batch.paths)?;
            seat1[i][j] = welfare[0];
            seat2[i][j] = welfare[1];
            std_errors[i][j] = metrics::pooled_welfare_std_error(&batch.paths);
            profile00[i][j] = metrics::profile_frequencies(&batch.paths)?[0];
        }
    }

    Ok(SweepResult {
        grid: *grid,
        kappas,
        seat1,
        seat2,
        std_errors,
        profile00_freq: profile00,
        meta: SweepMeta {
            num_paths: config.num_paths,
            horizon: config.horizon,
            master_seed: config.master_seed,
        },
    })
}

/// Seat-averaged payoffs: the anonymized payoff of the bias-kappa player
/// against a bias-kappa' opponent averages their seat-1 payoff at
/// (kappa, kappa') with their seat-2 payoff at (kappa', kappa).
pub fn anonymize_seats(
    seat1: &[Vec<f64>],
    seat2: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, QbError> {
    let n = seat1.len();
    if seat2.len() != n || seat1.iter().chain(seat2).any(|row| row.len() != n) {
        return Err(QbError::Usage("seat matrices must be square with equal dims".into()));
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| (seat1[i][j] + seat2[j][i]) / 2.0).collect())
        .collect())
}

impl SweepResult {
    pub fn anonymize(&self) -> Result<GainMatrix, QbError> {
        let values = anonymize_seats(&self.seat1, &self.seat2)?;
        let n = self.kappas.len();
        // SE of the average of two (independent-cell) seat estimates.
        let std_errors = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = self.std_errors[i][j];
                        let b = self.std_errors[j][i];
                        (a * a + b * b).sqrt() / 2.0
                    })
                    .collect()
            })
            .collect();
        Ok(GainMatrix {
            kappas: self.kappas.clone(),
            values,
            std_errors,
            meta: self.meta.clone(),
        })
    }
}

/// Pure Nash profiles of the symmetric game given by an anonymized matrix:
/// (kappa1, kappa2) passes iff neither player can gain more than `tolerance`
/// by deviating within the grid.
pub fn pure_nash(values: &[Vec<f64>], tolerance: f64) -> Vec<(usize, usize)> {
    let n = values.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let best_vs_j = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(values[k][j]));
            let best_vs_i = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(values[k][i]));
            if values[i][j] >= best_vs_j - tolerance && values[j][i] >= best_vs_i - tolerance {
                out.push((i, j));
            }
        }
    }
    out
}

/// Pure Nash profiles when the row matrix gives the row player's payoff and
/// the column player's payoff is its transpose (two-seat symmetric game,
/// e.g. a static profit table).
pub fn pure_nash_two_seat(row_payoffs: &[Vec<f64>], tolerance: f64) -> Vec<(usize, usize)> {
    let n = row_payoffs.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let row_best = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(row_payoffs[k][j]));
            let col_best = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(row_payoffs[k][i]));
            if row_payoffs[i][j] >= row_best - tolerance
                && row_payoffs[j][i] >= col_best - tolerance
            {
                out.push((i, j));
            }
        }
    }
    out
}

/// Per-player maximal payoff gains from a unilateral deviation at the given
/// profile of the anonymized matrix. Both are >= 0; at a pure Nash profile
/// both are within the detection tolerance.
pub fn best_response_pressure(values: &[Vec<f64>], at: (usize, usize)) -> (f64, f64) {
    let n = values.len();
    let (i, j) = at;
    let best_vs_j = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(values[k][j]));
    let best_vs_i = (0..n).fold(f64::NEG_INFINITY, |m, k| m.max(values[k][i]));
    (
        (best_vs_j - values[i][j]).max(0.0),
        (best_vs_i - values[j][i]).max(0.0),
    )
}

/// Maps matrix index pairs back to kappa pairs.
pub fn to_kappa_profiles(kappas: &[i32], profiles: &[(usize, usize)]) -> Vec<(i32, i32)> {
    profiles.iter().map(|&(i, j)| (kappas[i], kappas[j])).collect()
}
