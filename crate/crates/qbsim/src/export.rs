//! Artifact writers and the end-to-end runner: expand a config into a plan,
//! execute it, and write CSV/JSONL/JSON outputs plus a manifest and the
//! expanded config for provenance.

use std::fs::{self, File};
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::agent::AgentSpec;
use crate::config::{RunConfig, RunPlan};
use crate::engine::{run_batch, ExitDirection, PathResult, SimConfig, Trace, TraceLevel};
use crate::env::Environment;
use crate::equilibrium::{
    best_response_pressure, pure_nash, sweep_bias_grid, to_kappa_profiles, GainMatrix,
};
use crate::error::QbError;
use crate::metrics::{
    conditional_frequency_curve_from_traces, exit_fraction, median_duration,
    pooled_mean_welfare, pooled_mean_welfare_scalar, pooled_welfare_std_error,
    profile_frequencies, FrequencyBin, HistogramSpec, MedianDuration,
};

/// Decomposes a row-major joint-action index into per-agent actions.
fn decode_profile(index: usize, num_agents: usize, num_actions: usize) -> Vec<usize> {
    let mut actions = vec![0; num_agents];
    let mut rest = index;
    for slot in actions.iter_mut().rev() {
        *slot = rest % num_actions;
        rest /= num_actions;
    }
    actions
}

fn profile_label(index: usize, num_agents: usize, num_actions: usize) -> String {
    let actions = decode_profile(index, num_agents, num_actions);
    let parts: Vec<String> = actions.iter().map(|a| a.to_string()).collect();
    format!("profile_{}", parts.join("_"))
}

/// Per-path results, one row per path.
pub fn write_paths_csv(
    path: &Path,
    paths: &[PathResult],
    num_agents: usize,
    num_actions: usize,
) -> Result<(), QbError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["path".to_string(), "seed".to_string()];
    for i in 0..num_agents {
        header.push(format!("mean_reward_{i}"));
    }
    for i in 0..num_agents {
        header.push(format!("full_mean_reward_{i}"));
    }
    header.push("exit_to_cooperation".into());
    header.push("exit_to_defection".into());
    let num_profiles = num_actions.pow(num_agents as u32);
    for p in 0..num_profiles {
        header.push(profile_label(p, num_agents, num_actions));
    }
    writer.write_record(&header)?;
    for result in paths {
        let mut row = vec![result.path_index.to_string(), result.master_seed.to_string()];
        for v in &result.mean_reward {
            row.push(format!("{v}"));
        }
        for v in &result.full_mean_reward {
            row.push(format!("{v}"));
        }
        row.push(result.exit_to_cooperation.map(|t| t.to_string()).unwrap_or_default());
        row.push(result.exit_to_defection.map(|t| t.to_string()).unwrap_or_default());
        for c in &result.profile_counts {
            row.push(c.to_string());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// One JSON object per retained period; records are kept when their index in
/// the trace is a multiple of `stride`.
pub fn write_trace_jsonl(path: &Path, trace: &Trace, stride: u64) -> Result<(), QbError> {
    let stride = stride.max(1);
    let mut out = BufWriter::new(File::create(path)?);
    for (i, record) in trace.records.iter().enumerate() {
        if !(i as u64).is_multiple_of(stride) {
            continue;
        }
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// A labelled matrix with integer row/column keys, written wide.
pub fn write_matrix_csv(
    path: &Path,
    corner: &str,
    kappas: &[i32],
    values: &[Vec<f64>],
) -> Result<(), QbError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec![corner.to_string()];
    header.extend(kappas.iter().map(|k| k.to_string()));
    writer.write_record(&header)?;
    for (kappa, row) in kappas.iter().zip(values) {
        let mut record = vec![kappa.to_string()];
        record.extend(row.iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Welfare-style grid keyed by alpha rows and epsilon columns.
pub fn write_param_grid_csv(
    path: &Path,
    alphas: &[f64],
    epsilons: &[f64],
    values: &[Vec<f64>],
) -> Result<(), QbError> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header = vec!["alpha".to_string()];
    header.extend(epsilons.iter().map(|e| format!("{e}")));
    writer.write_record(&header)?;
    for (alpha, row) in alphas.iter().zip(values) {
        let mut record = vec![format!("{alpha}")];
        record.extend(row.iter().map(|v| format!("{v}")));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_fk_csv(path: &Path, bins: &[FrequencyBin]) -> Result<(), QbError> {
    let mut writer = csv::Writer::from_path(path)?;
    writer.write_record(["k", "delta_lo", "count", "frequency"])?;
    for bin in bins {
        writer.write_record([
            bin.k.to_string(),
            format!("{}", bin.delta_lo),
            bin.count.to_string(),
            format!("{}", bin.frequency),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), QbError> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn median_json(m: &MedianDuration) -> serde_json::Value {
    match m {
        MedianDuration::Finite(v) => json!(v),
        MedianDuration::Censored => json!("censored"),
    }
}

/// Everything a finished run reports about itself.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub plan: String,
    pub seed: u64,
    pub horizon: u64,
    pub paths: usize,
    pub threads: Option<usize>,
    pub elapsed_secs: f64,
    pub version: String,
    pub artifacts: Vec<String>,
}

struct ArtifactSink {
    dir: PathBuf,
    names: Vec<String>,
}

impl ArtifactSink {
    fn new(dir: &Path) -> Result<Self, QbError> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), names: Vec::new() })
    }

    fn file(&mut self, name: &str) -> PathBuf {
        self.names.push(name.to_string());
        self.dir.join(name)
    }
}

fn summary_json(paths: &[PathResult], env: &Environment) -> Result<serde_json::Value, QbError> {
    let coop_times: Vec<Option<u64>> = paths.iter().map(|p| p.exit_to_cooperation).collect();
    let defect_times: Vec<Option<u64>> = paths.iter().map(|p| p.exit_to_defection).collect();
    let num_profiles = env.num_actions().pow(env.num_agents() as u32);
    let freqs = profile_frequencies(paths)?;
    let labelled: serde_json::Map<String, serde_json::Value> = (0..num_profiles)
        .map(|p| (profile_label(p, env.num_agents(), env.num_actions()), json!(freqs[p])))
        .collect();
    Ok(json!({
        "welfare": pooled_mean_welfare_scalar(paths)?,
        "welfare_std_error": pooled_welfare_std_error(paths),
        "per_agent_welfare": pooled_mean_welfare(paths)?,
        "profile_frequencies": labelled,
        "exit_to_cooperation_fraction": exit_fraction(paths, ExitDirection::ToCooperation),
        "exit_to_defection_fraction": exit_fraction(paths, ExitDirection::ToDefection),
        "median_exit_to_cooperation": median_json(&median_duration(&coop_times)),
        "median_exit_to_defection": median_json(&median_duration(&defect_times)),
        "num_paths": paths.len(),
    }))
}

fn run_single(
    env: &Environment,
    specs: &[AgentSpec],
    sim: &SimConfig,
    config: &RunConfig,
    sink: &mut ArtifactSink,
) -> Result<(), QbError> {
    let batch = run_batch(env, specs, sim)?;
    write_paths_csv(&sink.file("paths.csv"), &batch.paths, env.num_agents(), env.num_actions())?;
    write_json(&sink.file("summary.json"), &summary_json(&batch.paths, env)?)?;
    if sim.trace_level == TraceLevel::Full {
        for (i, trace) in batch.traces.iter().enumerate() {
            write_trace_jsonl(&sink.file(&format!("trace_{i}.jsonl")), trace, config.output.stride)?;
        }
        if config.output.fk_curve {
            let spec = HistogramSpec {
                bin_width: config.output.fk_bin_width,
                min_count: config.output.fk_min_count,
            };
            let bins = conditional_frequency_curve_from_traces(&batch.traces, &spec)?;
            write_fk_csv(&sink.file("fk_curve.csv"), &bins)?;
        }
    }
    Ok(())
}

fn run_param_grid(
    env: &Environment,
    specs: &[AgentSpec],
    alphas: &[f64],
    epsilons: &[f64],
    sim: &SimConfig,
    sink: &mut ArtifactSink,
) -> Result<(), QbError> {
    let shape = (alphas.len(), epsilons.len());
    let mut welfare = vec![vec![0.0; shape.1]; shape.0];
    let mut std_errors = vec![vec![0.0; shape.1]; shape.0];
    let mut exit_coop = vec![vec![0.0; shape.1]; shape.0];
    let mut exit_defect = vec![vec![0.0; shape.1]; shape.0];
    let mut cells = csv::Writer::from_path(sink.file("cells.csv"))?;
    cells.write_record([
        "alpha",
        "epsilon",
        "welfare",
        "welfare_std_error",
        "exit_to_cooperation_fraction",
        "exit_to_defection_fraction",
    ])?;
    for (ai, &alpha) in alphas.iter().enumerate() {
        for (ei, &epsilon) in epsilons.iter().enumerate() {
            let cell_specs: Vec<AgentSpec> = specs
                .iter()
                .map(|s| AgentSpec { alpha, epsilon, ..s.clone() })
                .collect();
            let cell_sim = sim.clone().with_seed_context(vec![ai as u64, ei as u64]);
            let batch = run_batch(env, &cell_specs, &cell_sim)?;
            welfare[ai][ei] = pooled_mean_welfare_scalar(&batch.paths)?;
            std_errors[ai][ei] = pooled_welfare_std_error(&batch.paths);
            exit_coop[ai][ei] = exit_fraction(&batch.paths, ExitDirection::ToCooperation);
            exit_defect[ai][ei] = exit_fraction(&batch.paths, ExitDirection::ToDefection);
            cells.write_record([
                format!("{alpha}"),
                format!("{epsilon}"),
                format!("{}", welfare[ai][ei]),
                format!("{}", std_errors[ai][ei]),
                format!("{}", exit_coop[ai][ei]),
                format!("{}", exit_defect[ai][ei]),
            ])?;
        }
    }
    cells.flush()?;
    write_param_grid_csv(&sink.file("welfare.csv"), alphas, epsilons, &welfare)?;
    write_param_grid_csv(&sink.file("welfare_se.csv"), alphas, epsilons, &std_errors)?;
    write_param_grid_csv(&sink.file("exit_coop.csv"), alphas, epsilons, &exit_coop)?;
    write_param_grid_csv(&sink.file("exit_defect.csv"), alphas, epsilons, &exit_defect)?;
    Ok(())
}

fn nash_report(matrix: &GainMatrix) -> serde_json::Value {
    let tolerance = matrix.default_tolerance();
    let equilibria = pure_nash(&matrix.values, tolerance);
    let n = matrix.kappas.len();
    let mut pressure1 = vec![vec![0.0; n]; n];
    let mut pressure2 = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let (p1, p2) = best_response_pressure(&matrix.values, (i, j));
            pressure1[i][j] = p1;
            pressure2[i][j] = p2;
        }
    }
    json!({
        "tolerance": tolerance,
        "kappas": matrix.kappas,
        "equilibria": to_kappa_profiles(&matrix.kappas, &equilibria),
        "pressure_seat1": pressure1,
        "pressure_seat2": pressure2,
    })
}

fn run_bias_sweep(
    env: &Environment,
    specs: &[AgentSpec],
    grid: &crate::equilibrium::BiasGrid,
    sim: &SimConfig,
    sink: &mut ArtifactSink,
) -> Result<(), QbError> {
    let sweep = sweep_bias_grid(env, specs, grid, sim)?;
    let matrix = sweep.anonymize()?;
    write_matrix_csv(&sink.file("gain_matrix.csv"), "kappa", &matrix.kappas, &matrix.values)?;
    write_matrix_csv(&sink.file("gain_se.csv"), "kappa", &matrix.kappas, &matrix.std_errors)?;
    write_matrix_csv(&sink.file("seat1.csv"), "kappa", &sweep.kappas, &sweep.seat1)?;
    write_matrix_csv(&sink.file("seat2.csv"), "kappa", &sweep.kappas, &sweep.seat2)?;
    write_matrix_csv(&sink.file("profile00.csv"), "kappa", &sweep.kappas, &sweep.profile00_freq)?;
    write_json(&sink.file("sweep.json"), &sweep)?;
    write_json(&sink.file("nash.json"), &nash_report(&matrix))?;
    Ok(())
}

/// Runs a config end to end, writing all artifacts into `out`.
pub fn run_to_dir(
    config: &RunConfig,
    out: &Path,
    threads: Option<usize>,
) -> Result<Manifest, QbError> {
    let started = Instant::now();
    let plan = config.build()?;
    let mut sink = ArtifactSink::new(out)?;

    let (plan_name, seed, horizon, paths) = match &plan {
        RunPlan::Single { env, specs, sim } => {
            run_single(env, specs, sim, config, &mut sink)?;
            ("single", sim.master_seed, sim.horizon, sim.num_paths)
        }
        RunPlan::ParamGrid { env, specs, alphas, epsilons, sim } => {
            run_param_grid(env, specs, alphas, epsilons, sim, &mut sink)?;
            ("param-grid", sim.master_seed, sim.horizon, sim.num_paths)
        }
        RunPlan::BiasSweep { env, specs, grid, sim } => {
            run_bias_sweep(env, specs, grid, sim, &mut sink)?;
            ("bias-sweep", sim.master_seed, sim.horizon, sim.num_paths)
        }
    };

    fs::write(sink.file("config.toml"), config.to_toml())?;
    let mut manifest = Manifest {
        plan: plan_name.to_string(),
        seed,
        horizon,
        paths,
        threads,
        elapsed_secs: started.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        artifacts: Vec::new(),
    };
    let manifest_path = sink.file("manifest.json");
    manifest.artifacts = sink.names.clone();
    write_json(&manifest_path, &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn profile_labels_decode_row_major() {
        assert_eq!(profile_label(0, 2, 2), "profile_0_0");
        assert_eq!(profile_label(1, 2, 2), "profile_0_1");
        assert_eq!(profile_label(2, 2, 2), "profile_1_0");
        assert_eq!(profile_label(3, 2, 2), "profile_1_1");
        assert_eq!(profile_label(48, 2, 7), "profile_6_6");
        assert_eq!(profile_label(9, 2, 7), "profile_1_2");
    }

    #[test]
    fn single_run_writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("trace-pd").unwrap();
        config.simulation.horizon = 500;
        let manifest = run_to_dir(&config, dir.path(), None).unwrap();
        for name in ["paths.csv", "summary.json", "trace_0.jsonl", "config.toml", "manifest.json"] {
            assert!(dir.path().join(name).exists(), "missing {name}");
            assert!(manifest.artifacts.contains(&name.to_string()), "unlisted {name}");
        }
        let jsonl = std::fs::read_to_string(dir.path().join("trace_0.jsonl")).unwrap();
        assert_eq!(jsonl.lines().count(), 500);
        // Every line is a standalone JSON object.
        for line in jsonl.lines().take(3) {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("t").is_some() && v.get("q").is_some());
        }
    }

    #[test]
    fn stride_thins_the_trace() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("trace-pd").unwrap();
        config.simulation.horizon = 500;
        config.output.stride = 10;
        run_to_dir(&config, dir.path(), None).unwrap();
        let jsonl = std::fs::read_to_string(dir.path().join("trace_0.jsonl")).unwrap();
        assert_eq!(jsonl.lines().count(), 50);
    }

    #[test]
    fn identical_configs_produce_identical_csv() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut config = preset("pd-bias").unwrap();
        config.simulation.horizon = 200;
        config.simulation.paths = 3;
        config.agents.bias_grid =
            Some(crate::config::BiasGridConfig { increment: 0.02, kappa_min: 0, kappa_max: 1 });
        run_to_dir(&config, dir_a.path(), None).unwrap();
        run_to_dir(&config, dir_b.path(), None).unwrap();
        for name in ["gain_matrix.csv", "seat1.csv", "seat2.csv", "profile00.csv"] {
            let a = std::fs::read(dir_a.path().join(name)).unwrap();
            let b = std::fs::read(dir_b.path().join(name)).unwrap();
            assert_eq!(a, b, "{name} differs between identical runs");
        }
    }

    #[test]
    fn expanded_config_reparses_to_same_plan_kind() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = preset("pd-welfare").unwrap();
        config.simulation.horizon = 100;
        config.simulation.paths = 2;
        config.agents.alpha_list = Some(vec![0.1, 0.5]);
        config.agents.epsilon_list = Some(vec![0.1]);
        run_to_dir(&config, dir.path(), None).unwrap();
        let text = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
        let reparsed = RunConfig::from_toml(&text).unwrap();
        assert!(matches!(reparsed.build().unwrap(), RunPlan::ParamGrid { .. }));
        assert!(dir.path().join("welfare.csv").exists());
        assert!(dir.path().join("cells.csv").exists());
    }
}
