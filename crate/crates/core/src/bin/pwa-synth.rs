use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

use pwa_synth::bench::{load_spec, run_bench, BenchSpec, Experiment};
use pwa_synth::device::{basis_state, propagate, voltage_layout, DeviceModel, VoltagePlan, VoltageSettings};
use pwa_synth::gates::GateSpec;
use pwa_synth::linalg::{matrix_from_json, CMatrix};
use pwa_synth::optimize::{optimize, OptimizationTask, RestartOutcome};
use pwa_synth::planner::{compile, ChipPlan, TrotterConfig, SCHEMA_VERSION};
use pwa_synth::su2::ParameterBounds;
use pwa_synth::{PwaError, Result};

#[derive(Parser)]
#[command(name = "pwa-synth", version, about = "Compile, optimize and simulate programmable waveguide array chips")]
struct Cli {
    /// Worker threads (overridden by PWA_SYNTH_JOBS).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic decomposition of a unitary into positive tridiagonal sections.
    Compile(CompileArgs),
    /// Optimize section voltages against a target unitary.
    Optimize(OptimizeArgs),
    /// Propagate a basis state through a plan or voltage file.
    Simulate(SimulateArgs),
    /// Run a benchmark sweep and write CSV tables.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Target {
    /// dft, clock, shift, identity, hadamard, paulix or haar:<seed>.
    #[arg(long, conflicts_with = "matrix")]
    gate: Option<String>,
    /// JSON file with rows of [re, im] pairs.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    d: usize,
}

impl Target {
    fn load(&self) -> Result<(String, CMatrix)> {
        match (&self.gate, &self.matrix) {
            (Some(g), _) => Ok((g.clone(), g.parse::<GateSpec>()?.matrix(self.d)?)),
            (None, Some(p)) => Ok((p.display().to_string(), matrix_from_json(&std::fs::read_to_string(p)?)?)),
            (None, None) => Err(PwaError::Input("give --gate or --matrix".into())),
        }
    }
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    target: Target,
    /// Section length (m).
    #[arg(long = "L", default_value_t = 6e-3)]
    length: f64,
    /// Trotter number.
    #[arg(long = "N", default_value_t = 8)]
    steps: usize,
    #[arg(long, default_value_t = 1)]
    j1: u32,
    #[arg(long, default_value_t = 1)]
    j2: u32,
    /// Diophantine precision; defaults to the largest admissible value.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Length of one recurrence unit (m).
    #[arg(long, default_value_t = 1.0)]
    recurrence_unit: f64,
    /// Insert compensated zero-voltage gaps of this length around recurrence sections (m).
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    prune_identity: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    target: Target,
    /// Number of sections.
    #[arg(long = "K", default_value_t = 1)]
    sections: usize,
    #[arg(long = "L", default_value_t = 6e-3)]
    length: f64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    max_iterations: usize,
    /// Voltage JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-restart CSV output.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Chip plan from `compile` or voltage file from `optimize`.
    #[arg(long)]
    plan: PathBuf,
    /// 1-based input waveguide.
    #[arg(long, default_value_t = 1)]
    input: usize,
    #[arg(long)]
    dz: f64,
    /// Trace CSV output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON bench spec; the flags below are ignored when given.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    experiment: Option<String>,
    #[arg(long, value_delimiter = ',', default_value = "dft,clock,shift")]
    gates: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    dims: Vec<usize>,
    #[arg(long = "K", value_delimiter = ',', default_value = "1,3,5")]
    sections: Vec<usize>,
    #[arg(long = "L", value_delimiter = ',', default_value = "6e-3")]
    lengths: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    #[arg(long = "N", value_delimiter = ',', default_value = "4,8,16,32")]
    steps: Vec<usize>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iterations: usize,
    #[arg(long)]
    dz: Option<f64>,
    #[arg(long, default_value = "bench_out")]
    out_dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct OptimizeOutput {
    schema_version: u32,
    target: String,
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    model: DeviceModel,
    voltages: Vec<VoltageSettings>,
    best_infidelity: f64,
    best_fidelity: f64,
    best_restart: usize,
    restarts: Vec<RestartOutcome>,
}

fn run_compile(a: &CompileArgs) -> Result<serde_json::Value> {
    let (name, u) = a.target.load()?;
    let d = u.nrows();
    let mut cfg = TrotterConfig::new(d, a.length, a.steps)?;
    cfg.j1 = a.j1;
    cfg.j2 = a.j2;
    cfg.recurrence_unit = a.recurrence_unit;
    cfg.prune_identity = a.prune_identity;
    cfg.epsilon = a
        .epsilon
        .unwrap_or_else(|| TrotterConfig::epsilon_budget(d, a.length, a.steps, a.j1, a.recurrence_unit));
    if let Some(g) = a.gap {
        let mut gap = DeviceModel::with_length(a.length).gap_config();
        gap.delta_l = g;
        cfg.gap = Some(gap);
    }
    let plan = compile(&u, a.length, &cfg, &ParameterBounds::default())?;
    if let Some(p) = &a.out {
        plan.save(p)?;
    }
    let m = &plan.metadata;
    Ok(json!({
        "target": name,
        "d": m.d,
        "N": m.n,
        "K": m.k,
        "physical_sections": m.physical_sections,
        "measured_error": m.measured_error,
        "epsilon_certificate": m.epsilon_certificate,
        "q": m.q,
        "plan": a.out.as_ref().map(|p| p.display().to_string()),
    }))
}

fn run_optimize(a: &OptimizeArgs) -> Result<serde_json::Value> {
    let (name, u) = a.target.load()?;
    let model = DeviceModel::with_length(a.length);
    let mut task = OptimizationTask::new(u, a.sections, model);
    task.restarts = a.restarts;
    task.seed = a.seed;
    task.max_iterations = a.max_iterations;
    let res = optimize(&task)?;
    if let Some(p) = &a.csv {
        std::fs::write(p, res.restart_csv())?;
    }
    let out = OptimizeOutput {
        schema_version: SCHEMA_VERSION,
        target: name,
        d: task.dim(),
        k: a.sections,
        model,
        voltages: res.voltages.clone(),
        best_infidelity: res.best_infidelity,
        best_fidelity: res.best_fidelity(),
        best_restart: res.best_restart,
        restarts: res.restarts.clone(),
    };
    if let Some(p) = &a.out {
        std::fs::write(p, serde_json::to_string_pretty(&out)?)?;
    }
    Ok(json!({
        "target": out.target,
        "d": out.d,
        "K": out.k,
        "best_infidelity": out.best_infidelity,
        "best_fidelity": out.best_fidelity,
        "wall_time_s": res.wall_time_s,
    }))
}

fn run_simulate(a: &SimulateArgs) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(&a.plan)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let layout = if value.get("sections").is_some() {
        ChipPlan::from_json(&text)?.hamiltonians()?
    } else {
        let vp: VoltagePlan = serde_json::from_value(value)?;
        voltage_layout(&vp.model, &vp.voltages)?
    };
    let d = layout
        .first()
        .map(|h| h.dim())
        .ok_or_else(|| PwaError::Input("plan has no sections".into()))?;
    let trace = propagate(&basis_state(d, a.input)?, &layout, a.dz)?;
    let csv = trace.to_csv();
    match &a.out {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    let last = trace.z.len() - 1;
    Ok(json!({
        "points": trace.z.len(),
        "length_m": trace.z[last],
        "final_probabilities": trace.probabilities(last),
        "max_norm_deviation": trace.max_norm_deviation(),
    }))
}

fn run_bench_cmd(a: &BenchArgs) -> Result<serde_json::Value> {
    let spec = match &a.spec {
        Some(p) => load_spec(p)?,
        None => BenchSpec {
            experiment: a
                .experiment
                .as_deref()
                .ok_or_else(|| PwaError::Input("give --spec or --experiment".into()))?
                .parse::<Experiment>()?,
            gates: a.gates.clone(),
            dims: a.dims.clone(),
            sections: a.sections.clone(),
            lengths: a.lengths.clone(),
            seeds: a.seeds.clone(),
            steps: a.steps.clone(),
            restarts: a.restarts,
            max_iterations: a.max_iterations,
            dz: a.dz,
            output_dir: a.out_dir.clone(),
        },
    };
    let files = run_bench(&spec)?;
    Ok(json!({ "written": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>() }))
}

fn jobs(cli: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("PWA_SYNTH_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| PwaError::Input(format!("PWA_SYNTH_JOBS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(cli),
    }
}

fn exit_code(e: &PwaError) -> u8 {
    match e {
        PwaError::Input(_)
        | PwaError::NotUnitary { .. }
        | PwaError::NotHermitian { .. }
        | PwaError::DimensionMismatch { .. } => 2,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<serde_json::Value> {
    if let Some(n) = jobs(cli.jobs)? {
        if n == 0 {
            return Err(PwaError::Input("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| PwaError::Internal(e.to_string()))?;
    }
    match &cli.command {
        Command::Compile(a) => run_compile(a),
        Command::Optimize(a) => run_optimize(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Bench(a) => run_bench_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(summary) => {
            let text = serde_json::to_string_pretty(&summary).unwrap_or_default();
            // simulate without --out prints the CSV on stdout
            if matches!(&cli.command, Command::Simulate(a) if a.out.is_none()) {
                eprintln!("{text}");
            } else {
                println!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
