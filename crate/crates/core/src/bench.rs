//! Sweep experiments producing plot-ready CSV tables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::device::{basis_state, propagate, voltage_layout, DeviceModel};
use crate::error::{PwaError, Result};
use crate::gates::GateSpec;
use crate::optimize::{optimize, OptimizationTask};
use crate::planner::{compile, TrotterConfig};
use crate::su2::ParameterBounds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    GateSweep,
    HaarSweep,
    ErrorScaling,
    Propagation,
}

impl std::str::FromStr for Experiment {
    type Err = PwaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gate-sweep" => Ok(Self::GateSweep),
            "haar-sweep" => Ok(Self::HaarSweep),
            "error-scaling" => Ok(Self::ErrorScaling),
            "propagation" => Ok(Self::Propagation),
            _ => Err(PwaError::Input(format!("unknown experiment '{s}'"))),
        }
    }
}

fn default_gates() -> Vec<String> {
    vec!["dft".into(), "clock".into(), "shift".into()]
}

fn default_restarts() -> usize {
    16
}

fn default_max_iterations() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSpec {
    pub experiment: Experiment,
    #[serde(default = "default_gates")]
    pub gates: Vec<String>,
    pub dims: Vec<usize>,
    /// Section counts `K` (optimizer experiments).
    #[serde(default)]
    pub sections: Vec<usize>,
    /// Section lengths (m).
    pub lengths: Vec<f64>,
    /// Optimizer seeds; Haar seeds for `haar-sweep`.
    pub seeds: Vec<u64>,
    /// Trotter numbers (error-scaling).
    #[serde(default)]
    pub steps: Vec<usize>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Sampling step for propagation traces (m); defaults to `L / 50`.
    #[serde(default)]
    pub dz: Option<f64>,
    pub output_dir: PathBuf,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        let empty = |name: &str| PwaError::Input(format!("bench sweep '{name}' is empty"));
        if self.dims.is_empty() {
            return Err(empty("dims"));
        }
        if self.lengths.is_empty() {
            return Err(empty("lengths"));
        }
        if self.lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(PwaError::Input("all lengths must be positive".into()));
        }
        if self.seeds.is_empty() {
            return Err(empty("seeds"));
        }
        match self.experiment {
            Experiment::ErrorScaling => {
                if self.steps.is_empty() {
                    return Err(empty("steps"));
                }
                if self.gates.is_empty() {
                    return Err(empty("gates"));
                }
            }
            Experiment::HaarSweep => {
                if self.sections.is_empty() {
                    return Err(empty("sections"));
                }
            }
            Experiment::GateSweep | Experiment::Propagation => {
                if self.sections.is_empty() {
                    return Err(empty("sections"));
                }
                if self.gates.is_empty() {
                    return Err(empty("gates"));
                }
            }
        }
        if self.sections.contains(&0) || self.steps.contains(&0) || self.restarts == 0 {
            return Err(PwaError::Input("section counts, steps and restarts must be positive".into()));
        }
        for g in &self.gates {
            g.parse::<GateSpec>()?;
        }
        Ok(())
    }
}

/// Best infidelity of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gate: String,
    pub d: usize,
    pub k: usize,
    pub length_m: f64,
    pub seed: u64,
    pub best_infidelity: Option<f64>,
    pub status: String,
}

/// Compile error at one Trotter number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub gate: String,
    pub d: usize,
    pub n: usize,
    pub length_m: f64,
    pub error: Option<f64>,
    pub q: Option<i64>,
    pub epsilon_certificate: Option<f64>,
    pub slope: Option<f64>,
    pub status: String,
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.16e}")).unwrap_or_default()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("gate,d,K,L_m,seed,best_infidelity,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{},{},{}",
            r.gate,
            r.d,
            r.k,
            r.length_m,
            r.seed,
            opt(r.best_infidelity),
            r.status
        );
    }
    out
}

pub fn scaling_csv(rows: &[ScalingRow]) -> String {
    let mut out = String::from("gate,d,N,L_m,error,q,epsilon_certificate,slope,status\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.16e},{},{},{},{},{}",
            r.gate,
            r.d,
            r.n,
            r.length_m,
            opt(r.error),
            r.q.map(|q| q.to_string()).unwrap_or_default(),
            opt(r.epsilon_certificate),
            opt(r.slope),
            r.status
        );
    }
    out
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

fn optimize_row(spec: &BenchSpec, gate: &str, d: usize, k: usize, length: f64, seed: u64) -> SweepRow {
    let run = || -> Result<f64> {
        let target = gate.parse::<GateSpec>()?.matrix(d)?;
        let mut task = OptimizationTask::new(target, k, DeviceModel::with_length(length));
        task.restarts = spec.restarts;
        task.seed = seed;
        task.max_iterations = spec.max_iterations;
        Ok(optimize(&task)?.best_infidelity)
    };
    let res = run();
    SweepRow {
        gate: gate.to_string(),
        d,
        k,
        length_m: length,
        seed,
        status: match &res {
            Ok(_) => "ok".into(),
            Err(e) => e.kind().into(),
        },
        best_infidelity: res.ok(),
    }
}

/// Rows of a gate or Haar sweep, ordered by (gate, d, K, L, seed).
pub fn run_sweep(spec: &BenchSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut keys = Vec::new();
    match spec.experiment {
        Experiment::GateSweep => {
            for g in &spec.gates {
                for &d in &spec.dims {
                    for &k in &spec.sections {
                        for &l in &spec.lengths {
                            for &s in &spec.seeds {
                                keys.push((g.clone(), d, k, l, s));
                            }
                        }
                    }
                }
            }
        }
        Experiment::HaarSweep => {
            for &d in &spec.dims {
                for &k in &spec.sections {
                    for &l in &spec.lengths {
                        for &s in &spec.seeds {
                            keys.push((format!("haar:{s}"), d, k, l, s));
                        }
                    }
                }
            }
        }
        _ => return Err(PwaError::Input("run_sweep needs gate-sweep or haar-sweep".into())),
    }
    Ok(keys
        .par_iter()
        .map(|(g, d, k, l, s)| optimize_row(spec, g, *d, *k, *l, *s))
        .collect())
}

/// Compile every gate at every Trotter number and fit the log-log slope per
/// (gate, d, L).
pub fn run_error_scaling(spec: &BenchSpec) -> Result<Vec<ScalingRow>> {
    spec.validate()?;
    let mut keys = Vec::new();
    for g in &spec.gates {
        for &d in &spec.dims {
            for &l in &spec.lengths {
                for &n in &spec.steps {
                    keys.push((g.clone(), d, l, n));
                }
            }
        }
    }
    let mut rows: Vec<ScalingRow> = keys
        .par_iter()
        .map(|(g, d, l, n)| {
            let run = || -> Result<(f64, Option<i64>, Option<f64>)> {
                let target = g.parse::<GateSpec>()?.matrix(*d)?;
                let cfg = TrotterConfig::new(*d, *l, *n)?;
                let plan = compile(&target, *l, &cfg, &ParameterBounds::default())?;
                let m = plan.metadata;
                Ok((m.measured_error.unwrap_or(f64::NAN), m.q, m.epsilon_certificate))
            };
            let res = run();
            let (error, q, eps, status) = match res {
                Ok((e, q, eps)) => (Some(e), q, eps, "ok".to_string()),
                Err(e) => (None, None, None, e.kind().to_string()),
            };
            ScalingRow {
                gate: g.clone(),
                d: *d,
                n: *n,
                length_m: *l,
                error,
                q,
                epsilon_certificate: eps,
                slope: None,
                status,
            }
        })
        .collect();
    let per_group = spec.steps.len();
    for chunk in rows.chunks_mut(per_group) {
        let xs: Vec<f64> = chunk.iter().filter(|r| r.error.is_some()).map(|r| r.n as f64).collect();
        let ys: Vec<f64> = chunk.iter().filter_map(|r| r.error).collect();
        let slope = loglog_slope(&xs, &ys);
        chunk.iter_mut().for_each(|r| r.slope = slope);
    }
    Ok(rows)
}

/// One CSV trace per (gate, d, K, input mode) for the best optimized voltages.
pub fn run_propagation(spec: &BenchSpec) -> Result<Vec<(String, String)>> {
    spec.validate()?;
    let mut out = Vec::new();
    let seed = spec.seeds[0];
    for g in &spec.gates {
        for &d in &spec.dims {
            for &k in &spec.sections {
                for &l in &spec.lengths {
                    let model = DeviceModel::with_length(l);
                    let mut task = OptimizationTask::new(g.parse::<GateSpec>()?.matrix(d)?, k, model);
                    task.restarts = spec.restarts;
                    task.seed = seed;
                    task.max_iterations = spec.max_iterations;
                    let res = optimize(&task)?;
                    let layout = voltage_layout(&model, &res.voltages)?;
                    let dz = spec.dz.unwrap_or(l / 50.0).min(shortest(&layout));
                    for m in 1..=d {
                        let trace = propagate(&basis_state(d, m)?, &layout, dz)?;
                        let name = format!("propagation_{}_d{d}_K{k}_L{l:e}_in{m}.csv", g.replace(':', "-"));
                        out.push((name, trace.to_csv()));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn shortest(layout: &[crate::hamiltonian::TridiagonalHamiltonian]) -> f64 {
    layout.iter().map(|h| h.length).fold(f64::INFINITY, f64::min)
}

/// Run an experiment and write its CSV files; returns the written paths.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    std::fs::create_dir_all(&spec.output_dir)?;
    let write = |name: &str, body: &str| -> Result<PathBuf> {
        let p = spec.output_dir.join(name);
        std::fs::write(&p, body)?;
        Ok(p)
    };
    match spec.experiment {
        Experiment::GateSweep => Ok(vec![write("gate_sweep.csv", &sweep_csv(&run_sweep(spec)?))?]),
        Experiment::HaarSweep => Ok(vec![write("haar_sweep.csv", &sweep_csv(&run_sweep(spec)?))?]),
        Experiment::ErrorScaling => Ok(vec![write("error_scaling.csv", &scaling_csv(&run_error_scaling(spec)?))?]),
        Experiment::Propagation => run_propagation(spec)?
            .iter()
            .map(|(name, body)| write(name, body))
            .collect(),
    }
}

pub fn load_spec(path: &Path) -> Result<BenchSpec> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(experiment: Experiment) -> BenchSpec {
        BenchSpec {
            experiment,
            gates: vec!["dft".into()],
            dims: vec![2],
            sections: vec![1, 2],
            lengths: vec![6e-3],
            seeds: vec![1],
            steps: vec![4, 8],
            restarts: 2,
            max_iterations: 50,
            dz: None,
            output_dir: PathBuf::from("unused"),
        }
    }

    #[test]
    fn slope_and_median() {
        let xs = [4.0, 8.0, 16.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.0)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn validation() {
        let mut s = spec(Experiment::GateSweep);
        s.validate().unwrap();
        s.lengths = vec![-1.0];
        assert!(s.validate().is_err());
        let mut s = spec(Experiment::ErrorScaling);
        s.steps.clear();
        assert!(s.validate().is_err());
        let mut s = spec(Experiment::GateSweep);
        s.gates = vec!["nope".into()];
        assert!(s.validate().is_err());
        assert!("haar-sweep".parse::<Experiment>().is_ok());
    }

    #[test]
    fn sweep_rows_are_ordered_and_deterministic() {
        let s = spec(Experiment::GateSweep);
        let a = run_sweep(&s).unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!((a[0].k, a[1].k), (1, 2));
        assert_eq!(sweep_csv(&a), sweep_csv(&run_sweep(&s).unwrap()));
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let mut s = spec(Experiment::ErrorScaling);
        s.gates = vec!["dft".into()];
        s.dims = vec![3, 1];
        s.steps = vec![4];
        let rows = run_error_scaling(&s).unwrap();
        assert_eq!(rows[0].status, "ok");
        assert_ne!(rows[1].status, "ok");
        assert!(scaling_csv(&rows).lines().nth(2).unwrap().starts_with("dft,1,4,"));
    }
}
