//! Multi-restart quasi-Newton search for section voltages.
//!
//! Voltages are parameterized as `v = V_max tanh(u)` and the infidelity is
//! minimized over unconstrained `u` with BFGS and a backtracking line search.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::time::Instant;

use crate::device::{hamiltonian_from_voltages, DeviceModel, VoltageSettings};
use crate::error::{PwaError, Result};
use crate::linalg::{check_unitary, identity, matrix_serde, phase_integral, reduced_phase, CMatrix, HermitianEigen};

fn default_restarts() -> usize {
    48
}

fn default_max_iterations() -> usize {
    2000
}

fn default_tolerance() -> f64 {
    1e-12
}

fn default_patience() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTask {
    #[serde(with = "matrix_serde")]
    pub target: CMatrix,
    /// Number of voltage-controlled sections `K`.
    pub sections: usize,
    #[serde(default)]
    pub model: DeviceModel,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Stop once `|delta infidelity|` stays below this for `patience` iterations.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_patience")]
    pub patience: usize,
}

impl OptimizationTask {
    pub fn new(target: CMatrix, sections: usize, model: DeviceModel) -> Self {
        Self {
            target,
            sections,
            model,
            restarts: default_restarts(),
            seed: 0,
            max_iterations: default_max_iterations(),
            tolerance: default_tolerance(),
            patience: default_patience(),
        }
    }

    pub fn dim(&self) -> usize {
        self.target.nrows()
    }

    /// Parameters per section, `2d - 1`.
    pub fn section_params(&self) -> usize {
        2 * self.dim() - 1
    }

    pub fn validate(&self) -> Result<usize> {
        let d = check_unitary(&self.target, 1e-8)?;
        if self.sections == 0 {
            return Err(PwaError::Input("section count K must be at least 1".into()));
        }
        if self.restarts == 0 {
            return Err(PwaError::Input("restarts must be at least 1".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(PwaError::Input("tolerance must be >= 0".into()));
        }
        self.model.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub restart_id: usize,
    pub infidelity: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub voltages: Vec<VoltageSettings>,
    pub best_infidelity: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartOutcome>,
    pub wall_time_s: f64,
}

impl OptimizationResult {
    pub fn best_fidelity(&self) -> f64 {
        1.0 - self.best_infidelity
    }

    /// `restart_id,final_infidelity,iterations`, one row per restart.
    pub fn restart_csv(&self) -> String {
        let mut out = String::from("restart_id,final_infidelity,iterations\n");
        for r in &self.restarts {
            let _ = writeln!(out, "{},{:.16e},{}", r.restart_id, r.infidelity, r.iterations);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Per-section quantities reused by the gradient.
struct SectionEval {
    eig: HermitianEigen,
    unitary: CMatrix,
}

/// Infidelity of the voltage chip against the target, with exact gradient in
/// volts. `voltages` is the flat `[section_1 params, section_2 params, ...]`.
pub struct Objective<'a> {
    task: &'a OptimizationTask,
    d: usize,
    gap: Option<CMatrix>,
    target_adj: CMatrix,
}

impl<'a> Objective<'a> {
    pub fn new(task: &'a OptimizationTask) -> Result<Self> {
        let d = task.validate()?;
        let gap = if task.model.gap > 0.0 {
            Some(task.model.zero_voltage(d, task.model.gap)?.unitary())
        } else {
            None
        };
        Ok(Self {
            task,
            d,
            gap,
            target_adj: task.target.adjoint(),
        })
    }

    pub fn len(&self) -> usize {
        self.task.sections * self.task.section_params()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn settings(&self, voltages: &[f64]) -> Vec<VoltageSettings> {
        voltages
            .chunks(self.task.section_params())
            .map(|c| VoltageSettings::from_slice(self.d, c))
            .collect()
    }

    fn sections(&self, voltages: &[f64]) -> Result<Vec<SectionEval>> {
        if voltages.len() != self.len() {
            return Err(PwaError::DimensionMismatch { expected: self.len(), found: voltages.len() });
        }
        self.settings(voltages)
            .iter()
            .map(|v| {
                let h = hamiltonian_from_voltages(&self.task.model, v)?;
                let eig = HermitianEigen::new(&h.matrix())?;
                let unitary = eig.exp_minus_i(h.length);
                Ok(SectionEval { eig, unitary })
            })
            .collect()
    }

    /// Physical chain `[U_1, G, U_2, ..., G, U_K]` as (matrix, section index).
    fn chain<'s>(&'s self, secs: &'s [SectionEval]) -> Vec<(&'s CMatrix, Option<usize>)> {
        let mut out = Vec::with_capacity(2 * secs.len());
        for (k, s) in secs.iter().enumerate() {
            if k > 0 {
                if let Some(g) = &self.gap {
                    out.push((g, None));
                }
            }
            out.push((&s.unitary, Some(k)));
        }
        out
    }

    pub fn infidelity(&self, voltages: &[f64]) -> Result<f64> {
        let secs = self.sections(voltages)?;
        let u = self
            .chain(&secs)
            .iter()
            .fold(identity(self.d), |acc, (m, _)| *m * acc);
        let g = (&self.target_adj * u).trace();
        Ok(1.0 - g.norm_sqr() / (self.d * self.d) as f64)
    }

    /// `(1 - F, d(1 - F)/dv)`.
    pub fn value_and_gradient(&self, voltages: &[f64]) -> Result<(f64, Vec<f64>)> {
        let d = self.d;
        let secs = self.sections(voltages)?;
        let chain = self.chain(&secs);
        let n = chain.len();
        // prefix[i] = chain[i-1] ... chain[0]; suffix[i] = chain[n-1] ... chain[i+1]
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(identity(d));
        for (m, _) in &chain {
            let next = *m * prefix.last().unwrap();
            prefix.push(next);
        }
        let mut suffix = vec![identity(d); n];
        for i in (0..n.saturating_sub(1)).rev() {
            suffix[i] = &suffix[i + 1] * chain[i + 1].0;
        }
        let u = &prefix[n];
        let g = (&self.target_adj * u).trace();
        let dd = (d * d) as f64;
        let value = 1.0 - g.norm_sqr() / dd;

        let p = self.task.section_params();
        let length = self.task.model.length;
        let beta_slope = self.task.model.beta_slope();
        let coupling_slope = self.task.model.dc;
        let mut grad = vec![0.0; self.len()];
        for (i, (_, k)) in chain.iter().enumerate() {
            let Some(k) = *k else { continue };
            let s = &secs[k];
            let v = &s.eig.vectors;
            let lam = &s.eig.values;
            // w = tr(M dU) with M = P U_T^dag S
            let m = &prefix[i] * &self.target_adj * &suffix[i];
            let nmat = v.adjoint() * m * v;
            let shift = reduced_phase(s.eig.shift, length);
            // kmat[a][b] = N_ba * Phi_ab, Phi_ab = divided difference of e^{-i lambda L}
            let mut kmat = CMatrix::zeros(d, d);
            for a in 0..d {
                for b in 0..d {
                    let eb = Complex64::from_polar(1.0, -(reduced_phase(lam[b], length) + shift));
                    let phi = eb * Complex64::new(0.0, -length) * phase_integral(-(lam[a] - lam[b]) * length);
                    kmat[(a, b)] = nmat[(b, a)] * phi;
                }
            }
            // contraction with rows of V: t[m1][m2] = sum_ab K_ab conj(V_m1 a) V_m2 b
            let t = v.conjugate() * &kmat * v.transpose();
            let base = k * p;
            for mode in 0..d {
                let w = t[(mode, mode)] * beta_slope;
                grad[base + mode] = -2.0 * (g.conj() * w).re / dd;
            }
            for mode in 0..d - 1 {
                let w = (t[(mode, mode + 1)] + t[(mode + 1, mode)]) * coupling_slope;
                grad[base + d + mode] = -2.0 * (g.conj() * w).re / dd;
            }
        }
        Ok((value, grad))
    }
}

/// Result of one local minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Accepted objective values, starting with the initial point.
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BfgsOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub patience: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// BFGS with Armijo backtracking on a smooth objective returning `(f, grad)`.
pub fn minimize_bfgs<F>(mut f: F, x0: Vec<f64>, opts: BfgsOptions) -> Result<BfgsOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut gx) = f(&x)?;
    let mut history = vec![fx];
    let mut h = vec![vec![0.0; n]; n];
    let reset = |h: &mut Vec<Vec<f64>>| {
        for (i, row) in h.iter_mut().enumerate() {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[i] = 1.0;
        }
    };
    reset(&mut h);
    let mut quiet = 0;
    let mut iterations = 0;
    let mut converged = false;
    let mut fresh = true;
    while iterations < opts.max_iterations {
        iterations += 1;
        let mut p: Vec<f64> = h.iter().map(|row| -dot(row, &gx)).collect();
        let mut slope = dot(&p, &gx);
        if !(slope < 0.0) {
            reset(&mut h);
            p = gx.iter().map(|g| -g).collect();
            slope = -dot(&gx, &gx);
            fresh = true;
        }
        if slope == 0.0 {
            converged = true;
            break;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + step * b).collect();
            let (fnew, gnew) = f(&xn)?;
            if fnew.is_finite() && fnew <= fx + 1e-4 * step * slope {
                accepted = Some((xn, fnew, gnew));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if fresh {
                // steepest descent cannot decrease f further
                converged = true;
                break;
            }
            reset(&mut h);
            fresh = true;
            continue;
        };
        fresh = false;
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 && sy.is_finite() {
            let hy: Vec<f64> = h.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            let coef = (1.0 + rho * yhy) * rho;
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let delta = (fx - fnew).abs();
        x = xn;
        fx = fnew;
        gx = gnew;
        history.push(fx);
        if delta < opts.tolerance {
            quiet += 1;
            if quiet >= opts.patience {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(BfgsOutcome { x, value: fx, iterations, converged, history })
}

/// Independent random stream for restart `r` of a run seeded with `seed`.
pub fn restart_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(r as u64);
    rng
}

fn run_restart(obj: &Objective, task: &OptimizationTask, r: usize) -> Result<(RestartOutcome, Vec<f64>)> {
    let vmax = task.model.v_max;
    let mut rng = restart_rng(task.seed, r);
    let u0: Vec<f64> = (0..obj.len())
        .map(|_| {
            let v: f64 = rng.random_range(-1.0..=1.0);
            v.clamp(-1.0 + 1e-9, 1.0 - 1e-9).atanh()
        })
        .collect();
    let to_v = |u: &[f64]| -> Vec<f64> { u.iter().map(|x| vmax * x.tanh()).collect() };
    let out = minimize_bfgs(
        |u| {
            let (f, gv) = obj.value_and_gradient(&to_v(u))?;
            let gu = gv
                .iter()
                .zip(u)
                .map(|(g, x)| {
                    let t = x.tanh();
                    g * vmax * (1.0 - t * t)
                })
                .collect();
            Ok((f, gu))
        },
        u0,
        BfgsOptions {
            max_iterations: task.max_iterations,
            tolerance: task.tolerance,
            patience: task.patience.max(1),
        },
    )?;
    let v = to_v(&out.x);
    let outcome = RestartOutcome {
        restart_id: r,
        // round-off can push 1 - F a few ulps below zero at exact optima
        infidelity: out.value.clamp(0.0, 1.0),
        iterations: out.iterations,
        converged: out.converged,
    };
    Ok((outcome, v))
}

/// Run every restart (concurrently on the current rayon pool) and keep the best.
pub fn optimize(task: &OptimizationTask) -> Result<OptimizationResult> {
    let start = Instant::now();
    let obj = Objective::new(task)?;
    let runs: Vec<(RestartOutcome, Vec<f64>)> = (0..task.restarts)
        .into_par_iter()
        .map(|r| run_restart(&obj, task, r))
        .collect::<Result<_>>()?;
    let (best_idx, _) = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.infidelity.total_cmp(&b.1 .0.infidelity))
        .expect("at least one restart");
    let best = &runs[best_idx];
    Ok(OptimizationResult {
        voltages: obj.settings(&best.1),
        best_infidelity: best.0.infidelity,
        best_restart: best_idx,
        restarts: runs.iter().map(|r| r.0.clone()).collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Convenience wrapper: infidelity and gradient for a list of section settings.
pub fn infidelity_and_gradient(voltages: &[VoltageSettings], task: &OptimizationTask) -> Result<(f64, Vec<f64>)> {
    let flat: Vec<f64> = voltages.iter().flat_map(VoltageSettings::to_vec).collect();
    Objective::new(task)?.value_and_gradient(&flat)
}
