//! Trotterized realization of adjacent-mode sections on a d-waveguide chip.
//!
//! Every embedded 2x2 section `e^{-i H L}` is written as
//! `(e^{-i A L/N} e^{+i B L/N})^N` with `A = B + H`, where `B` is a uniform
//! background. The backward step `e^{+i B L/N}` is replaced by the forward
//! recurrence `e^{-i B (q - L/N)}`, with `q` from a simultaneous Diophantine
//! approximation of the background eigenvalues.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{PwaError, Result};
use crate::hamiltonian::TridiagonalHamiltonian;
use crate::lattice::{certificate_error, simultaneous_diophantine, DiophantineResult};
use crate::linalg::{cascade, check_unitary, operator_norm, toeplitz_eigenvalues, CMatrix};
use crate::reck::{adjacent_expand, count_sections, two_level_decompose, ExpandOptions};
use crate::su2::{synthesize_su2, ParameterBounds, Su2Section};

pub const SCHEMA_VERSION: u32 = 1;

/// Zero-voltage gap regions placed before and after every recurrence section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapConfig {
    pub delta_l: f64,
    pub beta0: f64,
    pub coupling0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    pub steps: usize,
    pub j1: u32,
    pub j2: u32,
    pub epsilon: f64,
    /// Length (m) of one unit of the recurrence integer `q`.
    pub recurrence_unit: f64,
    pub gap: Option<GapConfig>,
    pub prune_identity: bool,
}

impl TrotterConfig {
    /// Largest admissible `epsilon`: `(L/u)^2 / (2 pi j1 d N^2)`.
    pub fn epsilon_budget(d: usize, length: f64, steps: usize, j1: u32, unit: f64) -> f64 {
        let l = length / unit;
        l * l / (2.0 * PI * j1 as f64 * d as f64 * (steps * steps) as f64)
    }

    /// Config with `epsilon` at the budget and `recurrence_unit = 1 m`.
    pub fn new(d: usize, length: f64, steps: usize) -> Result<Self> {
        let cfg = Self {
            steps,
            j1: 1,
            j2: 1,
            epsilon: Self::epsilon_budget(d, length, steps, 1, 1.0),
            recurrence_unit: 1.0,
            gap: None,
            prune_identity: false,
        };
        cfg.validate(d, length)?;
        Ok(cfg)
    }

    pub fn validate(&self, d: usize, length: f64) -> Result<()> {
        if self.steps == 0 {
            return Err(PwaError::Input("Trotter number N must be positive".into()));
        }
        if self.j1 == 0 || self.j2 == 0 {
            return Err(PwaError::Input("j1 and j2 must be positive integers".into()));
        }
        if !(self.recurrence_unit > 0.0) || !(length > 0.0) {
            return Err(PwaError::Input("lengths must be positive".into()));
        }
        let budget = Self::epsilon_budget(d, length, self.steps, self.j1, self.recurrence_unit);
        if !(self.epsilon > 0.0) || self.epsilon > budget {
            return Err(PwaError::Input(format!(
                "epsilon {:.3e} outside (0, {budget:.3e}]",
                self.epsilon
            )));
        }
        if let Some(g) = &self.gap {
            if !(g.delta_l >= 0.0) || !(g.beta0 > 0.0) || !(g.coupling0 > 0.0) {
                return Err(PwaError::Input("gap length must be >= 0 and H0 positive".into()));
            }
        }
        Ok(())
    }

    pub fn coupling_background(&self) -> f64 {
        2.0 * PI * self.j1 as f64 / self.recurrence_unit
    }
}

/// Background parameters shared by every Trotter pair of one compile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    pub dim: usize,
    pub certificate: DiophantineResult,
    pub beta_bg: f64,
    pub coupling_bg: f64,
    /// `q * recurrence_unit` (m).
    pub period: f64,
    /// `L~ = period - L/N` (m).
    pub length: f64,
}

impl Recurrence {
    /// Solve the Diophantine problem for dimension `d`; `q` is multiplied up
    /// while `L~` would not be positive.
    pub fn plan(d: usize, length: f64, cfg: &TrotterConfig) -> Result<Self> {
        cfg.validate(d, length)?;
        let lambdas = toeplitz_eigenvalues(d)?;
        let mut cert = simultaneous_diophantine(&lambdas, cfg.epsilon)?;
        let step = length / cfg.steps as f64;
        let base = cert.clone();
        let mut mult = 1i64;
        while (cert.q as f64) * cfg.recurrence_unit - step <= 0.0 {
            mult += 1;
            let q = base.q.checked_mul(mult).ok_or_else(|| PwaError::Plan("q overflow".into()))?;
            let p: Vec<i64> = base.p.iter().map(|p| p * mult).collect();
            let err = certificate_error(&lambdas, q, &p);
            if err > cfg.epsilon {
                return Err(PwaError::Plan(format!(
                    "recurrence length not positive and q = {q} loses the certificate ({err:.3e})"
                )));
            }
            let residuals = lambdas.iter().zip(&p).map(|(l, p)| l * q as f64 - *p as f64).collect();
            cert = DiophantineResult { q, p, residuals, epsilon: err };
        }
        let period = cert.q as f64 * cfg.recurrence_unit;
        Ok(Self {
            dim: d,
            beta_bg: 2.0 * PI * cfg.j2 as f64 / period,
            coupling_bg: cfg.coupling_background(),
            period,
            length: period - step,
            certificate: cert,
        })
    }

    pub fn background(&self, length: f64) -> Result<TridiagonalHamiltonian> {
        TridiagonalHamiltonian::uniform(self.dim, self.beta_bg, self.coupling_bg, length)
    }

    /// Bound on `|| e^{-i B L~} - e^{+i B L/N} ||` in operator norm.
    pub fn error_bound(&self, cfg: &TrotterConfig, length: f64) -> f64 {
        2.0 * PI * cfg.j1 as f64 * self.dim as f64 * self.certificate.epsilon * cfg.steps as f64
            / (length / cfg.recurrence_unit)
    }
}

/// One Trotter step: `A` of length `L/N` and the recurrence `B` of length `L~`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPair {
    pub a: TridiagonalHamiltonian,
    pub b: TridiagonalHamiltonian,
    /// 1-based mode of the block.
    pub mode: usize,
    /// `A - B` on the block, as represented in floating point.
    pub block_betas: [f64; 2],
    pub block_coupling: f64,
}

/// Background plus the section block at `mode`; `B` is the bare background.
pub fn plan_trotter_pair(
    section: &Su2Section,
    mode: usize,
    recurrence: &Recurrence,
    steps: usize,
) -> Result<TrotterPair> {
    let d = recurrence.dim;
    if mode < 1 || mode >= d {
        return Err(PwaError::Input(format!("mode {mode} outside 1..{d}")));
    }
    if steps == 0 {
        return Err(PwaError::Input("Trotter number N must be positive".into()));
    }
    let b = recurrence.background(recurrence.length)?;
    let (b1, b2) = section.betas();
    let mut betas = b.betas.clone();
    let mut couplings = b.couplings.clone();
    betas[mode - 1] += b1;
    betas[mode] += b2;
    couplings[mode - 1] += section.kappa;
    let a = TridiagonalHamiltonian::new(betas, couplings, section.length / steps as f64)?;
    Ok(TrotterPair {
        block_betas: [a.betas[mode - 1] - b.betas[mode - 1], a.betas[mode] - b.betas[mode]],
        block_coupling: a.couplings[mode - 1] - b.couplings[mode - 1],
        a,
        b,
        mode,
    })
}

/// A recurrence section split by electrode gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSpec {
    pub delta_l: f64,
    pub electrode_length: f64,
    pub beta0: f64,
    pub coupling0: f64,
    pub beta_prime: f64,
    pub coupling_prime: f64,
}

impl GapSpec {
    pub fn gap_hamiltonian(&self, d: usize) -> Result<TridiagonalHamiltonian> {
        TridiagonalHamiltonian::uniform(d, self.beta0, self.coupling0, self.delta_l)
    }

    pub fn electrode_hamiltonian(&self, d: usize) -> Result<TridiagonalHamiltonian> {
        TridiagonalHamiltonian::uniform(d, self.beta_prime, self.coupling_prime, self.electrode_length)
    }

    /// Gap, compensated electrode, gap; the zero-length gaps are dropped.
    pub fn sections(&self, d: usize) -> Result<Vec<TridiagonalHamiltonian>> {
        let core = self.electrode_hamiltonian(d)?;
        if self.delta_l == 0.0 {
            return Ok(vec![core]);
        }
        let g = self.gap_hamiltonian(d)?;
        Ok(vec![g.clone(), core, g])
    }
}

/// Rescale a uniform `B` so that `H0` gaps of `delta_l` on both sides leave
/// `e^{-i B L~}` unchanged.
pub fn gap_compensate(b: &TridiagonalHamiltonian, delta_l: f64, beta0: f64, coupling0: f64) -> Result<GapSpec> {
    if !b.is_uniform() || b.dim() < 2 {
        return Err(PwaError::Input("gap compensation needs a uniform section with d >= 2".into()));
    }
    if !(delta_l >= 0.0) {
        return Err(PwaError::Input(format!("gap length must be >= 0, got {delta_l}")));
    }
    let (beta, coupling, len) = (b.betas[0], b.couplings[0], b.length);
    let electrode = len - 2.0 * delta_l;
    let beta_prime = (beta * len - 2.0 * beta0 * delta_l) / electrode;
    let coupling_prime = (coupling * len - 2.0 * coupling0 * delta_l) / electrode;
    if !(electrode > 0.0 && beta_prime > 0.0 && coupling_prime > 0.0) {
        return Err(PwaError::GapInfeasible {
            beta: beta_prime,
            coupling: coupling_prime,
            length: electrode,
        });
    }
    Ok(GapSpec {
        delta_l,
        electrode_length: electrode,
        beta0,
        coupling0,
        beta_prime,
        coupling_prime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SectionKind {
    A,
    B,
    #[serde(rename = "gap")]
    Gap,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Index of the adjacent-mode operation in physical order.
    pub factor_index: Option<usize>,
    pub trotter_step: Option<usize>,
    /// Index within the SU(2) synthesis of that operation.
    #[serde(default)]
    pub su2_section: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlannedSection {
    pub kind: SectionKind,
    pub betas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub length_m: f64,
    pub provenance: Provenance,
}

impl PlannedSection {
    fn from_hamiltonian(kind: SectionKind, h: TridiagonalHamiltonian, provenance: Provenance) -> Self {
        Self {
            kind,
            betas: h.betas,
            couplings: h.couplings,
            length_m: h.length,
            provenance,
        }
    }

    pub fn hamiltonian(&self) -> Result<TridiagonalHamiltonian> {
        TridiagonalHamiltonian::new(self.betas.clone(), self.couplings.clone(), self.length_m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanMetadata {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    /// Nominal section count `4 K~ N` (`4` when d = 2).
    #[serde(rename = "K")]
    pub k: usize,
    pub adjacent_ops: usize,
    pub physical_sections: usize,
    pub global_phase: f64,
    pub measured_error: Option<f64>,
    pub epsilon_certificate: Option<f64>,
    pub q: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChipPlan {
    pub schema_version: u32,
    pub sections: Vec<PlannedSection>,
    pub metadata: PlanMetadata,
}

impl ChipPlan {
    pub fn dim(&self) -> usize {
        self.metadata.d
    }

    pub fn hamiltonians(&self) -> Result<Vec<TridiagonalHamiltonian>> {
        self.sections.iter().map(PlannedSection::hamiltonian).collect()
    }

    /// Cascade of every section, first section applied first.
    pub fn realize(&self) -> Result<CMatrix> {
        let d = self.dim();
        let us = self
            .hamiltonians()?
            .iter()
            .map(|h| {
                if h.dim() != d {
                    return Err(PwaError::DimensionMismatch { expected: d, found: h.dim() });
                }
                Ok(h.unitary())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(cascade(d, us.iter()))
    }

    pub fn total_length(&self) -> f64 {
        self.sections.iter().map(|s| s.length_m).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let plan: Self = serde_json::from_str(s)?;
        if plan.schema_version != SCHEMA_VERSION {
            return Err(PwaError::Input(format!(
                "unsupported plan schema_version {}",
                plan.schema_version
            )));
        }
        Ok(plan)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn push_recurrence(
    out: &mut Vec<PlannedSection>,
    b: TridiagonalHamiltonian,
    gap: Option<&GapConfig>,
    provenance: Provenance,
) -> Result<()> {
    match gap {
        Some(g) if g.delta_l > 0.0 => {
            let spec = gap_compensate(&b, g.delta_l, g.beta0, g.coupling0)?;
            let d = b.dim();
            out.push(PlannedSection::from_hamiltonian(SectionKind::Gap, spec.gap_hamiltonian(d)?, provenance));
            out.push(PlannedSection::from_hamiltonian(SectionKind::B, spec.electrode_hamiltonian(d)?, provenance));
            out.push(PlannedSection::from_hamiltonian(SectionKind::Gap, spec.gap_hamiltonian(d)?, provenance));
        }
        _ => out.push(PlannedSection::from_hamiltonian(SectionKind::B, b, provenance)),
    }
    Ok(())
}

/// Compile a unitary into a cascade of positive tridiagonal sections of
/// section length `length`.
///
/// For `d = 2` the result is the exact SU(2) synthesis. For larger `d` every
/// adjacent-mode operation is synthesized and Trotterized with `cfg.steps`
/// steps; a uniform recurrence-length section restores the global phase.
pub fn compile(target: &CMatrix, length: f64, cfg: &TrotterConfig, bounds: &ParameterBounds) -> Result<ChipPlan> {
    let d = check_unitary(target, crate::reck::INPUT_TOL)?;
    if d < 2 {
        return Err(PwaError::Input("compile needs d >= 2".into()));
    }
    if !(length > 0.0) {
        return Err(PwaError::Input(format!("section length must be positive, got {length}")));
    }
    let mut sections = Vec::new();
    let mut meta = PlanMetadata {
        d,
        n: cfg.steps,
        k: 4 * count_sections(d)? * cfg.steps,
        adjacent_ops: 1,
        physical_sections: 0,
        global_phase: 0.0,
        measured_error: None,
        epsilon_certificate: None,
        q: None,
    };
    if d == 2 {
        meta.k = 4;
        for (j, s) in synthesize_su2(target, length, bounds)?.iter().enumerate() {
            let provenance = Provenance {
                factor_index: Some(0),
                trotter_step: None,
                su2_section: Some(j),
            };
            sections.push(PlannedSection::from_hamiltonian(SectionKind::A, s.hamiltonian()?, provenance));
        }
    } else {
        cfg.validate(d, length)?;
        let dec = two_level_decompose(target)?;
        let ops = adjacent_expand(&dec, ExpandOptions { prune_identity: cfg.prune_identity })?;
        let rec = Recurrence::plan(d, length, cfg)?;
        meta.adjacent_ops = ops.len();
        meta.global_phase = dec.global_phase;
        meta.epsilon_certificate = Some(rec.certificate.epsilon);
        meta.q = Some(rec.certificate.q);

        // e^{-i beta_g T} = e^{i gamma} with T = q * unit
        let gamma = dec.global_phase.rem_euclid(2.0 * PI);
        if gamma.abs() > 1e-15 && (2.0 * PI - gamma).abs() > 1e-15 {
            let beta_g = (2.0 * PI - gamma) / rec.period;
            let h = TridiagonalHamiltonian::uniform(d, beta_g, rec.coupling_bg, rec.period)?;
            push_recurrence(&mut sections, h, cfg.gap.as_ref(), Provenance::default())?;
        }
        for (k, op) in ops.iter().enumerate() {
            for (j, s) in synthesize_su2(&op.matrix, length, bounds)?.iter().enumerate() {
                let pair = plan_trotter_pair(s, op.mode, &rec, cfg.steps)?;
                for step in 0..cfg.steps {
                    let provenance = Provenance {
                        factor_index: Some(k),
                        trotter_step: Some(step),
                        su2_section: Some(j),
                    };
                    push_recurrence(&mut sections, pair.b.clone(), cfg.gap.as_ref(), provenance)?;
                    sections.push(PlannedSection::from_hamiltonian(SectionKind::A, pair.a.clone(), provenance));
                }
            }
        }
    }
    meta.physical_sections = sections.len();
    let mut plan = ChipPlan {
        schema_version: SCHEMA_VERSION,
        sections,
        metadata: meta,
    };
    let realized = plan.realize()?;
    plan.metadata.measured_error = Some(operator_norm(&(target - &realized))?);
    Ok(plan)
}

/// `|| e^{-i B L~} - e^{+i B L/N} ||` for the recurrence background.
pub fn recurrence_error(rec: &Recurrence, length: f64, steps: usize) -> Result<f64> {
    let forward = rec.background(rec.length)?.unitary();
    let back = rec
        .background(length / steps as f64)?
        .eigen()
        .exp_minus_i(-length / steps as f64);
    operator_norm(&(forward - back))
}

/// The exact target of one Trotterized section: block unitary on `mode`.
pub fn section_target(section: &Su2Section, mode: usize, d: usize) -> CMatrix {
    crate::linalg::embed_two_mode(d, mode, &section.unitary())
}

/// `(e^{-i A L/N} e^{-i B L~})^N` for one pair.
pub fn trotter_product(pair: &TrotterPair, steps: usize) -> CMatrix {
    let ua = pair.a.unitary();
    let ub = pair.b.unitary();
    let step = &ua * &ub;
    let d = ua.nrows();
    let mut out = crate::linalg::identity(d);
    for _ in 0..steps {
        out = &step * out;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{clock, dft};
    use crate::linalg::{haar_random_unitary, identity};

    const L: f64 = 6e-3;

    #[test]
    fn config_enforces_budget() {
        let cfg = TrotterConfig::new(3, L, 8).unwrap();
        let budget = L * L / (2.0 * PI * 3.0 * 64.0);
        assert!((cfg.epsilon - budget).abs() < 1e-24);
        let bad = TrotterConfig { epsilon: 2.0 * budget, ..cfg.clone() };
        assert!(bad.validate(3, L).is_err());
        let zero = TrotterConfig { steps: 0, ..cfg };
        assert!(zero.validate(3, L).is_err());
    }

    #[test]
    fn recurrence_certificate_and_direction() {
        for d in 3..=5 {
            let cfg = TrotterConfig::new(d, L, 4).unwrap();
            let rec = Recurrence::plan(d, L, &cfg).unwrap();
            let lambdas = toeplitz_eigenvalues(d).unwrap();
            let cert = certificate_error(&lambdas, rec.certificate.q, &rec.certificate.p);
            assert!(cert <= cfg.epsilon);
            assert!(rec.length > 0.0);
            let err = recurrence_error(&rec, L, 4).unwrap();
            assert!(err <= rec.error_bound(&cfg, L) + 1e-9, "d={d} err={err}");
        }
    }

    #[test]
    fn pair_difference_is_the_block() {
        let u = haar_random_unitary(2, 5).unwrap();
        let cfg = TrotterConfig::new(4, L, 8).unwrap();
        let rec = Recurrence::plan(4, L, &cfg).unwrap();
        for s in synthesize_su2(&u, L, &ParameterBounds::default()).unwrap() {
            let pair = plan_trotter_pair(&s, 2, &rec, 8).unwrap();
            let diff = pair.a.difference(&pair.b).unwrap();
            assert_eq!(diff.betas, vec![0.0, pair.block_betas[0], pair.block_betas[1], 0.0]);
            assert_eq!(diff.couplings, vec![0.0, pair.block_coupling, 0.0]);
            let (b1, b2) = s.betas();
            assert!((pair.block_betas[0] - b1).abs() <= 4.0 * f64::EPSILON * b1.abs());
            assert!((pair.block_betas[1] - b2).abs() <= 4.0 * f64::EPSILON * b2.abs());
            assert!((pair.block_coupling - s.kappa).abs() <= 4.0 * f64::EPSILON * s.kappa);
            assert!(pair.a.is_positive() && pair.b.is_uniform());
        }
    }

    #[test]
    fn trotter_error_decays() {
        let h = crate::gates::dft(2).unwrap();
        let s = synthesize_su2(&h, L, &ParameterBounds::default()).unwrap()[0];
        let target = section_target(&s, 1, 3);
        let mut last = f64::INFINITY;
        for n in [4, 8, 16, 32] {
            let cfg = TrotterConfig::new(3, L, n).unwrap();
            let rec = Recurrence::plan(3, L, &cfg).unwrap();
            let pair = plan_trotter_pair(&s, 1, &rec, n).unwrap();
            let err = operator_norm(&(trotter_product(&pair, n) - &target)).unwrap();
            assert!(err < 0.75 * last || last.is_infinite(), "N={n}: {err} vs {last}");
            last = err;
        }
    }

    #[test]
    fn gap_examples() {
        let b = TridiagonalHamiltonian::uniform(3, 10.0, 2.0 * PI, 1.0).unwrap();
        let same = gap_compensate(&b, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(same.beta_prime, 10.0);
        assert_eq!(same.electrode_length, 1.0);
        let g = gap_compensate(&b, 0.1, 1.0, 1.0).unwrap();
        assert!((g.beta_prime - 12.25).abs() < 1e-12);
        assert!((g.coupling_prime - (2.0 * PI - 0.2) / 0.8).abs() < 1e-12);
        let us: Vec<CMatrix> = g.sections(3).unwrap().iter().map(|h| h.unitary()).collect();
        let composite = cascade(3, us.iter());
        assert!(operator_norm(&(composite - b.unitary())).unwrap() < 1e-10);
        assert!(matches!(
            gap_compensate(&b, 0.1, 60.0, 1.0),
            Err(PwaError::GapInfeasible { .. })
        ));
    }

    #[test]
    fn two_mode_compile_is_exact() {
        let cfg = TrotterConfig::new(2, L, 1).unwrap();
        let plan = compile(&dft(2).unwrap(), L, &cfg, &ParameterBounds::default()).unwrap();
        assert!(plan.sections.len() <= 4);
        assert!(plan.metadata.measured_error.unwrap() < 1e-9);
    }

    #[test]
    fn identity_compile_and_counts() {
        let cfg = TrotterConfig::new(3, L, 4).unwrap();
        let plan = compile(&identity(3), L, &cfg, &ParameterBounds::default()).unwrap();
        assert_eq!(plan.metadata.k, 4 * 5 * 4);
        assert!(plan.metadata.measured_error.unwrap() < 1e-3);
        assert!(plan.hamiltonians().unwrap().iter().all(|h| h.is_positive()));

        let plan = compile(&clock(3).unwrap(), L, &cfg, &ParameterBounds::default()).unwrap();
        let pairs = plan.sections.iter().filter(|s| s.kind == SectionKind::A).count();
        assert!(pairs <= plan.metadata.k);
        let back = ChipPlan::from_json(&plan.to_json().unwrap()).unwrap();
        assert_eq!(back, plan);
    }

    #[test]
    fn compile_with_gaps_matches_gapless() {
        let mut cfg = TrotterConfig::new(3, L, 4).unwrap();
        let u = dft(3).unwrap();
        let plain = compile(&u, L, &cfg, &ParameterBounds::default()).unwrap();
        cfg.gap = Some(GapConfig { delta_l: 1e-4, beta0: 10.0, coupling0: 1.0 });
        let gapped = compile(&u, L, &cfg, &ParameterBounds::default()).unwrap();
        assert!(gapped.sections.iter().any(|s| s.kind == SectionKind::Gap));
        let diff = (gapped.metadata.measured_error.unwrap() - plain.metadata.measured_error.unwrap()).abs();
        assert!(diff < 1e-4, "{diff}");
    }
}
