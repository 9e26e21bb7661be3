//! Linear voltage model of a proton-exchanged lithium niobate waveguide array
//! and z-resolved propagation through section cascades.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{PwaError, Result};
use crate::hamiltonian::TridiagonalHamiltonian;
use crate::linalg::{c, cascade, phase_integral, reduced_phase, CMatrix, CVector};
use crate::planner::GapConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceModel {
    /// Free-space wavelength (m).
    pub wavelength: f64,
    pub n0: f64,
    /// Index change per volt (1/V).
    pub dn: f64,
    /// Zero-voltage coupling (1/m).
    pub c0: f64,
    /// Coupling change per volt (1/(m V)).
    pub dc: f64,
    pub v_max: f64,
    /// Section length (m).
    pub length: f64,
    /// Gap between sections (m).
    pub gap: f64,
}

impl Default for DeviceModel {
    fn default() -> Self {
        Self::with_length(6e-3)
    }
}

impl DeviceModel {
    /// Default constants with section length `length` and gaps of `0.1 length`.
    pub fn with_length(length: f64) -> Self {
        Self {
            wavelength: 808e-9,
            n0: 2.713,
            dn: 5e-6,
            c0: 100.0,
            dc: 1.4,
            v_max: 15.0,
            length,
            gap: 0.1 * length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.wavelength, self.n0, self.dn, self.c0, self.dc, self.v_max, self.length];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(PwaError::Input("device constants must be positive and finite".into()));
        }
        if !(self.gap >= 0.0 && self.gap < self.length) {
            return Err(PwaError::Input(format!(
                "gap {} must lie in [0, L = {})",
                self.gap, self.length
            )));
        }
        if self.c0 - self.dc * self.v_max <= 0.0 || self.n0 - self.dn * self.v_max <= 0.0 {
            return Err(PwaError::Input("voltage range allows non-positive parameters".into()));
        }
        Ok(())
    }

    pub fn beta(&self, dv: f64) -> f64 {
        2.0 * PI / self.wavelength * (self.n0 + self.dn * dv)
    }

    pub fn coupling(&self, dv: f64) -> f64 {
        self.c0 + self.dc * dv
    }

    /// `d beta / d V`.
    pub fn beta_slope(&self) -> f64 {
        2.0 * PI / self.wavelength * self.dn
    }

    pub fn beta0(&self) -> f64 {
        self.beta(0.0)
    }

    pub fn zero_voltage(&self, d: usize, length: f64) -> Result<TridiagonalHamiltonian> {
        TridiagonalHamiltonian::uniform(d, self.beta0(), self.c0, length)
    }

    /// Gap configuration for analytic plans on this device.
    pub fn gap_config(&self) -> GapConfig {
        GapConfig {
            delta_l: self.gap,
            beta0: self.beta0(),
            coupling0: self.c0,
        }
    }

    /// Largest `|beta - beta0|` reachable (1/m).
    pub fn beta_window(&self) -> f64 {
        self.beta_slope() * self.v_max
    }
}

/// Electrode voltages of one section: `d` for the betas, `d - 1` for the couplings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageSettings {
    pub beta_v: Vec<f64>,
    pub coupling_v: Vec<f64>,
}

impl VoltageSettings {
    pub fn zeros(d: usize) -> Self {
        Self {
            beta_v: vec![0.0; d],
            coupling_v: vec![0.0; d.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.beta_v.len()
    }

    /// Parameter vector `[beta_v..., coupling_v...]`.
    pub fn to_vec(&self) -> Vec<f64> {
        self.beta_v.iter().chain(&self.coupling_v).copied().collect()
    }

    pub fn from_slice(d: usize, v: &[f64]) -> Self {
        Self {
            beta_v: v[..d].to_vec(),
            coupling_v: v[d..2 * d - 1].to_vec(),
        }
    }

    pub fn check(&self, v_max: f64) -> Result<()> {
        if self.beta_v.is_empty() || self.coupling_v.len() + 1 != self.beta_v.len() {
            return Err(PwaError::Input("voltage settings need d beta and d-1 coupling entries".into()));
        }
        if let Some(v) = self.beta_v.iter().chain(&self.coupling_v).find(|v| !(v.abs() <= v_max)) {
            return Err(PwaError::Input(format!("voltage {v} outside +-{v_max} V")));
        }
        Ok(())
    }
}

pub fn hamiltonian_from_voltages(model: &DeviceModel, v: &VoltageSettings) -> Result<TridiagonalHamiltonian> {
    v.check(model.v_max)?;
    TridiagonalHamiltonian::new(
        v.beta_v.iter().map(|&x| model.beta(x)).collect(),
        v.coupling_v.iter().map(|&x| model.coupling(x)).collect(),
        model.length,
    )
}

/// Physical sequence of a voltage-programmed chip: sections separated by
/// zero-voltage gaps (no gap before the first or after the last section).
pub fn voltage_layout(model: &DeviceModel, sections: &[VoltageSettings]) -> Result<Vec<TridiagonalHamiltonian>> {
    model.validate()?;
    let mut out = Vec::with_capacity(2 * sections.len());
    for (k, v) in sections.iter().enumerate() {
        if k > 0 && model.gap > 0.0 {
            out.push(model.zero_voltage(v.dim(), model.gap)?);
        }
        out.push(hamiltonian_from_voltages(model, v)?);
    }
    Ok(out)
}

/// Cascade of sections, the first applied first. An empty list gives `I_d`.
pub fn realize_sections(d: usize, sections: &[TridiagonalHamiltonian]) -> Result<CMatrix> {
    let mut us = Vec::with_capacity(sections.len());
    for h in sections {
        if h.dim() != d {
            return Err(PwaError::DimensionMismatch { expected: d, found: h.dim() });
        }
        us.push(h.unitary());
    }
    Ok(cascade(d, us.iter()))
}

pub fn realize_voltages(model: &DeviceModel, sections: &[VoltageSettings]) -> Result<CMatrix> {
    let d = sections
        .first()
        .map(VoltageSettings::dim)
        .ok_or_else(|| PwaError::Input("no sections".into()))?;
    realize_sections(d, &voltage_layout(model, sections)?)
}

/// Voltages for a chip together with the device they were optimized for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltagePlan {
    pub schema_version: u32,
    pub model: DeviceModel,
    pub voltages: Vec<VoltageSettings>,
}

const MAX_TRACE_POINTS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationTrace {
    pub z: Vec<f64>,
    pub amplitudes: Vec<CVector>,
}

impl PropagationTrace {
    pub fn probabilities(&self, k: usize) -> Vec<f64> {
        self.amplitudes[k].iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn final_state(&self) -> &CVector {
        self.amplitudes.last().expect("trace has at least one point")
    }

    /// Largest `| sum |a|^2 - 1 |` along the trace.
    pub fn max_norm_deviation(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| (a.iter().map(|x| x.norm_sqr()).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV with columns `z_m,mode_index,re,im,probability`; modes are 1-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z_m,mode_index,re,im,probability\n");
        for (z, a) in self.z.iter().zip(&self.amplitudes) {
            for (m, x) in a.iter().enumerate() {
                let _ = writeln!(out, "{:.16e},{},{:.16e},{:.16e},{:.16e}", z, m + 1, x.re, x.im, x.norm_sqr());
            }
        }
        out
    }
}

/// Sample the state on a grid of spacing `dz` inside every section (plus each
/// section end) using the exact section propagator.
pub fn propagate(state0: &CVector, sections: &[TridiagonalHamiltonian], dz: f64) -> Result<PropagationTrace> {
    let norm = state0.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(PwaError::Input(format!("initial state norm {norm} is not 1")));
    }
    if !(dz > 0.0) || !dz.is_finite() {
        return Err(PwaError::Input(format!("dz must be positive, got {dz}")));
    }
    if let Some(shortest) = sections.iter().map(|h| h.length).reduce(f64::min) {
        if dz > shortest {
            return Err(PwaError::Input(format!(
                "dz {dz} exceeds the shortest section {shortest}"
            )));
        }
    }
    let points: f64 = sections.iter().map(|h| (h.length / dz).ceil()).sum();
    if points > MAX_TRACE_POINTS as f64 {
        return Err(PwaError::Input(format!(
            "trace would need {points:.0} points; increase dz"
        )));
    }
    let d = state0.len();
    let mut z = vec![0.0];
    let mut amps = vec![state0.clone()];
    let mut state = state0.clone();
    let mut z0 = 0.0;
    for h in sections {
        if h.dim() != d {
            return Err(PwaError::DimensionMismatch { expected: d, found: h.dim() });
        }
        let eig = h.eigen();
        let steps = (h.length / dz).ceil() as usize;
        for k in 1..=steps {
            let s = if k == steps { h.length } else { k as f64 * dz };
            z.push(z0 + s);
            amps.push(eig.exp_minus_i(s) * &state);
        }
        state = amps.last().unwrap().clone();
        z0 += h.length;
    }
    Ok(PropagationTrace { z, amplitudes: amps })
}

pub fn basis_state(d: usize, mode: usize) -> Result<CVector> {
    if mode < 1 || mode > d {
        return Err(PwaError::Input(format!("mode {mode} outside 1..={d}")));
    }
    let mut v = CVector::zeros(d);
    v[mode - 1] = c(1.0, 0.0);
    Ok(v)
}

/// First-order interaction-picture approximation of `exp(-i H L)` for a
/// tridiagonal `H` with diagonal `h0_diag` and off-diagonal `couplings`.
pub fn dyson_first_order(h0_diag: &[f64], couplings: &[f64], length: f64) -> Result<CMatrix> {
    let d = h0_diag.len();
    if d == 0 || couplings.len() + 1 != d {
        return Err(PwaError::Input("need d diagonal and d-1 coupling entries".into()));
    }
    if !(length > 0.0) {
        return Err(PwaError::Input(format!("length must be positive, got {length}")));
    }
    let u0: Vec<Complex64> = h0_diag
        .iter()
        .map(|&b| Complex64::from_polar(1.0, -reduced_phase(b, length)))
        .collect();
    let mut u = CMatrix::zeros(d, d);
    for m in 0..d {
        u[(m, m)] = u0[m];
    }
    for (k, &ck) in couplings.iter().enumerate() {
        // f_k = int_0^L e^{i (b_k - b_{k+1}) z} dz
        let f = phase_integral((h0_diag[k] - h0_diag[k + 1]) * length) * length;
        let minus_i = c(0.0, -1.0);
        u[(k, k + 1)] = u0[k] * minus_i * ck * f;
        u[(k + 1, k)] = u0[k + 1] * minus_i * ck * f.conj();
    }
    Ok(u)
}

/// Squared Frobenius mass outside the tridiagonal band over the total.
pub fn off_tridiagonal_fraction(u: &CMatrix) -> f64 {
    let mut off = 0.0;
    let mut total = 0.0;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            let w = u[(i, j)].norm_sqr();
            total += w;
            if i.abs_diff(j) > 1 {
                off += w;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        off / total
    }
}

/// `u` with entries outside the tridiagonal band set to zero.
pub fn tridiagonal_part(u: &CMatrix) -> CMatrix {
    CMatrix::from_fn(u.nrows(), u.ncols(), |i, j| {
        if i.abs_diff(j) > 1 {
            c(0.0, 0.0)
        } else {
            u[(i, j)]
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, operator_norm, unitarity_deviation};

    #[test]
    fn zero_voltage_constants() {
        let m = DeviceModel::default();
        m.validate().unwrap();
        let h = hamiltonian_from_voltages(&m, &VoltageSettings::zeros(3)).unwrap();
        let want = 2.0 * PI * 2.713 / 808e-9;
        assert!((h.betas[0] - want).abs() <= 1e-15 * want);
        assert!((h.betas[0] - 2.1097e7).abs() < 1e3);
        assert_eq!(h.couplings, vec![100.0, 100.0]);
    }

    #[test]
    fn coupling_extremes_and_range_check() {
        let m = DeviceModel::default();
        assert!((m.coupling(15.0) - 121.0).abs() < 1e-12);
        assert!((m.coupling(-15.0) - 79.0).abs() < 1e-12);
        let v = VoltageSettings {
            beta_v: vec![15.0, -15.0],
            coupling_v: vec![15.0],
        };
        let h = hamiltonian_from_voltages(&m, &v).unwrap();
        let expect = 2.0 * PI / 808e-9 * (2.713 + 5e-6 * 15.0);
        assert!((h.betas[0] - expect).abs() <= 1e-9 * expect);
        let bad = VoltageSettings { beta_v: vec![15.1, 0.0], coupling_v: vec![0.0] };
        assert!(hamiltonian_from_voltages(&m, &bad).is_err());
    }

    #[test]
    fn voltage_map_is_affine() {
        let m = DeviceModel::default();
        let v1 = VoltageSettings { beta_v: vec![1.0, -2.0], coupling_v: vec![3.0] };
        let v2 = VoltageSettings { beta_v: vec![4.0, 0.5], coupling_v: vec![-6.0] };
        let v12 = VoltageSettings { beta_v: vec![5.0, -1.5], coupling_v: vec![-3.0] };
        let h = |v: &VoltageSettings| hamiltonian_from_voltages(&m, v).unwrap().matrix();
        let z = h(&VoltageSettings::zeros(2));
        let lhs = h(&v1) + h(&v2) - z;
        let rhs = h(&v12);
        assert!((lhs - &rhs).norm() <= 1e-15 * rhs.norm());
    }

    #[test]
    fn realize_empty_and_periodic() {
        assert_eq!(realize_sections(3, &[]).unwrap(), identity(3));
        // eigenvalues beta + 2 cos(j pi/4) * C; pick beta, C, L so all phases are 2 pi multiples
        let h = TridiagonalHamiltonian::uniform(3, 2.0 * PI, 2.0 * PI / 2f64.sqrt(), 1.0).unwrap();
        let u = realize_sections(3, &[h]).unwrap();
        assert!(operator_norm(&(u - identity(3))).unwrap() < 1e-9);
    }

    #[test]
    fn rabi_oscillation() {
        let m = DeviceModel::default();
        let len = PI / m.c0;
        let h = TridiagonalHamiltonian::uniform(2, m.beta0(), m.c0, len).unwrap();
        let trace = propagate(&basis_state(2, 1).unwrap(), &[h], len / 200.0).unwrap();
        assert!(trace.max_norm_deviation() < 1e-9);
        let half = trace.z.iter().position(|z| (z - len / 2.0).abs() < 1e-12).unwrap();
        assert!(trace.probabilities(half)[1] > 1.0 - 1e-12);
        assert!(trace.probabilities(trace.z.len() - 1)[0] > 1.0 - 1e-12);
    }

    #[test]
    fn propagate_matches_realize_and_rejects() {
        let m = DeviceModel::default();
        let v = VoltageSettings { beta_v: vec![1.0, -3.0, 7.0], coupling_v: vec![2.0, -9.0] };
        let secs = voltage_layout(&m, &[v.clone(), v]).unwrap();
        assert_eq!(secs.len(), 3);
        let s0 = basis_state(3, 2).unwrap();
        let trace = propagate(&s0, &secs, 1e-4).unwrap();
        let want = realize_sections(3, &secs).unwrap() * &s0;
        assert!((trace.final_state() - want).norm() < 1e-8);
        assert!(propagate(&s0, &secs, 1e-3).is_err());
        assert!(propagate(&(s0 * c(2.0, 0.0)), &secs, 1e-4).is_err());
        let csv = trace.to_csv();
        assert!(csv.starts_with("z_m,mode_index,re,im,probability\n"));
        assert_eq!(csv.lines().count(), 1 + 3 * trace.z.len());
    }

    #[test]
    fn dyson_branches() {
        let u = dyson_first_order(&[1.0, 2.0, 3.0], &[0.0, 0.0], 0.7).unwrap();
        for m in 0..3 {
            let want = Complex64::from_polar(1.0, -((m + 1) as f64) * 0.7);
            assert!((u[(m, m)] - want).norm() < 1e-15);
        }
        assert_eq!(u[(0, 1)], c(0.0, 0.0));
        let (b, cc, l) = (5.0, 1e-3, 0.1);
        let u = dyson_first_order(&[b, b], &[cc], l).unwrap();
        let want = c(0.0, -cc * l) * Complex64::from_polar(1.0, -b * l);
        assert!((u[(0, 1)] - want).norm() < 1e-15);
    }

    #[test]
    fn dyson_error_shrinks_with_length() {
        let h = TridiagonalHamiltonian::new(vec![3.0, 3.5, 2.0, 4.0], vec![0.3, 0.2, 0.4], 1.0).unwrap();
        let err = |l: f64| {
            let exact = h.eigen().exp_minus_i(l);
            let approx = dyson_first_order(&h.betas, &h.couplings, l).unwrap();
            operator_norm(&(exact - approx)).unwrap()
        };
        let mut last = err(2.0);
        for l in [1.0, 0.5, 0.25] {
            let e = err(l);
            assert!(e <= last);
            last = e;
        }
        assert!(unitarity_deviation(&h.unitary()) < 1e-12);
    }
}
