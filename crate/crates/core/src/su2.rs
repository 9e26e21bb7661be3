//! Exact synthesis of a 2x2 unitary as at most four constrained sections.
//!
//! Every section has the Hamiltonian `[[eta + alpha, kappa], [kappa, eta - alpha]]`
//! over a common length `L`, with `kappa > 0` and `eta +- alpha > 0`. A generic
//! gate is written as `e^{i eta} R(r, zeta, pi/2) R_Z(xi)`; `R_Z(xi)` is realized
//! as Hadamard, `e^{-i xi sigma_x}`, Hadamard and the rotation as one section.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::{PwaError, Result};
use crate::hamiltonian::TridiagonalHamiltonian;
use crate::linalg::{c, cascade, check_unitary, CMatrix};

/// Below this off-diagonal magnitude a gate is treated as a pure phase gate.
///
/// The rotation section needs `kappa ~ sqrt(1 - r^2) > 0`; anything larger than
/// this is synthesized exactly by the rotation form.
pub const PHASE_GATE_THRESHOLD: f64 = 1e-11;
const ANGLE_TOL: f64 = 1e-12;

/// `U = e^{i eta} [[r e^{i phi}, s e^{i delta}], [-s e^{-i delta}, r e^{-i phi}]]`
/// with `s = sqrt(1 - r^2)`. Both magnitudes are kept so that nearly diagonal
/// gates do not lose `s` to cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2GateParams {
    pub r: f64,
    pub s: f64,
    pub phi: f64,
    pub delta: f64,
    pub eta: f64,
}

impl Su2GateParams {
    pub fn from_r(r: f64, phi: f64, delta: f64, eta: f64) -> Self {
        let s = ((1.0 - r) * (1.0 + r)).max(0.0).sqrt();
        Self { r, s, phi, delta, eta }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn xi(&self) -> f64 {
        self.delta + FRAC_PI_2
    }

    pub fn zeta(&self) -> f64 {
        -(self.phi + self.xi())
    }

    /// `arccos(r cos zeta)`, evaluated through atan2 for accuracy near 0 and pi.
    pub fn theta(&self) -> f64 {
        let z = self.zeta();
        let sin_theta = (self.s().powi(2) + (self.r * z.sin()).powi(2)).sqrt();
        sin_theta.atan2(self.r * z.cos())
    }

    pub fn matrix(&self) -> CMatrix {
        let s = self.s();
        let g = Complex64::from_polar(1.0, self.eta);
        CMatrix::from_row_slice(
            2,
            2,
            &[
                g * Complex64::from_polar(self.r, self.phi),
                g * Complex64::from_polar(s, self.delta),
                -g * Complex64::from_polar(s, -self.delta),
                g * Complex64::from_polar(self.r, -self.phi),
            ],
        )
    }
}

/// Extract `(r, phi, delta, eta)`; `eta = arg(det U) / 2` in (-pi/2, pi/2].
pub fn parse_su2(u: &CMatrix) -> Result<Su2GateParams> {
    let d = check_unitary(u, 1e-10)?;
    if d != 2 {
        return Err(PwaError::DimensionMismatch {
            expected: 2,
            found: d,
        });
    }
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let eta = det.arg() / 2.0;
    let v = u * Complex64::from_polar(1.0, -eta);
    let (a, b) = (v[(0, 0)], v[(0, 1)]);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let r = (a.norm() / n).min(1.0);
    let s = (b.norm() / n).min(1.0);
    let phi = if a.norm() > 1e-300 { a.arg() } else { 0.0 };
    let delta = if b.norm() > 1e-300 { b.arg() } else { 0.0 };
    Ok(Su2GateParams { r, s, phi, delta, eta })
}

/// Which Table-1 column a section implements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionRole {
    Hadamard,
    RotationX,
    Rotation,
}

/// One 2x2 section `[[eta + alpha, kappa], [kappa, eta - alpha]]` of length `length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2Section {
    pub role: SectionRole,
    pub eta: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub length: f64,
    /// Free integer `k_j` lifting `eta` by `2 pi k_j / L`.
    pub phase_lift: i64,
    /// Free integer `l_2` lifting `kappa` (RotationX only).
    pub coupling_lift: i64,
}

impl Su2Section {
    pub fn betas(&self) -> (f64, f64) {
        (self.eta + self.alpha, self.eta - self.alpha)
    }

    pub fn is_positive(&self) -> bool {
        let (b1, b2) = self.betas();
        self.kappa > 0.0 && b1 > 0.0 && b2 > 0.0
    }

    pub fn hamiltonian(&self) -> Result<TridiagonalHamiltonian> {
        let (b1, b2) = self.betas();
        TridiagonalHamiltonian::new(vec![b1, b2], vec![self.kappa], self.length)
    }

    /// The 2x2 block `[[eta + alpha, kappa], [kappa, eta - alpha]]` without positivity checks.
    pub fn block(&self) -> CMatrix {
        let (b1, b2) = self.betas();
        CMatrix::from_row_slice(
            2,
            2,
            &[c(b1, 0.0), c(self.kappa, 0.0), c(self.kappa, 0.0), c(b2, 0.0)],
        )
    }

    pub fn unitary(&self) -> CMatrix {
        crate::linalg::HermitianEigen::new(&self.block())
            .expect("2x2 block is symmetric")
            .exp_minus_i(self.length)
    }
}

/// Allowed ranges for the per-waveguide betas and the coupling (m^-1).
///
/// Strict positivity is always enforced in addition to these ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterBounds {
    pub beta_min: f64,
    pub beta_max: f64,
    pub coupling_min: f64,
    pub coupling_max: f64,
}

impl Default for ParameterBounds {
    fn default() -> Self {
        Self {
            beta_min: 0.0,
            beta_max: f64::INFINITY,
            coupling_min: 0.0,
            coupling_max: f64::INFINITY,
        }
    }
}

impl ParameterBounds {
    fn coupling_ok(&self, kappa: f64) -> bool {
        kappa > 0.0 && kappa >= self.coupling_min && kappa <= self.coupling_max
    }
}

/// Smallest non-negative `n` with `(base + 2 pi n) / L - |alpha|` strictly above
/// the lower beta bound; `None` if the upper bound is then violated.
fn lift_eta(base: f64, alpha: f64, length: f64, bounds: &ParameterBounds) -> Option<(f64, i64)> {
    let lower = bounds.beta_min.max(0.0) + alpha.abs();
    let x = (lower * length - base) / (2.0 * PI);
    let mut n = if x < 0.0 { 0 } else { x.floor() as i64 + 1 };
    let mut eta = (base + 2.0 * PI * n as f64) / length;
    // guard against rounding at the boundary
    while eta - alpha.abs() <= bounds.beta_min.max(0.0) {
        n += 1;
        eta = (base + 2.0 * PI * n as f64) / length;
    }
    if eta + alpha.abs() > bounds.beta_max || eta - alpha.abs() < bounds.beta_min {
        return None;
    }
    Some((eta, n))
}

fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn hadamard_section(length: f64, bounds: &ParameterBounds, index: usize) -> Result<Su2Section> {
    let k = PI / (2.0 * SQRT_2 * length);
    let (eta, n) = lift_eta(-FRAC_PI_2, k, length, bounds).ok_or(PwaError::BoundsInfeasible { section: index })?;
    if !bounds.coupling_ok(k) {
        return Err(PwaError::BoundsInfeasible { section: index });
    }
    Ok(Su2Section {
        role: SectionRole::Hadamard,
        eta,
        kappa: k,
        alpha: k,
        length,
        phase_lift: n,
        coupling_lift: 0,
    })
}

/// `e^{i eta} e^{-i xi sigma_x}` as one section with `alpha = 0`.
fn rotation_x_section(
    xi: f64,
    eta: f64,
    length: f64,
    bounds: &ParameterBounds,
    index: usize,
) -> Result<Su2Section> {
    let xi = wrap_angle(xi);
    let lower = bounds.coupling_min.max(0.0);
    let x = (lower * length - xi) / (2.0 * PI);
    let mut l2 = if x < 0.0 { 0 } else { x.floor() as i64 + 1 };
    let mut kappa = (xi + 2.0 * PI * l2 as f64) / length;
    while kappa <= lower {
        l2 += 1;
        kappa = (xi + 2.0 * PI * l2 as f64) / length;
    }
    if !bounds.coupling_ok(kappa) {
        return Err(PwaError::BoundsInfeasible { section: index });
    }
    let (eta_j, n) = lift_eta(-eta, 0.0, length, bounds).ok_or(PwaError::BoundsInfeasible { section: index })?;
    Ok(Su2Section {
        role: SectionRole::RotationX,
        eta: eta_j,
        kappa,
        alpha: 0.0,
        length,
        phase_lift: n,
        coupling_lift: l2,
    })
}

/// The single section realizing `e^{i eta} R(r, zeta, pi/2)`.
pub fn rotation_section(params: &Su2GateParams, length: f64) -> Result<Su2Section> {
    rotation_section_bounded(params, length, &ParameterBounds::default(), 4)
}

fn rotation_section_bounded(
    params: &Su2GateParams,
    length: f64,
    bounds: &ParameterBounds,
    index: usize,
) -> Result<Su2Section> {
    if !(length > 0.0) {
        return Err(PwaError::Input(format!("section length must be positive, got {length}")));
    }
    let s = params.s();
    if s < PHASE_GATE_THRESHOLD {
        return Err(PwaError::PhaseGateRequired { r: params.r });
    }
    let theta = params.theta();
    let sin_theta = theta.sin();
    let kappa = s * theta / (length * sin_theta);
    let alpha = params.r * params.zeta().sin() * theta / (length * sin_theta);
    if !bounds.coupling_ok(kappa) {
        return Err(PwaError::BoundsInfeasible { section: index });
    }
    let (eta, n) =
        lift_eta(-params.eta, alpha, length, bounds).ok_or(PwaError::BoundsInfeasible { section: index })?;
    Ok(Su2Section {
        role: SectionRole::Rotation,
        eta,
        kappa,
        alpha,
        length,
        phase_lift: n,
        coupling_lift: 0,
    })
}

/// Sections in physical order (the first entry acts first) whose cascade equals
/// `u` exactly, global phase included.
pub fn synthesize_su2(u: &CMatrix, length: f64, bounds: &ParameterBounds) -> Result<Vec<Su2Section>> {
    if !(length > 0.0) {
        return Err(PwaError::Input(format!("section length must be positive, got {length}")));
    }
    let p = parse_su2(u)?;
    if p.s() < PHASE_GATE_THRESHOLD {
        // e^{i eta} diag(e^{i phi}, e^{-i phi}) = e^{i eta} R_Z(-phi)
        let xi = wrap_angle(-p.phi);
        if xi.abs() < ANGLE_TOL && p.eta.abs() < ANGLE_TOL {
            return Ok(vec![
                hadamard_section(length, bounds, 1)?,
                hadamard_section(length, bounds, 2)?,
            ]);
        }
        return Ok(vec![
            hadamard_section(length, bounds, 1)?,
            rotation_x_section(xi, p.eta, length, bounds, 2)?,
            hadamard_section(length, bounds, 3)?,
        ]);
    }
    let rotation = rotation_section_bounded(&p, length, bounds, 4)?;
    let xi = wrap_angle(p.xi());
    if xi.abs() < ANGLE_TOL {
        return Ok(vec![rotation]);
    }
    Ok(vec![
        hadamard_section(length, bounds, 1)?,
        rotation_x_section(xi, 0.0, length, bounds, 2)?,
        hadamard_section(length, bounds, 3)?,
        rotation,
    ])
}

/// Cascade of the sections' 2x2 unitaries.
pub fn realize_sections(sections: &[Su2Section]) -> CMatrix {
    let us: Vec<CMatrix> = sections.iter().map(Su2Section::unitary).collect();
    cascade(2, us.iter())
}
