//! Target unitaries: qudit DFT, clock and shift matrices plus a few 2x2 gates.
//!
//! Computational-basis indices here are 0-based (`|0>..|d-1>`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{PwaError, Result};
use crate::linalg::{c, haar_random_unitary, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Dft,
    Clock,
    Shift,
    Identity,
    Hadamard,
    PauliX,
}

/// A named gate at a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedGate {
    pub kind: GateKind,
    pub dim: usize,
}

impl NamedGate {
    pub fn new(kind: GateKind, dim: usize) -> Result<Self> {
        match kind {
            GateKind::Hadamard | GateKind::PauliX if dim != 2 => Err(PwaError::Input(format!(
                "{kind:?} is a 2x2 gate, requested d = {dim}"
            ))),
            GateKind::Identity if dim < 1 => Err(PwaError::Input("d must be >= 1".into())),
            GateKind::Dft | GateKind::Clock | GateKind::Shift if dim < 2 => {
                Err(PwaError::Input(format!("{kind:?} needs d >= 2, got {dim}")))
            }
            _ => Ok(Self { kind, dim }),
        }
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.dim;
        match self.kind {
            GateKind::Dft => dft_unchecked(d),
            GateKind::Clock => clock_unchecked(d),
            GateKind::Shift => shift_unchecked(d),
            GateKind::Identity => CMatrix::identity(d, d),
            GateKind::Hadamard => dft_unchecked(2),
            GateKind::PauliX => shift_unchecked(2),
        }
    }
}

fn omega_pow(d: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64)
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(PwaError::Input(format!("gate dimension must be >= 2, got {d}")))
    } else {
        Ok(())
    }
}

/// `W_d`, entry `(j, k) = omega^((d - j) k) / sqrt(d)`.
pub fn dft(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    Ok(dft_unchecked(d))
}

fn dft_unchecked(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| omega_pow(d, ((d - j) % d) * k) * norm)
}

/// `Z_d = diag(omega^k)`.
pub fn clock(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    Ok(clock_unchecked(d))
}

fn clock_unchecked(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |j, k| if j == k { omega_pow(d, k) } else { c(0.0, 0.0) })
}

/// `X_d |k> = |k + 1 mod d>`.
pub fn shift(d: usize) -> Result<CMatrix> {
    check_dim(d)?;
    Ok(shift_unchecked(d))
}

fn shift_unchecked(d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |j, k| if j == (k + 1) % d { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// Target selector accepted on the command line: `dft`, `clock`, `shift`,
/// `identity`, `hadamard`, `paulix` or `haar:<seed>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateSpec {
    Named(GateKind),
    Haar(u64),
}

impl GateSpec {
    pub fn matrix(&self, d: usize) -> Result<CMatrix> {
        match self {
            GateSpec::Named(kind) => Ok(NamedGate::new(*kind, d)?.matrix()),
            GateSpec::Haar(seed) => haar_random_unitary(d, *seed),
        }
    }
}

impl FromStr for GateSpec {
    type Err = PwaError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(seed) = lower.strip_prefix("haar:") {
            return seed
                .parse()
                .map(GateSpec::Haar)
                .map_err(|_| PwaError::Input(format!("bad haar seed in '{s}'")));
        }
        let kind = match lower.as_str() {
            "dft" => GateKind::Dft,
            "clock" => GateKind::Clock,
            "shift" => GateKind::Shift,
            "identity" | "id" => GateKind::Identity,
            "hadamard" | "h" => GateKind::Hadamard,
            "paulix" | "x" => GateKind::PauliX,
            _ => return Err(PwaError::Input(format!("unknown gate '{s}'"))),
        };
        Ok(GateSpec::Named(kind))
    }
}

impl fmt::Display for GateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateSpec::Named(k) => write!(f, "{}", format!("{k:?}").to_ascii_lowercase()),
            GateSpec::Haar(seed) => write!(f, "haar:{seed}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, operator_norm};

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn dft_two_is_hadamard() {
        let s = 1.0 / 2f64.sqrt();
        let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(close(&dft(2).unwrap(), &h, 1e-15));
    }

    #[test]
    fn dft_unitary_and_first_column() {
        for d in 2..9 {
            let w = dft(d).unwrap();
            assert!(close(&(&w * w.adjoint()), &identity(d), 1e-12));
        }
        let w = dft(4).unwrap();
        for j in 0..4 {
            assert!((w[(j, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn clock_examples() {
        let z2 = clock(2).unwrap();
        assert!(close(&z2, &CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)])), 1e-15));
        let z4 = clock(4).unwrap();
        let expect = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for k in 0..4 {
            assert!((z4[(k, k)] - expect[k]).norm() < 1e-15);
        }
        for d in 2..7 {
            let z = clock(d).unwrap();
            let p = (0..d).fold(identity(d), |acc, _| acc * &z);
            assert!(close(&p, &identity(d), 1e-12));
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift(2).unwrap(), crate::linalg::pauli_x());
        let x3 = shift(3).unwrap();
        let e0 = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let out = &x3 * e0;
        assert_eq!(out[1], c(1.0, 0.0));
        for d in 2..7 {
            let x = shift(d).unwrap();
            let p = (0..d).fold(identity(d), |acc, _| acc * &x);
            assert_eq!(p, identity(d));
        }
    }

    #[test]
    fn dft_diagonalizes_shift() {
        for d in 2..8 {
            let w = dft(d).unwrap();
            let x = shift(d).unwrap();
            let m = w.adjoint() * x * &w;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        assert!(m[(i, j)].norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_commutation() {
        for d in 2..8 {
            let z = clock(d).unwrap();
            let x = shift(d).unwrap();
            let lhs = &z * &x;
            let rhs = &x * &z * omega_pow(d, 1);
            assert!(operator_norm(&(lhs - rhs)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn parse_specs() {
        assert_eq!("dft".parse::<GateSpec>().unwrap(), GateSpec::Named(GateKind::Dft));
        assert_eq!("haar:42".parse::<GateSpec>().unwrap(), GateSpec::Haar(42));
        assert!("haar:x".parse::<GateSpec>().is_err());
        assert!("toffoli".parse::<GateSpec>().is_err());
        assert!(dft(1).is_err());
        assert!(NamedGate::new(GateKind::Hadamard, 3).is_err());
        assert_eq!(GateSpec::Haar(3).to_string(), "haar:3");
    }
}
