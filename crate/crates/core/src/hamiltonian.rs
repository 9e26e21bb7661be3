use serde::{Deserialize, Serialize};

use crate::error::{PwaError, Result};
use crate::linalg::{c, CMatrix, HermitianEigen};

/// Nearest-neighbour waveguide Hamiltonian of one section.
///
/// `betas` are the d propagation constants (m^-1), `couplings` the d - 1
/// coupling coefficients (m^-1) and `length` the section length (m). Waveguides
/// are indexed 1..=d in user-facing APIs; the vectors here are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalHamiltonian {
    pub betas: Vec<f64>,
    pub couplings: Vec<f64>,
    pub length: f64,
}

impl TridiagonalHamiltonian {
    /// Construct and enforce strict positivity of every entry and the length.
    pub fn new(betas: Vec<f64>, couplings: Vec<f64>, length: f64) -> Result<Self> {
        let h = Self::new_unchecked(betas, couplings, length)?;
        h.check_positive()?;
        Ok(h)
    }

    /// Shape and finiteness checks only; used for intermediate Hamiltonians
    /// (e.g. differences) that are not physical sections.
    pub fn new_unchecked(betas: Vec<f64>, couplings: Vec<f64>, length: f64) -> Result<Self> {
        if betas.is_empty() {
            return Err(PwaError::Input("hamiltonian needs at least one waveguide".into()));
        }
        if couplings.len() + 1 != betas.len() {
            return Err(PwaError::Input(format!(
                "{} betas need {} couplings, got {}",
                betas.len(),
                betas.len() - 1,
                couplings.len()
            )));
        }
        if !betas.iter().chain(&couplings).chain([&length]).all(|x| x.is_finite()) {
            return Err(PwaError::Input("non-finite hamiltonian entry".into()));
        }
        Ok(Self {
            betas,
            couplings,
            length,
        })
    }

    /// Uniform Toeplitz Hamiltonian `beta I + coupling X`.
    pub fn uniform(d: usize, beta: f64, coupling: f64, length: f64) -> Result<Self> {
        Self::new(vec![beta; d], vec![coupling; d.saturating_sub(1)], length)
    }

    pub fn dim(&self) -> usize {
        self.betas.len()
    }

    pub fn check_positive(&self) -> Result<()> {
        if let Some((m, b)) = self.betas.iter().enumerate().find(|(_, b)| **b <= 0.0) {
            return Err(PwaError::Plan(format!("beta_{} = {b} is not positive", m + 1)));
        }
        if let Some((m, k)) = self.couplings.iter().enumerate().find(|(_, k)| **k <= 0.0) {
            return Err(PwaError::Plan(format!(
                "C_{},{} = {k} is not positive",
                m + 1,
                m + 2
            )));
        }
        if self.length <= 0.0 {
            return Err(PwaError::Plan(format!("length {} is not positive", self.length)));
        }
        Ok(())
    }

    pub fn is_positive(&self) -> bool {
        self.check_positive().is_ok()
    }

    pub fn matrix(&self) -> CMatrix {
        let d = self.dim();
        let mut h = CMatrix::zeros(d, d);
        for (m, &b) in self.betas.iter().enumerate() {
            h[(m, m)] = c(b, 0.0);
        }
        for (m, &k) in self.couplings.iter().enumerate() {
            h[(m, m + 1)] = c(k, 0.0);
            h[(m + 1, m)] = c(k, 0.0);
        }
        h
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.matrix()).expect("tridiagonal hamiltonian is hermitian")
    }

    /// `exp(-i H L)` over the section's own length.
    pub fn unitary(&self) -> CMatrix {
        self.eigen().exp_minus_i(self.length)
    }

    /// Entrywise difference `self - other`, keeping `self.length`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(PwaError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Self::new_unchecked(
            self.betas.iter().zip(&other.betas).map(|(a, b)| a - b).collect(),
            self.couplings
                .iter()
                .zip(&other.couplings)
                .map(|(a, b)| a - b)
                .collect(),
            self.length,
        )
    }

    pub fn is_uniform(&self) -> bool {
        self.betas.windows(2).all(|w| w[0] == w[1])
            && self.couplings.windows(2).all(|w| w[0] == w[1])
    }
}
