//! Two-level (Givens-style) decomposition of a unitary into adjacent-mode
//! 2x2 operations.
//!
//! Mode indices in this module are 1-based waveguide indices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PwaError, Result};
use crate::linalg::{c, cascade, check_unitary, embed_two_mode, identity, matrix_serde, pauli_x, CMatrix};

/// Input unitarity tolerance for the decomposer.
pub const INPUT_TOL: f64 = 1e-8;

/// One nulling step `T_r`, acting on modes `q < p`.
///
/// `core` is the 2x2 block in the `(q, p)` basis ordering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelFactor {
    pub index: usize,
    pub p: usize,
    pub q: usize,
    #[serde(with = "matrix_serde")]
    pub core: CMatrix,
}

impl TwoLevelFactor {
    /// The full d x d matrix of `T_r`.
    pub fn embedded(&self, d: usize) -> CMatrix {
        let mut t = identity(d);
        let (q, p) = (self.q - 1, self.p - 1);
        t[(q, q)] = self.core[(0, 0)];
        t[(q, p)] = self.core[(0, 1)];
        t[(p, q)] = self.core[(1, 0)];
        t[(p, p)] = self.core[(1, 1)];
        t
    }
}

/// `U = exp(i * global_phase) * (T_R ... T_1)^dag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoLevelDecomposition {
    pub dim: usize,
    pub global_phase: f64,
    pub factors: Vec<TwoLevelFactor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdjacentKind {
    Core,
    Permutation,
}

/// A 2x2 unitary on adjacent modes `(mode, mode + 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacentOp {
    pub mode: usize,
    pub kind: AdjacentKind,
    #[serde(with = "matrix_serde")]
    pub matrix: CMatrix,
    /// Index of the two-level factor this op came from.
    pub factor: usize,
}

impl AdjacentOp {
    pub fn embedded(&self, d: usize) -> CMatrix {
        embed_two_mode(d, self.mode, &self.matrix)
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        (&self.matrix - identity(2)).iter().all(|z| z.norm() <= tol)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExpandOptions {
    /// Drop core ops within 1e-12 of the identity.
    pub prune_identity: bool,
}

/// `det(U)^(1/d)` principal root, returned as its phase.
fn principal_root_phase(u: &CMatrix) -> f64 {
    let d = u.nrows();
    let det = u.clone().determinant();
    det.arg() / d as f64
}

/// Null the sub-diagonal of `U` column by column (q outer, p inner).
pub fn two_level_decompose(u: &CMatrix) -> Result<TwoLevelDecomposition> {
    let d = check_unitary(u, INPUT_TOL)?;
    let global_phase = principal_root_phase(u);
    let mut running = u * Complex64::from_polar(1.0, -global_phase);
    let mut factors = Vec::with_capacity(d * (d - 1) / 2);
    let mut index = 0;
    for q in 1..d {
        for p in (q + 1)..=d {
            index += 1;
            let (qi, pi) = (q - 1, p - 1);
            let uqq = running[(qi, qi)];
            let upq = running[(pi, qi)];
            let n = (uqq.norm_sqr() + upq.norm_sqr()).sqrt();
            if !n.is_finite() {
                return Err(PwaError::Internal("non-finite pivot".into()));
            }
            // Both entries already zero (e.g. permutation inputs): nothing to null.
            let core = if n < 1e-30 {
                identity(2)
            } else {
                CMatrix::from_row_slice(
                    2,
                    2,
                    &[uqq.conj() / n, upq.conj() / n, -upq / n, uqq / n],
                )
            };
            for col in 0..d {
                let a = running[(qi, col)];
                let b = running[(pi, col)];
                running[(qi, col)] = core[(0, 0)] * a + core[(0, 1)] * b;
                running[(pi, col)] = core[(1, 0)] * a + core[(1, 1)] * b;
            }
            running[(pi, qi)] = c(0.0, 0.0);
            factors.push(TwoLevelFactor { index, p, q, core });
        }
    }
    let residual = (&running - identity(d)).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if residual > 1e-7 {
        return Err(PwaError::Internal(format!(
            "elimination left residual {residual:.3e}"
        )));
    }
    Ok(TwoLevelDecomposition {
        dim: d,
        global_phase,
        factors,
    })
}

/// `d (d - 1) (2 d - 1) / 6` adjacent ops including permutations.
pub fn count_sections(d: usize) -> Result<usize> {
    if d < 2 {
        return Err(PwaError::Input(format!("d must be >= 2, got {d}")));
    }
    Ok(d * (d - 1) * (2 * d - 1) / 6)
}

/// Expand two-level factors into adjacent-mode ops, in physical order (the
/// first element acts first), so that the cascade reproduces the SU(d) part.
pub fn adjacent_expand(dec: &TwoLevelDecomposition, options: ExpandOptions) -> Result<Vec<AdjacentOp>> {
    let d = dec.dim;
    let mut ops = Vec::new();
    for f in dec.factors.iter().rev() {
        if f.q < 1 || f.p <= f.q || f.p > d {
            return Err(PwaError::Input(format!(
                "factor ({}, {}) does not fit dimension {d}",
                f.p, f.q
            )));
        }
        if f.core.nrows() != 2 || f.core.ncols() != 2 {
            return Err(PwaError::Input("factor core must be 2x2".into()));
        }
        let swap = |mode| AdjacentOp {
            mode,
            kind: AdjacentKind::Permutation,
            matrix: pauli_x(),
            factor: f.index,
        };
        // Bring mode p next to q: X_{p-1,p} acts first, X_{q+1,q+2} last.
        for k in ((f.q + 1)..f.p).rev() {
            ops.push(swap(k));
        }
        let core = AdjacentOp {
            mode: f.q,
            kind: AdjacentKind::Core,
            matrix: f.core.adjoint(),
            factor: f.index,
        };
        if !(options.prune_identity && core.is_identity(1e-12)) {
            ops.push(core);
        }
        for k in (f.q + 1)..f.p {
            ops.push(swap(k));
        }
    }
    Ok(ops)
}

/// Rebuild `U` from adjacent ops and the stripped global phase.
pub fn reconstruct(d: usize, ops: &[AdjacentOp], global_phase: f64) -> CMatrix {
    let embedded: Vec<CMatrix> = ops.iter().map(|o| o.embedded(d)).collect();
    cascade(d, embedded.iter()) * Complex64::from_polar(1.0, global_phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_random_unitary, operator_norm};

    #[test]
    fn identity_gives_identity_cores() {
        let dec = two_level_decompose(&identity(4)).unwrap();
        assert_eq!(dec.factors.len(), 6);
        assert!(dec.factors.iter().all(|f| (&f.core - identity(2)).norm() < 1e-15));
        assert_eq!(dec.global_phase, 0.0);
    }

    #[test]
    fn two_by_two_single_factor() {
        let u = haar_random_unitary(2, 17).unwrap();
        let dec = two_level_decompose(&u).unwrap();
        assert_eq!(dec.factors.len(), 1);
        let su = &u * Complex64::from_polar(1.0, -dec.global_phase);
        let t = dec.factors[0].embedded(2) * su;
        assert!(operator_norm(&(t - identity(2))).unwrap() < 1e-10);
    }

    #[test]
    fn nulling_progress_and_reconstruction() {
        let u = haar_random_unitary(4, 7).unwrap();
        let dec = two_level_decompose(&u).unwrap();
        let mut running = &u * Complex64::from_polar(1.0, -dec.global_phase);
        for f in &dec.factors {
            running = f.embedded(4) * running;
            assert!(running[(f.p - 1, f.q - 1)].norm() <= 1e-10);
        }
        assert!(operator_norm(&(running - identity(4))).unwrap() < 1e-9);
        let prod = dec
            .factors
            .iter()
            .fold(identity(4), |acc, f| f.embedded(4) * acc);
        let rebuilt = prod.adjoint() * Complex64::from_polar(1.0, dec.global_phase);
        assert!(operator_norm(&(rebuilt - &u)).unwrap() < 1e-9);
    }

    #[test]
    fn adjacent_neighbour_factor_has_no_permutations() {
        let u = haar_random_unitary(2, 1).unwrap();
        let ops = adjacent_expand(&two_level_decompose(&u).unwrap(), ExpandOptions::default()).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0].kind, AdjacentKind::Core);
    }

    #[test]
    fn distant_factor_permutation_chain() {
        // factor (p=5, q=2) in d=5: swaps on modes 4, 3 before the core, 3, 4 after
        let dec = TwoLevelDecomposition {
            dim: 5,
            global_phase: 0.0,
            factors: vec![TwoLevelFactor {
                index: 1,
                p: 5,
                q: 2,
                core: haar_random_unitary(2, 4).unwrap(),
            }],
        };
        let ops = adjacent_expand(&dec, ExpandOptions::default()).unwrap();
        let modes: Vec<_> = ops.iter().map(|o| (o.mode, o.kind)).collect();
        assert_eq!(
            modes,
            vec![
                (4, AdjacentKind::Permutation),
                (3, AdjacentKind::Permutation),
                (2, AdjacentKind::Core),
                (3, AdjacentKind::Permutation),
                (4, AdjacentKind::Permutation),
            ]
        );
        // the cascade equals T^dag embedded on modes (2, 5)
        let rebuilt = reconstruct(5, &ops, 0.0);
        let expected = dec.factors[0].embedded(5).adjoint();
        assert!(operator_norm(&(rebuilt - expected)).unwrap() < 1e-12);
    }

    #[test]
    fn counts_match_enumeration() {
        for (d, expect) in [(2, 1), (3, 5), (5, 30)] {
            assert_eq!(count_sections(d).unwrap(), expect);
            let u = haar_random_unitary(d, d as u64).unwrap();
            let ops = adjacent_expand(&two_level_decompose(&u).unwrap(), ExpandOptions::default()).unwrap();
            assert_eq!(ops.len(), expect);
        }
        assert!(count_sections(1).is_err());
    }

    #[test]
    fn permutation_input_with_zero_pivots() {
        // shift matrix has zero (q, q) and (q + 1, q) entries at some steps
        let x = crate::gates::shift(5).unwrap();
        let dec = two_level_decompose(&x).unwrap();
        let ops = adjacent_expand(&dec, ExpandOptions::default()).unwrap();
        let rebuilt = reconstruct(5, &ops, dec.global_phase);
        assert!(operator_norm(&(rebuilt - x)).unwrap() < 1e-12);
    }

    #[test]
    fn pruning_drops_identity_cores() {
        let dec = two_level_decompose(&identity(3)).unwrap();
        let ops = adjacent_expand(&dec, ExpandOptions { prune_identity: true }).unwrap();
        assert!(ops.iter().all(|o| o.kind == AdjacentKind::Permutation));
        assert!(operator_norm(&(reconstruct(3, &ops, 0.0) - identity(3))).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary() {
        let mut u = identity(3);
        u[(0, 1)] = c(0.5, 0.0);
        assert!(matches!(two_level_decompose(&u), Err(PwaError::NotUnitary { .. })));
    }

    #[test]
    fn factor_json_uses_pairs() {
        let dec = two_level_decompose(&haar_random_unitary(3, 2).unwrap()).unwrap();
        let js = serde_json::to_value(&dec.factors[0]).unwrap();
        assert_eq!(js["core"][0][0].as_array().unwrap().len(), 2);
        let back: TwoLevelFactor = serde_json::from_value(js).unwrap();
        assert_eq!(back, dec.factors[0]);
    }
}
