//! Dense complex matrix kernel.
//!
//! Every Hamiltonian in this crate is Hermitian, so the matrix exponential is
//! taken through an eigendecomposition. Propagation constants are ~2e7 m^-1
//! while lengths reach ~1e8 m for recurrence sections, so eigenphases are
//! folded into (-pi, pi] with an error-free product before exponentiation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

use crate::error::{PwaError, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Operator-norm tolerance on `U^dag U - I` used throughout the crate.
pub const UNITARY_TOL: f64 = 1e-10;
/// Entrywise Hermiticity tolerance, relative to the largest entry (floor 1).
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Build a matrix from row-major entries.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
    let d = rows.len();
    if d == 0 {
        return Err(PwaError::Input("empty matrix".into()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != d {
            return Err(PwaError::Input(format!(
                "row {i} has {} entries, expected {d}",
                row.len()
            )));
        }
    }
    let m = CMatrix::from_fn(d, d, |i, j| rows[i][j]);
    check_finite(&m)?;
    Ok(m)
}

pub fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(PwaError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(PwaError::Input("zero-dimensional matrix".into()));
    }
    Ok(m.nrows())
}

pub fn check_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(PwaError::Input("matrix has non-finite entries".into()))
    }
}

/// `max |H - H^dag|` entrywise.
pub fn hermitian_deviation(h: &CMatrix) -> f64 {
    let d = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in i..d {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `|| U^dag U - I ||` in operator norm.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    let d = u.nrows();
    let g = u.adjoint() * u - identity(d);
    operator_norm_unchecked(&g)
}

pub fn check_unitary(u: &CMatrix, tol: f64) -> Result<usize> {
    let d = check_square(u)?;
    check_finite(u)?;
    let dev = unitarity_deviation(u);
    if dev > tol {
        return Err(PwaError::NotUnitary { deviation: dev });
    }
    Ok(d)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> Result<f64> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(operator_norm_unchecked(m))
}

fn operator_norm_unchecked(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

const TWO_PI_HI: f64 = 2.0 * PI;
// 2*pi - TWO_PI_HI, the rounding residue of the f64 constant.
const TWO_PI_LO: f64 = 2.449_293_598_294_706_4e-16;

/// `lambda * s` reduced into (-pi, pi].
///
/// The product is formed error-free (hi + lo) and the reduction uses a
/// two-term 2*pi so that phases up to ~1e15 rad keep ~1e-15 absolute accuracy.
pub fn reduced_phase(lambda: f64, s: f64) -> f64 {
    let hi = lambda * s;
    let lo = lambda.mul_add(s, -hi);
    let k = (hi / TWO_PI_HI).round();
    let mut r = (-k).mul_add(TWO_PI_HI, hi);
    r = (-k).mul_add(TWO_PI_LO, r);
    r += lo;
    if r > PI {
        r -= TWO_PI_HI;
    } else if r <= -PI {
        r += TWO_PI_HI;
    }
    r
}

/// `(e^{i x} - 1) / (i x)`, equal to 1 at `x = 0` and free of cancellation near it.
pub fn phase_integral(x: f64) -> Complex64 {
    if x == 0.0 {
        return c(1.0, 0.0);
    }
    let h = 0.5 * x;
    c(x.sin() / x, 2.0 * h.sin() * h.sin() / x)
}

/// Eigendecomposition of a Hermitian matrix, stored about the mean diagonal.
///
/// `H = shift * I + V diag(values) V^dag`. Shifting first keeps eigenvectors
/// accurate when the diagonal is large and nearly uniform.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub shift: f64,
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let d = check_square(h)?;
        check_finite(h)?;
        let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = hermitian_deviation(h);
        if dev > HERMITIAN_TOL * scale {
            return Err(PwaError::NotHermitian { deviation: dev });
        }
        let shift = (0..d).map(|i| h[(i, i)].re).sum::<f64>() / d as f64;
        // Symmetrize after shifting so the solver sees an exactly Hermitian input.
        let mut centered = CMatrix::from_fn(d, d, |i, j| {
            0.5 * (h[(i, j)] + h[(j, i)].conj())
        });
        for i in 0..d {
            centered[(i, i)] = c(h[(i, i)].re - shift, 0.0);
        }
        let eig = SymmetricEigen::new(centered);
        Ok(Self {
            shift,
            values: eig.eigenvalues.iter().cloned().collect(),
            vectors: eig.eigenvectors,
        })
    }

    /// `exp(-i H s)` with phase folding.
    pub fn exp_minus_i(&self, s: f64) -> CMatrix {
        let global = reduced_phase(self.shift, s);
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -(reduced_phase(l, s) + global)))
            .collect();
        let v = &self.vectors;
        let d = v.nrows();
        let mut scaled = v.clone();
        for (j, p) in phases.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= p;
            }
        }
        scaled * v.adjoint()
    }
}

/// `exp(-i * scale * H)` for Hermitian `H`.
pub fn expm_hermitian(h: &CMatrix, scale: f64) -> Result<CMatrix> {
    if !scale.is_finite() {
        return Err(PwaError::Input("non-finite scale".into()));
    }
    Ok(HermitianEigen::new(h)?.exp_minus_i(scale))
}

/// Gate fidelity `|tr(U^dag V)|^2 / d^2`.
pub fn fidelity(u: &CMatrix, target: &CMatrix) -> Result<f64> {
    let d = check_square(u)?;
    let dt = check_square(target)?;
    if d != dt {
        return Err(PwaError::DimensionMismatch {
            expected: d,
            found: dt,
        });
    }
    Ok(fidelity_unchecked(u, target))
}

pub(crate) fn fidelity_unchecked(u: &CMatrix, target: &CMatrix) -> f64 {
    let d = u.nrows() as f64;
    let tr = trace_adjoint_product(u, target);
    (tr.norm_sqr() / (d * d)).clamp(0.0, 1.0)
}

/// `tr(A^dag B)` without forming the product.
pub fn trace_adjoint_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Fidelity, infidelity and operator-norm distance between two unitaries.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FidelityReport {
    pub fidelity: f64,
    pub infidelity: f64,
    pub operator_error: f64,
}

impl FidelityReport {
    pub fn compare(realized: &CMatrix, target: &CMatrix) -> Result<Self> {
        let fidelity = fidelity(realized, target)?;
        let operator_error = operator_norm(&(realized - target))?;
        Ok(Self {
            fidelity,
            infidelity: 1.0 - fidelity,
            operator_error,
        })
    }
}

/// Eigenvalues of the d x d tridiagonal Toeplitz matrix with zero diagonal and
/// unit off-diagonal, ascending: `-2 cos(j pi / (d + 1))`, j = 1..d.
///
/// The upper half is mirrored from the lower half so the spectrum is exactly
/// symmetric about zero.
pub fn toeplitz_eigenvalues(d: usize) -> Result<Vec<f64>> {
    if d < 1 {
        return Err(PwaError::Input("toeplitz dimension must be >= 1".into()));
    }
    let mut out = vec![0.0; d];
    let denom = (d + 1) as f64;
    for j in 1..=d {
        let mirror = d + 1 - j;
        out[j - 1] = if 2 * j < d + 1 {
            -2.0 * (j as f64 * PI / denom).cos()
        } else if 2 * j == d + 1 {
            0.0
        } else {
            2.0 * (mirror as f64 * PI / denom).cos()
        };
    }
    Ok(out)
}

/// Haar-distributed unitary from complex Ginibre QR with phase-fixed R diagonal.
pub fn haar_random_unitary(d: usize, seed: u64) -> Result<CMatrix> {
    if d < 1 {
        return Err(PwaError::Input("dimension must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(haar_with_rng(d, &mut rng))
}

pub fn haar_with_rng<R: rand::Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(d, d, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re * s, im * s)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            c(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Embed a 2x2 block acting on 1-based modes `(m, m + 1)` into a d x d identity.
pub fn embed_two_mode(d: usize, mode: usize, block: &CMatrix) -> CMatrix {
    debug_assert!(mode >= 1 && mode < d);
    let mut out = identity(d);
    let o = mode - 1;
    for i in 0..2 {
        for j in 0..2 {
            out[(o + i, o + j)] = block[(i, j)];
        }
    }
    out
}

/// Product of a physically ordered sequence: the first element is applied first,
/// so the result is `U_K ... U_2 U_1`.
pub fn cascade<'a, I>(d: usize, sections: I) -> CMatrix
where
    I: IntoIterator<Item = &'a CMatrix>,
{
    sections
        .into_iter()
        .fold(identity(d), |acc, u| u * acc)
}

pub fn pauli_x() -> CMatrix {
    let o = c(0.0, 0.0);
    let l = c(1.0, 0.0);
    CMatrix::from_row_slice(2, 2, &[o, l, l, o])
}

/// Parse a matrix given as rows of `[re, im]` pairs, either bare or under a
/// `"matrix"` key.
pub fn matrix_from_json(s: &str) -> Result<CMatrix> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Source {
        Bare(Vec<Vec<[f64; 2]>>),
        Keyed { matrix: Vec<Vec<[f64; 2]>> },
    }
    let rows = match serde_json::from_str::<Source>(s)? {
        Source::Bare(r) | Source::Keyed { matrix: r } => r,
    };
    matrix_serde::from_rows(&rows).map_err(PwaError::Input)
}

/// Serde adapter storing a square matrix as rows of `[re, im]` pairs.
pub mod matrix_serde {
    use super::CMatrix;
    use num_complex::Complex64;
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn to_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, String> {
        let n = rows.len();
        if n == 0 {
            return Err("empty matrix".into());
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err("matrix must be square".into());
        }
        Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(D::Error::custom)
    }
}
