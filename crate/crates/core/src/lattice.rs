//! Exact-integer LLL reduction and simultaneous Diophantine approximation.
//!
//! The reduction is the all-integer variant (subdeterminants `d_i` and scaled
//! Gram-Schmidt coefficients `lambda_ij = d_j mu_ij`), so no rounding enters
//! the lattice arithmetic.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PwaError, Result};

/// Lovász parameter as a rational `num / den`, with `1/4 < num/den < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delta {
    pub num: u64,
    pub den: u64,
}

impl Delta {
    pub const CLASSIC: Delta = Delta { num: 3, den: 4 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || 4 * num <= den || num >= den {
            return Err(PwaError::Input(format!(
                "Lovász parameter {num}/{den} must lie in (1/4, 1)"
            )));
        }
        Ok(Self { num, den })
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer to `a / b` for `b > 0`, ties rounded up.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let num = a * &two + b;
    let den = b * &two;
    num.div_floor(&den)
}

/// LLL-reduce the rows of `basis` in place semantics (a reduced copy is returned).
pub fn lll_reduce(basis: &[Vec<BigInt>], delta: Delta) -> Result<Vec<Vec<BigInt>>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = basis[0].len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(PwaError::Input("basis rows must share a dimension".into()));
    }
    if n > dim {
        return Err(PwaError::Input("more basis rows than columns: rows are dependent".into()));
    }
    let mut b: Vec<Vec<BigInt>> = basis.to_vec();
    // d[i] for i = 0..=n, d[0] = 1; lam[k][j] for j < k.
    let mut d: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut lam: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = dot(&b[0], &b[0]);
    if d[1].is_zero() {
        return Err(PwaError::Input("zero basis vector: rows are dependent".into()));
    }
    let dn = BigInt::from(delta.num);
    let dd = BigInt::from(delta.den);

    // 0-based k indexes the vector being inserted; d index is shifted by one.
    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = dot(&b[k], &b[j]);
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u.is_zero() {
                        return Err(PwaError::Input("basis rows are linearly dependent".into()));
                    }
                    d[k + 1] = u;
                }
            }
        }
        loop {
            reduce(&mut b, &mut lam, &d, k, k - 1);
            // Lovász: den (d_k d_{k-2} + lam^2) >= num d_{k-1}^2, in shifted indices
            let lhs = &dd * (&d[k + 1] * &d[k - 1] + &lam[k][k - 1] * &lam[k][k - 1]);
            let rhs = &dn * &d[k] * &d[k];
            if lhs < rhs {
                swap(&mut b, &mut lam, &mut d, k, kmax);
                if k > 1 {
                    k -= 1;
                }
                continue;
            }
            for l in (0..k.saturating_sub(1)).rev() {
                reduce(&mut b, &mut lam, &d, k, l);
            }
            k += 1;
            break;
        }
    }
    Ok(b)
}

fn reduce(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
    let two = BigInt::from(2);
    if (&lam[k][l] * &two).abs() > d[l + 1] {
        let q = round_div(&lam[k][l], &d[l + 1]);
        let bl = b[l].clone();
        for (x, y) in b[k].iter_mut().zip(&bl) {
            *x -= &q * y;
        }
        lam[k][l] -= &q * &d[l + 1];
        for i in 0..l {
            let t = &q * &lam[l][i];
            lam[k][i] -= t;
        }
    }
}

fn swap(b: &mut [Vec<BigInt>], lam: &mut [Vec<BigInt>], d: &mut [BigInt], k: usize, kmax: usize) {
    b.swap(k, k - 1);
    for j in 0..k.saturating_sub(1) {
        let t = lam[k][j].clone();
        lam[k][j] = lam[k - 1][j].clone();
        lam[k - 1][j] = t;
    }
    let l = lam[k][k - 1].clone();
    let big_b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
    for i in (k + 1)..=kmax {
        let t = lam[i][k].clone();
        lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
        lam[i][k - 1] = (&big_b * &t + &l * &lam[i][k]) / &d[k + 1];
    }
    d[k] = big_b;
}

/// Integers `q, p_j` with `|lambda_j q - p_j| <= eps`, plus the certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineResult {
    pub q: i64,
    pub p: Vec<i64>,
    /// `lambda_j q - p_j` against the input reals.
    pub residuals: Vec<f64>,
    /// `max_j |residual_j|`.
    pub epsilon: f64,
}

/// Re-check a certificate by direct multiplication: `max_j |lambda_j q - p_j|`,
/// evaluated exactly on the f64 inputs and rounded once.
pub fn certificate_error(lambdas: &[f64], q: i64, p: &[i64]) -> f64 {
    lambdas
        .iter()
        .zip(p)
        .map(|(&l, &pj)| {
            let (m, e) = dyadic(l);
            exact_residual(&m, e, q, pj).abs()
        })
        .fold(0.0, f64::max)
}

/// `x = mantissa * 2^exp` exactly.
fn dyadic(x: f64) -> (BigInt, i32) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { Sign::Plus } else { Sign::Minus };
    let exp_bits = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    (BigInt::from_biguint(sign, mant.into()), exp)
}

const MAX_ESCALATIONS: usize = 64;
const MAX_Q: i64 = 1 << 53;

/// Exact residual `lambda q - p` for a dyadic `lambda = m 2^e`, as f64.
fn exact_residual(mant: &BigInt, exp: i32, q: i64, p: i64) -> f64 {
    // lambda q - p = (m q - p 2^{-e}) 2^e
    let qb = BigInt::from(q);
    if exp >= 0 {
        let v = mant * &qb * (BigInt::one() << exp as usize) - BigInt::from(p);
        v.to_f64().unwrap_or(f64::INFINITY)
    } else {
        let v = mant * &qb - (BigInt::from(p) << (-exp) as usize);
        let f = v.to_f64().unwrap_or(f64::INFINITY);
        f * 2f64.powi(exp)
    }
}

/// Simultaneous Diophantine approximation through a Lagarias-style lattice.
///
/// Integer entries (and exact duplicates up to sign) are handled directly; the
/// remaining distinct magnitudes are embedded as
/// `row_0 = [W, S M lambda_1, ...]`, `row_j = [0, .., S M, ..]` with `M` the
/// power of two making every `M lambda_j` integral. The weight ratio `W / S`
/// is halved on every failed attempt.
pub fn simultaneous_diophantine(lambdas: &[f64], eps: f64) -> Result<DiophantineResult> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(PwaError::Input(format!("epsilon must be positive, got {eps}")));
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(PwaError::Input("non-finite value to approximate".into()));
    }
    // distinct non-integer magnitudes
    let mut values: Vec<f64> = Vec::new();
    for &l in lambdas {
        let a = l.abs();
        if a.fract() != 0.0 && !values.contains(&a) {
            values.push(a);
        }
    }
    let build = |q: i64| -> DiophantineResult {
        let p: Vec<i64> = lambdas
            .iter()
            .map(|&l| {
                let (m, e) = dyadic(l);
                nearest_multiple(&m, e, q)
            })
            .collect();
        let residuals: Vec<f64> = lambdas
            .iter()
            .zip(&p)
            .map(|(&l, &pj)| {
                let (m, e) = dyadic(l);
                exact_residual(&m, e, q, pj)
            })
            .collect();
        let epsilon = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
        DiophantineResult { q, p, residuals, epsilon }
    };
    if values.is_empty() {
        return Ok(build(1));
    }

    let parts: Vec<(BigInt, i32)> = values.iter().map(|&v| dyadic(v)).collect();
    let min_exp = parts.iter().map(|(_, e)| *e).min().unwrap_or(0).min(0);
    let m_shift = (-min_exp) as usize;
    // M * lambda_j as integers
    let scaled: Vec<BigInt> = parts
        .iter()
        .map(|(m, e)| m << (*e - min_exp) as usize)
        .collect();
    let m_big = BigInt::one() << m_shift;

    let mut best = build(1);
    let mut target_q = (1.0 / eps).ceil().max(1.0);
    let n = values.len();
    for _ in 0..MAX_ESCALATIONS {
        // balance q W ~ S M eps at q ~ target_q
        let log_ratio = m_shift as f64 + eps.log2() - target_q.log2();
        let (w, s) = if log_ratio >= 0.0 {
            (BigInt::from(2f64.powf(log_ratio).round() as u128).max(BigInt::one()), BigInt::one())
        } else {
            (BigInt::one(), big_pow2_round(-log_ratio))
        };
        let mut basis = vec![vec![BigInt::zero(); n + 1]; n + 1];
        basis[0][0] = w.clone();
        for j in 0..n {
            basis[0][j + 1] = &s * &scaled[j];
            basis[j + 1][j + 1] = &s * &m_big;
        }
        let reduced = lll_reduce(&basis, Delta::CLASSIC)?;
        for v in &reduced {
            if v[0].is_zero() {
                continue;
            }
            let q = (&v[0] / &w).abs();
            let Some(q) = q.to_i64() else { continue };
            if q == 0 || q > MAX_Q {
                continue;
            }
            let cand = build(q);
            if cand.epsilon < best.epsilon || (cand.epsilon <= eps && best.epsilon <= eps && q < best.q) {
                best = cand;
            }
        }
        if best.epsilon <= eps {
            return Ok(best);
        }
        target_q *= 2.0;
        if target_q > 4.0 * MAX_Q as f64 {
            break;
        }
    }
    Err(PwaError::PrecisionUnreachable {
        requested: eps,
        achieved: best.epsilon,
        q: best.q,
    })
}

/// `2^x` rounded to an integer, for large `x`.
fn big_pow2_round(x: f64) -> BigInt {
    let whole = x.floor();
    let frac = 2f64.powf(x - whole);
    // keep 20 fractional bits of the mantissa
    let mant = (frac * (1u64 << 20) as f64).round() as u64;
    let shift = whole as i64 - 20;
    if shift >= 0 {
        BigInt::from(mant) << shift as usize
    } else {
        (BigInt::from(mant) >> (-shift) as usize).max(BigInt::one())
    }
}

/// Nearest integer to `m 2^e q`.
fn nearest_multiple(m: &BigInt, e: i32, q: i64) -> i64 {
    let prod = m * BigInt::from(q);
    let v = if e >= 0 {
        prod << e as usize
    } else {
        let den = BigInt::one() << (-e) as usize;
        round_div(&prod, &den)
    };
    v.to_i64().unwrap_or(i64::MAX)
}
