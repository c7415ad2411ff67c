use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::iet::{Iet, Permutation};
use crate::numerics::ExactNumber;

use super::{step_permutation, RvMatrix, RvStep};

/// Coefficients `c_0, …, c_d` of `det(xI − M) = Σ c_k x^k` (Faddeev–LeVerrier).
pub fn characteristic_polynomial(m: &RvMatrix) -> Vec<BigInt> {
    let d = m.d();
    let a: Vec<Vec<BigInt>> = m.rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let mut c = vec![BigInt::zero(); d + 1];
    c[d] = BigInt::from(1);
    let mut mk = vec![vec![BigInt::zero(); d]; d];
    for k in 1..=d {
        // M_k = A M_{k-1} + c_{d-k+1} I
        let mut next = matmul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &c[d - k + 1];
        }
        mk = next;
        let am = matmul(&a, &mk);
        let tr: BigInt = (0..d).map(|i| am[i][i].clone()).sum();
        c[d - k] = -(tr / BigInt::from(k));
    }
    c
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| (0..d).map(|k| &a[i][k] * &b[k][j]).sum()).collect())
        .collect()
}

fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// Remainder of `p` modulo the monic quadratic `x² − s x + t`.
fn rem_quadratic(p: &[BigInt], s: &BigInt, t: &BigInt) -> (BigInt, BigInt) {
    let mut r: Vec<BigInt> = p.to_vec();
    for k in (2..r.len()).rev() {
        let lead = r[k].clone();
        if lead.is_zero() {
            continue;
        }
        r[k] = BigInt::zero();
        r[k - 1] += &lead * s;
        r[k - 2] -= &lead * t;
    }
    (r[0].clone(), r.get(1).cloned().unwrap_or_default())
}

/// Floating estimate of the Perron root of a positive matrix by power iteration.
fn perron_estimate(m: &RvMatrix) -> f64 {
    let d = m.d();
    let mut v = vec![1.0f64; d];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let w: Vec<f64> = (0..d).map(|i| (0..d).map(|j| m.get(i, j) as f64 * v[j]).sum()).collect();
        let norm: f64 = w.iter().sum();
        lambda = norm / v.iter().sum::<f64>();
        v = w.into_iter().map(|x| x / norm).collect();
    }
    lambda
}

/// Exact Perron root when it is rational or quadratic.
fn exact_perron_root(m: &RvMatrix) -> Result<ExactNumber> {
    let p = characteristic_polynomial(m);
    let est = perron_estimate(m);
    let r = BigInt::from(est.round() as i128);
    if eval(&p, &r).is_zero() {
        return Ok(ExactNumber::from(r));
    }
    // det M = ±1, so the minimal polynomial of the root has constant term ±1
    for t in [1i64, -1] {
        let guess = (est + t as f64 / est).round() as i128;
        for s in [guess - 1, guess, guess + 1] {
            let (s, tb) = (BigInt::from(s), BigInt::from(t));
            let (r0, r1) = rem_quadratic(&p, &s, &tb);
            if !(r0.is_zero() && r1.is_zero()) {
                continue;
            }
            let disc = &s * &s - BigInt::from(4) * &tb;
            if !disc.is_positive() {
                continue;
            }
            let Some(disc) = disc.to_u64() else {
                return Err(Error::Overflow("discriminant"));
            };
            let root = ExactNumber::quadratic(s.clone(), 1, 2, disc)?;
            if (root.to_f64() - est).abs() <= 1e-6 * est {
                return Ok(root);
            }
        }
    }
    Err(Error::DegreeTooHigh)
}

/// A vector spanning the kernel of `M − λI`, assuming it is one-dimensional.
fn kernel_vector(m: &RvMatrix, lambda: &ExactNumber) -> Result<Vec<ExactNumber>> {
    let d = m.d();
    let mut a: Vec<Vec<ExactNumber>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let x = ExactNumber::from(m.get(i, j));
                    if i == j {
                        &x - lambda
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..d {
        let Some(p) = (row..d).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip()?;
        for k in col..d {
            a[row][k] = &a[row][k] * &inv;
        }
        for r in 0..d {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for k in col..d {
                    let sub = &f * &a[row][k];
                    a[r][k] = &a[r][k] - &sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..d).filter(|c| !pivots.contains(c)).collect();
    if free.len() != 1 {
        return Err(Error::InvalidParams(format!("eigenspace has dimension {}", free.len())));
    }
    let f = free[0];
    let mut v = vec![ExactNumber::zero(); d];
    v[f] = ExactNumber::one();
    for (r, &c) in pivots.iter().enumerate() {
        v[c] = -&a[r][f];
    }
    Ok(v)
}

/// The IET with permutation `perm` fixed, up to scale, by the induction loop:
/// lengths form the Perron eigenvector of the loop's matrix, normalized to total 1.
pub fn perron_iet(perm: &Permutation, word: &[RvStep]) -> Result<Iet> {
    if word.is_empty() || !perm.is_irreducible() {
        return Err(Error::NotALoop);
    }
    let mut m = RvMatrix::identity(perm.d());
    let mut p = perm.clone();
    for &s in word {
        m = m.checked_mul(&RvMatrix::step(&p, s))?;
        p = step_permutation(&p, s);
    }
    if &p != perm {
        return Err(Error::NotALoop);
    }
    if !m.is_positive() {
        return Err(Error::NotPositive);
    }
    let lambda = exact_perron_root(&m)?;
    let mut v = kernel_vector(&m, &lambda)?;
    if v.iter().all(ExactNumber::is_negative) {
        v = v.iter().map(|x| -x).collect();
    }
    // a positive eigenvector of a positive matrix certifies the Perron root
    if !v.iter().all(ExactNumber::is_positive) {
        return Err(Error::DegreeTooHigh);
    }
    let total: ExactNumber = v.iter().sum();
    let lengths = v.iter().map(|x| x / &total).collect();
    Iet::new(lengths, perm.clone())
}
