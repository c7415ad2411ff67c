//! Rauzy–Veech induction: steps, matrices, paths, towers.

mod class;
mod good;
mod perron;

pub use class::{rauzy_class, step_permutation};
pub use good::{is_i_good, orbit_separation, GoodWitness};
pub use perron::{characteristic_polynomial, perron_iet};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, Permutation};
use crate::interval_set::{Interval, IntervalSet};
use crate::numerics::ExactNumber;

/// Which end is cut off: `A` when `T`'s last interval is shorter, `B` when the
/// interval landing last is shorter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RvStep {
    A,
    B,
}

impl RvStep {
    pub fn letter(self) -> char {
        match self {
            RvStep::A => 'a',
            RvStep::B => 'b',
        }
    }

    /// Parses a string such as `"abba"`.
    pub fn parse_word(s: &str) -> Result<Vec<RvStep>> {
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                'a' | 'A' => Ok(RvStep::A),
                'b' | 'B' => Ok(RvStep::B),
                _ => Err(Error::Parse {
                    input: s.into(),
                    reason: format!("unexpected step letter `{c}`"),
                }),
            })
            .collect()
    }

    pub fn word(steps: &[RvStep]) -> String {
        steps.iter().map(|s| s.letter()).collect()
    }
}

impl fmt::Display for RvStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for RvStep {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match RvStep::parse_word(s)?.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "expected a single letter".into(),
            }),
        }
    }
}

/// Square non-negative integer matrix, row-major. Products overflow-check.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RvMatrix {
    d: usize,
    data: Vec<u64>,
}

impl Serialize for RvMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RvMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<u64>>::deserialize(d)?;
        RvMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

impl RvMatrix {
    pub fn identity(d: usize) -> Self {
        let mut data = vec![0; d * d];
        for i in 0..d {
            data[i * d + i] = 1;
        }
        RvMatrix { d, data }
    }

    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParams("matrix must be square and non-empty".into()));
        }
        Ok(RvMatrix {
            d,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.d + j]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.d + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.d).map(<[u64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.d).map(|i| self.get(i, j)).collect()
    }

    /// `|C_j|`, the sum of column `j`.
    pub fn column_sum(&self, j: usize) -> u64 {
        (0..self.d).map(|i| self.get(i, j)).sum()
    }

    pub fn column_sums(&self) -> Vec<u64> {
        (0..self.d).map(|j| self.column_sum(j)).collect()
    }

    /// `|C_max|`.
    pub fn max_column_sum(&self) -> u64 {
        self.column_sums().into_iter().max().unwrap_or(0)
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|&x| x > 0)
    }

    pub fn checked_mul(&self, other: &RvMatrix) -> Result<RvMatrix> {
        assert_eq!(self.d, other.d);
        let d = self.d;
        let mut out = RvMatrix { d, data: vec![0; d * d] };
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0u64;
                for k in 0..d {
                    let term = self.get(i, k).checked_mul(other.get(k, j)).ok_or(Error::Overflow("matrix product"))?;
                    acc = acc.checked_add(term).ok_or(Error::Overflow("matrix product"))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// `M · v`.
    pub fn apply(&self, v: &[ExactNumber]) -> Vec<ExactNumber> {
        (0..self.d)
            .map(|i| {
                (0..self.d)
                    .filter(|&j| self.get(i, j) != 0)
                    .map(|j| &ExactNumber::from(self.get(i, j)) * &v[j])
                    .sum()
            })
            .collect()
    }

    /// Exact determinant (fraction-free elimination).
    pub fn determinant(&self) -> BigInt {
        let d = self.d;
        let mut a: Vec<Vec<BigRational>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| BigRational::from_integer(x.into())).collect())
            .collect();
        let mut det = BigRational::one();
        for c in 0..d {
            let Some(p) = (c..d).find(|&r| !a[r][c].is_zero()) else {
                return BigInt::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..d {
                let f = &a[r][c] / &a[c][c];
                for k in c..d {
                    let sub = &f * &a[c][k];
                    a[r][k] -= sub;
                }
            }
        }
        det.to_integer()
    }

    /// Single-step matrix `M(T, 1)` for permutation `perm` and the given step.
    pub fn step(perm: &Permutation, step: RvStep) -> RvMatrix {
        let d = perm.d();
        let k = perm.preimage(d - 1);
        let mut m = RvMatrix { d, data: vec![0; d * d] };
        match step {
            RvStep::A => {
                for i in 0..d {
                    if i < k {
                        m.set(i, i, 1);
                    } else if i == k {
                        m.set(k, k, 1);
                        m.set(k, k + 1, 1);
                    } else if i < d - 1 {
                        m.set(i, i + 1, 1);
                    } else {
                        m.set(i, k + 1, 1);
                    }
                }
            }
            RvStep::B => {
                m = RvMatrix::identity(d);
                m.set(d - 1, k, 1);
            }
        }
        m
    }

    /// In-place right multiplication by `M(π, 1)` via its column action.
    fn push_step(&mut self, perm: &Permutation, step: RvStep) -> Result<()> {
        let d = self.d;
        let k = perm.preimage(d - 1);
        let col = |m: &RvMatrix, j: usize| m.column(j);
        let old = self.clone();
        let sum: Vec<u64> = col(&old, k)
            .iter()
            .zip(col(&old, d - 1))
            .map(|(a, b)| a.checked_add(b).ok_or(Error::Overflow("induction matrix")))
            .collect::<Result<_>>()?;
        match step {
            RvStep::A => {
                for j in (k + 2..d).rev() {
                    for i in 0..d {
                        self.set(i, j, old.get(i, j - 1));
                    }
                }
                for i in 0..d {
                    self.set(i, k + 1, sum[i]);
                }
            }
            RvStep::B => {
                for i in 0..d {
                    self.set(i, k, sum[i]);
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for RvMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.rows() {
            let cells: Vec<String> = r.iter().map(u64::to_string).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Letter of the next step, or `NotInGeneralPosition { depth: 0 }`.
pub fn classify(t: &Iet) -> Result<RvStep> {
    if !t.perm().is_irreducible() {
        return Err(Error::Reducible(t.perm().to_string()));
    }
    let d = t.d();
    let k = t.perm().preimage(d - 1);
    // δ_+ = total − l_d, δ_- = total − l_k; the larger one wins
    match t.lengths()[d - 1].cmp(&t.lengths()[k]) {
        std::cmp::Ordering::Less => Ok(RvStep::A),
        std::cmp::Ordering::Greater => Ok(RvStep::B),
        std::cmp::Ordering::Equal => Err(Error::NotInGeneralPosition { depth: 0 }),
    }
}

/// One step of induction: the letter, `R(T)` on `[0, δ_max)` and `M(T, 1)`.
pub fn rv_step(t: &Iet) -> Result<(RvStep, Iet, RvMatrix)> {
    let step = classify(t)?;
    let next = apply_step(t, step)?;
    Ok((step, next, RvMatrix::step(t.perm(), step)))
}

fn apply_step(t: &Iet, step: RvStep) -> Result<Iet> {
    let d = t.d();
    let k = t.perm().preimage(d - 1);
    let ls = t.lengths();
    let lengths = match step {
        RvStep::A => {
            let mut v = Vec::with_capacity(d);
            v.extend_from_slice(&ls[..k]);
            v.push(&ls[k] - &ls[d - 1]);
            v.push(ls[d - 1].clone());
            v.extend_from_slice(&ls[k + 1..d - 1]);
            v
        }
        RvStep::B => {
            let mut v = ls.to_vec();
            v[d - 1] = &ls[d - 1] - &ls[k];
            v
        }
    };
    Iet::new(lengths, step_permutation(t.perm(), step))
}

/// Outcome of `n` induction steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RvRecord {
    #[serde(serialize_with = "serialize_word")]
    pub steps: Vec<RvStep>,
    /// `M(T, n)`.
    pub matrix: RvMatrix,
    /// `R^n(T)`, acting on `I^{(n)} = [0, interval_length)`.
    pub induced: Iet,
    pub interval_length: ExactNumber,
}

fn serialize_word<S: serde::Serializer>(steps: &[RvStep], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&RvStep::word(steps))
}

impl RvRecord {
    pub fn word(&self) -> String {
        RvStep::word(&self.steps)
    }
}

/// `n` steps of induction.
pub fn rv_path(t: &Iet, n: usize) -> Result<RvRecord> {
    if !t.perm().is_irreducible() {
        return Err(Error::Reducible(t.perm().to_string()));
    }
    let mut cur = t.clone();
    let mut matrix = RvMatrix::identity(t.d());
    let mut steps = Vec::with_capacity(n);
    for depth in 0..n {
        let step = classify(&cur).map_err(|e| match e {
            Error::NotInGeneralPosition { .. } => Error::NotInGeneralPosition { depth },
            other => other,
        })?;
        matrix.push_step(cur.perm(), step)?;
        cur = apply_step(&cur, step)?;
        steps.push(step);
    }
    Ok(RvRecord {
        steps,
        matrix,
        interval_length: cur.total().clone(),
        induced: cur,
    })
}

/// Rokhlin tower over `I_j^{(n)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub base: Interval,
    pub height: u64,
    /// `T^i(base)` for `i = 0..height`, in time order.
    pub floors: Vec<Interval>,
}

impl Tower {
    pub fn floor_set(&self) -> IntervalSet {
        self.floors.iter().cloned().collect()
    }
}

/// The tower over the `j`-th interval of `R^n(T)`, of height `|C_j(M(T, n))|`.
pub fn tower(t: &Iet, n: usize, j: usize) -> Result<Tower> {
    let rec = rv_path(t, n)?;
    if j >= t.d() {
        return Err(Error::InvalidParams(format!("column {j} out of range")));
    }
    let base = rec.induced.interval(j);
    let height = rec.matrix.column_sum(j);
    let mut floors = Vec::with_capacity(height as usize);
    let mut cur = base.clone();
    for _ in 0..height {
        floors.push(cur.clone());
        let mut pieces = t.push_interval(&cur);
        debug_assert_eq!(pieces.len(), 1, "T is continuous on every floor below the top");
        cur = pieces.swap_remove(0);
    }
    Ok(Tower { base, height, floors })
}

/// `1/ν < |C_i|/|C_j| < ν` for all `i, j`.
pub fn is_balanced(m: &RvMatrix, nu: &ExactNumber) -> Result<bool> {
    if nu <= &ExactNumber::one() {
        return Err(Error::InvalidParams(format!("balance constant {nu} must exceed 1")));
    }
    let sums = m.column_sums();
    if sums.contains(&0) {
        return Err(Error::ZeroColumn);
    }
    let lo = *sums.iter().min().unwrap();
    let hi = *sums.iter().max().unwrap();
    Ok(&ExactNumber::from(lo) * nu > ExactNumber::from(hi))
}

/// `S_{L, π(T)}` with `L` the normalized column `i` of `M(T, n + k)`; shares
/// its first `n` induction steps with `T` whenever `M(R^n T, k)` is positive.
pub fn iet_from_column(t: &Iet, n: usize, k: usize, i: usize) -> Result<Iet> {
    if i >= t.d() {
        return Err(Error::InvalidParams(format!("column {i} out of range")));
    }
    let head = rv_path(t, n)?;
    let tail = rv_path(&head.induced, k)?;
    if !tail.matrix.is_positive() {
        return Err(Error::NotPositive);
    }
    let full = head.matrix.checked_mul(&tail.matrix)?;
    let col = full.column(i);
    let sum: u64 = col.iter().sum();
    let lengths = col.iter().map(|&c| ExactNumber::ratio(c, sum)).collect();
    Iet::new(lengths, t.perm().clone())
}
