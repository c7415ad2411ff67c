//! Shrinking-target radii, orbit-ball unions, hitting times and separation checks.

mod hits;
mod separation;

pub use hits::{
    first_hit, hit_union, hit_union_enclosure, hitting_time, hitting_time_exponents, limsup_profile, Checkpoint,
    ExperimentResult, ExponentEstimate,
};
pub use separation::{check_separated2_bound, check_separated_bound, separated_count, SeparationCheck};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ln_enclosure, ExactNumber};

/// Symbolic radius sequence `a_1, a_2, …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TargetSequence {
    /// `c / i`
    Harmonic { c: ExactNumber },
    /// `c / i^s`
    Power { c: ExactNumber, s: u32 },
    /// `c / (i ln(i + 1))`; only enclosures are exact.
    LogHarmonic { c: ExactNumber },
    /// `b_i = a_{r^k}` for `r^{k-1} <= i < r^k`.
    Blocked { base: Box<TargetSequence>, r: u64 },
    /// `1 / (2^j N_j)` for `2^{j-1} N_{j-1} <= i < 2^j N_j`, with `N_0 = 1`; lists `N_1, N_2, …`.
    Rigid {
        #[serde(alias = "N")]
        n: Vec<u64>,
    },
    Explicit {
        #[serde(alias = "list")]
        values: Vec<ExactNumber>,
    },
}

/// Smallest `k` with `i < r^k`, and `r^k`.
fn block_of(i: u64, r: u64) -> Result<(u32, u64)> {
    let mut k = 0u32;
    let mut p = 1u64;
    while p <= i {
        p = p.checked_mul(r).ok_or(Error::Overflow("blocked index"))?;
        k += 1;
    }
    Ok((k, p))
}

impl TargetSequence {
    /// Exact `a_i`, `i >= 1`.
    pub fn eval(&self, i: u64) -> Result<ExactNumber> {
        if i == 0 {
            return Err(Error::OutOfRange(0));
        }
        match self {
            TargetSequence::Harmonic { c } => Ok(c / &ExactNumber::from(i)),
            TargetSequence::Power { c, s } => Ok(c / &ExactNumber::from(BigInt::from(i).pow(*s))),
            TargetSequence::LogHarmonic { .. } => Err(Error::Inexact),
            TargetSequence::Blocked { base, r } => {
                if *r < 2 {
                    return Err(Error::InvalidParams("block base must be at least 2".into()));
                }
                let (_, p) = block_of(i, *r)?;
                base.eval(p)
            }
            TargetSequence::Rigid { n } => {
                let (j, nj) = rigid_block(n, i)?;
                Ok(ExactNumber::ratio(1u64, BigInt::from(nj) << j))
            }
            TargetSequence::Explicit { values } => values.get(i as usize - 1).cloned().ok_or(Error::OutOfRange(i)),
        }
    }

    /// Rational bounds `lo <= a_i <= hi`; tight (`lo == hi`) for the exact families.
    pub fn enclosure(&self, i: u64, bits: u32) -> Result<(BigRational, BigRational)> {
        match self {
            TargetSequence::LogHarmonic { c } => {
                if i == 0 {
                    return Err(Error::OutOfRange(0));
                }
                let (clo, chi) = c.rational_enclosure(bits);
                let ln = ln_enclosure(&BigRational::from_integer((i + 1).into()), bits);
                let iq = BigRational::from_integer(i.into());
                Ok((clo / (&iq * &ln.hi), chi / (&iq * &ln.lo)))
            }
            TargetSequence::Blocked { base, r } if base.is_inexact() => {
                if i == 0 {
                    return Err(Error::OutOfRange(0));
                }
                let (_, p) = block_of(i, *r)?;
                base.enclosure(p, bits)
            }
            _ => Ok(self.eval(i)?.rational_enclosure(bits)),
        }
    }

    /// True when only enclosures are available.
    pub fn is_inexact(&self) -> bool {
        match self {
            TargetSequence::LogHarmonic { .. } => true,
            TargetSequence::Blocked { base, .. } => base.is_inexact(),
            _ => false,
        }
    }

    /// Last index covered by a finite family, if any.
    pub fn len(&self) -> Option<u64> {
        match self {
            TargetSequence::Explicit { values } => Some(values.len() as u64),
            TargetSequence::Rigid { n } => {
                let last = n.last().copied().unwrap_or(1);
                Some((last << n.len()) - 1)
            }
            _ => None,
        }
    }

    /// `Σ_{i=from}^{to} a_i`, exactly.
    pub fn partial_sum(&self, from: u64, to: u64) -> Result<ExactNumber> {
        (from..=to).map(|i| self.eval(i)).sum()
    }
}

/// Stage `j >= 1` and `N_j` with `2^{j-1} N_{j-1} <= i < 2^j N_j`.
pub(crate) fn rigid_block(n: &[u64], i: u64) -> Result<(u32, u64)> {
    let mut prev_end = 1u64;
    for (idx, &nj) in n.iter().enumerate() {
        let j = idx as u32 + 1;
        let end = nj.checked_shl(j).filter(|e| e >> j == nj).ok_or(Error::Overflow("rigid block"))?;
        if i >= prev_end && i < end {
            return Ok((j, nj));
        }
        prev_end = end;
    }
    Err(Error::OutOfRange(i))
}

/// Smallest `r` in `[2, r_max]` for which `r^{i-1} a_{r^i}` is non-increasing on
/// `[i0, horizon]` for some `i0 <= horizon / 2`; a finite-horizon verdict.
pub fn is_two_standard(seq: &TargetSequence, r_max: u64, horizon: u32) -> Option<u64> {
    (2..=r_max).find(|&r| two_standard_for(seq, r, horizon).unwrap_or(false))
}

fn two_standard_for(seq: &TargetSequence, r: u64, horizon: u32) -> Result<bool> {
    // enclosures of v_i = r^{i-1} a_{r^i}, i = 1..=horizon
    let mut v = Vec::with_capacity(horizon as usize);
    for i in 1..=horizon {
        let ri = r.checked_pow(i).ok_or(Error::Overflow("r^i"))?;
        let (lo, hi) = seq.enclosure(ri, 64)?;
        let scale = BigRational::from_integer(BigInt::from(r).pow(i - 1));
        v.push((lo * &scale, hi * &scale));
    }
    // last index where a certified non-increase fails
    let mut i0 = 1;
    for idx in 1..v.len() {
        let certified = if seq.is_inexact() {
            v[idx].1 <= v[idx - 1].0
        } else {
            v[idx].0 <= v[idx - 1].0
        };
        if !certified {
            i0 = idx + 1;
        }
    }
    Ok(i0 as u32 <= horizon / 2)
}

/// Convenience: the `Rigid` sequence for the given stages.
pub fn rigid(n: Vec<u64>) -> TargetSequence {
    TargetSequence::Rigid { n }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;

    fn harmonic(c: ExactNumber) -> TargetSequence {
        TargetSequence::Harmonic { c }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(harmonic(q(1, 10)).eval(4).unwrap(), q(1, 40));
        let b = TargetSequence::Blocked {
            base: Box::new(harmonic(q(1, 1))),
            r: 2,
        };
        assert_eq!(b.eval(3).unwrap(), q(1, 4));
        assert_eq!(b.eval(1).unwrap(), q(1, 2));
        assert_eq!(b.eval(4).unwrap(), q(1, 8));
        let r = rigid(vec![2, 5, 9]);
        // blocks [1,4), [4,20), [20,72)
        assert_eq!(r.eval(1).unwrap(), q(1, 4));
        assert_eq!(r.eval(3).unwrap(), q(1, 4));
        assert_eq!(r.eval(4).unwrap(), q(1, 20));
        assert_eq!(r.eval(19).unwrap(), q(1, 20));
        assert_eq!(r.eval(20).unwrap(), q(1, 72));
        assert_eq!(r.eval(72), Err(Error::OutOfRange(72)));
        assert_eq!(r.len(), Some(71));
        let e = TargetSequence::Explicit { values: vec![q(1, 2)] };
        assert_eq!(e.eval(2), Err(Error::OutOfRange(2)));
        let p = TargetSequence::Power { c: q(1, 1), s: 2 };
        assert_eq!(p.eval(3).unwrap(), q(1, 9));
        assert_eq!(TargetSequence::LogHarmonic { c: q(1, 1) }.eval(3), Err(Error::Inexact));
    }

    #[test]
    fn log_harmonic_enclosure() {
        let s = TargetSequence::LogHarmonic { c: q(1, 1) };
        let (lo, hi) = s.enclosure(10, 60).unwrap();
        let v = 1.0 / (10.0 * 11f64.ln());
        let f = |x: &BigRational| ExactNumber::from(x.clone()).to_f64();
        assert!(f(&lo) <= v && v <= f(&hi));
        assert!(f(&hi) - f(&lo) < 1e-12);
    }

    #[test]
    fn json_shape() {
        let b: TargetSequence =
            serde_json::from_str(r#"{"family":"blocked","r":2,"base":{"family":"harmonic","c":"1/10"}}"#).unwrap();
        assert_eq!(
            b,
            TargetSequence::Blocked {
                base: Box::new(harmonic(q(1, 10))),
                r: 2
            }
        );
        let r: TargetSequence = serde_json::from_str(r#"{"family":"rigid","N":[2,3]}"#).unwrap();
        assert_eq!(r, rigid(vec![2, 3]));
        assert_eq!(serde_json::to_string(&harmonic(q(1, 10))).unwrap(), r#"{"family":"harmonic","c":"1/10"}"#);
    }

    #[test]
    fn two_standard_examples() {
        assert_eq!(is_two_standard(&harmonic(q(1, 1)), 5, 12), Some(2));
        assert_eq!(is_two_standard(&TargetSequence::Power { c: q(1, 1), s: 2 }, 5, 12), Some(2));
        let inc = TargetSequence::Explicit {
            values: (1..=5000).map(|i| q(i, 1)).collect(),
        };
        assert_eq!(is_two_standard(&inc, 5, 10), None);
        assert_eq!(is_two_standard(&TargetSequence::LogHarmonic { c: q(1, 1) }, 5, 10), Some(2));
    }

    #[test]
    fn blocked_partial_sums_stay_comparable() {
        // property 1 of standard sequences: blocking costs at most a factor r^2
        let base = harmonic(q(1, 1));
        let r = 2u64;
        let b = TargetSequence::Blocked {
            base: Box::new(base.clone()),
            r,
        };
        for k in 1..=5u32 {
            let m = 4u64.pow(k);
            let sa = base.partial_sum(1, m).unwrap();
            let sb = b.partial_sum(1, m).unwrap();
            let r2 = ExactNumber::from(r * r);
            assert!(sb <= sa && sa <= &(&r2 * &sb) + &r2);
        }
    }

    #[test]
    fn rigid_is_nonincreasing() {
        let r = rigid(vec![3, 7, 20, 41]);
        let vals: Vec<_> = (1..=r.len().unwrap()).map(|i| r.eval(i).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    }
}
