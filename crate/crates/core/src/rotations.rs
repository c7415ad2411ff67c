//! Circle rotations as 2-IETs: continued fractions, three-gap structure and
//! the growth exponent of convergent denominators.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::{Iet, Permutation};
use crate::numerics::{ln_enclosure, Enclosure, ExactNumber};

/// Partial quotients `a_0; a_1, a_2, …` with convergents `p_k/q_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub quotients: Vec<BigInt>,
    /// `(p_k, q_k)` for each quotient.
    pub convergents: Vec<(BigInt, BigInt)>,
    /// The expansion ended because `α` is rational.
    pub terminated: bool,
    /// `(start, length)` of the detected period of quotient indices, for quadratic `α`.
    pub period: Option<(usize, usize)>,
}

impl ContinuedFraction {
    pub fn denominators(&self) -> impl Iterator<Item = &BigInt> {
        self.convergents.iter().map(|c| &c.1)
    }

    /// Largest `a_k` with `k >= 1`.
    pub fn max_quotient(&self) -> Option<&BigInt> {
        self.quotients.iter().skip(1).max()
    }
}

/// Continued fraction of `α > 0` up to the quotient `a_n` (so at most `n + 1` quotients).
pub fn cf_expand(alpha: &ExactNumber, n: usize) -> Result<ContinuedFraction> {
    if !alpha.is_positive() {
        return Err(Error::InvalidParams(format!("continued fraction of non-positive {alpha}")));
    }
    let mut quotients = Vec::new();
    let mut convergents: Vec<(BigInt, BigInt)> = Vec::new();
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let mut seen: BTreeMap<ExactNumber, usize> = BTreeMap::new();
    let mut x = alpha.clone();
    let mut terminated = false;
    let mut period = None;
    for k in 0..=n {
        if k > 0 && period.is_none() && !x.is_rational() {
            if let Some(&start) = seen.get(&x) {
                period = Some((start, k - start));
            } else {
                seen.insert(x.clone(), k);
            }
        }
        let a = x.floor();
        let p = &a * &p1 + &p2;
        let q = &a * &q1 + &q2;
        convergents.push((p.clone(), q.clone()));
        (p2, q2, p1, q1) = (p1, q1, p, q);
        let frac = &x - &ExactNumber::from(a.clone());
        quotients.push(a);
        if frac.is_zero() {
            terminated = true;
            break;
        }
        x = frac.recip()?;
    }
    Ok(ContinuedFraction {
        quotients,
        convergents,
        terminated,
        period,
    })
}

/// The rotation `x ↦ x + α mod 1` as the 2-IET with lengths `(1 − α, α)`.
pub fn rotation_iet(alpha: &ExactNumber) -> Result<Iet> {
    if !alpha.is_positive() || alpha >= &ExactNumber::one() {
        return Err(Error::InvalidParams(format!("rotation number {alpha} is not in (0, 1)")));
    }
    Iet::new(vec![&ExactNumber::one() - alpha, alpha.clone()], Permutation::reversal(2))
}

/// `(√5 − 1)/2`.
pub fn golden() -> ExactNumber {
    ExactNumber::quadratic(-1, 1, 2, 5).expect("valid surd")
}

/// Distinct circle gaps with multiplicities.
pub type GapMultiset = Vec<(ExactNumber, u64)>;

/// Gaps cut on the unit circle by `0, α, 2α, …, nα`, sorted by length.
///
/// With `N = n + 1` points, let `u` and `v` be the indices in `1..=n` of the
/// points nearest to 0 from the right and from the left; the gaps are
/// `{uα}` (`N − u` times), `1 − {vα}` (`N − v` times) and their sum
/// (`u + v − N` times). `u` and `v` come from a subtractive Euclid walk,
/// accelerated by division, so large `n` is cheap.
pub fn three_gaps(alpha: &ExactNumber, n: u64) -> GapMultiset {
    assert!(n >= 1, "n must be positive");
    let one = ExactNumber::one();
    let frac = alpha - &ExactNumber::from(alpha.floor());
    let big_n = n + 1;
    if frac.is_zero() {
        return vec![(one, 1)];
    }
    if let Some(r) = frac.as_rational() {
        let q = r.denom();
        if q <= &BigInt::from(n) {
            let q64 = u64::try_from(q).expect("q <= n");
            return vec![(ExactNumber::ratio(1, q64), q64)];
        }
    }
    let (mut u, mut v) = (1u64, 1u64);
    let mut left = frac.clone();
    let mut right = &one - &frac;
    loop {
        if left < right {
            // advance v by multiples of u while the point stays left of 1
            let fits = (right.clone() / left.clone()).ceil() - 1;
            let t = bounded_steps(&fits, (n - v) / u);
            if t == 0 {
                break;
            }
            right = &right - &(&ExactNumber::from(t) * &left);
            v += t * u;
        } else if right < left {
            let fits = (left.clone() / right.clone()).ceil() - 1;
            let t = bounded_steps(&fits, (n - u) / v);
            if t == 0 {
                break;
            }
            left = &left - &(&ExactNumber::from(t) * &right);
            u += t * v;
        } else {
            break;
        }
    }
    let mut gaps = vec![
        (left.clone(), big_n - u),
        (right.clone(), big_n - v),
        (&left + &right, (u + v).saturating_sub(big_n)),
    ];
    gaps.retain(|g| g.1 > 0);
    gaps.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: GapMultiset = Vec::new();
    for (g, m) in gaps {
        match out.last_mut() {
            Some(last) if last.0 == g => last.1 += m,
            _ => out.push((g, m)),
        }
    }
    out
}

fn bounded_steps(fits: &BigInt, limit: u64) -> u64 {
    if fits < &BigInt::from(limit) {
        u64::try_from(fits).unwrap_or(0)
    } else {
        limit
    }
}

/// The same gaps by sorting all the points; an oracle for `three_gaps`.
pub fn three_gaps_bruteforce(alpha: &ExactNumber, n: u64) -> GapMultiset {
    let one = ExactNumber::one();
    let frac = alpha - &ExactNumber::from(alpha.floor());
    let mut pts = vec![ExactNumber::zero()];
    let mut x = ExactNumber::zero();
    for _ in 0..n {
        x = &x + &frac;
        if x >= one {
            x = &x - &one;
        }
        pts.push(x.clone());
    }
    pts.sort();
    pts.dedup();
    pts.push(one);
    let mut gaps: BTreeMap<ExactNumber, u64> = BTreeMap::new();
    for w in pts.windows(2) {
        *gaps.entry(&w[1] - &w[0]).or_default() += 1;
    }
    gaps.into_iter().collect()
}

/// Measure of the union of open balls of radius `radius` about `N` points
/// cutting the circle of circumference `total` into the given gaps.
pub fn circle_ball_union_measure(gaps: &GapMultiset, radius: &ExactNumber, total: &ExactNumber) -> ExactNumber {
    let two_r = radius + radius;
    if &two_r >= total {
        return total.clone();
    }
    gaps.iter()
        .map(|(g, m)| &ExactNumber::from(*m) * &g.clone().min(two_r.clone()))
        .sum()
}

/// Certified finite-horizon growth exponent of convergent denominators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KurzweilReport {
    /// Enclosure of `max_{1<=k<=n} ln(q_k)/k`.
    pub exponent: Enclosure,
    /// Per-index enclosures of `ln(q_k)/k`, `k = 1..`.
    pub per_index: Vec<Enclosure>,
    /// `max a_k`, `k >= 1`.
    pub max_quotient: BigInt,
    /// The expansion of a rational `α` ended before `n`.
    pub terminated: bool,
}

impl KurzweilReport {
    /// Badly-approximable certificate on the horizon: every `a_k <= bound`.
    pub fn quotients_bounded_by(&self, bound: u64) -> bool {
        self.max_quotient <= BigInt::from(bound)
    }
}

/// Enclosure of `ln(q)/k`.
pub fn log_growth(q: &BigInt, k: usize, bits: u32) -> Enclosure {
    let e = ln_enclosure(&BigRational::from_integer(q.clone()), bits);
    e.scale(&BigRational::new(BigInt::one(), BigInt::from(k)))
}

pub fn kurzweil_exponent(alpha: &ExactNumber, n: usize) -> Result<KurzweilReport> {
    if n == 0 {
        return Err(Error::InvalidParams("horizon must be positive".into()));
    }
    let cf = cf_expand(alpha, n)?;
    let per_index: Vec<Enclosure> = cf
        .convergents
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, (_, q))| log_growth(q, k, 64))
        .collect();
    let exponent = if per_index.is_empty() {
        Enclosure::point(BigRational::zero())
    } else {
        Enclosure {
            lo: per_index.iter().map(|e| e.lo.clone()).max().unwrap(),
            hi: per_index.iter().map(|e| e.hi.clone()).max().unwrap(),
        }
    };
    let max_quotient = cf.max_quotient().cloned().unwrap_or_default();
    debug_assert!(!max_quotient.is_negative());
    Ok(KurzweilReport {
        exponent,
        per_index,
        max_quotient,
        terminated: cf.terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cf_examples() {
        let g = cf_expand(&golden(), 10).unwrap();
        assert_eq!(g.quotients, ints(&[0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]));
        let qs: Vec<BigInt> = g.denominators().cloned().collect();
        assert_eq!(qs[..7], ints(&[1, 1, 2, 3, 5, 8, 13])[..]);
        assert_eq!(g.period, Some((1, 1)));
        let r = cf_expand(&q(3, 8), 10).unwrap();
        assert_eq!(r.quotients, ints(&[0, 2, 1, 2]));
        assert_eq!(r.denominators().cloned().collect::<Vec<_>>(), ints(&[1, 2, 3, 8]));
        assert!(r.terminated);
        assert_eq!(cf_expand(&q(1, 2), 5).unwrap().quotients, ints(&[0, 2]));
        // sqrt(3) - 1 = [0; 1, 2, 1, 2, ...]
        let s = ExactNumber::quadratic(-1, 1, 1, 3).unwrap();
        let c = cf_expand(&s, 8).unwrap();
        assert_eq!(c.quotients, ints(&[0, 1, 2, 1, 2, 1, 2, 1, 2]));
        assert_eq!(c.period, Some((1, 2)));
    }

    #[test]
    fn convergent_bounds() {
        let a = ExactNumber::quadratic(1, 1, 7, 2).unwrap();
        let c = cf_expand(&a, 20).unwrap();
        for k in 0..c.convergents.len() - 1 {
            let (p, qk) = &c.convergents[k];
            let qn = &c.convergents[k + 1].1;
            if k >= 1 {
                assert!(qn > qk);
            }
            let err = (&a - &ExactNumber::from(BigRational::new(p.clone(), qk.clone()))).abs();
            let bound = ExactNumber::from(BigRational::new(BigInt::one(), qk * qn));
            assert!(err < bound);
        }
    }

    #[test]
    fn rotation_formula() {
        let t = rotation_iet(&q(1, 4)).unwrap();
        assert_eq!(t.lengths(), &[q(3, 4), q(1, 4)]);
        assert_eq!(t.apply(&q(9, 10)).unwrap(), q(3, 20));
        for k in 0..1000 {
            let x = q(k, 1000);
            let mut y = &x + &q(1, 4);
            if y >= q(1, 1) {
                y = &y - &q(1, 1);
            }
            assert_eq!(t.apply(&x).unwrap(), y);
        }
    }

    #[test]
    fn three_gap_examples() {
        let a = golden();
        let gaps = three_gaps(&a, 2);
        let two_a_minus_1 = &(&a + &a) - &q(1, 1);
        assert_eq!(gaps, vec![(two_a_minus_1, 1), (&q(1, 1) - &a, 2)]);
        assert_eq!(three_gaps(&q(1, 4), 3), vec![(q(1, 4), 4)]);
        assert_eq!(three_gaps_bruteforce(&q(1, 4), 3), vec![(q(1, 4), 4)]);
    }

    #[test]
    fn kurzweil_golden() {
        let rep = kurzweil_exponent(&golden(), 200).unwrap();
        let mid = rep.exponent.midpoint_f64();
        assert!((mid - 0.4812).abs() < 0.01, "{mid}");
        assert!(rep.quotients_bounded_by(1));
        let r = kurzweil_exponent(&q(3, 8), 10).unwrap();
        assert!(r.terminated);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn fast_three_gaps_match_sorting(num in 1i64..10_000, den in 2i64..10_000, n in 1u64..400) {
            prop_assume!(num < den);
            let a = q(num, den);
            let fast = three_gaps(&a, n);
            prop_assert!(fast.len() <= 3);
            prop_assert_eq!(fast, three_gaps_bruteforce(&a, n));
        }

        #[test]
        fn quadratic_three_gaps_match_sorting(a in -20i64..20, b in 1i64..5, c in 2i64..30, n in 1u64..200) {
            let x = ExactNumber::quadratic(a, b, c, 7).unwrap();
            let fast = three_gaps(&x, n);
            prop_assert!(fast.len() <= 3);
            prop_assert_eq!(fast, three_gaps_bruteforce(&x, n));
        }
    }
}
