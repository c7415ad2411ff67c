use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, Metric};
use crate::interval_set::{Interval, IntervalSet};
use crate::numerics::ExactNumber;

/// Largest subset of `points` with pairwise distances `>= delta` (greedy sweep
/// over the sorted points, optimal on the line).
pub fn separated_count(points: &[ExactNumber], delta: &ExactNumber) -> usize {
    let mut sorted = points.to_vec();
    sorted.sort();
    let mut count = 0;
    let mut last: Option<&ExactNumber> = None;
    for p in &sorted {
        if last.map_or(true, |l| &(p - l) >= delta) {
            count += 1;
            last = Some(p);
        }
    }
    count
}

/// Outcome of a separation-lemma check: `holds` iff `rhs <= 0` or `lhs > rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub lhs: ExactNumber,
    pub rhs: ExactNumber,
    pub holds: bool,
}

impl SeparationCheck {
    fn new(lhs: ExactNumber, rhs: ExactNumber) -> Self {
        let holds = !rhs.is_positive() || lhs > rhs;
        SeparationCheck { lhs, rhs, holds }
    }
}

fn min_spacing(points: &[ExactNumber]) -> Option<ExactNumber> {
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.windows(2).map(|w| &w[1] - &w[0]).min()
}

/// For `n` points that are `e/n` separated, a union `S` of `t` intervals of
/// measure `ε`, and `δ < e/(2n)`, checks
/// `λ(⋃ B(z_i, δ) \ S) > (n − 2t − nε/e) δ` with balls taken on the real line.
pub fn check_separated_bound(
    points: &[ExactNumber],
    s: &IntervalSet,
    e: &ExactNumber,
    delta: &ExactNumber,
) -> Result<SeparationCheck> {
    let n = ExactNumber::from(points.len() as u64);
    if points.is_empty() || !e.is_positive() || !delta.is_positive() {
        return Err(Error::PreconditionViolated("need points, e > 0 and δ > 0".into()));
    }
    let spacing = e / &n;
    if min_spacing(points).is_some_and(|g| g < spacing) {
        return Err(Error::PreconditionViolated(format!("points are not {spacing} separated")));
    }
    if delta >= &(&spacing / &ExactNumber::from(2u64)) {
        return Err(Error::PreconditionViolated(format!("δ = {delta} is not below e/(2n)")));
    }
    let balls = IntervalSet::from_intervals(points.iter().map(|z| Interval::new(z - delta, z + delta)));
    let lhs = balls.difference(s).measure();
    let t = ExactNumber::from(s.len() as u64);
    let eps = s.measure();
    let coeff = &(&n - &(&t + &t)) - &(&(&n * &eps) / e);
    Ok(SeparationCheck::new(lhs, &coeff * delta))
}

/// Inverse-image variant: with `e_T(r^{k+1}) > e/r^{k+1}`, `S` a union of at
/// most `r^k` intervals of measure `ε`, and `δ < e/(2r^{k+1})`, checks
/// `λ(⋃_{i=r^k}^{r^{k+1}} T^{-i} B(y, δ) \ S) > ¼(½(r^{k+1} − r^k) − 2r^k − (ε/e) r^{k+1}) δ`.
pub fn check_separated2_bound(
    t: &Iet,
    y: &ExactNumber,
    s: &IntervalSet,
    e: &ExactNumber,
    delta: &ExactNumber,
    r: u64,
    k: u32,
) -> Result<SeparationCheck> {
    if r < 2 || !e.is_positive() || !delta.is_positive() {
        return Err(Error::PreconditionViolated("need r >= 2, e > 0 and δ > 0".into()));
    }
    t.locate(y)?;
    let rk = r.checked_pow(k).ok_or(Error::Overflow("r^k"))?;
    let rk1 = rk.checked_mul(r).ok_or(Error::Overflow("r^(k+1)"))?;
    let (rk_x, rk1_x) = (ExactNumber::from(rk), ExactNumber::from(rk1));
    let spacing = e / &rk1_x;
    if t.min_gap(rk1 as usize) <= spacing {
        return Err(Error::PreconditionViolated(format!("e_T({rk1}) is not above {spacing}")));
    }
    if delta >= &(&spacing / &ExactNumber::from(2u64)) {
        return Err(Error::PreconditionViolated(format!("δ = {delta} is not below e/(2r^(k+1))")));
    }
    if s.len() as u64 > rk {
        return Err(Error::PreconditionViolated(format!("S has more than {rk} components")));
    }
    let mut pre = Metric::Interval.ball(y, delta, t.total());
    for _ in 0..rk {
        pre = t.preimage_of(&pre);
    }
    let mut union = pre.clone();
    for _ in rk..rk1 {
        pre = t.preimage_of(&pre);
        union = union.union(&pre);
    }
    let lhs = union.difference(s).measure();
    let eps = s.measure();
    let half = ExactNumber::ratio(1u64, 2u64);
    let inner = &(&(&half * &(&rk1_x - &rk_x)) - &(&rk_x + &rk_x)) - &(&(&eps / e) * &rk1_x);
    let rhs = &(&inner * delta) / &ExactNumber::from(4u64);
    Ok(SeparationCheck::new(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use proptest::prelude::*;

    /// Exhaustive maximum over all subsets.
    fn brute_separated(points: &[ExactNumber], delta: &ExactNumber) -> usize {
        let n = points.len();
        (0u32..1 << n)
            .filter(|mask| {
                let sub: Vec<_> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i].clone()).collect();
                sub.iter()
                    .enumerate()
                    .all(|(i, a)| sub[i + 1..].iter().all(|b| &(a - b).abs() >= delta))
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn separated_count_examples() {
        let pts = [q(1, 10), q(3, 20), q(3, 10), q(9, 10)];
        assert_eq!(separated_count(&pts, &q(1, 5)), 3);
        assert_eq!(brute_separated(&pts, &q(1, 5)), 3);
        assert_eq!(separated_count(&pts, &q(2, 1)), 1);
        let even: Vec<_> = (0..7).map(|i| q(i, 5)).collect();
        assert_eq!(separated_count(&even, &q(1, 5)), 7);
    }

    #[test]
    fn quarter_spacing_example() {
        let pts = [q(0, 1), q(1, 4), q(1, 2), q(3, 4)];
        let c = check_separated_bound(&pts, &IntervalSet::new(), &q(1, 1), &q(1, 16)).unwrap();
        assert_eq!(c.lhs, q(8, 16));
        assert_eq!(c.rhs, q(4, 16));
        assert!(c.holds);
        // many intervals: bound is vacuous
        let s = IntervalSet::from_intervals((0..4).map(|i| Interval::new(q(2 * i, 20), q(2 * i + 1, 20))));
        let c = check_separated_bound(&pts, &s, &q(1, 1), &q(1, 16)).unwrap();
        assert!(!c.rhs.is_positive() && c.holds);
    }

    #[test]
    fn separated_preconditions() {
        let pts = [q(0, 1), q(1, 10)];
        assert!(matches!(
            check_separated_bound(&pts, &IntervalSet::new(), &q(1, 1), &q(1, 100)),
            Err(Error::PreconditionViolated(_))
        ));
        let pts = [q(0, 1), q(1, 2)];
        assert!(matches!(
            check_separated_bound(&pts, &IntervalSet::new(), &q(1, 1), &q(1, 4)),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn separated2_on_a_rotation() {
        let t = Iet::rational(&[13, 8], 21, &[2, 1]).unwrap();
        let (r, k) = (2, 1);
        let e = &t.min_gap(4) * &q(2, 1);
        let c = check_separated2_bound(&t, &q(1, 3), &IntervalSet::new(), &e, &q(1, 1000), r, k).unwrap();
        assert!(c.holds, "{c:?}");
        assert!(matches!(
            check_separated2_bound(&t, &q(1, 3), &IntervalSet::new(), &(&e * &q(4, 1)), &q(1, 1000), r, k),
            Err(Error::PreconditionViolated(_))
        ));
    }

    proptest! {
        #[test]
        fn greedy_matches_brute_force(nums in prop::collection::vec(0i64..40, 1..10), d in 1i64..15) {
            let pts: Vec<_> = nums.iter().map(|&n| q(n, 40)).collect();
            let delta = q(d, 40);
            prop_assert_eq!(separated_count(&pts, &delta), brute_separated(&pts, &delta));
        }
    }
}
