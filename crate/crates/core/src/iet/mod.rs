//! Interval exchange transformations on `[0, total)`.

mod fast;
mod induce;
mod window;

pub use fast::ScaledIet;
pub use induce::Induced;
pub use window::ContinuityWindow;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_set::{Interval, IntervalSet};
use crate::numerics::ExactNumber;

/// A permutation of `{1, …, d}`; `image(j)` is the position interval `j` is sent to.
///
/// Indices are 0-based in the API, 1-based in text and JSON.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// From 1-based images `π(1), …, π(d)`.
    pub fn new(one_based: Vec<usize>) -> Result<Self> {
        let d = one_based.len();
        if d == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        let mut seen = vec![false; d];
        for &p in &one_based {
            if p == 0 || p > d || seen[p - 1] {
                return Err(Error::InvalidPermutation(format!("{one_based:?} is not a bijection of 1..{d}")));
            }
            seen[p - 1] = true;
        }
        Ok(Permutation {
            images: one_based.into_iter().map(|p| p - 1).collect(),
        })
    }

    /// From 0-based images.
    pub(crate) fn from_zero_based(images: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &p)| i == p)
        });
        Permutation { images }
    }

    pub fn identity(d: usize) -> Self {
        Permutation::from_zero_based((0..d).collect())
    }

    /// `(d d-1 … 1)`.
    pub fn reversal(d: usize) -> Self {
        Permutation::from_zero_based((0..d).rev().collect())
    }

    pub fn d(&self) -> usize {
        self.images.len()
    }

    /// 0-based position of interval `j` after the exchange.
    pub fn image(&self, j: usize) -> usize {
        self.images[j]
    }

    /// The interval landing at 0-based position `p`.
    pub fn preimage(&self, p: usize) -> usize {
        self.images.iter().position(|&q| q == p).expect("bijection")
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|p| p + 1).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.d()];
        for (j, &p) in self.images.iter().enumerate() {
            inv[p] = j;
        }
        Permutation::from_zero_based(inv)
    }

    /// No proper prefix `{1..k}` is mapped onto itself.
    pub fn is_irreducible(&self) -> bool {
        let mut max = 0;
        for k in 0..self.d() - 1 {
            max = max.max(self.images[k]);
            if max == k {
                return false;
            }
        }
        true
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_based()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;
    /// Accepts `2 1`, `(2 1)`, `2,1` or `[2,1]`.
    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let body = s.trim().trim_matches(|c| matches!(c, '(' | ')' | '[' | ']'));
        let v = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| parse_err("expected positive integers")))
            .collect::<Result<Vec<_>>>()?;
        Permutation::new(v)
    }
}

/// Distance on the domain: the segment `[0, total)` or the circle `R / total Z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Interval,
    Circle,
}

impl Metric {
    pub fn distance(self, x: &ExactNumber, y: &ExactNumber, total: &ExactNumber) -> ExactNumber {
        let d = (x - y).abs();
        match self {
            Metric::Interval => d,
            Metric::Circle => {
                let wrap = total - &d;
                d.min(wrap)
            }
        }
    }

    /// The open ball `B(center, radius)` inside the domain, stored half-open.
    pub fn ball(self, center: &ExactNumber, radius: &ExactNumber, total: &ExactNumber) -> IntervalSet {
        let zero = ExactNumber::zero();
        let lo = center - radius;
        let hi = center + radius;
        match self {
            Metric::Interval => IntervalSet::single(lo.max(zero), hi.min(total.clone())),
            Metric::Circle => {
                let two_r = radius + radius;
                if &two_r >= total {
                    return IntervalSet::single(zero, total.clone());
                }
                let mut parts = vec![Interval::new(lo.clone().max(zero.clone()), hi.clone().min(total.clone()))];
                if lo < zero {
                    parts.push(Interval::new(&lo + total, total.clone()));
                }
                if &hi > total {
                    parts.push(Interval::new(zero, &hi - total));
                }
                IntervalSet::from_intervals(parts)
            }
        }
    }
}

impl FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "interval" => Ok(Metric::Interval),
            "circle" => Ok(Metric::Circle),
            _ => Err(Error::Parse {
                input: s.into(),
                reason: "expected `interval` or `circle`".into(),
            }),
        }
    }
}

/// A `d`-interval exchange: lengths `l_1..l_d > 0` and a permutation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IetSpec", into = "IetSpec")]
pub struct Iet {
    lengths: Vec<ExactNumber>,
    perm: Permutation,
    total: ExactNumber,
    /// `β_0 = 0 < β_1 < … < β_d = total`
    breaks: Vec<ExactNumber>,
    /// `γ_0 = 0 < … < γ_d = total`, the left ends of image positions
    image_breaks: Vec<ExactNumber>,
    /// translation applied on each interval
    shifts: Vec<ExactNumber>,
}

#[derive(Serialize, Deserialize)]
struct IetSpec {
    perm: Permutation,
    lengths: Vec<ExactNumber>,
}

impl TryFrom<IetSpec> for Iet {
    type Error = Error;
    fn try_from(s: IetSpec) -> Result<Self> {
        Iet::new(s.lengths, s.perm)
    }
}

impl From<Iet> for IetSpec {
    fn from(t: Iet) -> Self {
        IetSpec {
            perm: t.perm,
            lengths: t.lengths,
        }
    }
}

impl Iet {
    pub fn new(lengths: Vec<ExactNumber>, perm: Permutation) -> Result<Self> {
        let d = perm.d();
        if lengths.len() != d {
            return Err(Error::InvalidLengths(format!("{} lengths for a permutation of {d}", lengths.len())));
        }
        let mut field: Option<&ExactNumber> = None;
        for l in &lengths {
            if !l.is_positive() {
                return Err(Error::InvalidLengths(format!("length {l} is not positive")));
            }
            if l.radicand().is_some() {
                if let Some(f) = field {
                    f.check_field(l)?;
                }
                field = Some(l);
            }
        }
        let mut breaks = Vec::with_capacity(d + 1);
        breaks.push(ExactNumber::zero());
        for l in &lengths {
            let next = breaks.last().unwrap() + l;
            breaks.push(next);
        }
        let total = breaks[d].clone();
        let inv = perm.inverse();
        let mut image_breaks = Vec::with_capacity(d + 1);
        image_breaks.push(ExactNumber::zero());
        for p in 0..d {
            let next = image_breaks.last().unwrap() + &lengths[inv.image(p)];
            image_breaks.push(next);
        }
        let shifts = (0..d).map(|j| &image_breaks[perm.image(j)] - &breaks[j]).collect();
        Ok(Iet {
            lengths,
            perm,
            total,
            breaks,
            image_breaks,
            shifts,
        })
    }

    /// Convenience constructor from textual lengths and 1-based images.
    pub fn parse(lengths: &[&str], perm: &[usize]) -> Result<Self> {
        let ls = lengths.iter().map(|s| s.parse()).collect::<Result<Vec<ExactNumber>>>()?;
        Iet::new(ls, Permutation::new(perm.to_vec())?)
    }

    /// Rational lengths `numerators[i] / den`.
    pub fn rational(numerators: &[i64], den: i64, perm: &[usize]) -> Result<Self> {
        let ls = numerators.iter().map(|&n| ExactNumber::ratio(n, den)).collect();
        Iet::new(ls, Permutation::new(perm.to_vec())?)
    }

    pub fn d(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[ExactNumber] {
        &self.lengths
    }

    pub fn perm(&self) -> &Permutation {
        &self.perm
    }

    pub fn total(&self) -> &ExactNumber {
        &self.total
    }

    /// `β_0, …, β_d`.
    pub fn breakpoints(&self) -> &[ExactNumber] {
        &self.breaks
    }

    /// Left ends of the image positions, `γ_0, …, γ_d`.
    pub fn image_breakpoints(&self) -> &[ExactNumber] {
        &self.image_breaks
    }

    /// Translation on interval `j`.
    pub fn shift(&self, j: usize) -> &ExactNumber {
        &self.shifts[j]
    }

    /// `I_j` (0-based).
    pub fn interval(&self, j: usize) -> Interval {
        Interval::new(self.breaks[j].clone(), self.breaks[j + 1].clone())
    }

    pub fn domain(&self) -> Interval {
        Interval::new(ExactNumber::zero(), self.total.clone())
    }

    fn check_domain(&self, x: &ExactNumber) -> Result<()> {
        if let Some(f) = self.lengths.iter().find(|l| l.radicand().is_some()) {
            f.check_field(x)?;
        }
        if x.is_negative() || x >= &self.total {
            return Err(Error::OutOfDomain(x.to_string(), self.total.to_string()));
        }
        Ok(())
    }

    /// Index of the interval containing `x`, assuming `x` is in the domain.
    fn locate_unchecked(&self, x: &ExactNumber) -> usize {
        self.breaks[1..].partition_point(|b| b <= x)
    }

    /// Index `j` with `x ∈ I_j`.
    pub fn locate(&self, x: &ExactNumber) -> Result<usize> {
        self.check_domain(x)?;
        Ok(self.locate_unchecked(x))
    }

    pub fn apply(&self, x: &ExactNumber) -> Result<ExactNumber> {
        let j = self.locate(x)?;
        Ok(x + &self.shifts[j])
    }

    pub fn apply_inverse(&self, y: &ExactNumber) -> Result<ExactNumber> {
        self.check_domain(y)?;
        Ok(self.inverse_unchecked(y))
    }

    fn inverse_unchecked(&self, y: &ExactNumber) -> ExactNumber {
        let p = self.image_breaks[1..].partition_point(|b| b <= y);
        y - &self.shifts[self.perm.preimage(p)]
    }

    pub(crate) fn apply_unchecked(&self, x: &ExactNumber) -> ExactNumber {
        x + &self.shifts[self.locate_unchecked(x)]
    }

    /// `T^m x` for `m >= 0`; rotations use the closed form `x + m α mod total`.
    pub fn orbit_point(&self, x: &ExactNumber, m: u64) -> Result<ExactNumber> {
        self.check_domain(x)?;
        if let Some(alpha) = self.as_rotation() {
            let y = x + &(&alpha * &ExactNumber::from(m));
            let wraps = (&y / &self.total).floor();
            return Ok(&y - &(&ExactNumber::from(wraps) * &self.total));
        }
        if m >= 64 && x.is_rational() {
            if let Ok(s) = self.scaled() {
                if let Some(v) = s.to_scaled(x) {
                    return Ok(s.to_exact(s.iterate(v, m)));
                }
            }
        }
        let mut y = x.clone();
        for _ in 0..m {
            y = self.apply_unchecked(&y);
        }
        Ok(y)
    }

    /// `x, Tx, …, T^{m}x`.
    pub fn orbit(&self, x: &ExactNumber, m: u64) -> Result<Vec<ExactNumber>> {
        Ok(self.orbit_iter(x)?.take(m as usize + 1).collect())
    }

    /// Endless forward orbit `x, Tx, T²x, …`.
    pub fn orbit_iter(&self, x: &ExactNumber) -> Result<Orbit<'_>> {
        self.check_domain(x)?;
        Ok(Orbit {
            t: self,
            next: x.clone(),
            rotation: self.as_rotation(),
        })
    }

    /// For `π = (2 1)` the map is `x ↦ x + l_2 mod total`; returns `l_2`.
    pub fn as_rotation(&self) -> Option<ExactNumber> {
        (self.d() == 2 && self.perm.images == [1, 0]).then(|| self.lengths[1].clone())
    }

    /// Candidate discontinuities of `T^n`: `⋃_{k<n} T^{-k}{β_1, …, β_{d-1}}`, sorted.
    pub fn discontinuities(&self, n: usize) -> Vec<ExactNumber> {
        assert!(n >= 1, "n must be positive");
        let mut set = BTreeSet::new();
        let mut current: Vec<ExactNumber> = self.breaks[1..self.d()].to_vec();
        for k in 0..n {
            if k > 0 {
                current = current.iter().map(|y| self.inverse_unchecked(y)).collect();
            }
            set.extend(current.iter().cloned());
        }
        set.into_iter().collect()
    }

    /// `e_T(n)`: the least gap between consecutive points of
    /// `discontinuities(n) ∪ {0, total}`.
    ///
    /// With both endpoints adjoined the circle reading (adjoin `0 ≡ total`,
    /// include the wrap-around gap) gives the same value. For `d = 1` this is `total`.
    pub fn min_gap(&self, n: usize) -> ExactNumber {
        let mut pts = vec![ExactNumber::zero()];
        pts.extend(self.discontinuities(n));
        pts.push(self.total.clone());
        pts.windows(2)
            .map(|w| &w[1] - &w[0])
            .min()
            .expect("at least one gap")
    }

    /// Pushes `[lo, hi) ⊆ domain` through `T`, one piece per interval it meets.
    pub fn push_interval(&self, iv: &Interval) -> Vec<Interval> {
        let mut out = Vec::new();
        if iv.is_empty() {
            return out;
        }
        let mut j = self.locate_unchecked(&iv.lo);
        let mut lo = iv.lo.clone();
        loop {
            let end = &self.breaks[j + 1];
            let hi = if &iv.hi <= end { iv.hi.clone() } else { end.clone() };
            out.push(Interval::new(&lo + &self.shifts[j], &hi + &self.shifts[j]));
            if &iv.hi <= end {
                break;
            }
            lo = hi;
            j += 1;
        }
        out
    }

    /// Pushes `[lo, hi)` through `T^{-1}`.
    pub fn pull_interval(&self, iv: &Interval) -> Vec<Interval> {
        let mut out = Vec::new();
        if iv.is_empty() {
            return out;
        }
        let mut p = self.image_breaks[1..].partition_point(|b| b <= &iv.lo);
        let mut lo = iv.lo.clone();
        loop {
            let end = &self.image_breaks[p + 1];
            let s = &self.shifts[self.perm.preimage(p)];
            let hi = if &iv.hi <= end { iv.hi.clone() } else { end.clone() };
            out.push(Interval::new(&lo - s, &hi - s));
            if &iv.hi <= end {
                break;
            }
            lo = hi;
            p += 1;
        }
        out
    }

    /// `T(S)`.
    pub fn image_of(&self, s: &IntervalSet) -> IntervalSet {
        s.iter().flat_map(|iv| self.push_interval(iv)).collect()
    }

    /// `T^{-1}(S)`.
    pub fn preimage_of(&self, s: &IntervalSet) -> IntervalSet {
        s.iter().flat_map(|iv| self.pull_interval(iv)).collect()
    }

    /// True when `T` has no breakpoint strictly inside `iv`.
    pub fn is_continuous_on(&self, iv: &Interval) -> bool {
        !self.breaks[1..self.d()].iter().any(|b| &iv.lo < b && b < &iv.hi)
    }

    /// Same permutation and proportional lengths.
    pub fn is_rescaling_of(&self, other: &Iet) -> bool {
        if self.perm != other.perm {
            return false;
        }
        let ratio = &self.total / &other.total;
        self.lengths
            .iter()
            .zip(&other.lengths)
            .all(|(a, b)| a == &(b * &ratio))
    }

    /// The same IET rescaled by a positive factor.
    pub fn rescaled(&self, factor: &ExactNumber) -> Result<Iet> {
        let ls = self
            .lengths
            .iter()
            .map(|l| l.checked_mul(factor))
            .collect::<Result<Vec<_>>>()?;
        Iet::new(ls, self.perm.clone())
    }

    /// Fixed-width fast path: all lengths rational with a common denominator
    /// `Q` and `total·Q < 2^63`.
    pub fn scaled(&self) -> Result<ScaledIet> {
        let mut q = BigInt::one();
        for l in &self.lengths {
            let (_, den) = l.numer_denom().ok_or(Error::Overflow("fast path needs rational lengths"))?;
            q = q.lcm(&den);
        }
        let nums = self
            .lengths
            .iter()
            .map(|l| {
                let (n, d) = l.numer_denom().unwrap();
                (n * (&q / d)).to_u64()
            })
            .collect::<Option<Vec<u64>>>()
            .ok_or(Error::Overflow("fast path"))?;
        let denom = q.to_u64().ok_or(Error::Overflow("fast path"))?;
        let sum: u128 = nums.iter().map(|&n| n as u128).sum();
        if sum >= 1u128 << 63 || denom >= 1u64 << 63 {
            return Err(Error::Overflow("fast path"));
        }
        Ok(ScaledIet::new(&nums, denom, &self.perm))
    }
}

/// Forward orbit iterator; rotations step by one addition.
pub struct Orbit<'a> {
    t: &'a Iet,
    next: ExactNumber,
    rotation: Option<ExactNumber>,
}

impl Iterator for Orbit<'_> {
    type Item = ExactNumber;
    fn next(&mut self) -> Option<ExactNumber> {
        let following = match &self.rotation {
            Some(a) => {
                let z = &self.next + a;
                if &z >= self.t.total() {
                    &z - self.t.total()
                } else {
                    z
                }
            }
            None => self.t.apply_unchecked(&self.next),
        };
        Some(std::mem::replace(&mut self.next, following))
    }
}

impl fmt::Display for Iet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ls: Vec<String> = self.lengths.iter().map(ToString::to_string).collect();
        write!(f, "{} [{}]", self.perm, ls.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use proptest::prelude::*;

    fn t37() -> Iet {
        Iet::rational(&[3, 7], 10, &[2, 1]).unwrap()
    }

    #[test]
    fn permutation_basics() {
        let p: Permutation = "(3 1 2)".parse().unwrap();
        assert_eq!(p.one_based(), vec![3, 1, 2]);
        assert_eq!(p.inverse().one_based(), vec![2, 3, 1]);
        assert!(p.is_irreducible());
        assert!(!Permutation::new(vec![1, 3, 2]).unwrap().is_irreducible());
        assert!(!Permutation::new(vec![2, 1, 3]).unwrap().is_irreducible());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert_eq!(p.to_string(), "(3 1 2)");
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,1,2]");
    }

    #[test]
    fn apply_examples() {
        let t = t37();
        assert_eq!(t.apply(&q(1, 10)).unwrap(), q(8, 10));
        assert_eq!(t.apply(&q(3, 10)).unwrap(), q(0, 1));
        assert_eq!(t.apply_inverse(&q(0, 1)).unwrap(), q(3, 10));
        assert_eq!(t.apply_inverse(&q(8, 10)).unwrap(), q(1, 10));
        assert!(matches!(t.apply(&q(1, 1)), Err(Error::OutOfDomain(..))));
        assert!(matches!(t.apply(&q(-1, 10)), Err(Error::OutOfDomain(..))));
        let id = Iet::rational(&[1, 2, 3], 6, &[1, 2, 3]).unwrap();
        assert_eq!(id.apply(&q(2, 7)).unwrap(), q(2, 7));
        assert_eq!(id.apply_inverse(&q(2, 7)).unwrap(), q(2, 7));
    }

    #[test]
    fn discontinuities_and_gaps() {
        let t = t37();
        assert_eq!(t.discontinuities(1), vec![q(3, 10)]);
        assert_eq!(t.discontinuities(2), vec![q(3, 10), q(6, 10)]);
        assert_eq!(t.min_gap(1), q(3, 10));
        assert_eq!(t.min_gap(2), q(3, 10));
        let id = Iet::rational(&[1, 2, 3], 6, &[1, 2, 3]).unwrap();
        assert_eq!(id.discontinuities(5), vec![q(1, 6), q(1, 2)]);
        let one = Iet::rational(&[1], 1, &[1]).unwrap();
        assert_eq!(one.min_gap(3), q(1, 1));
    }

    #[test]
    fn json_round_trip() {
        let t = Iet::parse(&["5/8", "3/8"], &[2, 1]).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"perm":[2,1],"lengths":["5/8","3/8"]}"#);
        let back: Iet = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<Iet>(r#"{"perm":[2,1],"lengths":["5/8","-3/8"]}"#).is_err());
    }

    #[test]
    fn golden_orbit_shortcut_matches_iteration() {
        let a = ExactNumber::quadratic(-1, 1, 2, 5).unwrap();
        let t = Iet::new(vec![&ExactNumber::one() - &a, a], Permutation::reversal(2)).unwrap();
        let x = q(1, 3);
        let orbit = t.orbit(&x, 50).unwrap();
        let mut y = x.clone();
        for (m, p) in orbit.iter().enumerate() {
            assert_eq!(&y, p);
            assert_eq!(t.orbit_point(&x, m as u64).unwrap(), y);
            y = t.apply(&y).unwrap();
        }
    }

    #[test]
    fn balls() {
        let one = q(1, 1);
        let b = Metric::Interval.ball(&q(1, 100), &q(1, 20), &one);
        assert_eq!(b.measure(), q(6, 100));
        let c = Metric::Circle.ball(&q(1, 100), &q(1, 20), &one);
        assert_eq!(c.measure(), q(1, 10));
        assert!(c.contains(&q(99, 100)));
        assert_eq!(Metric::Circle.distance(&q(1, 10), &q(9, 10), &one), q(1, 5));
    }

    pub(crate) fn arb_iet(max_d: usize) -> impl Strategy<Value = Iet> {
        (1..=max_d)
            .prop_flat_map(|d| (proptest::collection::vec(1i64..50, d), Just(d)).prop_flat_map(|(ls, d)| {
                (Just(ls), Just((0..d).collect::<Vec<_>>()).prop_shuffle())
            }))
            .prop_map(|(ls, p)| {
                let den: i64 = ls.iter().sum();
                Iet::rational(&ls, den, &p.iter().map(|x| x + 1).collect::<Vec<_>>()).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]
        #[test]
        fn inverse_undoes_apply(t in arb_iet(6), num in 0u64..1000) {
            let x = &ExactNumber::from(num) / &ExactNumber::from(1000u64);
            let y = t.apply(&x).unwrap();
            prop_assert_eq!(t.apply_inverse(&y).unwrap(), x.clone());
            prop_assert_eq!(t.apply(&t.apply_inverse(&x).unwrap()).unwrap(), x);
        }
    }

    proptest! {
        #[test]
        fn measure_preserved(t in arb_iet(6), cuts in proptest::collection::vec((0i64..97, 1i64..20), 0..6)) {
            let s: IntervalSet = cuts.into_iter()
                .map(|(a, l)| Interval::new(q(a, 97), q((a + l).min(97), 97)))
                .collect();
            let img = t.image_of(&s);
            prop_assert_eq!(img.measure(), s.measure());
            prop_assert_eq!(t.preimage_of(&img), s);
        }

        #[test]
        fn discontinuity_count_bound(t in arb_iet(6), n in 1usize..20) {
            prop_assert!(t.discontinuities(n).len() <= n * (t.d() - 1));
        }
    }
}
