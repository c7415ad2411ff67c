//! Finite unions of half-open intervals with exact endpoints.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ExactNumber;

/// Half-open interval `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(ExactNumber, ExactNumber)", into = "(ExactNumber, ExactNumber)")]
pub struct Interval {
    pub lo: ExactNumber,
    pub hi: ExactNumber,
}

impl From<(ExactNumber, ExactNumber)> for Interval {
    fn from((lo, hi): (ExactNumber, ExactNumber)) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for (ExactNumber, ExactNumber) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

impl Interval {
    pub fn new(lo: ExactNumber, hi: ExactNumber) -> Self {
        Interval { lo, hi }
    }

    pub fn length(&self) -> ExactNumber {
        &self.hi - &self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn contains(&self, x: &ExactNumber) -> bool {
        &self.lo <= x && x < &self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo >= other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi <= other.hi { &self.hi } else { &other.hi };
        (lo < hi).then(|| Interval::new(lo.clone(), hi.clone()))
    }

    pub fn translate(&self, by: &ExactNumber) -> Interval {
        Interval::new(&self.lo + by, &self.hi + by)
    }
}

/// Sorted, pairwise disjoint, non-adjacent union of non-empty half-open intervals.
///
/// Balls are stored half-open; this changes no measure, and membership of
/// the finitely many endpoints is never used for measure statements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Interval>::deserialize(d)?;
        Ok(IntervalSet::from_intervals(raw))
    }
}

impl IntervalSet {
    pub fn new() -> Self {
        IntervalSet::default()
    }

    pub fn single(lo: ExactNumber, hi: ExactNumber) -> Self {
        IntervalSet::from_intervals([Interval::new(lo, hi)])
    }

    /// Normalizes an arbitrary collection: drops empties, sorts, merges overlaps and touching ends.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(iter: I) -> Self {
        let mut v: Vec<Interval> = iter.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_unstable_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Checks every endpoint lives in one common field.
    pub fn validate(&self) -> Result<()> {
        let mut field: Option<u64> = None;
        for iv in &self.intervals {
            for x in [&iv.lo, &iv.hi] {
                if let Some(d) = x.radicand() {
                    match field {
                        Some(f) if f != d => return Err(Error::MixedField(f, d)),
                        _ => field = Some(d),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    /// Number of connected components.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> ExactNumber {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: &ExactNumber) -> bool {
        let k = self.intervals.partition_point(|iv| &iv.lo <= x);
        k > 0 && x < &self.intervals[k - 1].hi
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.intervals.iter().chain(&other.intervals).cloned())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if let Some(x) = a[i].intersect(&b[j]) {
                out.push(x);
            }
            if a[i].hi < b[j].hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let b = &other.intervals;
        let mut j = 0;
        for iv in &self.intervals {
            let mut lo = iv.lo.clone();
            while j < b.len() && b[j].hi <= lo {
                j += 1;
            }
            let mut k = j;
            while k < b.len() && b[k].lo < iv.hi {
                if b[k].lo > lo {
                    out.push(Interval::new(lo.clone(), b[k].lo.clone()));
                }
                if b[k].hi > lo {
                    lo = b[k].hi.clone();
                }
                k += 1;
            }
            if lo < iv.hi {
                out.push(Interval::new(lo, iv.hi.clone()));
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.difference(other).is_empty()
    }

    pub fn translate(&self, by: &ExactNumber) -> IntervalSet {
        IntervalSet {
            intervals: self.intervals.iter().map(|i| i.translate(by)).collect(),
        }
    }

    /// Restriction to `[lo, hi)`.
    pub fn clip(&self, lo: &ExactNumber, hi: &ExactNumber) -> IntervalSet {
        self.intersection(&IntervalSet::single(lo.clone(), hi.clone()))
    }
}

impl FromIterator<Interval> for IntervalSet {
    fn from_iter<T: IntoIterator<Item = Interval>>(iter: T) -> Self {
        IntervalSet::from_intervals(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use proptest::prelude::*;

    fn iv(a: i64, b: i64, d: i64) -> Interval {
        Interval::new(q(a, d), q(b, d))
    }

    #[test]
    fn normalization_merges_touching_and_overlapping() {
        let s = IntervalSet::from_intervals([iv(3, 5, 10), iv(0, 1, 10), iv(1, 2, 10), iv(4, 7, 10), iv(8, 8, 10)]);
        assert_eq!(s.intervals(), &[iv(0, 2, 10), iv(3, 7, 10)]);
        assert_eq!(s.measure(), q(6, 10));
        assert!(s.contains(&q(0, 1)) && s.contains(&q(1, 10)) && !s.contains(&q(2, 10)));
    }

    #[test]
    fn set_operations() {
        let a = IntervalSet::from_intervals([iv(0, 4, 10), iv(6, 10, 10)]);
        let b = IntervalSet::from_intervals([iv(2, 7, 10)]);
        assert_eq!(a.intersection(&b).intervals(), &[iv(2, 4, 10), iv(6, 7, 10)]);
        assert_eq!(a.difference(&b).intervals(), &[iv(0, 2, 10), iv(7, 10, 10)]);
        assert_eq!(b.difference(&a).intervals(), &[iv(4, 6, 10)]);
        assert_eq!(a.union(&b).intervals(), &[iv(0, 10, 10)]);
        assert!(IntervalSet::from_intervals([iv(1, 2, 10)]).is_subset(&a));
        assert!(!b.is_subset(&a));
    }

    #[test]
    fn json_shape() {
        let s = IntervalSet::from_intervals([iv(1, 2, 8)]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"[["1/8","1/4"]]"#);
        let back: IntervalSet = serde_json::from_str(r#"[["1/4","1/2"],["0/1","1/4"]]"#).unwrap();
        assert_eq!(back.intervals(), &[iv(0, 1, 2)]);
    }

    fn set() -> impl Strategy<Value = IntervalSet> {
        proptest::collection::vec((0i64..100, 1i64..20), 0..8)
            .prop_map(|v| v.into_iter().map(|(a, l)| iv(a, a + l, 100)).collect())
    }

    proptest! {
        #[test]
        fn inclusion_exclusion(a in set(), b in set()) {
            let lhs = a.union(&b).measure() + a.intersection(&b).measure();
            prop_assert_eq!(lhs, a.measure() + b.measure());
            prop_assert_eq!(a.difference(&b).measure() + a.intersection(&b).measure(), a.measure());
        }

        #[test]
        fn normalized_invariants(a in set()) {
            for w in a.intervals().windows(2) {
                prop_assert!(w[0].hi < w[1].lo);
            }
            for i in a.iter() {
                prop_assert!(i.lo < i.hi);
            }
        }
    }
}
