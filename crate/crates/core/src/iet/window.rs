use std::collections::BTreeSet;

use crate::interval_set::Interval;

use super::Iet;

/// Times `p <= 0 <= q` such that `T^i J`, `p <= i < q`, are pairwise disjoint
/// intervals on each of which `T` is continuous.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContinuityWindow {
    pub p: i64,
    pub q: i64,
}

impl Iet {
    fn has_image_break_inside(&self, iv: &Interval) -> bool {
        let g = self.image_breakpoints();
        g[1..self.d()].iter().any(|b| &iv.lo < b && b < &iv.hi)
    }

    /// Finds a window of length `n` around time 0 in which the floors of `J`
    /// are disjoint and carried continuously, by pushing `J` both ways.
    pub fn continuity_window(&self, j: &Interval, n: usize) -> Option<ContinuityWindow> {
        // forward: floors[i] = T^i J while T stays continuous
        let mut forward = vec![j.clone()];
        while forward.len() <= n {
            let last = forward.last().unwrap();
            if !self.is_continuous_on(last) {
                break;
            }
            let img = self.push_interval(last).pop().unwrap();
            forward.push(img);
        }
        // number of leading floors on which T is continuous
        let continuous = forward.iter().take_while(|f| self.is_continuous_on(f)).count();
        let mut backward: Vec<Interval> = Vec::new();
        while backward.len() < n {
            let last = backward.last().unwrap_or(j);
            if self.has_image_break_inside(last) {
                break;
            }
            backward.push(self.pull_interval(last).pop().unwrap());
        }
        let floor = |i: i64| -> &Interval {
            if i >= 0 {
                &forward[i as usize]
            } else {
                &backward[(-i - 1) as usize]
            }
        };
        let n = n as i64;
        for p in (-(backward.len() as i64)..=0).rev() {
            let q = p + n;
            if q > continuous as i64 {
                continue;
            }
            let mut floors: Vec<&Interval> = (p..q).map(floor).collect();
            floors.sort_by(|a, b| a.lo.cmp(&b.lo));
            if floors.windows(2).all(|w| w[0].hi <= w[1].lo) {
                return Some(ContinuityWindow { p, q });
            }
        }
        None
    }

    /// True when the points `T^k β_i`, `0 < i < d`, `|k| <= horizon`, are pairwise distinct.
    pub fn discontinuity_orbits_distinct(&self, horizon: usize) -> bool {
        let mut seen = BTreeSet::new();
        for b in &self.breakpoints()[1..self.d()] {
            let mut fwd = b.clone();
            let mut bwd = b.clone();
            if !seen.insert(b.clone()) {
                return false;
            }
            for _ in 0..horizon {
                fwd = self.apply_unchecked(&fwd);
                bwd = self.inverse_unchecked(&bwd);
                if !seen.insert(fwd.clone()) || !seen.insert(bwd.clone()) {
                    return false;
                }
            }
        }
        true
    }
}
