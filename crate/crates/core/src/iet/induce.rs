use crate::error::{Error, Result};
use crate::interval_set::Interval;
use crate::numerics::ExactNumber;

use super::{Iet, Permutation};

/// First-return map of `T` to `[u, v)`, re-based to `[0, v - u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Induced {
    pub iet: Iet,
    /// Return time of each exchanged interval of `iet`.
    pub return_times: Vec<u64>,
    /// Left end `u` of the inducing interval, in the original coordinates.
    pub offset: ExactNumber,
}

struct Piece {
    src: Interval,
    cur_lo: ExactNumber,
    steps: u64,
}

impl Iet {
    /// First-return map to `J = [u, v)`.
    ///
    /// `J` is carried forward as a set of pieces, each split at the breakpoints
    /// it meets and at the ends of `J`; a piece retires once it lands in `J`.
    /// Retired pieces that are adjacent at both ends with the same return time
    /// are merged, so an identity exchange induces to a single interval.
    pub fn induce(&self, u: &ExactNumber, v: &ExactNumber, cap: u64) -> Result<Induced> {
        if u.is_negative() || u >= v || v > self.total() {
            return Err(Error::InvalidParams(format!(
                "inducing interval [{u}, {v}) is not inside [0, {})",
                self.total()
            )));
        }
        let mut active = vec![Piece {
            src: Interval::new(u.clone(), v.clone()),
            cur_lo: u.clone(),
            steps: 0,
        }];
        // (src, destination lo, return time)
        let mut done: Vec<(Interval, ExactNumber, u64)> = Vec::new();
        while let Some(p) = active.pop() {
            if p.steps >= cap {
                return Err(Error::CapExceeded(cap));
            }
            let cur = Interval::new(p.cur_lo.clone(), &p.cur_lo + &p.src.length());
            let mut offset = p.src.lo.clone();
            for image in self.push_interval(&cur) {
                let len = image.length();
                let src = Interval::new(offset.clone(), &offset + &len);
                offset = src.hi.clone();
                // split the image at u and v
                let cuts = [
                    (image.lo.clone(), image.hi.clone().min(u.clone())),
                    (image.lo.clone().max(u.clone()), image.hi.clone().min(v.clone())),
                    (image.lo.clone().max(v.clone()), image.hi.clone()),
                ];
                for (k, (a, b)) in cuts.into_iter().enumerate() {
                    if a >= b {
                        continue;
                    }
                    let s = Interval::new(&src.lo + &(&a - &image.lo), &src.lo + &(&b - &image.lo));
                    if k == 1 {
                        done.push((s, a, p.steps + 1));
                    } else {
                        active.push(Piece {
                            src: s,
                            cur_lo: a,
                            steps: p.steps + 1,
                        });
                    }
                }
            }
        }
        done.sort_by(|x, y| x.0.lo.cmp(&y.0.lo));
        let mut merged: Vec<(Interval, ExactNumber, u64)> = Vec::with_capacity(done.len());
        for (src, dst, t) in done {
            if let Some(last) = merged.last_mut() {
                let last_dst_hi = &last.1 + &last.0.length();
                if last.2 == t && last.0.hi == src.lo && last_dst_hi == dst {
                    last.0.hi = src.hi;
                    continue;
                }
            }
            merged.push((src, dst, t));
        }
        let mut order: Vec<usize> = (0..merged.len()).collect();
        order.sort_by(|&a, &b| merged[a].1.cmp(&merged[b].1));
        let mut images = vec![0; merged.len()];
        for (pos, &j) in order.iter().enumerate() {
            images[j] = pos;
        }
        let lengths = merged.iter().map(|m| m.0.length()).collect();
        let iet = Iet::new(lengths, Permutation::from_zero_based(images))?;
        Ok(Induced {
            iet,
            return_times: merged.iter().map(|m| m.2).collect(),
            offset: u.clone(),
        })
    }
}
