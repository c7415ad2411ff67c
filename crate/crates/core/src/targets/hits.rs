use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, Metric};
use crate::interval_set::IntervalSet;
use crate::numerics::{ln2_enclosure, ln_enclosure, Enclosure, ExactNumber};

use super::TargetSequence;

fn check_range(n: u64, m: u64) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::InvalidParams(format!("need 1 <= N <= M, got N={n}, M={m}")));
    }
    Ok(())
}

/// `⋃_{i=N}^{M} B(T^i x, r(i))`, normalized once at the end.
fn union_with<F>(t: &Iet, x: &ExactNumber, n: u64, m: u64, metric: Metric, radius: F) -> Result<IntervalSet>
where
    F: Fn(u64) -> Result<ExactNumber>,
{
    check_range(n, m)?;
    let start = t.orbit_point(x, n)?;
    let mut parts = Vec::with_capacity((m - n + 1) as usize);
    for (i, z) in (n..=m).zip(t.orbit_iter(&start)?) {
        parts.extend(metric.ball(&z, &radius(i)?, t.total()).iter().cloned());
    }
    Ok(IntervalSet::from_intervals(parts))
}

/// Exact `⋃_{i=N}^{M} B(T^i x, a_i)`; `Inexact` for transcendental radii.
pub fn hit_union(t: &Iet, x: &ExactNumber, seq: &TargetSequence, n: u64, m: u64, metric: Metric) -> Result<IntervalSet> {
    union_with(t, x, n, m, metric, |i| seq.eval(i))
}

/// Inner and outer unions built from the lower and upper radius bounds;
/// the true union lies between them.
pub fn hit_union_enclosure(
    t: &Iet,
    x: &ExactNumber,
    seq: &TargetSequence,
    n: u64,
    m: u64,
    metric: Metric,
    bits: u32,
) -> Result<(IntervalSet, IntervalSet)> {
    if !seq.is_inexact() {
        let u = hit_union(t, x, seq, n, m, metric)?;
        return Ok((u.clone(), u));
    }
    let inner = union_with(t, x, n, m, metric, |i| Ok(seq.enclosure(i, bits)?.0.into()))?;
    let outer = union_with(t, x, n, m, metric, |i| Ok(seq.enclosure(i, bits)?.1.into()))?;
    Ok((inner, outer))
}

/// Decides `d < a_i`, refining enclosures of inexact radii as needed.
fn closer_than(d: &ExactNumber, seq: &TargetSequence, i: u64) -> Result<bool> {
    if !seq.is_inexact() {
        return Ok(d < &seq.eval(i)?);
    }
    for bits in [64, 128, 256, 512] {
        let (lo, hi) = seq.enclosure(i, bits)?;
        if d < &ExactNumber::from(lo) {
            return Ok(true);
        }
        if d >= &ExactNumber::from(hi) {
            return Ok(false);
        }
    }
    Err(Error::Inexact)
}

/// Least `i` in `[N, M]` with `|T^i x − y| < a_i`.
pub fn first_hit(
    t: &Iet,
    x: &ExactNumber,
    y: &ExactNumber,
    seq: &TargetSequence,
    n: u64,
    m: u64,
    metric: Metric,
) -> Result<Option<u64>> {
    check_range(n, m)?;
    t.locate(y)?;
    let start = t.orbit_point(x, n)?;
    for (i, z) in (n..=m).zip(t.orbit_iter(&start)?) {
        if closer_than(&metric.distance(&z, y, t.total()), seq, i)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// `τ_r(x, y) = min{n > 0 : |T^n x − y| < r}`; `CapExceeded` when censored at `cap`.
pub fn hitting_time(t: &Iet, x: &ExactNumber, y: &ExactNumber, r: &ExactNumber, cap: u64, metric: Metric) -> Result<u64> {
    if !r.is_positive() {
        return Err(Error::InvalidParams("radius must be positive".into()));
    }
    t.locate(y)?;
    for (n, z) in (1..=cap).zip(t.orbit_iter(x)?.skip(1)) {
        if &metric.distance(&z, y, t.total()) < r {
            return Ok(n);
        }
    }
    Err(Error::CapExceeded(cap))
}

/// `log τ_r / (−log r)` for `r = 2^{-k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub k: u32,
    /// `None` when the scan was censored.
    pub tau: Option<u64>,
    /// Certified bounds `[lo, hi]` on the exponent.
    pub lo: Option<BigRational>,
    pub hi: Option<BigRational>,
}

impl ExponentEstimate {
    pub fn midpoint(&self) -> Option<f64> {
        Some(
            Enclosure {
                lo: self.lo.clone()?,
                hi: self.hi.clone()?,
            }
            .midpoint_f64(),
        )
    }
}

/// Exponent estimates for the dyadic schedule `r = 2^{-k}`, `k ∈ ks`.
pub fn hitting_time_exponents(
    t: &Iet,
    x: &ExactNumber,
    y: &ExactNumber,
    ks: impl IntoIterator<Item = u32>,
    cap: u64,
    metric: Metric,
    bits: u32,
) -> Result<Vec<ExponentEstimate>> {
    let ln2 = ln2_enclosure(bits);
    let mut out = Vec::new();
    for k in ks {
        if k == 0 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        let r = ExactNumber::ratio(1u64, num_bigint::BigInt::from(1u64) << k);
        let tau = match hitting_time(t, x, y, &r, cap, metric) {
            Ok(tau) => Some(tau),
            Err(Error::CapExceeded(_)) => None,
            Err(e) => return Err(e),
        };
        let (lo, hi) = match tau {
            Some(tau) => {
                let ln_tau = ln_enclosure(&BigRational::from_integer(tau.into()), bits);
                let e = ln_tau.div_positive(&ln2.scale(&BigRational::from_integer(k.into())));
                (Some(e.lo), Some(e.hi))
            }
            None => (None, None),
        };
        out.push(ExponentEstimate { k, tau, lo, hi });
    }
    Ok(out)
}

/// One checkpoint of a measure profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: u64,
    pub m: u64,
    /// Exact measure, or its lower bound for inexact radii.
    pub measure: ExactNumber,
    /// Upper bound on the measure for inexact radii.
    pub measure_upper: Option<ExactNumber>,
    /// Fraction of the grid targets `y` lying in the union.
    pub hit_fraction: ExactNumber,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub checkpoints: Vec<Checkpoint>,
    /// Measures are non-decreasing in `M` for each fixed `N`.
    pub monotone: bool,
}

/// Exact union measures over a schedule of `(N, M)` checkpoints, evaluated in
/// parallel and reported in schedule order.
pub fn limsup_profile(
    t: &Iet,
    x: &ExactNumber,
    seq: &TargetSequence,
    schedule: &[(u64, u64)],
    metric: Metric,
    grid: u64,
) -> Result<ExperimentResult> {
    if grid == 0 {
        return Err(Error::InvalidParams("grid must be positive".into()));
    }
    let checkpoints = schedule
        .par_iter()
        .map(|&(n, m)| {
            let (inner, outer) = hit_union_enclosure(t, x, seq, n, m, metric, 128)?;
            let hits = (0..grid)
                .filter(|&k| {
                    let y = t.total() * &ExactNumber::ratio(2 * k + 1, 2 * grid);
                    inner.contains(&y)
                })
                .count() as u64;
            Ok(Checkpoint {
                n,
                m,
                measure: inner.measure(),
                measure_upper: seq.is_inexact().then(|| outer.measure()),
                hit_fraction: ExactNumber::ratio(hits, grid),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_n: Vec<&Checkpoint> = checkpoints.iter().collect();
    by_n.sort_by_key(|c| (c.n, c.m));
    let monotone = by_n
        .windows(2)
        .all(|w| w[0].n != w[1].n || (w[0].measure <= w[1].measure && w[0].hit_fraction <= w[1].hit_fraction));
    Ok(ExperimentResult { checkpoints, monotone })
}
