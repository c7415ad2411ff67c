//! Rigidity towers and the rigid target sequence built from them.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, Metric};
use crate::interval_set::Interval;
use crate::numerics::ExactNumber;
use crate::rauzy::{rv_step, RvMatrix};
use crate::rotations::{circle_ball_union_measure, three_gaps};
use crate::targets::{hit_union, rigid_block, TargetSequence};

/// An interval `J` and time `N` with `J, TJ, …, T^{N-1}J` disjoint, `T`
/// continuous on each floor, `λ(⋃_{n=1}^{N} T^n J) > (1 − ε)·total` and
/// `λ(T^N J ∩ J) > (1 − ε) λ(J)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidityTower {
    pub base: Interval,
    pub height: u64,
    /// `T^N J = J + return_shift`.
    pub return_shift: ExactNumber,
    pub cover: ExactNumber,
    /// `λ(T^N J ∩ J) / λ(J)`.
    pub overlap: ExactNumber,
    pub epsilon: ExactNumber,
    /// Induction depth and column the tower was read from.
    pub depth: usize,
    pub column: usize,
}

fn overlap_ratio(base: &Interval, shift: &ExactNumber) -> ExactNumber {
    let moved = base.translate(shift);
    let common = base.intersect(&moved).map_or_else(ExactNumber::zero, |iv| iv.length());
    &common / &base.length()
}

fn rigid_enough(t: &Iet, len: &ExactNumber, height: u64, overlap: &ExactNumber, eps: &ExactNumber) -> bool {
    let keep = &ExactNumber::one() - eps;
    let cover = len * &ExactNumber::from(height);
    cover > t.total() * &keep && overlap > &keep
}

/// Incremental search over the Rauzy–Veech towers of `T`, depth by depth.
#[derive(Clone, Debug)]
pub struct TowerSearch<'a> {
    t: &'a Iet,
    depth: usize,
    induced: Iet,
    matrix: RvMatrix,
}

impl<'a> TowerSearch<'a> {
    pub fn new(t: &'a Iet) -> Result<Self> {
        if t.d() < 2 {
            return Err(Error::InvalidParams("rigidity towers need d >= 2".into()));
        }
        if !t.perm().is_irreducible() {
            return Err(Error::Reducible(t.perm().to_string()));
        }
        Ok(TowerSearch {
            t,
            depth: 0,
            induced: t.clone(),
            matrix: RvMatrix::identity(t.d()),
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Towers at the current depth meeting the conditions for `eps`, height `>= min_height`.
    fn at_current(&self, eps: &ExactNumber, min_height: u64) -> Option<RigidityTower> {
        (0..self.t.d()).find_map(|j| {
            let height = self.matrix.column_sum(j);
            if height < min_height {
                return None;
            }
            let base = self.induced.interval(j);
            let len = base.length();
            let shift = self.induced.shift(j).clone();
            let overlap = overlap_ratio(&base, &shift);
            rigid_enough(self.t, &len, height, &overlap, eps).then(|| RigidityTower {
                cover: &len * &ExactNumber::from(height),
                base,
                height,
                return_shift: shift,
                overlap,
                epsilon: eps.clone(),
                depth: self.depth,
                column: j,
            })
        })
    }

    fn advance(&mut self) -> Result<()> {
        let (step, next, _) = rv_step(&self.induced).map_err(|e| match e {
            Error::NotInGeneralPosition { .. } => Error::NotInGeneralPosition { depth: self.depth },
            other => other,
        })?;
        self.matrix = self.matrix.checked_mul(&RvMatrix::step(self.induced.perm(), step))?;
        self.induced = next;
        self.depth += 1;
        Ok(())
    }

    /// First tower at depth `<= max_depth` (starting from the current depth)
    /// with height `>= min_height` satisfying the conditions for `eps`.
    pub fn next_tower(&mut self, eps: &ExactNumber, min_height: u64, max_depth: usize) -> Result<Option<RigidityTower>> {
        if !eps.is_positive() || eps >= &ExactNumber::one() {
            return Err(Error::InvalidParams(format!("ε = {eps} must lie in (0, 1)")));
        }
        loop {
            if let Some(tower) = self.at_current(eps, min_height) {
                return Ok(Some(tower));
            }
            if self.depth >= max_depth {
                return Ok(None);
            }
            self.advance()?;
        }
    }
}

/// First Rauzy–Veech tower of depth `<= n_max` satisfying the four conditions for `eps`.
pub fn find_tower(t: &Iet, eps: &ExactNumber, n_max: usize) -> Result<Option<RigidityTower>> {
    TowerSearch::new(t)?.next_tower(eps, 1, n_max)
}

/// Outcome of re-checking a tower by pushing its base forward.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCheck {
    /// `J ∩ T^n J = ∅` for `0 < n < N`.
    pub disjoint: bool,
    /// `T` continuous on `T^n J` for `0 <= n < N`.
    pub continuous: bool,
    pub cover: Option<ExactNumber>,
    pub overlap: Option<ExactNumber>,
    pub holds: bool,
}

/// `x·Q` as an integer, when exact.
fn scale_to(x: &ExactNumber, q: u64) -> Option<u64> {
    let (n, d) = x.numer_denom()?;
    let v = n * BigInt::from(q);
    if !(&v % &d).is_zero() {
        return None;
    }
    (v / d).to_u64()
}

/// Re-checks the conditions for `(J, N, ε)` without using any data from the search.
///
/// Only `O(1)` floors are kept: pairwise disjointness of the floors follows from
/// `J ∩ T^n J = ∅` for `0 < n < N` because `T` is injective, and then the
/// floors `T^1 J, …, T^N J` are disjoint as well, so the cover is `N λ(J)`.
pub fn verify_tower(t: &Iet, base: &Interval, height: u64, eps: &ExactNumber) -> Result<TowerCheck> {
    if base.is_empty() || height == 0 {
        return Err(Error::InvalidParams("empty base or zero height".into()));
    }
    t.locate(&base.lo)?;
    if &base.hi > t.total() {
        return Err(Error::OutOfDomain(base.hi.to_string(), t.total().to_string()));
    }
    let end = match t.scaled() {
        Ok(s) => match (scale_to(&base.lo, s.denom()), scale_to(&base.length(), s.denom())) {
            (Some(lo), Some(len)) => push_scaled(&s, lo, len, height)?.map(|lo| s.to_exact(lo)),
            _ => push_exact(t, base, height),
        },
        Err(_) => push_exact(t, base, height),
    };
    let len = base.length();
    let (disjoint, continuous, top) = match end {
        Ok(top) => (true, true, Some(top)),
        Err(Failure::Overlap) => (false, true, None),
        Err(Failure::Split) => (true, false, None),
    };
    let cover = top.as_ref().map(|_| &len * &ExactNumber::from(height));
    let overlap = top.map(|lo| overlap_ratio(base, &(&lo - &base.lo)));
    let holds = match (&cover, &overlap) {
        (Some(_), Some(o)) => rigid_enough(t, &len, height, o, eps),
        _ => false,
    };
    Ok(TowerCheck {
        disjoint,
        continuous,
        cover,
        overlap,
        holds,
    })
}

enum Failure {
    Overlap,
    Split,
}

/// Left end of `T^N J`, or the first failed condition.
fn push_exact(t: &Iet, base: &Interval, height: u64) -> std::result::Result<ExactNumber, Failure> {
    let mut cur = base.clone();
    for n in 1..=height {
        let mut pieces = t.push_interval(&cur);
        if pieces.len() != 1 {
            return Err(Failure::Split);
        }
        cur = pieces.swap_remove(0);
        if n < height && cur.intersect(base).is_some() {
            return Err(Failure::Overlap);
        }
    }
    Ok(cur.lo)
}

fn push_scaled(s: &crate::iet::ScaledIet, lo: u64, len: u64, height: u64) -> Result<std::result::Result<u64, Failure>> {
    if lo + len > s.total() {
        return Err(Error::OutOfDomain(format!("{}", lo + len), format!("{}", s.total())));
    }
    let (b_lo, b_hi) = (lo, lo + len);
    let mut cur = lo;
    for n in 1..=height {
        if s.locate(cur) != s.locate(cur + len - 1) {
            return Ok(Err(Failure::Split));
        }
        cur = s.apply(cur);
        if n < height && cur < b_hi && b_lo < cur + len {
            return Ok(Err(Failure::Overlap));
        }
    }
    Ok(Ok(cur))
}

/// `J ∩ T^{-N}J ∩ … ∩ T^{-kN}J`: on `J` every `T^{iN}` is the translation by
/// `i·s`, so the intersection is the interval `J ∩ (J − k s)`.
pub fn good_core(tower: &RigidityTower, k: u64) -> Option<Interval> {
    let far = &tower.return_shift * &ExactNumber::from(k);
    tower.base.intersect(&tower.base.translate(&-&far))
}

/// `λ(⋃_{n=1}^{N} T^n(core))`, which is `N λ(core)` since the floors are disjoint.
pub fn good_set_measure(tower: &RigidityTower, k: u64) -> ExactNumber {
    good_core(tower, k).map_or_else(ExactNumber::zero, |c| &c.length() * &ExactNumber::from(tower.height))
}

/// Stage `j` of the rigid construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidStage {
    pub j: u32,
    pub tower: RigidityTower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RigidSequence {
    pub stages: Vec<RigidStage>,
    pub sequence: TargetSequence,
}

impl RigidSequence {
    pub fn heights(&self) -> Vec<u64> {
        self.stages.iter().map(|s| s.tower.height).collect()
    }
}

/// `3^{-j}`.
pub fn stage_epsilon(j: u32) -> ExactNumber {
    ExactNumber::ratio(1u64, BigInt::from(3u64).pow(j))
}

/// Towers for `ε_j = 3^{-j}`, `j = 1..=j_max`, with strictly increasing heights,
/// and the rigid target sequence `a_i = 1/(2^j N_j)` built from them.
pub fn rigid_sequence(t: &Iet, j_max: u32, n_search: usize) -> Result<RigidSequence> {
    let mut search = TowerSearch::new(t)?;
    let mut stages = Vec::with_capacity(j_max as usize);
    let mut prev = 0u64;
    for j in 1..=j_max {
        let tower = search
            .next_tower(&stage_epsilon(j), prev + 1, n_search)?
            .ok_or(Error::TowerNotFound { stage: j as usize })?;
        prev = tower.height;
        stages.push(RigidStage { j, tower });
    }
    let sequence = TargetSequence::Rigid {
        n: stages.iter().map(|s| s.tower.height).collect(),
    };
    Ok(RigidSequence { stages, sequence })
}

/// Indices `[2^{j-1} N_{j-1}, 2^j N_j)` of block `j` (with `N_0 = 1`).
pub fn block_range(n: &[u64], j: u32) -> Result<(u64, u64)> {
    if j == 0 || j as usize > n.len() {
        return Err(Error::OutOfRange(j as u64));
    }
    let prev = if j == 1 { 1 } else { n[j as usize - 2] };
    let lo = prev.checked_shl(j - 1).ok_or(Error::Overflow("block start"))?;
    let hi = n[j as usize - 1].checked_shl(j).ok_or(Error::Overflow("block end"))?;
    debug_assert_eq!(rigid_block(n, lo).map(|b| b.0), Ok(j));
    Ok((lo, hi))
}

/// `N_j · 1/(2^j N_j) + 2^j N_j · 1/(3^j N_j) = 2^{-j} + (2/3)^j`.
pub fn block_bound(j: u32) -> ExactNumber {
    let two = BigInt::from(2u64).pow(j);
    let three = BigInt::from(3u64).pow(j);
    &ExactNumber::ratio(1u64, two.clone()) + &ExactNumber::ratio(two, three)
}

/// `λ(⋃_{i ∈ block j} B(T^i x, a_i))` for the rigid sequence with heights `n`.
///
/// For a rotation in circle mode the block points are a rotated copy of
/// `{kα : k < K}`, so the measure comes from the three-gap multiset and does
/// not depend on `x`; otherwise the union is built directly.
pub fn block_measure(t: &Iet, x: &ExactNumber, n: &[u64], j: u32, metric: Metric) -> Result<ExactNumber> {
    let (lo, hi) = block_range(n, j)?;
    let radius = ExactNumber::ratio(1u64, BigInt::from(n[j as usize - 1]) << j);
    match (t.as_rotation(), metric) {
        (Some(_), Metric::Circle) if hi - lo == 1 => {
            t.locate(x)?;
            Ok((&radius + &radius).min(t.total().clone()))
        }
        (Some(alpha), Metric::Circle) => {
            t.locate(x)?;
            let unit = &alpha / t.total();
            let gaps: Vec<_> = three_gaps(&unit, hi - lo - 1)
                .into_iter()
                .map(|(g, m)| (t.total() * &g, m))
                .collect();
            Ok(circle_ball_union_measure(&gaps, &radius, t.total()))
        }
        _ => {
            let seq = TargetSequence::Rigid { n: n.to_vec() };
            Ok(hit_union(t, x, &seq, lo, hi - 1, metric)?.measure())
        }
    }
}

/// Checks `|T^{kN} x − x| < k/(N 3^j)` for `k = 1..=2^j`.
pub fn displaced_orbit_holds(t: &Iet, x: &ExactNumber, height: u64, j: u32) -> Result<bool> {
    let scale = BigInt::from(height) * BigInt::from(3u64).pow(j);
    for k in 1..=1u64 << j {
        let m = k.checked_mul(height).ok_or(Error::Overflow("kN"))?;
        let y = t.orbit_point(x, m)?;
        if (&y - x).abs() >= ExactNumber::ratio(k, scale.clone()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rotation with continued fraction `[0; 2·3, 2·3², …, 2·3^{levels}]`:
/// its partial quotient after `q_{j-1}` exceeds `3^j`, so the tower of height
/// `q_{j-1}` is rigid at `ε = 3^{-j}`.
pub fn rigid_rotation_angle(levels: u32) -> ExactNumber {
    let mut x = ExactNumber::zero();
    for i in (1..=levels).rev() {
        let a = ExactNumber::from(BigInt::from(2u64) * BigInt::from(3u64).pow(i));
        x = (&a + &x).recip().expect("positive");
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::q;
    use crate::rotations::{golden, rotation_iet};

    #[test]
    fn bound_formula() {
        assert_eq!(block_bound(3), &q(1, 8) + &q(8, 27));
        assert_eq!(block_bound(1), q(7, 6));
    }

    #[test]
    fn golden_has_no_fine_towers() {
        let g = rotation_iet(&golden()).unwrap();
        // T^N J ∩ J / J tends to 1 − α, never close to 1
        assert_eq!(find_tower(&g, &q(1, 100), 30).unwrap(), None);
        assert_eq!(find_tower(&g, &q(1, 2), 30).unwrap(), None);
        assert!(find_tower(&g, &q(2, 3), 30).unwrap().is_some());
    }

    #[test]
    fn large_quotient_gives_rigid_tower() {
        // α = [0; 3, 200]
        let alpha = (&q(3, 1) + &q(1, 200)).recip().unwrap();
        let t = rotation_iet(&alpha).unwrap();
        let tower = find_tower(&t, &q(1, 100), 50).unwrap().unwrap();
        assert_eq!(tower.height, 3);
        assert!(tower.overlap > q(99, 100) && tower.overlap < q(1, 1));
        let check = verify_tower(&t, &tower.base, tower.height, &tower.epsilon).unwrap();
        assert!(check.holds && check.disjoint && check.continuous);
        assert_eq!(check.cover.unwrap(), tower.cover);
        assert_eq!(check.overlap.unwrap(), tower.overlap);
    }

    #[test]
    fn verification_catches_bad_towers() {
        let t = Iet::rational(&[7, 3], 10, &[2, 1]).unwrap();
        // [0, 1/2) meets its image under T^2
        let c = verify_tower(&t, &Interval::new(q(0, 1), q(1, 2)), 3, &q(1, 2)).unwrap();
        assert!(!c.disjoint && !c.holds);
        // [6/10, 8/10) straddles the discontinuity at 7/10
        let c = verify_tower(&t, &Interval::new(q(6, 10), q(8, 10)), 2, &q(1, 2)).unwrap();
        assert!(!c.continuous && !c.holds);
    }

    #[test]
    fn exact_and_scaled_verification_agree() {
        let alpha = rigid_rotation_angle(4);
        let t = rotation_iet(&alpha).unwrap();
        let rs = rigid_sequence(&t, 3, 500).unwrap();
        for st in &rs.stages {
            let fast = verify_tower(&t, &st.tower.base, st.tower.height, &st.tower.epsilon).unwrap();
            let slow = push_exact(&t, &st.tower.base, st.tower.height).ok().unwrap();
            assert!(fast.holds);
            assert_eq!(&slow - &st.tower.base.lo, st.tower.return_shift);
        }
    }

    #[test]
    fn rigid_rotation_blocks() {
        let alpha = rigid_rotation_angle(5);
        let t = rotation_iet(&alpha).unwrap();
        let rs = rigid_sequence(&t, 3, 1000).unwrap();
        let n = rs.heights();
        assert_eq!(n, vec![1, 6, 109]);
        for j in 1..=3u32 {
            let x = q(1, 7);
            let circle = block_measure(&t, &x, &n, j, Metric::Circle).unwrap();
            // direct union in circle mode matches the three-gap shortcut
            let (lo, hi) = block_range(&n, j).unwrap();
            let direct = hit_union(&t, &x, &rs.sequence, lo, hi - 1, Metric::Circle).unwrap().measure();
            assert_eq!(circle, direct);
            let interval = block_measure(&t, &x, &n, j, Metric::Interval).unwrap();
            assert!(interval <= circle);
            assert!(circle < block_bound(j), "j={j}");
            // block sums of the radii are at least 1/2
            let sum = rs.sequence.partial_sum(lo, hi - 1).unwrap();
            assert!(sum >= q(1, 2));
        }
    }

    #[test]
    fn good_set_and_displacement() {
        let alpha = rigid_rotation_angle(5);
        let t = rotation_iet(&alpha).unwrap();
        let rs = rigid_sequence(&t, 4, 2000).unwrap();
        for st in &rs.stages {
            let k = 1u64 << st.j;
            let lower = &ExactNumber::one() - &(&ExactNumber::from(k + 1) * &stage_epsilon(st.j));
            assert!(good_set_measure(&st.tower, k) >= lower);
            let core = good_core(&st.tower, k).unwrap();
            let a = &(&core.lo + &core.hi) / &q(2, 1);
            for m in [1, st.tower.height / 2 + 1, st.tower.height] {
                let x = t.orbit_point(&a, m).unwrap();
                assert!(displaced_orbit_holds(&t, &x, st.tower.height, st.j).unwrap());
            }
        }
    }

    #[test]
    fn missing_tower_is_reported() {
        let g = rotation_iet(&golden()).unwrap();
        assert_eq!(rigid_sequence(&g, 3, 20), Err(Error::TowerNotFound { stage: 1 }));
    }
}
