use crate::numerics::ExactNumber;

use super::Permutation;

/// A rational IET scaled by its common denominator `Q` so that every orbit
/// point is an integer `< total·Q < 2^63`.
///
/// Orbit points of a rational IET stay multiples of `1/Q`, so this is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaledIet {
    denom: u64,
    total: u64,
    /// right ends of `I_1..I_d`
    ends: Vec<u64>,
    /// wrapping translations
    shifts: Vec<u64>,
    /// right ends of image positions
    image_ends: Vec<u64>,
    /// wrapping inverse translations per image position
    inverse_shifts: Vec<u64>,
}

impl ScaledIet {
    pub(super) fn new(numerators: &[u64], denom: u64, perm: &Permutation) -> Self {
        let d = numerators.len();
        let mut ends = Vec::with_capacity(d);
        let mut acc = 0u64;
        for &n in numerators {
            acc += n;
            ends.push(acc);
        }
        let inv = perm.inverse();
        let mut image_ends = Vec::with_capacity(d);
        let mut acc = 0u64;
        for p in 0..d {
            acc += numerators[inv.image(p)];
            image_ends.push(acc);
        }
        let start = |v: &[u64], i: usize| if i == 0 { 0 } else { v[i - 1] };
        let shifts: Vec<u64> = (0..d)
            .map(|j| start(&image_ends, perm.image(j)).wrapping_sub(start(&ends, j)))
            .collect();
        let inverse_shifts = (0..d).map(|p| shifts[inv.image(p)].wrapping_neg()).collect();
        ScaledIet {
            denom,
            total: acc,
            ends,
            shifts,
            image_ends,
            inverse_shifts,
        }
    }

    /// The common denominator `Q`.
    pub fn denom(&self) -> u64 {
        self.denom
    }

    /// `total · Q`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Right ends of the intervals, scaled.
    pub fn ends(&self) -> &[u64] {
        &self.ends
    }

    #[inline]
    pub fn locate(&self, x: u64) -> usize {
        // d is small: a linear scan beats binary search
        self.ends.iter().position(|&e| x < e).expect("point outside the domain")
    }

    #[inline]
    pub fn apply(&self, x: u64) -> u64 {
        debug_assert!(x < self.total);
        x.wrapping_add(self.shifts[self.locate(x)])
    }

    #[inline]
    pub fn apply_inverse(&self, y: u64) -> u64 {
        let p = self.image_ends.iter().position(|&e| y < e).expect("point outside the domain");
        y.wrapping_add(self.inverse_shifts[p])
    }

    /// `T^m x`.
    pub fn iterate(&self, mut x: u64, m: u64) -> u64 {
        for _ in 0..m {
            x = self.apply(x);
        }
        x
    }

    /// Scaled integer for an exact point, when it is a multiple of `1/Q` in the domain.
    pub fn to_scaled(&self, x: &ExactNumber) -> Option<u64> {
        let (n, d) = x.numer_denom()?;
        let q = num_bigint::BigInt::from(self.denom);
        if (&q % &d) != num_bigint::BigInt::from(0) {
            return None;
        }
        let v: u64 = num_traits::ToPrimitive::to_u64(&(n * (q / d)))?;
        (v < self.total).then_some(v)
    }

    pub fn to_exact(&self, x: u64) -> ExactNumber {
        ExactNumber::ratio(x, self.denom)
    }
}
