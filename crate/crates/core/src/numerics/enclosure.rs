//! Certified natural-log enclosures with dyadic endpoints.
//!
//! `ln y` for `y` in `[1, 2]` comes from the series
//! `2 * sum z^(2j+1)/(2j+1)`, `z = (y-1)/(y+1) <= 1/3`, truncated with an
//! explicit geometric tail bound. Arguments are first reduced by a power of
//! two and bracketed by dyadics, so every step rounds outward.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ExactNumber;

/// A closed interval `[lo, hi]` with dyadic rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(x: BigRational) -> Self {
        Enclosure { lo: x.clone(), hi: x }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn scale(&self, k: &BigRational) -> Enclosure {
        if k.is_negative() {
            Enclosure {
                lo: &self.hi * k,
                hi: &self.lo * k,
            }
        } else {
            Enclosure {
                lo: &self.lo * k,
                hi: &self.hi * k,
            }
        }
    }

    /// Quotient of two enclosures; `other` must be strictly positive and `self` non-negative.
    pub fn div_positive(&self, other: &Enclosure) -> Enclosure {
        assert!(other.lo.is_positive() && !self.lo.is_negative());
        Enclosure {
            lo: &self.lo / &other.hi,
            hi: &self.hi / &other.lo,
        }
    }

    /// Round both endpoints outward to multiples of `2^-bits`.
    pub fn outward(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    pub fn midpoint_f64(&self) -> f64 {
        (ExactNumber::from(self.lo.clone()).to_f64() + ExactNumber::from(self.hi.clone()).to_f64())
            / 2.0
    }
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).floor().to_integer(), s)
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    let s = pow2(bits);
    BigRational::new((x * BigRational::from_integer(s.clone())).ceil().to_integer(), s)
}

/// `ln y` for rational `1 <= y <= 2`, enclosed to width about `2^-bits`.
fn ln_unit(y: &BigRational, bits: u32) -> Enclosure {
    debug_assert!(y >= &BigRational::one() && y <= &BigRational::from_integer(2.into()));
    if y.is_one() {
        return Enclosure::point(BigRational::zero());
    }
    let one = BigRational::one();
    let z = (y - &one) / (y + &one);
    let z2 = &z * &z;
    // tail after J terms <= 2 z^(2J+1) / ((2J+1)(1 - z^2)) <= 3^-(2J+1) * 9/4
    let terms = (bits as usize * 10 / 31) + 3;
    let mut sum = BigRational::zero();
    let mut power = z.clone();
    for j in 0..terms {
        sum += &power / BigRational::from_integer(BigInt::from(2 * j + 1));
        power = &power * &z2;
    }
    let lower = &sum * BigRational::from_integer(2.into());
    let tail = BigRational::from_integer(2.into()) * &power
        / (BigRational::from_integer(BigInt::from(2 * terms + 1)) * (&one - &z2));
    Enclosure {
        lo: lower.clone(),
        hi: lower + tail,
    }
    .outward(bits + 4)
}

/// Enclosure of `ln 2`.
pub fn ln2_enclosure(bits: u32) -> Enclosure {
    ln_unit(&BigRational::from_integer(2.into()), bits)
}

/// Certified enclosure of `ln x` for rational `x > 0`, of width roughly `2^-bits` (times `|log2 x|`).
pub fn ln_enclosure(x: &BigRational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    // x = 2^k * m, 1 <= m < 2
    let mut k = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::from_integer(2.into());
    let scale = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow2(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-k) as u32))
        }
    };
    let mut m = x / scale(k);
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < BigRational::one() {
        m *= &two;
        k -= 1;
    }
    let p = bits + 8;
    let m_lo = round_down(&m, p).max(BigRational::one());
    let m_hi = round_up(&m, p).min(two);
    let lo = ln_unit(&m_lo, p).lo;
    let hi = ln_unit(&m_hi, p).hi;
    let extra = 64 - k.unsigned_abs().max(1).leading_zeros();
    let ln2 = ln2_enclosure(p + extra);
    let kq = BigRational::from_integer(BigInt::from(k));
    ln2.scale(&kq).add(&Enclosure { lo, hi }).outward(bits + 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn f(x: &BigRational) -> f64 {
        ExactNumber::from(x.clone()).to_f64()
    }

    #[test]
    fn ln2_is_bracketed() {
        let e = ln2_enclosure(60);
        assert!(f(&e.lo) <= std::f64::consts::LN_2 && std::f64::consts::LN_2 <= f(&e.hi));
        assert!(e.width() < r(1, 1 << 50));
    }

    #[test]
    fn ln_of_assorted_values() {
        for (n, d) in [(1, 1), (3, 1), (1, 3), (1000, 7), (5, 4), (1, 1_000_000), (123_456_789, 1)] {
            let x = r(n, d);
            let e = ln_enclosure(&x, 50);
            let v = (n as f64 / d as f64).ln();
            assert!(f(&e.lo) <= v + 1e-12 && v - 1e-12 <= f(&e.hi), "{n}/{d}");
            assert!(f(&e.width()) < 1e-12, "{n}/{d}");
        }
    }

    #[test]
    fn ln_is_certified_against_exp() {
        // ln(e-ish) sanity: ln(271828/100000) is a hair above 1
        let e = ln_enclosure(&r(271_828, 100_000), 60);
        assert!(e.hi < BigRational::one());
        let e = ln_enclosure(&r(271_829, 100_000), 60);
        assert!(e.lo > BigRational::one());
    }

    #[test]
    fn huge_arguments() {
        let big = BigRational::from_integer(BigInt::one() << 5000);
        let e = ln_enclosure(&big, 40);
        let v = 5000.0 * std::f64::consts::LN_2;
        assert!(f(&e.lo) <= v && v <= f(&e.hi));
    }
}
