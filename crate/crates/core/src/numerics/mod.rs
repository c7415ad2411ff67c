//! Exact ordered-field arithmetic over Q and real quadratic fields Q(sqrt(D)).
//!
//! Every length, point, radius and gap handled by the library is an
//! [`ExactNumber`]. Comparisons are exact: the sign of `a + b*sqrt(D)` is
//! certified by comparing `a^2` with `b^2 * D` when the two terms disagree in
//! sign, so no floating tolerance is ever involved.
//!
//! Integers are arbitrary precision. For orbit-heavy work on rational
//! interval exchanges there is a fixed-width fast path: once all lengths share
//! a common denominator `Q`, every orbit point stays a multiple of `1/Q`, so
//! `u64` numerators suffice whenever `Q < 2^63` (see [`crate::iet::ScaledIet`]).

mod enclosure;

pub use enclosure::{ln2_enclosure, ln_enclosure, Enclosure};

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A rational number or an element `(a + b*sqrt(D))/c` of a real quadratic field.
///
/// Quadratic values always carry `b != 0`; anything with a vanishing
/// irrational part collapses to [`ExactNumber::Rational`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactNumber {
    Rational(BigRational),
    Quadratic(Quadratic),
}

/// `(a + b*sqrt(d))/c` with `gcd(a,b,c) = 1`, `c > 0`, `b != 0`, `d` squarefree and `> 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quadratic {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

impl Quadratic {
    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn radicand(&self) -> u64 {
        self.d
    }
}

/// Splits `d` into `(k, m)` with `d = k^2 * m` and `m` squarefree.
fn squarefree_part(mut d: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p) <= d {
        while d % (p * p) == 0 {
            d /= p * p;
            k *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (k, d)
}

/// Sign of `a + b*sqrt(d)` for squarefree `d > 1`.
fn sign_of_surd(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    let sa = a.sign();
    let sb = b.sign();
    match (sa, sb) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::NoSign, s) | (s, Sign::NoSign) => sign_to_ord(s),
        (x, y) if x == y => sign_to_ord(x),
        (Sign::Plus, _) => {
            // a > 0 > b: compare a^2 with b^2 d
            (a * a).cmp(&(b * b * BigInt::from(d)))
        }
        _ => (b * b * BigInt::from(d)).cmp(&(a * a)),
    }
}

fn sign_to_ord(s: Sign) -> Ordering {
    match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Field parts `(a, b, c)` of a value viewed inside Q(sqrt(d)).
struct Parts {
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl ExactNumber {
    pub fn zero() -> Self {
        ExactNumber::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactNumber::Rational(BigRational::one())
    }

    pub fn from_integer<T: Into<BigInt>>(n: T) -> Self {
        ExactNumber::Rational(BigRational::from_integer(n.into()))
    }

    /// `num/den`, reduced. Panics if `den == 0`.
    pub fn ratio<N: Into<BigInt>, D: Into<BigInt>>(num: N, den: D) -> Self {
        ExactNumber::Rational(BigRational::new(num.into(), den.into()))
    }

    /// `(a + b*sqrt(d))/c`, normalized. Square factors of `d` are pulled into `b`;
    /// a perfect-square `d` or `b = 0` yields a rational.
    pub fn quadratic<A, B, C>(a: A, b: B, c: C, d: u64) -> Result<Self>
    where
        A: Into<BigInt>,
        B: Into<BigInt>,
        C: Into<BigInt>,
    {
        let (a, mut b, c) = (a.into(), b.into(), c.into());
        if c.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if d == 0 {
            return Ok(ExactNumber::Rational(BigRational::new(a, c)));
        }
        let (k, m) = squarefree_part(d);
        b *= BigInt::from(k);
        if m == 1 {
            return Ok(ExactNumber::Rational(BigRational::new(a + b, c)));
        }
        Ok(Self::normalize(a, b, c, m))
    }

    fn normalize(mut a: BigInt, mut b: BigInt, mut c: BigInt, d: u64) -> Self {
        if b.is_zero() {
            return ExactNumber::Rational(BigRational::new(a, c));
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        ExactNumber::Quadratic(Quadratic { a, b, c, d })
    }

    /// The radicand `D` if this value is irrational.
    pub fn radicand(&self) -> Option<u64> {
        match self {
            ExactNumber::Rational(_) => None,
            ExactNumber::Quadratic(q) => Some(q.d),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactNumber::Rational(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactNumber::Rational(r) => Some(r),
            ExactNumber::Quadratic(_) => None,
        }
    }

    fn parts(&self) -> Parts {
        match self {
            ExactNumber::Rational(r) => Parts {
                a: r.numer().clone(),
                b: BigInt::zero(),
                c: r.denom().clone(),
            },
            ExactNumber::Quadratic(q) => Parts {
                a: q.a.clone(),
                b: q.b.clone(),
                c: q.c.clone(),
            },
        }
    }

    /// The common field of two operands, or `MixedField`.
    fn common_field(&self, other: &Self) -> Result<Option<u64>> {
        match (self.radicand(), other.radicand()) {
            (Some(x), Some(y)) if x != y => Err(Error::MixedField(x, y)),
            (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
            (None, None) => Ok(None),
        }
    }

    /// Checks that `other` can be combined with `self` without leaving one field.
    pub fn check_field(&self, other: &Self) -> Result<()> {
        self.common_field(other).map(|_| ())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        match self.common_field(other)? {
            None => Ok(ExactNumber::Rational(
                self.as_rational().unwrap() + other.as_rational().unwrap(),
            )),
            Some(d) => {
                let (x, y) = (self.parts(), other.parts());
                Ok(Self::normalize(
                    &x.a * &y.c + &y.a * &x.c,
                    &x.b * &y.c + &y.b * &x.c,
                    &x.c * &y.c,
                    d,
                ))
            }
        }
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        match self.common_field(other)? {
            None => Ok(ExactNumber::Rational(
                self.as_rational().unwrap() * other.as_rational().unwrap(),
            )),
            Some(d) => {
                let (x, y) = (self.parts(), other.parts());
                let dd = BigInt::from(d);
                Ok(Self::normalize(
                    &x.a * &y.a + &x.b * &y.b * dd,
                    &x.a * &y.b + &x.b * &y.a,
                    &x.c * &y.c,
                    d,
                ))
            }
        }
    }

    pub fn recip(&self) -> Result<Self> {
        match self {
            ExactNumber::Rational(r) => {
                if r.is_zero() {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(ExactNumber::Rational(r.recip()))
                }
            }
            ExactNumber::Quadratic(q) => {
                // c / (a + b sqrt d) = c (a - b sqrt d) / (a^2 - b^2 d)
                let norm = &q.a * &q.a - &q.b * &q.b * BigInt::from(q.d);
                Ok(Self::normalize(&q.c * &q.a, -(&q.c * &q.b), norm, q.d))
            }
        }
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        self.checked_mul(&other.recip()?)
    }

    /// Exact comparison; `MixedField` if both sides are irrational over different fields.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        match self.common_field(other)? {
            None => Ok(self.as_rational().unwrap().cmp(other.as_rational().unwrap())),
            Some(d) => {
                let (x, y) = (self.parts(), other.parts());
                // denominators are positive, so the sign of x - y is that of
                // (x.a y.c - y.a x.c) + (x.b y.c - y.b x.c) sqrt(d)
                let a = &x.a * &y.c - &y.a * &x.c;
                let b = &x.b * &y.c - &y.b * &x.c;
                Ok(sign_of_surd(&a, &b, d))
            }
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            ExactNumber::Rational(r) => sign_to_ord(r.numer().sign()),
            ExactNumber::Quadratic(q) => sign_of_surd(&q.a, &q.b, q.d),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactNumber::Rational(r) if r.is_zero())
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Exact floor.
    pub fn floor(&self) -> BigInt {
        match self {
            ExactNumber::Rational(r) => r.floor().to_integer(),
            ExactNumber::Quadratic(q) => {
                // b sqrt(d) lies strictly between s and s + 1
                let root = (&q.b * &q.b * BigInt::from(q.d)).sqrt();
                let s = if q.b.is_positive() { root } else { -root - 1 };
                (&q.a + s).div_floor(&q.c)
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Integer power.
    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = ExactNumber::one();
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Rational bounds `lo <= self <= hi` with `hi - lo <= 2^-bits / c`.
    pub fn rational_enclosure(&self, bits: u32) -> (BigRational, BigRational) {
        match self {
            ExactNumber::Rational(r) => (r.clone(), r.clone()),
            ExactNumber::Quadratic(q) => {
                let scale = BigInt::one() << bits;
                let s = (&q.b * &q.b * BigInt::from(q.d) * &scale * &scale).sqrt();
                // s/2^bits <= |b| sqrt(d) < (s+1)/2^bits
                let lo_abs = BigRational::new(s.clone(), scale.clone());
                let hi_abs = BigRational::new(s + 1, scale);
                let (blo, bhi) = if q.b.is_positive() {
                    (lo_abs, hi_abs)
                } else {
                    (-hi_abs, -lo_abs)
                };
                let a = BigRational::from_integer(q.a.clone());
                let c = BigRational::from_integer(q.c.clone());
                ((&a + blo) / &c, (&a + bhi) / &c)
            }
        }
    }

    /// Nearest-ish `f64`; for display only.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactNumber::Rational(r) => rational_to_f64(r),
            ExactNumber::Quadratic(_) => {
                let (lo, hi) = self.rational_enclosure(64);
                rational_to_f64(&((lo + hi) / BigRational::from_integer(2.into())))
            }
        }
    }

    /// Numerator and denominator when rational.
    pub fn numer_denom(&self) -> Option<(BigInt, BigInt)> {
        self.as_rational()
            .map(|r| (r.numer().clone(), r.denom().clone()))
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // shift both to a manageable size
    let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
    let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

impl PartialOrd for ExactNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order. Panics when comparing irrationals from different fields;
/// use [`ExactNumber::try_cmp`] on unvalidated input.
impl Ord for ExactNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        self.try_cmp(other).expect("comparison across quadratic fields")
    }
}

impl Neg for &ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        match self {
            ExactNumber::Rational(r) => ExactNumber::Rational(-r),
            ExactNumber::Quadratic(q) => ExactNumber::Quadratic(Quadratic {
                a: -&q.a,
                b: -&q.b,
                c: q.c.clone(),
                d: q.d,
            }),
        }
    }
}

impl Neg for ExactNumber {
    type Output = ExactNumber;
    fn neg(self) -> ExactNumber {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident, $what:literal) => {
        impl $tr<&ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                self.$checked(rhs).expect($what)
            }
        }
        impl $tr<ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: ExactNumber) -> ExactNumber {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactNumber> for ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: &ExactNumber) -> ExactNumber {
                (&self).$method(rhs)
            }
        }
        impl $tr<ExactNumber> for &ExactNumber {
            type Output = ExactNumber;
            fn $method(self, rhs: ExactNumber) -> ExactNumber {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, "addition across quadratic fields");
forward_binop!(Sub, sub, checked_sub, "subtraction across quadratic fields");
forward_binop!(Mul, mul, checked_mul, "multiplication across quadratic fields");
forward_binop!(Div, div, checked_div, "invalid division");

impl std::iter::Sum for ExactNumber {
    fn sum<I: Iterator<Item = ExactNumber>>(iter: I) -> Self {
        iter.fold(ExactNumber::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a ExactNumber> for ExactNumber {
    fn sum<I: Iterator<Item = &'a ExactNumber>>(iter: I) -> Self {
        iter.fold(ExactNumber::zero(), |acc, x| acc + x)
    }
}

impl From<BigRational> for ExactNumber {
    fn from(r: BigRational) -> Self {
        ExactNumber::Rational(r)
    }
}

impl From<i64> for ExactNumber {
    fn from(n: i64) -> Self {
        ExactNumber::from_integer(n)
    }
}

impl From<u64> for ExactNumber {
    fn from(n: u64) -> Self {
        ExactNumber::from_integer(n)
    }
}

impl From<BigInt> for ExactNumber {
    fn from(n: BigInt) -> Self {
        ExactNumber::from_integer(n)
    }
}

impl fmt::Display for ExactNumber {
    /// `p/q` for rationals, `(a+b*sqrt(D))/c` (or `(a-b*sqrt(D))/c`) for quadratics.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactNumber::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            ExactNumber::Quadratic(q) => {
                let sign = if q.b.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}*sqrt({}))/{}", q.a, sign, q.b.abs(), q.d, q.c)
            }
        }
    }
}

fn parse_int(s: &str, input: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|e| Error::Parse {
        input: input.to_string(),
        reason: format!("bad integer `{s}`: {e}"),
    })
}

impl FromStr for ExactNumber {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |reason: &str| Error::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        if let Some(body) = s.strip_prefix('(') {
            // (a+b*sqrt(D))/c
            let (inner, den) = body.rsplit_once(")/").ok_or_else(|| bad("expected `)/c`"))?;
            let inner = inner.strip_suffix(')').ok_or_else(|| bad("expected `sqrt(D))`"))?;
            let (lhs, d) = inner
                .rsplit_once("*sqrt(")
                .ok_or_else(|| bad("expected `*sqrt(`"))?;
            // split a from the signed coefficient b at the last +/- not in leading position
            let split = lhs
                .char_indices()
                .skip(1)
                .filter(|&(i, ch)| {
                    (ch == '+' || ch == '-') && !matches!(lhs.as_bytes()[i - 1], b'+' | b'-')
                })
                .map(|(i, _)| i)
                .last()
                .ok_or_else(|| bad("expected `a+b`"))?;
            let a = parse_int(&lhs[..split], input)?;
            let bstr = &lhs[split..];
            let bstr = bstr.strip_prefix('+').unwrap_or(bstr);
            let b = parse_int(bstr, input)?;
            let d: u64 = d.parse().map_err(|_| bad("radicand must be a non-negative integer"))?;
            let c = parse_int(den, input)?;
            if c.is_zero() {
                return Err(bad("zero denominator"));
            }
            return ExactNumber::quadratic(a, b, c, d);
        }
        match s.split_once('/') {
            Some((n, d)) => {
                let n = parse_int(n, input)?;
                let d = parse_int(d, input)?;
                if d.is_zero() {
                    return Err(bad("zero denominator"));
                }
                Ok(ExactNumber::Rational(BigRational::new(n, d)))
            }
            None => Ok(ExactNumber::from_integer(parse_int(&s, input)?)),
        }
    }
}

impl Serialize for ExactNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(ExactNumber::from_integer(n)),
        }
    }
}

/// Shorthand for rational literals in tests and examples.
pub fn q(num: i64, den: i64) -> ExactNumber {
    ExactNumber::ratio(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn golden_conjugate() -> ExactNumber {
        ExactNumber::quadratic(-1, 1, 2, 5).unwrap()
    }

    #[test]
    fn reduced_rationals_compare_equal() {
        assert_eq!(q(1, 3).cmp(&q(2, 6)), Ordering::Equal);
        assert_eq!(q(5, 8) - q(3, 8), q(1, 4));
        assert_eq!(q(-2, 7).abs(), q(2, 7));
    }

    #[test]
    fn quadratic_compare() {
        let g = golden_conjugate();
        assert_eq!(g.cmp(&q(3, 5)), Ordering::Greater);
        assert_eq!(g.cmp(&q(31, 50)), Ordering::Less);
        let r2 = ExactNumber::quadratic(0, 1, 1, 2).unwrap();
        assert_eq!(r2.cmp(&r2.clone()), Ordering::Equal);
    }

    #[test]
    fn golden_square() {
        let g = golden_conjugate();
        let sq = &g * &g;
        assert_eq!(sq, ExactNumber::quadratic(3, -1, 2, 5).unwrap());
        assert!((sq.to_f64() - 0.381_966_011_250_105).abs() < 1e-12);
        // g^2 + g = 1
        assert_eq!(&sq + &g, ExactNumber::one());
    }

    #[test]
    fn mixed_fields_are_rejected() {
        let a = ExactNumber::quadratic(0, 1, 1, 2).unwrap();
        let b = ExactNumber::quadratic(0, 1, 1, 3).unwrap();
        assert_eq!(a.checked_add(&b), Err(Error::MixedField(2, 3)));
        assert_eq!(a.try_cmp(&b), Err(Error::MixedField(2, 3)));
        // rationals embed into either field
        assert!(a.checked_add(&q(1, 2)).is_ok());
    }

    #[test]
    fn division() {
        let g = golden_conjugate();
        // 1/g = (1+sqrt5)/2 = g + 1
        assert_eq!(g.recip().unwrap(), &g + &ExactNumber::one());
        assert_eq!(q(1, 2).checked_div(&ExactNumber::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn normalization() {
        // sqrt(8) = 2 sqrt(2); sqrt(9) = 3
        assert_eq!(
            ExactNumber::quadratic(0, 1, 1, 8).unwrap(),
            ExactNumber::quadratic(0, 2, 1, 2).unwrap()
        );
        assert_eq!(ExactNumber::quadratic(1, 1, 2, 9).unwrap(), q(2, 1));
        assert_eq!(ExactNumber::quadratic(2, 0, 4, 5).unwrap(), q(1, 2));
        assert_eq!(
            ExactNumber::quadratic(2, 4, -6, 5).unwrap().to_string(),
            "(-1-2*sqrt(5))/3"
        );
    }

    #[test]
    fn floor_and_ceil() {
        let g = golden_conjugate();
        assert_eq!(g.floor(), BigInt::from(0));
        assert_eq!((-&g).floor(), BigInt::from(-1));
        assert_eq!(g.ceil(), BigInt::from(1));
        let big = ExactNumber::quadratic(7, 3, 1, 2).unwrap(); // 7 + 4.2426
        assert_eq!(big.floor(), BigInt::from(11));
        assert_eq!(q(-7, 2).floor(), BigInt::from(-4));
    }

    #[test]
    fn text_format() {
        assert_eq!(q(-3, 8).to_string(), "-3/8");
        assert_eq!(golden_conjugate().to_string(), "(-1+1*sqrt(5))/2");
        for s in ["-3/8", "(-1+1*sqrt(5))/2", "(3-1*sqrt(5))/2", "0/1", "7/1"] {
            assert_eq!(s.parse::<ExactNumber>().unwrap().to_string(), s);
        }
        assert_eq!("(3+-1*sqrt(5))/2".parse::<ExactNumber>().unwrap().to_string(), "(3-1*sqrt(5))/2");
        assert_eq!("5".parse::<ExactNumber>().unwrap(), q(5, 1));
        assert!("1/0".parse::<ExactNumber>().is_err());
        assert!("(1+1*sqrt(5)/2".parse::<ExactNumber>().is_err());
    }

    #[test]
    fn enclosure_brackets_value() {
        let g = golden_conjugate();
        let (lo, hi) = g.rational_enclosure(40);
        assert!(ExactNumber::from(lo.clone()) < g && g < ExactNumber::from(hi.clone()));
        assert!(hi - lo < BigRational::new(1.into(), BigInt::one() << 39));
    }

    fn rational() -> impl Strategy<Value = ExactNumber> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| q(n, d))
    }

    fn in_q5() -> impl Strategy<Value = ExactNumber> {
        (-50i64..50, -50i64..50, 1i64..50)
            .prop_map(|(a, b, c)| ExactNumber::quadratic(a, b, c, 5).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn rational_field_laws(a in rational(), b in rational(), c in rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        }
    }

    proptest! {
        #[test]
        fn quadratic_field_laws(a in in_q5(), b in in_q5(), c in in_q5()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                prop_assert_eq!(&(&a / &b) * &b, a.clone());
            }
        }

        #[test]
        fn order_is_total(a in in_q5(), b in in_q5(), c in in_q5()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
            // agrees with a high-precision rational enclosure when separated
            let (alo, ahi) = a.rational_enclosure(80);
            let (blo, bhi) = b.rational_enclosure(80);
            if ahi < blo { prop_assert_eq!(a.cmp(&b), Ordering::Less); }
            if bhi < alo { prop_assert_eq!(a.cmp(&b), Ordering::Greater); }
        }

        #[test]
        fn zero_irrational_part_embeds(a in -100i64..100, c in 1i64..100) {
            let x = ExactNumber::quadratic(a, 0, c, 5).unwrap();
            prop_assert_eq!(x.cmp(&q(a, c)), Ordering::Equal);
        }

        #[test]
        fn text_round_trip(a in in_q5()) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<ExactNumber>().unwrap(), a);
        }
    }
}
