//! Certified numbers: exact rationals or outward-rounded dyadic intervals.
//!
//! Interval endpoints are `mantissa * 2^exponent` with at most `bits`
//! significant bits; every operation rounds the lower endpoint toward
//! negative infinity and the upper endpoint toward positive infinity, so
//! the true value is always enclosed.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::rational::{fmt_rational, log10_abs, sign_of, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Round {
    Down,
    Up,
}

/// `mantissa * 2^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

fn shift_floor(m: &BigInt, s: u64) -> BigInt {
    m.div_floor(&(BigInt::one() << s))
}

fn shift_ceil(m: &BigInt, s: u64) -> BigInt {
    -shift_floor(&-m, s)
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    fn rounded(mantissa: BigInt, exponent: i64, bits: u32, dir: Round) -> Self {
        let len = mantissa.bits();
        if len <= bits as u64 {
            return Dyadic { mantissa, exponent };
        }
        let s = len - bits as u64;
        let mantissa = match dir {
            Round::Down => shift_floor(&mantissa, s),
            Round::Up => shift_ceil(&mantissa, s),
        };
        Dyadic { mantissa, exponent: exponent + s as i64 }
    }

    fn aligned(a: &Dyadic, b: &Dyadic) -> (BigInt, BigInt, i64) {
        let e = a.exponent.min(b.exponent);
        let ma = &a.mantissa << (a.exponent - e) as u64;
        let mb = &b.mantissa << (b.exponent - e) as u64;
        (ma, mb, e)
    }

    fn add(&self, other: &Dyadic, bits: u32, dir: Round) -> Dyadic {
        if self.mantissa.is_zero() {
            return Dyadic::rounded(other.mantissa.clone(), other.exponent, bits, dir);
        }
        if other.mantissa.is_zero() {
            return Dyadic::rounded(self.mantissa.clone(), self.exponent, bits, dir);
        }
        let (a, b, e) = Dyadic::aligned(self, other);
        Dyadic::rounded(a + b, e, bits, dir)
    }

    fn mul(&self, other: &Dyadic, bits: u32, dir: Round) -> Dyadic {
        Dyadic::rounded(&self.mantissa * &other.mantissa, self.exponent + other.exponent, bits, dir)
    }

    fn neg(&self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }

    fn from_rational(r: &Rational, bits: u32, dir: Round) -> Dyadic {
        if r.is_zero() {
            return Dyadic::zero();
        }
        let num = r.numer();
        let den = r.denom();
        // scale so that the quotient carries about `bits + 1` bits
        let shift = bits as i64 + 1 - (num.bits() as i64 - den.bits() as i64);
        let (n, d) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let q = match dir {
            Round::Down => n.div_floor(&d),
            Round::Up => -((-n).div_floor(&d)),
        };
        Dyadic::rounded(q, -shift, bits, dir)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(&self.mantissa << self.exponent as u64)
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as u64)
        }
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }

    pub fn log10_abs(&self) -> f64 {
        if self.mantissa.is_zero() {
            return f64::NEG_INFINITY;
        }
        log10_abs(&Rational::from_integer(self.mantissa.clone()))
            + self.exponent as f64 * std::f64::consts::LOG10_2
    }

    fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let (a, b, _) = Dyadic::aligned(self, other);
        a.cmp(&b)
    }

    /// Scientific notation with `digits` significant digits, rounded in
    /// direction `dir` so that the text still bounds the value.
    fn to_sci(&self, digits: u32, dir: Round) -> String {
        if self.mantissa.is_zero() {
            return "0".to_string();
        }
        let r = self.to_rational();
        let mut k = self.log10_abs().floor() as i64 - (digits as i64 - 1);
        loop {
            let ten = BigInt::from(10u32);
            let scale = num_traits::pow(ten, k.unsigned_abs() as usize);
            let scaled = if k >= 0 { &r / Rational::from_integer(scale) } else { &r * Rational::from_integer(scale) };
            let q = match dir {
                Round::Down => scaled.floor(),
                Round::Up => scaled.ceil(),
            }
            .to_integer();
            let text = q.abs().to_string();
            if text.len() > digits as usize {
                k += 1;
                continue;
            }
            if text.len() < digits as usize && k > -100_000_000 && q.abs() > BigInt::one() {
                k -= 1;
                continue;
            }
            let sign = if q.is_negative() { "-" } else { "" };
            let exp = k + text.len() as i64 - 1;
            let (head, tail) = text.split_at(1);
            return if tail.is_empty() {
                format!("{sign}{head}e{exp}")
            } else {
                format!("{sign}{head}.{tail}e{exp}")
            };
        }
    }
}

/// Closed interval `[lo, hi]` with dyadic endpoints at a fixed precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    bits: u32,
}

impl Interval {
    pub fn from_rational(r: &Rational, bits: u32) -> Interval {
        Interval {
            lo: Dyadic::from_rational(r, bits, Round::Down),
            hi: Dyadic::from_rational(r, bits, Round::Up),
            bits,
        }
    }

    pub fn from_integer(n: &BigInt, bits: u32) -> Interval {
        Interval::from_rational(&Rational::from_integer(n.clone()), bits)
    }

    pub fn zero(bits: u32) -> Interval {
        Interval { lo: Dyadic::zero(), hi: Dyadic::zero(), bits }
    }

    pub fn one(bits: u32) -> Interval {
        Interval::from_rational(&Rational::one(), bits)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let bits = self.bits.min(other.bits);
        Interval {
            lo: self.lo.add(&other.lo, bits, Round::Down),
            hi: self.hi.add(&other.hi, bits, Round::Up),
            bits,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), bits: self.bits }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let bits = self.bits.min(other.bits);
        let corners = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let lo = corners
            .iter()
            .map(|(a, b)| a.mul(b, bits, Round::Down))
            .min_by(|a, b| a.cmp_value(b))
            .expect("four corners");
        let hi = corners
            .iter()
            .map(|(a, b)| a.mul(b, bits, Round::Up))
            .max_by(|a, b| a.cmp_value(b))
            .expect("four corners");
        Interval { lo, hi, bits }
    }

    pub fn mul_integer(&self, n: &BigInt) -> Interval {
        self.mul(&Interval::from_integer(n, self.bits))
    }

    pub fn pow(&self, k: u32) -> Interval {
        let mut acc = Interval::one(self.bits);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.sign() != Sign::Plus && self.hi.sign() != Sign::Minus
    }

    /// Sign of every enclosed value, or `None` when zero is not excluded.
    /// The degenerate interval `[0, 0]` certifies zero.
    pub fn certified_sign(&self) -> Option<Sign> {
        if self.lo.sign() == Sign::Plus {
            Some(Sign::Plus)
        } else if self.hi.sign() == Sign::Minus {
            Some(Sign::Minus)
        } else if self.lo.mantissa.is_zero() && self.hi.mantissa.is_zero() {
            Some(Sign::NoSign)
        } else {
            None
        }
    }

    pub fn contains(&self, r: &Rational) -> bool {
        self.lo.to_rational() <= *r && *r <= self.hi.to_rational()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo.to_sci(17, Round::Down), self.hi.to_sci(17, Round::Up))
    }
}

/// A value with a trustworthy sign: either exact, or an enclosing interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifiedNumber {
    Exact(Rational),
    Interval(Interval),
}

impl CertifiedNumber {
    pub fn sign(&self) -> Option<Sign> {
        match self {
            CertifiedNumber::Exact(r) => Some(sign_of(r)),
            CertifiedNumber::Interval(i) => i.certified_sign(),
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        match self {
            CertifiedNumber::Exact(r) => Some(r),
            CertifiedNumber::Interval(_) => None,
        }
    }

    pub fn sub(&self, other: &CertifiedNumber) -> CertifiedNumber {
        match (self, other) {
            (CertifiedNumber::Exact(a), CertifiedNumber::Exact(b)) => CertifiedNumber::Exact(a - b),
            (a, b) => {
                let bits = a.bits().or(b.bits()).unwrap_or(256);
                CertifiedNumber::Interval(a.to_interval(bits).sub(&b.to_interval(bits)))
            }
        }
    }

    pub fn bits(&self) -> Option<u32> {
        match self {
            CertifiedNumber::Exact(_) => None,
            CertifiedNumber::Interval(i) => Some(i.bits()),
        }
    }

    pub fn to_interval(&self, bits: u32) -> Interval {
        match self {
            CertifiedNumber::Exact(r) => Interval::from_rational(r, bits),
            CertifiedNumber::Interval(i) => i.clone(),
        }
    }

    /// Range of `log10 |x|` over the enclosed values (a point for exact
    /// values). `None` when the interval contains zero.
    pub fn log10_abs_window(&self) -> Option<(f64, f64)> {
        match self {
            CertifiedNumber::Exact(r) if r.is_zero() => None,
            CertifiedNumber::Exact(r) => {
                let l = log10_abs(r);
                Some((l, l))
            }
            CertifiedNumber::Interval(i) => {
                if i.contains_zero() {
                    return None;
                }
                let (a, b) = (i.lo.log10_abs(), i.hi.log10_abs());
                Some((a.min(b), a.max(b)))
            }
        }
    }

    /// Whether every enclosed value satisfies `|x| < 10^exponent`.
    pub fn abs_below_pow10(&self, exponent: i64) -> bool {
        match self {
            CertifiedNumber::Exact(r) => crate::rational::abs_below_pow10(r, exponent),
            CertifiedNumber::Interval(i) => {
                crate::rational::abs_below_pow10(&i.lo.to_rational(), exponent)
                    && crate::rational::abs_below_pow10(&i.hi.to_rational(), exponent)
            }
        }
    }
}

impl fmt::Display for CertifiedNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifiedNumber::Exact(r) => f.write_str(&fmt_rational(r)),
            CertifiedNumber::Interval(i) => i.fmt(f),
        }
    }
}

impl Serialize for CertifiedNumber {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CertifiedNumber::Exact(r) => s.serialize_str(&fmt_rational(r)),
            CertifiedNumber::Interval(i) => {
                let mut st = s.serialize_struct("Interval", 3)?;
                st.serialize_field("lo", &i.lo.to_sci(17, Round::Down))?;
                st.serialize_field("hi", &i.hi.to_sci(17, Round::Up))?;
                st.serialize_field("bits", &i.bits)?;
                st.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn thirds_are_enclosed() {
        for bits in [8, 64, 256] {
            let i = Interval::from_rational(&rat(1, 3), bits);
            assert!(i.contains(&rat(1, 3)));
            assert!(!i.contains(&rat(1, 3 + 1)));
            assert_eq!(i.certified_sign(), Some(Sign::Plus));
        }
    }

    #[test]
    fn cancellation_loses_sign_at_low_precision() {
        let eps = Rational::new(BigInt::one(), BigInt::one() << 300usize);
        let a = Interval::from_rational(&(rat(1, 3) + &eps), 64);
        let b = Interval::from_rational(&rat(1, 3), 64);
        assert_eq!(a.sub(&b).certified_sign(), None);
        let a = Interval::from_rational(&(rat(1, 3) + &eps), 512);
        let b = Interval::from_rational(&rat(1, 3), 512);
        let d = a.sub(&b);
        assert_eq!(d.certified_sign(), Some(Sign::Plus));
        assert!(d.contains(&eps));
    }

    #[test]
    fn scientific_text_bounds_value() {
        let i = Interval::from_rational(&rat(-2, 3), 128);
        assert_eq!(i.to_string(), "[-6.6666666666666667e-1, -6.6666666666666666e-1]");
        let i = Interval::from_rational(&rat(1, 1), 64);
        assert_eq!(i.to_string(), "[1.0000000000000000e0, 1.0000000000000000e0]");
        assert_eq!(Interval::zero(64).to_string(), "[0, 0]");
    }

    #[test]
    fn certified_zero() {
        assert_eq!(Interval::zero(64).certified_sign(), Some(Sign::NoSign));
        assert_eq!(CertifiedNumber::Exact(rat(0, 1)).sign(), Some(Sign::NoSign));
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn operations_enclose_exact_results(a in small_rat(), b in small_rat(), bits in 4u32..80) {
            let ia = Interval::from_rational(&a, bits);
            let ib = Interval::from_rational(&b, bits);
            prop_assert!(ia.add(&ib).contains(&(&a + &b)));
            prop_assert!(ia.sub(&ib).contains(&(&a - &b)));
            prop_assert!(ia.mul(&ib).contains(&(&a * &b)));
            prop_assert!(ia.pow(3).contains(&(&a * &a * &a)));
            prop_assert!(ia.mul_integer(&BigInt::from(-7)).contains(&(&a * rat(-7, 1))));
        }
    }
}
