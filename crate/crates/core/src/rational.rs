//! Exact rational helpers: literal parsing, canonical text form and
//! magnitude estimates for values far below `f64` range.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number, always kept in lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"a/b"`, an integer, or a base-10 decimal such as `"0.0349"`.
/// Decimals are converted to exact base-10 fractions.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(num, den);
    Some(if negative { -value } else { value })
}

/// Canonical `numerator/denominator` text, used in every serialized report.
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

pub(crate) fn log10_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).log10();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// `log10 |r|`; `-inf` for zero. Works far outside the `f64` exponent range.
pub fn log10_abs(r: &Rational) -> f64 {
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    log10_biguint(r.numer().magnitude()) - log10_biguint(r.denom().magnitude())
}

/// Exact test of `|r| < 10^exponent` for integer exponents of any sign.
pub fn abs_below_pow10(r: &Rational, exponent: i64) -> bool {
    let ten = BigInt::from(10u32);
    let p = num_traits::pow(ten, exponent.unsigned_abs() as usize);
    let bound = if exponent >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    };
    r.abs() < bound
}

/// Least common multiple of the denominators.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

pub(crate) fn sign_of(r: &Rational) -> Sign {
    if r.is_zero() {
        Sign::NoSign
    } else if r.is_positive() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(parse_rational("0.0349"), Some(rat(349, 10000)));
        assert_eq!(parse_rational("0.5"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1"), Some(int(1)));
        assert_eq!(parse_rational(".25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-0.5"), Some(rat(-1, 2)));
    }

    #[test]
    fn fraction_literals_reduce() {
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("349/10000"), Some(rat(349, 10000)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("a/2"), None);
        assert_eq!(parse_rational("."), None);
        assert_eq!(parse_rational("1e-3"), None);
    }

    #[test]
    fn canonical_text() {
        assert_eq!(fmt_rational(&rat(12, 64)), "3/16");
        assert_eq!(fmt_rational(&int(1)), "1/1");
        assert_eq!(fmt_rational(&int(0)), "0/1");
    }

    #[test]
    fn log10_of_tiny_values() {
        let tiny = Rational::new(BigInt::one(), BigInt::one() << 2407usize);
        let expected = -2407.0 * std::f64::consts::LOG10_2;
        assert!((log10_abs(&tiny) - expected).abs() < 1e-9);
        assert!((log10_abs(&rat(1, 1000)) + 3.0).abs() < 1e-12);
        assert!(abs_below_pow10(&tiny, -724));
        assert!(!abs_below_pow10(&tiny, -725));
    }
}
