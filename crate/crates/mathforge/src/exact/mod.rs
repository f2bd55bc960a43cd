//! Exact arbitrary-precision arithmetic.
//!
//! Every value that flows through a calculation trace is an [`ExactNumber`]:
//! an arbitrary-precision integer, a normalized rational, or a fixed-scale
//! decimal (a scaled integer, never a binary float). Equality and ordering
//! compare the denoted rational value, so `1/2`, `0.5`, and `2/4` are all
//! equal regardless of variant.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub mod nat;
mod parse;

pub use parse::{parse_number, NumberStyle};

/// Errors from exact-arithmetic operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    BothZero,
    #[error("negative input: {0}")]
    NegativeInput(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// A normalized rational: `den > 0`, `gcd(|num|, den) = 1`, `den != 1`.
///
/// Fields are private so values can only be built through the normalizing
/// constructors on [`ExactNumber`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ratio {
    num: BigInt,
    den: BigInt,
}

impl Ratio {
    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }
}

/// A fixed-scale decimal denoting `mantissa / 10^scale`, with `scale > 0`
/// and `mantissa` not divisible by 10.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dec {
    mantissa: BigInt,
    scale: u32,
}

impl Dec {
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }
}

/// An exact number: integer, normalized rational, or fixed-scale decimal.
///
/// Canonical form is maintained by every constructor and operation:
/// integer-valued results collapse to `Integer`, rationals stay reduced
/// with positive denominator, decimals carry no trailing zeros.
#[derive(Debug, Clone)]
pub enum ExactNumber {
    Integer(BigInt),
    Rational(Ratio),
    Decimal(Dec),
}

impl ExactNumber {
    pub fn int<T: Into<BigInt>>(value: T) -> Self {
        ExactNumber::Integer(value.into())
    }

    pub fn zero() -> Self {
        ExactNumber::Integer(BigInt::zero())
    }

    pub fn one() -> Self {
        ExactNumber::Integer(BigInt::one())
    }

    /// Builds a rational in canonical form. Collapses to `Integer` when the
    /// reduced denominator is 1.
    pub fn rational<T: Into<BigInt>, U: Into<BigInt>>(num: T, den: U) -> Result<Self, NumError> {
        let num = num.into();
        let den = den.into();
        if den.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Self::rational_normalized(num, den))
    }

    fn rational_normalized(mut num: BigInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            return ExactNumber::Integer(BigInt::zero());
        }
        let g = num.gcd(&den);
        num /= &g;
        den /= &g;
        if den.is_one() {
            ExactNumber::Integer(num)
        } else {
            ExactNumber::Rational(Ratio { num, den })
        }
    }

    /// Builds a decimal `mantissa · 10^-scale` in canonical form: trailing
    /// zeros move out of the mantissa, and scale 0 collapses to `Integer`.
    pub fn decimal<T: Into<BigInt>>(mantissa: T, scale: u32) -> Self {
        let mut mantissa = mantissa.into();
        let mut scale = scale;
        if mantissa.is_zero() {
            return ExactNumber::Integer(mantissa);
        }
        let ten = BigInt::from(10);
        while scale > 0 && (&mantissa % &ten).is_zero() {
            mantissa /= &ten;
            scale -= 1;
        }
        if scale == 0 {
            ExactNumber::Integer(mantissa)
        } else {
            ExactNumber::Decimal(Dec { mantissa, scale })
        }
    }

    /// The denoted value as a `(numerator, denominator)` pair with a
    /// positive denominator. Not reduced for `Decimal`.
    pub fn as_ratio(&self) -> (BigInt, BigInt) {
        match self {
            ExactNumber::Integer(n) => (n.clone(), BigInt::one()),
            ExactNumber::Rational(r) => (r.num.clone(), r.den.clone()),
            ExactNumber::Decimal(d) => (d.mantissa.clone(), BigInt::from(10).pow(d.scale)),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactNumber::Integer(n) => n.is_zero(),
            ExactNumber::Rational(_) => false,
            ExactNumber::Decimal(_) => false,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            ExactNumber::Integer(n) => n.is_negative(),
            ExactNumber::Rational(r) => r.num.is_negative(),
            ExactNumber::Decimal(d) => d.mantissa.is_negative(),
        }
    }

    /// The integer value when this number is an integer, `None` otherwise.
    pub fn as_integer(&self) -> Option<&BigInt> {
        match self {
            ExactNumber::Integer(n) => Some(n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExactNumber::Integer(n) => ExactNumber::Integer(-n),
            ExactNumber::Rational(r) => ExactNumber::Rational(Ratio {
                num: -&r.num,
                den: r.den.clone(),
            }),
            ExactNumber::Decimal(d) => ExactNumber::Decimal(Dec {
                mantissa: -&d.mantissa,
                scale: d.scale,
            }),
        }
    }

    fn is_rational_variant(&self) -> bool {
        matches!(self, ExactNumber::Rational(_))
    }

    /// Aligns two decimal-family values (Integer or Decimal) to a common
    /// scale, returning the two mantissas and the shared scale.
    fn align_decimal(a: &ExactNumber, b: &ExactNumber) -> (BigInt, BigInt, u32) {
        let (ma, sa) = match a {
            ExactNumber::Integer(n) => (n.clone(), 0u32),
            ExactNumber::Decimal(d) => (d.mantissa.clone(), d.scale),
            ExactNumber::Rational(_) => unreachable!("align_decimal on rational"),
        };
        let (mb, sb) = match b {
            ExactNumber::Integer(n) => (n.clone(), 0u32),
            ExactNumber::Decimal(d) => (d.mantissa.clone(), d.scale),
            ExactNumber::Rational(_) => unreachable!("align_decimal on rational"),
        };
        let scale = sa.max(sb);
        let ma = ma * BigInt::from(10).pow(scale - sa);
        let mb = mb * BigInt::from(10).pow(scale - sb);
        (ma, mb, scale)
    }

    /// Exact addition with variant promotion Integer → Decimal → Rational.
    pub fn add(&self, other: &ExactNumber) -> ExactNumber {
        match (self, other) {
            (ExactNumber::Integer(a), ExactNumber::Integer(b)) => ExactNumber::Integer(a + b),
            (a, b) if a.is_rational_variant() || b.is_rational_variant() => {
                let (an, ad) = a.as_ratio();
                let (bn, bd) = b.as_ratio();
                Self::rational_normalized(&an * &bd + &bn * &ad, ad * bd)
            }
            (a, b) => {
                let (ma, mb, scale) = Self::align_decimal(a, b);
                ExactNumber::decimal(ma + mb, scale)
            }
        }
    }

    pub fn sub(&self, other: &ExactNumber) -> ExactNumber {
        self.add(&other.neg())
    }

    /// Exact multiplication with the same promotion rules as [`add`].
    ///
    /// [`add`]: ExactNumber::add
    pub fn mul(&self, other: &ExactNumber) -> ExactNumber {
        match (self, other) {
            (ExactNumber::Integer(a), ExactNumber::Integer(b)) => ExactNumber::Integer(a * b),
            (a, b) if a.is_rational_variant() || b.is_rational_variant() => {
                let (an, ad) = a.as_ratio();
                let (bn, bd) = b.as_ratio();
                Self::rational_normalized(an * bn, ad * bd)
            }
            (a, b) => {
                let (ma, sa) = match a {
                    ExactNumber::Integer(n) => (n.clone(), 0u32),
                    ExactNumber::Decimal(d) => (d.mantissa.clone(), d.scale),
                    ExactNumber::Rational(_) => unreachable!(),
                };
                let (mb, sb) = match b {
                    ExactNumber::Integer(n) => (n.clone(), 0u32),
                    ExactNumber::Decimal(d) => (d.mantissa.clone(), d.scale),
                    ExactNumber::Rational(_) => unreachable!(),
                };
                ExactNumber::decimal(ma * mb, sa + sb)
            }
        }
    }

    /// Exact division. Integer-valued quotients collapse to `Integer`;
    /// decimal-family operands with a 10-smooth reduced denominator yield a
    /// `Decimal`; everything else is a `Rational`.
    pub fn div(&self, other: &ExactNumber) -> Result<ExactNumber, NumError> {
        if other.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        let (an, ad) = self.as_ratio();
        let (bn, bd) = other.as_ratio();
        let result = Self::rational_normalized(an * bd, ad * bn);
        // A quotient of two decimals stays a decimal when it has a finite
        // decimal expansion.
        let decimal_family = !self.is_rational_variant()
            && !other.is_rational_variant()
            && (matches!(self, ExactNumber::Decimal(_)) || matches!(other, ExactNumber::Decimal(_)));
        if decimal_family {
            if let ExactNumber::Rational(r) = &result {
                if let Some(scale) = ten_smooth_scale(&r.den) {
                    let factor = BigInt::from(10).pow(scale) / &r.den;
                    return Ok(ExactNumber::decimal(&r.num * factor, scale));
                }
            }
        }
        Ok(result)
    }

    /// Non-negative integer power by repeated squaring; `pow(x, 0) = 1`.
    pub fn pow(&self, exp: u32) -> ExactNumber {
        match self {
            ExactNumber::Integer(n) => ExactNumber::Integer(n.pow(exp)),
            ExactNumber::Rational(r) => {
                if exp == 0 {
                    return ExactNumber::one();
                }
                ExactNumber::Rational(Ratio {
                    num: r.num.pow(exp),
                    den: r.den.pow(exp),
                })
            }
            ExactNumber::Decimal(d) => {
                if exp == 0 {
                    return ExactNumber::one();
                }
                ExactNumber::decimal(d.mantissa.pow(exp), d.scale * exp)
            }
        }
    }

    /// Renders with the given style; `Display` uses [`NumberStyle::Plain`].
    pub fn render(&self, style: NumberStyle) -> String {
        parse::render_number(self, style)
    }

    pub fn to_f64_lossy(&self) -> f64 {
        let (n, d) = self.as_ratio();
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    }
}

/// `Some(s)` when `den = 2^a · 5^b` with `s = max(a, b)`, `None` otherwise.
fn ten_smooth_scale(den: &BigInt) -> Option<u32> {
    let mut d = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    d.is_one().then_some(twos.max(fives))
}

impl PartialEq for ExactNumber {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactNumber {}

impl PartialOrd for ExactNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        let (an, ad) = self.as_ratio();
        let (bn, bd) = other.as_ratio();
        (an * bd).cmp(&(bn * ad))
    }
}

impl std::hash::Hash for ExactNumber {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        let (mut n, mut d) = self.as_ratio();
        let g = n.gcd(&d);
        if !g.is_zero() {
            n /= &g;
            d /= &g;
        }
        n.hash(state);
        d.hash(state);
    }
}

impl fmt::Display for ExactNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(NumberStyle::Plain))
    }
}

impl FromStr for ExactNumber {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_number(s)
    }
}

impl From<i64> for ExactNumber {
    fn from(value: i64) -> Self {
        ExactNumber::Integer(BigInt::from(value))
    }
}

impl From<BigInt> for ExactNumber {
    fn from(value: BigInt) -> Self {
        ExactNumber::Integer(value)
    }
}

impl std::ops::Add for &ExactNumber {
    type Output = ExactNumber;
    fn add(self, rhs: Self) -> ExactNumber {
        ExactNumber::add(self, rhs)
    }
}

impl std::ops::Sub for &ExactNumber {
    type Output = ExactNumber;
    fn sub(self, rhs: Self) -> ExactNumber {
        ExactNumber::sub(self, rhs)
    }
}

impl std::ops::Mul for &ExactNumber {
    type Output = ExactNumber;
    fn mul(self, rhs: Self) -> ExactNumber {
        ExactNumber::mul(self, rhs)
    }
}

/// Positive greatest common divisor. Errors when both inputs are zero.
pub fn gcd(a: &BigInt, b: &BigInt) -> Result<BigInt, NumError> {
    if a.is_zero() && b.is_zero() {
        return Err(NumError::BothZero);
    }
    Ok(a.gcd(b))
}

/// Floor division with remainder: `a = q·b + r`, `0 ≤ r < b`. Requires `b > 0`.
pub fn floordiv_mod(a: &BigInt, b: &BigInt) -> Result<(BigInt, BigInt), NumError> {
    if b.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    if b.is_negative() {
        return Err(NumError::NegativeInput(format!("divisor {b}")));
    }
    Ok(a.div_mod_floor(b))
}

/// Integer square root: the largest `r` with `r² ≤ n`. Requires `n ≥ 0`.
pub fn isqrt(n: &BigInt) -> Result<BigInt, NumError> {
    if n.is_negative() {
        return Err(NumError::NegativeInput(n.to_string()));
    }
    Ok(n.sqrt())
}

/// Splits a non-negative integer into place-value parts, most significant
/// first, omitting zero digits: `841 → [800, 40, 1]`.
pub fn digit_decompose(n: &BigInt) -> Result<Vec<BigInt>, NumError> {
    if n.is_negative() {
        return Err(NumError::NegativeInput(n.to_string()));
    }
    if n.is_zero() {
        return Ok(Vec::new());
    }
    let digits = n.to_string();
    let len = digits.len();
    let parts = digits
        .bytes()
        .enumerate()
        .filter(|&(_, d)| d != b'0')
        .map(|(i, d)| {
            let digit = BigInt::from(d - b'0');
            digit * BigInt::from(10).pow((len - 1 - i) as u32)
        })
        .collect();
    Ok(parts)
}

/// Number of decimal digits of `|n|`; 0 has one digit.
pub fn digit_count(n: &BigInt) -> usize {
    n.abs().to_string().len()
}

pub use nat::{nat_div, nat_sub};

#[allow(unused_imports)]
pub(crate) use num_bigint::BigUint as Natural;

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: i64) -> ExactNumber {
        ExactNumber::from(v)
    }

    #[test]
    fn add_integers() {
        assert_eq!(n(12).add(&n(17)), n(29));
        assert_eq!(n(5).add(&ExactNumber::zero()), n(5));
    }

    #[test]
    fn decimal_addition_is_exact() {
        let a = ExactNumber::decimal(1, 1); // 0.1
        let b = ExactNumber::decimal(2, 1); // 0.2
        assert_eq!(a.add(&b), ExactNumber::decimal(3, 1)); // exactly 0.3
    }

    #[test]
    fn division_simplifies() {
        assert_eq!(n(12).div(&n(2)).unwrap(), n(6));
        assert_eq!(n(1).div(&n(3)).unwrap(), ExactNumber::rational(1, 3).unwrap());
        assert!(n(7).div(&ExactNumber::zero()).is_err());
        let x = ExactNumber::rational(7, 3).unwrap();
        assert_eq!(x.div(&x).unwrap(), ExactNumber::one());
    }

    #[test]
    fn decimal_family_division() {
        let half = ExactNumber::decimal(5, 1);
        assert_eq!(half.div(&n(2)).unwrap(), ExactNumber::decimal(25, 2));
        // 0.1 / 0.3 has no finite decimal expansion
        let a = ExactNumber::decimal(1, 1);
        let b = ExactNumber::decimal(3, 1);
        assert_eq!(a.div(&b).unwrap(), ExactNumber::rational(1, 3).unwrap());
    }

    #[test]
    fn rational_canonical_form() {
        let r = ExactNumber::rational(3, 6).unwrap();
        assert_eq!(r, ExactNumber::rational(1, 2).unwrap());
        let collapsed = ExactNumber::rational(4, 2).unwrap();
        assert_eq!(collapsed, n(2));
        assert!(matches!(collapsed, ExactNumber::Integer(_)));
        let neg = ExactNumber::rational(1, -2).unwrap();
        assert_eq!(neg, ExactNumber::rational(-1, 2).unwrap());
    }

    #[test]
    fn cross_variant_equality() {
        assert_eq!(ExactNumber::decimal(5, 1), ExactNumber::rational(1, 2).unwrap());
        assert_eq!(ExactNumber::decimal(50, 1), n(5)); // canonicalizes to Integer
        assert_ne!(ExactNumber::decimal(5, 1), ExactNumber::rational(1, 3).unwrap());
    }

    #[test]
    fn pow_cases() {
        assert_eq!(n(29).pow(3), n(24389));
        assert_eq!(n(5).pow(2), n(25));
        assert_eq!(n(7).pow(1), n(7));
        assert_eq!(n(0).pow(0), n(1));
        let half = ExactNumber::rational(1, 2).unwrap();
        assert_eq!(half.pow(2), ExactNumber::rational(1, 4).unwrap());
    }

    #[test]
    fn floordiv_mod_paper_values() {
        let (q, r) = floordiv_mod(&BigInt::from(5287), &BigInt::from(17)).unwrap();
        assert_eq!((q, r), (BigInt::from(311), BigInt::from(0)));
        let (q, r) = floordiv_mod(&BigInt::from(5287), &BigInt::from(3)).unwrap();
        assert_eq!((q, r), (BigInt::from(1762), BigInt::from(1)));
        let (q, r) = floordiv_mod(&BigInt::from(0), &BigInt::from(9)).unwrap();
        assert_eq!((q, r), (BigInt::from(0), BigInt::from(0)));
        assert!(floordiv_mod(&BigInt::from(1), &BigInt::from(0)).is_err());
    }

    #[test]
    fn gcd_cases() {
        assert_eq!(gcd(&BigInt::from(12), &BigInt::from(8)).unwrap(), BigInt::from(4));
        assert_eq!(gcd(&BigInt::from(1), &BigInt::from(999)).unwrap(), BigInt::from(1));
        assert_eq!(gcd(&BigInt::from(-6), &BigInt::from(0)).unwrap(), BigInt::from(6));
        assert_eq!(gcd(&BigInt::from(0), &BigInt::from(0)), Err(NumError::BothZero));
    }

    #[test]
    fn isqrt_cases() {
        assert_eq!(isqrt(&BigInt::from(5287)).unwrap(), BigInt::from(72));
        assert_eq!(isqrt(&BigInt::from(0)).unwrap(), BigInt::from(0));
        assert_eq!(isqrt(&BigInt::from(1)).unwrap(), BigInt::from(1));
        let big = BigInt::from(10).pow(18);
        assert_eq!(isqrt(&big).unwrap(), BigInt::from(10).pow(9));
        assert!(isqrt(&BigInt::from(-1)).is_err());
    }

    #[test]
    fn digit_decompose_cases() {
        let parts = digit_decompose(&BigInt::from(841)).unwrap();
        assert_eq!(parts, vec![BigInt::from(800), BigInt::from(40), BigInt::from(1)]);
        assert_eq!(digit_decompose(&BigInt::from(7)).unwrap(), vec![BigInt::from(7)]);
        let parts = digit_decompose(&BigInt::from(1005)).unwrap();
        assert_eq!(parts, vec![BigInt::from(1000), BigInt::from(5)]);
        assert_eq!(parts.iter().sum::<BigInt>(), BigInt::from(1005));
        assert!(digit_decompose(&BigInt::from(0)).unwrap().is_empty());
    }

    #[test]
    fn ordering_across_variants() {
        let third = ExactNumber::rational(1, 3).unwrap();
        let point3 = ExactNumber::decimal(3, 1);
        assert!(point3 < third);
        assert!(n(1) > point3);
    }
}
