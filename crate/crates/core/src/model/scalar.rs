//! Amplitude and probability arithmetic.
//!
//! Two amplitude backends exist. The rational backend stores exact real
//! rationals and refuses to produce irrational entries; the float backend
//! stores `Complex64` and compares with an explicit tolerance.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Default tolerance for float-backend invariant checks (unitarity, norms).
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Per-component tolerance used when merging float-backend configurations.
pub const MERGE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Rational => f.write_str("rational"),
            Backend::Float => f.write_str("float"),
        }
    }
}

/// A probability mass: exact rational or `f64`.
pub trait Weight:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + 'static
{
    /// True when arithmetic on this type is exact.
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// `p/q` rendering, only for exact weights.
    fn exact_string(&self) -> Option<String>;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }

    /// `sum += x`, with `carry` holding the rounding error for inexact types.
    fn compensated_add(sum: &mut Self, carry: &mut Self, x: Self) {
        let _ = carry;
        *sum = sum.clone() + x;
    }
}

impl Weight for f64 {
    const EXACT: bool = false;

    fn compensated_add(sum: &mut f64, carry: &mut f64, x: f64) {
        // Neumaier summation.
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *carry += (*sum - t) + x;
        } else {
            *carry += (x - t) + *sum;
        }
        *sum = t;
    }

    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn exact_string(&self) -> Option<String> {
        None
    }
}

impl Weight for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn exact_string(&self) -> Option<String> {
        Some(format_rational(self))
    }
}

/// Conversion of a backend probability into the weight type an evaluation
/// accumulates in.
pub trait IntoWeight<W> {
    fn into_weight(&self) -> W;
}

impl IntoWeight<BigRational> for BigRational {
    fn into_weight(&self) -> BigRational {
        self.clone()
    }
}

impl IntoWeight<f64> for BigRational {
    fn into_weight(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl IntoWeight<f64> for f64 {
    fn into_weight(&self) -> f64 {
        *self
    }
}

/// Amplitude field shared by state vectors, unitaries and projectors.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// The type Born-rule probabilities come out in.
    type Prob: Weight + IntoWeight<f64> + IntoWeight<Self::Prob>;

    const BACKEND: Backend;

    fn zero_amp() -> Self;
    fn one_amp() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    /// `|self|^2`.
    fn norm_sqr(&self) -> Self::Prob;

    /// Real part as a probability. Used for `<v|P|v>`, which is real for a
    /// Hermitian `P`.
    fn real_prob(&self) -> Self::Prob;

    /// `self / sqrt(p)`. The rational backend errors when `sqrt(p)` is
    /// irrational.
    fn div_sqrt(&self, p: &Self::Prob) -> Result<Self, ModelError>;

    fn is_exact_zero(&self) -> bool;
    fn abs_f64(&self) -> f64;

    /// `self / |self|` for a nonzero amplitude.
    fn unit_phase(&self) -> Self;

    /// Equality; `tol` is ignored by the rational backend.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;

    fn to_complex(&self) -> Complex64;

    fn parse(text: &str) -> Result<Self, ModelError>;
    fn render(&self) -> String;
}

impl Scalar for BigRational {
    type Prob = BigRational;

    const BACKEND: Backend = Backend::Rational;

    fn zero_amp() -> Self {
        Zero::zero()
    }

    fn one_amp() -> Self {
        One::one()
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn norm_sqr(&self) -> BigRational {
        self * self
    }

    fn real_prob(&self) -> BigRational {
        self.clone()
    }

    fn div_sqrt(&self, p: &BigRational) -> Result<Self, ModelError> {
        let root =
            rational_sqrt(p).ok_or_else(|| ModelError::IrrationalAmplitude(format_rational(p)))?;
        if root.is_zero() {
            return Err(ModelError::ZeroProbabilityOutcome);
        }
        Ok(self / root)
    }

    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn abs_f64(&self) -> f64 {
        rational_to_f64(self).abs()
    }

    fn unit_phase(&self) -> Self {
        if self.is_negative() {
            -BigRational::one()
        } else {
            BigRational::one()
        }
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }

    fn parse(text: &str) -> Result<Self, ModelError> {
        parse_rational(text)
    }

    fn render(&self) -> String {
        format_rational(self)
    }
}

impl Scalar for Complex64 {
    type Prob = f64;

    const BACKEND: Backend = Backend::Float;

    fn zero_amp() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn one_amp() -> Self {
        Complex64::new(1.0, 0.0)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }

    fn real_prob(&self) -> f64 {
        self.re
    }

    fn div_sqrt(&self, p: &f64) -> Result<Self, ModelError> {
        if *p <= 0.0 {
            return Err(ModelError::ZeroProbabilityOutcome);
        }
        Ok(self / p.sqrt())
    }

    fn is_exact_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn abs_f64(&self) -> f64 {
        self.norm()
    }

    fn unit_phase(&self) -> Self {
        self / self.norm()
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.re - other.re).abs() <= tol && (self.im - other.im).abs() <= tol
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn parse(text: &str) -> Result<Self, ModelError> {
        parse_complex(text)
    }

    fn render(&self) -> String {
        if self.im == 0.0 {
            format!("{:?}", self.re)
        } else if self.im.is_sign_negative() {
            format!("{:?}-{:?}i", self.re, -self.im)
        } else {
            format!("{:?}+{:?}i", self.re, self.im)
        }
    }
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(r) {
        if x.is_finite() {
            return x;
        }
    }
    // Huge numerators and denominators: scale both down before dividing.
    let n = r.numer();
    let d = r.denom();
    let shift = n.bits().max(d.bits()).saturating_sub(1000);
    let ns = (n >> shift).to_f64().unwrap_or(0.0);
    let ds = (d >> shift).to_f64().unwrap_or(f64::INFINITY);
    ns / ds
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<BigRational, ModelError> {
    let bad = || ModelError::Parse(format!("not a rational number: {text:?}"));
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => {
            if let Ok(n) = text.parse::<BigInt>() {
                return Ok(BigRational::from_integer(n));
            }
            // Terminating decimals are rational too.
            let (sign, body) = match text.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, text.strip_prefix('+').unwrap_or(text)),
            };
            let (int, frac) = body.split_once('.').ok_or_else(bad)?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            Ok(BigRational::new(digits * sign, den))
        }
    }
}

fn parse_complex(text: &str) -> Result<Complex64, ModelError> {
    let bad = || ModelError::Parse(format!("not a float amplitude: {text:?}"));
    let t = text.trim();
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not part of an exponent.
        let bytes = body.as_bytes();
        let split = (1..bytes.len()).rev().find(|&i| {
            (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
        });
        return match split {
            Some(i) => {
                let re: f64 = body[..i].parse().map_err(|_| bad())?;
                let im: f64 = body[i..].parse().map_err(|_| bad())?;
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = body.parse().map_err(|_| bad())?;
                Ok(Complex64::new(0.0, im))
            }
        };
    }
    if t.contains('/') {
        return parse_rational(t).map(|r| Complex64::new(rational_to_f64(&r), 0.0));
    }
    t.parse::<f64>()
        .map(|re| Complex64::new(re, 0.0))
        .map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parse_forms() {
        assert_eq!(parse_rational("4/5").unwrap(), rational(4, 5));
        assert_eq!(parse_rational("-3").unwrap(), rational(-3, 1));
        assert_eq!(parse_rational("0.25").unwrap(), rational(1, 4));
        assert_eq!(parse_rational("-0.6").unwrap(), rational(-3, 5));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn complex_parse_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(
            parse_complex("0.5-0.25i").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(
            parse_complex("1e-3+2e-3i").unwrap(),
            Complex64::new(1e-3, 2e-3)
        );
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("3/4").unwrap(), Complex64::new(0.75, 0.0));
    }

    #[test]
    fn float_render_roundtrips() {
        for z in [
            Complex64::new(0.1, 0.0),
            Complex64::new(-0.3, 1e-17),
            Complex64::new(2.0, -0.5),
        ] {
            assert_eq!(parse_complex(&z.render()).unwrap(), z);
        }
    }

    #[test]
    fn rational_sqrt_only_for_squares() {
        assert_eq!(rational_sqrt(&rational(9, 25)), Some(rational(3, 5)));
        assert_eq!(rational_sqrt(&rational(2, 1)), None);
        assert_eq!(rational_sqrt(&rational(-1, 4)), None);
    }

    #[test]
    fn irrational_normalization_is_an_error() {
        let a = rational(1, 1);
        assert!(matches!(
            a.div_sqrt(&rational(1, 2)),
            Err(ModelError::IrrationalAmplitude(_))
        ));
        assert_eq!(
            rational(-3, 5).div_sqrt(&rational(9, 25)).unwrap(),
            rational(-1, 1)
        );
    }

    #[test]
    fn huge_rationals_convert() {
        let big = num_traits::pow(BigInt::from(5), 2000);
        let r = BigRational::new(&big + 1, big * 2);
        assert!((rational_to_f64(&r) - 0.5).abs() < 1e-15);
    }
}
