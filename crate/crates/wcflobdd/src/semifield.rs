//! Weight algebra.
//!
//! A semi-field is a commutative semiring in which every nonzero element has a
//! multiplicative inverse. Instances: exact rationals ([`Rational`]), real
//! floats (`f64`), complex floats ([`Complex64`]) and the max-plus semifield
//! over exact rationals ([`Tropical`]).
//!
//! The unique table compares weights through [`Semifield::key`]. Rationals are
//! keyed by their normalized fraction; floating instances round to
//! [`rounding_digits`] significant decimal digits (complex numbers relative to
//! their larger part), so `0.1 + 0.2` and `0.3` share a key, `-0.0` keys like
//! `0.0`, and tiny magnitudes such as `2^-500` stay distinct from zero.
//! Addition turns cancellation noise into an exact zero.

use alloc::format;
use alloc::string::{String, ToString};
use core::fmt::{self, Debug, Display};
use core::hash::Hash;
use core::sync::atomic::{AtomicU32, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use num_complex::Complex64;
pub use num_rational::BigRational as Rational;

static ROUNDING_DIGITS: AtomicU32 = AtomicU32::new(10);

/// Significant decimal digits kept by floating canonical keys (default 10).
pub fn rounding_digits() -> u32 {
    ROUNDING_DIGITS.load(Ordering::Relaxed)
}

/// Changes the precision of floating canonical keys. Affects every manager;
/// set it before building diagrams.
pub fn set_rounding_digits(digits: u32) {
    ROUNDING_DIGITS.store(digits.min(15), Ordering::Relaxed);
}

/// The concrete weight domain of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instance {
    Rational,
    Real,
    Complex,
    Tropical,
}

impl Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Instance::Rational => "rational",
            Instance::Real => "float",
            Instance::Complex => "complex",
            Instance::Tropical => "tropical",
        })
    }
}

/// A semi-field `⟨A, +, ·, 0̄, 1̄⟩` with inverses and a hashing key.
pub trait Semifield: Clone + Debug + Display + Send + Sync + 'static {
    /// Hashable representative; equal keys mean equal weights.
    type Key: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    const INSTANCE: Instance;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn inverse(&self) -> Result<Self>;
    fn key(&self) -> Self::Key;
    fn from_ratio(p: i64, q: i64) -> Self;
    fn parse(text: &str) -> Result<Self>;
    /// Lossless text for dump files (round-trips through [`Semifield::parse`]).
    fn to_text(&self) -> String {
        self.to_string()
    }
    /// Text rounded to the canonical-key precision, for human output.
    fn to_display(&self) -> String {
        self.to_string()
    }

    fn is_zero(&self) -> bool {
        self.key() == Self::zero().key()
    }
    fn is_one(&self) -> bool {
        self.key() == Self::one().key()
    }
    fn same(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
    fn div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.mul(&rhs.inverse()?))
    }
}

/// Instances with additive inverses; diagram subtraction needs `-1̄`.
pub trait Field: Semifield {
    fn neg(&self) -> Self;
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }
}

/// Instances that embed into the complex numbers.
pub trait Numeric: Field {
    /// Value as a complex number, for comparison against dense oracles.
    fn to_complex(&self) -> Complex64;
    /// Squared magnitude `|w|²`.
    fn norm_sqr(&self) -> f64;
    /// The instance element closest to `x`.
    fn from_f64(x: f64) -> Self;
}

fn parse_err(text: &str) -> Error {
    Error::Parse(text.to_string())
}

fn parse_decimal(text: &str) -> Result<Rational> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(parse_err(text));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| parse_err(text))?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

impl Semifield for Rational {
    type Key = Rational;
    const INSTANCE: Instance = Instance::Rational;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inverse(&self) -> Result<Self> {
        if Zero::is_zero(self) {
            Err(Error::ZeroInverse)
        } else {
            Ok(self.recip())
        }
    }
    fn key(&self) -> Self::Key {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn same(&self, other: &Self) -> bool {
        self == other
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }
    fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        match t.split_once('/') {
            Some((p, q)) => {
                let p = parse_decimal(p)?;
                let q = parse_decimal(q)?;
                if Zero::is_zero(&q) {
                    return Err(parse_err(text));
                }
                Ok(p / q)
            }
            None => parse_decimal(t),
        }
    }
}

impl Field for Rational {
    fn neg(&self) -> Self {
        -self
    }
}

impl Numeric for Rational {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(rational_to_f64(self), 0.0)
    }
    fn norm_sqr(&self) -> f64 {
        let x = rational_to_f64(self);
        x * x
    }
    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).unwrap_or_else(Zero::zero)
    }
}

/// Nearest `f64` to a rational (saturating to infinity for huge values).
pub fn rational_to_f64(r: &Rational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer().abs() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
            let v = if d == 0.0 { f64::INFINITY } else { n / d };
            if r.is_negative() {
                -v
            } else {
                v
            }
        }
    }
}

/// Significant bits kept by floating keys: enough for `rounding_digits`
/// decimal digits.
fn key_bits() -> i32 {
    libm::ceil(rounding_digits() as f64 * core::f64::consts::LOG2_10) as i32
}

/// `x` rounded to a multiple of `2^(e - key_bits)`, where `2^e` bounds the
/// magnitude being keyed. `-0.0` becomes `0.0`.
fn round_at(x: f64, e: i32) -> f64 {
    let bits = key_bits();
    let r = libm::ldexp(libm::round(libm::ldexp(x, bits - e)), e - bits);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn exponent(x: f64) -> i32 {
    libm::frexp(x).1
}

/// `x` rounded to the key precision, relative to its own magnitude.
fn round_relative(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x + 0.0;
    }
    round_at(x, exponent(x.abs()))
}

/// A sum whose magnitude is below the key precision of its larger operand
/// is cancellation noise and becomes exactly zero.
fn cancel(sum: f64, scale: f64) -> f64 {
    if sum.abs() <= libm::ldexp(scale, -key_bits()) {
        0.0
    } else {
        sum
    }
}

/// Human text with `rounding_digits` significant digits.
fn format_rounded(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = rounding_digits().max(1) as usize;
    let y: f64 = format!("{:.*e}", digits - 1, x).parse().unwrap_or(x);
    if y.abs() < 1e-6 || y.abs() >= 1e15 {
        format!("{y:e}")
    } else {
        format!("{y}")
    }
}

impl Semifield for f64 {
    type Key = u64;
    const INSTANCE: Instance = Instance::Real;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, rhs: &Self) -> Self {
        cancel(self + rhs, self.abs().max(rhs.abs()))
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inverse(&self) -> Result<Self> {
        if Semifield::is_zero(self) {
            Err(Error::ZeroInverse)
        } else {
            Ok(1.0 / self)
        }
    }
    fn key(&self) -> u64 {
        round_relative(*self).to_bits()
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        p as f64 / q as f64
    }
    fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| parse_err(text))?;
            let q: f64 = q.trim().parse().map_err(|_| parse_err(text))?;
            return Ok(p / q);
        }
        t.parse().map_err(|_| parse_err(text))
    }
    fn to_text(&self) -> String {
        format!("{self:?}")
    }
    fn to_display(&self) -> String {
        format_rounded(*self)
    }
}

impl Field for f64 {
    fn neg(&self) -> Self {
        -self
    }
}

impl Numeric for f64 {
    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn norm_sqr(&self) -> f64 {
        self * self
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

/// Both parts rounded at the precision of the larger one, so `e^{iπ/2}`
/// keys like `i`.
fn round_c(z: Complex64) -> Complex64 {
    let m = z.re.abs().max(z.im.abs());
    if m == 0.0 || !m.is_finite() {
        return Complex64::new(z.re + 0.0, z.im + 0.0);
    }
    let e = exponent(m);
    Complex64::new(round_at(z.re, e), round_at(z.im, e))
}

fn inf_norm(z: &Complex64) -> f64 {
    z.re.abs().max(z.im.abs())
}

/// Parses `a+bi`, `a-bi`, `bi`, `i` or a plain real.
fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i') else {
        let re: f64 = t.parse().map_err(|_| parse_err(text))?;
        return Ok(Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let mut split = 0;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = i;
            break;
        }
    }
    let (re_text, im_text) = body.split_at(split);
    let re = if re_text.is_empty() {
        0.0
    } else {
        re_text.parse().map_err(|_| parse_err(text))?
    };
    let im = match im_text {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse().map_err(|_| parse_err(text))?,
    };
    Ok(Complex64::new(re, im))
}

fn format_complex(z: Complex64, part: impl Fn(f64) -> String) -> String {
    if z.im == 0.0 {
        return part(z.re);
    }
    let im = part(z.im);
    if im.starts_with('-') {
        format!("{}{}i", part(z.re), im)
    } else {
        format!("{}+{}i", part(z.re), im)
    }
}

impl Semifield for Complex64 {
    type Key = (u64, u64);
    const INSTANCE: Instance = Instance::Complex;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        let z = self + rhs;
        let scale = inf_norm(self).max(inf_norm(rhs));
        Complex64::new(cancel(z.re, scale), cancel(z.im, scale))
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn inverse(&self) -> Result<Self> {
        if Semifield::is_zero(self) {
            Err(Error::ZeroInverse)
        } else {
            Ok(self.inv())
        }
    }
    fn key(&self) -> (u64, u64) {
        let z = round_c(*self);
        (z.re.to_bits(), z.im.to_bits())
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Complex64::new(p as f64 / q as f64, 0.0)
    }
    fn parse(text: &str) -> Result<Self> {
        parse_complex(text)
    }
    fn to_text(&self) -> String {
        format_complex(*self, |x| format!("{x:?}"))
    }
    fn to_display(&self) -> String {
        format_complex(round_c(*self), format_rounded)
    }
}

impl Field for Complex64 {
    fn neg(&self) -> Self {
        -self
    }
}

impl Numeric for Complex64 {
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

/// Max-plus semifield: `a ⊕ b = max(a, b)`, `a ⊗ b = a + b`, `0̄ = -∞`,
/// `1̄ = 0`. `Tropical(None)` is `-∞`.
///
/// `2^x ↦ x` maps products of powers of two isomorphically onto this
/// instance, which lets diagrams whose weights are too large to store as
/// rationals (`2^(2^1023)`) be built through their exponents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tropical(pub Option<Rational>);

impl Tropical {
    pub fn finite(x: Rational) -> Self {
        Tropical(Some(x))
    }
}

impl Display for Tropical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            None => f.write_str("-inf"),
            Some(x) => write!(f, "{x}"),
        }
    }
}

impl Semifield for Tropical {
    type Key = Tropical;
    const INSTANCE: Instance = Instance::Tropical;

    fn zero() -> Self {
        Tropical(None)
    }
    fn one() -> Self {
        Tropical(Some(Zero::zero()))
    }
    fn add(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (None, _) => rhs.clone(),
            (_, None) => self.clone(),
            (Some(a), Some(b)) => Tropical(Some(a.max(b).clone())),
        }
    }
    fn mul(&self, rhs: &Self) -> Self {
        match (&self.0, &rhs.0) {
            (Some(a), Some(b)) => Tropical(Some(a + b)),
            _ => Tropical(None),
        }
    }
    fn inverse(&self) -> Result<Self> {
        match &self.0 {
            None => Err(Error::ZeroInverse),
            Some(a) => Ok(Tropical(Some(-a))),
        }
    }
    fn key(&self) -> Self::Key {
        self.clone()
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        Tropical(Some(Rational::from_ratio(p, q)))
    }
    fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "-inf" => Ok(Tropical(None)),
            t => Ok(Tropical(Some(Rational::parse(t)?))),
        }
    }
}

/// A weight tagged with its instance, for code that picks the instance at
/// run time. Mixing instances is an error rather than a coercion.
#[derive(Debug, Clone)]
pub enum Weight {
    Rational(Rational),
    Real(f64),
    Complex(Complex64),
    Tropical(Tropical),
}

impl Weight {
    pub fn instance(&self) -> Instance {
        match self {
            Weight::Rational(_) => Instance::Rational,
            Weight::Real(_) => Instance::Real,
            Weight::Complex(_) => Instance::Complex,
            Weight::Tropical(_) => Instance::Tropical,
        }
    }

    pub fn parse(instance: Instance, text: &str) -> Result<Weight> {
        Ok(match instance {
            Instance::Rational => Weight::Rational(Rational::parse(text)?),
            Instance::Real => Weight::Real(f64::parse(text)?),
            Instance::Complex => Weight::Complex(Complex64::parse(text)?),
            Instance::Tropical => Weight::Tropical(Tropical::parse(text)?),
        })
    }

    pub fn add(&self, rhs: &Weight) -> Result<Weight> {
        self.binary(rhs, Semifield::add, Semifield::add, Semifield::add, Semifield::add)
    }

    pub fn mul(&self, rhs: &Weight) -> Result<Weight> {
        self.binary(rhs, Semifield::mul, Semifield::mul, Semifield::mul, Semifield::mul)
    }

    pub fn inverse(&self) -> Result<Weight> {
        Ok(match self {
            Weight::Rational(a) => Weight::Rational(a.inverse()?),
            Weight::Real(a) => Weight::Real(a.inverse()?),
            Weight::Complex(a) => Weight::Complex(a.inverse()?),
            Weight::Tropical(a) => Weight::Tropical(a.inverse()?),
        })
    }

    /// Equality under the instance's canonical key.
    pub fn same(&self, rhs: &Weight) -> bool {
        match (self, rhs) {
            (Weight::Rational(a), Weight::Rational(b)) => a == b,
            (Weight::Real(a), Weight::Real(b)) => a.same(b),
            (Weight::Complex(a), Weight::Complex(b)) => a.same(b),
            (Weight::Tropical(a), Weight::Tropical(b)) => a == b,
            _ => false,
        }
    }

    fn binary(
        &self,
        rhs: &Weight,
        q: fn(&Rational, &Rational) -> Rational,
        r: fn(&f64, &f64) -> f64,
        c: fn(&Complex64, &Complex64) -> Complex64,
        t: fn(&Tropical, &Tropical) -> Tropical,
    ) -> Result<Weight> {
        match (self, rhs) {
            (Weight::Rational(a), Weight::Rational(b)) => Ok(Weight::Rational(q(a, b))),
            (Weight::Real(a), Weight::Real(b)) => Ok(Weight::Real(r(a, b))),
            (Weight::Complex(a), Weight::Complex(b)) => Ok(Weight::Complex(c(a, b))),
            (Weight::Tropical(a), Weight::Tropical(b)) => Ok(Weight::Tropical(t(a, b))),
            _ => Err(Error::InstanceMismatch(self.instance(), rhs.instance())),
        }
    }
}

impl Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Rational(a) => write!(f, "{a}"),
            Weight::Real(a) => f.write_str(&a.to_display()),
            Weight::Complex(a) => f.write_str(&a.to_display()),
            Weight::Tropical(a) => write!(f, "{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_normalize() {
        assert_eq!(0.0f64.key(), (-0.0f64).key());
        assert_eq!(Rational::from_ratio(1, 3).key(), Rational::from_ratio(2, 6).key());
        assert_eq!((0.1f64 + 0.2).key(), 0.3f64.key());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Rational::parse("-3/6").unwrap(), Rational::from_ratio(-1, 2));
        assert_eq!(Rational::parse("0.25").unwrap(), Rational::from_ratio(1, 4));
        assert_eq!(Complex64::parse("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(Complex64::parse("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(Complex64::parse("1e-3+2e+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert!(Rational::parse("1/0").is_err());
        assert!(f64::parse("abc").is_err());
    }

    #[test]
    fn text_round_trip() {
        let z = Complex64::new(0.1, -1.0 / 3.0);
        assert_eq!(Complex64::parse(&z.to_text()).unwrap(), z);
        let x = 1.0f64 / 7.0;
        assert_eq!(f64::parse(&x.to_text()).unwrap(), x);
        assert_eq!((-core::f64::consts::FRAC_1_SQRT_2).to_display(), "-0.7071067812");
    }

    #[test]
    fn tropical_laws() {
        let a = Tropical::from_i64(3);
        let b = Tropical::from_i64(-2);
        assert_eq!(a.add(&b), a);
        assert_eq!(a.mul(&b), Tropical::from_i64(1));
        assert_eq!(a.mul(&Tropical::zero()), Tropical::zero());
        assert_eq!(a.add(&Tropical::zero()), a);
        assert!(a.mul(&a.inverse().unwrap()).is_one());
        assert_eq!(Tropical::parse("-inf").unwrap(), Tropical::zero());
    }

    #[test]
    fn dynamic_mismatch() {
        let a = Weight::Rational(Rational::from_i64(1));
        let b = Weight::Real(1.0);
        assert!(matches!(a.add(&b), Err(Error::InstanceMismatch(..))));
        assert!(a.add(&a).unwrap().same(&Weight::Rational(Rational::from_i64(2))));
    }
}
