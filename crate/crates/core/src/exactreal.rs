//! Exact reals in a finite rational span of declared generators.
//!
//! A [`Basis`] lists named positive generators (always starting with `unit`,
//! the number 1) together with decimal approximations. The generators are
//! *declared* to be rationally independent; nothing here tries to prove it.
//! A [`RealQ`] is a vector of rational coefficients over a basis. Equality is
//! exact coefficient equality, and ordering is decided by evaluating the
//! difference with outward-rounded interval arithmetic at increasing
//! precision, failing with [`ExactError::AmbiguousOrder`] instead of guessing.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used for all stored coefficients.
pub type Rational = BigRational;

/// Default precision budget (in bits) for order decisions.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Minimal number of significant digits a declared approximation must carry.
pub const MIN_SIGNIFICANT_DIGITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("operands live over different bases")]
    BasisMismatch,
    #[error("order of distinct values is undecided at {bits} bits; declared approximations are too coarse")]
    AmbiguousOrder { bits: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown basis symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("cannot parse `{0}`")]
    Parse(String),
}

/// A declared generator of the basis.
#[derive(Debug, Clone)]
pub struct Symbol {
    name: String,
    approx: String,
    description: String,
    center: Rational,
    radius: Rational,
    float: f64,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn approx(&self) -> &str {
        &self.approx
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Rational enclosure `[lo, hi]` of the symbol's true value.
    pub fn enclosure(&self) -> (Rational, Rational) {
        (&self.center - &self.radius, &self.center + &self.radius)
    }
}

#[derive(Debug)]
struct BasisInner {
    symbols: Vec<Symbol>,
    precision_bits: u32,
}

/// Ordered list of declared, rationally independent positive generators.
///
/// Cloning is cheap; values built over clones of the same basis are
/// compatible.
#[derive(Debug, Clone)]
pub struct Basis(Arc<BasisInner>);

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.symbols.len() == other.0.symbols.len()
                && self
                    .0
                    .symbols
                    .iter()
                    .zip(&other.0.symbols)
                    .all(|(a, b)| a.name == b.name && a.approx == b.approx))
    }
}

impl Eq for Basis {}

impl Basis {
    /// Builds a basis from `(name, approx, description)` triples. The `unit`
    /// symbol is prepended automatically and must not be listed.
    pub fn new<I, N, A, D>(symbols: I) -> Result<Self, ExactError>
    where
        I: IntoIterator<Item = (N, A, D)>,
        N: Into<String>,
        A: Into<String>,
        D: Into<String>,
    {
        let mut out = Vec::new();
        out.push(Symbol {
            name: "unit".to_string(),
            approx: "1".to_string(),
            description: "the number one".to_string(),
            center: Rational::one(),
            radius: Rational::zero(),
            float: 1.0,
        });
        for (name, approx, description) in symbols {
            let name = name.into();
            let approx = approx.into();
            if name.is_empty() {
                return Err(ExactError::InvalidBasis("empty symbol name".into()));
            }
            if out.iter().any(|s| s.name == name) {
                return Err(ExactError::InvalidBasis(alloc::format!("duplicate symbol `{name}`")));
            }
            let (center, radius, digits) = parse_decimal(&approx)?;
            if digits < MIN_SIGNIFICANT_DIGITS {
                return Err(ExactError::InvalidBasis(alloc::format!(
                    "approximation of `{name}` has {digits} significant digits, need {MIN_SIGNIFICANT_DIGITS}"
                )));
            }
            if !center.is_positive() || &center - &radius <= Rational::zero() {
                return Err(ExactError::InvalidBasis(alloc::format!("`{name}` must be positive")));
            }
            let float = center.to_f64().unwrap_or(f64::NAN);
            out.push(Symbol { name, approx, description: description.into(), center, radius, float });
        }
        Ok(Basis(Arc::new(BasisInner { symbols: out, precision_bits: DEFAULT_PRECISION_BITS })))
    }

    /// The basis `unit, sqrt2, sqrt3, sqrt5` with 100-digit approximations.
    pub fn standard() -> Self {
        let syms = [2u32, 3, 5].map(|n| {
            (alloc::format!("sqrt{n}"), sqrt_decimal(n, 100), alloc::format!("square root of {n}"))
        });
        Self::new(syms).expect("standard basis is well formed")
    }

    /// Only the `unit` symbol: the rationals.
    pub fn rationals() -> Self {
        Self::new(core::iter::empty::<(String, String, String)>()).expect("unit basis")
    }

    /// Same symbols with a different precision budget for order decisions.
    pub fn with_precision(&self, bits: u32) -> Self {
        Basis(Arc::new(BasisInner { symbols: self.0.symbols.clone(), precision_bits: bits.max(64) }))
    }

    pub fn precision_bits(&self) -> u32 {
        self.0.precision_bits
    }

    pub fn len(&self) -> usize {
        self.0.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.symbols.iter().position(|s| s.name == name)
    }
}

/// Decimal expansion of `sqrt(n)` truncated to `digits` fractional digits.
pub fn sqrt_decimal(n: u32, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(2 * digits as u32);
    let root = (BigInt::from(n) * scale).sqrt();
    let s = root.to_string();
    let split = s.len() - digits;
    alloc::format!("{}.{}", &s[..split], &s[split..])
}

/// Parses a decimal string into (value, one unit in the last place, significant digits).
fn parse_decimal(s: &str) -> Result<(Rational, Rational, usize), ExactError> {
    let err = || ExactError::Parse(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let mut digits = String::from(int_part);
    digits.push_str(frac_part);
    let significant = digits.trim_start_matches('0').len();
    let mantissa: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut value = Rational::new(mantissa, denom.clone());
    if neg {
        value = -value;
    }
    Ok((value, Rational::new(BigInt::one(), denom), significant))
}

/// Parses `"p/q"`, `"p"` or a finite decimal into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| ExactError::Parse(s.to_string()))?;
        let q: BigInt = q.trim().parse().map_err(|_| ExactError::Parse(s.to_string()))?;
        if q.is_zero() {
            return Err(ExactError::Parse(s.to_string()));
        }
        return Ok(Rational::new(p, q));
    }
    parse_decimal(t).map(|(v, _, _)| v)
}

/// Formats a rational as `"p/q"` with `q > 0` in lowest terms.
pub fn format_rational(q: &Rational) -> String {
    alloc::format!("{}/{}", q.numer(), q.denom())
}

/// An exact real: a rational linear combination of basis symbols.
#[derive(Clone)]
pub struct RealQ {
    basis: Basis,
    coeffs: Vec<Rational>,
}

impl PartialEq for RealQ {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.basis == other.basis
    }
}

impl Eq for RealQ {}

impl core::hash::Hash for RealQ {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for RealQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealQ({self})")
    }
}

impl fmt::Display for RealQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let name = self.basis.0.symbols[i].name.as_str();
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                f.write_str(name)?;
            } else {
                write!(f, "{mag}*{name}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl RealQ {
    pub fn zero(basis: &Basis) -> Self {
        RealQ { basis: basis.clone(), coeffs: alloc::vec![Rational::zero(); basis.len()] }
    }

    /// The rational `q` (a multiple of `unit`).
    pub fn rational(basis: &Basis, q: Rational) -> Self {
        let mut r = Self::zero(basis);
        r.coeffs[0] = q;
        r
    }

    pub fn integer(basis: &Basis, n: i64) -> Self {
        Self::rational(basis, Rational::from_integer(BigInt::from(n)))
    }

    /// `p/q` as a multiple of `unit`. Panics if `q == 0`.
    pub fn ratio(basis: &Basis, p: i64, q: i64) -> Self {
        Self::rational(basis, Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn symbol(basis: &Basis, name: &str) -> Result<Self, ExactError> {
        let i = basis.index_of(name).ok_or_else(|| ExactError::UnknownSymbol(name.to_string()))?;
        let mut r = Self::zero(basis);
        r.coeffs[i] = Rational::one();
        Ok(r)
    }

    /// Builds `sum q_i * name_i`.
    pub fn from_terms<'a, I>(basis: &Basis, terms: I) -> Result<Self, ExactError>
    where
        I: IntoIterator<Item = (&'a str, Rational)>,
    {
        let mut r = Self::zero(basis);
        for (name, q) in terms {
            let i = basis.index_of(name).ok_or_else(|| ExactError::UnknownSymbol(name.to_string()))?;
            r.coeffs[i] += q;
        }
        Ok(r)
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    /// Coefficient vector, indexed like [`Basis::symbols`].
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Nonzero terms as `(symbol name, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&str, &Rational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.basis.0.symbols[i].name.as_str(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it has no irrational component.
    pub fn as_rational(&self) -> Option<&Rational> {
        self.coeffs[1..].iter().all(Zero::is_zero).then(|| &self.coeffs[0])
    }

    fn check(&self, other: &Self) -> Result<(), ExactError> {
        if self.basis == other.basis {
            Ok(())
        } else {
            Err(ExactError::BasisMismatch)
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn scale(&self, q: &Rational) -> Self {
        RealQ { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Rational::from_integer(BigInt::from(n)))
    }

    pub fn scale_big(&self, n: &BigInt) -> Self {
        self.scale(&Rational::from_integer(n.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        RealQ {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Floating-point estimate. Only for display and heuristics.
    pub fn approx_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.basis.0.symbols)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, s)| c.to_f64().unwrap_or(f64::NAN) * s.float)
            .sum()
    }

    /// Outward-rounded enclosure of the value using `bits` fractional bits
    /// per symbol.
    pub fn enclosure(&self, bits: u32) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        let scale = BigInt::one() << bits;
        for (c, s) in self.coeffs.iter().zip(&self.basis.0.symbols) {
            if c.is_zero() {
                continue;
            }
            let (slo, shi) = if s.radius.is_zero() {
                (s.center.clone(), s.center.clone())
            } else {
                let l = ((&s.center - &s.radius) * &scale).floor().to_integer();
                let h = ((&s.center + &s.radius) * &scale).ceil().to_integer();
                (Rational::new(l, scale.clone()), Rational::new(h, scale.clone()))
            };
            if c.is_positive() {
                lo += c * slo;
                hi += c * shi;
            } else {
                lo += c * shi;
                hi += c * slo;
            }
        }
        (lo, hi)
    }

    /// Sign of the value: `Less`, `Equal` or `Greater` than zero.
    pub fn signum(&self) -> Result<Ordering, ExactError> {
        if let Some(q) = self.as_rational() {
            return Ok(q.cmp(&Rational::zero()));
        }
        if let Some(o) = self.float_filter() {
            return Ok(o);
        }
        let budget = self.basis.precision_bits();
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclosure(bits);
            if lo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if hi.is_negative() {
                return Ok(Ordering::Less);
            }
            if bits >= budget {
                return Err(ExactError::AmbiguousOrder { bits });
            }
            bits = (bits * 2).min(budget);
        }
    }

    /// Sign decided in floating point when the estimate clears a
    /// conservative relative error bound.
    fn float_filter(&self) -> Option<Ordering> {
        let mut sum = 0.0f64;
        let mut mag = 0.0f64;
        let mut terms = 0u32;
        for (c, s) in self.coeffs.iter().zip(&self.basis.0.symbols) {
            if c.is_zero() {
                continue;
            }
            let t = c.to_f64()? * s.float;
            sum += t;
            mag += t.abs();
            terms += 1;
        }
        if !sum.is_finite() || !mag.is_finite() || mag == 0.0 {
            return None;
        }
        let bound = mag * 1e-12 * f64::from(terms + 1);
        if sum > bound {
            Some(Ordering::Greater)
        } else if sum < -bound {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    /// Total order on values over the same basis.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering, ExactError> {
        self.check(other)?;
        if self.coeffs == other.coeffs {
            return Ok(Ordering::Equal);
        }
        self.zip_with(other, |a, b| a - b).signum()
    }

    pub fn lt(&self, other: &Self) -> Result<bool, ExactError> {
        Ok(self.try_cmp(other)? == Ordering::Less)
    }

    pub fn le(&self, other: &Self) -> Result<bool, ExactError> {
        Ok(self.try_cmp(other)? != Ordering::Greater)
    }

    pub fn gt(&self, other: &Self) -> Result<bool, ExactError> {
        Ok(self.try_cmp(other)? == Ordering::Greater)
    }

    pub fn ge(&self, other: &Self) -> Result<bool, ExactError> {
        Ok(self.try_cmp(other)? != Ordering::Less)
    }

    pub fn is_positive(&self) -> Result<bool, ExactError> {
        Ok(self.signum()? == Ordering::Greater)
    }

    pub fn abs(&self) -> Result<Self, ExactError> {
        Ok(if self.signum()? == Ordering::Less { -self } else { self.clone() })
    }

    pub fn min(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(if self.le(other)? { self.clone() } else { other.clone() })
    }

    pub fn max(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(if self.ge(other)? { self.clone() } else { other.clone() })
    }

    /// `Some(r)` with `self = r * other` when the coefficient vectors are
    /// proportional; `None` otherwise. `other` must be nonzero.
    pub fn commensurability_ratio(&self, other: &Self) -> Option<Rational> {
        if self.basis != other.basis || other.is_zero() {
            return None;
        }
        let pivot = other.coeffs.iter().position(|c| !c.is_zero())?;
        let r = &self.coeffs[pivot] / &other.coeffs[pivot];
        self.coeffs.iter().zip(&other.coeffs).all(|(a, b)| *a == &r * b).then_some(r)
    }

    /// Largest `c > 0` with `self, other` both integer multiples of `c`;
    /// zero when the two are incommensurable.
    pub fn gcd(&self, other: &Self) -> Result<Self, ExactError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Err(ExactError::InvalidArgument("gcd of zero".into()));
        }
        match self.commensurability_ratio(other) {
            None => Ok(Self::zero(&self.basis)),
            Some(r) => {
                // self = (p/q) other, so both are integer multiples of other/q
                let unit = other.scale(&Rational::new(BigInt::one(), r.denom().clone()));
                unit.abs()
            }
        }
    }

    /// `floor(self / other)` for `other > 0`.
    pub fn floor_div(&self, other: &Self) -> Result<BigInt, ExactError> {
        self.check(other)?;
        if !other.is_positive()? {
            return Err(ExactError::InvalidArgument("floor_div by a non-positive value".into()));
        }
        if let Some(r) = self.commensurability_ratio(other) {
            return Ok(r.floor().to_integer());
        }
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        let est = self.approx_f64() / other.approx_f64();
        let mut q = if est.is_finite() {
            Rational::from_float(libm_floor(est)).map(|r| r.to_integer()).unwrap_or_default()
        } else {
            BigInt::zero()
        };
        while other.scale_big(&q).gt(self)? {
            q -= 1;
        }
        while other.scale_big(&(&q + 1)).le(self)? {
            q += 1;
        }
        Ok(q)
    }

    /// `ceil(self / other)` for `other > 0`.
    pub fn ceil_div(&self, other: &Self) -> Result<BigInt, ExactError> {
        let f = self.floor_div(other)?;
        if other.scale_big(&f) == *self {
            Ok(f)
        } else {
            Ok(f + 1)
        }
    }

    /// Decimal rendering with `digits` fractional digits (advisory only).
    pub fn approx_decimal(&self, digits: u32) -> String {
        let (lo, hi) = self.enclosure(digits.saturating_mul(4).max(64));
        let mid = (lo + hi) / Rational::from_integer(BigInt::from(2));
        decimal_string(&mid, digits)
    }
}

fn libm_floor(x: f64) -> f64 {
    let t = x as i128 as f64;
    if t > x {
        t - 1.0
    } else {
        t
    }
}

/// Rounded decimal rendering of a rational.
pub fn decimal_string(q: &Rational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (q * Rational::from_integer(scale)).round().to_integer();
    let neg = scaled.sign() == Sign::Minus;
    let mut s = scaled.abs().to_string();
    let d = digits as usize;
    while s.len() <= d {
        s.insert(0, '0');
    }
    let split = s.len() - d;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&s[..split]);
    if d > 0 {
        out.push('.');
        out.push_str(&s[split..]);
    }
    out
}

/// Integer gcd helper re-exported for callers working on scaled lattices.
pub fn int_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

impl<'a> Add<&'a RealQ> for &'a RealQ {
    type Output = RealQ;
    /// Panics when the operands use different bases; see [`RealQ::checked_add`].
    fn add(self, rhs: &'a RealQ) -> RealQ {
        self.checked_add(rhs).expect("RealQ addition across bases")
    }
}

impl Add for RealQ {
    type Output = RealQ;
    fn add(self, rhs: RealQ) -> RealQ {
        &self + &rhs
    }
}

impl<'a> Sub<&'a RealQ> for &'a RealQ {
    type Output = RealQ;
    fn sub(self, rhs: &'a RealQ) -> RealQ {
        self.checked_sub(rhs).expect("RealQ subtraction across bases")
    }
}

impl Sub for RealQ {
    type Output = RealQ;
    fn sub(self, rhs: RealQ) -> RealQ {
        &self - &rhs
    }
}

impl Neg for &RealQ {
    type Output = RealQ;
    fn neg(self) -> RealQ {
        RealQ { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Neg for RealQ {
    type Output = RealQ;
    fn neg(self) -> RealQ {
        -&self
    }
}

impl Mul<&Rational> for &RealQ {
    type Output = RealQ;
    fn mul(self, rhs: &Rational) -> RealQ {
        self.scale(rhs)
    }
}

/// Sorts values ascending with the exact order.
pub fn sort_values(values: &mut [RealQ]) -> Result<(), ExactError> {
    let mut err = None;
    values.sort_by(|a, b| match a.try_cmp(b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Structural (not numeric) ordering key, for use in ordered maps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactKey(pub Vec<Rational>);

impl ExactKey {
    pub fn of(x: &RealQ) -> Self {
        ExactKey(x.coeffs.clone())
    }
}

impl PartialOrd for ExactKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn arithmetic_examples() {
        let b = Basis::standard();
        let one = RealQ::integer(&b, 1);
        assert_eq!(&one + &one, RealQ::integer(&b, 2));
        let x = RealQ::from_terms(&b, [("unit", q(1, 2)), ("sqrt2", q(1, 1))]).unwrap();
        assert!((&x - &x).is_zero());
        let half = RealQ::ratio(&b, 1, 2);
        let expect = RealQ::from_terms(&b, [("unit", q(1, 1)), ("sqrt2", q(1, 1))]).unwrap();
        assert_eq!(&x + &half, expect);
    }

    #[test]
    fn basis_mismatch_is_an_error() {
        let a = RealQ::integer(&Basis::standard(), 1);
        let b = RealQ::integer(&Basis::rationals(), 1);
        assert_eq!(a.checked_add(&b), Err(ExactError::BasisMismatch));
        assert_eq!(a.try_cmp(&b), Err(ExactError::BasisMismatch));
    }

    #[test]
    fn compare_examples() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        assert_eq!(RealQ::ratio(&b, 3, 2).try_cmp(&s2), Ok(Ordering::Greater));
        assert_eq!(s2.try_cmp(&s2), Ok(Ordering::Equal));
        assert_eq!(s2.try_cmp(&RealQ::integer(&b, 1)), Ok(Ordering::Greater));
        // 140/99 < sqrt2 < 99/70, both within 1e-4
        assert_eq!(RealQ::ratio(&b, 99, 70).try_cmp(&s2), Ok(Ordering::Greater));
        assert_eq!(RealQ::ratio(&b, 140, 99).try_cmp(&s2), Ok(Ordering::Less));
    }

    #[test]
    fn close_values_need_interval_refinement() {
        let b = Basis::standard();
        // 665857/470832 exceeds sqrt2 by about 1.6e-12, below the float filter
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let c = RealQ::ratio(&b, 665857, 470832);
        assert_eq!(c.try_cmp(&s2), Ok(Ordering::Greater));
    }

    #[test]
    fn coarse_approximation_is_ambiguous() {
        let approx = "1.414213562373095048801688724209698078569671875376948073176679737";
        let b = Basis::new([("r", approx, "coarse sqrt2")]).unwrap();
        let r = RealQ::symbol(&b, "r").unwrap();
        let exact: Rational = parse_rational(approx).unwrap();
        let c = RealQ::rational(&b, exact);
        assert!(matches!(c.try_cmp(&r), Err(ExactError::AmbiguousOrder { .. })));
    }

    #[test]
    fn basis_validation() {
        assert!(Basis::new([("x", "1.5", "")]).is_err());
        let a = sqrt_decimal(2, 80);
        assert!(Basis::new([("x", a.as_str(), ""), ("x", a.as_str(), "")]).is_err());
        assert!(Basis::new([("unit", a.as_str(), "")]).is_err());
    }

    #[test]
    fn gcd_examples() {
        let b = Basis::standard();
        let g = RealQ::ratio(&b, 1, 2).gcd(&RealQ::ratio(&b, 3, 4)).unwrap();
        assert_eq!(g, RealQ::ratio(&b, 1, 4));
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        assert!(RealQ::integer(&b, 1).gcd(&s2).unwrap().is_zero());
        let l = RealQ::symbol(&b, "sqrt3").unwrap();
        assert_eq!(l.scale_int(3).gcd(&l.scale_int(5)).unwrap(), l);
        assert!(RealQ::zero(&b).gcd(&l).is_err());
    }

    #[test]
    fn ratio_examples() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let one = RealQ::integer(&b, 1);
        assert_eq!(RealQ::ratio(&b, 3, 2).commensurability_ratio(&one), Some(q(3, 2)));
        assert_eq!(s2.scale_int(2).commensurability_ratio(&s2), Some(q(2, 1)));
        assert_eq!((&one + &s2).commensurability_ratio(&one), None);
    }

    #[test]
    fn floor_div_irrational() {
        let b = Basis::standard();
        let s2 = RealQ::symbol(&b, "sqrt2").unwrap();
        let ten = RealQ::integer(&b, 10);
        assert_eq!(ten.floor_div(&s2).unwrap(), BigInt::from(7));
        assert_eq!(ten.ceil_div(&s2).unwrap(), BigInt::from(8));
        assert_eq!((-&ten).floor_div(&s2).unwrap(), BigInt::from(-8));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&q(-1, 3), 3), "-0.333");
        assert_eq!(decimal_string(&q(5, 2), 0), "3");
        let b = Basis::standard();
        assert_eq!(RealQ::symbol(&b, "sqrt2").unwrap().approx_decimal(6), "1.414214");
    }
}
