//! Scalar coefficients: exact Gaussian rationals or complex doubles.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which arithmetic an algebra instance runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

impl Backend {
    /// The backend that results from combining two operands.
    pub fn join(self, other: Backend) -> Backend {
        if self == Backend::Numeric || other == Backend::Numeric {
            Backend::Numeric
        } else {
            Backend::Exact
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => f.write_str("exact"),
            Backend::Numeric => f.write_str("numeric"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "numeric" => Ok(Backend::Numeric),
            other => Err(Error::Parse(format!("unknown backend `{other}`"))),
        }
    }
}

/// An element of ℚ(i), stored as a pair of arbitrary-precision rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational { re, im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Self::real(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::real(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussRational { re: self.re.clone(), im: -&self.im }
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Self::real(self.re.recip()));
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(GaussRational { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    fn add_ref(&self, o: &Self) -> Self {
        GaussRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub_ref(&self, o: &Self) -> Self {
        GaussRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        // Real operands are the common case; skip the cross terms.
        match (self.im.is_zero(), o.im.is_zero()) {
            (true, true) => Self::real(&self.re * &o.re),
            (true, false) => GaussRational { re: &self.re * &o.re, im: &self.re * &o.im },
            (false, true) => GaussRational { re: &self.re * &o.re, im: &self.im * &o.re },
            (false, false) => GaussRational {
                re: &self.re * &o.re - &self.im * &o.im,
                im: &self.re * &o.im + &self.im * &o.re,
            },
        }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"3"`, `"-3/4"`, `"0.125"` or `"1e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: BigInt = format!("{int_part}{frac_part}0").parse().map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32 - 1;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(all);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// A scalar of ℂ, either exact (ℚ(i)) or floating.
#[derive(Clone, Debug, PartialEq)]
pub enum Coefficient {
    Exact(GaussRational),
    Numeric(Complex64),
}

impl Coefficient {
    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Coefficient::Exact(GaussRational::zero()),
            Backend::Numeric => Coefficient::Numeric(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(backend: Backend) -> Self {
        Self::from_int(1, backend)
    }

    pub fn from_int(n: i64, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Coefficient::Exact(GaussRational::from_int(n)),
            Backend::Numeric => Coefficient::Numeric(Complex64::new(n as f64, 0.0)),
        }
    }

    /// `num / den` as an exact coefficient.
    pub fn ratio(num: i64, den: i64) -> Self {
        Coefficient::Exact(GaussRational::real(BigRational::new(num.into(), den.into())))
    }

    pub fn from_rational(r: BigRational, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Coefficient::Exact(GaussRational::real(r)),
            Backend::Numeric => Coefficient::Numeric(Complex64::new(rat_to_f64(&r), 0.0)),
        }
    }

    pub fn real(x: f64) -> Self {
        Coefficient::Numeric(Complex64::new(x, 0.0))
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Coefficient::Numeric(Complex64::new(re, im))
    }

    /// The exact value of a finite double; every double is a dyadic rational.
    pub fn exact_from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(|r| Coefficient::Exact(GaussRational::real(r)))
    }

    pub fn backend(&self) -> Backend {
        match self {
            Coefficient::Exact(_) => Backend::Exact,
            Coefficient::Numeric(_) => Backend::Numeric,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(q) => q.is_zero(),
            Coefficient::Numeric(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coefficient::Exact(q) => q.im.is_zero() && q.re.is_one(),
            Coefficient::Numeric(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    /// Zero test that tolerates rounding on the numeric backend.
    pub fn is_negligible(&self, tol: f64) -> bool {
        match self {
            Coefficient::Exact(q) => q.is_zero(),
            Coefficient::Numeric(c) => c.norm() <= tol,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Coefficient::Exact(q) => q.is_real(),
            Coefficient::Numeric(c) => c.im == 0.0,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Coefficient::Exact(q) => q.to_complex(),
            Coefficient::Numeric(c) => *c,
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Self {
        match (self, backend) {
            (Coefficient::Exact(q), Backend::Numeric) => Coefficient::Numeric(q.to_complex()),
            (Coefficient::Numeric(c), Backend::Exact) => {
                let re = BigRational::from_float(c.re).unwrap_or_else(BigRational::zero);
                let im = BigRational::from_float(c.im).unwrap_or_else(BigRational::zero);
                Coefficient::Exact(GaussRational::new(re, im))
            }
            _ => self.clone(),
        }
    }

    pub fn to_numeric(&self) -> Self {
        self.to_backend(Backend::Numeric)
    }

    /// Modulus as a double.
    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    /// Real part as a double.
    pub fn re_f64(&self) -> f64 {
        self.to_complex().re
    }

    /// The rational value if this is an exact real number.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coefficient::Exact(q) if q.is_real() => Some(&q.re),
            _ => None,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        match self {
            Coefficient::Exact(q) => q.inv().map(Coefficient::Exact),
            Coefficient::Numeric(c) => {
                if c.re == 0.0 && c.im == 0.0 {
                    None
                } else {
                    Some(Coefficient::Numeric(c.inv()))
                }
            }
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Coefficient::one(self.backend());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Parses one component string on the given backend.
    pub fn parse_part(s: &str, backend: Backend) -> Result<BigRationalOrFloat> {
        match backend {
            Backend::Exact => parse_rational(s).map(BigRationalOrFloat::Rational),
            Backend::Numeric => s
                .trim()
                .parse::<f64>()
                .map(BigRationalOrFloat::Float)
                .or_else(|_| parse_rational(s).map(|r| BigRationalOrFloat::Float(rat_to_f64(&r))))
                .map_err(|_| Error::Parse(format!("not a number: `{s}`"))),
        }
    }

    /// Builds a coefficient from `re` and `im` strings.
    pub fn parse_pair(re: &str, im: &str, backend: Backend) -> Result<Self> {
        match (Self::parse_part(re, backend)?, Self::parse_part(im, backend)?) {
            (BigRationalOrFloat::Rational(a), BigRationalOrFloat::Rational(b)) => {
                Ok(Coefficient::Exact(GaussRational::new(a, b)))
            }
            (BigRationalOrFloat::Float(a), BigRationalOrFloat::Float(b)) => {
                Ok(Coefficient::Numeric(Complex64::new(a, b)))
            }
            _ => unreachable!("both parts parsed on one backend"),
        }
    }

    /// Real and imaginary parts rendered for serialization.
    pub fn to_strings(&self) -> (String, String) {
        match self {
            Coefficient::Exact(q) => (fmt_rat(&q.re), fmt_rat(&q.im)),
            Coefficient::Numeric(c) => (format_f64(c.re), format_f64(c.im)),
        }
    }
}

pub(crate) fn format_f64(x: f64) -> String {
    // `{:?}` is the shortest representation that round-trips.
    format!("{x:?}")
}

/// Result of parsing one scalar component.
#[derive(Clone, Debug)]
pub enum BigRationalOrFloat {
    Rational(BigRational),
    Float(f64),
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Exact(q) => {
                if q.im.is_zero() {
                    write!(f, "{}", fmt_rat(&q.re))
                } else if q.re.is_zero() {
                    write!(f, "{}i", fmt_rat(&q.im))
                } else {
                    let sign = if q.im.is_negative() { "-" } else { "+" };
                    write!(f, "({}{}{}i)", fmt_rat(&q.re), sign, fmt_rat(&q.im.abs()))
                }
            }
            Coefficient::Numeric(c) => {
                if c.im == 0.0 {
                    write!(f, "{}", format_f64(c.re))
                } else {
                    write!(f, "({}{:+}i)", format_f64(c.re), c.im)
                }
            }
        }
    }
}

fn binop(
    a: &Coefficient,
    b: &Coefficient,
    exact: impl Fn(&GaussRational, &GaussRational) -> GaussRational,
    numeric: impl Fn(Complex64, Complex64) -> Complex64,
) -> Coefficient {
    match (a, b) {
        (Coefficient::Exact(x), Coefficient::Exact(y)) => Coefficient::Exact(exact(x, y)),
        _ => Coefficient::Numeric(numeric(a.to_complex(), b.to_complex())),
    }
}

impl<'a> Add<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        binop(self, o, GaussRational::add_ref, |x, y| x + y)
    }
}

impl<'a> Sub<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        binop(self, o, GaussRational::sub_ref, |x, y| x - y)
    }
}

impl<'a> Mul<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        binop(self, o, GaussRational::mul_ref, |x, y| x * y)
    }
}

/// Panics on division by an exact zero.
impl<'a> Div<&'a Coefficient> for &'a Coefficient {
    type Output = Coefficient;
    fn div(self, o: &Coefficient) -> Coefficient {
        match (self, o) {
            (Coefficient::Exact(x), Coefficient::Exact(y)) => {
                Coefficient::Exact(x.mul_ref(&y.inv().expect("division by exact zero")))
            }
            _ => Coefficient::Numeric(self.to_complex() / o.to_complex()),
        }
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        match self {
            Coefficient::Exact(q) => Coefficient::Exact(GaussRational { re: -&q.re, im: -&q.im }),
            Coefficient::Numeric(c) => Coefficient::Numeric(-*c),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Coefficient {
            type Output = Coefficient;
            fn $m(self, o: Coefficient) -> Coefficient {
                (&self).$m(&o)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("-3/4").unwrap(), r(-3, 4));
        assert_eq!(parse_rational("0.125").unwrap(), r(1, 8));
        assert_eq!(parse_rational("-2.5e-1").unwrap(), r(-1, 4));
        assert_eq!(parse_rational("12e2").unwrap(), r(1200, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn gaussian_division() {
        // (1 + 2i) / (3 - i) = (1 + 7i) / 10
        let a = Coefficient::parse_pair("1", "2", Backend::Exact).unwrap();
        let b = Coefficient::parse_pair("3", "-1", Backend::Exact).unwrap();
        let q = &a / &b;
        assert_eq!(q, Coefficient::parse_pair("1/10", "7/10", Backend::Exact).unwrap());
        assert_eq!(&q * &b, a);
    }

    #[test]
    fn mixed_operands_promote_to_numeric() {
        let a = Coefficient::ratio(1, 2);
        let b = Coefficient::real(0.25);
        assert_eq!(&a + &b, Coefficient::real(0.75));
    }

    #[test]
    fn string_round_trip() {
        for c in [
            Coefficient::ratio(-7, 3),
            Coefficient::parse_pair("1/2", "-5", Backend::Exact).unwrap(),
            Coefficient::complex(0.1, -2.5e-300),
        ] {
            let (re, im) = c.to_strings();
            assert_eq!(Coefficient::parse_pair(&re, &im, c.backend()).unwrap(), c);
        }
    }
}
