//! Dual-mode complex scalars: exact rational components or `f64` components.
//!
//! Exact-mode arithmetic is closed (it never silently demotes to floating
//! point); any operation mixing the two modes promotes to float, and the
//! promotion is visible in the mode flag of the result.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Determinant tolerance for float-mode normalization checks.
pub const TOL_DET: f64 = 1e-12;
/// Classification tolerance for float-mode trace tests.
pub const TOL_CLASS: f64 = 1e-9;

/// Arithmetic mode of a scalar, map, or pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone)]
pub struct ExactComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl ExactComplex {
    fn new(re: BigRational, im: BigRational) -> Self {
        ExactComplex { re, im }
    }
}

/// A complex scalar carrying its arithmetic mode.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(ExactComplex),
    Float(Complex64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::exact_int(0, 0),
            Mode::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::exact_int(1, 0),
            Mode::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    pub fn exact_int(re: i64, im: i64) -> Self {
        Scalar::Exact(ExactComplex::new(
            BigRational::from_integer(BigInt::from(re)),
            BigRational::from_integer(BigInt::from(im)),
        ))
    }

    pub fn exact_ratio(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Scalar::Exact(ExactComplex::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        ))
    }

    pub fn exact_big(re: BigRational, im: BigRational) -> Self {
        Scalar::Exact(ExactComplex::new(re, im))
    }

    pub fn exact_real(re: BigRational) -> Self {
        Scalar::Exact(ExactComplex::new(re, BigRational::zero()))
    }

    pub fn from_f64(re: f64, im: f64) -> Self {
        Scalar::Float(Complex64::new(re, im))
    }

    pub fn from_c64(z: Complex64) -> Self {
        Scalar::Float(z)
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(e) => Complex64::new(
                e.re.to_f64().unwrap_or(f64::NAN),
                e.im.to_f64().unwrap_or(f64::NAN),
            ),
            Scalar::Float(z) => *z,
        }
    }

    /// Demote to float mode.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(e) => Scalar::Exact(ExactComplex::new(e.re.clone(), -e.im.clone())),
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    /// |z|^2 as a real scalar of the same mode.
    pub fn norm_sqr(&self) -> Scalar {
        match self {
            Scalar::Exact(e) => {
                Scalar::exact_real(&e.re * &e.re + &e.im * &e.im)
            }
            Scalar::Float(z) => Scalar::from_f64(z.norm_sqr(), 0.0),
        }
    }

    /// Real part as a real scalar of the same mode.
    pub fn real_part(&self) -> Scalar {
        match self {
            Scalar::Exact(e) => Scalar::exact_real(e.re.clone()),
            Scalar::Float(z) => Scalar::from_f64(z.re, 0.0),
        }
    }

    /// Imaginary part as a real scalar of the same mode.
    pub fn imag_part(&self) -> Scalar {
        match self {
            Scalar::Exact(e) => Scalar::exact_real(e.im.clone()),
            Scalar::Float(z) => Scalar::from_f64(z.im, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(e) => e.re.is_zero() && e.im.is_zero(),
            Scalar::Float(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    /// Zero test with float tolerance; exact mode stays exact.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(_) => self.is_zero(),
            Scalar::Float(z) => z.norm_sqr() <= tol * tol,
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(e) => e.im.is_zero(),
            Scalar::Float(z) => z.im == 0.0,
        }
    }

    /// Sign of the real part of a (real) scalar: -1, 0, or 1.
    pub fn re_sign(&self) -> i32 {
        match self {
            Scalar::Exact(e) => {
                if e.re.is_zero() {
                    0
                } else if e.re.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Scalar::Float(z) => {
                if z.re > 0.0 {
                    1
                } else if z.re < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn im_sign(&self) -> i32 {
        self.imag_part().re_sign()
    }

    /// Equality within `tol`. A zero tolerance on a pair of exact scalars
    /// compares exactly; any positive tolerance compares numerically, which
    /// is what rationalized float data needs.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) if tol == 0.0 => a.re == b.re && a.im == b.im,
            _ => (self.to_c64() - other.to_c64()).norm() <= tol,
        }
    }

    /// Square root of a nonnegative real rational, when it exists exactly.
    pub fn exact_sqrt(&self) -> Option<Scalar> {
        match self {
            Scalar::Exact(e) if e.im.is_zero() && !e.re.is_negative() => {
                let num = e.re.numer();
                let den = e.re.denom();
                let sn = num.sqrt();
                let sd = den.sqrt();
                if &sn * &sn == *num && &sd * &sd == *den {
                    Some(Scalar::exact_real(BigRational::new(sn, sd)))
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Rational value of a real exact scalar, if that is what this is.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Exact(e) if e.im.is_zero() => Some(e.re.clone()),
            _ => None,
        }
    }

    /// Integer value, when the scalar is exactly a (real) integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Scalar::Exact(e) if e.im.is_zero() && e.re.is_integer() => {
                Some(e.re.to_integer())
            }
            Scalar::Float(z) if z.im == 0.0 && z.re.fract() == 0.0 && z.re.abs() < 9e15 => {
                Some(BigInt::from(z.re as i64))
            }
            _ => None,
        }
    }

    pub fn div_checked(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        Ok(self / rhs)
    }

    fn promote_pair(a: &Scalar, b: &Scalar) -> (Complex64, Complex64) {
        (a.to_c64(), b.to_c64())
    }
}

fn exact_add(a: &ExactComplex, b: &ExactComplex) -> Scalar {
    Scalar::Exact(ExactComplex::new(&a.re + &b.re, &a.im + &b.im))
}

fn exact_sub(a: &ExactComplex, b: &ExactComplex) -> Scalar {
    Scalar::Exact(ExactComplex::new(&a.re - &b.re, &a.im - &b.im))
}

fn exact_mul(a: &ExactComplex, b: &ExactComplex) -> Scalar {
    Scalar::Exact(ExactComplex::new(
        &a.re * &b.re - &a.im * &b.im,
        &a.re * &b.im + &a.im * &b.re,
    ))
}

fn exact_div(a: &ExactComplex, b: &ExactComplex) -> Scalar {
    let n = &b.re * &b.re + &b.im * &b.im;
    if n.is_zero() {
        // Mirror float semantics (NaN) rather than panic; callers that care
        // use div_checked.
        return Scalar::from_f64(f64::NAN, f64::NAN);
    }
    Scalar::Exact(ExactComplex::new(
        (&a.re * &b.re + &a.im * &b.im) / &n,
        (&a.im * &b.re - &a.re * &b.im) / &n,
    ))
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact_add(a, b),
            _ => {
                let (a, b) = Scalar::promote_pair(self, rhs);
                Scalar::Float(a + b)
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact_sub(a, b),
            _ => {
                let (a, b) = Scalar::promote_pair(self, rhs);
                Scalar::Float(a - b)
            }
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact_mul(a, b),
            _ => {
                let (a, b) = Scalar::promote_pair(self, rhs);
                Scalar::Float(a * b)
            }
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => exact_div(a, b),
            _ => {
                let (a, b) = Scalar::promote_pair(self, rhs);
                Scalar::Float(a / b)
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(ExactComplex::new(-a.re.clone(), -a.im.clone())),
            Scalar::Float(z) => Scalar::Float(-z),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}
impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}
impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}
impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        &self / &rhs
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.re == b.re && a.im == b.im,
            (Scalar::Float(a), Scalar::Float(b)) => a == b,
            _ => false,
        }
    }
}

/// Hash key for exact scalars (float scalars are not hashed).
#[derive(PartialEq, Eq, Hash, Clone)]
pub struct ExactKey {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn exact_key(&self) -> Option<ExactKey> {
        match self {
            Scalar::Exact(e) => Some(ExactKey {
                re: e.re.clone(),
                im: e.im.clone(),
            }),
            Scalar::Float(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(e) => {
                if e.im.is_zero() {
                    write!(f, "{}", e.re)
                } else {
                    write!(f, "{}{}{}i", e.re, if e.im.is_negative() { "" } else { "+" }, e.im)
                }
            }
            Scalar::Float(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else {
                    write!(f, "{}{}{}i", z.re, if z.im < 0.0 { "" } else { "+" }, z.im)
                }
            }
        }
    }
}

/// Parse a real scalar: integer, `p/q` rational (exact) or decimal (float).
pub fn parse_real(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational numerator: {s}")))?;
        let d: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rational denominator: {s}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator: {s}")));
        }
        return Ok(Scalar::exact_real(BigRational::new(n, d)));
    }
    if let Ok(i) = s.parse::<BigInt>() {
        return Ok(Scalar::exact_real(BigRational::from_integer(i)));
    }
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("bad scalar: {s}")))?;
    Ok(Scalar::from_f64(v, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ops_stay_exact() {
        let a = Scalar::exact_ratio(1, 3, 0, 1);
        let b = Scalar::exact_ratio(1, 6, 1, 2);
        let sum = &a + &b;
        assert_eq!(sum.mode(), Mode::Exact);
        assert_eq!(sum, Scalar::exact_ratio(1, 2, 1, 2));
        let prod = &a * &b;
        assert_eq!(prod.mode(), Mode::Exact);
        assert_eq!(prod, Scalar::exact_ratio(1, 18, 1, 6));
    }

    #[test]
    fn mixed_ops_promote() {
        let a = Scalar::exact_int(1, 0);
        let b = Scalar::from_f64(0.5, 0.0);
        let sum = &a + &b;
        assert_eq!(sum.mode(), Mode::Float);
        assert!(sum.approx_eq(&Scalar::from_f64(1.5, 0.0), 1e-15));
    }

    #[test]
    fn exact_division_is_exact() {
        let a = Scalar::exact_int(1, 1);
        let b = Scalar::exact_int(2, -1);
        let q = &a / &b;
        // (1+i)/(2-i) = (1+3i)/5
        assert_eq!(q, Scalar::exact_ratio(1, 5, 3, 5));
    }

    #[test]
    fn exact_sqrt_of_square() {
        let s = Scalar::exact_ratio(9, 4, 0, 1);
        assert_eq!(s.exact_sqrt().unwrap(), Scalar::exact_ratio(3, 2, 0, 1));
        let ns = Scalar::exact_int(5, 0);
        assert!(ns.exact_sqrt().is_none());
    }

    #[test]
    fn parse_real_forms() {
        assert_eq!(parse_real("3").unwrap(), Scalar::exact_int(3, 0));
        assert_eq!(parse_real("-7/2").unwrap(), Scalar::exact_ratio(-7, 2, 0, 1));
        assert_eq!(parse_real("0.25").unwrap(), Scalar::from_f64(0.25, 0.0));
        assert!(parse_real("x").is_err());
    }
}
