//! Scalar arithmetic in two modes: exact rationals and tolerance-bearing floats.
//!
//! A pipeline runs entirely in one mode; mixing modes in arithmetic is a
//! programming error and panics.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use crate::error::Error;

/// Default relative comparison tolerance for float mode.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Absolute floor under which float differences always count as zero.
pub const ABS_FLOOR: f64 = 1e-12;

/// Arithmetic mode of a pipeline run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64 },
}

impl Mode {
    pub fn float_default() -> Self {
        Mode::Float { tol: DEFAULT_TOL }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Mode::Exact => 0.0,
            Mode::Float { tol } => *tol,
        }
    }

    pub fn zero(&self) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float { tol } => Scalar::Float { value: 0.0, tol: *tol },
        }
    }

    pub fn one(&self) -> Scalar {
        match self {
            Mode::Exact => Scalar::Exact(BigRational::one()),
            Mode::Float { tol } => Scalar::Float { value: 1.0, tol: *tol },
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Mode::Exact => Scalar::from_int(v),
            Mode::Float { tol } => Scalar::Float { value: v as f64, tol: *tol },
        }
    }
}

/// A number in one of the two arithmetic modes.
///
/// Exact scalars are arbitrary-precision rationals, always reduced with a
/// positive denominator (BigRational maintains that invariant). Float scalars
/// carry the relative tolerance used for comparisons.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Float { value: f64, tol: f64 },
}

impl Scalar {
    pub fn from_int(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_f64(v: f64, tol: f64) -> Self {
        Scalar::Float { value: v, tol }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float { tol, .. } => Mode::Float { tol: *tol },
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Float { value, .. } => *value,
        }
    }

    pub fn rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float { .. } => None,
        }
    }

    /// Convert to float mode with the given tolerance (exact scalars are
    /// rounded to the nearest f64).
    pub fn to_float_mode(&self, tol: f64) -> Scalar {
        Scalar::Float { value: self.to_f64(), tol }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float { value, tol } => Scalar::Float { value: value.abs(), tol: *tol },
        }
    }

    pub fn recip(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                assert!(!r.is_zero(), "reciprocal of zero");
                Scalar::Exact(r.recip())
            }
            Scalar::Float { value, tol } => Scalar::Float { value: 1.0 / value, tol: *tol },
        }
    }

    /// Exact zero test in rational mode; tolerance test (relative with an
    /// absolute floor) in float mode.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float { value, tol } => value.abs() <= tol.max(ABS_FLOOR),
        }
    }

    /// Equality up to the mode's tolerance.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float { value: a, tol: ta }, Scalar::Float { value: b, tol: tb }) => {
                let tol = ta.max(*tb);
                (a - b).abs() <= (tol * a.abs().max(b.abs())).max(ABS_FLOOR)
            }
            _ => panic!("mixed exact/float comparison"),
        }
    }

    /// Sign classification against zero with an explicit absolute threshold
    /// (used for determinant-scale-aware tests). Exact mode ignores the
    /// threshold.
    pub fn sign_with_threshold(&self, threshold: f64) -> Ordering {
        match self {
            Scalar::Exact(r) => r.cmp(&BigRational::zero()),
            Scalar::Float { value, .. } => {
                let t = threshold.max(ABS_FLOOR);
                if *value > t {
                    Ordering::Greater
                } else if *value < -t {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_negative(),
            Scalar::Float { value, tol } => *value < -(tol.max(ABS_FLOOR)),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Float { value, tol } => *value > tol.max(ABS_FLOOR),
        }
    }

    /// Total order on the underlying values (float NaN-free assumption).
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            (Scalar::Float { value: a, .. }, Scalar::Float { value: b, .. }) => {
                a.partial_cmp(b).expect("NaN in scalar comparison")
            }
            _ => panic!("mixed exact/float comparison"),
        }
    }

    /// Parse `p/q`, an integer, or a decimal (optionally with exponent).
    /// In exact mode a decimal is converted to the rational it denotes.
    pub fn parse(s: &str, mode: Mode) -> Result<Scalar, Error> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty numeric entry".into()));
        }
        match mode {
            Mode::Float { tol } => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: f64 = n.trim().parse().map_err(|_| bad(s))?;
                    let d: f64 = d.trim().parse().map_err(|_| bad(s))?;
                    if d == 0.0 {
                        return Err(Error::Parse(format!("zero denominator in `{s}`")));
                    }
                    Ok(Scalar::Float { value: n / d, tol })
                } else {
                    let v: f64 = s.parse().map_err(|_| bad(s))?;
                    Ok(Scalar::Float { value: v, tol })
                }
            }
            Mode::Exact => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: BigInt = n.trim().parse().map_err(|_| bad(s))?;
                    let d: BigInt = d.trim().parse().map_err(|_| bad(s))?;
                    if d.is_zero() {
                        return Err(Error::Parse(format!("zero denominator in `{s}`")));
                    }
                    Ok(Scalar::Exact(BigRational::new(n, d)))
                } else {
                    parse_decimal_exact(s)
                }
            }
        }
    }
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("cannot parse numeric entry `{s}`"))
}

fn parse_decimal_exact(s: &str) -> Result<Scalar, Error> {
    // [sign] digits [. digits] [e|E [sign] digits]
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| bad(s))?;
            (&s[..i], e)
        }
        None => (s, 0i64),
    };
    let (int_part, frac_part) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    let digits = format!("{}{}", int_part, frac_part);
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad(s));
    }
    let num: BigInt = digits.parse().map_err(|_| bad(s))?;
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if shift >= 0 {
        BigRational::from_integer(num * num::pow::pow(ten, shift as usize))
    } else {
        BigRational::new(num, num::pow::pow(ten, (-shift) as usize))
    };
    Ok(Scalar::Exact(r))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Float { value, .. } => write!(f, "{value}"),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Float { value: a, .. }, Scalar::Float { value: b, .. }) => a == b,
            _ => false,
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    (Scalar::Float { value: a, tol: ta }, Scalar::Float { value: b, tol: tb }) => {
                        Scalar::Float { value: a $op b, tol: ta.max(tb) }
                    }
                    _ => panic!("mixed exact/float arithmetic"),
                }
            }
        }
        impl<'a> $trait<&'a Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                assert!(!b.is_zero(), "division by zero");
                Scalar::Exact(a / b)
            }
            (Scalar::Float { value: a, tol: ta }, Scalar::Float { value: b, tol: tb }) => {
                Scalar::Float { value: a / b, tol: ta.max(tb) }
            }
            _ => panic!("mixed exact/float arithmetic"),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float { value, tol } => Scalar::Float { value: -value, tol },
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        *self = self.clone() + rhs;
    }
}

impl SubAssign for Scalar {
    fn sub_assign(&mut self, rhs: Scalar) {
        *self = self.clone() - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rational_and_decimal() {
        let m = Mode::Exact;
        assert_eq!(Scalar::parse("3/4", m).unwrap(), Scalar::from_ratio(3, 4));
        assert_eq!(Scalar::parse("-15/26", m).unwrap(), Scalar::from_ratio(-15, 26));
        assert_eq!(Scalar::parse("0.25", m).unwrap(), Scalar::from_ratio(1, 4));
        assert_eq!(Scalar::parse("7", m).unwrap(), Scalar::from_int(7));
        assert_eq!(Scalar::parse("2.5e-3", m).unwrap(), Scalar::from_ratio(1, 400));
        assert!(Scalar::parse("x", m).is_err());
        assert!(Scalar::parse("1/0", m).is_err());
    }

    #[test]
    fn parse_float_mode() {
        let m = Mode::float_default();
        let v = Scalar::parse("3/13", m).unwrap();
        assert!((v.to_f64() - 3.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn arithmetic_reduces() {
        let a = Scalar::from_ratio(6, 13) * Scalar::from_ratio(15, 26)
            - Scalar::from_ratio(1, 13) * Scalar::from_ratio(6, 13);
        assert_eq!(a, Scalar::from_ratio(39, 169));
        assert_eq!(format!("{a}"), "3/13");
    }

    #[test]
    #[should_panic(expected = "mixed")]
    fn mode_mixing_panics() {
        let _ = Scalar::from_int(1) + Scalar::from_f64(1.0, DEFAULT_TOL);
    }

    #[test]
    fn float_sign_threshold() {
        let v = Scalar::from_f64(-2.0965e-9, DEFAULT_TOL);
        assert_eq!(v.sign_with_threshold(7.0e-9), Ordering::Equal);
        assert_eq!(v.sign_with_threshold(1.0e-10), Ordering::Less);
    }
}
