//! Exact ground fields: the rationals (characteristic zero) and prime
//! residue fields. Every [`FieldElem`] carries its field tag, so mixing
//! elements from different fields is detected rather than silently wrong.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Which kind of field a [`GroundField`] is.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Char0,
    Prime(u64),
}

/// A ground field: exact rationals, or `F_p` for a validated prime `p`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundField {
    // 0 encodes characteristic zero.
    p: u64,
}

impl GroundField {
    pub const CHAR0: GroundField = GroundField { p: 0 };

    pub fn char0() -> Self {
        Self::CHAR0
    }

    /// `F_p`; `p` must be a prime with `3 <= p < 2^32` so residue products fit in a `u64`.
    pub fn prime(p: u64) -> Result<Self> {
        if p < 3 || p >= 1 << 32 || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(GroundField { p })
    }

    pub fn kind(&self) -> FieldKind {
        if self.p == 0 {
            FieldKind::Char0
        } else {
            FieldKind::Prime(self.p)
        }
    }

    pub fn is_char0(&self) -> bool {
        self.p == 0
    }

    /// The characteristic `p`, or `None` for the rationals.
    pub fn modulus(&self) -> Option<u64> {
        (self.p != 0).then_some(self.p)
    }

    pub fn zero(&self) -> FieldElem {
        self.int(0)
    }

    pub fn one(&self) -> FieldElem {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> FieldElem {
        match self.kind() {
            FieldKind::Char0 => FieldElem::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldKind::Prime(p) => FieldElem::Residue {
                value: v.rem_euclid(p as i64) as u64,
                p,
            },
        }
    }

    /// Maps an exact rational into this field. Fails when the denominator
    /// vanishes modulo `p`.
    pub fn rational(&self, q: &BigRational) -> Result<FieldElem> {
        match self.kind() {
            FieldKind::Char0 => Ok(FieldElem::Rational(q.clone())),
            FieldKind::Prime(p) => {
                let num = reduce_big(q.numer(), p);
                let den = reduce_big(q.denom(), p);
                if den == 0 {
                    return Err(Error::ZeroDivisor("denominator vanishes modulo p"));
                }
                Ok(FieldElem::Residue {
                    value: mul_mod(num, inv_mod(den, p), p),
                    p,
                })
            }
        }
    }

    /// A residue of `F_p`, reduced modulo `p`.
    pub fn residue(&self, v: u64) -> FieldElem {
        match self.kind() {
            FieldKind::Char0 => FieldElem::Rational(BigRational::from_integer(BigInt::from(v))),
            FieldKind::Prime(p) => FieldElem::Residue { value: v % p, p },
        }
    }

    /// Parses `"n"` or `"n/d"` into this field.
    pub fn parse(&self, s: &str) -> Result<FieldElem> {
        let s = s.trim();
        let bad = || Error::Parse {
            line: 0,
            msg: format!("not a rational number: {s:?}"),
        };
        let q = match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::ZeroDivisor("zero denominator in literal"));
                }
                BigRational::new(n, d)
            }
            None => BigRational::from_integer(s.parse::<BigInt>().map_err(|_| bad())?),
        };
        self.rational(&q)
    }
}

impl fmt::Display for GroundField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            FieldKind::Char0 => write!(f, "Q"),
            FieldKind::Prime(p) => write!(f, "F_{p}"),
        }
    }
}

impl Serialize for GroundField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.kind() {
            FieldKind::Char0 => s.serialize_str("char0"),
            FieldKind::Prime(p) => s.serialize_str(&format!("prime:{p}")),
        }
    }
}

/// An exact field element: a rational in lowest terms, or a residue in `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldElem {
    Rational(BigRational),
    Residue { value: u64, p: u64 },
}

impl FieldElem {
    pub fn field(&self) -> GroundField {
        match self {
            FieldElem::Rational(_) => GroundField::CHAR0,
            FieldElem::Residue { p, .. } => GroundField { p: *p },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElem::Rational(q) => q.is_zero(),
            FieldElem::Residue { value, .. } => *value == 0,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElem::Rational(q) => Some(q),
            FieldElem::Residue { .. } => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match self {
            FieldElem::Rational(_) => None,
            FieldElem::Residue { value, .. } => Some(*value),
        }
    }

    fn check(&self, other: &FieldElem) -> Result<()> {
        if self.field() == other.field() {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.field(), other.field()))
        }
    }

    pub fn try_add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a + b),
            (FieldElem::Residue { value: a, p }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue { value: (a + b) % p, p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a - b),
            (FieldElem::Residue { value: a, p }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue { value: (a + p - b) % p, p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => FieldElem::Rational(a * b),
            (FieldElem::Residue { value: a, p }, FieldElem::Residue { value: b, .. }) => {
                FieldElem::Residue { value: mul_mod(*a, *b, *p), p: *p }
            }
            _ => unreachable!(),
        })
    }

    pub fn try_div(&self, other: &FieldElem) -> Result<FieldElem> {
        self.check(other)?;
        Ok(self.try_mul(&other.inv()?)?)
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::ZeroDivisor("inverse of zero"));
        }
        Ok(match self {
            FieldElem::Rational(a) => FieldElem::Rational(a.recip()),
            FieldElem::Residue { value, p } => FieldElem::Residue {
                value: inv_mod(*value, *p),
                p: *p,
            },
        })
    }

    pub fn pow(&self, e: u32) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(num_traits::pow(a.clone(), e as usize)),
            FieldElem::Residue { value, p } => FieldElem::Residue {
                value: pow_mod(*value, e as u64, *p),
                p: *p,
            },
        }
    }
}

impl Ord for FieldElem {
    /// Numeric order on rationals, residue order on `F_p`. Elements of
    /// different fields are ordered by field so the order stays total.
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FieldElem::Rational(a), FieldElem::Rational(b)) => a.cmp(b),
            (FieldElem::Residue { value: a, p: pa }, FieldElem::Residue { value: b, p: pb }) => {
                pa.cmp(pb).then(a.cmp(b))
            }
            (FieldElem::Rational(_), FieldElem::Residue { .. }) => Ordering::Less,
            (FieldElem::Residue { .. }, FieldElem::Rational(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElem::Rational(q) if q.is_integer() => write!(f, "{}", q.numer()),
            FieldElem::Rational(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            FieldElem::Residue { value, .. } => write!(f, "{value}"),
        }
    }
}

impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// Operator sugar for code that already holds same-field elements.
// These panic on a field mismatch; the `try_*` methods do not.
macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&FieldElem> for &FieldElem {
            type Output = FieldElem;
            fn $m(self, rhs: &FieldElem) -> FieldElem {
                self.$f(rhs).expect(concat!("FieldElem::", stringify!($m)))
            }
        }
    };
}
binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        match self {
            FieldElem::Rational(a) => FieldElem::Rational(-a),
            FieldElem::Residue { value, p } => FieldElem::Residue {
                value: (p - value) % p,
                p: *p,
            },
        }
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    a * b % p
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Inverse by Fermat; `a` must be nonzero mod the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn reduce_big(v: &BigInt, p: u64) -> u64 {
    let r = v % BigInt::from(p);
    let r = if r.is_negative() { r + BigInt::from(p) } else { r };
    r.to_u64().expect("residue fits u64")
}

/// Trial division; moduli are below 2^32 so this is at most 2^16 steps.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Serializes a rational as `"n"` or `"n/d"`.
pub(crate) fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    if q.is_integer() {
        s.collect_str(q.numer())
    } else {
        s.collect_str(&format_args!("{}/{}", q.numer(), q.denom()))
    }
}

pub(crate) fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_validation() {
        assert!(GroundField::prime(7).is_ok());
        assert!(GroundField::prime(101).is_ok());
        assert_eq!(GroundField::prime(9), Err(Error::InvalidPrime(9)));
        assert_eq!(GroundField::prime(2), Err(Error::InvalidPrime(2)));
        assert!(GroundField::prime((1u64 << 32) + 15).is_err());
    }

    #[test]
    fn residue_arithmetic() {
        let f = GroundField::prime(7).unwrap();
        let a = f.int(3);
        let b = f.int(5);
        assert_eq!(&a + &b, f.int(1));
        assert_eq!(&a - &b, f.int(5));
        assert_eq!(&a * &b, f.int(1));
        assert_eq!(&a / &b, f.int(2));
        assert_eq!(-&a, f.int(4));
        assert_eq!(f.int(-1), f.int(6));
    }

    #[test]
    fn rationals_in_lowest_terms() {
        let q = GroundField::char0();
        let x = q.parse("6/-4").unwrap();
        assert_eq!(x.to_string(), "-3/2");
        assert_eq!(q.parse("10/5").unwrap().to_string(), "2");
        let f = GroundField::prime(7).unwrap();
        assert_eq!(f.parse("1/2").unwrap(), f.int(4));
        assert!(f.parse("1/7").is_err());
    }

    #[test]
    fn mixing_fields_is_an_error() {
        let a = GroundField::char0().int(1);
        let b = GroundField::prime(7).unwrap().int(1);
        assert!(matches!(a.try_add(&b), Err(Error::FieldMismatch(..))));
        assert!(a.inv().is_ok());
        assert!(GroundField::char0().zero().inv().is_err());
    }
}
