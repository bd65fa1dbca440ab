//! High-precision evaluation of products of rational powers.
//!
//! Every bound in the crate has the shape `Π bᵢ^{eᵢ}` with rational bases
//! and rational exponents. With `L` the common denominator of the exponents,
//! `Π bᵢ^{eᵢ} = (Π bᵢ^{eᵢL})^{1/L}`, and the inner product is an exact
//! rational, so a single integer `L`-th root yields the floor of the value at
//! any number of decimal digits.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::rat_int;

/// Default number of decimal digits; `ENERGYLAB_PRECISION` overrides it.
pub const DEFAULT_DIGITS: u32 = 50;

pub fn precision_digits() -> u32 {
    std::env::var("ENERGYLAB_PRECISION")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&d| (20..=10_000).contains(&d))
        .unwrap_or(DEFAULT_DIGITS)
}

/// A nonnegative real truncated to `digits` decimals: `scaled = ⌊x·10^digits⌋`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    scaled: BigUint,
    digits: u32,
}

fn ten_pow(d: u32) -> BigUint {
    BigUint::from(10u8).pow(d)
}

impl Decimal {
    pub fn zero(digits: u32) -> Self {
        Decimal { scaled: BigUint::zero(), digits }
    }

    /// `⌊q·10^digits⌋` for `q ≥ 0`.
    pub fn from_rational(q: &BigRational, digits: u32) -> Self {
        assert!(!q.is_negative(), "Decimal is nonnegative");
        let n = q.numer().to_biguint().unwrap() * ten_pow(digits);
        let d = q.denom().to_biguint().unwrap();
        Decimal { scaled: n / d, digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn scaled(&self) -> &BigUint {
        &self.scaled
    }

    pub fn add(&self, other: &Decimal) -> Decimal {
        assert_eq!(self.digits, other.digits);
        Decimal {
            scaled: &self.scaled + &other.scaled,
            digits: self.digits,
        }
    }

    pub fn times(&self, k: u64) -> Decimal {
        Decimal {
            scaled: &self.scaled * k,
            digits: self.digits,
        }
    }

    /// `self ≤ other · (1 + 10^{-tol_exp})`, evaluated exactly on the truncations.
    pub fn le_rel(&self, other: &Decimal, tol_exp: u32) -> bool {
        assert_eq!(self.digits, other.digits);
        let t = ten_pow(tol_exp);
        &self.scaled * &t <= &other.scaled * (&t + 1u8)
    }

    pub fn to_f64(&self) -> f64 {
        BigRational::new(
            BigInt::from_biguint(Sign::Plus, self.scaled.clone()),
            BigInt::from_biguint(Sign::Plus, ten_pow(self.digits)),
        )
        .to_f64()
        .unwrap_or(f64::INFINITY)
    }

    /// The value rounded to six significant digits, as reported.
    pub fn sig6(&self) -> f64 {
        sig6(self.to_f64())
    }
}

pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.scaled.to_string();
        let d = self.digits as usize;
        if s.len() <= d {
            write!(f, "0.{}{}", "0".repeat(d - s.len()), s)
        } else {
            write!(f, "{}.{}", &s[..s.len() - d], &s[s.len() - d..])
        }
    }
}

impl Serialize for Decimal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `Π baseᵢ^{expᵢ}` with positive rational bases and rational exponents.
#[derive(Clone, Debug, Default)]
pub struct PowerProduct {
    factors: Vec<(BigRational, BigRational)>,
}

impl PowerProduct {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies in `base^{num/den}`.
    pub fn pow(mut self, base: impl Into<BigRational>, num: i64, den: i64) -> Self {
        self.factors
            .push((base.into(), BigRational::new(BigInt::from(num), BigInt::from(den))));
        self
    }

    /// Multiplies in `base^exp` for an arbitrary rational exponent.
    pub fn pow_q(mut self, base: impl Into<BigRational>, exp: BigRational) -> Self {
        self.factors.push((base.into(), exp));
        self
    }

    pub fn times(mut self, other: &PowerProduct) -> Self {
        self.factors.extend(other.factors.iter().cloned());
        self
    }

    pub fn inverse(&self) -> Self {
        PowerProduct {
            factors: self.factors.iter().map(|(b, e)| (b.clone(), -e)).collect(),
        }
    }

    /// `⌊value·10^digits⌋`. Bases must be positive, except that a zero base
    /// with a positive exponent makes the whole product zero.
    pub fn eval(&self, digits: u32) -> Result<Decimal> {
        let mut l = BigInt::one();
        for (b, e) in &self.factors {
            if b.is_negative() {
                return Err(Error::OutOfRange(format!("negative base {b} in power product")));
            }
            if b.is_zero() {
                if e.is_positive() {
                    return Ok(Decimal::zero(digits));
                }
                return Err(Error::OutOfRange("zero base with nonpositive exponent".into()));
            }
            l = l.lcm(e.denom());
        }
        let l_u32 = l
            .to_u32()
            .ok_or_else(|| Error::OutOfRange("exponent denominators too large".into()))?;
        let mut acc = BigRational::one();
        for (b, e) in &self.factors {
            let k = (e * BigRational::from_integer(l.clone())).to_integer();
            let k_i32 = k
                .to_i32()
                .ok_or_else(|| Error::OutOfRange("exponent too large".into()))?;
            acc *= Pow::pow(b, k_i32);
        }
        let n = acc.numer().to_biguint().unwrap() * ten_pow(digits * l_u32);
        let inner = n / acc.denom().to_biguint().unwrap();
        Ok(Decimal {
            scaled: inner.nth_root(l_u32),
            digits,
        })
    }
}

/// `⌊q^{num/den}·10^digits⌋` for a single power.
pub fn rational_power(q: &BigRational, num: i64, den: i64, digits: u32) -> Result<Decimal> {
    PowerProduct::new().pow(q.clone(), num, den).eval(digits)
}

/// A reported comparison `lhs / rhs`; both sides truncated decimals.
#[derive(Clone, Debug, Serialize)]
pub struct BoundRatio {
    pub label: String,
    pub lhs: Decimal,
    pub rhs: Decimal,
    /// `lhs / rhs` to six significant digits.
    pub ratio: f64,
}

impl BoundRatio {
    pub fn new(label: impl Into<String>, lhs: PowerProduct, rhs: PowerProduct, digits: u32) -> Result<Self> {
        let l = lhs.eval(digits)?;
        let r = rhs.eval(digits)?;
        let ratio = lhs.times(&rhs.inverse()).eval(digits)?.sig6();
        Ok(BoundRatio {
            label: label.into(),
            lhs: l,
            rhs: r,
            ratio,
        })
    }

    /// Exact integer left-hand side.
    pub fn of_int(label: impl Into<String>, lhs: u128, rhs: PowerProduct) -> Result<Self> {
        Self::new(label, PowerProduct::new().pow(rat_int(lhs), 1, 1), rhs, precision_digits())
    }
}
