//! Scalar abstraction shared by the exact and floating-point code paths.
//!
//! Anything that only needs field operations (terminating hypergeometric
//! series, Gaussian elimination) is written against [`Scalar`] so the same
//! routine runs on [`Rational`] and on `f64`/`f32`.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::Rational;

pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> {
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// Rounds (or copies) an exact rational into this scalar type.
    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Pivot-selection size. Exact types only need to distinguish zero.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f32
    }

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f32(r).unwrap_or(f32::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

/// Integer to rational.
pub fn rat(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// `n / d` as a reduced rational. Panics on `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn exact_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Natural log of a positive big integer, accurate to f64 precision even
/// when the integer itself overflows f64.
pub fn ln_bigint(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigInt = v >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational.
pub fn ln_rational(r: &Rational) -> f64 {
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// Rising factorial `(a)_n = a (a+1) ... (a+n-1)` in exact arithmetic.
pub fn pochhammer(a: i64, n: usize) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..n as i64 {
        acc *= a + i;
    }
    BigRational::from_integer(acc)
}

/// `n!` as a big integer.
pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}
