use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::scalar::{exact_sqrt, ln_rational, Scalar};
use crate::Rational;

/// An exact number of the form `coeff * sqrt(radicand)` with `radicand >= 0`.
///
/// Orthonormal Hahn functions and transfer coefficients carry square roots of
/// rationals; keeping the two factors apart lets identities be checked by
/// comparing signs and squares without leaving rational arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct SqrtRational {
    coeff: Rational,
    radicand: Rational,
}

impl SqrtRational {
    pub fn new(coeff: Rational, radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        if coeff.is_zero() || radicand.is_zero() {
            return Self::zero();
        }
        match exact_sqrt(&radicand) {
            Some(root) => Self {
                coeff: coeff * root,
                radicand: Rational::one(),
            },
            None => Self { coeff, radicand },
        }
    }

    pub fn rational(value: Rational) -> Self {
        Self {
            coeff: value,
            radicand: Rational::one(),
        }
    }

    pub fn zero() -> Self {
        Self::rational(Rational::zero())
    }

    /// `sqrt(radicand)` with a positive sign.
    pub fn sqrt(radicand: Rational) -> Self {
        Self::new(Rational::one(), radicand)
    }

    pub fn coeff(&self) -> &Rational {
        &self.coeff
    }

    pub fn radicand(&self) -> &Rational {
        &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn signum(&self) -> i32 {
        if self.coeff.is_zero() {
            0
        } else if self.coeff.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn square(&self) -> Rational {
        &self.coeff * &self.coeff * &self.radicand
    }

    /// The value as a rational, when the radical part is trivial.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.radicand.is_one() {
            Some(self.coeff.clone())
        } else {
            None
        }
    }

    /// Exact equality by sign and square.
    pub fn same_value(&self, other: &Self) -> bool {
        self.signum() == other.signum() && self.square() == other.square()
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.coeff * &other.coeff, &self.radicand * &other.radicand)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self {
            coeff: &self.coeff * factor,
            radicand: self.radicand.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.coeff.is_zero() {
            return 0.0;
        }
        let c = self.coeff.to_f64();
        let r = self.radicand.to_f64();
        let direct = c * r.sqrt();
        if direct.is_normal() && c.is_normal() && r.is_normal() {
            return direct;
        }
        let sign = if self.coeff.is_negative() { -1.0 } else { 1.0 };
        let log_abs = ln_rational(&self.coeff.abs()) + 0.5 * ln_rational(&self.radicand);
        sign * log_abs.exp()
    }
}

impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() {
            write!(f, "{}", self.coeff)
        } else if self.coeff.is_one() {
            write!(f, "sqrt({})", self.radicand)
        } else {
            write!(f, "{}*sqrt({})", self.coeff, self.radicand)
        }
    }
}
