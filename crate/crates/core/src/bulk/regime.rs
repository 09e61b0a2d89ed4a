//! Macroscopic regime points, the limit parameters `(c, phi)` and the
//! arctic ellipse.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaled hexagon `(N, S, T)` and location `(t, x)`, all macroscopic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRegime<F = f64> {
    pub n: F,
    pub s: F,
    pub horizon: F,
    pub t: F,
    pub x: F,
}

impl<F: Float + std::fmt::Debug> LimitRegime<F> {
    pub fn new(n: F, s: F, horizon: F, t: F, x: F) -> Result<Self> {
        let r = Self { n, s, horizon, t, x };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let z = F::zero();
        let bad = |m: &str| Err(Error::InvalidModel(format!("{m}: {self:?}")));
        if !(self.n > z) {
            return bad("need N > 0");
        }
        if !(self.s > z && self.s <= self.horizon) {
            return bad("need 0 < S <= T");
        }
        if !(self.t >= z && self.t <= self.horizon) {
            return bad("need 0 <= t <= T");
        }
        let (lo, hi) = self.x_range();
        if !(self.x >= lo && self.x <= hi) {
            return bad("x outside the admissible box");
        }
        Ok(())
    }

    /// Admissible `x` interval at time `t`.
    pub fn x_range(&self) -> (F, F) {
        let lo = (self.t + self.s - self.horizon).max(F::zero());
        let hi = self.t.min(self.s) + self.n;
        (lo, hi)
    }

    /// The four distances `(S+N-x, t+N-x, x, x+T-S-t)` to the box sides.
    fn distances(&self) -> [F; 4] {
        [
            self.s + self.n - self.x,
            self.t + self.n - self.x,
            self.x,
            self.x + self.horizon - self.s - self.t,
        ]
    }

    /// Image under `(t, x) -> (T - t, S + N - x)`.
    pub fn flipped(&self) -> Self {
        Self {
            t: self.horizon - self.t,
            x: self.s + self.n - self.x,
            ..*self
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitKernelParams<F = f64> {
    pub c: F,
    pub phi: F,
}

impl<F: Float> LimitKernelParams<F> {
    pub fn density(&self) -> F {
        self.phi / F::from(std::f64::consts::PI).unwrap()
    }
}

/// The arccos argument `D` (unclamped) at a regime point.
pub fn arccos_argument<F: Float + std::fmt::Debug>(r: &LimitRegime<F>) -> Result<F> {
    let [a, b, x, d] = r.distances();
    let prod = a * b * x * d;
    if !(prod > F::zero()) {
        return Err(Error::BoundaryRegime(format!("regime on the box boundary: {r:?}")));
    }
    let two = F::from(2.0).unwrap();
    Ok((-r.n * (r.n + r.horizon) + a * b + x * d) / (two * prod.sqrt()))
}

/// `(c, phi)` with `phi = arccos D` clamped to `[0, pi]`.
pub fn limit_params<F: Float + std::fmt::Debug>(r: &LimitRegime<F>) -> Result<LimitKernelParams<F>> {
    r.validate()?;
    let [a, b, x, d] = r.distances();
    let den = d * b;
    if !(den > F::zero()) {
        return Err(Error::BoundaryRegime(format!("zero denominator in c at {r:?}")));
    }
    let c = (x * a / den).sqrt();
    let dd = arccos_argument(r)?;
    let phi = if dd >= F::one() {
        F::zero()
    } else if dd <= -F::one() {
        F::from(std::f64::consts::PI).unwrap()
    } else {
        dd.acos()
    };
    Ok(LimitKernelParams { c, phi })
}

/// Constants `(A, B)` of the limiting tridiagonal operator. The spectral
/// relation `cos phi = (-N(N+T) - A) / (2B)` is checked against
/// [`limit_params`] before returning.
pub fn limit_tridiagonal<F: Float + std::fmt::Debug>(r: &LimitRegime<F>) -> Result<(F, F)> {
    r.validate()?;
    let [a, b, x, d] = r.distances();
    let big_a = -a * b - x * d;
    let big_b = (a * b * x * d).sqrt();
    if !(big_b > F::zero()) {
        return Err(Error::BoundaryRegime(format!("B vanishes at {r:?}")));
    }
    let two = F::from(2.0).unwrap();
    let cos = (-r.n * (r.n + r.horizon) - big_a) / (two * big_b);
    let dd = arccos_argument(r)?;
    let tol = F::from(1e-12).unwrap() * (F::one() + dd.abs());
    if (cos - dd).abs() > tol {
        return Err(Error::Inconsistent(format!(
            "cos phi {cos:?} from (A, B) differs from {dd:?}"
        )));
    }
    Ok((big_a, big_b))
}

/// Discrete sine kernel `sin(phi d) / (pi d)`, `phi / pi` on the diagonal.
pub fn sine_kernel_static(phi: f64, d: i64) -> f64 {
    use std::f64::consts::PI;
    if d == 0 {
        phi / PI
    } else {
        (phi * d as f64).sin() / (PI * d as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EllipseClass {
    Inside,
    FrozenEmpty,
    FrozenFull,
}

/// The quadratic form whose non-positive set is the closed ellipse.
pub fn ellipse_form<F: Float>(n: F, s: F, horizon: F, t: F, x: F) -> F {
    let two = F::from(2.0).unwrap();
    let sn = s + n;
    horizon * horizon * x * x + sn * sn * t * t
        + two * x * t * (n * horizon - s * horizon - two * s * n)
        + two * t * (s * n * n - n * horizon * s - n * n * horizon + s * s * n)
        + two * x * (n * horizon * s - n * horizon * horizon)
        + n * n * (horizon - s) * (horizon - s)
}

pub fn ellipse_form_at<F: Float>(r: &LimitRegime<F>) -> F {
    ellipse_form(r.n, r.s, r.horizon, r.t, r.x)
}

/// Inside (closed) ellipse, or frozen with density 0 or 1 by the sign of `D`.
pub fn ellipse_classify<F: Float + std::fmt::Debug>(r: &LimitRegime<F>) -> Result<EllipseClass> {
    r.validate()?;
    if ellipse_form_at(r) <= F::zero() {
        return Ok(EllipseClass::Inside);
    }
    // Outside the ellipse |D| >= 1, so the sign of its numerator decides;
    // this also covers the box boundary where D itself blows up.
    let [a, b, x, d] = r.distances();
    let num = -r.n * (r.n + r.horizon) + a * b + x * d;
    Ok(if num > F::zero() {
        EllipseClass::FrozenEmpty
    } else {
        EllipseClass::FrozenFull
    })
}

/// A side of the admissible hexagon in the `(t, x)` plane, as the line
/// `{(t0 + u * dt, x0 + u * dx)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HexagonSide {
    pub name: &'static str,
    pub origin: (f64, f64),
    pub direction: (f64, f64),
}

pub fn hexagon_sides(n: f64, s: f64, horizon: f64) -> [HexagonSide; 6] {
    [
        HexagonSide { name: "t = 0", origin: (0.0, 0.0), direction: (0.0, 1.0) },
        HexagonSide { name: "t = T", origin: (horizon, 0.0), direction: (0.0, 1.0) },
        HexagonSide { name: "x = 0", origin: (0.0, 0.0), direction: (1.0, 0.0) },
        HexagonSide { name: "x = S + N", origin: (0.0, s + n), direction: (1.0, 0.0) },
        HexagonSide { name: "x = t + N", origin: (0.0, n), direction: (1.0, 1.0) },
        HexagonSide { name: "x = t + S - T", origin: (0.0, s - horizon), direction: (1.0, 1.0) },
    ]
}

/// Discriminant of the ellipse form restricted to a side line, divided by
/// the square of its leading coefficient. Zero means tangency.
pub fn tangency_discriminant(n: f64, s: f64, horizon: f64, side: &HexagonSide) -> f64 {
    let q = |u: f64| {
        let t = side.origin.0 + u * side.direction.0;
        let x = side.origin.1 + u * side.direction.1;
        ellipse_form(n, s, horizon, t, x)
    };
    // exact for quadratics: recover coefficients from three samples
    let (q0, q1, qm) = (q(0.0), q(1.0), q(-1.0));
    let a = (q1 + qm) / 2.0 - q0;
    let b = (q1 - qm) / 2.0;
    let c = q0;
    (b * b - 4.0 * a * c) / (a * a)
}
