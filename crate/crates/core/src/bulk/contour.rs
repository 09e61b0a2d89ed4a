//! Arc integrals on the unit circle and the extended discrete sine kernel.
//!
//! With `w = e^{i theta}`, `(1/2 pi i) int g(w) w^{m-1} dw` becomes
//! `(1/2 pi) int g(e^{i theta}) e^{i m theta} d theta`. The right arc runs over
//! `theta in [-phi, phi]`; the left arc goes from `e^{-i phi}` to `e^{i phi}`
//! through `-1`, which is `-(1/2 pi) int_phi^{2 pi - phi}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::regime::LimitKernelParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ArcSide {
    Right,
    Left,
}

impl ArcSide {
    /// The arc used by the extended kernel at time difference `dt = t - s`.
    pub fn for_dt(dt: i64) -> Self {
        if dt <= 0 {
            ArcSide::Right
        } else {
            ArcSide::Left
        }
    }
}

/// Absolute tolerance of the adaptive quadrature.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Panel budget of the adaptive quadrature.
pub const QUADRATURE_MAX_PANELS: usize = 1 << 20;

/// Adaptive Simpson integration of a complex function over `[a, b]`.
pub fn adaptive_simpson(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut panels = 1usize;
    // explicit stack: (a, b, fa, fm, fb, estimate, tol, depth)
    let mut stack = vec![(a, b, fa, fm, fb, whole, tol, 0u32)];
    let mut total = Complex64::new(0.0, 0.0);
    while let Some((a, b, fa, fm, fb, est, tol, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - est;
        // a minimum depth guards against the coarse nodes aliasing an
        // oscillating integrand into a false agreement
        if (depth >= 5 && delta.norm() <= 15.0 * tol) || depth >= 50 {
            total += left + right + delta / 15.0;
            continue;
        }
        panels += 1;
        if panels > QUADRATURE_MAX_PANELS {
            return Err(Error::Quadrature(format!(
                "panel budget {QUADRATURE_MAX_PANELS} exhausted on [{a}, {b}]"
            )));
        }
        stack.push((m, b, fm, frm, fb, right, tol / 2.0, depth + 1));
        stack.push((a, m, fa, flm, fm, left, tol / 2.0, depth + 1));
    }
    Ok(total)
}

/// `(1/2 pi i) int g(w) w^{m-1} dw` over an arc of the circle `|w| = radius`
/// between the conjugate endpoints at angles `-+ half`, passing through the
/// positive real axis (`Right`) or the negative one (`Left`), oriented from
/// the lower endpoint to the upper one.
pub fn arc_integral(
    g: impl Fn(Complex64) -> Complex64,
    m: i64,
    radius: f64,
    half: f64,
    side: ArcSide,
) -> Result<Complex64> {
    let integrand = |theta: f64| {
        let w = Complex64::from_polar(radius, theta);
        g(w) * w.powi(m as i32)
    };
    let v = match side {
        ArcSide::Right => adaptive_simpson(integrand, -half, half, QUADRATURE_TOL)?,
        ArcSide::Left => -adaptive_simpson(integrand, half, 2.0 * PI - half, QUADRATURE_TOL)?,
    };
    Ok(v / (2.0 * PI))
}

/// Rejects complex values whose imaginary part is not negligible.
pub fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > 1e-10 * z.re.abs() + QUADRATURE_TOL {
        return Err(Error::Quadrature(format!("imaginary residue {} in {z}", z.im)));
    }
    Ok(z.re)
}

/// Closed form of `(1/2 pi i) int w^{m-1} dw` over the arc.
pub fn elementary_arc(phi: f64, m: i64, side: ArcSide) -> f64 {
    let right = super::regime::sine_kernel_static(phi, m);
    match side {
        ArcSide::Right => right,
        ArcSide::Left => right - if m == 0 { 1.0 } else { 0.0 },
    }
}

fn check_pole(params: &LimitKernelParams, dt: i64, side: ArcSide) -> Result<()> {
    // (1 + c w)^dt has a pole at w = -1/c, on the unit circle only for c = 1;
    // w = -1 lies on the left arc, and on the right one only when phi = pi.
    let on_circle = (params.c - 1.0).abs() <= 1e-14;
    let hits = match side {
        ArcSide::Left => true,
        ArcSide::Right => params.phi >= PI,
    };
    if dt < 0 && on_circle && hits {
        return Err(Error::PoleOnContour(format!(
            "c = 1 and dt = {dt} put the pole w = -1 on the {side:?} arc"
        )));
    }
    Ok(())
}

/// Extended sine kernel by adaptive quadrature on the requested arc.
pub fn extended_sine_kernel_quadrature(params: &LimitKernelParams, dx: i64, dt: i64, side: ArcSide) -> Result<f64> {
    check_pole(params, dt, side)?;
    let c = params.c;
    let z = arc_integral(
        |w| (Complex64::new(1.0, 0.0) + c * w).powi(dt as i32),
        dx,
        1.0,
        params.phi,
        side,
    )?;
    real_part_checked(z)
}

/// Extended sine kernel for `dt >= 0` by binomial expansion into elementary
/// arc integrals.
pub fn extended_sine_kernel_closed(params: &LimitKernelParams, dx: i64, dt: i64, side: ArcSide) -> Result<f64> {
    if dt < 0 {
        return Err(Error::InvalidQuery(format!("closed form needs dt >= 0, got {dt}")));
    }
    let mut binom = 1.0;
    let mut cpow = 1.0;
    let mut acc = 0.0;
    for k in 0..=dt {
        acc += binom * cpow * elementary_arc(params.phi, dx + k, side);
        binom = binom * (dt - k) as f64 / (k + 1) as f64;
        cpow *= params.c;
    }
    Ok(acc)
}

/// `(1/2 pi i) int (1 + c w)^dt w^{dx-1} dw` from `e^{-i phi}` to `e^{i phi}`.
///
/// For `dt >= 0` the quadrature is cross-checked against the binomial
/// closed form; disagreement beyond `1e-10` is reported.
pub fn extended_sine_kernel(params: &LimitKernelParams, dx: i64, dt: i64, side: ArcSide) -> Result<f64> {
    let q = extended_sine_kernel_quadrature(params, dx, dt, side)?;
    if dt >= 0 {
        let closed = extended_sine_kernel_closed(params, dx, dt, side)?;
        if (q - closed).abs() > 1e-10 {
            return Err(Error::Quadrature(format!(
                "quadrature {q} and closed form {closed} disagree at dx={dx}, dt={dt}"
            )));
        }
    }
    Ok(q)
}

/// The limit kernel `K(x, s; y, t)` with `dx = x - y`, `dt = t - s` and the
/// arc chosen by the sign of `dt`.
pub fn limit_kernel(params: &LimitKernelParams, dx: i64, dt: i64) -> Result<f64> {
    extended_sine_kernel(params, dx, dt, ArcSide::for_dt(dt))
}

/// `K(dx, dt; c) = c^dt K(-dx-dt, dt; 1/c)`, from `w -> 1/w`. Lets a `c > 1`
/// evaluation run with amplitude below one.
pub fn inverted_amplitude(params: &LimitKernelParams, dx: i64, dt: i64) -> (LimitKernelParams, i64, f64) {
    let inv = LimitKernelParams {
        c: 1.0 / params.c,
        phi: params.phi,
    };
    (inv, -dx - dt, params.c.powi(dt as i32))
}
