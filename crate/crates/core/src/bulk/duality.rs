//! Particle-hole duality with the kernel
//! `K_OR = (1/2 pi i) int_{conj z}^{z} (1 - w)^dt w^{dx-1} dw`
//! taken on the circle `|w| = c` through `+c` when `dt >= 0` and through `-c`
//! otherwise, with `z = c e^{i (pi - phi)}`.
//!
//! Substituting `w = -c u` carries one contour onto the other, so
//! `K = delta_{dx,0} delta_{dt,0} - (-1)^dx c^{-dx} K_OR`. The sign and the
//! power of `c` are a gauge conjugation and the delta is the particle-hole
//! involution. Offsets are taken on the sheared lattice, where the half-step
//! shift of the original coordinates is integral because `dt` is even.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::contour::{arc_integral, inverted_amplitude, limit_kernel, real_part_checked, ArcSide};
use super::regime::LimitKernelParams;

/// `K_OR` by quadrature on the circle of radius `c`.
pub fn or_kernel(params: &LimitKernelParams, dx: i64, dt: i64) -> Result<f64> {
    let c = params.c;
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::ParameterRegime(format!(
            "the dual kernel needs 0 < c <= 1, got {c}; invert the amplitude first"
        )));
    }
    let side = if dt >= 0 { ArcSide::Right } else { ArcSide::Left };
    // (1 - w)^dt has its pole at w = 1, reached only by the right arc at c = 1
    if dt < 0 && (c - 1.0).abs() <= 1e-14 && side == ArcSide::Right {
        return Err(Error::PoleOnContour("w = 1 on the dual contour".into()));
    }
    let z = arc_integral(
        |w| (Complex64::new(1.0, 0.0) - w).powi(dt as i32),
        dx,
        c,
        PI - params.phi,
        side,
    )?;
    real_part_checked(z)
}

/// The dual form `delta - (-1)^dx c^{-dx} K_OR`, for `c <= 1`.
fn dual_side(params: &LimitKernelParams, dx: i64, dt: i64) -> Result<f64> {
    let or = or_kernel(params, dx, dt)?;
    let sign = if dx % 2 == 0 { 1.0 } else { -1.0 };
    let delta = if dx == 0 && dt == 0 { 1.0 } else { 0.0 };
    Ok(delta - sign * params.c.powi(-dx as i32) * or)
}

/// `K - (delta - (-1)^dx c^{-dx} K_OR)` for the limit kernel `K`. For
/// `c > 1` the dual side is taken at amplitude `1/c` through
/// [`inverted_amplitude`].
pub fn or_duality_residual(params: &LimitKernelParams, dx: i64, dt: i64) -> Result<f64> {
    if dt % 2 != 0 {
        return Err(Error::InvalidQuery(format!(
            "the sheared lattice needs an even time offset, got {dt}"
        )));
    }
    let ours = limit_kernel(params, dx, dt)?;
    let dual = if params.c > 1.0 {
        let (inv, dx_inv, factor) = inverted_amplitude(params, dx, dt);
        factor * dual_side(&inv, dx_inv, dt)?
    } else {
        dual_side(params, dx, dt)?
    };
    Ok(ours - dual)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_vanishes_on_grid() {
        for c in [0.3, 0.7, 1.0] {
            for phi in [0.5, 1.5, 2.5] {
                for dt in [-2, 0, 2] {
                    if c == 1.0 && dt > 0 {
                        continue;
                    }
                    for dx in -3..=3 {
                        let r = or_duality_residual(&LimitKernelParams { c, phi }, dx, dt).unwrap();
                        assert!(r.abs() < 1e-10, "c={c} phi={phi} dx={dx} dt={dt}: {r}");
                    }
                }
            }
        }
    }

    #[test]
    fn large_amplitude_goes_through_inversion() {
        for c in [1.4, 2.5] {
            for dt in [-2, 0, 2] {
                for dx in -3..=3 {
                    let r = or_duality_residual(&LimitKernelParams { c, phi: 1.1 }, dx, dt).unwrap();
                    assert!(r.abs() < 1e-9, "c={c} dx={dx} dt={dt}: {r}");
                }
            }
        }
    }

    #[test]
    fn rejects_odd_shift_and_large_amplitude() {
        let p = LimitKernelParams { c: 0.5, phi: 1.0 };
        assert!(or_duality_residual(&p, 0, 1).is_err());
        let p = LimitKernelParams { c: 1.5, phi: 1.0 };
        assert!(matches!(or_kernel(&p, 0, 0), Err(Error::ParameterRegime(_))));
    }
}
