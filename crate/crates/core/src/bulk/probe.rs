//! Finite-size probes of the bulk limit: scale a regime point by `rho`, round
//! to a lattice model and compare the exact kernel with its limit.

use serde::{Deserialize, Serialize};

use crate::combinatorics::ModelParams;
use crate::error::{Error, Result};
use crate::kernel::Ensemble;

use super::contour::limit_kernel;
use super::regime::{limit_params, LimitKernelParams, LimitRegime};

/// A regime point scaled by `rho` and rounded half up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledPoint {
    pub rho: f64,
    pub model: ModelParams,
    pub t: i64,
    pub x: i64,
    /// Shift applied to the rounded `x` to keep every probed point in its
    /// support (0 when none was needed).
    pub x_repair: i64,
}

fn round_half_up(v: f64) -> i64 {
    (v + 0.5).floor() as i64
}

/// Rounds `rho * regime` to a model and a base point. `needs(x)` says whether
/// a candidate base `x` is usable; candidates `x, x-1, x+1` are tried in order.
pub fn scale_regime(
    regime: &LimitRegime,
    rho: f64,
    needs: impl Fn(&ModelParams, i64, i64) -> bool,
) -> Result<ScaledPoint> {
    if !(rho > 0.0) {
        return Err(Error::InfeasibleRounding(format!("scale {rho} must be positive")));
    }
    let n = round_half_up(rho * regime.n);
    let s = round_half_up(rho * regime.s);
    let horizon = round_half_up(rho * regime.horizon);
    if n < 1 || s < 0 || horizon < s || horizon < 1 {
        return Err(Error::InfeasibleRounding(format!(
            "rho = {rho} rounds to (N, S, T) = ({n}, {s}, {horizon})"
        )));
    }
    let model = ModelParams::new(n as usize, s as usize, horizon as usize)
        .map_err(|e| Error::InfeasibleRounding(e.to_string()))?;
    let t = round_half_up(rho * regime.t);
    if t < 0 || t > horizon {
        return Err(Error::InfeasibleRounding(format!("time {t} outside 0..={horizon}")));
    }
    let x = round_half_up(rho * regime.x);
    for repair in [0, -1, 1] {
        if needs(&model, t, x + repair) {
            return Ok(ScaledPoint {
                rho,
                model,
                t,
                x: x + repair,
                x_repair: repair,
            });
        }
    }
    Err(Error::InfeasibleRounding(format!(
        "no base point within one step of x = {x} keeps the probe in the support"
    )))
}

/// Gauge factor `a` with `K_finite(x+dx, t; x, t+dt) ~ a^dt K_limit(dx, dt)`:
/// `a^2 = (T-t-S+x)(t+N-x) / ((t+N)(T+N-t))`, evaluated on the rounded point.
pub fn gauge_factor(p: &ScaledPoint) -> f64 {
    let (n, s, tt) = p.model.nst();
    let (t, x) = (p.t, p.x);
    let num = ((tt - t - s + x) * (t + n - x)) as f64;
    let den = ((t + n) * (tt + n - t)) as f64;
    (num / den).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeCell {
    pub dx: i64,
    pub dt: i64,
    /// Finite kernel divided by `a^dt`.
    pub prelimit: f64,
    pub limit: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub point: ScaledPoint,
    pub gauge: f64,
    pub cells: Vec<ProbeCell>,
    pub max_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub regime: LimitRegime,
    pub params: LimitKernelParams,
    pub rows: Vec<ProbeRow>,
}

impl ConvergenceTable {
    /// Whether the per-row maximum error never increases with `rho`.
    pub fn is_non_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].max_error <= w[0].max_error)
    }
}

/// Compares `K(x+dx, t; x, t+dt)` of the rounded model with the limit kernel
/// for each offset and scale.
pub fn convergence_probe(regime: &LimitRegime, offsets: &[(i64, i64)], rhos: &[f64]) -> Result<ConvergenceTable> {
    let params = limit_params(regime)?;
    let limits = offsets
        .iter()
        .map(|&(dx, dt)| limit_kernel(&params, dx, dt))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let point = scale_regime(regime, rho, |m, t, x| {
            offsets.iter().all(|&(dx, dt)| {
                m.check_time(t + dt).is_ok() && m.in_support(t, x + dx) && m.in_support(t + dt, x)
            })
        })?;
        let ens = Ensemble::new(point.model);
        let gauge = gauge_factor(&point);
        let mut cells = Vec::with_capacity(offsets.len());
        for (&(dx, dt), &limit) in offsets.iter().zip(&limits) {
            let k = ens.extended_kernel_f64((point.x + dx, point.t), (point.x, point.t + dt))?;
            let prelimit = k / gauge.powi(dt as i32);
            cells.push(ProbeCell {
                dx,
                dt,
                prelimit,
                limit,
                error: (prelimit - limit).abs(),
            });
        }
        let max_error = cells.iter().map(|c| c.error).fold(0.0, f64::max);
        rows.push(ProbeRow {
            point,
            gauge,
            cells,
            max_error,
        });
    }
    Ok(ConvergenceTable {
        regime: *regime,
        params,
        rows,
    })
}

/// One-point density of the rounded model at the scaled regime point.
pub fn prelimit_density(regime: &LimitRegime, rho: f64) -> Result<(ScaledPoint, f64)> {
    let point = scale_regime(regime, rho, |m, t, x| m.in_support(t, x))?;
    let ens = Ensemble::new(point.model);
    let d = ens.extended_kernel_f64((point.x, point.t), (point.x, point.t))?;
    Ok((point, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::correlation;
    use num_traits::ToPrimitive;

    fn center() -> LimitRegime {
        LimitRegime::new(1.0, 1.0, 2.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn density_approaches_two_thirds() {
        let table = convergence_probe(&center(), &[(0, 0)], &[10.0, 20.0]).unwrap();
        let errs: Vec<f64> = table.rows.iter().map(|r| r.max_error).collect();
        assert!(errs[1] < errs[0] && errs[1] < 0.01, "{errs:?}");
        assert!(table.is_non_increasing());
    }

    #[test]
    fn small_scale_reuses_exact_kernel() {
        let (p, d) = prelimit_density(&center(), 2.0).unwrap();
        assert_eq!(p.model, ModelParams::new(2, 2, 4).unwrap());
        let exact = correlation(&p.model, &[(p.x, p.t)]).unwrap();
        assert_eq!(d, exact.to_f64().unwrap());
    }

    #[test]
    fn frozen_density_vanishes() {
        let r = LimitRegime::new(1.0, 1.0, 2.0, 1.0, 1.95).unwrap();
        let (_, d) = prelimit_density(&r, 30.0).unwrap();
        assert!(d < 0.05, "{d}");
        let r = LimitRegime::new(1.0, 1.0, 2.0, 0.1, 1.0).unwrap();
        let (_, d) = prelimit_density(&r, 30.0).unwrap();
        assert!(d > 0.95, "{d}");
    }

    #[test]
    fn rounding_repairs_and_failures() {
        // the top edge forces the base point one step down
        let r = LimitRegime::new(1.0, 1.0, 2.0, 1.0, 2.0).unwrap();
        let p = scale_regime(&r, 10.0, |m, t, x| m.in_support(t, x)).unwrap();
        assert_eq!((p.x, p.x_repair), (19, -1));
        assert!(matches!(
            scale_regime(&center(), 0.1, |_, _, _| true),
            Err(Error::InfeasibleRounding(_))
        ));
    }
}
