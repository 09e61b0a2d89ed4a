//! Static, complementary and extended kernels of the path ensemble, and
//! correlation functions as their minors.
//!
//! Internally every kernel entry is stored in a rational gauge:
//! `K(x,s; y,t) = E(x,s) / E(y,t) * K_rat(x,s; y,t)` with
//! `E(x,s)^2 = w_s(x) * prod_{j<s} D_j`. The conjugation by `E` does not
//! change any minor, so correlations are exact rational determinants of
//! `K_rat`, while the kernel values themselves are `coeff * sqrt(radicand)`.
//! In this gauge the one-step transfer operator is the integer bidiagonal
//! matrix `(S+N-1-x) [y = x+1] + (T-h-S+x) [y = x]`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::ModelParams;
use crate::error::{Error, Result};
use crate::hahn::{hahn_q_all, weight, NumericBackend};
use crate::linalg::{det_with_report, DetReport, Matrix};
use crate::process::{coupling_denominator, coupling_q, SliceBasis};
use crate::radical::SqrtRational;
use crate::scalar::{rat, Scalar};
use crate::Rational;

/// Space-time point `(x, t)`.
pub type Point = (i64, i64);

/// A list of distinct space-time points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationQuery {
    pub points: Vec<Point>,
}

impl CorrelationQuery {
    pub fn new(model: &ModelParams, points: Vec<Point>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            model.check_time(p.1)?;
            if points[..i].contains(p) {
                return Err(Error::InvalidQuery(format!("point {p:?} repeated")));
            }
        }
        Ok(Self { points })
    }
}

/// Kernel restricted to a list of points. `exact` holds the rational-gauge
/// matrix (same minors as `values`) when the backend is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    pub points: Vec<Point>,
    pub values: Matrix<f64>,
    pub exact: Option<Matrix<Rational>>,
    pub backend: NumericBackend,
}

/// Cached per-model data for kernel evaluation. Caches fill lazily and are
/// shared safely between threads.
#[derive(Debug)]
pub struct Ensemble {
    model: ModelParams,
    bases: Vec<OnceLock<SliceBasis>>,
    couplings: Vec<OnceLock<Vec<Rational>>>,
    values: Mutex<HashMap<Point, Arc<Vec<Rational>>>>,
}

impl Ensemble {
    pub fn new(model: ModelParams) -> Self {
        let slots = model.horizon + 1;
        Self {
            model,
            bases: (0..slots).map(|_| OnceLock::new()).collect(),
            couplings: (0..slots).map(|_| OnceLock::new()).collect(),
            values: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &ModelParams {
        &self.model
    }

    pub fn basis(&self, t: i64) -> Result<&SliceBasis> {
        self.model.check_time(t)?;
        let slot = &self.bases[t as usize];
        if let Some(b) = slot.get() {
            return Ok(b);
        }
        let b = SliceBasis::new(&self.model, t)?;
        Ok(slot.get_or_init(|| b))
    }

    /// `H_k^t(x)` for every `k = 0 ..= M_t`; `x` must lie in the support.
    pub fn hahn_values(&self, t: i64, x: i64) -> Result<Arc<Vec<Rational>>> {
        if let Some(v) = self.values.lock().unwrap().get(&(x, t)) {
            return Ok(v.clone());
        }
        let sp = self.basis(t)?.params;
        let v = Arc::new(hahn_q_all(sp.local(x), sp.hahn())?);
        self.values.lock().unwrap().insert((x, t), v.clone());
        Ok(v)
    }

    /// `q_i^t` for `i = 0 ..= min(M_t, M_{t+1})`.
    pub fn couplings(&self, t: i64) -> Result<&[Rational]> {
        if t < 0 || t >= self.model.horizon as i64 {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: self.model.horizon as i64,
            });
        }
        let slot = &self.couplings[t as usize];
        if let Some(q) = slot.get() {
            return Ok(q);
        }
        let a = self.basis(t)?;
        let b = self.basis(t + 1)?;
        let top = a.params.m.min(b.params.m);
        let q = (0..=top)
            .map(|i| coupling_q(&self.model, t, i, &a.norms[i as usize], &b.norms[i as usize]))
            .collect::<Result<Vec<_>>>()?;
        Ok(slot.get_or_init(|| q))
    }

    /// Entry of the extended kernel in the rational gauge.
    pub fn kernel_rational(&self, p: Point, q: Point) -> Result<Rational> {
        let ((x, s), (y, t)) = (p, q);
        self.model.check_time(s)?;
        self.model.check_time(t)?;
        if !self.model.in_support(s, x) || !self.model.in_support(t, y) {
            return Ok(Rational::zero());
        }
        let n = self.model.paths as i64;
        let hx = self.hahn_values(s, x)?;
        let hy = self.hahn_values(t, y)?;
        let mut acc = Rational::zero();
        if s == t {
            let norms = &self.basis(t)?.norms;
            for i in 0..n.min(norms.len() as i64) {
                let i = i as usize;
                acc += &hx[i] * &hy[i] / &norms[i];
            }
        } else if s < t {
            // tail sum over i >= N, truncated where some coupling vanishes
            let top = (s..=t).map(|j| self.basis(j).map(|b| b.params.m)).collect::<Result<Vec<_>>>()?;
            let top = *top.iter().min().unwrap();
            'tail: for i in n..=top {
                let mut rho = Rational::one();
                for j in s..t {
                    let q = &self.couplings(j)?[i as usize];
                    if q.is_zero() {
                        continue 'tail;
                    }
                    rho *= q;
                }
                for j in s + 1..t {
                    rho *= &self.basis(j)?.norms[i as usize];
                }
                acc -= rho * &hx[i as usize] * &hy[i as usize];
            }
        } else {
            for i in 0..n {
                let mut rho = Rational::one();
                for j in t..s {
                    let q = self.couplings(j)?.get(i as usize).cloned().unwrap_or_else(Rational::zero);
                    if q.is_zero() {
                        return Err(Error::GaugeSingular(format!(
                            "coupling {i} vanishes at t={j} in a backward kernel entry"
                        )));
                    }
                    rho *= q;
                }
                for j in t..=s {
                    rho *= &self.basis(j)?.norms[i as usize];
                }
                acc += &hx[i as usize] * &hy[i as usize] / rho;
            }
        }
        Ok(acc * weight(&self.model, t, y))
    }

    /// `E(x,s)^2 / E(y,t)^2`, the radicand relating the two gauges.
    pub fn gauge_ratio(&self, p: Point, q: Point) -> Rational {
        let ((x, s), (y, t)) = (p, q);
        let mut r = weight(&self.model, s, x) / weight(&self.model, t, y);
        for j in s.min(t)..s.max(t) {
            let d = rat(coupling_denominator(&self.model, j));
            if s > t {
                r *= d;
            } else {
                r /= d;
            }
        }
        r
    }

    /// Extended kernel `K(x,s; y,t)` exactly. For `s = t` this is the static
    /// kernel; for `s < t` the tail sum over indices `>= N`; for `s > t` the
    /// head sum with inverse couplings.
    pub fn extended_kernel(&self, p: Point, q: Point) -> Result<SqrtRational> {
        let k = self.kernel_rational(p, q)?;
        if k.is_zero() {
            return Ok(SqrtRational::zero());
        }
        Ok(SqrtRational::new(k, self.gauge_ratio(p, q)))
    }

    pub fn extended_kernel_f64(&self, p: Point, q: Point) -> Result<f64> {
        Ok(self.extended_kernel(p, q)?.to_f64())
    }

    pub fn static_kernel(&self, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
        self.extended_kernel((x, t), (y, t))
    }

    /// `-sum_{i >= N} f_i^t(x) f_i^t(y)`, summed directly.
    pub fn complementary_kernel(&self, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
        if !self.model.in_support(t, x) || !self.model.in_support(t, y) {
            return Ok(SqrtRational::zero());
        }
        let norms = &self.basis(t)?.norms;
        let hx = self.hahn_values(t, x)?;
        let hy = self.hahn_values(t, y)?;
        let mut acc = Rational::zero();
        for i in self.model.paths..norms.len() {
            acc -= &hx[i] * &hy[i] / &norms[i];
        }
        let w = weight(&self.model, t, y);
        Ok(SqrtRational::new(acc * &w, weight(&self.model, t, x) / w))
    }

    pub fn kernel_matrix(&self, points: &[Point], backend: NumericBackend) -> Result<KernelMatrix> {
        backend.validate()?;
        let n = points.len();
        let mut exact = Matrix::zeros(n, n);
        let mut values = Matrix::zeros(n, n);
        for (i, &p) in points.iter().enumerate() {
            for (j, &q) in points.iter().enumerate() {
                let k = self.kernel_rational(p, q)?;
                if !k.is_zero() {
                    values[(i, j)] = SqrtRational::new(k.clone(), self.gauge_ratio(p, q)).to_f64();
                }
                exact[(i, j)] = k;
            }
        }
        Ok(KernelMatrix {
            points: points.to_vec(),
            values,
            exact: matches!(backend, NumericBackend::Exact).then_some(exact),
            backend,
        })
    }

    /// Rational-gauge kernel on all sites, for many queries on one model.
    pub fn full_matrix(&self) -> Result<(Vec<Point>, Matrix<Rational>)> {
        let sites = self.model.sites();
        let mut m = Matrix::zeros(sites.len(), sites.len());
        for (i, &p) in sites.iter().enumerate() {
            for (j, &q) in sites.iter().enumerate() {
                m[(i, j)] = self.kernel_rational(p, q)?;
            }
        }
        Ok((sites, m))
    }

    /// Exact correlation `P(all query points occupied)`.
    pub fn correlation(&self, query: &CorrelationQuery) -> Result<Rational> {
        let m = Matrix::from_fn(query.points.len(), query.points.len(), |_, _| Rational::zero());
        let mut m = m;
        for (i, &p) in query.points.iter().enumerate() {
            for (j, &q) in query.points.iter().enumerate() {
                m[(i, j)] = self.kernel_rational(p, q)?;
            }
        }
        Ok(m.det())
    }

    /// Binary64 correlation with a conditioning report.
    pub fn correlation_f64(&self, query: &CorrelationQuery) -> Result<DetReport> {
        let km = self.kernel_matrix(&query.points, NumericBackend::float())?;
        Ok(det_with_report(&km.values))
    }

    /// `K_rat(s, t) - R_s ... R_{t-1} (K_rat(t, t) - I)` on `X_s x X_t`, which
    /// vanishes identically.
    pub fn factorization_residual(&self, s: i64, t: i64) -> Result<Matrix<Rational>> {
        if s >= t {
            return Err(Error::InvalidTimes { start: s, end: t });
        }
        let xs: Vec<i64> = self.model.support(s).collect();
        let xt: Vec<i64> = self.model.support(t).collect();
        let mut prod: Matrix<Rational> = Matrix::identity(xs.len());
        for h in s..t {
            prod = prod.matmul(&bidiagonal_transfer(&self.model, h));
        }
        let static_t = Matrix::from_fn(xt.len(), xt.len(), |i, j| {
            self.kernel_rational((xt[i], t), (xt[j], t)).unwrap()
        });
        let rhs = prod.matmul(&static_t.sub(&Matrix::identity(xt.len())));
        let lhs = Matrix::from_fn(xs.len(), xt.len(), |i, j| {
            self.kernel_rational((xs[i], s), (xt[j], t)).unwrap()
        });
        Ok(lhs.sub(&rhs))
    }
}

/// Integer transfer matrix `X_h x X_{h+1}` of the rational gauge.
pub fn bidiagonal_transfer(model: &ModelParams, h: i64) -> Matrix<Rational> {
    let (n, s, tt) = model.nst();
    let a: Vec<i64> = model.support(h).collect();
    let b: Vec<i64> = model.support(h + 1).collect();
    Matrix::from_fn(a.len(), b.len(), |i, j| {
        let (x, y) = (a[i], b[j]);
        if y == x + 1 {
            rat(s + n - 1 - x)
        } else if y == x {
            rat(tt - h - s + x)
        } else {
            Rational::zero()
        }
    })
}

/// Conjugates kernel values by `F(x,s) / F(y,t)`.
pub fn gauge_transform<T: Scalar>(
    values: &Matrix<T>,
    points: &[Point],
    f: impl Fn(Point) -> T,
) -> Result<Matrix<T>> {
    let fs: Vec<T> = points.iter().map(|&p| f(p)).collect();
    if let Some(i) = fs.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroGauge {
            x: points[i].0,
            t: points[i].1,
        });
    }
    Ok(Matrix::from_fn(values.rows(), values.cols(), |i, j| {
        values[(i, j)].clone() * fs[i].clone() / fs[j].clone()
    }))
}

/// Static kernel as a one-off call.
pub fn static_kernel(model: &ModelParams, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
    Ensemble::new(*model).static_kernel(t, x, y)
}

/// Complementary kernel as a one-off call.
pub fn complementary_kernel(model: &ModelParams, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
    Ensemble::new(*model).complementary_kernel(t, x, y)
}

/// Extended kernel as a one-off call.
pub fn extended_kernel(model: &ModelParams, p: Point, q: Point) -> Result<SqrtRational> {
    Ensemble::new(*model).extended_kernel(p, q)
}

/// Correlation as a one-off call.
pub fn correlation(model: &ModelParams, points: &[Point]) -> Result<Rational> {
    let q = CorrelationQuery::new(model, points.to_vec())?;
    Ensemble::new(*model).correlation(&q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{OracleTable, DEFAULT_ENUMERATION_CAP};
    use crate::scalar::frac;

    fn model(n: usize, s: usize, t: usize) -> ModelParams {
        ModelParams::new(n, s, t).unwrap()
    }

    fn sweep() -> impl Iterator<Item = ModelParams> {
        (1..=3).flat_map(|n| (1..=6).flat_map(move |tt| (0..=tt).map(move |s| model(n, s, tt))))
    }

    #[test]
    fn static_examples() {
        let m = model(1, 1, 2);
        assert_eq!(static_kernel(&m, 1, 0, 0).unwrap().as_rational(), Some(frac(1, 2)));
        let m = model(3, 2, 5);
        for x in 0..3 {
            assert_eq!(static_kernel(&m, 0, x, x).unwrap().as_rational(), Some(rat(1)));
        }
        assert_eq!(correlation(&model(1, 1, 2), &[(0, 1)]).unwrap(), frac(1, 2));
        assert_eq!(correlation(&model(2, 1, 2), &[(0, 1), (2, 1)]).unwrap(), frac(1, 3));
        assert_eq!(correlation(&m, &[]).unwrap(), rat(1));
        assert_eq!(correlation(&m, &[(1, 0)]).unwrap(), rat(1));
    }

    #[test]
    fn projection_trace_and_complement() {
        for m in sweep() {
            let e = Ensemble::new(m);
            for t in 0..=m.horizon as i64 {
                let xs: Vec<i64> = m.support(t).collect();
                let k = Matrix::from_fn(xs.len(), xs.len(), |i, j| {
                    e.kernel_rational((xs[i], t), (xs[j], t)).unwrap()
                });
                assert_eq!(k.matmul(&k), k, "{m:?} t={t}");
                let trace: Rational = (0..xs.len()).map(|i| k[(i, i)].clone()).sum();
                assert_eq!(trace, rat(m.paths as i64));
                for &x in &xs {
                    for &y in &xs {
                        let kv = e.static_kernel(t, x, y).unwrap();
                        assert!(kv.same_value(&e.static_kernel(t, y, x).unwrap()));
                        let comp = e.complementary_kernel(t, x, y).unwrap();
                        // K - delta = complementary, compared in the rational gauge
                        let want = k[((x - xs[0]) as usize, (y - xs[0]) as usize)].clone()
                            - if x == y { rat(1) } else { rat(0) };
                        let got = SqrtRational::new(want, e.gauge_ratio((x, t), (y, t)));
                        assert!(comp.same_value(&got));
                        if xs.len() == m.paths {
                            assert!(comp.is_zero());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn two_point_correlations_match_oracle_on_small_models() {
        for m in [model(2, 1, 3), model(2, 2, 4), model(3, 2, 4), model(1, 3, 5)] {
            let table = OracleTable::build(m, DEFAULT_ENUMERATION_CAP).unwrap();
            let e = Ensemble::new(m);
            let (sites, k) = e.full_matrix().unwrap();
            for i in 0..sites.len() {
                assert_eq!(k[(i, i)], table.density(sites[i]));
                for j in 0..i {
                    let minor = k.select(&[i, j], &[i, j]).det();
                    assert_eq!(minor, table.pair(sites[i], sites[j]), "{m:?} {:?} {:?}", sites[i], sites[j]);
                }
            }
        }
    }

    #[test]
    fn factorization_holds() {
        for m in sweep() {
            let e = Ensemble::new(m);
            for s in 0..m.horizon as i64 {
                for t in s + 1..=m.horizon as i64 {
                    let r = e.factorization_residual(s, t).unwrap();
                    assert!((0..r.rows()).all(|i| (0..r.cols()).all(|j| r[(i, j)].is_zero())), "{m:?} {s} {t}");
                }
            }
        }
    }

    #[test]
    fn gauge_invariance() {
        let m = model(2, 2, 4);
        let e = Ensemble::new(m);
        let pts = vec![(1, 1), (2, 3), (0, 2)];
        let km = e.kernel_matrix(&pts, NumericBackend::Exact).unwrap();
        let exact = km.exact.unwrap();
        let base = exact.det();
        let pow2 = gauge_transform(&exact, &pts, |(_, t)| rat(1 << t)).unwrap();
        let sign = gauge_transform(&exact, &pts, |(x, _)| rat(if x % 2 == 0 { 1 } else { -1 })).unwrap();
        assert_eq!(pow2.det(), base);
        assert_eq!(sign.det(), base);
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let a = pts[i];
                let b = pts[j];
                let ab = exact.select(&[i, j], &[i, j]);
                assert_eq!(pow2.select(&[i, j], &[i, j]).det(), ab.det(), "{a:?} {b:?}");
            }
        }
        let ident = gauge_transform(&km.values, &pts, |_| 1.0).unwrap();
        assert_eq!(ident, km.values);
        assert!(matches!(
            gauge_transform(&km.values, &pts, |(x, _)| x as f64),
            Err(Error::ZeroGauge { x: 0, t: 2 })
        ));
        let report = e.correlation_f64(&CorrelationQuery::new(&m, pts.clone()).unwrap()).unwrap();
        assert!((report.value - base.to_f64()).abs() < 1e-12);
    }

    #[test]
    fn time_reversal_symmetry() {
        for m in [model(2, 1, 4), model(3, 2, 5), model(2, 4, 6)] {
            let e = Ensemble::new(m);
            let (n, s, tt) = m.nst();
            let flip = |(x, t): Point| (s + n - 1 - x, tt - t);
            let sites = m.sites();
            for (i, &p) in sites.iter().enumerate() {
                for &q in &sites[..i] {
                    let a = e.correlation(&CorrelationQuery { points: vec![p, q] }).unwrap();
                    let b = e.correlation(&CorrelationQuery { points: vec![flip(p), flip(q)] }).unwrap();
                    assert_eq!(a, b);
                }
            }
        }
    }

    #[test]
    fn float_kernel_matches_exact_kernel() {
        let m = model(3, 3, 7);
        let e = Ensemble::new(m);
        let pts = vec![(2, 3), (3, 4), (1, 2), (4, 5)];
        let km = e.kernel_matrix(&pts, NumericBackend::float()).unwrap();
        assert!(km.exact.is_none());
        for (i, &p) in pts.iter().enumerate() {
            for (j, &q) in pts.iter().enumerate() {
                let v = e.extended_kernel(p, q).unwrap().to_f64();
                assert!((km.values[(i, j)] - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn duplicate_points_rejected() {
        let m = model(1, 1, 2);
        assert!(CorrelationQuery::new(&m, vec![(0, 1), (0, 1)]).is_err());
        assert!(CorrelationQuery::new(&m, vec![(0, 9)]).is_err());
    }
}
