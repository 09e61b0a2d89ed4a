//! The Markov chain of slices: one-time laws, one-step transitions, the
//! coupling coefficients between neighbouring Hahn bases and an exact sampler.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{Configuration, ModelParams, Step};
use crate::error::{Error, Result};
use crate::hahn::{hahn_norms, hahn_q, slice_params, weight, HahnParams, SliceParams};
use crate::linalg::Matrix;
use crate::radical::SqrtRational;
use crate::scalar::{exact_sqrt, frac, pochhammer, rat, Scalar};
use crate::Rational;

/// Largest path count the subset sampler accepts.
pub const SAMPLER_MAX_PATHS: usize = 20;

/// `D_t = (t+N)(T+N-t-1)`, the common denominator of the coupling data.
pub fn coupling_denominator(model: &ModelParams, t: i64) -> i64 {
    let (n, _, tt) = model.nst();
    (t + n) * (tt + n - t - 1)
}

/// `(c_i^t)^2`, zero when either factor is negative.
pub fn coupling_c2(model: &ModelParams, t: i64, i: i64) -> Rational {
    let (n, _, tt) = model.nst();
    let a = t + n - i;
    let b = tt + n - t - 1 - i;
    if a < 0 || b < 0 {
        return Rational::zero();
    }
    frac(a * b, coupling_denominator(model, t))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingCoefficients {
    pub t: i64,
    /// `c_i^t` for `i = 0 ..= max(M_t, M_{t+1})`.
    pub values: Vec<f64>,
    #[serde(skip)]
    pub squares: Vec<Rational>,
}

impl CouplingCoefficients {
    pub fn new(model: &ModelParams, t: i64) -> Result<Self> {
        if t < 0 || t >= model.horizon as i64 {
            return Err(Error::TimeOutOfRange {
                t,
                horizon: model.horizon as i64,
            });
        }
        let top = slice_params(model, t)?.m.max(slice_params(model, t + 1)?.m);
        let squares: Vec<Rational> = (0..=top).map(|i| coupling_c2(model, t, i)).collect();
        let values = squares.iter().map(|s| s.to_f64().sqrt()).collect();
        Ok(Self { t, values, squares })
    }
}

/// Norm-free coupling `q_i^t = sqrt((t+N-i)(T+N-t-1-i) / (h_i^t h_i^{t+1}))`.
///
/// With `H_i^t(x) = Q_i(x - shift_t)` this satisfies
/// `c_i^t f_i^t(x) f_i^{t+1}(y) = q_i^t H_i^t(x) H_i^{t+1}(y) sqrt(w_t(x) w_{t+1}(y) / D_t)`.
/// The radicand is always a perfect square; anything else is reported.
pub fn coupling_q(model: &ModelParams, t: i64, i: i64, h_t: &Rational, h_next: &Rational) -> Result<Rational> {
    let c2 = coupling_c2(model, t, i);
    if c2.is_zero() {
        return Ok(Rational::zero());
    }
    let r = c2 * rat(coupling_denominator(model, t)) / (h_t * h_next);
    exact_sqrt(&r).ok_or_else(|| {
        Error::Inconsistent(format!("coupling radicand {r} at t={t}, i={i} is not a square"))
    })
}

/// Norms and polynomial values of one slice, evaluated on demand.
#[derive(Clone, Debug)]
pub struct SliceBasis {
    pub params: SliceParams,
    pub norms: Vec<Rational>,
}

impl SliceBasis {
    pub fn new(model: &ModelParams, t: i64) -> Result<Self> {
        let params = slice_params(model, t)?;
        let norms = hahn_norms(params.hahn())?;
        Ok(Self { params, norms })
    }

    pub fn h(&self, k: i64, x: i64) -> Result<Rational> {
        hahn_q(k, self.params.local(x), self.params.hahn())
    }
}

fn vandermonde(z: &[i64]) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..z.len() {
        for i in 0..j {
            acc *= z[j] - z[i];
        }
    }
    acc
}

fn check_config(model: &ModelParams, t: i64, z: &[i64]) -> Result<()> {
    model.check_time(t)?;
    if z.len() != model.paths {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: model.paths,
        });
    }
    let size = model.support_size(t);
    if size < model.paths {
        return Err(Error::SupportTooSmall {
            n: model.paths,
            size,
        });
    }
    Ok(())
}

/// Leading coefficient of `Q_k` as a polynomial in `x'`.
fn leading_coefficient(k: i64, p: HahnParams) -> Rational {
    pochhammer(k + p.alpha + p.beta + 1, k as usize)
        / (pochhammer(-p.m, k as usize) * pochhammer(p.alpha + 1, k as usize))
}

/// Partition function `sum_z prod (z_j - z_i)^2 prod w(z_i)` over increasing
/// `z`, from the norms of the monic Hahn polynomials.
pub fn slice_partition_from_norms(model: &ModelParams, t: i64) -> Result<Rational> {
    let basis = SliceBasis::new(model, t)?;
    let n = model.paths;
    if basis.norms.len() < n {
        return Err(Error::SupportTooSmall {
            n,
            size: basis.norms.len(),
        });
    }
    let p = basis.params.hahn();
    let mut z = Rational::one();
    for k in 0..n as i64 {
        let lc = leading_coefficient(k, p);
        z *= &basis.norms[k as usize] / (&lc * &lc);
    }
    Ok(z)
}

/// Same partition function by summing over every `N`-subset of the support.
pub fn slice_partition_by_subsets(model: &ModelParams, t: i64, cap: u64) -> Result<Rational> {
    let support: Vec<i64> = model.support(t).collect();
    let n = model.paths;
    let count = crate::combinatorics::binomial(support.len() as i64, n as i64);
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            count: count.to_string(),
            cap,
        });
    }
    let mut total = Rational::zero();
    if support.len() < n {
        return Ok(total);
    }
    let len = support.len();
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let z: Vec<i64> = idx.iter().map(|&i| support[i]).collect();
        total += unnormalised_slice_weight(model, t, &z);
        let Some(k) = (0..n).rev().find(|&k| idx[k] < len - n + k) else {
            return Ok(total);
        };
        idx[k] += 1;
        for j in k + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn unnormalised_slice_weight(model: &ModelParams, t: i64, z: &[i64]) -> Rational {
    let v = vandermonde(z);
    let mut acc = Rational::from_integer(&v * &v);
    for &x in z {
        acc *= weight(model, t, x);
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// `P_t(z)`, the probability that the slice at time `t` equals `z`.
pub fn slice_distribution(model: &ModelParams, t: i64, z: &[i64]) -> Result<Rational> {
    check_config(model, t, z)?;
    if !z.windows(2).all(|w| w[0] < w[1]) {
        return Ok(Rational::zero());
    }
    let num = unnormalised_slice_weight(model, t, z);
    if num.is_zero() {
        return Ok(num);
    }
    Ok(num / slice_partition_from_norms(model, t)?)
}

fn check_step(model: &ModelParams, t: i64, x: &[i64], y: &[i64]) -> Result<()> {
    if t < 0 || t >= model.horizon as i64 {
        return Err(Error::TimeOutOfRange {
            t,
            horizon: model.horizon as i64,
        });
    }
    for z in [x, y] {
        if z.len() != model.paths {
            return Err(Error::LengthMismatch {
                left: z.len(),
                right: model.paths,
            });
        }
    }
    Ok(())
}

/// One-step transition probability in product form.
pub fn transition_probability(model: &ModelParams, t: i64, x: &[i64], y: &[i64]) -> Result<Rational> {
    check_step(model, t, x, y)?;
    let (n, s, tt) = model.nst();
    if x.iter().zip(y).any(|(a, b)| !(0..=1).contains(&(b - a))) {
        return Ok(Rational::zero());
    }
    let vx = vandermonde(x);
    if vx.is_zero() {
        return Err(Error::InvalidQuery(format!("{x:?} is not strictly increasing")));
    }
    let mut num = vandermonde(y);
    for (a, b) in x.iter().zip(y) {
        num *= if b > a { n + s - a - 1 } else { a + tt - t - s };
    }
    let den = pochhammer(tt - t, n as usize) * Rational::from_integer(vx);
    Ok(Rational::from_integer(num) / den)
}

/// The same transition probability from an `N x N` determinant of the
/// bidiagonal one-step matrix:
/// `det[(S+N-x_i-1) [y_j = x_i+1] + (T-t-S+x_i) [y_j = x_i]] / (T-t)_N * V(y) / V(x)`.
pub fn transition_probability_det(model: &ModelParams, t: i64, x: &[i64], y: &[i64]) -> Result<Rational> {
    check_step(model, t, x, y)?;
    let (n, s, tt) = model.nst();
    let vx = vandermonde(x);
    if vx.is_zero() {
        return Err(Error::InvalidQuery(format!("{x:?} is not strictly increasing")));
    }
    let m = Matrix::from_fn(x.len(), y.len(), |i, j| {
        let mut v = 0;
        if y[j] == x[i] + 1 {
            v += s + n - x[i] - 1;
        }
        if y[j] == x[i] {
            v += tt - t - s + x[i];
        }
        rat(v)
    });
    let den = pochhammer(tt - t, n as usize) * Rational::from_integer(vx);
    Ok(m.det() * Rational::from_integer(vandermonde(y)) / den)
}

/// Square of the transition probability as produced by the space-time
/// structure: the minor of the transfer operator between the two slices,
/// conjugated by the one-time laws and divided by the product of the first
/// `N` squared couplings.
pub fn transition_probability_squared_em(model: &ModelParams, t: i64, x: &[i64], y: &[i64]) -> Result<Rational> {
    check_step(model, t, x, y)?;
    let px = slice_distribution(model, t, x)?;
    let py = slice_distribution(model, t + 1, y)?;
    if px.is_zero() || py.is_zero() {
        return Ok(Rational::zero());
    }
    let n = model.paths;
    // det of the transfer minor squared; each entry is +-sqrt(rational), and
    // the minor is bidiagonal in sorted coordinates, so expand it explicitly.
    let minor = Matrix::from_fn(n, n, |i, j| transfer_matrix(model, t, x[i], y[j]).unwrap_or_else(|_| SqrtRational::zero()));
    let det2 = sqrt_det_squared(&minor)?;
    let mut c2 = Rational::one();
    for i in 0..n as i64 {
        c2 *= coupling_c2(model, t, i);
    }
    if c2.is_zero() {
        return Err(Error::GaugeSingular(format!("vanishing coupling among the first N at t={t}")));
    }
    Ok(det2 * py / (px * c2))
}

/// Square of the determinant of a matrix of radicals, by Leibniz expansion
/// over the permutations with non-zero products. Only meant for the sparse
/// bidiagonal minors that occur here.
fn sqrt_det_squared(m: &Matrix<SqrtRational>) -> Result<Rational> {
    let n = m.rows();
    let mut terms: Vec<SqrtRational> = Vec::new();
    let mut perm: Vec<usize> = Vec::with_capacity(n);
    let mut used = vec![false; n];
    fn rec(
        m: &Matrix<SqrtRational>,
        row: usize,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        acc: SqrtRational,
        terms: &mut Vec<SqrtRational>,
    ) {
        let n = m.rows();
        if row == n {
            let inv = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            terms.push(if inv % 2 == 0 { acc } else { acc.scale(&rat(-1)) });
            return;
        }
        for j in 0..n {
            if used[j] || m[(row, j)].is_zero() {
                continue;
            }
            used[j] = true;
            perm.push(j);
            rec(m, row + 1, perm, used, acc.mul(&m[(row, j)]), terms);
            perm.pop();
            used[j] = false;
        }
    }
    rec(m, 0, &mut perm, &mut used, SqrtRational::rational(Rational::one()), &mut terms);
    // group the terms by radicand, summing coefficients
    let mut groups: Vec<(Rational, Rational)> = Vec::new();
    for term in terms {
        match groups.iter_mut().find(|(r, _)| r == term.radicand()) {
            Some((_, c)) => *c += term.coeff(),
            None => groups.push((term.radicand().clone(), term.coeff().clone())),
        }
    }
    groups.retain(|(_, c)| !c.is_zero());
    match groups.len() {
        0 => Ok(Rational::zero()),
        1 => Ok(&groups[0].1 * &groups[0].1 * &groups[0].0),
        _ => Err(Error::Inconsistent(
            "transfer minor mixes incommensurable radicals".into(),
        )),
    }
}

/// Transfer entry `v_{t,t+1}(x, y)` in closed bidiagonal form.
pub fn transfer_matrix(model: &ModelParams, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
    if t < 0 || t >= model.horizon as i64 {
        return Err(Error::TimeOutOfRange {
            t,
            horizon: model.horizon as i64,
        });
    }
    if !model.in_support(t, x) || !model.in_support(t + 1, y) {
        return Ok(SqrtRational::zero());
    }
    let (n, s, tt) = model.nst();
    let d = coupling_denominator(model, t);
    let r = if y == x + 1 {
        frac((s + n - x - 1) * (x + 1), d)
    } else if y == x {
        frac((tt - t - s + x) * (t + n - x), d)
    } else {
        return Ok(SqrtRational::zero());
    };
    Ok(SqrtRational::sqrt(r))
}

/// Transfer entry from the coupled basis expansion
/// `sum_k c_k^t f_k^t(x) f_k^{t+1}(y)`, kept exact.
pub fn transfer_matrix_series(model: &ModelParams, t: i64, x: i64, y: i64) -> Result<SqrtRational> {
    let a = SliceBasis::new(model, t)?;
    let b = SliceBasis::new(model, t + 1)?;
    transfer_series_with(model, &a, &b, x, y)
}

pub(crate) fn transfer_series_with(
    model: &ModelParams,
    a: &SliceBasis,
    b: &SliceBasis,
    x: i64,
    y: i64,
) -> Result<SqrtRational> {
    let t = a.params.t;
    if !a.params.contains(x) || !b.params.contains(y) {
        return Ok(SqrtRational::zero());
    }
    let top = a.params.m.min(b.params.m);
    let mut sum = Rational::zero();
    for k in 0..=top {
        let q = coupling_q(model, t, k, &a.norms[k as usize], &b.norms[k as usize])?;
        if q.is_zero() {
            continue;
        }
        sum += q * a.h(k, x)? * b.h(k, y)?;
    }
    let radicand = weight(model, t, x) * weight(model, t + 1, y) / rat(coupling_denominator(model, t));
    Ok(SqrtRational::new(sum, radicand))
}

/// All admissible successors of `x` with their transition probabilities.
pub fn successors(model: &ModelParams, t: i64, x: &[i64]) -> Result<Vec<(Vec<i64>, Rational)>> {
    let n = x.len();
    if n > SAMPLER_MAX_PATHS {
        return Err(Error::SamplerLimit {
            n,
            max: SAMPLER_MAX_PATHS,
        });
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let y: Vec<i64> = (0..n).map(|i| x[i] + ((mask >> i) & 1) as i64).collect();
        let p = transition_probability(model, t, x, &y)?;
        if !p.is_zero() {
            out.push((y, p));
        }
    }
    Ok(out)
}

/// A sampled path family, slice by slice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Trajectory {
    pub configurations: Vec<Configuration>,
}

impl Trajectory {
    /// Per-path step sequences (path `i` listed bottom to top).
    pub fn moves(&self) -> Vec<Vec<Step>> {
        let n = self.configurations.first().map_or(0, |c| c.positions.len());
        (0..n)
            .map(|i| {
                self.configurations
                    .windows(2)
                    .map(|w| {
                        if w[1].positions[i] > w[0].positions[i] {
                            Step::Up
                        } else {
                            Step::Flat
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn validate(&self, model: &ModelParams) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidQuery(msg));
        if self.configurations.len() != model.horizon + 1 {
            return bad(format!(
                "expected {} slices, found {}",
                model.horizon + 1,
                self.configurations.len()
            ));
        }
        for (t, c) in self.configurations.iter().enumerate() {
            if c.t != t as i64 || c.positions.len() != model.paths || !c.is_strictly_increasing() {
                return bad(format!("slice {t} is malformed"));
            }
            if c.positions.iter().any(|&x| !model.in_support(t as i64, x)) {
                return bad(format!("slice {t} leaves the support"));
            }
        }
        for w in self.configurations.windows(2) {
            if w[0]
                .positions
                .iter()
                .zip(&w[1].positions)
                .any(|(a, b)| !(0..=1).contains(&(b - a)))
            {
                return bad(format!("illegal step after t={}", w[0].t));
            }
        }
        if self.configurations[0].positions != model.start_positions()
            || self.configurations[model.horizon].positions != model.end_positions()
        {
            return bad("wrong endpoints".into());
        }
        Ok(())
    }
}

/// Exact sampler of uniformly random path families.
///
/// Randomness comes from ChaCha8 seeded with [`SeedableRng::seed_from_u64`],
/// which is specified independently of platform and word size. Every step
/// draws one uniform integer below the exact total weight of the successors,
/// so no floating-point rounding enters the law.
#[derive(Clone, Debug)]
pub struct Sampler {
    model: ModelParams,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(model: ModelParams, seed: u64) -> Result<Self> {
        if model.paths > SAMPLER_MAX_PATHS {
            return Err(Error::SamplerLimit {
                n: model.paths,
                max: SAMPLER_MAX_PATHS,
            });
        }
        Ok(Self {
            model,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn sample(&mut self) -> Trajectory {
        let model = self.model;
        let mut x = model.start_positions();
        let mut configurations = vec![Configuration::new(0, x.clone())];
        for t in 0..model.horizon as i64 {
            x = self.step(t, &x);
            configurations.push(Configuration::new(t + 1, x.clone()));
        }
        Trajectory { configurations }
    }

    fn step(&mut self, t: i64, x: &[i64]) -> Vec<i64> {
        let (n, s, tt) = self.model.nst();
        let len = x.len();
        let mut candidates: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
        for mask in 0u32..(1 << len) {
            let y: Vec<i64> = (0..len).map(|i| x[i] + ((mask >> i) & 1) as i64).collect();
            let mut factors = Vec::with_capacity(len * (len + 1) / 2);
            for j in 0..len {
                for i in 0..j {
                    factors.push(y[j] - y[i]);
                }
            }
            for (a, b) in x.iter().zip(&y) {
                factors.push(if b > a { n + s - a - 1 } else { a + tt - t - s });
            }
            if factors.iter().all(|&f| f > 0) {
                candidates.push((y, factors));
            }
        }
        debug_assert!(!candidates.is_empty());
        if candidates.len() == 1 {
            return candidates.pop().unwrap().0;
        }
        let small: Option<Vec<u128>> = candidates
            .iter()
            .map(|(_, f)| f.iter().try_fold(1u128, |acc, &v| acc.checked_mul(v as u128)))
            .collect();
        let pick = match small.and_then(|w| {
            let total = w.iter().try_fold(0u128, |acc, &v| acc.checked_add(v))?;
            Some((w, total))
        }) {
            Some((w, total)) => {
                let mut u = self.rng.gen_range(0..total);
                w.iter()
                    .position(|&v| {
                        if u < v {
                            true
                        } else {
                            u -= v;
                            false
                        }
                    })
                    .unwrap()
            }
            None => {
                let w: Vec<BigUint> = candidates
                    .iter()
                    .map(|(_, f)| f.iter().fold(BigUint::one(), |acc, &v| acc * v as u64))
                    .collect();
                let total: BigUint = w.iter().sum();
                let mut u = self.rng.gen_biguint_below(&total);
                w.iter()
                    .position(|v| {
                        if &u < v {
                            true
                        } else {
                            u -= v;
                            false
                        }
                    })
                    .unwrap()
            }
        };
        candidates.swap_remove(pick).0
    }
}

/// Convenience wrapper: one trajectory from a fresh sampler.
pub fn sample_trajectory(model: ModelParams, seed: u64) -> Result<Trajectory> {
    Ok(Sampler::new(model, seed)?.sample())
}

/// Occupation counts behind the empirical one-point densities,
/// indexed `[t][x - support_lo]` and returned as raw counts.
pub fn empirical_densities(model: ModelParams, seed: u64, samples: usize) -> Result<Vec<Vec<u64>>> {
    let mut sampler = Sampler::new(model, seed)?;
    let mut counts: Vec<Vec<u64>> = (0..=model.horizon as i64)
        .map(|t| vec![0; model.support_size(t)])
        .collect();
    for _ in 0..samples {
        let traj = sampler.sample();
        for c in &traj.configurations {
            let lo = *model.support(c.t).start();
            for &x in &c.positions {
                counts[c.t as usize][(x - lo) as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Rounds a probability for reporting; exact values stay rational elsewhere.
pub fn to_probability_f64(p: &Rational) -> f64 {
    Scalar::to_f64(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{enumerate_path_families, OracleTable, DEFAULT_ENUMERATION_CAP};
    use std::collections::HashMap;

    fn model(n: usize, s: usize, t: usize) -> ModelParams {
        ModelParams::new(n, s, t).unwrap()
    }

    fn sweep() -> impl Iterator<Item = ModelParams> {
        (1..=3).flat_map(|n| (1..=6).flat_map(move |tt| (0..=tt).map(move |s| model(n, s, tt))))
    }

    fn slice_law(m: &ModelParams, t: i64) -> HashMap<Vec<i64>, Rational> {
        let fams = enumerate_path_families(*m).unwrap();
        let total = rat(fams.len() as i64);
        let mut law: HashMap<Vec<i64>, Rational> = HashMap::new();
        for f in &fams {
            *law.entry(f.slice(t as usize).positions).or_insert_with(Rational::zero) += Rational::one() / &total;
        }
        law
    }

    #[test]
    fn coupling_examples() {
        let m = model(1, 1, 2);
        assert_eq!(coupling_c2(&m, 0, 0), rat(1));
        assert_eq!(coupling_c2(&m, 0, 1), rat(0));
        let cc = CouplingCoefficients::new(&m, 0).unwrap();
        assert!(cc.values.iter().all(|v| (0.0..=1.0).contains(v)));
        // both factors negative still maps to zero
        assert_eq!(coupling_c2(&model(1, 0, 2), 1, 5), rat(0));
    }

    #[test]
    fn slice_distribution_examples() {
        let m = model(1, 1, 2);
        assert_eq!(slice_distribution(&m, 1, &[0]).unwrap(), frac(1, 2));
        assert_eq!(slice_distribution(&m, 1, &[1]).unwrap(), frac(1, 2));
        let m = model(2, 1, 2);
        for z in [[0, 1], [1, 2], [0, 2]] {
            assert_eq!(slice_distribution(&m, 1, &z).unwrap(), frac(1, 3));
        }
        assert_eq!(slice_distribution(&m, 0, &[0, 1]).unwrap(), rat(1));
        assert_eq!(slice_distribution(&model(3, 0, 2), 1, &[0, 1, 2]).unwrap(), rat(1));
    }

    #[test]
    fn partition_functions_agree_and_laws_match_oracle() {
        for m in sweep() {
            for t in 0..=m.horizon as i64 {
                assert_eq!(
                    slice_partition_from_norms(&m, t).unwrap(),
                    slice_partition_by_subsets(&m, t, DEFAULT_ENUMERATION_CAP).unwrap(),
                    "{m:?} t={t}"
                );
                let law = slice_law(&m, t);
                for (z, p) in &law {
                    assert_eq!(&slice_distribution(&m, t, z).unwrap(), p);
                }
                let total: Rational = law.keys().map(|z| slice_distribution(&m, t, z).unwrap()).sum();
                assert_eq!(total, rat(1));
            }
        }
    }

    #[test]
    fn transition_examples() {
        let m = model(1, 1, 2);
        assert_eq!(transition_probability(&m, 0, &[0], &[1]).unwrap(), frac(1, 2));
        assert_eq!(transition_probability(&m, 0, &[0], &[0]).unwrap(), frac(1, 2));
        assert_eq!(transition_probability(&m, 0, &[0], &[2]).unwrap(), rat(0));
    }

    #[test]
    fn transitions_sum_to_one_match_determinant_and_oracle() {
        for m in sweep() {
            let fams = enumerate_path_families(m).unwrap();
            for t in 0..m.horizon as i64 {
                let mut joint: HashMap<(Vec<i64>, Vec<i64>), i64> = HashMap::new();
                let mut marg: HashMap<Vec<i64>, i64> = HashMap::new();
                for f in &fams {
                    let x = f.slice(t as usize).positions;
                    let y = f.slice(t as usize + 1).positions;
                    *joint.entry((x.clone(), y)).or_default() += 1;
                    *marg.entry(x).or_default() += 1;
                }
                for (x, cnt) in &marg {
                    let succ = successors(&m, t, x).unwrap();
                    let total: Rational = succ.iter().map(|(_, p)| p.clone()).sum();
                    assert_eq!(total, rat(1));
                    for (y, p) in &succ {
                        let want = frac(*joint.get(&(x.clone(), y.clone())).unwrap_or(&0), *cnt);
                        assert_eq!(p, &want, "{m:?} t={t} {x:?}->{y:?}");
                        assert_eq!(&transition_probability_det(&m, t, x, y).unwrap(), p);
                        assert_eq!(transition_probability_squared_em(&m, t, x, y).unwrap(), p * p);
                    }
                }
            }
        }
    }

    #[test]
    fn chapman_kolmogorov() {
        for m in sweep() {
            for t in 0..m.horizon as i64 {
                let now = slice_law(&m, t);
                let next = slice_law(&m, t + 1);
                let mut pushed: HashMap<Vec<i64>, Rational> = HashMap::new();
                for (x, px) in &now {
                    for (y, p) in successors(&m, t, x).unwrap() {
                        *pushed.entry(y).or_insert_with(Rational::zero) += px * p;
                    }
                }
                assert_eq!(pushed, next, "{m:?} t={t}");
            }
        }
    }

    #[test]
    fn transfer_examples_and_series() {
        let m = model(1, 1, 2);
        assert_eq!(transfer_matrix(&m, 0, 0, 1).unwrap(), SqrtRational::sqrt(frac(1, 2)));
        assert!(transfer_matrix(&m, 0, 0, 3).unwrap().is_zero());
        for m in sweep() {
            for t in 0..m.horizon as i64 {
                let a = SliceBasis::new(&m, t).unwrap();
                let b = SliceBasis::new(&m, t + 1).unwrap();
                for x in a.params.support() {
                    let mut row = Rational::zero();
                    for y in b.params.support_lo - 1..=b.params.support_hi + 1 {
                        let closed = transfer_matrix(&m, t, x, y).unwrap();
                        let series = transfer_series_with(&m, &a, &b, x, y).unwrap();
                        assert!(closed.same_value(&series), "{m:?} t={t} x={x} y={y}: {closed} vs {series}");
                        row += closed.square();
                    }
                    assert!(row <= rat(1));
                }
            }
        }
    }

    #[test]
    fn forced_samples() {
        let m = model(3, 0, 4);
        let a = sample_trajectory(m, 1).unwrap();
        let b = sample_trajectory(m, 99).unwrap();
        assert_eq!(a, b);
        assert!(a.moves().iter().flatten().all(|s| *s == Step::Flat));
        let m = model(2, 3, 3);
        let a = sample_trajectory(m, 5).unwrap();
        assert!(a.moves().iter().flatten().all(|s| *s == Step::Up));
        a.validate(&m).unwrap();
    }

    #[test]
    fn sampler_is_deterministic_and_close_to_uniform() {
        let m = model(2, 2, 4);
        let fams = enumerate_path_families(m).unwrap();
        let mut s1 = Sampler::new(m, 42).unwrap();
        let mut s2 = Sampler::new(m, 42).unwrap();
        let mut counts: HashMap<Vec<Vec<Step>>, u64> = HashMap::new();
        let runs = 40_000;
        for _ in 0..runs {
            let a = s1.sample();
            assert_eq!(a, s2.sample());
            a.validate(&m).unwrap();
            *counts.entry(a.moves()).or_default() += 1;
        }
        assert_eq!(counts.len(), fams.len());
        let p = 1.0 / fams.len() as f64;
        let sigma = (runs as f64 * p * (1.0 - p)).sqrt();
        for c in counts.values() {
            assert!((*c as f64 - runs as f64 * p).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn empirical_density_matches_oracle() {
        let m = model(1, 1, 2);
        let runs = 100_000;
        let counts = empirical_densities(m, 7, runs).unwrap();
        let sigma = (runs as f64 * 0.25).sqrt();
        assert!((counts[1][0] as f64 - runs as f64 / 2.0).abs() < 3.0 * sigma);
        let table = OracleTable::build(m, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(table.density((0, 1)), frac(1, 2));
    }

    #[test]
    fn sampler_limit_is_signalled() {
        let m = model(21, 1, 2);
        assert!(matches!(Sampler::new(m, 0), Err(Error::SamplerLimit { .. })));
    }
}
