//! Hahn weights, polynomials and norms for the time slices of the path ensemble.
//!
//! At time `t` the occupied positions form a Hahn orthogonal polynomial
//! ensemble on `X_t = support_lo ..= support_hi`. The Hahn parameters
//! `(alpha, beta, M)` and the shift `x' = x - shift` depend on which of four
//! regimes `t` falls into relative to `S` and `T - S`.
//!
//! Weights are kept in the manifestly positive factorial form
//! `1 / (x! (t-x+N-1)! (S-x+N-1)! (T-t-S+x)!)`. In Hahn coordinates this is
//! `1 / (x'! (M-x')! (-alpha-1-x')! (-beta-1-M+x')!)`, which differs from the
//! classical Pochhammer weight `(alpha+1)_x' (beta+1)_{M-x'} / (x'! (M-x')!)`
//! by the constant `(-1)^M (-alpha-1)! (-beta-1)!`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::ModelParams;
use crate::error::{Error, Result};
use crate::radical::SqrtRational;
use crate::scalar::{factorial, pochhammer, rat, Scalar};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::I => "I",
            CaseTag::II => "II",
            CaseTag::III => "III",
            CaseTag::IV => "IV",
        };
        f.write_str(s)
    }
}

/// Hahn data of one time slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SliceParams {
    pub t: i64,
    pub case: CaseTag,
    pub alpha: i64,
    pub beta: i64,
    /// Support size minus one.
    pub m: i64,
    /// `x' = x - shift`.
    pub shift: i64,
    pub support_lo: i64,
    pub support_hi: i64,
}

impl SliceParams {
    pub fn hahn(&self) -> HahnParams {
        HahnParams {
            alpha: self.alpha,
            beta: self.beta,
            m: self.m,
        }
    }

    pub fn contains(&self, x: i64) -> bool {
        (self.support_lo..=self.support_hi).contains(&x)
    }

    pub fn local(&self, x: i64) -> i64 {
        x - self.shift
    }

    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        self.support_lo..=self.support_hi
    }
}

/// The `(alpha, beta, M)` triple of a Hahn family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HahnParams {
    pub alpha: i64,
    pub beta: i64,
    pub m: i64,
}

/// How numbers are produced for callers that do not want exact rationals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum NumericBackend {
    #[default]
    Exact,
    /// Binary64 output; `tol` is the tolerance used for self-checks.
    Float { tol: f64 },
}

impl NumericBackend {
    pub const DEFAULT_TOL: f64 = 1e-10;

    pub fn float() -> Self {
        NumericBackend::Float {
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NumericBackend::Float { tol } if !(tol > 0.0) => Err(Error::ParameterRegime(
                format!("float tolerance must be positive, got {tol}"),
            )),
            _ => Ok(()),
        }
    }
}

fn case_params(model: &ModelParams, t: i64, case: CaseTag) -> (i64, i64, i64, i64) {
    let (n, s, tt) = model.nst();
    // (M, alpha, beta, shift)
    match case {
        CaseTag::I => (t + n - 1, -s - n, s - tt - n, 0),
        CaseTag::II => (s + n - 1, -t - n, t - n - tt, 0),
        CaseTag::III => (tt - s + n - 1, -tt + t - n, -t - n, t + s - tt),
        CaseTag::IV => (tt - t + n - 1, -tt - n + s, -s - n, t + s - tt),
    }
}

fn admissible_cases(model: &ModelParams, t: i64) -> Vec<CaseTag> {
    let (_, s, tt) = model.nst();
    let mut out = Vec::new();
    if t <= s.min(tt - s) {
        out.push(CaseTag::I);
    }
    if s <= t && t <= tt - s {
        out.push(CaseTag::II);
    }
    if tt - s <= t && t <= s {
        out.push(CaseTag::III);
    }
    if t >= s.max(tt - s) {
        out.push(CaseTag::IV);
    }
    out
}

/// Hahn parameterisation of the slice at time `t`.
///
/// When several regimes apply at a boundary time the lowest-numbered one is
/// returned, after checking that every admissible regime induces the same
/// weight on the same support.
pub fn slice_params(model: &ModelParams, t: i64) -> Result<SliceParams> {
    model.check_time(t)?;
    let cases = admissible_cases(model, t);
    let support = model.support(t);
    let build = |case| {
        let (m, alpha, beta, shift) = case_params(model, t, case);
        SliceParams {
            t,
            case,
            alpha,
            beta,
            m,
            shift,
            support_lo: *support.start(),
            support_hi: *support.end(),
        }
    };
    let chosen = build(cases[0]);
    for &case in &cases {
        let other = build(case);
        if other.m != support.end() - support.start() || other.shift != *support.start() {
            return Err(Error::Inconsistent(format!(
                "case {case} at t={t} does not match the support {support:?}"
            )));
        }
        if other.hahn() != chosen.hahn() && !same_normalised_weights(&chosen, &other) {
            return Err(Error::Inconsistent(format!(
                "cases {} and {case} disagree at t={t}",
                chosen.case
            )));
        }
    }
    Ok(chosen)
}

fn same_normalised_weights(a: &SliceParams, b: &SliceParams) -> bool {
    let wa: Vec<Rational> = a.support().map(|x| hahn_weight(a.local(x), a.hahn())).collect();
    let wb: Vec<Rational> = b.support().map(|x| hahn_weight(b.local(x), b.hahn())).collect();
    let sa: Rational = wa.iter().sum();
    let sb: Rational = wb.iter().sum();
    wa.iter().zip(&wb).all(|(p, q)| p / &sa == q / &sb)
}

/// Factorial-form weight of the slice at time `t`; zero off the support.
pub fn weight(model: &ModelParams, t: i64, x: i64) -> Rational {
    if !model.in_support(t, x) {
        return Rational::zero();
    }
    let (n, s, tt) = model.nst();
    let denom = factorial(x as u64)
        * factorial((t - x + n - 1) as u64)
        * factorial((s - x + n - 1) as u64)
        * factorial((tt - t - s + x) as u64);
    BigRational::new(BigInt::one(), denom)
}

/// Positive Hahn weight `1 / (x'! (M-x')! (-alpha-1-x')! (-beta-1-M+x')!)`,
/// zero whenever a factorial argument is negative.
pub fn hahn_weight(xp: i64, p: HahnParams) -> Rational {
    let args = [xp, p.m - xp, -p.alpha - 1 - xp, -p.beta - 1 - p.m + xp];
    if args.iter().any(|&a| a < 0) {
        return Rational::zero();
    }
    let denom = args
        .iter()
        .fold(BigInt::one(), |acc, &a| acc * factorial(a as u64));
    BigRational::new(BigInt::one(), denom)
}

/// Classical Pochhammer-form Hahn weight `(alpha+1)_x' (beta+1)_{M-x'} / (x'! (M-x')!)`.
pub fn pochhammer_weight(xp: i64, p: HahnParams) -> Rational {
    if xp < 0 || xp > p.m {
        return Rational::zero();
    }
    pochhammer(p.alpha + 1, xp as usize) * pochhammer(p.beta + 1, (p.m - xp) as usize)
        / Rational::from_integer(factorial(xp as u64) * factorial((p.m - xp) as u64))
}

/// The constant `lambda` with `pochhammer_weight = lambda * hahn_weight`.
pub fn pochhammer_ratio(p: HahnParams) -> Rational {
    let sign = if p.m % 2 == 0 { 1 } else { -1 };
    Rational::from_integer(
        factorial((-p.alpha - 1) as u64) * factorial((-p.beta - 1) as u64) * sign,
    )
}

/// Hahn polynomial `Q_k(x'; alpha, beta, M)` by its terminating `3F2` series.
pub fn hahn_q<T: Scalar>(k: i64, xp: i64, p: HahnParams) -> Result<T> {
    if k < 0 || k > p.m {
        return Err(Error::DegenerateParameters(format!(
            "degree {k} outside 0..={}",
            p.m
        )));
    }
    let ab1 = k + p.alpha + p.beta + 1;
    let mut term = T::one();
    let mut sum = T::one();
    for i in 0..k {
        let num = [-k + i, -xp + i, ab1 + i];
        let den = [-p.m + i, p.alpha + 1 + i, i + 1];
        if num.contains(&0) {
            break;
        }
        if den.contains(&0) {
            return Err(Error::DegenerateParameters(format!(
                "zero lower Pochhammer at term {} of Q_{k}({xp}; {}, {}, {})",
                i + 1,
                p.alpha,
                p.beta,
                p.m
            )));
        }
        for v in num {
            term = term * T::from_i64(v);
        }
        for v in den {
            term = term / T::from_i64(v);
        }
        sum = sum + term.clone();
    }
    Ok(sum)
}

/// `Q_k` evaluated exactly and rounded once at the end.
pub fn hahn_q_f64(k: i64, xp: i64, p: HahnParams) -> Result<f64> {
    Ok(hahn_q::<Rational>(k, xp, p)?.to_f64())
}

/// `Q_0 .. Q_M` at one point, via the three-term recurrence in the degree.
///
/// Agrees exactly with [`hahn_q`] but costs `O(M)` instead of `O(M^2)`.
pub fn hahn_q_all(xp: i64, p: HahnParams) -> Result<Vec<Rational>> {
    let m = p.m;
    let mut out = Vec::with_capacity((m + 1) as usize);
    out.push(Rational::one());
    if m == 0 {
        return Ok(out);
    }
    out.push(hahn_q::<Rational>(1, xp, p)?);
    let ab = p.alpha + p.beta;
    for n in 1..m {
        // -x Q_n = A_n Q_{n+1} - (A_n + C_n) Q_n + C_n Q_{n-1}
        let a_num = (n + ab + 1) * (n + p.alpha + 1) * (m - n);
        let a_den = (2 * n + ab + 1) * (2 * n + ab + 2);
        let c_num = n * (n + ab + m + 1) * (n + p.beta);
        let c_den = (2 * n + ab) * (2 * n + ab + 1);
        if a_num == 0 || a_den == 0 || c_den == 0 {
            // Fall back to the series for the remaining degrees.
            for k in n + 1..=m {
                out.push(hahn_q::<Rational>(k, xp, p)?);
            }
            return Ok(out);
        }
        let a = Rational::new(BigInt::from(a_num), BigInt::from(a_den));
        let c = Rational::new(BigInt::from(c_num), BigInt::from(c_den));
        let qn = &out[n as usize];
        let qm = &out[(n - 1) as usize];
        let next = ((&a + &c) * qn - &c * qm - rat(xp) * qn) / &a;
        out.push(next);
    }
    Ok(out)
}

/// Classical closed-form squared norm against the Pochhammer weight.
pub fn pochhammer_norm2(k: i64, p: HahnParams) -> Result<Rational> {
    if k < 0 || k > p.m {
        return Err(Error::DegenerateParameters(format!(
            "degree {k} outside 0..={}",
            p.m
        )));
    }
    let ab1 = k + p.alpha + p.beta + 1;
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let num = pochhammer(ab1, (p.m + 1) as usize)
        * pochhammer(p.beta + 1, k as usize)
        * Rational::from_integer(factorial(k as u64) * sign);
    let den = rat(2 * k + p.alpha + p.beta + 1)
        * pochhammer(p.alpha + 1, k as usize)
        * pochhammer(-p.m, k as usize)
        * Rational::from_integer(factorial(p.m as u64));
    if den.is_zero() {
        return Err(Error::DegenerateParameters(format!(
            "norm of Q_{k} has a zero denominator for {p:?}"
        )));
    }
    Ok(num / den)
}

fn check_negative_regime(p: HahnParams) -> Result<()> {
    if p.m < 0 || -p.alpha - 1 < p.m || -p.beta - 1 < p.m {
        return Err(Error::ParameterRegime(format!(
            "need M <= -alpha-1 and M <= -beta-1, got {p:?}"
        )));
    }
    Ok(())
}

/// Squared norm of `Q_k` with respect to the positive factorial weight
/// [`hahn_weight`], from the closed form.
pub fn hahn_norm2(k: i64, p: HahnParams) -> Result<Rational> {
    check_negative_regime(p)?;
    let v = pochhammer_norm2(k, p)? / pochhammer_ratio(p);
    if !v.is_positive() {
        return Err(Error::ParameterRegime(format!(
            "non-positive squared norm {v} for degree {k}, {p:?}"
        )));
    }
    Ok(v)
}

/// `sum_x' hahn_weight(x') Q_k(x')^2`, the brute-force counterpart of [`hahn_norm2`].
pub fn hahn_norm2_direct(k: i64, p: HahnParams) -> Result<Rational> {
    let mut acc = Rational::zero();
    for xp in 0..=p.m {
        let q: Rational = hahn_q(k, xp, p)?;
        acc += hahn_weight(xp, p) * &q * &q;
    }
    Ok(acc)
}

/// All squared norms `0 ..= M` from the closed form, sharing the Pochhammer
/// products between degrees.
pub fn hahn_norms(p: HahnParams) -> Result<Vec<Rational>> {
    check_negative_regime(p)?;
    let mut out = Vec::with_capacity((p.m + 1) as usize);
    let first = hahn_norm2(0, p)?;
    out.push(first);
    let ab = p.alpha + p.beta;
    for k in 0..p.m {
        // ratio norm_{k+1} / norm_k of the closed form
        let num = -(k + ab + 2 + p.m)
            * (p.beta + 1 + k)
            * (k + 1)
            * (2 * k + ab + 1);
        let den = (k + ab + 1) * (2 * k + ab + 3) * (p.alpha + 1 + k) * (-p.m + k);
        if den == 0 {
            return Err(Error::DegenerateParameters(format!(
                "norm recursion hits a zero at degree {k} for {p:?}"
            )));
        }
        let next = &out[k as usize] * Rational::new(BigInt::from(num), BigInt::from(den));
        if !next.is_positive() {
            return Err(Error::ParameterRegime(format!(
                "non-positive squared norm at degree {}",
                k + 1
            )));
        }
        out.push(next);
    }
    Ok(out)
}

/// Orthonormal function `f_n^t(x) = H_n^t(x) sqrt(w_t(x) / (H_n^t, H_n^t))`,
/// zero off the support.
pub fn f(model: &ModelParams, n: i64, t: i64, x: i64) -> Result<SqrtRational> {
    let sp = slice_params(model, t)?;
    if n < 0 || n > sp.m {
        return Err(Error::DegenerateParameters(format!(
            "index {n} outside 0..={} at t={t}",
            sp.m
        )));
    }
    if !sp.contains(x) {
        return Ok(SqrtRational::zero());
    }
    let h: Rational = hahn_q(n, sp.local(x), sp.hahn())?;
    let norm = hahn_norm2(n, sp.hahn())?;
    Ok(SqrtRational::new(h, weight(model, t, x) / norm))
}

/// `f_n^t(x)` in binary64.
pub fn f_f64(model: &ModelParams, n: i64, t: i64, x: i64) -> Result<f64> {
    Ok(f(model, n, t, x)?.to_f64())
}

/// Left-minus-right of the two contiguous relations, at `x' = x - shift`:
///
/// `x Q_k(x-1; M-1) + (M-x) Q_k(x; M-1) - M Q_k(x; M)` and
/// `x Q_k(x-1; alpha+1, beta-1) - (x+alpha+1) Q_k(x; alpha+1, beta-1) + (alpha+1) Q_k(x; alpha, beta)`.
pub fn contiguous_relation_residuals(
    model: &ModelParams,
    t: i64,
    k: i64,
    x: i64,
) -> Result<(Rational, Rational)> {
    let sp = slice_params(model, t)?;
    let p = sp.hahn();
    let xp = sp.local(x);
    let lowered = HahnParams { m: p.m - 1, ..p };
    let shifted = HahnParams {
        alpha: p.alpha + 1,
        beta: p.beta - 1,
        ..p
    };
    let q = |k, x, p| hahn_q::<Rational>(k, x, p);

    let first = rat(xp) * q(k, xp - 1, lowered)? + rat(p.m - xp) * q(k, xp, lowered)?
        - rat(p.m) * q(k, xp, p)?;
    let second = rat(xp) * q(k, xp - 1, shifted)? - rat(xp + p.alpha + 1) * q(k, xp, shifted)?
        + rat(p.alpha + 1) * q(k, xp, p)?;
    Ok((first, second))
}

/// `sum_k pi_k Q_k(x) Q_k(y) - delta_{xy} / w(x)` with the Pochhammer weight `w`
/// and `pi_k` its reciprocal squared norm.
pub fn dual_orthogonality_residual(p: HahnParams, x: i64, y: i64) -> Result<Rational> {
    let mut acc = Rational::zero();
    for k in 0..=p.m {
        let norm = pochhammer_norm2(k, p)?;
        let qx: Rational = hahn_q(k, x, p)?;
        let qy: Rational = hahn_q(k, y, p)?;
        acc += qx * qy / norm;
    }
    if x == y {
        let w = pochhammer_weight(x, p);
        if w.is_zero() {
            return Err(Error::DegenerateParameters(format!(
                "Pochhammer weight vanishes at {x} for {p:?}"
            )));
        }
        acc -= Rational::one() / w;
    }
    Ok(acc)
}

/// `k(k+alpha+beta+1) Q_k(x') - [B Q_k(x'+1) - (B+D) Q_k(x') + D Q_k(x'-1)]`
/// with `B = (x'+alpha+1)(x'-M)` and `D = x'(x'-beta-M-1)`.
pub fn difference_relation_residual(
    model: &ModelParams,
    t: i64,
    k: i64,
    x: i64,
) -> Result<Rational> {
    let sp = slice_params(model, t)?;
    let p = sp.hahn();
    let xp = sp.local(x);
    let b = rat((xp + p.alpha + 1) * (xp - p.m));
    let d = rat(xp * (xp - p.beta - p.m - 1));
    let q = |x| hahn_q::<Rational>(k, x, p);
    let lhs = rat(k * (k + p.alpha + p.beta + 1)) * q(xp)?;
    let rhs = &b * q(xp + 1)? - (&b + &d) * q(xp)? + &d * q(xp - 1)?;
    Ok(lhs - rhs)
}
