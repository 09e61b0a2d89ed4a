//! Exact counting and brute-force enumeration of non-intersecting path families.
//!
//! Paths live on the `(t, x)` lattice. Path `i` (0-based) runs from `(0, i)` to
//! `(T, S + i)`; each unit time step is either flat (`x` unchanged) or up
//! (`x + 1`). The enumeration here is the ground truth every probabilistic
//! routine in the crate is checked against on small models.

use std::collections::HashMap;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bareiss_det, Matrix};
use crate::Rational;

/// Default ceiling on the number of families [`enumerate_path_families`] will materialise.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// The integer triple defining the path ensemble (equivalently, the hexagon).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of paths `N`.
    pub paths: usize,
    /// Terminal vertical shift `S` (up-steps per path).
    pub rise: usize,
    /// Time horizon `T`.
    pub horizon: usize,
}

impl ModelParams {
    pub fn new(paths: usize, rise: usize, horizon: usize) -> Result<Self> {
        if paths == 0 {
            return Err(Error::InvalidModel("need at least one path".into()));
        }
        if horizon == 0 {
            return Err(Error::InvalidModel("time horizon must be positive".into()));
        }
        if rise > horizon {
            return Err(Error::InvalidModel(format!(
                "rise {rise} exceeds horizon {horizon}"
            )));
        }
        Ok(Self {
            paths,
            rise,
            horizon,
        })
    }

    /// Hexagon with sides `a, b, c, a, b, c`: `a` paths, `b` up-steps each,
    /// `b + c` time steps.
    pub fn from_hexagon(a: usize, b: usize, c: usize) -> Result<Self> {
        Self::new(a, b, b + c)
    }

    /// `(N, S, T)` as signed integers for arithmetic.
    pub fn nst(&self) -> (i64, i64, i64) {
        (self.paths as i64, self.rise as i64, self.horizon as i64)
    }

    pub fn check_time(&self, t: i64) -> Result<()> {
        if (0..=self.horizon as i64).contains(&t) {
            Ok(())
        } else {
            Err(Error::TimeOutOfRange {
                t,
                horizon: self.horizon as i64,
            })
        }
    }

    /// Sites reachable at time `t`: `max(0, t+S-T) ..= min(t, S) + N - 1`.
    pub fn support(&self, t: i64) -> RangeInclusive<i64> {
        let (n, s, tt) = self.nst();
        0.max(t + s - tt)..=t.min(s) + n - 1
    }

    pub fn in_support(&self, t: i64, x: i64) -> bool {
        (0..=self.horizon as i64).contains(&t) && self.support(t).contains(&x)
    }

    pub fn support_size(&self, t: i64) -> usize {
        let r = self.support(t);
        (r.end() - r.start() + 1).max(0) as usize
    }

    pub fn start_positions(&self) -> Vec<i64> {
        (0..self.paths as i64).collect()
    }

    pub fn end_positions(&self) -> Vec<i64> {
        (0..self.paths as i64).map(|i| self.rise as i64 + i).collect()
    }

    /// Number of path families, by the binomial determinant.
    pub fn family_count(&self) -> BigInt {
        count_path_families(
            0,
            &self.start_positions(),
            self.horizon as i64,
            &self.end_positions(),
        )
        .expect("model endpoints are well formed")
    }

    /// All space-time sites `(x, t)` in time-major order.
    pub fn sites(&self) -> Vec<(i64, i64)> {
        (0..=self.horizon as i64)
            .flat_map(|t| self.support(t).map(move |x| (x, t)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step {
    Flat,
    Up,
}

/// `N` points occupied at a single time.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub t: i64,
    pub positions: Vec<i64>,
}

impl Configuration {
    pub fn new(t: i64, positions: Vec<i64>) -> Self {
        Self { t, positions }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.positions.windows(2).all(|w| w[0] < w[1])
    }

    pub fn contains(&self, x: i64) -> bool {
        self.positions.binary_search(&x).is_ok()
    }
}

/// A full family of `N` non-intersecting paths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PathFamily {
    pub model: ModelParams,
    /// `moves[i][t]` is the step of path `i` from time `t` to `t + 1`.
    pub moves: Vec<Vec<Step>>,
}

impl PathFamily {
    pub fn heights(&self, t: usize) -> Vec<i64> {
        self.moves
            .iter()
            .enumerate()
            .map(|(i, path)| i as i64 + path[..t].iter().filter(|&&s| s == Step::Up).count() as i64)
            .collect()
    }

    pub fn slice(&self, t: usize) -> Configuration {
        Configuration::new(t as i64, self.heights(t))
    }

    pub fn slices(&self) -> Vec<Configuration> {
        (0..=self.model.horizon).map(|t| self.slice(t)).collect()
    }

    /// Checks endpoints and non-intersection.
    pub fn validate(&self) -> Result<()> {
        let m = self.model;
        if self.moves.len() != m.paths || self.moves.iter().any(|p| p.len() != m.horizon) {
            return Err(Error::InvalidModel("move table has the wrong shape".into()));
        }
        for (i, path) in self.moves.iter().enumerate() {
            let ups = path.iter().filter(|&&s| s == Step::Up).count();
            if ups != m.rise {
                return Err(Error::InvalidModel(format!(
                    "path {i} has {ups} up-steps, expected {}",
                    m.rise
                )));
            }
        }
        for t in 0..=m.horizon {
            if !self.slice(t).is_strictly_increasing() {
                return Err(Error::InvalidModel(format!("paths intersect at time {t}")));
            }
        }
        Ok(())
    }
}

/// `C(n, k)`, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Binomial-determinant count of non-intersecting families joining
/// `(t1, starts[j])` to `(t2, ends[i])`: `det C(t2 - t1, ends[i] - starts[j])`.
pub fn count_path_families(t1: i64, starts: &[i64], t2: i64, ends: &[i64]) -> Result<BigInt> {
    if starts.len() != ends.len() {
        return Err(Error::LengthMismatch {
            left: starts.len(),
            right: ends.len(),
        });
    }
    if t2 <= t1 {
        return Err(Error::InvalidTimes { start: t1, end: t2 });
    }
    let n = starts.len();
    let m = Matrix::from_fn(n, n, |i, j| binomial(t2 - t1, ends[i] - starts[j]));
    Ok(bareiss_det(&m))
}

/// Every family of the model, in lexicographic order of move sequences
/// (time-major, path-minor, flat before up).
pub fn enumerate_path_families(model: ModelParams) -> Result<Vec<PathFamily>> {
    enumerate_path_families_capped(model, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_path_families_capped(model: ModelParams, cap: u64) -> Result<Vec<PathFamily>> {
    let count = model.family_count();
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            count: count.to_string(),
            cap,
        });
    }
    let mut out = Vec::with_capacity(count.to_usize().unwrap_or(0));
    let n = model.paths;
    let mut moves = vec![Vec::with_capacity(model.horizon); n];
    let start = model.start_positions();
    descend(&model, 0, &start, &mut moves, &mut out);
    debug_assert_eq!(BigInt::from(out.len()), count);
    Ok(out)
}

fn descend(
    model: &ModelParams,
    t: usize,
    heights: &[i64],
    moves: &mut [Vec<Step>],
    out: &mut Vec<PathFamily>,
) {
    if t == model.horizon {
        out.push(PathFamily {
            model: *model,
            moves: moves.to_vec(),
        });
        return;
    }
    let n = heights.len();
    let remaining = (model.horizon - t - 1) as i64;
    let rise = model.rise as i64;
    // Subsets in lexicographic order with path 0 as the most significant digit.
    for mask in 0..(1u64 << n) {
        let mut next = Vec::with_capacity(n);
        let mut ok = true;
        for (i, &height) in heights.iter().enumerate() {
            let up = (mask >> (n - 1 - i)) & 1 == 1;
            let h = height + up as i64;
            let target = rise + i as i64;
            if h > target || target - h > remaining || next.last().is_some_and(|&p| p >= h) {
                ok = false;
                break;
            }
            next.push(h);
        }
        if !ok {
            continue;
        }
        for (i, path) in moves.iter_mut().enumerate() {
            let up = (mask >> (n - 1 - i)) & 1 == 1;
            path.push(if up { Step::Up } else { Step::Flat });
        }
        descend(model, t + 1, &next, moves, out);
        for path in moves.iter_mut() {
            path.pop();
        }
    }
}

/// Exact probability that every `(x, t)` in `query` is occupied, by enumeration.
pub fn oracle_correlation(model: ModelParams, query: &[(i64, i64)]) -> Result<Rational> {
    let families = enumerate_path_families(model)?;
    Ok(oracle_fraction(&families, query))
}

fn oracle_fraction(families: &[PathFamily], query: &[(i64, i64)]) -> Rational {
    let hits = families
        .iter()
        .filter(|f| {
            query.iter().all(|&(x, t)| {
                usize::try_from(t)
                    .ok()
                    .filter(|&t| t <= f.model.horizon)
                    .is_some_and(|t| f.slice(t).contains(x))
            })
        })
        .count();
    BigRational::new(BigInt::from(hits), BigInt::from(families.len()))
}

/// Enumerated families with precomputed one- and two-point occupation counts
/// over all space-time sites, for bulk oracle comparisons.
pub struct OracleTable {
    pub model: ModelParams,
    pub families: Vec<PathFamily>,
    sites: Vec<(i64, i64)>,
    index: HashMap<(i64, i64), usize>,
    pair_counts: Vec<u64>,
}

impl OracleTable {
    pub fn build(model: ModelParams, cap: u64) -> Result<Self> {
        let families = enumerate_path_families_capped(model, cap)?;
        let sites = model.sites();
        let index: HashMap<_, _> = sites.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let n = sites.len();
        let mut pair_counts = vec![0u64; n * n];
        for fam in &families {
            let occupied: Vec<usize> = (0..=model.horizon)
                .flat_map(|t| {
                    fam.heights(t)
                        .into_iter()
                        .map(move |x| (x, t as i64))
                })
                .map(|site| index[&site])
                .collect();
            for &a in &occupied {
                for &b in &occupied {
                    pair_counts[a * n + b] += 1;
                }
            }
        }
        Ok(Self {
            model,
            families,
            sites,
            index,
            pair_counts,
        })
    }

    pub fn sites(&self) -> &[(i64, i64)] {
        &self.sites
    }

    fn total(&self) -> BigInt {
        BigInt::from(self.families.len())
    }

    /// One-point probability of `(x, t)`; zero off the lattice support.
    pub fn density(&self, site: (i64, i64)) -> Rational {
        self.pair(site, site)
    }

    /// Two-point probability (equal sites give the density).
    pub fn pair(&self, a: (i64, i64), b: (i64, i64)) -> Rational {
        match (self.index.get(&a), self.index.get(&b)) {
            (Some(&i), Some(&j)) => BigRational::new(
                BigInt::from(self.pair_counts[i * self.sites.len() + j]),
                self.total(),
            ),
            _ => Rational::zero(),
        }
    }

    /// Arbitrary query, by scanning the families.
    pub fn correlation(&self, query: &[(i64, i64)]) -> Rational {
        if query.is_empty() {
            return Rational::one();
        }
        oracle_fraction(&self.families, query)
    }
}
