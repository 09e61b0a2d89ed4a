//! Exact and numerical tools for the ensemble of `N` non-intersecting up/flat
//! lattice paths in a hexagon.
//!
//! Slices of the ensemble are Hahn orthogonal polynomial ensembles; the full
//! space-time process is determinantal with an explicit extended kernel whose
//! bulk scaling limit is the extended discrete sine kernel.
//!
//! Exact code runs on [`Rational`]; anything written against [`Scalar`] also
//! runs on `f64` and `f32`.

// `!(a > b)` is used on purpose so that NaN fails parameter checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bulk;
pub mod combinatorics;
pub mod error;
pub mod hahn;
pub mod kernel;
pub mod linalg;
pub mod process;
pub mod radical;
pub mod scalar;

pub use combinatorics::{Configuration, ModelParams, PathFamily, Step};
pub use error::{Error, Result};
pub use hahn::{CaseTag, HahnParams, NumericBackend, SliceParams};
pub use radical::SqrtRational;
pub use scalar::Scalar;

/// Arbitrary-precision rational, the exact scalar throughout.
pub type Rational = num_rational::BigRational;
/// Single-precision matrix alias for callers that want compact storage.
pub type MatrixF32 = linalg::Matrix<f32>;
pub type MatrixF64 = linalg::Matrix<f64>;
pub type MatrixQ = linalg::Matrix<Rational>;
