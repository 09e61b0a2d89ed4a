//! Bulk scaling limit: regime bookkeeping, the extended discrete sine kernel,
//! the arctic ellipse, particle-hole duality and finite-size probes.

pub mod contour;
pub mod duality;
pub mod probe;
pub mod regime;

pub use contour::{extended_sine_kernel, limit_kernel, ArcSide};
pub use duality::{or_duality_residual, or_kernel};
pub use probe::{convergence_probe, prelimit_density, ConvergenceTable};
pub use regime::{
    ellipse_classify, limit_params, limit_tridiagonal, sine_kernel_static, EllipseClass,
    LimitKernelParams, LimitRegime,
};
