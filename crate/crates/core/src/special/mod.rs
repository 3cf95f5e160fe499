//! Bessel functions, smooth windows, quadrature and the Mellin probe.

mod bessel;
mod ddouble;
mod mellin;
mod quad;
mod window;

pub use bessel::{bessel_bound_margin, bessel_j, BesselEvaluator};
pub use ddouble::DoubleDouble;
pub use mellin::{mellin_m1, mellin_regime_scan, MellinProbe, MellinRow, MellinValue, Regime};
pub use quad::{gauss_legendre, GaussRule};
pub use window::{
    dyadic_partition_residual, dyadic_window, smooth_step, BumpWindow, DyadicWindow,
};
