//! Empirical checks of decay claims, block diagnostics, a character prime-sum
//! probe and the kernel arithmetic behind the non-vanishing bound.

mod blocks;
mod kernel;
mod probe;
mod regression;

pub use blocks::{block_d, block_grid, block_sum_unwindowed, block_sum_weighted, BlockCase, BlockRow, BlockSpec};
pub use kernel::{kernel_value, nonvanishing_bound, nonvanishing_bound_f64};
pub use probe::{char_prime_sum_probe, ProbeResult};
pub use regression::{delta_decay_regression, max_delta_decay_regression, DecayPoint, RegressionResult};
