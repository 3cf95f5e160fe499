use std::f64::consts::PI;

use num_rational::Rational64;

use crate::error::{LabError, Result};

/// `K(x, x) = sin(δπx)/(πx)`, equal to `δ` at `x = 0`.
pub fn kernel_value(delta: f64, x: f64) -> f64 {
    let y = PI * x;
    if y.abs() < 1e-8 {
        // sin(δy)/y = δ(1 − (δy)²/6 + …)
        delta * (1.0 - (delta * y).powi(2) / 6.0)
    } else {
        (delta * y).sin() / y
    }
}

/// `1 − 1/δ` in exact rational arithmetic.
pub fn nonvanishing_bound(delta: Rational64) -> Result<Rational64> {
    if delta < Rational64::from_integer(1) {
        return Err(LabError::OutOfRange(format!("delta = {delta} (need delta >= 1)")));
    }
    Ok(Rational64::from_integer(1) - delta.recip())
}

pub fn nonvanishing_bound_f64(delta: f64) -> Result<f64> {
    if !(delta >= 1.0) {
        return Err(LabError::OutOfRange(format!("delta = {delta} (need delta >= 1)")));
    }
    Ok(1.0 - 1.0 / delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corollary_values() {
        let r = |a, b| Rational64::new(a, b);
        assert_eq!(nonvanishing_bound(r(8, 3)).unwrap(), r(5, 8));
        assert_eq!(nonvanishing_bound(r(1, 1)).unwrap(), r(0, 1));
        assert_eq!(nonvanishing_bound(r(2, 1)).unwrap(), r(1, 2));
        assert!(matches!(nonvanishing_bound(r(1, 2)), Err(LabError::OutOfRange(_))));
        assert_eq!(kernel_value(8.0 / 3.0, 0.0), 8.0 / 3.0);
        assert_eq!(kernel_value(1.0, 0.0), 1.0);
    }

    #[test]
    fn kernel_zero_and_continuity() {
        for d in [1.0, 2.0, 8.0 / 3.0] {
            assert!(kernel_value(d, 1.0 / d).abs() < 1e-15);
            assert!((kernel_value(d, 1e-9) - d).abs() <= 1e-6);
        }
    }
}
