use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{character_group, sieve_primes};
use crate::error::{LabError, Result};
use crate::special::BumpWindow;
use crate::sum::ComplexSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub value: Complex64,
    /// `log²(t + |Im z|)`, for inspection only.
    pub comparison: f64,
    pub trivial_character: bool,
}

/// `Σ_p χ(p) log p ψ(p/X) p^{-z}` for the character `character_index` mod `t`.
pub fn char_prime_sum_probe(
    t: u64,
    character_index: usize,
    z: Complex64,
    x: f64,
    window: &BumpWindow,
) -> Result<ProbeResult> {
    if t < 2 {
        return Err(LabError::InvalidInput("probe needs t >= 2".into()));
    }
    let band = 10.0 / (t as f64).ln();
    if (z.re - 0.5).abs() >= band {
        return Err(LabError::OutOfRange(format!(
            "Re z = {} outside (1/2 − {band:.4}, 1/2 + {band:.4})",
            z.re
        )));
    }
    if !(x > 0.0) {
        return Err(LabError::InvalidInput("probe needs X > 0".into()));
    }
    let group = character_group(t)?;
    if character_index >= group.len() {
        return Err(LabError::InvalidInput(format!("character index {character_index} >= φ({t})")));
    }
    let (_, hi) = window.support();
    let mut acc = ComplexSum::new();
    for p in sieve_primes((hi * x).floor() as u64) {
        let w = window.eval(p as f64 / x);
        if w == 0.0 {
            continue;
        }
        let lp = (p as f64).ln();
        acc.add(group.value(character_index, p) * (-z * lp).exp() * (lp * w));
    }
    Ok(ProbeResult {
        value: acc.value(),
        comparison: ((t as f64) + z.im.abs()).ln().powi(2),
        trivial_character: group.characters[character_index].is_trivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::DyadicWindow;

    #[test]
    fn empty_window_gives_zero() {
        let r = char_prime_sum_probe(7, 1, Complex64::new(0.5, 0.0), 1.0, &DyadicWindow::SHAPE).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn conjugate_character_gives_conjugate_value() {
        let g = character_group(7).unwrap();
        let z = Complex64::new(0.5, 0.0);
        for a in 0..g.len() {
            let b = g.conjugate_index(a);
            let va = char_prime_sum_probe(7, a, z, 1e3, &DyadicWindow::SHAPE).unwrap();
            let vb = char_prime_sum_probe(7, b, z, 1e3, &DyadicWindow::SHAPE).unwrap();
            assert!((va.value - vb.value.conj()).norm() < 1e-10);
            assert!(va.value.norm().is_finite() && va.comparison > 0.0);
        }
    }

    #[test]
    fn band_is_enforced_and_trivial_flagged() {
        let w = DyadicWindow::SHAPE;
        assert!(char_prime_sum_probe(7, 1, Complex64::new(6.0, 0.0), 1e3, &w).is_err());
        assert!(char_prime_sum_probe(7, 0, Complex64::new(0.5, 1.0), 1e3, &w).unwrap().trivial_character);
    }
}
