//! Oscillatory Mellin transform
//! `M1(c + iv) = ∫ η(y) e(yX/j) e(±α√(yX)/j) y^{c−1+iv} dy`
//! with η supported on `[1/2, 4]`, equal to 1 on `[1, 2]`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quad::{gauss_legendre, GaussRule};
use super::window::BumpWindow;
use crate::error::{LabError, Result};

const ETA: BumpWindow = BumpWindow::new(0.5, 1.0, 2.0, 4.0);
const MAX_PANELS: usize = 1 << 18;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinProbe {
    pub x: f64,
    pub j: f64,
    pub alpha: f64,
    /// +1 or −1, the sign in front of α.
    pub sign: i8,
    pub c: f64,
    /// Gauss–Legendre points per panel.
    pub nodes: usize,
    /// Absolute convergence tolerance under panel doubling.
    pub tolerance: f64,
    /// Power in the decay-regime bound `1/(|v| + X/j)^A`.
    pub decay_power: f64,
}

impl MellinProbe {
    pub fn new(x: f64, j: f64, alpha: f64, sign: i8) -> Self {
        Self { x, j, alpha, sign, c: 0.5, nodes: 20, tolerance: 1e-12, decay_power: 2.0 }
    }

    pub fn ratio(&self) -> f64 {
        self.x / self.j
    }

    fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0 && self.j >= 1.0) {
            return Err(LabError::InvalidInput("Mellin probe needs X, j >= 1".into()));
        }
        if self.alpha < 0.0 || !(self.sign == 1 || self.sign == -1) {
            return Err(LabError::InvalidInput("Mellin probe needs alpha >= 0, sign = ±1".into()));
        }
        if self.nodes == 0 || !(self.tolerance > 0.0) {
            return Err(LabError::InvalidInput("Mellin probe needs nodes >= 1, tolerance > 0".into()));
        }
        Ok(())
    }

    // Phase of the oscillatory factor, excluding y^{iv}.
    fn phase(&self, y: f64) -> f64 {
        TAU * (y * self.ratio() + self.sign as f64 * self.alpha * (y * self.x).sqrt() / self.j)
    }

    /// Value of `v` at which the phase is stationary at `y`.
    pub fn stationary_v(&self, y: f64) -> f64 {
        -TAU * (y * self.ratio() + self.sign as f64 * self.alpha * (y * self.x).sqrt() / (2.0 * self.j))
    }

    /// `(d₁X/j, c₁X/j)`: the `|v|` range with a stationary point on the
    /// support of η, widened by the factors 0.5 and 2.
    pub fn saddle_band(&self) -> (f64, f64) {
        let (lo, hi) = ETA.support();
        let n = 4000;
        let (mut vmin, mut vmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..=n {
            let y = lo + (hi - lo) * i as f64 / n as f64;
            let v = self.stationary_v(y);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let abs_min = if vmin <= 0.0 && vmax >= 0.0 { 0.0 } else { vmin.abs().min(vmax.abs()) };
        let abs_max = vmin.abs().max(vmax.abs());
        (0.5 * abs_min, 2.0 * abs_max)
    }

    pub fn regime(&self, v: f64) -> Regime {
        let (lo, hi) = self.saddle_band();
        if v.abs() >= lo && v.abs() <= hi {
            Regime::SaddleBand
        } else {
            Regime::Decay
        }
    }

    /// The regime bound: `sqrt(j/X)` in the band, `(|v| + X/j)^{-A}` outside.
    pub fn regime_bound(&self, v: f64, regime: Regime) -> f64 {
        match regime {
            Regime::SaddleBand => (self.j / self.x).sqrt(),
            Regime::Decay => (v.abs() + self.ratio()).powf(-self.decay_power),
        }
    }

    fn integrate(&self, rule: &GaussRule, v: f64, panels: usize) -> Complex64 {
        let (lo, hi) = ETA.support();
        rule.integrate_complex(
            |y| {
                let w = ETA.eval(y);
                if w == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let ln_y = y.ln();
                let amp = w * ((self.c - 1.0) * ln_y).exp();
                Complex64::from_polar(amp, self.phase(y) + v * ln_y)
            },
            lo,
            hi,
            panels,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SaddleBand,
    Decay,
}

impl Regime {
    pub fn label(&self) -> &'static str {
        match self {
            Regime::SaddleBand => "saddle",
            Regime::Decay => "decay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinRow {
    pub v: f64,
    pub abs_m1: f64,
    pub regime: Regime,
    pub bound_ratio: f64,
}

/// `M1(c + iv)` by composite Gauss–Legendre with panel doubling.
pub fn mellin_m1(probe: &MellinProbe, v: f64) -> Result<MellinValue> {
    probe.validate()?;
    let rule = gauss_legendre(probe.nodes);
    // about one panel per half turn of total phase variation
    let variation = probe.phase(4.0) - probe.phase(0.5);
    let total = variation.abs() + TAU * probe.alpha * 2.0 + v.abs() * 8f64.ln();
    let mut panels = ((total / PI).ceil() as usize).max(16);
    let mut prev = probe.integrate(&rule, v, panels);
    loop {
        panels *= 2;
        let cur = probe.integrate(&rule, v, panels);
        let diff = (cur - prev).norm();
        if diff <= probe.tolerance + 1e-10 * cur.norm() {
            return Ok(MellinValue { value: cur, error_estimate: diff, panels });
        }
        if panels >= MAX_PANELS {
            return Err(LabError::QuadratureFailure {
                error_estimate: diff,
                nodes: panels * probe.nodes,
            });
        }
        prev = cur;
    }
}

/// `(v, |M1|, regime, |M1| / regime bound)` for each grid point.
pub fn mellin_regime_scan(probe: &MellinProbe, v_grid: &[f64]) -> Result<Vec<MellinRow>> {
    v_grid
        .iter()
        .map(|&v| {
            let m = mellin_m1(probe, v)?;
            let regime = probe.regime(v);
            let abs_m1 = m.value.norm();
            Ok(MellinRow { v, abs_m1, regime, bound_ratio: abs_m1 / probe.regime_bound(v, regime) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_scale_matches_dense_quadrature() {
        let mut p = MellinProbe::new(1.0, 1.0, 0.0, 1);
        p.c = 1.0;
        let got = mellin_m1(&p, 0.0).unwrap().value;
        let rule = gauss_legendre(40);
        let want = rule.integrate_complex(
            |y| Complex64::from_polar(ETA.eval(y), TAU * y),
            0.5,
            4.0,
            2000,
        );
        assert!((got - want).norm() < 1e-11, "{got} vs {want}");
    }

    #[test]
    fn far_decay_is_tiny() {
        let p = MellinProbe::new(1e4, 1.0, 0.0, 1);
        let v = 10.0 * p.ratio();
        assert!(mellin_m1(&p, v).unwrap().value.norm() <= 1e-6);
    }

    #[test]
    fn zero_v_is_decay_regime() {
        let p = MellinProbe::new(1e3, 1.0, 0.0, 1);
        assert_eq!(p.regime(0.0), Regime::Decay);
    }

    #[test]
    fn empty_grid_gives_empty_table() {
        let p = MellinProbe::new(100.0, 1.0, 0.0, 1);
        assert!(mellin_regime_scan(&p, &[]).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_probe() {
        let p = MellinProbe::new(0.5, 1.0, 0.0, 1);
        assert!(mellin_m1(&p, 0.0).is_err());
    }
}
