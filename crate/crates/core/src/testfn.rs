//! Even test functions `φ` with `supp φ̂ ⊂ [−δ, δ]`, using the convention
//! `φ̂(u) = ∫ φ(x) e^{−2πixu} dx`.

use std::f64::consts::{E, PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::special::gauss_legendre;

/// Largest support radius covered by the non-vanishing theorem.
pub const THEOREM_DELTA: f64 = 8.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestFnKind {
    Fejer,
    Bump,
}

impl fmt::Display for TestFnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFnKind::Fejer => "fejer",
            TestFnKind::Bump => "bump",
        })
    }
}

impl FromStr for TestFnKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fejer" => Ok(TestFnKind::Fejer),
            "bump" => Ok(TestFnKind::Bump),
            other => Err(LabError::InvalidInput(format!("unknown test function '{other}'"))),
        }
    }
}

const BUMP_PANELS: usize = 128;
const BUMP_NODES: usize = 20;

// Cosine-quadrature nodes on [0, δ] with φ̂ folded into the weights.
#[derive(Debug)]
struct CosineCache {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TestFunctionPair {
    pub delta: f64,
    pub kind: TestFnKind,
    /// `∫φ = φ̂(0)`.
    pub integral_phi: f64,
    cache: Option<Arc<CosineCache>>,
}

pub fn fejer_pair(delta: f64) -> Result<TestFunctionPair> {
    check_delta(delta)?;
    Ok(TestFunctionPair { delta, kind: TestFnKind::Fejer, integral_phi: 1.0, cache: None })
}

pub fn bump_pair(delta: f64) -> Result<TestFunctionPair> {
    check_delta(delta)?;
    let mut pair = TestFunctionPair { delta, kind: TestFnKind::Bump, integral_phi: 1.0, cache: None };
    let rule = gauss_legendre(BUMP_NODES);
    let h = delta / BUMP_PANELS as f64;
    let mut nodes = Vec::with_capacity(BUMP_PANELS * BUMP_NODES);
    let mut weights = Vec::with_capacity(BUMP_PANELS * BUMP_NODES);
    for p in 0..BUMP_PANELS {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let u = mid + 0.5 * h * x;
            nodes.push(u);
            weights.push(0.5 * h * w * pair.phi_hat(u));
        }
    }
    pair.cache = Some(Arc::new(CosineCache { nodes, weights }));
    let at_zero = pair.phi(0.0);
    if !at_zero.is_finite() {
        return Err(LabError::QuadratureFailure { error_estimate: f64::NAN, nodes: BUMP_PANELS * BUMP_NODES });
    }
    Ok(pair)
}

/// Builds the pair of the given kind.
pub fn make_pair(kind: TestFnKind, delta: f64) -> Result<TestFunctionPair> {
    match kind {
        TestFnKind::Fejer => fejer_pair(delta),
        TestFnKind::Bump => bump_pair(delta),
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidInput(format!("delta = {delta} must be positive")))
    }
}

impl TestFunctionPair {
    /// `φ̂(u)`, exactly zero for `|u| >= δ`.
    pub fn phi_hat(&self, u: f64) -> f64 {
        let r = u.abs() / self.delta;
        if r >= 1.0 {
            return 0.0;
        }
        match self.kind {
            TestFnKind::Fejer => 1.0 - r,
            TestFnKind::Bump => E * (-1.0 / (1.0 - r * r)).exp(),
        }
    }

    pub fn phi(&self, x: f64) -> f64 {
        match self.kind {
            TestFnKind::Fejer => {
                let y = PI * self.delta * x;
                if y.abs() < 1e-8 {
                    self.delta * (1.0 - y * y / 3.0)
                } else {
                    self.delta * (y.sin() / y).powi(2)
                }
            }
            TestFnKind::Bump => {
                let cache = self.cache.as_ref().expect("bump pairs carry a cache");
                // The cached rule resolves about 4 oscillations per panel.
                if self.delta * x.abs() <= 2.0 * BUMP_PANELS as f64 {
                    let s: f64 = cache
                        .nodes
                        .iter()
                        .zip(&cache.weights)
                        .map(|(u, w)| w * (TAU * u * x).cos())
                        .sum();
                    2.0 * s
                } else {
                    let panels = (self.delta * x.abs()).ceil() as usize;
                    2.0 * gauss_legendre(BUMP_NODES).integrate(
                        |u| self.phi_hat(u) * (TAU * u * x).cos(),
                        0.0,
                        self.delta,
                        panels,
                    )
                }
            }
        }
    }

    /// `δ > 8/3`: outside the range of the non-vanishing theorem.
    pub fn beyond_theorem_range(&self) -> bool {
        self.delta > THEOREM_DELTA
    }

    /// Smallest grid point `X₀` beyond which `|φ(x)| < threshold` on `[X₀, 200]`.
    pub fn decay_radius(&self, threshold: f64) -> f64 {
        let step = 0.01;
        let mut last = 0.0;
        let mut x = 0.0;
        while x <= 200.0 {
            if self.phi(x).abs() >= threshold {
                last = x;
            }
            x += step;
        }
        last + step
    }
}

/// Inversion `∫ φ̂(u) e^{2πiux} du` by composite Gauss–Legendre split at
/// `0` and `±δ`, independent of the pair's own evaluator.
pub fn fourier_inversion(pair: &TestFunctionPair, x: f64) -> f64 {
    let rule = gauss_legendre(24);
    let panels = 64 + (4.0 * pair.delta * x.abs()).ceil() as usize;
    let f = |u: f64| pair.phi_hat(u) * (TAU * u * x).cos();
    rule.integrate(f, -pair.delta, 0.0, panels) + rule.integrate(f, 0.0, pair.delta, panels)
}

/// Largest `|inversion − φ(x)|` over `x ∈ {0, ±0.25, …, ±8}`.
pub fn pair_selfcheck(pair: &TestFunctionPair) -> f64 {
    (-32..=32)
        .map(|i| {
            let x = i as f64 * 0.25;
            (fourier_inversion(pair, x) - pair.phi(x)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_examples() {
        let p = fejer_pair(1.0).unwrap();
        assert_eq!(p.phi_hat(0.0), 1.0);
        assert_eq!(p.integral_phi, 1.0);
        assert_eq!(fejer_pair(2.0).unwrap().phi(0.0), 2.0);
        assert_eq!(p.phi_hat(1.0), 0.0);
        assert_eq!(p.phi_hat(-1.5), 0.0);
        assert!(fejer_pair(0.0).is_err());
    }

    #[test]
    fn bump_examples() {
        let p = bump_pair(THEOREM_DELTA).unwrap();
        assert_eq!(p.phi_hat(THEOREM_DELTA), 0.0);
        assert_eq!(p.phi_hat(-THEOREM_DELTA), 0.0);
        assert_eq!(p.phi_hat(0.0), 1.0);
        assert_eq!(p.integral_phi, 1.0);
        assert!(!p.beyond_theorem_range());
        assert!(bump_pair(3.0).unwrap().beyond_theorem_range());
    }

    #[test]
    fn selfcheck_small() {
        assert!(pair_selfcheck(&fejer_pair(1.0).unwrap()) <= 1e-7);
        assert!(pair_selfcheck(&bump_pair(THEOREM_DELTA).unwrap()) <= 1e-7);
    }

    #[test]
    fn origin_inversion() {
        for p in [fejer_pair(1.3).unwrap(), bump_pair(2.0).unwrap()] {
            assert!((fourier_inversion(&p, 0.0) - p.phi(0.0)).abs() <= 1e-9);
        }
    }

    #[test]
    fn bump_far_branch_is_consistent() {
        let p = bump_pair(1.0).unwrap();
        // just inside and just outside the cached range
        let a = p.phi(255.9);
        let b = fourier_inversion(&p, 255.9);
        assert!((a - b).abs() < 1e-9);
        let c = p.phi(300.0);
        assert!((c - fourier_inversion(&p, 300.0)).abs() < 1e-9);
    }
}
