//! Bessel functions `J_ν` of integer order on `x >= 0`.
//!
//! Below the crossover the power series is summed in double-double
//! arithmetic (the terms grow to about `e^x` before cancelling). Above it the
//! Hankel expansion with eight terms in each of `P` and `Q` is used.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::ddouble::DoubleDouble;

const DEFAULT_SERIES_TERMS: usize = 200;
const HANKEL_TERMS: usize = 8;
// Below this the plain f64 series is already accurate.
const PLAIN_SERIES_LIMIT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct BesselEvaluator {
    pub order: u32,
    pub x_switch: f64,
    pub series_terms: usize,
    // a_k(ν) for k = 0..2*HANKEL_TERMS
    hankel: Vec<f64>,
}

impl BesselEvaluator {
    pub fn new(order: u32) -> Self {
        Self::with_switch(order, 18.0 + 2.0 * order as f64)
    }

    pub fn with_switch(order: u32, x_switch: f64) -> Self {
        let mu = 4.0 * (order as f64).powi(2);
        let mut hankel = Vec::with_capacity(2 * HANKEL_TERMS);
        let mut a = 1.0;
        hankel.push(a);
        for k in 1..2 * HANKEL_TERMS {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0);
            hankel.push(a);
        }
        Self { order, x_switch, series_terms: DEFAULT_SERIES_TERMS, hankel }
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.x_switch {
            self.series(x)
        } else {
            self.asymptotic(x)
        }
    }

    /// Power series `Σ (-1)^l (x/2)^{2l+ν} / (l! (l+ν)!)`.
    pub fn series(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "J_nu needs x >= 0");
        let nu = self.order;
        if x == 0.0 {
            return if nu == 0 { 1.0 } else { 0.0 };
        }
        let h = 0.5 * x;
        if x <= PLAIN_SERIES_LIMIT {
            let mut term = 1.0;
            for i in 1..=nu {
                term *= h / i as f64;
            }
            let h2 = h * h;
            let mut sum = term;
            for l in 0..self.series_terms {
                term *= -h2 / ((l as f64 + 1.0) * (l as f64 + 1.0 + nu as f64));
                sum += term;
                if term.abs() <= 1e-18 * sum.abs() {
                    break;
                }
            }
            return sum;
        }
        let mut term = DoubleDouble::ONE;
        for i in 1..=nu {
            term = term.mul_f64(h).div_f64(i as f64);
        }
        let h2 = DoubleDouble::square_of(h);
        let mut sum = term;
        for l in 0..self.series_terms {
            let denom = (l as f64 + 1.0) * (l as f64 + 1.0 + nu as f64);
            term = term.mul(h2).div_f64(denom).neg();
            sum = sum.add(term);
            if term.hi.abs() <= 1e-33 * sum.hi.abs() {
                break;
            }
        }
        sum.to_f64()
    }

    /// Hankel expansion `sqrt(2/(πx)) (P cos ω − Q sin ω)`, `ω = x − νπ/2 − π/4`.
    pub fn asymptotic(&self, x: f64) -> f64 {
        assert!(x > 0.0, "asymptotic branch needs x > 0");
        let inv = 1.0 / x;
        let (mut p, mut q) = (0.0, 0.0);
        let mut pow = 1.0;
        for (k, a) in self.hankel.iter().enumerate() {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            if k % 2 == 0 {
                p += sign * a * pow;
            } else {
                q += sign * a * pow;
            }
            pow *= inv;
        }
        // ω = x − (2ν+1)π/4; the shift is a multiple of π/4, applied exactly.
        let (sx, cx) = x.sin_cos();
        let (s0, c0) = eighth_turn((2 * self.order as u64 + 1) % 8);
        let cos_w = cx * c0 + sx * s0;
        let sin_w = sx * c0 - cx * s0;
        (2.0 / (PI * x)).sqrt() * (p * cos_w - q * sin_w)
    }

    /// Largest disagreement between the two branches on `points` evenly spaced
    /// samples of `[0.8, 1.2]·x_switch`, relative to the envelope `sqrt(2/(πx))`.
    pub fn overlap_discrepancy(&self, points: usize) -> f64 {
        let (lo, hi) = (0.8 * self.x_switch, 1.2 * self.x_switch);
        (0..points)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / (points.max(2) - 1) as f64;
                let env = (2.0 / (PI * x)).sqrt();
                (self.series(x) - self.asymptotic(x)).abs() / env
            })
            .fold(0.0, f64::max)
    }
}

// (sin, cos) of k·π/4.
fn eighth_turn(k: u64) -> (f64, f64) {
    const H: f64 = FRAC_1_SQRT_2;
    match k % 8 {
        0 => (0.0, 1.0),
        1 => (H, H),
        2 => (1.0, 0.0),
        3 => (H, -H),
        4 => (0.0, -1.0),
        5 => (-H, -H),
        6 => (-1.0, 0.0),
        _ => (-H, H),
    }
}

/// `J_ν(x)` with the default crossover.
pub fn bessel_j(nu: u32, x: f64) -> f64 {
    BesselEvaluator::new(nu).eval(x)
}

/// `|J_ν(x)| / min(x^{-1/2}, (x/2)^ν/ν!)`.
pub fn bessel_bound_margin(nu: u32, x: f64) -> f64 {
    assert!(x > 0.0, "bound margin needs x > 0");
    let mut small = 1.0;
    for i in 1..=nu {
        small *= 0.5 * x / i as f64;
    }
    let envelope = x.powf(-0.5).min(small);
    if envelope == 0.0 {
        return 1.0;
    }
    bessel_j(nu, x).abs() / envelope
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bessel_j(2, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert!((bessel_j(2, 1.0) - 0.114_903_484_931_900_48).abs() < 1e-15);
        // reference values J_0(10), J_1(30)
        assert!((bessel_j(0, 10.0) + 0.245_935_764_451_348_3).abs() < 1e-13);
        assert!((bessel_j(1, 30.0) + 0.118_751_062_616_622_91).abs() < 1e-13);
    }

    #[test]
    fn envelope_at_large_argument() {
        let x = 400.0;
        assert!(bessel_j(2, x).abs() <= (2.0 / (x * PI)).sqrt() * 1.05);
    }

    #[test]
    fn branches_overlap() {
        for nu in [0, 1, 2, 4, 6, 10, 14] {
            let d = BesselEvaluator::new(nu).overlap_discrepancy(100);
            assert!(d < 1e-9, "nu={nu} discrepancy {d}");
        }
    }

    #[test]
    fn bad_switch_is_detected() {
        assert!(BesselEvaluator::with_switch(2, 3.0).overlap_discrepancy(100) > 1e-6);
    }

    #[test]
    fn recurrence_holds() {
        // J_{ν-1}(x) + J_{ν+1}(x) = (2ν/x) J_ν(x)
        for &x in &[0.5, 3.0, 17.0, 25.0, 60.0, 250.0] {
            for nu in 1..6 {
                let lhs = bessel_j(nu - 1, x) + bessel_j(nu + 1, x);
                let rhs = 2.0 * nu as f64 / x * bessel_j(nu, x);
                assert!((lhs - rhs).abs() < 1e-12, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn margin_tends_to_one_near_zero() {
        assert!((bessel_bound_margin(2, 1e-6) - 1.0).abs() < 1e-9);
        assert!(bessel_bound_margin(2, 0.1) <= 1.3);
        assert!(bessel_bound_margin(2, 1000.0) <= 1.3);
    }
}
