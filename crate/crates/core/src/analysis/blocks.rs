//! Dyadic blocks `D(P, S, T)` of the non-trivial-character sum.
//!
//! The block value carries the bare factor `1/(q s t φ(t))`; compared with the
//! `S₂` term of the density it lacks `2π`, `𝒦` and `1/log q`, so the ratios
//! against the case bounds are meaningful only up to those constants.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{character_group, euler_phi, gcd, sieve_primes};
use crate::density::a_coeff;
use crate::error::{LabError, Result};
use crate::family::{FamilyParams, VSumKernel};
use crate::phase::e_real;
use crate::special::{BesselEvaluator, DyadicWindow};
use crate::sum::ComplexSum;
use crate::testfn::TestFunctionPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockCase {
    Case1,
    Case2,
    Case3,
}

impl BlockCase {
    pub fn label(self) -> &'static str {
        match self {
            BlockCase::Case1 => "case1",
            BlockCase::Case2 => "case2",
            BlockCase::Case3 => "case3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub p: f64,
    pub s: f64,
    pub t: f64,
    pub case: BlockCase,
}

impl BlockSpec {
    /// Classifies with unit margins: case1 when `ST >= P/q`, case2 when
    /// `√P/q <= ST < P/q`, case3 below.
    pub fn new(q: u64, p: f64, s: f64, t: f64) -> Result<Self> {
        if !(p > 0.0 && s > 0.0 && t > 0.0) || ![p, s, t].iter().all(|v| v.is_finite()) {
            return Err(LabError::InvalidInput(format!("block centers must be positive: P={p} S={s} T={t}")));
        }
        let qf = q as f64;
        let st = s * t;
        let case = if st >= p / qf {
            BlockCase::Case1
        } else if st >= p.sqrt() / qf {
            BlockCase::Case2
        } else {
            BlockCase::Case3
        };
        Ok(Self { p, s, t, case })
    }

    /// Case bound without the `q^ε` factor.
    pub fn case_bound(&self, params: &FamilyParams) -> f64 {
        let q = params.q as f64;
        match self.case {
            BlockCase::Case1 => {
                let r = self.p.sqrt() / (q * self.s * self.t);
                self.p.sqrt() / (q * q * self.s) * r.powi(params.k as i32 - 2)
            }
            BlockCase::Case2 | BlockCase::Case3 => self.p.powf(0.75) / (q * q * self.s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub spec: BlockSpec,
    pub value: Complex64,
    pub bound: f64,
    pub bound_ratio: f64,
}

/// Integers strictly inside the window support `(3R/4, 2R)`.
fn window_range(r: f64) -> std::ops::RangeInclusive<u64> {
    let (lo, hi) = DyadicWindow::SHAPE.support();
    let a = (lo * r).floor() as u64 + 1;
    let b = (hi * r).ceil() as u64 - 1;
    a.max(1)..=b
}

// Per-prime weight a_p e((p+1)/(qst)) J_{k-1}(4π√p/(qst)), before the U window.
struct PrimeData {
    primes: Vec<u64>,
    coeffs: Vec<f64>,
    bessel: BesselEvaluator,
    q: u64,
}

impl PrimeData {
    fn new(params: &FamilyParams, pair: &TestFunctionPair, limit: u64) -> Self {
        let primes = sieve_primes(limit);
        let coeffs = primes.iter().map(|&p| a_coeff(p, params.q, pair)).collect();
        Self { primes, coeffs, bessel: BesselEvaluator::new(params.k - 1), q: params.q }
    }

    fn weight(&self, i: usize, c: u64) -> Complex64 {
        let p = self.primes[i];
        let qc = self.q as f64 * c as f64;
        e_real((p + 1) as f64 / qc) * (self.coeffs[i] * self.bessel.eval(4.0 * PI * (p as f64).sqrt() / qc))
    }
}

fn check_prime_range(params: &FamilyParams, pair: &TestFunctionPair, p: f64) -> Result<()> {
    let reach = (params.q as f64).powf(pair.delta);
    if p >= reach {
        return Err(LabError::InvalidInput(format!("P = {p} must be below q^delta = {reach:.6}")));
    }
    Ok(())
}

/// `D(P, S, T)` with smooth dyadic windows in `s`, `t` and `p`, evaluated
/// through the full character table of each modulus `t`.
pub fn block_d(params: &FamilyParams, pair: &TestFunctionPair, spec: &BlockSpec) -> Result<Complex64> {
    check_prime_range(params, pair, spec.p)?;
    let w = DyadicWindow::SHAPE;
    let data = PrimeData::new(params, pair, (w.support().1 * spec.p).ceil() as u64);
    let windowed: Vec<(usize, f64)> = (0..data.primes.len())
        .map(|i| (i, w.eval(data.primes[i] as f64 / spec.p)))
        .filter(|&(i, u)| u != 0.0 && data.coeffs[i] != 0.0)
        .collect();
    let mut acc = ComplexSum::new();
    if windowed.is_empty() {
        return Ok(acc.value());
    }
    let q = params.q;
    let mut adm = Vec::new();
    for t in window_range(spec.t) {
        let yt = w.eval(t as f64 / spec.t);
        if yt == 0.0 || t < 3 {
            // t <= 2 has no non-trivial character
            continue;
        }
        let group = character_group(t)?;
        let phi = euler_phi(t)? as f64;
        let kern = VSumKernel::new(t);
        let units: Vec<u64> = (1..t).filter(|&m| gcd(m, t) == 1).collect();
        for s in window_range(spec.s) {
            let xs = w.eval(s as f64 / spec.s);
            if xs == 0.0 {
                continue;
            }
            kern.fill_admissible(q * s, &mut adm);
            let v: Vec<Complex64> = units.iter().map(|&m| kern.eval(&adm, m, 1)).collect();
            let c = s * t;
            let cp: Vec<(u64, Complex64)> = windowed
                .iter()
                .filter(|&&(i, _)| t % data.primes[i] != 0)
                .map(|&(i, u)| (data.primes[i], data.weight(i, c) * u))
                .collect();
            let mut inner = ComplexSum::new();
            for chi in 1..group.len() {
                let f: Complex64 = units.iter().zip(&v).map(|(&m, vm)| vm * group.value(chi, m).conj()).sum();
                let pc: Complex64 = cp.iter().map(|&(p, z)| group.value(chi, p) * z).sum();
                inner.add(f * pc);
            }
            acc.add(inner.value() * (xs * yt / (q as f64 * c as f64 * phi)));
        }
    }
    Ok(acc.value())
}

/// The same sum without `s`, `t`, `p` windows, over `s <= s_max`, `t <= t_max`
/// and every prime below `q^δ`, evaluated with character orthogonality
/// `Σ_{χ≠χ₀} χ̄(m)χ(p) = φ(t)[p ≡ m] − 1` instead of tables.
pub fn block_sum_unwindowed(params: &FamilyParams, pair: &TestFunctionPair, s_max: u64, t_max: u64) -> Result<Complex64> {
    block_sum_weighted(params, pair, s_max, t_max, |_| 1.0, |_| 1.0)
}

/// As [`block_sum_unwindowed`] with weights `ws(s)`, `wt(t)` on the lattice.
pub fn block_sum_weighted<FS, FT>(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    s_max: u64,
    t_max: u64,
    ws: FS,
    wt: FT,
) -> Result<Complex64>
where
    FS: Fn(u64) -> f64,
    FT: Fn(u64) -> f64,
{
    let reach = (params.q as f64).powf(pair.delta).ceil() as u64;
    let data = PrimeData::new(params, pair, reach);
    let q = params.q;
    let mut acc = ComplexSum::new();
    let mut adm = Vec::new();
    for t in 3..=t_max {
        let yt = wt(t);
        if yt == 0.0 {
            continue;
        }
        let phi = euler_phi(t)? as f64;
        let kern = VSumKernel::new(t);
        let mut by_residue = vec![Complex64::new(0.0, 0.0); t as usize];
        for s in 1..=s_max {
            let xs = ws(s);
            if xs == 0.0 {
                continue;
            }
            kern.fill_admissible(q * s, &mut adm);
            let c = s * t;
            by_residue.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let mut total = Complex64::new(0.0, 0.0);
            for i in 0..data.primes.len() {
                let p = data.primes[i];
                if t % p == 0 || data.coeffs[i] == 0.0 {
                    continue;
                }
                let z = data.weight(i, c);
                by_residue[(p % t) as usize] += z;
                total += z;
            }
            let mut inner = ComplexSum::new();
            for m in (1..t).filter(|&m| gcd(m, t) == 1) {
                inner.add(kern.eval(&adm, m, 1) * (by_residue[m as usize] * phi - total));
            }
            acc.add(inner.value() * (xs * yt / (q as f64 * c as f64 * phi)));
        }
    }
    Ok(acc.value())
}

/// Evaluates every `(P, S, T)` combination; rows for invalid blocks carry the error.
pub fn block_grid(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    p_grid: &[f64],
    s_grid: &[f64],
    t_grid: &[f64],
) -> Vec<Result<BlockRow>> {
    let specs: Vec<(f64, f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| s_grid.iter().flat_map(move |&s| t_grid.iter().map(move |&t| (p, s, t))))
        .collect();
    specs
        .par_iter()
        .map(|&(p, s, t)| {
            let spec = BlockSpec::new(params.q, p, s, t)?;
            let value = block_d(params, pair, &spec)?;
            let bound = spec.case_bound(params);
            Ok(BlockRow { spec, value, bound, bound_ratio: value.norm() / bound })
        })
        .collect()
}
