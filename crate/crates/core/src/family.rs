//! Petersson-type averages for the Γ₁(q) family: the exponential sums
//! `V_qs(m, n; t)`, the off-diagonal term `σ(m, n)` and `Δ(m, n) = δ(m, n) + σ(m, n)`.
//!
//! The `(s, t)` lattice is truncated at `s·t <= U`. Each discarded term is at
//! most `B(m,n) s^{-k} t^{-(k-1)}` (from `|J_ν(x)| <= (x/2)^ν/ν!`,
//! `|V| <= φ(t) <= t` and `|𝒦z| <= 2|z|`), which is summed exactly over `s`
//! and by integral comparison over `t`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, InverseTable};
use crate::error::{LabError, Result};
use crate::phase::{e_real, phase_table};
use crate::special::BesselEvaluator;
use crate::sum::ComplexSum;

/// Level `q` and odd weight `k >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub q: u64,
    pub k: u32,
}

impl FamilyParams {
    pub fn new(q: u64, k: u32) -> Result<Self> {
        if q < 3 {
            return Err(LabError::InvalidInput(format!("q = {q} must be >= 3")));
        }
        if k < 3 || k % 2 == 0 {
            return Err(LabError::InvalidInput(format!("k = {k} must be odd and >= 3")));
        }
        Ok(Self { q, k })
    }

    /// Composite levels are allowed but flagged in reports.
    pub fn q_is_prime(&self) -> bool {
        is_prime(self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Target bound on the discarded lattice mass.
    pub tail_eps: f64,
    /// Hard cap on `U` in `s·t <= U`.
    pub st_cap: u64,
    /// Serial evaluation. Results are bit-identical either way; this only
    /// pins the execution to one thread.
    pub deterministic: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self { tail_eps: 1e-6, st_cap: 20_000, deterministic: false }
    }
}

impl TruncationPolicy {
    pub fn with_eps(tail_eps: f64) -> Self {
        Self { tail_eps, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return Err(LabError::InvalidInput(format!("tail_eps = {} must lie in (0, 1)", self.tail_eps)));
        }
        if self.st_cap == 0 || self.st_cap >= (1 << 31) {
            return Err(LabError::InvalidInput(format!("st_cap = {} out of range", self.st_cap)));
        }
        Ok(())
    }
}

/// A truncated lattice sum with its certified tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeterssonValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Number of `(s, t)` lattice points summed.
    pub terms_used: u64,
    pub certified: bool,
}

/// Turns `TailNotCertified` into its best-effort value.
pub fn best_effort(r: Result<PeterssonValue>) -> Result<PeterssonValue> {
    match r {
        Err(LabError::TailNotCertified { best, .. }) => Ok(best),
        other => other,
    }
}

/// `𝒦z = 2 Re(i^{-k} z)`.
pub fn kappa(k: u32, z: Complex64) -> f64 {
    match (4 - k % 4) % 4 {
        0 => 2.0 * z.re,
        1 => -2.0 * z.im,
        2 => -2.0 * z.re,
        _ => 2.0 * z.im,
    }
}

// Lemire's remainder by a fixed 32-bit divisor.
#[derive(Debug, Clone, Copy)]
struct FastMod {
    d: u64,
    magic: u64,
}

impl FastMod {
    fn new(d: u64) -> Self {
        Self { d, magic: (u64::MAX / d).wrapping_add(1) }
    }

    #[inline(always)]
    fn reduce(&self, a: u32) -> usize {
        let low = self.magic.wrapping_mul(a as u64);
        ((low as u128 * self.d as u128) >> 64) as usize
    }
}

// Above this the index m·u + n·w can overflow u32.
const FASTMOD_LIMIT: u64 = 46_340;

/// Per-modulus tables for evaluating `V_qs(m, n; t)` at many `(s, m, n)`.
pub struct VSumKernel {
    t: u64,
    inv: InverseTable,
    phases: Vec<Complex64>,
    fm: FastMod,
}

impl VSumKernel {
    pub fn new(t: u64) -> Self {
        assert!(t >= 1);
        Self { t, inv: InverseTable::new(t), phases: phase_table(t), fm: FastMod::new(t) }
    }

    pub fn modulus(&self) -> u64 {
        self.t
    }

    pub fn inverses(&self) -> &InverseTable {
        &self.inv
    }

    /// `e(j/t)` for `j = 0..t`.
    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    /// Pairs `(x̄, \overline{x+shift})` over residues `x` with `x(x+shift)` a unit.
    pub fn fill_admissible(&self, shift: u64, out: &mut Vec<(u32, u32)>) {
        out.clear();
        let t = self.t as usize;
        let inv = self.inv.as_slice();
        let r = (shift % self.t) as usize;
        for x in 0..t {
            let u = inv[x];
            if u == crate::arith::NO_INVERSE {
                continue;
            }
            let y = if x + r >= t { x + r - t } else { x + r };
            let w = inv[y];
            if w != crate::arith::NO_INVERSE {
                out.push((u, w));
            }
        }
    }

    /// `Σ e((m x̄ − n \overline{x+qs})/t)` over a precomputed admissible list.
    #[inline]
    pub fn eval(&self, adm: &[(u32, u32)], m: u64, n: u64) -> Complex64 {
        let t = self.t;
        let a = m % t;
        let b = (t - n % t) % t;
        let (mut re, mut im) = (0.0, 0.0);
        if t <= FASTMOD_LIMIT {
            let (a, b) = (a as u32, b as u32);
            for &(u, w) in adm {
                let z = self.phases[self.fm.reduce(a * u + b * w)];
                re += z.re;
                im += z.im;
            }
        } else {
            for &(u, w) in adm {
                let z = self.phases[((a * u as u64 + b * w as u64) % t) as usize];
                re += z.re;
                im += z.im;
            }
        }
        Complex64::new(re, im)
    }

    /// Literal phase `m x̄ − \overline{n x + shift}`; fails where `n x + shift`
    /// is not a unit modulo `t`.
    pub fn eval_literal(&self, shift: u64, m: u64, n: u64) -> Result<Complex64> {
        let t = self.t;
        let mut acc = ComplexSum::new();
        for x in 0..t {
            let (Some(u), Some(_)) = (self.inv.get(x), self.inv.get(x + shift % t)) else {
                continue;
            };
            let lin = ((n % t) * x + shift % t) % t;
            let w = self.inv.get(lin).ok_or(LabError::NotInvertible { a: lin, modulus: t })?;
            let j = ((m % t) * u + (t - w)) % t;
            acc.add(self.phases[j as usize]);
        }
        Ok(acc.value())
    }
}

/// `V_qs(m, n; t) = Σ_{x mod t, (x(x+qs), t) = 1} e((m x̄ − n \overline{x+qs})/t)`.
///
/// This is the reading that reproduces the averaged Kloosterman sum for
/// every `n`; it coincides with the literal one at `n = 1`.
pub fn v_sum(q: u64, s: u64, m: u64, n: u64, t: u64) -> Complex64 {
    assert!(q >= 1 && s >= 1 && t >= 1);
    let kern = VSumKernel::new(t);
    let mut adm = Vec::new();
    kern.fill_admissible(q * s, &mut adm);
    kern.eval(&adm, m, n)
}

/// Sum with the phase `m x̄ − \overline{n x + qs}` read literally.
pub fn v_sum_literal(q: u64, s: u64, m: u64, n: u64, t: u64) -> Result<Complex64> {
    if q == 0 || s == 0 || t == 0 {
        return Err(LabError::InvalidInput("q, s, t must be >= 1".into()));
    }
    VSumKernel::new(t).eval_literal(q * s, m, n)
}

/// `(Σ*_{m mod t} V_qs(m, 1; t), μ(t) V_qs(0, 1; t))`.
pub fn v_sum_m_average(q: u64, s: u64, t: u64) -> (Complex64, Complex64) {
    let kern = VSumKernel::new(t);
    let mut adm = Vec::new();
    kern.fill_admissible(q * s, &mut adm);
    let lhs: ComplexSum = (0..t)
        .filter(|&m| gcd(m, t) == 1)
        .map(|m| kern.eval(&adm, m, 1))
        .collect();
    let mu = crate::arith::mobius(t).expect("t >= 1") as f64;
    (lhs.value(), kern.eval(&adm, 0, 1) * mu)
}

/// `B` with `|term(s,t)| <= B s^{-k} t^{-(k-1)}` after 𝒦, for the pair `(m, n)`.
pub fn tail_constant(params: &FamilyParams, m: u64, n: u64) -> f64 {
    let k = params.k as i32;
    let fact: f64 = (1..k).map(f64::from).product();
    2.0 * TAU.powi(k) * ((m * n) as f64).powf((k - 1) as f64 / 2.0)
        / ((params.q as f64).powi(k) * fact)
}

/// Upper bound for `Σ_{st > U} s^{-k} t^{-(k-1)}`, `k >= 3`.
pub fn lattice_tail(k: u32, u: u64) -> f64 {
    assert!(k >= 3 && u >= 1);
    let kf = k as f64;
    let mut acc = 0.0;
    // s > U: every t contributes, Σ_t t^{-(k-1)} <= 1 + 1/(k-2)
    acc += (1.0 + 1.0 / (kf - 2.0)) * (u as f64).powf(1.0 - kf) / (kf - 1.0);
    for s in (1..=u).rev() {
        let big_t = (u / s) as f64;
        acc += (s as f64).powf(-kf) * big_t.powf(2.0 - kf) / (kf - 2.0);
    }
    acc
}

/// Number of lattice points `(s, t)` with `s·t <= U`.
pub fn lattice_terms(u: u64) -> u64 {
    (1..=u).map(|t| u / t).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub u: u64,
    pub tail_bound: f64,
    pub certified: bool,
}

/// Smallest `U <= cap` with `coef · lattice_tail(k, U) <= eps`, or the cap.
pub fn choose_cutoff(k: u32, coef: f64, eps: f64, cap: u64) -> Cutoff {
    if coef == 0.0 {
        return Cutoff { u: 1, tail_bound: 0.0, certified: true };
    }
    choose_cutoff_by(|u| coef * lattice_tail(k, u), eps, cap)
}

/// Smallest `U <= cap` with `tail(U) <= eps` for a nonincreasing `tail`.
pub fn choose_cutoff_by<F: Fn(u64) -> f64>(tail: F, eps: f64, cap: u64) -> Cutoff {
    let at_cap = tail(cap);
    if at_cap > eps {
        return Cutoff { u: cap, tail_bound: at_cap, certified: false };
    }
    let mut hi = 1u64;
    while hi < cap && tail(hi) > eps {
        hi = (hi * 2).min(cap);
    }
    let mut lo = hi / 2;
    // tail(lo) > eps or lo == 0; tail(hi) <= eps
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if tail(mid) <= eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let u = hi.max(1);
    Cutoff { u, tail_bound: tail(u), certified: true }
}

/// Bound for the whole lattice `Σ_{s,t>=1} s^{-k} t^{-(k-1)}`.
pub fn lattice_total(k: u32) -> f64 {
    let kf = k as f64;
    (1.0 + 1.0 / (kf - 1.0)) * (1.0 + 1.0 / (kf - 2.0))
}

/// Kernel `(2π/(qc)) e((m+n)/(qc)) J_{k-1}(4π√(mn)/(qc))` for `c = 1..=U`
/// and each pair, laid out `[c * pairs + i]`.
pub(crate) fn pair_weights(params: &FamilyParams, pairs: &[(u64, u64)], u: u64) -> Vec<Complex64> {
    let bessel = BesselEvaluator::new(params.k - 1);
    let q = params.q as f64;
    let np = pairs.len();
    let mut w = vec![Complex64::new(0.0, 0.0); (u as usize + 1) * np];
    for c in 1..=u {
        let qc = q * c as f64;
        for (i, &(m, n)) in pairs.iter().enumerate() {
            let j = bessel.eval(4.0 * PI * ((m * n) as f64).sqrt() / qc);
            w[c as usize * np + i] = e_real((m + n) as f64 / qc) * (TAU / qc * j);
        }
    }
    w
}

/// Runs `per_t` for `t = 1..=U` and folds the per-`t` vectors in ascending
/// `t` with compensated sums, so the result does not depend on threading.
pub(crate) fn reduce_over_t<F>(u: u64, width: usize, deterministic: bool, per_t: F) -> Vec<Complex64>
where
    F: Fn(u64) -> Vec<Complex64> + Sync + Send,
{
    let partials: Vec<Vec<Complex64>> = if deterministic {
        (1..=u).map(&per_t).collect()
    } else {
        (1..=u).into_par_iter().map(&per_t).collect()
    };
    let mut acc = vec![ComplexSum::new(); width];
    for p in &partials {
        for (a, z) in acc.iter_mut().zip(p) {
            a.add(*z);
        }
    }
    acc.iter().map(ComplexSum::value).collect()
}

const PAIR_CHUNK: usize = 64;

/// Pre-𝒦 sums `Σ_{st <= U} (2π/(qst)) V_qs(m,n;t) e((m+n)/(qst)) J_{k-1}(4π√(mn)/(qst))`.
pub fn raw_lattice_sums(
    params: &FamilyParams,
    pairs: &[(u64, u64)],
    u: u64,
    deterministic: bool,
) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(pairs.len());
    for chunk in pairs.chunks(PAIR_CHUNK) {
        let weights = pair_weights(params, chunk, u);
        let np = chunk.len();
        let q = params.q;
        let sums = reduce_over_t(u, np, deterministic, |t| {
            let kern = VSumKernel::new(t);
            let mut accs = vec![ComplexSum::new(); np];
            let mut adm = Vec::with_capacity(t as usize);
            for s in 1..=u / t {
                kern.fill_admissible(q * s, &mut adm);
                let row = &weights[(s * t) as usize * np..][..np];
                for (i, &(m, n)) in chunk.iter().enumerate() {
                    accs[i].add(row[i] * kern.eval(&adm, m, n));
                }
            }
            accs.iter().map(ComplexSum::value).collect()
        });
        out.extend(sums);
    }
    out
}

/// `σ(m, n)` for several pairs on a common cutoff large enough for every pair.
pub fn sigma_off_batch(
    pairs: &[(u64, u64)],
    params: &FamilyParams,
    policy: &TruncationPolicy,
) -> Result<Vec<PeterssonValue>> {
    policy.validate()?;
    if let Some(&(m, n)) = pairs.iter().find(|&&(m, n)| m == 0 || n == 0) {
        return Err(LabError::InvalidInput(format!("sigma_off needs m, n >= 1, got ({m}, {n})")));
    }
    let coefs: Vec<f64> = pairs.iter().map(|&(m, n)| tail_constant(params, m, n)).collect();
    let u = coefs
        .iter()
        .map(|&b| choose_cutoff(params.k, b, policy.tail_eps, policy.st_cap).u)
        .max()
        .unwrap_or(1);
    let raw = raw_lattice_sums(params, pairs, u, policy.deterministic);
    let l = lattice_tail(params.k, u);
    let terms = lattice_terms(u);
    Ok(raw
        .iter()
        .zip(&coefs)
        .map(|(z, b)| {
            let tail_bound = b * l;
            PeterssonValue {
                value: kappa(params.k, *z),
                tail_bound,
                terms_used: terms,
                certified: tail_bound <= policy.tail_eps,
            }
        })
        .collect())
}

fn certify(v: PeterssonValue, policy: &TruncationPolicy) -> Result<PeterssonValue> {
    if v.certified {
        Ok(v)
    } else {
        Err(LabError::TailNotCertified { best: v, target: policy.tail_eps })
    }
}

/// `σ(m, n) = 𝒦 Σ_s Σ_t (2π/(qst)) V_qs(m,n;t) e((m+n)/(qst)) J_{k-1}(4π√(mn)/(qst))`.
pub fn sigma_off(m: u64, n: u64, params: &FamilyParams, policy: &TruncationPolicy) -> Result<PeterssonValue> {
    let v = sigma_off_batch(&[(m, n)], params, policy)?[0];
    certify(v, policy)
}

/// `Δ(m, n) = δ(m, n) + σ(m, n)`.
pub fn petersson_delta(
    m: u64,
    n: u64,
    params: &FamilyParams,
    policy: &TruncationPolicy,
) -> Result<PeterssonValue> {
    let diag = if m == n { 1.0 } else { 0.0 };
    let shift = |mut v: PeterssonValue| {
        v.value += diag;
        v
    };
    match sigma_off(m, n, params, policy) {
        Ok(v) => Ok(shift(v)),
        Err(LabError::TailNotCertified { best, target }) => {
            Err(LabError::TailNotCertified { best: shift(best), target })
        }
        Err(e) => Err(e),
    }
}
