//! Individual prime-side terms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::{eps_off_sum, off_diagonal_sums, OffDiagonalSums, PrimeWeights};
use crate::arith::{sieve_primes, von_mangoldt, ArithTable};
use crate::error::{LabError, Result};
use crate::family::{
    choose_cutoff, choose_cutoff_by, kappa, lattice_tail, lattice_terms, lattice_total, pair_weights, raw_lattice_sums, reduce_over_t,
    tail_constant, Cutoff, FamilyParams, PeterssonValue, TruncationPolicy, VSumKernel,
};
use crate::sum::{ComplexSum, NeumaierSum};
use crate::testfn::TestFunctionPair;

/// `a_n = Λ(n)/√n · φ̂(log n / log q)`.
pub fn a_coeff(n: u64, q: u64, pair: &TestFunctionPair) -> f64 {
    if n <= 1 || q < 2 {
        return 0.0;
    }
    let lam = von_mangoldt(n).unwrap_or(0.0);
    if lam == 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    lam / nf.sqrt() * pair.phi_hat(nf.ln() / (q as f64).ln())
}

/// Primes `p` with `φ̂(j log p / log q) ≠ 0`.
fn supported_primes(q: u64, pair: &TestFunctionPair, j: u32) -> Vec<u64> {
    let log_q = (q as f64).ln();
    let limit = (pair.delta * log_q / j as f64).exp().ceil() as u64 + 1;
    sieve_primes(limit)
        .into_iter()
        .filter(|&p| pair.phi_hat(j as f64 * (p as f64).ln() / log_q) != 0.0)
        .collect()
}

/// Primes in the support of `φ̂` and their coefficients `a_p`.
pub(crate) struct PrimeSide {
    pub params: FamilyParams,
    pub log_q: f64,
    pub primes: Vec<u64>,
    pub coeffs: Vec<f64>,
}

impl PrimeSide {
    pub fn new(params: &FamilyParams, pair: &TestFunctionPair) -> Self {
        let primes = supported_primes(params.q, pair, 1);
        let coeffs = primes.iter().map(|&p| a_coeff(p, params.q, pair)).collect();
        Self { params: *params, log_q: (params.q as f64).ln(), primes, coeffs }
    }

    /// Cutoff for `S_N`; it also bounds the tails of `M_off`, `ε_off` and `S₁`.
    pub fn cutoff(&self, policy: &TruncationPolicy) -> Cutoff {
        let coef: f64 = self
            .primes
            .iter()
            .zip(&self.coeffs)
            .map(|(&p, a)| a.abs() * tail_constant(&self.params, p, 1))
            .sum::<f64>()
            / self.log_q;
        choose_cutoff(self.params.k, coef, policy.tail_eps, policy.st_cap)
    }

    /// Tail of the `p | t` part alone: with `t = t'p` each term carries an
    /// extra `p^{-(k-1)}` and the remaining lattice is `s t' > U/p`.
    pub fn eps_off_tail(&self, u: u64) -> f64 {
        let k = self.params.k;
        self.primes
            .iter()
            .zip(&self.coeffs)
            .map(|(&p, a)| {
                let rest = if u / p == 0 { lattice_total(k) } else { lattice_tail(k, u / p) };
                a.abs() * tail_constant(&self.params, p, 1) * (p as f64).powi(1 - k as i32) * rest
            })
            .sum::<f64>()
            / self.log_q
    }

    fn pairs(&self) -> Vec<(u64, u64)> {
        self.primes.iter().map(|&p| (p, 1)).collect()
    }

    /// `(1/log q) Σ_p a_p σ(p, 1)` at cutoff `u`, plus `σ` for extra pairs.
    pub fn s_n_at(&self, u: u64, extra: &[(u64, u64)], deterministic: bool) -> (f64, Vec<f64>) {
        let mut pairs = self.pairs();
        pairs.extend_from_slice(extra);
        let raw = raw_lattice_sums(&self.params, &pairs, u, deterministic);
        let k = self.params.k;
        let np = self.primes.len();
        let s_n = raw[..np]
            .iter()
            .zip(&self.coeffs)
            .map(|(z, a)| a * kappa(k, *z))
            .collect::<NeumaierSum>()
            .value()
            / self.log_q;
        let extra_vals = raw[np..].iter().map(|z| kappa(k, *z)).collect();
        (s_n, extra_vals)
    }

    pub fn off_diagonal_at(&self, u: u64, deterministic: bool) -> OffDiagonalSums {
        let weights = PrimeWeights::new(&self.params, &self.primes, &self.coeffs, u);
        let arith = ArithTable::new(u);
        off_diagonal_sums(&self.params, &weights, &arith, u, deterministic)
    }

    pub fn eps_off_at(&self, u: u64, deterministic: bool) -> Complex64 {
        eps_off_sum(&self.params, &self.primes, &self.coeffs, u, deterministic)
    }

    pub fn project(&self, z: Complex64) -> f64 {
        kappa(self.params.k, z) / self.log_q
    }
}

fn finish(value: f64, tail_bound: f64, cut: &Cutoff, policy: &TruncationPolicy) -> Result<PeterssonValue> {
    let v = PeterssonValue {
        value,
        tail_bound,
        terms_used: lattice_terms(cut.u),
        certified: tail_bound <= policy.tail_eps,
    };
    if v.certified {
        Ok(v)
    } else {
        Err(LabError::TailNotCertified { best: v, target: policy.tail_eps })
    }
}

/// `S_N = (1/log q) Σ_{p < q^δ} a_p σ(p, 1)`.
pub fn s_n_direct(params: &FamilyParams, pair: &TestFunctionPair, policy: &TruncationPolicy) -> Result<PeterssonValue> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    let cut = side.cutoff(policy);
    let (value, _) = side.s_n_at(cut.u, &[], policy.deterministic);
    finish(value, cut.tail_bound, &cut, policy)
}

/// `M_off` by two routes together with the explicitly summed `ε_off`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OffSplit {
    pub s_n: PeterssonValue,
    /// Restricted `(p, t) = 1` lattice sum.
    pub m_off: PeterssonValue,
    /// `S_N − ε_off`.
    pub m_off_from_difference: f64,
    pub eps_off: PeterssonValue,
}

pub fn m_off_eps_split(params: &FamilyParams, pair: &TestFunctionPair, policy: &TruncationPolicy) -> Result<OffSplit> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    let cut = side.cutoff(policy);
    let (s_n, _) = side.s_n_at(cut.u, &[], policy.deterministic);
    let sums = side.off_diagonal_at(cut.u, policy.deterministic);
    let eps = side.project(side.eps_off_at(cut.u, policy.deterministic));
    let mk = |value, tail_bound| PeterssonValue {
        value,
        tail_bound,
        terms_used: lattice_terms(cut.u),
        certified: cut.certified,
    };
    let split = OffSplit {
        s_n: mk(s_n, cut.tail_bound),
        m_off: mk(side.project(sums.m_off), cut.tail_bound),
        m_off_from_difference: s_n - eps,
        eps_off: mk(eps, side.eps_off_tail(cut.u)),
    };
    if cut.certified {
        Ok(split)
    } else {
        Err(LabError::TailNotCertified { best: split.m_off, target: policy.tail_eps })
    }
}

/// `ε_off` alone, on the smallest cutoff certifying its own tail.
pub fn eps_off_direct(params: &FamilyParams, pair: &TestFunctionPair, policy: &TruncationPolicy) -> Result<PeterssonValue> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    if side.primes.is_empty() {
        return Ok(PeterssonValue { value: 0.0, tail_bound: 0.0, terms_used: 0, certified: true });
    }
    let cut = choose_cutoff_by(|u| side.eps_off_tail(u), policy.tail_eps, policy.st_cap);
    let value = side.project(side.eps_off_at(cut.u, policy.deterministic));
    finish(value, cut.tail_bound, &cut, policy)
}

/// Trivial-character part `S₁`, via the Ramanujan reduction `μ(t) V_qs(0,1;t)`.
pub fn s1_trivial_character(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
) -> Result<PeterssonValue> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    let cut = side.cutoff(policy);
    let sums = side.off_diagonal_at(cut.u, policy.deterministic);
    finish(side.project(sums.s1), cut.tail_bound, &cut, policy)
}

/// Non-trivial-character part `S₂`.
pub fn s2_nontrivial_characters(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
) -> Result<PeterssonValue> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    let cut = side.cutoff(policy);
    let sums = side.off_diagonal_at(cut.u, policy.deterministic);
    finish(side.project(sums.s2), 2.0 * cut.tail_bound, &cut, policy)
}

/// The `p²` term with its character-count budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquareTerm {
    /// `−(1/log q) Σ_p (log p/p) φ̂(2 log p/log q) [Δ(p², 1) − T(p)]`.
    pub value: f64,
    /// `(1/log q) Σ_p (log p/p) |φ̂(2 log p/log q)| κ_N`.
    pub chi_budget: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
    pub certified: bool,
}

/// Default allowance for the harmonic count of each nebentypus.
pub fn default_kappa_n(q: u64) -> f64 {
    10.0 * (q as f64).powf(-1.5)
}

pub fn s_sq_term(params: &FamilyParams, pair: &TestFunctionPair, policy: &TruncationPolicy) -> Result<SquareTerm> {
    s_sq_term_with(params, pair, policy, default_kappa_n(params.q))
}

pub fn s_sq_term_with(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
    kappa_n: f64,
) -> Result<SquareTerm> {
    policy.validate()?;
    let q = params.q;
    let log_q = (q as f64).ln();
    let primes = supported_primes(q, pair, 2);
    if primes.is_empty() {
        return Ok(SquareTerm { value: 0.0, chi_budget: 0.0, tail_bound: 0.0, cutoff: 0, certified: true });
    }
    let weight: Vec<f64> = primes
        .iter()
        .map(|&p| (p as f64).ln() / p as f64 * pair.phi_hat(2.0 * (p as f64).ln() / log_q))
        .collect();
    let coef: f64 = primes
        .iter()
        .zip(&weight)
        .map(|(&p, w)| w.abs() * tail_constant(params, p * p, 1))
        .sum::<f64>()
        / log_q;
    let cut = choose_cutoff(params.k, coef, policy.tail_eps, policy.st_cap);
    let pairs: Vec<(u64, u64)> = primes.iter().map(|&p| (p * p, 1)).collect();
    let raw = raw_lattice_sums(params, &pairs, cut.u, policy.deterministic);
    let mut acc = NeumaierSum::new();
    let mut budget = NeumaierSum::new();
    for ((&p, w), z) in primes.iter().zip(&weight).zip(&raw) {
        let residue = p % q;
        let t_p = if residue == 1 { 1.0 } else if residue == q - 1 { -1.0 } else { 0.0 };
        acc.add(w * (kappa(params.k, *z) - t_p));
        budget.add(w.abs() * kappa_n);
    }
    Ok(SquareTerm {
        value: -acc.value() / log_q,
        chi_budget: budget.value() / log_q,
        tail_bound: cut.tail_bound,
        cutoff: cut.u,
        certified: cut.certified,
    })
}

/// `(1/log q) Σ_{b>=3} Σ_{p^b < q^δ} (2 log p / p^{b/2}) |φ̂(b log p / log q)|`.
pub fn higher_power_budget(params: &FamilyParams, pair: &TestFunctionPair) -> f64 {
    let log_q = (params.q as f64).ln();
    let mut acc = NeumaierSum::new();
    for p in supported_primes(params.q, pair, 3) {
        let lp = (p as f64).ln();
        let mut b = 3;
        loop {
            let h = pair.phi_hat(b as f64 * lp / log_q);
            if h == 0.0 {
                break;
            }
            acc.add(2.0 * lp / (p as f64).powf(b as f64 / 2.0) * h.abs());
            b += 1;
        }
    }
    acc.value() / log_q
}

/// Prime powers `p^j`, `j >= 2`, with `a_{p^j} ≠ 0`, as `(p, p^j, a_{p^j})`.
fn higher_prime_powers(q: u64, pair: &TestFunctionPair) -> Vec<(u64, u64, f64)> {
    let mut out = Vec::new();
    for p in supported_primes(q, pair, 2) {
        let mut pj = p * p;
        loop {
            let a = a_coeff(pj, q, pair);
            if a == 0.0 {
                break;
            }
            out.push((p, pj, a));
            pj = match pj.checked_mul(p) {
                Some(v) => v,
                None => break,
            };
        }
    }
    out
}

/// `𝒦 Σ_s Σ_t (2π μ(t)/(qstφ(t))) V_qs(0,1;t) Σ_{p^j, j>=2, (p,t)=1} a_{p^j} e((p^j+1)/(qst)) J_{k-1}(4π√(p^j)/(qst))`.
pub fn eps_higher_power_diag(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
) -> Result<PeterssonValue> {
    policy.validate()?;
    let (v, _) = eps_higher_with_cutoff(params, pair, policy);
    if v.certified {
        Ok(v)
    } else {
        Err(LabError::TailNotCertified { best: v, target: policy.tail_eps })
    }
}

pub(crate) fn eps_higher_with_cutoff(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
) -> (PeterssonValue, u64) {
    let powers = higher_prime_powers(params.q, pair);
    if powers.is_empty() {
        return (PeterssonValue { value: 0.0, tail_bound: 0.0, terms_used: 0, certified: true }, 0);
    }
    let coef: f64 = powers
        .iter()
        .map(|&(_, pj, a)| a.abs() * tail_constant(params, pj, 1))
        .sum();
    let cut = choose_cutoff(params.k, coef, policy.tail_eps, policy.st_cap);
    let u = cut.u;
    let pairs: Vec<(u64, u64)> = powers.iter().map(|&(_, pj, _)| (pj, 1)).collect();
    let np = pairs.len();
    let mut weights = pair_weights(params, &pairs, u);
    for (j, z) in weights.iter_mut().enumerate() {
        *z *= powers[j % np].2;
    }
    let arith = ArithTable::new(u);
    let q = params.q;
    let total = reduce_over_t(u, 1, policy.deterministic, |t| {
        let mu = arith.mobius(t);
        if mu == 0 {
            return vec![Complex64::new(0.0, 0.0)];
        }
        let scale = mu as f64 / arith.phi(t) as f64;
        let kern = VSumKernel::new(t);
        let mut adm = Vec::with_capacity(t as usize);
        let mut acc = ComplexSum::new();
        for s in 1..=u / t {
            let row = &weights[(s * t) as usize * np..][..np];
            let inner: ComplexSum = powers
                .iter()
                .zip(row)
                .filter(|((p, _, _), _)| t == 1 || t % p != 0)
                .map(|(_, w)| *w)
                .collect();
            kern.fill_admissible(q * s, &mut adm);
            acc.add(kern.eval(&adm, 0, 1) * scale * inner.value());
        }
        vec![acc.value()]
    });
    let v = PeterssonValue {
        value: kappa(params.k, total[0]),
        tail_bound: cut.tail_bound,
        terms_used: lattice_terms(u),
        certified: cut.certified,
    };
    (v, u)
}
