//! One pass over the `(s, t)` lattice producing `M_off`, `S₁` and `S₂`.
//!
//! For each `(s, t)`, `V_qs(m, 1; t)` is needed at every residue `m`; it is
//! the length-`t` inverse DFT of `u ↦ e(−w(u)/t)` over admissible `u = x̄`.
//! The character sums `Σ_m V(m) χ̄(m)` and `Σ_p χ(p) c_p` are separable DFTs
//! over the cyclic factors of `(Z/tZ)^*`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::{ArithTable, GroupTransform, UnitGroup};
use crate::family::{pair_weights, reduce_over_t, FamilyParams, VSumKernel};
use crate::sum::ComplexSum;

/// Pre-𝒦, pre-`1/log q` lattice sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OffDiagonalSums {
    pub m_off: Complex64,
    pub s1: Complex64,
    pub s2: Complex64,
}

// Above this many (c, p) entries the prime weights are recomputed per t.
const WEIGHT_TABLE_LIMIT: usize = 1 << 22;

pub(crate) struct PrimeWeights {
    primes: Vec<u64>,
    coeffs: Vec<f64>,
    table: Option<Vec<Complex64>>,
    params: FamilyParams,
}

impl PrimeWeights {
    pub fn new(params: &FamilyParams, primes: &[u64], coeffs: &[f64], u: u64) -> Self {
        let table = ((u as usize + 1) * primes.len() <= WEIGHT_TABLE_LIMIT).then(|| {
            let pairs: Vec<(u64, u64)> = primes.iter().map(|&p| (p, 1)).collect();
            let mut w = pair_weights(params, &pairs, u);
            let np = primes.len();
            for (j, z) in w.iter_mut().enumerate() {
                *z *= coeffs[j % np.max(1)];
            }
            w
        });
        Self { primes: primes.to_vec(), coeffs: coeffs.to_vec(), table, params: *params }
    }

    /// `a_p (2π/(qc)) e((p+1)/(qc)) J_{k-1}(4π√p/(qc))` for every prime.
    pub fn row(&self, c: u64, out: &mut Vec<Complex64>) {
        let np = self.primes.len();
        out.clear();
        match &self.table {
            Some(t) => out.extend_from_slice(&t[c as usize * np..][..np]),
            None => {
                let pairs: Vec<(u64, u64)> = self.primes.iter().map(|&p| (p, 1)).collect();
                let w = pair_weights_single(&self.params, &pairs, c);
                out.extend(w.iter().zip(&self.coeffs).map(|(z, a)| z * a));
            }
        }
    }
}

fn pair_weights_single(params: &FamilyParams, pairs: &[(u64, u64)], c: u64) -> Vec<Complex64> {
    use crate::phase::e_real;
    use crate::special::BesselEvaluator;
    use std::f64::consts::{PI, TAU};
    let bessel = BesselEvaluator::new(params.k - 1);
    let qc = params.q as f64 * c as f64;
    pairs
        .iter()
        .map(|&(m, n)| {
            let j = bessel.eval(4.0 * PI * ((m * n) as f64).sqrt() / qc);
            e_real((m + n) as f64 / qc) * (TAU / qc * j)
        })
        .collect()
}

pub(crate) fn off_diagonal_sums(
    params: &FamilyParams,
    weights: &PrimeWeights,
    arith: &ArithTable,
    u: u64,
    deterministic: bool,
) -> OffDiagonalSums {
    let q = params.q;
    let primes = &weights.primes;
    let sums = reduce_over_t(u, 3, deterministic, |t| {
        let kern = VSumKernel::new(t);
        let group = UnitGroup::new(t).expect("t within range");
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_inverse(t as usize);
        let transform = GroupTransform::new(&group, &mut planner);
        let phi = group.size();
        let mu = arith.mobius(t) as f64;
        let phases = kern.phases();

        // primes coprime to t with their residue and group index
        let coprime: Vec<(usize, usize, usize)> = primes
            .iter()
            .enumerate()
            .filter(|(_, &p)| t % p != 0)
            .map(|(i, &p)| {
                let r = (p % t) as usize;
                (i, r, group.index_of(r as u64).expect("p coprime to t"))
            })
            .collect();

        let mut acc = [ComplexSum::new(), ComplexSum::new(), ComplexSum::new()];
        let mut adm = Vec::with_capacity(t as usize);
        let mut v = vec![Complex64::new(0.0, 0.0); t as usize];
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut f = vec![Complex64::new(0.0, 0.0); phi];
        let mut g = vec![Complex64::new(0.0, 0.0); phi];
        let mut row = Vec::with_capacity(primes.len());

        for s in 1..=u / t {
            weights.row(s * t, &mut row);
            kern.fill_admissible(q * s, &mut adm);

            v.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for &(x_inv, w) in &adm {
                v[x_inv as usize] = phases[((t - w as u64) % t) as usize];
            }
            fft.process_with_scratch(&mut v, &mut scratch);

            let mut m_off = ComplexSum::new();
            let mut csum = ComplexSum::new();
            g.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for &(i, r, gi) in &coprime {
                m_off.add(row[i] * v[r]);
                csum.add(row[i]);
                g[gi] += row[i];
            }
            acc[0].add(m_off.value());

            if mu != 0.0 {
                let v0 = kern.eval(&adm, 0, 1);
                acc[1].add(v0 * (mu / phi as f64) * csum.value());
            }

            if phi > 1 {
                for (e, z) in f.iter_mut().enumerate() {
                    *z = v[group.residue_of(e) as usize];
                }
                transform.forward(&mut f);
                transform.inverse(&mut g);
                let mut s2 = ComplexSum::new();
                for a in 1..phi {
                    s2.add(f[a] * g[a]);
                }
                acc[2].add(s2.value() / phi as f64);
            }
        }
        acc.iter().map(ComplexSum::value).collect()
    });
    OffDiagonalSums { m_off: sums[0], s1: sums[1], s2: sums[2] }
}

/// `Σ_p a_p Σ_{t'} Σ_s (lattice kernel at t = t'p) V_qs(p, 1; t'p)` over `s t' p <= U`.
pub(crate) fn eps_off_sum(
    params: &FamilyParams,
    primes: &[u64],
    coeffs: &[f64],
    u: u64,
    deterministic: bool,
) -> Complex64 {
    let q = params.q;
    let active: Vec<usize> = (0..primes.len()).filter(|&i| primes[i] <= u).collect();
    if active.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let per_prime = reduce_over_t(active.len() as u64, 1, deterministic, |idx| {
        let i = active[idx as usize - 1];
        let p = primes[i];
        let mut acc = ComplexSum::new();
        let mut adm = Vec::new();
        for t_red in 1..=u / p {
            let t = t_red * p;
            let kern = VSumKernel::new(t);
            for s in 1..=u / t {
                let w = pair_weights_single(params, &[(p, 1)], s * t)[0];
                kern.fill_admissible(q * s, &mut adm);
                acc.add(w * kern.eval(&adm, p, 1));
            }
        }
        vec![acc.value() * coeffs[i]]
    });
    per_prime[0]
}
