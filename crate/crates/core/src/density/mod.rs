//! Prime side of the explicit formula, averaged over the family.

mod lattice;
mod terms;

use serde::{Deserialize, Serialize};

pub use terms::{
    a_coeff, default_kappa_n, eps_higher_power_diag, eps_off_direct, higher_power_budget, m_off_eps_split,
    s1_trivial_character, s2_nontrivial_characters, s_n_direct, s_sq_term, s_sq_term_with,
    OffSplit, SquareTerm,
};

use crate::error::Result;
use crate::family::{FamilyParams, TruncationPolicy};
use crate::testfn::{TestFnKind, TestFunctionPair};
use terms::PrimeSide;

/// Lattice cutoffs and tails of the individual sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub prime_cutoff: u64,
    pub prime_tail: f64,
    /// Tail of the `p | t` part, tighter than `prime_tail`.
    pub eps_off_tail: f64,
    pub square_cutoff: u64,
    pub square_tail: f64,
    pub higher_power_cutoff: u64,
    pub higher_power_tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub q_not_prime: bool,
    pub beyond_theorem_range: bool,
    /// The `O_k(1/log q)` remainder of the explicit formula is not computed.
    pub explicit_formula_remainder_unresolved: bool,
}

/// Itemized prime-side assembly of the one-level density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub q: u64,
    pub k: u32,
    pub delta: f64,
    pub testfn: TestFnKind,
    /// `∫φ`.
    pub main_term: f64,
    /// `|∫φ| (|σ(1,1)| + tail)`, the harmonic-normalization correction.
    pub family_size_correction_bound: f64,
    /// `2 S_N`.
    pub p_term: f64,
    /// `−2 S_sq`.
    pub p2_term: f64,
    pub p2_chi_budget: f64,
    pub higher_power_budget: f64,
    pub s_n: f64,
    pub s_sq: f64,
    pub s1: f64,
    pub s2: f64,
    pub m_off: f64,
    /// `S_N − ε_off`, the second route to `M_off`.
    pub m_off_from_difference: f64,
    pub eps_off: f64,
    pub eps_higher_power: f64,
    /// `|S₁ + S₂ − M_off|`.
    pub reassembly_residual: f64,
    /// `|M_off + ε_off − S_N|`.
    pub split_residual: f64,
    pub tail_bound_total: f64,
    pub tails: TailReport,
    /// `main_term − p_term − p2_term`.
    pub d_total: f64,
    pub certified: bool,
    pub flags: ReportFlags,
}

pub fn one_level_density(
    params: &FamilyParams,
    pair: &TestFunctionPair,
    policy: &TruncationPolicy,
) -> Result<DensityReport> {
    policy.validate()?;
    let side = PrimeSide::new(params, pair);
    let cut = side.cutoff(policy);
    let u = cut.u;
    let det = policy.deterministic;

    let (s_n, extra) = side.s_n_at(u, &[(1, 1)], det);
    let sigma11 = extra[0];
    let sigma11_tail = crate::family::tail_constant(params, 1, 1) * crate::family::lattice_tail(params.k, u);

    let (m_off, s1, s2, eps_off) = if side.primes.is_empty() {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let sums = side.off_diagonal_at(u, det);
        let eps = side.project(side.eps_off_at(u, det));
        (side.project(sums.m_off), side.project(sums.s1), side.project(sums.s2), eps)
    };

    let sq = s_sq_term(params, pair, policy)?;
    let (higher, higher_u) = terms::eps_higher_with_cutoff(params, pair, policy);
    let hp_budget = higher_power_budget(params, pair);

    let p_term = 2.0 * s_n;
    let p2_term = -2.0 * sq.value;
    let main_term = pair.integral_phi;
    let tails = TailReport {
        prime_cutoff: u,
        prime_tail: cut.tail_bound,
        eps_off_tail: side.eps_off_tail(u),
        square_cutoff: sq.cutoff,
        square_tail: sq.tail_bound,
        higher_power_cutoff: higher_u,
        higher_power_tail: higher.tail_bound,
    };
    Ok(DensityReport {
        q: params.q,
        k: params.k,
        delta: pair.delta,
        testfn: pair.kind,
        main_term,
        family_size_correction_bound: main_term.abs() * (sigma11.abs() + sigma11_tail),
        p_term,
        p2_term,
        p2_chi_budget: 2.0 * sq.chi_budget,
        higher_power_budget: hp_budget,
        s_n,
        s_sq: sq.value,
        s1,
        s2,
        m_off,
        m_off_from_difference: s_n - eps_off,
        eps_off,
        eps_higher_power: higher.value,
        reassembly_residual: (s1 + s2 - m_off).abs(),
        split_residual: (m_off + eps_off - s_n).abs(),
        tail_bound_total: 2.0 * cut.tail_bound + 2.0 * sq.tail_bound,
        tails,
        d_total: main_term - p_term - p2_term,
        certified: cut.certified && sq.certified && higher.certified,
        flags: ReportFlags {
            q_not_prime: !params.q_is_prime(),
            beyond_theorem_range: pair.beyond_theorem_range(),
            explicit_formula_remainder_unresolved: true,
        },
    })
}
