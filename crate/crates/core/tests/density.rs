use gamma1_core::density::{a_coeff, eps_off_direct, m_off_eps_split, s1_trivial_character, s2_nontrivial_characters, s_n_direct};
use gamma1_core::family::{best_effort, sigma_off_batch, FamilyParams, TruncationPolicy};
use gamma1_core::testfn::{bump_pair, fejer_pair};
use gamma1_core::one_level_density;

fn policy(eps: f64) -> TruncationPolicy {
    TruncationPolicy::with_eps(eps)
}

#[test]
fn prime_coefficient_formula() {
    let pair = fejer_pair(1.0).unwrap();
    let want = 2f64.ln() / 2f64.sqrt() * 0.9;
    assert!((a_coeff(2, 1024, &pair) - want).abs() <= 1e-12);
    assert_eq!(a_coeff(1, 1024, &pair), 0.0);
    assert_eq!(a_coeff(6, 1024, &pair), 0.0);
    // beyond the support
    assert_eq!(a_coeff(1031, 1024, &pair), 0.0);
}

#[test]
fn narrow_support_leaves_main_term() {
    let params = FamilyParams::new(101, 3).unwrap();
    let pair = fejer_pair(0.1).unwrap();
    let r = one_level_density(&params, &pair, &policy(1e-6)).unwrap();
    assert_eq!(r.p_term, 0.0);
    assert_eq!(r.d_total, r.main_term);
    assert!(r.certified);
}

#[test]
fn assembly_identities_small_level() {
    for (q, pair) in [(31u64, fejer_pair(1.0).unwrap()), (43, bump_pair(1.0).unwrap())] {
        let params = FamilyParams::new(q, 3).unwrap();
        let pol = policy(1e-4);
        let r = one_level_density(&params, &pair, &pol).unwrap();
        let tails = r.tails.prime_tail + r.tails.eps_off_tail;
        assert!(r.reassembly_residual <= 1e-8 + tails, "q={q} {}", r.reassembly_residual);
        assert!(r.split_residual <= tails, "q={q} {}", r.split_residual);
        assert_eq!(r.d_total, r.main_term - r.p_term - r.p2_term);

        let split = m_off_eps_split(&params, &pair, &pol).unwrap();
        assert!((split.m_off.value - split.m_off_from_difference).abs() <= 2.0 * tails);
        let sn = s_n_direct(&params, &pair, &pol).unwrap();
        assert!((sn.value - r.s_n).abs() <= 1e-12);
        let s1 = best_effort(s1_trivial_character(&params, &pair, &pol)).unwrap();
        let s2 = best_effort(s2_nontrivial_characters(&params, &pair, &pol)).unwrap();
        assert!((s1.value + s2.value - r.m_off).abs() <= 1e-8 + s1.tail_bound + s2.tail_bound);
        let eps = eps_off_direct(&params, &pair, &pol).unwrap();
        assert!((eps.value - r.eps_off).abs() <= eps.tail_bound + r.tails.eps_off_tail);
    }
}

#[test]
fn tighter_target_never_loosens_the_tail() {
    let params = FamilyParams::new(101, 3).unwrap();
    let pairs = [(1, 1), (2, 3)];
    let mut last = f64::INFINITY;
    for eps in [1e-3, 1e-4, 1e-5, 1e-6] {
        let v = sigma_off_batch(&pairs, &params, &policy(eps)).unwrap();
        for x in &v {
            assert!(x.certified, "eps={eps}");
            assert!(x.tail_bound <= eps);
        }
        assert!(v[0].tail_bound <= last);
        last = v[0].tail_bound;
    }
}

#[test]
fn parallel_and_serial_agree_bitwise() {
    let params = FamilyParams::new(53, 3).unwrap();
    let pair = fejer_pair(1.0).unwrap();
    let mut pol = policy(1e-4);
    let a = one_level_density(&params, &pair, &pol).unwrap();
    pol.deterministic = true;
    let b = one_level_density(&params, &pair, &pol).unwrap();
    assert_eq!(a.d_total.to_bits(), b.d_total.to_bits());
    assert_eq!(a.s2.to_bits(), b.s2.to_bits());
    assert_eq!(a, b);
}

#[test]
fn composite_level_is_flagged() {
    let params = FamilyParams::new(45, 3).unwrap();
    let pair = fejer_pair(1.0).unwrap();
    let r = one_level_density(&params, &pair, &policy(1e-4)).unwrap();
    assert!(r.flags.q_not_prime);
    assert!(r.d_total.is_finite());
    let wide = fejer_pair(3.0).unwrap();
    assert!(wide.beyond_theorem_range());
}
