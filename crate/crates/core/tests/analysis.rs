use gamma1_core::analysis::{
    block_grid, block_sum_weighted, char_prime_sum_probe, delta_decay_regression, nonvanishing_bound, BlockCase,
    RegressionResult,
};
use gamma1_core::arith::{character_group, gcd, sieve_primes};
use gamma1_core::family::{FamilyParams, TruncationPolicy};
use gamma1_core::special::DyadicWindow;
use gamma1_core::testfn::fejer_pair;
use num_complex::Complex64;
use num_rational::Rational64;

// Dyadic blocks telescope: in p every prime below q^δ is covered with total
// weight 1, and in s, t the weights sum to 1 up to 1.5·2^J and to W(x/2^J)
// on the last partial dyadic range.
#[test]
fn blocks_sum_to_the_unwindowed_sum() {
    let params = FamilyParams::new(11, 3).unwrap();
    let pair = fejer_pair(1.0).unwrap();
    let grid = [1.0, 2.0, 4.0, 8.0];
    let total: Complex64 = block_grid(&params, &pair, &grid, &grid, &grid)
        .into_iter()
        .map(|r| r.unwrap().value)
        .sum();
    let w = |x: u64| if x as f64 <= 12.0 { 1.0 } else { DyadicWindow::SHAPE.eval(x as f64 / 8.0) };
    let reference = block_sum_weighted(&params, &pair, 15, 15, w, w).unwrap();
    assert!(reference.norm() > 1e-4);
    assert!((total - reference).norm() <= 1e-12 * reference.norm().max(1.0), "{total} vs {reference}");
}

#[test]
fn case_bounds_on_a_block_grid() {
    let params = FamilyParams::new(11, 3).unwrap();
    let pair = fejer_pair(3.0).unwrap();
    let p_grid: Vec<f64> = (0..11).map(|j| 2f64.powi(j)).collect();
    let st = [1.0, 2.0, 4.0, 8.0, 16.0];
    let rows: Vec<_> = block_grid(&params, &pair, &p_grid, &st, &st).into_iter().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 11 * 25);

    // the P^{3/4}/(q²S) ratio stays bounded on case2 and case3 blocks
    let wide: Vec<f64> = rows
        .iter()
        .filter(|r| r.spec.case != BlockCase::Case1 && r.value.norm() > 0.0)
        .map(|r| r.bound_ratio)
        .collect();
    assert!(wide.iter().any(|_| true));
    assert!(wide.iter().all(|r| r.is_finite() && *r < 1.0), "{wide:?}");

    // case1 block sizes follow the case bound: log |D| rises with log bound
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.spec.case == BlockCase::Case1 && r.value.norm() > 0.0)
        .map(|r| (r.bound, r.value.norm()))
        .collect();
    let fit = RegressionResult::log_log(&pts).unwrap();
    assert!(fit.slope > 0.5, "slope {}", fit.slope);
}

#[test]
fn probe_matches_direct_prime_sum() {
    let g = character_group(7).unwrap();
    let z = Complex64::new(0.5, 0.0);
    let w = DyadicWindow::SHAPE;
    for chi in 0..g.len() {
        let got = char_prime_sum_probe(7, chi, z, 1e3, &w).unwrap();
        let want: Complex64 = sieve_primes(2000)
            .into_iter()
            .filter(|&p| gcd(p, 7) == 1)
            .map(|p| g.value(chi, p) * ((p as f64).ln() * w.eval(p as f64 / 1e3) / (p as f64).sqrt()))
            .sum();
        assert!((got.value - want).norm() <= 1e-9 * want.norm().max(1.0));
        assert_eq!(got.trivial_character, chi == 0);
        assert!((got.comparison - 7f64.ln().powi(2)).abs() < 1e-12);
    }
}

#[test]
fn delta_decay_slope_small_grid() {
    let params: Vec<FamilyParams> = [101, 211, 401, 809].iter().map(|&q| FamilyParams::new(q, 3).unwrap()).collect();
    let pol = TruncationPolicy { tail_eps: 1e-9, st_cap: 4000, deterministic: false };
    for (m, n) in [(1, 1), (2, 3)] {
        let (fit, pts) = delta_decay_regression(&params, m, n, &pol).unwrap();
        assert_eq!(pts.len(), 4);
        assert!(fit.slope <= -1.8, "m={m} n={n} slope {}", fit.slope);
    }
}

#[test]
fn corollary_bound() {
    assert_eq!(nonvanishing_bound(Rational64::new(8, 3)).unwrap(), Rational64::new(5, 8));
}
