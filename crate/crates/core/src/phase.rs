//! Unimodular phases `e(x) = exp(2πix)`.
//!
//! Rational arguments are reduced exactly in integers first, so two equal
//! fractions always produce the same bits.

use num_complex::Complex64;
use std::f64::consts::TAU;

#[inline]
fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `e(num/den)` with the fraction reduced mod 1 and to lowest terms.
pub fn e_rational(num: i128, den: u64) -> Complex64 {
    assert!(den > 0, "zero denominator");
    let r = num.rem_euclid(den as i128) as u64;
    let g = gcd(r, den);
    e_reduced(r / g, den / g)
}

/// `e(r/d)` for `0 <= r < d` already in lowest terms.
pub(crate) fn e_reduced(r: u64, d: u64) -> Complex64 {
    match (r, d) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        _ => {
            // Use the representative in (-1/2, 1/2] for better accuracy.
            let signed = if 2 * r > d { r as f64 - d as f64 } else { r as f64 };
            let (s, c) = (TAU * signed / d as f64).sin_cos();
            Complex64::new(c, s)
        }
    }
}

/// `e(x)` for a real argument, reduced mod 1 in floating point.
#[inline]
pub fn e_real(x: f64) -> Complex64 {
    let f = x - x.round();
    let (s, c) = (TAU * f).sin_cos();
    Complex64::new(c, s)
}

/// Table of `e(j/t)` for `j = 0..t`, built from exactly reduced fractions.
pub fn phase_table(t: u64) -> Vec<Complex64> {
    let n = t as usize;
    let mut table = vec![Complex64::new(1.0, 0.0); n];
    for j in 1..=n / 2 {
        let g = gcd(j as u64, t);
        let z = e_reduced(j as u64 / g, t / g);
        table[j] = z;
        table[n - j] = z.conj();
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_fractions_give_identical_bits() {
        assert_eq!(e_rational(1, 3), e_rational(4, 12));
        assert_eq!(e_rational(-2, 3), e_rational(1, 3));
        assert_eq!(e_rational(7, 21), phase_table(3)[1]);
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(e_rational(1, 4), Complex64::new(0.0, 1.0));
        assert_eq!(e_rational(5, 10), Complex64::new(-1.0, 0.0));
        assert_eq!(e_rational(9, 12), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn table_is_conjugate_symmetric() {
        let t = phase_table(30);
        for j in 1..30 {
            assert_eq!(t[j], t[30 - j].conj());
            assert!((t[j] - e_real(j as f64 / 30.0)).norm() < 1e-15);
        }
    }
}
