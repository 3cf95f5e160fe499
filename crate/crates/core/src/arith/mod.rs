//! Integer arithmetic, multiplicative functions and Dirichlet characters.

mod characters;

pub use characters::{
    character_group, odd_character_average, odd_orthogonality_closed_form, CharacterGroup,
    DirichletCharacter, GroupAxis, GroupTransform, UnitGroup, DEFAULT_TABLE_CAP,
};

use crate::error::{LabError, Result};

/// Primes `<= limit` in ascending order (sieve of Eratosthenes).
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn require_positive(n: u64, what: &str) -> Result<()> {
    if n == 0 {
        Err(LabError::InvalidInput(format!("{what} requires n >= 1")))
    } else {
        Ok(())
    }
}

pub fn euler_phi(n: u64) -> Result<u64> {
    require_positive(n, "euler_phi")?;
    Ok(factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

pub fn mobius(n: u64) -> Result<i8> {
    require_positive(n, "mobius")?;
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        Ok(0)
    } else if f.len() % 2 == 0 {
        Ok(1)
    } else {
        Ok(-1)
    }
}

/// `log p` when `n = p^b`, otherwise 0.
pub fn von_mangoldt(n: u64) -> Result<f64> {
    require_positive(n, "von_mangoldt")?;
    match factorize(n).as_slice() {
        [(p, _)] => Ok((*p as f64).ln()),
        _ => Ok(0.0),
    }
}

pub fn divisor_count(n: u64) -> Result<u64> {
    require_positive(n, "divisor_count")?;
    Ok(factorize(n).iter().map(|&(_, e)| e as u64 + 1).product())
}

pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `t`; returns 0 when `t = 1`.
pub fn mod_inverse(a: u64, t: u64) -> Result<u64> {
    if t == 0 {
        return Err(LabError::InvalidInput("modulus must be >= 1".into()));
    }
    if t == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (t as i128, (a % t) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(LabError::NotInvertible { a, modulus: t });
    }
    Ok(s0.rem_euclid(t as i128) as u64)
}

// Extended Euclid on moduli below 2^31; `None` when not a unit.
#[inline]
fn small_inverse(a: i64, t: i64) -> Option<i64> {
    let (mut r0, mut r1) = (t, a);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(t))
}

/// Smallest primitive root modulo an odd prime `p`.
pub fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = factorize(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&(r, _)| mod_pow(g, (p - 1) / r, p) != 1))
        .expect("odd primes have primitive roots")
}

/// Marker for residues without an inverse in [`InverseTable`].
pub const NO_INVERSE: u32 = u32::MAX;

/// All inverses modulo `t`, with [`NO_INVERSE`] at non-units.
#[derive(Debug, Clone)]
pub struct InverseTable {
    modulus: u64,
    inv: Vec<u32>,
}

impl InverseTable {
    pub fn new(t: u64) -> Self {
        assert!(t >= 1 && t < (1 << 31), "modulus out of range");
        let n = t as usize;
        let mut inv = vec![NO_INVERSE; n];
        if t == 1 {
            inv[0] = 0;
            return Self { modulus: t, inv };
        }
        inv[1] = 1;
        for x in 2..n {
            if inv[x] != NO_INVERSE {
                continue;
            }
            if let Some(y) = small_inverse(x as i64, t as i64) {
                inv[x] = y as u32;
                inv[y as usize] = x as u32;
            }
        }
        Self { modulus: t, inv }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, x: u64) -> Option<u64> {
        match self.inv[(x % self.modulus) as usize] {
            NO_INVERSE => None,
            y => Some(y as u64),
        }
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.inv
    }
}

/// Smallest-prime-factor sieve giving φ and μ for every `n <= limit`.
#[derive(Debug, Clone)]
pub struct ArithTable {
    phi: Vec<u64>,
    mu: Vec<i8>,
}

impl ArithTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] == 0 {
                let mut j = i;
                while j <= n {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let mut phi = vec![0u64; n + 1];
        let mut mu = vec![0i8; n + 1];
        if n >= 1 {
            phi[1] = 1;
            mu[1] = 1;
        }
        for i in 2..=n {
            let p = spf[i] as usize;
            let m = i / p;
            if m % p == 0 {
                phi[i] = phi[m] * p as u64;
                mu[i] = 0;
            } else {
                phi[i] = phi[m] * (p as u64 - 1);
                mu[i] = -mu[m];
            }
        }
        Self { phi, mu }
    }

    pub fn limit(&self) -> u64 {
        self.phi.len() as u64 - 1
    }

    #[inline]
    pub fn phi(&self, n: u64) -> u64 {
        self.phi[n as usize]
    }

    #[inline]
    pub fn mobius(&self, n: u64) -> i8 {
        self.mu[n as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&n| (2..n).all(|d| n % d != 0))
            .collect()
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(10), vec![2, 3, 5, 7]);
        assert!(sieve_primes(1).is_empty());
        assert!(sieve_primes(0).is_empty());
        let p = sieve_primes(100);
        assert_eq!(p.len(), 25);
        assert_eq!(*p.last().unwrap(), 97);
        assert_eq!(sieve_primes(1000), trial_division_primes(1000));
    }

    #[test]
    fn multiplicative_examples() {
        assert_eq!(euler_phi(5).unwrap(), 4);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(mobius(1).unwrap(), 1);
        assert!((von_mangoldt(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(von_mangoldt(12).unwrap(), 0.0);
        assert_eq!(von_mangoldt(1).unwrap(), 0.0);
        assert_eq!(divisor_count(12).unwrap(), 6);
        for f in [euler_phi(0).is_err(), mobius(0).is_err(), von_mangoldt(0).is_err(), divisor_count(0).is_err()] {
            assert!(f);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(3, 7).unwrap(), 5);
        assert_eq!(mod_inverse(2, 3).unwrap(), 2);
        assert_eq!(mod_inverse(5, 1).unwrap(), 0);
        assert_eq!(
            mod_inverse(2, 4),
            Err(LabError::NotInvertible { a: 2, modulus: 4 })
        );
    }

    #[test]
    fn table_agrees_with_direct_functions() {
        let table = ArithTable::new(500);
        for n in 1..=500 {
            assert_eq!(table.phi(n), euler_phi(n).unwrap(), "phi({n})");
            assert_eq!(table.mobius(n), mobius(n).unwrap(), "mu({n})");
        }
    }

    #[test]
    fn inverse_table_matches_mod_inverse() {
        for t in 1..80u64 {
            let tab = InverseTable::new(t);
            for x in 0..t {
                assert_eq!(tab.get(x), mod_inverse(x, t).ok(), "x={x} t={t}");
            }
        }
    }

    #[test]
    fn primitive_roots_generate() {
        for p in sieve_primes(200).into_iter().skip(1) {
            let g = primitive_root(p);
            let mut seen = std::collections::HashSet::new();
            let mut x = 1;
            for _ in 0..p - 1 {
                seen.insert(x);
                x = x * g % p;
            }
            assert_eq!(seen.len() as u64, p - 1);
        }
    }
}
