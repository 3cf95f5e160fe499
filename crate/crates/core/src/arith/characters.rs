//! Dirichlet characters modulo `t` through an explicit cyclic decomposition
//! of `(Z/tZ)^*`.
//!
//! Units are addressed by a mixed-radix exponent vector (one coordinate per
//! cyclic axis). Characters use the same coordinates for their index, so
//! `χ_a(m) = e(Σ a_i e_i(m) / n_i)` and sums over the group become
//! multidimensional DFTs.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{factorize, gcd, mod_mul, primitive_root};
use crate::error::{LabError, Result};
use crate::phase::phase_table;

/// Default cap on the eager value table, in complex entries (128 MiB).
pub const DEFAULT_TABLE_CAP: u64 = 1 << 23;

const NOT_UNIT: u32 = u32::MAX;

/// One cyclic factor of the unit group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupAxis {
    pub order: usize,
    pub stride: usize,
    pub generator: u64,
    /// Prime-power component this axis lives in.
    pub prime_power: u64,
}

// Discrete log table for one prime-power component.
struct ComponentLog {
    prime_power: u64,
    first_axis: usize,
    // residue -> (exponent on first axis, exponent on second axis or 0)
    logs: Vec<(u32, u32)>,
}

/// Structure of `(Z/tZ)^*` as a product of cyclic groups.
#[derive(Debug, Clone)]
pub struct UnitGroup {
    modulus: u64,
    axes: Vec<GroupAxis>,
    size: usize,
    exponent: u64,
    index_of: Vec<u32>,
    residue_of: Vec<u32>,
}

impl UnitGroup {
    pub fn new(t: u64) -> Result<Self> {
        if t == 0 || t >= u32::MAX as u64 {
            return Err(LabError::InvalidInput(format!("modulus {t} out of range")));
        }
        let mut axes = Vec::new();
        let mut comps: Vec<ComponentLog> = Vec::new();
        for (p, e) in factorize(t) {
            let pp = p.pow(e);
            let first_axis = axes.len();
            let mut logs = vec![(NOT_UNIT, 0); pp as usize];
            if p == 2 {
                match e {
                    1 => logs[1] = (0, 0),
                    2 => {
                        axes.push(GroupAxis { order: 2, stride: 0, generator: 3, prime_power: pp });
                        logs[1] = (0, 0);
                        logs[3] = (1, 0);
                    }
                    _ => {
                        let half = (pp / 4) as usize;
                        axes.push(GroupAxis { order: 2, stride: 0, generator: pp - 1, prime_power: pp });
                        axes.push(GroupAxis { order: half, stride: 0, generator: 5, prime_power: pp });
                        let mut five = 1u64;
                        for b in 0..half {
                            logs[five as usize] = (0, b as u32);
                            logs[(pp - five) as usize] = (1, b as u32);
                            five = five * 5 % pp;
                        }
                    }
                }
            } else {
                let mut g = primitive_root(p);
                if e > 1 && super::mod_pow(g, p - 1, p * p) == 1 {
                    g += p;
                }
                let order = (pp / p * (p - 1)) as usize;
                axes.push(GroupAxis { order, stride: 0, generator: g, prime_power: pp });
                let mut x = 1u64;
                for j in 0..order {
                    logs[x as usize] = (j as u32, 0);
                    x = mod_mul(x, g, pp);
                }
            }
            comps.push(ComponentLog { prime_power: pp, first_axis, logs });
        }

        let mut stride = 1usize;
        for axis in axes.iter_mut() {
            axis.stride = stride;
            stride *= axis.order;
        }
        let size = stride;
        let exponent = axes.iter().fold(1u64, |l, a| l / gcd(l, a.order as u64) * a.order as u64);

        let mut index_of = vec![NOT_UNIT; t as usize];
        let mut residue_of = vec![0u32; size];
        for m in 0..t {
            let mut idx = 0usize;
            let mut unit = true;
            for c in &comps {
                let (a, b) = c.logs[(m % c.prime_power) as usize];
                if a == NOT_UNIT {
                    unit = false;
                    break;
                }
                let axes_here = axes.iter().skip(c.first_axis).take_while(|ax| ax.prime_power == c.prime_power);
                for (k, ax) in axes_here.enumerate() {
                    let coord = if k == 0 { a } else { b };
                    idx += coord as usize * ax.stride;
                }
            }
            if unit {
                index_of[m as usize] = idx as u32;
                residue_of[idx] = m as u32;
            }
        }
        Ok(Self { modulus: t, axes, size, exponent, index_of, residue_of })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// φ(t).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn axes(&self) -> &[GroupAxis] {
        &self.axes
    }

    /// Least common multiple of the axis orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Flat exponent index of residue `m`, or `None` if `gcd(m, t) > 1`.
    #[inline]
    pub fn index_of(&self, m: u64) -> Option<usize> {
        match self.index_of[(m % self.modulus) as usize] {
            NOT_UNIT => None,
            i => Some(i as usize),
        }
    }

    #[inline]
    pub fn residue_of(&self, index: usize) -> u64 {
        self.residue_of[index] as u64
    }

    /// Mixed-radix coordinates of a flat index.
    pub fn coords(&self, index: usize) -> Vec<u64> {
        self.axes
            .iter()
            .map(|a| ((index / a.stride) % a.order) as u64)
            .collect()
    }

    /// Numerator `N` with `χ_a(m) = e(N / exponent)` for flat indices `a`, `e`.
    #[inline]
    pub fn pairing(&self, a: usize, e: usize) -> u64 {
        let l = self.exponent;
        let mut acc = 0u64;
        for ax in &self.axes {
            let ai = ((a / ax.stride) % ax.order) as u64;
            let ei = ((e / ax.stride) % ax.order) as u64;
            acc = (acc + (ai * ei % ax.order as u64) * (l / ax.order as u64)) % l;
        }
        acc
    }
}

/// Separable DFT over the unit group, one FFT per cyclic axis.
pub struct GroupTransform {
    size: usize,
    axes: Vec<(usize, usize, Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    scratch_len: usize,
}

impl GroupTransform {
    pub fn new(group: &UnitGroup, planner: &mut FftPlanner<f64>) -> Self {
        let mut scratch_len = 0;
        let axes = group
            .axes()
            .iter()
            .map(|ax| {
                let fwd = planner.plan_fft_forward(ax.order);
                let inv = planner.plan_fft_inverse(ax.order);
                scratch_len = scratch_len
                    .max(fwd.get_inplace_scratch_len())
                    .max(inv.get_inplace_scratch_len());
                (ax.order, ax.stride, fwd, inv)
            })
            .collect();
        Self { size: group.size(), axes, scratch_len }
    }

    /// `F(a) = Σ_e f(e) conj(χ_a(e))`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, false)
    }

    /// `P(a) = Σ_e f(e) χ_a(e)` (unnormalized).
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, true)
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        assert_eq!(data.len(), self.size);
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        for (order, stride, fwd, inv) in &self.axes {
            let (n, st) = (*order, *stride);
            if n == 1 {
                continue;
            }
            let fft = if inverse { inv } else { fwd };
            let block = n * st;
            let mut lane = vec![Complex64::new(0.0, 0.0); n];
            for hi in (0..self.size).step_by(block) {
                for lo in 0..st {
                    let base = hi + lo;
                    for (j, v) in lane.iter_mut().enumerate() {
                        *v = data[base + j * st];
                    }
                    fft.process_with_scratch(&mut lane, &mut scratch);
                    for (j, v) in lane.iter().enumerate() {
                        data[base + j * st] = *v;
                    }
                }
            }
        }
    }
}

/// One character of the group modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub modulus: u64,
    /// Exponent on each cyclic axis of the unit group.
    pub component_exponents: Vec<u64>,
    /// Value at `-1`.
    pub parity: i8,
    pub is_trivial: bool,
}

/// Full character group with an eager `φ(t) × t` value table.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    pub modulus: u64,
    pub characters: Vec<DirichletCharacter>,
    units: UnitGroup,
    value_table: Vec<Complex64>,
}

/// Character group with the default table budget.
pub fn character_group(t: u64) -> Result<CharacterGroup> {
    CharacterGroup::with_cap(t, DEFAULT_TABLE_CAP)
}

impl CharacterGroup {
    pub fn with_cap(t: u64, cap: u64) -> Result<Self> {
        if t == 0 {
            return Err(LabError::InvalidInput("modulus must be >= 1".into()));
        }
        let phi = super::euler_phi(t)?;
        let entries = phi.saturating_mul(t);
        if entries > cap {
            return Err(LabError::BudgetExceeded { modulus: t, entries, cap });
        }
        let units = UnitGroup::new(t)?;
        let n = units.size();
        let phases = phase_table(units.exponent());
        let minus_one = units.index_of(t - 1).expect("-1 is a unit");

        let mut value_table = vec![Complex64::new(0.0, 0.0); n * t as usize];
        let mut characters = Vec::with_capacity(n);
        for a in 0..n {
            let row = &mut value_table[a * t as usize..(a + 1) * t as usize];
            for (e, &m) in units.residue_of.iter().enumerate() {
                row[m as usize] = phases[units.pairing(a, e) as usize];
            }
            let parity = if units.pairing(a, minus_one) == 0 { 1 } else { -1 };
            characters.push(DirichletCharacter {
                modulus: t,
                component_exponents: units.coords(a),
                parity,
                is_trivial: a == 0,
            });
        }
        Ok(Self { modulus: t, characters, units, value_table })
    }

    pub fn unit_group(&self) -> &UnitGroup {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.characters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.characters.is_empty()
    }

    /// `χ_index(m)`.
    #[inline]
    pub fn value(&self, index: usize, m: u64) -> Complex64 {
        let t = self.modulus;
        self.value_table[index * t as usize + (m % t) as usize]
    }

    pub fn row(&self, index: usize) -> &[Complex64] {
        let t = self.modulus as usize;
        &self.value_table[index * t..(index + 1) * t]
    }

    /// Index of the complex-conjugate character.
    pub fn conjugate_index(&self, index: usize) -> usize {
        let mut out = 0;
        for ax in self.units.axes() {
            let a = (index / ax.stride) % ax.order;
            out += ((ax.order - a) % ax.order) * ax.stride;
        }
        out
    }

    /// `(2/φ(t)) Σ_{χ odd} χ(m) conj(χ(n))`, from the table.
    pub fn odd_average(&self, m: u64, n: u64) -> f64 {
        let mut acc = crate::sum::ComplexSum::new();
        for (i, c) in self.characters.iter().enumerate() {
            if c.parity == -1 {
                acc.add(self.value(i, m) * self.value(i, n).conj());
            }
        }
        2.0 * acc.value().re / self.len() as f64
    }
}

/// Right side of the odd-character orthogonality relation.
pub fn odd_orthogonality_closed_form(q: u64, m: u64, n: u64) -> i8 {
    if gcd(m % q, q) != 1 || gcd(n % q, q) != 1 {
        return 0;
    }
    if (m + q - n % q) % q == 0 {
        1
    } else if (m + n) % q == 0 {
        -1
    } else {
        0
    }
}

/// Odd-character average from the table, checked against the closed form.
pub fn odd_character_average(q: u64, m: u64, n: u64) -> Result<f64> {
    if q < 3 {
        return Err(LabError::InvalidInput(format!("q = {q} must be >= 3")));
    }
    let group = character_group(q)?;
    let avg = group.odd_average(m, n);
    let expected = odd_orthogonality_closed_form(q, m, n) as f64;
    if (avg - expected).abs() > 1e-10 {
        return Err(LabError::Internal(format!(
            "odd-character average {avg} disagrees with closed form {expected} at q={q} m={m} n={n}"
        )));
    }
    Ok(avg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_one_has_single_trivial_character() {
        let g = character_group(1).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.characters[0].is_trivial);
        assert_eq!(g.value(0, 0), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn modulus_five_has_two_odd_characters() {
        let g = character_group(5).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.characters.iter().filter(|c| c.parity == -1).count(), 2);
        assert_eq!(g.characters.iter().filter(|c| c.is_trivial).count(), 1);
    }

    #[test]
    fn modulus_eight_row_orthogonality_is_exact() {
        let g = character_group(8).unwrap();
        assert_eq!(g.len(), 4);
        for a in 0..4 {
            for b in 0..4 {
                let s: Complex64 = (0..8).map(|m| g.value(a, m) * g.value(b, m).conj()).sum();
                let want = if a == b { 4.0 } else { 0.0 };
                assert_eq!(s, Complex64::new(want, 0.0));
            }
        }
    }

    #[test]
    fn odd_average_examples() {
        assert!((odd_character_average(5, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((odd_character_average(5, 4, 1).unwrap() + 1.0).abs() < 1e-12);
        assert!(odd_character_average(5, 5, 1).unwrap().abs() < 1e-12);
        assert!(odd_character_average(2, 1, 1).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            CharacterGroup::with_cap(101, 100),
            Err(LabError::BudgetExceeded { modulus: 101, .. })
        ));
    }

    #[test]
    fn conjugate_index_conjugates_values() {
        let g = character_group(60).unwrap();
        for a in 0..g.len() {
            let b = g.conjugate_index(a);
            for m in 0..60 {
                assert_eq!(g.value(b, m), g.value(a, m).conj());
            }
        }
    }

    #[test]
    fn transform_matches_table() {
        let mut planner = FftPlanner::new();
        for t in [1u64, 7, 8, 12, 16, 45, 63] {
            let g = character_group(t).unwrap();
            let ug = g.unit_group();
            let tr = GroupTransform::new(ug, &mut planner);
            let f: Vec<Complex64> = (0..ug.size()).map(|i| Complex64::new(i as f64 + 1.0, (i * i) as f64 * 0.1)).collect();
            let mut fwd = f.clone();
            tr.forward(&mut fwd);
            let mut inv = f.clone();
            tr.inverse(&mut inv);
            for a in 0..ug.size() {
                let mut want_f = Complex64::new(0.0, 0.0);
                let mut want_i = Complex64::new(0.0, 0.0);
                for (e, v) in f.iter().enumerate() {
                    let chi = g.value(a, ug.residue_of(e));
                    want_f += v * chi.conj();
                    want_i += v * chi;
                }
                assert!((fwd[a] - want_f).norm() < 1e-9, "t={t} a={a}");
                assert!((inv[a] - want_i).norm() < 1e-9, "t={t} a={a}");
            }
        }
    }
}
