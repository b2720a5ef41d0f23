//! Primitive cubic Dirichlet characters, up to conjugation, and the choice of
//! the pair `{χ, χ̄}` cutting out a given `L_m`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ArithError};
use crate::field::SimplestCubicField;

/// Probe primes tried before [`select_for_field`] gives up.
pub const MAX_PROBES: usize = 100;
/// Probes run even when a single candidate remains, as a consistency check.
pub const MIN_PROBES: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharacterError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} is not a cubic conductor (9, distinct primes 1 mod 6, or 9 times those)")]
    InvalidConductor(u128),
    #[error("m = {m}: {survivors} characters survive {probes} probe primes")]
    Ambiguous { m: i64, survivors: usize, probes: usize },
    #[error("m = {m}: no character mod {conductor} matches the splitting of f_m")]
    NoneMatch { m: i64, conductor: u128 },
}

/// A value of a cubic character, as a power of `ω = exp(2πi/3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CubicValue {
    Zero,
    One,
    Omega,
    OmegaBar,
}

impl CubicValue {
    pub fn from_exponent(k: u8) -> Self {
        match k % 3 {
            0 => CubicValue::One,
            1 => CubicValue::Omega,
            _ => CubicValue::OmegaBar,
        }
    }

    pub fn exponent(self) -> Option<u8> {
        match self {
            CubicValue::Zero => None,
            CubicValue::One => Some(0),
            CubicValue::Omega => Some(1),
            CubicValue::OmegaBar => Some(2),
        }
    }

    /// Complex embedding `(re, im)`.
    pub fn to_complex(self) -> (f64, f64) {
        let h = 3f64.sqrt() / 2.0;
        match self {
            CubicValue::Zero => (0.0, 0.0),
            CubicValue::One => (1.0, 0.0),
            CubicValue::Omega => (-0.5, h),
            CubicValue::OmegaBar => (-0.5, -h),
        }
    }

    pub fn conj(self) -> Self {
        match self {
            CubicValue::Omega => CubicValue::OmegaBar,
            CubicValue::OmegaBar => CubicValue::Omega,
            v => v,
        }
    }
}

/// Local factor `a ↦ ω^{exponent · ℓ_q(a)}` at `q = 9` or a prime `q ≡ 1 (mod 3)`,
/// where `ℓ_q` is the fixed per-`q` label (the smaller cube root of unity mod
/// `p` is `ω`; for `q = 9` the label is `log₂ a mod 3`, kernel `{1, 8}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalComponent {
    pub prime: u64,
    pub modulus: u64,
    pub exponent: u8,
}

/// `ℓ₉(a)` for `a` coprime to 3; `2` generates `(Z/9)ˣ`.
const NINE_LABELS: [u8; 9] = [u8::MAX, 0, 1, u8::MAX, 2, 2, u8::MAX, 1, 0];

impl LocalComponent {
    fn label(&self, a: i128) -> Result<Option<u8>, ArithError> {
        if self.modulus == 9 {
            let r = a.rem_euclid(9) as usize;
            let l = NINE_LABELS[r];
            return Ok((l != u8::MAX).then_some(l));
        }
        Ok(arith::cubic_residue_class(a, self.prime)?.exponent())
    }

    /// `table[r] = exponent·ℓ(r) mod 3`, or `3` when `q | r`.
    pub fn value_table(&self) -> Vec<u8> {
        let q = self.modulus;
        let mut table = vec![ZERO_LABEL; q as usize];
        if q == 9 {
            for (r, &l) in NINE_LABELS.iter().enumerate() {
                if l != u8::MAX {
                    table[r] = l * self.exponent % 3;
                }
            }
            return table;
        }
        let p = q;
        let g = primitive_root(p);
        let (w, _) = arith::cube_roots_of_unity(p).expect("component prime is 1 mod 3");
        // ℓ(g^j) = j·s mod 3 with g^{(p−1)/3} = ω^s.
        let s = if arith::pow_mod_u64(g, (p - 1) / 3, p) == w { 1 } else { 2 };
        let step = (s * self.exponent) % 3;
        let mut x = 1u64;
        let mut label = 0u8;
        for _ in 0..p - 1 {
            table[x as usize] = label;
            x = (x as u128 * g as u128 % p as u128) as u64;
            label += step;
            if label >= 3 {
                label -= 3;
            }
        }
        table
    }
}

pub const ZERO_LABEL: u8 = 3;

fn primitive_root(p: u64) -> u64 {
    let phi = arith::factorize((p - 1) as u128).expect("p − 1 factors");
    (2..p)
        .find(|&g| {
            phi.primes()
                .all(|q| arith::pow_mod_u64(g, (p - 1) / q as u64, p) != 1)
        })
        .expect("primes have primitive roots")
}

/// A primitive cubic character mod `f` together with its conjugate.
///
/// The first component's exponent is fixed to 1, so that `χ̄` is never listed
/// separately; `class_id` packs the remaining exponents as bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CubicCharacterPair {
    pub modulus: u64,
    pub components: Vec<LocalComponent>,
    pub class_id: u32,
}

impl CubicCharacterPair {
    /// `χ(a)`, or `χ̄(a)` when `conjugate` is set.
    pub fn evaluate(&self, conjugate: bool, a: i128) -> CubicValue {
        let mut k = 0u8;
        for c in &self.components {
            match c.label(a).expect("components are validated at construction") {
                None => return CubicValue::Zero,
                Some(l) => k = (k + l * c.exponent) % 3,
            }
        }
        let v = CubicValue::from_exponent(k);
        if conjugate {
            v.conj()
        } else {
            v
        }
    }

    pub fn value_tables(&self) -> Vec<(u64, Vec<u8>)> {
        self.components
            .iter()
            .map(|c| (c.modulus, c.value_table()))
            .collect()
    }

    /// `χ(a)` exponents for every `a` in `[0, f)`, `ZERO_LABEL` off the unit group.
    pub fn full_table(&self) -> Vec<u8> {
        let tables = self.value_tables();
        (0..self.modulus)
            .map(|a| {
                let mut k = 0u8;
                for (q, t) in &tables {
                    let l = t[(a % q) as usize];
                    if l == ZERO_LABEL {
                        return ZERO_LABEL;
                    }
                    k += l;
                }
                k % 3
            })
            .collect()
    }
}

/// Splits `f` into local components, or rejects it.
fn conductor_primes(f: u128) -> Result<Vec<(u64, u64)>, CharacterError> {
    if f < 7 || f > u64::MAX as u128 {
        return Err(CharacterError::InvalidConductor(f));
    }
    let fact = arith::factorize(f)?;
    let mut out = Vec::new();
    for &(p, e) in &fact.factors {
        let ok = (p == 3 && e == 2) || (p % 6 == 1 && e == 1);
        if !ok {
            return Err(CharacterError::InvalidConductor(f));
        }
        out.push((p as u64, if p == 3 { 9 } else { p as u64 }));
    }
    Ok(out)
}

/// The `2^{r−1}` conjugation classes of primitive cubic characters mod `f`.
pub fn enumerate_pairs(f: u128) -> Result<Vec<CubicCharacterPair>, CharacterError> {
    let primes = conductor_primes(f)?;
    let r = primes.len();
    let mut out = Vec::with_capacity(1 << (r - 1));
    for id in 0..(1u32 << (r - 1)) {
        let components = primes
            .iter()
            .enumerate()
            .map(|(i, &(p, q))| LocalComponent {
                prime: p,
                modulus: q,
                exponent: if i == 0 { 1 } else { 1 + ((id >> (i - 1)) & 1) as u8 },
            })
            .collect();
        out.push(CubicCharacterPair {
            modulus: f as u64,
            components,
            class_id: id,
        });
    }
    Ok(out)
}

/// Number of roots of `f_m` modulo the prime `q`.
pub fn roots_mod(m: i64, q: u64) -> usize {
    let q = q as i128;
    let (a, b) = ((m as i128).rem_euclid(q), (m as i128 + 3).rem_euclid(q));
    (0..q)
        .filter(|&x| (((x - a) * x - b) % q * x - 1).rem_euclid(q) == 0)
        .count()
}

/// The pair whose kernel matches the primes splitting completely in `L_m`.
pub fn select_for_field(field: &SimplestCubicField) -> Result<CubicCharacterPair, CharacterError> {
    let mut candidates = enumerate_pairs(field.conductor)?;
    let mut probes = 0;
    let mut q = 1u64;
    while probes < MAX_PROBES {
        q += 1;
        if !arith::is_prime(q as u128) || (3 * field.d) % q as u128 == 0 {
            continue;
        }
        probes += 1;
        let splits = roots_mod(field.m, q) > 0;
        candidates.retain(|chi| (chi.evaluate(false, q as i128) == CubicValue::One) == splits);
        if candidates.is_empty() {
            return Err(CharacterError::NoneMatch {
                m: field.m,
                conductor: field.conductor,
            });
        }
        if candidates.len() == 1 && probes >= MIN_PROBES {
            return Ok(candidates.pop().unwrap());
        }
    }
    Err(CharacterError::Ambiguous {
        m: field.m,
        survivors: candidates.len(),
        probes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::CubicClass;
    use crate::field::build_field;

    #[test]
    fn pair_counts() {
        assert_eq!(enumerate_pairs(7).unwrap().len(), 1);
        assert_eq!(enumerate_pairs(217).unwrap().len(), 2);
        assert_eq!(enumerate_pairs(9).unwrap().len(), 1);
        assert_eq!(enumerate_pairs(9 * 7 * 13).unwrap().len(), 4);
        assert_eq!(enumerate_pairs(7 * 13 * 19).unwrap().len(), 4);
        for bad in [27u128, 49, 11, 5, 3, 63 * 7] {
            assert!(enumerate_pairs(bad).is_err(), "f = {bad}");
        }
    }

    #[test]
    fn evaluate_examples() {
        let chi7 = &enumerate_pairs(7).unwrap()[0];
        assert_eq!(chi7.evaluate(false, 6), CubicValue::One);
        assert_eq!(chi7.evaluate(false, 7), CubicValue::Zero);
        assert_ne!(chi7.evaluate(false, 3), CubicValue::One);
        let chi9 = &enumerate_pairs(9).unwrap()[0];
        assert_eq!(chi9.evaluate(false, 8), CubicValue::One);
        assert_eq!(chi9.evaluate(false, 9), CubicValue::Zero);
        // Cubes in (Z/9)ˣ by brute force.
        let cubes: Vec<i128> = (1..9).filter(|a| a % 3 != 0).map(|a| a * a * a % 9).collect();
        for a in 1..9 {
            if a % 3 != 0 {
                assert_eq!(chi9.evaluate(false, a) == CubicValue::One, cubes.contains(&a));
            }
        }
    }

    fn conductors_to(limit: u128) -> Vec<u128> {
        (7..=limit)
            .filter(|&f| conductor_primes(f).is_ok())
            .collect()
    }

    #[test]
    fn characters_are_multiplicative_and_cubic() {
        for f in conductors_to(700) {
            for chi in enumerate_pairs(f).unwrap() {
                let t = chi.full_table();
                for a in 0..f as usize {
                    let direct = chi.evaluate(false, a as i128).exponent().unwrap_or(ZERO_LABEL);
                    assert_eq!(direct, t[a], "f = {f} a = {a}");
                    assert_eq!(t[a] == ZERO_LABEL, arith::gcd(a as u128, f) != 1);
                }
                for a in 1..f as usize {
                    for b in [2usize, 5, 11, a] {
                        let b = b % f as usize;
                        let ab = a * b % f as usize;
                        let expect = match (t[a], t[b]) {
                            (ZERO_LABEL, _) | (_, ZERO_LABEL) => ZERO_LABEL,
                            (x, y) => (x + y) % 3,
                        };
                        assert_eq!(t[ab], expect);
                    }
                }
                // Even character.
                assert_eq!(t[1], 0);
                assert_eq!(t[f as usize - 1], 0);
            }
        }
    }

    #[test]
    fn characters_are_primitive() {
        // Nontrivial on the kernel of reduction to every proper divisor f/p.
        for f in conductors_to(2000) {
            for chi in enumerate_pairs(f).unwrap() {
                let t = chi.full_table();
                for (p, _) in conductor_primes(f).unwrap() {
                    let g = f / p as u128;
                    let nontrivial = (0..f)
                        .filter(|&a| a % g == 1 % g && t[a as usize] != ZERO_LABEL)
                        .any(|a| t[a as usize] != 0);
                    assert!(nontrivial, "f = {f} imprimitive at {p}");
                }
            }
        }
    }

    #[test]
    fn orthogonality_and_gauss_sums() {
        use std::f64::consts::PI;
        for f in conductors_to(10_000) {
            for chi in enumerate_pairs(f).unwrap() {
                let t = chi.full_table();
                let mut counts = [0usize; 3];
                let (mut re, mut im) = (0.0f64, 0.0f64);
                for (a, &k) in t.iter().enumerate() {
                    if k == ZERO_LABEL {
                        continue;
                    }
                    counts[k as usize] += 1;
                    let (cr, ci) = CubicValue::from_exponent(k).to_complex();
                    let (s, c) = (2.0 * PI * a as f64 / f as f64).sin_cos();
                    re += cr * c - ci * s;
                    im += cr * s + ci * c;
                }
                // Σχ(a) = 0 exactly: the three fibres have equal size.
                assert!(counts[0] == counts[1] && counts[1] == counts[2], "f = {f}");
                let mag = (re * re + im * im).sqrt();
                let rel = (mag - (f as f64).sqrt()).abs() / (f as f64).sqrt();
                assert!(rel < 1e-6, "f = {f}: |τ| = {mag}");
            }
        }
    }

    #[test]
    fn selection_examples() {
        let f = build_field(-1).unwrap();
        assert_eq!(roots_mod(-1, 13), 3);
        let chi = select_for_field(&f).unwrap();
        assert_eq!(chi.modulus, 7);
        assert_eq!(chi.evaluate(false, 13), CubicValue::One);
        let f13 = build_field(13).unwrap();
        let chi = select_for_field(&f13).unwrap();
        assert_eq!(chi.modulus, 217);
        for q in arith::primes_up_to(400) {
            if (3 * f13.d) % q as u128 != 0 {
                assert_eq!(
                    chi.evaluate(false, q as i128) == CubicValue::One,
                    roots_mod(13, q) == 3
                );
            }
        }
        assert_eq!(select_for_field(&build_field(0).unwrap()).unwrap().modulus, 9);
    }

    #[test]
    fn root_counts_are_zero_or_three() {
        // Unramified primes are inert or split completely in a cyclic cubic field.
        for m in [-1i64, 2, 13, 40, 120] {
            let d = crate::field::discriminant_base(m);
            for q in arith::primes_up_to(300) {
                if (3 * d) % q as u128 != 0 {
                    assert!(matches!(roots_mod(m, q), 0 | 3), "m = {m} q = {q}");
                }
            }
        }
    }

    #[test]
    fn selection_agrees_on_equal_fields() {
        let groups: [&[i64]; 4] = [&[-1, 5, 12, 1259], &[0, 3, 54], &[1, 66], &[2, 2389]];
        for g in groups {
            let chis: Vec<_> = g
                .iter()
                .map(|&m| select_for_field(&build_field(m).unwrap()).unwrap())
                .collect();
            assert!(chis.windows(2).all(|w| w[0] == w[1]), "{g:?}");
        }
        for m in [4i64, 13, 40, 500] {
            let a = select_for_field(&build_field(m).unwrap()).unwrap();
            let b = select_for_field(&build_field(-m - 3).unwrap()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cubic_class_consistency() {
        // The mod-p table agrees with the residue-class labelling.
        for p in [7u64, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97] {
            let c = LocalComponent { prime: p, modulus: p, exponent: 1 };
            let t = c.value_table();
            for a in 1..p {
                let cls = arith::cubic_residue_class(a as i128, p).unwrap();
                assert_eq!(Some(t[a as usize]), cls.exponent());
                assert_ne!(cls, CubicClass::Zero);
            }
        }
    }
}
