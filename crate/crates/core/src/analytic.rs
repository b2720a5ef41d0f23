//! `|L(1, χ)|²` for even primitive cubic characters, and the class-number
//! lower bounds used to cut off searches.
//!
//! For even primitive `χ` mod `f`,
//! `|L(1,χ)|² = (1/f) |Σ_{a=1}^{f−1} χ(a) log(2 sin(πa/f))|²`.
//! Grouping the terms by `χ(a) = ω^k` into real sums `S₀, S₁, S₂` gives
//! `|Σ|² = S₀² + S₁² + S₂² − S₀S₁ − S₁S₂ − S₂S₀`.

use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::character::{CubicCharacterPair, ZERO_LABEL};
use crate::dd::Dd;
use crate::field::discriminant_base;

/// Strict gate of the Lettl bound: `f > 10⁵`.
pub const LETTL_GATE: f64 = 1e5;
/// Strict gate of the Louboutin bound: `f > 2√3·10⁴`.
pub fn louboutin_gate() -> f64 {
    2.0 * 3f64.sqrt() * 1e4
}

/// Primes below this bound enter the Euler-product estimate.
pub const EULER_PRIME_LIMIT: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("conductor {0} is too small for the finite sum (need f ≥ 7)")]
    ConductorTooSmall(u64),
    #[error("no cutoff found below m = {0}")]
    NoCutoff(i64),
    #[error("index must be 1, 3 or 27, got {0}")]
    BadIndex(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LMethod {
    /// Batched logarithms, compensated summation.
    FiniteSum,
    /// One `ln(2 sin)` per term, plain summation.
    FiniteSumNaive,
    /// Double-double arithmetic throughout.
    FiniteSumWide,
    EulerProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub abs_squared: f64,
    /// Number of `a` in the full sum, `f − 1`.
    pub terms: u64,
    pub method: LMethod,
    pub est_error: f64,
}

#[derive(Default, Clone, Copy)]
struct Kahan {
    sum: f64,
    c: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

fn combine(s: [f64; 3]) -> f64 {
    let [a, b, c] = s;
    a * a + b * b + c * c - a * b - b * c - c * a
}

fn check_modulus(chi: &CubicCharacterPair) -> Result<u64, AnalyticError> {
    if chi.modulus < 7 {
        return Err(AnalyticError::ConductorTooSmall(chi.modulus));
    }
    Ok(chi.modulus)
}

/// Walks `a = 1..=(f−1)/2` with the class `k` of `χ(a)` (`ZERO_LABEL` when
/// `gcd(a, f) > 1`), keeping one running residue per local component.
fn for_each_class(chi: &CubicCharacterPair, mut visit: impl FnMut(u64, u8)) {
    let tables = chi.value_tables();
    let half = (chi.modulus - 1) / 2;
    let mut residues: Vec<u32> = vec![0; tables.len()];
    let moduli: Vec<u32> = tables.iter().map(|(q, _)| *q as u32).collect();
    for a in 1..=half {
        let mut k = 0u8;
        let mut zero = false;
        for i in 0..tables.len() {
            let mut r = residues[i] + 1;
            if r == moduli[i] {
                r = 0;
            }
            residues[i] = r;
            let l = tables[i].1[r as usize];
            zero |= l == ZERO_LABEL;
            k += l;
        }
        visit(a, if zero { ZERO_LABEL } else { k % 3 });
    }
}

/// Production evaluation.
///
/// `2 sin(πa/f)` is advanced by the angle-addition recurrence and reseeded
/// from `sin_cos` every 32 steps; per-class running products are turned into
/// logarithms only when they leave `[10⁻²⁴⁰, 10²⁴⁰]`.
pub fn l1_abs_squared(chi: &CubicCharacterPair) -> Result<LValue, AnalyticError> {
    const RESEED: u64 = 32;
    const HI: f64 = 1e240;
    const LO: f64 = 1e-240;
    let f = check_modulus(chi)?;
    let delta = PI / f as f64;
    let (sd, cd) = delta.sin_cos();
    let mut prod = [1.0f64; 3];
    let mut sums = [Kahan::default(); 3];
    let (mut s, mut c) = (0.0f64, 1.0f64);
    for_each_class(chi, |a, k| {
        if a % RESEED == 1 {
            (s, c) = (a as f64 * delta).sin_cos();
        } else {
            (s, c) = (s * cd + c * sd, c * cd - s * sd);
        }
        if k == ZERO_LABEL {
            return;
        }
        let k = k as usize;
        let p = prod[k] * (2.0 * s);
        if !(LO..=HI).contains(&p) {
            sums[k].add(p.ln());
            prod[k] = 1.0;
        } else {
            prod[k] = p;
        }
    });
    let mut s3 = [0.0; 3];
    for k in 0..3 {
        sums[k].add(prod[k].ln());
        s3[k] = 2.0 * sums[k].sum;
    }
    let n = f - 1;
    // Recurrence drift is bounded by ~RESEED ulps per term.
    let ds = n as f64 * RESEED as f64 * f64::EPSILON;
    Ok(finish(s3, f, n, ds, LMethod::FiniteSum))
}

fn finish(s: [f64; 3], f: u64, n: u64, ds: f64, method: LMethod) -> LValue {
    let q = combine(s);
    let mag = s.iter().map(|x| x.abs()).sum::<f64>();
    LValue {
        abs_squared: q / f as f64,
        terms: n,
        method,
        est_error: (4.0 * mag * ds + 3.0 * ds * ds) / f as f64,
    }
}

/// Reference evaluation: one `ln(2 sin(πa/f))` per term over the full range
/// `1 ≤ a < f`, summed without compensation.
pub fn l1_abs_squared_naive(chi: &CubicCharacterPair) -> Result<LValue, AnalyticError> {
    let f = check_modulus(chi)?;
    let table = chi.full_table();
    let mut s = [0.0f64; 3];
    for a in 1..f {
        let k = table[a as usize];
        if k == ZERO_LABEL {
            continue;
        }
        s[k as usize] += (2.0 * (PI * a as f64 / f as f64).sin()).ln();
    }
    let n = f - 1;
    let ds = n as f64 * 4.0 * f64::EPSILON * (f as f64).ln();
    Ok(finish(s, f, n, ds, LMethod::FiniteSumNaive))
}

/// Double-double evaluation, used when binary64 does not round cleanly.
pub fn l1_abs_squared_wide(chi: &CubicCharacterPair) -> Result<LValue, AnalyticError> {
    let f = check_modulus(chi)?;
    let fd = Dd::new(f as f64);
    let mut sums = [Dd::ZERO; 3];
    for_each_class(chi, |a, k| {
        if k == ZERO_LABEL {
            return;
        }
        let x = Dd::PI * Dd::new(a as f64) / fd;
        let v = (Dd::new(2.0) * x.sin()).ln();
        sums[k as usize] = sums[k as usize] + v;
    });
    let s = sums.map(|x| Dd::new(2.0) * x);
    let [a, b, c] = s;
    let q = a * a + b * b + c * c - a * b - b * c - c * a;
    let n = f - 1;
    let ds = n as f64 * 1e-30;
    let mag = s.iter().map(|x| x.abs().to_f64()).sum::<f64>();
    Ok(LValue {
        abs_squared: (q / fd).to_f64(),
        terms: n,
        method: LMethod::FiniteSumWide,
        est_error: (4.0 * mag * ds) / f as f64 + f64::EPSILON * (q / fd).to_f64(),
    })
}

/// Truncated Euler product `∏_{p < limit} |1 − χ(p)/p|⁻²`. Advisory only: the
/// truncation error is not controlled, so `est_error` is a flat 10%.
pub fn l1_euler_product(chi: &CubicCharacterPair, limit: u64) -> LValue {
    let mut log_sum = 0.0f64;
    for p in arith::primes_up_to(limit.saturating_sub(1)) {
        let x = 1.0 / p as f64;
        let factor = match chi.evaluate(false, p as i128).exponent() {
            None => continue,
            Some(0) => (1.0 - x) * (1.0 - x),
            Some(_) => 1.0 + x + x * x,
        };
        log_sum -= factor.ln();
    }
    let v = log_sum.exp();
    LValue {
        abs_squared: v,
        terms: limit,
        method: LMethod::EulerProduct,
        est_error: 0.1 * v,
    }
}

/// `0.023 f^0.946 / (log D)²` when `f > 10⁵`.
pub fn lettl_bound(f: f64, d: f64) -> Option<f64> {
    (f > LETTL_GATE).then(|| 0.023 * f.powf(0.946) / d.ln().powi(2))
}

/// `f / (e (log D)² log f)` when `f > 2√3·10⁴`.
pub fn louboutin_bound(f: f64, d: f64) -> Option<f64> {
    (f > louboutin_gate()).then(|| f / (E * d.ln().powi(2) * f.ln()))
}

/// Largest applicable lower bound for `h`.
pub fn best_bound(f: f64, d: f64) -> Option<f64> {
    match (lettl_bound(f, d), louboutin_bound(f, d)) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Lettl,
    Louboutin,
}

impl BoundKind {
    pub fn eval(self, f: f64, d: f64) -> Option<f64> {
        match self {
            BoundKind::Lettl => lettl_bound(f, d),
            BoundKind::Louboutin => louboutin_bound(f, d),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    pub kind: BoundKind,
    pub index: u32,
    pub hmax: f64,
    /// Smallest `m` from which the bound exceeds `hmax` for good.
    pub m: i64,
    pub bound_at_m: f64,
}

/// Bound evaluated at `m` with the conductor taken as the real number `D/index`.
pub fn bound_at(kind: BoundKind, index: u32, m: i64) -> Option<f64> {
    let d = discriminant_base(m) as f64;
    kind.eval(d / index as f64, d)
}

/// Smallest `M ≥ −1` such that the gated bound exceeds `hmax` at `M` and at
/// every integer in `[M, 10M]`.
pub fn threshold_m(kind: BoundKind, index: u32, hmax: f64) -> Result<Cutoff, AnalyticError> {
    const SEARCH_LIMIT: i64 = 1_000_000_000;
    if !matches!(index, 1 | 3 | 27) {
        return Err(AnalyticError::BadIndex(index));
    }
    let above = |m: i64| bound_at(kind, index, m).is_some_and(|b| b > hmax);
    let mut m = -1i64;
    'search: loop {
        while !above(m) {
            m += 1;
            if m > SEARCH_LIMIT {
                return Err(AnalyticError::NoCutoff(SEARCH_LIMIT));
            }
        }
        for n in m + 1..=10 * m.max(1) {
            if !above(n) {
                m = n + 1;
                continue 'search;
            }
        }
        break;
    }
    Ok(Cutoff {
        kind,
        index,
        hmax,
        m,
        bound_at_m: bound_at(kind, index, m).expect("gate holds at the cutoff"),
    })
}

/// Louboutin cutoff: past it every field of the given index has `h > hmax`.
pub fn cutoff_m(index: u32, hmax: f64) -> Result<Cutoff, AnalyticError> {
    threshold_m(BoundKind::Louboutin, index, hmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::character::{enumerate_pairs, select_for_field};
    use crate::field::build_field;

    fn truncate3(x: f64) -> f64 {
        (x * 1000.0).floor() / 1000.0
    }

    #[test]
    fn small_conductor_values() {
        let chi7 = &enumerate_pairs(7).unwrap()[0];
        let l = l1_abs_squared(chi7).unwrap();
        assert!((l.abs_squared - 0.30026).abs() < 1e-5, "{}", l.abs_squared);
        // |L|² = 4hR/f with h = 1 and the regulator of 2cos(2π/7).
        let a = 2.0 * (2.0 * PI / 7.0).cos();
        let (l1, l2) = (a.ln(), (a + 1.0).ln());
        let reg = l1 * l1 - l1 * l2 + l2 * l2;
        assert!((l.abs_squared - 4.0 * reg / 7.0).abs() < 1e-12);
        let chi9 = &enumerate_pairs(9).unwrap()[0];
        let l = l1_abs_squared(chi9).unwrap();
        assert!((l.abs_squared - 0.37746).abs() < 1e-5, "{}", l.abs_squared);
        assert!(matches!(
            l1_abs_squared(&CubicCharacterPair { modulus: 3, components: vec![], class_id: 0 }),
            Err(AnalyticError::ConductorTooSmall(3))
        ));
    }

    #[test]
    fn fast_naive_and_wide_agree() {
        for f in [7u128, 9, 13, 63, 217, 1729, 9 * 7 * 13 * 19, 47_749, 99_991] {
            for chi in enumerate_pairs(f).unwrap() {
                let fast = l1_abs_squared(&chi).unwrap();
                let naive = l1_abs_squared_naive(&chi).unwrap();
                let rel = (fast.abs_squared - naive.abs_squared).abs() / naive.abs_squared;
                assert!(rel < 1e-9, "f = {f}: {rel}");
                assert!((fast.abs_squared - naive.abs_squared).abs() <= fast.est_error + naive.est_error);
                if f < 5000 {
                    let wide = l1_abs_squared_wide(&chi).unwrap();
                    let rel = (fast.abs_squared - wide.abs_squared).abs() / wide.abs_squared;
                    assert!(rel < 1e-11, "f = {f}: {rel}");
                }
            }
        }
    }

    #[test]
    fn euler_product_within_ten_percent() {
        for m in [-1i64, 0, 1, 2, 11, 13, 40, 64, 201, 1000] {
            let field = build_field(m).unwrap();
            let chi = select_for_field(&field).unwrap();
            let exact = l1_abs_squared(&chi).unwrap().abs_squared;
            let euler = l1_euler_product(&chi, EULER_PRIME_LIMIT).abs_squared;
            assert!((euler - exact).abs() < 0.1 * exact, "m = {m}: {euler} vs {exact}");
        }
    }

    #[test]
    fn conjugation_invariance() {
        let chi = select_for_field(&build_field(40).unwrap()).unwrap();
        let mut conj = chi.clone();
        for c in &mut conj.components {
            c.exponent = 3 - c.exponent;
        }
        let a = l1_abs_squared(&chi).unwrap().abs_squared;
        let b = l1_abs_squared(&conj).unwrap().abs_squared;
        assert!((a - b).abs() < 1e-12 * a);
    }

    #[test]
    fn gates_are_strict() {
        assert_eq!(lettl_bound(1e5, 1e10), None);
        assert!(lettl_bound(1e5 + 1.0, 1e10).is_some());
        assert_eq!(louboutin_bound(30_000.0, 1e10), None);
        assert!(louboutin_bound(34_642.0, 34_642.0).is_some());
        assert_eq!(louboutin_bound(34_641.0, 34_641.0), None);
    }

    #[test]
    fn single_field_bound_examples() {
        let d = discriminant_base(410) as f64;
        assert_eq!(d, 169_339.0);
        assert!(lettl_bound(d, d).unwrap() > 14.0);
        let d = discriminant_base(409) as f64;
        assert!(lettl_bound(d, d).unwrap() <= 14.0);
        let d = discriminant_base(217) as f64;
        assert_eq!(d, 47_749.0);
        assert!(louboutin_bound(d, d).unwrap() > 14.0);
        let d = discriminant_base(216) as f64;
        assert!(louboutin_bound(d, d).is_none_or(|b| b <= 14.0));
    }

    #[test]
    fn cutoffs_for_hmax_1000() {
        for (index, m, digits) in [(1, 3423, 1000.329), (3, 6418, 1000.069), (27, 22166, 1000.010)] {
            let c = cutoff_m(index, 1000.0).unwrap();
            assert_eq!(c.m, m);
            assert!(c.bound_at_m > digits);
            assert_eq!(truncate3(c.bound_at_m), digits);
        }
    }

    #[test]
    fn thresholds_for_h_above_14() {
        for (kind, expected) in [
            (BoundKind::Louboutin, [217, 429, 1600]),
            (BoundKind::Lettl, [410, 794, 2870]),
        ] {
            for (index, m) in [1, 3, 27].into_iter().zip(expected) {
                assert_eq!(threshold_m(kind, index, 14.0).unwrap().m, m, "{kind:?} index {index}");
            }
        }
        assert!(threshold_m(BoundKind::Lettl, 9, 14.0).is_err());
    }

    #[test]
    fn bounds_increase_with_conductor() {
        for index in [1.0f64, 3.0, 27.0] {
            let mut prev = 0.0;
            let mut f = 40_000.0f64;
            while f < 1e12 {
                let d = index * f;
                let b = louboutin_bound(f, d).unwrap();
                assert!(b > prev);
                prev = b;
                f *= 1.01;
            }
            let mut prev = 0.0;
            let mut f = 1.01e5f64;
            while f < 1e12 {
                let b = lettl_bound(f, index * f).unwrap();
                assert!(b > prev);
                prev = b;
                f *= 1.01;
            }
        }
    }
}
