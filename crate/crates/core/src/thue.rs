//! The cubic forms `F_m(x, y) = x³ − mx²y − (m+3)xy² − y³`, bounded search for
//! `F_m(x, y) = λ` with `λ | m² + 3m + 9`, and detection of coincidences
//! `L_m = L_n` through `N = m + D·xy(x+y)/F_m(x, y)`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::character::{self, CharacterError};
use crate::field::{self, discriminant_base, normalize, FieldError};

/// Coincidences `L_m = L_n` (`m < n`) can only occur for `m` up to this value.
pub const COINCIDENCE_M_CEILING: i64 = 35_731;
pub const DEFAULT_BOUND: i64 = 2000;
/// Every `m ≥ −1` for which `L_m` coincides with another simplest cubic field.
pub const COINCIDENCE_SET: [i64; 11] = [-1, 0, 1, 2, 3, 5, 12, 54, 66, 1259, 2389];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThueError {
    #[error("({x}, {y}) is a trivial solution: xy(x+y) = 0")]
    Trivial { x: i64, y: i64 },
    #[error("m = {m}: F({x}, {y}) = {value} does not divide D·xy(x+y)")]
    NonExact { m: i64, x: i64, y: i64, value: String },
    #[error("m = {m}: N = {n} is outside the 64-bit range")]
    TargetOverflow { m: i64, n: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error("coincidence certificates disagree: N-formula only {formula_only:?}, characters only {character_only:?}")]
    CertificationMismatch {
        formula_only: Vec<(i64, i64)>,
        character_only: Vec<(i64, i64)>,
    },
}

/// `F_m(x, y)` in `i128`, or `None` on overflow.
pub fn thue_eval_i128(m: i64, x: i64, y: i64) -> Option<i128> {
    let (m, x, y) = (m as i128, x as i128, y as i128);
    let x2 = x.checked_mul(x)?;
    let y2 = y.checked_mul(y)?;
    let t1 = x2.checked_mul(x)?;
    let t2 = m.checked_mul(x2)?.checked_mul(y)?;
    let t3 = (m + 3).checked_mul(x)?.checked_mul(y2)?;
    let t4 = y2.checked_mul(y)?;
    t1.checked_sub(t2)?.checked_sub(t3)?.checked_sub(t4)
}

/// Exact `F_m(x, y)`, widening to arbitrary precision when `i128` overflows.
pub fn thue_eval(m: i64, x: i64, y: i64) -> BigInt {
    if let Some(v) = thue_eval_i128(m, x, y) {
        return BigInt::from(v);
    }
    let (m, x, y) = (BigInt::from(m), BigInt::from(x), BigInt::from(y));
    &x * &x * &x - &m * &x * &x * &y - (&m + 3) * &x * &y * &y - &y * &y * &y
}

/// `F_m` clamped to `±i128::MAX`; only the ordering matters to the search.
fn eval_clamped(m: i64, x: i64, y: i64) -> i128 {
    thue_eval_i128(m, x, y).unwrap_or_else(|| {
        if thue_eval(m, x, y) > BigInt::from(0) {
            i128::MAX
        } else {
            -i128::MAX
        }
    })
}

/// The order-3 substitution `(x, y) ↦ (y, −x−y)` fixing every `F_m`.
pub fn orbit_step((x, y): (i64, i64)) -> (i64, i64) {
    (y, -x - y)
}

/// Lexicographically smallest point of the orbit.
pub fn orbit_representative(p: (i64, i64)) -> (i64, i64) {
    let q = orbit_step(p);
    let r = orbit_step(q);
    p.min(q).min(r)
}

pub fn is_trivial(x: i64, y: i64) -> bool {
    x == 0 || y == 0 || x + y == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ThueSolution {
    pub m: i64,
    pub x: i64,
    pub y: i64,
    pub lambda: u128,
    pub trivial: bool,
    pub orbit_id: (i64, i64),
}

impl ThueSolution {
    fn new(m: i64, x: i64, y: i64, lambda: u128) -> Self {
        ThueSolution {
            m,
            x,
            y,
            lambda,
            trivial: is_trivial(x, y),
            orbit_id: orbit_representative((x, y)),
        }
    }
}

fn sort_solutions(sols: &mut Vec<ThueSolution>) {
    sols.sort_by_key(|s| (s.orbit_id, s.x, s.y));
    sols.dedup();
}

/// First index in `[lo, hi]` where `pred` turns true, for monotone `pred`;
/// `hi + 1` if never.
fn partition_point(lo: i64, hi: i64, pred: impl Fn(i64) -> bool) -> i64 {
    let (mut lo, mut hi) = (lo, hi + 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// All `(x, y)` with `max(|x|, |y|) ≤ bound` and `F_m(x, y) ∈ lambdas`.
///
/// For fixed `y`, `x ↦ F_m(x, y)` is monotone between its critical points
/// `x = y(m ± √D)/3`; on each monotone run the window `1 ≤ F ≤ max λ` is
/// located by bisection and scanned, and a few integers around each
/// critical point are checked directly.
pub fn solve_bounded(m: i64, lambdas: &[u128], bound: i64) -> Vec<ThueSolution> {
    let set: BTreeSet<u128> = lambdas.iter().copied().filter(|&l| l > 0).collect();
    let Some(&lmax) = set.iter().next_back() else {
        return Vec::new();
    };
    let lmax = lmax.min(i128::MAX as u128) as i128;
    let sd = (discriminant_base(m) as f64).sqrt();
    let mut out = Vec::new();
    let mut push = |x: i64, y: i64, v: i128| {
        if v >= 1 && set.contains(&(v as u128)) {
            out.push(ThueSolution::new(m, x, y, v as u128));
        }
    };
    for y in -bound..=bound {
        let g = |x: i64| eval_clamped(m, x, y);
        let mut c = [y as f64 * (m as f64 - sd) / 3.0, y as f64 * (m as f64 + sd) / 3.0];
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let near: Vec<(i64, i64)> = c
            .iter()
            .map(|&t| {
                let t = t.clamp(-(bound as f64) - 8.0, bound as f64 + 8.0);
                ((t.floor() as i64 - 3).max(-bound), (t.ceil() as i64 + 3).min(bound))
            })
            .collect();
        let mut checked: BTreeSet<i64> = BTreeSet::new();
        for &(lo, hi) in &near {
            for x in lo..=hi {
                if checked.insert(x) {
                    push(x, y, g(x));
                }
            }
        }
        let runs = [
            (-bound, near[0].0 - 1),
            (near[0].1 + 1, near[1].0 - 1),
            (near[1].1 + 1, bound),
        ];
        for (lo, hi) in runs {
            if lo > hi {
                continue;
            }
            let increasing = g(hi) >= g(lo);
            let (first, last) = if increasing {
                (partition_point(lo, hi, |x| g(x) >= 1), partition_point(lo, hi, |x| g(x) > lmax) - 1)
            } else {
                (partition_point(lo, hi, |x| g(x) <= lmax), partition_point(lo, hi, |x| g(x) < 1) - 1)
            };
            for x in first..=last {
                if !checked.contains(&x) {
                    push(x, y, g(x));
                }
            }
        }
    }
    sort_solutions(&mut out);
    out
}

/// Reference search over the whole box, `O(bound²)`.
pub fn solve_bounded_exhaustive(m: i64, lambdas: &[u128], bound: i64) -> Vec<ThueSolution> {
    let set: BTreeSet<u128> = lambdas.iter().copied().collect();
    let mut out = Vec::new();
    for y in -bound..=bound {
        for x in -bound..=bound {
            let v = thue_eval(m, x, y);
            if let Ok(v) = u128::try_from(v) {
                if set.contains(&v) {
                    out.push(ThueSolution::new(m, x, y, v));
                }
            }
        }
    }
    sort_solutions(&mut out);
    out
}

/// Positive divisors of `m² + 3m + 9`.
pub fn divisor_lambdas(m: i64) -> Result<Vec<u128>, ThueError> {
    let fact = arith::factorize(discriminant_base(m)).map_err(FieldError::from)?;
    Ok(fact.divisors())
}

/// `N = m + D·xy(x+y)/F_m(x, y)` and its canonical representative `n`.
pub fn coincidence_target(m: i64, x: i64, y: i64) -> Result<(i128, i64), ThueError> {
    if is_trivial(x, y) {
        return Err(ThueError::Trivial { x, y });
    }
    let f = thue_eval(m, x, y);
    let num = BigInt::from(discriminant_base(m)) * BigInt::from(x) * BigInt::from(y) * BigInt::from(x as i128 + y as i128);
    if f == BigInt::from(0) || &num % &f != BigInt::from(0) {
        return Err(ThueError::NonExact { m, x, y, value: f.to_string() });
    }
    let big_n = BigInt::from(m) + num / f;
    let n = i128::try_from(&big_n).map_err(|_| ThueError::TargetOverflow { m, n: big_n.to_string() })?;
    let as_i64 = i64::try_from(n).map_err(|_| ThueError::TargetOverflow { m, n: n.to_string() })?;
    if as_i64 < -1 && as_i64.checked_add(3).is_none() {
        return Err(ThueError::TargetOverflow { m, n: n.to_string() });
    }
    Ok((n, normalize(as_i64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidencePair {
    pub m: i64,
    pub n: i64,
    /// Nontrivial solutions for `m` whose `N` points to `n`, and vice versa.
    pub witnesses: Vec<ThueSolution>,
    pub shared_conductor: u128,
    pub character_class: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceScan {
    pub max: i64,
    pub bound: i64,
    pub pairs: Vec<CoincidencePair>,
    /// Nontrivial solutions where `F_m(x, y) ∤ D·xy(x+y)`.
    pub non_exact: Vec<ThueSolution>,
}

/// All `−1 ≤ m < n ≤ max` with `L_m = L_n`, found through Thue solutions and
/// confirmed by comparing the selected characters of every field in range.
pub fn coincidence_scan(max: i64, bound: i64) -> Result<CoincidenceScan, ThueError> {
    type Found = (Vec<(i64, ThueSolution)>, Vec<ThueSolution>);
    let per_m: Vec<Result<Found, ThueError>> = (-1..=max)
        .into_par_iter()
        .map(|m| {
            let mut hits = Vec::new();
            let mut non_exact = Vec::new();
            for s in solve_bounded(m, &divisor_lambdas(m)?, bound) {
                if s.trivial {
                    continue;
                }
                match coincidence_target(m, s.x, s.y) {
                    Ok((_, n)) => hits.push((n, s)),
                    Err(ThueError::NonExact { .. }) => non_exact.push(s),
                    Err(e) => return Err(e),
                }
            }
            Ok((hits, non_exact))
        })
        .collect();

    let mut by_formula: BTreeMap<(i64, i64), Vec<ThueSolution>> = BTreeMap::new();
    let mut non_exact = Vec::new();
    for (i, r) in per_m.into_iter().enumerate() {
        let m = i as i64 - 1;
        let (hits, bad) = r?;
        non_exact.extend(bad);
        for (n, s) in hits {
            if n != m && (-1..=max).contains(&n) {
                by_formula.entry((m.min(n), m.max(n))).or_default().push(s);
            }
        }
    }

    let keys: Vec<Result<(u128, u32), ThueError>> = (-1..=max)
        .into_par_iter()
        .map(|m| {
            let f = field::build_field(m)?;
            let chi = character::select_for_field(&f)?;
            Ok((f.conductor, chi.class_id))
        })
        .collect();
    let mut groups: BTreeMap<(u128, u32), Vec<i64>> = BTreeMap::new();
    for (i, k) in keys.into_iter().enumerate() {
        groups.entry(k?).or_default().push(i as i64 - 1);
    }
    let mut by_character: BTreeMap<(i64, i64), (u128, u32)> = BTreeMap::new();
    for (key, ms) in &groups {
        for (i, &a) in ms.iter().enumerate() {
            for &b in &ms[i + 1..] {
                by_character.insert((a, b), *key);
            }
        }
    }

    let formula_only: Vec<_> = by_formula.keys().filter(|k| !by_character.contains_key(k)).copied().collect();
    let character_only: Vec<_> = by_character.keys().filter(|k| !by_formula.contains_key(k)).copied().collect();
    if !formula_only.is_empty() || !character_only.is_empty() {
        return Err(ThueError::CertificationMismatch { formula_only, character_only });
    }
    let pairs = by_formula
        .into_iter()
        .map(|((m, n), mut witnesses)| {
            sort_solutions(&mut witnesses);
            let (conductor, class) = by_character[&(m, n)];
            CoincidencePair { m, n, witnesses, shared_conductor: conductor, character_class: class }
        })
        .collect();
    sort_solutions(&mut non_exact);
    Ok(CoincidenceScan { max, bound, pairs, non_exact })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NontrivialCount {
    pub bound: i64,
    pub total: usize,
    pub orbits: usize,
    /// `(m, number of nontrivial solutions)` over [`COINCIDENCE_SET`].
    pub per_m: Vec<(i64, usize)>,
    /// Every orbit has exactly three points and maps to a partner field.
    pub orbit_structure_ok: bool,
}

/// Nontrivial solutions of `F_m(x, y) = λ`, `λ | D`, over `ms` within the box.
pub fn count_nontrivial(ms: &[i64], bound: i64) -> Result<NontrivialCount, ThueError> {
    let mut per_m = Vec::new();
    let mut total = 0;
    let mut orbits = 0;
    let mut ok = true;
    for &m in ms {
        let sols: Vec<ThueSolution> = solve_bounded(m, &divisor_lambdas(m)?, bound)
            .into_iter()
            .filter(|s| !s.trivial)
            .collect();
        let mut by_orbit: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for s in &sols {
            *by_orbit.entry(s.orbit_id).or_default() += 1;
            let partner = coincidence_target(m, s.x, s.y).map(|(_, n)| n);
            ok &= matches!(partner, Ok(n) if n != m && COINCIDENCE_SET.contains(&n));
        }
        ok &= by_orbit.values().all(|&c| c == 3);
        orbits += by_orbit.len();
        total += sols.len();
        per_m.push((m, sols.len()));
    }
    Ok(NontrivialCount { bound, total, orbits, per_m, orbit_structure_ok: ok })
}

/// The count over all of [`COINCIDENCE_SET`]; 66 when the box is large enough.
pub fn count_nontrivial_66(bound: i64) -> Result<NontrivialCount, ThueError> {
    count_nontrivial(&COINCIDENCE_SET, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        assert_eq!(thue_eval(7, 1, 0), BigInt::from(1));
        for m in [-1i64, 0, 9, 1000] {
            assert_eq!(thue_eval(m, -1, -1), BigInt::from(2 * m + 3));
        }
        assert_eq!(thue_eval(1, 3, 1), BigInt::from(5));
        assert_eq!(thue_eval(2, -2, 9), BigInt::from(1));
        // Overflow is widened, not wrapped.
        let big = i64::MAX / 2;
        assert_eq!(thue_eval_i128(0, big, 0), None);
        assert_eq!(thue_eval(0, big, 0), BigInt::from(big).pow(3));
    }

    #[test]
    fn extra_solutions_for_m_1() {
        for (x, y) in [(3, 1), (1, -4), (-4, 3), (8, 3), (3, -11), (-11, 8)] {
            assert_eq!(thue_eval(1, x, y), BigInt::from(5));
        }
    }

    #[test]
    fn trivial_families() {
        for m in [-1i64, 0, 4, 77, 2389] {
            for c in -20i64..=20 {
                let c3 = BigInt::from(c).pow(3);
                assert_eq!(thue_eval(m, c, 0), c3);
                assert_eq!(thue_eval(m, 0, -c), c3);
                assert_eq!(thue_eval(m, -c, c), c3);
            }
        }
    }

    proptest! {
        #[test]
        fn generic_solutions(m in -1_000_000i64..1_000_000) {
            for (x, y) in [(-1, -1), (-1, 2), (2, -1), (-m - 1, -1), (-1, m + 2), (m + 2, -m - 1)] {
                prop_assert_eq!(thue_eval(m, x, y), BigInt::from(2 * m + 3));
            }
        }

        #[test]
        fn orbit_preserves_form(m in -50_000i64..50_000, x in -10_000i64..10_000, y in -10_000i64..10_000) {
            let p1 = orbit_step((x, y));
            let p3 = orbit_step(orbit_step(p1));
            prop_assert_eq!(p3, (x, y));
            prop_assert_eq!(thue_eval(m, p1.0, p1.1), thue_eval(m, x, y));
            prop_assert_eq!(orbit_representative(p1), orbit_representative((x, y)));
        }

        #[test]
        fn homogeneity(m in -1000i64..1000, x in -500i64..500, y in -500i64..500, c in -50i64..50) {
            prop_assert_eq!(thue_eval(m, c * x, c * y), BigInt::from(c).pow(3) * thue_eval(m, x, y));
        }
    }

    #[test]
    fn bisection_search_matches_exhaustive() {
        for m in [-1i64, 0, 1, 2, 3, 4, 5, 12, 13, 40, 54, 66, 200] {
            let lambdas = divisor_lambdas(m).unwrap();
            assert_eq!(
                solve_bounded(m, &lambdas, 120),
                solve_bounded_exhaustive(m, &lambdas, 120),
                "m = {m}"
            );
        }
        // Non-divisor λ sets as well.
        let lambdas: Vec<u128> = (1..=500).collect();
        assert_eq!(solve_bounded(7, &lambdas, 60), solve_bounded_exhaustive(7, &lambdas, 60));
    }

    #[test]
    fn solve_examples() {
        let s = solve_bounded(2, &divisor_lambdas(2).unwrap(), 50);
        assert!(s.iter().any(|s| (s.x, s.y, s.lambda) == (-2, 9, 1) && !s.trivial));
        let s = solve_bounded(4, &divisor_lambdas(4).unwrap(), 100);
        assert!(s.iter().all(|s| s.trivial));
        let s = solve_bounded(-1, &divisor_lambdas(-1).unwrap(), 10_000);
        assert_eq!(s.iter().filter(|s| !s.trivial).count(), 9);
    }

    #[test]
    fn target_examples() {
        assert_eq!(coincidence_target(2, -2, 9).unwrap(), (-2392, 2389));
        assert!(matches!(coincidence_target(5, 1, 0), Err(ThueError::Trivial { .. })));
        let mut partners = BTreeSet::new();
        for s in solve_bounded(-1, &divisor_lambdas(-1).unwrap(), 2000) {
            if !s.trivial {
                partners.insert(coincidence_target(-1, s.x, s.y).unwrap().1);
            }
        }
        assert_eq!(partners, BTreeSet::from([5, 12, 1259]));
    }

    #[test]
    fn counts_of_nontrivial_solutions() {
        let c = count_nontrivial_66(DEFAULT_BOUND).unwrap();
        assert_eq!(c.total, 66);
        assert_eq!(c.orbits, 22);
        assert!(c.orbit_structure_ok);
        assert_eq!(count_nontrivial(&[0, 3, 54], DEFAULT_BOUND).unwrap().total, 18);
        assert_eq!(count_nontrivial(&[2389], DEFAULT_BOUND).unwrap().total, 3);
    }

    #[test]
    fn small_coincidence_scans() {
        let s = coincidence_scan(4, DEFAULT_BOUND).unwrap();
        let pairs: Vec<_> = s.pairs.iter().map(|p| (p.m, p.n)).collect();
        assert_eq!(pairs, vec![(0, 3)]);
        let s = coincidence_scan(100, DEFAULT_BOUND).unwrap();
        let pairs: Vec<_> = s.pairs.iter().map(|p| (p.m, p.n)).collect();
        assert_eq!(pairs, vec![(-1, 5), (-1, 12), (0, 3), (0, 54), (1, 66), (3, 54), (5, 12)]);
        assert!(s.non_exact.is_empty());
    }

    #[test]
    fn x2_3x_9_powers_of_three() {
        let mut sols = Vec::new();
        for x in -1_000_000i128..=1_000_000 {
            let mut v = x * x + 3 * x + 9;
            let mut r = 0;
            while v % 3 == 0 {
                v /= 3;
                r += 1;
            }
            if v == 1 {
                sols.push((x as i64, r));
            }
        }
        sols.sort();
        assert_eq!(sols, vec![(-6, 3), (-3, 2), (0, 2), (3, 3)]);
    }
}
