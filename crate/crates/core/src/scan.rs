//! Range scans: the small-class-number enumeration by index and conductor
//! shape, the `h < 16` scan, and verification of the embedded tables.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic;
use crate::arith::{self, Factorization};
use crate::classno::{self, ClassNoError, ClassNumberReport, Constraints};
use crate::field::{self, discriminant_base, IndexClass};
use crate::refdata::{self, ReferenceRow};
pub use crate::refdata::Subcase;

/// Largest `m` covered by the `h < 16` tables.
pub const H16_MAX_M: i64 = 10_000_000;
pub const H16_CHUNK: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScanError {
    #[error("invalid range {lo}..={hi}")]
    BadRange { lo: i64, hi: i64 },
    #[error("index {0} is not one of 1, 3, 27")]
    BadIndex(u32),
    #[error(transparent)]
    ClassNo(#[from] ClassNoError),
    #[error(transparent)]
    Arith(#[from] arith::ArithError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub m: i64,
    pub d: u128,
    pub d_factors: Factorization,
    pub conductor: u128,
    pub index: u128,
    pub index_class: IndexClass,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub subcase: Option<Subcase>,
    /// `D`, `D/9` or `D/27` as printed in the small-class lists.
    pub value: u128,
    /// `None` when the analytic estimate failed to round.
    pub h: Option<u64>,
    pub h_estimate: f64,
    pub unit_index: u64,
    pub constraints: Option<Constraints>,
}

impl ScanRow {
    fn from_report(r: &ClassNumberReport, subcase: Option<Subcase>, divisor: u128) -> Self {
        let f = &r.field;
        ScanRow {
            m: f.m,
            d: f.d,
            d_factors: f.d_factors.clone(),
            conductor: f.conductor,
            index: f.index,
            index_class: f.index_class,
            subcase,
            value: f.d / divisor,
            h: r.h,
            h_estimate: r.h_estimate,
            unit_index: r.unit_index,
            constraints: r.constraints,
        }
    }

    pub fn unresolved(&self) -> bool {
        self.h.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub filter: String,
    pub range: (i64, i64),
    /// Rows per class number.
    pub buckets: BTreeMap<u64, usize>,
    pub unresolved: usize,
    pub total: usize,
    /// Fields whose class number was actually computed.
    pub computed: usize,
    #[serde(skip)]
    pub runtime: Duration,
}

impl ScanSummary {
    fn new(filter: String, range: (i64, i64), rows: &[ScanRow], computed: usize, start: Instant) -> Self {
        let mut buckets = BTreeMap::new();
        for h in rows.iter().filter_map(|r| r.h) {
            *buckets.entry(h).or_default() += 1;
        }
        ScanSummary {
            filter,
            range,
            buckets,
            unresolved: rows.iter().filter(|r| r.unresolved()).count(),
            total: rows.len(),
            computed,
            runtime: start.elapsed(),
        }
    }
}

/// Class number report, keeping unresolved reports instead of failing.
fn report(m: i64) -> Result<ClassNumberReport, ScanError> {
    match classno::class_number(m) {
        Ok(r) => Ok(r),
        Err(ClassNoError::Unresolved(r)) => Ok(*r),
        Err(e) => Err(e.into()),
    }
}

fn check_range(lo: i64, hi: i64) -> Result<(), ScanError> {
    if lo < -1 || hi < lo {
        return Err(ScanError::BadRange { lo, hi });
    }
    Ok(())
}

/// Index and conductor shape of `m` by the congruence and primality filters
/// of the small-class enumeration. `Some((index, None))` marks the special
/// fields `m = 0` and `m = 3`; `None` means `m` is not enumerated.
pub fn classify(m: i64) -> Option<(u32, Option<Subcase>)> {
    match m {
        0 => return Some((1, None)),
        3 => return Some((3, None)),
        _ => {}
    }
    let d = discriminant_base(m);
    let shape = |q: u128| -> Option<bool> {
        if arith::is_prime(q) {
            Some(true)
        } else {
            let fact = arith::factorize(q).ok()?;
            (q > 1 && fact.is_squarefree()).then_some(false)
        }
    };
    if m.rem_euclid(3) != 0 {
        return shape(d).map(|p| (1, Some(if p { Subcase::PrimeF } else { Subcase::CompositeF })));
    }
    if matches!(m.rem_euclid(9), 0 | 6) {
        return shape(d / 9).map(|p| (1, Some(if p { Subcase::NineP } else { Subcase::NineS })));
    }
    match m.rem_euclid(27) {
        3 | 21 => shape(d / 27).map(|p| (3, Some(if p { Subcase::NineP } else { Subcase::NineS }))),
        12 => shape(d / 27).map(|p| (27, Some(if p { Subcase::PrimeF } else { Subcase::CompositeF }))),
        _ => None,
    }
}

/// Range of `m` over which fields of this index can still have `h ≤ hmax`.
pub fn default_range(index: u32, hmax: f64) -> Result<(i64, i64), ScanError> {
    let c = analytic::cutoff_m(index, hmax).map_err(|_| ScanError::BadIndex(index))?;
    Ok((-1, c.m - 1))
}

/// Fields of index in `indices` (and of the given conductor shape) with
/// `−1 ≤ lo ≤ m ≤ hi` and `h ≤ hmax`, ascending in `m`. Unresolved class
/// numbers are kept as rows with `h = None`.
pub fn scan_small_class(
    lo: i64,
    hi: i64,
    indices: &[u32],
    subcase: Option<Subcase>,
    hmax: u64,
) -> Result<(Vec<ScanRow>, ScanSummary), ScanError> {
    check_range(lo, hi)?;
    if let Some(&i) = indices.iter().find(|i| !matches!(i, 1 | 3 | 27)) {
        return Err(ScanError::BadIndex(i));
    }
    let start = Instant::now();
    let results: Vec<Result<Option<ScanRow>, ScanError>> = (lo..=hi)
        .into_par_iter()
        .map(|m| {
            let Some((index, sc)) = classify(m) else { return Ok(None) };
            if !indices.contains(&index) || (subcase.is_some() && sc != subcase) {
                return Ok(None);
            }
            let divisor = sc.map_or(if index == 1 { 9 } else { 27 }, |s| refdata::list_divisor(index, s));
            let r = report(m)?;
            Ok(Some(ScanRow::from_report(&r, sc, divisor)))
        })
        .collect();
    let mut rows = Vec::new();
    let mut computed = 0;
    for r in results {
        if let Some(row) = r? {
            computed += 1;
            if row.h.map_or(true, |h| h <= hmax) {
                rows.push(row);
            }
        }
    }
    let filter = format!(
        "index {:?}, subcase {}, h <= {hmax}",
        indices,
        subcase.map_or("any".to_string(), |s| s.to_string())
    );
    let summary = ScanSummary::new(filter, (lo, hi), &rows, computed, start);
    Ok((rows, summary))
}

fn inverse_mod(a: i128, n: i128) -> i128 {
    let (mut r0, mut r1, mut s0, mut s1) = (a.rem_euclid(n), n, 1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(n)
}

/// `(p, roots of x² + 3x + 9 mod p²)` for primes `p ≡ 1 (mod 3)`, `p ≤ limit`.
fn square_roots_table(limit: u64) -> Vec<(u64, [i128; 2])> {
    arith::primes_up_to(limit)
        .into_par_iter()
        .filter(|&p| p % 3 == 1)
        .map(|p| {
            let (w1, w2) = arith::cube_roots_of_unity(p).expect("p ≡ 1 mod 3");
            let p2 = p as i128 * p as i128;
            let lift = |x: i128| {
                let g = (x * x + 3 * x + 9).rem_euclid(p2);
                (x - g * inverse_mod(2 * x + 3, p2)).rem_euclid(p2)
            };
            (p, [lift(3 * w1 as i128 % p as i128), lift(3 * w2 as i128 % p as i128)])
        })
        .collect()
}

/// `[O_L : Z[α]]` for every `m` in `lo..=hi` (`lo ≥ 0`) by sieving prime
/// squares dividing `D`, without factoring `D`.
fn sieve_index(lo: i64, hi: i64, table: &[(u64, [i128; 2])]) -> Vec<u128> {
    let len = (hi - lo + 1) as usize;
    let mut index: Vec<u128> = (lo..=hi)
        .map(|m| {
            let k = if m.rem_euclid(3) != 0 || matches!(m.rem_euclid(9), 0 | 6) {
                0
            } else if m.rem_euclid(27) == 12 {
                3
            } else {
                1
            };
            3u128.pow(k)
        })
        .collect();
    let d_max = discriminant_base(hi);
    for &(p, roots) in table {
        let p = p as u128;
        let p2 = (p * p) as i128;
        if p * p > d_max {
            break;
        }
        for r in roots {
            let first = lo as i128 + (r - lo as i128).rem_euclid(p2);
            let mut m = first;
            while m <= hi as i128 {
                let mut d = discriminant_base(m as i64);
                let mut e = 0;
                while d % p == 0 {
                    d /= p;
                    e += 1;
                }
                let t = if e % 3 == 0 { e } else { e - 1 };
                index[(m as i64 - lo) as usize] *= p.pow(t);
                m += p2;
            }
        }
    }
    debug_assert_eq!(index.len(), len);
    index
}

/// Progress of a long scan: `(last m finished, fields computed so far)`.
pub type Progress<'a> = &'a mut dyn FnMut(i64, usize);

/// Fields with `h < 16` and `lo ≤ m ≤ hi`, ascending in `m`.
///
/// With `prefilter`, the conductor is obtained by sieving the index and the
/// class number is computed only where the applicable analytic lower bound
/// does not already exceed 15. Without it every field is computed.
pub fn scan_h_below_16(
    lo: i64,
    hi: i64,
    prefilter: bool,
    mut progress: Option<Progress<'_>>,
) -> Result<(Vec<ScanRow>, ScanSummary), ScanError> {
    check_range(lo, hi)?;
    let start = Instant::now();
    let table = if prefilter { square_roots_table((hi.max(2) + 2) as u64) } else { Vec::new() };
    let mut rows = Vec::new();
    let mut computed = 0;
    let mut a = lo;
    while a <= hi {
        let b = (a + H16_CHUNK - 1).min(hi);
        let candidates: Vec<i64> = if prefilter {
            let base = a.max(0);
            let index = if base <= b { sieve_index(base, b, &table) } else { Vec::new() };
            (a..=b)
                .filter(|&m| {
                    if m < 0 {
                        return true;
                    }
                    let d = discriminant_base(m);
                    let f = d / index[(m - base) as usize];
                    analytic::best_bound(f as f64, d as f64).map_or(true, |bound| bound <= 15.0)
                })
                .collect()
        } else {
            (a..=b).collect()
        };
        computed += candidates.len();
        let chunk: Vec<Result<ScanRow, ScanError>> = candidates
            .into_par_iter()
            .map(|m| report(m).map(|r| ScanRow::from_report(&r, None, 1)))
            .collect();
        for row in chunk {
            let row = row?;
            if row.h.map_or(true, |h| h < 16) {
                rows.push(row);
            }
        }
        if let Some(p) = progress.as_mut() {
            p(b, computed);
        }
        a = b + 1;
    }
    let filter = format!("h < 16{}", if prefilter { "" } else { ", no prefilter" });
    let summary = ScanSummary::new(filter, (lo, hi), &rows, computed, start);
    Ok((rows, summary))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCheck {
    pub table: u8,
    pub m: i64,
    pub h: u64,
    pub conductor: Option<u128>,
    pub index: Option<u128>,
    pub h_raw: Option<f64>,
    pub unit_index: Option<u64>,
    /// First failing stage and its message.
    pub failure: Option<String>,
}

impl RowCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn check_row(row: &ReferenceRow) -> RowCheck {
    let mut out = RowCheck {
        table: row.table,
        m: row.m,
        h: row.h,
        conductor: None,
        index: None,
        h_raw: None,
        unit_index: None,
        failure: None,
    };
    let fail = |mut out: RowCheck, stage: &str, msg: String| {
        out.failure = Some(format!("{stage}: {msg}"));
        out
    };
    let f = match field::build_field(row.m) {
        Ok(f) => f,
        Err(e) => return fail(out, "field", e.to_string()),
    };
    out.conductor = Some(f.conductor);
    out.index = Some(f.index);
    if f.d_factors != row.factorization {
        return fail(out, "factorization", format!("computed {}, table {}", f.d_factors, row.factorization));
    }
    if f.m.rem_euclid(27) != row.mod27 as i64 {
        return fail(out, "mod27", format!("computed {}, table {}", f.m.rem_euclid(27), row.mod27));
    }
    if f.conductor * f.index != f.d {
        return fail(out, "conductor", format!("f·index = {} ≠ D", f.conductor * f.index));
    }
    let r = match classno::class_number_of(f) {
        Ok(r) => r,
        Err(ClassNoError::Unresolved(r)) => *r,
        Err(e) => return fail(out, "class number", e.to_string()),
    };
    out.h_raw = Some(r.h_raw);
    match classno::cross_check(&r, row.h) {
        Ok(u) => out.unit_index = Some(u),
        Err(e) => return fail(out, "cross-check", e.to_string()),
    }
    out
}

/// Recomputes every row of the embedded `h < 16` tables.
pub fn verify_tables() -> Vec<RowCheck> {
    refdata::reference().rows.par_iter().map(check_row).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieved_index_matches_factorization() {
        let table = square_roots_table(200_002);
        let idx = sieve_index(0, 200_000, &table);
        for m in (0..=200_000i64).step_by(7).chain([5, 12, 54, 66, 1259, 2389, 36435]) {
            assert_eq!(idx[m as usize], field::build_field(m).unwrap().index, "m = {m}");
        }
        let idx = sieve_index(9_999_000, 10_000_000, &square_roots_table(10_000_002));
        for (i, m) in (9_999_000..=10_000_000i64).enumerate().step_by(37) {
            assert_eq!(idx[i], field::build_field(m).unwrap().index, "m = {m}");
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0), Some((1, None)));
        assert_eq!(classify(3), Some((3, None)));
        assert_eq!(classify(-1), Some((1, Some(Subcase::PrimeF))));
        assert_eq!(classify(12), Some((27, Some(Subcase::PrimeF))));
        assert_eq!(classify(21), Some((3, Some(Subcase::NineP))));
        assert_eq!(classify(5), None);
        // Index agrees with the field wherever classify accepts m.
        for m in -1..3000i64 {
            if let Some((index, _)) = classify(m) {
                assert_eq!(field::build_field(m).unwrap().index, index as u128, "m = {m}");
            }
        }
    }

    #[test]
    fn small_scans() {
        let (rows, s) = scan_small_class(-1, 200, &[27], Some(Subcase::PrimeF), 1).unwrap();
        assert_eq!(rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![12, 39, 93]);
        assert_eq!(s.total, 3);
        let (rows, _) = scan_small_class(-1, 10, &[1], None, 1000).unwrap();
        let zero = rows.iter().find(|r| r.m == 0).unwrap();
        assert_eq!((zero.conductor, zero.h), (9, Some(1)));
    }

    #[test]
    fn h16_prefilter_agrees_with_exhaustive() {
        let (a, sa) = scan_h_below_16(-1, 1200, true, None).unwrap();
        let (b, sb) = scan_h_below_16(-1, 1200, false, None).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.buckets, sb.buckets);
        assert!(sa.computed < sb.computed);
    }

    #[test]
    fn h16_up_to_100_matches_tables() {
        let (rows, _) = scan_h_below_16(-1, 100, true, None).unwrap();
        let expected: Vec<(i64, u64)> = refdata::reference()
            .rows
            .iter()
            .filter(|r| r.m <= 100)
            .map(|r| (r.m, r.h))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        let got: Vec<(i64, u64)> = rows.iter().map(|r| (r.m, r.h.unwrap())).collect();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 62);
    }

    #[test]
    fn verify_some_rows() {
        let r = refdata::reference();
        for m in [506370i64, 6440111, 1376233, 12, 36435] {
            let row = r.rows.iter().find(|row| row.m == m).unwrap();
            let c = check_row(row);
            assert!(c.passed(), "{c:?}");
        }
        let mut bad = r.rows[0].clone();
        bad.h = 2;
        assert!(check_row(&bad).failure.unwrap().starts_with("cross-check"));
    }
}
