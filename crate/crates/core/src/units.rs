//! Regulator of `E = ⟨−1, α, α+1⟩` and its index in the full unit group.
//!
//! With `L₁ = log α₁`, `L₂ = log(α₁+1)` for the largest root `α₁`, the log
//! embeddings are `α ↦ (L₁, −L₂, L₂−L₁)` and `α+1 ↦ (L₂, L₁−L₂, −L₁)`, so
//! `Reg(E) = L₁² − L₁L₂ + L₂²`.
//!
//! When `[O_L : Z[α]] > 1`, `E` may have finite index `u > 1`. [`unit_index`]
//! finds it by testing, for each prime `ℓ ≤ Reg(E)/R_min`, whether some
//! element of `E \ E^ℓ` is an `ℓ`-th power in `L`. `R_min = log²(f/2)/4` is
//! Cusick's lower bound `R ≥ log²(d/4)/16` for totally real cubic fields of
//! discriminant `d = f²`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::dd::Dd;
use crate::field::{self, poly_discriminant, SimplestCubicField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UnitsError {
    #[error("m = {m}: unit coefficients of size {magnitude:e} exceed working precision")]
    PrecisionExhausted { m: i64, magnitude: f64 },
    #[error("m = {m}: regulator ratio {ratio} is not close to the integer index {u}")]
    InconsistentIndex { m: i64, ratio: f64, u: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegulatorReport {
    pub reg_e: f64,
    /// Rows: `α`, `α+1`; columns: embeddings 1 and 2.
    pub log_matrix: [[f64; 2]; 2],
    /// Signed determinants on embedding pairs (1,2), (1,3), (2,3).
    pub minors: [f64; 3],
    pub precision_bits: u32,
}

/// `(L₁, L₂)` at the requested precision, for the canonical `m ≥ −1`.
fn base_logs(m: i64, precision: u32) -> (Dd, Dd) {
    let a1 = field::real_roots(field::normalize(m), precision).roots[0];
    if precision > 53 {
        (a1.ln(), (a1 + Dd::ONE).ln())
    } else {
        (Dd::new(a1.hi.ln()), Dd::new(a1.hi.ln_1p()))
    }
}

pub fn regulator_e(m: i64, precision: u32) -> RegulatorReport {
    let m = field::normalize(m);
    let (l1, l2) = base_logs(m, precision);
    let reg = if precision > 53 {
        (l1 * l1 - l1 * l2 + l2 * l2).to_f64()
    } else {
        let (a, b) = (l1.hi, l2.hi);
        a * a - a * b + b * b
    };
    // Minors from logs of each root taken independently.
    let r = field::real_roots(m, precision).as_f64();
    let la: Vec<f64> = r.iter().map(|x| x.abs().ln()).collect();
    let lb: Vec<f64> = r.iter().map(|x| (x + 1.0).abs().ln()).collect();
    let minor = |i: usize, j: usize| la[i] * lb[j] - la[j] * lb[i];
    RegulatorReport {
        reg_e: reg,
        log_matrix: [[la[0], la[1]], [lb[0], lb[1]]],
        minors: [minor(0, 1), minor(0, 2), minor(1, 2)],
        precision_bits: if precision > 53 { 106 } else { 53 },
    }
}

/// `log²(f/2)/4`.
pub fn regulator_lower_bound(conductor: u128) -> f64 {
    let x = (conductor as f64 / 2.0).ln();
    x * x / 4.0
}

/// A unit of `L` through its three real embeddings: signs and `log|·|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub signs: [i8; 3],
    pub logs: [Dd; 3],
}

impl Unit {
    pub fn mul(&self, o: &Unit) -> Unit {
        Unit {
            signs: [0, 1, 2].map(|i| self.signs[i] * o.signs[i]),
            logs: [0, 1, 2].map(|i| self.logs[i] + o.logs[i]),
        }
    }

    pub fn pow(&self, k: i64) -> Unit {
        Unit {
            signs: self.signs.map(|s| if k % 2 == 0 { 1 } else { s }),
            logs: self.logs.map(|l| l * Dd::new(k as f64)),
        }
    }

    fn log_f64(&self) -> [f64; 3] {
        self.logs.map(Dd::to_f64)
    }

    /// `(σ₁, σ₂, σ₃)` embeddings as floating values (may overflow for huge units).
    pub fn embeddings(&self) -> [Dd; 3] {
        [0, 1, 2].map(|i| {
            let v = self.logs[i].exp();
            if self.signs[i] < 0 {
                -v
            } else {
                v
            }
        })
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `|det|` of the first two log coordinates.
pub fn pair_regulator(a: &Unit, b: &Unit) -> f64 {
    let (x, y) = (a.log_f64(), b.log_f64());
    (x[0] * y[1] - x[1] * y[0]).abs()
}

/// Lagrange–Gauss reduction of the log lattice spanned by `a`, `b`.
pub fn reduce_pair(mut a: Unit, mut b: Unit) -> (Unit, Unit) {
    loop {
        if dot(&b.log_f64(), &b.log_f64()) < dot(&a.log_f64(), &a.log_f64()) {
            std::mem::swap(&mut a, &mut b);
        }
        let mu = dot(&a.log_f64(), &b.log_f64()) / dot(&a.log_f64(), &a.log_f64());
        // Ties at |μ| = 1/2 occur for the hexagonal lattices of Galois-stable groups.
        if mu.abs() <= 0.5 + 1e-9 {
            return (a, b);
        }
        b = b.mul(&a.pow(-(mu.round() as i64)));
    }
}

/// `α` and `α+1` for the canonical `m ≥ −1`, in double-double.
pub fn shanks_units(m: i64) -> (Unit, Unit) {
    let (l1, l2) = base_logs(field::normalize(m), 106);
    (
        Unit { signs: [1, -1, -1], logs: [l1, -l2, l2 - l1] },
        Unit { signs: [1, 1, -1], logs: [l2, l1 - l2, -l1] },
    )
}

/// Integer characteristic polynomial `x³ − e₁x² + e₂x − e₃` of a unit
/// numerically known through its embeddings, if its coefficients are integral.
fn integral_char_poly(theta: &[Dd; 3], m: i64) -> Result<Option<[i128; 3]>, UnitsError> {
    let [a, b, c] = *theta;
    let e = [a + b + c, a * b + a * c + b * c, a * b * c];
    let magnitude = e.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
    if magnitude > 1e24 {
        return Err(UnitsError::PrecisionExhausted { m, magnitude });
    }
    let mut out = [0i128; 3];
    for i in 0..3 {
        let r = e[i].round();
        if (e[i] - r).abs().to_f64() > 1e-6 {
            return Ok(None);
        }
        out[i] = r.hi as i128 + r.lo as i128;
    }
    Ok(Some(out))
}

/// True when the discriminant of `x³ − e₁x² + e₂x − e₃` is `f²` times a
/// nonzero square, as for any order of `L`.
fn discriminant_matches(e: &[i128; 3], conductor: u128) -> bool {
    let coeffs = [
        BigInt::from(1),
        BigInt::from(-e[0]),
        BigInt::from(e[1]),
        BigInt::from(-e[2]),
    ];
    let disc = poly_discriminant(&coeffs);
    let f2 = BigInt::from(conductor) * BigInt::from(conductor);
    if disc.is_zero() || disc.is_negative() || !(&disc % &f2).is_zero() {
        return false;
    }
    let q = disc / f2;
    let s = q.sqrt();
    &s * &s == q
}

/// An `ℓ`-th root of `eps` inside `L`, if one exists.
fn lth_root(eps: &Unit, l: u64, field: &SimplestCubicField) -> Result<Option<Unit>, UnitsError> {
    let inv = Dd::ONE / Dd::new(l as f64);
    let logs = eps.logs.map(|x| x * inv);
    let sign_patterns: Vec<[i8; 3]> = if l % 2 == 1 {
        vec![eps.signs]
    } else {
        // Only a totally positive unit (up to −1) can be a square.
        if eps.signs.iter().any(|&s| s != eps.signs[0]) {
            return Ok(None);
        }
        vec![[1, 1, 1], [1, 1, -1], [1, -1, 1], [1, -1, -1]]
    };
    for signs in sign_patterns {
        let cand = Unit { signs, logs };
        if let Some(e) = integral_char_poly(&cand.embeddings(), field.m)? {
            if e[2].abs() == 1 && discriminant_matches(&e, field.conductor) {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitIndex {
    /// `[O× : E]`.
    pub u: u64,
    pub reg_e: f64,
    /// Regulator of the saturated unit group.
    pub regulator: f64,
    /// Cusick's bound used to stop the prime search.
    pub lower_bound: f64,
    /// Prime factors of `u`, with multiplicity.
    pub steps: Vec<u64>,
    /// `true` when `E` is known to be the full unit group because `Z[α]` is maximal.
    pub by_monogenicity: bool,
}

/// Computes `[O× : E]`.
pub fn unit_index(field: &SimplestCubicField) -> Result<UnitIndex, UnitsError> {
    let reg_e = regulator_e(field.m, 106).reg_e;
    let lower = regulator_lower_bound(field.conductor);
    if field.index == 1 {
        return Ok(UnitIndex {
            u: 1,
            reg_e,
            regulator: reg_e,
            lower_bound: lower,
            steps: vec![],
            by_monogenicity: true,
        });
    }
    let (mut b1, mut b2) = {
        let (a, b) = shanks_units(field.m);
        reduce_pair(a, b)
    };
    let mut reg = reg_e;
    let mut u = 1u64;
    let mut steps = Vec::new();
    let max_l = (reg_e / lower * (1.0 + 1e-9)).floor() as u64;
    for l in arith::primes_up_to(max_l.max(1)) {
        if l as f64 > reg / lower * (1.0 + 1e-9) {
            break;
        }
        'same_l: loop {
            if l as f64 > reg / lower * (1.0 + 1e-9) {
                break;
            }
            let half = l as i64 / 2;
            let candidates = (0..l as i64)
                .map(|a| {
                    let a = if a > half { a - l as i64 } else { a };
                    (b1.pow(a).mul(&b2), false)
                })
                .chain(std::iter::once((b1, true)));
            for (eps, replaces_b1) in candidates {
                if let Some(theta) = lth_root(&eps, l, field)? {
                    if replaces_b1 {
                        b1 = theta;
                    } else {
                        b2 = theta;
                    }
                    (b1, b2) = reduce_pair(b1, b2);
                    reg /= l as f64;
                    u *= l;
                    steps.push(l);
                    continue 'same_l;
                }
            }
            break;
        }
    }
    let direct = pair_regulator(&b1, &b2);
    let ratio = reg_e / direct;
    if (ratio - u as f64).abs() > 1e-6 * u as f64 {
        return Err(UnitsError::InconsistentIndex { m: field.m, ratio, u });
    }
    Ok(UnitIndex {
        u,
        reg_e,
        regulator: direct,
        lower_bound: lower,
        steps,
        by_monogenicity: false,
    })
}
