//! Class numbers from `h·R = f·|L(1,χ)|²/4`, with the known structural
//! constraints on `h` checked against the result.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{self, AnalyticError, LValue};
use crate::arith;
use crate::character::{self, CharacterError};
use crate::field::{self, FieldError, SimplestCubicField};
use crate::units::{self, UnitsError};

/// `|H − round(H)| < ROUND_TOLERANCE · max(1, H)`.
pub const ROUND_TOLERANCE: f64 = 1e-3;

/// Class numbers below 43 that can occur.
pub const ALLOWED_BELOW_43: [u64; 17] = [1, 3, 4, 7, 9, 12, 13, 16, 19, 21, 25, 27, 28, 31, 36, 37, 39];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassNoError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Character(#[from] CharacterError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error("m = {}: class number estimate {} does not round (residual {:.3e})", .0.field.m, .0.h_estimate, .0.round_residual)]
    Unresolved(Box<ClassNumberReport>),
    #[error("m = {m}: expected h = {expected} but H_raw = {h_raw}, ratio {ratio} is not a positive integer")]
    NonIntegralRatio { m: i64, expected: u64, h_raw: f64, ratio: f64 },
    #[error("m = {m}: unit index from the table ({from_table}) differs from the computed one ({computed})")]
    UnitIndexMismatch { m: i64, from_table: u64, computed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraints {
    /// `h ≡ 0, 1 (mod 3)`.
    pub residue_mod_3: bool,
    /// `h ≡ 1 (mod 3)` exactly when `f = 9` or `f` is prime.
    pub genus_residue: bool,
    /// `3^{r−1} | h` for `r` ramified primes.
    pub genus_divisibility: bool,
    /// Membership in [`ALLOWED_BELOW_43`]; `None` when `h ≥ 43`.
    pub allowed_list: Option<bool>,
    /// No prime `p ≡ 2 (mod 3)` divides `h` to an exactly odd power.
    pub parity_rule: bool,
}

impl Constraints {
    pub fn all_pass(&self) -> bool {
        self.residue_mod_3
            && self.genus_residue
            && self.genus_divisibility
            && self.allowed_list != Some(false)
            && self.parity_rule
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassNumberReport {
    pub field: SimplestCubicField,
    /// Conjugation class of the selected character.
    pub character_class: u32,
    pub l_value: LValue,
    pub reg_e: f64,
    /// `f·|L|² / (4·Reg(E))`, which equals `h / u`.
    pub h_raw: f64,
    /// `u = [O× : E]`.
    pub unit_index: u64,
    /// `h_raw · u`.
    pub h_estimate: f64,
    pub h: Option<u64>,
    pub round_residual: f64,
    /// 53, or 106 after escalation to double-double.
    pub precision_bits: u32,
    pub constraints: Option<Constraints>,
}

/// Class number of `L_m`.
pub fn class_number(m: i64) -> Result<ClassNumberReport, ClassNoError> {
    class_number_of(field::build_field(m)?)
}

pub fn class_number_of(field: SimplestCubicField) -> Result<ClassNumberReport, ClassNoError> {
    let chi = character::select_for_field(&field)?;
    let uidx = units::unit_index(&field)?;
    let f = field.conductor as f64;

    let attempt = |wide: bool| -> Result<(LValue, f64, f64, f64), ClassNoError> {
        let (l, reg) = if wide {
            (analytic::l1_abs_squared_wide(&chi)?, units::regulator_e(field.m, 106).reg_e)
        } else {
            (analytic::l1_abs_squared(&chi)?, units::regulator_e(field.m, 53).reg_e)
        };
        let h_raw = f * l.abs_squared / (4.0 * reg);
        let h_est = h_raw * uidx.u as f64;
        let residual = h_est - h_est.round();
        Ok((l, reg, h_raw, residual))
    };
    let resolved = |h_est: f64, residual: f64| {
        h_est.round() >= 1.0 && residual.abs() < ROUND_TOLERANCE * h_est.max(1.0)
    };

    let (mut l, mut reg, mut h_raw, mut residual) = attempt(false)?;
    let mut bits = 53;
    if !resolved(h_raw * uidx.u as f64, residual) {
        (l, reg, h_raw, residual) = attempt(true)?;
        bits = 106;
    }
    let h_est = h_raw * uidx.u as f64;
    let mut report = ClassNumberReport {
        character_class: chi.class_id,
        l_value: l,
        reg_e: reg,
        h_raw,
        unit_index: uidx.u,
        h_estimate: h_est,
        h: None,
        round_residual: residual,
        precision_bits: bits,
        constraints: None,
        field,
    };
    if !resolved(h_est, residual) {
        return Err(ClassNoError::Unresolved(Box::new(report)));
    }
    let h = h_est.round() as u64;
    report.h = Some(h);
    report.constraints = Some(congruence_checks(&report.field, h));
    Ok(report)
}

pub fn allowed_small_h(h: u64) -> bool {
    ALLOWED_BELOW_43.contains(&h)
}

/// `h = A² + 3B²` for some integers `A, B`.
pub fn is_a2_plus_3b2(h: u64) -> bool {
    (0..)
        .map(|b: u64| 3 * b * b)
        .take_while(|&t| t <= h)
        .any(|t| {
            let r = h - t;
            let a = (r as f64).sqrt().round() as u64;
            a * a == r
        })
}

/// False when some prime `p ≡ 2 (mod 3)` divides `h` to an exactly odd power.
pub fn parity_rule(h: u64) -> bool {
    let fact = arith::factorize(h as u128).expect("h > 0");
    fact.factors.iter().all(|&(p, e)| p % 3 != 2 || e % 2 == 0)
}

pub fn congruence_checks(field: &SimplestCubicField, h: u64) -> Constraints {
    let r = field.num_ramified();
    let f_prime_or_9 = field.conductor == 9 || arith::is_prime(field.conductor);
    Constraints {
        residue_mod_3: h % 3 != 2,
        genus_residue: (h % 3 == 1) == f_prime_or_9,
        genus_divisibility: h % 3u64.pow(r.saturating_sub(1)) == 0,
        allowed_list: (h < 43).then(|| allowed_small_h(h)),
        parity_rule: parity_rule(h),
    }
}

/// `u = h_table / H_raw`, required to be a positive integer within tolerance,
/// equal to 1 for monogenic fields, and equal to the computed unit index.
pub fn cross_check(report: &ClassNumberReport, expected_h: u64) -> Result<u64, ClassNoError> {
    let ratio = expected_h as f64 / report.h_raw;
    let u = ratio.round();
    let m = report.field.m;
    if u < 1.0 || (ratio - u).abs() >= ROUND_TOLERANCE * ratio.max(1.0) {
        return Err(ClassNoError::NonIntegralRatio {
            m,
            expected: expected_h,
            h_raw: report.h_raw,
            ratio,
        });
    }
    let u = u as u64;
    if (report.field.index == 1 && u != 1) || u != report.unit_index {
        return Err(ClassNoError::UnitIndexMismatch {
            m,
            from_table: u,
            computed: report.unit_index,
        });
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allowed_list_matches_brute_force() {
        let brute: Vec<u64> = (1..43).filter(|&h| is_a2_plus_3b2(h) && parity_rule(h)).collect();
        assert_eq!(brute, ALLOWED_BELOW_43.to_vec());
        assert!(allowed_small_h(12));
        assert!(!allowed_small_h(2));
        assert!(allowed_small_h(25));
    }

    #[test]
    fn spot_class_numbers() {
        for (m, h) in [(-1i64, 1u64), (6, 3), (11, 4), (64, 16), (31, 13), (5, 1), (12, 1), (54, 1), (66, 1), (40, 9)] {
            let r = class_number(m).unwrap();
            assert_eq!(r.h, Some(h), "m = {m}");
            assert!(r.round_residual.abs() < 1e-6);
            assert!(r.constraints.unwrap().all_pass(), "m = {m}");
        }
    }

    #[test]
    fn congruence_examples() {
        let c = class_number(13).unwrap();
        assert_eq!(c.h, Some(3));
        assert!(c.constraints.unwrap().genus_divisibility);
        let c = class_number(-1).unwrap().constraints.unwrap();
        assert!(c.genus_residue && c.residue_mod_3);
        let f40 = field::build_field(40).unwrap();
        assert_eq!(f40.num_ramified(), 3);
        assert!(congruence_checks(&f40, 9).genus_divisibility);
        assert!(!congruence_checks(&f40, 3).genus_divisibility);
        assert!(!congruence_checks(&f40, 2).residue_mod_3);
    }

    #[test]
    fn cross_check_examples() {
        assert_eq!(cross_check(&class_number(-1).unwrap(), 1).unwrap(), 1);
        assert_eq!(cross_check(&class_number(12).unwrap(), 1).unwrap(), 13);
        assert_eq!(cross_check(&class_number(21).unwrap(), 3).unwrap(), 1);
        assert!(matches!(
            cross_check(&class_number(-1).unwrap(), 2),
            Err(ClassNoError::UnitIndexMismatch { .. })
        ));
        assert!(matches!(
            cross_check(&class_number(13).unwrap(), 4),
            Err(ClassNoError::NonIntegralRatio { .. })
        ));
    }

    #[test]
    fn tau_symmetry() {
        for m in [2i64, 17, 40, 301] {
            assert_eq!(class_number(m).unwrap().h, class_number(-m - 3).unwrap().h);
        }
    }

    #[test]
    fn monogenic_constraints_to_1200() {
        for m in -1..=1200i64 {
            let f = field::build_field(m).unwrap();
            if f.index != 1 {
                continue;
            }
            let r = class_number_of(f).unwrap();
            assert_eq!(r.unit_index, 1);
            assert!(r.constraints.unwrap().all_pass(), "m = {m}: h = {:?}", r.h);
        }
    }
}
