//! The field `L_m` attached to an integer `m`: discriminant base
//! `D = m² + 3m + 9`, conductor, index `[O_L : Z[α]]` and real embeddings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, ArithError, Factorization};
use crate::dd::Dd;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("m = {m}: index D/f = {quotient} disagrees with closed form {closed}")]
    IndexMismatch { m: i64, quotient: u128, closed: u128 },
    #[error("m = {m}: prime {p} divides D but is not 1 mod 6")]
    BadPrime { m: i64, p: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexClass {
    One,
    Three,
    TwentySeven,
    Other(u128),
}

impl IndexClass {
    pub fn from_index(index: u128) -> Self {
        match index {
            1 => IndexClass::One,
            3 => IndexClass::Three,
            27 => IndexClass::TwentySeven,
            v => IndexClass::Other(v),
        }
    }

    pub fn value(self) -> u128 {
        match self {
            IndexClass::One => 1,
            IndexClass::Three => 3,
            IndexClass::TwentySeven => 27,
            IndexClass::Other(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplestCubicField {
    pub m: i64,
    pub d: u128,
    pub d_factors: Factorization,
    /// Cubefree part: `D = b·c³`.
    pub b: u128,
    pub c: u128,
    /// Exponent of 3 in `D`.
    pub r3: u32,
    pub gamma: u32,
    pub conductor: u128,
    /// Field discriminant `f²`; `None` past `u128`.
    pub field_disc: Option<u128>,
    /// `[O_L : Z[α]] = D / f`.
    pub index: u128,
    /// Exponent of 3 in the index.
    pub k: u32,
    pub index_class: IndexClass,
}

impl SimplestCubicField {
    /// Ramified primes, with the 3-part counted once when `9 | f`.
    pub fn ramified_primes(&self) -> Vec<u128> {
        let mut out = Vec::new();
        if self.gamma == 9 {
            out.push(3);
        }
        out.extend(
            self.d_factors
                .primes()
                .filter(|&p| p != 3 && self.conductor % p == 0),
        );
        out
    }

    /// `r` in `f = p₁⋯p_r` or `f = 9p₁⋯p_{r−1}`.
    pub fn num_ramified(&self) -> u32 {
        self.ramified_primes().len() as u32
    }

    pub fn conductor_factors(&self) -> Factorization {
        let mut factors: Vec<(u128, u32)> =
            self.ramified_primes().into_iter().map(|p| (p, 1)).collect();
        if self.gamma == 9 {
            factors[0].1 = 2;
        }
        Factorization::from_factors(factors)
    }
}

/// `L_m = L_{−m−3}`; returns the representative `≥ −1`.
pub fn normalize(m: i64) -> i64 {
    if m >= -1 {
        m
    } else {
        -(m + 3)
    }
}

pub fn discriminant_base(m: i64) -> u128 {
    let m = m as i128;
    (m * m + 3 * m + 9) as u128
}

/// `3^k · ∏ p^{t_p}` with `t_p = e_p − 1` unless `3 | e_p`.
pub fn index_closed_form(m: i64, d_factors: &Factorization) -> u128 {
    let mut index = 3u128.pow(three_adic_k(m));
    for &(p, e) in &d_factors.factors {
        if p == 3 {
            continue;
        }
        let t = if e % 3 == 0 { e } else { e - 1 };
        index *= p.pow(t);
    }
    index
}

fn three_adic_k(m: i64) -> u32 {
    if m.rem_euclid(3) != 0 || matches!(m.rem_euclid(9), 0 | 6) {
        0
    } else if m.rem_euclid(27) == 12 {
        3
    } else {
        1
    }
}

pub fn gamma(m: i64) -> u32 {
    if m.rem_euclid(3) != 0 || m.rem_euclid(27) == 12 {
        1
    } else {
        9
    }
}

pub fn build_field(m: i64) -> Result<SimplestCubicField, FieldError> {
    let m = normalize(m);
    let d = discriminant_base(m);
    let d_factors = arith::factorize(d)?;
    build_field_from_factors(m, d_factors)
}

/// Same as [`build_field`] with the factorization of `D` supplied.
pub fn build_field_from_factors(
    m: i64,
    d_factors: Factorization,
) -> Result<SimplestCubicField, FieldError> {
    let m = normalize(m);
    let d = discriminant_base(m);
    debug_assert_eq!(d_factors.value, d);
    for p in d_factors.primes() {
        if p != 3 && p % 6 != 1 {
            return Err(FieldError::BadPrime { m, p });
        }
    }
    let (b, c) = arith::cubefree_parts(&d_factors);
    let gamma = gamma(m);
    let conductor = gamma as u128
        * d_factors
            .primes()
            .filter(|&p| p != 3 && b % p == 0)
            .product::<u128>();
    let index = d / conductor;
    let closed = index_closed_form(m, &d_factors);
    if d % conductor != 0 || closed != index {
        return Err(FieldError::IndexMismatch {
            m,
            quotient: index,
            closed,
        });
    }
    Ok(SimplestCubicField {
        m,
        d,
        r3: d_factors.exponent_of(3),
        d_factors,
        b,
        c,
        gamma,
        conductor,
        field_disc: conductor.checked_mul(conductor),
        index,
        k: three_adic_k(m),
        index_class: IndexClass::from_index(index),
    })
}

/// Real embeddings of `α`, strictly descending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoots {
    pub roots: [Dd; 3],
    pub precision_bits: u32,
}

impl RealRoots {
    pub fn as_f64(&self) -> [f64; 3] {
        self.roots.map(Dd::to_f64)
    }
}

#[inline]
pub fn eval_poly(m: f64, x: f64) -> f64 {
    ((x - m) * x - (m + 3.0)) * x - 1.0
}

fn eval_poly_dd(m: Dd, x: Dd) -> Dd {
    ((x - m) * x - (m + Dd::new(3.0))) * x - Dd::ONE
}

/// Largest root of `f_m` for `m ≥ −1`, by the trigonometric form of the
/// depressed cubic `t³ − 3Dt − (2m+3)D` followed by Newton polishing.
pub fn largest_root(m: i64) -> f64 {
    debug_assert!(m >= -1);
    let mf = m as f64;
    let sd = (discriminant_base(m) as f64).sqrt();
    let theta = ((2.0 * mf + 3.0) / (2.0 * sd)).clamp(-1.0, 1.0).acos();
    let mut x = (2.0 * sd * (theta / 3.0).cos() + mf) / 3.0;
    for _ in 0..2 {
        let fp = (3.0 * x - 2.0 * mf) * x - (mf + 3.0);
        x -= eval_poly(mf, x) / fp;
    }
    x
}

pub fn largest_root_dd(m: i64) -> Dd {
    let md = Dd::new(m as f64);
    let mut x = Dd::new(largest_root(m));
    for _ in 0..2 {
        let fp = (Dd::new(3.0) * x - Dd::new(2.0) * md) * x - (md + Dd::new(3.0));
        x = x - eval_poly_dd(md, x) / fp;
    }
    x
}

/// Roots of `f_m`; `precision ≤ 53` uses binary64, anything larger uses
/// double-double (106 bits).
///
/// For `m ≥ −1` the two smaller roots come from the largest one through
/// `σ(α) = −1/(α+1)`, which keeps `α₂` and `α₃ + 1` accurate for large `m`.
pub fn real_roots(m: i64, precision: u32) -> RealRoots {
    let wide = precision > 53;
    if m < -1 {
        // f_m(X) = −X³ f_{−m−3}(1/X).
        let inner = real_roots(normalize(m), precision);
        let [b1, b2, b3] = inner.roots;
        return RealRoots {
            roots: [b1.recip(), b3.recip(), b2.recip()],
            precision_bits: inner.precision_bits,
        };
    }
    let a1 = if wide {
        largest_root_dd(m)
    } else {
        Dd::new(largest_root(m))
    };
    let (a2, a3) = if wide {
        (-(a1 + Dd::ONE).recip(), -Dd::ONE - a1.recip())
    } else {
        let x = a1.hi;
        (Dd::new(-1.0 / (x + 1.0)), Dd::new(-1.0 - 1.0 / x))
    };
    RealRoots {
        roots: [a1, a2, a3],
        precision_bits: if wide { 106 } else { 53 },
    }
}

/// `σ(x) = −1/(x+1)`.
pub fn sigma(x: f64) -> f64 {
    -1.0 / (x + 1.0)
}

/// Index permutation `π` with `σ(α_i) = α_{π(i)}`, or `None` if `σ` does not
/// map the root set to itself as a 3-cycle within `rel_tol`.
pub fn sigma_permutation(roots: &[f64; 3], rel_tol: f64) -> Option<[usize; 3]> {
    let mut perm = [usize::MAX; 3];
    for i in 0..3 {
        let s = sigma(roots[i]);
        let j = (0..3).find(|&j| (s - roots[j]).abs() <= rel_tol * roots[j].abs().max(1.0))?;
        perm[i] = j;
    }
    let is_cycle = perm[0] != 0 && perm[perm[0]] != 0 && perm[perm[perm[0]]] == 0;
    is_cycle.then_some(perm)
}

/// Checks `27·f_m((X+m)/3) = X³ − 3DX − (2m+3)D` exactly at `X`.
pub fn reduced_form_check(m: i64, x: &BigRational) -> bool {
    let mq = BigRational::from_integer(BigInt::from(m));
    let d = BigRational::from_integer(BigInt::from(discriminant_base(m)));
    let three = BigRational::from_integer(BigInt::from(3));
    let t = (x + &mq) / &three;
    let f = &t * &t * &t - &mq * &t * &t - (&mq + &three) * &t - BigRational::one();
    let lhs = BigRational::from_integer(BigInt::from(27)) * f;
    let rhs = x * x * x
        - &three * &d * x
        - (BigRational::from_integer(BigInt::from(2 * m as i128 + 3))) * &d;
    lhs == rhs
}

fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `Res(f, g)` as the Sylvester determinant; coefficients highest degree first.
pub fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let n = df + dg;
    let mut rows = Vec::with_capacity(n);
    for i in 0..dg {
        let mut row = vec![BigInt::zero(); n];
        for (j, c) in f.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..df {
        let mut row = vec![BigInt::zero(); n];
        for (j, c) in g.iter().enumerate() {
            row[i + j] = c.clone();
        }
        rows.push(row);
    }
    bareiss_det(rows)
}

/// `disc(f) = (−1)^{n(n−1)/2} Res(f, f′)` for monic `f` of degree `n`.
pub fn poly_discriminant(coeffs: &[BigInt]) -> BigInt {
    let n = coeffs.len() - 1;
    let deriv: Vec<BigInt> = coeffs[..n]
        .iter()
        .enumerate()
        .map(|(i, c)| c * BigInt::from(n - i))
        .collect();
    let r = resultant(coeffs, &deriv);
    if (n * (n - 1) / 2) % 2 == 1 {
        -r
    } else {
        r
    }
}

pub fn f_m_coefficients(m: i64) -> [BigInt; 4] {
    [
        BigInt::one(),
        BigInt::from(-m),
        BigInt::from(-(m as i128) - 3),
        BigInt::from(-1),
    ]
}

/// Discriminant of `f_m`, which equals `D²`.
pub fn discriminant(m: i64) -> BigInt {
    poly_discriminant(&f_m_coefficients(m))
}

/// `(N(α), N(α+1), N(α−1))` from the embeddings.
pub fn norm_identities(roots: &[f64; 3]) -> (f64, f64, f64) {
    let prod = |s: f64| roots.iter().map(|&r| r + s).product::<f64>();
    (prod(0.0), prod(1.0), prod(-1.0))
}

/// True when `m` lies in the squarefree cases where `Z[α]` is the maximal order.
pub fn monogenic_by_congruence(m: i64, d_factors: &Factorization) -> bool {
    let sqfree_away_from_3 = d_factors
        .factors
        .iter()
        .all(|&(p, e)| p == 3 || e == 1);
    (m.rem_euclid(3) != 0 || matches!(m.rem_euclid(9), 0 | 6)) && sqfree_away_from_3
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(-8), 5);
        assert_eq!(normalize(5), 5);
        assert_eq!(normalize(-2), -1);
        assert_eq!(normalize(-1), -1);
        assert_eq!(normalize(i64::MIN), i64::MAX - 2);
    }

    #[test]
    fn build_field_examples() {
        let f = build_field(54).unwrap();
        assert_eq!((f.d, f.conductor, f.index), (3087, 9, 343));
        assert_eq!(f.index_class, IndexClass::Other(343));
        let f = build_field(12).unwrap();
        assert_eq!((f.d, f.conductor, f.index), (189, 7, 27));
        assert_eq!(f.index_class, IndexClass::TwentySeven);
        assert_eq!((f.gamma, f.k, f.r3), (1, 3, 3));
        let f = build_field(13).unwrap();
        assert_eq!((f.conductor, f.index), (217, 1));
        assert_eq!(f.num_ramified(), 2);
        let f = build_field(5).unwrap();
        assert_eq!((f.conductor, f.index, f.b, f.c), (7, 7, 49, 1));
        let f = build_field(0).unwrap();
        assert_eq!((f.conductor, f.index, f.gamma), (9, 1, 9));
        assert_eq!(f.conductor_factors().to_string(), "3^2");
        let f = build_field(3).unwrap();
        assert_eq!((f.conductor, f.index), (9, 3));
        assert_eq!(build_field(-8).unwrap(), build_field(5).unwrap());
    }

    fn closed_form_conductor_shape(f: &SimplestCubicField) -> bool {
        let fc = arith::factorize(f.conductor).unwrap();
        fc.factors.iter().all(|&(p, e)| {
            (p == 3 && e == 2) || (p % 6 == 1 && e == 1)
        })
    }

    #[test]
    fn conductor_index_invariants_to_1e5() {
        for m in -1..=100_000i64 {
            let f = build_field(m).unwrap();
            assert_eq!(f.conductor * f.index, f.d, "m = {m}");
            assert_eq!(f.index, index_closed_form(m, &f.d_factors));
            assert_eq!(f.field_disc, Some(f.conductor * f.conductor));
            assert_eq!(f.b * f.c.pow(3), f.d);
            let r3 = match (m.rem_euclid(3), m.rem_euclid(9)) {
                (1 | 2, _) => 0,
                (_, 0 | 6) => 2,
                _ => 3,
            };
            assert_eq!(f.r3, r3, "m = {m}");
            assert!(closed_form_conductor_shape(&f), "m = {m}");
        }
    }

    #[test]
    fn index_one_iff_congruence_conditions() {
        for m in -1..=10_000i64 {
            let f = build_field(m).unwrap();
            assert_eq!(
                f.index_class == IndexClass::One,
                monogenic_by_congruence(m, &f.d_factors),
                "m = {m}"
            );
        }
    }

    #[test]
    fn tau_invariance() {
        for m in [-1i64, 0, 5, 12, 77, 1259, 99_999] {
            let a = build_field(m).unwrap();
            let b = build_field(-m - 3).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn roots_match_trigonometric_closed_forms() {
        let r = real_roots(-1, 53).as_f64();
        let expected = [2.0 * (2.0 * PI / 7.0).cos(), 2.0 * (6.0 * PI / 7.0).cos(), 2.0 * (4.0 * PI / 7.0).cos()];
        let mut e = expected;
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for i in 0..3 {
            assert!((r[i] - e[i]).abs() < 1e-14);
        }
        assert!((r[0] - 1.24698).abs() < 1e-5);
        // X³ − 3X − 1 has roots 2cos(2πk/9 ± …): 2cos(π/9), 2cos(5π/9), 2cos(7π/9).
        let r = real_roots(0, 53).as_f64();
        let e = [2.0 * (PI / 9.0).cos(), 2.0 * (5.0 * PI / 9.0).cos(), 2.0 * (7.0 * PI / 9.0).cos()];
        for i in 0..3 {
            assert!((r[i] - e[i]).abs() < 1e-14);
        }
        assert!((r[0] - 1.87939).abs() < 1e-5);
        assert!((r[1] + 0.34730).abs() < 1e-5);
        assert!((r[2] + 1.53209).abs() < 1e-5);
    }

    #[test]
    fn roots_residuals_and_ordering() {
        for m in [-7i64, -2, -1, 0, 1, 5, 100, 12345, 10_000_000] {
            for prec in [53, 106] {
                let rr = real_roots(m, prec);
                let r = rr.as_f64();
                assert!(r[0] > r[1] && r[1] > r[2], "m = {m}");
                for x in r {
                    let scale = (x.abs() + 1.0).powi(3) + (m as f64).abs() * (x.abs() + 1.0).powi(2);
                    assert!(eval_poly(m as f64, x).abs() < 1e-13 * scale, "m = {m} x = {x}");
                }
                let (n0, n1, _) = norm_identities(&r);
                assert!((n0 - 1.0).abs() < 1e-9);
                assert!((n1 + 1.0).abs() < 1e-9);
            }
        }
        let dd = real_roots(1000, 106).roots[0];
        let residual = eval_poly_dd(Dd::new(1000.0), dd);
        assert!(residual.abs().to_f64() < 1e-20);
    }

    #[test]
    fn sigma_is_a_three_cycle() {
        for m in [-1i64, 0, 3, 40, 5000, 1_000_000] {
            let r = real_roots(m, 53).as_f64();
            assert_eq!(sigma_permutation(&r, 1e-9), Some([1, 2, 0]), "m = {m}");
        }
    }

    #[test]
    fn reduced_form_examples() {
        let q = |n: i64| BigRational::from_integer(BigInt::from(n));
        assert!(reduced_form_check(2, &q(0)));
        assert!(reduced_form_check(0, &q(3)));
        assert!(reduced_form_check(-1, &q(1)));
        let half = BigRational::new(BigInt::from(7), BigInt::from(2));
        assert!(reduced_form_check(1259, &half));
    }

    #[test]
    fn discriminant_is_d_squared() {
        use proptest::prelude::*;
        let mut runner = proptest::test_runner::TestRunner::deterministic();
        runner
            .run(&(-1_000_000i64..1_000_000), |m| {
                let d = BigInt::from(discriminant_base(m));
                prop_assert_eq!(discriminant(m), &d * &d);
                Ok(())
            })
            .unwrap();
        assert_eq!(discriminant(-1), BigInt::from(49));
    }
}
