//! Exact integer arithmetic: primality, factorization, cubefree parts and
//! cubic residue classes modulo primes `p ≡ 1 (mod 3)`.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Trial division covers every prime below this bound before Pollard–Brent
/// takes over.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

/// Miller–Rabin with the first 13 primes as witnesses is exact below this
/// value (Sorenson–Webster).
pub const DETERMINISTIC_MR_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

/// Largest accepted input of [`factorize`] (exclusive).
pub const FACTORIZE_LIMIT: u128 = 1 << 126;

const MR_WITNESSES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const MR_WITNESSES_WIDE: [u64; 20] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
];

/// Pollard–Brent polynomial constants `c` tried in order, `x ↦ x² + c`.
const RHO_SEEDS: std::ops::RangeInclusive<u64> = 1..=64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("cannot factor zero")]
    Zero,
    #[error("{0} exceeds the supported factorization range (< 2^126)")]
    OutOfRange(u128),
    #[error("Pollard-Brent failed to split composite {0} after {1} seeds")]
    RhoExhausted(u128, usize),
    #[error("{0} is not a prime congruent to 1 mod 3")]
    NotPrimeOneModThree(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Primality {
    Composite,
    /// Proven prime (deterministic witness set below [`DETERMINISTIC_MR_LIMIT`]).
    Prime,
    /// Passed the wide witness set, above the proven range.
    ProbablePrime,
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    // m < 2^126, so the doubling below never overflows.
    let (mut a, mut b) = (a % m, b % m);
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    acc
}

pub fn pow_mod(base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

#[inline]
pub fn pow_mod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut base = (base % m) as u128;
    let mut acc = 1u128 % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        exp >>= 1;
    }
    acc as u64
}

fn miller_rabin(n: u128, witnesses: &[u64]) -> bool {
    let d0 = n - 1;
    let s = d0.trailing_zeros();
    let d = d0 >> s;
    'witness: for &w in witnesses {
        let a = w as u128 % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primality(n: u128) -> Primality {
    if n < 2 {
        return Primality::Composite;
    }
    for &p in &MR_WITNESSES_WIDE {
        let p = p as u128;
        if n == p {
            return Primality::Prime;
        }
        if n % p == 0 {
            return Primality::Composite;
        }
    }
    if n < 71 * 71 {
        return Primality::Prime;
    }
    if n < DETERMINISTIC_MR_LIMIT {
        if miller_rabin(n, &MR_WITNESSES) {
            Primality::Prime
        } else {
            Primality::Composite
        }
    } else if miller_rabin(n, &MR_WITNESSES_WIDE) {
        Primality::ProbablePrime
    } else {
        Primality::Composite
    }
}

/// Deterministic for every `n < 2^64` (and well beyond).
pub fn is_prime(n: u128) -> bool {
    primality(n) != Primality::Composite
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_DIVISION_BOUND - 1))
}

/// Complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub value: u128,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn from_factors(mut factors: Vec<(u128, u32)>) -> Self {
        factors.sort_unstable();
        let mut merged: Vec<(u128, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        let value = merged.iter().map(|&(p, e)| p.pow(e)).product();
        Factorization { value, factors: merged }
    }

    pub fn exponent_of(&self, p: u128) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn recompose(&self) -> u128 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// True when every listed prime was proven prime rather than merely
    /// passing the wide probable-prime test.
    pub fn is_proven(&self) -> bool {
        self.factors.iter().all(|&(p, _)| p < DETERMINISTIC_MR_LIMIT)
    }

    /// All positive divisors, ascending.
    pub fn divisors(&self) -> Vec<u128> {
        let mut divs = vec![1u128];
        for &(p, e) in &self.factors {
            let current = divs.len();
            let mut pk = 1u128;
            for _ in 0..e {
                pk *= p;
                for i in 0..current {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

impl fmt::Display for Factorization {
    /// Renders as `p^e*p^e`; the empty product renders as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{p}^{e}")?;
        }
        Ok(())
    }
}

fn abs_diff(a: u128, b: u128) -> u128 {
    a.max(b) - a.min(b)
}

/// One Pollard–Brent run with `x ↦ x² + c (mod n)`, starting at `y = 2`.
/// Returns a nontrivial factor or `None` when the cycle closes first.
fn brent(n: u128, c: u128) -> Option<u128> {
    const BATCH: u64 = 128;
    let step = |x: u128| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u128, 1u64, 1u128);
    let mut g = 1u128;
    let (mut x, mut ys) = (y, y);
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..BATCH.min(r - k) {
                y = step(y);
                q = mul_mod(q, abs_diff(x, y), n);
            }
            g = gcd(q, n);
            k += BATCH;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        loop {
            ys = step(ys);
            g = gcd(abs_diff(x, ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn split_composite(n: u128) -> Result<u128, ArithError> {
    for c in RHO_SEEDS {
        if let Some(d) = brent(n, c as u128) {
            return Ok(d);
        }
    }
    Err(ArithError::RhoExhausted(n, RHO_SEEDS.count()))
}

fn factor_cofactor(n: u128, out: &mut Vec<(u128, u32)>) -> Result<(), ArithError> {
    if n == 1 {
        return Ok(());
    }
    if is_prime(n) {
        out.push((n, 1));
        return Ok(());
    }
    // Perfect squares defeat rho occasionally for tiny cycles; check directly.
    let r = isqrt(n);
    if r * r == n {
        let mut inner = Vec::new();
        factor_cofactor(r, &mut inner)?;
        out.extend(inner.into_iter().map(|(p, e)| (p, 2 * e)));
        return Ok(());
    }
    let d = split_composite(n)?;
    factor_cofactor(d, out)?;
    factor_cofactor(n / d, out)
}

/// Complete factorization of `1 ≤ n < 2^126`: trial division by primes below
/// 10⁶, then Pollard–Brent with seeds `c = 1, 2, …`.
pub fn factorize(n: u128) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Zero);
    }
    if n >= FACTORIZE_LIMIT {
        return Err(ArithError::OutOfRange(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    factor_cofactor(rest, &mut factors)?;
    let fact = Factorization::from_factors(factors);
    debug_assert_eq!(fact.value, n);
    for &(p, _) in &fact.factors {
        if !is_prime(p) {
            return Err(ArithError::RhoExhausted(p, 0));
        }
    }
    Ok(fact)
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn icbrt(n: u128) -> u128 {
    let mut x = (n as f64).cbrt() as u128;
    while x > 0 && x * x * x > n {
        x -= 1;
    }
    while (x + 1).pow(3) <= n {
        x += 1;
    }
    x
}

/// Writes `n = b·c³` with `b` cubefree.
pub fn cubefree_decompose(n: u128) -> Result<(u128, u128), ArithError> {
    Ok(cubefree_parts(&factorize(n)?))
}

pub fn cubefree_parts(fact: &Factorization) -> (u128, u128) {
    let (mut b, mut c) = (1u128, 1u128);
    for &(p, e) in &fact.factors {
        b *= p.pow(e % 3);
        c *= p.pow(e / 3);
    }
    (b, c)
}

/// Position of `a^((p-1)/3)` among the cube roots of unity modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CubicClass {
    Zero,
    Unity,
    /// The primitive cube root of unity with the smaller representative in `[0, p)`.
    Omega,
    OmegaBar,
}

impl CubicClass {
    /// Exponent `k` with value `ω^k`; `None` for [`CubicClass::Zero`].
    pub fn exponent(self) -> Option<u8> {
        match self {
            CubicClass::Zero => None,
            CubicClass::Unity => Some(0),
            CubicClass::Omega => Some(1),
            CubicClass::OmegaBar => Some(2),
        }
    }
}

/// The primitive cube roots of unity mod `p`, smaller representative first.
pub fn cube_roots_of_unity(p: u64) -> Result<(u64, u64), ArithError> {
    if p % 3 != 1 || !is_prime(p as u128) {
        return Err(ArithError::NotPrimeOneModThree(p));
    }
    let e = (p - 1) / 3;
    for g in 2..p {
        let t = pow_mod_u64(g, e, p);
        if t != 1 {
            let t2 = (t as u128 * t as u128 % p as u128) as u64;
            return Ok((t.min(t2), t.max(t2)));
        }
    }
    unreachable!("a prime p ≡ 1 mod 3 has non-cubes")
}

pub fn cubic_residue_class(a: i128, p: u64) -> Result<CubicClass, ArithError> {
    if p % 3 != 1 || !is_prime(p as u128) {
        return Err(ArithError::NotPrimeOneModThree(p));
    }
    let r = a.rem_euclid(p as i128) as u64;
    if r == 0 {
        return Ok(CubicClass::Zero);
    }
    let t = pow_mod_u64(r, (p - 1) / 3, p);
    if t == 1 {
        return Ok(CubicClass::Unity);
    }
    let t2 = (t as u128 * t as u128 % p as u128) as u64;
    Ok(if t < t2 { CubicClass::Omega } else { CubicClass::OmegaBar })
}
