//! Brute-force checkers for the test suite and `commel selftest`.
//!
//! Nothing here calls into the arithmetic of the other modules: exponentiation,
//! inversion and primality are re-derived from `*` and `%` so that a bug in the
//! main code path cannot vouch for itself.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::RngCore;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::group::GroupParams;

/// Largest `Q` the enumerating oracles accept.
pub const MAX_ENUMERABLE_Q: u64 = 1 << 20;

/// Significance level of [`chi_square_uniform`].
pub const CHI_SQUARE_ALPHA: f64 = 0.001;

/// Left-to-right square-and-multiply.
pub fn pow_mod(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> BigUint {
    let mut acc = BigUint::one() % modulus;
    let base = base % modulus;
    for i in (0..exponent.bits()).rev() {
        acc = &acc * &acc % modulus;
        if exponent.bit(i) {
            acc = &acc * &base % modulus;
        }
    }
    acc
}

/// Inverse modulo a prime via Fermat's little theorem.
fn inv_mod_prime(a: &BigUint, p: &BigUint) -> BigUint {
    pow_mod(a, &(p - 2u32), p)
}

fn small_q(params: &GroupParams) -> Result<u64> {
    match u64::try_from(params.q()) {
        Ok(q) if q <= MAX_ENUMERABLE_Q => Ok(q),
        _ => Err(Error::OracleGuard(format!(
            "Q exceeds enumeration bound 2^20 ({} bits)",
            params.q().bits()
        ))),
    }
}

/// All `Q` powers of `g`, sorted ascending.
pub fn enumerate_subgroup(params: &GroupParams) -> Result<Vec<BigUint>> {
    let q = small_q(params)?;
    let (p, g) = (params.p(), params.g());
    let mut elements = Vec::with_capacity(q as usize);
    let mut acc = BigUint::one();
    for _ in 0..q {
        elements.push(acc.clone());
        acc = &acc * g % p;
    }
    elements.sort();
    elements.dedup();
    Ok(elements)
}

/// The unique `x` in `[0, Q)` with `g^x = target`, by linear search.
pub fn brute_force_dlog(target: &BigUint, params: &GroupParams) -> Result<BigUint> {
    let q = small_q(params)?;
    let (p, g) = (params.p(), params.g());
    let mut acc = BigUint::one();
    for x in 0..q {
        if &acc == target {
            return Ok(BigUint::from(x));
        }
        acc = &acc * g % p;
    }
    Err(Error::NotInSubgroup)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub critical: f64,
    pub df: u64,
    pub pass: bool,
}

/// Critical value of the chi-square distribution at upper tail `alpha`.
pub fn chi_square_critical(df: u64, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("df is positive")
        .inverse_cdf(1.0 - alpha)
}

/// Pearson goodness-of-fit of `samples` against the uniform distribution on
/// `G_Q`, one bin per subgroup element. Requires at least `10 * Q` samples.
pub fn chi_square_uniform(samples: &[BigUint], params: &GroupParams) -> Result<ChiSquareResult> {
    let bins = enumerate_subgroup(params)?;
    let q = bins.len();
    if q < 2 {
        return Err(Error::OracleGuard("need at least two bins".into()));
    }
    if samples.len() < 10 * q {
        return Err(Error::OracleGuard(format!(
            "{} samples is fewer than 10*Q = {}",
            samples.len(),
            10 * q
        )));
    }
    let index: HashMap<&BigUint, usize> = bins.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut counts = vec![0u64; q];
    for s in samples {
        let bin = index.get(s).ok_or(Error::NotInSubgroup)?;
        counts[*bin] += 1;
    }
    let expected = samples.len() as f64 / q as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum::<f64>();
    let df = (q - 1) as u64;
    let critical = chi_square_critical(df, CHI_SQUARE_ALPHA);
    Ok(ChiSquareResult {
        statistic,
        critical,
        df,
        pass: statistic < critical,
    })
}

/// Every intermediate of the two-layer pipeline, computed straight from the
/// closed-form expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRun {
    pub y_a: BigUint,
    pub y_b: BigUint,
    /// First-layer ciphertext after re-randomization by `r`.
    pub layer_a: (BigUint, BigUint),
    pub triple: (BigUint, BigUint, BigUint),
    /// `(c1, c3 / c2^xB)`
    pub b_stripped: (BigUint, BigUint),
    /// `(c2, c3 / c1^xA)`
    pub a_stripped: (BigUint, BigUint),
    pub b_first: BigUint,
    pub a_first: BigUint,
}

/// Scalars for [`reference_pipeline`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceInputs {
    pub m: BigUint,
    pub x_a: BigUint,
    pub x_b: BigUint,
    pub k_a: BigUint,
    pub k_b: BigUint,
    pub r: BigUint,
}

pub fn reference_pipeline(inputs: &ReferenceInputs, params: &GroupParams) -> ReferenceRun {
    let (p, g) = (params.p(), params.g());
    let ReferenceInputs {
        m,
        x_a,
        x_b,
        k_a,
        k_b,
        r,
    } = inputs;
    let mulm = |a: &BigUint, b: &BigUint| a * b % p;

    let y_a = pow_mod(g, x_a, p);
    let y_b = pow_mod(g, x_b, p);
    // (g^(kA + r), m * yA^(kA + r))
    let k_a_eff = k_a + r;
    let layer_a = (
        pow_mod(g, &k_a_eff, p),
        mulm(m, &pow_mod(&y_a, &k_a_eff, p)),
    );
    // (g^kA, g^kB, m * yA^kA * yB^kB)
    let c1 = layer_a.0.clone();
    let c2 = pow_mod(g, k_b, p);
    let c3 = mulm(&layer_a.1, &pow_mod(&y_b, k_b, p));

    let b_stripped = (
        c1.clone(),
        mulm(&c3, &inv_mod_prime(&pow_mod(&c2, x_b, p), p)),
    );
    let b_first = mulm(
        &b_stripped.1,
        &inv_mod_prime(&pow_mod(&b_stripped.0, x_a, p), p),
    );
    let a_stripped = (
        c2.clone(),
        mulm(&c3, &inv_mod_prime(&pow_mod(&c1, x_a, p), p)),
    );
    let a_first = mulm(
        &a_stripped.1,
        &inv_mod_prime(&pow_mod(&a_stripped.0, x_b, p), p),
    );

    ReferenceRun {
        y_a,
        y_b,
        layer_a,
        triple: (c1, c2, c3),
        b_stripped,
        a_stripped,
        b_first,
        a_first,
    }
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: &BigUint, n: &BigUint) -> i32 {
    let mut a = a % n;
    let mut n = n.clone();
    let mut sign = 1;
    while !a.is_zero() {
        while a.is_even() {
            a >>= 1;
            let r = (&n % 8u32).to_u32_digits().first().copied().unwrap_or(0);
            if r == 3 || r == 5 {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut n);
        let a4 = (&a % 4u32).to_u32_digits().first().copied().unwrap_or(0);
        let n4 = (&n % 4u32).to_u32_digits().first().copied().unwrap_or(0);
        if a4 == 3 && n4 == 3 {
            sign = -sign;
        }
        a %= &n;
    }
    if n.is_one() {
        sign
    } else {
        0
    }
}

/// Solovay-Strassen test, used as a primality check independent of the
/// Miller-Rabin in the generator.
pub fn solovay_strassen<R: RngCore + ?Sized>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n == &two || n == &BigUint::from(3u32) {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let half = &n_minus_1 >> 1;
    let nbytes = n.bits().div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes + 8];
    for _ in 0..rounds {
        rng.fill_bytes(&mut buf);
        // Base in [2, n-2]; the modulo bias is irrelevant for a witness search.
        let a = BigUint::from_bytes_be(&buf) % (n - 3u32) + 2u32;
        let j = jacobi(&a, n);
        if j == 0 {
            return false;
        }
        let expected = if j == 1 { BigUint::one() } else { n_minus_1.clone() };
        if pow_mod(&a, &half, n) != expected {
            return false;
        }
    }
    true
}
