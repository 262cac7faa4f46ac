//! Prime-order subgroups of `Z_P^*`: parameter generation and validation,
//! element/scalar newtypes, modular arithmetic, and the reversible payload
//! encoding used to move application integers into the subgroup.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, RngCore};

use crate::error::{Error, Result};

/// Smallest bit length accepted by [`ParamGenConfig`].
pub const MIN_BITS: u64 = 16;

/// Miller-Rabin rounds used everywhere a primality verdict is recorded.
pub const DEFAULT_MR_ROUNDS: usize = 64;

const PARAMS_MAGIC: &str = "commel-params-v1";

const SMALL_PRIMES: [u32; 167] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191,
    193, 197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283,
    293, 307, 311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401,
    409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509,
    521, 523, 541, 547, 557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631,
    641, 643, 647, 653, 659, 661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751,
    757, 761, 769, 773, 787, 797, 809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877,
    881, 883, 887, 907, 911, 919, 929, 937, 941, 947, 953, 967, 971, 977, 983, 991, 997,
];

/// Public description of the subgroup `G_Q` of `Z_P^*`, with `P = gamma * Q + 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupParams {
    p: BigUint,
    q: BigUint,
    g: BigUint,
    gamma: u32,
}

impl fmt::Debug for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupParams {{ p: {:x}, q: {:x}, g: {:x}, gamma: {} }}",
            self.p, self.q, self.g, self.gamma
        )
    }
}

impl GroupParams {
    /// Assembles parameters without checking them. See [`validate_params`].
    pub fn new(p: BigUint, q: BigUint, g: BigUint, gamma: u32) -> Self {
        GroupParams { p, q, g, gamma }
    }

    /// Assembles parameters and rejects them unless [`validate_params`] holds.
    pub fn checked(p: BigUint, q: BigUint, g: BigUint, gamma: u32) -> Result<Self> {
        let params = GroupParams::new(p, q, g, gamma);
        if validate_params(&params) {
            Ok(params)
        } else {
            Err(Error::InvalidParams(
                "primality, P = gamma*Q + 1, or generator order check failed".into(),
            ))
        }
    }

    /// The 1024-bit MODP safe prime of RFC 2409 (Oakley group 2) with `g = 4`.
    pub fn rfc2409_1024() -> Self {
        let p = BigUint::parse_bytes(
            b"ffffffffffffffffc90fdaa22168c234c4c6628b80dc1cd129024e088a67cc74\
              020bbea63b139b22514a08798e3404ddef9519b3cd3a431b302b0a6df25f1437\
              4fe1356d6d51c245e485b576625e7ec6f44c42e9a637ed6b0bff5cb6f406b7ed\
              ee386bfb5a899fa5ae9f24117c4b1fe649286651ece65381ffffffffffffffff",
            16,
        )
        .expect("valid hex");
        let q = (&p - 1u32) >> 1;
        GroupParams::new(p, q, BigUint::from(4u32), 2)
    }

    pub fn p(&self) -> &BigUint {
        &self.p
    }

    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn g(&self) -> &BigUint {
        &self.g
    }

    pub fn gamma(&self) -> u32 {
        self.gamma
    }

    pub fn bits(&self) -> u64 {
        self.p.bits()
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement(self.g.clone())
    }

    /// `gamma = 2` and `P = 3 (mod 4)`: the subgroup is the quadratic residues
    /// and `-1` is a non-residue.
    pub fn is_safe_prime_form(&self) -> bool {
        self.gamma == 2 && (&self.p % 4u32) == BigUint::from(3u32)
    }

    pub fn contains(&self, value: &BigUint) -> bool {
        !value.is_zero() && value < &self.p && value.modpow(&self.q, &self.p).is_one()
    }

    /// `base^e mod P`.
    pub fn exp(&self, base: &GroupElement, e: &Scalar) -> GroupElement {
        GroupElement(mod_exp(&base.0, &e.0, &self.p))
    }

    /// `g^e mod P`.
    pub fn exp_g(&self, e: &Scalar) -> GroupElement {
        GroupElement(mod_exp(&self.g, &e.0, &self.p))
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(mod_mul(&a.0, &b.0, &self.p))
    }

    pub fn inv(&self, a: &GroupElement) -> GroupElement {
        // Subgroup elements are units, so the inverse always exists.
        GroupElement(mod_inv(&a.0, &self.p).expect("group elements are invertible"))
    }

    /// Serializes to the line-oriented `commel-params-v1` text format.
    pub fn to_file_string(&self) -> String {
        format!(
            "{PARAMS_MAGIC}\nP={:x}\nQ={:x}\nG={:x}\nGAMMA={}\n",
            self.p, self.q, self.g, self.gamma
        )
    }

    /// Parses the `commel-params-v1` format. Structure only; callers that
    /// need trusted parameters follow up with [`validate_params`].
    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut lines = FileLines::new(text)?;
        lines.expect_exact(PARAMS_MAGIC)?;
        let params = parse_params_body(&mut lines)?;
        lines.finish()?;
        Ok(params)
    }
}

/// Line cursor shared by the params and key file parsers. Files are LF-terminated
/// with no blank lines and no trailing content.
pub(crate) struct FileLines<'a> {
    lines: std::str::Split<'a, char>,
}

impl<'a> FileLines<'a> {
    pub(crate) fn new(text: &'a str) -> Result<Self> {
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| Error::Format("file must end with LF".into()))?;
        Ok(FileLines {
            lines: body.split('\n'),
        })
    }

    pub(crate) fn next_line(&mut self) -> Result<&'a str> {
        self.lines
            .next()
            .ok_or_else(|| Error::Format("unexpected end of file".into()))
    }

    pub(crate) fn expect_exact(&mut self, want: &str) -> Result<()> {
        let line = self.next_line()?;
        if line == want {
            Ok(())
        } else {
            Err(Error::Format(format!("expected `{want}`, found `{line}`")))
        }
    }

    pub(crate) fn field(&mut self, key: &str) -> Result<&'a str> {
        let line = self.next_line()?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| Error::Format(format!("expected `{key}=`, found `{line}`")))
    }

    pub(crate) fn hex_field(&mut self, key: &str) -> Result<BigUint> {
        parse_lower_hex(self.field(key)?)
    }

    pub(crate) fn finish(mut self) -> Result<()> {
        match self.lines.next() {
            None => Ok(()),
            Some(extra) => Err(Error::Format(format!("trailing content `{extra}`"))),
        }
    }
}

pub(crate) fn parse_params_body(lines: &mut FileLines<'_>) -> Result<GroupParams> {
    let p = lines.hex_field("P")?;
    let q = lines.hex_field("Q")?;
    let g = lines.hex_field("G")?;
    let gamma_text = lines.field("GAMMA")?;
    if gamma_text.is_empty()
        || !gamma_text.bytes().all(|b| b.is_ascii_digit())
        || (gamma_text.len() > 1 && gamma_text.starts_with('0'))
    {
        return Err(Error::Format(format!("bad GAMMA `{gamma_text}`")));
    }
    let gamma = gamma_text
        .parse::<u32>()
        .map_err(|_| Error::Format(format!("bad GAMMA `{gamma_text}`")))?;
    Ok(GroupParams::new(p, q, g, gamma))
}

/// Canonical lowercase hex: no prefix, no leading zeros (zero is `0`).
pub(crate) fn parse_lower_hex(text: &str) -> Result<BigUint> {
    let canonical = !text.is_empty()
        && text.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
        && (text == "0" || !text.starts_with('0'));
    if !canonical {
        return Err(Error::Format(format!("not canonical lowercase hex: `{text}`")));
    }
    BigUint::parse_bytes(text.as_bytes(), 16)
        .ok_or_else(|| Error::Format(format!("bad hex `{text}`")))
}

/// An element of `G_Q`, stored as its residue in `[1, P-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(BigUint);

impl GroupElement {
    /// Checks membership in the subgroup described by `params`.
    pub fn new(value: BigUint, params: &GroupParams) -> Result<Self> {
        if params.contains(&value) {
            Ok(GroupElement(value))
        } else {
            Err(Error::NotInSubgroup)
        }
    }

    pub fn one() -> Self {
        GroupElement(BigUint::one())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub(crate) fn check(&self, params: &GroupParams) -> Result<()> {
        if params.contains(&self.0) {
            Ok(())
        } else {
            Err(Error::NotInSubgroup)
        }
    }

    /// Wraps a residue without checking membership. Values built this way are
    /// re-checked by every operation that consumes them.
    pub fn unchecked(value: BigUint) -> Self {
        GroupElement(value)
    }
}

/// An exponent in `Z_Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Scalar(BigUint);

impl Scalar {
    pub fn new(value: BigUint, params: &GroupParams) -> Result<Self> {
        if &value < params.q() {
            Ok(Scalar(value))
        } else {
            Err(Error::ScalarOutOfRange)
        }
    }

    pub fn from_u64(value: u64, params: &GroupParams) -> Result<Self> {
        Scalar::new(BigUint::from(value), params)
    }

    pub fn zero() -> Self {
        Scalar(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

/// Knobs for [`generate_params`]. `bits` is the exact bit length of `P`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamGenConfig {
    pub bits: u64,
    pub gamma: u32,
    pub mr_rounds: usize,
    /// Upper bound on sampled `Q` candidates before giving up.
    pub max_attempts: u64,
}

impl ParamGenConfig {
    pub fn new(bits: u64) -> Self {
        ParamGenConfig {
            bits,
            gamma: 2,
            mr_rounds: DEFAULT_MR_ROUNDS,
            max_attempts: 1 << 26,
        }
    }

    pub fn with_gamma(mut self, gamma: u32) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_max_attempts(mut self, max_attempts: u64) -> Self {
        self.max_attempts = max_attempts;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits < MIN_BITS {
            return Err(Error::InvalidConfig(format!(
                "bits = {} is below the floor of {MIN_BITS}",
                self.bits
            )));
        }
        if self.gamma < 2 {
            return Err(Error::InvalidConfig("gamma must be at least 2".into()));
        }
        // With odd gamma and odd Q, gamma*Q + 1 is even.
        if self.gamma % 2 == 1 {
            return Err(Error::InvalidConfig("gamma must be even".into()));
        }
        if u64::from(self.gamma).ilog2() as u64 + 2 >= self.bits {
            return Err(Error::InvalidConfig("gamma too large for bit size".into()));
        }
        if self.mr_rounds == 0 {
            return Err(Error::InvalidConfig("mr_rounds must be positive".into()));
        }
        Ok(())
    }
}

/// Samples a prime `P` of exactly `cfg.bits` bits with `P = gamma*Q + 1`,
/// `Q` prime, and a generator `g = h^gamma` of the order-`Q` subgroup.
pub fn generate_params<R: RngCore + CryptoRng>(
    cfg: &ParamGenConfig,
    rng: &mut R,
) -> Result<GroupParams> {
    cfg.validate()?;
    let gamma = BigUint::from(cfg.gamma);
    // Range of Q for which gamma*Q + 1 has exactly `bits` bits.
    let p_min = BigUint::one() << (cfg.bits - 1);
    let p_max = (BigUint::one() << cfg.bits) - 1u32;
    let q_min = (&p_min - 1u32).div_ceil(&gamma);
    let q_max = (&p_max - 1u32) / &gamma;
    let span = &q_max - &q_min + 1u32;

    let mut attempts = 0u64;
    let q = loop {
        if attempts >= cfg.max_attempts {
            return Err(Error::GenerationTimeout(attempts));
        }
        attempts += 1;
        let q = &q_min + random_below(&span, rng);
        if q.is_even() {
            continue;
        }
        if !sieve_pair(&q, cfg.gamma) {
            continue;
        }
        let p = &gamma * &q + 1u32;
        let two = BigUint::from(2u32);
        if !two.modpow(&(&q - 1u32), &q).is_one() || !two.modpow(&(&p - 1u32), &p).is_one() {
            continue;
        }
        if is_probable_prime(&q, cfg.mr_rounds, rng) && is_probable_prime(&p, cfg.mr_rounds, rng)
        {
            break q;
        }
    };
    let p = &gamma * &q + 1u32;
    let h_span = &p - 3u32;
    let g = loop {
        let h = random_below(&h_span, rng) + 2u32;
        let g = h.modpow(&gamma, &p);
        if !g.is_one() {
            break g;
        }
    };
    log::debug!("generated {}-bit group after {attempts} candidates", cfg.bits);
    Ok(GroupParams::new(p, q, g, cfg.gamma))
}

/// Rejects `q` when `q` or `gamma*q + 1` has a small prime factor (other than itself).
fn sieve_pair(q: &BigUint, gamma: u32) -> bool {
    let digits = q.to_u64_digits();
    let p_is_small = |sp: u32, q_small: Option<u64>| {
        q_small.is_some_and(|qs| u64::from(gamma) * qs + 1 == u64::from(sp))
    };
    let q_small = if digits.len() <= 1 {
        Some(digits.first().copied().unwrap_or(0))
    } else {
        None
    };
    for &sp in SMALL_PRIMES.iter() {
        let r = rem_u32(&digits, sp);
        if r == 0 && q_small != Some(u64::from(sp)) {
            return false;
        }
        let pr = (u64::from(gamma) * u64::from(r) + 1) % u64::from(sp);
        if pr == 0 && !p_is_small(sp, q_small) {
            return false;
        }
    }
    true
}

fn rem_u32(digits: &[u64], m: u32) -> u32 {
    let m = u128::from(m);
    let mut r = 0u128;
    for &d in digits.iter().rev() {
        r = ((r << 64) | u128::from(d)) % m;
    }
    r as u32
}

/// Miller-Rabin with `rounds` uniformly random bases in `[2, n-2]`.
pub fn is_probable_prime<R: RngCore>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n < &BigUint::from(4u32) {
        return true;
    }
    if n.is_even() {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let base_span = n - 3u32;
    'witness: for _ in 0..rounds {
        let a = random_below(&base_span, rng) + 2u32;
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

/// Every [`GroupParams`] invariant: `P`, `Q` pass Miller-Rabin, `P = gamma*Q + 1`,
/// `g` in `[2, P-1]` with `g^Q = 1 (mod P)`.
pub fn validate_params(params: &GroupParams) -> bool {
    validate_params_with(params, &mut rand::thread_rng())
}

pub fn validate_params_with<R: RngCore>(params: &GroupParams, rng: &mut R) -> bool {
    let GroupParams { p, q, g, gamma } = params;
    *gamma >= 2
        && *p == BigUint::from(*gamma) * q + 1u32
        && *g > BigUint::one()
        && g < p
        && g.modpow(q, p).is_one()
        && is_probable_prime(q, DEFAULT_MR_ROUNDS, rng)
        && is_probable_prime(p, DEFAULT_MR_ROUNDS, rng)
}

/// Uniform integer in `[0, bound)` by rejection sampling on `bits(bound)`-bit strings.
pub(crate) fn random_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty sampling range");
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes as u64) * 8 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= 0xffu8 >> excess;
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Uniform scalar in `Z_Q`, zero included.
pub fn random_scalar<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> Scalar {
    Scalar(random_below(params.q(), rng))
}

/// Maps `payload` in `[1, Q]` to whichever of `payload`, `P - payload` is a
/// quadratic residue. Only defined for safe-prime parameters.
pub fn encode_message(payload: &BigUint, params: &GroupParams) -> Result<GroupElement> {
    if !params.is_safe_prime_form() {
        return Err(Error::NotSafePrime);
    }
    if payload.is_zero() || payload > params.q() {
        return Err(Error::PayloadOutOfRange);
    }
    if params.contains(payload) {
        Ok(GroupElement(payload.clone()))
    } else {
        Ok(GroupElement(params.p() - payload))
    }
}

/// Inverse of [`encode_message`]: `min(e, P - e)`.
pub fn decode_message(element: &GroupElement, params: &GroupParams) -> Result<BigUint> {
    if !params.is_safe_prime_form() {
        return Err(Error::NotSafePrime);
    }
    element.check(params)?;
    let negated = params.p() - element.value();
    Ok(std::cmp::min(element.value().clone(), negated))
}

pub fn mod_exp(base: &BigUint, exponent: &BigUint, modulus: &BigUint) -> BigUint {
    base.modpow(exponent, modulus)
}

pub fn mod_mul(a: &BigUint, b: &BigUint, modulus: &BigUint) -> BigUint {
    (a * b) % modulus
}

/// Inverse by extended Euclid; fails when `a` shares a factor with the modulus.
pub fn mod_inv(a: &BigUint, modulus: &BigUint) -> Result<BigUint> {
    let a = BigInt::from_biguint(Sign::Plus, a % modulus);
    if a.is_zero() {
        return Err(Error::NoInverse);
    }
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    let egcd = a.extended_gcd(&m);
    if !egcd.gcd.is_one() {
        return Err(Error::NoInverse);
    }
    Ok(egcd.x.mod_floor(&m).to_biguint().expect("mod_floor is non-negative"))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    pub(crate) fn toy() -> GroupParams {
        GroupParams::new(23u32.into(), 11u32.into(), 4u32.into(), 2)
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn validate_small_examples() {
        assert!(validate_params(&toy()));
        assert!(!validate_params(&GroupParams::new(big(23), big(11), big(1), 2)));
        assert!(!validate_params(&GroupParams::new(big(15), big(7), big(2), 2)));
        // 5 has order 22, not 11.
        assert!(!validate_params(&GroupParams::new(big(23), big(11), big(5), 2)));
        assert!(!validate_params(&GroupParams::new(big(23), big(11), big(4), 3)));
    }

    #[test]
    fn rfc2409_group_is_valid() {
        let params = GroupParams::rfc2409_1024();
        assert_eq!(params.bits(), 1024);
        assert!(params.is_safe_prime_form());
        assert!(validate_params(&params));
    }

    #[test]
    fn generate_16_bit() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let params = generate_params(&ParamGenConfig::new(16), &mut rng).unwrap();
        assert_eq!(params.bits(), 16);
        assert_eq!(params.p(), &(params.q() * 2u32 + 1u32));
        assert!(validate_params(&params));
    }

    #[test]
    fn generate_with_gamma_four() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let params = generate_params(&ParamGenConfig::new(48).with_gamma(4), &mut rng).unwrap();
        assert_eq!(params.bits(), 48);
        assert_eq!(params.gamma(), 4);
        assert!(validate_params(&params));
        assert!(!params.is_safe_prime_form());
        assert!(matches!(
            encode_message(&big(3), &params),
            Err(Error::NotSafePrime)
        ));
    }

    #[test]
    fn generation_rejects_bad_config() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for cfg in [
            ParamGenConfig::new(8),
            ParamGenConfig::new(64).with_gamma(1),
            ParamGenConfig::new(64).with_gamma(3),
        ] {
            assert!(matches!(
                generate_params(&cfg, &mut rng),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn generation_attempt_cap() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let cfg = ParamGenConfig::new(256).with_max_attempts(1);
        // A single random 255-bit candidate is a safe-prime root with negligible probability.
        assert!(matches!(
            generate_params(&cfg, &mut rng),
            Err(Error::GenerationTimeout(1))
        ));
    }

    #[test]
    fn miller_rabin_small_numbers() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let primes: Vec<u32> = (0..2000u32)
            .filter(|&n| is_probable_prime(&big(n.into()), 8, &mut rng))
            .collect();
        let naive: Vec<u32> = (0..2000u32)
            .filter(|&n| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .collect();
        assert_eq!(primes, naive);
        // Carmichael numbers.
        for c in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 3_215_031_751] {
            assert!(!is_probable_prime(&big(c), 16, &mut rng), "{c}");
        }
    }

    #[test]
    fn encode_examples() {
        let p = toy();
        assert_eq!(encode_message(&big(2), &p).unwrap().value(), &big(2));
        assert_eq!(encode_message(&big(5), &p).unwrap().value(), &big(18));
        assert_eq!(encode_message(&big(1), &p).unwrap().value(), &big(1));
        assert!(matches!(
            encode_message(&big(0), &p),
            Err(Error::PayloadOutOfRange)
        ));
        assert!(matches!(
            encode_message(&big(12), &p),
            Err(Error::PayloadOutOfRange)
        ));
    }

    #[test]
    fn decode_examples() {
        let p = toy();
        let e = |v: u64| GroupElement::new(big(v), &p).unwrap();
        assert_eq!(decode_message(&e(18), &p).unwrap(), big(5));
        assert_eq!(decode_message(&e(2), &p).unwrap(), big(2));
        assert_eq!(decode_message(&e(1), &p).unwrap(), big(1));
        assert!(matches!(
            decode_message(&GroupElement::unchecked(big(5)), &p),
            Err(Error::NotInSubgroup)
        ));
    }

    #[test]
    fn encode_decode_exhaustive_toy() {
        let p = toy();
        for x in 1..=11u64 {
            let e = encode_message(&big(x), &p).unwrap();
            assert!(e.value().modpow(&big(11), &big(23)).is_one());
            assert_eq!(decode_message(&e, &p).unwrap(), big(x));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let p = toy();
        let four = GroupElement::new(big(4), &p).unwrap();
        let three = Scalar::from_u64(3, &p).unwrap();
        assert_eq!(p.exp(&four, &three).value(), &big(18));
        assert_eq!(p.exp(&four, &Scalar::zero()).value(), &big(1));
        assert_eq!(mod_inv(&big(3), &big(23)).unwrap(), big(8));
        assert!(matches!(mod_inv(&big(0), &big(23)), Err(Error::NoInverse)));
        assert!(matches!(mod_inv(&big(46), &big(23)), Err(Error::NoInverse)));
        for a in 1..23u64 {
            let inv = mod_inv(&big(a), &big(23)).unwrap();
            assert_eq!(mod_mul(&big(a), &inv, &big(23)), big(1));
        }
    }

    #[test]
    fn scalar_range() {
        let p = toy();
        assert!(Scalar::from_u64(10, &p).is_ok());
        assert!(matches!(
            Scalar::from_u64(11, &p),
            Err(Error::ScalarOutOfRange)
        ));
    }

    #[test]
    fn random_scalar_seeded_and_small_q() {
        let q2 = GroupParams::new(big(5), big(2), big(4), 2);
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..200 {
            assert!(random_scalar(&q2, &mut rng).value() < &big(2));
        }
        let a = random_scalar(&toy(), &mut ChaCha20Rng::seed_from_u64(77));
        let b = random_scalar(&toy(), &mut ChaCha20Rng::seed_from_u64(77));
        assert_eq!(a, b);
    }

    #[test]
    fn params_file_round_trip() {
        let text = toy().to_file_string();
        assert_eq!(text, "commel-params-v1\nP=17\nQ=b\nG=4\nGAMMA=2\n");
        assert_eq!(GroupParams::from_file_str(&text).unwrap(), toy());
    }

    #[test]
    fn params_file_rejects_noise() {
        for bad in [
            "commel-params-v1\nP=17\nQ=b\nG=4\nGAMMA=2",
            "commel-params-v1\nP=17\nQ=B\nG=4\nGAMMA=2\n",
            "commel-params-v1\nP=017\nQ=b\nG=4\nGAMMA=2\n",
            "commel-params-v1\nP=17\nQ=b\nG=4\nGAMMA=2\n\n",
            "commel-params-v1\nQ=b\nP=17\nG=4\nGAMMA=2\n",
            "commel-params-v2\nP=17\nQ=b\nG=4\nGAMMA=2\n",
            "commel-params-v1\nP=17\nQ=b\nG=4\nGAMMA=02\n",
            "commel-params-v1\r\nP=17\nQ=b\nG=4\nGAMMA=2\n",
        ] {
            assert!(GroupParams::from_file_str(bad).is_err(), "{bad:?}");
        }
    }
}
