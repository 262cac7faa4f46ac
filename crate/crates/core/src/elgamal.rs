//! Textbook ElGamal over `G_Q`, plus ciphertext re-randomization.

use num_bigint::BigUint;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::group::{parse_params_body, random_scalar, FileLines, GroupElement, GroupParams, Scalar};

const KEY_MAGIC: &str = "commel-key-v1";

/// Public half of a key: the group and `y = g^x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    params: GroupParams,
    y: GroupElement,
}

impl PublicKey {
    pub fn new(params: GroupParams, y: GroupElement) -> Result<Self> {
        y.check(&params)?;
        Ok(PublicKey { params, y })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn y(&self) -> &GroupElement {
        &self.y
    }

    pub fn to_file_string(&self) -> String {
        key_file(&self.params, "public", &self.y, None)
    }
}

/// Private exponent `x` together with its public element `y = g^x mod P`.
#[derive(Clone, PartialEq, Eq)]
pub struct KeyPair {
    public: PublicKey,
    x: Scalar,
}

impl std::fmt::Debug for KeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KeyPair")
            .field("public", &self.public)
            .field("x", &"<redacted>")
            .finish()
    }
}

impl KeyPair {
    /// Derives `y = g^x`.
    pub fn from_secret(params: GroupParams, x: Scalar) -> Self {
        let y = params.exp_g(&x);
        KeyPair {
            public: PublicKey { params, y },
            x,
        }
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn params(&self) -> &GroupParams {
        &self.public.params
    }

    pub fn secret(&self) -> &Scalar {
        &self.x
    }

    pub fn to_file_string(&self) -> String {
        key_file(&self.public.params, "private", &self.public.y, Some(&self.x))
    }
}

/// A parsed key file: either role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyFile {
    Public(PublicKey),
    Private(KeyPair),
}

impl KeyFile {
    pub fn public(&self) -> &PublicKey {
        match self {
            KeyFile::Public(pk) => pk,
            KeyFile::Private(kp) => kp.public(),
        }
    }

    pub fn to_file_string(&self) -> String {
        match self {
            KeyFile::Public(pk) => pk.to_file_string(),
            KeyFile::Private(kp) => kp.to_file_string(),
        }
    }

    /// Parses `commel-key-v1`. `Y` must lie in the subgroup, `X` in `Z_Q`,
    /// and for private keys `Y = g^X`.
    pub fn from_file_str(text: &str) -> Result<Self> {
        let mut lines = FileLines::new(text)?;
        lines.expect_exact(KEY_MAGIC)?;
        let role = lines.field("ROLE")?;
        let params = parse_params_body(&mut lines)?;
        let y = GroupElement::new(lines.hex_field("Y")?, &params)
            .map_err(|_| Error::Format("Y is not a subgroup element".into()))?;
        let key = match role {
            "public" => KeyFile::Public(PublicKey::new(params, y)?),
            "private" => {
                let x = Scalar::new(lines.hex_field("X")?, &params)?;
                let kp = KeyPair::from_secret(params, x);
                if kp.public.y != y {
                    return Err(Error::Format("Y does not match g^X".into()));
                }
                KeyFile::Private(kp)
            }
            other => return Err(Error::Format(format!("unknown ROLE `{other}`"))),
        };
        lines.finish()?;
        Ok(key)
    }
}

fn key_file(params: &GroupParams, role: &str, y: &GroupElement, x: Option<&Scalar>) -> String {
    let mut out = format!(
        "{KEY_MAGIC}\nROLE={role}\nP={:x}\nQ={:x}\nG={:x}\nGAMMA={}\nY={:x}\n",
        params.p(),
        params.q(),
        params.g(),
        params.gamma(),
        y.value()
    );
    if let Some(x) = x {
        out.push_str(&format!("X={:x}\n", x.value()));
    }
    out
}

/// One ElGamal layer `(g^k, m * y^k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ciphertext2 {
    pub y1: GroupElement,
    pub y2: GroupElement,
}

impl Ciphertext2 {
    pub fn new(y1: GroupElement, y2: GroupElement) -> Self {
        Ciphertext2 { y1, y2 }
    }

    pub fn check(&self, params: &GroupParams) -> Result<()> {
        self.y1.check(params)?;
        self.y2.check(params)
    }
}

pub fn keygen<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> KeyPair {
    let x = random_scalar(params, rng);
    KeyPair::from_secret(params.clone(), x)
}

pub fn encrypt<R: RngCore + ?Sized>(
    pk: &PublicKey,
    m: &GroupElement,
    rng: &mut R,
) -> Result<Ciphertext2> {
    let k = random_scalar(&pk.params, rng);
    encrypt_with(pk, m, &k)
}

/// Encryption with caller-supplied randomness `k`.
pub fn encrypt_with(pk: &PublicKey, m: &GroupElement, k: &Scalar) -> Result<Ciphertext2> {
    let params = &pk.params;
    m.check(params)?;
    let y1 = params.exp_g(k);
    let y2 = params.mul(m, &params.exp(&pk.y, k));
    Ok(Ciphertext2 { y1, y2 })
}

/// `y2 * (y1^x)^-1 mod P`.
pub fn decrypt(sk: &KeyPair, c: &Ciphertext2) -> Result<GroupElement> {
    let params = sk.params();
    c.check(params)?;
    Ok(strip_layer(params, &c.y1, &c.y2, &sk.x))
}

/// `masked * (ephemeral^x)^-1`, the step shared by every layer removal.
pub(crate) fn strip_layer(
    params: &GroupParams,
    ephemeral: &GroupElement,
    masked: &GroupElement,
    x: &Scalar,
) -> GroupElement {
    let shared = params.exp(ephemeral, x);
    params.mul(masked, &params.inv(&shared))
}

pub fn rerandomize<R: RngCore + ?Sized>(
    pk: &PublicKey,
    c: &Ciphertext2,
    rng: &mut R,
) -> Result<Ciphertext2> {
    let r = random_scalar(&pk.params, rng);
    rerandomize_with(pk, c, &r)
}

/// `(y1 * g^r, y2 * y^r)`: same plaintext, fresh randomness.
pub fn rerandomize_with(pk: &PublicKey, c: &Ciphertext2, r: &Scalar) -> Result<Ciphertext2> {
    let params = &pk.params;
    c.check(params)?;
    Ok(Ciphertext2 {
        y1: params.mul(&c.y1, &params.exp_g(r)),
        y2: params.mul(&c.y2, &params.exp(&pk.y, r)),
    })
}

/// Convenience for tests and tools that think in raw integers.
pub fn element(value: u64, params: &GroupParams) -> Result<GroupElement> {
    GroupElement::new(BigUint::from(value), params)
}
