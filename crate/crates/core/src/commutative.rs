//! Two-layer ElGamal: a second key re-encrypts an existing ciphertext without
//! touching its first component, and the two layers can then be removed in
//! either order.
//!
//! Starting from `(y1, y2) = (g^kA, m*yA^kA)`, re-encryption under `yB` gives
//!
//! ```text
//! (c1, c2, c3) = (g^kA, g^kB, m * yA^kA * yB^kB)
//! ```
//!
//! Removing B first yields `(c1, c3 / c2^xB)`, the original pair. Removing A
//! first yields `(c2, c3 / c1^xA)`, an ordinary ciphertext under B. Either way
//! a final ElGamal decryption returns `m`.

use rand::RngCore;

use crate::elgamal::{decrypt, strip_layer, Ciphertext2, KeyPair, PublicKey};
use crate::error::{Error, Result};
use crate::group::{random_scalar, GroupElement, GroupParams, Scalar};

/// A plaintext under two independent ElGamal layers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ciphertext3 {
    /// `g^kA`
    pub c1: GroupElement,
    /// `g^kB`
    pub c2: GroupElement,
    /// `m * yA^kA * yB^kB`
    pub c3: GroupElement,
}

impl Ciphertext3 {
    pub fn new(c1: GroupElement, c2: GroupElement, c3: GroupElement) -> Self {
        Ciphertext3 { c1, c2, c3 }
    }

    pub fn check(&self, params: &GroupParams) -> Result<()> {
        self.c1.check(params)?;
        self.c2.check(params)?;
        self.c3.check(params)
    }
}

/// Which layer [`decrypt_full`] removes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    /// Strip B, then decrypt with A.
    BFirst,
    /// Strip A, then decrypt with B.
    AFirst,
}

pub fn reencrypt<R: RngCore + ?Sized>(
    pk_b: &PublicKey,
    c: &Ciphertext2,
    rng: &mut R,
) -> Result<Ciphertext3> {
    let k_b = random_scalar(pk_b.params(), rng);
    reencrypt_with(pk_b, c, &k_b)
}

/// `(y1, g^kB, y2 * yB^kB)` with caller-supplied `kB`.
pub fn reencrypt_with(pk_b: &PublicKey, c: &Ciphertext2, k_b: &Scalar) -> Result<Ciphertext3> {
    let params = pk_b.params();
    c.check(params)?;
    Ok(Ciphertext3 {
        c1: c.y1.clone(),
        c2: params.exp_g(k_b),
        c3: params.mul(&c.y2, &params.exp(pk_b.y(), k_b)),
    })
}

/// Removes the B layer: `(c1, c3 * (c2^xB)^-1)`.
pub fn strip_b(sk_b: &KeyPair, c: &Ciphertext3) -> Result<Ciphertext2> {
    let params = sk_b.params();
    c.check(params)?;
    Ok(Ciphertext2::new(
        c.c1.clone(),
        strip_layer(params, &c.c2, &c.c3, sk_b.secret()),
    ))
}

/// Removes the A layer: `(c2, c3 * (c1^xA)^-1)`, leaving a ciphertext under B.
pub fn strip_a(sk_a: &KeyPair, c: &Ciphertext3) -> Result<Ciphertext2> {
    let params = sk_a.params();
    c.check(params)?;
    Ok(Ciphertext2::new(
        c.c2.clone(),
        strip_layer(params, &c.c1, &c.c3, sk_a.secret()),
    ))
}

pub fn decrypt_full(
    sk_a: &KeyPair,
    sk_b: &KeyPair,
    c: &Ciphertext3,
    order: Order,
) -> Result<GroupElement> {
    if sk_a.params() != sk_b.params() {
        return Err(Error::ParamsMismatch);
    }
    match order {
        Order::BFirst => decrypt(sk_a, &strip_b(sk_b, c)?),
        Order::AFirst => decrypt(sk_b, &strip_a(sk_a, c)?),
    }
}
