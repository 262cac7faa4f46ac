//! Commutative-like ElGamal and the oblivious transfer built on it.
//!
//! A plaintext encrypted under key A can be re-encrypted under an independent
//! key B directly on the ciphertext components. The resulting triple decrypts
//! to the original plaintext whichever layer is removed first:
//!
//! ```
//! use commel::{commutative::{decrypt_full, reencrypt, Order}, elgamal::{encrypt, keygen}};
//! use commel::group::{encode_message, GroupParams};
//! use num_bigint::BigUint;
//! use rand::SeedableRng;
//!
//! let params = GroupParams::checked(23u32.into(), 11u32.into(), 4u32.into(), 2).unwrap();
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
//! let (a, b) = (keygen(&params, &mut rng), keygen(&params, &mut rng));
//! let m = encode_message(&BigUint::from(5u32), &params).unwrap();
//!
//! let c = encrypt(a.public(), &m, &mut rng).unwrap();
//! let c3 = reencrypt(b.public(), &c, &mut rng).unwrap();
//! assert_eq!(decrypt_full(&a, &b, &c3, Order::AFirst).unwrap(), m);
//! assert_eq!(decrypt_full(&a, &b, &c3, Order::BFirst).unwrap(), m);
//! ```
//!
//! Ciphertexts carry no integrity protection: decrypting with the wrong key
//! yields a wrong group element, not an error.

pub mod commutative;
pub mod elgamal;
pub mod error;
pub mod group;
pub mod oracle;
pub mod ot;
pub mod transport;
pub mod wire;

pub use commutative::{Ciphertext3, Order};
pub use elgamal::{Ciphertext2, KeyFile, KeyPair, PublicKey};
pub use error::{Error, Result};
pub use group::{GroupElement, GroupParams, ParamGenConfig, Scalar};
pub use ot::{OtChoice, OtMessage, OtOffer, OtStrip, ReceiverSession, SenderSession, SessionId};
pub use transport::{MemoryTransport, OtServer, StreamTransport, Transport};
