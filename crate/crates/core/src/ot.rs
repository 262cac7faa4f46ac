//! 1-out-of-n oblivious transfer from two-layer ElGamal.
//!
//! 1. Sender encrypts every payload under a fresh key `xA` and sends the list (`Offer`).
//! 2. Receiver re-randomizes item `i` under `yA`, re-encrypts it under a fresh
//!    key `xB`, and sends the triple back (`Choice`).
//! 3. Sender strips its own layer and returns the pair (`Strip`).
//! 4. Receiver decrypts with `xB` and decodes payload `i`.
//!
//! Re-randomization in step 2 is mandatory: re-encryption leaves the first
//! component untouched, so without it the sender could match `c1` against the
//! offered items and learn `i`.
//!
//! Both sides are single-owner state machines. A message that does not fit the
//! current state is rejected and leaves the session unchanged.

use std::fmt;

use num_bigint::BigUint;
use rand::{CryptoRng, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::commutative::{reencrypt_with, strip_a, Ciphertext3};
use crate::elgamal::{decrypt, encrypt_with, rerandomize_with, Ciphertext2, KeyPair};
use crate::error::{Error, Result};
use crate::group::{
    decode_message, encode_message, random_scalar, validate_params, GroupElement, GroupParams,
    Scalar,
};
use crate::transport::{memory_pair, Transport};
use crate::wire::MsgType;

/// Consecutive rejected messages a sender tolerates before dropping the peer.
pub const MAX_REJECTED: usize = 16;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SessionId(pub [u8; 16]);

impl SessionId {
    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut id = [0u8; 16];
        rng.fill_bytes(&mut id);
        SessionId(id)
    }
}

impl fmt::Debug for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SessionId({self})")
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtOffer {
    pub session_id: SessionId,
    pub params: GroupParams,
    pub sender_pub: GroupElement,
    pub items: Vec<Ciphertext2>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtChoice {
    pub session_id: SessionId,
    pub receiver_pub: GroupElement,
    pub chosen: Ciphertext3,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtStrip {
    pub session_id: SessionId,
    pub stripped: Ciphertext2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OtError {
    pub session_id: SessionId,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OtMessage {
    Offer(OtOffer),
    Choice(OtChoice),
    Strip(OtStrip),
    Error(OtError),
}

impl OtMessage {
    pub fn session_id(&self) -> SessionId {
        match self {
            OtMessage::Offer(m) => m.session_id,
            OtMessage::Choice(m) => m.session_id,
            OtMessage::Strip(m) => m.session_id,
            OtMessage::Error(m) => m.session_id,
        }
    }

    pub fn msg_type(&self) -> MsgType {
        match self {
            OtMessage::Offer(_) => MsgType::Offer,
            OtMessage::Choice(_) => MsgType::Choice,
            OtMessage::Strip(_) => MsgType::Strip,
            OtMessage::Error(_) => MsgType::Error,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OtMessage::Offer(_) => "Offer",
            OtMessage::Choice(_) => "Choice",
            OtMessage::Strip(_) => "Strip",
            OtMessage::Error(_) => "Error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SenderState {
    Offered,
    Stripped,
    Done,
}

impl SenderState {
    fn name(self) -> &'static str {
        match self {
            SenderState::Offered => "OFFERED",
            SenderState::Stripped => "STRIPPED",
            SenderState::Done => "DONE",
        }
    }
}

pub struct SenderSession {
    id: SessionId,
    keys: KeyPair,
    payloads: Vec<BigUint>,
    state: SenderState,
}

impl fmt::Debug for SenderSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SenderSession")
            .field("id", &self.id)
            .field("n", &self.payloads.len())
            .field("state", &self.state)
            .finish()
    }
}

impl SenderSession {
    /// Step 1: fresh key `xA`, fresh `k` per item.
    pub fn start<R: RngCore + ?Sized>(
        params: &GroupParams,
        session_id: SessionId,
        payloads: &[BigUint],
        rng: &mut R,
    ) -> Result<(Self, OtOffer)> {
        let x_a = random_scalar(params, rng);
        let ks: Vec<Scalar> = payloads.iter().map(|_| random_scalar(params, rng)).collect();
        Self::start_scripted(params, session_id, payloads, x_a, &ks)
    }

    /// Step 1 with every random choice supplied by the caller.
    pub fn start_scripted(
        params: &GroupParams,
        session_id: SessionId,
        payloads: &[BigUint],
        x_a: Scalar,
        ks: &[Scalar],
    ) -> Result<(Self, OtOffer)> {
        if payloads.is_empty() {
            return Err(Error::EmptyPayloads);
        }
        assert_eq!(ks.len(), payloads.len(), "one k per payload");
        let keys = KeyPair::from_secret(params.clone(), x_a);
        let items = payloads
            .iter()
            .zip(ks)
            .map(|(payload, k)| encrypt_with(keys.public(), &encode_message(payload, params)?, k))
            .collect::<Result<Vec<_>>>()?;
        let offer = OtOffer {
            session_id,
            params: params.clone(),
            sender_pub: keys.public().y().clone(),
            items,
        };
        let session = SenderSession {
            id: session_id,
            keys,
            payloads: payloads.to_vec(),
            state: SenderState::Offered,
        };
        Ok((session, offer))
    }

    pub fn id(&self) -> SessionId {
        self.id
    }

    pub fn state(&self) -> SenderState {
        self.state
    }

    pub fn len(&self) -> usize {
        self.payloads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payloads.is_empty()
    }

    pub fn keys(&self) -> &KeyPair {
        &self.keys
    }

    /// Step 3: strip the sender layer from the receiver's triple.
    pub fn handle_choice(&mut self, choice: &OtChoice) -> Result<OtStrip> {
        if choice.session_id != self.id {
            return Err(Error::UnknownSession);
        }
        if self.state != SenderState::Offered {
            return Err(Error::UnexpectedMessage {
                message: "Choice",
                state: self.state.name(),
            });
        }
        choice.receiver_pub.check(self.keys.params())?;
        let stripped = strip_a(&self.keys, &choice.chosen)?;
        self.state = SenderState::Stripped;
        Ok(OtStrip {
            session_id: self.id,
            stripped,
        })
    }

    pub fn close(&mut self) {
        self.state = SenderState::Done;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverState {
    AwaitingOffer,
    Chosen,
    Done,
}

impl ReceiverState {
    fn name(self) -> &'static str {
        match self {
            ReceiverState::AwaitingOffer => "AWAITING_OFFER",
            ReceiverState::Chosen => "CHOSEN",
            ReceiverState::Done => "DONE",
        }
    }
}

/// The receiver's random choices for step 2.
#[derive(Debug, Clone)]
pub struct ChoiceRandomness {
    /// Receiver secret key `xB`.
    pub x_b: Scalar,
    /// Re-randomization exponent applied under `yA`.
    pub r: Scalar,
    /// Re-encryption exponent `kB`.
    pub k_b: Scalar,
}

impl ChoiceRandomness {
    pub fn random<R: RngCore + ?Sized>(params: &GroupParams, rng: &mut R) -> Self {
        ChoiceRandomness {
            x_b: random_scalar(params, rng),
            r: random_scalar(params, rng),
            k_b: random_scalar(params, rng),
        }
    }
}

pub struct ReceiverSession {
    index: usize,
    trusted: Option<GroupParams>,
    state: ReceiverState,
    session: Option<(SessionId, KeyPair)>,
}

impl fmt::Debug for ReceiverSession {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReceiverSession")
            .field("index", &self.index)
            .field("state", &self.state)
            .finish()
    }
}

impl ReceiverSession {
    /// Receiver that fully validates whatever group the sender offers.
    pub fn new(index: usize) -> Self {
        ReceiverSession {
            index,
            trusted: None,
            state: ReceiverState::AwaitingOffer,
            session: None,
        }
    }

    /// Receiver that only accepts offers in `params`.
    pub fn with_params(index: usize, params: GroupParams) -> Self {
        ReceiverSession {
            trusted: Some(params),
            ..ReceiverSession::new(index)
        }
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn state(&self) -> ReceiverState {
        self.state
    }

    fn check_offer(&self, offer: &OtOffer) -> Result<()> {
        if self.state != ReceiverState::AwaitingOffer {
            return Err(Error::UnexpectedMessage {
                message: "Offer",
                state: self.state.name(),
            });
        }
        let n = offer.items.len();
        if self.index >= n {
            return Err(Error::IndexOutOfRange {
                index: self.index,
                n,
            });
        }
        match &self.trusted {
            Some(params) if *params != offer.params => return Err(Error::ParamsMismatch),
            Some(_) => {}
            None => {
                if !validate_params(&offer.params) {
                    return Err(Error::InvalidParams("offered group failed validation".into()));
                }
            }
        }
        if !offer.params.is_safe_prime_form() {
            return Err(Error::NotSafePrime);
        }
        offer.sender_pub.check(&offer.params)?;
        offer
            .items
            .iter()
            .try_for_each(|item| item.check(&offer.params))
    }

    /// Step 2.
    pub fn choose<R: RngCore + ?Sized>(&mut self, offer: &OtOffer, rng: &mut R) -> Result<OtChoice> {
        self.check_offer(offer)?;
        let script = ChoiceRandomness::random(&offer.params, rng);
        self.apply_choice(offer, &script)
    }

    /// Step 2 with the receiver's randomness supplied by the caller.
    pub fn choose_scripted(
        &mut self,
        offer: &OtOffer,
        script: &ChoiceRandomness,
    ) -> Result<OtChoice> {
        self.check_offer(offer)?;
        self.apply_choice(offer, script)
    }

    fn apply_choice(&mut self, offer: &OtOffer, script: &ChoiceRandomness) -> Result<OtChoice> {
        let params = &offer.params;
        let sender_pk = crate::elgamal::PublicKey::new(params.clone(), offer.sender_pub.clone())?;
        let refreshed = rerandomize_with(&sender_pk, &offer.items[self.index], &script.r)?;
        let keys = KeyPair::from_secret(params.clone(), script.x_b.clone());
        let chosen = reencrypt_with(keys.public(), &refreshed, &script.k_b)?;
        let choice = OtChoice {
            session_id: offer.session_id,
            receiver_pub: keys.public().y().clone(),
            chosen,
        };
        self.session = Some((offer.session_id, keys));
        self.state = ReceiverState::Chosen;
        Ok(choice)
    }

    /// Step 4: remove the receiver layer and decode the payload.
    pub fn finish(&mut self, strip: &OtStrip) -> Result<BigUint> {
        let (id, keys) = match (&self.state, &self.session) {
            (ReceiverState::Chosen, Some(session)) => session,
            _ => {
                return Err(Error::UnexpectedMessage {
                    message: "Strip",
                    state: self.state.name(),
                })
            }
        };
        if strip.session_id != *id {
            return Err(Error::UnknownSession);
        }
        let element = decrypt(keys, &strip.stripped)?;
        let payload = decode_message(&element, keys.params())?;
        self.state = ReceiverState::Done;
        Ok(payload)
    }
}

/// What the sender side of one session saw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionSummary {
    pub session_id: SessionId,
    pub items: usize,
    pub stripped: bool,
    pub rejected: usize,
}

fn reject<T: Transport + ?Sized>(transport: &mut T, id: SessionId, err: &Error) -> Result<()> {
    log::debug!("session {id}: rejecting message: {err}");
    transport.send(&OtMessage::Error(OtError {
        session_id: id,
        reason: err.to_string(),
    }))
}

/// Sender side of one session over `transport`. Runs until the peer hangs up;
/// messages that do not fit the current state are answered with an error frame.
pub fn run_sender<T, R>(
    transport: &mut T,
    params: &GroupParams,
    payloads: &[BigUint],
    rng: &mut R,
) -> Result<SessionSummary>
where
    T: Transport + ?Sized,
    R: RngCore + ?Sized,
{
    let id = SessionId::random(rng);
    let (mut session, offer) = SenderSession::start(params, id, payloads, rng)?;
    transport.send(&OtMessage::Offer(offer))?;
    let mut summary = SessionSummary {
        session_id: id,
        items: payloads.len(),
        stripped: false,
        rejected: 0,
    };
    loop {
        let msg = match transport.recv() {
            Ok(msg) => msg,
            Err(err) if err.is_io() => break,
            Err(err) => {
                summary.rejected += 1;
                reject(transport, id, &err)?;
                if summary.rejected >= MAX_REJECTED {
                    break;
                }
                continue;
            }
        };
        let outcome = match &msg {
            OtMessage::Choice(choice) => session.handle_choice(choice),
            OtMessage::Error(e) => {
                log::debug!("session {id}: peer error: {}", e.reason);
                break;
            }
            other => Err(Error::UnexpectedMessage {
                message: other.name(),
                state: session.state.name(),
            }),
        };
        match outcome {
            Ok(strip) => {
                transport.send(&OtMessage::Strip(strip))?;
                summary.stripped = true;
            }
            Err(err) => {
                summary.rejected += 1;
                reject(transport, id, &err)?;
                if summary.rejected >= MAX_REJECTED {
                    break;
                }
            }
        }
    }
    session.close();
    log::info!(
        "session {id}: {} items, stripped={}, rejected={}",
        summary.items,
        summary.stripped,
        summary.rejected
    );
    Ok(summary)
}

/// Receiver side of one session. An out-of-range index fails after the offer
/// arrives and before anything is sent.
pub fn run_receiver<T, R>(
    transport: &mut T,
    index: usize,
    trusted: Option<&GroupParams>,
    rng: &mut R,
) -> Result<BigUint>
where
    T: Transport + ?Sized,
    R: RngCore + ?Sized,
{
    let mut session = match trusted {
        Some(params) => ReceiverSession::with_params(index, params.clone()),
        None => ReceiverSession::new(index),
    };
    let offer = match transport.recv()? {
        OtMessage::Offer(offer) => offer,
        OtMessage::Error(e) => return Err(Error::Remote(e.reason)),
        other => {
            return Err(Error::UnexpectedMessage {
                message: other.name(),
                state: session.state.name(),
            })
        }
    };
    let choice = session.choose(&offer, rng)?;
    transport.send(&OtMessage::Choice(choice))?;
    match transport.recv()? {
        OtMessage::Strip(strip) => session.finish(&strip),
        OtMessage::Error(e) => Err(Error::Remote(e.reason)),
        other => Err(Error::UnexpectedMessage {
            message: other.name(),
            state: session.state.name(),
        }),
    }
}

/// m-out-of-n by repetition: one independent session per entry of `choices`,
/// each on a fresh connection from `connect`. Results keep choice order; a
/// failed session does not affect the others.
pub fn run_m_of_n<T, F, R>(
    choices: &[usize],
    mut connect: F,
    trusted: Option<&GroupParams>,
    rng: &mut R,
) -> Vec<Result<BigUint>>
where
    T: Transport,
    F: FnMut() -> Result<T>,
    R: RngCore + ?Sized,
{
    choices
        .iter()
        .map(|&index| {
            let mut transport = connect()?;
            run_receiver(&mut transport, index, trusted, rng)
        })
        .collect()
}

/// [`run_m_of_n`] against an in-process sender, one thread and one in-memory
/// connection per session.
pub fn run_m_of_n_local<R: RngCore + CryptoRng + ?Sized>(
    params: &GroupParams,
    payloads: &[BigUint],
    choices: &[usize],
    rng: &mut R,
) -> Vec<Result<BigUint>> {
    let mut senders = Vec::new();
    let mut receiver_rng = ChaCha20Rng::from_seed(rng.gen());
    let connect = || {
        let (mut sender_side, receiver_side) = memory_pair();
        let params = params.clone();
        let payloads = payloads.to_vec();
        let mut sender_rng = ChaCha20Rng::from_seed(rng.gen());
        senders.push(std::thread::spawn(move || {
            run_sender(&mut sender_side, &params, &payloads, &mut sender_rng)
        }));
        Ok(receiver_side)
    };
    let results = run_m_of_n(choices, connect, Some(params), &mut receiver_rng);
    for handle in senders {
        if let Ok(Err(err)) = handle.join() {
            log::warn!("sender session failed: {err}");
        }
    }
    results
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutative::{decrypt_full, Order};
    use crate::group::tests::toy;

    fn s(v: u64) -> Scalar {
        Scalar::from_u64(v, &toy()).unwrap()
    }

    fn b(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn payloads(vals: &[u64]) -> Vec<BigUint> {
        vals.iter().map(|&v| b(v)).collect()
    }

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(0x5eed)
    }

    const ID: SessionId = SessionId([7; 16]);

    #[test]
    fn offer_decrypts_to_encoded_payloads() {
        let p = toy();
        let (sender, offer) = SenderSession::start(&p, ID, &payloads(&[2, 5, 7]), &mut rng()).unwrap();
        assert_eq!(offer.items.len(), 3);
        for (item, v) in offer.items.iter().zip([2, 5, 7]) {
            let m = decrypt(sender.keys(), item).unwrap();
            assert_eq!(m, encode_message(&b(v), &p).unwrap());
        }
        assert_eq!(sender.state(), SenderState::Offered);
    }

    #[test]
    fn offer_errors() {
        let p = toy();
        assert!(matches!(
            SenderSession::start(&p, ID, &[], &mut rng()),
            Err(Error::EmptyPayloads)
        ));
        assert!(matches!(
            SenderSession::start(&p, ID, &payloads(&[2, 12]), &mut rng()),
            Err(Error::PayloadOutOfRange)
        ));
        let (_, single) = SenderSession::start(&p, ID, &payloads(&[9]), &mut rng()).unwrap();
        assert_eq!(single.items.len(), 1);
    }

    #[test]
    fn choose_decrypts_to_chosen_item() {
        let p = toy();
        let mut r = rng();
        let (sender, offer) = SenderSession::start(&p, ID, &payloads(&[2, 5, 7]), &mut r).unwrap();
        let mut receiver = ReceiverSession::new(1);
        let script = ChoiceRandomness::random(&p, &mut r);
        let choice = receiver.choose_scripted(&offer, &script).unwrap();
        let keys_b = KeyPair::from_secret(p.clone(), script.x_b.clone());
        let m = decrypt_full(sender.keys(), &keys_b, &choice.chosen, Order::AFirst).unwrap();
        assert_eq!(m, encode_message(&b(5), &p).unwrap());
        assert_eq!(receiver.state(), ReceiverState::Chosen);
    }

    #[test]
    fn choose_index_out_of_range() {
        let p = toy();
        let (_, offer) = SenderSession::start(&p, ID, &payloads(&[2, 5, 7]), &mut rng()).unwrap();
        let mut receiver = ReceiverSession::new(3);
        assert!(matches!(
            receiver.choose(&offer, &mut rng()),
            Err(Error::IndexOutOfRange { index: 3, n: 3 })
        ));
        assert_eq!(receiver.state(), ReceiverState::AwaitingOffer);
    }

    #[test]
    fn zero_rerandomization_exposes_raw_path() {
        let p = toy();
        let (_, offer) = SenderSession::start(&p, ID, &payloads(&[2, 5, 7]), &mut rng()).unwrap();
        let mut receiver = ReceiverSession::new(1);
        let script = ChoiceRandomness {
            x_b: s(4),
            r: Scalar::zero(),
            k_b: s(6),
        };
        let choice = receiver.choose_scripted(&offer, &script).unwrap();
        assert_eq!(choice.chosen.c1, offer.items[1].y1);
    }

    #[test]
    fn strip_matches_strip_a_and_rejects_replay() {
        let p = toy();
        let mut r = rng();
        let (mut sender, offer) = SenderSession::start(&p, ID, &payloads(&[2, 5, 7]), &mut r).unwrap();
        let mut receiver = ReceiverSession::new(0);
        let choice = receiver.choose(&offer, &mut r).unwrap();

        let mut wrong = choice.clone();
        wrong.session_id = SessionId([8; 16]);
        assert!(matches!(sender.handle_choice(&wrong), Err(Error::UnknownSession)));
        assert_eq!(sender.state(), SenderState::Offered);

        let strip = sender.handle_choice(&choice).unwrap();
        assert_eq!(strip.stripped, strip_a(sender.keys(), &choice.chosen).unwrap());
        assert_eq!(strip.stripped.y1, choice.chosen.c2);
        assert_eq!(sender.state(), SenderState::Stripped);
        assert!(matches!(
            sender.handle_choice(&choice),
            Err(Error::UnexpectedMessage { .. })
        ));
        assert_eq!(sender.state(), SenderState::Stripped);

        assert_eq!(receiver.finish(&strip).unwrap(), b(2));
        assert_eq!(receiver.state(), ReceiverState::Done);
        assert!(receiver.finish(&strip).is_err());
        assert!(receiver.choose(&offer, &mut r).is_err());
        assert_eq!(receiver.state(), ReceiverState::Done);
    }

    #[test]
    fn receiver_rejects_strip_before_choice() {
        let mut receiver = ReceiverSession::new(0);
        let strip = OtStrip {
            session_id: ID,
            stripped: Ciphertext2::new(GroupElement::one(), GroupElement::one()),
        };
        assert!(matches!(
            receiver.finish(&strip),
            Err(Error::UnexpectedMessage { .. })
        ));
        assert_eq!(receiver.state(), ReceiverState::AwaitingOffer);
    }

    #[test]
    fn receiver_rejects_foreign_strip_without_state_change() {
        let p = toy();
        let mut r = rng();
        let (mut sender, offer) = SenderSession::start(&p, ID, &payloads(&[3, 4]), &mut r).unwrap();
        let mut receiver = ReceiverSession::new(1);
        let choice = receiver.choose(&offer, &mut r).unwrap();
        let strip = sender.handle_choice(&choice).unwrap();
        let mut foreign = strip.clone();
        foreign.session_id = SessionId([1; 16]);
        assert!(matches!(receiver.finish(&foreign), Err(Error::UnknownSession)));
        let mut bad = strip.clone();
        bad.stripped.y2 = GroupElement::unchecked(5u32.into());
        assert!(matches!(receiver.finish(&bad), Err(Error::NotInSubgroup)));
        assert_eq!(receiver.state(), ReceiverState::Chosen);
        assert_eq!(receiver.finish(&strip).unwrap(), b(4));
    }

    #[test]
    fn receiver_checks_offer_group() {
        let p = toy();
        let (_, mut offer) = SenderSession::start(&p, ID, &payloads(&[3]), &mut rng()).unwrap();
        let other = GroupParams::new(b(47), b(23), b(2), 2);
        let mut pinned = ReceiverSession::with_params(0, other);
        assert!(matches!(
            pinned.choose(&offer, &mut rng()),
            Err(Error::ParamsMismatch)
        ));
        offer.params = GroupParams::new(b(23), b(11), b(5), 2);
        assert!(matches!(
            ReceiverSession::new(0).choose(&offer, &mut rng()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn exhaustive_toy_sessions() {
        let p = toy();
        let vals = payloads(&[2, 5, 7]);
        for i in 0..3 {
            for x_a in 0..11 {
                let ks = [s(x_a), s((x_a + 3) % 11), s((x_a + 7) % 11)];
                for r in 0..11 {
                    for k_b in 0..11 {
                        let (mut sender, offer) =
                            SenderSession::start_scripted(&p, ID, &vals, s(x_a), &ks).unwrap();
                        let mut receiver = ReceiverSession::with_params(i, p.clone());
                        let script = ChoiceRandomness {
                            x_b: s((r * 5 + k_b) % 11),
                            r: s(r),
                            k_b: s(k_b),
                        };
                        let choice = receiver.choose_scripted(&offer, &script).unwrap();
                        let strip = sender.handle_choice(&choice).unwrap();
                        assert_eq!(receiver.finish(&strip).unwrap(), vals[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn m_of_n_local() {
        let p = toy();
        let vals = payloads(&[1, 2, 3, 4, 5]);
        let got: Vec<BigUint> = run_m_of_n_local(&p, &vals, &[0, 4], &mut rng())
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(got, vec![b(1), b(5)]);
        assert!(run_m_of_n_local(&p, &vals, &[], &mut rng()).is_empty());
        let dup: Vec<BigUint> = run_m_of_n_local(&p, &vals, &[2, 2], &mut rng())
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(dup, vec![b(3), b(3)]);
    }

    #[test]
    fn m_of_n_failure_is_isolated() {
        let p = toy();
        let vals = payloads(&[1, 2, 3]);
        let results = run_m_of_n_local(&p, &vals, &[0, 9, 2], &mut rng());
        assert_eq!(results[0].as_ref().unwrap(), &b(1));
        assert!(matches!(
            results[1],
            Err(Error::IndexOutOfRange { index: 9, n: 3 })
        ));
        assert_eq!(results[2].as_ref().unwrap(), &b(3));
    }
}
