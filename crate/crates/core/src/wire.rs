//! Byte-exact framing for the OT messages.
//!
//! ```text
//! frame   = "CMEL" | version:u8 (0x01) | type:u8 | payload_len:u32be | payload
//! wireint = len:u32be | magnitude (big-endian, no leading zero byte; 0 is len = 0)
//! list    = count:u32be | element*
//! ```
//!
//! Every payload starts with the 16-byte session id. Decoding is structural
//! only; subgroup membership is checked by the protocol layer.

use std::io::{Read, Write};

use num_bigint::BigUint;

use crate::commutative::Ciphertext3;
use crate::elgamal::Ciphertext2;
use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams};
use crate::ot::{OtChoice, OtError, OtMessage, OtOffer, OtStrip, SessionId};

pub const MAGIC: [u8; 4] = *b"CMEL";
pub const VERSION: u8 = 0x01;
pub const HEADER_LEN: usize = 10;
/// Default cap on `payload_len`, checked before any allocation.
pub const DEFAULT_MAX_PAYLOAD: usize = 16 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum MsgType {
    Offer = 0x01,
    Choice = 0x02,
    Strip = 0x03,
    Error = 0x7F,
}

impl MsgType {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(MsgType::Offer),
            0x02 => Ok(MsgType::Choice),
            0x03 => Ok(MsgType::Strip),
            0x7F => Ok(MsgType::Error),
            other => Err(Error::Wire(format!("unknown message type {other:#04x}"))),
        }
    }
}

pub fn encode_int(x: &BigUint, out: &mut Vec<u8>) {
    if x.bits() == 0 {
        out.extend_from_slice(&0u32.to_be_bytes());
        return;
    }
    let bytes = x.to_bytes_be();
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(&bytes);
}

pub fn int_to_bytes(x: &BigUint) -> Vec<u8> {
    let mut out = Vec::new();
    encode_int(x, &mut out);
    out
}

/// Decodes exactly one WireInt occupying all of `bytes`.
pub fn decode_int(bytes: &[u8]) -> Result<BigUint> {
    let mut r = Reader::new(bytes);
    let x = r.int()?;
    r.finish()?;
    Ok(x)
}

/// Sequential reader over a payload with bounds checks on every step.
pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if n > self.buf.len() {
            return Err(Error::Wire(format!(
                "truncated: need {n} bytes, have {}",
                self.buf.len()
            )));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn int(&mut self) -> Result<BigUint> {
        let len = self.u32()? as usize;
        let mag = self.take(len)?;
        if mag.first() == Some(&0) {
            return Err(Error::Wire("non-minimal integer encoding".into()));
        }
        Ok(BigUint::from_bytes_be(mag))
    }

    fn element(&mut self) -> Result<GroupElement> {
        Ok(GroupElement::unchecked(self.int()?))
    }

    fn session_id(&mut self) -> Result<SessionId> {
        let b = self.take(16)?;
        let mut id = [0u8; 16];
        id.copy_from_slice(b);
        Ok(SessionId(id))
    }

    fn ciphertext2(&mut self) -> Result<Ciphertext2> {
        Ok(Ciphertext2::new(self.element()?, self.element()?))
    }

    fn ciphertext3(&mut self) -> Result<Ciphertext3> {
        Ok(Ciphertext3::new(
            self.element()?,
            self.element()?,
            self.element()?,
        ))
    }

    /// Reads a list count and checks it against the bytes left, assuming each
    /// element needs at least `min_elem` bytes.
    fn count(&mut self, min_elem: usize) -> Result<usize> {
        let n = self.u32()? as usize;
        if n.saturating_mul(min_elem) > self.buf.len() {
            return Err(Error::Wire(format!("list count {n} overflows payload")));
        }
        Ok(n)
    }

    pub fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Wire(format!("{} trailing bytes", self.buf.len())))
        }
    }
}

fn put_element(e: &GroupElement, out: &mut Vec<u8>) {
    encode_int(e.value(), out);
}

fn put_c2(c: &Ciphertext2, out: &mut Vec<u8>) {
    put_element(&c.y1, out);
    put_element(&c.y2, out);
}

fn put_c3(c: &Ciphertext3, out: &mut Vec<u8>) {
    put_element(&c.c1, out);
    put_element(&c.c2, out);
    put_element(&c.c3, out);
}

/// Ciphertexts on the CLI: WireInts concatenated, no framing.
pub fn ciphertext2_to_bytes(c: &Ciphertext2) -> Vec<u8> {
    let mut out = Vec::new();
    put_c2(c, &mut out);
    out
}

pub fn ciphertext3_to_bytes(c: &Ciphertext3) -> Vec<u8> {
    let mut out = Vec::new();
    put_c3(c, &mut out);
    out
}

/// Splits a buffer of concatenated WireInts.
pub fn decode_int_list(bytes: &[u8]) -> Result<Vec<BigUint>> {
    let mut r = Reader::new(bytes);
    let mut out = Vec::new();
    while !r.is_empty() {
        out.push(r.int()?);
    }
    Ok(out)
}

fn encode_payload(msg: &OtMessage) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&msg.session_id().0);
    match msg {
        OtMessage::Offer(o) => {
            encode_int(o.params.p(), &mut out);
            encode_int(o.params.q(), &mut out);
            encode_int(o.params.g(), &mut out);
            encode_int(&BigUint::from(o.params.gamma()), &mut out);
            put_element(&o.sender_pub, &mut out);
            out.extend_from_slice(&(o.items.len() as u32).to_be_bytes());
            for item in &o.items {
                put_c2(item, &mut out);
            }
        }
        OtMessage::Choice(c) => {
            put_element(&c.receiver_pub, &mut out);
            put_c3(&c.chosen, &mut out);
        }
        OtMessage::Strip(s) => put_c2(&s.stripped, &mut out),
        OtMessage::Error(e) => {
            let reason = e.reason.as_bytes();
            out.extend_from_slice(&(reason.len() as u32).to_be_bytes());
            out.extend_from_slice(reason);
        }
    }
    out
}

fn decode_payload(ty: MsgType, payload: &[u8]) -> Result<OtMessage> {
    let mut r = Reader::new(payload);
    let session_id = r.session_id()?;
    let msg = match ty {
        MsgType::Offer => {
            let p = r.int()?;
            let q = r.int()?;
            let g = r.int()?;
            let gamma = u32::try_from(r.int()?)
                .map_err(|_| Error::Wire("gamma does not fit in u32".into()))?;
            let sender_pub = r.element()?;
            let n = r.count(8)?;
            if n == 0 {
                return Err(Error::Wire("offer must carry at least one item".into()));
            }
            let mut items = Vec::with_capacity(n);
            for _ in 0..n {
                items.push(r.ciphertext2()?);
            }
            OtMessage::Offer(OtOffer {
                session_id,
                params: GroupParams::new(p, q, g, gamma),
                sender_pub,
                items,
            })
        }
        MsgType::Choice => OtMessage::Choice(OtChoice {
            session_id,
            receiver_pub: r.element()?,
            chosen: r.ciphertext3()?,
        }),
        MsgType::Strip => OtMessage::Strip(OtStrip {
            session_id,
            stripped: r.ciphertext2()?,
        }),
        MsgType::Error => {
            let n = r.count(1)?;
            let reason = String::from_utf8(r.take(n)?.to_vec())
                .map_err(|_| Error::Wire("error reason is not UTF-8".into()))?;
            OtMessage::Error(OtError { session_id, reason })
        }
    };
    r.finish()?;
    Ok(msg)
}

/// Serializes one message as a complete frame.
pub fn encode_message(msg: &OtMessage) -> Vec<u8> {
    let payload = encode_payload(msg);
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg.msg_type() as u8);
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(&payload);
    out
}

pub fn decode_message(frame: &[u8]) -> Result<OtMessage> {
    decode_message_with_limit(frame, DEFAULT_MAX_PAYLOAD)
}

pub fn decode_message_with_limit(frame: &[u8], max_payload: usize) -> Result<OtMessage> {
    if frame.len() < HEADER_LEN {
        return Err(Error::Wire("truncated frame header".into()));
    }
    let (header, payload) = frame.split_at(HEADER_LEN);
    let (ty, len) = parse_header(header, max_payload)?;
    if payload.len() != len {
        return Err(Error::Wire(format!(
            "payload length {} does not match header {len}",
            payload.len()
        )));
    }
    decode_payload(ty, payload)
}

fn parse_header(header: &[u8], max_payload: usize) -> Result<(MsgType, usize)> {
    if header[..4] != MAGIC {
        return Err(Error::Wire("bad magic".into()));
    }
    if header[4] != VERSION {
        return Err(Error::Wire(format!("unsupported version {}", header[4])));
    }
    let ty = MsgType::from_byte(header[5])?;
    let len = u32::from_be_bytes([header[6], header[7], header[8], header[9]]) as usize;
    if len > max_payload {
        return Err(Error::Wire(format!(
            "payload length {len} exceeds cap {max_payload}"
        )));
    }
    Ok((ty, len))
}

/// Reads one frame from a byte stream. I/O failures surface as [`Error::Io`].
pub fn read_frame<R: Read>(reader: &mut R, max_payload: usize) -> Result<OtMessage> {
    let mut header = [0u8; HEADER_LEN];
    reader.read_exact(&mut header)?;
    let (ty, len) = parse_header(&header, max_payload)?;
    let mut payload = vec![0u8; len];
    reader.read_exact(&mut payload)?;
    decode_payload(ty, &payload)
}

pub fn write_frame<W: Write>(writer: &mut W, msg: &OtMessage) -> Result<()> {
    writer.write_all(&encode_message(msg))?;
    writer.flush()?;
    Ok(())
}
