//! Message transports: an in-memory duplex pair and a framed byte stream, plus
//! the TCP server/client used by `commel ot serve` and `commel ot choose`.

use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::thread::JoinHandle;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::group::GroupParams;
use crate::ot::{run_receiver, run_sender, OtMessage, SessionSummary};
use crate::wire::{decode_message_with_limit, encode_message, read_frame, write_frame, DEFAULT_MAX_PAYLOAD};

/// A reliable, ordered duplex channel carrying whole messages.
pub trait Transport {
    fn send(&mut self, msg: &OtMessage) -> Result<()>;
    fn recv(&mut self) -> Result<OtMessage>;
}

impl<T: Transport + ?Sized> Transport for &mut T {
    fn send(&mut self, msg: &OtMessage) -> Result<()> {
        (**self).send(msg)
    }

    fn recv(&mut self) -> Result<OtMessage> {
        (**self).recv()
    }
}

/// One end of an in-process channel. Messages travel as encoded frames so the
/// wire codec is exercised exactly as on a socket.
#[derive(Debug)]
pub struct MemoryTransport {
    tx: Sender<Vec<u8>>,
    rx: Receiver<Vec<u8>>,
    max_payload: usize,
}

impl MemoryTransport {
    /// Pushes raw bytes to the peer, bypassing the encoder.
    pub fn send_raw(&mut self, frame: Vec<u8>) -> Result<()> {
        self.tx.send(frame).map_err(|_| hung_up())
    }
}

pub fn memory_pair() -> (MemoryTransport, MemoryTransport) {
    let (a_tx, b_rx) = channel();
    let (b_tx, a_rx) = channel();
    (
        MemoryTransport {
            tx: a_tx,
            rx: a_rx,
            max_payload: DEFAULT_MAX_PAYLOAD,
        },
        MemoryTransport {
            tx: b_tx,
            rx: b_rx,
            max_payload: DEFAULT_MAX_PAYLOAD,
        },
    )
}

fn hung_up() -> Error {
    Error::Io(io::Error::new(io::ErrorKind::UnexpectedEof, "peer hung up"))
}

impl Transport for MemoryTransport {
    fn send(&mut self, msg: &OtMessage) -> Result<()> {
        self.send_raw(encode_message(msg))
    }

    fn recv(&mut self) -> Result<OtMessage> {
        let frame = self.rx.recv().map_err(|_| hung_up())?;
        decode_message_with_limit(&frame, self.max_payload)
    }
}

/// Frames over any byte stream (typically a [`TcpStream`]).
#[derive(Debug)]
pub struct StreamTransport<S> {
    stream: S,
    max_payload: usize,
}

impl<S: Read + Write> StreamTransport<S> {
    pub fn new(stream: S) -> Self {
        StreamTransport {
            stream,
            max_payload: DEFAULT_MAX_PAYLOAD,
        }
    }

    pub fn with_max_payload(mut self, max_payload: usize) -> Self {
        self.max_payload = max_payload;
        self
    }

    pub fn get_mut(&mut self) -> &mut S {
        &mut self.stream
    }
}

impl<S: Read + Write> Transport for StreamTransport<S> {
    fn send(&mut self, msg: &OtMessage) -> Result<()> {
        write_frame(&mut self.stream, msg)
    }

    fn recv(&mut self) -> Result<OtMessage> {
        read_frame(&mut self.stream, self.max_payload)
    }
}

/// Sender endpoint: one OT session per accepted connection, each on its own thread.
pub struct OtServer {
    listener: TcpListener,
    params: GroupParams,
    payloads: Vec<BigUint>,
    seed: Option<[u8; 32]>,
}

impl OtServer {
    pub fn bind<A: ToSocketAddrs>(addr: A, params: GroupParams, payloads: Vec<BigUint>) -> Result<Self> {
        if payloads.is_empty() {
            return Err(Error::EmptyPayloads);
        }
        // Reject unencodable payloads before accepting anyone.
        for payload in &payloads {
            crate::group::encode_message(payload, &params)?;
        }
        Ok(OtServer {
            listener: TcpListener::bind(addr)?,
            params,
            payloads,
            seed: None,
        })
    }

    /// Derives every session's randomness from `seed` and the connection number.
    pub fn with_seed(mut self, seed: [u8; 32]) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn local_addr(&self) -> Result<SocketAddr> {
        Ok(self.listener.local_addr()?)
    }

    /// Accepts up to `max_sessions` connections (forever if `None`) and waits
    /// for their sessions to end.
    pub fn serve(self, max_sessions: Option<usize>) -> Vec<Result<SessionSummary>> {
        let mut handles: Vec<JoinHandle<Result<SessionSummary>>> = Vec::new();
        let mut accepted = 0u64;
        for conn in self.listener.incoming() {
            let stream = match conn {
                Ok(stream) => stream,
                Err(err) => {
                    log::warn!("accept failed: {err}");
                    continue;
                }
            };
            let peer = stream.peer_addr().ok();
            let params = self.params.clone();
            let payloads = self.payloads.clone();
            let mut rng = session_rng(self.seed, accepted);
            accepted += 1;
            log::info!("connection {accepted} from {peer:?}");
            handles.push(std::thread::spawn(move || {
                let mut transport = StreamTransport::new(stream);
                run_sender(&mut transport, &params, &payloads, &mut rng)
            }));
            if max_sessions.is_some_and(|max| handles.len() >= max) {
                break;
            }
        }
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Remote("session thread panicked".into())))
            })
            .collect()
    }

    /// Runs [`OtServer::serve`] on a background thread.
    pub fn spawn(self, max_sessions: Option<usize>) -> JoinHandle<Vec<Result<SessionSummary>>> {
        std::thread::spawn(move || self.serve(max_sessions))
    }
}

fn session_rng(seed: Option<[u8; 32]>, connection: u64) -> ChaCha20Rng {
    match seed {
        Some(seed) => {
            let mut rng = ChaCha20Rng::from_seed(seed);
            rng.set_stream(connection);
            rng
        }
        None => ChaCha20Rng::from_entropy(),
    }
}

/// Receiver endpoint: connects, runs one session for `index`, returns the payload.
pub fn choose_ot<A, R>(
    addr: A,
    index: usize,
    trusted: Option<&GroupParams>,
    rng: &mut R,
) -> Result<BigUint>
where
    A: ToSocketAddrs,
    R: RngCore + ?Sized,
{
    let stream = TcpStream::connect(addr)?;
    let mut transport = StreamTransport::new(stream);
    run_receiver(&mut transport, index, trusted, rng)
}
