//! OT sessions over real sockets: error frames, replays, and session isolation.

use std::net::TcpStream;
use std::thread;

use commel::ot::{run_receiver, OtChoice, OtMessage, ReceiverSession, SessionId};
use commel::transport::{choose_ot, memory_pair, OtServer, StreamTransport, Transport};
use commel::wire::{encode_message, MAGIC};
use commel::{Error, GroupParams};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn toy() -> GroupParams {
    GroupParams::new(23u32.into(), 11u32.into(), 4u32.into(), 2)
}

fn payloads(vals: &[u32]) -> Vec<BigUint> {
    vals.iter().map(|&v| BigUint::from(v)).collect()
}

fn connect(server: &OtServer) -> StreamTransport<TcpStream> {
    StreamTransport::new(TcpStream::connect(server.local_addr().unwrap()).unwrap())
}

fn recv_offer(t: &mut impl Transport) -> commel::OtOffer {
    match t.recv().unwrap() {
        OtMessage::Offer(o) => o,
        other => panic!("expected offer, got {other:?}"),
    }
}

#[test]
fn bogus_choice_gets_error_frame_then_session_recovers() {
    let server = OtServer::bind("127.0.0.1:0", toy(), payloads(&[2, 5, 7])).unwrap();
    let mut client = connect(&server);
    let handle = server.spawn(Some(1));
    let mut rng = ChaCha20Rng::seed_from_u64(1);

    let offer = recv_offer(&mut client);
    let mut receiver = ReceiverSession::with_params(2, toy());
    let choice = receiver.choose(&offer, &mut rng).unwrap();

    // Choice for a session the server never offered.
    let mut foreign = choice.clone();
    foreign.session_id = SessionId([0xee; 16]);
    client.send(&OtMessage::Choice(foreign)).unwrap();
    assert!(matches!(client.recv().unwrap(), OtMessage::Error(_)));

    // A Strip is never valid from the receiver.
    client
        .send(&OtMessage::Strip(commel::OtStrip {
            session_id: offer.session_id,
            stripped: offer.items[0].clone(),
        }))
        .unwrap();
    assert!(matches!(client.recv().unwrap(), OtMessage::Error(_)));

    // The real choice still works: rejected messages did not touch the session.
    client.send(&OtMessage::Choice(choice.clone())).unwrap();
    let strip = match client.recv().unwrap() {
        OtMessage::Strip(s) => s,
        other => panic!("expected strip, got {other:?}"),
    };
    assert_eq!(receiver.finish(&strip).unwrap(), BigUint::from(7u32));

    // Replaying the choice is rejected.
    client.send(&OtMessage::Choice(choice)).unwrap();
    assert!(matches!(client.recv().unwrap(), OtMessage::Error(_)));

    drop(client);
    let summary = handle.join().unwrap().remove(0).unwrap();
    assert!(summary.stripped);
    assert_eq!(summary.rejected, 3);
}

#[test]
fn garbage_payload_is_rejected_with_error_frame() {
    let server = OtServer::bind("127.0.0.1:0", toy(), payloads(&[3])).unwrap();
    let mut client = connect(&server);
    let handle = server.spawn(Some(1));
    let _ = recv_offer(&mut client);

    // Well-framed Choice whose payload is truncated.
    let mut frame = MAGIC.to_vec();
    frame.extend_from_slice(&[0x01, 0x02, 0, 0, 0, 3, 1, 2, 3]);
    std::io::Write::write_all(client.get_mut(), &frame).unwrap();
    assert!(matches!(client.recv().unwrap(), OtMessage::Error(_)));

    drop(client);
    let summary = handle.join().unwrap().remove(0).unwrap();
    assert!(!summary.stripped);
    assert_eq!(summary.rejected, 1);
}

#[test]
fn choice_with_non_member_components_is_rejected() {
    let server = OtServer::bind("127.0.0.1:0", toy(), payloads(&[3, 4])).unwrap();
    let mut client = connect(&server);
    let handle = server.spawn(Some(1));
    let offer = recv_offer(&mut client);
    let bad = OtChoice {
        session_id: offer.session_id,
        receiver_pub: commel::GroupElement::unchecked(5u32.into()),
        chosen: commel::Ciphertext3::new(
            offer.items[0].y1.clone(),
            offer.items[0].y1.clone(),
            offer.items[0].y2.clone(),
        ),
    };
    client.send(&OtMessage::Choice(bad)).unwrap();
    assert!(matches!(client.recv().unwrap(), OtMessage::Error(_)));
    drop(client);
    handle.join().unwrap();
}

#[test]
fn concurrent_clients_are_isolated() {
    let vals = payloads(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
    let server = OtServer::bind("127.0.0.1:0", toy(), vals.clone()).unwrap();
    let addr = server.local_addr().unwrap();
    let handle = server.spawn(Some(12));

    // One misbehaving connection alongside honest ones.
    let mut rogue = StreamTransport::new(TcpStream::connect(addr).unwrap());
    let clients: Vec<_> = (0..10usize)
        .map(|i| {
            thread::spawn(move || {
                let mut rng = ChaCha20Rng::seed_from_u64(i as u64);
                choose_ot(addr, i, Some(&toy()), &mut rng)
            })
        })
        .collect();
    let _ = recv_offer(&mut rogue);
    rogue
        .send(&OtMessage::Choice(OtChoice {
            session_id: SessionId([0; 16]),
            receiver_pub: commel::GroupElement::one(),
            chosen: commel::Ciphertext3::new(
                commel::GroupElement::one(),
                commel::GroupElement::one(),
                commel::GroupElement::one(),
            ),
        }))
        .unwrap();
    assert!(matches!(rogue.recv().unwrap(), OtMessage::Error(_)));
    drop(rogue);

    for (i, c) in clients.into_iter().enumerate() {
        assert_eq!(c.join().unwrap().unwrap(), vals[i]);
    }
    // Last session: a client that hangs up right after the offer.
    let mut quitter = StreamTransport::new(TcpStream::connect(addr).unwrap());
    let _ = recv_offer(&mut quitter);
    drop(quitter);

    let summaries = handle.join().unwrap();
    assert_eq!(summaries.len(), 12);
    let stripped = summaries
        .iter()
        .filter(|s| s.as_ref().unwrap().stripped)
        .count();
    assert_eq!(stripped, 10);
}

#[test]
fn out_of_range_index_fails_before_sending() {
    let (mut sender_side, mut receiver_side) = memory_pair();
    let sender = thread::spawn(move || {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        commel::ot::run_sender(&mut sender_side, &toy(), &payloads(&[2, 3]), &mut rng)
    });
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let err = run_receiver(&mut receiver_side, 2, Some(&toy()), &mut rng).unwrap_err();
    assert!(matches!(err, Error::IndexOutOfRange { index: 2, n: 2 }));
    drop(receiver_side);
    let summary = sender.join().unwrap().unwrap();
    // Sender saw nothing but the hang-up.
    assert_eq!(summary.rejected, 0);
    assert!(!summary.stripped);
}

#[test]
fn receiver_reports_remote_error() {
    let (mut a, mut b) = memory_pair();
    a.send_raw(encode_message(&OtMessage::Error(commel::ot::OtError {
        session_id: SessionId([0; 16]),
        reason: "go away".into(),
    })))
    .unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let err = run_receiver(&mut b, 0, None, &mut rng).unwrap_err();
    assert!(matches!(err, Error::Remote(ref r) if r == "go away"));
}
