//! Golden transcript for the scorer wire protocol, replayed against the
//! in-process server both directly and over TCP.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::time::Duration;

use senti_shape::sentiment::protocol::{handle_line, serve, StubServer, MAX_LINE_BYTES};
use senti_shape::sentiment::{ScorerClient, ScorerError};
use serde_json::Value;

/// Scoring rule the transcript was written against.
fn rule(text: &str) -> Result<f64, String> {
    let t = text.to_lowercase();
    if t.contains("boom") {
        Err("model not loaded".into())
    } else if t.contains("overflow") {
        Ok(1.5)
    } else if t.contains("good") {
        Ok(0.9)
    } else if t.contains("bad") {
        Ok(-0.8)
    } else {
        Ok(0.0)
    }
}

fn transcript() -> Vec<(String, Value)> {
    include_str!("fixtures/scorer_transcript.jsonl")
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            (v["send"].as_str().unwrap().to_string(), v["expect"].clone())
        })
        .collect()
}

/// Same keys, same id, same polarity; any error message matches `"*"`.
fn assert_matches(got: &Value, want: &Value, case: usize) {
    let keys = |v: &Value| {
        let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
        k.sort();
        k
    };
    assert_eq!(keys(got), keys(want), "case {case}: {got}");
    assert_eq!(got["id"], want["id"], "case {case}: {got}");
    if let Some(p) = want.get("polarity") {
        assert_eq!(got["polarity"].as_f64(), p.as_f64(), "case {case}");
    } else {
        assert!(got["error"].as_str().is_some_and(|e| !e.is_empty()), "case {case}: {got}");
    }
}

#[test]
fn transcript_has_twenty_requests() {
    let t = transcript();
    assert_eq!(t.len(), 20);
    assert!(t.iter().filter(|(_, e)| e.get("error").is_some()).count() >= 8);
}

#[test]
fn handler_follows_transcript() {
    let mut score = rule;
    for (i, (send, want)) in transcript().iter().enumerate() {
        let line = send.trim_end_matches(['\r', '\n']);
        let resp = handle_line(line.as_bytes(), &mut score);
        let got: Value = serde_json::from_str(&resp.to_line()).unwrap();
        assert_matches(&got, want, i + 1);
    }
}

#[test]
fn tcp_server_follows_transcript() {
    let server = StubServer::spawn(rule).unwrap();
    let stream = TcpStream::connect(server.addr()).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(5))).unwrap();
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut writer = stream;
    for (i, (send, want)) in transcript().iter().enumerate() {
        writer.write_all(send.as_bytes()).unwrap();
        writer.write_all(b"\n").unwrap();
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        assert!(line.ends_with('\n'));
        let got: Value = serde_json::from_str(&line).unwrap();
        assert_matches(&got, want, i + 1);
    }
}

#[test]
fn successful_responses_are_compact_json() {
    let input = b"{\"id\":1,\"text\":\"good\"}\n\n{\"id\":2,\"text\":\"bad\"}\n";
    let mut out = Vec::new();
    serve(&input[..], &mut out, rule).unwrap();
    // blank lines get no response
    assert_eq!(
        String::from_utf8(out).unwrap(),
        "{\"id\":1,\"polarity\":0.9}\n{\"id\":2,\"polarity\":-0.8}\n"
    );
}

#[test]
fn invalid_utf8_and_oversized_lines_are_errors() {
    let mut score = rule;
    let r = handle_line(b"{\"id\":3,\"text\":\"\xff\"}", &mut score);
    assert_eq!(r.id, 0);
    assert!(r.to_line().contains("\"error\""));
    let big = format!("{{\"id\":4,\"text\":\"{}\"}}", "a".repeat(MAX_LINE_BYTES));
    let r = handle_line(big.as_bytes(), &mut score);
    assert!(r.to_line().contains("\"error\""));
}

#[test]
fn client_round_trips_and_validates() {
    let server = StubServer::spawn(rule).unwrap();
    let mut client = ScorerClient::connect(&server.addr().to_string(), Duration::from_secs(5)).unwrap();
    assert_eq!(client.request("Good job!").unwrap(), 0.9);
    assert_eq!(client.request("bad luck").unwrap(), -0.8);
    assert!(matches!(client.request("boom"), Err(ScorerError::Remote(_))));
    // the server itself refuses out-of-range polarities
    assert!(matches!(client.request("overflow"), Err(ScorerError::Remote(_))));
    assert_eq!(client.request("still going").unwrap(), 0.0);
}

#[test]
fn client_rejects_out_of_range_from_a_lax_server() {
    let reply = std::io::Cursor::new(b"{\"id\":1,\"polarity\":1.5}\n".to_vec());
    let mut client = ScorerClient::from_streams(reply, std::io::sink(), Duration::from_secs(1));
    assert!(matches!(client.request("x"), Err(ScorerError::Protocol(_))));
}

#[test]
fn mismatched_id_is_a_protocol_error() {
    let reply = std::io::Cursor::new(b"{\"id\":9,\"polarity\":0.1}\n".to_vec());
    let mut client = ScorerClient::from_streams(reply, std::io::sink(), Duration::from_secs(1));
    assert!(matches!(client.request("x"), Err(ScorerError::Protocol(_))));
}

#[test]
fn silent_server_times_out() {
    let (_keep, rx) = std::sync::mpsc::channel::<u8>();
    let silent = ChannelReader(rx);
    let mut client = ScorerClient::from_streams(silent, std::io::sink(), Duration::from_millis(200));
    assert!(matches!(client.request("x"), Err(ScorerError::Unavailable(_))));
}

/// Blocks until its sender is dropped.
struct ChannelReader(std::sync::mpsc::Receiver<u8>);

impl std::io::Read for ChannelReader {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        match self.0.recv() {
            Ok(b) => {
                buf[0] = b;
                Ok(1)
            }
            Err(_) => Ok(0),
        }
    }
}

#[test]
fn unreachable_endpoint_is_unavailable() {
    let port = {
        let l = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        l.local_addr().unwrap().port()
    };
    let r = ScorerClient::connect(&format!("127.0.0.1:{port}"), Duration::from_millis(500));
    assert!(matches!(r, Err(ScorerError::Unavailable(_))));
}
