use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::{Duration, Instant};

use super::protocol::{ResponseBody, ScoreRequest, ScoreResponse, MAX_LINE_BYTES};
use super::{PolarityScore, ScoreSource, ScorerError, SentimentScorer};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(5);

/// Where an external scorer lives: `tcp://host:port`, bare `host:port`, or
/// `stdio:<command and args>` for a child process.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Endpoint {
    Tcp(String),
    Stdio(Vec<String>),
}

impl Endpoint {
    pub fn parse(s: &str) -> Result<Endpoint, ScorerError> {
        if let Some(cmd) = s.strip_prefix("stdio:") {
            let argv: Vec<String> = cmd.split_whitespace().map(String::from).collect();
            if argv.is_empty() {
                return Err(ScorerError::Unavailable("empty stdio command".into()));
            }
            return Ok(Endpoint::Stdio(argv));
        }
        let addr = s.strip_prefix("tcp://").unwrap_or(s);
        if addr.rsplit_once(':').is_none() {
            return Err(ScorerError::Unavailable(format!("bad endpoint '{s}'")));
        }
        Ok(Endpoint::Tcp(addr.to_string()))
    }
}

/// Client for the line protocol. Holds one connection and keeps at most one
/// request outstanding.
pub struct ScorerClient {
    writer: Box<dyn Write + Send>,
    lines: Receiver<io::Result<String>>,
    next_id: u64,
    timeout: Duration,
    child: Option<Child>,
    socket: Option<TcpStream>,
}

impl ScorerClient {
    pub fn connect(endpoint: &str, timeout: Duration) -> Result<ScorerClient, ScorerError> {
        match Endpoint::parse(endpoint)? {
            Endpoint::Tcp(addr) => Self::connect_tcp(&addr, timeout),
            Endpoint::Stdio(argv) => Self::spawn_stdio(&argv, timeout),
        }
    }

    pub fn connect_tcp(addr: &str, timeout: Duration) -> Result<ScorerClient, ScorerError> {
        let unavailable = |e: io::Error| ScorerError::Unavailable(format!("{addr}: {e}"));
        let sock = addr
            .to_socket_addrs()
            .map_err(unavailable)?
            .next()
            .ok_or_else(|| ScorerError::Unavailable(format!("{addr}: no address")))?;
        let stream = TcpStream::connect_timeout(&sock, timeout).map_err(unavailable)?;
        stream.set_nodelay(true).ok();
        let read_half = stream.try_clone().map_err(unavailable)?;
        let handle = stream.try_clone().map_err(unavailable)?;
        let mut client = Self::from_streams(read_half, stream, timeout);
        client.socket = Some(handle);
        Ok(client)
    }

    pub fn spawn_stdio(argv: &[String], timeout: Duration) -> Result<ScorerClient, ScorerError> {
        let mut child = Command::new(&argv[0])
            .args(&argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ScorerError::Unavailable(format!("{}: {e}", argv[0])))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let mut client = Self::from_streams(stdout, stdin, timeout);
        client.child = Some(child);
        Ok(client)
    }

    /// Wraps an arbitrary byte stream pair. A background thread reads
    /// response lines so that waits can time out.
    pub fn from_streams<R, W>(reader: R, writer: W, timeout: Duration) -> ScorerClient
    where
        R: Read + Send + 'static,
        W: Write + Send + 'static,
    {
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(reader);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        ScorerClient {
            writer: Box::new(writer),
            lines: rx,
            next_id: 1,
            timeout,
            child: None,
            socket: None,
        }
    }

    pub fn request(&mut self, text: &str) -> Result<f64, ScorerError> {
        let id = self.next_id;
        self.next_id += 1;
        let mut line = serde_json::to_string(&ScoreRequest {
            id,
            text: text.to_string(),
        })
        .map_err(|e| ScorerError::Protocol(e.to_string()))?;
        if line.len() > MAX_LINE_BYTES {
            return Err(ScorerError::Protocol("request exceeds 64 KiB".into()));
        }
        line.push('\n');
        self.writer
            .write_all(line.as_bytes())
            .and_then(|_| self.writer.flush())
            .map_err(|e| ScorerError::Unavailable(e.to_string()))?;

        let deadline = Instant::now() + self.timeout;
        loop {
            let remaining = deadline.saturating_duration_since(Instant::now());
            let raw = match self.lines.recv_timeout(remaining) {
                Ok(Ok(raw)) => raw,
                Ok(Err(e)) => return Err(ScorerError::Unavailable(e.to_string())),
                Err(RecvTimeoutError::Timeout) => {
                    return Err(ScorerError::Unavailable(format!(
                        "no response within {:?}",
                        self.timeout
                    )))
                }
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(ScorerError::Unavailable("connection closed".into()))
                }
            };
            let raw = raw.trim_end_matches(['\n', '\r']);
            if raw.len() > MAX_LINE_BYTES {
                return Err(ScorerError::Protocol("response exceeds 64 KiB".into()));
            }
            let resp: ScoreResponse = serde_json::from_str(raw)
                .map_err(|e| ScorerError::Protocol(format!("bad response '{raw}': {e}")))?;
            if resp.id < id && resp.id != 0 {
                // late answer to a request that already timed out
                continue;
            }
            if resp.id != id {
                return Err(ScorerError::Protocol(format!(
                    "response id {} does not match request id {id}",
                    resp.id
                )));
            }
            return match resp.body {
                ResponseBody::Polarity { polarity } if (-1.0..=1.0).contains(&polarity) => {
                    Ok(polarity)
                }
                ResponseBody::Polarity { polarity } => Err(ScorerError::Protocol(format!(
                    "polarity {polarity} outside [-1, 1]"
                ))),
                ResponseBody::Error { error } => Err(ScorerError::Remote(error)),
            };
        }
    }
}

impl SentimentScorer for ScorerClient {
    fn score(&mut self, text: &str) -> Result<PolarityScore, ScorerError> {
        Ok(PolarityScore {
            value: self.request(text)?,
            source: ScoreSource::External,
        })
    }
}

impl Drop for ScorerClient {
    fn drop(&mut self) {
        if let Some(sock) = self.socket.take() {
            let _ = sock.shutdown(std::net::Shutdown::Both);
        }
        if let Some(mut child) = self.child.take() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}
