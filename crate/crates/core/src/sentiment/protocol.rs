//! Newline-delimited JSON scorer protocol.
//!
//! ```text
//! -> {"id":7,"text":"Good job!"}
//! <- {"id":7,"polarity":0.9}
//! <- {"id":7,"error":"model not loaded"}
//! ```
//!
//! One response per request, in order. Lines are UTF-8 and never longer
//! than [`MAX_LINE_BYTES`]. A request whose id cannot be recovered is
//! answered with id 0.

use std::io::{self, BufRead, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use serde::{Deserialize, Serialize};

pub const MAX_LINE_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRequest {
    pub id: u64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreResponse {
    pub id: u64,
    #[serde(flatten)]
    pub body: ResponseBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResponseBody {
    Polarity { polarity: f64 },
    Error { error: String },
}

impl ScoreResponse {
    pub fn polarity(id: u64, polarity: f64) -> Self {
        ScoreResponse {
            id,
            body: ResponseBody::Polarity { polarity },
        }
    }

    pub fn error(id: u64, msg: impl Into<String>) -> Self {
        ScoreResponse {
            id,
            body: ResponseBody::Error { error: msg.into() },
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("response serializes")
    }
}

/// Handles one raw request line and produces the response to send back.
pub fn handle_line<F>(line: &[u8], score: &mut F) -> ScoreResponse
where
    F: FnMut(&str) -> Result<f64, String>,
{
    let recover_id = |bytes: &[u8]| {
        serde_json::from_slice::<serde_json::Value>(bytes)
            .ok()
            .and_then(|v| v.get("id").and_then(|id| id.as_u64()))
            .unwrap_or(0)
    };
    if line.len() > MAX_LINE_BYTES {
        return ScoreResponse::error(0, "request line exceeds 64 KiB");
    }
    let Ok(text) = std::str::from_utf8(line) else {
        return ScoreResponse::error(0, "request is not valid UTF-8");
    };
    match serde_json::from_str::<ScoreRequest>(text) {
        Ok(req) => match score(&req.text) {
            Ok(p) if (-1.0..=1.0).contains(&p) => ScoreResponse::polarity(req.id, p),
            Ok(p) => ScoreResponse::error(req.id, format!("polarity {p} outside [-1, 1]")),
            Err(e) => ScoreResponse::error(req.id, e),
        },
        Err(e) => ScoreResponse::error(recover_id(line), format!("malformed request: {e}")),
    }
}

/// Serves requests from `reader` until EOF, writing one response line per
/// request line and flushing after each.
pub fn serve<R, W, F>(mut reader: R, mut writer: W, mut score: F) -> io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(&str) -> Result<f64, String>,
{
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        while matches!(buf.last(), Some(b'\n' | b'\r')) {
            buf.pop();
        }
        if buf.is_empty() {
            continue;
        }
        let resp = handle_line(&buf, &mut score);
        writer.write_all(resp.to_line().as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
}

/// In-process TCP scorer for tests and demos. Each connection gets its own
/// thread; the listener stops when the handle is dropped.
pub struct StubServer {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn spawn<F>(score: F) -> io::Result<StubServer>
    where
        F: FnMut(&str) -> Result<f64, String> + Send + 'static,
    {
        let listener = TcpListener::bind("127.0.0.1:0")?;
        let addr = listener.local_addr()?;
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let score = Arc::new(Mutex::new(score));
        let handle = std::thread::spawn(move || {
            for conn in listener.incoming() {
                if flag.load(Ordering::SeqCst) {
                    break;
                }
                let Ok(stream) = conn else { continue };
                let Ok(read_half) = stream.try_clone() else { continue };
                let score = Arc::clone(&score);
                std::thread::spawn(move || {
                    let _ = serve(io::BufReader::new(read_half), stream, |text: &str| {
                        let mut f = score.lock().unwrap_or_else(|e| e.into_inner());
                        (*f)(text)
                    });
                });
            }
        });
        Ok(StubServer {
            addr,
            stop,
            handle: Some(handle),
        })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        // wake the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}
