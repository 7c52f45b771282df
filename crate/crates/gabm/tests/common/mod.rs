//! Shared test support: a minimal in-process chat-completions stub server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Instant;

/// One scripted reply. When the script runs out, the last entry repeats.
#[derive(Debug, Clone)]
pub enum Script {
    /// 200 with the given assistant message content.
    Reply(String),
    /// 200 with content plus reported token usage.
    ReplyWithUsage(String, u64, u64),
    /// A bare status code (e.g. 429, 500), optional Retry-After seconds.
    Status(u16, Option<u64>),
}

pub struct StubServer {
    pub base_url: String,
    hits: Arc<AtomicUsize>,
    request_times: Arc<Mutex<Vec<Instant>>>,
    request_bodies: Arc<Mutex<Vec<serde_json::Value>>>,
    shutdown: Arc<AtomicBool>,
    addr: std::net::SocketAddr,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    pub fn start(script: Vec<Script>) -> Self {
        assert!(!script.is_empty(), "stub needs at least one scripted reply");
        let listener = TcpListener::bind("127.0.0.1:0").expect("bind stub listener");
        let addr = listener.local_addr().expect("stub addr");
        let hits = Arc::new(AtomicUsize::new(0));
        let request_times = Arc::new(Mutex::new(Vec::new()));
        let request_bodies = Arc::new(Mutex::new(Vec::new()));
        let shutdown = Arc::new(AtomicBool::new(false));

        let handle = {
            let hits = hits.clone();
            let request_times = request_times.clone();
            let request_bodies = request_bodies.clone();
            let shutdown = shutdown.clone();
            std::thread::spawn(move || {
                let mut served = 0usize;
                for stream in listener.incoming() {
                    if shutdown.load(Ordering::SeqCst) {
                        break;
                    }
                    let Ok(stream) = stream else { continue };
                    let index = served.min(script.len() - 1);
                    served += 1;
                    let n = hits.fetch_add(1, Ordering::SeqCst);
                    let _ = n;
                    request_times
                        .lock()
                        .expect("times poisoned")
                        .push(Instant::now());
                    if let Some(body) = handle_connection(stream, &script[index]) {
                        request_bodies
                            .lock()
                            .expect("bodies poisoned")
                            .push(body);
                    }
                }
            })
        };

        StubServer {
            base_url: format!("http://{addr}"),
            hits,
            request_times,
            request_bodies,
            shutdown,
            addr,
            handle: Some(handle),
        }
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::SeqCst)
    }

    /// Gaps between consecutive request arrival times.
    pub fn request_gaps(&self) -> Vec<std::time::Duration> {
        let times = self.request_times.lock().expect("times poisoned");
        times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn request_bodies(&self) -> Vec<serde_json::Value> {
        self.request_bodies.lock().expect("bodies poisoned").clone()
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        // unblock the accept loop
        let _ = TcpStream::connect(self.addr);
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn handle_connection(stream: TcpStream, script: &Script) -> Option<serde_json::Value> {
    let mut reader = BufReader::new(stream);
    let mut request_line = String::new();
    reader.read_line(&mut request_line).ok()?;
    let mut content_length = 0usize;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).ok()?;
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((name, value)) = line.split_once(':') {
            if name.eq_ignore_ascii_case("content-length") {
                content_length = value.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0u8; content_length];
    reader.read_exact(&mut body).ok()?;
    let parsed = serde_json::from_slice(&body).ok();

    let (status_line, extra_headers, payload) = match script {
        Script::Reply(content) => (
            "HTTP/1.1 200 OK",
            String::new(),
            completion_json(content, None),
        ),
        Script::ReplyWithUsage(content, prompt_tokens, completion_tokens) => (
            "HTTP/1.1 200 OK",
            String::new(),
            completion_json(content, Some((*prompt_tokens, *completion_tokens))),
        ),
        Script::Status(code, retry_after) => {
            let reason = match code {
                200 => "OK",
                429 => "Too Many Requests",
                500 => "Internal Server Error",
                503 => "Service Unavailable",
                400 => "Bad Request",
                401 => "Unauthorized",
                _ => "Error",
            };
            let headers = retry_after
                .map(|s| format!("Retry-After: {s}\r\n"))
                .unwrap_or_default();
            (
                match code {
                    200 => "HTTP/1.1 200 OK",
                    429 => "HTTP/1.1 429 Too Many Requests",
                    500 => "HTTP/1.1 500 Internal Server Error",
                    503 => "HTTP/1.1 503 Service Unavailable",
                    400 => "HTTP/1.1 400 Bad Request",
                    401 => "HTTP/1.1 401 Unauthorized",
                    _ => "HTTP/1.1 500 Internal Server Error",
                },
                headers,
                format!("{{\"error\": {{\"message\": \"{reason}\"}}}}"),
            )
        }
    };

    let response = format!(
        "{status_line}\r\nContent-Type: application/json\r\n{extra_headers}Content-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    );
    let mut stream = reader.into_inner();
    let _ = stream.write_all(response.as_bytes());
    let _ = stream.flush();
    parsed
}

fn completion_json(content: &str, usage: Option<(u64, u64)>) -> String {
    let mut value = serde_json::json!({
        "id": "chatcmpl-stub",
        "object": "chat.completion",
        "choices": [{
            "index": 0,
            "message": {"role": "assistant", "content": content},
            "finish_reason": "stop"
        }]
    });
    if let Some((prompt_tokens, completion_tokens)) = usage {
        value["usage"] = serde_json::json!({
            "prompt_tokens": prompt_tokens,
            "completion_tokens": completion_tokens,
            "total_tokens": prompt_tokens + completion_tokens
        });
    }
    value.to_string()
}
