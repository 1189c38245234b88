//! RemoteBackend against a scripted local HTTP server.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use repolens::llm::{Gateway, LlmError, ModelParams, RemoteBackend, RequestKind, RetryPolicy};

struct Server {
    base_url: String,
    requests: Arc<Mutex<Vec<(String, String)>>>,
}

/// Serves one scripted `(status, body)` per connection, then stops.
fn serve(script: Vec<(u16, &'static str)>) -> Server {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base_url = format!("http://{}/v1", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let seen = Arc::clone(&requests);
    std::thread::spawn(move || {
        for (status, body) in script {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream);
            let mut head = String::new();
            let mut len = 0usize;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                head.push_str(&line);
            }
            let mut payload = vec![0; len];
            reader.read_exact(&mut payload).unwrap();
            seen.lock().unwrap().push((head, String::from_utf8(payload).unwrap()));
            let mut stream = reader.into_inner();
            let reply = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            stream.write_all(reply.as_bytes()).unwrap();
        }
    });
    Server { base_url, requests }
}

fn fast_retry(max_retries: u32) -> RetryPolicy {
    RetryPolicy {
        max_retries,
        initial_backoff: Duration::from_millis(1),
        max_backoff: Duration::from_millis(5),
        multiplier: 2.0,
    }
}

fn request() -> repolens::llm::ChatRequest {
    ModelParams {
        model_id: "gpt-4.1".into(),
        max_output_tokens: 64,
        temperature: 0.0,
    }
    .request(
        "system text".into(),
        "user text".into(),
        RequestKind::Summarize {
            source: "x".into(),
            seed: None,
        },
    )
}

const OK: &str = r#"{"choices":[{"message":{"role":"assistant","content":"A summary."}}],"usage":{"prompt_tokens":42,"completion_tokens":7}}"#;

#[test]
fn success_reads_usage_and_sends_openai_shape() {
    let server = serve(vec![(200, OK)]);
    let backend = RemoteBackend::new(&server.base_url, "secret", Duration::from_secs(5)).unwrap();
    let gw = Gateway::new(backend).with_retry(fast_retry(0));
    let resp = gw.complete(&request()).unwrap();
    assert_eq!(resp.text, "A summary.");
    assert_eq!((resp.prompt_tokens, resp.completion_tokens), (42, 7));

    let reqs = server.requests.lock().unwrap();
    let (head, body) = &reqs[0];
    assert!(head.starts_with("POST /v1/chat/completions"));
    assert!(head.to_ascii_lowercase().contains("authorization: bearer secret"));
    let body: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(body["model"], "gpt-4.1");
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["content"], "user text");
    assert_eq!(body["max_tokens"], 64);
}

#[test]
fn missing_usage_falls_back_to_estimates() {
    let server = serve(vec![(200, r#"{"choices":[{"message":{"content":"abcdefgh"}}]}"#)]);
    let gw = Gateway::new(RemoteBackend::new(&server.base_url, "k", Duration::from_secs(5)).unwrap());
    let req = request();
    let resp = gw.complete(&req).unwrap();
    assert_eq!(resp.completion_tokens, 2);
    assert_eq!(resp.prompt_tokens, req.prompt_estimate());
}

#[test]
fn auth_failure_is_not_retried() {
    let server = serve(vec![(401, r#"{"error":"bad key"}"#), (200, OK)]);
    let gw = Gateway::new(RemoteBackend::new(&server.base_url, "k", Duration::from_secs(5)).unwrap())
        .with_retry(fast_retry(3));
    assert!(matches!(gw.complete(&request()), Err(LlmError::Auth(_))));
    assert_eq!(server.requests.lock().unwrap().len(), 1);
}

#[test]
fn rate_limit_and_server_errors_are_retried() {
    let server = serve(vec![(429, "{}"), (503, "{}"), (200, OK)]);
    let gw = Gateway::new(RemoteBackend::new(&server.base_url, "k", Duration::from_secs(5)).unwrap())
        .with_retry(fast_retry(3));
    assert_eq!(gw.complete(&request()).unwrap().text, "A summary.");
    assert_eq!(server.requests.lock().unwrap().len(), 3);
    assert_eq!(gw.call_count(), 1);
}

#[test]
fn persistent_rate_limit_is_exhausted() {
    let server = serve(vec![(429, "{}"), (429, "{}"), (429, "{}")]);
    let gw = Gateway::new(RemoteBackend::new(&server.base_url, "k", Duration::from_secs(5)).unwrap())
        .with_retry(fast_retry(2));
    assert!(matches!(gw.complete(&request()), Err(LlmError::RateLimitExhausted { attempts: 3 })));
}

#[test]
fn client_errors_and_bad_bodies() {
    let server = serve(vec![(400, "nope"), (200, "not json")]);
    let gw = Gateway::new(RemoteBackend::new(&server.base_url, "k", Duration::from_secs(5)).unwrap())
        .with_retry(fast_retry(3));
    assert!(matches!(gw.complete(&request()), Err(LlmError::Http { status: 400, .. })));
    assert!(matches!(gw.complete(&request()), Err(LlmError::Malformed(_))));
}

#[test]
fn empty_configuration_is_rejected() {
    assert!(matches!(RemoteBackend::new("", "k", Duration::from_secs(1)), Err(LlmError::Config(_))));
    assert!(matches!(RemoteBackend::new("http://x", "", Duration::from_secs(1)), Err(LlmError::Config(_))));
}
