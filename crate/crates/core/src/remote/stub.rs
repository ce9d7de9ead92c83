//! In-process stub server implementing the remote protocol, for tests and for
//! wiring up the CLI without a real model service.
//!
//! The stub answers `/v1/generate` by echoing each prompt padded with filler
//! words up to `min_tokens`, and `/v1/annotate` with all-"O" labels. Failure
//! behaviors exercise the client's error paths.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;

use tiny_http::{Header, Response, Server};

use super::protocol::*;

/// How the stub responds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StubBehavior {
    /// Contract-conformant responses.
    Ok,
    /// Every request gets this HTTP status with an empty body.
    AlwaysStatus(u16),
    /// `/v1/generate` returns one-word texts, violating `min_tokens`.
    ShortTexts,
    /// `/v1/annotate` drops the last label of every document.
    MismatchedLabels,
    /// 200 with a body that is not JSON.
    Garbage,
}

/// A running stub; shuts down when dropped.
pub struct StubServer {
    endpoint: String,
    requests: Arc<AtomicU64>,
    shutdown: Arc<std::sync::atomic::AtomicBool>,
    handle: Option<JoinHandle<()>>,
    server: Arc<Server>,
}

impl StubServer {
    /// Binds to an ephemeral localhost port and serves until dropped.
    pub fn start(behavior: StubBehavior) -> std::io::Result<StubServer> {
        let server = Arc::new(
            Server::http("127.0.0.1:0").map_err(std::io::Error::other)?,
        );
        let endpoint = format!("http://{}", server.server_addr());
        let requests = Arc::new(AtomicU64::new(0));
        let shutdown = Arc::new(std::sync::atomic::AtomicBool::new(false));

        let srv = Arc::clone(&server);
        let reqs = Arc::clone(&requests);
        let stop = Arc::clone(&shutdown);
        let handle = std::thread::spawn(move || {
            for mut request in srv.incoming_requests() {
                if stop.load(Ordering::SeqCst) {
                    break;
                }
                reqs.fetch_add(1, Ordering::SeqCst);
                let mut body = String::new();
                let _ = request.as_reader().read_to_string(&mut body);
                let url = request.url().to_string();
                let response = respond(behavior, &url, &body);
                let _ = request.respond(response);
            }
        });

        Ok(StubServer {
            endpoint,
            requests,
            shutdown,
            handle: Some(handle),
            server,
        })
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Total requests received so far.
    pub fn request_count(&self) -> u64 {
        self.requests.load(Ordering::SeqCst)
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        self.server.unblock();
        if let Some(handle) = self.handle.take() {
            let _ = handle.join();
        }
    }
}

fn json_response(status: u16, body: String) -> Response<std::io::Cursor<Vec<u8>>> {
    let header = Header::from_bytes("Content-Type", "application/json").expect("static header");
    Response::from_string(body)
        .with_status_code(status)
        .with_header(header)
}

fn respond(behavior: StubBehavior, url: &str, body: &str) -> Response<std::io::Cursor<Vec<u8>>> {
    match behavior {
        StubBehavior::AlwaysStatus(code) => return json_response(code, String::new()),
        StubBehavior::Garbage => return json_response(200, "not json {".to_string()),
        _ => {}
    }
    match url {
        "/v1/generate" => generate(behavior, body),
        "/v1/adapt" => match serde_json::from_str::<AdaptRequest>(body) {
            Ok(_) => json_response(
                200,
                serde_json::to_string(&AdaptResponse {
                    model_id: "stub-adapted-0001".into(),
                })
                .unwrap(),
            ),
            Err(e) => json_response(400, format!("{{\"error\":\"{e}\"}}")),
        },
        "/v1/annotate" => annotate(behavior, body),
        "/v1/train" => match serde_json::from_str::<TrainRequest>(body) {
            Ok(_) => json_response(
                200,
                serde_json::to_string(&TrainResponse {
                    model_id: "stub-ner-0001".into(),
                })
                .unwrap(),
            ),
            Err(e) => json_response(400, format!("{{\"error\":\"{e}\"}}")),
        },
        _ => json_response(404, String::new()),
    }
}

fn generate(behavior: StubBehavior, body: &str) -> Response<std::io::Cursor<Vec<u8>>> {
    let request: GenerateRequest = match serde_json::from_str(body) {
        Ok(r) => r,
        Err(e) => return json_response(400, format!("{{\"error\":\"{e}\"}}")),
    };
    let mut texts = Vec::new();
    for prompt in &request.prompts {
        for sample in 0..request.samples_per_prompt {
            let text = if behavior == StubBehavior::ShortTexts {
                "kort".to_string()
            } else {
                let mut words: Vec<String> =
                    prompt.split_whitespace().map(str::to_string).collect();
                let mut i = 0;
                while words.len() < request.min_tokens.min(request.max_tokens) {
                    words.push(format!("fyll{}", (sample + i) % 7));
                    i += 1;
                }
                words.truncate(request.max_tokens);
                words.join(" ")
            };
            texts.push(text);
        }
    }
    json_response(200, serde_json::to_string(&GenerateResponse { texts }).unwrap())
}

fn annotate(behavior: StubBehavior, body: &str) -> Response<std::io::Cursor<Vec<u8>>> {
    let request: AnnotateRequest = match serde_json::from_str(body) {
        Ok(r) => r,
        Err(e) => return json_response(400, format!("{{\"error\":\"{e}\"}}")),
    };
    let documents = request
        .documents
        .iter()
        .map(|d| {
            let mut n = d.tokens.len();
            if behavior == StubBehavior::MismatchedLabels {
                n = n.saturating_sub(1);
            }
            AnnotateResponseDoc {
                id: d.id.clone(),
                labels: vec!["O".to_string(); n],
            }
        })
        .collect();
    json_response(
        200,
        serde_json::to_string(&AnnotateResponse { documents }).unwrap(),
    )
}
