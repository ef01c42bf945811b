//! Stores graph snapshots and serves them back by id so they can be shared
//! as `#<uuid>` URLs.
//!
//! | method | path | result |
//! |---|---|---|
//! | `POST` | `/api/v1/snapshots` | `201 {"id", "url_fragment"}`, or 400 / 401 / 413 |
//! | `GET` | `/api/v1/snapshots/{id}` | `200` with the stored bytes, or 400 / 404 |
//! | `GET` | `/api/v1/health` | `200 {"status": "ok", "snapshots": n}` |
//!
//! Bodies are checked with [`nodeglass::snapshot::validate`] and stored
//! byte for byte.

mod config;
mod store;

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/sharing.md")]
mod guide {}

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Request, State};
use axum::http::{header, HeaderMap, HeaderValue, Method, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use nodeglass::snapshot::{self, SnapshotError, SnapshotId};
use serde_json::json;
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use config::{ServerConfig, DEFAULT_MAX_SNAPSHOT_BYTES};
pub use store::Store;

#[derive(Debug, Error)]
pub enum ServerError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("storage directory {path}: {source}")]
    Storage { path: String, source: io::Error },
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct AppState {
    store: Store,
    write_token: Option<String>,
}

/// The HTTP routes over an opened store.
pub fn router(config: &ServerConfig, store: Store) -> Router {
    let state = Arc::new(AppState {
        store,
        write_token: config.write_token.clone(),
    });
    Router::new()
        .route("/api/v1/snapshots", post(create_snapshot))
        .route("/api/v1/snapshots/{id}", get(fetch_snapshot))
        .route("/api/v1/health", get(health))
        .layer(DefaultBodyLimit::max(config.max_snapshot_bytes))
        .layer(cors(&config.cors_allowed_origins))
        .with_state(state)
}

fn cors(origins: &[String]) -> CorsLayer {
    let allow = if origins.iter().any(|o| o == "*") {
        AllowOrigin::any()
    } else {
        AllowOrigin::list(origins.iter().filter_map(|o| HeaderValue::from_str(o).ok()))
    };
    CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE, header::AUTHORIZATION])
}

/// A server accepting connections in the background.
pub struct RunningServer {
    addr: SocketAddr,
    shutdown: oneshot::Sender<()>,
    task: JoinHandle<io::Result<()>>,
}

impl RunningServer {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// `http://<addr>`
    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stop accepting, finish in-flight requests, and wait.
    pub async fn stop(self) -> io::Result<()> {
        let _ = self.shutdown.send(());
        self.task.await.map_err(io::Error::other)?
    }
}

/// Open the store, bind, and serve on the current runtime. Port 0 picks a
/// free port; see [`RunningServer::local_addr`].
pub async fn start(config: ServerConfig) -> Result<RunningServer, ServerError> {
    let (tx, rx) = oneshot::channel();
    let (listener, app) = prepare(&config).await?;
    let addr = listener.local_addr()?;
    let task = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await
    });
    Ok(RunningServer {
        addr,
        shutdown: tx,
        task,
    })
}

/// Serve until `shutdown` resolves, writing one line per request to
/// stderr. `on_ready` gets the bound address.
pub async fn run<F>(
    config: ServerConfig,
    shutdown: F,
    on_ready: impl FnOnce(SocketAddr),
) -> Result<(), ServerError>
where
    F: Future<Output = ()> + Send + 'static,
{
    let (listener, app) = prepare(&config).await?;
    let app = app.layer(middleware::from_fn(log_request));
    on_ready(listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}

async fn prepare(config: &ServerConfig) -> Result<(TcpListener, Router), ServerError> {
    config.validate()?;
    let store = Store::open(&config.storage_dir).map_err(|source| ServerError::Storage {
        path: config.storage_dir.display().to_string(),
        source,
    })?;
    let listener = TcpListener::bind(config.bind_address)
        .await
        .map_err(|source| ServerError::Bind {
            addr: config.bind_address,
            source,
        })?;
    Ok((listener, router(config, store)))
}

async fn log_request(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_owned();
    let started = Instant::now();
    let response = next.run(request).await;
    eprintln!(
        "{method} {path} {} {:.1}ms",
        response.status().as_u16(),
        started.elapsed().as_secs_f64() * 1e3
    );
    response
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

fn authorized(headers: &HeaderMap, token: &str) -> bool {
    let Some(given) = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
    else {
        return false;
    };
    // Length leaks, content does not.
    given.len() == token.len()
        && given
            .bytes()
            .zip(token.bytes())
            .fold(0u8, |acc, (a, b)| acc | (a ^ b))
            == 0
}

fn describe(e: &SnapshotError) -> serde_json::Value {
    match e {
        SnapshotError::Json { line, column, .. } => {
            json!({"kind": "json", "line": line, "column": column, "message": e.to_string()})
        }
        SnapshotError::Schema { path, reason } => {
            json!({"kind": "schema", "path": path, "message": reason})
        }
        SnapshotError::UnsupportedVersion(v) => {
            json!({"kind": "unsupported_version", "version": v, "message": e.to_string()})
        }
        SnapshotError::DanglingReference { path, .. } => {
            json!({"kind": "dangling_reference", "path": path, "message": e.to_string()})
        }
        SnapshotError::InconsistentView(_) => json!({"kind": "inconsistent_view", "message": e.to_string()}),
    }
}

async fn create_snapshot(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Bytes,
) -> Response {
    if let Some(token) = &state.write_token {
        if !authorized(&headers, token) {
            let mut r = error(StatusCode::UNAUTHORIZED, "missing or wrong bearer token");
            r.headers_mut()
                .insert(header::WWW_AUTHENTICATE, HeaderValue::from_static("Bearer"));
            return r;
        }
    }
    if let Err(errors) = snapshot::validate(&body) {
        let list: Vec<_> = errors.iter().map(describe).collect();
        return (StatusCode::BAD_REQUEST, Json(json!({ "errors": list }))).into_response();
    }
    let store = state.store.clone();
    match tokio::task::spawn_blocking(move || store.put(&body)).await {
        Ok(Ok(id)) => (
            StatusCode::CREATED,
            [(header::LOCATION, format!("/api/v1/snapshots/{id}"))],
            Json(json!({ "id": id.to_string(), "url_fragment": id.url_fragment() })),
        )
            .into_response(),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("storage: {e}")),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn fetch_snapshot(State(state): State<Arc<AppState>>, Path(raw): Path<String>) -> Response {
    let Ok(id) = raw.parse::<SnapshotId>() else {
        return error(StatusCode::BAD_REQUEST, format!("`{raw}` is not a snapshot id"));
    };
    let store = state.store.clone();
    match tokio::task::spawn_blocking(move || store.get(&id)).await {
        Ok(Ok(Some(bytes))) => (
            [
                (header::CONTENT_TYPE, "application/json"),
                (header::CACHE_CONTROL, "public, max-age=31536000, immutable"),
            ],
            bytes,
        )
            .into_response(),
        Ok(Ok(None)) => error(StatusCode::NOT_FOUND, format!("no snapshot {id}")),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("storage: {e}")),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Response {
    let store = state.store.clone();
    match tokio::task::spawn_blocking(move || store.count()).await {
        Ok(Ok(n)) => Json(json!({ "status": "ok", "snapshots": n })).into_response(),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, format!("storage: {e}")),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bearer_check() {
        let mut h = HeaderMap::new();
        assert!(!authorized(&h, "tok"));
        h.insert(header::AUTHORIZATION, HeaderValue::from_static("Bearer tok"));
        assert!(authorized(&h, "tok"));
        assert!(!authorized(&h, "tok2"));
        assert!(!authorized(&h, "tak"));
        h.insert(header::AUTHORIZATION, HeaderValue::from_static("Basic tok"));
        assert!(!authorized(&h, "tok"));
    }
}
