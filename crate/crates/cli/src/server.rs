//! HTTP facade over [`Engine`]: `POST /v1/query`, `GET /v1/health`,
//! `GET /v1/skills`.

use std::future::Future;
use std::net::SocketAddr;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use helpsys_core::pipeline::{Engine, QueryRequest};
use helpsys_core::Error;
use serde_json::json;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub const MAX_BODY_BYTES: usize = 8 * 1024;

/// The engine slot starts empty and is filled once loading finishes.
#[derive(Clone, Default)]
pub struct AppState {
    engine: Arc<OnceLock<Engine>>,
}

impl AppState {
    pub fn loaded(engine: Engine) -> Self {
        let state = AppState::default();
        state.install(engine);
        state
    }

    /// Makes `engine` visible to handlers. Later calls are ignored.
    pub fn install(&self, engine: Engine) {
        let _ = self.engine.set(engine);
    }

    fn engine(&self) -> Result<&Engine, Response> {
        self.engine.get().ok_or_else(|| error(StatusCode::SERVICE_UNAVAILABLE, "model and index are still loading"))
    }
}

fn error(status: StatusCode, message: &str) -> Response {
    (status, Json(json!({ "error": message }))).into_response()
}

async fn query(State(state): State<AppState>, body: Bytes) -> Response {
    let engine = match state.engine() {
        Ok(e) => e,
        Err(r) => return r,
    };
    let req: QueryRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, &format!("malformed request: {e}")),
    };
    match engine.query(&req) {
        Ok(resp) => Json(resp).into_response(),
        Err(Error::InvalidRequest(msg)) => error(StatusCode::BAD_REQUEST, &msg),
        Err(_) => error(StatusCode::INTERNAL_SERVER_ERROR, "internal error"),
    }
}

async fn health(State(state): State<AppState>) -> Response {
    match state.engine() {
        Ok(e) => Json(e.health()).into_response(),
        Err(r) => r,
    }
}

async fn skills(State(state): State<AppState>) -> Response {
    match state.engine() {
        Ok(e) => Json(e.skills()).into_response(),
        Err(r) => r,
    }
}

pub fn router(state: AppState, cors_origins: &[String]) -> anyhow::Result<Router> {
    let mut app = Router::new()
        .route("/v1/query", post(query))
        .route("/v1/health", get(health))
        .route("/v1/skills", get(skills))
        .layer(DefaultBodyLimit::max(MAX_BODY_BYTES))
        .with_state(state);
    if !cors_origins.is_empty() {
        let origins = cors_origins
            .iter()
            .map(|o| HeaderValue::from_str(o))
            .collect::<Result<Vec<_>, _>>()?;
        app = app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::list(origins))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([axum::http::header::CONTENT_TYPE]),
        );
    }
    Ok(app)
}

/// Binds `addr`, loads the engine on a blocking thread while already
/// answering health checks with 503, and serves until `shutdown` resolves.
/// In-flight requests are drained before returning.
pub async fn serve<L>(
    addr: SocketAddr,
    cors_origins: &[String],
    load: L,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> anyhow::Result<()>
where
    L: FnOnce() -> anyhow::Result<Engine> + Send + 'static,
{
    let state = AppState::default();
    let app = router(state.clone(), cors_origins)?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let loader = tokio::task::spawn_blocking(load);
    let server = axum::serve(listener, app).with_graceful_shutdown(shutdown);
    let server = tokio::spawn(async move { server.await });
    let engine = loader.await??;
    eprintln!("loaded {} model, {} indexed queries", engine.model.kind, engine.index.len());
    state.install(engine);
    server.await??;
    Ok(())
}

pub async fn ctrl_c() {
    let _ = tokio::signal::ctrl_c().await;
}
