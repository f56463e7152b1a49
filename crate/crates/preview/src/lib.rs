//! Local preview server: static UI assets plus stateless generation and
//! relighting endpoints.
//!
//! | route              | body                                              |
//! |--------------------|---------------------------------------------------|
//! | `GET /`            | UI assets from the asset directory                |
//! | `GET /api/methods` | methods, parameter defaults and ranges            |
//! | `POST /api/generate` | `{method, images: [b64 png], params}` → `{normal_map}` |
//! | `POST /api/relight`  | `{sprite, normal_map, light: {x, y, z, ambient}}` → `{frame}` |
//!
//! Errors are `{"error": message}` with status 400, or 413 for images wider
//! or taller than [`api::MAX_SIDE`].

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, StatusCode, Uri};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;

pub mod api;

pub const DEFAULT_PORT: u16 = 7878;

/// Four 1024×1024 RGBA PNGs, base64-inflated, fit comfortably.
const BODY_LIMIT: usize = 64 * 1024 * 1024;

const PLACEHOLDER: &str = "<!doctype html><title>hibit preview</title>\
<p>No UI assets found. Start the server with <code>--assets DIR</code> pointing at the built web UI; \
the JSON API is available under <code>/api/</code>.</p>";

pub fn router(asset_dir: impl Into<PathBuf>) -> Router {
    Router::new()
        .route("/api/methods", get(api::methods_handler))
        .route("/api/generate", post(api::generate_handler))
        .route("/api/relight", post(api::relight_handler))
        .fallback(get(static_asset))
        .with_state(Arc::new(asset_dir.into()))
        .layer(DefaultBodyLimit::max(BODY_LIMIT))
}

/// Serves until the process is interrupted.
pub async fn serve(port: u16, asset_dir: impl Into<PathBuf>) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(asset_dir)).await
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript; charset=utf-8",
        Some("css") => "text/css; charset=utf-8",
        Some("json" | "map") => "application/json",
        Some("png") => "image/png",
        Some("svg") => "image/svg+xml",
        Some("wasm") => "application/wasm",
        _ => "application/octet-stream",
    }
}

async fn static_asset(State(root): State<Arc<PathBuf>>, uri: Uri) -> Response {
    let rel = uri.path().trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    let rel_path = Path::new(rel);
    if rel_path
        .components()
        .any(|c| !matches!(c, Component::Normal(_)))
    {
        return StatusCode::NOT_FOUND.into_response();
    }
    let path = root.join(rel_path);
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) if rel == "index.html" => Html(PLACEHOLDER).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}
