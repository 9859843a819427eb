//! HTTP API for interactive exploration of a parametric family: upload an
//! image, move the parameters, watch approximation passes converge, and ask
//! for the exact per-pixel result when done.
//!
//! | route | |
//! |---|---|
//! | `POST /sessions` | create from `{image, family, params, preview_size?}` |
//! | `POST /sessions/{id}/params` | `{params, passes?, finalize?}` |
//! | `GET /sessions/{id}/preview.png` | current output, with `ETag` |
//! | `DELETE /sessions/{id}` | |
//! | `GET /families` | families and parameter ranges |
//!
//! `image` is base64 of a binary PPM or PNG file.

mod error;
mod image;
mod session;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine as _;
use fractx_core::raster::ApproxState;
use fractx_core::{parse_config, EngineOptions, Error as CoreError, FamilyParams, Sampling};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::services::ServeDir;

pub use error::ApiError;
pub use image::{decode as decode_image, encode_png};
use session::{Preview, Session, Store, Work};

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Directory served under `/`; none disables static hosting.
    pub root: Option<PathBuf>,
    pub idle_timeout: Duration,
    /// Largest accepted request body.
    pub max_body_bytes: usize,
    /// Largest accepted upload, in pixels.
    pub max_pixels: usize,
    pub max_preview_size: usize,
    /// Largest number of passes a single update may ask for.
    pub max_passes: usize,
    pub workers: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            root: None,
            idle_timeout: Duration::from_secs(30 * 60),
            max_body_bytes: 32 << 20,
            max_pixels: 2048 * 2048,
            max_preview_size: 1024,
            max_passes: 256,
            workers: 1,
        }
    }
}

struct AppState {
    config: ServiceConfig,
    store: Store,
}

type Shared = Arc<AppState>;

pub fn router(config: ServiceConfig) -> Router {
    let limit = config.max_body_bytes;
    let root = config.root.clone();
    let state = Arc::new(AppState {
        store: Store::new(config.idle_timeout),
        config,
    });
    let api = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/params", post(update_params))
        .route("/sessions/{id}/preview.png", get(get_preview))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/families", get(families))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state);
    match root {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Binds `addr` and serves until the process ends.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

fn parse_body<T: serde::de::DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let mut de = serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        ApiError::bad_request(path, e.into_inner().to_string())
    })
}

/// Reads `params` as a member of `family`, reporting bad fields as
/// `params.<field>`.
fn family_params(family: &str, params: &Value) -> Result<FamilyParams, ApiError> {
    let Value::Object(fields) = params else {
        return Err(ApiError::bad_request("params", "expected an object"));
    };
    let mut doc = fields.clone();
    doc.insert("family".into(), Value::String(family.into()));
    let parsed = parse_config(&Value::Object(doc).to_string()).map_err(|e| match e {
        CoreError::Config { path, message } if path == "family" => ApiError::bad_request("family", message),
        CoreError::Config { path, message } => ApiError::bad_request(format!("params.{path}"), message),
        e => ApiError::bad_request("params", e.to_string()),
    })?;
    let fractx_core::io::SystemSpec::Family(p) = parsed.system else {
        unreachable!("a family document parses to a family");
    };
    if p.dimension() != 2 {
        return Err(ApiError::bad_request(
            "family",
            format!("{} is three-dimensional; interactive previews are planar only", p.name()),
        ));
    }
    p.build().map_err(|e| match e {
        CoreError::InvalidParameter { name, .. } => ApiError::bad_request(format!("params.{name}"), e.to_string()),
        e => ApiError::bad_request("params", e.to_string()),
    })?;
    Ok(p)
}

fn planar(p: &FamilyParams) -> Result<fractx_core::IfsSystem<2>, ApiError> {
    p.build()
        .and_then(|s| s.planar().cloned())
        .map_err(|e| ApiError::bad_request("params", e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateRequest {
    image: String,
    family: String,
    params: Value,
    #[serde(default)]
    preview_size: Option<usize>,
}

#[derive(Serialize)]
struct SessionInfo {
    id: String,
    family: &'static str,
    params: FamilyParams,
    width: usize,
    height: usize,
    passes: usize,
    preview_url: String,
}

async fn create_session(State(app): State<Shared>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let params = family_params(&req.family, &req.params)?;
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(req.image.as_bytes())
        .map_err(|e| ApiError::bad_request("image", format!("not base64: {e}")))?;
    let cap = app.config.max_pixels;
    if let Some((w, h)) = image::dimensions(&bytes) {
        if w.saturating_mul(h) > cap {
            return Err(ApiError::new(
                StatusCode::PAYLOAD_TOO_LARGE,
                format!("{w}x{h} image exceeds the {cap}-pixel limit"),
            ));
        }
    }
    let mut img = image::decode(&bytes).map_err(|e| ApiError::bad_request("image", e))?;
    if let Some(size) = req.preview_size {
        if size == 0 || size > app.config.max_preview_size {
            return Err(ApiError::bad_request(
                "preview_size",
                format!("must be in 1..={}", app.config.max_preview_size),
            ));
        }
        img = image::resize(&img, size);
    }
    let reference = planar(&params.reference())?;
    let (width, height) = (img.width(), img.height());
    let session = Session::new(Work {
        approx: ApproxState::identity(img),
        reference,
        params: params.clone(),
    });
    let family = session.family;
    let id = app.store.insert(session);
    let info = SessionInfo {
        preview_url: format!("/sessions/{id}/preview.png"),
        id,
        family,
        params,
        width,
        height,
        passes: 0,
    };
    Ok((StatusCode::CREATED, Json(info)).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UpdateRequest {
    params: Value,
    #[serde(default = "one")]
    passes: usize,
    #[serde(default)]
    finalize: bool,
}

fn one() -> usize {
    1
}

#[derive(Serialize)]
struct UpdateInfo {
    passes: usize,
    /// Fraction of pixels changed by the last pass (or by the finalize).
    changed_fraction: f64,
    escaped: usize,
    finalized: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    code_length: Option<usize>,
    preview_url: String,
}

async fn update_params(
    State(app): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<UpdateInfo>, ApiError> {
    let session = app.store.get(&id).ok_or_else(ApiError::not_found)?;
    let req: UpdateRequest = parse_body(&body)?;
    if req.passes == 0 || req.passes > app.config.max_passes {
        return Err(ApiError::bad_request(
            "passes",
            format!("must be in 1..={}", app.config.max_passes),
        ));
    }
    let params = family_params(session.family, &req.params)?;
    let src = planar(&params)?;
    let mut work = session.work.clone().try_lock_owned().map_err(|_| {
        ApiError::new(StatusCode::CONFLICT, "an update for this session is already running")
    })?;
    let workers = app.config.workers;
    let worker_session = session.clone();
    let info = tokio::task::spawn_blocking(move || -> Result<UpdateInfo, ApiError> {
        let w = &mut *work;
        w.params = params;
        let pixels = w.approx.output().len();
        let (changed_fraction, escaped, code_length) = if req.finalize {
            let opts = EngineOptions::default().with_workers(workers);
            let (iw, ih) = (w.approx.source().width(), w.approx.source().height());
            let resolved = opts
                .resolve(&w.reference, &src, &[iw, ih])
                .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
            let exact = ApproxState::exact(w.approx.source().clone(), &w.reference, &src, &opts)
                .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
            let before = w.approx.output().as_bytes();
            let after = exact.output().as_bytes();
            let changed = before
                .chunks_exact(3)
                .zip(after.chunks_exact(3))
                .filter(|(a, b)| a != b)
                .count();
            let escaped = exact
                .output()
                .as_bytes()
                .chunks_exact(3)
                .filter(|p| *p == fractx_core::raster::SENTINEL)
                .count();
            w.approx = exact;
            (changed as f64 / pixels.max(1) as f64, escaped, Some(resolved.code_length))
        } else {
            let mut last = Default::default();
            for _ in 0..req.passes {
                last = w
                    .approx
                    .step(&w.reference, &src, workers, Sampling::Nearest)
                    .map_err(|e| ApiError::internal(e.to_string()))?;
            }
            (last.changed_fraction(), last.escaped, None)
        };
        worker_session.set_preview(Preview::of(w.approx.output()));
        Ok(UpdateInfo {
            passes: w.approx.passes(),
            changed_fraction,
            escaped,
            finalized: req.finalize,
            code_length,
            preview_url: String::new(),
        })
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(UpdateInfo {
        preview_url: format!("/sessions/{id}/preview.png"),
        ..info
    }))
}

async fn get_preview(
    State(app): State<Shared>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let session = app.store.get(&id).ok_or_else(ApiError::not_found)?;
    let preview = session.preview();
    let cache = [
        (header::ETAG, preview.etag.clone()),
        (header::CACHE_CONTROL, "no-cache".to_string()),
    ];
    let matches = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == preview.etag || t.trim() == "*"));
    if matches {
        return Ok((StatusCode::NOT_MODIFIED, cache).into_response());
    }
    Ok((
        StatusCode::OK,
        [(header::CONTENT_TYPE, "image/png".to_string())],
        cache,
        preview.png.clone(),
    )
        .into_response())
}

async fn delete_session(State(app): State<Shared>, Path(id): Path<String>) -> StatusCode {
    if app.store.remove(&id) {
        StatusCode::NO_CONTENT
    } else {
        StatusCode::NOT_FOUND
    }
}

async fn families() -> Json<Value> {
    Json(json!([
        {
            "name": "quad2d",
            "dimension": 2,
            "maps": 4,
            "params": [
                {"name": "a", "min": 0.0, "max": 1.0, "exclusive": true},
                {"name": "b", "min": 0.0, "max": 1.0, "exclusive": true}
            ],
            "reference": FamilyParams::Quad2d { a: 0.5, b: 0.5 },
            "interactive": true
        },
        {
            "name": "corner3d",
            "dimension": 3,
            "maps": 8,
            "params": [
                {"name": "s", "length": 3, "min": 0.0, "max": 1.0, "exclusive": true}
            ],
            "reference": FamilyParams::Corner3d { s: [0.5; 3] },
            "interactive": false
        },
        {
            "name": "strip2d",
            "dimension": 2,
            "maps": 4,
            "params": [
                {"name": "w", "min": 0.5, "max": 1.0, "exclusive": true},
                {"name": "t", "min": "1 - w", "max": "w", "exclusive": false}
            ],
            "reference": {"family": "strip2d", "t": 0.5},
            "interactive": true
        }
    ]))
}
