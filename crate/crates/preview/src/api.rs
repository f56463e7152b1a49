//! JSON endpoints. Every handler is a pure function of its request body.

use std::collections::BTreeMap;

use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use hibit_core::{
    decode_normals, decode_png, encode_png, generate, peek_png_dimensions, shade, LightConfig,
    Method, MethodParams, RasterImage,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Largest accepted width or height.
pub const MAX_SIDE: u32 = 1024;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<hibit_core::Error> for ApiError {
    fn from(e: hibit_core::Error) -> Self {
        Self::bad_request(e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateRequest {
    pub method: String,
    pub images: Vec<String>,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub normal_map: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightRequest {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    #[serde(default = "default_ambient")]
    pub ambient: f64,
}

fn default_ambient() -> f64 {
    0.2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelightRequest {
    pub sprite: String,
    pub normal_map: String,
    pub light: LightRequest,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RelightResponse {
    pub frame: String,
}

/// Decodes a base64 PNG payload. A leading `data:...;base64,` prefix is
/// accepted so browser data URLs can be posted as-is.
pub fn decode_image(field: &str, payload: &str) -> Result<RasterImage, ApiError> {
    let data = payload.split_once(";base64,").map_or(payload, |(_, d)| d);
    let bytes = STANDARD
        .decode(data.trim())
        .map_err(|e| ApiError::bad_request(format!("{field}: invalid base64: {e}")))?;
    let (w, h) =
        peek_png_dimensions(&bytes).map_err(|e| ApiError::bad_request(format!("{field}: {e}")))?;
    if w > MAX_SIDE || h > MAX_SIDE {
        return Err(ApiError {
            status: StatusCode::PAYLOAD_TOO_LARGE,
            message: format!("{field}: {w}x{h} exceeds the {MAX_SIDE}x{MAX_SIDE} limit"),
        });
    }
    decode_png(&bytes).map_err(|e| ApiError::bad_request(format!("{field}: {e}")))
}

fn encode_image(img: &RasterImage) -> Result<String, ApiError> {
    let bytes = encode_png(img).map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })?;
    Ok(STANDARD.encode(bytes))
}

fn numeric_params(
    method: Method,
    raw: &BTreeMap<String, Value>,
) -> Result<BTreeMap<String, f64>, ApiError> {
    raw.iter()
        .map(|(key, value)| {
            let v = match (key.as_str(), value) {
                (_, Value::Number(n)) => n.as_f64(),
                ("mode", Value::String(s)) if method == Method::FourAngle => match s.as_str() {
                    "difference" => Some(0.0),
                    "overlay" => Some(1.0),
                    _ => None,
                },
                _ => None,
            };
            v.map(|v| (key.clone(), v))
                .ok_or_else(|| ApiError::bad_request(format!("parameter '{key}' must be a number")))
        })
        .collect()
}

pub fn run_generate(req: GenerateRequest) -> Result<GenerateResponse, ApiError> {
    let method: Method = req.method.parse()?;
    if req.images.len() != method.image_count() {
        return Err(ApiError::bad_request(format!(
            "{method} takes {} image(s), got {}",
            method.image_count(),
            req.images.len()
        )));
    }
    let params = MethodParams::from_map(method, &numeric_params(method, &req.params)?)?;
    let images = req
        .images
        .iter()
        .enumerate()
        .map(|(i, payload)| decode_image(&format!("images[{i}]"), payload))
        .collect::<Result<Vec<_>, _>>()?;
    let map = generate(&params, &images)?;
    Ok(GenerateResponse {
        normal_map: encode_image(&map)?,
    })
}

pub fn run_relight(req: RelightRequest) -> Result<RelightResponse, ApiError> {
    let sprite = decode_image("sprite", &req.sprite)?;
    let normals = decode_normals(&decode_image("normal_map", &req.normal_map)?);
    let light = LightConfig::white([req.light.x, req.light.y, req.light.z], req.light.ambient);
    let frame = shade(&sprite, &normals, &light)?;
    Ok(RelightResponse {
        frame: encode_image(&frame)?,
    })
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
    })?
}

pub async fn generate_handler(
    body: Result<Json<GenerateRequest>, JsonRejection>,
) -> Result<Json<GenerateResponse>, ApiError> {
    let Json(req) = body?;
    blocking(move || run_generate(req)).await.map(Json)
}

pub async fn relight_handler(
    body: Result<Json<RelightRequest>, JsonRejection>,
) -> Result<Json<RelightResponse>, ApiError> {
    let Json(req) = body?;
    blocking(move || run_relight(req)).await.map(Json)
}

/// Methods with their parameter defaults and slider ranges.
pub async fn methods_handler() -> Json<Value> {
    let methods: Vec<Value> = Method::ALL
        .into_iter()
        .map(|m| {
            let params: Vec<Value> = m
                .param_specs()
                .into_iter()
                .map(|p| {
                    json!({
                        "key": p.key,
                        "default": p.default,
                        "min": p.min,
                        "max": p.max,
                        "integer": p.integer,
                    })
                })
                .collect();
            json!({ "name": m.name(), "images": m.image_count(), "params": params })
        })
        .collect();
    Json(json!({ "methods": methods, "max_side": MAX_SIDE }))
}
