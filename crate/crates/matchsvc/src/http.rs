//! HTTP/JSON API over [`MatchService`].
//!
//! Authenticated routes take `Authorization: Bearer <token>` with a token from
//! `POST /auth/login`. Tokens are 32 random bytes in hex, held in memory only
//! and valid for the configured session lifetime (24 hours by default); a
//! restart invalidates them. Errors are `{"error": <code>, "message": <text>}`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use collabrec_core::corpus::ProfileId;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::trace::{DefaultOnResponse, TraceLayer};

use crate::clock::Timestamp;
use crate::model::{Direction, MatchId};
use crate::service::{ErrorKind, MatchService, NewProfile, ServiceError};

pub type AppState = Arc<MatchService>;

/// An error response.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self { status: StatusCode::BAD_REQUEST, code: "bad_request", message: message.into() }
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let status = match e.kind() {
            ErrorKind::Validation => StatusCode::BAD_REQUEST,
            ErrorKind::Unauthorized => StatusCode::UNAUTHORIZED,
            ErrorKind::Forbidden => StatusCode::FORBIDDEN,
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Conflict => StatusCode::CONFLICT,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            tracing::error!(error = %e, "request failed");
            return Self { status, code: e.code(), message: "internal error".into() };
        }
        Self { status, code: e.code(), message: e.to_string() }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.code, "message": self.message }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn parse_query<T>(q: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    q.map(|Query(v)| v).map_err(|e| ApiError::bad_request(e.body_text()))
}

/// Runs a service call off the async executor.
async fn blocking<T, F>(service: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&MatchService) -> Result<T, ServiceError> + Send + 'static,
{
    let service = service.clone();
    tokio::task::spawn_blocking(move || f(&service))
        .await
        .map_err(|e| ApiError { status: StatusCode::INTERNAL_SERVER_ERROR, code: "internal", message: e.to_string() })?
        .map_err(ApiError::from)
}

/// The authenticated caller.
pub struct AuthUser(pub ProfileId);

impl FromRequestParts<AppState> for AuthUser {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .map(str::trim)
            .ok_or(ServiceError::Unauthenticated)?;
        Ok(AuthUser(state.authenticate(token)?))
    }
}

#[derive(Deserialize)]
struct RegisterRequest {
    #[serde(flatten)]
    profile: NewProfile,
    password: String,
}

#[derive(Deserialize)]
struct LoginRequest {
    email: String,
    password: String,
}

#[derive(Serialize)]
struct LoginResponse {
    token: String,
    token_type: &'static str,
    profile_id: ProfileId,
    expires_at: Timestamp,
}

#[derive(Deserialize)]
struct FeedParams {
    k: Option<usize>,
}

#[derive(Deserialize)]
struct SwipeRequest {
    target: ProfileId,
    direction: Direction,
}

#[derive(Deserialize)]
struct MessageRequest {
    text: String,
}

#[derive(Deserialize)]
struct SinceParams {
    since: Option<i64>,
}

#[derive(Deserialize)]
struct RateRequest {
    target: ProfileId,
    score: i64,
}

pub fn router(service: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/profiles", post(register))
        .route("/auth/login", post(login))
        .route("/feed", get(feed))
        .route("/swipes", post(swipe))
        .route("/matches", get(matches))
        .route("/matches/{id}/messages", post(send_message).get(messages))
        .route("/ratings", post(rate))
        .layer(TraceLayer::new_for_http().on_response(DefaultOnResponse::new().level(tracing::Level::INFO)))
        .with_state(service)
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({ "status": "ok" }))
}

async fn register(State(s): State<AppState>, body: Bytes) -> ApiResult<impl IntoResponse> {
    let req: RegisterRequest = parse_body(&body)?;
    let account = blocking(&s, move |s| s.register(req.profile, &req.password)).await?;
    Ok((StatusCode::CREATED, Json(json!({ "id": account.profile_id }))))
}

async fn login(State(s): State<AppState>, body: Bytes) -> ApiResult<Json<LoginResponse>> {
    let req: LoginRequest = parse_body(&body)?;
    let session = blocking(&s, move |s| s.login(&req.email, &req.password)).await?;
    Ok(Json(LoginResponse {
        token: session.token,
        token_type: "Bearer",
        profile_id: session.profile_id,
        expires_at: session.expires_at,
    }))
}

async fn feed(
    State(s): State<AppState>,
    AuthUser(viewer): AuthUser,
    q: Result<Query<FeedParams>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let k = parse_query(q)?.k.unwrap_or(collabrec_core::recommender::DEFAULT_K);
    Ok(Json(blocking(&s, move |s| s.feed(&viewer, k)).await?))
}

async fn swipe(State(s): State<AppState>, AuthUser(actor): AuthUser, body: Bytes) -> ApiResult<impl IntoResponse> {
    let req: SwipeRequest = parse_body(&body)?;
    let record = blocking(&s, move |s| s.swipe(&actor, &req.target, req.direction)).await?;
    Ok(Json(json!({ "matched": record.matched, "match_id": record.id })))
}

async fn matches(State(s): State<AppState>, AuthUser(viewer): AuthUser) -> ApiResult<impl IntoResponse> {
    Ok(Json(blocking(&s, move |s| s.matches(&viewer)).await?))
}

async fn send_message(
    State(s): State<AppState>,
    AuthUser(sender): AuthUser,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: MessageRequest = parse_body(&body)?;
    let message = blocking(&s, move |s| s.send_message(&sender, &MatchId(id), &req.text)).await?;
    Ok((StatusCode::CREATED, Json(message)))
}

async fn messages(
    State(s): State<AppState>,
    AuthUser(viewer): AuthUser,
    Path(id): Path<String>,
    q: Result<Query<SinceParams>, QueryRejection>,
) -> ApiResult<impl IntoResponse> {
    let since = parse_query(q)?.since.map(Timestamp);
    Ok(Json(blocking(&s, move |s| s.messages(&viewer, &MatchId(id), since)).await?))
}

async fn rate(State(s): State<AppState>, AuthUser(rater): AuthUser, body: Bytes) -> ApiResult<impl IntoResponse> {
    let req: RateRequest = parse_body(&body)?;
    let average = blocking(&s, move |s| s.rate(&rater, &req.target, req.score)).await?;
    Ok(Json(json!({ "average": average })))
}
