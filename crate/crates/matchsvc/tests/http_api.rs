use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use collabrec_matchsvc::http::router;
use collabrec_matchsvc::{ManualClock, MatchService, MemoryStore, ServiceConfig, Timestamp};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app() -> Router {
    let service = MatchService::open(
        Arc::new(MemoryStore::new()),
        Arc::new(ManualClock::new(Timestamp(1_700_000_000_000), 1)),
        ServiceConfig { embedding_dimension: 32, ..Default::default() },
    )
    .unwrap();
    router(Arc::new(service))
}

async fn call(
    app: &Router,
    method: Method,
    uri: &str,
    token: Option<&str>,
    body: Option<Value>,
) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header(header::AUTHORIZATION, format!("Bearer {t}"));
    }
    let body = match body {
        Some(v) => {
            req = req.header(header::CONTENT_TYPE, "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn profile(name: &str, domain: &str, skills: &str) -> Value {
    json!({
        "name": name,
        "email": format!("{}@uni.example", name.to_lowercase()),
        "profession": "student",
        "experience": 3,
        "interest": "project",
        "collaboration_with": "faculty",
        "domain": domain,
        "skillset": skills,
        "password": format!("{name}-password"),
    })
}

/// Registers and logs in; returns (id, token).
async fn user(app: &Router, name: &str, domain: &str, skills: &str) -> (String, String) {
    let (status, body) = call(app, Method::POST, "/profiles", None, Some(profile(name, domain, skills))).await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    let id = body["id"].as_str().unwrap().to_string();
    let login =
        json!({"email": format!("{}@uni.example", name.to_lowercase()), "password": format!("{name}-password")});
    let (status, body) = call(app, Method::POST, "/auth/login", None, Some(login)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["token_type"], "Bearer");
    (id, body["token"].as_str().unwrap().to_string())
}

#[tokio::test]
async fn healthz() {
    let (status, body) = call(&app(), Method::GET, "/healthz", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
}

#[tokio::test]
async fn registration_and_login_errors() {
    let app = app();
    user(&app, "Ann", "AI", "Python").await;
    let (status, body) = call(&app, Method::POST, "/profiles", None, Some(profile("Ann", "AI", "Python"))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["error"], "duplicate_email");

    let mut weak = profile("Bob", "AI", "Python");
    weak["password"] = json!("short");
    assert_eq!(call(&app, Method::POST, "/profiles", None, Some(weak)).await.0, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::POST, "/profiles", None, Some(json!({"name": "x"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let bad = json!({"email": "ann@uni.example", "password": "nope-nope-nope"});
    assert_eq!(call(&app, Method::POST, "/auth/login", None, Some(bad)).await.0, StatusCode::UNAUTHORIZED);
    assert_eq!(call(&app, Method::GET, "/feed", None, None).await.0, StatusCode::UNAUTHORIZED);
    assert_eq!(call(&app, Method::GET, "/matches", Some("forged"), None).await.0, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn full_matching_flow() {
    let app = app();
    let (a, ta) = user(&app, "Ann", "Cybersecurity", "C, Python, Networking").await;
    let (b, tb) = user(&app, "Bob", "Cybersecurity", "Python, Networking").await;
    let (_c, tc) = user(&app, "Cai", "Web Development", "HTML, CSS").await;

    let (status, feed) = call(&app, Method::GET, "/feed?k=5", Some(&ta), None).await;
    assert_eq!(status, StatusCode::OK);
    let feed = feed.as_array().unwrap();
    assert_eq!(feed.len(), 2);
    assert_eq!(feed[0]["candidate"], b.as_str());
    assert!(feed[0]["summary"].as_str().unwrap().starts_with("Cybersecurity"));
    assert!(feed[0]["rating"].is_null());
    assert!(feed.iter().all(|f| f["candidate"] != a.as_str()));

    let (status, _) =
        call(&app, Method::POST, "/swipes", Some(&ta), Some(json!({"target": a, "direction": "right"}))).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (status, _) =
        call(&app, Method::POST, "/swipes", Some(&ta), Some(json!({"target": "u99999", "direction": "right"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) =
        call(&app, Method::POST, "/swipes", Some(&ta), Some(json!({"target": b, "direction": "up"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, r) = call(&app, Method::POST, "/swipes", Some(&ta), Some(json!({"target": b, "direction": "right"}))).await;
    assert_eq!(r["matched"], false);
    let match_id = r["match_id"].as_str().unwrap().to_string();
    let uri = format!("/matches/{match_id}/messages");
    let (status, _) = call(&app, Method::POST, &uri, Some(&ta), Some(json!({"text": "hi"}))).await;
    assert_eq!(status, StatusCode::FORBIDDEN, "unmatched chat is forbidden");
    let (status, _) = call(&app, Method::GET, &uri, Some(&ta), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (status, _) = call(&app, Method::POST, "/ratings", Some(&ta), Some(json!({"target": b, "score": 5}))).await;
    assert_eq!(status, StatusCode::FORBIDDEN, "rating needs a match");

    let (_, r) = call(&app, Method::POST, "/swipes", Some(&tb), Some(json!({"target": a, "direction": "right"}))).await;
    assert_eq!(r["matched"], true);

    let (status, m) = call(&app, Method::GET, "/matches", Some(&ta), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(m[0]["match_id"], match_id.as_str());
    assert_eq!(m[0]["other_user"], b.as_str());
    assert!(m[0]["matched_at"].is_i64());
    let (_, m) = call(&app, Method::GET, "/matches", Some(&tc), None).await;
    assert_eq!(m, json!([]));

    let (status, first) = call(&app, Method::POST, &uri, Some(&ta), Some(json!({"text": "hello"}))).await;
    assert_eq!(status, StatusCode::CREATED);
    call(&app, Method::POST, &uri, Some(&tb), Some(json!({"text": "hi back"}))).await;
    let (status, _) = call(&app, Method::POST, &uri, Some(&tc), Some(json!({"text": "me too"}))).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    let (_, all) = call(&app, Method::GET, &uri, Some(&tb), None).await;
    let texts: Vec<&str> = all.as_array().unwrap().iter().map(|m| m["text"].as_str().unwrap()).collect();
    assert_eq!(texts, ["hello", "hi back"]);
    let since = first["at"].as_i64().unwrap();
    let (_, newer) = call(&app, Method::GET, &format!("{uri}?since={since}"), Some(&ta), None).await;
    assert_eq!(newer.as_array().unwrap().len(), 1);
    assert_eq!(newer[0]["text"], "hi back");
    let (status, _) = call(&app, Method::GET, "/matches/nobody__none/messages", Some(&ta), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, avg) = call(&app, Method::POST, "/ratings", Some(&ta), Some(json!({"target": b, "score": 4}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(avg["average"], 4.0);
    let (status, _) = call(&app, Method::POST, "/ratings", Some(&ta), Some(json!({"target": b, "score": 9}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::POST, "/ratings", Some(&ta), Some(json!({"target": a, "score": 3}))).await;
    assert_eq!(status, StatusCode::FORBIDDEN);

    // Ann swiped on Bob: he leaves her feed. Cai sees Bob with his rating.
    let (_, feed) = call(&app, Method::GET, "/feed", Some(&ta), None).await;
    assert!(feed.as_array().unwrap().iter().all(|f| f["candidate"] != b.as_str()));
    let (_, feed) = call(&app, Method::GET, "/feed", Some(&tc), None).await;
    let bob = feed.as_array().unwrap().iter().find(|f| f["candidate"] == b.as_str()).unwrap();
    assert_eq!(bob["rating"], 4.0);
    let (status, _) = call(&app, Method::GET, "/feed?k=0", Some(&tc), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, Method::GET, "/feed?k=abc", Some(&tc), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}
