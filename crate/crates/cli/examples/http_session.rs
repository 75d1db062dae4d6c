//! Drives the HTTP API in process: evaluate, run the procedure for K, fetch
//! plot geometry and the ranking. No socket is opened.
//!
//!     cargo run -p vga-cli --example http_session

use axum::body::{to_bytes, Body};
use axum::http::Request;
use serde_json::{json, Value};
use tower::ServiceExt;
use vga_cli::server::{router, AppState};
use vga_core::dataset::example_matrix;

async fn call(app: &axum::Router, method: &str, uri: &str, body: Value) -> Value {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let bytes = to_bytes(res.into_body(), usize::MAX).await.unwrap();
    let doc: Value = serde_json::from_slice(&bytes).unwrap();
    println!("{method} {uri} -> {status}");
    doc
}

#[tokio::main]
async fn main() {
    let dir = std::env::temp_dir().join("vga-http-session");
    let app = router(AppState::new(Some(example_matrix()), Some(dir.clone())));

    let e = call(&app, "POST", "/api/evaluate", json!({"model": "spt", "dmu": "B"})).await;
    println!("  B: E = {:.4}, kappa1 = {:.4}", e["E"].as_f64().unwrap(), e["kappa1"].as_f64().unwrap());

    call(&app, "POST", "/api/procedure/K/phase1", json!({})).await;
    call(&app, "POST", "/api/procedure/K/phase2", json!({})).await;
    let p3 = call(&app, "POST", "/api/procedure/K/phase3", json!({})).await;
    println!("  kappa2 = {:.4}, interval {}", p3["kappa2"].as_f64().unwrap(), p3["interval"]);
    let t = call(&app, "POST", "/api/procedure/K/try", json!({"kappa": 0.718})).await;
    println!("  E(0.718) = {:.4}", t["report"]["efficiency"].as_f64().unwrap());
    call(&app, "POST", "/api/procedure/K/commit", json!({"kappa": 0.718})).await;

    let g = call(&app, "GET", "/api/plot/K?model=tsc&kappa=0.718", Value::Null).await;
    println!("  anchor {} in quadrant {}", g["anchor"], g["anchor_quadrant"]);

    let r = call(&app, "GET", "/api/rank", Value::Null).await;
    for row in r["rows"].as_array().unwrap() {
        println!("  {} {} {} {:.4}", row["rank"], row["dmu"], row["model"], row["score"].as_f64().unwrap());
    }
    println!("session stored under {}", dir.display());
}
