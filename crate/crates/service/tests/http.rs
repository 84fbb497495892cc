use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use pieceshap_service::{app, ServiceConfig};
use serde_json::{json, Value};
use tower::ServiceExt;

const ROOKS_VS_QUEEN: &str = "8/2k5/2q5/8/4R3/4RK2/8/8 w - - 0 1";
const KINGS: &str = "8/2k5/8/8/8/5K2/8/8 w - - 0 1";
const START: &str = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1";
const KNIGHTS: &str = "r1b1k3/pp3p2/2n5/8/8/2N5/PP3P2/R1B1K3 w - - 0 1";

fn service(extra_engines: &str, queue_depth: usize) -> (Router, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let engines = dir.path().join("engines.toml");
    std::fs::write(&engines, extra_engines).unwrap();
    let config = ServiceConfig { engines: Some(engines), queue_depth, ..ServiceConfig::default() };
    (app(&config).unwrap(), dir)
}

async fn call(router: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let request = match body {
        Some(b) => request.body(Body::from(b.to_string())).unwrap(),
        None => request.body(Body::empty()).unwrap(),
    };
    let response = router.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = axum::body::to_bytes(response.into_body(), usize::MAX).await.unwrap();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn submit(router: &Router, path: &str, body: Value) -> u64 {
    let (status, v) = call(router, "POST", path, Some(body)).await;
    assert_eq!(status, StatusCode::ACCEPTED, "{v}");
    v["job_id"].as_u64().unwrap()
}

async fn wait(router: &Router, id: u64) -> Value {
    let start = Instant::now();
    loop {
        let (status, v) = call(router, "GET", &format!("/jobs/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if v["state"] == "done" || v["state"] == "failed" {
            return v;
        }
        assert!(start.elapsed() < Duration::from_secs(60), "job {id} did not finish");
        tokio::time::sleep(Duration::from_millis(5)).await;
    }
}

#[tokio::test]
async fn explain_accepts_valid_request() {
    let (router, _dir) = service("", 8);
    let id = submit(&router, "/explain", json!({"fen": ROOKS_VS_QUEEN, "evaluator_id": "material"})).await;
    let v = wait(&router, id).await;
    assert_eq!(v["state"], "done", "{v}");
    assert_eq!(v["result"]["contributions"].as_array().unwrap().len(), 3);
    assert_eq!(v["request"]["fen"], ROOKS_VS_QUEEN);
}

#[tokio::test]
async fn explain_rejects_bad_input() {
    let (router, _dir) = service("", 8);
    let (status, v) = call(&router, "POST", "/explain", Some(json!({"fen": "garbage"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "record", "{v}");
    let (status, v) = call(&router, "POST", "/explain", Some(json!({"fen": "8/2k5/9/8/8/5K2/8/8 w - - 0 1"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["field"].as_str().unwrap().contains("piece placement"), "{v}");

    let (status, v) = call(&router, "POST", "/explain", Some(json!({"fen": "8/8/8/8/8/8/8/8 w - - 0 1"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{v}");

    let (status, _) =
        call(&router, "POST", "/explain", Some(json!({"fen": ROOKS_VS_QUEEN, "evaluator_id": "nope"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let bad_limit = json!({"fen": ROOKS_VS_QUEEN, "perturb_limit": {"movetime": 0}});
    assert_eq!(call(&router, "POST", "/explain", Some(bad_limit)).await.0, StatusCode::BAD_REQUEST);
    let huge = json!({"fen": ROOKS_VS_QUEEN, "exact_threshold": 30});
    assert_eq!(call(&router, "POST", "/explain", Some(huge)).await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn unknown_job_is_404() {
    let (router, _dir) = service("", 8);
    assert_eq!(call(&router, "GET", "/jobs/12345", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn kings_only_finishes_with_no_contributions() {
    let (router, _dir) = service("", 8);
    let id = submit(&router, "/explain", json!({"fen": KINGS})).await;
    let v = wait(&router, id).await;
    assert_eq!(v["state"], "done");
    assert_eq!(v["result"]["contributions"], json!([]));
    assert_eq!(v["result"]["base_value"], 0.5);
}

#[tokio::test]
async fn engines_lists_registry() {
    let (router, _dir) = service("[[engines]]\nid = \"no-knights\"\nkind = \"material\"\nvalues = { knight = 0 }\n", 8);
    let (status, v) = call(&router, "GET", "/engines", None).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = v["engines"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"material") && ids.contains(&"no-knights"), "{ids:?}");
}

#[tokio::test]
async fn progress_is_monotone() {
    let (router, _dir) = service("", 8);
    let body = json!({"fen": START, "max_evaluations": 20000, "exact_threshold": 0, "seed": 3});
    let id = submit(&router, "/explain", body).await;
    let mut last = 0;
    loop {
        let (_, v) = call(&router, "GET", &format!("/jobs/{id}"), None).await;
        match v["state"].as_str().unwrap() {
            "running" => {
                let done = v["done"].as_u64().unwrap();
                assert!(done >= last, "progress went from {last} to {done}");
                assert_eq!(v["total"], 20000);
                last = done;
            }
            "done" => break,
            "queued" => {}
            other => panic!("unexpected state {other}: {v}"),
        }
        tokio::time::sleep(Duration::from_millis(1)).await;
    }
    let v = wait(&router, id).await;
    assert!(v["result"]["evaluations_used"].as_u64().unwrap() <= 20000);
}

#[tokio::test]
async fn compare_is_led_by_knights() {
    let (router, _dir) = service("[[engines]]\nid = \"no-knights\"\nkind = \"material\"\nvalues = { knight = 0 }\n", 8);
    let body = json!({"fen": KNIGHTS, "evaluator_a": "material", "evaluator_b": "no-knights"});
    let id = submit(&router, "/compare", body).await;
    let v = wait(&router, id).await;
    assert_eq!(v["state"], "done", "{v}");
    let deltas = v["result"]["deltas"].as_array().unwrap();
    let kinds: Vec<&str> = deltas.iter().take(2).map(|d| d["piece"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["knight", "knight"], "{deltas:?}");
    assert_eq!(v["result"]["a"]["evaluator"], "material");
    assert_eq!(v["result"]["b"]["evaluator"], "no-knights");

    let (status, _) =
        call(&router, "POST", "/compare", Some(json!({"fen": KNIGHTS, "evaluator_a": "material", "evaluator_b": "x"})))
            .await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn identical_requests_give_identical_results() {
    let (router, _dir) = service("", 8);
    let body = json!({"fen": START, "max_evaluations": 500, "exact_threshold": 0, "seed": 11});
    let a = submit(&router, "/explain", body.clone()).await;
    let b = submit(&router, "/explain", body).await;
    let (va, vb) = (wait(&router, a).await, wait(&router, b).await);
    assert_eq!(va["state"], "done");
    assert_eq!(va["result"], vb["result"]);
}

#[tokio::test]
async fn full_queue_is_429() {
    let (router, _dir) = service("", 1);
    let slow = json!({"fen": START, "max_evaluations": 200000, "exact_threshold": 0});
    let mut accepted = Vec::new();
    let mut rejected = 0;
    for _ in 0..6 {
        let (status, v) = call(&router, "POST", "/explain", Some(slow.clone())).await;
        match status {
            StatusCode::ACCEPTED => accepted.push(v["job_id"].as_u64().unwrap()),
            StatusCode::TOO_MANY_REQUESTS => rejected += 1,
            other => panic!("unexpected {other}"),
        }
    }
    assert!(rejected >= 4, "only {rejected} rejections");
    assert!(accepted.len() <= 2);
    let max = *accepted.iter().max().unwrap();
    for id in 1..=max {
        let known = call(&router, "GET", &format!("/jobs/{id}"), None).await.0 == StatusCode::OK;
        assert_eq!(known, accepted.contains(&id), "job {id}");
    }
}
