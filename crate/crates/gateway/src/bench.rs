//! Replays the evaluation tasks against a router in-process.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use tower::ServiceExt;

use mediahub_core::bench::{BenchReport, BenchTask, TaskOutcome};
use mediahub_core::federate::SearchResponse;
use mediahub_core::ItemId;

/// Page size used while collecting a full answer set.
pub const PAGE: usize = 100;

fn uri(task: &BenchTask, offset: usize) -> String {
    let mut query = form_urlencoded::Serializer::new(String::new());
    for (name, value) in task.params.pairs() {
        query.append_pair(name, value);
    }
    query.append_pair("offset", &offset.to_string());
    query.append_pair("limit", &PAGE.to_string());
    format!("/search?{}", query.finish())
}

/// One GET; returns the status, the body, and the time the router took.
pub async fn call(router: &Router, uri: &str) -> (StatusCode, Vec<u8>, Duration) {
    let request = Request::get(uri)
        .body(Body::empty())
        .expect("valid request");
    let started = Instant::now();
    let response = router
        .clone()
        .oneshot(request)
        .await
        .expect("router is infallible");
    let status = response.status();
    let body = response
        .into_body()
        .collect()
        .await
        .map(|b| b.to_bytes().to_vec())
        .unwrap_or_default();
    (status, body, started.elapsed())
}

pub async fn run_task(router: &Router, task: &BenchTask) -> TaskOutcome {
    let mut found = BTreeSet::<ItemId>::new();
    let mut spent = Duration::ZERO;
    let mut calls = 0;
    let mut offset = 0;
    loop {
        let (status, body, took) = call(router, &uri(task, offset)).await;
        spent += took;
        calls += 1;
        let ms = spent.as_secs_f64() * 1000.0;
        if status != StatusCode::OK {
            return task.failed(
                format!("{status}: {}", String::from_utf8_lossy(&body)),
                ms,
                calls,
            );
        }
        let page: SearchResponse = match serde_json::from_slice(&body) {
            Ok(page) => page,
            Err(e) => return task.failed(format!("bad response: {e}"), ms, calls),
        };
        let got = page.results.len();
        found.extend(page.results.into_iter().map(|r| r.media));
        offset += got;
        if got == 0 || offset >= page.total {
            return task.judge(found, ms, calls);
        }
    }
}

pub async fn run(router: &Router, tasks: &[BenchTask], items: usize) -> BenchReport {
    let mut outcomes = Vec::with_capacity(tasks.len());
    for task in tasks {
        outcomes.push(run_task(router, task).await);
    }
    BenchReport {
        items,
        tasks: outcomes,
    }
}
