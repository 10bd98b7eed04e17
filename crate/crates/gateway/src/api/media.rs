use std::collections::BTreeMap;

use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use serde::{Deserialize, Serialize};

use mediahub_core::federate::{core_metadata, Metadata};
use mediahub_core::graph::RevisionRecord;
use mediahub_core::text::{normalize_terms, DocumentKind, NewDocument};
use mediahub_core::{DocId, ItemId};

use super::{ApiError, AppState};

/// Revisions shown inline on the detail page.
pub const RECENT_REVISIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub start_seconds: f64,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptView {
    /// A full transcript exists for this item.
    pub available: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc: Option<DocId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
    /// Timed segments; only the matching ones when the view was opened with `q`.
    #[serde(default)]
    pub timestamps: Vec<Anchor>,
}

impl TranscriptView {
    fn absent() -> Self {
        Self {
            available: false,
            doc: None,
            language: None,
            excerpt: None,
            timestamps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionSummary {
    pub count: usize,
    pub editors: Vec<String>,
    /// Newest first.
    pub recent: Vec<RevisionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailView {
    pub id: ItemId,
    pub title: String,
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub metadata: Metadata,
    pub transcript: TranscriptView,
    pub revisions: RevisionSummary,
    /// The text store is down; transcript and description may be missing.
    pub partial: bool,
}

#[derive(Debug, Deserialize)]
pub(super) struct DetailParams {
    q: Option<String>,
}

fn parse_id(raw: &str) -> Result<ItemId, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::not_found(format!("no media item '{raw}'")))
}

pub(super) fn actor_of(headers: &HeaderMap) -> String {
    headers
        .get("x-actor")
        .and_then(|v| v.to_str().ok())
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .unwrap_or("api")
        .to_string()
}

fn preview(text: &str) -> String {
    const MAX: usize = 120;
    if text.chars().count() <= MAX {
        return text.to_string();
    }
    let cut: String = text.chars().take(MAX).collect();
    match cut.rfind(char::is_whitespace) {
        Some(i) if i > MAX / 2 => format!("{}…", &cut[..i]),
        _ => format!("{cut}…"),
    }
}

pub(super) async fn detail(
    State(state): State<AppState>,
    Path(raw): Path<String>,
    Query(params): Query<DetailParams>,
) -> Result<Json<DetailView>, ApiError> {
    let id = parse_id(&raw)?;
    let available = state.hub.availability();
    if !available.graph {
        return Err(ApiError::unavailable("graph store is unavailable"));
    }
    let lib = state.hub.read();
    let item = lib
        .graph
        .get_item(id)
        .map_err(|_| ApiError::not_found(format!("no media item '{raw}'")))?;

    let tokens = normalize_terms(params.q.as_slice());
    let transcript_doc = available
        .text
        .then(|| {
            item.transcript_ref
                .and_then(|d| lib.text.get_document(d).ok())
        })
        .flatten();
    let transcript = match transcript_doc {
        Some(doc) => {
            let hit = lib.text.hit(doc.id, 0.0, &tokens);
            let matched: Option<Vec<f64>> = (!tokens.is_empty()).then_some(hit.timestamps);
            let timestamps = doc
                .segments
                .iter()
                .filter_map(|s| s.start_seconds.map(|t| (t, &s.text)))
                .filter(|(t, _)| matched.as_ref().is_none_or(|m| m.contains(t)))
                .map(|(t, text)| Anchor {
                    start_seconds: t,
                    text: preview(text),
                })
                .collect();
            TranscriptView {
                available: true,
                doc: Some(doc.id),
                language: Some(doc.language.clone()),
                excerpt: Some(hit.snippet),
                timestamps,
            }
        }
        None => TranscriptView::absent(),
    };
    let description = item.description.clone().or_else(|| {
        available
            .text
            .then(|| {
                lib.text
                    .document_for(id, DocumentKind::Description)
                    .map(|d| d.full_text())
            })
            .flatten()
    });

    let history: Vec<&RevisionRecord> = lib.graph.history(id).collect();
    let mut editors: Vec<String> = history.iter().map(|r| r.actor.clone()).collect();
    editors.sort();
    editors.dedup();
    let revisions = RevisionSummary {
        count: history.len(),
        editors,
        recent: history
            .iter()
            .rev()
            .take(RECENT_REVISIONS)
            .map(|r| (*r).clone())
            .collect(),
    };

    Ok(Json(DetailView {
        id,
        title: item.title().to_string(),
        labels: item.labels.clone(),
        description,
        metadata: core_metadata(&lib.graph, item),
        transcript,
        revisions,
        partial: !available.text,
    }))
}

#[derive(Debug, Serialize)]
pub(super) struct Created {
    id: DocId,
}

pub(super) async fn put_document(
    State(state): State<AppState>,
    headers: HeaderMap,
    Json(doc): Json<NewDocument>,
) -> Result<(StatusCode, Json<Created>), ApiError> {
    let id = {
        let mut lib = state.hub.write(true)?;
        lib.put_document(doc, &actor_of(&headers))?
    };
    state.hub.flush()?;
    Ok((StatusCode::CREATED, Json(Created { id })))
}

pub(super) async fn delete(
    State(state): State<AppState>,
    headers: HeaderMap,
    Path(raw): Path<String>,
) -> Result<StatusCode, ApiError> {
    let id = parse_id(&raw)?;
    {
        let mut lib = state.hub.write(true)?;
        lib.delete_item(id, &actor_of(&headers))?;
    }
    state.hub.flush()?;
    Ok(StatusCode::NO_CONTENT)
}
