use axum::extract::State;
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mediahub_core::federate::facets::MAX_VALUES_PER_FACET;
use mediahub_core::federate::params::{DEFAULT_LIMIT, MAX_LIMIT};
use mediahub_core::federate::{DurationBucket, FacetKind};
use mediahub_core::graph::{core_props, PropertyDef};
use mediahub_core::PropertyId;

use super::AppState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FacetKindView {
    pub kind: FacetKind,
    pub property: PropertyId,
    /// Flat search parameters a chip of this kind sets.
    pub params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketView {
    pub bucket: DurationBucket,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_seconds: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_seconds: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamView {
    pub name: String,
    pub property: Option<PropertyId>,
    pub meaning: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageView {
    pub default_limit: usize,
    pub max_limit: usize,
}

/// The contract the UI builds its filter controls from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiltersView {
    pub properties: Vec<PropertyDef>,
    pub facet_kinds: Vec<FacetKindView>,
    pub max_values_per_facet: usize,
    pub duration_buckets: Vec<BucketView>,
    pub params: Vec<ParamView>,
    pub page: PageView,
}

fn param(name: &str, property: Option<PropertyId>, meaning: &str) -> ParamView {
    ParamView {
        name: name.into(),
        property,
        meaning: meaning.into(),
    }
}

fn facet_params(kind: FacetKind) -> Vec<String> {
    let names: &[&str] = match kind {
        FacetKind::Language => &["lang"],
        FacetKind::Topic => &["topic"],
        FacetKind::MediaType => &["type"],
        FacetKind::PublisherInstitution => &["publisher"],
        FacetKind::PublicationYear => &["after", "before"],
        FacetKind::DurationBucket => &["minSeconds", "maxSeconds"],
    };
    names.iter().map(|s| s.to_string()).collect()
}

pub fn filters_view(state: &AppState) -> FiltersView {
    let lib = state.hub.read();
    FiltersView {
        properties: lib.graph.registry().iter().cloned().collect(),
        facet_kinds: FacetKind::ALL
            .iter()
            .map(|&kind| FacetKindView {
                kind,
                property: kind.property(),
                params: facet_params(kind),
            })
            .collect(),
        max_values_per_facet: MAX_VALUES_PER_FACET,
        duration_buckets: DurationBucket::ALL
            .iter()
            .map(|&bucket| {
                let (min_seconds, max_seconds) = bucket.bounds();
                BucketView {
                    bucket,
                    label: bucket.label().into(),
                    min_seconds,
                    max_seconds,
                }
            })
            .collect(),
        params: vec![
            param(
                "q",
                None,
                "free text, matched in transcripts, descriptions and titles",
            ),
            param(
                "lang",
                Some(core_props::LANGUAGE),
                "language equals (ISO 639-1), repeatable",
            ),
            param("topic", Some(core_props::TOPIC), "topic equals, repeatable"),
            param(
                "publisher",
                Some(core_props::PUBLISHER),
                "publisher-institution equals, repeatable",
            ),
            param(
                "type",
                Some(core_props::MEDIA_TYPE),
                "media-type equals, repeatable",
            ),
            param(
                "after",
                Some(core_props::PUBLICATION_DATE),
                "published on or after YYYY-MM-DD",
            ),
            param(
                "before",
                Some(core_props::PUBLICATION_DATE),
                "published on or before YYYY-MM-DD",
            ),
            param(
                "minSeconds",
                Some(core_props::DURATION),
                "duration at least, seconds",
            ),
            param(
                "maxSeconds",
                Some(core_props::DURATION),
                "duration at most, seconds",
            ),
            param(
                "all",
                None,
                "browse everything when no other criterion is given",
            ),
            param("offset", None, "results to skip"),
            param("limit", None, "page size"),
        ],
        page: PageView {
            default_limit: DEFAULT_LIMIT,
            max_limit: MAX_LIMIT,
        },
    }
}

pub(super) async fn filters(State(state): State<AppState>, headers: HeaderMap) -> Response {
    let body = serde_json::to_vec(&filters_view(&state)).expect("view serializes");
    let etag = format!("\"{}\"", hex::encode(&Sha256::digest(&body)[..16]));
    let etag_value = HeaderValue::from_str(&etag).expect("hex is a valid header");
    let fresh = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    if fresh {
        return (StatusCode::NOT_MODIFIED, [(header::ETAG, etag_value)]).into_response();
    }
    (
        [
            (header::ETAG, etag_value),
            (
                header::CONTENT_TYPE,
                HeaderValue::from_static("application/json"),
            ),
        ],
        body,
    )
        .into_response()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    /// `ok`, or `degraded` when a store failed to load.
    pub status: String,
    pub items: usize,
    pub documents: usize,
    pub graph: bool,
    pub text: bool,
}

pub(super) async fn health(State(state): State<AppState>) -> Json<Health> {
    let available = state.hub.availability();
    let lib = state.hub.read();
    Json(Health {
        status: if available.graph && available.text {
            "ok"
        } else {
            "degraded"
        }
        .into(),
        items: lib.graph.len(),
        documents: lib.text.len(),
        graph: available.graph,
        text: available.text,
    })
}
