use axum::extract::{RawQuery, State};
use axum::Json;

use mediahub_core::federate::{federated_search, parse_query, FederationError, SearchResponse};

use super::{ApiError, AppState};

pub(super) async fn search(
    State(state): State<AppState>,
    RawQuery(raw): RawQuery,
) -> Result<Json<SearchResponse>, ApiError> {
    let raw = raw.unwrap_or_default();
    let query = parse_query(form_urlencoded::parse(raw.as_bytes()))
        .map_err(|e| ApiError::bad_request("invalid-param", e))?;
    let available = state.hub.availability();
    let lib = state.hub.read();
    let graph = available.graph.then_some(&lib.graph);
    let text = available.text.then_some(&lib.text);
    federated_search(graph, text, &query)
        .map(Json)
        .map_err(|e| match e {
            FederationError::EmptyQuery => ApiError::bad_request("empty-query", e),
            FederationError::InvalidFilter(_) => ApiError::bad_request("invalid-filter", e),
            FederationError::Unavailable => ApiError::unavailable(e.to_string()),
        })
}
