//! Federated search over the media graph and the text store.
//!
//! Free text is matched against transcripts/descriptions and against item
//! labels; the union of both candidate sets is then narrowed by the metadata
//! filters, which are always evaluated on the graph. Every result is
//! complemented with full graph metadata, whichever store matched it.

pub mod facets;
pub mod params;
mod rank;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use tracing::warn;

use crate::graph::{core_props, FilterError, FilterSet, Item, MediaGraph, Page, Value};
use crate::ids::{DocId, ItemId};
use crate::text::{tokenize, TextHit, TextStore};
pub use facets::{suggest_filters, DurationBucket, Facet, FacetKind};
pub use params::{atom_params, parse_query, Param, ParamError};
use rank::apply_title_bonus;
pub use rank::{rank, Ranked};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FederationError {
    #[error("invalid filter: {0}")]
    InvalidFilter(#[from] FilterError),
    #[error("query has no free text, no filters and no browse flag")]
    EmptyQuery,
    #[error("no store can answer this query")]
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaQuery {
    #[serde(default)]
    pub free_text: Vec<String>,
    #[serde(default)]
    pub filters: FilterSet,
    pub page: Page,
    #[serde(default)]
    pub browse_all: bool,
}

impl MediaQuery {
    pub fn text<S: AsRef<str>>(terms: &[S]) -> Self {
        Self {
            free_text: terms.iter().map(|t| t.as_ref().to_string()).collect(),
            ..Self::browse()
        }
        .not_browsing()
    }

    pub fn filtered(filters: FilterSet) -> Self {
        Self {
            filters,
            ..Self::browse()
        }
        .not_browsing()
    }

    /// Everything, paged 20 at a time.
    pub fn browse() -> Self {
        Self {
            free_text: Vec::new(),
            filters: FilterSet::new(),
            page: Page::new(0, 20),
            browse_all: true,
        }
    }

    pub fn with_filters(mut self, filters: FilterSet) -> Self {
        self.filters = filters;
        self
    }

    pub fn with_page(mut self, page: Page) -> Self {
        self.page = page;
        self
    }

    fn not_browsing(mut self) -> Self {
        self.browse_all = false;
        self
    }

    /// Normalized free-text tokens, duplicates removed.
    pub fn tokens(&self) -> Vec<String> {
        tokenize::normalize_terms(&self.free_text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchedIn {
    GraphOnly,
    TextOnly,
    Both,
}

/// Core-property values keyed by property label. The title appears as
/// monolingual values, one per label.
pub type Metadata = BTreeMap<String, Vec<Value>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub media: ItemId,
    pub title: String,
    pub matched_in: MatchedIn,
    pub metadata: Metadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doc: Option<DocId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snippet: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamps: Option<Vec<f64>>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResponse {
    pub results: Vec<SearchResult>,
    pub total: usize,
    pub facets: Vec<Facet>,
    pub partial: bool,
}

/// Projection of an item onto the core schema.
pub fn core_metadata(graph: &MediaGraph, item: &Item) -> Metadata {
    let mut meta = Metadata::new();
    let title = graph
        .registry()
        .get(core_props::TITLE)
        .map_or("title", |d| d.label.as_str());
    if !item.labels.is_empty() {
        meta.insert(
            title.to_string(),
            item.labels
                .iter()
                .map(|(l, t)| Value::monolingual(l, t))
                .collect(),
        );
    }
    for st in &item.statements {
        if st.property.number() > core_props::COUNT as u64 {
            continue;
        }
        if let Some(def) = graph.registry().get(st.property) {
            meta.entry(def.label.clone())
                .or_default()
                .push(st.value.clone());
        }
    }
    meta
}

#[derive(Debug, Clone, PartialEq)]
pub struct Complemented {
    /// Ascending by item id.
    pub results: Vec<SearchResult>,
    /// Some text hit could not be resolved in the graph.
    pub partial: bool,
}

/// Merges graph and text matches keyed by item. Text-only matches receive
/// full graph metadata; graph-only matches carry no snippet. Text hits for
/// unknown items are dropped and flag the outcome as partial. When an item
/// has several text hits, the best-scoring one supplies snippet and score.
pub fn complement(
    graph: &MediaGraph,
    graph_hits: &BTreeSet<ItemId>,
    text_hits: &[TextHit],
) -> Complemented {
    let mut best: BTreeMap<ItemId, &TextHit> = BTreeMap::new();
    let mut partial = false;
    for hit in text_hits {
        if !graph.contains(hit.media_ref) {
            warn!(doc = %hit.doc, media = %hit.media_ref, "text hit for unknown item dropped");
            partial = true;
            continue;
        }
        best.entry(hit.media_ref)
            .and_modify(|cur| {
                if hit.score > cur.score || (hit.score == cur.score && hit.doc < cur.doc) {
                    *cur = hit;
                }
            })
            .or_insert(hit);
    }

    let ids: BTreeSet<ItemId> = graph_hits
        .iter()
        .copied()
        .filter(|id| graph.contains(*id))
        .chain(best.keys().copied())
        .collect();
    let results = ids
        .into_iter()
        .map(|id| {
            let item = graph.get_item(id).expect("resolved above");
            let text = best.get(&id);
            let matched_in = match (graph_hits.contains(&id), text.is_some()) {
                (true, true) => MatchedIn::Both,
                (false, true) => MatchedIn::TextOnly,
                _ => MatchedIn::GraphOnly,
            };
            SearchResult {
                media: id,
                title: item.title().to_string(),
                matched_in,
                metadata: core_metadata(graph, item),
                doc: text.map(|h| h.doc),
                snippet: text.map(|h| h.snippet.clone()),
                timestamps: text.map(|h| h.timestamps.clone()),
                score: text.map_or(0.0, |h| h.score),
            }
        })
        .collect();
    Complemented { results, partial }
}

/// True if all tokens occur in one of the item's labels.
fn label_matches(item: &Item, tokens: &[String]) -> bool {
    item.labels.values().any(|label| {
        let words: Vec<String> = tokenize::words(label).collect();
        tokens.iter().all(|t| words.contains(t))
    })
}

/// Runs a federated query. `None` marks a store as unavailable: the other
/// store answers alone and the response is flagged partial.
pub fn federated_search(
    graph: Option<&MediaGraph>,
    text: Option<&TextStore>,
    query: &MediaQuery,
) -> Result<SearchResponse, FederationError> {
    let tokens = query.tokens();
    if tokens.is_empty() && query.filters.is_empty() && !query.browse_all {
        return Err(FederationError::EmptyQuery);
    }
    let Some(graph) = graph else {
        return text_only(text, &tokens, query);
    };
    query.filters.validate(graph.registry())?;

    let mut partial = text.is_none() && !tokens.is_empty();
    let mut text_best: HashMap<ItemId, (DocId, f64)> = HashMap::new();
    if let (Some(text), false) = (text, tokens.is_empty()) {
        for (doc, score) in text.ranked(&tokens) {
            let media = text.get_document(doc).expect("ranked ids exist").media_ref;
            if !graph.contains(media) {
                warn!(%doc, %media, "text hit for unknown item dropped");
                partial = true;
                continue;
            }
            // ranked order: first hit per item is its best
            text_best.entry(media).or_insert((doc, score));
        }
    }

    let mut candidates: Vec<rank::Candidate> = graph
        .live()
        .filter_map(|item| {
            let text_hit = text_best.get(&item.id).copied();
            let in_graph = !tokens.is_empty() && label_matches(item, &tokens);
            let selected = tokens.is_empty() || in_graph || text_hit.is_some();
            (selected && query.filters.matches(item)).then_some(rank::Candidate {
                item,
                in_graph: in_graph || tokens.is_empty(),
                text: text_hit,
                score: text_hit.map_or(0.0, |(_, s)| s),
            })
        })
        .collect();

    apply_title_bonus(&mut candidates, &query.free_text);
    rank(&mut candidates);

    let facets = suggest_filters(candidates.iter().map(|c| c.item));
    let total = candidates.len();
    let page = query.page.slice(&candidates);

    let graph_hits: BTreeSet<ItemId> = page
        .iter()
        .filter(|c| c.in_graph)
        .map(|c| c.item.id)
        .collect();
    let text_hits: Vec<TextHit> = match text {
        Some(text) => page
            .iter()
            .filter_map(|c| c.text.map(|(doc, score)| text.hit(doc, score, &tokens)))
            .collect(),
        None => Vec::new(),
    };
    let mut merged: HashMap<ItemId, SearchResult> = complement(graph, &graph_hits, &text_hits)
        .results
        .into_iter()
        .map(|r| (r.media, r))
        .collect();
    let results = page
        .iter()
        .map(|c| {
            let mut r = merged.remove(&c.item.id).expect("page ids complemented");
            r.score = c.score;
            r
        })
        .collect();

    Ok(SearchResponse {
        results,
        total,
        facets,
        partial,
    })
}

/// Degraded mode with the graph down: plain text hits, no metadata. Only
/// pure free-text queries can be answered this way.
fn text_only(
    text: Option<&TextStore>,
    tokens: &[String],
    query: &MediaQuery,
) -> Result<SearchResponse, FederationError> {
    let text = text.ok_or(FederationError::Unavailable)?;
    if tokens.is_empty() || !query.filters.is_empty() {
        return Err(FederationError::Unavailable);
    }
    let mut seen = BTreeSet::new();
    let ranked: Vec<(DocId, f64)> = text
        .ranked(tokens)
        .into_iter()
        .filter(|(doc, _)| seen.insert(text.get_document(*doc).expect("exists").media_ref))
        .collect();
    let results = query
        .page
        .slice(&ranked)
        .iter()
        .map(|&(doc, score)| {
            let hit = text.hit(doc, score, tokens);
            SearchResult {
                media: hit.media_ref,
                title: String::new(),
                matched_in: MatchedIn::TextOnly,
                metadata: Metadata::new(),
                doc: Some(doc),
                snippet: Some(hit.snippet),
                timestamps: Some(hit.timestamps),
                score,
            }
        })
        .collect();
    Ok(SearchResponse {
        results,
        total: ranked.len(),
        facets: Vec::new(),
        partial: true,
    })
}
