//! Full-text store for transcripts and descriptions: an inverted index with
//! tf-idf scoring, timestamped segments and snippet extraction.

mod snippet;
pub mod tokenize;

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Map;

use crate::framing::{self, FramingError};
use crate::graph::schema::is_iso639_1;
use crate::ids::{DocId, ItemId};
pub use snippet::MAX_SNIPPET_CHARS;
pub use tokenize::{normalize_terms, tokenize, Token};

pub const DUMP_FORMAT: &str = "mediahub-text";
pub const DUMP_VERSION: u64 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TextError {
    #[error("transcripts require copyright-holder consent")]
    ConsentMissing,
    #[error("unknown media item {0}")]
    UnknownMedia(ItemId),
    #[error("document has no text")]
    EmptyDocument,
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("query has no searchable tokens")]
    EmptyQuery,
    #[error("limit must be positive")]
    InvalidLimit,
    #[error("unknown document {0}")]
    UnknownDoc(DocId),
    #[error("dump i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt dump: {0}")]
    CorruptDump(String),
}

impl From<FramingError> for TextError {
    fn from(e: FramingError) -> Self {
        match e {
            FramingError::Io(e) => TextError::Io(e),
            FramingError::Corrupt(msg) => TextError::CorruptDump(msg),
        }
    }
}

pub type Result<T, E = TextError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DocumentKind {
    Transcript,
    Description,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_seconds: Option<f64>,
    pub text: String,
}

impl Segment {
    pub fn at(start_seconds: f64, text: impl Into<String>) -> Self {
        Self {
            start_seconds: Some(start_seconds),
            text: text.into(),
        }
    }

    pub fn untimed(text: impl Into<String>) -> Self {
        Self {
            start_seconds: None,
            text: text.into(),
        }
    }
}

/// Input for [`TextStore::put_document`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewDocument {
    pub media_ref: ItemId,
    pub kind: DocumentKind,
    pub language: String,
    pub consent: bool,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: DocId,
    pub media_ref: ItemId,
    pub kind: DocumentKind,
    pub language: String,
    pub consent: bool,
    pub segments: Vec<Segment>,
}

impl Document {
    /// Segment texts joined by single spaces.
    pub fn full_text(&self) -> String {
        self.segments
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn char_len(&self) -> usize {
        self.segments.iter().map(|s| s.text.chars().count()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextHit {
    pub doc: DocId,
    pub media_ref: ItemId,
    pub score: f64,
    pub snippet: String,
    pub timestamps: Vec<f64>,
}

/// Existence check against the media graph, so documents never dangle.
pub trait MediaCatalog {
    fn has_media(&self, id: ItemId) -> bool;
}

impl MediaCatalog for crate::graph::MediaGraph {
    fn has_media(&self, id: ItemId) -> bool {
        self.contains(id)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TextStore {
    docs: BTreeMap<DocId, Document>,
    by_media: BTreeMap<(ItemId, DocumentKind), DocId>,
    /// token -> doc -> term frequency
    postings: HashMap<String, BTreeMap<DocId, u32>>,
    next_doc: u64,
}

impl TextStore {
    pub fn new() -> Self {
        Self {
            next_doc: 1,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn documents(&self) -> impl Iterator<Item = &Document> {
        self.docs.values()
    }

    /// Stores and indexes a document. A second put for the same
    /// (media, kind) replaces the earlier document, which gets a fresh id.
    pub fn put_document(&mut self, new: NewDocument, catalog: &dyn MediaCatalog) -> Result<DocId> {
        validate(&new)?;
        if !catalog.has_media(new.media_ref) {
            return Err(TextError::UnknownMedia(new.media_ref));
        }
        if let Some(old) = self.by_media.get(&(new.media_ref, new.kind)).copied() {
            self.remove(old);
        }
        let id = DocId::new(self.next_doc);
        self.next_doc += 1;
        let doc = Document {
            id,
            media_ref: new.media_ref,
            kind: new.kind,
            language: new.language,
            consent: new.consent,
            segments: new.segments,
        };
        self.insert(doc);
        Ok(id)
    }

    pub fn get_document(&self, id: DocId) -> Result<&Document> {
        self.docs.get(&id).ok_or(TextError::UnknownDoc(id))
    }

    pub fn document_for(&self, media: ItemId, kind: DocumentKind) -> Option<&Document> {
        self.by_media
            .get(&(media, kind))
            .and_then(|id| self.docs.get(id))
    }

    /// Drops every document attached to `media`; returns the removed ids.
    pub fn remove_media(&mut self, media: ItemId) -> Vec<DocId> {
        let ids: Vec<DocId> = self
            .by_media
            .range((media, DocumentKind::Transcript)..=(media, DocumentKind::Description))
            .map(|(_, id)| *id)
            .collect();
        ids.iter().for_each(|&id| self.remove(id));
        ids
    }

    /// Conjunctive search: hits contain every normalized token, ordered by
    /// score descending then id ascending, at most `limit` long.
    pub fn search_text<S: AsRef<str>>(&self, terms: &[S], limit: usize) -> Result<Vec<TextHit>> {
        if limit == 0 {
            return Err(TextError::InvalidLimit);
        }
        let tokens = normalize_terms(terms);
        if tokens.is_empty() {
            return Err(TextError::EmptyQuery);
        }
        Ok(self
            .ranked(&tokens)
            .into_iter()
            .take(limit)
            .map(|(doc, score)| self.hit(doc, score, &tokens))
            .collect())
    }

    /// All matching documents with scores, ranked, without snippets.
    /// `tokens` must already be normalized.
    pub fn ranked(&self, tokens: &[String]) -> Vec<(DocId, f64)> {
        if tokens.is_empty() {
            return Vec::new();
        }
        let mut lists: Vec<&BTreeMap<DocId, u32>> = Vec::with_capacity(tokens.len());
        for t in tokens {
            match self.postings.get(t) {
                Some(list) => lists.push(list),
                None => return Vec::new(),
            }
        }
        let shortest = lists
            .iter()
            .enumerate()
            .min_by_key(|(_, l)| l.len())
            .map(|(i, _)| i)
            .expect("non-empty");
        let n = self.docs.len() as f64;
        let mut scored: Vec<(DocId, f64)> = lists[shortest]
            .keys()
            .filter(|d| lists.iter().all(|l| l.contains_key(d)))
            .map(|&d| {
                let score = lists
                    .iter()
                    .map(|l| f64::from(l[&d]) * idf(n, l.len()))
                    .sum();
                (d, score)
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored
    }

    /// Builds the snippet and timestamps for a matched document.
    pub fn hit(&self, id: DocId, score: f64, tokens: &[String]) -> TextHit {
        let doc = &self.docs[&id];
        let mut timestamps = Vec::new();
        let mut first: Option<(usize, usize)> = None;
        let mut offset = 0;
        for seg in &doc.segments {
            let mut seg_matched = false;
            for tok in tokenize(&seg.text) {
                if tokens.contains(&tok.text) {
                    seg_matched = true;
                    first.get_or_insert((offset + tok.start, offset + tok.end));
                }
            }
            if seg_matched {
                if let Some(t) = seg.start_seconds {
                    if !timestamps.contains(&t) {
                        timestamps.push(t);
                    }
                }
            }
            offset += seg.text.len() + 1;
        }
        let text = doc.full_text();
        let (start, end) = first.unwrap_or((0, 0));
        TextHit {
            doc: id,
            media_ref: doc.media_ref,
            score,
            snippet: snippet::window(&text, start, end),
            timestamps,
        }
    }

    /// A store with the index recomputed from the stored documents.
    pub fn rebuilt(&self) -> Self {
        let mut fresh = Self {
            next_doc: self.next_doc,
            ..Self::default()
        };
        for doc in self.docs.values() {
            fresh.insert(doc.clone());
        }
        fresh
    }

    pub fn to_dump_bytes(&self) -> Vec<u8> {
        let docs: Vec<&Document> = self.docs.values().collect();
        let mut header = Map::new();
        header.insert("next_doc".into(), self.next_doc.into());
        framing::encode(DUMP_FORMAT, DUMP_VERSION, header, &docs).expect("documents serialize")
    }

    pub fn from_dump_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, docs) = framing::decode::<Document>(bytes, DUMP_FORMAT, DUMP_VERSION)?;
        let next_doc = framing::header_u64(&header, "next_doc")?;
        let mut store = Self {
            next_doc,
            ..Self::default()
        };
        for doc in docs {
            if doc.id.number() >= next_doc || store.docs.contains_key(&doc.id) {
                return Err(TextError::CorruptDump(format!(
                    "bad document id {}",
                    doc.id
                )));
            }
            store.insert(doc);
        }
        Ok(store)
    }

    pub fn dump(&self, path: &Path) -> Result<()> {
        Ok(framing::write_atomic(path, &self.to_dump_bytes())?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_dump_bytes(&std::fs::read(path)?)
    }

    fn insert(&mut self, doc: Document) {
        let mut tf: HashMap<String, u32> = HashMap::new();
        for seg in &doc.segments {
            for w in tokenize::words(&seg.text) {
                *tf.entry(w).or_default() += 1;
            }
        }
        for (token, count) in tf {
            self.postings
                .entry(token)
                .or_default()
                .insert(doc.id, count);
        }
        self.by_media.insert((doc.media_ref, doc.kind), doc.id);
        self.docs.insert(doc.id, doc);
    }

    fn remove(&mut self, id: DocId) {
        let Some(doc) = self.docs.remove(&id) else {
            return;
        };
        self.by_media.remove(&(doc.media_ref, doc.kind));
        for seg in &doc.segments {
            for w in tokenize::words(&seg.text) {
                if let Some(list) = self.postings.get_mut(&w) {
                    list.remove(&id);
                    if list.is_empty() {
                        self.postings.remove(&w);
                    }
                }
            }
        }
    }
}

/// Smoothed inverse document frequency; strictly positive.
fn idf(total_docs: f64, doc_freq: usize) -> f64 {
    (1.0 + total_docs / doc_freq as f64).ln()
}

fn validate(doc: &NewDocument) -> Result<()> {
    if doc.kind == DocumentKind::Transcript && !doc.consent {
        return Err(TextError::ConsentMissing);
    }
    if doc.segments.is_empty() || doc.segments.iter().all(|s| s.text.trim().is_empty()) {
        return Err(TextError::EmptyDocument);
    }
    if !is_iso639_1(&doc.language) {
        return Err(TextError::InvalidDocument(format!(
            "'{}' is not an ISO 639-1 language code",
            doc.language
        )));
    }
    let mut last: Option<f64> = None;
    for (i, seg) in doc.segments.iter().enumerate() {
        if seg.text.trim().is_empty() {
            return Err(TextError::InvalidDocument(format!(
                "segment {i} has no text"
            )));
        }
        if let Some(t) = seg.start_seconds {
            if !t.is_finite() || t < 0.0 {
                return Err(TextError::InvalidDocument(format!(
                    "segment {i} start {t} is not a non-negative number"
                )));
            }
            if last.is_some_and(|prev| t < prev) {
                return Err(TextError::InvalidDocument(format!(
                    "segment {i} starts before its predecessor"
                )));
            }
            last = Some(t);
        }
    }
    Ok(())
}
