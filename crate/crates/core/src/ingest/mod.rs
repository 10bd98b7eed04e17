//! Bulk ingestion: parse a dataset, map records to drafts, optionally
//! enrich them, then commit with deduplication and an import report.

pub mod commit;
pub mod enrich;
pub mod mapping;
pub mod parse;

use serde::{Deserialize, Serialize};

use crate::graph::MediaGraph;
pub use commit::commit;
pub use enrich::{enrich, EnrichmentProvider, FieldMap, ProviderError, StubProvider};
pub use mapping::{
    map_record, DedupKey, FieldError, ItemDraft, MappingConfig, MappingRule, Transform,
};
pub use parse::{parse_bytes, parse_dataset, DatasetFormat, Parsed, RawRecord};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown dataset format '{0}'")]
    UnknownFormat(String),
    #[error("invalid mapping: {0}")]
    InvalidMapping(String),
    #[error("invalid provider data: {0}")]
    InvalidProvider(String),
    #[error("record at line {line} has no title")]
    MissingTitle { line: usize },
    #[error("actor must not be empty")]
    EmptyActor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImportReport {
    pub created: usize,
    pub updated: usize,
    pub skipped_duplicates: usize,
    pub errors: Vec<LineError>,
    /// Non-fatal issues: failed field transforms, enrichment misses.
    #[serde(default)]
    pub warnings: Vec<LineError>,
}

impl ImportReport {
    /// created + updated + skipped + errors; equals the number of input rows.
    pub fn input_count(&self) -> usize {
        self.created + self.updated + self.skipped_duplicates + self.errors.len()
    }

    fn absorb(&mut self, other: ImportReport) {
        self.created += other.created;
        self.updated += other.updated;
        self.skipped_duplicates += other.skipped_duplicates;
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }
}

/// Everything one import run needs besides the store.
pub struct ImportJob<'a> {
    pub source: &'a str,
    pub dataset: &'a [u8],
    pub format: DatasetFormat,
    pub mapping: &'a MappingConfig,
    pub provider: Option<&'a dyn EnrichmentProvider>,
    pub actor: &'a str,
}

/// Runs parse, map, enrich and commit. The mapping is checked before the
/// store is touched.
pub fn run_import(graph: &mut MediaGraph, job: ImportJob<'_>) -> Result<ImportReport, IngestError> {
    if job.actor.trim().is_empty() {
        return Err(IngestError::EmptyActor);
    }
    let resolved = job.mapping.resolve(graph.registry())?;
    let parsed = parse_bytes(job.source, job.dataset, job.format);

    let mut report = ImportReport {
        errors: parsed.errors,
        ..ImportReport::default()
    };
    let mut drafts = Vec::with_capacity(parsed.records.len());
    for record in &parsed.records {
        match map_record(record, &resolved, graph.registry()) {
            Ok(mapped) => {
                report
                    .warnings
                    .extend(mapped.field_errors.into_iter().map(|f| LineError {
                        line: f.line,
                        reason: format!("field '{}': {}", f.field, f.reason),
                    }));
                let draft = match job.provider {
                    Some(provider) => {
                        let line = mapped.draft.source_line;
                        let (draft, warnings) = enrich(mapped.draft, provider, graph.registry());
                        report.warnings.extend(
                            warnings
                                .into_iter()
                                .map(|reason| LineError { line, reason }),
                        );
                        draft
                    }
                    None => mapped.draft,
                };
                drafts.push(draft);
            }
            Err(e) => report.errors.push(LineError {
                line: record.source_line,
                reason: e.to_string(),
            }),
        }
    }
    report.absorb(commit(graph, drafts, job.actor)?);
    report.errors.sort_by_key(|e| e.line);
    tracing::info!(
        source = job.source,
        created = report.created,
        updated = report.updated,
        skipped = report.skipped_duplicates,
        errors = report.errors.len(),
        "import finished"
    );
    Ok(report)
}
