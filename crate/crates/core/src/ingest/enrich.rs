//! Enrichment providers fill fields a record left empty.

use std::collections::BTreeMap;
use std::path::Path;

use super::mapping::{apply_transform, ItemDraft, Transform, DESCRIPTION_TARGET};
use super::IngestError;
use crate::graph::{core_props, Registry, Statement, Value};

/// Property label (or `description`) to raw value.
pub type FieldMap = BTreeMap<String, String>;

#[derive(Debug, thiserror::Error)]
#[error("provider {provider}: {reason}")]
pub struct ProviderError {
    pub provider: String,
    pub reason: String,
}

/// Looks up extra metadata by external id.
pub trait EnrichmentProvider: Send + Sync {
    fn name(&self) -> &str;

    /// `Ok(None)` on a miss.
    fn lookup(&self, external_id: &str) -> Result<Option<FieldMap>, ProviderError>;
}

/// File-backed provider: a JSON object mapping external id to field map.
#[derive(Debug, Clone, Default)]
pub struct StubProvider {
    entries: BTreeMap<String, FieldMap>,
}

impl StubProvider {
    pub fn new(entries: BTreeMap<String, FieldMap>) -> Self {
        Self { entries }
    }

    pub fn from_json(json: &str) -> Result<Self, IngestError> {
        let raw: BTreeMap<String, BTreeMap<String, serde_json::Value>> =
            serde_json::from_str(json).map_err(|e| IngestError::InvalidProvider(e.to_string()))?;
        let entries = raw
            .into_iter()
            .map(|(id, fields)| {
                let fields = fields
                    .into_iter()
                    .filter_map(|(k, v)| match v {
                        serde_json::Value::String(s) => Some((k, s)),
                        serde_json::Value::Null => None,
                        other => Some((k, other.to_string())),
                    })
                    .collect();
                (id, fields)
            })
            .collect();
        Ok(Self { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl EnrichmentProvider for StubProvider {
    fn name(&self) -> &str {
        "stub"
    }

    fn lookup(&self, external_id: &str) -> Result<Option<FieldMap>, ProviderError> {
        Ok(self.entries.get(external_id).cloned())
    }
}

/// Live provider: `GET {base_url}/{external_id}` returning a flat JSON object.
#[cfg(feature = "http-enrichment")]
pub struct HttpProvider {
    base_url: String,
    client: reqwest::blocking::Client,
}

#[cfg(feature = "http-enrichment")]
impl HttpProvider {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            client: reqwest::blocking::Client::new(),
        }
    }
}

#[cfg(feature = "http-enrichment")]
impl EnrichmentProvider for HttpProvider {
    fn name(&self) -> &str {
        "http"
    }

    fn lookup(&self, external_id: &str) -> Result<Option<FieldMap>, ProviderError> {
        let err = |reason: String| ProviderError {
            provider: "http".into(),
            reason,
        };
        let resp = self
            .client
            .get(format!("{}/{}", self.base_url, external_id))
            .send()
            .map_err(|e| err(e.to_string()))?;
        if resp.status() == reqwest::StatusCode::NOT_FOUND {
            return Ok(None);
        }
        let resp = resp.error_for_status().map_err(|e| err(e.to_string()))?;
        let fields: BTreeMap<String, serde_json::Value> =
            resp.json().map_err(|e| err(e.to_string()))?;
        Ok(Some(
            fields
                .into_iter()
                .filter_map(|(k, v)| match v {
                    serde_json::Value::String(s) => Some((k, s)),
                    serde_json::Value::Null => None,
                    other => Some((k, other.to_string())),
                })
                .collect(),
        ))
    }
}

/// Converts a provider field to values, with the transform the property's
/// role suggests (provider formats vary more than curated datasets).
fn provider_values(registry: &Registry, label: &str, raw: &str) -> Result<Vec<Statement>, String> {
    let def = registry.resolve(label).map_err(|e| e.to_string())?;
    let transform = match def.id {
        core_props::DURATION => Transform::ToDurationSeconds,
        core_props::PUBLICATION_DATE => Transform::ToIsoDate,
        core_props::LANGUAGE => Transform::ToLanguageCode,
        _ => Transform::Identity,
    };
    apply_transform(&transform, raw)?
        .into_iter()
        .map(|s| Value::parse(def.datatype, &s, "und").map(|v| Statement::new(def.id, v)))
        .collect()
}

/// Fills absent fields of `draft` from `provider`. Fields already present
/// are never touched. Misses and failures leave the draft unchanged and are
/// reported as warnings.
pub fn enrich(
    mut draft: ItemDraft,
    provider: &dyn EnrichmentProvider,
    registry: &Registry,
) -> (ItemDraft, Vec<String>) {
    let mut warnings = Vec::new();
    let Some(ext) = draft
        .first(core_props::EXTERNAL_ID)
        .and_then(Value::as_str)
        .map(str::to_string)
    else {
        return (draft, warnings);
    };
    let fields = match provider.lookup(&ext) {
        Ok(Some(fields)) => fields,
        Ok(None) => {
            warnings.push(format!("{}: no entry for '{ext}'", provider.name()));
            return (draft, warnings);
        }
        Err(e) => {
            warnings.push(e.to_string());
            return (draft, warnings);
        }
    };
    for (label, raw) in fields {
        if label == DESCRIPTION_TARGET {
            if draft.item.description.is_none() && !raw.trim().is_empty() {
                draft.item.description = Some(raw);
            }
            continue;
        }
        let Ok(def) = registry.resolve(&label) else {
            warnings.push(format!("{}: unknown field '{label}'", provider.name()));
            continue;
        };
        if def.id == core_props::TITLE || draft.has(def.id) {
            continue;
        }
        match provider_values(registry, &label, &raw) {
            Ok(statements) => draft.item.statements.extend(statements),
            Err(reason) => warnings.push(format!("{}: field '{label}': {reason}", provider.name())),
        }
    }
    (draft, warnings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NewItem;

    fn draft(statements: Vec<Statement>) -> ItemDraft {
        let mut item = NewItem::labelled("en", "X");
        item.statements = statements;
        ItemDraft {
            source_line: 1,
            item,
        }
    }

    fn ext(id: &str) -> Statement {
        Statement::new(core_props::EXTERNAL_ID, Value::ExternalId(id.into()))
    }

    fn stub() -> StubProvider {
        StubProvider::from_json(
            r#"{"abc": {"duration": 1200, "language": "English", "description": "From the API", "bogus": "1"},
                "bad": {"duration": "forever"}}"#,
        )
        .unwrap()
    }

    struct Failing;
    impl EnrichmentProvider for Failing {
        fn name(&self) -> &str {
            "failing"
        }
        fn lookup(&self, _: &str) -> Result<Option<FieldMap>, ProviderError> {
            Err(ProviderError {
                provider: "failing".into(),
                reason: "timeout".into(),
            })
        }
    }

    #[test]
    fn fills_absent_fields() {
        let r = Registry::core();
        let (out, warnings) = enrich(draft(vec![ext("abc")]), &stub(), &r);
        assert_eq!(
            out.first(core_props::DURATION),
            Some(&Value::Quantity(1200))
        );
        assert_eq!(out.first(core_props::LANGUAGE), Some(&Value::text("en")));
        assert_eq!(out.item.description.as_deref(), Some("From the API"));
        assert_eq!(warnings.len(), 1, "unknown field warned: {warnings:?}");
    }

    #[test]
    fn never_overwrites() {
        let r = Registry::core();
        let before = draft(vec![
            ext("abc"),
            Statement::new(core_props::LANGUAGE, Value::text("de")),
        ]);
        let (out, _) = enrich(before, &stub(), &r);
        let langs: Vec<_> = out
            .item
            .statements
            .iter()
            .filter(|s| s.property == core_props::LANGUAGE)
            .collect();
        assert_eq!(langs.len(), 1);
        assert_eq!(langs[0].value, Value::text("de"));
    }

    #[test]
    fn miss_and_failure_leave_draft() {
        let r = Registry::core();
        let original = draft(vec![ext("zzz")]);
        let (out, warnings) = enrich(original.clone(), &stub(), &r);
        assert_eq!(out, original);
        assert_eq!(warnings.len(), 1);
        let (out, warnings) = enrich(original.clone(), &Failing, &r);
        assert_eq!(out, original);
        assert!(warnings[0].contains("timeout"));
    }

    #[test]
    fn bad_provider_value_is_warning() {
        let r = Registry::core();
        let original = draft(vec![ext("bad")]);
        let (out, warnings) = enrich(original.clone(), &stub(), &r);
        assert_eq!(out, original);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn no_external_id_no_lookup() {
        let r = Registry::core();
        let (out, warnings) = enrich(draft(vec![]), &Failing, &r);
        assert!(warnings.is_empty());
        assert_eq!(out, draft(vec![]));
    }
}
