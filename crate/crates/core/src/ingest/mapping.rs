//! Declarative field mapping from raw records to item drafts.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::parse::RawRecord;
use super::IngestError;
use crate::graph::{core_props, Item, NewItem, Registry, Statement, Value};
use crate::ids::PropertyId;
use crate::text::tokenize;

/// Pseudo-target that fills the item description instead of a statement.
pub const DESCRIPTION_TARGET: &str = "description";

/// Label language used when neither the record nor the mapping names one.
pub const UNDETERMINED_LANGUAGE: &str = "und";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Transform {
    #[default]
    Identity,
    ToDurationSeconds,
    ToIsoDate,
    SplitList {
        delimiter: String,
    },
    ToLanguageCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRule {
    pub source: String,
    /// Property label or id, or `description`.
    pub target: String,
    #[serde(default)]
    pub transform: Transform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MappingConfig {
    pub rules: Vec<MappingRule>,
    /// Language for titles when the record has no language field.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_language: Option<String>,
}

impl MappingConfig {
    pub fn from_json(json: &str) -> Result<Self, IngestError> {
        serde_json::from_str(json).map_err(|e| IngestError::InvalidMapping(e.to_string()))
    }

    /// Resolves targets against the registry; a title rule is mandatory.
    pub fn resolve(&self, registry: &Registry) -> Result<ResolvedMapping, IngestError> {
        let mut rules = Vec::with_capacity(self.rules.len());
        let mut has_title = false;
        for rule in &self.rules {
            if let Transform::SplitList { delimiter } = &rule.transform {
                if delimiter.is_empty() {
                    return Err(IngestError::InvalidMapping(format!(
                        "rule for '{}' has an empty split delimiter",
                        rule.source
                    )));
                }
            }
            let target = if rule.target == DESCRIPTION_TARGET {
                Target::Description
            } else {
                let def = registry.resolve(&rule.target).map_err(|_| {
                    IngestError::InvalidMapping(format!("unknown target '{}'", rule.target))
                })?;
                has_title |= def.id == core_props::TITLE;
                Target::Property(def.id)
            };
            rules.push((rule.clone(), target));
        }
        if !has_title {
            return Err(IngestError::InvalidMapping(
                "mapping has no title rule".into(),
            ));
        }
        if let Some(lang) = &self.default_language {
            if !crate::graph::schema::is_language_tag(lang) {
                return Err(IngestError::InvalidMapping(format!(
                    "bad default language '{lang}'"
                )));
            }
        }
        Ok(ResolvedMapping {
            rules,
            default_language: self
                .default_language
                .clone()
                .unwrap_or_else(|| UNDETERMINED_LANGUAGE.to_string()),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Property(PropertyId),
    Description,
}

#[derive(Debug, Clone)]
pub struct ResolvedMapping {
    rules: Vec<(MappingRule, Target)>,
    default_language: String,
}

/// Identity used to recognize a record already in the store.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DedupKey {
    External {
        platform: String,
        external_id: String,
    },
    TitleDate {
        title: String,
        date: Option<NaiveDate>,
    },
}

impl DedupKey {
    /// (platform, external-id) when an external id exists, otherwise the
    /// normalized title with the publication date.
    pub fn of(labels: &BTreeMap<String, String>, statements: &[Statement]) -> Self {
        let first = |p: PropertyId| {
            statements
                .iter()
                .find(|s| s.property == p)
                .map(|s| &s.value)
        };
        if let Some(ext) = first(core_props::EXTERNAL_ID).and_then(Value::as_str) {
            return DedupKey::External {
                platform: first(core_props::PLATFORM)
                    .and_then(Value::as_str)
                    .map(|p| p.trim().to_lowercase())
                    .unwrap_or_default(),
                external_id: ext.trim().to_string(),
            };
        }
        let title = labels
            .values()
            .next()
            .map(|t| tokenize::words(t).collect::<Vec<_>>().join(" "))
            .unwrap_or_default();
        DedupKey::TitleDate {
            title,
            date: first(core_props::PUBLICATION_DATE).and_then(Value::as_date),
        }
    }

    pub fn of_item(item: &Item) -> Self {
        Self::of(&item.labels, &item.statements)
    }
}

/// A mapped record awaiting enrichment and commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemDraft {
    pub source_line: usize,
    pub item: NewItem,
}

impl ItemDraft {
    pub fn dedup_key(&self) -> DedupKey {
        DedupKey::of(&self.item.labels, &self.item.statements)
    }

    pub fn has(&self, property: PropertyId) -> bool {
        if property == core_props::TITLE {
            return !self.item.labels.is_empty();
        }
        self.item.statements.iter().any(|s| s.property == property)
    }

    pub fn first(&self, property: PropertyId) -> Option<&Value> {
        self.item
            .statements
            .iter()
            .find(|s| s.property == property)
            .map(|s| &s.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub line: usize,
    pub field: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mapped {
    pub draft: ItemDraft,
    /// Transform failures; the field is left out of the draft.
    pub field_errors: Vec<FieldError>,
}

/// Applies every rule to a record. Fails only when no title results.
pub fn map_record(
    record: &RawRecord,
    mapping: &ResolvedMapping,
    registry: &Registry,
) -> Result<Mapped, IngestError> {
    let mut titles: Vec<String> = Vec::new();
    let mut description = None;
    let mut statements = Vec::new();
    let mut field_errors = Vec::new();
    let line = record.source_line;

    for (rule, target) in &mapping.rules {
        let Some(raw) = record
            .fields
            .get(&rule.source)
            .filter(|v| !v.trim().is_empty())
        else {
            continue;
        };
        let outputs = match apply_transform(&rule.transform, raw) {
            Ok(v) => v,
            Err(reason) => {
                field_errors.push(FieldError {
                    line,
                    field: rule.source.clone(),
                    reason,
                });
                continue;
            }
        };
        match *target {
            Target::Description => description = outputs.into_iter().next(),
            Target::Property(p) if p == core_props::TITLE => titles.extend(outputs),
            Target::Property(p) => {
                let def = registry.get(p).expect("resolved against this registry");
                for out in outputs {
                    match Value::parse(def.datatype, &out, &mapping.default_language) {
                        Ok(value) => statements.push(Statement::new(p, value)),
                        Err(reason) => field_errors.push(FieldError {
                            line,
                            field: rule.source.clone(),
                            reason,
                        }),
                    }
                }
            }
        }
    }

    let title = titles
        .into_iter()
        .find(|t| !t.trim().is_empty())
        .ok_or(IngestError::MissingTitle { line })?;
    let language = statements
        .iter()
        .find(|s| s.property == core_props::LANGUAGE)
        .and_then(|s| s.value.as_str())
        .filter(|l| crate::graph::schema::is_iso639_1(l))
        .unwrap_or(&mapping.default_language)
        .to_string();
    let item = NewItem {
        labels: BTreeMap::from([(language, title.trim().to_string())]),
        description,
        statements,
    };
    Ok(Mapped {
        draft: ItemDraft {
            source_line: line,
            item,
        },
        field_errors,
    })
}

pub fn apply_transform(transform: &Transform, raw: &str) -> Result<Vec<String>, String> {
    let raw = raw.trim();
    match transform {
        Transform::Identity => Ok(vec![raw.to_string()]),
        Transform::ToDurationSeconds => parse_duration(raw).map(|s| vec![s.to_string()]),
        Transform::ToIsoDate => parse_date(raw).map(|d| vec![d.format("%Y-%m-%d").to_string()]),
        Transform::SplitList { delimiter } => Ok(raw
            .split(delimiter.as_str())
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()),
        Transform::ToLanguageCode => language_code(raw).map(|c| vec![c.to_string()]),
    }
}

/// Whole seconds from `SS`, `MM:SS`, `HH:MM:SS` or ISO 8601 `PT#H#M#S`.
pub fn parse_duration(raw: &str) -> Result<i64, String> {
    let bad = || format!("'{raw}' is not a duration");
    if let Some(iso) = raw.strip_prefix("PT").or_else(|| raw.strip_prefix("pt")) {
        return parse_iso_duration(iso).ok_or_else(bad);
    }
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() > 3
        || parts
            .iter()
            .any(|p| p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()))
    {
        return Err(bad());
    }
    let nums: Vec<i64> = parts
        .iter()
        .map(|p| p.parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    if nums.len() > 1 && nums[1..].iter().any(|&n| n >= 60) {
        return Err(bad());
    }
    Ok(nums.iter().fold(0, |acc, n| acc * 60 + n))
}

fn parse_iso_duration(s: &str) -> Option<i64> {
    let mut total = 0i64;
    let mut num = String::new();
    for ch in s.chars() {
        match ch {
            '0'..='9' => num.push(ch),
            'H' | 'M' | 'S' => {
                let n: i64 = num.parse().ok()?;
                num.clear();
                total += n * match ch {
                    'H' => 3600,
                    'M' => 60,
                    _ => 1,
                };
            }
            _ => return None,
        }
    }
    (num.is_empty() && !s.is_empty()).then_some(total)
}

/// Calendar date from ISO dates, `YYYY/MM/DD`, `DD.MM.YYYY` or RFC 3339 timestamps.
pub fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    for fmt in ["%Y-%m-%d", "%Y/%m/%d", "%d.%m.%Y"] {
        if let Ok(d) = NaiveDate::parse_from_str(raw, fmt) {
            return Ok(d);
        }
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
        return Ok(dt.date_naive());
    }
    if let Ok(dt) = NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S") {
        return Ok(dt.date());
    }
    Err(format!("'{raw}' is not a recognized date"))
}

/// ISO 639-1 code from a code, a regional tag or a language name.
pub fn language_code(raw: &str) -> Result<&'static str, String> {
    const TABLE: &[(&str, &[&str])] = &[
        ("en", &["en", "eng", "english", "englisch"]),
        ("de", &["de", "deu", "ger", "german", "deutsch"]),
        (
            "fr",
            &[
                "fr",
                "fra",
                "fre",
                "french",
                "français",
                "francais",
                "französisch",
            ],
        ),
        (
            "es",
            &["es", "spa", "spanish", "español", "espanol", "spanisch"],
        ),
        ("it", &["it", "ita", "italian", "italiano", "italienisch"]),
        (
            "nl",
            &["nl", "nld", "dut", "dutch", "nederlands", "niederländisch"],
        ),
        (
            "pt",
            &["pt", "por", "portuguese", "português", "portugiesisch"],
        ),
        ("pl", &["pl", "pol", "polish", "polski", "polnisch"]),
        ("ru", &["ru", "rus", "russian", "русский", "russisch"]),
        ("tr", &["tr", "tur", "turkish", "türkçe", "türkisch"]),
        ("zh", &["zh", "zho", "chi", "chinese", "中文", "chinesisch"]),
        ("ja", &["ja", "jpn", "japanese", "日本語", "japanisch"]),
        ("ar", &["ar", "ara", "arabic", "العربية", "arabisch"]),
        ("sv", &["sv", "swe", "swedish", "svenska", "schwedisch"]),
        ("da", &["da", "dan", "danish", "dansk", "dänisch"]),
    ];
    let lowered = raw.trim().to_lowercase();
    let base = lowered.split(['-', '_']).next().unwrap_or_default();
    TABLE
        .iter()
        .find(|(_, names)| names.contains(&base) || names.contains(&lowered.as_str()))
        .map(|(code, _)| *code)
        .ok_or_else(|| format!("'{raw}' is not a known language"))
}
