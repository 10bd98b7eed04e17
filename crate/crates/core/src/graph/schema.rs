//! Property registry and the built-in core schema.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::value::{Datatype, Value};
use crate::ids::PropertyId;

/// Whether an item may hold more than one statement for a property.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cardinality {
    Single,
    Multi,
}

/// Extra value checks beyond the datatype.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "kebab-case")]
pub enum Constraint {
    None,
    OneOf(Vec<String>),
    /// Two lowercase ASCII letters.
    LanguageCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyDef {
    pub id: PropertyId,
    pub label: String,
    pub datatype: Datatype,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    pub cardinality: Cardinality,
    #[serde(default = "no_constraint", skip_serializing_if = "is_unconstrained")]
    pub constraint: Constraint,
}

fn no_constraint() -> Constraint {
    Constraint::None
}

fn is_unconstrained(c: &Constraint) -> bool {
    *c == Constraint::None
}

/// Ids of the built-in properties.
pub mod core_props {
    use crate::ids::PropertyId;

    /// Backed by the item's labels rather than statements.
    pub const TITLE: PropertyId = PropertyId::new(1);
    pub const MEDIA_TYPE: PropertyId = PropertyId::new(2);
    pub const PLATFORM: PropertyId = PropertyId::new(3);
    pub const EXTERNAL_ID: PropertyId = PropertyId::new(4);
    pub const URL: PropertyId = PropertyId::new(5);
    pub const CREATOR: PropertyId = PropertyId::new(6);
    pub const PUBLISHER: PropertyId = PropertyId::new(7);
    pub const LANGUAGE: PropertyId = PropertyId::new(8);
    pub const DURATION: PropertyId = PropertyId::new(9);
    pub const PUBLICATION_DATE: PropertyId = PropertyId::new(10);
    pub const TOPIC: PropertyId = PropertyId::new(11);
    pub const KEYWORD: PropertyId = PropertyId::new(12);
    pub const LICENSE: PropertyId = PropertyId::new(13);
    pub const SPONSOR: PropertyId = PropertyId::new(14);
    pub const MODERATOR: PropertyId = PropertyId::new(15);
    pub const SOURCE_PROVIDED: PropertyId = PropertyId::new(16);
    pub const SERIES: PropertyId = PropertyId::new(17);
    pub const SERIES_POSITION: PropertyId = PropertyId::new(18);
    pub const CAPTIONS_AVAILABLE: PropertyId = PropertyId::new(19);
    pub const CONSENT: PropertyId = PropertyId::new(20);

    /// Number of built-in properties.
    pub const COUNT: usize = 20;
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemaError {
    #[error("unknown property '{0}'")]
    UnknownProperty(String),
    #[error("property {property} expects {expected}, got {actual}")]
    DatatypeMismatch {
        property: String,
        expected: Datatype,
        actual: Datatype,
    },
    #[error("property {property}: {reason}")]
    InvalidValue { property: String, reason: String },
    #[error("property id {0} already registered")]
    DuplicateId(PropertyId),
    #[error("property label '{0}' already registered")]
    DuplicateLabel(String),
    #[error("property {0} already registered with datatype {1}")]
    DatatypeChange(PropertyId, Datatype),
}

/// Property definitions keyed by id, with a label index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Registry {
    defs: BTreeMap<PropertyId, PropertyDef>,
    by_label: HashMap<String, PropertyId>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The 20-property core schema.
    pub fn core() -> Self {
        use core_props::*;
        use Cardinality::{Multi, Single};
        use Datatype as D;

        let defs = [
            (TITLE, "title", D::MonolingualText, Single, Constraint::None),
            (
                MEDIA_TYPE,
                "media-type",
                D::Text,
                Single,
                Constraint::OneOf(vec!["video".into(), "podcast".into()]),
            ),
            (PLATFORM, "platform", D::Text, Single, Constraint::None),
            (
                EXTERNAL_ID,
                "external-id",
                D::ExternalId,
                Single,
                Constraint::None,
            ),
            (URL, "url", D::ExternalId, Single, Constraint::None),
            (CREATOR, "creator", D::Text, Multi, Constraint::None),
            (
                PUBLISHER,
                "publisher-institution",
                D::Text,
                Single,
                Constraint::None,
            ),
            (
                LANGUAGE,
                "language",
                D::Text,
                Single,
                Constraint::LanguageCode,
            ),
            (DURATION, "duration", D::Quantity, Single, Constraint::None),
            (
                PUBLICATION_DATE,
                "publication-date",
                D::Date,
                Single,
                Constraint::None,
            ),
            (TOPIC, "topic", D::Text, Multi, Constraint::None),
            (KEYWORD, "keyword", D::Text, Multi, Constraint::None),
            (LICENSE, "license", D::Text, Single, Constraint::None),
            (SPONSOR, "sponsor", D::Text, Multi, Constraint::None),
            (MODERATOR, "moderator", D::Text, Multi, Constraint::None),
            (
                SOURCE_PROVIDED,
                "source-provided",
                D::Text,
                Multi,
                Constraint::None,
            ),
            (SERIES, "series", D::Text, Single, Constraint::None),
            (
                SERIES_POSITION,
                "series-position",
                D::Quantity,
                Single,
                Constraint::None,
            ),
            (
                CAPTIONS_AVAILABLE,
                "captions-available",
                D::Boolean,
                Single,
                Constraint::None,
            ),
            (CONSENT, "consent", D::Boolean, Single, Constraint::None),
        ];

        let mut registry = Self::empty();
        for (id, label, datatype, cardinality, constraint) in defs {
            let unit = (id == DURATION).then(|| "seconds".to_string());
            registry
                .register(PropertyDef {
                    id,
                    label: label.to_string(),
                    datatype,
                    unit,
                    cardinality,
                    constraint,
                })
                .expect("core schema is consistent");
        }
        registry
    }

    /// Adds a definition. Re-registering an identical definition is a no-op;
    /// changing the datatype of an existing id is rejected.
    pub fn register(&mut self, def: PropertyDef) -> Result<(), SchemaError> {
        if let Some(existing) = self.defs.get(&def.id) {
            if existing.datatype != def.datatype {
                return Err(SchemaError::DatatypeChange(def.id, existing.datatype));
            }
            if *existing == def {
                return Ok(());
            }
            return Err(SchemaError::DuplicateId(def.id));
        }
        if self.by_label.contains_key(&def.label) {
            return Err(SchemaError::DuplicateLabel(def.label));
        }
        self.by_label.insert(def.label.clone(), def.id);
        self.defs.insert(def.id, def);
        Ok(())
    }

    pub fn get(&self, id: PropertyId) -> Option<&PropertyDef> {
        self.defs.get(&id)
    }

    pub fn by_label(&self, label: &str) -> Option<&PropertyDef> {
        self.by_label.get(label).and_then(|id| self.defs.get(id))
    }

    /// Looks up by id string (`"P8"`) or label (`"language"`).
    pub fn resolve(&self, key: &str) -> Result<&PropertyDef, SchemaError> {
        key.parse::<PropertyId>()
            .ok()
            .and_then(|id| self.get(id))
            .or_else(|| self.by_label(key))
            .ok_or_else(|| SchemaError::UnknownProperty(key.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &PropertyDef> {
        self.defs.values()
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn next_free_id(&self) -> PropertyId {
        PropertyId::new(self.defs.keys().next_back().map_or(1, |id| id.number() + 1))
    }

    /// Checks a value against the property's datatype and constraints.
    pub fn check(&self, property: PropertyId, value: &Value) -> Result<&PropertyDef, SchemaError> {
        let def = self
            .get(property)
            .ok_or_else(|| SchemaError::UnknownProperty(property.to_string()))?;
        if value.datatype() != def.datatype {
            return Err(SchemaError::DatatypeMismatch {
                property: def.label.clone(),
                expected: def.datatype,
                actual: value.datatype(),
            });
        }
        let invalid = |reason: String| SchemaError::InvalidValue {
            property: def.label.clone(),
            reason,
        };
        match value {
            Value::Quantity(q) if *q < 0 => {
                return Err(invalid(format!("quantity {q} is negative")));
            }
            Value::MonolingualText(m) if !is_language_tag(&m.language) => {
                return Err(invalid(format!("bad language tag '{}'", m.language)));
            }
            Value::Text(s) | Value::ExternalId(s) if s.trim().is_empty() => {
                return Err(invalid("empty text".into()));
            }
            Value::MonolingualText(m) if m.text.trim().is_empty() => {
                return Err(invalid("empty text".into()));
            }
            _ => {}
        }
        match &def.constraint {
            Constraint::None => {}
            Constraint::OneOf(allowed) => {
                let s = value.as_str().unwrap_or_default();
                if !allowed.iter().any(|a| a == s) {
                    return Err(invalid(format!("'{s}' not one of {allowed:?}")));
                }
            }
            Constraint::LanguageCode => {
                let s = value.as_str().unwrap_or_default();
                if !is_iso639_1(s) {
                    return Err(invalid(format!("'{s}' is not an ISO 639-1 code")));
                }
            }
        }
        Ok(def)
    }
}

pub fn is_iso639_1(s: &str) -> bool {
    s.len() == 2 && s.bytes().all(|b| b.is_ascii_lowercase())
}

/// Label language tags: ISO 639-1, or a three-letter code such as `mul`/`und`.
pub fn is_language_tag(s: &str) -> bool {
    (2..=3).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_lowercase())
}
