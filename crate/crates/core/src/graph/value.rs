use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::ids::ItemId;

/// Statement datatypes understood by the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Datatype {
    Text,
    MonolingualText,
    Quantity,
    Date,
    ItemRef,
    ExternalId,
    Boolean,
}

impl Datatype {
    pub fn name(self) -> &'static str {
        match self {
            Datatype::Text => "text",
            Datatype::MonolingualText => "monolingual-text",
            Datatype::Quantity => "quantity",
            Datatype::Date => "date",
            Datatype::ItemRef => "item-ref",
            Datatype::ExternalId => "external-id",
            Datatype::Boolean => "boolean",
        }
    }

    /// Datatypes whose values are strings and can be substring-matched.
    pub fn is_textual(self) -> bool {
        matches!(
            self,
            Datatype::Text | Datatype::MonolingualText | Datatype::ExternalId
        )
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monolingual {
    pub language: String,
    pub text: String,
}

/// A typed statement value.
///
/// Quantities are whole non-negative numbers in the property's unit
/// (durations are seconds), which keeps bucket boundaries exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum Value {
    Text(String),
    MonolingualText(Monolingual),
    Quantity(i64),
    Date(NaiveDate),
    ItemRef(ItemId),
    ExternalId(String),
    Boolean(bool),
}

impl Value {
    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn monolingual(language: impl Into<String>, text: impl Into<String>) -> Self {
        Value::MonolingualText(Monolingual {
            language: language.into(),
            text: text.into(),
        })
    }

    pub fn datatype(&self) -> Datatype {
        match self {
            Value::Text(_) => Datatype::Text,
            Value::MonolingualText(_) => Datatype::MonolingualText,
            Value::Quantity(_) => Datatype::Quantity,
            Value::Date(_) => Datatype::Date,
            Value::ItemRef(_) => Datatype::ItemRef,
            Value::ExternalId(_) => Datatype::ExternalId,
            Value::Boolean(_) => Datatype::Boolean,
        }
    }

    /// String payload for textual datatypes.
    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) | Value::ExternalId(s) => Some(s),
            Value::MonolingualText(m) => Some(&m.text),
            _ => None,
        }
    }

    pub fn as_quantity(&self) -> Option<i64> {
        match self {
            Value::Quantity(q) => Some(*q),
            _ => None,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            Value::Date(d) => Some(*d),
            _ => None,
        }
    }

    /// Parses a raw string into a value of `datatype`.
    ///
    /// `language` is used for monolingual text and ignored otherwise.
    pub fn parse(datatype: Datatype, raw: &str, language: &str) -> Result<Value, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(format!("empty {datatype} value"));
        }
        match datatype {
            Datatype::Text => Ok(Value::Text(raw.to_string())),
            Datatype::ExternalId => Ok(Value::ExternalId(raw.to_string())),
            Datatype::MonolingualText => Ok(Value::monolingual(language, raw)),
            Datatype::Quantity => raw
                .parse::<i64>()
                .map(Value::Quantity)
                .map_err(|_| format!("'{raw}' is not a whole number")),
            Datatype::Date => NaiveDate::parse_from_str(raw, "%Y-%m-%d")
                .map(Value::Date)
                .map_err(|_| format!("'{raw}' is not a calendar date (YYYY-MM-DD)")),
            Datatype::ItemRef => raw
                .parse::<ItemId>()
                .map(Value::ItemRef)
                .map_err(|e| e.to_string()),
            Datatype::Boolean => match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(Value::Boolean(true)),
                "false" | "no" | "0" => Ok(Value::Boolean(false)),
                _ => Err(format!("'{raw}' is not a boolean")),
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) | Value::ExternalId(s) => f.write_str(s),
            Value::MonolingualText(m) => write!(f, "{} ({})", m.text, m.language),
            Value::Quantity(q) => write!(f, "{q}"),
            Value::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
            Value::ItemRef(id) => write!(f, "{id}"),
            Value::Boolean(b) => write!(f, "{b}"),
        }
    }
}
