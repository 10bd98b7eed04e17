//! Flat query-string encoding of a [`MediaQuery`].
//!
//! `lang`, `topic`, `publisher` and `type` become equals atoms, `after` and
//! `before` an inclusive publication-date range, `minSeconds`/`maxSeconds`
//! an inclusive duration range. Equals keys may repeat; every atom must hold.

use serde::{Deserialize, Serialize};

use super::MediaQuery;
use crate::graph::{core_props, FilterAtom, FilterSet, Page, Value};
use crate::ids::PropertyId;

pub const DEFAULT_LIMIT: usize = 20;
pub const MAX_LIMIT: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("parameter '{name}': {reason}")]
    Invalid { name: String, reason: String },
    #[error("unknown parameter '{0}'")]
    Unknown(String),
}

fn invalid(name: &str, reason: impl Into<String>) -> ParamError {
    ParamError::Invalid {
        name: name.to_string(),
        reason: reason.into(),
    }
}

const EQUALS_PARAMS: [(&str, PropertyId); 4] = [
    ("lang", core_props::LANGUAGE),
    ("topic", core_props::TOPIC),
    ("publisher", core_props::PUBLISHER),
    ("type", core_props::MEDIA_TYPE),
];

/// One query-string pair, ready for URL encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: String,
}

impl Param {
    pub fn new(name: &str, value: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            value: value.into(),
        }
    }
}

/// Parses decoded query pairs. Empty values are ignored, so a form that
/// submits blank fields behaves like one that omits them.
pub fn parse_query<K, V>(pairs: impl IntoIterator<Item = (K, V)>) -> Result<MediaQuery, ParamError>
where
    K: AsRef<str>,
    V: AsRef<str>,
{
    let mut free_text = Vec::new();
    let mut filters = FilterSet::new();
    let (mut after, mut before) = (None, None);
    let (mut min, mut max) = (None, None);
    let mut offset = 0usize;
    let mut limit = DEFAULT_LIMIT;
    let mut browse_all = false;

    for (name, value) in pairs {
        let (name, value) = (name.as_ref(), value.as_ref().trim());
        if value.is_empty() {
            continue;
        }
        if let Some(&(_, property)) = EQUALS_PARAMS.iter().find(|(n, _)| *n == name) {
            filters.push(FilterAtom::Equals {
                property,
                value: Value::text(value),
            });
            continue;
        }
        match name {
            "q" => free_text.push(value.to_string()),
            // repeated bounds intersect, so appending a facet's params narrows
            "after" => after = after.max(Some(date(name, value)?)),
            "before" => before = tightest(before, date(name, value)?),
            "minSeconds" => min = min.max(Some(seconds(name, value)?)),
            "maxSeconds" => max = tightest(max, seconds(name, value)?),
            "offset" => {
                offset = value
                    .parse()
                    .map_err(|_| invalid(name, "expected a non-negative integer"))?
            }
            "limit" => {
                limit = value
                    .parse()
                    .ok()
                    .filter(|l| *l > 0)
                    .ok_or_else(|| invalid(name, "expected a positive integer"))?;
                limit = limit.min(MAX_LIMIT);
            }
            "all" => {
                browse_all = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(invalid(name, "expected true or false")),
                }
            }
            other => return Err(ParamError::Unknown(other.to_string())),
        }
    }
    if after.is_some() || before.is_some() {
        filters.push(FilterAtom::DateRange {
            property: core_props::PUBLICATION_DATE,
            from: after,
            to: before,
        });
    }
    if min.is_some() || max.is_some() {
        filters.push(FilterAtom::QuantityRange {
            property: core_props::DURATION,
            min,
            max,
        });
    }
    Ok(MediaQuery {
        free_text,
        filters,
        page: Page::new(offset, limit),
        browse_all,
    })
}

fn tightest<T: Ord>(current: Option<T>, new: T) -> Option<T> {
    Some(match current {
        Some(c) => c.min(new),
        None => new,
    })
}

fn date(name: &str, value: &str) -> Result<chrono::NaiveDate, ParamError> {
    chrono::NaiveDate::parse_from_str(value, "%Y-%m-%d")
        .map_err(|_| invalid(name, "expected YYYY-MM-DD"))
}

fn seconds(name: &str, value: &str) -> Result<i64, ParamError> {
    value
        .parse::<i64>()
        .ok()
        .filter(|s| *s >= 0)
        .ok_or_else(|| invalid(name, "expected non-negative whole seconds"))
}

/// The flat parameters that select exactly `atom`, or `None` when the atom
/// has no flat encoding.
pub fn atom_params(atom: &FilterAtom) -> Option<Vec<Param>> {
    match atom {
        FilterAtom::Equals { property, value } => {
            let (name, _) = EQUALS_PARAMS.iter().find(|(_, p)| p == property)?;
            Some(vec![Param::new(name, value.as_str()?)])
        }
        FilterAtom::DateRange { property, from, to }
            if *property == core_props::PUBLICATION_DATE =>
        {
            let mut out = Vec::new();
            if let Some(from) = from {
                out.push(Param::new("after", from.to_string()));
            }
            if let Some(to) = to {
                out.push(Param::new("before", to.to_string()));
            }
            Some(out)
        }
        FilterAtom::QuantityRange { property, min, max } if *property == core_props::DURATION => {
            let mut out = Vec::new();
            if let Some(min) = min {
                out.push(Param::new("minSeconds", min.to_string()));
            }
            if let Some(max) = max {
                out.push(Param::new("maxSeconds", max.to_string()));
            }
            Some(out)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn repeated_bounds_intersect() {
        let q = parse_query([
            ("after", "2013-01-01"),
            ("before", "2014-12-31"),
            ("after", "2014-01-01"),
            ("before", "2015-12-31"),
            ("maxSeconds", "600"),
            ("minSeconds", "10"),
            ("maxSeconds", "3600"),
        ])
        .unwrap();
        assert_eq!(
            q.filters.atoms(),
            &[
                FilterAtom::DateRange {
                    property: core_props::PUBLICATION_DATE,
                    from: Some(d("2014-01-01")),
                    to: Some(d("2014-12-31"))
                },
                FilterAtom::QuantityRange {
                    property: core_props::DURATION,
                    min: Some(10),
                    max: Some(600)
                },
            ]
        );
    }

    #[test]
    fn flat_params_to_query() {
        let q = parse_query([
            ("q", "fatty liver"),
            ("after", "2023-01-01"),
            ("lang", "en"),
            ("minSeconds", "60"),
        ])
        .unwrap();
        assert_eq!(q.free_text, vec!["fatty liver"]);
        assert!(!q.browse_all);
        assert_eq!(q.page, Page::new(0, DEFAULT_LIMIT));
        assert_eq!(
            q.filters.atoms(),
            &[
                FilterAtom::Equals {
                    property: core_props::LANGUAGE,
                    value: Value::text("en")
                },
                FilterAtom::DateRange {
                    property: core_props::PUBLICATION_DATE,
                    from: Some(d("2023-01-01")),
                    to: None
                },
                FilterAtom::QuantityRange {
                    property: core_props::DURATION,
                    min: Some(60),
                    max: None
                },
            ]
        );
    }

    #[test]
    fn paging_is_clamped() {
        let q = parse_query([("all", "true"), ("offset", "40"), ("limit", "500")]).unwrap();
        assert!(q.browse_all);
        assert_eq!(q.page, Page::new(40, MAX_LIMIT));
        assert!(parse_query([("limit", "0")]).is_err());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(
            parse_query([("after", "2023")]),
            Err(ParamError::Invalid { .. })
        ));
        assert!(matches!(
            parse_query([("minSeconds", "-1")]),
            Err(ParamError::Invalid { .. })
        ));
        assert!(matches!(
            parse_query([("colour", "red")]),
            Err(ParamError::Unknown(_))
        ));
    }

    #[test]
    fn blank_values_ignored() {
        let q = parse_query([("q", " "), ("lang", "")]).unwrap();
        assert!(q.free_text.is_empty() && q.filters.is_empty());
    }

    #[test]
    fn atom_params_round_trip() {
        let atoms = [
            FilterAtom::Equals {
                property: core_props::TOPIC,
                value: Value::text("history"),
            },
            FilterAtom::DateRange {
                property: core_props::PUBLICATION_DATE,
                from: Some(d("2013-01-01")),
                to: Some(d("2013-12-31")),
            },
            FilterAtom::QuantityRange {
                property: core_props::DURATION,
                min: Some(600),
                max: Some(3600),
            },
        ];
        for atom in atoms {
            let params = atom_params(&atom).unwrap();
            let q =
                parse_query(params.iter().map(|p| (p.name.as_str(), p.value.as_str()))).unwrap();
            assert_eq!(q.filters.atoms(), &[atom]);
        }
        let keyword = FilterAtom::Equals {
            property: core_props::KEYWORD,
            value: Value::text("x"),
        };
        assert_eq!(atom_params(&keyword), None);
    }
}
