//! Filter suggestions with exact counts over a result set.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use super::params::{atom_params, Param};
use crate::graph::{core_props, FilterAtom, Item, Value};
use crate::ids::PropertyId;

/// Per-kind cap on suggested values.
pub const MAX_VALUES_PER_FACET: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FacetKind {
    Language,
    Topic,
    MediaType,
    PublicationYear,
    DurationBucket,
    PublisherInstitution,
}

impl FacetKind {
    pub const ALL: [FacetKind; 6] = [
        FacetKind::Language,
        FacetKind::Topic,
        FacetKind::MediaType,
        FacetKind::PublicationYear,
        FacetKind::DurationBucket,
        FacetKind::PublisherInstitution,
    ];

    pub fn property(self) -> PropertyId {
        match self {
            FacetKind::Language => core_props::LANGUAGE,
            FacetKind::Topic => core_props::TOPIC,
            FacetKind::MediaType => core_props::MEDIA_TYPE,
            FacetKind::PublicationYear => core_props::PUBLICATION_DATE,
            FacetKind::DurationBucket => core_props::DURATION,
            FacetKind::PublisherInstitution => core_props::PUBLISHER,
        }
    }
}

/// Duration classes, in seconds: under 10 minutes, 10 to 60 minutes
/// inclusive, over 60 minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DurationBucket {
    Short,
    Medium,
    Long,
}

impl DurationBucket {
    pub const ALL: [DurationBucket; 3] = [Self::Short, Self::Medium, Self::Long];

    pub fn of(seconds: i64) -> Self {
        match seconds {
            s if s < 600 => Self::Short,
            s if s <= 3600 => Self::Medium,
            _ => Self::Long,
        }
    }

    /// Inclusive second bounds.
    pub fn bounds(self) -> (Option<i64>, Option<i64>) {
        match self {
            Self::Short => (None, Some(599)),
            Self::Medium => (Some(600), Some(3600)),
            Self::Long => (Some(3601), None),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Short => "<10 min",
            Self::Medium => "10-60 min",
            Self::Long => ">60 min",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Facet {
    pub kind: FacetKind,
    pub property: PropertyId,
    /// Display value: the text value, a year, or a duration bucket label.
    pub value: String,
    pub count: usize,
    /// Atom that narrows the current results to exactly `count` items.
    pub filter: FilterAtom,
    /// The same atom as flat search parameters.
    #[serde(default)]
    pub params: Vec<Param>,
}

/// Sort key inside one facet kind: numeric for years, ordinal for buckets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum FacetKey {
    Text(String),
    Year(i32),
    Bucket(DurationBucket),
}

impl FacetKey {
    fn display(&self) -> String {
        match self {
            FacetKey::Text(s) => s.clone(),
            FacetKey::Year(y) => y.to_string(),
            FacetKey::Bucket(b) => b.label().to_string(),
        }
    }

    fn filter(&self, kind: FacetKind) -> FilterAtom {
        let property = kind.property();
        match self {
            FacetKey::Text(s) => FilterAtom::Equals {
                property,
                value: Value::Text(s.clone()),
            },
            FacetKey::Year(y) => FilterAtom::DateRange {
                property,
                from: NaiveDate::from_ymd_opt(*y, 1, 1),
                to: NaiveDate::from_ymd_opt(*y, 12, 31),
            },
            FacetKey::Bucket(b) => {
                let (min, max) = b.bounds();
                FilterAtom::QuantityRange { property, min, max }
            }
        }
    }
}

fn keys_of(kind: FacetKind, item: &Item) -> Vec<FacetKey> {
    let values = item.values(kind.property());
    let mut keys: Vec<FacetKey> = match kind {
        FacetKind::PublicationYear => values
            .filter_map(Value::as_date)
            .map(|d| FacetKey::Year(d.year()))
            .collect(),
        FacetKind::DurationBucket => values
            .filter_map(Value::as_quantity)
            .map(|s| FacetKey::Bucket(DurationBucket::of(s)))
            .collect(),
        _ => values
            .filter_map(|v| match v {
                Value::Text(s) => Some(FacetKey::Text(s.clone())),
                _ => None,
            })
            .collect(),
    };
    keys.sort();
    keys.dedup();
    keys
}

/// Facets over the full result set, in [`FacetKind::ALL`] order. Within a
/// kind: count descending, then value ascending, at most
/// [`MAX_VALUES_PER_FACET`] values.
pub fn suggest_filters<'a>(results: impl IntoIterator<Item = &'a Item>) -> Vec<Facet> {
    let mut counts: BTreeMap<(FacetKind, FacetKey), usize> = BTreeMap::new();
    for item in results {
        for kind in FacetKind::ALL {
            for key in keys_of(kind, item) {
                *counts.entry((kind, key)).or_default() += 1;
            }
        }
    }
    let mut facets = Vec::new();
    for kind in FacetKind::ALL {
        let mut entries: Vec<(&FacetKey, usize)> = counts
            .range((kind, FacetKey::Text(String::new()))..)
            .take_while(|((k, _), _)| *k == kind)
            .map(|((_, key), &n)| (key, n))
            .collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        facets.extend(
            entries
                .into_iter()
                .take(MAX_VALUES_PER_FACET)
                .map(|(key, count)| {
                    let filter = key.filter(kind);
                    Facet {
                        kind,
                        property: kind.property(),
                        value: key.display(),
                        count,
                        params: atom_params(&filter).unwrap_or_default(),
                        filter,
                    }
                }),
        );
    }
    facets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{MediaGraph, NewItem};

    #[test]
    fn bucket_boundaries() {
        assert_eq!(DurationBucket::of(0), DurationBucket::Short);
        assert_eq!(DurationBucket::of(599), DurationBucket::Short);
        assert_eq!(DurationBucket::of(600), DurationBucket::Medium);
        assert_eq!(DurationBucket::of(3600), DurationBucket::Medium);
        assert_eq!(DurationBucket::of(3601), DurationBucket::Long);
        for s in [0, 599, 600, 3600, 3601, 99_999] {
            let (lo, hi) = DurationBucket::of(s).bounds();
            assert!(lo.is_none_or(|l| s >= l) && hi.is_none_or(|h| s <= h));
        }
    }

    #[test]
    fn empty_results_no_facets() {
        assert!(suggest_filters(std::iter::empty()).is_empty());
    }

    #[test]
    fn caps_and_orders_values() {
        let mut g = MediaGraph::new();
        for i in 0..14 {
            let mut draft = NewItem::labelled("en", &format!("item {i}"))
                .with(core_props::TOPIC, Value::text(format!("t{:02}", i % 12)));
            if i < 3 {
                draft = draft.with(core_props::TOPIC, Value::text("shared"));
            }
            g.create_item(draft, "a").unwrap();
        }
        let facets = suggest_filters(g.live());
        let topics: Vec<(String, usize)> = facets
            .iter()
            .filter(|f| f.kind == FacetKind::Topic)
            .map(|f| (f.value.clone(), f.count))
            .collect();
        assert_eq!(topics.len(), MAX_VALUES_PER_FACET);
        assert_eq!(topics[0], ("shared".into(), 3));
        assert_eq!(topics[1], ("t00".into(), 2));
        assert_eq!(topics[2], ("t01".into(), 2));
        assert_eq!(topics[3], ("t02".into(), 1));
    }
}
