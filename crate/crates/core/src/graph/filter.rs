//! Conjunctive metadata filters evaluated against items.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::schema::Registry;
use super::value::{Datatype, Value};
use super::Item;
use crate::ids::PropertyId;

/// One filter condition. Range bounds are inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum FilterAtom {
    Equals {
        property: PropertyId,
        value: Value,
    },
    DateRange {
        property: PropertyId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        from: Option<NaiveDate>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        to: Option<NaiveDate>,
    },
    QuantityRange {
        property: PropertyId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        min: Option<i64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        max: Option<i64>,
    },
    /// Case-insensitive substring match on a textual property.
    Contains {
        property: PropertyId,
        value: String,
    },
}

impl FilterAtom {
    pub fn property(&self) -> PropertyId {
        match self {
            FilterAtom::Equals { property, .. }
            | FilterAtom::DateRange { property, .. }
            | FilterAtom::QuantityRange { property, .. }
            | FilterAtom::Contains { property, .. } => *property,
        }
    }

    pub fn validate(&self, registry: &Registry) -> Result<(), FilterError> {
        let property = self.property();
        let def = registry
            .get(property)
            .ok_or(FilterError::UnknownProperty(property))?;
        let expect = |want: Datatype| {
            if def.datatype == want {
                Ok(())
            } else {
                Err(FilterError::WrongDatatype {
                    property,
                    datatype: def.datatype,
                })
            }
        };
        match self {
            FilterAtom::Equals { value, .. } => expect(value.datatype()),
            FilterAtom::DateRange { from, to, .. } => {
                expect(Datatype::Date)?;
                match (from, to) {
                    (Some(f), Some(t)) if f > t => Err(FilterError::InvertedRange(property)),
                    _ => Ok(()),
                }
            }
            FilterAtom::QuantityRange { min, max, .. } => {
                expect(Datatype::Quantity)?;
                match (min, max) {
                    (Some(lo), Some(hi)) if lo > hi => Err(FilterError::InvertedRange(property)),
                    _ => Ok(()),
                }
            }
            FilterAtom::Contains { value, .. } => {
                if !def.datatype.is_textual() {
                    return Err(FilterError::WrongDatatype {
                        property,
                        datatype: def.datatype,
                    });
                }
                if value.trim().is_empty() {
                    return Err(FilterError::EmptyNeedle(property));
                }
                Ok(())
            }
        }
    }

    pub fn matches(&self, item: &Item) -> bool {
        match self {
            FilterAtom::Equals { property, value } => item.any_value(*property, |v| v == value),
            FilterAtom::DateRange { property, from, to } => item.any_value(*property, |v| {
                v.as_date()
                    .is_some_and(|d| from.is_none_or(|f| d >= f) && to.is_none_or(|t| d <= t))
            }),
            FilterAtom::QuantityRange { property, min, max } => item.any_value(*property, |v| {
                v.as_quantity()
                    .is_some_and(|q| min.is_none_or(|lo| q >= lo) && max.is_none_or(|hi| q <= hi))
            }),
            FilterAtom::Contains { property, value } => {
                let needle = value.to_lowercase();
                item.any_value(*property, |v| {
                    v.as_str()
                        .is_some_and(|s| s.to_lowercase().contains(&needle))
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FilterError {
    #[error("filter references unknown property {0}")]
    UnknownProperty(PropertyId),
    #[error("filter on {property} does not fit its datatype {datatype}")]
    WrongDatatype {
        property: PropertyId,
        datatype: Datatype,
    },
    #[error("range on {0} has lower bound above upper bound")]
    InvertedRange(PropertyId),
    #[error("contains filter on {0} has an empty value")]
    EmptyNeedle(PropertyId),
}

/// A conjunction of atoms; the empty set matches everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FilterSet {
    atoms: Vec<FilterAtom>,
}

impl FilterSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, atom: FilterAtom) -> Self {
        self.atoms.push(atom);
        self
    }

    pub fn push(&mut self, atom: FilterAtom) {
        self.atoms.push(atom);
    }

    pub fn atoms(&self) -> &[FilterAtom] {
        &self.atoms
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn validate(&self, registry: &Registry) -> Result<(), FilterError> {
        self.atoms.iter().try_for_each(|a| a.validate(registry))
    }

    pub fn matches(&self, item: &Item) -> bool {
        self.atoms.iter().all(|a| a.matches(item))
    }
}

impl FromIterator<FilterAtom> for FilterSet {
    fn from_iter<T: IntoIterator<Item = FilterAtom>>(iter: T) -> Self {
        Self {
            atoms: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::schema::core_props::*;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn rejects_invalid_atoms() {
        let r = Registry::core();
        let unknown = FilterAtom::Equals {
            property: PropertyId::new(77),
            value: Value::text("x"),
        };
        assert_eq!(
            unknown.validate(&r),
            Err(FilterError::UnknownProperty(PropertyId::new(77)))
        );
        let inverted = FilterAtom::DateRange {
            property: PUBLICATION_DATE,
            from: Some(date("2015-01-01")),
            to: Some(date("2014-01-01")),
        };
        assert_eq!(
            inverted.validate(&r),
            Err(FilterError::InvertedRange(PUBLICATION_DATE))
        );
        let wrong = FilterAtom::QuantityRange {
            property: LANGUAGE,
            min: Some(1),
            max: None,
        };
        assert!(matches!(
            wrong.validate(&r),
            Err(FilterError::WrongDatatype { .. })
        ));
        let not_text = FilterAtom::Contains {
            property: DURATION,
            value: "9".into(),
        };
        assert!(not_text.validate(&r).is_err());
        let mismatched = FilterAtom::Equals {
            property: DURATION,
            value: Value::text("900"),
        };
        assert!(mismatched.validate(&r).is_err());
    }

    #[test]
    fn open_ranges_are_valid() {
        let r = Registry::core();
        let atom = FilterAtom::QuantityRange {
            property: DURATION,
            min: Some(3601),
            max: None,
        };
        assert!(atom.validate(&r).is_ok());
        let same = FilterAtom::DateRange {
            property: PUBLICATION_DATE,
            from: Some(date("2014-01-01")),
            to: Some(date("2014-01-01")),
        };
        assert!(same.validate(&r).is_ok());
    }

    #[test]
    fn json_shape() {
        let f = FilterSet::new().with(FilterAtom::QuantityRange {
            property: DURATION,
            min: Some(3601),
            max: None,
        });
        assert_eq!(
            serde_json::to_value(&f).unwrap(),
            serde_json::json!([{"op": "quantity-range", "property": "P9", "min": 3601}])
        );
    }
}
