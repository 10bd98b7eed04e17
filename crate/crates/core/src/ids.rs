//! Prefixed identifiers: `Q` items, `P` properties, `D` documents.
//!
//! All three serialize as their display string (`"Q17"`) and order
//! numerically, so `Q9 < Q10`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid {kind} identifier '{input}'")]
pub struct IdParseError {
    pub kind: &'static str,
    pub input: String,
}

macro_rules! prefixed_id {
    ($(#[$meta:meta])* $name:ident, $prefix:literal, $kind:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(u64);

        impl $name {
            pub const PREFIX: char = $prefix;

            /// Panics on zero: identifiers start at 1.
            pub const fn new(n: u64) -> Self {
                assert!(n > 0, concat!($kind, " identifiers are positive"));
                Self(n)
            }

            pub const fn number(self) -> u64 {
                self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{}", $prefix, self.0)
            }
        }

        impl FromStr for $name {
            type Err = IdParseError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let err = || IdParseError { kind: $kind, input: s.to_string() };
                let digits = s.strip_prefix($prefix).ok_or_else(err)?;
                if digits.is_empty()
                    || digits.starts_with('0')
                    || !digits.bytes().all(|b| b.is_ascii_digit())
                {
                    return Err(err());
                }
                digits.parse::<u64>().map(Self).map_err(|_| err())
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

prefixed_id!(
    /// Media item identifier, `Q` + positive integer.
    ItemId, 'Q', "item"
);
prefixed_id!(
    /// Property identifier, `P` + positive integer.
    PropertyId, 'P', "property"
);
prefixed_id!(
    /// Full-text document identifier, `D` + positive integer.
    DocId, 'D', "document"
);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let id: ItemId = "Q17".parse().unwrap();
        assert_eq!(id.number(), 17);
        assert_eq!(id.to_string(), "Q17");
        assert_eq!("P3".parse::<PropertyId>().unwrap(), PropertyId::new(3));
        assert_eq!("D99".parse::<DocId>().unwrap().to_string(), "D99");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "Q", "Q0", "Q01", "q1", "P1", "Q-3", "Q1x", "Q 1"] {
            assert!(bad.parse::<ItemId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn orders_numerically() {
        let nine: ItemId = "Q9".parse().unwrap();
        let ten: ItemId = "Q10".parse().unwrap();
        assert!(nine < ten);
    }

    #[test]
    fn serde_as_string() {
        let id = DocId::new(4);
        assert_eq!(serde_json::to_string(&id).unwrap(), "\"D4\"");
        let back: DocId = serde_json::from_str("\"D4\"").unwrap();
        assert_eq!(back, id);
        assert!(serde_json::from_str::<DocId>("\"Q4\"").is_err());
    }
}
