//! Durable snapshots in the `mediahub-graph` framed JSON-lines format.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Map;

use super::{GraphError, Item, MediaGraph, PropertyDef, Registry, Result, RevisionRecord};
use crate::framing;

pub const FORMAT: &str = "mediahub-graph";
pub const VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Record {
    Property(PropertyDef),
    Item(Item),
    Revision(RevisionRecord),
}

fn corrupt(msg: impl Into<String>) -> GraphError {
    GraphError::CorruptSnapshot(msg.into())
}

impl MediaGraph {
    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let records: Vec<Record> = self
            .registry
            .iter()
            .cloned()
            .map(Record::Property)
            .chain(self.items.values().cloned().map(Record::Item))
            .chain(self.revisions.iter().cloned().map(Record::Revision))
            .collect();
        let mut header = Map::new();
        header.insert("next_item".into(), self.next_item.into());
        header.insert("next_rev".into(), self.next_rev.into());
        framing::encode(FORMAT, VERSION, header, &records).expect("graph records serialize")
    }

    pub fn from_snapshot_bytes(bytes: &[u8]) -> Result<Self> {
        let (header, records) = framing::decode::<Record>(bytes, FORMAT, VERSION)?;
        let next_item = framing::header_u64(&header, "next_item")?;
        let next_rev = framing::header_u64(&header, "next_rev")?;

        let mut registry = Registry::empty();
        let mut items = BTreeMap::new();
        let mut revisions: Vec<RevisionRecord> = Vec::new();
        for record in records {
            match record {
                Record::Property(def) => registry
                    .register(def)
                    .map_err(|e| corrupt(format!("registry: {e}")))?,
                Record::Item(item) => {
                    if item.id.number() >= next_item {
                        return Err(corrupt(format!("item {} beyond next_item", item.id)));
                    }
                    if items.insert(item.id, item).is_some() {
                        return Err(corrupt("duplicate item"));
                    }
                }
                Record::Revision(rev) => {
                    let expected = revisions.last().map_or(1, |r| r.rev + 1);
                    if rev.rev != expected {
                        return Err(corrupt(format!("revision gap at {}", rev.rev)));
                    }
                    revisions.push(rev);
                }
            }
        }
        if next_item == 0 || next_rev != revisions.len() as u64 + 1 {
            return Err(corrupt("counters disagree with contents"));
        }
        Ok(Self {
            registry,
            items,
            revisions,
            next_item,
            next_rev,
        })
    }

    pub fn snapshot(&self, path: &Path) -> Result<()> {
        Ok(framing::write_atomic(path, &self.to_snapshot_bytes())?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_snapshot_bytes(&std::fs::read(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::core_props::*;
    use crate::graph::{NewItem, Value};
    use crate::ids::ItemId;

    fn populated() -> MediaGraph {
        let mut g = MediaGraph::new();
        let a = g
            .create_item(
                NewItem::labelled("de", "Die Klimakrise erklärt")
                    .with(DURATION, Value::Quantity(900)),
                "importer",
            )
            .unwrap();
        g.create_item(NewItem::labelled("en", "Second"), "importer")
            .unwrap();
        g.upsert_statement(a, TOPIC, Value::text("climate change"), "editor")
            .unwrap();
        g.delete_item(ItemId::new(2), "editor").unwrap();
        g
    }

    #[test]
    fn round_trip_identity() {
        let g = populated();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("graph.jsonl");
        g.snapshot(&path).unwrap();
        let back = MediaGraph::load(&path).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.next_item_id(), ItemId::new(3));
    }

    #[test]
    fn header_line_shape() {
        let bytes = populated().to_snapshot_bytes();
        let text = String::from_utf8(bytes).unwrap();
        let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(header["format"], "mediahub-graph");
        assert_eq!(header["version"], 1);
        assert_eq!(header["next_item"], 3);
        assert_eq!(header["next_rev"], 5);
        assert!(header["checksum"].as_str().unwrap().starts_with("sha256:"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn empty_store_round_trip() {
        let g = MediaGraph::new();
        let mut back = MediaGraph::from_snapshot_bytes(&g.to_snapshot_bytes()).unwrap();
        assert_eq!(back, g);
        let id = back.create_item(NewItem::labelled("en", "x"), "a").unwrap();
        assert_eq!(id, ItemId::new(1));
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let bytes = populated().to_snapshot_bytes();
        for len in [0, 10, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(
                MediaGraph::from_snapshot_bytes(&bytes[..len]),
                Err(GraphError::CorruptSnapshot(_))
            ));
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            MediaGraph::load(&dir.path().join("nope.jsonl")),
            Err(GraphError::Io(_))
        ));
    }
}
