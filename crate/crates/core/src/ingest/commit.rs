//! Batch commit with deduplication. Every draft is validated before any is
//! applied; invalid drafts land in the report and the batch continues.
//! Within one batch the first draft per dedup key wins and later ones are
//! skipped, so committing the same batch twice is a no-op.

use std::collections::{HashMap, HashSet};

use super::mapping::{DedupKey, ItemDraft};
use super::{ImportReport, IngestError, LineError};
use crate::graph::{
    core_props, Cardinality, Item, MediaGraph, NewItem, Result as GraphResult, Value,
};
use crate::ids::ItemId;

enum Outcome {
    Created,
    Updated,
    Unchanged,
}

pub fn commit(
    graph: &mut MediaGraph,
    drafts: Vec<ItemDraft>,
    actor: &str,
) -> Result<ImportReport, IngestError> {
    if actor.trim().is_empty() {
        return Err(IngestError::EmptyActor);
    }
    let mut report = ImportReport::default();

    let mut valid = Vec::with_capacity(drafts.len());
    for draft in drafts {
        match graph.validate_draft(&draft.item) {
            Ok(item) => valid.push((draft.source_line, item)),
            Err(e) => report.errors.push(LineError {
                line: draft.source_line,
                reason: e.to_string(),
            }),
        }
    }

    let mut index: HashMap<DedupKey, ItemId> = graph
        .live()
        .map(|item| (DedupKey::of_item(item), item.id))
        .collect();
    let mut in_batch = HashSet::new();
    for (line, item) in valid {
        let key = DedupKey::of(&item.labels, &item.statements);
        if !in_batch.insert(key.clone()) {
            report.skipped_duplicates += 1;
            continue;
        }
        let outcome = match index.get(&key) {
            Some(&id) => apply_update(graph, id, &item, actor),
            None => graph.create_item(item, actor).map(|id| {
                index.insert(key, id);
                Outcome::Created
            }),
        };
        match outcome {
            Ok(Outcome::Created) => report.created += 1,
            Ok(Outcome::Updated) => report.updated += 1,
            Ok(Outcome::Unchanged) => report.skipped_duplicates += 1,
            Err(e) => report.errors.push(LineError {
                line,
                reason: e.to_string(),
            }),
        }
    }
    Ok(report)
}

/// Writes only what differs. Values the item holds but the draft lacks stay.
fn apply_update(
    graph: &mut MediaGraph,
    id: ItemId,
    draft: &NewItem,
    actor: &str,
) -> GraphResult<Outcome> {
    let current: Item = graph.get_item(id)?.clone();
    let mut changed = false;
    for (language, text) in &draft.labels {
        if current.labels.get(language) != Some(text) {
            graph.upsert_statement(
                id,
                core_props::TITLE,
                Value::monolingual(language, text),
                actor,
            )?;
            changed = true;
        }
    }
    for st in &draft.statements {
        let cardinality = graph
            .registry()
            .get(st.property)
            .map_or(Cardinality::Multi, |d| d.cardinality);
        let differs = match cardinality {
            Cardinality::Single => current.first(st.property) != Some(&st.value),
            Cardinality::Multi => !current.values(st.property).any(|v| *v == st.value),
        };
        if differs {
            graph.upsert_statement(id, st.property, st.value.clone(), actor)?;
            changed = true;
        }
    }
    if draft.description.is_some() && draft.description != current.description {
        graph.set_description(id, draft.description.clone(), actor)?;
        changed = true;
    }
    Ok(if changed {
        Outcome::Updated
    } else {
        Outcome::Unchanged
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Statement;

    fn draft(line: usize, title: &str, ext: &str, stmts: Vec<Statement>) -> ItemDraft {
        let mut item = NewItem::labelled("en", title)
            .with(core_props::PLATFORM, Value::text("youtube"))
            .with(core_props::EXTERNAL_ID, Value::ExternalId(ext.into()));
        item.statements.extend(stmts);
        ItemDraft {
            source_line: line,
            item,
        }
    }

    #[test]
    fn create_then_skip() {
        let mut g = MediaGraph::new();
        let batch = vec![draft(1, "A", "a", vec![]), draft(2, "B", "b", vec![])];
        let r1 = commit(&mut g, batch.clone(), "importer").unwrap();
        assert_eq!((r1.created, r1.updated, r1.skipped_duplicates), (2, 0, 0));
        let revs = g.revisions().len();
        let r2 = commit(&mut g, batch, "importer").unwrap();
        assert_eq!((r2.created, r2.updated, r2.skipped_duplicates), (0, 0, 2));
        assert_eq!(g.revisions().len(), revs);
    }

    #[test]
    fn update_writes_only_changes() {
        let mut g = MediaGraph::new();
        let dur = |s| Statement::new(core_props::DURATION, Value::Quantity(s));
        commit(&mut g, vec![draft(1, "A", "a", vec![dur(900)])], "i").unwrap();
        let revs = g.revisions().len();
        let r = commit(&mut g, vec![draft(1, "A", "a", vec![dur(901)])], "i").unwrap();
        assert_eq!(r.updated, 1);
        assert_eq!(g.revisions().len(), revs + 1);
        let item = g.get_item(ItemId::new(1)).unwrap();
        assert_eq!(item.values(core_props::DURATION).count(), 1);
        assert_eq!(
            item.first(core_props::DURATION),
            Some(&Value::Quantity(901))
        );
    }

    #[test]
    fn invalid_drafts_reported_batch_continues() {
        let mut g = MediaGraph::new();
        let bad = draft(
            2,
            "B",
            "b",
            vec![Statement::new(core_props::DURATION, Value::Quantity(-5))],
        );
        let r = commit(
            &mut g,
            vec![draft(1, "A", "a", vec![]), bad, draft(3, "C", "c", vec![])],
            "i",
        )
        .unwrap();
        assert_eq!(r.created, 2);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].line, 2);
        assert_eq!(r.input_count(), 3);
    }

    #[test]
    fn duplicates_within_a_batch() {
        let mut g = MediaGraph::new();
        let r = commit(
            &mut g,
            vec![draft(1, "A", "a", vec![]), draft(2, "A", "a", vec![])],
            "i",
        )
        .unwrap();
        assert_eq!((r.created, r.skipped_duplicates), (1, 1));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn conflicting_duplicates_in_a_batch_first_wins() {
        let mut g = MediaGraph::new();
        let dur = |s| Statement::new(core_props::DURATION, Value::Quantity(s));
        let batch = vec![
            draft(1, "A", "a", vec![dur(1)]),
            draft(2, "A", "a", vec![dur(2)]),
        ];
        let r = commit(&mut g, batch.clone(), "i").unwrap();
        assert_eq!((r.created, r.updated, r.skipped_duplicates), (1, 0, 1));
        assert_eq!(
            g.get_item(ItemId::new(1))
                .unwrap()
                .first(core_props::DURATION),
            Some(&Value::Quantity(1))
        );
        let once = g.clone();
        let r = commit(&mut g, batch, "i").unwrap();
        assert_eq!((r.created, r.updated, r.skipped_duplicates), (0, 0, 2));
        assert_eq!(g, once);
    }

    #[test]
    fn empty_actor_rejected() {
        let mut g = MediaGraph::new();
        assert!(matches!(
            commit(&mut g, vec![], " "),
            Err(IngestError::EmptyActor)
        ));
    }
}
