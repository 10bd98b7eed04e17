//! Media metadata graph: items with typed statements, a property registry,
//! filterable queries and an append-only revision log.

pub mod filter;
pub mod schema;
mod snapshot;
pub mod value;

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::framing::FramingError;
use crate::ids::{DocId, ItemId, PropertyId};
pub use filter::{FilterAtom, FilterError, FilterSet};
pub use schema::{core_props, Cardinality, PropertyDef, Registry, SchemaError};
pub use value::{Datatype, Monolingual, Value};

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("schema violation: {0}")]
    SchemaViolation(#[from] SchemaError),
    #[error("item needs at least one non-empty label")]
    EmptyLabels,
    #[error("actor must not be empty")]
    EmptyActor,
    #[error("unknown item {0}")]
    UnknownItem(ItemId),
    #[error("invalid filter: {0}")]
    InvalidFilter(#[from] FilterError),
    #[error("snapshot i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),
}

impl From<FramingError> for GraphError {
    fn from(e: FramingError) -> Self {
        match e {
            FramingError::Io(e) => GraphError::Io(e),
            FramingError::Corrupt(msg) => GraphError::CorruptSnapshot(msg),
        }
    }
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Statement {
    pub property: PropertyId,
    pub value: Value,
}

impl Statement {
    pub fn new(property: PropertyId, value: Value) -> Self {
        Self { property, value }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub id: ItemId,
    pub labels: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub statements: Vec<Statement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript_ref: Option<DocId>,
    /// Tombstone: the item stays in the store so history remains replayable.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub deleted: bool,
}

impl Item {
    /// Display title: the label in the item's own language, else the first label.
    pub fn title(&self) -> &str {
        let language = self.first(core_props::LANGUAGE).and_then(Value::as_str);
        language
            .and_then(|l| self.labels.get(l))
            .or_else(|| self.labels.values().next())
            .map(String::as_str)
            .unwrap_or_default()
    }

    pub fn first(&self, property: PropertyId) -> Option<&Value> {
        self.values(property).next()
    }

    /// Statement values for a property. Labels are not included; see [`Item::any_value`].
    pub fn values(&self, property: PropertyId) -> impl Iterator<Item = &Value> {
        self.statements
            .iter()
            .filter(move |s| s.property == property)
            .map(|s| &s.value)
    }

    /// True if any value of `property` satisfies `pred`. The title property
    /// is answered from the labels.
    pub fn any_value(&self, property: PropertyId, mut pred: impl FnMut(&Value) -> bool) -> bool {
        if property == core_props::TITLE {
            return self
                .labels
                .iter()
                .any(|(language, text)| pred(&Value::monolingual(language, text)));
        }
        self.values(property).any(pred)
    }

    pub fn has(&self, property: PropertyId) -> bool {
        if property == core_props::TITLE {
            return !self.labels.is_empty();
        }
        self.statements.iter().any(|s| s.property == property)
    }
}

/// Input for [`MediaGraph::create_item`]. Title statements are folded into labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewItem {
    pub labels: BTreeMap<String, String>,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub statements: Vec<Statement>,
}

impl NewItem {
    pub fn labelled(language: &str, title: &str) -> Self {
        Self {
            labels: BTreeMap::from([(language.to_string(), title.to_string())]),
            ..Self::default()
        }
    }

    pub fn with(mut self, property: PropertyId, value: Value) -> Self {
        self.statements.push(Statement::new(property, value));
        self
    }
}

/// What a revision changed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum Delta {
    Created {
        labels: BTreeMap<String, String>,
        statements: Vec<Statement>,
    },
    /// Single-valued property set, possibly replacing an older value.
    Replaced {
        property: PropertyId,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        old: Option<Value>,
        new: Value,
    },
    Added {
        property: PropertyId,
        value: Value,
    },
    /// The write carried a value the item already held.
    Unchanged {
        property: PropertyId,
        value: Value,
    },
    Retracted {
        property: PropertyId,
        value: Value,
    },
    LabelSet {
        language: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        old: Option<String>,
        text: String,
    },
    DescriptionSet {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        text: Option<String>,
    },
    TranscriptLinked {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        doc: Option<DocId>,
    },
    Deleted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub rev: u64,
    pub actor: String,
    pub timestamp: DateTime<Utc>,
    pub target: ItemId,
    pub delta: Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub offset: usize,
    pub limit: usize,
}

impl Page {
    pub fn new(offset: usize, limit: usize) -> Self {
        Self { offset, limit }
    }

    pub fn all() -> Self {
        Self {
            offset: 0,
            limit: usize::MAX,
        }
    }

    pub fn slice<'a, T>(&self, all: &'a [T]) -> &'a [T] {
        let start = self.offset.min(all.len());
        let end = start.saturating_add(self.limit).min(all.len());
        &all[start..end]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryPage {
    pub total: usize,
    pub items: Vec<Item>,
}

impl QueryPage {
    pub fn ids(&self) -> Vec<ItemId> {
        self.items.iter().map(|i| i.id).collect()
    }
}

/// The item store. Not internally synchronized: callers hold it behind a
/// lock so that every write goes through one commit path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MediaGraph {
    registry: Registry,
    items: BTreeMap<ItemId, Item>,
    revisions: Vec<RevisionRecord>,
    next_item: u64,
    next_rev: u64,
}

impl Default for MediaGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl MediaGraph {
    /// An empty store with the core schema.
    pub fn new() -> Self {
        Self::with_registry(Registry::core())
    }

    pub fn with_registry(registry: Registry) -> Self {
        Self {
            registry,
            items: BTreeMap::new(),
            revisions: Vec::new(),
            next_item: 1,
            next_rev: 1,
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn register_property(&mut self, def: PropertyDef) -> Result<()> {
        Ok(self.registry.register(def)?)
    }

    /// Number of live (non-deleted) items.
    pub fn len(&self) -> usize {
        self.live().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Live items in id order.
    pub fn live(&self) -> impl Iterator<Item = &Item> {
        self.items.values().filter(|i| !i.deleted)
    }

    pub fn contains(&self, id: ItemId) -> bool {
        self.items.get(&id).is_some_and(|i| !i.deleted)
    }

    pub fn revisions(&self) -> &[RevisionRecord] {
        &self.revisions
    }

    pub fn history(&self, id: ItemId) -> impl Iterator<Item = &RevisionRecord> {
        self.revisions.iter().filter(move |r| r.target == id)
    }

    /// The id the next created item will receive.
    pub fn next_item_id(&self) -> ItemId {
        ItemId::new(self.next_item)
    }

    pub fn get_item(&self, id: ItemId) -> Result<&Item> {
        self.items
            .get(&id)
            .filter(|i| !i.deleted)
            .ok_or(GraphError::UnknownItem(id))
    }

    pub fn create_item(&mut self, draft: NewItem, actor: &str) -> Result<ItemId> {
        check_actor(actor)?;
        let (labels, statements) = self.validate_new(draft.labels, draft.statements)?;
        let id = ItemId::new(self.next_item);
        self.next_item += 1;
        let description = draft.description.filter(|d| !d.trim().is_empty());
        self.items.insert(
            id,
            Item {
                id,
                labels: labels.clone(),
                description,
                statements: statements.clone(),
                transcript_ref: None,
                deleted: false,
            },
        );
        self.append(actor, id, Delta::Created { labels, statements });
        Ok(id)
    }

    /// Sets a statement. Single-valued properties are replaced; multi-valued
    /// properties gain the value unless already present. A revision is
    /// appended in every case.
    pub fn upsert_statement(
        &mut self,
        id: ItemId,
        property: PropertyId,
        value: Value,
        actor: &str,
    ) -> Result<u64> {
        check_actor(actor)?;
        self.get_item(id)?;
        let def = self.registry.check(property, &value)?.clone();
        self.check_refs(&value)?;
        let item = self.items.get_mut(&id).expect("checked above");

        let delta = if property == core_props::TITLE {
            let Value::MonolingualText(m) = value else {
                unreachable!("datatype checked")
            };
            let old = item.labels.insert(m.language.clone(), m.text.clone());
            if old.as_deref() == Some(m.text.as_str()) {
                Delta::Unchanged {
                    property,
                    value: Value::MonolingualText(m),
                }
            } else {
                Delta::LabelSet {
                    language: m.language,
                    old,
                    text: m.text,
                }
            }
        } else {
            match def.cardinality {
                Cardinality::Single => {
                    match item.statements.iter_mut().find(|s| s.property == property) {
                        Some(s) if s.value == value => Delta::Unchanged { property, value },
                        Some(s) => {
                            let old = std::mem::replace(&mut s.value, value.clone());
                            Delta::Replaced {
                                property,
                                old: Some(old),
                                new: value,
                            }
                        }
                        None => {
                            item.statements
                                .push(Statement::new(property, value.clone()));
                            Delta::Replaced {
                                property,
                                old: None,
                                new: value,
                            }
                        }
                    }
                }
                Cardinality::Multi => {
                    if item.values(property).any(|v| *v == value) {
                        Delta::Unchanged { property, value }
                    } else {
                        item.statements
                            .push(Statement::new(property, value.clone()));
                        Delta::Added { property, value }
                    }
                }
            }
        };
        Ok(self.append(actor, id, delta))
    }

    /// Removes one statement value. Retracting an absent value is an error.
    pub fn retract_statement(
        &mut self,
        id: ItemId,
        property: PropertyId,
        value: &Value,
        actor: &str,
    ) -> Result<u64> {
        check_actor(actor)?;
        self.get_item(id)?;
        self.registry.check(property, value)?;
        let item = self.items.get_mut(&id).expect("checked above");
        if property == core_props::TITLE {
            let Value::MonolingualText(m) = value else {
                unreachable!("datatype checked")
            };
            if item.labels.get(&m.language) != Some(&m.text) {
                return Err(SchemaError::InvalidValue {
                    property: property.to_string(),
                    reason: format!("item {id} has no label '{}'", m.text),
                }
                .into());
            }
            if item.labels.len() == 1 {
                return Err(GraphError::EmptyLabels);
            }
            item.labels.remove(&m.language);
        } else {
            let pos = item
                .statements
                .iter()
                .position(|s| s.property == property && s.value == *value)
                .ok_or_else(|| SchemaError::InvalidValue {
                    property: property.to_string(),
                    reason: format!("item {id} holds no value '{value}'"),
                })?;
            item.statements.remove(pos);
        }
        let delta = Delta::Retracted {
            property,
            value: value.clone(),
        };
        Ok(self.append(actor, id, delta))
    }

    pub fn set_description(
        &mut self,
        id: ItemId,
        text: Option<String>,
        actor: &str,
    ) -> Result<u64> {
        check_actor(actor)?;
        self.get_item(id)?;
        let text = text.filter(|t| !t.trim().is_empty());
        self.items.get_mut(&id).expect("checked above").description = text.clone();
        Ok(self.append(actor, id, Delta::DescriptionSet { text }))
    }

    /// Points the item at its transcript document (or clears the pointer).
    pub fn link_transcript(&mut self, id: ItemId, doc: Option<DocId>, actor: &str) -> Result<u64> {
        check_actor(actor)?;
        self.get_item(id)?;
        self.items
            .get_mut(&id)
            .expect("checked above")
            .transcript_ref = doc;
        Ok(self.append(actor, id, Delta::TranscriptLinked { doc }))
    }

    /// Soft delete. The id is never reused.
    pub fn delete_item(&mut self, id: ItemId, actor: &str) -> Result<u64> {
        check_actor(actor)?;
        self.get_item(id)?;
        self.items.get_mut(&id).expect("checked above").deleted = true;
        Ok(self.append(actor, id, Delta::Deleted))
    }

    /// Items matching every atom, ascending by id, paginated.
    pub fn query_items(&self, filters: &FilterSet, page: Page) -> Result<QueryPage> {
        let all = self.matching(filters)?;
        Ok(QueryPage {
            total: all.len(),
            items: page.slice(&all).iter().map(|&i| i.clone()).collect(),
        })
    }

    /// Unpaginated matches, ascending by id.
    pub fn matching(&self, filters: &FilterSet) -> Result<Vec<&Item>> {
        filters.validate(&self.registry)?;
        Ok(self.live().filter(|i| filters.matches(i)).collect())
    }

    fn append(&mut self, actor: &str, target: ItemId, delta: Delta) -> u64 {
        let rev = self.next_rev;
        self.next_rev += 1;
        self.revisions.push(RevisionRecord {
            rev,
            actor: actor.to_string(),
            timestamp: Utc::now(),
            target,
            delta,
        });
        rev
    }

    /// Validates a draft without writing it; returns the normalized form
    /// [`MediaGraph::create_item`] would store.
    pub fn validate_draft(&self, draft: &NewItem) -> Result<NewItem> {
        let (labels, statements) =
            self.validate_new(draft.labels.clone(), draft.statements.clone())?;
        Ok(NewItem {
            labels,
            description: draft.description.clone().filter(|d| !d.trim().is_empty()),
            statements,
        })
    }

    fn check_refs(&self, value: &Value) -> Result<()> {
        match value {
            Value::ItemRef(target) if !self.contains(*target) => Err(SchemaError::InvalidValue {
                property: "item-ref".into(),
                reason: format!("referenced item {target} does not exist"),
            }
            .into()),
            _ => Ok(()),
        }
    }

    /// Validates a draft, folding title statements into labels and removing
    /// repeated values.
    fn validate_new(
        &self,
        mut labels: BTreeMap<String, String>,
        statements: Vec<Statement>,
    ) -> Result<(BTreeMap<String, String>, Vec<Statement>)> {
        let mut kept: Vec<Statement> = Vec::with_capacity(statements.len());
        for st in statements {
            let def = self.registry.check(st.property, &st.value)?;
            self.check_refs(&st.value)?;
            if st.property == core_props::TITLE {
                if let Value::MonolingualText(m) = st.value {
                    labels.insert(m.language, m.text);
                }
                continue;
            }
            let existing = kept.iter().find(|s| s.property == st.property);
            match (def.cardinality, existing) {
                (_, Some(_)) if kept.contains(&st) => {}
                (Cardinality::Single, Some(prev)) => {
                    return Err(SchemaError::InvalidValue {
                        property: def.label.clone(),
                        reason: format!(
                            "single-valued property given both '{}' and '{}'",
                            prev.value, st.value
                        ),
                    }
                    .into())
                }
                _ => kept.push(st),
            }
        }
        for (language, text) in &mut labels {
            if !schema::is_language_tag(language) {
                return Err(SchemaError::InvalidValue {
                    property: "title".into(),
                    reason: format!("bad label language '{language}'"),
                }
                .into());
            }
            *text = text.trim().to_string();
        }
        labels.retain(|_, text| !text.is_empty());
        if labels.is_empty() {
            return Err(GraphError::EmptyLabels);
        }
        Ok((labels, kept))
    }
}

fn check_actor(actor: &str) -> Result<()> {
    if actor.trim().is_empty() {
        Err(GraphError::EmptyActor)
    } else {
        Ok(())
    }
}
