//! The two stores side by side, with the writes that touch both.

use std::path::{Path, PathBuf};

use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};
use tracing::{error, info};

use crate::graph::{GraphError, MediaGraph};
use crate::ids::{DocId, ItemId};
use crate::text::{DocumentKind, NewDocument, TextError, TextStore};

pub const GRAPH_FILE: &str = "graph.jsonl";
pub const TEXT_FILE: &str = "text.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum LibraryError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error("{0} store is unavailable")]
    Unavailable(&'static str),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Library {
    pub graph: MediaGraph,
    pub text: TextStore,
}

impl Library {
    pub fn new() -> Self {
        Self {
            graph: MediaGraph::new(),
            text: TextStore::new(),
        }
    }

    /// Stores a document; transcripts are also linked from their item, which
    /// records the pointer change in the revision log.
    pub fn put_document(&mut self, doc: NewDocument, actor: &str) -> Result<DocId, LibraryError> {
        if actor.trim().is_empty() {
            return Err(GraphError::EmptyActor.into());
        }
        let (media, kind) = (doc.media_ref, doc.kind);
        let id = self.text.put_document(doc, &self.graph)?;
        if kind == DocumentKind::Transcript {
            self.graph.link_transcript(media, Some(id), actor)?;
        }
        Ok(id)
    }

    /// Tombstones the item and drops its documents.
    pub fn delete_item(&mut self, id: ItemId, actor: &str) -> Result<(), LibraryError> {
        self.graph.delete_item(id, actor)?;
        self.text.remove_media(id);
        Ok(())
    }
}

/// Which stores loaded cleanly. A store that failed to load is served as
/// unavailable and never written back, so its file is left for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Availability {
    pub graph: bool,
    pub text: bool,
}

impl Availability {
    pub const ALL: Self = Self {
        graph: true,
        text: true,
    };
}

/// Shared handle: concurrent readers, one writer at a time.
#[derive(Debug)]
pub struct Hub {
    state: RwLock<Library>,
    availability: Availability,
    data_dir: Option<PathBuf>,
}

impl Hub {
    pub fn new(library: Library) -> Self {
        Self::with_availability(library, Availability::ALL)
    }

    pub fn with_availability(library: Library, availability: Availability) -> Self {
        Self {
            state: RwLock::new(library),
            availability,
            data_dir: None,
        }
    }

    /// Opens the stores persisted in `dir`. Missing files start empty;
    /// corrupt files mark that store unavailable.
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        let mut availability = Availability::ALL;
        let graph_path = dir.join(GRAPH_FILE);
        let graph = if graph_path.exists() {
            MediaGraph::load(&graph_path).unwrap_or_else(|e| {
                error!(path = %graph_path.display(), "graph snapshot unusable: {e}");
                availability.graph = false;
                MediaGraph::new()
            })
        } else {
            MediaGraph::new()
        };
        let text_path = dir.join(TEXT_FILE);
        let text = if text_path.exists() {
            TextStore::load(&text_path).unwrap_or_else(|e| {
                error!(path = %text_path.display(), "text dump unusable: {e}");
                availability.text = false;
                TextStore::new()
            })
        } else {
            TextStore::new()
        };
        info!(items = graph.len(), documents = text.len(), "stores opened");
        let mut hub = Self::with_availability(Library { graph, text }, availability);
        hub.data_dir = Some(dir.to_path_buf());
        Ok(hub)
    }

    pub fn availability(&self) -> Availability {
        self.availability
    }

    pub fn data_dir(&self) -> Option<&Path> {
        self.data_dir.as_deref()
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Library> {
        self.state.read()
    }

    /// Exclusive access for a write. Fails if a store it needs is down.
    pub fn write(&self, needs_text: bool) -> Result<RwLockWriteGuard<'_, Library>, LibraryError> {
        if !self.availability.graph {
            return Err(LibraryError::Unavailable("graph"));
        }
        if needs_text && !self.availability.text {
            return Err(LibraryError::Unavailable("text"));
        }
        Ok(self.state.write())
    }

    /// Persists available stores into `dir`. Holds the read lock, so it runs
    /// alongside readers but never alongside a write.
    pub fn save_to(&self, dir: &Path) -> Result<(), LibraryError> {
        std::fs::create_dir_all(dir).map_err(GraphError::Io)?;
        let lib = self.read();
        if self.availability.graph {
            lib.graph.snapshot(&dir.join(GRAPH_FILE))?;
        }
        if self.availability.text {
            lib.text.dump(&dir.join(TEXT_FILE))?;
        }
        Ok(())
    }

    /// Saves into the directory the hub was opened from, if any.
    pub fn flush(&self) -> Result<(), LibraryError> {
        match &self.data_dir {
            Some(dir) => self.save_to(dir),
            None => Ok(()),
        }
    }
}
