//! Core of mediahub: a media metadata graph and a transcript store queried
//! in federation, plus the bulk ingestion pipeline that feeds them.

pub mod bench;
pub mod federate;
pub mod fixture;
pub mod framing;
pub mod graph;
pub mod ids;
pub mod ingest;
pub mod library;
pub mod synth;
pub mod text;

pub use ids::{DocId, ItemId, PropertyId};
