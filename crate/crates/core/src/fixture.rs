//! The six-item reference library used by examples, tests and `seed`.

use crate::bench::{BenchTask, TaskParams};
use crate::ids::ItemId;
use crate::ingest::{
    run_import, DatasetFormat, ImportJob, ImportReport, IngestError, MappingConfig,
};
use crate::library::Library;
use crate::text::NewDocument;

pub const DATASET: &str = include_str!("../fixtures/fixture_f.jsonl");
pub const MAPPING: &str = include_str!("../fixtures/mapping.json");
pub const DOCUMENTS: &str = include_str!("../fixtures/fixture_documents.json");

pub const ACTOR: &str = "fixture";

/// The dataset mapping shared by the fixture and the synthetic generator.
pub fn mapping() -> MappingConfig {
    MappingConfig::from_json(MAPPING).expect("bundled mapping is valid")
}

pub fn documents() -> Vec<NewDocument> {
    serde_json::from_str(DOCUMENTS).expect("bundled documents are valid")
}

/// Imports the dataset into `library`, then stores the two transcripts.
pub fn seed(library: &mut Library) -> Result<ImportReport, IngestError> {
    let mapping = mapping();
    let report = run_import(
        &mut library.graph,
        ImportJob {
            source: "fixture_f.jsonl",
            dataset: DATASET.as_bytes(),
            format: DatasetFormat::Jsonl,
            mapping: &mapping,
            provider: None,
            actor: ACTOR,
        },
    )?;
    for doc in documents() {
        library
            .put_document(doc, ACTOR)
            .expect("fixture documents reference fixture items");
    }
    Ok(report)
}

pub fn library() -> Library {
    let mut library = Library::new();
    seed(&mut library).expect("fixture imports cleanly");
    library
}

/// The five evaluation tasks with the answers the fixture must produce.
pub fn tasks() -> Vec<BenchTask> {
    let q = |ids: &[u64]| ids.iter().map(|&n| ItemId::new(n)).collect();
    vec![
        BenchTask::new(
            1,
            "video by title",
            TaskParams::title("Introduction to Computer Science"),
            q(&[4]),
        ),
        BenchTask::new(
            2,
            "history from the University of Göttingen",
            TaskParams::topic_publisher("history", "University of Göttingen"),
            q(&[2]),
        ),
        BenchTask::new(
            3,
            "fatty liver after 2022",
            TaskParams::text_after("fatty liver", "2023-01-01"),
            q(&[3]),
        ),
        BenchTask::new(
            4,
            "computer science over 60 minutes in 2013/2014",
            TaskParams::long_in_years("computer science", 3601, "2013-01-01", "2014-12-31"),
            q(&[4]),
        ),
        BenchTask::new(
            5,
            "any video in English",
            TaskParams::lang_type("en", "video"),
            q(&[2, 3, 4, 5]),
        ),
    ]
}
