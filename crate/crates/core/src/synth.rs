//! Deterministic synthetic corpus with the same field roles as the fixture
//! dataset. Each evaluation task gets one planted answer; random rows are
//! generated so that they can never satisfy a task.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{Datelike, Duration, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bench::BenchTask;
use crate::fixture;
use crate::graph::{core_props, Value};
use crate::ids::ItemId;
use crate::ingest::{run_import, DatasetFormat, ImportJob, ImportReport, IngestError};
use crate::library::{Library, LibraryError};
use crate::text::{DocumentKind, NewDocument, Segment};

pub const ACTOR: &str = "synth";

pub const TITLE_WORDS: &[&str] = &[
    "climate",
    "energy",
    "ocean",
    "brain",
    "quantum",
    "history",
    "computer",
    "science",
    "data",
    "health",
    "medicine",
    "physics",
    "biology",
    "future",
    "city",
    "water",
    "lecture",
    "explained",
    "basics",
    "research",
    "Klimawandel",
    "Forschung",
    "Gesundheit",
    "Energie",
    "Wissenschaft",
    "Geschichte",
    "Zukunft",
    "Stadt",
    "Gehirn",
    "Meer",
    "Göttingen",
    "Universität",
    "Vortrag",
    "heute",
    "énergie",
    "santé",
];

pub const TRANSCRIPT_WORDS: &[&str] = &[
    "the",
    "and",
    "we",
    "today",
    "talk",
    "about",
    "how",
    "climate",
    "energy",
    "ocean",
    "brain",
    "quantum",
    "history",
    "computer",
    "science",
    "data",
    "health",
    "medicine",
    "research",
    "study",
    "results",
    "model",
    "question",
    "students",
    "university",
    "experiment",
    "evidence",
    "die",
    "und",
    "wir",
    "heute",
    "Klimawandel",
    "Forschung",
    "Gesundheit",
    "Studie",
    "Ergebnisse",
    "Erklärung",
    "Wärme",
    "Göttingen",
    "Universität",
];

pub const TOPICS: &[&str] = &[
    "physics",
    "biology",
    "chemistry",
    "astronomy",
    "climate change",
    "medicine",
    "mathematics",
    "history",
    "computer science",
    "psychology",
    "geology",
    "economics",
];

pub const PUBLISHERS: &[&str] = &[
    "University of Hamburg",
    "TU Munich",
    "ETH Zurich",
    "Open University",
    "University of Göttingen",
    "Max Planck Society",
];

pub const LANGUAGES: &[&str] = &["en", "de", "fr", "es"];

pub const MEDIA_TYPES: &[&str] = &["video", "podcast"];

/// Raw spellings the generator uses for languages, all accepted by the
/// mapping's language transform.
const LANGUAGE_SPELLINGS: &[(&str, &[&str])] = &[
    ("en", &["en", "EN", "English", "eng"]),
    ("de", &["de", "German", "Deutsch"]),
    ("fr", &["fr", "French"]),
    ("es", &["es", "Spanish"]),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub items: usize,
    pub seed: u64,
    pub transcript_ratio: f64,
    pub description_ratio: f64,
    /// Plant the five task answers and keep random rows from matching them.
    pub plant_tasks: bool,
}

impl SynthConfig {
    pub fn new(items: usize, seed: u64) -> Self {
        Self {
            items,
            seed,
            transcript_ratio: 0.35,
            description_ratio: 0.15,
            plant_tasks: true,
        }
    }

    /// No planted answers, no exclusions: for oracle comparisons.
    pub fn randomized(items: usize, seed: u64) -> Self {
        Self {
            plant_tasks: false,
            ..Self::new(items, seed)
        }
    }
}

/// Canonical content of one row, alongside the raw spellings written to
/// the dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub fields: BTreeMap<String, String>,
    pub external_id: String,
    pub language: Option<String>,
    pub media_type: String,
    pub duration: Option<i64>,
    pub date: Option<NaiveDate>,
    pub topics: Vec<String>,
    pub publisher: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthDocument {
    pub row: usize,
    pub kind: DocumentKind,
    pub language: String,
    pub segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub config: SynthConfig,
    pub rows: Vec<Row>,
    pub documents: Vec<SynthDocument>,
    /// Row index of the planted answer for tasks 1-4.
    pub planted: Vec<usize>,
}

/// A corpus after import: row-to-item mapping and resolved tasks.
#[derive(Debug, Clone, PartialEq)]
pub struct Seeded {
    pub report: ImportReport,
    pub ids: Vec<ItemId>,
    pub tasks: Vec<BenchTask>,
}

#[derive(Debug, thiserror::Error)]
pub enum SeedError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Library(#[from] LibraryError),
    #[error("row {0} was not imported")]
    MissingRow(usize),
}

struct Generator {
    rng: ChaCha8Rng,
    plant: bool,
}

fn date_between(rng: &mut ChaCha8Rng, from: NaiveDate, to: NaiveDate) -> NaiveDate {
    let span = (to - from).num_days();
    from + Duration::days(rng.random_range(0..=span))
}

impl Generator {
    fn pick<'a>(&mut self, pool: &[&'a str]) -> &'a str {
        pool.choose(&mut self.rng).expect("non-empty pool")
    }

    fn words(&mut self, pool: &[&str], n: usize) -> String {
        (0..n)
            .map(|_| self.pick(pool))
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn title(&mut self) -> String {
        let n = self.rng.random_range(2..=5);
        let mut words = self.words(TITLE_WORDS, n);
        if let Some(first) = words.get_mut(0..1) {
            first.make_ascii_uppercase();
        }
        words
    }

    fn duration_text(&mut self, seconds: i64) -> String {
        match self.rng.random_range(0..3) {
            0 => seconds.to_string(),
            1 => format!("{}:{:02}", seconds / 60, seconds % 60),
            _ => format!(
                "{}:{:02}:{:02}",
                seconds / 3600,
                seconds / 60 % 60,
                seconds % 60
            ),
        }
    }

    fn date_text(&mut self, date: NaiveDate) -> String {
        match self.rng.random_range(0..4) {
            0 => date.format("%Y/%m/%d").to_string(),
            1 => date.format("%d.%m.%Y").to_string(),
            _ => date.to_string(),
        }
    }

    fn language_text(&mut self, code: &str) -> String {
        let spellings = LANGUAGE_SPELLINGS
            .iter()
            .find(|(c, _)| *c == code)
            .map_or(&[][..], |(_, s)| *s);
        spellings
            .choose(&mut self.rng)
            .map_or(code, |v| *v)
            .to_string()
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        index: usize,
        seed: u64,
        title: String,
        language: Option<&str>,
        media_type: &str,
        duration: Option<i64>,
        date: Option<NaiveDate>,
        topics: Vec<String>,
        publisher: Option<&str>,
    ) -> Row {
        let external_id = format!("syn{seed}-{index:06}");
        let mut fields = BTreeMap::new();
        fields.insert("title".to_string(), title);
        fields.insert("type".to_string(), media_type.to_string());
        fields.insert(
            "platform".to_string(),
            if media_type == "video" {
                "youtube"
            } else {
                "podcast-feed"
            }
            .to_string(),
        );
        fields.insert("video_id".to_string(), external_id.clone());
        if let Some(lang) = language {
            let raw = self.language_text(lang);
            fields.insert("lang".to_string(), raw);
        }
        if let Some(d) = duration {
            let raw = self.duration_text(d);
            fields.insert("duration".to_string(), raw);
        }
        if let Some(d) = date {
            let raw = self.date_text(d);
            fields.insert("date".to_string(), raw);
        }
        if !topics.is_empty() {
            fields.insert("topics".to_string(), topics.join("; "));
        }
        if let Some(p) = publisher {
            fields.insert("publisher".to_string(), p.to_string());
        }
        if self.rng.random_bool(0.3) {
            fields.insert(
                "license".to_string(),
                self.pick(&["CC BY 4.0", "CC BY-SA 4.0", "Standard"])
                    .to_string(),
            );
        }
        if self.rng.random_bool(0.2) {
            fields.insert(
                "captions".to_string(),
                self.pick(&["true", "false"]).to_string(),
            );
        }
        Row {
            fields,
            external_id,
            language: language.map(str::to_string),
            media_type: media_type.to_string(),
            duration,
            date,
            topics,
            publisher: publisher.map(str::to_string),
        }
    }

    fn random_row(&mut self, index: usize, seed: u64) -> Row {
        let title = self.title();
        let language = self.rng.random_bool(0.95).then(|| self.pick(LANGUAGES));
        let media_type = if self.rng.random_bool(0.8) {
            "video"
        } else {
            "podcast"
        };
        let mut duration = self
            .rng
            .random_bool(0.95)
            .then(|| self.rng.random_range(30..=7200));
        let date = self.rng.random_bool(0.95).then(|| {
            date_between(
                &mut self.rng,
                NaiveDate::from_ymd_opt(2008, 1, 1).unwrap(),
                NaiveDate::from_ymd_opt(2024, 12, 31).unwrap(),
            )
        });
        let n_topics = self.rng.random_range(0..=2);
        let mut topics: Vec<String> = Vec::new();
        for _ in 0..n_topics {
            let t = self.pick(TOPICS).to_string();
            if !topics.contains(&t) {
                topics.push(t);
            }
        }
        let mut publisher = self.rng.random_bool(0.7).then(|| self.pick(PUBLISHERS));

        if self.plant {
            if topics.iter().any(|t| t == "history") && publisher == Some("University of Göttingen")
            {
                publisher = Some("University of Hamburg");
            }
            let cs = topics.iter().any(|t| t == "computer science");
            let in_window = date.is_some_and(|d| (2013..=2014).contains(&d.year()));
            if cs && in_window && duration.is_some_and(|d| d >= 3601) {
                duration = Some(3600);
            }
        }
        self.row(
            index, seed, title, language, media_type, duration, date, topics, publisher,
        )
    }

    fn segments(&mut self, duration: Option<i64>) -> Vec<Segment> {
        let n = self.rng.random_range(2..=6);
        let total = duration.unwrap_or(600).max(n as i64) as f64;
        let timed = self.rng.random_bool(0.85);
        (0..n)
            .map(|i| {
                let len = self.rng.random_range(6..=18);
                let text = self.words(TRANSCRIPT_WORDS, len);
                if timed {
                    Segment::at((total * i as f64 / n as f64).floor(), text)
                } else {
                    Segment::untimed(text)
                }
            })
            .collect()
    }
}

pub fn generate(config: SynthConfig) -> Corpus {
    let mut g = Generator {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        plant: config.plant_tasks,
    };
    let seed = config.seed;
    let mut rows: Vec<Row> = Vec::with_capacity(config.items);
    let mut planted = Vec::new();
    let mut extra_docs: Vec<(usize, Vec<Segment>)> = Vec::new();

    let n_planted = if config.plant_tasks { 6 } else { 0 };
    let random_rows = config.items.saturating_sub(n_planted);
    for i in 0..random_rows {
        let row = g.random_row(i, seed);
        rows.push(row);
    }

    if config.plant_tasks && config.items >= n_planted {
        let d = |y, m, day| NaiveDate::from_ymd_opt(y, m, day);
        // (row, task it answers, transcript)
        let specials: Vec<(Row, Option<usize>, Option<Vec<Segment>>)> = vec![
            (
                g.row(
                    0,
                    seed,
                    "Introduction to Computer Science".into(),
                    Some("en"),
                    "video",
                    Some(5400),
                    d(2014, 9, 1),
                    vec!["computer science".into()],
                    Some("MIT"),
                ),
                Some(0),
                None,
            ),
            (
                g.row(
                    0,
                    seed,
                    "History of Göttingen University".into(),
                    Some("en"),
                    "video",
                    Some(3600),
                    d(2013, 5, 10),
                    vec!["history".into()],
                    Some("University of Göttingen"),
                ),
                Some(1),
                None,
            ),
            (
                g.row(
                    0,
                    seed,
                    "Fatty Liver Disease Explained".into(),
                    Some("en"),
                    "video",
                    Some(1200),
                    d(2023, 2, 14),
                    vec!["medicine".into()],
                    None,
                ),
                Some(2),
                None,
            ),
            (
                g.row(
                    0,
                    seed,
                    "Algorithms and Data Structures".into(),
                    Some("en"),
                    "video",
                    Some(4500),
                    d(2013, 10, 20),
                    vec!["computer science".into()],
                    Some("TU Munich"),
                ),
                Some(3),
                None,
            ),
            // decoys for task 3: right words, too early
            (
                g.row(
                    0,
                    seed,
                    "Fatty Liver and Nutrition".into(),
                    Some("en"),
                    "video",
                    Some(900),
                    d(2019, 4, 2),
                    vec!["medicine".into()],
                    None,
                ),
                None,
                None,
            ),
            (
                g.row(
                    0,
                    seed,
                    "Health Today".into(),
                    Some("en"),
                    "podcast",
                    Some(1800),
                    d(2018, 7, 7),
                    vec!["medicine".into()],
                    None,
                ),
                None,
                Some(vec![
                    Segment::at(0.0, "welcome to the health podcast"),
                    Segment::at(
                        300.0,
                        "today we talk about fatty liver and what the evidence says",
                    ),
                ]),
            ),
        ];
        let mut slots: Vec<Option<usize>> = vec![None; 4];
        for (row, task, segments) in specials {
            let at = g.rng.random_range(0..=rows.len());
            rows.insert(at, row);
            for r in slots
                .iter_mut()
                .flatten()
                .chain(extra_docs.iter_mut().map(|(r, _)| r))
            {
                if *r >= at {
                    *r += 1;
                }
            }
            if let Some(task) = task {
                slots[task] = Some(at);
            }
            if let Some(segments) = segments {
                extra_docs.push((at, segments));
            }
        }
        planted = slots.into_iter().flatten().collect();
    }
    for (i, row) in rows.iter_mut().enumerate() {
        row.external_id = format!("syn{seed}-{i:06}");
        row.fields
            .insert("video_id".into(), row.external_id.clone());
    }

    let mut documents = Vec::new();
    let with_docs: BTreeSet<usize> = extra_docs.iter().map(|(r, _)| *r).collect();
    for i in 0..rows.len() {
        if with_docs.contains(&i) || (config.plant_tasks && planted.contains(&i)) {
            continue;
        }
        let language = rows[i].language.clone().unwrap_or_else(|| "en".into());
        if g.rng.random_bool(config.transcript_ratio) {
            let segments = g.segments(rows[i].duration);
            documents.push(SynthDocument {
                row: i,
                kind: DocumentKind::Transcript,
                language: language.clone(),
                segments,
            });
        }
        if g.rng.random_bool(config.description_ratio) {
            let len = g.rng.random_range(8..=30);
            let text = g.words(TRANSCRIPT_WORDS, len);
            documents.push(SynthDocument {
                row: i,
                kind: DocumentKind::Description,
                language,
                segments: vec![Segment::untimed(text)],
            });
        }
    }
    for (row, segments) in extra_docs {
        documents.push(SynthDocument {
            row,
            kind: DocumentKind::Transcript,
            language: rows[row].language.clone().unwrap_or_else(|| "en".into()),
            segments,
        });
    }
    documents.sort_by_key(|d| (d.row, d.kind == DocumentKind::Description));

    Corpus {
        config,
        rows,
        documents,
        planted,
    }
}

impl Corpus {
    pub fn to_jsonl(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for row in &self.rows {
            serde_json::to_writer(&mut out, &row.fields).expect("string map serializes");
            out.push(b'\n');
        }
        out
    }

    /// Rows that are English videos: the answer set of task 5.
    pub fn english_videos(&self) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| {
                self.rows[i].language.as_deref() == Some("en") && self.rows[i].media_type == "video"
            })
            .collect()
    }

    /// Imports the rows, stores the documents, and resolves the task answers
    /// to item ids.
    pub fn seed(&self, library: &mut Library) -> Result<Seeded, SeedError> {
        let mapping = fixture::mapping();
        let dataset = self.to_jsonl();
        let report = run_import(
            &mut library.graph,
            ImportJob {
                source: "synthetic.jsonl",
                dataset: &dataset,
                format: DatasetFormat::Jsonl,
                mapping: &mapping,
                provider: None,
                actor: ACTOR,
            },
        )?;
        let by_ext: HashMap<String, ItemId> = library
            .graph
            .live()
            .filter_map(|item| {
                let ext = item
                    .first(core_props::EXTERNAL_ID)
                    .and_then(Value::as_str)?;
                Some((ext.to_string(), item.id))
            })
            .collect();
        let ids = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                by_ext
                    .get(&row.external_id)
                    .copied()
                    .ok_or(SeedError::MissingRow(i))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for doc in &self.documents {
            library.put_document(
                NewDocument {
                    media_ref: ids[doc.row],
                    kind: doc.kind,
                    language: doc.language.clone(),
                    consent: true,
                    segments: doc.segments.clone(),
                },
                ACTOR,
            )?;
        }
        let tasks = if self.config.plant_tasks {
            self.tasks(&ids)
        } else {
            Vec::new()
        };
        Ok(Seeded { report, ids, tasks })
    }

    fn tasks(&self, ids: &[ItemId]) -> Vec<BenchTask> {
        let rows = |task: &[usize]| -> BTreeSet<ItemId> {
            task.iter().map(|&t| ids[self.planted[t]]).collect()
        };
        let mut tasks = fixture::tasks();
        tasks[0].expected = rows(&[0]);
        tasks[1].expected = rows(&[1]);
        tasks[2].expected = rows(&[2]);
        // the task 1 answer is also long computer science from 2014
        tasks[3].expected = rows(&[0, 3]);
        tasks[4].expected = self.english_videos().into_iter().map(|r| ids[r]).collect();
        tasks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(
            generate(SynthConfig::new(300, 7)),
            generate(SynthConfig::new(300, 7))
        );
        assert_ne!(
            generate(SynthConfig::new(300, 7)).rows,
            generate(SynthConfig::new(300, 8)).rows
        );
    }

    #[test]
    fn size_and_planted_rows() {
        let c = generate(SynthConfig::new(500, 1));
        assert_eq!(c.rows.len(), 500);
        assert_eq!(c.planted.len(), 4);
        assert_eq!(
            c.rows[c.planted[0]].fields["title"],
            "Introduction to Computer Science"
        );
        assert_eq!(
            c.rows[c.planted[2]].fields["title"],
            "Fatty Liver Disease Explained"
        );
        let ext: BTreeSet<&str> = c.rows.iter().map(|r| r.external_id.as_str()).collect();
        assert_eq!(ext.len(), 500);
    }

    #[test]
    fn seeds_into_library() {
        let c = generate(SynthConfig::new(200, 3));
        let mut lib = Library::new();
        let seeded = c.seed(&mut lib).unwrap();
        assert_eq!(seeded.report.created, 200);
        assert!(
            seeded.report.errors.is_empty(),
            "{:?}",
            seeded.report.errors
        );
        assert!(
            seeded.report.warnings.is_empty(),
            "{:?}",
            seeded.report.warnings
        );
        assert_eq!(lib.text.len(), c.documents.len());
        assert_eq!(seeded.tasks.len(), 5);
        assert!(seeded.tasks.iter().all(|t| !t.expected.is_empty()));
    }
}
