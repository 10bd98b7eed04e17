//! Worked examples over the six-item reference library.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use mediahub_core::federate::{
    complement, federated_search, parse_query, suggest_filters, FacetKind, MatchedIn, MediaQuery,
};
use mediahub_core::fixture;
use mediahub_core::graph::{
    core_props, FilterAtom, FilterSet, GraphError, MediaGraph, NewItem, Page, Value,
};
use mediahub_core::ingest::{commit, map_record, parse_bytes, DatasetFormat, ItemDraft};
use mediahub_core::library::Library;
use mediahub_core::text::{DocumentKind, NewDocument, Segment, TextError};
use mediahub_core::{DocId, ItemId};

fn q(n: u64) -> ItemId {
    ItemId::new(n)
}

fn ids(v: &[u64]) -> BTreeSet<ItemId> {
    v.iter().map(|&n| q(n)).collect()
}

fn date(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn drafts() -> Vec<ItemDraft> {
    let graph = MediaGraph::new();
    let resolved = fixture::mapping().resolve(graph.registry()).unwrap();
    parse_bytes("f", fixture::DATASET.as_bytes(), DatasetFormat::Jsonl)
        .records
        .iter()
        .map(|r| map_record(r, &resolved, graph.registry()).unwrap().draft)
        .collect()
}

#[test]
fn ingest_allocates_q1_to_q6_with_six_revisions() {
    let mut graph = MediaGraph::new();
    let report = commit(&mut graph, drafts(), "importer").unwrap();
    assert_eq!(
        (report.created, report.updated, report.skipped_duplicates),
        (6, 0, 0)
    );
    assert_eq!(
        graph.live().map(|i| i.id).collect::<Vec<_>>(),
        (1..=6).map(q).collect::<Vec<_>>()
    );
    assert_eq!(graph.revisions().len(), 6);

    let again = commit(&mut graph, drafts(), "importer").unwrap();
    assert_eq!(
        (again.created, again.updated, again.skipped_duplicates),
        (0, 0, 6)
    );
    assert_eq!(graph.revisions().len(), 6);
}

#[test]
fn fixture_matches_its_description() {
    let lib = fixture::library();
    let expect = [
        (
            1,
            "Die Klimakrise erklärt",
            "video",
            "de",
            900,
            "2021-03-01",
        ),
        (
            2,
            "History of Göttingen University",
            "video",
            "en",
            3600,
            "2013-05-10",
        ),
        (
            3,
            "Fatty Liver Disease Explained",
            "video",
            "en",
            1200,
            "2023-02-14",
        ),
        (
            4,
            "Introduction to Computer Science",
            "video",
            "en",
            5400,
            "2014-09-01",
        ),
        (
            5,
            "Computer Science Lecture 2",
            "video",
            "en",
            2700,
            "2013-11-11",
        ),
        (6, "Wissenschaft heute", "podcast", "de", 2400, "2022-06-01"),
    ];
    for (n, title, kind, lang, secs, day) in expect {
        let item = lib.graph.get_item(q(n)).unwrap();
        assert_eq!(item.title(), title);
        assert_eq!(item.first(core_props::MEDIA_TYPE), Some(&Value::text(kind)));
        assert_eq!(item.first(core_props::LANGUAGE), Some(&Value::text(lang)));
        assert_eq!(
            item.first(core_props::DURATION),
            Some(&Value::Quantity(secs))
        );
        assert_eq!(
            item.first(core_props::PUBLICATION_DATE),
            Some(&Value::Date(date(day)))
        );
    }
    assert!(!lib.graph.get_item(q(6)).unwrap().has(core_props::TOPIC));
    assert_eq!(
        lib.graph.get_item(q(1)).unwrap().transcript_ref,
        Some(DocId::new(1))
    );
    assert_eq!(
        lib.graph.get_item(q(6)).unwrap().transcript_ref,
        Some(DocId::new(2))
    );
    assert_eq!(lib.graph.get_item(q(3)).unwrap().transcript_ref, None);
}

#[test]
fn get_item_examples() {
    let lib = fixture::library();
    let q3 = lib.graph.get_item(q(3)).unwrap();
    assert_eq!(q3.title(), "Fatty Liver Disease Explained");
    assert_eq!(
        q3.first(core_props::PUBLICATION_DATE),
        Some(&Value::Date(date("2023-02-14")))
    );
    assert!(matches!(
        lib.graph.get_item(q(999)),
        Err(GraphError::UnknownItem(_))
    ));
}

#[test]
fn upsert_examples() {
    let mut lib = fixture::library();
    let g = &mut lib.graph;
    let revs = g.revisions().len();
    g.upsert_statement(q(1), core_props::LANGUAGE, Value::text("de"), "ed")
        .unwrap();
    let before = g.get_item(q(1)).unwrap().clone();
    g.upsert_statement(q(1), core_props::LANGUAGE, Value::text("de"), "ed")
        .unwrap();
    assert_eq!(g.revisions().len(), revs + 2);
    assert_eq!(g.get_item(q(1)).unwrap(), &before);

    g.upsert_statement(q(1), core_props::DURATION, Value::Quantity(900), "ed")
        .unwrap();
    g.upsert_statement(q(1), core_props::DURATION, Value::Quantity(901), "ed")
        .unwrap();
    let durations: Vec<_> = g
        .get_item(q(1))
        .unwrap()
        .values(core_props::DURATION)
        .cloned()
        .collect();
    assert_eq!(durations, vec![Value::Quantity(901)]);

    g.upsert_statement(q(2), core_props::TOPIC, Value::text("medicine"), "ed")
        .unwrap();
    let topics: BTreeSet<_> = g
        .get_item(q(2))
        .unwrap()
        .values(core_props::TOPIC)
        .cloned()
        .collect();
    assert_eq!(
        topics,
        [Value::text("history"), Value::text("medicine")]
            .into_iter()
            .collect()
    );
}

#[test]
fn negative_duration_is_rejected() {
    let mut g = MediaGraph::new();
    let draft = NewItem::labelled("en", "X").with(core_props::DURATION, Value::Quantity(-5));
    assert!(matches!(
        g.create_item(draft, "ed"),
        Err(GraphError::SchemaViolation(_))
    ));
    let first = g.create_item(NewItem::labelled("en", "A"), "ed").unwrap();
    let second = g.create_item(NewItem::labelled("en", "B"), "ed").unwrap();
    assert_eq!(
        (first.to_string().as_str(), second.to_string().as_str()),
        ("Q1", "Q2")
    );
}

#[test]
fn query_items_examples() {
    let lib = fixture::library();
    let english = FilterSet::new().with(FilterAtom::Equals {
        property: core_props::LANGUAGE,
        value: Value::text("en"),
    });
    assert_eq!(
        lib.graph.query_items(&english, Page::all()).unwrap().ids(),
        vec![q(2), q(3), q(4), q(5)]
    );

    let task4 = FilterSet::new()
        .with(FilterAtom::Contains {
            property: core_props::TOPIC,
            value: "computer science".into(),
        })
        .with(FilterAtom::QuantityRange {
            property: core_props::DURATION,
            min: Some(3601),
            max: None,
        })
        .with(FilterAtom::DateRange {
            property: core_props::PUBLICATION_DATE,
            from: Some(date("2013-01-01")),
            to: Some(date("2014-12-31")),
        });
    assert_eq!(
        lib.graph.query_items(&task4, Page::all()).unwrap().ids(),
        vec![q(4)]
    );

    let all = lib
        .graph
        .query_items(&FilterSet::new(), Page::all())
        .unwrap();
    assert_eq!(all.total, 6);
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let lib = fixture::library();
    let path = dir.path().join("graph.jsonl");
    lib.graph.snapshot(&path).unwrap();
    assert_eq!(MediaGraph::load(&path).unwrap(), lib.graph);

    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
    assert!(matches!(
        MediaGraph::load(&path),
        Err(GraphError::CorruptSnapshot(_))
    ));

    let empty = dir.path().join("empty.jsonl");
    MediaGraph::new().snapshot(&empty).unwrap();
    let loaded = MediaGraph::load(&empty).unwrap();
    assert!(loaded.is_empty());
    assert_eq!(loaded.next_item_id(), q(1));
}

#[test]
fn text_store_examples() {
    let mut lib = fixture::library();
    let hits = lib.text.search_text(&["Klimawandel"], 10).unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!((hits[0].doc, hits[0].media_ref), (DocId::new(2), q(6)));
    assert!(hits[0].snippet.contains("Klimawandel"));
    assert_eq!(hits[0].timestamps, vec![95.0, 1260.0]);

    assert!(lib.text.search_text(&["zzzyx"], 10).unwrap().is_empty());
    let none: [&str; 0] = [];
    assert!(matches!(
        lib.text.search_text(&none, 10),
        Err(TextError::EmptyQuery)
    ));

    let d1 = lib.text.get_document(DocId::new(1)).unwrap();
    assert_eq!(d1.media_ref, q(1));
    assert_eq!(d1.segments, fixture::documents()[0].segments);
    assert!(matches!(
        lib.text.get_document(DocId::new(99)),
        Err(TextError::UnknownDoc(_))
    ));

    let refused = NewDocument {
        media_ref: q(3),
        kind: DocumentKind::Transcript,
        language: "en".into(),
        consent: false,
        segments: vec![Segment::at(0.0, "hello")],
    };
    assert!(lib.put_document(refused.clone(), "ed").is_err());
    let description = NewDocument {
        kind: DocumentKind::Description,
        ..refused
    };
    assert_eq!(lib.put_document(description, "ed").unwrap(), DocId::new(3));
}

fn search(lib: &Library, query: &MediaQuery) -> Vec<ItemId> {
    federated_search(Some(&lib.graph), Some(&lib.text), query)
        .unwrap()
        .results
        .iter()
        .map(|r| r.media)
        .collect()
}

#[test]
fn federated_examples() {
    let lib = fixture::library();
    let fatty = MediaQuery::text(&["Fatty", "Liver"]).with_filters(FilterSet::new().with(
        FilterAtom::DateRange {
            property: core_props::PUBLICATION_DATE,
            from: Some(date("2023-01-01")),
            to: None,
        },
    ));
    assert_eq!(search(&lib, &fatty), vec![q(3)]);

    let resp = federated_search(
        Some(&lib.graph),
        Some(&lib.text),
        &MediaQuery::text(&["Klimawandel"]),
    )
    .unwrap();
    assert_eq!(resp.results.len(), 1);
    let r = &resp.results[0];
    assert_eq!((r.media, r.matched_in), (q(6), MatchedIn::TextOnly));
    assert_eq!(r.title, "Wissenschaft heute");
    assert_eq!(
        r.metadata["publication-date"],
        vec![Value::Date(date("2022-06-01"))]
    );
    assert!(r.snippet.as_deref().unwrap().contains("Klimawandel"));

    let english = MediaQuery::browse().with_filters(FilterSet::new().with(FilterAtom::Equals {
        property: core_props::LANGUAGE,
        value: Value::text("en"),
    }));
    assert_eq!(search(&lib, &english), vec![q(2), q(3), q(4), q(5)]);

    let title = MediaQuery::text(&["Introduction to Computer Science"]);
    assert_eq!(search(&lib, &title)[0], q(4));
}

#[test]
fn complement_examples() {
    let lib = fixture::library();
    let c = complement(&lib.graph, &ids(&[2]), &[]);
    assert_eq!(c.results.len(), 1);
    assert_eq!(c.results[0].matched_in, MatchedIn::GraphOnly);
    assert!(c.results[0].snippet.is_none());

    let d2 = lib.text.search_text(&["Klimawandel"], 10).unwrap();
    let c = complement(&lib.graph, &BTreeSet::new(), &d2);
    assert_eq!(c.results[0].matched_in, MatchedIn::TextOnly);
    assert_eq!(c.results[0].metadata["language"], vec![Value::text("de")]);

    let d1 = lib.text.search_text(&["Klimakrise"], 10).unwrap();
    assert_eq!(d1[0].media_ref, q(1));
    let c = complement(&lib.graph, &ids(&[1]), &d1);
    assert_eq!(c.results.len(), 1);
    assert_eq!(c.results[0].matched_in, MatchedIn::Both);
    assert!(!c.partial);
}

#[test]
fn facet_examples() {
    let lib = fixture::library();
    let items = |v: &[u64]| {
        v.iter()
            .map(|&n| lib.graph.get_item(q(n)).unwrap())
            .collect::<Vec<_>>()
    };

    let facets = suggest_filters(items(&[4, 5]));
    let of = |kind| {
        facets
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| (f.value.clone(), f.count))
            .collect::<Vec<_>>()
    };
    assert_eq!(of(FacetKind::Language), vec![("en".to_string(), 2)]);
    assert_eq!(
        of(FacetKind::PublicationYear),
        vec![("2013".into(), 1), ("2014".into(), 1)]
    );
    assert_eq!(
        of(FacetKind::DurationBucket),
        vec![("10-60 min".into(), 1), (">60 min".into(), 1)]
    );

    assert!(suggest_filters(items(&[])).is_empty());

    let facets = suggest_filters(items(&[2, 3, 4, 5]));
    let langs: Vec<_> = facets
        .iter()
        .filter(|f| f.kind == FacetKind::Language)
        .collect();
    assert_eq!(langs.len(), 1);
    assert_eq!((langs[0].value.as_str(), langs[0].count), ("en", 4));
}

#[test]
fn five_tasks_on_the_fixture() {
    let lib = fixture::library();
    for task in fixture::tasks() {
        let mut query = parse_query(task.params.pairs()).unwrap();
        query.page = Page::all();
        let got: BTreeSet<ItemId> = search(&lib, &query).into_iter().collect();
        assert_eq!(got, task.expected, "task {}", task.number);
    }
}

#[test]
fn flat_params_page_two() {
    let lib = fixture::library();
    let query = parse_query([("lang", "en"), ("offset", "2"), ("limit", "2")]).unwrap();
    assert_eq!(search(&lib, &query), vec![q(4), q(5)]);
}
