use std::collections::BTreeSet;
use std::sync::LazyLock;

use chrono::NaiveDate;
use proptest::prelude::*;

use mediahub_core::federate::{core_metadata, federated_search, MatchedIn, MediaQuery};
use mediahub_core::graph::{core_props, FilterAtom, FilterSet, Page, Value};
use mediahub_core::library::Library;
use mediahub_core::synth::{self, SynthConfig};
use mediahub_core::ItemId;

static LIBRARY: LazyLock<Library> = LazyLock::new(|| {
    let mut lib = Library::new();
    synth::generate(SynthConfig::randomized(400, 11))
        .seed(&mut lib)
        .unwrap();
    lib
});

fn year(y: i32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, 1, 1).unwrap()
}

fn atom() -> impl Strategy<Value = FilterAtom> {
    let text = |p, pool: &'static [&'static str]| {
        proptest::sample::select(pool).prop_map(move |v| FilterAtom::Equals {
            property: p,
            value: Value::text(v),
        })
    };
    prop_oneof![
        text(core_props::LANGUAGE, synth::LANGUAGES),
        text(core_props::TOPIC, synth::TOPICS),
        text(core_props::MEDIA_TYPE, synth::MEDIA_TYPES),
        text(core_props::PUBLISHER, synth::PUBLISHERS),
        (2008i32..2025, 0i32..4).prop_map(|(y, span)| FilterAtom::DateRange {
            property: core_props::PUBLICATION_DATE,
            from: Some(year(y)),
            to: Some(year(y + span)),
        }),
        (0i64..7200, proptest::option::of(0i64..7200)).prop_map(|(a, b)| {
            FilterAtom::QuantityRange {
                property: core_props::DURATION,
                min: Some(b.map_or(a, |b| a.min(b))),
                max: b.map(|b| a.max(b)),
            }
        }),
    ]
}

fn query() -> impl Strategy<Value = MediaQuery> {
    let words: Vec<&str> = synth::TITLE_WORDS
        .iter()
        .chain(synth::TRANSCRIPT_WORDS)
        .copied()
        .collect();
    (
        prop::collection::vec(proptest::sample::select(words), 0..3),
        prop::collection::vec(atom(), 0..3),
    )
        .prop_map(|(words, atoms)| {
            let filters: FilterSet = atoms.into_iter().collect();
            if words.is_empty() {
                MediaQuery::browse().with_filters(filters)
            } else {
                MediaQuery::text(&words).with_filters(filters)
            }
            .with_page(Page::all())
        })
}

fn search(q: &MediaQuery) -> mediahub_core::federate::SearchResponse {
    federated_search(Some(&LIBRARY.graph), Some(&LIBRARY.text), q).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn results_are_unique_ordered_and_complemented(q in query()) {
        let resp = search(&q);
        prop_assert_eq!(resp.total, resp.results.len());
        let ids: BTreeSet<ItemId> = resp.results.iter().map(|r| r.media).collect();
        prop_assert_eq!(ids.len(), resp.results.len());
        for w in resp.results.windows(2) {
            prop_assert!(w[0].score > w[1].score || (w[0].score == w[1].score && w[0].media < w[1].media));
        }
        for r in &resp.results {
            let item = LIBRARY.graph.get_item(r.media).unwrap();
            prop_assert_eq!(&r.metadata, &core_metadata(&LIBRARY.graph, item));
            prop_assert_eq!(&r.title, item.title());
            let has_text = matches!(r.matched_in, MatchedIn::TextOnly | MatchedIn::Both);
            prop_assert_eq!(r.snippet.is_some(), has_text);
            prop_assert!(q.filters.matches(item));
        }
    }

    #[test]
    fn facets_are_exact_and_consistent(q in query()) {
        let resp = search(&q);
        for facet in &resp.facets {
            let brute = resp
                .results
                .iter()
                .filter(|r| facet.filter.matches(LIBRARY.graph.get_item(r.media).unwrap()))
                .count();
            prop_assert_eq!(facet.count, brute, "{:?}", facet);
            let narrowed = search(&q.clone().with_filters(q.filters.clone().with(facet.filter.clone())));
            prop_assert_eq!(narrowed.total, facet.count, "{:?}", facet);
        }
    }

    #[test]
    fn an_extra_atom_never_grows_total(q in query(), extra in atom()) {
        let base = search(&q).total;
        let narrowed = search(&q.clone().with_filters(q.filters.clone().with(extra))).total;
        prop_assert!(narrowed <= base);
    }

    #[test]
    fn pages_slice_the_full_ranking(q in query(), offset in 0usize..40, limit in 1usize..25) {
        let full = search(&q);
        let page = search(&q.clone().with_page(Page::new(offset, limit)));
        prop_assert_eq!(page.total, full.total);
        prop_assert_eq!(&page.facets, &full.facets);
        let want: Vec<ItemId> = full.results.iter().skip(offset).take(limit).map(|r| r.media).collect();
        prop_assert_eq!(page.results.iter().map(|r| r.media).collect::<Vec<_>>(), want);
    }

    #[test]
    fn deterministic(q in query()) {
        prop_assert_eq!(search(&q), search(&q));
    }
}

#[test]
fn text_down_answers_from_graph_with_partial_flag() {
    let q = MediaQuery::text(&["climate"]);
    let resp = federated_search(Some(&LIBRARY.graph), None, &q).unwrap();
    assert!(resp.partial);
    assert!(resp
        .results
        .iter()
        .all(|r| r.matched_in == MatchedIn::GraphOnly));
}

#[test]
fn graph_down_answers_plain_text_queries_only() {
    let q = MediaQuery::text(&["climate"]);
    let resp = federated_search(None, Some(&LIBRARY.text), &q).unwrap();
    assert!(resp.partial && resp.total > 0);
    assert!(resp
        .results
        .iter()
        .all(|r| r.matched_in == MatchedIn::TextOnly && r.metadata.is_empty()));

    let filtered = MediaQuery::browse().with_filters(FilterSet::new().with(FilterAtom::Equals {
        property: core_props::LANGUAGE,
        value: Value::text("en"),
    }));
    assert!(federated_search(None, Some(&LIBRARY.text), &filtered).is_err());
    assert!(federated_search(None, None, &q).is_err());
}
