use std::cmp::Ordering;

use super::SearchResult;
use crate::graph::Item;
use crate::ids::{DocId, ItemId};
use crate::text::tokenize;

/// Anything orderable by (score desc, item id asc).
pub trait Ranked {
    fn score(&self) -> f64;
    fn media(&self) -> ItemId;
}

impl Ranked for SearchResult {
    fn score(&self) -> f64 {
        self.score
    }

    fn media(&self) -> ItemId {
        self.media
    }
}

/// A filtered result before complementing.
#[derive(Debug, Clone)]
pub(crate) struct Candidate<'a> {
    pub item: &'a Item,
    pub in_graph: bool,
    pub text: Option<(DocId, f64)>,
    pub score: f64,
}

impl Ranked for Candidate<'_> {
    fn score(&self) -> f64 {
        self.score
    }

    fn media(&self) -> ItemId {
        self.item.id
    }
}

fn order<T: Ranked>(a: &T, b: &T) -> Ordering {
    b.score()
        .total_cmp(&a.score())
        .then_with(|| a.media().cmp(&b.media()))
}

/// Stable total order: score descending, then item id ascending. The output
/// does not depend on input order.
pub fn rank<T: Ranked>(results: &mut [T]) {
    results.sort_by(order);
}

/// Lifts items whose label equals the free text (after normalization) above
/// every other result: the bonus exceeds the highest score in the set.
pub(crate) fn apply_title_bonus<S: AsRef<str>>(candidates: &mut [Candidate<'_>], free_text: &[S]) {
    let query: Vec<String> = free_text
        .iter()
        .flat_map(|t| tokenize::words(t.as_ref()).collect::<Vec<_>>())
        .collect();
    if query.is_empty() {
        return;
    }
    let exact: Vec<bool> = candidates
        .iter()
        .map(|c| {
            c.item
                .labels
                .values()
                .any(|l| tokenize::words(l).eq(query.iter().cloned()))
        })
        .collect();
    if !exact.contains(&true) {
        return;
    }
    let bonus = 1.0 + candidates.iter().map(|c| c.score).fold(0.0, f64::max);
    for (c, is_exact) in candidates.iter_mut().zip(exact) {
        if is_exact {
            c.score += bonus;
        }
    }
}
