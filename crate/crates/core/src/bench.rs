//! The five evaluation tasks: their flat search parameters, expected answer
//! sets, and the report a bench run produces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::federate::Param;
use crate::ids::ItemId;

/// Server-side time allowed per task on the 5k corpus.
pub const LATENCY_BUDGET_MS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskParams(pub Vec<Param>);

impl TaskParams {
    pub fn title(title: &str) -> Self {
        Self(vec![Param::new("q", title)])
    }

    pub fn topic_publisher(topic: &str, publisher: &str) -> Self {
        Self(vec![
            Param::new("topic", topic),
            Param::new("publisher", publisher),
        ])
    }

    pub fn text_after(text: &str, after: &str) -> Self {
        Self(vec![Param::new("q", text), Param::new("after", after)])
    }

    pub fn long_in_years(topic: &str, min_seconds: i64, after: &str, before: &str) -> Self {
        Self(vec![
            Param::new("topic", topic),
            Param::new("minSeconds", min_seconds.to_string()),
            Param::new("after", after),
            Param::new("before", before),
        ])
    }

    pub fn lang_type(lang: &str, media_type: &str) -> Self {
        Self(vec![
            Param::new("lang", lang),
            Param::new("type", media_type),
        ])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|p| (p.name.as_str(), p.value.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchTask {
    pub number: u8,
    pub name: String,
    pub params: TaskParams,
    pub expected: BTreeSet<ItemId>,
}

impl BenchTask {
    pub fn new(number: u8, name: &str, params: TaskParams, expected: BTreeSet<ItemId>) -> Self {
        Self {
            number,
            name: name.to_string(),
            params,
            expected,
        }
    }

    /// Compares the full answer set of one run against the expectation.
    pub fn judge(&self, actual: BTreeSet<ItemId>, latency_ms: f64, calls: usize) -> TaskOutcome {
        TaskOutcome {
            number: self.number,
            name: self.name.clone(),
            passed: actual == self.expected && !self.expected.is_empty(),
            latency_ms,
            calls,
            expected: self.expected.len(),
            missing: self.expected.difference(&actual).copied().collect(),
            unexpected: actual.difference(&self.expected).copied().collect(),
            error: None,
        }
    }

    /// Outcome for a run that could not complete.
    pub fn failed(&self, error: impl Into<String>, latency_ms: f64, calls: usize) -> TaskOutcome {
        TaskOutcome {
            passed: false,
            error: Some(error.into()),
            ..self.judge(BTreeSet::new(), latency_ms, calls)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub number: u8,
    pub name: String,
    pub passed: bool,
    /// Wall-clock over all calls of the task, server side.
    pub latency_ms: f64,
    pub calls: usize,
    pub expected: usize,
    pub missing: Vec<ItemId>,
    pub unexpected: Vec<ItemId>,
    /// Set when a call failed outright.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub items: usize,
    pub tasks: Vec<TaskOutcome>,
}

impl BenchReport {
    pub fn passed(&self) -> usize {
        self.tasks.iter().filter(|t| t.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        !self.tasks.is_empty() && self.passed() == self.tasks.len()
    }

    pub fn within_budget(&self) -> bool {
        self.tasks.iter().all(|t| t.latency_ms < LATENCY_BUDGET_MS)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn judge_reports_diff() {
        let ids = |v: &[u64]| v.iter().map(|&n| ItemId::new(n)).collect::<BTreeSet<_>>();
        let task = BenchTask::new(5, "t", TaskParams::lang_type("en", "video"), ids(&[2, 3]));
        let out = task.judge(ids(&[3, 4]), 1.0, 1);
        assert!(!out.passed);
        assert_eq!(out.missing, vec![ItemId::new(2)]);
        assert_eq!(out.unexpected, vec![ItemId::new(4)]);
        assert!(task.judge(ids(&[2, 3]), 1.0, 1).passed);
    }

    #[test]
    fn empty_expectation_never_passes() {
        let task = BenchTask::new(1, "t", TaskParams::title("x"), BTreeSet::new());
        assert!(!task.judge(BTreeSet::new(), 0.0, 1).passed);
    }
}
