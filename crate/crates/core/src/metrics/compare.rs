use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::chromosome::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub coverage: f64,
    pub mutation_score: f64,
    pub sr_rate: f64,
    pub mean_coherence: f64,
    pub n_tests: usize,
    pub evals_used: u64,
}

/// One (subject, representation, seed) cell; `summary` is `None` when the
/// run failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub subject: String,
    pub representation: Representation,
    pub seed: u64,
    pub summary: Option<RunSummary>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub median: f64,
    pub iqr: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        Stat { median: quantile(&v, 0.5), iqr: quantile(&v, 0.75) - quantile(&v, 0.25) }
    }
}

/// Linear-interpolation quantile of sorted data (the usual "type 7").
/// NaN for no data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub subject: String,
    pub representation: Representation,
    /// Successful runs the statistics are taken over.
    pub runs: usize,
    pub coverage: Stat,
    pub mutation_score: Stat,
    pub sr_rate: Stat,
    pub mean_coherence: Stat,
    pub n_tests: Stat,
    pub evals_used: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    /// Sorted by (subject, representation, seed).
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
    /// Subjects lacking a successful run under some representation.
    pub unmatched: Vec<String>,
}

/// Median and IQR per (subject, representation) over seeds. Subjects
/// that lack successful runs under either representation are listed
/// rather than summarized.
pub fn compare(mut rows: Vec<RunRow>) -> ComparisonTable {
    rows.sort_by(|a, b| (&a.subject, a.representation, a.seed).cmp(&(&b.subject, b.representation, b.seed)));
    let mut groups: BTreeMap<(&str, Representation), Vec<RunSummary>> = BTreeMap::new();
    for r in &rows {
        if let Some(s) = r.summary {
            groups.entry((&r.subject, r.representation)).or_default().push(s);
        }
    }
    let subjects: BTreeSet<&str> = rows.iter().map(|r| r.subject.as_str()).collect();
    let mut unmatched = Vec::new();
    let mut summary = Vec::new();
    for s in subjects {
        if Representation::ALL.iter().any(|&repr| !groups.contains_key(&(s, repr))) {
            unmatched.push(String::from(s));
            continue;
        }
        for repr in Representation::ALL {
            let runs = &groups[&(s, repr)];
            let stat = |f: fn(&RunSummary) -> f64| Stat::of(&runs.iter().map(f).collect::<Vec<_>>());
            summary.push(SummaryRow {
                subject: s.into(),
                representation: repr,
                runs: runs.len(),
                coverage: stat(|r| r.coverage),
                mutation_score: stat(|r| r.mutation_score),
                sr_rate: stat(|r| r.sr_rate),
                mean_coherence: stat(|r| r.mean_coherence),
                n_tests: stat(|r| r.n_tests as f64),
                evals_used: stat(|r| r.evals_used as f64),
            });
        }
    }
    ComparisonTable { rows, summary, unmatched }
}
