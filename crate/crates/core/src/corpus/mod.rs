//! Document corpus, journal rankings and tier-filtered views.
//!
//! Records are keyed by `doc_id`, so re-ingesting the same source is a no-op
//! and every view comes out in `doc_id` order.

mod fetch;
mod ranking;
mod record;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

pub use fetch::{fetch_remote, FetchConfig, FetchOutcome, QueryWindow};
pub use ranking::{
    classify_tier, JournalTierTable, MultiRankPolicy, Tier, TierOutcome, DEFAULT_TIER_CUTOFF,
};
pub use record::{Concept, ConceptCode, DocumentRecord};

pub const DEFAULT_MONTH: u8 = 6;

const MONTH_NAMES: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September",
    "October", "November", "December",
];

pub fn month_name(month: u8) -> &'static str {
    MONTH_NAMES[(month.clamp(1, 12) - 1) as usize]
}

/// A line that could not be ingested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: usize,
    pub duplicates: usize,
    pub rejections: Vec<Rejection>,
}

/// In-memory document store.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    records: BTreeMap<String, DocumentRecord>,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn open(path: &Path) -> Result<(Self, IngestReport)> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut corpus = Corpus::new();
        let report = corpus.ingest(BufReader::new(file), &path.display().to_string())?;
        Ok((corpus, report))
    }

    /// Ingest a line-delimited record stream. Malformed lines are reported,
    /// not fatal; only an unreadable stream is an error.
    pub fn ingest<R: BufRead>(&mut self, reader: R, source: &str) -> Result<IngestReport> {
        let mut report = IngestReport::default();
        for (idx, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            if idx == 0 && line.starts_with("doc_id\t") {
                continue;
            }
            match DocumentRecord::parse_line(line) {
                Ok(rec) => self.insert(rec, &mut report),
                Err(reason) => report.rejections.push(Rejection {
                    line: idx + 1,
                    reason,
                }),
            }
        }
        Ok(report)
    }

    pub fn extend<I: IntoIterator<Item = DocumentRecord>>(&mut self, records: I) -> IngestReport {
        let mut report = IngestReport::default();
        for rec in records {
            self.insert(rec, &mut report);
        }
        report
    }

    fn insert(&mut self, rec: DocumentRecord, report: &mut IngestReport) {
        if self.records.contains_key(&rec.doc_id) {
            report.duplicates += 1;
        } else {
            self.records.insert(rec.doc_id.clone(), rec);
            report.accepted += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> impl Iterator<Item = &DocumentRecord> + '_ {
        self.records.values()
    }

    pub fn count_by_year(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for r in self.records.values() {
            *out.entry(r.year).or_insert(0) += 1;
        }
        out
    }

    pub fn count_by_year_month(&self) -> BTreeMap<(i32, u8), usize> {
        let mut out = BTreeMap::new();
        for r in self.records.values() {
            *out.entry((r.year, r.month)).or_insert(0) += 1;
        }
        out
    }

    pub fn has_year(&self, year: i32) -> bool {
        self.records.values().any(|r| r.year == year)
    }

    /// Records of `year` (and optionally `month`) whose journal falls in
    /// `tier`. Journals missing from the ranking table are excluded from
    /// both tiers.
    pub fn view<'a>(
        &'a self,
        table: &JournalTierTable,
        cutoff: f64,
        selector: ViewSelector,
    ) -> Result<CorpusView<'a>> {
        if !self.has_year(selector.year) {
            return Err(Error::UnknownYear(selector.year));
        }
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} outside (0,1)")));
        }
        if let Some(m) = selector.month {
            if !(1..=12).contains(&m) {
                return Err(Error::InvalidArgument(format!("month {m} outside 1-12")));
            }
        }
        let records = self
            .records
            .values()
            .filter(|r| r.year == selector.year)
            .filter(|r| selector.month.is_none_or(|m| r.month == m))
            .filter(|r| {
                table.classify(&r.journal_id, r.year, cutoff) == TierOutcome::Ranked(selector.tier)
            })
            .collect();
        Ok(CorpusView { selector, records })
    }

    /// Number of records in `year` whose journal has no ranking.
    pub fn unranked_count(&self, table: &JournalTierTable, year: i32) -> usize {
        self.records
            .values()
            .filter(|r| r.year == year && table.percentile(&r.journal_id, year).is_none())
            .count()
    }
}

/// Which slice of the corpus a view holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ViewSelector {
    pub tier: Tier,
    pub year: i32,
    pub month: Option<u8>,
}

impl ViewSelector {
    pub fn new(tier: Tier, year: i32, month: Option<u8>) -> Self {
        ViewSelector { tier, year, month }
    }

    /// Short tier label: `I`, `NI`, `NI-June`.
    pub fn tier_label(&self) -> String {
        match self.month {
            Some(m) => format!("{}-{}", self.tier, month_name(m)),
            None => self.tier.to_string(),
        }
    }
}

impl fmt::Display for ViewSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.tier_label(), self.year)
    }
}

/// Immutable, `doc_id`-ordered slice of a corpus.
#[derive(Debug, Clone)]
pub struct CorpusView<'a> {
    pub selector: ViewSelector,
    pub records: Vec<&'a DocumentRecord>,
}

impl<'a> CorpusView<'a> {
    pub fn count(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a DocumentRecord> + '_ {
        self.records.iter().copied()
    }
}
