use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TIER_CUTOFF: f64 = 0.10;

/// Impact tier of a journal in a given year.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tier {
    /// Ranked within the top `cutoff` fraction.
    I,
    /// Ranked, but outside the top fraction.
    NI,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::I => f.write_str("I"),
            Tier::NI => f.write_str("NI"),
        }
    }
}

impl FromStr for Tier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Tier::I),
            "NI" | "ni" => Ok(Tier::NI),
            other => Err(Error::InvalidArgument(format!("unknown tier {other:?}"))),
        }
    }
}

/// Outcome of classifying a journal; unranked journals belong to neither tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierOutcome {
    Ranked(Tier),
    Unranked,
}

/// How to treat several ranking rows for the same (year, journal), as happens
/// for journals listed under more than one subject area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiRankPolicy {
    /// Duplicate rows are a data error.
    #[default]
    Reject,
    /// Keep the best (lowest) percentile.
    Best,
    /// Keep the worst (highest) percentile.
    Worst,
}

impl FromStr for MultiRankPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reject" => Ok(MultiRankPolicy::Reject),
            "best" => Ok(MultiRankPolicy::Best),
            "worst" => Ok(MultiRankPolicy::Worst),
            other => Err(Error::InvalidArgument(format!("unknown multi-rank policy {other:?}"))),
        }
    }
}

/// year -> journal -> rank percentile (0 = best).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct JournalTierTable {
    ranks: BTreeMap<i32, BTreeMap<String, f64>>,
}

impl JournalTierTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        year: i32,
        journal_id: &str,
        percentile: f64,
        policy: MultiRankPolicy,
    ) -> Result<()> {
        if !(0.0..=1.0).contains(&percentile) {
            return Err(Error::InvalidArgument(format!(
                "percentile {percentile} outside [0,1]"
            )));
        }
        match self.ranks.entry(year).or_default().entry(journal_id.to_string()) {
            Entry::Vacant(v) => {
                v.insert(percentile);
            }
            Entry::Occupied(mut o) => match policy {
                MultiRankPolicy::Reject => {
                    return Err(Error::InvalidArgument(format!(
                        "duplicate ranking for journal {journal_id} in {year}"
                    )))
                }
                MultiRankPolicy::Best => {
                    let v = o.get_mut();
                    *v = v.min(percentile);
                }
                MultiRankPolicy::Worst => {
                    let v = o.get_mut();
                    *v = v.max(percentile);
                }
            },
        }
        Ok(())
    }

    /// Read `ranking.tsv`: `year <TAB> journal_id <TAB> percentile`.
    /// Blank lines and `#` comments are skipped; a non-numeric first line is
    /// treated as a header.
    pub fn read<R: BufRead>(reader: R, source: &str, policy: MultiRankPolicy) -> Result<Self> {
        let mut table = JournalTierTable::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::io(source, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if lineno == 1 && fields.first().is_some_and(|f| f.parse::<i32>().is_err()) {
                continue;
            }
            let parse_err = |reason: String| Error::Parse {
                path: source.to_string(),
                line: lineno,
                reason,
            };
            if fields.len() != 3 {
                return Err(parse_err(format!(
                    "expected 3 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            let year: i32 = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("invalid year {:?}", fields[0])))?;
            let pct: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(format!("invalid percentile {:?}", fields[2])))?;
            if fields[1].is_empty() {
                return Err(parse_err("missing journal_id".into()));
            }
            table
                .insert(year, fields[1], pct, policy)
                .map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(table)
    }

    pub fn percentile(&self, journal_id: &str, year: i32) -> Option<f64> {
        self.ranks.get(&year)?.get(journal_id).copied()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.ranks.keys().copied()
    }

    /// All (journal, percentile) rows for one year, sorted by journal id.
    pub fn journals(&self, year: i32) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.ranks
            .get(&year)
            .into_iter()
            .flat_map(|m| m.iter().map(|(j, p)| (j.as_str(), *p)))
    }

    /// `I` iff percentile <= cutoff (the boundary is inclusive).
    pub fn classify(&self, journal_id: &str, year: i32, cutoff: f64) -> TierOutcome {
        match self.percentile(journal_id, year) {
            Some(p) if p <= cutoff => TierOutcome::Ranked(Tier::I),
            Some(_) => TierOutcome::Ranked(Tier::NI),
            None => TierOutcome::Unranked,
        }
    }
}

pub fn classify_tier(
    table: &JournalTierTable,
    journal_id: &str,
    year: i32,
    cutoff: f64,
) -> Result<TierOutcome> {
    if !(cutoff > 0.0 && cutoff < 1.0) {
        return Err(Error::InvalidArgument(format!("cutoff {cutoff} outside (0,1)")));
    }
    Ok(table.classify(journal_id, year, cutoff))
}
