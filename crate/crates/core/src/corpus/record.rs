use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Hierarchical concept identifier such as `C04.588`.
///
/// A code is one ASCII letter followed by digits, then zero or more
/// dot-separated numeric segments. The first dot-segment names the
/// first-level category (`C04`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ConceptCode(String);

impl ConceptCode {
    pub fn new(code: &str) -> Result<Self, Error> {
        if is_valid_code(code) {
            Ok(ConceptCode(code.to_string()))
        } else {
            Err(Error::InvalidConceptCode(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// First-level parent, e.g. `C04` for `C04.588.123`.
    pub fn first_level(&self) -> &str {
        self.0.split('.').next().unwrap_or(&self.0)
    }

    /// Number of tree levels; `C04` is 1, `C04.588` is 2.
    pub fn depth(&self) -> usize {
        self.0.split('.').count()
    }

    /// Truncate to at most `level` tree levels.
    pub fn truncate(&self, level: usize) -> ConceptCode {
        if self.depth() <= level {
            return self.clone();
        }
        let cut: Vec<&str> = self.0.split('.').take(level.max(1)).collect();
        ConceptCode(cut.join("."))
    }
}

fn is_valid_code(code: &str) -> bool {
    let mut segments = code.split('.');
    let head = match segments.next() {
        Some(h) => h,
        None => return false,
    };
    let mut chars = head.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return false;
    }
    segments.all(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
}

impl fmt::Display for ConceptCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ConceptCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        ConceptCode::new(s)
    }
}

impl TryFrom<String> for ConceptCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self, Error> {
        ConceptCode::new(&s)
    }
}

impl From<ConceptCode> for String {
    fn from(c: ConceptCode) -> String {
        c.0
    }
}

/// A concept code paired with its human-readable label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Concept {
    pub code: ConceptCode,
    pub label: String,
}

impl Concept {
    pub fn unlabeled(code: ConceptCode) -> Self {
        Concept {
            code,
            label: String::new(),
        }
    }
}

/// One indexed article.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub year: i32,
    pub month: u8,
    pub journal_id: String,
    pub concepts: BTreeSet<ConceptCode>,
}

impl DocumentRecord {
    /// Parse one line of the tab-separated corpus format:
    /// `doc_id <TAB> year <TAB> month <TAB> journal_id <TAB> code,code,...`
    pub fn parse_line(line: &str) -> Result<Self, String> {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(format!("expected 5 tab-separated fields, found {}", fields.len()));
        }
        let doc_id = fields[0];
        if doc_id.is_empty() {
            return Err("missing doc_id".into());
        }
        if fields[1].is_empty() {
            return Err("missing year".into());
        }
        let year: i32 = fields[1]
            .parse()
            .map_err(|_| format!("invalid year {:?}", fields[1]))?;
        if fields[2].is_empty() {
            return Err("missing month".into());
        }
        let month: u8 = fields[2]
            .parse()
            .map_err(|_| format!("invalid month {:?}", fields[2]))?;
        if !(1..=12).contains(&month) {
            return Err(format!("month {month} outside 1-12"));
        }
        let journal_id = fields[3];
        if journal_id.is_empty() {
            return Err("missing journal_id".into());
        }
        let mut concepts = BTreeSet::new();
        for raw in fields[4].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let code = ConceptCode::new(raw).map_err(|e| e.to_string())?;
            concepts.insert(code);
        }
        if concepts.is_empty() {
            return Err("no concept codes".into());
        }
        Ok(DocumentRecord {
            doc_id: doc_id.to_string(),
            year,
            month,
            journal_id: journal_id.to_string(),
            concepts,
        })
    }

    pub fn to_line(&self) -> String {
        let codes: Vec<&str> = self.concepts.iter().map(ConceptCode::as_str).collect();
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.doc_id,
            self.year,
            self.month,
            self.journal_id,
            codes.join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_validation() {
        for ok in ["C04", "C04.588", "C04.588.123", "D1"] {
            assert!(ConceptCode::new(ok).is_ok(), "{ok}");
        }
        for bad in ["", "04.588", "C", "C04.", "C04..1", "C04.58a", "CC04", "C04 .1"] {
            assert!(ConceptCode::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn first_level_and_truncate() {
        let c = ConceptCode::new("C04.588.123").unwrap();
        assert_eq!(c.first_level(), "C04");
        assert_eq!(c.depth(), 3);
        assert_eq!(c.truncate(2).as_str(), "C04.588");
        assert_eq!(c.truncate(5).as_str(), "C04.588.123");
    }

    #[test]
    fn parse_dedups_concepts() {
        let r = DocumentRecord::parse_line("d1\t1999\t6\tJ1\tC04.588,C01.100,C04.588").unwrap();
        assert_eq!(r.concepts.len(), 2);
        assert_eq!(r.to_line(), "d1\t1999\t6\tJ1\tC01.100,C04.588");
    }

    #[test]
    fn parse_rejections() {
        assert!(DocumentRecord::parse_line("d1\t\t6\tJ1\tC01.1")
            .unwrap_err()
            .contains("year"));
        assert!(DocumentRecord::parse_line("\t1999\t6\tJ1\tC01.1")
            .unwrap_err()
            .contains("doc_id"));
        assert!(DocumentRecord::parse_line("d1\t1999\t6\t\tC01.1")
            .unwrap_err()
            .contains("journal"));
        assert!(DocumentRecord::parse_line("d1\t1999\t13\tJ1\tC01.1").is_err());
        assert!(DocumentRecord::parse_line("d1\t1999\t6\tJ1").is_err());
    }
}
