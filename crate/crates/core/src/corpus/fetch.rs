//! Minimal E-utilities client: `esearch` for the id list of a publication
//! window, then batched `efetch` of PubMed XML.
//!
//! MeSH descriptors arrive as descriptor UIs (`D009369`), so the caller
//! supplies a descriptor -> tree-code map. Articles whose descriptors map to
//! no concept code, or which lack a PMID/year/journal, are rejected one by one.

use std::collections::{BTreeMap, BTreeSet};
use std::thread;
use std::time::{Duration, Instant};

use quick_xml::events::Event;
use quick_xml::Reader;

use super::record::{ConceptCode, DocumentRecord};
use super::Rejection;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct FetchConfig {
    /// Base URL up to (not including) `esearch.fcgi`.
    pub base_url: String,
    /// Environment variable holding the API key, if any.
    pub api_key_env: Option<String>,
    pub requests_per_second: f64,
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub batch_size: usize,
    pub search_term: String,
    pub descriptor_map: BTreeMap<String, Vec<ConceptCode>>,
    pub timeout: Duration,
}

impl Default for FetchConfig {
    fn default() -> Self {
        FetchConfig {
            base_url: "https://eutils.ncbi.nlm.nih.gov/entrez/eutils".into(),
            api_key_env: Some("NCBI_API_KEY".into()),
            requests_per_second: 3.0,
            max_retries: 4,
            initial_backoff: Duration::from_millis(500),
            batch_size: 200,
            search_term: "journal article[pt]".into(),
            descriptor_map: BTreeMap::new(),
            timeout: Duration::from_secs(60),
        }
    }
}

impl FetchConfig {
    /// Parse a `descriptor_ui <TAB> code,code,...` sidecar.
    pub fn parse_descriptor_map(text: &str) -> Result<BTreeMap<String, Vec<ConceptCode>>> {
        let mut map = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (ui, codes) = line.split_once('\t').ok_or_else(|| Error::Parse {
                path: "descriptor map".into(),
                line: idx + 1,
                reason: "expected descriptor<TAB>codes".into(),
            })?;
            let codes = codes
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(ConceptCode::new)
                .collect::<Result<Vec<_>>>()?;
            map.insert(ui.trim().to_string(), codes);
        }
        Ok(map)
    }
}

/// Publication window: one year, optionally narrowed to a month.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryWindow {
    pub year: i32,
    pub month: Option<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct FetchOutcome {
    pub records: Vec<DocumentRecord>,
    pub rejections: Vec<Rejection>,
    pub retries: u32,
    pub requests: u32,
}

impl FetchOutcome {
    /// Records in the corpus line format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_line());
            out.push('\n');
        }
        out
    }
}

struct Client {
    agent: ureq::Agent,
    cfg: FetchConfig,
    api_key: Option<String>,
    last_request: Option<Instant>,
    retries: u32,
    requests: u32,
}

impl Client {
    fn new(cfg: &FetchConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(cfg.timeout))
            .build()
            .into();
        let api_key = cfg
            .api_key_env
            .as_deref()
            .and_then(|var| std::env::var(var).ok())
            .filter(|k| !k.is_empty());
        Client {
            agent,
            cfg: cfg.clone(),
            api_key,
            last_request: None,
            retries: 0,
            requests: 0,
        }
    }

    fn throttle(&mut self) {
        if self.cfg.requests_per_second <= 0.0 {
            return;
        }
        let gap = Duration::from_secs_f64(1.0 / self.cfg.requests_per_second);
        if let Some(last) = self.last_request {
            let elapsed = last.elapsed();
            if elapsed < gap {
                thread::sleep(gap - elapsed);
            }
        }
        self.last_request = Some(Instant::now());
    }

    fn get(&mut self, endpoint: &str, params: &[(&str, String)]) -> Result<String> {
        let url = format!("{}/{}", self.cfg.base_url.trim_end_matches('/'), endpoint);
        let mut backoff = self.cfg.initial_backoff;
        let mut attempt = 0;
        loop {
            self.throttle();
            self.requests += 1;
            let mut req = self.agent.get(&url);
            for (k, v) in params {
                req = req.query(k, v);
            }
            if let Some(key) = &self.api_key {
                req = req.query("api_key", key);
            }
            let failure = match req.call() {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if (200..300).contains(&status) {
                        return resp
                            .body_mut()
                            .read_to_string()
                            .map_err(|e| Error::Fetch(format!("{url}: {e}")));
                    }
                    if status != 429 && status < 500 {
                        return Err(Error::Fetch(format!("{url}: HTTP {status}")));
                    }
                    format!("HTTP {status}")
                }
                Err(e) => e.to_string(),
            };
            if attempt >= self.cfg.max_retries {
                return Err(Error::Fetch(format!(
                    "{url}: giving up after {} attempts ({failure})",
                    attempt + 1
                )));
            }
            attempt += 1;
            self.retries += 1;
            thread::sleep(backoff);
            backoff *= 2;
        }
    }
}

/// Fetch every article of `window` and convert it to [`DocumentRecord`]s.
pub fn fetch_remote(cfg: &FetchConfig, window: QueryWindow) -> Result<FetchOutcome> {
    let mut client = Client::new(cfg);
    let (min, max) = match window.month {
        Some(m) => (format!("{}/{:02}", window.year, m), format!("{}/{:02}", window.year, m)),
        None => (format!("{}", window.year), format!("{}", window.year)),
    };
    let body = client.get(
        "esearch.fcgi",
        &[
            ("db", "pubmed".into()),
            ("term", cfg.search_term.clone()),
            ("datetype", "pdat".into()),
            ("mindate", min),
            ("maxdate", max),
            ("retmode", "json".into()),
            ("retmax", "100000".into()),
        ],
    )?;
    let ids = parse_esearch(&body)?;

    let mut outcome = FetchOutcome::default();
    for chunk in ids.chunks(cfg.batch_size.max(1)) {
        let xml = client.get(
            "efetch.fcgi",
            &[
                ("db", "pubmed".into()),
                ("id", chunk.join(",")),
                ("retmode", "xml".into()),
            ],
        )?;
        let offset = outcome.records.len() + outcome.rejections.len();
        for (i, article) in parse_efetch(&xml)?.into_iter().enumerate() {
            match article.into_record(&cfg.descriptor_map) {
                Ok(rec) => outcome.records.push(rec),
                Err(reason) => outcome.rejections.push(Rejection {
                    line: offset + i + 1,
                    reason,
                }),
            }
        }
    }
    outcome.retries = client.retries;
    outcome.requests = client.requests;
    Ok(outcome)
}

fn parse_esearch(body: &str) -> Result<Vec<String>> {
    let v: serde_json::Value = serde_json::from_str(body)
        .map_err(|e| Error::Fetch(format!("malformed esearch payload: {e}")))?;
    let list = v
        .pointer("/esearchresult/idlist")
        .and_then(|l| l.as_array())
        .ok_or_else(|| Error::Fetch("esearch payload lacks esearchresult.idlist".into()))?;
    Ok(list
        .iter()
        .filter_map(|id| id.as_str().map(str::to_string))
        .collect())
}

#[derive(Debug, Default)]
struct RawArticle {
    pmid: Option<String>,
    year: Option<String>,
    month: Option<String>,
    journal: Option<String>,
    descriptors: Vec<String>,
}

impl RawArticle {
    fn into_record(self, map: &BTreeMap<String, Vec<ConceptCode>>) -> Result<DocumentRecord, String> {
        let pmid = self.pmid.ok_or("article without PMID")?;
        let year = self
            .year
            .ok_or_else(|| format!("PMID {pmid}: missing publication year"))?
            .parse::<i32>()
            .map_err(|_| format!("PMID {pmid}: invalid year"))?;
        let month = match self.month.as_deref() {
            Some(m) => parse_month(m).ok_or_else(|| format!("PMID {pmid}: invalid month {m:?}"))?,
            None => return Err(format!("PMID {pmid}: missing publication month")),
        };
        let journal = self
            .journal
            .ok_or_else(|| format!("PMID {pmid}: missing journal id"))?;
        let concepts: BTreeSet<ConceptCode> = self
            .descriptors
            .iter()
            .filter_map(|d| map.get(d))
            .flatten()
            .cloned()
            .collect();
        if concepts.is_empty() {
            return Err(format!("PMID {pmid}: no mapped concept codes"));
        }
        Ok(DocumentRecord {
            doc_id: pmid,
            year,
            month,
            journal_id: journal,
            concepts,
        })
    }
}

fn parse_month(m: &str) -> Option<u8> {
    if let Ok(n) = m.parse::<u8>() {
        return (1..=12).contains(&n).then_some(n);
    }
    const ABBR: [&str; 12] = [
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec",
    ];
    let lower = m.to_ascii_lowercase();
    ABBR.iter()
        .position(|a| lower.starts_with(a))
        .map(|i| i as u8 + 1)
}

fn parse_efetch(xml: &str) -> Result<Vec<RawArticle>> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);
    let mut stack: Vec<String> = Vec::new();
    let mut articles = Vec::new();
    let mut current: Option<RawArticle> = None;
    let mut text = String::new();

    loop {
        let event = reader
            .read_event()
            .map_err(|e| Error::Fetch(format!("malformed efetch XML: {e}")))?;
        match event {
            Event::Start(e) => {
                let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
                if name == "PubmedArticle" {
                    current = Some(RawArticle::default());
                }
                if name == "DescriptorName" {
                    if let Some(art) = current.as_mut() {
                        for attr in e.attributes().flatten() {
                            if attr.key.as_ref() == b"UI" {
                                if let Ok(v) = attr.unescape_value() {
                                    art.descriptors.push(v.into_owned());
                                }
                            }
                        }
                    }
                }
                stack.push(name);
                text.clear();
            }
            Event::Text(t) => {
                let decoded = t
                    .decode()
                    .map_err(|e| Error::Fetch(format!("malformed efetch XML: {e}")))?;
                text.push_str(&decoded);
            }
            Event::End(_) => {
                let name = stack.pop().unwrap_or_default();
                if let Some(art) = current.as_mut() {
                    let parent = stack.last().map(String::as_str).unwrap_or("");
                    let value = text.trim().to_string();
                    match (name.as_str(), parent) {
                        ("PMID", "MedlineCitation") => art.pmid = Some(value),
                        ("Year", "PubDate") => art.year = Some(value),
                        ("Month", "PubDate") => art.month = Some(value),
                        ("NlmUniqueID", "MedlineJournalInfo") => art.journal = Some(value),
                        _ => {}
                    }
                }
                if name == "PubmedArticle" {
                    if let Some(art) = current.take() {
                        articles.push(art);
                    }
                }
                text.clear();
            }
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(articles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn esearch_ids() {
        let ids = parse_esearch(r#"{"esearchresult":{"count":"2","idlist":["11","12"]}}"#).unwrap();
        assert_eq!(ids, ["11", "12"]);
        assert!(parse_esearch("{}").is_err());
    }

    #[test]
    fn month_forms() {
        assert_eq!(parse_month("Jun"), Some(6));
        assert_eq!(parse_month("06"), Some(6));
        assert_eq!(parse_month("13"), None);
        assert_eq!(parse_month("Spring"), None);
    }

    #[test]
    fn efetch_article_fields() {
        let xml = r#"<?xml version="1.0"?>
<PubmedArticleSet>
 <PubmedArticle><MedlineCitation>
  <PMID Version="1">42</PMID>
  <Article><Journal><JournalIssue><PubDate><Year>1999</Year><Month>Jun</Month></PubDate></JournalIssue></Journal></Article>
  <MedlineJournalInfo><NlmUniqueID>J77</NlmUniqueID></MedlineJournalInfo>
  <MeshHeadingList>
   <MeshHeading><DescriptorName UI="D1">Neoplasms</DescriptorName></MeshHeading>
   <MeshHeading><DescriptorName UI="D2">Infection</DescriptorName></MeshHeading>
   <MeshHeading><DescriptorName UI="D9">Unmapped</DescriptorName></MeshHeading>
  </MeshHeadingList>
 </MedlineCitation></PubmedArticle>
</PubmedArticleSet>"#;
        let arts = parse_efetch(xml).unwrap();
        assert_eq!(arts.len(), 1);
        let map = FetchConfig::parse_descriptor_map("D1\tC04.588\nD2\tC01.100,C01.200\n").unwrap();
        let rec = arts.into_iter().next().unwrap().into_record(&map).unwrap();
        assert_eq!(rec.doc_id, "42");
        assert_eq!(rec.month, 6);
        assert_eq!(rec.journal_id, "J77");
        assert_eq!(rec.concepts.len(), 3);
    }
}
