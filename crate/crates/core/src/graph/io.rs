//! Flat-file forms of a network: a directory holding `nodes.tsv`,
//! `edges.tsv` and `meta.json`, plus single-file edge-list and GraphML
//! exports. Rows are sorted by code so diffs are byte-stable.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use quick_xml::escape::escape;

use super::network::{ConceptNetwork, NetworkMeta};
use crate::corpus::{Concept, ConceptCode};
use crate::error::{Error, Result};
use crate::fmt::num;

pub const NODES_FILE: &str = "nodes.tsv";
pub const EDGES_FILE: &str = "edges.tsv";
pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    EdgeTsv,
    GraphXml,
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edge-tsv" => Ok(ExportFormat::EdgeTsv),
            "graph-xml" | "graphml" => Ok(ExportFormat::GraphXml),
            other => Err(Error::InvalidArgument(format!("unknown export format {other:?}"))),
        }
    }
}

fn sorted_order(net: &ConceptNetwork) -> Vec<usize> {
    let mut order: Vec<usize> = (0..net.node_count()).collect();
    order.sort_by(|&a, &b| net.code(a).cmp(net.code(b)));
    order
}

pub fn nodes_tsv(net: &ConceptNetwork) -> String {
    let mut out = String::from("code\tlabel\tstrength\n");
    let order = sorted_order(net);
    for &i in &order {
        let c = &net.nodes()[i];
        let _ = writeln!(out, "{}\t{}\t{}", c.code, c.label, num(written_strength(net, &order, i)));
    }
    out
}

/// Strength from the weights as `edges_tsv` prints them, summed in code
/// order, so a re-read network exports the same column.
fn written_strength(net: &ConceptNetwork, order: &[usize], i: usize) -> f64 {
    order
        .iter()
        .map(|&j| net.weight(i, j))
        .filter(|&w| w > 0.0)
        .map(|w| num(w).parse::<f64>().unwrap_or(w))
        .sum()
}

pub fn edges_tsv(net: &ConceptNetwork) -> String {
    let mut rows: Vec<(&ConceptCode, &ConceptCode, f64)> = net
        .edges()
        .map(|(i, j, w)| {
            let (a, b) = (net.code(i), net.code(j));
            if a <= b {
                (a, b, w)
            } else {
                (b, a, w)
            }
        })
        .collect();
    rows.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));
    let mut out = String::from("code_i\tcode_j\tw_ij\n");
    for (a, b, w) in rows {
        let _ = writeln!(out, "{a}\t{b}\t{}", num(w));
    }
    out
}

pub fn write_network_dir(net: &ConceptNetwork, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(NODES_FILE), &nodes_tsv(net))?;
    write_file(&dir.join(EDGES_FILE), &edges_tsv(net))?;
    let meta = serde_json::to_string_pretty(&net.meta)? + "\n";
    write_file(&dir.join(META_FILE), &meta)
}

pub fn read_network_dir(dir: &Path) -> Result<ConceptNetwork> {
    let nodes_path = dir.join(NODES_FILE);
    let nodes_src = fs::read_to_string(&nodes_path).map_err(|e| Error::io(&nodes_path, e))?;
    let edges_path = dir.join(EDGES_FILE);
    let edges_src = fs::read_to_string(&edges_path).map_err(|e| Error::io(&edges_path, e))?;
    let meta_path = dir.join(META_FILE);
    let meta = match fs::read_to_string(&meta_path) {
        Ok(s) => serde_json::from_str(&s)?,
        Err(_) => NetworkMeta::default(),
    };
    parse_network(&nodes_src, &edges_src, meta, &dir.display().to_string())
}

/// Rebuild a network from the text of `nodes.tsv` and `edges.tsv`.
pub fn parse_network(nodes_src: &str, edges_src: &str, meta: NetworkMeta, source: &str) -> Result<ConceptNetwork> {
    let mut nodes = Vec::new();
    for (idx, line) in nodes_src.lines().enumerate() {
        if line.trim().is_empty() || (idx == 0 && line.starts_with("code\t")) {
            continue;
        }
        let mut f = line.split('\t');
        let code = f.next().unwrap_or("");
        let label = f.next().unwrap_or("");
        let code = ConceptCode::new(code).map_err(|e| Error::Parse {
            path: format!("{source}/{NODES_FILE}"),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        nodes.push(Concept {
            code,
            label: label.to_string(),
        });
    }
    let index: HashMap<ConceptCode, usize> =
        nodes.iter().enumerate().map(|(i, c)| (c.code.clone(), i)).collect();
    let mut edges = Vec::new();
    for (idx, line) in edges_src.lines().enumerate() {
        if line.trim().is_empty() || (idx == 0 && line.starts_with("code_i\t")) {
            continue;
        }
        let perr = |reason: String| Error::Parse {
            path: format!("{source}/{EDGES_FILE}"),
            line: idx + 1,
            reason,
        };
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(perr("expected code_i, code_j, w_ij".into()));
        }
        let lookup = |s: &str| {
            ConceptCode::new(s)
                .ok()
                .and_then(|c| index.get(&c).copied())
                .ok_or_else(|| perr(format!("unknown node {s:?}")))
        };
        let i = lookup(f[0])?;
        let j = lookup(f[1])?;
        let w: f64 = f[2].parse().map_err(|_| perr(format!("invalid weight {:?}", f[2])))?;
        edges.push((i, j, w));
    }
    ConceptNetwork::from_edges(nodes, edges, meta)
}

/// GraphML with `label`, `strength` and (optionally) `community` node
/// attributes and a `weight` edge attribute.
pub fn graph_xml(net: &ConceptNetwork, communities: Option<&[usize]>) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"strength\" for=\"node\" attr.name=\"strength\" attr.type=\"double\"/>\n");
    if communities.is_some() {
        out.push_str("  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n");
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    let _ = writeln!(out, "  <graph id=\"{}\" edgedefault=\"undirected\">", escape(net.meta.name()));
    for i in sorted_order(net) {
        let c = &net.nodes()[i];
        let _ = writeln!(out, "    <node id=\"{}\">", escape(c.code.as_str()));
        let _ = writeln!(out, "      <data key=\"label\">{}</data>", escape(&c.label));
        let _ = writeln!(out, "      <data key=\"strength\">{}</data>", num(net.strength(i)));
        if let Some(comm) = communities {
            let _ = writeln!(out, "      <data key=\"community\">{}</data>", comm[i]);
        }
        out.push_str("    </node>\n");
    }
    for line in edges_tsv(net).lines().skip(1) {
        let f: Vec<&str> = line.split('\t').collect();
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{}</data></edge>",
            escape(f[0]),
            escape(f[1]),
            f[2]
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn export_graph(
    net: &ConceptNetwork,
    format: ExportFormat,
    communities: Option<&[usize]>,
    path: &Path,
) -> Result<()> {
    if let Some(c) = communities {
        if c.len() != net.node_count() {
            return Err(Error::InvalidArgument(format!(
                "community vector has {} entries for {} nodes",
                c.len(),
                net.node_count()
            )));
        }
    }
    let body = match format {
        ExportFormat::EdgeTsv => edges_tsv(net),
        ExportFormat::GraphXml => graph_xml(net, communities),
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_file(path, &body)
}

pub(crate) fn write_file(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}
