use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::ConceptCode;
use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

/// Connection strength of one pre-imposed category (a first-level code).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryStrength {
    pub category: String,
    /// `intra + inter`.
    pub total: f64,
    /// Weight of links with both endpoints in the category, each counted once.
    pub intra: f64,
    /// Weight of links leaving the category.
    pub inter: f64,
}

/// Aggregate link weight by category. `category_of` returns `None` for nodes
/// it cannot place; any such node makes the call fail.
pub fn category_strengths<F>(net: &ConceptNetwork, category_of: F) -> Result<Vec<CategoryStrength>>
where
    F: Fn(&ConceptCode) -> Option<String>,
{
    let mut cats = Vec::with_capacity(net.node_count());
    let mut unmapped = Vec::new();
    for c in net.nodes() {
        match category_of(&c.code) {
            Some(cat) => cats.push(cat),
            None => {
                unmapped.push(c.code.to_string());
                cats.push(String::new());
            }
        }
    }
    if !unmapped.is_empty() {
        return Err(Error::UnmappedNodes(unmapped));
    }
    let mut acc: BTreeMap<&str, (f64, f64)> = cats.iter().map(|c| (c.as_str(), (0.0, 0.0))).collect();
    for (i, j, w) in net.edges() {
        let (a, b) = (cats[i].as_str(), cats[j].as_str());
        if a == b {
            acc.get_mut(a).unwrap().0 += w;
        } else {
            acc.get_mut(a).unwrap().1 += w;
            acc.get_mut(b).unwrap().1 += w;
        }
    }
    Ok(acc
        .into_iter()
        .map(|(cat, (intra, inter))| CategoryStrength {
            category: cat.to_string(),
            total: intra + inter,
            intra,
            inter,
        })
        .collect())
}

/// [`category_strengths`] keyed by the first-level parent of each code.
pub fn first_level_strengths(net: &ConceptNetwork) -> Result<Vec<CategoryStrength>> {
    category_strengths(net, |c| Some(c.first_level().to_string()))
}
