//! Wire format for group elements and sphero-vertices.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::address::{format_word, parse_word, Address};
use super::element::{LeafMap, LocalSimilarity};
use super::isometry::LabeledIsometry;
use super::Config;
use crate::error::{Error, Result};
use crate::perm::Perm;

/// `domain[i]` maps to `codomain[map[i]]` decorated by `decorations[i]`.
/// `n` is the domain summand count and defaults to `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub q: usize,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "D")]
    pub d: Vec<String>,
    pub domain: Vec<String>,
    pub codomain: Vec<String>,
    pub map: Vec<usize>,
    pub decorations: Vec<BTreeMap<String, String>>,
}

pub fn to_json(g: &LocalSimilarity) -> ElementJson {
    let config = g.config();
    let mut codomain: Vec<&Address> = g.leaves().iter().map(|l| &l.codomain).collect();
    codomain.sort();
    let map = g
        .leaves()
        .iter()
        .map(|l| codomain.binary_search(&&l.codomain).expect("codomain leaf"))
        .collect();
    let decorations = g
        .leaves()
        .iter()
        .map(|l| {
            l.iso
                .labels()
                .iter()
                .map(|(w, p)| (format_word(w), p.to_word()))
                .collect()
        })
        .collect();
    ElementJson {
        q: config.q(),
        r: g.codomain_summands(),
        n: (g.domain_summands() != g.codomain_summands()).then_some(g.domain_summands()),
        d: config.group().generators().iter().map(Perm::to_word).collect(),
        domain: g.leaves().iter().map(|l| l.domain.to_string()).collect(),
        codomain: codomain.iter().map(|a| a.to_string()).collect(),
        map,
        decorations,
    }
}

impl ElementJson {
    pub fn config(&self) -> Result<Config> {
        let gens = self
            .d
            .iter()
            .map(|w| Perm::parse_word(w))
            .collect::<Result<Vec<_>>>()?;
        Config::new(self.q, self.r, gens)
    }

    /// Decodes against an already shared configuration, which must agree
    /// with the one in the record.
    pub fn decode_with(&self, config: Arc<Config>) -> Result<LocalSimilarity> {
        let own = self.config()?;
        if own.q() != config.q() || own.group() != config.group() {
            return Err(Error::ConfigMismatch);
        }
        let q = self.q;
        let len = self.domain.len();
        if self.codomain.len() != len || self.map.len() != len || self.decorations.len() != len {
            return Err(Error::Schema("domain, codomain, map and decorations must have equal length".into()));
        }
        let mut leaves = Vec::with_capacity(len);
        for i in 0..len {
            let target = self
                .codomain
                .get(self.map[i])
                .ok_or_else(|| Error::Schema(format!("map index {} out of range", self.map[i])))?;
            let labels = self.decorations[i]
                .iter()
                .map(|(w, p)| Ok((parse_word(w, q)?, Perm::parse_word(p)?)))
                .collect::<Result<Vec<_>>>()?;
            leaves.push(LeafMap::new(
                Address::parse(&self.domain[i], q)?,
                Address::parse(target, q)?,
                LabeledIsometry::from_labels(labels),
            ));
        }
        LocalSimilarity::new(config, self.n.unwrap_or(self.r), self.r, leaves)
    }

    pub fn decode(&self) -> Result<LocalSimilarity> {
        self.decode_with(Arc::new(self.config()?))
    }
}

pub fn parse_element(text: &str) -> Result<LocalSimilarity> {
    let raw: ElementJson =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    raw.decode()
}

pub fn element_to_string(g: &LocalSimilarity) -> String {
    serde_json::to_string_pretty(&to_json(g)).expect("plain data serializes")
}
