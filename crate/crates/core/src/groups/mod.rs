//! Exact arithmetic in the finitely describable part of the tree almost
//! automorphism group `A^D_{qr}`: tree-pair elements with finitely supported
//! D-labeled decorations, plus the decision procedures built on them.

mod address;
mod element;
mod isometry;
pub mod json;
mod ops;
pub mod random;

pub use address::{
    common_prefix_length, common_refinement, format_word, parse_word, Address, CommonPrefix,
    LeafPartition,
};
pub use element::{GroupElement, LeafMap, LocalSimilarity, SpheroVertex};
pub use isometry::LabeledIsometry;
pub use ops::{
    classify_arrow, depth_triviality, stabilizer_test, subnormal_depth, thompson_membership,
    ArrowKind, ThompsonFlags, TrivialDepth,
};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::perm::{Perm, PermGroup};

/// Branching `q`, number of boundary copies `r`, and the local group `D ≤ Sym(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Config {
    q: usize,
    r: usize,
    group: PermGroup,
}

/// Digits and permutation images are written as single decimal characters.
pub const MAX_Q: usize = 9;

impl Config {
    pub fn new(q: usize, r: usize, generators: Vec<Perm>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidConfig(format!("q must be at least 2, got {q}")));
        }
        if q > MAX_Q {
            return Err(Error::InvalidConfig(format!("q must be at most {MAX_Q}, got {q}")));
        }
        if r < 1 {
            return Err(Error::InvalidConfig("r must be at least 1".into()));
        }
        Ok(Config {
            q,
            r,
            group: PermGroup::generate(q, generators)?,
        })
    }

    pub fn symmetric(q: usize, r: usize) -> Result<Self> {
        let mut c = Config::new(q, r, Vec::new())?;
        c.group = PermGroup::symmetric(q);
        Ok(c)
    }

    pub fn trivial(q: usize, r: usize) -> Result<Self> {
        Config::new(q, r, Vec::new())
    }

    /// Parses the subgroup flag: `sym`, `triv`, or comma-separated image words.
    pub fn from_subgroup_spec(q: usize, r: usize, spec: &str) -> Result<Self> {
        match spec.trim() {
            "sym" => Config::symmetric(q, r),
            "triv" => Config::trivial(q, r),
            words => {
                let gens = words
                    .split(',')
                    .map(|w| Perm::parse_word(w.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Config::new(q, r, gens)
            }
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn with_r(&self, r: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidConfig("r must be at least 1".into()));
        }
        Ok(Config { r, ..self.clone() })
    }

    pub fn shared(self) -> Arc<Config> {
        Arc::new(self)
    }
}
