use std::collections::{BTreeSet, HashMap};
use std::ops::Bound;
use std::sync::Arc;

use super::address::{Address, LeafPartition};
use super::isometry::LabeledIsometry;
use super::Config;
use crate::error::{Error, Result};

/// One ball of a tree-pair: the domain ball is carried onto the codomain
/// ball by the canonical similarity followed by `iso`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LeafMap {
    pub domain: Address,
    pub codomain: Address,
    pub iso: LabeledIsometry,
}

impl LeafMap {
    pub fn new(domain: Address, codomain: Address, iso: LabeledIsometry) -> Self {
        LeafMap { domain, codomain, iso }
    }

    /// Slope exponent: the map scales distances by `exp(depth(dom) - depth(cod))`.
    pub fn depth_offset(&self) -> isize {
        self.domain.depth() as isize - self.codomain.depth() as isize
    }

    fn expand(&self, q: usize) -> impl Iterator<Item = LeafMap> + '_ {
        (0..q as u8).map(move |i| LeafMap {
            domain: self.domain.child(i),
            codomain: self.codomain.child(self.iso.root_image(i)),
            iso: self.iso.restrict(i),
        })
    }
}

/// A D-admissible local similarity `nB → mB` in tree-pair form.
///
/// Group elements of the tree almost automorphism group are the case
/// `n = m = r`; sphero-vertices are the case `m = r` with arbitrary level
/// `n`. Operations that build new maps return the canonical form, in which
/// every domain leaf is a maximal ball on which the map is a D-admissible
/// similarity onto a ball. Two maps are equal iff their canonical forms are
/// structurally equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LocalSimilarity {
    config: Arc<Config>,
    domain_summands: usize,
    codomain_summands: usize,
    leaves: Vec<LeafMap>,
}

pub type GroupElement = LocalSimilarity;
pub type SpheroVertex = LocalSimilarity;

impl LocalSimilarity {
    /// Validates a tree-pair without reducing it.
    pub fn from_parts(
        config: Arc<Config>,
        domain_summands: usize,
        codomain_summands: usize,
        mut leaves: Vec<LeafMap>,
    ) -> Result<Self> {
        let q = config.q();
        leaves.sort_by(|a, b| a.domain.cmp(&b.domain));
        LeafPartition::new(q, domain_summands, leaves.iter().map(|l| l.domain.clone()).collect())?;
        let cod = LeafPartition::new(
            q,
            codomain_summands,
            leaves.iter().map(|l| l.codomain.clone()).collect(),
        )?;
        if cod.len() != leaves.len() {
            return Err(Error::InvalidElement("leaf map is not a bijection".into()));
        }
        for leaf in &leaves {
            for (w, p) in leaf.iso.labels() {
                if w.iter().any(|&d| d as usize >= q) || p.degree() != q {
                    return Err(Error::InvalidElement(format!(
                        "decoration at {} does not fit q={q}",
                        leaf.domain
                    )));
                }
                if !config.group().contains(p) {
                    return Err(Error::InvalidElement(format!(
                        "label {p} at {} is not in D",
                        leaf.domain
                    )));
                }
            }
        }
        Ok(LocalSimilarity {
            config,
            domain_summands,
            codomain_summands,
            leaves,
        })
    }

    pub fn new(
        config: Arc<Config>,
        domain_summands: usize,
        codomain_summands: usize,
        leaves: Vec<LeafMap>,
    ) -> Result<Self> {
        Ok(Self::from_parts(config, domain_summands, codomain_summands, leaves)?.canonical_form())
    }

    pub fn identity(config: Arc<Config>, summands: usize) -> Self {
        let leaves = (0..summands)
            .map(|s| LeafMap::new(Address::root(s), Address::root(s), LabeledIsometry::identity()))
            .collect();
        LocalSimilarity {
            config,
            domain_summands: summands,
            codomain_summands: summands,
            leaves,
        }
    }

    /// The strict transformation of `nB` acting by `iso` on one summand.
    pub fn single_summand_isometry(
        config: Arc<Config>,
        summands: usize,
        summand: usize,
        iso: LabeledIsometry,
    ) -> Result<Self> {
        let mut g = Self::identity(config, summands);
        let leaf = g
            .leaves
            .get_mut(summand)
            .ok_or_else(|| Error::InvalidElement(format!("no summand {summand}")))?;
        leaf.iso = iso;
        Self::new(g.config, g.domain_summands, g.codomain_summands, g.leaves)
    }

    pub fn config(&self) -> &Arc<Config> {
        &self.config
    }

    pub fn domain_summands(&self) -> usize {
        self.domain_summands
    }

    pub fn codomain_summands(&self) -> usize {
        self.codomain_summands
    }

    /// Number of domain summands.
    pub fn level(&self) -> usize {
        self.domain_summands
    }

    pub fn leaves(&self) -> &[LeafMap] {
        &self.leaves
    }

    pub fn domain(&self) -> LeafPartition {
        LeafPartition::new(
            self.config.q(),
            self.domain_summands,
            self.leaves.iter().map(|l| l.domain.clone()).collect(),
        )
        .expect("validated at construction")
    }

    pub fn codomain(&self) -> LeafPartition {
        LeafPartition::new(
            self.config.q(),
            self.codomain_summands,
            self.leaves.iter().map(|l| l.codomain.clone()).collect(),
        )
        .expect("validated at construction")
    }

    pub fn is_identity(&self) -> bool {
        let c = self.canonical_form();
        c.domain_summands == c.codomain_summands
            && c.leaves.iter().all(|l| {
                l.domain.word.is_empty() && l.domain == l.codomain && l.iso.is_identity()
            })
    }

    /// Subdivides the leaf at `index` into its `q` children.
    pub fn expand_leaf(&self, index: usize) -> Self {
        let q = self.config.q();
        let mut leaves = Vec::with_capacity(self.leaves.len() + q - 1);
        for (i, leaf) in self.leaves.iter().enumerate() {
            if i == index {
                leaves.extend(leaf.expand(q));
            } else {
                leaves.push(leaf.clone());
            }
        }
        leaves.sort_by(|a, b| a.domain.cmp(&b.domain));
        LocalSimilarity { leaves, ..self.clone() }
    }

    /// Merges reducible cherries bottom-up until none is left.
    pub fn canonical_form(&self) -> Self {
        let q = self.config.q();
        let mut leaves = self.leaves.clone();
        loop {
            let index: HashMap<&Address, usize> =
                leaves.iter().enumerate().map(|(i, l)| (&l.domain, i)).collect();
            let mut merges: Vec<(Vec<usize>, LeafMap)> = Vec::new();
            for leaf in &leaves {
                if leaf.domain.word.last() != Some(&0) {
                    continue;
                }
                let parent = leaf.domain.parent().expect("nonempty word");
                if let Some(merged) = self.try_merge(&leaves, &index, &parent, q) {
                    merges.push(merged);
                }
            }
            if merges.is_empty() {
                break;
            }
            let mut dead = vec![false; leaves.len()];
            let mut fresh = Vec::new();
            for (members, merged) in merges {
                for m in members {
                    dead[m] = true;
                }
                fresh.push(merged);
            }
            leaves = leaves
                .into_iter()
                .zip(dead)
                .filter_map(|(l, d)| (!d).then_some(l))
                .chain(fresh)
                .collect();
        }
        leaves.sort_by(|a, b| a.domain.cmp(&b.domain));
        LocalSimilarity { leaves, ..self.clone() }
    }

    fn try_merge(
        &self,
        leaves: &[LeafMap],
        index: &HashMap<&Address, usize>,
        parent: &Address,
        q: usize,
    ) -> Option<(Vec<usize>, LeafMap)> {
        let mut members = Vec::with_capacity(q);
        for d in 0..q as u8 {
            members.push(*index.get(&parent.child(d))?);
        }
        let cod_parent = leaves[members[0]].codomain.parent()?;
        let mut images = Vec::with_capacity(q);
        for &m in &members {
            let c = &leaves[m].codomain;
            if c.parent().as_ref() != Some(&cod_parent) {
                return None;
            }
            images.push(*c.word.last().expect("has parent"));
        }
        let root = crate::perm::Perm::from_images(images).ok()?;
        if !self.config.group().contains(&root) {
            return None;
        }
        let children = members.iter().map(|&m| leaves[m].iso.clone()).collect();
        let merged = LeafMap::new(
            parent.clone(),
            cod_parent,
            LabeledIsometry::assemble(root, children),
        );
        Some((members, merged))
    }

    /// `self ∘ h`: apply `h` first.
    pub fn compose(&self, h: &LocalSimilarity) -> Result<Self> {
        if *self.config != *h.config {
            return Err(Error::ConfigMismatch);
        }
        if h.codomain_summands != self.domain_summands {
            return Err(Error::SummandMismatch {
                left: self.domain_summands,
                right: h.codomain_summands,
            });
        }
        let q = self.config.q();
        let mut hl = h.leaves.clone();
        let mut gl = self.leaves.clone();
        loop {
            let gdom: BTreeSet<Address> = gl.iter().map(|l| l.domain.clone()).collect();
            let hcod: BTreeSet<Address> = hl.iter().map(|l| l.codomain.clone()).collect();
            let mut changed = false;
            let mut next_h = Vec::with_capacity(hl.len());
            for leaf in hl {
                if has_proper_extension(&gdom, &leaf.codomain) {
                    next_h.extend(leaf.expand(q));
                    changed = true;
                } else {
                    next_h.push(leaf);
                }
            }
            let mut next_g = Vec::with_capacity(gl.len());
            for leaf in gl {
                if has_proper_extension(&hcod, &leaf.domain) {
                    next_g.extend(leaf.expand(q));
                    changed = true;
                } else {
                    next_g.push(leaf);
                }
            }
            hl = next_h;
            gl = next_g;
            if !changed {
                break;
            }
        }
        let by_domain: HashMap<Address, LeafMap> =
            gl.into_iter().map(|l| (l.domain.clone(), l)).collect();
        let leaves = hl
            .into_iter()
            .map(|l| {
                let g = &by_domain[&l.codomain];
                LeafMap::new(l.domain, g.codomain.clone(), g.iso.compose(&l.iso))
            })
            .collect();
        Ok(LocalSimilarity::from_parts(
            self.config.clone(),
            h.domain_summands,
            self.codomain_summands,
            leaves,
        )?
        .canonical_form())
    }

    pub fn inverse(&self) -> Self {
        let mut leaves: Vec<LeafMap> = self
            .leaves
            .iter()
            .map(|l| LeafMap::new(l.codomain.clone(), l.domain.clone(), l.iso.inverse()))
            .collect();
        leaves.sort_by(|a, b| a.domain.cmp(&b.domain));
        LocalSimilarity {
            config: self.config.clone(),
            domain_summands: self.codomain_summands,
            codomain_summands: self.domain_summands,
            leaves,
        }
        .canonical_form()
    }

    /// Image of the ball at `x`, provided `x` lies at or below a domain leaf.
    pub fn act(&self, x: &Address) -> Option<Address> {
        let i = match self.leaves.binary_search_by(|l| l.domain.cmp(x)) {
            Ok(i) => i,
            Err(i) => i.checked_sub(1)?,
        };
        let leaf = &self.leaves[i];
        if !leaf.domain.is_prefix_of(x) {
            return None;
        }
        let tail = &x.word[leaf.domain.depth()..];
        Some(leaf.codomain.concat(&leaf.iso.apply(tail)))
    }

    /// An equivalent tree-pair in which every decoration is trivial: leaves
    /// carrying labels are subdivided until the labels are pushed into the
    /// leaf bijection. Finite support makes this terminate.
    pub fn decoration_free(&self) -> Self {
        let q = self.config.q();
        let mut done = Vec::new();
        let mut todo = self.leaves.clone();
        while let Some(leaf) = todo.pop() {
            if leaf.iso.is_identity() {
                done.push(leaf);
            } else {
                todo.extend(leaf.expand(q));
            }
        }
        done.sort_by(|a, b| a.domain.cmp(&b.domain));
        LocalSimilarity { leaves: done, ..self.clone() }
    }
}

fn has_proper_extension(set: &BTreeSet<Address>, a: &Address) -> bool {
    set.range((Bound::Excluded(a), Bound::Unbounded))
        .next()
        .is_some_and(|b| a.is_prefix_of(b))
}
