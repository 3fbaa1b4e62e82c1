use std::collections::{BTreeMap, BTreeSet};

use crate::perm::Perm;

/// A finitely supported tree automorphism given by its portrait: at vertex
/// `v` the children of `v` are permuted by `labels[v]`; vertices absent from
/// the map carry the identity. Only non-identity labels are stored, so
/// structural equality is equality of automorphisms.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct LabeledIsometry {
    labels: BTreeMap<Vec<u8>, Perm>,
}

impl LabeledIsometry {
    pub fn identity() -> Self {
        LabeledIsometry::default()
    }

    pub fn from_labels(labels: impl IntoIterator<Item = (Vec<u8>, Perm)>) -> Self {
        LabeledIsometry {
            labels: labels.into_iter().filter(|(_, p)| !p.is_identity()).collect(),
        }
    }

    pub fn single(word: Vec<u8>, perm: Perm) -> Self {
        LabeledIsometry::from_labels([(word, perm)])
    }

    pub fn is_identity(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &BTreeMap<Vec<u8>, Perm> {
        &self.labels
    }

    pub fn label(&self, word: &[u8]) -> Option<&Perm> {
        self.labels.get(word)
    }

    /// Shallowest vertex with a non-identity label; the automorphism fixes
    /// every vertex down to that depth.
    pub fn min_support_depth(&self) -> Option<usize> {
        self.labels.keys().map(Vec::len).min()
    }

    pub fn max_support_depth(&self) -> Option<usize> {
        self.labels.keys().map(Vec::len).max()
    }

    /// Image of a finite word (a vertex) under the automorphism.
    pub fn apply(&self, word: &[u8]) -> Vec<u8> {
        if self.labels.is_empty() {
            return word.to_vec();
        }
        let mut out = Vec::with_capacity(word.len());
        for (i, &d) in word.iter().enumerate() {
            match self.labels.get(&word[..i]) {
                Some(p) => out.push(p.apply(d)),
                None => out.push(d),
            }
        }
        out
    }

    pub fn inverse(&self) -> Self {
        LabeledIsometry {
            labels: self
                .labels
                .iter()
                .map(|(v, p)| (self.apply(v), p.inverse()))
                .collect(),
        }
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LabeledIsometry) -> Self {
        if self.is_identity() {
            return other.clone();
        }
        if other.is_identity() {
            return self.clone();
        }
        let other_inv = other.inverse();
        let mut support: BTreeSet<Vec<u8>> = other.labels.keys().cloned().collect();
        support.extend(self.labels.keys().map(|w| other_inv.apply(w)));
        let mut labels = BTreeMap::new();
        for v in support {
            let image = other.apply(&v);
            let p = match (self.labels.get(&image), other.labels.get(&v)) {
                (Some(a), Some(b)) => a.compose(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => continue,
            };
            if !p.is_identity() {
                labels.insert(v, p);
            }
        }
        LabeledIsometry { labels }
    }

    /// The automorphism restricted to the subtree below child `digit`,
    /// re-rooted at that child. It maps onto the subtree below the image
    /// child `root_image(digit)`.
    pub fn restrict(&self, digit: u8) -> Self {
        LabeledIsometry {
            labels: self
                .labels
                .iter()
                .filter(|(w, _)| w.first() == Some(&digit))
                .map(|(w, p)| (w[1..].to_vec(), p.clone()))
                .collect(),
        }
    }

    /// Assembles an automorphism from a root permutation and one automorphism
    /// per child subtree (the inverse of `restrict`).
    pub fn assemble(root: Perm, children: Vec<LabeledIsometry>) -> Self {
        let mut labels = BTreeMap::new();
        if !root.is_identity() {
            labels.insert(Vec::new(), root);
        }
        for (i, child) in children.into_iter().enumerate() {
            for (w, p) in child.labels {
                let mut word = Vec::with_capacity(w.len() + 1);
                word.push(i as u8);
                word.extend(w);
                labels.insert(word, p);
            }
        }
        LabeledIsometry { labels }
    }

    pub fn root_label(&self) -> Option<&Perm> {
        self.labels.get(&[][..])
    }

    pub fn root_image(&self, digit: u8) -> u8 {
        self.root_label().map_or(digit, |p| p.apply(digit))
    }
}
