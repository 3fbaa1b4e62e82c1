use std::collections::HashMap;

use crate::error::Result;
use crate::groups::{
    classify_arrow, stabilizer_test, Address, GroupElement, LabeledIsometry, LeafMap, LocalSimilarity, SpheroVertex,
};
use crate::perm::Perm;

use super::split::{tilings, Tree};

/// A finite piece of `Q`: a sphero-vertex, everything it maps to by one merge
/// or transformation, and all arrows among those objects.
#[derive(Clone, Debug)]
pub struct QTruncation {
    pub objects: Vec<SpheroVertex>,
    pub arrows: Vec<(usize, usize)>,
}

fn leaf_words(t: &Tree) -> Vec<(u8, Vec<u8>)> {
    let mut out = Vec::new();
    fn rec(t: &Tree, w: &mut Vec<u8>, out: &mut Vec<(u8, Vec<u8>)>) {
        match t {
            Tree::Leaf(x) => out.push((*x, w.clone())),
            Tree::Node(ch) => {
                for (i, c) in ch.iter().enumerate() {
                    w.push(i as u8);
                    rec(c, w, out);
                    w.pop();
                }
            }
        }
    }
    rec(t, &mut Vec::new(), &mut out);
    out
}

/// Split maps `mB → nB` up to strict transformations of the domain: ordered
/// families of labeled tilings, labels `1..n`.
fn splits(phi: &SpheroVertex) -> Result<Vec<LocalSimilarity>> {
    let config = phi.config().clone();
    let n = phi.domain_summands();
    let d = config.group();
    let mut memo = HashMap::new();
    let mut out = Vec::new();
    for m in 1..n {
        // surjective assignments of labels to m ordered summands
        let mut assign = vec![0usize; n];
        loop {
            let mut blocks: Vec<Vec<u8>> = vec![Vec::new(); m];
            for (i, &a) in assign.iter().enumerate() {
                blocks[a].push(i as u8 + 1);
            }
            if blocks.iter().all(|b| !b.is_empty()) {
                let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
                for b in &blocks {
                    let opts = tilings(b, d, &mut memo);
                    partial = partial
                        .iter()
                        .flat_map(|p| {
                            opts.iter().map(move |t| {
                                let mut v = p.clone();
                                v.push(t.clone());
                                v
                            })
                        })
                        .collect();
                }
                for family in partial {
                    let leaves = family
                        .iter()
                        .enumerate()
                        .flat_map(|(s, t)| {
                            leaf_words(t).into_iter().map(move |(label, w)| {
                                LeafMap::new(
                                    Address::new(s, w),
                                    Address::root(label as usize - 1),
                                    LabeledIsometry::identity(),
                                )
                            })
                        })
                        .collect();
                    out.push(LocalSimilarity::new(config.clone(), m, n, leaves)?);
                }
            }
            let mut i = 0;
            while i < n && assign[i] == m - 1 {
                assign[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
            assign[i] += 1;
        }
    }
    for sigma in Perm::all(n) {
        if sigma.is_identity() {
            continue;
        }
        let leaves = (0..n)
            .map(|i| {
                LeafMap::new(
                    Address::root(sigma.apply(i as u8) as usize),
                    Address::root(i),
                    LabeledIsometry::identity(),
                )
            })
            .collect();
        out.push(LocalSimilarity::new(config.clone(), n, n, leaves)?);
    }
    Ok(out)
}

/// `φ` together with `φ∘ν` for every split or transformation `ν` into its
/// domain, and the arrows `[ψ] → [ψ']` (`ψ'^{-1}ψ` a merge or a
/// non-strict transformation) among them.
pub fn q_truncation_below(phi: &SpheroVertex) -> Result<QTruncation> {
    let mut objects = vec![phi.clone()];
    for nu in splits(phi)? {
        objects.push(phi.compose(&nu)?);
    }
    let inverses: Vec<SpheroVertex> = objects.iter().map(LocalSimilarity::inverse).collect();
    let mut arrows = Vec::new();
    for (i, x) in objects.iter().enumerate() {
        for (j, y_inv) in inverses.iter().enumerate() {
            if i != j && x.domain_summands() >= objects[j].domain_summands() {
                let kind = classify_arrow(&y_inv.compose(x)?);
                if kind.is_merge() || kind == crate::groups::ArrowKind::Transformation {
                    arrows.push((i, j));
                }
            }
        }
    }
    Ok(QTruncation { objects, arrows })
}

/// Strict transformations of `nB` whose labels sit at depth `< depth`.
pub fn depth_bounded_strict(config: &std::sync::Arc<crate::groups::Config>, n: usize, depth: usize) -> Result<Vec<GroupElement>> {
    let q = config.q();
    let words: Vec<Vec<u8>> = (0..depth)
        .flat_map(|l| {
            (0..q.pow(l as u32)).map(move |mut x| {
                let mut w = vec![0u8; l];
                for slot in w.iter_mut().rev() {
                    *slot = (x % q) as u8;
                    x /= q;
                }
                w
            })
        })
        .collect();
    let elems = config.group().elements();
    let mut per_summand: Vec<LabeledIsometry> = vec![LabeledIsometry::identity()];
    for w in &words {
        per_summand = per_summand
            .iter()
            .flat_map(|iso| {
                elems.iter().map(move |p| {
                    let mut labels: Vec<(Vec<u8>, Perm)> =
                        iso.labels().iter().map(|(a, b)| (a.clone(), b.clone())).collect();
                    labels.push((w.clone(), p.clone()));
                    LabeledIsometry::from_labels(labels)
                })
            })
            .collect();
    }
    let mut tuples: Vec<Vec<LabeledIsometry>> = vec![Vec::new()];
    for _ in 0..n {
        tuples = tuples
            .iter()
            .flat_map(|t| {
                per_summand.iter().map(move |iso| {
                    let mut v = t.clone();
                    v.push(iso.clone());
                    v
                })
            })
            .collect();
    }
    tuples
        .into_iter()
        .map(|t| {
            let leaves = t
                .into_iter()
                .enumerate()
                .map(|(s, iso)| LeafMap::new(Address::root(s), Address::root(s), iso))
                .collect();
            LocalSimilarity::new(config.clone(), n, n, leaves)
        })
        .collect()
}

impl QTruncation {
    /// Objects fixed by `γ`.
    pub fn fixed_by(&self, gamma: &GroupElement) -> Result<Vec<bool>> {
        self.objects.iter().map(|psi| stabilizer_test(gamma, psi)).collect()
    }

    /// Every arrow out of a fixed object lands on a fixed object.
    pub fn is_upward_closed(&self, fixed: &[bool]) -> bool {
        self.arrows.iter().all(|&(a, b)| !fixed[a] || fixed[b])
    }
}
