use std::collections::BTreeSet;

use super::address::Address;
use super::element::{GroupElement, LocalSimilarity, SpheroVertex};
use super::isometry::LabeledIsometry;
use crate::error::{Error, Result};

/// Depth to which an isometry fixes every vertex. `Unbounded` only for the
/// identity. Ordered so that `Unbounded` exceeds every finite depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum TrivialDepth {
    Finite(usize),
    Unbounded,
}

impl TrivialDepth {
    pub fn at_least(self, k: usize) -> bool {
        match self {
            TrivialDepth::Finite(d) => d >= k,
            TrivialDepth::Unbounded => true,
        }
    }
}

/// Largest `k` with `g ∈ (U^D_k)^r`, or `None` when `g` is not a
/// summand-preserving isometry. `U_k` fixes the closed ball of radius `k`
/// around each root, so a label at a depth-`k` vertex still lies in `U_k`.
pub fn depth_triviality(g: &GroupElement) -> Option<TrivialDepth> {
    let c = g.canonical_form();
    if c.domain_summands() != c.codomain_summands() {
        return None;
    }
    let mut depth = TrivialDepth::Unbounded;
    for leaf in c.leaves() {
        if !leaf.domain.word.is_empty() || leaf.domain != leaf.codomain {
            return None;
        }
        if let Some(d) = leaf.iso.min_support_depth() {
            depth = depth.min(TrivialDepth::Finite(d));
        }
    }
    Some(depth)
}

/// Smallest `k'` such that `φ ∘ (U^D_{k'})^m ∘ φ^{-1} ⊂ (U^D_k)^n` for the
/// sphero-vertex `φ: mB → nB`.
///
/// `U_{k'}` is topologically generated by single labels at vertices of depth
/// at least `k'`, so it is enough to decide, per generator, whether its
/// conjugate is `k`-trivial. Below a domain leaf of depth `a` mapped to a
/// codomain leaf of depth `c`, a label at depth `a + t` conjugates to a label
/// at depth `c + t`; labels at interior vertices of the domain forest are
/// conjugated explicitly.
pub fn subnormal_depth(phi: &SpheroVertex, k: usize) -> Result<usize> {
    let phi = phi.canonical_form();
    let config = phi.config().clone();
    if config.group().is_trivial() {
        return Ok(0);
    }
    let mut need = 0usize;
    for leaf in phi.leaves() {
        let (a, c) = (leaf.domain.depth(), leaf.codomain.depth());
        if k > c {
            need = need.max(k - c + a);
        }
    }
    let interior: BTreeSet<Address> = phi
        .leaves()
        .iter()
        .flat_map(|l| (0..l.domain.depth()).map(|len| Address::new(l.domain.summand, l.domain.word[..len].to_vec())))
        .collect();
    let phi_inv = phi.inverse();
    let level = phi.domain_summands();
    for v in interior.iter().rev() {
        if v.depth() < need {
            continue;
        }
        for d in config.group().elements().iter().filter(|p| !p.is_identity()) {
            let alpha = LocalSimilarity::single_summand_isometry(
                config.clone(),
                level,
                v.summand,
                LabeledIsometry::single(v.word.clone(), d.clone()),
            )?;
            let beta = phi.compose(&alpha.compose(&phi_inv)?)?;
            if !depth_triviality(&beta).is_some_and(|t| t.at_least(k)) {
                need = need.max(v.depth() + 1);
                break;
            }
        }
    }
    Ok(need)
}

/// Kinds of arrows between sphero-vertices, most specific first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ArrowKind {
    VeryElementaryMerge,
    Merge,
    StrictTransformation,
    Transformation,
    NotAnArrow,
}

impl ArrowKind {
    pub fn is_merge(self) -> bool {
        matches!(self, ArrowKind::Merge | ArrowKind::VeryElementaryMerge)
    }

    pub fn is_transformation(self) -> bool {
        matches!(self, ArrowKind::Transformation | ArrowKind::StrictTransformation)
    }

    pub fn is_arrow(self) -> bool {
        self != ArrowKind::NotAnArrow
    }
}

pub fn classify_arrow(alpha: &LocalSimilarity) -> ArrowKind {
    let c = alpha.canonical_form();
    let (n, m) = (c.domain_summands(), c.codomain_summands());
    // each domain summand must be a single similarity onto a ball
    if c.leaves().iter().any(|l| !l.domain.word.is_empty()) {
        return ArrowKind::NotAnArrow;
    }
    if n == m {
        if c.leaves().iter().any(|l| !l.codomain.word.is_empty()) {
            return ArrowKind::NotAnArrow;
        }
        if c.leaves().iter().all(|l| l.codomain.summand == l.domain.summand) {
            return ArrowKind::StrictTransformation;
        }
        return ArrowKind::Transformation;
    }
    if n < m {
        return ArrowKind::NotAnArrow;
    }
    let q = c.config().q();
    let mut preimages = vec![0usize; m];
    for l in c.leaves() {
        preimages[l.codomain.summand] += 1;
    }
    if preimages.iter().all(|&p| p == 1 || p == q) {
        ArrowKind::VeryElementaryMerge
    } else {
        ArrowKind::Merge
    }
}

/// Decides `γ ∈ Stab[φ]` for the action on classes of sphero-vertices modulo
/// strict transformations: true iff `φ^{-1} γ φ` is a strict transformation.
pub fn stabilizer_test(gamma: &GroupElement, phi: &SpheroVertex) -> Result<bool> {
    if phi.codomain_summands() != gamma.domain_summands() {
        return Err(Error::SummandMismatch {
            left: gamma.domain_summands(),
            right: phi.codomain_summands(),
        });
    }
    let conj = phi.inverse().compose(&gamma.compose(phi)?)?;
    Ok(classify_arrow(&conj) == ArrowKind::StrictTransformation)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ThompsonFlags {
    pub in_v: bool,
    pub in_f: bool,
}

/// Membership in the embedded Higman–Thompson groups. Finitely supported
/// decorations can always be pushed into the leaf bijection, so every
/// representable element lies in `V`; `F` additionally needs an
/// order-preserving leaf bijection in decoration-free form.
pub fn thompson_membership(g: &GroupElement) -> ThompsonFlags {
    let free = g.canonical_form().decoration_free();
    let in_v = free.leaves().iter().all(|l| l.iso.is_identity());
    let in_f = in_v
        && free
            .leaves()
            .windows(2)
            .all(|w| w[0].codomain < w[1].codomain);
    ThompsonFlags { in_v, in_f }
}
