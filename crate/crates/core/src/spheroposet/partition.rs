use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::genposet::GenPoset;
use crate::groups::Address;

use super::split::{SplitRecord, Tree};

/// A partition of `kB` into subballs, as the sorted list of its balls.
pub type BallPartition = Vec<Address>;

/// Partitions of `kB` into vertices of the record's tilings that are not the
/// trivial partition and contain at least one internal vertex; ordered by
/// refinement (finer → coarser). Also carries `P_ν` and the retraction `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallPartitionPoset {
    pub record: SplitRecord,
    pub elements: Vec<BallPartition>,
    pub poset: GenPoset,
    pub p_nu: usize,
    /// `f[i]` is the index of `F(elements[i])`.
    pub f: Vec<usize>,
}

/// Outcome of checking the three cone relations at every element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ConeCheck {
    pub refines_image: bool,
    pub order_preserving: bool,
    pub below_tip: bool,
}

impl ConeCheck {
    pub fn all(&self) -> bool {
        self.refines_image && self.order_preserving && self.below_tip
    }
}

/// `fine ≥ coarse`: every ball of `fine` lies in a ball of `coarse`.
pub fn refines(fine: &[Address], coarse: &[Address]) -> bool {
    fine.iter().all(|b| coarse.iter().any(|c| c.is_prefix_of(b)))
}

pub fn partition_id(p: &[Address]) -> String {
    p.iter().map(Address::to_string).collect::<Vec<_>>().join(" ")
}

pub fn partition_poset(nu: &SplitRecord, q: usize) -> Result<BallPartitionPoset> {
    if nu.is_very_elementary() {
        return Err(Error::Precondition(format!("record `{nu}` is very elementary")));
    }
    let blocks = nu.blocks();
    let is_internal = |a: &Address| blocks[a.summand].at(&a.word).is_some_and(|t| !t.is_leaf());
    let mut partial: Vec<BallPartition> = vec![Vec::new()];
    for (s, t) in blocks.iter().enumerate() {
        let cuts = t.cuttings();
        let mut next = Vec::with_capacity(partial.len() * cuts.len());
        for p in &partial {
            for cut in &cuts {
                let mut v = p.clone();
                v.extend(cut.iter().map(|w| Address::new(s, w.clone())));
                next.push(v);
            }
        }
        partial = next;
    }
    let mut elements: Vec<BallPartition> = partial
        .into_iter()
        .filter(|p| p.len() > blocks.len() && p.iter().any(&is_internal))
        .map(|mut p| {
            p.sort();
            p
        })
        .collect();
    elements.sort();
    let index: BTreeMap<BallPartition, usize> = elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();

    let depth_one = |divided: &dyn Fn(usize) -> bool| -> BallPartition {
        let mut p = Vec::new();
        for (s, t) in blocks.iter().enumerate() {
            if divided(s) && matches!(t, Tree::Node(_)) {
                p.extend((0..q as u8).map(|d| Address::new(s, vec![d])));
            } else {
                p.push(Address::root(s));
            }
        }
        p
    };
    let p_nu = depth_one(&|s| !blocks[s].is_leaf());
    let p_nu = *index
        .get(&p_nu)
        .ok_or_else(|| Error::Precondition(format!("P_ν missing for `{nu}`")))?;
    let f = elements
        .iter()
        .map(|p| {
            let image = depth_one(&|s| p.iter().any(|a| a.summand == s && a.depth() > 0));
            index
                .get(&image)
                .copied()
                .ok_or_else(|| Error::Precondition(format!("F leaves the poset at {}", partition_id(p))))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut arrows = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            if i != j && refines(a, b) {
                arrows.push((i, j));
            }
        }
    }
    let ids = elements.iter().map(|p| partition_id(p)).collect();
    Ok(BallPartitionPoset {
        record: nu.clone(),
        elements,
        poset: GenPoset::from_indexed(ids, arrows),
        p_nu,
        f,
    })
}

impl BallPartitionPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `P ≥ F(P)`, `F` monotone, and `P_ν ≥ F(P)` at every element.
    pub fn check_cone(&self) -> ConeCheck {
        let e = &self.elements;
        let refines_image = (0..e.len()).all(|i| refines(&e[i], &e[self.f[i]]));
        let below_tip = (0..e.len()).all(|i| refines(&e[self.p_nu], &e[self.f[i]]));
        let order_preserving = (0..e.len()).all(|i| {
            (0..e.len()).all(|j| !refines(&e[i], &e[j]) || refines(&e[self.f[i]], &e[self.f[j]]))
        });
        ConeCheck { refines_image, order_preserving, below_tip }
    }
}
