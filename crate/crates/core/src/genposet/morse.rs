use std::collections::BTreeMap;

use super::GenPoset;
use crate::error::{Error, Result};

/// Heights on the objects outside a base subcategory (the objects with no
/// value).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MorseFn {
    pub values: BTreeMap<String, u64>,
}

impl MorseFn {
    pub fn new(values: impl IntoIterator<Item = (String, u64)>) -> Self {
        MorseFn { values: values.into_iter().collect() }
    }

    pub fn value(&self, id: &str) -> Option<u64> {
        self.values.get(id).copied()
    }

    pub fn in_base(&self, id: &str) -> bool {
        !self.values.contains_key(id)
    }

    /// No non-invertible arrow joins two objects of equal height.
    pub fn validate(&self, c: &GenPoset) -> Result<()> {
        for id in self.values.keys() {
            if !c.contains(id) {
                return Err(Error::UnknownObject(id.clone()));
            }
        }
        for (a, b) in c.arrows() {
            if let (Some(fa), Some(fb)) = (self.value(a), self.value(b)) {
                if fa == fb && !c.has_arrow(b, a) {
                    return Err(Error::InvalidMorse(format!(
                        "non-invertible arrow ({a}, {b}) inside level {fa}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// No isomorphism joins objects of different height (the base counts as
    /// its own height).
    pub fn is_well_behaved(&self, c: &GenPoset) -> bool {
        c.arrows()
            .filter(|&(a, b)| c.has_arrow(b, a))
            .all(|(a, b)| self.value(a) == self.value(b))
    }

    /// Distinct heights in increasing order.
    pub fn levels(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.values.values().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// The base together with every object of height at most `m`.
pub fn sublevel(c: &GenPoset, f: &MorseFn, m: Option<u64>) -> GenPoset {
    c.full_subcategory(|o| match (f.value(o), m) {
        (None, _) => true,
        (Some(v), Some(m)) => v <= m,
        (Some(_), None) => false,
    })
}

/// Over- and under-category of `x` relative to the objects selected by
/// `lower`. The descending link is their join.
pub fn descending_link(
    c: &GenPoset,
    x: &str,
    lower: impl Fn(&str) -> bool,
) -> Result<(GenPoset, GenPoset)> {
    if !c.contains(x) {
        return Err(Error::UnknownObject(x.to_string()));
    }
    if lower(x) {
        return Err(Error::Precondition(format!("`{x}` already lies in the lower part")));
    }
    if let Some(y) = c.objects().iter().find(|y| lower(y) && c.is_isomorphism(x, y)) {
        return Err(Error::IsomorphicToBase(format!("{x} ≅ {y}")));
    }
    let over = c.full_subcategory(|o| lower(o) && c.has_arrow(o, x));
    let under = c.full_subcategory(|o| lower(o) && c.has_arrow(x, o));
    Ok((over, under))
}
