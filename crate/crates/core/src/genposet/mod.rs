//! Generalized posets: small categories with at most one arrow between any
//! ordered pair of objects, stored as a composition-closed relation.

mod morse;

pub use morse::{descending_link, sublevel, MorseFn};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{flag_complex, reduced_homology, ChainComplex, HomologyResult};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GenPoset {
    objects: Vec<String>,
    index: HashMap<String, usize>,
    arrows: BTreeSet<(usize, usize)>,
}

impl GenPoset {
    /// Objects are sorted; arrows are taken as given (no closure).
    pub fn from_parts(
        objects: impl IntoIterator<Item = String>,
        arrows: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut objects: Vec<String> = objects.into_iter().collect();
        objects.sort();
        if let Some(w) = objects.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::IdCollision(w[0].clone()));
        }
        let index: HashMap<String, usize> =
            objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let mut set = BTreeSet::new();
        for (a, b) in arrows {
            let ia = *index.get(&a).ok_or_else(|| Error::UnknownObject(a.clone()))?;
            let ib = *index.get(&b).ok_or_else(|| Error::UnknownObject(b.clone()))?;
            set.insert((ia, ib));
        }
        Ok(GenPoset { objects, index, arrows: set })
    }

    /// As `from_parts`, then closed under composition with identities dropped.
    pub fn new(
        objects: impl IntoIterator<Item = String>,
        arrows: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self> {
        let mut p = Self::from_parts(objects, arrows)?;
        p.close();
        Ok(p)
    }

    pub(crate) fn from_indexed(objects: Vec<String>, arrows: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let index = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let mut p = GenPoset { objects, index, arrows: arrows.into_iter().collect() };
        p.close();
        p
    }

    fn close(&mut self) {
        let n = self.objects.len();
        let mut reach = vec![vec![false; n]; n];
        for &(a, b) in &self.arrows {
            reach[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if reach[i][k] {
                    let (ri, rk) = if i < k {
                        let (lo, hi) = reach.split_at_mut(k);
                        (&mut lo[i], &hi[0])
                    } else if i > k {
                        let (lo, hi) = reach.split_at_mut(i);
                        (&mut hi[0], &lo[k])
                    } else {
                        continue;
                    };
                    for (x, &y) in ri.iter_mut().zip(rk.iter()) {
                        *x |= y;
                    }
                }
            }
        }
        self.arrows = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| i != j && reach[i][j])
            .collect();
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.arrows
            .iter()
            .map(|&(a, b)| (self.objects[a].as_str(), self.objects[b].as_str()))
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn has_arrow(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.arrows.contains(&(i, j)),
            _ => false,
        }
    }

    pub fn is_isomorphism(&self, a: &str, b: &str) -> bool {
        self.has_arrow(a, b) && self.has_arrow(b, a)
    }

    /// Composition closure and identity-free storage. The first violation is
    /// reported with its witness.
    pub fn validate(&self) -> Result<()> {
        if let Some(&(a, _)) = self.arrows.iter().find(|(a, b)| a == b) {
            return Err(Error::Precondition(format!("identity arrow stored on `{}`", self.objects[a])));
        }
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(a, b) in &self.arrows {
            out[a].push(b);
        }
        for &(a, b) in &self.arrows {
            for &c in &out[b] {
                if c != a && !self.arrows.contains(&(a, c)) {
                    return Err(Error::MissingComposite(
                        self.objects[a].clone(),
                        self.objects[b].clone(),
                        self.objects[c].clone(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// All isomorphism pairs `(a, b)` with `a < b`.
    pub fn isomorphisms(&self) -> Subgroupoid {
        Subgroupoid {
            pairs: self
                .arrows
                .iter()
                .filter(|&&(a, b)| a < b && self.arrows.contains(&(b, a)))
                .map(|&(a, b)| (self.objects[a].clone(), self.objects[b].clone()))
                .collect(),
        }
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.arrows.iter().all(|&(a, b)| !self.arrows.contains(&(b, a)))
    }

    /// Full subcategory on the objects satisfying `keep`.
    pub fn full_subcategory(&self, keep: impl Fn(&str) -> bool) -> GenPoset {
        let kept: Vec<usize> = (0..self.len()).filter(|&i| keep(&self.objects[i])).collect();
        let renumber: HashMap<usize, usize> = kept.iter().enumerate().map(|(n, &o)| (o, n)).collect();
        let objects: Vec<String> = kept.iter().map(|&i| self.objects[i].clone()).collect();
        let index = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let arrows = self
            .arrows
            .iter()
            .filter_map(|(a, b)| Some((*renumber.get(a)?, *renumber.get(b)?)))
            .collect();
        GenPoset { objects, index, arrows }
    }

    /// Quotient by a subgroupoid: objects are its equivalence classes (named
    /// by their least member) and `[x] → [y]` iff some representatives are
    /// joined. Returns the quotient and the projection.
    pub fn quotient_by_subgroupoid(&self, g: &Subgroupoid) -> Result<(GenPoset, BTreeMap<String, String>)> {
        let mut parent: Vec<usize> = (0..self.len()).collect();
        fn root(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (a, b) in &g.pairs {
            let ia = self.index_of(a).ok_or_else(|| Error::UnknownObject(a.clone()))?;
            let ib = self.index_of(b).ok_or_else(|| Error::UnknownObject(b.clone()))?;
            if !(self.arrows.contains(&(ia, ib)) && self.arrows.contains(&(ib, ia))) {
                return Err(Error::NotSubgroupoid(format!("({a}, {b}) is not an isomorphism")));
            }
            let (ra, rb) = (root(&mut parent, ia), root(&mut parent, ib));
            // union keeping the least index as representative
            if ra < rb {
                parent[rb] = ra;
            } else {
                parent[ra] = rb;
            }
        }
        let reps: Vec<usize> = (0..self.len()).map(|i| root(&mut parent, i)).collect();
        let mut classes: Vec<usize> = reps.clone();
        classes.sort_unstable();
        classes.dedup();
        let objects: Vec<String> = classes.iter().map(|&r| self.objects[r].clone()).collect();
        let class_of: HashMap<usize, usize> = classes.iter().enumerate().map(|(n, &r)| (r, n)).collect();
        let arrows: Vec<(usize, usize)> = self
            .arrows
            .iter()
            .map(|&(a, b)| (class_of[&reps[a]], class_of[&reps[b]]))
            .filter(|(a, b)| a != b)
            .collect();
        let projection = (0..self.len())
            .map(|i| (self.objects[i].clone(), self.objects[reps[i]].clone()))
            .collect();
        Ok((GenPoset::from_indexed(objects, arrows), projection))
    }

    pub fn underlying_poset(&self) -> (GenPoset, BTreeMap<String, String>) {
        self.quotient_by_subgroupoid(&self.isomorphisms())
            .expect("isomorphisms form a subgroupoid")
    }

    /// Disjoint union with one arrow from every object of `self` to every
    /// object of `other`.
    pub fn join(&self, other: &GenPoset) -> Result<GenPoset> {
        let objects: Vec<String> = self.objects.iter().chain(&other.objects).cloned().collect();
        let arrows = self
            .arrows()
            .chain(other.arrows())
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .chain(
                self.objects
                    .iter()
                    .flat_map(|a| other.objects.iter().map(move |b| (a.clone(), b.clone()))),
            )
            .collect::<Vec<_>>();
        GenPoset::new(objects, arrows)
    }

    /// The join with an extra object `tip` between the two sides.
    pub fn coone(&self, other: &GenPoset) -> Result<GenPoset> {
        const TIP: &str = "tip";
        if self.contains(TIP) || other.contains(TIP) {
            return Err(Error::IdCollision(TIP.into()));
        }
        let j = self.join(other)?;
        let objects: Vec<String> = j.objects.iter().cloned().chain([TIP.to_string()]).collect();
        let arrows = j
            .arrows()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .chain(self.objects.iter().map(|a| (a.clone(), TIP.to_string())))
            .chain(other.objects.iter().map(|b| (TIP.to_string(), b.clone())))
            .collect::<Vec<_>>();
        GenPoset::new(objects, arrows)
    }

    /// Order complex of an honest poset: simplices are chains, i.e. cliques
    /// of the comparability graph, on vertices numbered by object index.
    pub fn order_complex(&self, max_dim: Option<usize>) -> Result<ChainComplex> {
        if let Some(&(a, b)) = self.arrows.iter().find(|&&(a, b)| self.arrows.contains(&(b, a))) {
            return Err(Error::NotAntisymmetric(self.objects[a].clone(), self.objects[b].clone()));
        }
        let edges: Vec<(u32, u32)> = self
            .arrows
            .iter()
            .map(|&(a, b)| (a.min(b) as u32, a.max(b) as u32))
            .collect();
        let dim = max_dim.unwrap_or(self.len().saturating_sub(1));
        flag_complex(self.len(), &edges, dim)
    }

    /// Reduced homology of the underlying poset's order complex in degrees
    /// `0..=through`.
    pub fn reduced_homology(&self, through: usize) -> Result<HomologyResult> {
        let (u, _) = self.underlying_poset();
        reduced_homology(&u.order_complex(Some(through + 1))?, through)
    }

    /// Connected components of the underlying graph, as full subcategories.
    pub fn components(&self) -> Vec<GenPoset> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for &(a, b) in &self.arrows {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut count = 0;
        for s in 0..self.len() {
            if comp[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            comp[s] = count;
            while let Some(v) = stack.pop() {
                for &w in &adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (0..count)
            .map(|c| {
                let members: BTreeSet<&str> =
                    (0..self.len()).filter(|&i| comp[i] == c).map(|i| self.objects[i].as_str()).collect();
                self.full_subcategory(|o| members.contains(o))
            })
            .collect()
    }

    /// Full subcategory on the objects fixed by every permutation in
    /// `action`. Each permutation must be a bijection of the objects that
    /// carries arrows to arrows.
    pub fn fixed_subcategory(&self, action: &[BTreeMap<String, String>]) -> Result<GenPoset> {
        let mut fixed = vec![true; self.len()];
        for g in action {
            let image: Vec<usize> = self
                .objects
                .iter()
                .map(|o| {
                    let t = g.get(o).unwrap_or(o);
                    self.index_of(t).ok_or_else(|| Error::UnknownObject(t.clone()))
                })
                .collect::<Result<_>>()?;
            let distinct: BTreeSet<usize> = image.iter().copied().collect();
            if distinct.len() != self.len() {
                return Err(Error::NotFunctorial("action is not a bijection of objects".into()));
            }
            for &(a, b) in &self.arrows {
                if !self.arrows.contains(&(image[a], image[b])) {
                    return Err(Error::NotFunctorial(format!(
                        "arrow ({}, {}) has no image",
                        self.objects[a], self.objects[b]
                    )));
                }
            }
            for (i, &t) in image.iter().enumerate() {
                if t != i {
                    fixed[i] = false;
                }
            }
        }
        Ok(self.full_subcategory(|o| fixed[self.index[o]]))
    }

    pub fn to_json(&self) -> GenPosetJson {
        GenPosetJson {
            objects: self.objects.clone(),
            arrows: self.arrows().map(|(a, b)| [a.to_string(), b.to_string()]).collect(),
        }
    }

    pub fn from_json(j: &GenPosetJson) -> Result<Self> {
        GenPoset::from_parts(
            j.objects.iter().cloned(),
            j.arrows.iter().map(|[a, b]| (a.clone(), b.clone())),
        )
    }
}

/// A symmetric set of isomorphism pairs, stored with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Subgroupoid {
    pub pairs: BTreeSet<(String, String)>,
}

impl Subgroupoid {
    pub fn new(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        Subgroupoid {
            pairs: pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
                .collect(),
        }
    }

    pub fn trivial() -> Self {
        Subgroupoid::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenPosetJson {
    pub objects: Vec<String>,
    pub arrows: Vec<[String; 2]>,
}
