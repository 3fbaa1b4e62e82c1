use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::genposet::GenPoset;
use crate::groups::Config;
use crate::perm::{Perm, PermGroup};

use super::cn::DecoratedVertex;

/// Default bound on `n` for descending-link enumeration.
pub const DEFAULT_LINK_CAP: usize = 6;

/// A tiling of one ball by a finite `q`-ary tree whose leaves carry labels.
/// The derived order (leaves before nodes, then lexicographic) is the total
/// order used to pick orbit representatives.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Tree {
    Leaf(u8),
    Node(Vec<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<u8>) {
        match self {
            Tree::Leaf(x) => out.push(*x),
            Tree::Node(ch) => ch.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(ch) => ch.iter().map(Tree::leaf_count).sum(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Leaf(_) => 0,
            Tree::Node(ch) => 1 + ch.iter().map(Tree::depth).max().unwrap_or(0),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Tree::Leaf(_))
    }

    /// The subtree at `word`, if that vertex exists.
    pub fn at(&self, word: &[u8]) -> Option<&Tree> {
        match (word.split_first(), self) {
            (None, t) => Some(t),
            (Some((&d, rest)), Tree::Node(ch)) => ch.get(d as usize)?.at(rest),
            (Some(_), Tree::Leaf(_)) => None,
        }
    }

    /// Least element of the orbit under D-admissible automorphisms.
    pub fn canonical(&self, d: &PermGroup) -> Tree {
        match self {
            Tree::Leaf(x) => Tree::Leaf(*x),
            Tree::Node(ch) => {
                let ch: Vec<Tree> = ch.iter().map(|c| c.canonical(d)).collect();
                Tree::Node(best_arrangement(&ch, d))
            }
        }
    }

    /// Applies `p` to the children of the vertex at `word`: the child in
    /// position `i` moves to position `p(i)`.
    pub fn permute_at(&self, word: &[u8], p: &Perm) -> Option<Tree> {
        match (word.split_first(), self) {
            (None, Tree::Node(ch)) => {
                let mut out = ch.clone();
                for (i, c) in ch.iter().enumerate() {
                    out[p.apply(i as u8) as usize] = c.clone();
                }
                Some(Tree::Node(out))
            }
            (Some((&d, rest)), Tree::Node(ch)) => {
                let mut out = ch.clone();
                out[d as usize] = ch.get(d as usize)?.permute_at(rest, p)?;
                Some(Tree::Node(out))
            }
            _ => None,
        }
    }

    /// Words of the internal vertices.
    pub fn internal_words(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::new();
        fn rec(t: &Tree, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if let Tree::Node(ch) = t {
                out.push(w.clone());
                for (i, c) in ch.iter().enumerate() {
                    w.push(i as u8);
                    rec(c, w, out);
                    w.pop();
                }
            }
        }
        rec(self, &mut Vec::new(), &mut out);
        out
    }

    /// Antichains of vertices covering every leaf, as lists of words.
    pub fn cuttings(&self) -> Vec<Vec<Vec<u8>>> {
        let mut out = vec![vec![Vec::new()]];
        if let Tree::Node(ch) = self {
            let mut partial: Vec<Vec<Vec<u8>>> = vec![Vec::new()];
            for (i, c) in ch.iter().enumerate() {
                let sub = c.cuttings();
                let mut next = Vec::with_capacity(partial.len() * sub.len());
                for p in &partial {
                    for s in &sub {
                        let mut v = p.clone();
                        v.extend(s.iter().map(|w| {
                            let mut x = vec![i as u8];
                            x.extend_from_slice(w);
                            x
                        }));
                        next.push(v);
                    }
                }
                partial = next;
            }
            out.extend(partial);
        }
        out
    }
}

/// Lexicographically least arrangement `(c[g(0)], .., c[g(q−1)])`, `g ∈ D`.
pub(crate) fn best_arrangement<T: Ord + Clone>(children: &[T], d: &PermGroup) -> Vec<T> {
    d.elements()
        .iter()
        .map(|g| (0..children.len()).map(|j| children[g.apply(j as u8) as usize].clone()).collect::<Vec<T>>())
        .min()
        .expect("group is nonempty")
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(x) => write!(f, "{x}"),
            Tree::Node(ch) => {
                f.write_str("[")?;
                for (i, c) in ch.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("]")
            }
        }
    }
}

/// A split map `kB → nB` modulo transformations of the domain: an unordered
/// family of labeled tilings, one per summand of `kB`, whose labels are
/// exactly `{1..n}`. Singleton blocks are bare leaves.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SplitRecord {
    blocks: Vec<Tree>,
}

impl SplitRecord {
    /// Canonicalizes each tiling and sorts the blocks.
    pub fn new(blocks: Vec<Tree>, d: &PermGroup) -> Result<Self> {
        let q = d.degree();
        let mut labels: Vec<u8> = blocks.iter().flat_map(Tree::leaves).collect();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| l as usize != i + 1) {
            return Err(Error::Precondition(format!("leaf labels {labels:?} are not 1..n")));
        }
        fn arity_ok(t: &Tree, q: usize) -> bool {
            match t {
                Tree::Leaf(_) => true,
                Tree::Node(ch) => ch.len() == q && ch.iter().all(|c| arity_ok(c, q)),
            }
        }
        if !blocks.iter().all(|t| arity_ok(t, q)) {
            return Err(Error::Precondition(format!("tiling with a vertex of arity other than {q}")));
        }
        let mut blocks: Vec<Tree> = blocks.iter().map(|t| t.canonical(d)).collect();
        blocks.sort();
        Ok(SplitRecord { blocks })
    }

    pub fn blocks(&self) -> &[Tree] {
        &self.blocks
    }

    /// Number of summands of the domain `kB`.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    /// Number of summands of the codomain `nB`.
    pub fn n(&self) -> usize {
        self.blocks.iter().map(Tree::leaf_count).sum()
    }

    /// Every summand is left alone or split into its `q` maximal subballs.
    pub fn is_very_elementary(&self) -> bool {
        self.blocks.iter().all(|t| t.depth() <= 1)
    }

    pub fn id(&self) -> String {
        self.blocks.iter().map(Tree::to_string).collect::<Vec<_>>().join(" ")
    }

    /// For a very elementary record, the corresponding simplex of `C_n`.
    pub fn cn_face(&self, config: &Config) -> Option<Vec<DecoratedVertex>> {
        if !self.is_very_elementary() {
            return None;
        }
        let mut face = Vec::new();
        for t in self.blocks.iter().filter(|t| !t.is_leaf()) {
            let labels = t.leaves();
            let mut sorted = labels.clone();
            sorted.sort_unstable();
            let ranks: Vec<u8> = labels
                .iter()
                .map(|l| sorted.iter().position(|s| s == l).expect("label present") as u8)
                .collect();
            let sigma = Perm::from_images(ranks).ok()?;
            let support = sorted.iter().map(|&l| l as u32).collect();
            face.push(DecoratedVertex::new(config, support, sigma).ok()?);
        }
        face.sort();
        Some(face)
    }

    /// The records reached by cutting each tiling along an antichain: these
    /// are exactly the targets `ν₁ = ν₂∘μ` of arrows into `self` (excluding
    /// `self` and the all-singleton record).
    pub fn refinements(&self, d: &PermGroup) -> BTreeSet<SplitRecord> {
        let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
        for t in &self.blocks {
            let cuts = t.cuttings();
            let mut next = Vec::new();
            for p in &partial {
                for cut in &cuts {
                    let mut v = p.clone();
                    v.extend(cut.iter().map(|w| t.at(w).expect("cut vertex exists").clone()));
                    next.push(v);
                }
            }
            partial = next;
        }
        let n = self.n();
        partial
            .into_iter()
            .filter(|b| b.len() > self.k() && b.len() < n)
            .map(|b| {
                let mut blocks: Vec<Tree> = b.iter().map(|t| t.canonical(d)).collect();
                blocks.sort();
                SplitRecord { blocks }
            })
            .collect()
    }
}

impl fmt::Display for SplitRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Orbit representatives of labeled tilings with leaf set `labels`.
pub(crate) fn tilings(labels: &[u8], d: &PermGroup, memo: &mut HashMap<Vec<u8>, Vec<Tree>>) -> Vec<Tree> {
    if let Some(t) = memo.get(labels) {
        return t.clone();
    }
    let q = d.degree();
    let out: Vec<Tree> = if labels.len() == 1 {
        vec![Tree::Leaf(labels[0])]
    } else if labels.len() < q || !(labels.len() - 1).is_multiple_of(q - 1) {
        Vec::new()
    } else {
        let mut found = BTreeSet::new();
        // ordered distributions of the labels into q nonempty parts
        let m = labels.len();
        let mut assign = vec![0usize; m];
        loop {
            let mut parts: Vec<Vec<u8>> = vec![Vec::new(); q];
            for (i, &a) in assign.iter().enumerate() {
                parts[a].push(labels[i]);
            }
            if parts.iter().all(|p| !p.is_empty() && (p.len() - 1) % (q - 1) == 0) {
                let subs: Vec<Vec<Tree>> = parts.iter().map(|p| tilings(p, d, memo)).collect();
                let mut combos: Vec<Vec<Tree>> = vec![Vec::new()];
                for s in &subs {
                    combos = combos
                        .iter()
                        .flat_map(|c| {
                            s.iter().map(move |t| {
                                let mut v = c.clone();
                                v.push(t.clone());
                                v
                            })
                        })
                        .collect();
                }
                for c in combos {
                    found.insert(Tree::Node(c).canonical(d));
                }
            }
            let mut i = 0;
            while i < m && assign[i] == q - 1 {
                assign[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            assign[i] += 1;
        }
        found.into_iter().collect()
    };
    memo.insert(labels.to_vec(), out.clone());
    out
}

/// Set partitions of `{1..n}` as restricted growth strings.
fn set_partitions(n: usize) -> Vec<Vec<Vec<u8>>> {
    fn rec(i: usize, n: usize, blocks: &mut Vec<Vec<u8>>, out: &mut Vec<Vec<Vec<u8>>>) {
        if i > n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i as u8);
            rec(i + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i as u8]);
        rec(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    rec(1, n, &mut Vec::new(), &mut out);
    out
}

/// The enumerated descending link: records in sorted order and the poset on
/// their ids, with an arrow from each record to every coarser one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPoset {
    pub records: Vec<SplitRecord>,
    pub poset: GenPoset,
}

impl SplitPoset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Every split record of `nB` with fewer than `n` domain summands.
pub fn split_records(config: &Config, n: usize, cap: usize) -> Result<Vec<SplitRecord>> {
    if n > cap {
        return Err(Error::CapExceeded { what: "n", value: n, cap });
    }
    let d = config.group();
    let mut memo = HashMap::new();
    let mut all = BTreeSet::new();
    for partition in set_partitions(n) {
        if partition.len() == n {
            continue;
        }
        let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
        for block in &partition {
            let options = tilings(block, d, &mut memo);
            partial = partial
                .iter()
                .flat_map(|p| {
                    options.iter().map(move |t| {
                        let mut v = p.clone();
                        v.push(t.clone());
                        v
                    })
                })
                .collect();
            if partial.is_empty() {
                break;
            }
        }
        for blocks in partial {
            let mut blocks = blocks;
            blocks.sort();
            all.insert(SplitRecord { blocks });
        }
    }
    Ok(all.into_iter().collect())
}

fn poset_on(records: Vec<SplitRecord>, d: &PermGroup) -> SplitPoset {
    let index: BTreeMap<&SplitRecord, usize> = records.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut arrows = Vec::new();
    for (j, r) in records.iter().enumerate() {
        for finer in r.refinements(d) {
            if let Some(&i) = index.get(&finer) {
                arrows.push((i, j));
            }
        }
    }
    let ids = records.iter().map(SplitRecord::id).collect();
    let poset = GenPoset::from_indexed(ids, arrows);
    SplitPoset { records, poset }
}

/// The descending link `lk↓` of a level-`n` object, as a poset of split
/// records.
pub fn enumerate_desc_link(config: &Config, n: usize, cap: usize) -> Result<SplitPoset> {
    let records = split_records(config, n, cap)?;
    Ok(poset_on(records, config.group()))
}

/// The very elementary part `lk*↓`, with the index of each of its records
/// in the full enumeration.
pub fn enumerate_desc_link_star(config: &Config, n: usize, cap: usize) -> Result<(SplitPoset, Vec<usize>)> {
    let all = split_records(config, n, cap)?;
    let (inclusion, records): (Vec<usize>, Vec<SplitRecord>) = all
        .into_iter()
        .enumerate()
        .filter(|(_, r)| r.is_very_elementary())
        .unzip();
    Ok((poset_on(records, config.group()), inclusion))
}
