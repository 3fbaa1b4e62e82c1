use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::groups::Config;
use crate::perm::{Perm, PermGroup};

use super::split::best_arrangement;

/// Default bound on `k` for orbit counting.
pub const DEFAULT_ORBIT_CAP: usize = 3;

/// A vertex of the lowest-level forest in a normalized chain. `tags` lists
/// `(stage, label)` for every stage whose partition contains this ball.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub(crate) struct ChainNode {
    pub(crate) tags: Vec<(u8, u8)>,
    pub(crate) children: Vec<ChainNode>,
}

impl ChainNode {
    fn leaf(tags: Vec<(u8, u8)>) -> Self {
        ChainNode { tags, children: Vec::new() }
    }

    fn at_mut(&mut self, word: &[u8]) -> &mut ChainNode {
        match word.split_first() {
            None => self,
            Some((&d, rest)) => self.children[d as usize].at_mut(rest),
        }
    }

    pub(crate) fn canonical(&self, d: &PermGroup) -> ChainNode {
        let mut tags = self.tags.clone();
        tags.sort_unstable();
        if self.children.is_empty() {
            return ChainNode { tags, children: Vec::new() };
        }
        let ch: Vec<ChainNode> = self.children.iter().map(|c| c.canonical(d)).collect();
        ChainNode { tags, children: best_arrangement(&ch, d) }
    }
}

/// Levels that carry sphero-vertices: `1 ≤ n ≤ k` with `n ≡ r (mod q−1)`.
pub fn admissible_levels(config: &Config, k: usize) -> Vec<usize> {
    let m = config.q() as i64 - 1;
    (1..=k).filter(|&n| (n as i64 - config.r() as i64).rem_euclid(m) == 0).collect()
}

/// Ordered `q`-ary tree shapes with `m` leaves, as lists of internal words
/// (preorder). A single leaf is the empty list.
fn shapes(m: usize, q: usize) -> Vec<Vec<Vec<u8>>> {
    if m == 1 {
        return vec![Vec::new()];
    }
    if m < q || !(m - 1).is_multiple_of(q - 1) {
        return Vec::new();
    }
    let mut out = Vec::new();
    // distribute m leaves over q children
    fn split(left: usize, parts: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for s in 1..=left {
            if (s - 1) % (q - 1) == 0 {
                cur.push(s);
                split(left - s, parts - 1, q, cur, out);
                cur.pop();
            }
        }
    }
    let mut sizes = Vec::new();
    split(m, q, q, &mut Vec::new(), &mut sizes);
    for sz in sizes {
        let mut partial: Vec<Vec<Vec<u8>>> = vec![vec![Vec::new()]];
        for (i, &s) in sz.iter().enumerate() {
            let sub = shapes(s, q);
            partial = partial
                .iter()
                .flat_map(|p| {
                    sub.iter().map(move |t| {
                        let mut v = p.clone();
                        v.extend(t.iter().map(|w| {
                            let mut x = vec![i as u8];
                            x.extend_from_slice(w);
                            x
                        }));
                        v
                    })
                })
                .collect();
        }
        out.extend(partial);
    }
    out
}

/// Leaves of a shape given by its internal words, in preorder.
fn shape_leaves(internal: &[Vec<u8>], q: usize) -> Vec<Vec<u8>> {
    if internal.is_empty() {
        return vec![Vec::new()];
    }
    let set: BTreeSet<&Vec<u8>> = internal.iter().collect();
    let mut out = Vec::new();
    for w in internal {
        for d in 0..q as u8 {
            let mut c = w.clone();
            c.push(d);
            if !set.contains(&c) {
                out.push(c);
            }
        }
    }
    out.sort();
    out
}

struct Search<'a> {
    q: usize,
    k: usize,
    group: &'a PermGroup,
    found: BTreeSet<Vec<ChainNode>>,
}

impl Search<'_> {
    /// `finest[label]` is the ball (summand, word) of the most recent stage.
    fn extend(&mut self, forest: &mut Vec<ChainNode>, finest: &[(usize, Vec<u8>)], stage: usize) {
        if stage == 0 {
            let key: Vec<ChainNode> = forest.iter().map(|t| t.canonical(self.group)).collect();
            self.found.insert(key);
            return;
        }
        let next = (stage - 1) as u8;
        let n = finest.len();
        // transformations: same balls, relabeled by a non-identity permutation
        for sigma in Perm::all(n) {
            if sigma.is_identity() {
                continue;
            }
            let mut f = forest.clone();
            let mut relabeled = vec![(0, Vec::new()); n];
            for (label, (s, w)) in finest.iter().enumerate() {
                let image = sigma.apply(label as u8);
                f[*s].at_mut(w).tags.push((next, image));
                relabeled[image as usize] = (*s, w.clone());
            }
            self.extend(&mut f, &relabeled, stage - 1);
        }
        // merges: refine every ball by a tiling, at least one non-trivially
        let mut per_ball: Vec<Vec<Vec<Vec<u8>>>> = Vec::with_capacity(n);
        for _ in 0..n {
            let mut opts = Vec::new();
            for m in 1..=self.k - n + 1 {
                opts.extend(shapes(m, self.q));
            }
            per_ball.push(opts);
        }
        let mut choice: Vec<Vec<Vec<u8>>> = Vec::with_capacity(n);
        self.choose_refinement(forest, finest, stage, &per_ball, &mut choice);
    }

    fn choose_refinement(
        &mut self,
        forest: &[ChainNode],
        finest: &[(usize, Vec<u8>)],
        stage: usize,
        per_ball: &[Vec<Vec<Vec<u8>>>],
        choice: &mut Vec<Vec<Vec<u8>>>,
    ) {
        let leaves_so_far: usize = choice.iter().map(|s| shape_leaves(s, self.q).len()).sum();
        let remaining = finest.len() - choice.len();
        if leaves_so_far + remaining > self.k {
            return;
        }
        if choice.len() == finest.len() {
            if choice.iter().all(Vec::is_empty) {
                return;
            }
            self.apply_refinement(forest, finest, stage, choice);
            return;
        }
        for shape in &per_ball[choice.len()] {
            choice.push(shape.clone());
            self.choose_refinement(forest, finest, stage, per_ball, choice);
            choice.pop();
        }
    }

    fn apply_refinement(
        &mut self,
        forest: &[ChainNode],
        finest: &[(usize, Vec<u8>)],
        stage: usize,
        choice: &[Vec<Vec<u8>>],
    ) {
        let q = self.q;
        let mut grown = forest.to_vec();
        let mut new_balls: Vec<(usize, Vec<u8>)> = Vec::new();
        for ((s, w), shape) in finest.iter().zip(choice) {
            let mut internal = shape.clone();
            internal.sort_by_key(Vec::len);
            for iw in &internal {
                let node = grown[*s].at_mut(&[w.as_slice(), iw.as_slice()].concat());
                node.children = (0..q).map(|_| ChainNode::leaf(Vec::new())).collect();
            }
            for lw in shape_leaves(shape, q) {
                new_balls.push((*s, [w.as_slice(), lw.as_slice()].concat()));
            }
        }
        let next = (stage - 1) as u8;
        for sigma in Perm::all(new_balls.len()) {
            let mut f = grown.clone();
            let mut labeled = vec![(0, Vec::new()); new_balls.len()];
            for (i, (s, w)) in new_balls.iter().enumerate() {
                let label = sigma.apply(i as u8);
                f[*s].at_mut(w).tags.push((next, label));
                labeled[label as usize] = (*s, w.clone());
            }
            self.extend(&mut f, &labeled, stage - 1);
        }
    }
}

/// Orbit representatives of nondegenerate `d`-chains in the nerve of the
/// level-`≤ k` truncation of `Q`, keyed by their canonical forests.
pub(crate) fn chain_orbits(config: &Config, k: usize, d: usize, cap: usize) -> Result<BTreeSet<Vec<ChainNode>>> {
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    if k > cap {
        return Err(Error::CapExceeded { what: "k", value: k, cap });
    }
    if d > u8::MAX as usize || k > u8::MAX as usize {
        return Err(Error::CapExceeded { what: "d", value: d, cap: u8::MAX as usize });
    }
    let mut search = Search { q: config.q(), k, group: config.group(), found: BTreeSet::new() };
    for n in admissible_levels(config, k) {
        let mut forest: Vec<ChainNode> = (0..n).map(|j| ChainNode::leaf(vec![(d as u8, j as u8)])).collect();
        let finest: Vec<(usize, Vec<u8>)> = (0..n).map(|j| (j, Vec::new())).collect();
        search.extend(&mut forest, &finest, d);
    }
    Ok(search.found)
}

/// Number of `A`-orbits of nondegenerate `d`-simplices in the nerve of
/// `Q(k)`.
pub fn count_equivariant_cells(config: &Config, k: usize, d: usize, cap: usize) -> Result<u64> {
    Ok(chain_orbits(config, k, d, cap)?.len() as u64)
}
