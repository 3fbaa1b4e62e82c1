//! Seeded random tree-pair elements for tests and the CLI.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::address::Address;
use super::element::{LeafMap, LocalSimilarity};
use super::isometry::LabeledIsometry;
use super::Config;
use crate::error::{Error, Result};

/// Random prefix code on `summands` roots obtained by `expansions` leaf
/// subdivisions, never going deeper than `max_depth`.
pub fn random_partition<R: Rng>(
    rng: &mut R,
    q: usize,
    summands: usize,
    expansions: usize,
    max_depth: usize,
) -> Vec<Address> {
    let mut leaves: Vec<Address> = (0..summands).map(Address::root).collect();
    for _ in 0..expansions {
        let open: Vec<usize> = (0..leaves.len()).filter(|&i| leaves[i].depth() < max_depth).collect();
        let Some(&i) = open.choose(rng) else { break };
        let leaf = leaves.swap_remove(i);
        leaves.extend((0..q as u8).map(|d| leaf.child(d)));
    }
    leaves.sort();
    leaves
}

/// Random finitely supported isometry with labels at depth below `max_depth`.
pub fn random_isometry<R: Rng>(rng: &mut R, config: &Config, max_depth: usize, labels: usize) -> LabeledIsometry {
    let q = config.q() as u8;
    let elems = config.group().elements();
    LabeledIsometry::from_labels((0..labels).map(|_| {
        let depth = rng.gen_range(0..max_depth.max(1));
        let word: Vec<u8> = (0..depth).map(|_| rng.gen_range(0..q)).collect();
        (word, elems.choose(rng).expect("nonempty").clone())
    }))
}

/// Random local similarity `nB → rB` with tree depth at most `max_depth`.
pub fn random_similarity<R: Rng>(
    rng: &mut R,
    config: Arc<Config>,
    n: usize,
    max_depth: usize,
) -> Result<LocalSimilarity> {
    let q = config.q();
    let r = config.r();
    let capacity = |s: usize| s * q.pow(max_depth as u32);
    // leaf counts reachable from both sides: n + a(q-1) = r + b(q-1)
    if n % (q - 1) != r % (q - 1) {
        return Err(Error::Precondition(format!(
            "level {n} is not congruent to {r} modulo {}",
            q - 1
        )));
    }
    let mut choices = Vec::new();
    let mut leaves = n.max(r);
    while leaves <= capacity(n.min(r)) && choices.len() < 6 {
        choices.push(leaves);
        leaves += q - 1;
    }
    let &target = choices.choose(rng).ok_or_else(|| Error::Precondition("depth too small".into()))?;
    let dom = random_partition(rng, q, n, (target - n) / (q - 1), max_depth);
    let cod = random_partition(rng, q, r, (target - r) / (q - 1), max_depth);
    if dom.len() != cod.len() {
        return random_similarity(rng, config, n, max_depth);
    }
    let mut targets = cod;
    targets.shuffle(rng);
    let label_depth = max_depth.saturating_sub(1).max(1);
    let leaves = dom
        .into_iter()
        .zip(targets)
        .map(|(d, c)| {
            let k = rng.gen_range(0..=2);
            LeafMap::new(d, c, random_isometry(rng, &config, label_depth, k))
        })
        .collect();
    LocalSimilarity::new(config, n, r, leaves)
}

pub fn random_element<R: Rng>(rng: &mut R, config: Arc<Config>, max_depth: usize) -> Result<LocalSimilarity> {
    let r = config.r();
    random_similarity(rng, config, r, max_depth)
}
