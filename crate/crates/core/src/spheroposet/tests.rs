use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use proptest::prelude::*;

use super::orbits::{chain_orbits, ChainNode};
use super::split::tilings;
use super::*;
use crate::groups::Config;
use crate::homology::reduced_homology;
use crate::perm::{Perm, PermGroup};

fn sym(q: usize) -> Arc<Config> {
    Config::symmetric(q, 1).unwrap().shared()
}

fn triv(q: usize) -> Arc<Config> {
    Config::trivial(q, 1).unwrap().shared()
}

fn vertex(config: &Config, support: &[u32]) -> DecoratedVertex {
    DecoratedVertex::new(config, support.to_vec(), Perm::identity(config.q())).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

#[test]
fn petersen_graph() {
    let c = build_cn(sym(2), 5).unwrap();
    assert_eq!(c.vertices.len(), 10);
    // oracle: every unordered pair of 2-subsets, tested for disjointness
    let pairs: Vec<(u32, u32)> = (1..=5).flat_map(|a| (a + 1..=5).map(move |b| (a, b))).collect();
    let mut disjoint = 0;
    for (i, x) in pairs.iter().enumerate() {
        for y in &pairs[i + 1..] {
            if x.0 != y.0 && x.0 != y.1 && x.1 != y.0 && x.1 != y.1 {
                disjoint += 1;
            }
        }
    }
    assert_eq!(c.edges.len(), disjoint);
    assert_eq!(disjoint, 15);
    let h = reduced_homology(&c.chain_complex(2).unwrap(), 1).unwrap();
    assert_eq!((h.betti(0), h.betti(1)), (0, 6));
    assert_eq!(c.chain_complex(2).unwrap().count(2), 0);
}

#[test]
fn small_cn() {
    let c = build_cn(triv(2), 3).unwrap();
    assert_eq!((c.vertices.len(), c.edges.len()), (6, 0));
    assert!(build_cn(sym(3), 2).unwrap().is_empty());
    assert!(build_cn(sym(2), 0).unwrap().is_empty());
}

#[test]
fn nu_examples() {
    assert_eq!(nu_bound(&sym(2), 5), 0);
    assert_eq!(nu_bound(&sym(2), 8), 1);
    assert_eq!(nu_bound(&sym(3), 8), 0);
    assert_eq!(nu_bound(&sym(2), 2), -1);
    assert_eq!(nu_bound(&sym(3), 1), -2);
}

#[test]
fn morse_examples() {
    let c2 = sym(2);
    assert_eq!(morse_f(&c2, &vertex(&c2, &[1, 5])).unwrap(), 2);
    assert_eq!(morse_f(&c2, &vertex(&c2, &[2, 3])).unwrap(), 1);
    let c3 = sym(3);
    assert_eq!(morse_f(&c3, &vertex(&c3, &[1, 3, 7])).unwrap(), 5);
    assert!(morse_f(&c2, &vertex(&c2, &[3, 4])).is_err());
}

#[test]
fn descending_link_examples() {
    let config = sym(2);
    let c8 = build_cn(config.clone(), 8).unwrap();
    let l = desc_link_cn(&c8, &vertex(&config, &[1, 2])).unwrap();
    assert_eq!(l.k, 6);
    assert!(l.matches_cn().unwrap());
    let l = desc_link_cn(&c8, &vertex(&config, &[2, 5])).unwrap();
    assert_eq!(l.k, 5);
    assert_eq!(l.relabel.keys().copied().collect::<Vec<_>>(), [3, 4, 6, 7, 8]);
    assert!(l.matches_cn().unwrap());
    let t = triv(2);
    let c4 = build_cn(t.clone(), 4).unwrap();
    let l = desc_link_cn(&c4, &vertex(&t, &[1, 2])).unwrap();
    assert_eq!(l.k, 2);
    assert_eq!(l.complex.vertices.len(), 2);
    assert!(l.complex.vertices.iter().all(|v| v.support == [3, 4]));
    assert!(desc_link_cn(&c8, &vertex(&config, &[3, 4])).is_err());
}

#[test]
fn json_roundtrip() {
    let c = build_cn(triv(2), 4).unwrap();
    let text = serde_json::to_string(&c.to_json()).unwrap();
    let back: DecoratedComplexJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back.decode(1).unwrap(), c);
    let mut broken = back.clone();
    broken.edges.pop();
    assert!(broken.decode(1).is_err());
}

#[test]
fn morse_order_is_sound_and_star_contains_base_neighbours() {
    for config in [sym(2), triv(2), sym(3), triv(3)] {
        let q = config.q() as u32;
        for n in config.q()..=7 {
            let c = build_cn(config.clone(), n).unwrap();
            let meets = |v: &DecoratedVertex| v.support.iter().any(|&i| i <= q);
            let disjoint = |a: &DecoratedVertex, b: &DecoratedVertex| a.support.iter().all(|i| !b.support.contains(i));
            for a in c.vertices.iter().filter(|v| meets(v)) {
                let fa = morse_f(&config, a).unwrap();
                let below: BTreeSet<&DecoratedVertex> = c
                    .vertices
                    .iter()
                    .filter(|x| disjoint(a, x))
                    .filter(|x| !meets(x) || morse_f(&config, x).unwrap() < fa)
                    .collect();
                let link = desc_link_cn(&c, a).unwrap();
                assert_eq!(below, link.complex.vertices.iter().collect(), "n={n} a={:?}", a.support);
                assert!(link.matches_cn().unwrap());
            }
            let b = vertex(&config, &(1..=q).collect::<Vec<_>>());
            assert!(c.vertices.iter().filter(|v| !meets(v)).all(|v| disjoint(&b, v)));
        }
    }
}

proptest! {
    #[test]
    fn vertex_count_formula(q in 2usize..4, n in 0usize..9, sym_d in any::<bool>()) {
        let config = if sym_d { sym(q) } else { triv(q) };
        let c = build_cn(config.clone(), n).unwrap();
        prop_assert_eq!(c.vertices.len(), binomial(n, q) * factorial(q) / config.group().order());
        let expected_edges = c.vertices.len() * binomial(n.saturating_sub(q), q) * factorial(q) / config.group().order() / 2;
        prop_assert_eq!(c.edges.len(), expected_edges);
    }
}

/// Orbit of a labeled tiling under D-admissible automorphisms, by BFS over
/// single-vertex moves.
fn orbit(t: &Tree, d: &PermGroup) -> BTreeSet<Tree> {
    let mut seen = BTreeSet::from([t.clone()]);
    let mut queue = VecDeque::from([t.clone()]);
    while let Some(x) = queue.pop_front() {
        for w in x.internal_words() {
            for g in d.generators() {
                let y = x.permute_at(&w, g).unwrap();
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
    }
    seen
}

/// All ordered labeled tilings with leaf set `labels`.
fn all_tilings(labels: &[u8], q: usize) -> Vec<Tree> {
    if labels.len() == 1 {
        return vec![Tree::Leaf(labels[0])];
    }
    let mut out = Vec::new();
    let m = labels.len();
    for code in 0..q.pow(m as u32) {
        let mut parts: Vec<Vec<u8>> = vec![Vec::new(); q];
        let mut c = code;
        for &l in labels {
            parts[c % q].push(l);
            c /= q;
        }
        if parts.iter().any(Vec::is_empty) {
            continue;
        }
        let mut partial: Vec<Vec<Tree>> = vec![Vec::new()];
        for p in &parts {
            let subs = all_tilings(p, q);
            partial = partial
                .iter()
                .flat_map(|v| {
                    subs.iter().map(move |s| {
                        let mut v = v.clone();
                        v.push(s.clone());
                        v
                    })
                })
                .collect();
        }
        out.extend(partial.into_iter().map(Tree::Node));
    }
    out
}

fn oracle_orbit_count(labels: &[u8], d: &PermGroup) -> usize {
    let mut reps = BTreeSet::new();
    for t in all_tilings(labels, d.degree()) {
        reps.insert(orbit(&t, d).into_iter().next().unwrap());
    }
    reps.len()
}

#[test]
fn canonical_form_is_orbit_minimum() {
    for d in [PermGroup::symmetric(2), PermGroup::trivial(2), PermGroup::symmetric(3)] {
        let labels: Vec<u8> = if d.degree() == 2 { vec![1, 2, 3, 4] } else { vec![1, 2, 3, 4, 5] };
        for t in all_tilings(&labels, d.degree()) {
            let o = orbit(&t, &d);
            assert_eq!(&t.canonical(&d), o.iter().next().unwrap());
        }
    }
}

fn oracle_record_count(n: usize, d: &PermGroup) -> usize {
    // set partitions by brute force over block assignments
    let mut total = 0;
    let mut seen = BTreeSet::new();
    for code in 0..n.pow(n as u32) {
        let mut blocks: Vec<Vec<u8>> = vec![Vec::new(); n];
        let mut c = code;
        for l in 1..=n as u8 {
            blocks[c % n].push(l);
            c /= n;
        }
        let mut blocks: Vec<Vec<u8>> = blocks.into_iter().filter(|b| !b.is_empty()).collect();
        blocks.sort();
        if blocks.len() == n || !seen.insert(blocks.clone()) {
            continue;
        }
        total += blocks.iter().map(|b| oracle_orbit_count(b, d)).product::<usize>();
    }
    total
}

#[test]
fn split_record_counts_match_orbit_oracle() {
    for (config, nmax) in [(sym(2), 5), (triv(2), 4), (sym(3), 5), (triv(3), 5)] {
        for n in 1..=nmax {
            let records = split_records(&config, n, 6).unwrap();
            assert_eq!(records.len(), oracle_record_count(n, config.group()), "q={} n={n}", config.q());
        }
    }
}

#[test]
fn desc_link_examples() {
    let link = enumerate_desc_link(&sym(2), 3, 6).unwrap();
    assert_eq!(link.len(), 6);
    assert_eq!(link.records.iter().filter(|r| r.k() == 2).count(), 3);
    assert_eq!(link.poset.arrow_count(), 3);
    let comps = link.poset.components();
    assert_eq!(comps.len(), 3);
    for comp in comps {
        assert!(comp.reduced_homology(2).unwrap().vanishes());
    }
    let t = enumerate_desc_link(&triv(2), 3, 6).unwrap();
    assert_eq!((t.len(), t.poset.arrow_count()), (18, 12));
    assert!(enumerate_desc_link(&sym(2), 1, 6).unwrap().is_empty());
    assert!(matches!(enumerate_desc_link(&sym(2), 7, 6), Err(crate::Error::CapExceeded { .. })));
}

/// Arrow oracle: every block of the finer record is the full subtree below
/// some vertex of the coarser record.
fn oracle_arrow(fine: &SplitRecord, coarse: &SplitRecord, d: &PermGroup) -> bool {
    if fine.k() <= coarse.k() {
        return false;
    }
    fine.blocks().iter().all(|b| {
        coarse.blocks().iter().any(|t| {
            let mut words = t.internal_words();
            words.extend(leaf_words(t));
            words.iter().any(|w| t.at(w).unwrap().canonical(d) == *b)
        })
    })
}

fn leaf_words(t: &Tree) -> Vec<Vec<u8>> {
    t.cuttings().into_iter().max_by_key(Vec::len).unwrap()
}

#[test]
fn desc_link_arrows_match_oracle() {
    for config in [sym(2), triv(2), sym(3)] {
        let n = if config.q() == 2 { 4 } else { 5 };
        let link = enumerate_desc_link(&config, n, 6).unwrap();
        for a in &link.records {
            for b in &link.records {
                assert_eq!(
                    link.poset.has_arrow(&a.id(), &b.id()),
                    oracle_arrow(a, b, config.group()),
                    "{a} -> {b}"
                );
            }
        }
    }
}

#[test]
fn star_link_is_barycentric_cn() {
    let (star, inclusion) = enumerate_desc_link_star(&sym(2), 3, 6).unwrap();
    assert_eq!((star.len(), star.poset.arrow_count()), (3, 0));
    let full = enumerate_desc_link(&sym(2), 3, 6).unwrap();
    for (i, &j) in inclusion.iter().enumerate() {
        assert_eq!(star.records[i], full.records[j]);
    }
    let (star4, _) = enumerate_desc_link_star(&sym(2), 4, 6).unwrap();
    assert_eq!(star4.poset.reduced_homology(2).unwrap().betti(0), 2);
    assert!(enumerate_desc_link_star(&sym(3), 2, 6).unwrap().0.is_empty());
    for config in [sym(2), triv(2), sym(3), triv(3)] {
        for n in 1..=5 {
            let (star, _) = enumerate_desc_link_star(&config, n, 6).unwrap();
            let cn = build_cn(config.clone(), n).unwrap();
            let faces = cn.face_poset().unwrap();
            assert_eq!(star.len(), faces.len());
            let name: BTreeMap<String, String> = star
                .records
                .iter()
                .map(|r| {
                    let face = r.cn_face(&config).unwrap();
                    let ids: Vec<String> = face
                        .iter()
                        .map(|v| cn.vertex_id(cn.vertices.iter().position(|x| x == v).unwrap()))
                        .collect();
                    (r.id(), ids.join(" "))
                })
                .collect();
            let mapped: BTreeSet<(String, String)> = star
                .poset
                .arrows()
                .map(|(a, b)| (name[a].clone(), name[b].clone()))
                .collect();
            let expected: BTreeSet<(String, String)> =
                faces.arrows().map(|(a, b)| (a.to_string(), b.to_string())).collect();
            assert_eq!(mapped, expected, "q={} n={n}", config.q());
        }
    }
}

#[test]
fn star_and_full_links_agree_in_homology() {
    for config in [sym(2), triv(2)] {
        for n in 2..=4 {
            let full = enumerate_desc_link(&config, n, 6).unwrap();
            let (star, _) = enumerate_desc_link_star(&config, n, 6).unwrap();
            assert_eq!(
                full.poset.reduced_homology(n).unwrap(),
                star.poset.reduced_homology(n).unwrap()
            );
        }
    }
}

fn record(blocks: Vec<Tree>) -> SplitRecord {
    SplitRecord::new(blocks, &PermGroup::symmetric(2)).unwrap()
}

fn node(a: Tree, b: Tree) -> Tree {
    Tree::Node(vec![a, b])
}

#[test]
fn partition_poset_examples() {
    use Tree::Leaf;
    // one summand split as {0, 10, 11}: only the depth-one cut keeps a
    // non-trivially split ball
    let nu = record(vec![node(Leaf(1), node(Leaf(2), Leaf(3)))]);
    let p = partition_poset(&nu, 2).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.f, [0]);
    assert!(p.check_cone().all());
    assert!(p.poset.reduced_homology(2).unwrap().vanishes());

    let nu = record(vec![node(Leaf(1), node(Leaf(2), Leaf(3))), node(Leaf(4), Leaf(5))]);
    let p = partition_poset(&nu, 2).unwrap();
    assert!(p.check_cone().all());
    let tip = &p.elements[p.p_nu];
    assert_eq!(partition_id(tip), "1:0 1:1 2:0 2:1");
    for (i, e) in p.elements.iter().enumerate() {
        let image = &p.elements[p.f[i]];
        assert!(image.iter().all(|a| a.depth() == 1 || a.word.is_empty()));
        assert!(refines(e, image));
    }
    assert!(p.poset.reduced_homology(4).unwrap().vanishes());

    let ve = record(vec![node(Leaf(1), Leaf(2)), Leaf(3)]);
    assert!(partition_poset(&ve, 2).is_err());
}

#[test]
fn partition_posets_are_cones() {
    for n in 3..=5 {
        for nu in split_records(&sym(2), n, 6).unwrap() {
            if nu.is_very_elementary() {
                continue;
            }
            let p = partition_poset(&nu, 2).unwrap();
            assert!(p.check_cone().all(), "{nu}");
            assert!(p.poset.reduced_homology(n).unwrap().vanishes(), "{nu}");
        }
    }
}

#[test]
fn orbit_counts_of_objects() {
    for k in 1..=5 {
        assert_eq!(count_equivariant_cells(&sym(2), k, 0, 5).unwrap(), k as u64);
        assert_eq!(count_equivariant_cells(&triv(2), k, 0, 5).unwrap(), k as u64);
        assert_eq!(count_equivariant_cells(&sym(3), k, 0, 5).unwrap(), k.div_ceil(2) as u64);
    }
    let r2 = Config::symmetric(3, 2).unwrap();
    assert_eq!(admissible_levels(&r2, 5), [2, 4]);
    assert!(matches!(count_equivariant_cells(&sym(2), 4, 0, 3), Err(crate::Error::CapExceeded { .. })));
}

#[test]
fn orbit_counts_of_chains() {
    for config in [sym(2), triv(2), sym(3)] {
        for d in 1..4 {
            assert_eq!(count_equivariant_cells(&config, 1, d, 3).unwrap(), 0);
        }
    }
    assert_eq!(count_equivariant_cells(&sym(2), 2, 1, 3).unwrap(), 2);
    assert_eq!(count_equivariant_cells(&triv(2), 2, 1, 3).unwrap(), 3);
    assert_eq!(count_equivariant_cells(&sym(2), 2, 2, 3).unwrap(), 2);
    assert_eq!(count_equivariant_cells(&sym(2), 2, 3, 3).unwrap(), 2);
}

/// One-step chains: non-identity permutations of each level, plus merges
/// counted as ordered families of tiling orbits.
fn oracle_edge_orbits(config: &Config, k: usize) -> u64 {
    let levels = admissible_levels(config, k);
    let mut total = 0u64;
    for &n in &levels {
        total += factorial(n) as u64 - 1;
        for &m in levels.iter().filter(|&&m| m > n) {
            for code in 0..n.pow(m as u32) {
                let mut blocks: Vec<Vec<u8>> = vec![Vec::new(); n];
                let mut c = code;
                for l in 1..=m as u8 {
                    blocks[c % n].push(l);
                    c /= n;
                }
                if blocks.iter().any(Vec::is_empty) {
                    continue;
                }
                total += blocks.iter().map(|b| oracle_orbit_count(b, config.group()) as u64).product::<u64>();
            }
        }
    }
    total
}

#[test]
fn edge_orbits_match_oracle() {
    for config in [sym(2), triv(2), sym(3), triv(3)] {
        for k in 1..=3 {
            assert_eq!(
                count_equivariant_cells(&config, k, 1, 3).unwrap(),
                oracle_edge_orbits(&config, k),
                "q={} k={k}",
                config.q()
            );
        }
    }
}

fn permute_chain(t: &ChainNode, word: &[u8], p: &Perm) -> ChainNode {
    let mut out = t.clone();
    match word.split_first() {
        None => {
            for (i, c) in t.children.iter().enumerate() {
                out.children[p.apply(i as u8) as usize] = c.clone();
            }
        }
        Some((&d, rest)) => out.children[d as usize] = permute_chain(&t.children[d as usize], rest, p),
    }
    out
}

fn chain_internal(t: &ChainNode, w: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    if !t.children.is_empty() {
        out.push(w.clone());
        for (i, c) in t.children.iter().enumerate() {
            w.push(i as u8);
            chain_internal(c, w, out);
            w.pop();
        }
    }
}

#[test]
fn chain_canonical_forms_are_orbit_minima() {
    let d = PermGroup::symmetric(2);
    for key in chain_orbits(&sym(2), 3, 2, 3).unwrap() {
        for tree in &key {
            let mut seen = BTreeSet::from([tree.clone()]);
            let mut queue = VecDeque::from([tree.clone()]);
            while let Some(x) = queue.pop_front() {
                let mut words = Vec::new();
                chain_internal(&x, &mut Vec::new(), &mut words);
                for w in words {
                    let y = permute_chain(&x, &w, &d.generators()[0]);
                    if seen.insert(y.clone()) {
                        queue.push_back(y);
                    }
                }
            }
            let min = seen.into_iter().next().unwrap();
            assert_eq!(&min.canonical(&d), tree);
            assert_eq!(&min, tree);
        }
    }
}

#[test]
fn tilings_memo_agrees_with_oracle() {
    let d = PermGroup::trivial(3);
    let mut memo = Default::default();
    assert_eq!(tilings(&[1, 2, 3, 4, 5], &d, &mut memo).len(), oracle_orbit_count(&[1, 2, 3, 4, 5], &d));
}

#[test]
fn fixed_sets_are_upward_closed() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for config in [sym(2), triv(2)] {
        for level in [2, 3] {
            let phi = crate::groups::random::random_similarity(&mut rng, config.clone(), level, 2).unwrap();
            let trunc = q_truncation_below(&phi).unwrap();
            assert!(trunc.arrows.iter().any(|&(a, _)| a == 0));
            let phi_inv = phi.inverse();
            for nu in depth_bounded_strict(&config, level, 2).unwrap() {
                let gamma = phi.compose(&nu).unwrap().compose(&phi_inv).unwrap();
                let fixed = trunc.fixed_by(&gamma).unwrap();
                assert!(fixed[0]);
                assert!(trunc.is_upward_closed(&fixed));
            }
        }
    }
}
