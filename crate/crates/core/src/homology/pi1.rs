//! Bounded search for a trivial edge-path group.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use serde::Serialize;

use super::complex::ChainComplex;
use super::reduce::reduced_homology;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Pi1Report {
    Trivial,
    /// Witnessed by a nonzero first homology group.
    Nontrivial {
        betti1: usize,
        #[serde(serialize_with = "as_strings")]
        torsion: Vec<BigInt>,
    },
    /// The presentation did not collapse within the budget.
    Unknown { generators: usize, relators: usize },
}

fn as_strings<S: serde::Serializer>(t: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(t.iter().map(|x| x.to_string()))
}

type Word = Vec<i32>;

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

fn free_reduce(w: &mut Word) {
    let mut out: Word = Vec::with_capacity(w.len());
    for &x in w.iter() {
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    // cyclic reduction
    let mut start = 0;
    let mut end = out.len();
    while end - start >= 2 && out[start] == -out[end - 1] {
        start += 1;
        end -= 1;
    }
    *w = out[start..end].to_vec();
}

fn invert(w: &[i32]) -> Word {
    w.iter().rev().map(|&x| -x).collect()
}

/// Edge-path presentation from a spanning tree of the 1-skeleton and the
/// triangles, then Tietze eliminations while `budget` steps remain.
pub fn pi1_report(c: &ChainComplex, budget: usize) -> Result<Pi1Report> {
    let vertices = c.basis(0);
    if vertices.is_empty() {
        return Err(Error::Disconnected);
    }
    let vindex: HashMap<u32, usize> = vertices.iter().enumerate().map(|(i, v)| (v[0], i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    let mut generator: HashMap<(u32, u32), i32> = HashMap::new();
    let mut gens = 0i32;
    for e in c.basis(1) {
        let (a, b) = (find(&mut parent, vindex[&e[0]]), find(&mut parent, vindex[&e[1]]));
        if a == b {
            gens += 1;
            generator.insert((e[0], e[1]), gens);
        } else {
            parent[a] = b;
        }
    }
    let root = find(&mut parent, 0);
    if (0..vertices.len()).any(|v| find(&mut parent, v) != root) {
        return Err(Error::Disconnected);
    }
    let h1 = reduced_homology(c, 1)?;
    let first = &h1.degrees[1];
    if !first.is_zero() {
        return Ok(Pi1Report::Nontrivial { betti1: first.betti, torsion: first.torsion.clone() });
    }
    let edge = |a: u32, b: u32| generator.get(&(a, b)).copied();
    let mut relators: Vec<Word> = c
        .basis(2)
        .iter()
        .map(|t| {
            let mut w: Word = Vec::with_capacity(3);
            w.extend(edge(t[0], t[1]));
            w.extend(edge(t[1], t[2]));
            w.extend(edge(t[0], t[2]).map(|g| -g));
            free_reduce(&mut w);
            w
        })
        .filter(|w| !w.is_empty())
        .collect();
    let mut remaining: usize = gens as usize;
    let length_cap = 64 * (relators.len() + 16);
    for _ in 0..budget {
        if remaining == 0 {
            return Ok(Pi1Report::Trivial);
        }
        relators.retain(|w| !w.is_empty());
        // shortest relator in which some generator occurs exactly once
        let mut best: Option<(usize, usize, i32)> = None;
        for (ri, r) in relators.iter().enumerate() {
            if best.is_some_and(|(_, len, _)| len <= r.len()) {
                continue;
            }
            let mut occurrences: BTreeMap<i32, usize> = BTreeMap::new();
            for &x in r {
                *occurrences.entry(x.abs()).or_default() += 1;
            }
            if let Some((&g, _)) = occurrences.iter().find(|(_, &n)| n == 1) {
                best = Some((ri, r.len(), g));
            }
        }
        let Some((ri, _, g)) = best else { break };
        let r = relators.swap_remove(ri);
        let pos = r.iter().position(|&x| x.abs() == g).expect("occurs once");
        // r = u g^e v  ⇒  g^e = u^{-1} v^{-1}
        let (u, v) = (&r[..pos], &r[pos + 1..]);
        let mut image: Word = invert(u);
        image.extend(invert(v));
        if r[pos] < 0 {
            image = invert(&image);
        }
        let image_inv = invert(&image);
        let mut total = 0usize;
        for w in &mut relators {
            if !w.iter().any(|x| x.abs() == g) {
                total += w.len();
                continue;
            }
            let mut out = Vec::with_capacity(w.len() + image.len());
            for &x in w.iter() {
                if x == g {
                    out.extend_from_slice(&image);
                } else if x == -g {
                    out.extend_from_slice(&image_inv);
                } else {
                    out.push(x);
                }
            }
            free_reduce(&mut out);
            total += out.len();
            *w = out;
        }
        remaining -= 1;
        if total > length_cap {
            break;
        }
    }
    if remaining == 0 {
        return Ok(Pi1Report::Trivial);
    }
    relators.retain(|w| !w.is_empty());
    Ok(Pi1Report::Unknown { generators: remaining, relators: relators.len() })
}
