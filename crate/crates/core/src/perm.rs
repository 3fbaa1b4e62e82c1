//! Permutations of `{0, .., q-1}` and the finite groups they generate.
//!
//! Internally everything is 0-based. The textual form is the 1-based image
//! word, so `"21"` is the transposition of two letters.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// A permutation stored as its image list: `self.0[i]` is the image of `i`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm(Vec<u8>);

impl Perm {
    pub fn identity(q: usize) -> Self {
        Perm((0..q as u8).collect())
    }

    pub fn from_images(images: Vec<u8>) -> Result<Self> {
        let q = images.len();
        let mut seen = vec![false; q];
        for &x in &images {
            let x = x as usize;
            if x >= q || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Parses a 1-based image word such as `"231"`.
    pub fn parse_word(word: &str) -> Result<Self> {
        let images = word
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d >= 1 => Ok((d - 1) as u8),
                _ => Err(Error::InvalidPermutation(word.to_string())),
            })
            .collect::<Result<Vec<u8>>>()?;
        if images.is_empty() {
            return Err(Error::InvalidPermutation(word.to_string()));
        }
        Perm::from_images(images)
    }

    pub fn to_word(&self) -> String {
        self.0.iter().map(|&x| char::from(b'1' + x)).collect()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn apply(&self, i: u8) -> u8 {
        self.0[i as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Perm(inv)
    }

    /// All permutations of `q` letters in lexicographic order of image words.
    pub fn all(q: usize) -> Vec<Perm> {
        fn rec(prefix: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Perm>) {
            if prefix.len() == used.len() {
                out.push(Perm(prefix.clone()));
                return;
            }
            for x in 0..used.len() {
                if !used[x] {
                    used[x] = true;
                    prefix.push(x as u8);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[x] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(q), &mut vec![false; q], &mut out);
        out
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.to_word())
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_word())
    }
}

/// A subgroup of `Sym(q)` held as its full (sorted) element list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PermGroup {
    /// Closes `generators` under composition. Inverses come for free in a
    /// finite group.
    pub fn generate(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::InvalidPermutation(format!(
                    "generator {} has degree {}, expected {degree}",
                    g.to_word(),
                    g.degree()
                )));
            }
        }
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        let id = Perm::identity(degree);
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = g.compose(&x);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        let mut generators = generators;
        generators.retain(|g| !g.is_identity());
        generators.sort();
        generators.dedup();
        Ok(PermGroup {
            degree,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup::generate(degree, Vec::new()).expect("identity is valid")
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            let mut swap: Vec<u8> = (0..degree as u8).collect();
            swap.swap(0, 1);
            gens.push(Perm(swap));
            let cycle: Vec<u8> = (0..degree as u8).map(|i| (i + 1) % degree as u8).collect();
            gens.push(Perm(cycle));
        }
        PermGroup::generate(degree, gens).expect("standard generators are valid")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Lexicographically minimal element of the left coset `σD`.
    pub fn coset_representative(&self, sigma: &Perm) -> Perm {
        self.elements
            .iter()
            .map(|d| sigma.compose(d))
            .min()
            .expect("group is nonempty")
    }

    /// Minimal representatives of `Sym(q)/D`, sorted.
    pub fn left_coset_representatives(&self) -> Vec<Perm> {
        let reps: BTreeSet<Perm> = Perm::all(self.degree)
            .iter()
            .map(|s| self.coset_representative(s))
            .collect();
        reps.into_iter().collect()
    }
}
