use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A vertex of the forest `nT_q`: a summand index (0-based internally) and
/// a word of digits below that summand's root. The empty word is the root
/// ball of the summand.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    pub summand: usize,
    pub word: Vec<u8>,
}

impl Address {
    pub fn new(summand: usize, word: Vec<u8>) -> Self {
        Address { summand, word }
    }

    pub fn root(summand: usize) -> Self {
        Address { summand, word: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.word.len()
    }

    pub fn child(&self, digit: u8) -> Self {
        let mut word = self.word.clone();
        word.push(digit);
        Address { summand: self.summand, word }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.word.is_empty() {
            return None;
        }
        Some(Address {
            summand: self.summand,
            word: self.word[..self.word.len() - 1].to_vec(),
        })
    }

    /// `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Address) -> bool {
        self.summand == other.summand && other.word.starts_with(&self.word)
    }

    pub fn concat(&self, tail: &[u8]) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(tail);
        Address { summand: self.summand, word }
    }

    /// Parses `"s:word"` with a 1-based summand index.
    pub fn parse(s: &str, q: usize) -> Result<Self> {
        let (summand, word) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidAddress(s.to_string()))?;
        let summand: usize = summand
            .parse()
            .map_err(|_| Error::InvalidAddress(s.to_string()))?;
        if summand == 0 {
            return Err(Error::InvalidAddress(s.to_string()));
        }
        Ok(Address {
            summand: summand - 1,
            word: parse_word(word, q)?,
        })
    }
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.summand + 1, format_word(&self.word))
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub fn parse_word(s: &str, q: usize) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c.to_digit(10) {
            Some(d) if (d as usize) < q => Ok(d as u8),
            _ => Err(Error::InvalidAddress(format!("digit `{c}` out of range for q={q}"))),
        })
        .collect()
}

pub fn format_word(word: &[u8]) -> String {
    word.iter().map(|&d| char::from(b'0' + d)).collect()
}

/// Length of the common initial segment of two ends, or `Disjoint` when they
/// live in different summands (visual distance ∞).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommonPrefix {
    Length(usize),
    Disjoint,
}

impl CommonPrefix {
    pub fn visual_distance(self) -> f64 {
        match self {
            CommonPrefix::Length(n) => (-(n as f64)).exp(),
            CommonPrefix::Disjoint => f64::INFINITY,
        }
    }
}

pub fn common_prefix_length(x: &Address, y: &Address) -> CommonPrefix {
    if x.summand != y.summand {
        return CommonPrefix::Disjoint;
    }
    let n = x
        .word
        .iter()
        .zip(&y.word)
        .take_while(|(a, b)| a == b)
        .count();
    CommonPrefix::Length(n)
}

/// A partition of `nB_q` into finitely many balls, held as a complete prefix
/// code in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LeafPartition {
    q: usize,
    summands: usize,
    leaves: Vec<Address>,
}

impl LeafPartition {
    pub fn new(q: usize, summands: usize, mut leaves: Vec<Address>) -> Result<Self> {
        leaves.sort();
        check_complete_prefix_code(q, summands, &leaves)?;
        Ok(LeafPartition { q, summands, leaves })
    }

    pub fn trivial(q: usize, summands: usize) -> Self {
        LeafPartition {
            q,
            summands,
            leaves: (0..summands).map(Address::root).collect(),
        }
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn summands(&self) -> usize {
        self.summands
    }

    pub fn leaves(&self) -> &[Address] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.leaves.iter().map(Address::depth).max().unwrap_or(0)
    }

    /// The leaf containing `x`, if `x` lies at or below some leaf.
    pub fn leaf_containing(&self, x: &Address) -> Option<&Address> {
        let idx = match self.leaves.binary_search(x) {
            Ok(i) => return Some(&self.leaves[i]),
            Err(i) => i,
        };
        // a prefix of x sorts before x; the closest one is the candidate
        idx.checked_sub(1)
            .map(|i| &self.leaves[i])
            .filter(|l| l.is_prefix_of(x))
    }

    /// Every ball of `self` lies inside some ball of `coarser`.
    pub fn refines(&self, coarser: &LeafPartition) -> bool {
        self.summands == coarser.summands
            && self.leaves.iter().all(|l| coarser.leaf_containing(l).is_some())
    }
}

fn check_complete_prefix_code(q: usize, summands: usize, leaves: &[Address]) -> Result<()> {
    for l in leaves {
        if l.summand >= summands {
            return Err(Error::InvalidPartition(format!(
                "leaf {l} outside {summands} summands"
            )));
        }
        if l.word.iter().any(|&d| d as usize >= q) {
            return Err(Error::InvalidPartition(format!("leaf {l} has digit ≥ q={q}")));
        }
    }
    // Sorted order visits a complete prefix code as a depth-first traversal:
    // simulate it with an explicit stack of "next expected vertex".
    let mut expected: Vec<Address> = (0..summands).rev().map(Address::root).collect();
    for l in leaves {
        loop {
            let Some(top) = expected.pop() else {
                return Err(Error::InvalidPartition(format!("extra leaf {l}")));
            };
            if top == *l {
                break;
            }
            if top.is_prefix_of(l) {
                for d in (0..q as u8).rev() {
                    expected.push(top.child(d));
                }
                continue;
            }
            return Err(Error::InvalidPartition(format!(
                "ball {top} not covered (next leaf {l})"
            )));
        }
    }
    if let Some(top) = expected.pop() {
        return Err(Error::InvalidPartition(format!("ball {top} not covered")));
    }
    Ok(())
}

/// Coarsest common refinement of two ball partitions of the same `nB`.
pub fn common_refinement(p1: &LeafPartition, p2: &LeafPartition) -> Result<LeafPartition> {
    if p1.summands != p2.summands {
        return Err(Error::SummandMismatch {
            left: p1.summands,
            right: p2.summands,
        });
    }
    if p1.q != p2.q {
        return Err(Error::ConfigMismatch);
    }
    let mut out: BTreeSet<Address> = BTreeSet::new();
    for (a, b) in [(p1, p2), (p2, p1)] {
        for l in &a.leaves {
            if b.leaf_containing(l).is_some() {
                out.insert(l.clone());
            }
        }
    }
    Ok(LeafPartition {
        q: p1.q,
        summands: p1.summands,
        leaves: out.into_iter().collect(),
    })
}
