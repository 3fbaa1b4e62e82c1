use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genposet::GenPoset;
use crate::groups::Config;
use crate::homology::{flag_complex, ChainComplex};
use crate::perm::Perm;

/// Supports are bitmasks over `{1..n}`, so `n` is bounded by the mask width.
pub const MAX_GROUND_SET: usize = 64;

/// A `q`-subset of `{1..n}` together with a coset of `D` in `Sym(q)`,
/// stored as its minimal representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedVertex {
    pub support: Vec<u32>,
    pub decoration: Perm,
}

impl DecoratedVertex {
    pub fn new(config: &Config, mut support: Vec<u32>, decoration: Perm) -> Result<Self> {
        support.sort_unstable();
        support.dedup();
        if support.len() != config.q() || support.first() == Some(&0) {
            return Err(Error::Precondition(format!(
                "support {support:?} is not a {}-subset of the positive integers",
                config.q()
            )));
        }
        if decoration.degree() != config.q() {
            return Err(Error::InvalidPermutation(format!("decoration {decoration} has the wrong degree")));
        }
        let decoration = config.group().coset_representative(&decoration);
        Ok(DecoratedVertex { support, decoration })
    }

    fn mask(&self) -> u64 {
        self.support.iter().fold(0, |m, &i| m | 1 << (i - 1))
    }

    pub fn least(&self) -> u32 {
        self.support[0]
    }
}

/// The flag complex `C_n`: decorated `q`-subsets, joined when their supports
/// are disjoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecoratedComplex {
    pub n: usize,
    pub config: Arc<Config>,
    pub vertices: Vec<DecoratedVertex>,
    pub edges: Vec<(u32, u32)>,
}

fn combinations(n: usize, q: usize) -> Vec<Vec<u32>> {
    fn rec(start: u32, n: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if (n - i + 1) as usize >= left {
                cur.push(i);
                rec(i + 1, n, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(1, n as u32, q, &mut Vec::new(), &mut out);
    out
}

pub fn build_cn(config: Arc<Config>, n: usize) -> Result<DecoratedComplex> {
    if n > MAX_GROUND_SET {
        return Err(Error::CapExceeded { what: "n", value: n, cap: MAX_GROUND_SET });
    }
    let cosets = config.group().left_coset_representatives();
    let vertices: Vec<DecoratedVertex> = combinations(n, config.q())
        .into_iter()
        .flat_map(|support| {
            cosets
                .iter()
                .map(move |d| DecoratedVertex { support: support.clone(), decoration: d.clone() })
        })
        .collect();
    Ok(DecoratedComplex::from_vertices(config, n, vertices))
}

/// `⌊(n−q)/(2q−1)⌋ − 1`, with floor division so small `n` go below −1.
pub fn nu_bound(config: &Config, n: usize) -> i64 {
    let q = config.q() as i64;
    (n as i64 - q).div_euclid(2 * q - 1) - 1
}

/// The `q`-digit binary number whose `i`-th digit (most significant first)
/// records whether `i ∈ a`.
pub fn morse_f(config: &Config, a: &DecoratedVertex) -> Result<u64> {
    let q = config.q() as u32;
    if !a.support.iter().any(|&i| i <= q) {
        return Err(Error::Precondition(format!(
            "vertex {:?} is disjoint from the base vertex and has no Morse value",
            a.support
        )));
    }
    Ok((1..=q).fold(0, |acc, i| acc << 1 | u64::from(a.support.contains(&i))))
}

/// Descending link of a vertex meeting the base vertex, with the
/// order-preserving relabeling of its ground set onto `{1..k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnLink {
    pub complex: DecoratedComplex,
    pub relabel: BTreeMap<u32, u32>,
    pub k: usize,
}

impl CnLink {
    /// The relabeled link, as a complex on `{1..k}`.
    pub fn relabeled(&self) -> DecoratedComplex {
        let vertices = self
            .complex
            .vertices
            .iter()
            .map(|v| DecoratedVertex {
                support: v.support.iter().map(|i| self.relabel[i]).collect(),
                decoration: v.decoration.clone(),
            })
            .collect();
        DecoratedComplex::from_vertices(self.complex.config.clone(), self.k, vertices)
    }

    /// Structural equality of the relabeled link with `C_k`.
    pub fn matches_cn(&self) -> Result<bool> {
        Ok(self.relabeled() == build_cn(self.complex.config.clone(), self.k)?)
    }
}

pub fn desc_link_cn(c: &DecoratedComplex, a: &DecoratedVertex) -> Result<CnLink> {
    morse_f(&c.config, a)?;
    if !c.vertices.contains(a) {
        return Err(Error::Precondition(format!("{:?} is not a vertex of C_{}", a.support, c.n)));
    }
    let am = a.mask();
    let vertices: Vec<DecoratedVertex> = c
        .vertices
        .iter()
        .filter(|x| x.mask() & am == 0 && x.least() > a.least())
        .cloned()
        .collect();
    let ground: Vec<u32> = (a.least() + 1..=c.n as u32).filter(|i| !a.support.contains(i)).collect();
    let k = c.n - c.config.q() - (a.least() as usize - 1);
    debug_assert_eq!(ground.len(), k);
    let relabel = ground.iter().enumerate().map(|(j, &i)| (i, j as u32 + 1)).collect();
    Ok(CnLink { complex: DecoratedComplex::from_vertices(c.config.clone(), c.n, vertices), relabel, k })
}

impl DecoratedComplex {
    /// Sorts the vertices and adds every disjoint-support edge.
    pub fn from_vertices(config: Arc<Config>, n: usize, mut vertices: Vec<DecoratedVertex>) -> Self {
        vertices.sort();
        let masks: Vec<u64> = vertices.iter().map(DecoratedVertex::mask).collect();
        let mut edges = Vec::new();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                if masks[i] & masks[j] == 0 {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        DecoratedComplex { n, config, vertices, edges }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// The flag complex through dimension `max_dim`.
    pub fn chain_complex(&self, max_dim: usize) -> Result<ChainComplex> {
        flag_complex(self.vertices.len(), &self.edges, max_dim)
    }

    pub fn vertex_id(&self, i: usize) -> String {
        let v = &self.vertices[i];
        let s: Vec<String> = v.support.iter().map(u32::to_string).collect();
        format!("{{{}}}/{}", s.join(","), v.decoration)
    }

    /// Face poset of the flag complex; its order complex is the barycentric
    /// subdivision. Objects are named by their sorted vertex ids.
    pub fn face_poset(&self) -> Result<GenPoset> {
        if self.is_empty() {
            return Ok(GenPoset::default());
        }
        let c = self.chain_complex(self.n / self.config.q())?;
        let mut faces: Vec<Vec<u32>> = Vec::new();
        for d in 0..=c.dim().unwrap_or(0) {
            faces.extend(c.basis(d).iter().cloned());
        }
        let name = |f: &[u32]| -> String {
            f.iter().map(|&i| self.vertex_id(i as usize)).collect::<Vec<_>>().join(" ")
        };
        let objects: Vec<String> = faces.iter().map(|f| name(f)).collect();
        let mut arrows = Vec::new();
        for f in &faces {
            if f.len() > 1 {
                for i in 0..f.len() {
                    let mut g = f.clone();
                    g.remove(i);
                    arrows.push((name(&g), name(f)));
                }
            }
        }
        GenPoset::new(objects, arrows)
    }

    pub fn to_json(&self) -> DecoratedComplexJson {
        DecoratedComplexJson {
            n: self.n,
            q: self.config.q(),
            d: self.config.group().elements().iter().map(Perm::to_word).collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson { support: v.support.clone(), decoration: v.decoration.to_word() })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Edge list as CSV, one edge per row with both endpoints spelled out.
    pub fn edges_csv(&self) -> String {
        let mut out = String::from("u,v,u_id,v_id\n");
        for &(a, b) in &self.edges {
            out.push_str(&format!(
                "{a},{b},{},{}\n",
                self.vertex_id(a as usize),
                self.vertex_id(b as usize)
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub support: Vec<u32>,
    pub decoration: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoratedComplexJson {
    pub n: usize,
    pub q: usize,
    #[serde(rename = "D")]
    pub d: Vec<String>,
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[u32; 2]>,
}

impl DecoratedComplexJson {
    /// Rebuilds the complex; edges are recomputed and must match.
    pub fn decode(&self, r: usize) -> Result<DecoratedComplex> {
        let gens = self.d.iter().map(|w| Perm::parse_word(w)).collect::<Result<Vec<_>>>()?;
        let config = Arc::new(Config::new(self.q, r, gens)?);
        let vertices = self
            .vertices
            .iter()
            .map(|v| DecoratedVertex::new(&config, v.support.clone(), Perm::parse_word(&v.decoration)?))
            .collect::<Result<Vec<_>>>()?;
        if vertices.iter().any(|v| v.support.iter().any(|&i| i as usize > self.n)) {
            return Err(Error::Schema("vertex support outside {1..n}".into()));
        }
        let c = DecoratedComplex::from_vertices(config, self.n, vertices);
        let edges: Vec<(u32, u32)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        if edges != c.edges {
            return Err(Error::Schema("edge list is not the disjoint-support relation".into()));
        }
        Ok(c)
    }
}
