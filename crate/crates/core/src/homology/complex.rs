use std::collections::HashMap;

use crate::error::{Error, Result};

/// A simplex as its strictly increasing vertex list.
pub type Simplex = Vec<u32>;

/// Sparse integer matrix held by columns; each column is sorted by row.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols()]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                m[i as usize][j] = v;
            }
        }
        m
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }
}

/// Simplicial chain complex with a deterministic basis.
///
/// `basis[d]` lists the d-simplices in lexicographic order. Simplices in the
/// optional subcomplex are excluded from the basis, which gives the relative
/// complex of the pair. `truncated` records that simplices above the top
/// dimension were dropped, so homology is only exact below it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    basis: Vec<Vec<Simplex>>,
    relative: bool,
    truncated: bool,
}

impl ChainComplex {
    /// The downward closure of `simplices`, keeping dimensions `≤ max_dim`.
    pub fn from_simplices(simplices: impl IntoIterator<Item = Simplex>, max_dim: Option<usize>) -> Result<Self> {
        let mut by_dim: Vec<std::collections::BTreeSet<Simplex>> = Vec::new();
        let mut truncated = false;
        for mut s in simplices {
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Precondition(format!("repeated vertex in simplex {s:?}")));
            }
            if s.is_empty() {
                continue;
            }
            if let Some(m) = max_dim {
                if s.len() > m + 1 {
                    truncated = true;
                    for face in subsets_of_size(&s, m + 1) {
                        insert_closed(&mut by_dim, face);
                    }
                    continue;
                }
            }
            insert_closed(&mut by_dim, s);
        }
        Ok(ChainComplex {
            basis: by_dim.into_iter().map(|s| s.into_iter().collect()).collect(),
            relative: false,
            truncated,
        })
    }

    /// Wraps lexicographically sorted, face-closed simplex lists.
    pub(crate) fn from_sorted_levels(basis: Vec<Vec<Simplex>>, truncated: bool) -> Self {
        ChainComplex { basis, relative: false, truncated }
    }

    /// The relative complex `C(K) / C(L)` where `L` is the subcomplex of
    /// simplices satisfying `in_sub`. `L` must be closed under faces.
    pub fn relative_to(&self, in_sub: impl Fn(&[u32]) -> bool) -> Result<Self> {
        let mut basis = Vec::with_capacity(self.basis.len());
        for level in &self.basis {
            basis.push(level.iter().filter(|s| !in_sub(s)).cloned().collect::<Vec<_>>());
        }
        for level in &self.basis {
            for s in level.iter().filter(|s| in_sub(s)) {
                if s.len() > 1 && faces(s).any(|f| !in_sub(&f)) {
                    return Err(Error::Precondition(format!("subcomplex is not closed: {s:?}")));
                }
            }
        }
        while basis.last().is_some_and(Vec::is_empty) {
            basis.pop();
        }
        Ok(ChainComplex { basis, relative: true, truncated: self.truncated })
    }

    /// Highest dimension with a cell, or `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.basis.iter().rposition(|l| !l.is_empty())
    }

    pub fn basis(&self, d: usize) -> &[Simplex] {
        self.basis.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, d: usize) -> usize {
        self.basis(d).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn is_relative(&self) -> bool {
        self.relative
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_empty(&self) -> bool {
        self.dim().is_none()
    }

    /// Alternating count of cells.
    pub fn euler_characteristic(&self) -> i64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(d, l)| if d % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// The boundary `∂_d : C_d → C_{d−1}` for `d ≥ 1`, with the sign of the
    /// face omitting vertex `i` equal to `(−1)^i`. Faces outside the basis
    /// (those in the subcomplex of a relative complex) are dropped.
    pub fn boundary(&self, d: usize) -> SparseMatrix {
        if d == 0 {
            return SparseMatrix { rows: 0, columns: vec![Vec::new(); self.count(0)] };
        }
        let index = self.index(d - 1);
        let columns = self
            .basis(d)
            .iter()
            .map(|s| {
                let mut col: Vec<(u32, i64)> = faces(s)
                    .enumerate()
                    .filter_map(|(i, f)| index.get(&f).map(|&r| (r, if i % 2 == 0 { 1 } else { -1 })))
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        SparseMatrix { rows: self.count(d - 1), columns }
    }

    pub(crate) fn index(&self, d: usize) -> HashMap<Simplex, u32> {
        self.basis(d)
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect()
    }

    /// Checks `∂_{d−1} ∘ ∂_d = 0` in every dimension.
    pub fn verify_boundary(&self) -> Result<()> {
        for d in 2..self.basis.len() {
            let outer = self.boundary(d - 1);
            let inner = self.boundary(d);
            for (j, col) in inner.columns.iter().enumerate() {
                let mut acc: HashMap<u32, i64> = HashMap::new();
                for &(mid, a) in col {
                    for &(low, b) in &outer.columns[mid as usize] {
                        *acc.entry(low).or_default() += a * b;
                    }
                }
                if acc.values().any(|&v| v != 0) {
                    return Err(Error::BoundaryNotClosed { dim: d, column: j });
                }
            }
        }
        Ok(())
    }
}

fn insert_closed(by_dim: &mut Vec<std::collections::BTreeSet<Simplex>>, s: Simplex) {
    let d = s.len() - 1;
    while by_dim.len() <= d {
        by_dim.push(Default::default());
    }
    if !by_dim[d].insert(s.clone()) || d == 0 {
        return;
    }
    for f in faces(&s) {
        insert_closed(by_dim, f);
    }
}

/// Codimension-one faces, the `i`-th omitting vertex `i`.
pub fn faces(s: &[u32]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = Vec::with_capacity(s.len() - 1);
        f.extend_from_slice(&s[..i]);
        f.extend_from_slice(&s[i + 1..]);
        f
    })
}

fn subsets_of_size(s: &[u32], k: usize) -> Vec<Simplex> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(s: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Simplex>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..s.len() {
            if s.len() - i < k - cur.len() {
                break;
            }
            cur.push(s[i]);
            rec(s, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(s, k, 0, &mut cur, &mut out);
    out
}

/// Clique complex of a simple graph on vertices `0..vertices`, keeping
/// cliques with at most `max_dim + 1` vertices.
pub fn flag_complex(vertices: usize, edges: &[(u32, u32)], max_dim: usize) -> Result<ChainComplex> {
    let words = vertices.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; vertices];
    for &(a, b) in edges {
        let (a, b) = (a as usize, b as usize);
        if a == b || a >= vertices || b >= vertices {
            return Err(Error::Precondition(format!("bad edge ({a}, {b})")));
        }
        adj[a][b / 64] |= 1 << (b % 64);
        adj[b][a / 64] |= 1 << (a % 64);
    }
    let mut levels: Vec<Vec<Simplex>> = vec![Vec::new(); max_dim + 1];
    let mut truncated = false;
    let mut clique = Vec::new();
    for v in 0..vertices {
        let mut candidates = adj[v].clone();
        clear_below(&mut candidates, v + 1);
        clique.push(v as u32);
        grow(&adj, &mut clique, &candidates, max_dim, &mut levels, &mut truncated);
        clique.pop();
    }
    for l in &mut levels {
        l.sort_unstable();
    }
    while levels.len() > 1 && levels.last().is_some_and(Vec::is_empty) {
        levels.pop();
    }
    if vertices == 0 {
        levels.clear();
    }
    Ok(ChainComplex::from_sorted_levels(levels, truncated))
}

fn clear_below(bits: &mut [u64], n: usize) {
    for (w, word) in bits.iter_mut().enumerate() {
        let lo = w * 64;
        if lo + 64 <= n {
            *word = 0;
        } else if lo < n {
            *word &= !0u64 << (n - lo);
        }
    }
}

fn grow(
    adj: &[Vec<u64>],
    clique: &mut Vec<u32>,
    candidates: &[u64],
    max_dim: usize,
    levels: &mut [Vec<Simplex>],
    truncated: &mut bool,
) {
    levels[clique.len() - 1].push(clique.clone());
    let any = candidates.iter().any(|&w| w != 0);
    if clique.len() == max_dim + 1 {
        *truncated |= any;
        return;
    }
    for (w, &word) in candidates.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let u = w * 64 + b;
            let next: Vec<u64> = candidates
                .iter()
                .zip(&adj[u])
                .enumerate()
                .map(|(i, (&c, &a))| {
                    let mut x = c & a;
                    if i < w || (i == w && b == 63) {
                        x = 0;
                    } else if i == w {
                        x &= !0u64 << (b + 1);
                    }
                    x
                })
                .collect();
            clique.push(u as u32);
            grow(adj, clique, &next, max_dim, levels, truncated);
            clique.pop();
        }
    }
}
