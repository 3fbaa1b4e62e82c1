//! Homology of a chain complex after shrinking it by coreductions and free
//! face collapses.
//!
//! Both moves remove a pair `(a, b)` with `⟨∂b, a⟩ = ±1` where either `a`
//! is the only remaining face of `b` or `b` is the only remaining coface of
//! `a`. In both cases the Gaussian correction term vanishes, so the reduced
//! complex is the original one restricted to the surviving cells.

use num_bigint::BigInt;
use serde::Serialize;

use super::complex::{ChainComplex, SparseMatrix};
use super::morse::morse_reduce;
use super::sparse::invariant_factors;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub dim: usize,
    pub betti: usize,
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<BigInt>,
}

fn serialize_torsion<S: serde::Serializer>(t: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(t.iter().map(|x| x.to_string()))
}

impl DegreeHomology {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Homology in degrees `0..=through`. `reduced` is true when degree 0 was
/// computed from the augmented complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub reduced: bool,
    pub nonempty: bool,
    pub degrees: Vec<DegreeHomology>,
}

impl HomologyResult {
    pub fn betti(&self, d: usize) -> usize {
        self.degrees.get(d).map_or(0, |h| h.betti)
    }

    pub fn vanishes(&self) -> bool {
        self.degrees.iter().all(DegreeHomology::is_zero)
    }

    pub fn vanishes_through(&self, k: i64) -> bool {
        self.degrees.iter().take_while(|h| (h.dim as i64) <= k).all(DegreeHomology::is_zero)
    }
}

/// Boundary data of levels `0..=top`, where level `L` holds the cells of
/// dimension `L − 1` and level 0 is the augmentation cell when present.
struct Levels {
    faces: Vec<Vec<Vec<(u32, i64)>>>,
    cofaces: Vec<Vec<Vec<u32>>>,
}

impl Levels {
    fn build(c: &ChainComplex, top_dim: usize, augment: bool) -> Self {
        let mut faces: Vec<Vec<Vec<(u32, i64)>>> = Vec::with_capacity(top_dim + 2);
        faces.push(if augment && c.count(0) > 0 { vec![Vec::new()] } else { Vec::new() });
        let aug = !faces[0].is_empty();
        faces.push((0..c.count(0)).map(|_| if aug { vec![(0, 1)] } else { Vec::new() }).collect());
        for d in 1..=top_dim {
            faces.push(c.boundary(d).columns);
        }
        let cofaces = (0..faces.len())
            .map(|l| {
                let mut co = vec![Vec::new(); faces[l].len()];
                if let Some(up) = faces.get(l + 1) {
                    for (j, col) in up.iter().enumerate() {
                        for &(i, _) in col {
                            co[i as usize].push(j as u32);
                        }
                    }
                }
                co
            })
            .collect();
        Levels { faces, cofaces }
    }

    fn reduce(&self) -> Vec<Vec<bool>> {
        let mut alive: Vec<Vec<bool>> = self.faces.iter().map(|l| vec![true; l.len()]).collect();
        let mut face_cnt: Vec<Vec<u32>> =
            self.faces.iter().map(|l| l.iter().map(|f| f.len() as u32).collect()).collect();
        let mut coface_cnt: Vec<Vec<u32>> =
            self.cofaces.iter().map(|l| l.iter().map(|f| f.len() as u32).collect()).collect();
        let top = self.faces.len() - 1;
        let mut stack: Vec<(usize, u32)> = Vec::new();
        for l in 0..=top {
            for i in 0..self.faces[l].len() {
                stack.push((l, i as u32));
            }
        }
        stack.reverse();
        while let Some((l, i)) = stack.pop() {
            let iu = i as usize;
            if !alive[l][iu] {
                continue;
            }
            // coreduction: b = (l, i) has a single surviving face
            if l > 0 && face_cnt[l][iu] == 1 {
                let (a, coeff) = self.faces[l][iu]
                    .iter()
                    .copied()
                    .find(|&(a, _)| alive[l - 1][a as usize])
                    .expect("counted face");
                if coeff.abs() == 1 {
                    self.kill_pair(l, i, a, &mut alive, &mut face_cnt, &mut coface_cnt, &mut stack);
                    continue;
                }
            }
            // collapse: a = (l, i) has a single surviving coface
            if l < top && coface_cnt[l][iu] == 1 {
                let b = self.cofaces[l][iu]
                    .iter()
                    .copied()
                    .find(|&b| alive[l + 1][b as usize])
                    .expect("counted coface");
                let coeff = self.faces[l + 1][b as usize]
                    .iter()
                    .find(|&&(f, _)| f == i)
                    .map(|&(_, v)| v)
                    .expect("incidence");
                if coeff.abs() == 1 {
                    self.kill_pair(l + 1, b, i, &mut alive, &mut face_cnt, &mut coface_cnt, &mut stack);
                }
            }
        }
        alive
    }

    /// Removes `b` at level `l` and its face `a` at level `l − 1`.
    #[allow(clippy::too_many_arguments)]
    fn kill_pair(
        &self,
        l: usize,
        b: u32,
        a: u32,
        alive: &mut [Vec<bool>],
        face_cnt: &mut [Vec<u32>],
        coface_cnt: &mut [Vec<u32>],
        stack: &mut Vec<(usize, u32)>,
    ) {
        let top = self.faces.len() - 1;
        alive[l][b as usize] = false;
        alive[l - 1][a as usize] = false;
        for &(f, _) in &self.faces[l][b as usize] {
            if alive[l - 1][f as usize] {
                coface_cnt[l - 1][f as usize] -= 1;
                stack.push((l - 1, f));
            }
        }
        if l < top {
            for &c in &self.cofaces[l][b as usize] {
                if alive[l + 1][c as usize] {
                    face_cnt[l + 1][c as usize] -= 1;
                    stack.push((l + 1, c));
                }
            }
        }
        for &c in &self.cofaces[l - 1][a as usize] {
            if alive[l][c as usize] {
                face_cnt[l][c as usize] -= 1;
                stack.push((l, c));
            }
        }
        if l >= 2 {
            for &(f, _) in &self.faces[l - 1][a as usize] {
                if alive[l - 2][f as usize] {
                    coface_cnt[l - 2][f as usize] -= 1;
                    stack.push((l - 2, f));
                }
            }
        }
    }

    fn restricted(&self, l: usize, alive: &[Vec<bool>]) -> SparseMatrix {
        let rows_alive = &alive[l - 1];
        let mut new_index = vec![u32::MAX; rows_alive.len()];
        let mut rows = 0u32;
        for (i, &a) in rows_alive.iter().enumerate() {
            if a {
                new_index[i] = rows;
                rows += 1;
            }
        }
        let columns = self.faces[l]
            .iter()
            .zip(&alive[l])
            .filter(|(_, &a)| a)
            .map(|(col, _)| {
                col.iter()
                    .filter(|&&(i, _)| rows_alive[i as usize])
                    .map(|&(i, v)| (new_index[i as usize], v))
                    .collect()
            })
            .collect();
        SparseMatrix { rows: rows as usize, columns }
    }
}

/// Surviving cell counts and boundary ranks, kept as a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub cells: Vec<usize>,
    pub critical: Vec<usize>,
    pub boundary_ranks: Vec<usize>,
}

pub fn homology_with_report(c: &ChainComplex, through: usize, augment: bool) -> Result<(HomologyResult, ReductionReport)> {
    let top_cell = c.dim();
    let needed = through + 1;
    if c.is_truncated() && top_cell.is_none_or(|t| t < needed) {
        return Err(Error::Precondition(format!(
            "complex is truncated below dimension {needed}, homology through {through} is not determined"
        )));
    }
    let top_dim = top_cell.map_or(0, |t| t.min(needed));
    let augment = augment && !c.is_relative();
    let levels = Levels::build(c, top_dim, augment);
    // factors[L] = invariant factors of the map from level L to level L − 1
    let mut factors: Vec<Vec<BigInt>> = vec![Vec::new(); levels.faces.len() + 1];
    let critical = match morse_reduce(c, &levels.faces) {
        Some(m) => {
            for (l, b) in m.boundaries.iter().enumerate().skip(1) {
                factors[l] = invariant_factors(b)?.factors;
            }
            m.critical
        }
        None => {
            let alive = levels.reduce();
            for l in 1..levels.faces.len() {
                factors[l] = invariant_factors(&levels.restricted(l, &alive))?.factors;
            }
            alive.iter().map(|l| l.iter().filter(|&&a| a).count()).collect()
        }
    };
    let rank = |l: usize| factors.get(l).map_or(0, Vec::len);
    let mut degrees = Vec::with_capacity(through + 1);
    for d in 0..=through {
        let l = d + 1;
        let cells = critical.get(l).copied().unwrap_or(0);
        let betti = cells - rank(l) - rank(l + 1);
        let torsion = factors
            .get(l + 1)
            .map(|f| f.iter().filter(|x| **x != BigInt::from(1)).cloned().collect())
            .unwrap_or_default();
        degrees.push(DegreeHomology { dim: d, betti, torsion });
    }
    let report = ReductionReport {
        cells: (0..=top_dim).map(|d| c.count(d)).collect(),
        critical: critical.iter().skip(1).copied().collect(),
        boundary_ranks: (1..levels.faces.len()).map(rank).collect(),
    };
    Ok((
        HomologyResult { reduced: augment, nonempty: !c.is_empty(), degrees },
        report,
    ))
}

/// Reduced integral homology in degrees `0..=through`. For relative
/// complexes this is the homology of the pair.
pub fn reduced_homology(c: &ChainComplex, through: usize) -> Result<HomologyResult> {
    Ok(homology_with_report(c, through, true)?.0)
}

pub fn homology(c: &ChainComplex, through: usize) -> Result<HomologyResult> {
    Ok(homology_with_report(c, through, false)?.0)
}

/// Highest degree for which the complex determines its homology.
pub fn max_degree(c: &ChainComplex) -> usize {
    match (c.dim(), c.is_truncated()) {
        (None, _) => 0,
        (Some(t), false) => t,
        (Some(t), true) => t.saturating_sub(1),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Acyclicity {
    pub acyclic: bool,
    pub homology: HomologyResult,
    pub report: ReductionReport,
}

/// Reduced homology vanishes in degrees `0..=k`; `k = −1` asks only for
/// nonemptiness, and an empty complex is never acyclic.
pub fn is_k_acyclic(c: &ChainComplex, k: i64) -> Result<Acyclicity> {
    let through = k.max(0) as usize;
    let (homology, report) = homology_with_report(c, through, true)?;
    let acyclic = homology.nonempty && (k < 0 || homology.vanishes_through(k));
    Ok(Acyclicity { acyclic, homology, report })
}
