//! Algebraic discrete Morse reduction. The matching is built from successive
//! element matchings `σ ↔ σ ∪ {v}`, one vertex at a time, which is acyclic
//! on any family of simplices. The Morse complex keeps the critical cells and
//! sums gradient paths to get its boundary.

use std::collections::HashMap;

use super::complex::{ChainComplex, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Critical(u32),
    /// Matched with a cell one level up.
    Up(u32),
    /// Matched with a cell one level down.
    Down,
}

/// Level `L` holds the cells of dimension `L − 1`; level 0 is the empty
/// simplex when augmenting.
pub(crate) struct MorseComplex {
    pub critical: Vec<usize>,
    /// `boundaries[L]` maps critical cells of level `L` to level `L − 1`.
    pub boundaries: Vec<SparseMatrix>,
}

type Chain = Vec<(u32, i64)>;

/// `acc + f·x` on sorted sparse chains; `None` on overflow.
fn add_scaled(acc: &Chain, f: i64, x: &Chain) -> Option<Chain> {
    let mut out = Vec::with_capacity(acc.len() + x.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < x.len() {
        if j == x.len() || (i < acc.len() && acc[i].0 < x[j].0) {
            out.push(acc[i]);
            i += 1;
        } else if i == acc.len() || x[j].0 < acc[i].0 {
            out.push((x[j].0, f.checked_mul(x[j].1)?));
            j += 1;
        } else {
            let v = acc[i].1.checked_add(f.checked_mul(x[j].1)?)?;
            if v != 0 {
                out.push((acc[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// Returns `None` if a coefficient overflows `i64`.
pub(crate) fn morse_reduce(c: &ChainComplex, faces: &[Vec<Vec<(u32, i64)>>]) -> Option<MorseComplex> {
    let levels = faces.len();
    let augmented = !faces[0].is_empty();
    let mut roles: Vec<Vec<Option<Role>>> = faces.iter().map(|l| vec![None; l.len()]).collect();
    let vertices = (1..levels)
        .flat_map(|l| c.basis(l - 1).iter().flat_map(|s| s.iter().copied()))
        .max()
        .map_or(0, |v| v as usize + 1);
    let mut containing: Vec<Vec<(u8, u32)>> = vec![Vec::new(); vertices];
    for l in 1..levels {
        for (i, s) in c.basis(l - 1).iter().enumerate() {
            for &v in s {
                containing[v as usize].push((l as u8, i as u32));
            }
        }
    }
    for (v, cells) in containing.iter().enumerate() {
        for &(l, t) in cells {
            let l = l as usize;
            if roles[l][t as usize].is_some() {
                continue;
            }
            let sigma = if l == 1 {
                augmented.then_some(0)
            } else {
                let tau = &c.basis(l - 1)[t as usize];
                let face: Vec<u32> = tau.iter().copied().filter(|&u| u as usize != v).collect();
                c.basis(l - 2).binary_search(&face).ok().map(|i| i as u32)
            };
            if let Some(s) = sigma {
                if roles[l - 1][s as usize].is_none() {
                    roles[l - 1][s as usize] = Some(Role::Up(t));
                    roles[l][t as usize] = Some(Role::Down);
                }
            }
        }
    }
    let mut critical = vec![0usize; levels];
    let roles: Vec<Vec<Role>> = roles
        .into_iter()
        .enumerate()
        .map(|(l, level)| {
            level
                .into_iter()
                .map(|r| {
                    r.unwrap_or_else(|| {
                        critical[l] += 1;
                        Role::Critical(critical[l] as u32 - 1)
                    })
                })
                .collect()
        })
        .collect();
    let mut boundaries = vec![SparseMatrix { rows: 0, columns: Vec::new() }];
    for l in 1..levels {
        let below = &roles[l - 1];
        let mut flow: HashMap<u32, Chain> = HashMap::new();
        let mut columns = Vec::with_capacity(critical[l]);
        for (t, role) in roles[l].iter().enumerate() {
            if let Role::Critical(_) = role {
                let mut chain = Chain::new();
                for &(a, e) in &faces[l][t] {
                    let image = psi(a, below, &faces[l], &mut flow)?;
                    chain = add_scaled(&chain, e, &image)?;
                }
                columns.push(chain);
            }
        }
        boundaries.push(SparseMatrix { rows: critical[l - 1], columns });
    }
    Some(MorseComplex { critical, boundaries })
}

/// Image of a cell of the level below under the gradient flow, as a chain of
/// critical cells. Cells matched upward are resolved iteratively in
/// dependency order and memoized.
fn psi(a: u32, below: &[Role], up_faces: &[Vec<(u32, i64)>], flow: &mut HashMap<u32, Chain>) -> Option<Chain> {
    match below[a as usize] {
        Role::Critical(i) => return Some(vec![(i, 1)]),
        Role::Down => return Some(Vec::new()),
        Role::Up(_) => {}
    }
    let mut stack = vec![(a, false)];
    while let Some((x, expanded)) = stack.pop() {
        if flow.contains_key(&x) {
            continue;
        }
        let Role::Up(b) = below[x as usize] else { unreachable!("only upward cells are stacked") };
        let col = &up_faces[b as usize];
        if !expanded {
            stack.push((x, true));
            for &(y, _) in col {
                if y != x && matches!(below[y as usize], Role::Up(_)) && !flow.contains_key(&y) {
                    stack.push((y, false));
                }
            }
            continue;
        }
        let eps = col.iter().find(|&&(y, _)| y == x).map(|&(_, e)| e).expect("matched incidence");
        let mut chain = Chain::new();
        for &(y, e) in col {
            if y == x {
                continue;
            }
            // x = −ε Σ e_y y modulo the boundary of b, with ε = ±1
            let f = -eps * e;
            chain = match below[y as usize] {
                Role::Critical(i) => add_scaled(&chain, f, &vec![(i, 1)])?,
                Role::Down => chain,
                Role::Up(_) => add_scaled(&chain, f, &flow[&y])?,
            };
        }
        flow.insert(x, chain);
    }
    Some(flow[&a].clone())
}
