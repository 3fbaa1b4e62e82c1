//! Invariant factors of sparse matrices: unit pivots are eliminated first,
//! the remaining block goes through the dense Smith form.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::One;

use super::complex::SparseMatrix;
use super::smith::{smith_normal_form, SmithForm};
use crate::error::{Error, Result};

/// Matrices with more columns than this, or too many entries for a dense
/// copy, take the sparse path.
pub const SPARSE_THRESHOLD: usize = 5000;
const DENSE_ENTRY_LIMIT: usize = 250_000;
/// Entry budgets for the elimination fill (a multiple of the input, clamped)
/// and for the dense leftover block.
const FILL_FACTOR: usize = 4;
const FILL_RANGE: (usize, usize) = (4_000_000, 30_000_000);
const LEFTOVER_LIMIT: usize = 50_000_000;

pub fn invariant_factors(m: &SparseMatrix) -> Result<SmithForm> {
    if m.rows == 0 || m.cols() == 0 || m.nnz() == 0 {
        return Ok(SmithForm { factors: Vec::new() });
    }
    if m.cols() <= SPARSE_THRESHOLD && m.cols() * m.rows <= DENSE_ENTRY_LIMIT {
        return smith_normal_form(&m.to_dense());
    }
    sparse_invariant_factors(m)
}

/// `SNF(A) = I_u ⊕ SNF(A')` where `u` unit pivots were eliminated.
pub fn sparse_invariant_factors(m: &SparseMatrix) -> Result<SmithForm> {
    match try_eliminate(m)? {
        Some((units, rest)) => {
            let tail = smith_normal_form(&rest)?;
            let mut factors = vec![BigInt::one(); units];
            factors.extend(tail.factors);
            Ok(SmithForm { factors })
        }
        None => smith_normal_form(&m.to_dense()),
    }
}

type Row = Vec<(u32, i64)>;

fn entry(row: &Row, c: u32) -> Option<i64> {
    row.binary_search_by_key(&c, |&(k, _)| k).ok().map(|i| row[i].1)
}

/// `r - f·p` on sorted sparse rows; `None` on overflow.
fn axpy(r: &Row, f: i64, p: &Row) -> Option<Row> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let take_r = j == p.len() || (i < r.len() && r[i].0 < p[j].0);
        let take_p = i == r.len() || (j < p.len() && p[j].0 < r[i].0);
        if take_r {
            out.push(r[i]);
            i += 1;
        } else if take_p {
            out.push((p[j].0, f.checked_mul(p[j].1)?.checked_neg()?));
            j += 1;
        } else {
            let v = r[i].1.checked_sub(f.checked_mul(p[j].1)?)?;
            if v != 0 {
                out.push((r[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

/// `Ok(None)` on `i64` overflow; errors when a budget is exceeded.
fn try_eliminate(m: &SparseMatrix) -> Result<Option<(usize, Vec<Vec<i64>>)>> {
    let mut rows: Vec<Row> = vec![Vec::new(); m.rows];
    for (j, col) in m.columns.iter().enumerate() {
        for &(i, v) in col {
            if v != 0 {
                rows[i as usize].push((j as u32, v));
            }
        }
    }
    let mut row_alive = vec![true; m.rows];
    let mut col_done = vec![false; m.cols()];
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); m.cols()];
    for (i, row) in rows.iter().enumerate() {
        for &(c, _) in row {
            col_rows[c as usize].push(i as u32);
        }
    }
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        (0..m.cols()).map(|c| Reverse((col_rows[c].len(), c as u32))).collect();
    let mut units = 0usize;
    let mut deferred: Vec<u32> = Vec::new();
    let mut is_deferred = vec![false; m.cols()];
    let mut fill = m.nnz();
    let fill_limit = (FILL_FACTOR * fill).clamp(FILL_RANGE.0, FILL_RANGE.1);
    let mut progress_since_defer = false;
    loop {
        let Some(Reverse((cnt, c))) = heap.pop() else {
            if deferred.is_empty() || !progress_since_defer {
                break;
            }
            progress_since_defer = false;
            for c in deferred.drain(..) {
                is_deferred[c as usize] = false;
                heap.push(Reverse((col_rows[c as usize].len(), c)));
            }
            continue;
        };
        let cu = c as usize;
        if col_done[cu] {
            continue;
        }
        let mut live: Vec<u32> = col_rows[cu]
            .iter()
            .copied()
            .filter(|&r| row_alive[r as usize] && entry(&rows[r as usize], c).is_some())
            .collect();
        live.sort_unstable();
        live.dedup();
        col_rows[cu] = live.clone();
        if live.is_empty() {
            col_done[cu] = true;
            continue;
        }
        if live.len() != cnt {
            heap.push(Reverse((live.len(), c)));
            continue;
        }
        let pivot = live
            .iter()
            .copied()
            .filter(|&r| entry(&rows[r as usize], c).is_some_and(|v| v.abs() == 1))
            .min_by_key(|&r| rows[r as usize].len());
        let Some(p) = pivot else {
            if !is_deferred[cu] {
                is_deferred[cu] = true;
                deferred.push(c);
            }
            continue;
        };
        let prow = std::mem::take(&mut rows[p as usize]);
        let s = entry(&prow, c).expect("pivot entry");
        for &r in &live {
            if r == p {
                continue;
            }
            let ru = r as usize;
            let f = entry(&rows[ru], c).expect("live entry") * s;
            let Some(new_row) = axpy(&rows[ru], f, &prow) else { return Ok(None) };
            fill = fill + new_row.len() - rows[ru].len();
            if fill > fill_limit {
                return Err(Error::CapExceeded { what: "elimination fill", value: fill, cap: fill_limit });
            }
            for &(k, _) in &new_row {
                if !col_done[k as usize] && entry(&rows[ru], k).is_none() {
                    col_rows[k as usize].push(r);
                }
            }
            rows[ru] = new_row;
        }
        row_alive[p as usize] = false;
        col_done[cu] = true;
        units += 1;
        progress_since_defer = true;
        for &(k, _) in &prow {
            if !col_done[k as usize] {
                heap.push(Reverse((col_rows[k as usize].len(), k)));
            }
        }
    }
    let keep_rows: Vec<usize> = (0..m.rows).filter(|&i| row_alive[i] && !rows[i].is_empty()).collect();
    let mut keep_cols: Vec<u32> = keep_rows
        .iter()
        .flat_map(|&i| rows[i].iter().map(|&(c, _)| c))
        .collect();
    keep_cols.sort_unstable();
    keep_cols.dedup();
    let leftover = keep_rows.len() * keep_cols.len();
    if leftover > LEFTOVER_LIMIT {
        return Err(Error::CapExceeded { what: "dense leftover entries", value: leftover, cap: LEFTOVER_LIMIT });
    }
    let rest = keep_rows
        .iter()
        .map(|&i| {
            let mut dense = vec![0i64; keep_cols.len()];
            for &(c, v) in &rows[i] {
                let j = keep_cols.binary_search(&c).expect("collected");
                dense[j] = v;
            }
            dense
        })
        .collect();
    Ok(Some((units, rest)))
}
