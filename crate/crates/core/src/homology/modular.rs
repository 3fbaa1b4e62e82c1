//! Invariant factors through arithmetic modulo a multiple of the
//! determinantal divisor, for dense blocks whose entries outgrow `i128`.
//!
//! The rank comes from elimination modulo three 61-bit primes. Each
//! nonsingular pivot minor `B[R, C]` found on the way is a multiple of
//! `Δ_ρ = s_1 ⋯ s_ρ`, so `m = 2·gcd(det B[R, C], …)` exceeds every nonzero
//! invariant factor. The column lattice of `B` together with `m·Z^rows` has
//! invariant factors `gcd(s_i, m)`, which can be computed with every entry
//! reduced modulo `m`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

const PRIMES: [u64; 3] = [2_305_843_009_213_693_951, 2_305_843_009_213_693_921, 2_305_843_009_213_693_907];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Rank modulo `p`, with pivot rows and columns. Columns are scanned in
/// `order`.
fn rank_mod(m: &[Vec<i64>], p: u64, order: &[usize]) -> (usize, Vec<usize>, Vec<usize>) {
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect()).collect();
    let rows = a.len();
    let mut row_used = vec![false; rows];
    let (mut prow, mut pcol) = (Vec::new(), Vec::new());
    for &c in order {
        let Some(r) = (0..rows).find(|&r| !row_used[r] && a[r][c] != 0) else { continue };
        row_used[r] = true;
        prow.push(r);
        pcol.push(c);
        let inv = powmod(a[r][c], p - 2, p);
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if row_used[i] || row[c] == 0 {
                continue;
            }
            let f = mulmod(row[c], inv, p);
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                if y != 0 {
                    *x = (*x + p - mulmod(f, y, p)) % p;
                }
            }
        }
    }
    (prow.len(), prow, pcol)
}

/// Fraction-free determinant.
fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(s) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, s);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * prev
}

fn minor(m: &[Vec<i64>], rows: &[usize], cols: &[usize]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|&r| cols.iter().map(|&c| BigInt::from(m[r][c])).collect()).collect()
}

/// Diagonalizes modulo `m` and returns `gcd(d_i, m)` per coordinate, one per
/// row of the input.
fn diagonal_mod(a: &[Vec<i64>], m: &BigInt) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let reduce = |x: BigInt| -> BigInt {
        let r = x.mod_floor(m);
        if &r + &r > *m {
            r - m
        } else {
            r
        }
    };
    let mut w: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| reduce(BigInt::from(x))).collect()).collect();
    let mut diag = Vec::with_capacity(rows);
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w[i][j].is_zero() && best.is_none_or(|(bi, bj)| w[i][j].magnitude() < w[bi][bj].magnitude()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap(t, bi);
        for row in &mut w {
            row.swap(t, bj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if w[i][t].is_zero() {
                    continue;
                }
                let f = w[i][t].div_floor(&w[t][t]);
                let (lo, hi) = w.split_at_mut(i);
                for (x, y) in hi[0].iter_mut().zip(&lo[t]).skip(t) {
                    if !y.is_zero() {
                        *x = reduce(&*x - &f * y);
                    }
                }
                if !w[i][t].is_zero() {
                    w.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w[t][j].is_zero() {
                    continue;
                }
                let f = w[t][j].div_floor(&w[t][t]);
                for row in w.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        row[j] = reduce(&row[j] - &f * &row[t]);
                    }
                }
                if !w[t][j].is_zero() {
                    for row in w.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }
        diag.push(w[t][t].gcd(m));
        t += 1;
    }
    diag.resize(rows, m.clone());
    diag
}

/// Invariant factors of `diag(a)`: pairwise `(gcd, lcm)` until each divides
/// the next.
fn normalize(mut a: Vec<BigInt>) -> Vec<BigInt> {
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !(&a[j] % &a[i]).is_zero() {
                let g = a[i].gcd(&a[j]);
                let l = a[i].lcm(&a[j]);
                a[i] = g;
                a[j] = l;
            }
        }
    }
    a
}

/// Nonzero invariant factors, or `None` when the modular data are
/// inconsistent and the caller should fall back to exact arithmetic.
pub(crate) fn modular_invariant_factors(a: &[Vec<i64>]) -> Option<Vec<BigInt>> {
    let cols = a.first().map_or(0, Vec::len);
    let forward: Vec<usize> = (0..cols).collect();
    let backward: Vec<usize> = (0..cols).rev().collect();
    let middle: Vec<usize> = (0..cols).map(|i| (i * 7919 + cols / 2) % cols.max(1)).collect::<Vec<_>>();
    let mut middle_order = middle.clone();
    middle_order.sort_unstable();
    middle_order.dedup();
    let middle = if middle_order.len() == cols { middle } else { forward.clone() };
    let orders = [&forward, &backward, &middle];
    let mut rho = 0;
    let mut g = BigInt::zero();
    for (p, order) in PRIMES.iter().zip(orders) {
        let (r, rows, pcols) = rank_mod(a, *p, order);
        if r > rho {
            rho = r;
            g = BigInt::zero();
        }
        if r == rho && r > 0 {
            let d = bareiss(minor(a, &rows, &pcols)).abs();
            g = g.gcd(&d);
        }
    }
    if rho == 0 {
        return Some(Vec::new());
    }
    if g.is_one() {
        return Some(vec![BigInt::one(); rho]);
    }
    let m = &g + &g;
    let factors: Vec<BigInt> = normalize(diagonal_mod(a, &m)).into_iter().filter(|f| *f != m).collect();
    if factors.len() != rho {
        return None;
    }
    debug_assert!(factors.iter().all(|f| f.to_u64().is_none_or(|v| v > 0)));
    Some(factors)
}
