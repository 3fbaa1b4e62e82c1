//! Smith normal form over the integers.
//!
//! Entries start in `i128` with checked arithmetic; on overflow the
//! computation moves to modular arithmetic, and to `BigInt` as a last resort.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modular::modular_invariant_factors;
use crate::error::{Error, Result};

/// Invariant factors `d_1 | d_2 | ...` (all positive) of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.factors.iter().filter(|f| !f.is_one()).cloned().collect()
    }
}

trait Entry: Clone + PartialEq + Sized {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn lt_mag(&self, other: &Self) -> bool;
    fn neg(&self) -> Option<Self>;
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self>;
    fn quot(&self, b: &Self) -> Self;
    fn divides(&self, b: &Self) -> bool;
    fn is_negative(&self) -> bool;
    fn big(&self) -> BigInt;
}

impl Entry for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn lt_mag(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*b)?)
    }
    fn quot(&self, b: &Self) -> Self {
        Integer::div_floor(self, b)
    }
    fn divides(&self, b: &Self) -> bool {
        b % self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Entry for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn lt_mag(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn mul_sub(&self, q: &Self, b: &Self) -> Option<Self> {
        Some(self - q * b)
    }
    fn quot(&self, b: &Self) -> Self {
        Integer::div_floor(self, b)
    }
    fn divides(&self, b: &Self) -> bool {
        Zero::is_zero(&(b % self))
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn big(&self) -> BigInt {
        self.clone()
    }
}

/// Dense working copy with optional transform tracking: maintains
/// `P · A · Q = current`.
struct Work<T> {
    a: Vec<Vec<T>>,
    p: Option<Vec<Vec<T>>>,
    q: Option<Vec<Vec<T>>>,
}

fn identity<T: Entry>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

impl<T: Entry> Work<T> {
    fn rows(&self) -> usize {
        self.a.len()
    }

    fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        if let Some(p) = &mut self.p {
            p.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in &mut self.a {
            row.swap(i, j);
        }
        if let Some(q) = &mut self.q {
            for row in q {
                row.swap(i, j);
            }
        }
    }

    /// row_i -= f · row_j
    fn row_sub(&mut self, i: usize, j: usize, f: &T) -> Option<()> {
        fn go<T: Entry>(m: &mut [Vec<T>], i: usize, j: usize, f: &T) -> Option<()> {
            let (src, dst) = if i < j {
                let (lo, hi) = m.split_at_mut(j);
                (&hi[0], &mut lo[i])
            } else {
                let (lo, hi) = m.split_at_mut(i);
                (&lo[j], &mut hi[0])
            };
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                if !s.is_zero() {
                    *d = d.mul_sub(f, s)?;
                }
            }
            Some(())
        }
        go(&mut self.a, i, j, f)?;
        if let Some(p) = &mut self.p {
            go(p, i, j, f)?;
        }
        Some(())
    }

    /// col_i -= f · col_j
    fn col_sub(&mut self, i: usize, j: usize, f: &T) -> Option<()> {
        fn go<T: Entry>(m: &mut [Vec<T>], i: usize, j: usize, f: &T) -> Option<()> {
            for row in m {
                if !row[j].is_zero() {
                    let v = row[i].mul_sub(f, &row[j])?;
                    row[i] = v;
                }
            }
            Some(())
        }
        go(&mut self.a, i, j, f)?;
        if let Some(q) = &mut self.q {
            go(q, i, j, f)?;
        }
        Some(())
    }

    fn negate_row(&mut self, i: usize) -> Option<()> {
        for x in &mut self.a[i] {
            *x = x.neg()?;
        }
        if let Some(p) = &mut self.p {
            for x in &mut p[i] {
                *x = x.neg()?;
            }
        }
        Some(())
    }

    fn smallest_from(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows() {
            for j in t..self.cols() {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| x.lt_mag(&self.a[bi][bj])) {
                    best = Some((i, j));
                }
            }
        }
        best
    }

    /// Moves the smallest nonzero entry of row `t` and column `t` to the
    /// pivot position.
    fn smallest_in_cross(&mut self, t: usize) {
        let mut best = (t, t);
        for i in t + 1..self.rows() {
            let x = &self.a[i][t];
            if !x.is_zero() && x.lt_mag(&self.a[best.0][best.1]) {
                best = (i, t);
            }
        }
        for j in t + 1..self.cols() {
            let x = &self.a[t][j];
            if !x.is_zero() && x.lt_mag(&self.a[best.0][best.1]) {
                best = (t, j);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }

    fn run(&mut self) -> Option<Vec<T>> {
        let mut factors = Vec::new();
        let limit = self.rows().min(self.cols());
        for t in 0..limit {
            let Some((i, j)) = self.smallest_from(t) else { break };
            self.swap_rows(t, i);
            self.swap_cols(t, j);
            loop {
                self.smallest_in_cross(t);
                let mut dirty = false;
                for i in t + 1..self.rows() {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let f = self.a[i][t].quot(&self.a[t][t]);
                    self.row_sub(i, t, &f)?;
                    dirty |= !self.a[i][t].is_zero();
                }
                for j in t + 1..self.cols() {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let f = self.a[t][j].quot(&self.a[t][t]);
                    self.col_sub(j, t, &f)?;
                    dirty |= !self.a[t][j].is_zero();
                }
                if dirty {
                    continue;
                }
                // the pivot must divide the remaining block
                let bad = (t + 1..self.rows())
                    .find(|&i| (t + 1..self.cols()).any(|j| !self.a[t][t].divides(&self.a[i][j])));
                match bad {
                    Some(i) => {
                        let one = T::one().neg()?;
                        self.row_sub(t, i, &one)?;
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t)?;
            }
            factors.push(self.a[t][t].clone());
        }
        Some(factors)
    }
}

fn snf_typed<T: Entry>(a: Vec<Vec<T>>, track: bool) -> Option<(Vec<T>, Option<(Vec<Vec<T>>, Vec<Vec<T>>, Vec<Vec<T>>)>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut w = Work {
        a,
        p: track.then(|| identity(rows)),
        q: track.then(|| identity(cols)),
    };
    let factors = w.run()?;
    let transforms = if track {
        Some((w.p.take().expect("tracked"), w.a, w.q.take().expect("tracked")))
    } else {
        None
    };
    Some((factors, transforms))
}

fn check_rectangular<T>(m: &[Vec<T>]) -> Result<()> {
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Precondition("matrix rows have unequal lengths".into()));
    }
    Ok(())
}

/// Invariant factors of an integer matrix given row-major.
pub fn smith_normal_form(m: &[Vec<i64>]) -> Result<SmithForm> {
    check_rectangular(m)?;
    let small: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some((f, _)) = snf_typed(small, false) {
        return Ok(SmithForm { factors: f.iter().map(Entry::big).collect() });
    }
    if let Some(factors) = modular_invariant_factors(m) {
        return Ok(SmithForm { factors });
    }
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    smith_normal_form_big(big)
}

pub fn smith_normal_form_big(m: Vec<Vec<BigInt>>) -> Result<SmithForm> {
    check_rectangular(&m)?;
    let (f, _) = snf_typed(m, false).expect("bigint arithmetic cannot overflow");
    Ok(SmithForm { factors: f })
}

/// Smith form together with unimodular `P`, `Q` and the diagonal `D`,
/// verified to satisfy `P · A · Q = D`.
#[derive(Clone, Debug)]
pub struct CertifiedSmith {
    pub form: SmithForm,
    pub p: Vec<Vec<BigInt>>,
    pub d: Vec<Vec<BigInt>>,
    pub q: Vec<Vec<BigInt>>,
}

pub fn smith_certified(m: &[Vec<i64>]) -> Result<CertifiedSmith> {
    check_rectangular(m)?;
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let (f, t) = snf_typed(a.clone(), true).expect("bigint arithmetic cannot overflow");
    let (p, d, q) = t.expect("tracked");
    if mat_mul(&mat_mul(&p, &a), &q) != d {
        return Err(Error::Precondition("Smith transform failed re-multiplication".into()));
    }
    Ok(CertifiedSmith { form: SmithForm { factors: f }, p, d, q })
}

pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(<BigInt as Zero>::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}
