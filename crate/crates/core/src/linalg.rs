//! Exact linear algebra over the rationals.

use std::fmt;
use std::ops::{Index, IndexMut};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q` or a decimal integer string.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Q::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Q::from_integer(n))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix with the given shape from rows; `cols` matters when there are no rows.
    pub fn from_rows_with_cols(rows: Vec<Vec<Q>>, cols: usize) -> Self {
        assert!(rows.iter().all(|x| x.len() == cols), "ragged rows");
        let r = rows.len();
        QMatrix { rows: r, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Q>], nrows: usize) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), nrows);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        s += a * b;
                    }
                }
                s
            })
            .collect()
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        let data = self.data.iter().map(|a| a * c).collect();
        QMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> QMatrix {
        self.scale(&q(-1))
    }

    pub fn select_rows(&self, idx: &[usize]) -> QMatrix {
        Self::from_rows_with_cols(idx.iter().map(|&i| self.row(i).to_vec()).collect(), self.cols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> QMatrix {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn hstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn vstack(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        QMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Copies `block` into `self` with top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMatrix {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        m
    }

    pub fn pow(&self, k: usize) -> QMatrix {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = self.mul(&out);
        }
        out
    }
}

/// Reduced row echelon form together with pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: QMatrix,
    pub pivots: Vec<usize>,
}

pub fn rref(m: &QMatrix) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..cols {
            if !a[(r, j)].is_zero() {
                a[(r, j)] *= &inv;
            }
        }
        let pivot_row: Vec<(usize, Q)> =
            (c..cols).filter(|&j| !a[(r, j)].is_zero()).map(|j| (j, a[(r, j)].clone())).collect();
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for (j, v) in &pivot_row {
                let t = &f * v;
                a[(i, *j)] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

fn clear_denominators(row: &[Q]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// Rank over Q by fraction-free (Bareiss) elimination on the row-scaled integer matrix.
pub fn rank(m: &QMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = (0..m.rows).map(|i| clear_denominators(m.row(i))).collect();
    bareiss_rank(&mut a, m.cols)
}

fn bareiss_rank(a: &mut [Vec<BigInt>], cols: usize) -> usize {
    let rows = a.len();
    let mut r = 0;
    let mut prev = BigInt::one();
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix (Bareiss).
pub fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

pub fn det(m: &QMatrix) -> Q {
    assert!(m.is_square());
    let n = m.rows;
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            for j in 0..n {
                a.data.swap(p * n + j, c * n + j);
            }
            d = -d;
        }
        let piv = a[(c, c)].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &piv;
            for j in c..n {
                let t = &f * &a[(c, j)];
                a[(i, j)] -= t;
            }
        }
    }
    d
}

/// Basis of the right null space.
pub fn kernel_basis(m: &QMatrix) -> Vec<Vec<Q>> {
    let Rref { matrix, pivots } = rref(m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); m.cols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -matrix[(r, f)].clone();
            }
            v
        })
        .collect()
}

/// Some solution of `m x = b`.
pub fn solve(m: &QMatrix, b: &[Q]) -> Result<Vec<Q>, LinalgError> {
    if b.len() != m.rows {
        return Err(LinalgError::Dimension(format!("{} rows vs rhs of length {}", m.rows, b.len())));
    }
    let aug = m.hstack(&QMatrix::from_cols(&[b.to_vec()], m.rows));
    let Rref { matrix, pivots } = rref(&aug);
    if pivots.last() == Some(&m.cols) {
        return Err(LinalgError::Inconsistent);
    }
    let mut x = vec![Q::zero(); m.cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = matrix[(r, m.cols)].clone();
    }
    Ok(x)
}

pub fn inverse(m: &QMatrix) -> Option<QMatrix> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows;
    if n == 0 {
        return Some(QMatrix::zeros(0, 0));
    }
    let aug = m.hstack(&QMatrix::identity(n));
    let Rref { matrix, pivots } = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(matrix.block(0, n, n, n))
}

/// Basis of the column space, picked among the columns of `m`.
pub fn column_space(m: &QMatrix) -> Vec<Vec<Q>> {
    rref(m).pivots.iter().map(|&j| m.column(j)).collect()
}

/// Reduced basis of the row space.
pub fn row_space(m: &QMatrix) -> Vec<Vec<Q>> {
    let r = rref(m);
    (0..r.pivots.len()).map(|i| r.matrix.row(i).to_vec()).collect()
}

/// Rank of a family of vectors of common length `n`.
pub fn rank_of_vectors(vs: &[Vec<Q>], n: usize) -> usize {
    rank(&QMatrix::from_rows_with_cols(vs.to_vec(), n))
}

/// Basis of the intersection of two subspaces of Q^n given by spanning sets.
pub fn intersect_subspaces(a: &[Vec<Q>], b: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve sum x_i a_i = sum y_j b_j.
    let ma = QMatrix::from_cols(a, n);
    let mb = QMatrix::from_cols(b, n);
    let ker = kernel_basis(&ma.hstack(&mb.neg()));
    let vs: Vec<Vec<Q>> = ker.iter().map(|k| ma.mul_vec(&k[..a.len()])).collect();
    row_space(&QMatrix::from_rows_with_cols(vs, n))
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies in its span.
pub fn coords_in(basis: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let n = v.len();
    if basis.is_empty() {
        return if v.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
    }
    solve(&QMatrix::from_cols(basis, n), v).ok()
}

/// Indices of standard basis vectors extending the span of `vs` to all of Q^n.
pub fn complement_indices(vs: &[Vec<Q>], n: usize) -> Vec<usize> {
    let mut cur: Vec<Vec<Q>> = row_space(&QMatrix::from_rows_with_cols(vs.to_vec(), n));
    let mut r = cur.len();
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = vec![Q::zero(); n];
        e[i] = Q::one();
        cur.push(e);
        let nr = rank_of_vectors(&cur, n);
        if nr > r {
            r = nr;
            out.push(i);
        } else {
            cur.pop();
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_zero: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.n_plus + self.n_minus + self.n_zero
    }

    pub fn index(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }
}

/// Sylvester signature by symmetric congruence diagonalization.
///
/// Pivots on the diagonal entry of largest absolute value; when the remaining diagonal
/// vanishes, a hyperbolic 2x2 block is split off instead.
pub fn signature(m: &QMatrix) -> Result<Signature, LinalgError> {
    if !m.is_symmetric() {
        return Err(LinalgError::NotSymmetric);
    }
    let mut a = m.clone();
    let mut alive: Vec<usize> = (0..m.rows).collect();
    let mut sig = Signature { n_plus: 0, n_minus: 0, n_zero: 0 };
    while !alive.is_empty() {
        let best = alive
            .iter()
            .copied()
            .filter(|&i| !a[(i, i)].is_zero())
            .fold(None::<usize>, |acc, i| match acc {
                Some(b) if a[(b, b)].abs() >= a[(i, i)].abs() => Some(b),
                _ => Some(i),
            });
        if let Some(p) = best {
            let piv = a[(p, p)].clone();
            if piv.is_positive() {
                sig.n_plus += 1;
            } else {
                sig.n_minus += 1;
            }
            alive.retain(|&i| i != p);
            let col: Vec<(usize, Q)> = alive.iter().map(|&i| (i, a[(i, p)].clone())).collect();
            for &(i, ref ai) in &col {
                if ai.is_zero() {
                    continue;
                }
                let f = ai / &piv;
                for &(j, ref aj) in &col {
                    if !aj.is_zero() {
                        let t = &f * aj;
                        a[(i, j)] -= t;
                    }
                }
            }
            continue;
        }
        let off = alive
            .iter()
            .flat_map(|&i| alive.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !a[(i, j)].is_zero());
        let Some((p, r)) = off else {
            sig.n_zero += alive.len();
            break;
        };
        // Block [[0,b],[b,0]] has signature (1,1); take the Schur complement.
        sig.n_plus += 1;
        sig.n_minus += 1;
        let b = a[(p, r)].clone();
        alive.retain(|&i| i != p && i != r);
        let cp: Vec<Q> = alive.iter().map(|&i| a[(i, p)].clone()).collect();
        let cr: Vec<Q> = alive.iter().map(|&i| a[(i, r)].clone()).collect();
        for (ii, &i) in alive.iter().enumerate() {
            for (jj, &j) in alive.iter().enumerate() {
                let t = (&cp[ii] * &cr[jj] + &cr[ii] * &cp[jj]) / &b;
                if !t.is_zero() {
                    a[(i, j)] -= t;
                }
            }
        }
    }
    Ok(sig)
}

/// gcd of all k x k minors of an integer matrix (0 if all vanish).
pub fn smith_gcd_minors(m: &[Vec<i64>], k: usize) -> BigInt {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if k == 0 {
        return BigInt::one();
    }
    assert!(k <= rows.min(cols), "minor size exceeds matrix shape");
    let mut g = BigInt::zero();
    for rs in itertools::Itertools::combinations(0..rows, k) {
        for cs in itertools::Itertools::combinations(0..cols, k) {
            let sub: Vec<Vec<BigInt>> =
                rs.iter().map(|&i| cs.iter().map(|&j| BigInt::from(m[i][j])).collect()).collect();
            g = g.gcd(&det_int(&sub));
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

/// Whether the rows of `vs` extend to a basis of Z^n.
pub fn is_unimodular_family(vs: &[Vec<i64>]) -> bool {
    if vs.is_empty() {
        return true;
    }
    let n = vs[0].len();
    vs.len() <= n && smith_gcd_minors(vs, vs.len()).is_one()
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Unimodular integer matrix `u` with `u * cols(m) = [I; 0]`, when the columns of `m`
/// form part of a lattice basis. `m` is given as a list of column vectors of length n.
pub fn unimodular_completion(cols: &[Vec<i64>], n: usize) -> Option<Vec<Vec<i64>>> {
    let k = cols.len();
    // Work on the n x k matrix a with row operations tracked in u.
    let mut a: Vec<Vec<i128>> = (0..n).map(|i| cols.iter().map(|c| c[i] as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 1 } else { 0 }).collect()).collect();
    for c in 0..k {
        // Euclid on column c below row c.
        loop {
            let nz: Vec<usize> = (c..n).filter(|&i| a[i][c] != 0).collect();
            if nz.is_empty() {
                return None;
            }
            let p = *nz.iter().min_by_key(|&&i| a[i][c].abs()).unwrap();
            a.swap(p, c);
            u.swap(p, c);
            let mut done = true;
            for i in c + 1..n {
                if a[i][c] != 0 {
                    let f = a[i][c].div_euclid(a[c][c]);
                    for j in 0..k {
                        a[i][j] -= f * a[c][j];
                    }
                    for j in 0..n {
                        u[i][j] -= f * u[c][j];
                    }
                    if a[i][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[c][c].abs() != 1 {
            return None;
        }
        if a[c][c] < 0 {
            for j in 0..k {
                a[c][j] = -a[c][j];
            }
            for j in 0..n {
                u[c][j] = -u[c][j];
            }
        }
    }
    // Clear above the diagonal.
    for c in (0..k).rev() {
        for i in 0..c {
            let f = a[i][c];
            if f != 0 {
                for j in 0..k {
                    a[i][j] -= f * a[c][j];
                }
                for j in 0..n {
                    u[i][j] -= f * u[c][j];
                }
            }
        }
    }
    Some(u.into_iter().map(|r| r.into_iter().map(|x| x as i64).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_ints(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::identity(2)), 2);
        assert_eq!(rank(&QMatrix::zeros(3, 4)), 0);
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]])), 1);
    }

    #[test]
    fn kernel_examples() {
        assert!(kernel_basis(&QMatrix::identity(3)).is_empty());
        let k = kernel_basis(&m(&[&[1, 1]]));
        assert_eq!(k, vec![vec![q(-1), q(1)]]);
        let k = kernel_basis(&m(&[&[1, 2], &[2, 4]]));
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] / &k[0][1], q(-2));
    }

    #[test]
    fn solve_examples() {
        let b = vec![q(3), qf(1, 2)];
        assert_eq!(solve(&QMatrix::identity(2), &b).unwrap(), b);
        let x = solve(&m(&[&[1, 1]]), &[q(1)]).unwrap();
        assert_eq!(&x[0] + &x[1], q(1));
        assert_eq!(solve(&m(&[&[0]]), &[q(1)]), Err(LinalgError::Inconsistent));
    }

    #[test]
    fn signature_examples() {
        let s = signature(&QMatrix::identity(2)).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (2, 0, 0));
        let s = signature(&m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 1, 0));
        assert_eq!(signature(&m(&[&[0, 1], &[0, 0]])), Err(LinalgError::NotSymmetric));
        let s = signature(&m(&[&[0, 0, 1], &[0, 0, 0], &[1, 0, 0]])).unwrap();
        assert_eq!((s.n_plus, s.n_minus, s.n_zero), (1, 1, 1));
    }

    #[test]
    fn gcd_minor_examples() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(smith_gcd_minors(&id, 3), BigInt::from(1));
        assert_eq!(smith_gcd_minors(&[vec![2, 0], vec![0, 2]], 2), BigInt::from(4));
        assert_eq!(smith_gcd_minors(&[vec![1, 1], vec![0, 1]], 2), BigInt::from(1));
    }

    #[test]
    fn completion_maps_columns_to_unit_vectors() {
        let cols = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let u = unimodular_completion(&cols, 3).unwrap();
        for (j, c) in cols.iter().enumerate() {
            for i in 0..3 {
                let v: i64 = (0..3).map(|t| u[i][t] * c[t]).sum();
                assert_eq!(v, if i == j { 1 } else { 0 });
            }
        }
        assert!(unimodular_completion(&[vec![2, 0]], 2).is_none());
    }

    #[test]
    fn intersection_of_planes() {
        let a = vec![qvec(&[1, 0, 0]), qvec(&[0, 1, 0])];
        let b = vec![qvec(&[0, 1, 0]), qvec(&[0, 0, 1])];
        let i = intersect_subspaces(&a, &b, 3);
        assert_eq!(i.len(), 1);
        assert_eq!(rank_of_vectors(&[i[0].clone(), qvec(&[0, 1, 0])], 3), 1);
    }
}
