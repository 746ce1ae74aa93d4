//! Coordinates on exterior powers of Q^m in the basis e_I, I increasing.

use crate::linalg::{det, QMatrix, Q};
use itertools::Itertools;
use num::{One, Zero};
use std::collections::HashMap;

/// p-subsets of 0..m in lexicographic order.
pub fn subsets(m: usize, p: usize) -> Vec<Vec<usize>> {
    (0..m).combinations(p).collect()
}

pub fn binomial(m: usize, p: usize) -> usize {
    if p > m {
        return 0;
    }
    (0..p).fold(1usize, |acc, i| acc * (m - i) / (i + 1))
}

fn subset_index(m: usize, p: usize) -> HashMap<Vec<usize>, usize> {
    subsets(m, p).into_iter().enumerate().map(|(i, s)| (s, i)).collect()
}

/// e_J ^ e_K = sign * e_{J u K} for disjoint J, K.
fn shuffle_sign(j: &[usize], k: &[usize]) -> i32 {
    let inv: usize = j.iter().map(|a| k.iter().filter(|b| *b < a).count()).sum();
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Wedge of a p-vector and an r-vector in Q^m. Also valid for forms in the dual basis.
pub fn wedge(a: &[Q], p: usize, b: &[Q], r: usize, m: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); binomial(m, p + r)];
    if p + r > m {
        return out;
    }
    let sp = subsets(m, p);
    let sr = subsets(m, r);
    let idx = subset_index(m, p + r);
    for (i, j) in sp.iter().enumerate() {
        if a[i].is_zero() {
            continue;
        }
        for (l, k) in sr.iter().enumerate() {
            if b[l].is_zero() || k.iter().any(|x| j.contains(x)) {
                continue;
            }
            let mut u: Vec<usize> = j.iter().chain(k).copied().collect();
            u.sort_unstable();
            let t = &a[i] * &b[l];
            if shuffle_sign(j, k) > 0 {
                out[idx[&u]] += t;
            } else {
                out[idx[&u]] -= t;
            }
        }
    }
    out
}

/// v_1 ^ ... ^ v_p, with the empty product equal to 1 in the degree-0 part.
pub fn wedge_vectors(vs: &[Vec<Q>], m: usize) -> Vec<Q> {
    let p = vs.len();
    if p == 0 {
        return vec![Q::one()];
    }
    let mat = QMatrix::from_rows_with_cols(vs.to_vec(), m);
    subsets(m, p).iter().map(|cols| det(&mat.select_cols(cols))).collect()
}

/// Matrix of the p-th exterior power of a linear map given by its matrix.
pub fn compound(map: &QMatrix, p: usize) -> QMatrix {
    let (r, c) = (map.rows(), map.cols());
    let rs = subsets(r, p);
    let cs = subsets(c, p);
    let mut out = QMatrix::zeros(rs.len(), cs.len());
    if p == 0 {
        out[(0, 0)] = Q::one();
        return out;
    }
    for (i, ri) in rs.iter().enumerate() {
        let rows = map.select_rows(ri);
        for (j, cj) in cs.iter().enumerate() {
            out[(i, j)] = det(&rows.select_cols(cj));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;

    #[test]
    fn wedge_rules() {
        let e1 = qvec(&[1, 0, 0]);
        let e2 = qvec(&[0, 1, 0]);
        let a = wedge(&e1, 1, &e2, 1, 3);
        let b = wedge(&e2, 1, &e1, 1, 3);
        assert_eq!(a, b.iter().map(|x| -x.clone()).collect::<Vec<_>>());
        assert_eq!(a, wedge_vectors(&[e1.clone(), e2.clone()], 3));
        assert!(wedge(&e1, 1, &e1, 1, 3).iter().all(|x| x.is_zero()));
        assert_eq!(binomial(5, 2), 10);
    }

    #[test]
    fn compound_is_functorial() {
        let a = QMatrix::from_ints(&[vec![1, 2, 0], vec![0, 1, 3], vec![1, 0, 1]]);
        let b = QMatrix::from_ints(&[vec![2, 0, 1], vec![1, 1, 0], vec![0, 3, 1]]);
        assert_eq!(compound(&a.mul(&b), 2), compound(&a, 2).mul(&compound(&b, 2)));
        assert_eq!(compound(&a, 3)[(0, 0)], det(&a));
    }
}
