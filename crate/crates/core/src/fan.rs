//! Rational simplicial fans: Bergman fans, stars, products, subdivisions, modifications.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::linalg::{is_unimodular_family, q, qvec, rank_of_vectors, solve, unimodular_completion, QMatrix, Q};
use crate::matroid::{elements, Matroid, MatroidError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("cone {0:?} is not in the fan")]
    ConeNotInFan(Vec<usize>),
    #[error("fan is not unimodular at cone {0:?}")]
    NotUnimodular(Vec<usize>),
    #[error("subfan is not contained in the fan")]
    SubfanNotContained,
    #[error("invalid fan: {0}")]
    Invalid(String),
    #[error("modification function is not integral on ray {0}")]
    NonIntegralModification(usize),
    #[error(transparent)]
    Matroid(#[from] MatroidError),
}

#[derive(Clone, Debug)]
pub struct Fan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    /// All cones including the empty one, sorted by size then lexicographically.
    cones: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    labels: Vec<String>,
    /// Ray index in the fan this one was derived from (identity when not derived).
    origin: Vec<usize>,
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

pub fn close_under_faces(maximal: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    for c in maximal {
        let mut c = c.clone();
        c.sort_unstable();
        c.dedup();
        for k in 0..=c.len() {
            for s in c.iter().copied().combinations(k) {
                all.insert(s);
            }
        }
    }
    if all.is_empty() {
        all.insert(Vec::new());
    }
    let mut v: Vec<Vec<usize>> = all.into_iter().collect();
    v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    v
}

impl Fan {
    /// Builds a fan from rays and a list of cones (maximal ones suffice).
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, cones: &[Vec<usize>]) -> Result<Fan, FanError> {
        let labels = (0..rays.len()).map(|i| i.to_string()).collect();
        Self::with_labels(dim, rays, cones, labels)
    }

    pub fn with_labels(dim: usize, rays: Vec<Vec<i64>>, cones: &[Vec<usize>], labels: Vec<String>) -> Result<Fan, FanError> {
        if rays.iter().any(|r| r.len() != dim) {
            return Err(FanError::Invalid("ray of wrong length".into()));
        }
        if rays.iter().any(|r| r.iter().all(|&x| x == 0)) {
            return Err(FanError::Invalid("zero ray".into()));
        }
        if cones.iter().flatten().any(|&i| i >= rays.len()) {
            return Err(FanError::Invalid("cone refers to a missing ray".into()));
        }
        let rays: Vec<Vec<i64>> = rays.iter().map(|r| primitive(r)).collect();
        let cones = close_under_faces(cones);
        for c in &cones {
            let vs: Vec<Vec<Q>> = c.iter().map(|&i| qvec(&rays[i])).collect();
            if rank_of_vectors(&vs, dim) != c.len() {
                return Err(FanError::Invalid(format!("cone {c:?} is not simplicial")));
            }
        }
        let index = cones.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        let origin = (0..rays.len()).collect();
        Ok(Fan { dim, rays, cones, index, labels, origin })
    }

    pub fn zero(dim: usize) -> Fan {
        Fan::new(dim, Vec::new(), &[]).expect("zero fan")
    }

    pub fn lattice_rank(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn n_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn origin(&self) -> &[usize] {
        &self.origin
    }

    pub fn set_origin(&mut self, origin: Vec<usize>) {
        assert_eq!(origin.len(), self.rays.len());
        self.origin = origin;
    }

    pub fn set_labels(&mut self, labels: Vec<String>) {
        assert_eq!(labels.len(), self.rays.len());
        self.labels = labels;
    }

    /// Dimension of the largest cone.
    pub fn dimension(&self) -> usize {
        self.cones.last().map_or(0, |c| c.len())
    }

    pub fn cone_index(&self, c: &[usize]) -> Option<usize> {
        let mut c = c.to_vec();
        c.sort_unstable();
        self.index.get(&c).copied()
    }

    pub fn is_cone(&self, c: &[usize]) -> bool {
        self.cone_index(c).is_some()
    }

    pub fn cones_of_dim(&self, k: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.cones.iter().filter(move |c| c.len() == k)
    }

    pub fn maximal_cones(&self) -> Vec<Vec<usize>> {
        self.cones
            .iter()
            .filter(|c| !self.cones.iter().any(|d| d.len() == c.len() + 1 && c.iter().all(|x| d.contains(x))))
            .cloned()
            .collect()
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dimension();
        self.maximal_cones().iter().all(|c| c.len() == d)
    }

    /// Rays not in `c` spanning a cone together with `c`.
    pub fn adjacent_rays(&self, c: &[usize]) -> Vec<usize> {
        (0..self.rays.len())
            .filter(|r| !c.contains(r))
            .filter(|&r| {
                let mut d = c.to_vec();
                d.push(r);
                self.is_cone(&d)
            })
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        self.maximal_cones().iter().all(|c| self.cone_is_unimodular(c))
    }

    pub fn cone_is_unimodular(&self, c: &[usize]) -> bool {
        let vs: Vec<Vec<i64>> = c.iter().map(|&i| self.rays[i].clone()).collect();
        is_unimodular_family(&vs)
    }

    /// Full-dimensional, pure, and every codimension-one cone lies in exactly two maximal
    /// cones on opposite sides.
    pub fn is_complete(&self) -> bool {
        let n = self.dim;
        if n == 0 {
            return true;
        }
        if self.dimension() != n || !self.is_pure() {
            return false;
        }
        for t in self.cones_of_dim(n - 1) {
            let adj = self.adjacent_rays(t);
            if adj.len() != 2 {
                return false;
            }
            // Opposite sides of the hyperplane spanned by t.
            let mut rows: Vec<Vec<i64>> = t.iter().map(|&i| self.rays[i].clone()).collect();
            rows.push(self.rays[adj[0]].clone());
            let d0 = crate::linalg::det(&QMatrix::from_ints(&rows));
            rows.pop();
            rows.push(self.rays[adj[1]].clone());
            let d1 = crate::linalg::det(&QMatrix::from_ints(&rows));
            if (d0 * d1).is_positive() {
                return false;
            }
        }
        true
    }

    /// Coefficients of `p` in the rays of cone `c` when `p` lies in its linear span.
    pub fn cone_coordinates(&self, c: &[usize], p: &[Q]) -> Option<Vec<Q>> {
        if c.is_empty() {
            return if p.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
        }
        let cols: Vec<Vec<Q>> = c.iter().map(|&i| qvec(&self.rays[i])).collect();
        solve(&QMatrix::from_cols(&cols, self.dim), p).ok()
    }

    pub fn cone_contains(&self, c: &[usize], p: &[Q]) -> bool {
        self.cone_coordinates(c, p).is_some_and(|x| x.iter().all(|v| !v.is_negative()))
    }

    /// Support membership.
    pub fn contains(&self, p: &[Q]) -> bool {
        self.maximal_cones().iter().any(|c| self.cone_contains(c, p))
    }

    /// Balancing with unit weights around every codimension-one cone of a pure fan.
    pub fn is_balanced(&self) -> bool {
        let d = self.dimension();
        if d == 0 {
            return true;
        }
        self.cones_of_dim(d - 1).all(|t| {
            let adj = self.adjacent_rays(t);
            let mut s = vec![Q::zero(); self.dim];
            for r in adj {
                for (x, y) in s.iter_mut().zip(&self.rays[r]) {
                    *x += q(*y);
                }
            }
            self.cone_coordinates(t, &s).is_some()
        })
    }

    pub fn star_fan(&self, sigma: &[usize]) -> Result<Fan, FanError> {
        let mut sigma = sigma.to_vec();
        sigma.sort_unstable();
        if !self.is_cone(&sigma) {
            return Err(FanError::ConeNotInFan(sigma));
        }
        let cols: Vec<Vec<i64>> = sigma.iter().map(|&i| self.rays[i].clone()).collect();
        let u = unimodular_completion(&cols, self.dim).ok_or_else(|| FanError::NotUnimodular(sigma.clone()))?;
        let k = sigma.len();
        let project = |v: &[i64]| -> Vec<i64> {
            (k..self.dim).map(|i| (0..self.dim).map(|j| u[i][j] * v[j]).sum()).collect()
        };
        let adj = self.adjacent_rays(&sigma);
        let new_index: HashMap<usize, usize> = adj.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let rays: Vec<Vec<i64>> = adj.iter().map(|&r| project(&self.rays[r])).collect();
        let cones: Vec<Vec<usize>> = self
            .cones
            .iter()
            .filter(|c| sigma.iter().all(|s| c.contains(s)))
            .map(|c| c.iter().filter(|x| !sigma.contains(x)).map(|x| new_index[x]).collect())
            .collect();
        let labels = adj.iter().map(|&r| self.labels[r].clone()).collect();
        let mut f = Fan::with_labels(self.dim - k, rays, &cones, labels)?;
        f.origin = adj;
        Ok(f)
    }

    pub fn product(a: &Fan, b: &Fan) -> Fan {
        let n = a.dim + b.dim;
        let mut rays = Vec::new();
        let mut labels = Vec::new();
        for (r, l) in a.rays.iter().zip(&a.labels) {
            let mut v = r.clone();
            v.extend(std::iter::repeat(0).take(b.dim));
            rays.push(v);
            labels.push(format!("{l}|"));
        }
        for (r, l) in b.rays.iter().zip(&b.labels) {
            let mut v = vec![0; a.dim];
            v.extend(r.iter().copied());
            rays.push(v);
            labels.push(format!("|{l}"));
        }
        let na = a.rays.len();
        let cones: Vec<Vec<usize>> = a
            .maximal_cones()
            .iter()
            .cartesian_product(b.maximal_cones().iter())
            .map(|(x, y)| x.iter().copied().chain(y.iter().map(|j| j + na)).collect())
            .collect();
        Fan::with_labels(n, rays, &cones, labels).expect("product of fans is a fan")
    }

    /// Stellar subdivision at the sum of the rays of `sigma`.
    pub fn star_subdivide(&self, sigma: &[usize]) -> Result<Fan, FanError> {
        let mut sigma = sigma.to_vec();
        sigma.sort_unstable();
        if !self.is_cone(&sigma) || sigma.is_empty() {
            return Err(FanError::ConeNotInFan(sigma));
        }
        if sigma.len() == 1 {
            return Ok(self.clone());
        }
        let mut rays = self.rays.clone();
        let new: Vec<i64> = (0..self.dim).map(|i| sigma.iter().map(|&r| self.rays[r][i]).sum()).collect();
        let rho = rays.len();
        rays.push(new);
        let mut maximal = Vec::new();
        for c in self.maximal_cones() {
            if sigma.iter().all(|s| c.contains(s)) {
                for &s in &sigma {
                    let mut d: Vec<usize> = c.iter().copied().filter(|&x| x != s).collect();
                    d.push(rho);
                    maximal.push(d);
                }
            } else {
                maximal.push(c);
            }
        }
        let mut labels = self.labels.clone();
        labels.push(format!("[{}]", sigma.iter().map(|&i| self.labels[i].as_str()).join("+")));
        let mut f = Fan::with_labels(self.dim, rays, &maximal, labels)?;
        let mut origin = self.origin.clone();
        origin.push(usize::MAX);
        f.origin = origin;
        Ok(f)
    }

    pub fn from_json(v: &Value) -> Result<Fan, FanError> {
        let j: FanJson = serde_json::from_value(v.clone()).map_err(|e| FanError::Invalid(e.to_string()))?;
        let labels = j.labels.unwrap_or_else(|| (0..j.rays.len()).map(|i| i.to_string()).collect());
        if labels.len() != j.rays.len() {
            return Err(FanError::Invalid("label count mismatch".into()));
        }
        Fan::with_labels(j.lattice_rank, j.rays, &j.cones, labels)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(FanJson {
            lattice_rank: self.dim,
            rays: self.rays.clone(),
            cones: self.maximal_cones(),
            labels: Some(self.labels.clone()),
        })
        .expect("fan serializes")
    }
}

#[derive(Serialize, Deserialize)]
struct FanJson {
    lattice_rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

/// Bergman fan of a simple matroid in Z^E / Z(1,..,1), with the coordinate of the last
/// ground-set element dropped. Rays are the proper flats in lattice order.
pub fn bergman_fan(m: &Matroid) -> Result<Fan, FanError> {
    let lattice = m.flats()?;
    let n = m.size();
    if n == 0 {
        return Ok(Fan::zero(0));
    }
    let flats: Vec<u32> = lattice.proper.iter().map(|&i| lattice.flats[i]).collect();
    let last = n - 1;
    let rays: Vec<Vec<i64>> = flats
        .iter()
        .map(|&f| {
            let shift = if f & (1 << last) != 0 { 1 } else { 0 };
            (0..last).map(|e| i64::from(f & (1 << e) != 0) - shift).collect()
        })
        .collect();
    let labels: Vec<String> =
        flats.iter().map(|&f| elements(f).iter().map(|&e| m.labels()[e].as_str()).join(",")).collect();
    // Maximal flags of proper flats.
    let mut chains: Vec<Vec<usize>> = Vec::new();
    fn extend(chain: &mut Vec<usize>, flats: &[u32], out: &mut Vec<Vec<usize>>) {
        let mut extended = false;
        for j in 0..flats.len() {
            let ok = match chain.last() {
                None => true,
                Some(&i) => flats[i] != flats[j] && flats[i] & !flats[j] == 0,
            };
            if ok {
                extended = true;
                chain.push(j);
                extend(chain, flats, out);
                chain.pop();
            }
        }
        if !extended {
            out.push(chain.clone());
        }
    }
    extend(&mut Vec::new(), &flats, &mut chains);
    Fan::with_labels(last, rays, &chains, labels)
}

/// Tropical modification of `base` along the subfan given by `divisor` cones.
///
/// The output lives in Z^n x Z with e_a the last unit vector. The piecewise linear
/// function f on `base` is the solution of div(f) = -divisor normalized to vanish on the
/// first maximal cone (or taken from `values` when supplied). `h` is an integral form on
/// the output lattice with h(e_a) = 1; the lift of v is (v, f(v) - h'(v)).
pub struct Modification {
    pub fan: Fan,
    /// Values of f on the rays of the base fan.
    pub values: Vec<Q>,
    /// Index in the output of the lift of each base ray; the new ray is last.
    pub lift: Vec<usize>,
    pub new_ray: usize,
}

pub fn divisor_function(base: &Fan, divisor: &BTreeSet<Vec<usize>>) -> Option<Vec<Q>> {
    let d = base.dimension();
    if d == 0 {
        return Some(Vec::new());
    }
    let nr = base.n_rays();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs = Vec::new();
    for t in base.cones_of_dim(d - 1) {
        let adj = base.adjacent_rays(t);
        let mut s = vec![Q::zero(); base.dim];
        for &r in &adj {
            for (x, y) in s.iter_mut().zip(&base.rays[r]) {
                *x += q(*y);
            }
        }
        let coeffs = base.cone_coordinates(t, &s)?;
        let mut row = vec![Q::zero(); nr];
        for &r in &adj {
            row[r] += Q::one();
        }
        for (c, &r) in coeffs.iter().zip(t) {
            row[r] -= c;
        }
        rows.push(row);
        rhs.push(if divisor.contains(t) { -Q::one() } else { Q::zero() });
    }
    let first = base.maximal_cones().into_iter().next().unwrap_or_default();
    for &r in &first {
        let mut row = vec![Q::zero(); nr];
        row[r] = Q::one();
        rows.push(row);
        rhs.push(Q::zero());
    }
    solve(&QMatrix::from_rows_with_cols(rows, nr), &rhs).ok()
}

pub fn tropical_modification(
    base: &Fan,
    divisor: &[Vec<usize>],
    h: Option<&[i64]>,
    values: Option<&[Q]>,
) -> Result<Modification, FanError> {
    let div: BTreeSet<Vec<usize>> = close_under_faces(divisor).into_iter().collect();
    if divisor.is_empty() {
        // Empty divisor: no vertical cones.
    } else if div.iter().any(|c| !base.is_cone(c)) {
        return Err(FanError::SubfanNotContained);
    }
    let values: Vec<Q> = match values {
        Some(v) => v.to_vec(),
        None => {
            let div_full: BTreeSet<Vec<usize>> = if divisor.is_empty() { BTreeSet::new() } else { div.clone() };
            divisor_function(base, &div_full).ok_or_else(|| FanError::Invalid("no function with this divisor".into()))?
        }
    };
    let n = base.dim;
    let h: Vec<i64> = match h {
        Some(h) => h.to_vec(),
        None => {
            let mut v = vec![0; n + 1];
            v[n] = 1;
            v
        }
    };
    if h.len() != n + 1 || h[n] != 1 {
        return Err(FanError::Invalid("h must have h(e_a) = 1".into()));
    }
    let mut rays = Vec::new();
    for (i, r) in base.rays.iter().enumerate() {
        let fv = &values[i];
        if !fv.denom().is_one() {
            return Err(FanError::NonIntegralModification(i));
        }
        let fv: i64 = crate::linalg::to_i64(fv).ok_or(FanError::NonIntegralModification(i))?;
        let hv: i64 = r.iter().zip(&h).map(|(a, b)| a * b).sum();
        let mut v = r.clone();
        v.push(fv - hv);
        rays.push(v);
    }
    let new_ray = rays.len();
    let mut up = vec![0; n + 1];
    up[n] = 1;
    rays.push(up);
    let mut cones: Vec<Vec<usize>> = base.maximal_cones();
    if !divisor.is_empty() {
        for c in div.iter() {
            let mut d = c.clone();
            d.push(new_ray);
            cones.push(d);
        }
    }
    let mut labels = base.labels.clone();
    labels.push("a".into());
    let fan = Fan::with_labels(n + 1, rays, &cones, labels)?;
    Ok(Modification { fan, values, lift: (0..new_ray).collect(), new_ray })
}

/// Face poset of the canonical compactification: pairs (tau, sigma) with tau a face of sigma.
#[derive(Clone, Debug)]
pub struct CompactifiedFanPoset {
    /// (tau, sigma) as cone indices of the fan.
    pub faces: Vec<(usize, usize)>,
    pub dims: Vec<usize>,
    /// Pairs (i, j) with faces[i] a facet of faces[j].
    pub covers: Vec<(usize, usize)>,
    pub sedentarity: Vec<usize>,
}

pub fn compactified_face_poset(f: &Fan) -> CompactifiedFanPoset {
    let mut faces = Vec::new();
    for (si, s) in f.cones.iter().enumerate() {
        for (ti, t) in f.cones.iter().enumerate() {
            if t.iter().all(|x| s.contains(x)) {
                faces.push((ti, si));
            }
        }
    }
    faces.sort_by_key(|&(t, s)| (f.cones[s].len() - f.cones[t].len(), t, s));
    let dims: Vec<usize> = faces.iter().map(|&(t, s)| f.cones[s].len() - f.cones[t].len()).collect();
    let pos: HashMap<(usize, usize), usize> = faces.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut covers = Vec::new();
    for (j, &(t, s)) in faces.iter().enumerate() {
        let (tc, sc) = (&f.cones[t], &f.cones[s]);
        for &x in sc.iter().filter(|x| !tc.contains(x)) {
            let smaller: Vec<usize> = sc.iter().copied().filter(|&y| y != x).collect();
            covers.push((pos[&(t, f.cone_index(&smaller).unwrap())], j));
            let mut bigger = tc.clone();
            bigger.push(x);
            covers.push((pos[&(f.cone_index(&bigger).unwrap(), s)], j));
        }
    }
    covers.sort_unstable();
    let sedentarity = faces.iter().map(|&(t, _)| t).collect();
    CompactifiedFanPoset { faces, dims, covers, sedentarity }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn tp2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn bergman_u33() {
        let f = bergman_fan(&Matroid::uniform(3, 3)).unwrap();
        assert_eq!(f.n_rays(), 6);
        assert_eq!(f.maximal_cones().len(), 6);
        assert!(f.is_complete());
        assert!(f.is_unimodular());
        let r: BTreeSet<Vec<i64>> = f.rays().iter().cloned().collect();
        let expected: BTreeSet<Vec<i64>> =
            [vec![1, 0], vec![0, 1], vec![-1, -1], vec![1, 1], vec![0, -1], vec![-1, 0]].into_iter().collect();
        assert_eq!(r, expected);
    }

    #[test]
    fn bergman_u23_and_rank_one() {
        let f = bergman_fan(&Matroid::uniform(2, 3)).unwrap();
        assert_eq!((f.n_rays(), f.dimension()), (3, 1));
        assert!(f.is_pure() && f.is_balanced());
        let f = bergman_fan(&Matroid::uniform(1, 1)).unwrap();
        assert_eq!(f.n_rays(), 0);
    }

    #[test]
    fn stars() {
        let f = bergman_fan(&Matroid::uniform(3, 3)).unwrap();
        assert_eq!(f.star_fan(&[]).unwrap().n_rays(), 6);
        let r0 = f.labels().iter().position(|l| l == "0").unwrap();
        let s = f.star_fan(&[r0]).unwrap();
        assert_eq!(s.n_rays(), 2);
        let mut l: Vec<&str> = s.labels().iter().map(|x| x.as_str()).collect();
        l.sort_unstable();
        assert_eq!(l, vec!["0,1", "0,2"]);
        let m = f.maximal_cones()[0].clone();
        assert_eq!(f.star_fan(&m).unwrap().n_rays(), 0);
    }

    #[test]
    fn products_and_subdivisions() {
        let tp1 = Fan::new(1, vec![vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap();
        let sq = Fan::product(&tp1, &tp1);
        assert_eq!((sq.n_rays(), sq.maximal_cones().len()), (4, 4));
        assert!(sq.is_complete());
        let b = tp2().star_subdivide(&[0, 1]).unwrap();
        assert_eq!((b.n_rays(), b.maximal_cones().len()), (4, 4));
        assert!(b.is_unimodular() && b.is_complete());
        assert_eq!(tp2().star_subdivide(&[0]).unwrap().cones(), tp2().cones());
    }

    #[test]
    fn unimodularity_flags() {
        let quad = Fan::new(2, vec![vec![1, 0], vec![0, 1]], &[vec![0, 1]]).unwrap();
        assert!(quad.is_unimodular());
        let bad = Fan::new(2, vec![vec![1, 0], vec![1, 2]], &[vec![0, 1]]).unwrap();
        assert!(!bad.is_unimodular());
    }

    #[test]
    fn line_modified_at_origin_is_tropical_line() {
        let line = Fan::new(1, vec![vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap();
        let m = tropical_modification(&line, &[vec![]], None, None).unwrap();
        assert_eq!(m.fan.n_rays(), 3);
        assert!(m.fan.is_balanced());
        assert_eq!(m.fan.dimension(), 1);
    }

    #[test]
    fn compactified_posets() {
        assert_eq!(compactified_face_poset(&Fan::zero(0)).faces.len(), 1);
        let ray = Fan::new(1, vec![vec![1]], &[vec![0]]).unwrap();
        assert_eq!(compactified_face_poset(&ray).faces.len(), 3);
        let tp1 = Fan::new(1, vec![vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap();
        let p = compactified_face_poset(&tp1);
        assert_eq!(p.faces.len(), 5);
        assert_eq!(p.covers.len(), 4);
    }
}
