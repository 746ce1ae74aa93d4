//! Cellular tropical cohomology of the canonical compactification of a simplicial polyhedral
//! complex with unimodular recession fan.
//!
//! A face of the compactification is a pair (cell of Y, sedentarity S) with S a subset of the
//! cell's rays. Writing V for the vertices and R for the remaining rays, the face is
//! combinatorially a simplex on V times a cube [0, inf]^R, and its dimension is |V| - 1 + |R|.

pub mod exterior;
mod deligne;
mod operators;

pub use deligne::{deligne_sequence, DeligneReport};
pub use operators::{
    hodge_index_check, monodromy_cochain, projective_bundle_check, Basepoint, HodgeIndexReport, MonodromyOperator,
    ProjectiveBundleReport,
};

use crate::chow::ChowError;
use crate::fan::{Fan, FanError};
use crate::linalg::{coords_in, inverse, kernel_basis, qvec, rank, row_space, solve, unimodular_completion, QMatrix, Q};
use crate::polyhedral::{Cell, PolyComplex, PolyError};
use exterior::{binomial, compound, wedge, wedge_vectors};
use itertools::Itertools;
use num::{Integer, One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TropError {
    #[error("complex is not simplicial")]
    NotSimplicial,
    #[error("recession fan is not unimodular")]
    RecessionNotUnimodular,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Chow(#[from] ChowError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompactFace {
    /// Index of the underlying cell of Y.
    pub cell: usize,
    pub v: Vec<usize>,
    /// Rays of the cell not in the sedentarity.
    pub r: Vec<usize>,
    pub sed: Vec<usize>,
    pub dim: usize,
}

impl CompactFace {
    /// Compact face of sedentarity zero.
    pub fn is_finite(&self) -> bool {
        self.sed.is_empty() && self.r.is_empty()
    }
}

/// Coordinates on the stratum N / span(S): an integral projection and a section of it.
#[derive(Clone, Debug)]
struct Stratum {
    proj: QMatrix,
    lift: QMatrix,
}

#[derive(Clone, Debug)]
pub struct CompactTropicalSpace {
    y: PolyComplex,
    fan: Fan,
    faces: Vec<CompactFace>,
    index: HashMap<(usize, Vec<usize>), usize>,
    /// Per face: its facets with incidence signs.
    facets: Vec<Vec<(usize, i32)>>,
    strata: HashMap<Vec<usize>, Stratum>,
    /// bases[p][face]: basis of F_p(face) inside the p-th exterior power of the stratum.
    bases: Vec<Vec<Vec<Vec<Q>>>>,
}

/// Incidence signs of covering pairs.
#[derive(Clone, Debug)]
pub struct SignFunction {
    pub signs: HashMap<(usize, usize), i32>,
}

impl SignFunction {
    pub fn sign(&self, gamma: usize, delta: usize) -> Option<i32> {
        self.signs.get(&(gamma, delta)).copied()
    }
}

/// The cochain complex C^{p,*} on a set of faces.
#[derive(Clone, Debug)]
pub struct Cochains {
    pub p: usize,
    /// Faces of each dimension q.
    pub faces: Vec<Vec<usize>>,
    pub offsets: Vec<Vec<usize>>,
    pub dims: Vec<usize>,
    /// d[q]: C^{p,q} -> C^{p,q+1}.
    pub d: Vec<QMatrix>,
}

impl Cochains {
    pub fn block_of(&self, q: usize, face: usize) -> Option<(usize, usize)> {
        let i = self.faces.get(q)?.iter().position(|&f| f == face)?;
        let end = self.offsets[q].get(i + 1).copied().unwrap_or(self.dims[q]);
        Some((self.offsets[q][i], end))
    }

    pub fn d_squared_vanishes(&self) -> bool {
        self.d.windows(2).all(|w| w[1].mul(&w[0]).is_zero())
    }

    /// Boundary of the chain complex C_{p,*}: transpose of the coboundary.
    pub fn chain_boundary(&self, q: usize) -> QMatrix {
        self.d[q - 1].transpose()
    }
}

/// Cohomology of one row C^{p,*}.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub p: usize,
    pub betti: Vec<usize>,
    /// Cocycles whose classes form a basis of H^{p,q}.
    pub reps: Vec<Vec<Vec<Q>>>,
}

/// Weight filtration on F^p of a face, subspaces written in the dual coordinates of F_p.
#[derive(Clone, Debug)]
pub struct WeightFiltration {
    pub face: usize,
    pub p: usize,
    pub face_dim: usize,
    /// tilde[s] for s = 0..=p is a basis of W~_s.
    pub tilde: Vec<Vec<Vec<Q>>>,
    pub graded_dims: Vec<usize>,
    /// dim of the tensor product of Lambda^s T*delta and F^{p-s} at the origin of the star.
    pub expected_graded_dims: Vec<usize>,
}

impl WeightFiltration {
    /// Basis of W~_s, with W~_{-1} = 0 and W~_s the whole space for s >= p.
    pub fn tilde_at(&self, s: i64) -> &[Vec<Q>] {
        if s < 0 {
            return &[];
        }
        let s = (s as usize).min(self.p);
        &self.tilde[s]
    }

    pub fn lower(&self, s: i64) -> &[Vec<Q>] {
        self.tilde_at(s + self.face_dim as i64)
    }

    pub fn upper(&self, s: i64) -> &[Vec<Q>] {
        self.tilde_at(self.face_dim as i64 - s)
    }

    pub fn graded_dims_match(&self) -> bool {
        self.graded_dims == self.expected_graded_dims
    }
}

pub(crate) fn projection_data(rays: &[Vec<i64>], n: usize) -> Option<(QMatrix, QMatrix)> {
    let u = unimodular_completion(rays, n)?;
    let k = rays.len();
    let um = QMatrix::from_ints(&u);
    let inv = inverse(&um).expect("unimodular");
    let proj = um.select_rows(&(k..n).collect::<Vec<_>>());
    let lift = inv.select_cols(&(k..n).collect::<Vec<_>>());
    Some((proj, lift))
}

fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Picks vectors of `extra` that are independent modulo `base`; returns them.
pub(crate) fn complement_in(base: &[Vec<Q>], extra: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    let mut cur: Vec<Vec<Q>> = base.to_vec();
    let mut r = rank(&QMatrix::from_rows_with_cols(cur.clone(), n));
    let mut out = Vec::new();
    for v in extra {
        cur.push(v.clone());
        let nr = rank(&QMatrix::from_rows_with_cols(cur.clone(), n));
        if nr > r {
            r = nr;
            out.push(v.clone());
        } else {
            cur.pop();
        }
    }
    out
}

/// Coordinates of v in the family `basis ++ comp` restricted to the `comp` part.
pub(crate) fn coords_mod(base: &[Vec<Q>], comp: &[Vec<Q>], v: &[Q]) -> Option<Vec<Q>> {
    let all: Vec<Vec<Q>> = base.iter().chain(comp).cloned().collect();
    let c = coords_in(&all, v)?;
    Some(c[base.len()..].to_vec())
}

impl CompactTropicalSpace {
    pub fn compactify(y: &PolyComplex) -> Result<CompactTropicalSpace, TropError> {
        if !y.is_simplicial() {
            return Err(TropError::NotSimplicial);
        }
        let fan = y.recession_fan()?;
        if !fan.is_unimodular() {
            return Err(TropError::RecessionNotUnimodular);
        }
        let n = y.ambient_dim();
        let mut faces = Vec::new();
        for (ci, c) in y.faces().iter().enumerate() {
            for s in c.r.iter().copied().powerset() {
                let r: Vec<usize> = c.r.iter().copied().filter(|x| !s.contains(x)).collect();
                let dim = c.v.len() - 1 + r.len();
                faces.push(CompactFace { cell: ci, v: c.v.clone(), r, sed: s, dim });
            }
        }
        faces.sort_by(|a, b| (a.dim, a.cell, &a.sed).cmp(&(b.dim, b.cell, &b.sed)));
        let index: HashMap<(usize, Vec<usize>), usize> =
            faces.iter().enumerate().map(|(i, f)| ((f.cell, f.sed.clone()), i)).collect();
        let mut strata = HashMap::new();
        for f in &faces {
            if !strata.contains_key(&f.sed) {
                let rays: Vec<Vec<i64>> = f.sed.iter().map(|&r| y.rays()[r].clone()).collect();
                let (proj, lift) = projection_data(&rays, n).ok_or(TropError::RecessionNotUnimodular)?;
                strata.insert(f.sed.clone(), Stratum { proj, lift });
            }
        }
        let mut x = CompactTropicalSpace { y: y.clone(), fan, faces, index, facets: Vec::new(), strata, bases: Vec::new() };
        x.facets = (0..x.faces.len()).map(|i| x.compute_facets(i)).collect();
        let d = x.dimension();
        x.bases = (0..=d).map(|p| (0..x.faces.len()).map(|i| x.compute_basis(p, i)).collect()).collect();
        Ok(x)
    }

    /// Compactification of a fan, seen as a complex with one vertex.
    pub fn of_fan(f: &Fan) -> Result<CompactTropicalSpace, TropError> {
        Self::compactify(&PolyComplex::from_fan(f))
    }

    fn compute_facets(&self, i: usize) -> Vec<(usize, i32)> {
        let f = &self.faces[i];
        let cell = self.y.face(f.cell);
        let mut out = Vec::new();
        let lookup = |c: Cell, sed: Vec<usize>| -> usize {
            let ci = self.y.face_index(&c).expect("face of a cell");
            self.index[&(ci, sed)]
        };
        if f.v.len() >= 2 {
            for (k, _) in f.v.iter().enumerate() {
                let v: Vec<usize> = f.v.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &x)| x).collect();
                let sign = if k % 2 == 0 { 1 } else { -1 };
                out.push((lookup(Cell::new(v, cell.r.clone()), f.sed.clone()), sign));
            }
        }
        for (j, &ray) in f.r.iter().enumerate() {
            let pos = f.v.len() - 1 + j;
            let base = if pos % 2 == 0 { 1 } else { -1 };
            let rs: Vec<usize> = cell.r.iter().copied().filter(|&x| x != ray).collect();
            out.push((lookup(Cell::new(f.v.clone(), rs), f.sed.clone()), -base));
            let mut sed = f.sed.clone();
            sed.push(ray);
            sed.sort_unstable();
            out.push((self.index[&(f.cell, sed)], base));
        }
        out
    }

    pub fn complex(&self) -> &PolyComplex {
        &self.y
    }

    pub fn recession(&self) -> &Fan {
        &self.fan
    }

    pub fn faces(&self) -> &[CompactFace] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &CompactFace {
        &self.faces[i]
    }

    pub fn face_id(&self, cell: usize, sed: &[usize]) -> Option<usize> {
        let mut s = sed.to_vec();
        s.sort_unstable();
        self.index.get(&(cell, s)).copied()
    }

    pub fn dimension(&self) -> usize {
        self.faces.iter().map(|f| f.dim).max().unwrap_or(0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.y.ambient_dim()
    }

    pub fn facets(&self, i: usize) -> &[(usize, i32)] {
        &self.facets[i]
    }

    /// Number of faces per dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut v = vec![0; self.dimension() + 1];
        for f in &self.faces {
            v[f.dim] += 1;
        }
        v
    }

    pub fn finite_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].is_finite()).collect()
    }

    /// Whether face a is a face of face b.
    pub fn is_face_of(&self, a: usize, b: usize) -> bool {
        let (fa, fb) = (&self.faces[a], &self.faces[b]);
        let (ca, cb) = (self.y.face(fa.cell), self.y.face(fb.cell));
        cb.contains(ca) && fb.sed.iter().all(|s| fa.sed.contains(s)) && fa.sed.iter().all(|s| ca.r.contains(s))
    }

    pub fn build_sign(&self) -> SignFunction {
        let mut signs = HashMap::new();
        for (i, fs) in self.facets.iter().enumerate() {
            for &(g, s) in fs {
                signs.insert((g, i), s);
            }
        }
        SignFunction { signs }
    }

    /// For every face and every face two dimensions below it, the signed count of chains
    /// through the intermediate faces vanishes.
    pub fn diamond_property_holds(&self) -> bool {
        (0..self.faces.len()).all(|i| {
            let mut acc: HashMap<usize, i32> = HashMap::new();
            for &(g, s) in &self.facets[i] {
                for &(h, t) in &self.facets[g] {
                    *acc.entry(h).or_default() += s * t;
                }
            }
            acc.values().all(|&v| v == 0)
        })
    }

    pub fn stratum_dim(&self, i: usize) -> usize {
        self.ambient_dim() - self.faces[i].sed.len()
    }

    /// Tangent generators of a face in the coordinates of its stratum: vertex differences
    /// followed by the rays not in the sedentarity.
    pub fn tangent(&self, i: usize) -> Vec<Vec<Q>> {
        let f = &self.faces[i];
        self.tangent_of(&f.v, &f.r, &f.sed)
    }

    fn tangent_of(&self, v: &[usize], r: &[usize], sed: &[usize]) -> Vec<Vec<Q>> {
        let st = &self.strata[sed];
        let verts = self.y.vertices();
        let mut out = Vec::new();
        for &w in &v[1..] {
            out.push(st.proj.mul_vec(&sub(&verts[w], &verts[v[0]])));
        }
        for &ray in r {
            out.push(st.proj.mul_vec(&qvec(&self.y.rays()[ray])));
        }
        out
    }

    /// Tangent spaces of the faces above i with the same sedentarity (maximal ones suffice).
    fn tangents_above(&self, i: usize) -> Vec<Vec<Vec<Q>>> {
        let f = &self.faces[i];
        let star = self.y.star(f.cell);
        let maximal: Vec<usize> = star
            .iter()
            .copied()
            .filter(|&c| !star.iter().any(|&d| d != c && self.y.face(d).contains(self.y.face(c))))
            .collect();
        maximal
            .iter()
            .map(|&c| {
                let cell = self.y.face(c);
                let r: Vec<usize> = cell.r.iter().copied().filter(|x| !f.sed.contains(x)).collect();
                self.tangent_of(&cell.v, &r, &f.sed)
            })
            .collect()
    }

    fn compute_basis(&self, p: usize, i: usize) -> Vec<Vec<Q>> {
        let m = self.stratum_dim(i);
        if p == 0 {
            return vec![vec![Q::one()]];
        }
        let mut gens = Vec::new();
        for t in self.tangents_above(i) {
            for s in t.iter().combinations(p) {
                let vs: Vec<Vec<Q>> = s.into_iter().cloned().collect();
                gens.push(wedge_vectors(&vs, m));
            }
        }
        if gens.is_empty() {
            return Vec::new();
        }
        row_space(&QMatrix::from_rows_with_cols(gens, binomial(m, p)))
    }

    /// Basis of F_p(face) inside the p-th exterior power of the stratum.
    pub fn basis(&self, p: usize, i: usize) -> &[Vec<Q>] {
        &self.bases[p][i]
    }

    pub fn coeff_dim(&self, p: usize, i: usize) -> usize {
        if p >= self.bases.len() {
            0
        } else {
            self.bases[p][i].len()
        }
    }

    /// Linear map from the stratum of b to the stratum of a (a face of b).
    fn stratum_map(&self, a: usize, b: usize) -> QMatrix {
        let sa = &self.strata[&self.faces[a].sed];
        let sb = &self.strata[&self.faces[b].sed];
        sa.proj.mul(&sb.lift)
    }

    /// Restriction i*: F^p(gamma) -> F^p(delta) for gamma a face of delta, as a matrix in the
    /// dual coordinates.
    pub fn restriction(&self, p: usize, gamma: usize, delta: usize) -> QMatrix {
        let bd = self.basis(p, delta);
        let bg = self.basis(p, gamma);
        let mut out = QMatrix::zeros(bd.len(), bg.len());
        if bd.is_empty() || bg.is_empty() {
            return out;
        }
        let c = compound(&self.stratum_map(gamma, delta), p);
        for (j, b) in bd.iter().enumerate() {
            let img = c.mul_vec(b);
            let co = coords_in(bg, &img).expect("multi-tangent spaces map into each other");
            for (k, x) in co.into_iter().enumerate() {
                out[(j, k)] = x;
            }
        }
        out
    }

    /// Cochain complex C^{p,*} on the faces accepted by `keep`.
    pub fn cochains_on(&self, p: usize, keep: impl Fn(usize) -> bool) -> Cochains {
        let d = self.dimension();
        let mut faces = vec![Vec::new(); d + 1];
        for (i, f) in self.faces.iter().enumerate() {
            if keep(i) {
                faces[f.dim].push(i);
            }
        }
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        for fs in &faces {
            let mut o = Vec::new();
            let mut acc = 0;
            for &f in fs {
                o.push(acc);
                acc += self.coeff_dim(p, f);
            }
            offsets.push(o);
            dims.push(acc);
        }
        let pos: HashMap<usize, usize> = faces.iter().flat_map(|fs| fs.iter().enumerate().map(|(k, &f)| (f, k))).collect();
        let dmats: Vec<QMatrix> = (0..d)
            .into_par_iter()
            .map(|q| {
                let mut m = QMatrix::zeros(dims[q + 1], dims[q]);
                for (k, &delta) in faces[q + 1].iter().enumerate() {
                    for &(gamma, s) in &self.facets[delta] {
                        let Some(&gk) = pos.get(&gamma) else { continue };
                        let r = self.restriction(p, gamma, delta);
                        let r = if s < 0 { r.neg() } else { r };
                        m.set_block(offsets[q + 1][k], offsets[q][gk], &r);
                    }
                }
                m
            })
            .collect();
        Cochains { p, faces, offsets, dims, d: dmats }
    }

    pub fn cochains(&self, p: usize) -> Cochains {
        self.cochains_on(p, |_| true)
    }

    pub fn tropical_cohomology(&self, p: usize) -> Cohomology {
        let c = self.cochains(p);
        cohomology_of(&c)
    }

    /// Table h[p][q] of tropical Hodge numbers.
    pub fn hodge_numbers(&self) -> Vec<Vec<usize>> {
        (0..=self.dimension()).into_par_iter().map(|p| betti_of(&self.cochains(p))).collect()
    }

    pub fn betti_json(&self) -> Value {
        let h = self.hodge_numbers();
        let mut out = Vec::new();
        for (p, row) in h.iter().enumerate() {
            for (q, &dim) in row.iter().enumerate() {
                out.push(json!({"p": p, "q": q, "dim": dim}));
            }
        }
        Value::Array(out)
    }

    /// Quotient of the stratum of face i by its tangent space, as a projection matrix.
    fn normal_projection(&self, i: usize) -> QMatrix {
        let m = self.stratum_dim(i);
        let t = self.tangent(i);
        if t.is_empty() {
            return QMatrix::identity(m);
        }
        let ann = kernel_basis(&QMatrix::from_rows_with_cols(t, m));
        QMatrix::from_rows_with_cols(ann, m)
    }

    /// dim F_j at the origin of the star of face i.
    fn star_origin_dim(&self, i: usize, j: usize) -> usize {
        if j == 0 {
            return 1;
        }
        let pr = self.normal_projection(i);
        let k = pr.rows();
        if j > k {
            return 0;
        }
        let mut gens = Vec::new();
        for t in self.tangents_above(i) {
            let proj: Vec<Vec<Q>> = t.iter().map(|v| pr.mul_vec(v)).collect();
            for s in proj.iter().combinations(j) {
                gens.push(wedge_vectors(&s.into_iter().cloned().collect::<Vec<_>>(), k));
            }
        }
        if gens.is_empty() {
            0
        } else {
            rank(&QMatrix::from_rows_with_cols(gens, binomial(k, j)))
        }
    }

    pub fn weight_filtration(&self, i: usize, p: usize) -> WeightFiltration {
        let m = self.stratum_dim(i);
        let b = self.basis(p, i);
        let e = self.faces[i].dim;
        let t = self.tangent(i);
        let mut tilde = Vec::new();
        for s in 0..=p {
            // Span of Lambda^{s+1} T ^ F_{p-s-1}, in coordinates of the basis b.
            let mut rows: Vec<Vec<Q>> = Vec::new();
            if s < p && s < e {
                let lower = self.basis(p - s - 1, i);
                for ts in t.iter().combinations(s + 1) {
                    let w = wedge_vectors(&ts.into_iter().cloned().collect::<Vec<_>>(), m);
                    for g in lower {
                        let u = wedge(&w, s + 1, g, p - s - 1, m);
                        rows.push(coords_in(b, &u).expect("inside F_p"));
                    }
                }
            }
            let sub = if rows.is_empty() {
                (0..b.len()).map(|k| unit(b.len(), k)).collect()
            } else {
                kernel_basis(&QMatrix::from_rows_with_cols(rows, b.len()))
            };
            tilde.push(sub);
        }
        let mut graded_dims = Vec::new();
        let mut prev = 0;
        for s in 0..=p {
            graded_dims.push(tilde[s].len() - prev);
            prev = tilde[s].len();
        }
        let expected_graded_dims = (0..=p).map(|s| binomial(e, s) * self.star_origin_dim(i, p - s)).collect();
        WeightFiltration { face: i, p, face_dim: e, tilde, graded_dims, expected_graded_dims }
    }

    /// Whether i* sends W~_s(gamma) into W~_{s+1}(delta) for every facet gamma of delta and s,
    /// and into W~_s(delta) when the sedentarities differ.
    pub fn weight_filtration_preserved(&self, p: usize) -> bool {
        let wf: Vec<WeightFiltration> = (0..self.faces.len()).map(|i| self.weight_filtration(i, p)).collect();
        (0..self.faces.len()).all(|delta| {
            self.facets[delta].iter().all(|&(gamma, _)| {
                let r = self.restriction(p, gamma, delta);
                let same = self.faces[gamma].sed == self.faces[delta].sed;
                (0..=p as i64).all(|s| {
                    let target = if same { s + 1 } else { s };
                    let tgt = wf[delta].tilde_at(target);
                    wf[gamma].tilde_at(s).iter().all(|v| {
                        let img = r.mul_vec(v);
                        coords_in(tgt, &img).is_some()
                    })
                })
            })
        })
    }

    /// Map gr_s(gamma) -> gr_{s+1}(delta) induced by i* (gamma a facet of delta), in bases of
    /// chosen complements.
    pub fn graded_map(&self, p: usize, gamma: usize, delta: usize, s: usize) -> QMatrix {
        let wg = self.weight_filtration(gamma, p);
        let wd = self.weight_filtration(delta, p);
        let ng = self.coeff_dim(p, gamma);
        let nd = self.coeff_dim(p, delta);
        let src_base = wg.tilde_at(s as i64 - 1).to_vec();
        let src = complement_in(&src_base, wg.tilde_at(s as i64), ng);
        let tgt_base = wd.tilde_at(s as i64).to_vec();
        let tgt = complement_in(&tgt_base, wd.tilde_at(s as i64 + 1), nd);
        let r = self.restriction(p, gamma, delta);
        let mut out = QMatrix::zeros(tgt.len(), src.len());
        for (j, v) in src.iter().enumerate() {
            let img = r.mul_vec(v);
            let c = coords_mod(&tgt_base, &tgt, &img).expect("filtration is preserved");
            for (k, x) in c.into_iter().enumerate() {
                out[(k, j)] = x;
            }
        }
        out
    }

    /// Lifts a vector of values on the basis of F_p(face) to a form on the exterior power.
    fn lift_form(&self, p: usize, i: usize, vals: &[Q]) -> Vec<Q> {
        let m = self.stratum_dim(i);
        let b = self.basis(p, i);
        if b.is_empty() {
            return vec![Q::zero(); binomial(m, p)];
        }
        solve(&QMatrix::from_rows_with_cols(b.to_vec(), binomial(m, p)), vals).expect("independent basis")
    }

    /// Cup product of a in C^{p1,q1} and b in C^{p2,q2}: on each cell (a simplex times a cube)
    /// a sum over the Alexander-Whitney and Serre diagonal splittings of front and back faces,
    /// with the wedge product on coefficients.
    pub fn cup(&self, (p1, q1, a): (usize, usize, &[Q]), (p2, q2, b): (usize, usize, &[Q])) -> Vec<Q> {
        let (p, q) = (p1 + p2, q1 + q2);
        let ca = self.cochains_layout(p1);
        let cb = self.cochains_layout(p2);
        let cc = self.cochains_layout(p);
        let mut out = vec![Q::zero(); cc.dims.get(q).copied().unwrap_or(0)];
        if q > self.dimension() || p > self.dimension() {
            return out;
        }
        for (k, &f) in cc.faces[q].iter().enumerate() {
            let face = &self.faces[f];
            let cell = self.y.face(face.cell);
            let nb = self.coeff_dim(p, f);
            if nb == 0 {
                continue;
            }
            let m = self.stratum_dim(f);
            let mut acc = vec![Q::zero(); binomial(m, p)];
            let mdim = face.v.len() - 1;
            for i in 0..=mdim.min(q1) {
                let nbig = q1 - i;
                if nbig > face.r.len() {
                    continue;
                }
                for big in face.r.iter().copied().combinations(nbig) {
                    // Koszul sign: back dims of earlier factors times front dims of later ones.
                    let mut exp = 0usize;
                    let mut back_so_far = mdim - i;
                    for ray in &face.r {
                        if big.contains(ray) {
                            exp += back_so_far;
                        } else {
                            back_so_far += 1;
                        }
                    }
                    let mut fr = big.clone();
                    fr.extend(&face.sed);
                    let front_cell = Cell::new(face.v[..=i].to_vec(), fr);
                    let front = self.index[&(self.y.face_index(&front_cell).unwrap(), face.sed.clone())];
                    let mut back_sed: Vec<usize> = face.sed.iter().chain(&big).copied().collect();
                    back_sed.sort_unstable();
                    let back_cell = Cell::new(face.v[i..].to_vec(), cell.r.clone());
                    let back = self.index[&(self.y.face_index(&back_cell).unwrap(), back_sed)];
                    let (Some((a0, a1)), Some((b0, b1))) = (ca.block_of(q1, front), cb.block_of(q2, back)) else {
                        continue;
                    };
                    let av = self.restriction(p1, front, f).mul_vec(&a[a0..a1]);
                    let bv = self.restriction(p2, back, f).mul_vec(&b[b0..b1]);
                    let w = wedge(&self.lift_form(p1, f, &av), p1, &self.lift_form(p2, f, &bv), p2, m);
                    for (x, y) in acc.iter_mut().zip(w) {
                        if exp % 2 == 0 {
                            *x += y;
                        } else {
                            *x -= y;
                        }
                    }
                }
            }
            let o = cc.offsets[q][k];
            for (j, bvec) in self.basis(p, f).iter().enumerate() {
                out[o + j] = acc.iter().zip(bvec).map(|(x, y)| x * y).sum();
            }
        }
        out
    }

    /// Face lists and offsets of C^{p,*} without the differentials.
    pub fn cochains_layout(&self, p: usize) -> Cochains {
        let d = self.dimension();
        let mut faces = vec![Vec::new(); d + 1];
        for (i, f) in self.faces.iter().enumerate() {
            faces[f.dim].push(i);
        }
        let mut offsets = Vec::new();
        let mut dims = Vec::new();
        for fs in &faces {
            let mut o = Vec::new();
            let mut acc = 0;
            for &f in fs {
                o.push(acc);
                acc += self.coeff_dim(p, f);
            }
            offsets.push(o);
            dims.push(acc);
        }
        Cochains { p, faces, offsets, dims, d: Vec::new() }
    }

    /// Evaluation of a top-degree cochain on the fundamental class: each top face of
    /// sedentarity zero contributes its value on the primitive orienting multivector.
    pub fn degree(&self, c: &[Q]) -> Q {
        let d = self.dimension();
        let lay = self.cochains_layout(d);
        let n = self.ambient_dim();
        let mut total = Q::zero();
        for (k, &f) in lay.faces[d].iter().enumerate() {
            if !self.faces[f].sed.is_empty() {
                continue;
            }
            let w = primitive_multivector(&wedge_vectors(&self.tangent(f), n));
            let co = coords_in(self.basis(d, f), &w).expect("top multivector lies in F_d");
            let o = lay.offsets[d][k];
            for (j, x) in co.into_iter().enumerate() {
                total += x * &c[o + j];
            }
        }
        total
    }

    /// Cellular representative of the divisor class of a ray of the recession fan.
    pub fn cycle_class_of_ray(&self, rho: usize) -> Result<Vec<Q>, TropError> {
        if rho >= self.y.rays().len() {
            return Err(TropError::Invalid(format!("no ray {rho}")));
        }
        let lay = self.cochains_layout(1);
        let mut c = vec![Q::zero(); lay.dims.get(1).copied().unwrap_or(0)];
        let mut pending = Vec::new();
        for (k, &z) in lay.faces[1].iter().enumerate() {
            let f = &self.faces[z];
            let o = lay.offsets[1][k];
            if f.sed.contains(&rho) {
                pending.push((k, z));
            } else if f.v.len() == 1 && f.r == [rho] {
                // Parallel to rho: a form equal to one on the image of rho.
                let m = self.stratum_dim(z);
                let e = self.strata[&f.sed].proj.mul_vec(&qvec(&self.y.rays()[rho]));
                let i0 = e.iter().position(|x| !x.is_zero()).expect("rho is not in the sedentarity span");
                let mut phi = vec![Q::zero(); m];
                phi[i0] = Q::one() / &e[i0];
                for (j, b) in self.basis(1, z).iter().enumerate() {
                    c[o + j] = b.iter().zip(&phi).map(|(x, y)| x * y).sum();
                }
            }
        }
        // Faces whose sedentarity contains rho: their value makes the coboundary vanish on the
        // quadrilateral they bound together with two parallel sides.
        for (k, z) in pending {
            let f = &self.faces[z];
            let sed: Vec<usize> = f.sed.iter().copied().filter(|&s| s != rho).collect();
            let quad = self.index[&(f.cell, sed)];
            let mut rhs = vec![Q::zero(); self.coeff_dim(1, quad)];
            let mut own = None;
            for &(g, s) in &self.facets[quad] {
                let r = self.restriction(1, g, quad);
                if g == z {
                    own = Some(if s < 0 { r.neg() } else { r });
                    continue;
                }
                let gk = lay.faces[1].iter().position(|&x| x == g).unwrap();
                let go = lay.offsets[1][gk];
                let img = r.mul_vec(&c[go..go + self.coeff_dim(1, g)]);
                for (x, y) in rhs.iter_mut().zip(img) {
                    if s < 0 {
                        *x += y;
                    } else {
                        *x -= y;
                    }
                }
            }
            let own = own.expect("face lies on its quadrilateral");
            let val = solve(&own, &rhs).map_err(|_| TropError::Invalid("cycle class is not closable".into()))?;
            let o = lay.offsets[1][k];
            for (j, v) in val.into_iter().enumerate() {
                c[o + j] = v;
            }
        }
        let cc = self.cochains(1);
        if cc.d.len() > 1 && !cc.d[1].mul_vec(&c).iter().all(|x| x.is_zero()) {
            return Err(TropError::Invalid("cycle class representative is not closed".into()));
        }
        Ok(c)
    }
}

fn unit(n: usize, k: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[k] = Q::one();
    v
}

/// Scales a rational multivector to the primitive integral one with the same direction.
fn primitive_multivector(w: &[Q]) -> Vec<Q> {
    let l = w.iter().fold(num::BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<num::BigInt> = w.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num::BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return w.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / g.abs())).collect()
}

pub(crate) fn betti_of(c: &Cochains) -> Vec<usize> {
    let ranks: Vec<usize> = c.d.par_iter().map(rank).collect();
    (0..c.dims.len())
        .map(|q| {
            let out = if q < ranks.len() { ranks[q] } else { 0 };
            let inc = if q > 0 { ranks[q - 1] } else { 0 };
            c.dims[q] - out - inc
        })
        .collect()
}

/// Cohomology with representatives: kernel vectors independent modulo the image.
pub(crate) fn cohomology_of(c: &Cochains) -> Cohomology {
    let nq = c.dims.len();
    let mut betti = Vec::new();
    let mut reps = Vec::new();
    for q in 0..nq {
        let n = c.dims[q];
        let ker = if q < c.d.len() && n > 0 {
            kernel_basis(&c.d[q])
        } else {
            (0..n).map(|k| unit(n, k)).collect()
        };
        let img: Vec<Vec<Q>> = if q > 0 && n > 0 {
            let m = &c.d[q - 1];
            row_space(&m.transpose())
        } else {
            Vec::new()
        };
        let r = complement_in(&img, &ker, n);
        betti.push(r.len());
        reps.push(r);
    }
    Cohomology { p: c.p, betti, reps }
}

/// Builds a polyhedral complex from cells listed by vertex and ray sets.
pub(crate) fn complex_from_cells(n: usize, vertices: Vec<Vec<Q>>, rays: Vec<Vec<i64>>, cells: &BTreeSet<Cell>) -> Result<PolyComplex, TropError> {
    let cells: Vec<Cell> = cells.iter().cloned().collect();
    Ok(PolyComplex::new(n, vertices, rays, &cells)?)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::fan::bergman_fan;
    use crate::linalg::{q, qf};
    use crate::matroid::Matroid;

    pub fn tp1() -> PolyComplex {
        PolyComplex::new(1, vec![qvec(&[0]), qvec(&[1])], vec![vec![-1], vec![1]], &[Cell::new(vec![0, 1], vec![]), Cell::new(vec![0], vec![0]), Cell::new(vec![1], vec![1])]).unwrap()
    }

    /// Unit square cut along the antidiagonal, with rays (0,-1), (-1,0), (1,1); every cell is
    /// unimodular and the recession fan is the fan of TP^2.
    pub fn tp2() -> PolyComplex {
        let v = vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])];
        let r = vec![vec![0, -1], vec![-1, 0], vec![1, 1]];
        let cells = [
            Cell::new(vec![0, 1, 2], vec![]),
            Cell::new(vec![1, 2, 3], vec![]),
            Cell::new(vec![0, 1], vec![0]),
            Cell::new(vec![0, 2], vec![1]),
            Cell::new(vec![1, 3], vec![2]),
            Cell::new(vec![2, 3], vec![2]),
            Cell::new(vec![0], vec![0, 1]),
            Cell::new(vec![1], vec![0, 2]),
            Cell::new(vec![2], vec![1, 2]),
        ];
        PolyComplex::new(2, v, r, &cells).unwrap()
    }

    /// Unit square with a diagonal, strips and quadrants.
    pub fn tp1xtp1() -> PolyComplex {
        let v = vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])];
        let r = vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]];
        let cells = [
            Cell::new(vec![0, 1, 3], vec![]),
            Cell::new(vec![0, 2, 3], vec![]),
            Cell::new(vec![0, 1], vec![3]),
            Cell::new(vec![1, 3], vec![0]),
            Cell::new(vec![2, 3], vec![1]),
            Cell::new(vec![0, 2], vec![2]),
            Cell::new(vec![0], vec![2, 3]),
            Cell::new(vec![1], vec![0, 3]),
            Cell::new(vec![3], vec![0, 1]),
            Cell::new(vec![2], vec![1, 2]),
        ];
        PolyComplex::new(2, v, r, &cells).unwrap()
    }

    pub fn u33() -> Fan {
        bergman_fan(&Matroid::uniform(3, 3)).unwrap()
    }

    #[test]
    fn tp1_faces_and_cohomology() {
        let x = CompactTropicalSpace::compactify(&tp1()).unwrap();
        assert_eq!(x.f_vector(), vec![4, 3]);
        assert!(x.diamond_property_holds());
        assert_eq!(x.hodge_numbers(), vec![vec![1, 0], vec![0, 1]]);
        // An edge's two vertices get opposite signs.
        let e = x.finite_faces().into_iter().find(|&i| x.face(i).dim == 1).unwrap();
        let s: Vec<i32> = x.facets(e).iter().map(|f| f.1).collect();
        assert_eq!(s.iter().sum::<i32>(), 0);
    }

    #[test]
    fn point_and_compact() {
        let pt = PolyComplex::new(2, vec![qvec(&[1, 1])], vec![], &[Cell::new(vec![0], vec![])]).unwrap();
        let x = CompactTropicalSpace::compactify(&pt).unwrap();
        assert_eq!(x.hodge_numbers(), vec![vec![1]]);
        let ray = PolyComplex::new(1, vec![qvec(&[0])], vec![vec![1]], &[Cell::new(vec![0], vec![0])]).unwrap();
        let x = CompactTropicalSpace::compactify(&ray).unwrap();
        assert_eq!(x.f_vector(), vec![2, 1]);
        // F^1 vanishes at the point at infinity and the restriction to the open part is onto.
        assert_eq!(x.hodge_numbers(), vec![vec![1, 0], vec![0, 0]]);
    }

    #[test]
    fn surfaces() {
        for (y, h11) in [(tp2(), 1), (tp1xtp1(), 2)] {
            let x = CompactTropicalSpace::compactify(&y).unwrap();
            assert!(x.diamond_property_holds());
            for p in 0..=2 {
                assert!(x.cochains(p).d_squared_vanishes());
            }
            let h = x.hodge_numbers();
            assert_eq!(h, vec![vec![1, 0, 0], vec![0, h11, 0], vec![0, 0, 1]]);
        }
    }

    #[test]
    fn compactified_u33() {
        let x = CompactTropicalSpace::of_fan(&u33()).unwrap();
        let h = x.hodge_numbers();
        assert_eq!(h, vec![vec![1, 0, 0], vec![0, 4, 0], vec![0, 0, 1]]);
    }

    #[test]
    fn weight_filtrations() {
        let x = CompactTropicalSpace::compactify(&tp1xtp1()).unwrap();
        for p in 0..=2 {
            for i in 0..x.faces().len() {
                let w = x.weight_filtration(i, p);
                assert!(w.graded_dims_match(), "face {i} p {p}: {:?} vs {:?}", w.graded_dims, w.expected_graded_dims);
                if x.face(i).dim == 0 {
                    assert_eq!(w.tilde_at(0).len(), x.coeff_dim(p, i));
                }
                assert_eq!(w.tilde_at(x.face(i).dim as i64).len(), x.coeff_dim(p, i));
            }
            assert!(x.weight_filtration_preserved(p));
        }
        let t = CompactTropicalSpace::compactify(&tp1()).unwrap();
        let e = t.finite_faces().into_iter().find(|&i| t.face(i).dim == 1).unwrap();
        assert_eq!(t.weight_filtration(e, 1).graded_dims, vec![0, 1]);
    }

    #[test]
    fn graded_maps_vanish_across_sedentarity() {
        let x = CompactTropicalSpace::compactify(&tp2()).unwrap();
        for delta in 0..x.faces().len() {
            for &(gamma, _) in x.facets(delta) {
                if x.face(gamma).sed != x.face(delta).sed {
                    for s in 0..=1 {
                        assert!(x.graded_map(1, gamma, delta, s).is_zero());
                    }
                }
            }
        }
    }

    fn pairing(x: &CompactTropicalSpace, a: &[Q], b: &[Q]) -> Q {
        x.degree(&x.cup((1, 1, a), (1, 1, b)))
    }

    #[test]
    fn cycle_classes_tp1() {
        let x = CompactTropicalSpace::compactify(&tp1()).unwrap();
        for rho in 0..2 {
            let c = x.cycle_class_of_ray(rho).unwrap();
            assert_eq!(x.degree(&c), q(1));
        }
    }

    #[test]
    fn cycle_classes_surfaces() {
        let x = CompactTropicalSpace::compactify(&tp2()).unwrap();
        let cs: Vec<Vec<Q>> = (0..3).map(|r| x.cycle_class_of_ray(r).unwrap()).collect();
        for a in &cs {
            for b in &cs {
                assert_eq!(pairing(&x, a, b), q(1));
            }
        }
        let x = CompactTropicalSpace::compactify(&tp1xtp1()).unwrap();
        // Rays: 0 = e1, 1 = e2, 2 = -e1, 3 = -e2.
        let cs: Vec<Vec<Q>> = (0..4).map(|r| x.cycle_class_of_ray(r).unwrap()).collect();
        assert_eq!(pairing(&x, &cs[0], &cs[1]), q(1));
        assert_eq!(pairing(&x, &cs[0], &cs[0]), q(0));
        assert_eq!(pairing(&x, &cs[0], &cs[2]), q(0));
        assert_eq!(pairing(&x, &cs[3], &cs[2]), q(1));
    }

    #[test]
    fn degree_kills_coboundaries() {
        for y in [tp2(), tp1xtp1()] {
            let x = CompactTropicalSpace::compactify(&y).unwrap();
            let c = x.cochains(2);
            for j in 0..c.dims[1] {
                let col = c.d[1].column(j);
                assert_eq!(x.degree(&col), q(0));
            }
        }
        let _ = qf(1, 2);
    }
}
