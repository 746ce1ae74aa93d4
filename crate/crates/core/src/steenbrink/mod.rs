//! The bigraded Steenbrink complex of a unimodular triangulation.
//!
//! ST^{a,b} = sum over s >= |a|, s = a mod 2, of the blocks ST^{a,b,s}, and ST^{a,b,s} is the
//! sum of A^k(Sigma^delta) over compact faces delta of dimension s with 2k = a + b - s.
//! The star fan Sigma^delta has one ray per face covering delta; its Chow rings are the only
//! data needed. The differential d = i* + gys goes from ST^{a,b} to ST^{a+1,b}.

mod hl;
mod kahler;

pub use kahler::{KahlerForm, OperatorReport, PolarizationReport, PrimitiveReport};

use crate::chow::{gysin, restriction, ChowError, ChowRing, GradedMap};
use crate::fan::{Fan, FanError};
use crate::linalg::{kernel_basis, rank, unimodular_completion, QMatrix, Q};
use crate::polyhedral::{Cell, PolyComplex, PolyError};
use crate::tropcoh::{CompactTropicalSpace, TropError};
use num::Zero;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SteenbrinkError {
    #[error("star fan of face {0} is not unimodular")]
    NotUnimodular(usize),
    #[error("complex has no compact faces")]
    EmptyFinitePart,
    #[error("local classes at vertices {u} and {v} disagree on edge {edge}")]
    EdgeIncompatible { u: usize, v: usize, edge: usize },
    #[error("local class at vertex {0} is not ample")]
    NotAmple(usize),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Trop(#[from] TropError),
    #[error(transparent)]
    Chow(#[from] ChowError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A compact face delta with its star fan and Chow ring.
#[derive(Clone, Debug)]
pub struct LocalStar {
    /// Index of the face in the complex.
    pub face: usize,
    pub dim: usize,
    /// Faces covering delta, in the order of the rays of the star fan.
    pub cover: Vec<usize>,
    pub ring: ChowRing,
}

/// A covering pair gamma < delta of compact faces.
#[derive(Clone, Debug)]
struct Pair {
    gamma: usize,
    delta: usize,
    sign: i32,
    restr: GradedMap,
    gys: GradedMap,
}

/// Position of one summand A^k(Sigma^delta) inside ST^{a,b}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub s: usize,
    pub star: usize,
    pub k: usize,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Layout {
    pub summands: Vec<Summand>,
    pub dim: usize,
}

impl Layout {
    fn find_star(&self, star: usize) -> Option<&Summand> {
        self.summands.iter().find(|x| x.star == star)
    }
}

#[derive(Clone, Debug)]
pub struct SteenbrinkComplex {
    d: usize,
    scale: u64,
    y: PolyComplex,
    stars: Vec<LocalStar>,
    pos: HashMap<usize, usize>,
    pairs: Vec<Pair>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub d_squared: bool,
    pub i_star_squared: bool,
    pub gys_squared: bool,
    pub anticommute: bool,
}

impl IdentityReport {
    pub fn all(&self) -> bool {
        self.d_squared && self.i_star_squared && self.gys_squared && self.anticommute
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    /// steenbrink[p][q] = dim H^{q-p}(ST^{., 2p}).
    pub steenbrink: Vec<Vec<usize>>,
    pub tropical: Vec<Vec<usize>>,
    pub equal: bool,
}

fn sub_vec(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn scaled_int(v: &[Q], k: u64) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| {
            let y = x * Q::from_integer((k as i64).into());
            if y.is_integer() {
                crate::linalg::to_i64(&y)
            } else {
                None
            }
        })
        .collect()
}

impl SteenbrinkComplex {
    /// Builds the complex on the compact faces of the finite part of `x`, with the lattice
    /// (1/k)Z^n where k is the scale of the vertices.
    pub fn build(x: &CompactTropicalSpace) -> Result<SteenbrinkComplex, SteenbrinkError> {
        Self::build_with_scale(x, x.complex().scale())
    }

    pub fn build_with_scale(x: &CompactTropicalSpace, k: u64) -> Result<SteenbrinkComplex, SteenbrinkError> {
        let y = x.complex().clone();
        if !y.is_simplicial() {
            return Err(TropError::NotSimplicial.into());
        }
        let d = y.dimension();
        if !y.is_pure() {
            return Err(SteenbrinkError::Invalid("complex is not pure".into()));
        }
        let mut compact: Vec<usize> = (0..y.faces().len()).filter(|&i| y.face(i).r.is_empty()).collect();
        if compact.is_empty() {
            return Err(SteenbrinkError::EmptyFinitePart);
        }
        compact.sort_by_key(|&i| (y.dim_of(i), i));
        let stars: Vec<LocalStar> = compact
            .par_iter()
            .map(|&i| local_star(&y, i, k))
            .collect::<Result<_, _>>()?;
        let pos: HashMap<usize, usize> = stars.iter().enumerate().map(|(j, s)| (s.face, j)).collect();
        let mut pairs = Vec::new();
        for (di, st) in stars.iter().enumerate() {
            let c = y.face(st.face);
            if c.v.len() < 2 {
                continue;
            }
            for (j, &drop) in c.v.iter().enumerate() {
                let gv: Vec<usize> = c.v.iter().copied().filter(|&x| x != drop).collect();
                let gface = y.face_index(&Cell::new(gv, vec![])).expect("facet of a compact face");
                pairs.push((pos[&gface], di, if j % 2 == 0 { 1 } else { -1 }, drop));
            }
        }
        let pairs = pairs
            .into_par_iter()
            .map(|(gi, di, sign, drop)| {
                let (g, dl) = (&stars[gi], &stars[di]);
                let sigma = vec![g.cover.iter().position(|&f| f == dl.face).expect("delta covers gamma")];
                let small_to_big: Vec<usize> = dl
                    .cover
                    .iter()
                    .map(|&eta| {
                        let e = y.face(eta);
                        let v: Vec<usize> = e.v.iter().copied().filter(|&x| x != drop).collect();
                        let f = y.face_index(&Cell::new(v, e.r.clone())).expect("face of a face");
                        g.cover.iter().position(|&c| c == f).expect("cover of gamma")
                    })
                    .collect();
                let restr = restriction(&g.ring, &sigma, &dl.ring, &small_to_big)?;
                let gys = gysin(&g.ring, &sigma, &dl.ring, &small_to_big)?;
                Ok(Pair { gamma: gi, delta: di, sign, restr, gys })
            })
            .collect::<Result<Vec<_>, ChowError>>()?;
        Ok(SteenbrinkComplex { d, scale: k, y, stars, pos, pairs })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn complex(&self) -> &PolyComplex {
        &self.y
    }

    pub fn stars(&self) -> &[LocalStar] {
        &self.stars
    }

    /// Position of a compact face of the complex among the local stars.
    pub fn star_of_face(&self, face: usize) -> Option<usize> {
        self.pos.get(&face).copied()
    }

    /// Covering pairs (gamma, delta, sign) as indices into `stars`.
    pub fn covering_pairs(&self) -> Vec<(usize, usize, i32)> {
        self.pairs.iter().map(|p| (p.gamma, p.delta, p.sign)).collect()
    }

    /// Restriction map A(Sigma^gamma) -> A(Sigma^delta) for a covering pair, without sign.
    pub fn pair_restriction(&self, gamma: usize, delta: usize) -> Option<&GradedMap> {
        self.pairs.iter().find(|p| p.gamma == gamma && p.delta == delta).map(|p| &p.restr)
    }

    pub fn layout(&self, a: i64, b: i64) -> Layout {
        let d = self.d as i64;
        let mut out = Layout::default();
        if b < 0 || b % 2 != 0 || a.abs() > d {
            return out;
        }
        for (j, st) in self.stars.iter().enumerate() {
            let s = st.dim as i64;
            if s < a.abs() || (s - a) % 2 != 0 {
                continue;
            }
            let twice_k = a + b - s;
            if twice_k < 0 || twice_k % 2 != 0 {
                continue;
            }
            let k = (twice_k / 2) as usize;
            let len = st.ring.dim(k);
            if len == 0 || k > st.ring.top_degree() {
                continue;
            }
            out.summands.push(Summand { s: st.dim, star: j, k, offset: out.dim, len });
            out.dim += len;
        }
        out
    }

    pub fn dim(&self, a: i64, b: i64) -> usize {
        self.layout(a, b).dim
    }

    /// Table of dim ST^{a,b}, rows b = 0..=2d, columns a = -d..=d.
    pub fn dims_table(&self) -> Vec<Vec<usize>> {
        let d = self.d as i64;
        (0..=2 * d).map(|b| (-d..=d).map(|a| self.dim(a, b)).collect()).collect()
    }

    /// i*: ST^{a,b} -> ST^{a+1,b}.
    pub fn i_star(&self, a: i64, b: i64) -> QMatrix {
        let (src, tgt) = (self.layout(a, b), self.layout(a + 1, b));
        let mut m = QMatrix::zeros(tgt.dim, src.dim);
        for p in &self.pairs {
            if let (Some(x), Some(t)) = (src.find_star(p.gamma), tgt.find_star(p.delta)) {
                if t.k != x.k {
                    continue;
                }
                let block = &p.restr.matrices[x.k];
                m.set_block(t.offset, x.offset, &if p.sign > 0 { block.clone() } else { block.neg() });
            }
        }
        m
    }

    /// gys: ST^{a,b} -> ST^{a+1,b}.
    pub fn gys(&self, a: i64, b: i64) -> QMatrix {
        let (src, tgt) = (self.layout(a, b), self.layout(a + 1, b));
        let mut m = QMatrix::zeros(tgt.dim, src.dim);
        for p in &self.pairs {
            if let (Some(x), Some(t)) = (src.find_star(p.delta), tgt.find_star(p.gamma)) {
                if t.k != x.k + 1 {
                    continue;
                }
                let block = &p.gys.matrices[x.k];
                m.set_block(t.offset, x.offset, &if p.sign > 0 { block.clone() } else { block.neg() });
            }
        }
        m
    }

    pub fn differential(&self, a: i64, b: i64) -> QMatrix {
        self.i_star(a, b).add(&self.gys(a, b))
    }

    fn grid(&self) -> Vec<(i64, i64)> {
        let d = self.d as i64;
        (0..=2 * d).flat_map(|b| (-d..=d).map(move |a| (a, b))).collect()
    }

    pub fn identities(&self) -> IdentityReport {
        let checks: Vec<[bool; 4]> = self
            .grid()
            .par_iter()
            .map(|&(a, b)| {
                let (i0, i1) = (self.i_star(a, b), self.i_star(a + 1, b));
                let (g0, g1) = (self.gys(a, b), self.gys(a + 1, b));
                let (d0, d1) = (self.differential(a, b), self.differential(a + 1, b));
                [
                    d1.mul(&d0).is_zero(),
                    i1.mul(&i0).is_zero(),
                    g1.mul(&g0).is_zero(),
                    i1.mul(&g0).add(&g1.mul(&i0)).is_zero(),
                ]
            })
            .collect();
        let all = |k: usize| checks.iter().all(|c| c[k]);
        IdentityReport { d_squared: all(0), i_star_squared: all(1), gys_squared: all(2), anticommute: all(3) }
    }

    /// dims of H^a(ST^{., 2p}, d) for a = -d..=d.
    pub fn row_cohomology(&self, p: usize) -> Vec<usize> {
        let d = self.d as i64;
        let b = 2 * p as i64;
        (-d..=d)
            .into_par_iter()
            .map(|a| {
                let n = self.dim(a, b);
                let out = rank(&self.differential(a, b));
                let inc = rank(&self.differential(a - 1, b));
                n - out - inc
            })
            .collect()
    }

    /// The table dim H^{q-p}(ST^{., 2p}) indexed [p][q].
    pub fn hodge_table(&self) -> Vec<Vec<usize>> {
        let d = self.d;
        (0..=d)
            .map(|p| {
                let row = self.row_cohomology(p);
                (0..=d).map(|q| row[q + d - p]).collect()
            })
            .collect()
    }

    /// Compares with tropical Hodge numbers h[p][q].
    pub fn comparison_check(&self, tropical: &[Vec<usize>]) -> ComparisonReport {
        let steenbrink = self.hodge_table();
        let equal = steenbrink == tropical;
        ComparisonReport { steenbrink, tropical: tropical.to_vec(), equal }
    }

    /// Cocycles of ST^{a,b} and their classes: (kernel basis, rank of the incoming image).
    pub fn cocycles(&self, a: i64, b: i64) -> (Vec<Vec<Q>>, usize) {
        (kernel_basis(&self.differential(a, b)), rank(&self.differential(a - 1, b)))
    }

    /// Whether an element of ST^{a,b} is a coboundary.
    pub fn is_exact(&self, a: i64, b: i64, x: &[Q]) -> bool {
        let m = self.differential(a - 1, b);
        let r = rank(&m);
        let col: Vec<Vec<Q>> = vec![x.to_vec()];
        rank(&m.hstack(&QMatrix::from_cols(&col, x.len()))) == r
    }

    /// Embeds per-summand coordinates into ST^{a,b}.
    pub fn assemble(&self, a: i64, b: i64, parts: &[(usize, Vec<Q>)]) -> Vec<Q> {
        let l = self.layout(a, b);
        let mut v = vec![Q::zero(); l.dim];
        for (star, c) in parts {
            if let Some(x) = l.find_star(*star) {
                for (i, t) in c.iter().enumerate() {
                    v[x.offset + i] = t.clone();
                }
            }
        }
        v
    }
}

/// Star fan of a compact face: rays indexed by covering faces, lattice (1/k)Z^n.
fn local_star(y: &PolyComplex, fi: usize, k: u64) -> Result<LocalStar, SteenbrinkError> {
    let n = y.ambient_dim();
    let c = y.face(fi);
    let s = y.dim_of(fi);
    let v0 = &y.vertices()[c.v[0]];
    let bad = || SteenbrinkError::NotUnimodular(fi);
    let tangent: Vec<Vec<i64>> = c.v[1..]
        .iter()
        .map(|&w| scaled_int(&sub_vec(&y.vertices()[w], v0), k).ok_or_else(bad))
        .collect::<Result<_, _>>()?;
    let u = unimodular_completion(&tangent, n).ok_or_else(bad)?;
    let project = |v: &[i64]| -> Vec<i64> { (s..n).map(|i| (0..n).map(|j| u[i][j] * v[j]).sum()).collect() };
    let star = y.star(fi);
    let mut cover: Vec<usize> = star.iter().copied().filter(|&j| y.dim_of(j) == s + 1).collect();
    cover.sort_unstable();
    let mut rays = Vec::new();
    for &eta in &cover {
        let e = y.face(eta);
        let raw = if e.r.is_empty() {
            let w = e.v.iter().find(|x| !c.v.contains(x)).expect("new vertex");
            scaled_int(&sub_vec(&y.vertices()[*w], v0), k).ok_or_else(bad)?
        } else {
            y.rays()[e.r[0]].clone()
        };
        rays.push(project(&raw));
    }
    let cones: Vec<Vec<usize>> = star
        .iter()
        .map(|&eps| (0..cover.len()).filter(|&i| y.face(eps).contains(y.face(cover[i]))).collect())
        .collect();
    let labels = cover.iter().map(|f| f.to_string()).collect();
    let fan = Fan::with_labels(n - s, rays, &cones, labels)?;
    if !fan.is_unimodular() {
        return Err(bad());
    }
    let ring = ChowRing::build(&fan)?;
    Ok(LocalStar { face: fi, dim: s, cover, ring })
}
