//! Bigraded Hodge–Lefschetz structures: a bigraded space H_{a,b} with N1 of bidegree (-2,0),
//! N2 of bidegree (0,-2), optionally a polarization psi and a differential d of bidegree
//! (-1,-1). Everything is stored on the total space, blocks laid out consecutively.

use crate::linalg::{dot, inverse, kernel_basis, rank, signature, QMatrix, Signature, Q};
use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HLError {
    #[error("operator has shape {0}x{1}, expected {2}x{2}")]
    Shape(usize, usize, usize),
    #[error("primitive parts do not decompose the space")]
    NotDecomposed,
    #[error("no polarization")]
    NoPolarization,
}

#[derive(Clone, Debug)]
pub struct HLStructure {
    blocks: Vec<((i64, i64), usize)>,
    offsets: BTreeMap<(i64, i64), Range<usize>>,
    dim: usize,
    pub n1: QMatrix,
    pub n2: QMatrix,
    pub psi: Option<QMatrix>,
    pub d: Option<QMatrix>,
}

/// N1^r N2^s P_{a,b}, as vectors of the total space.
#[derive(Clone, Debug)]
pub struct Piece {
    pub a: i64,
    pub b: i64,
    pub r: usize,
    pub s: usize,
    pub basis: Vec<Vec<Q>>,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub pieces: Vec<Piece>,
    /// The pieces together form a basis of the total space.
    pub complete: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub bidegrees: bool,
    pub commute: bool,
    pub n1_iso: bool,
    pub n2_iso: bool,
    pub psi_support: Option<bool>,
    pub psi_skew: Option<bool>,
    pub psi_positive: Option<bool>,
    pub d_squared: Option<bool>,
    pub d_commutes: Option<bool>,
    pub d_skew: Option<bool>,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        let opt = |x: Option<bool>| x.unwrap_or(true);
        self.bidegrees
            && self.commute
            && self.n1_iso
            && self.n2_iso
            && opt(self.psi_support)
            && opt(self.psi_skew)
            && opt(self.psi_positive)
            && opt(self.d_squared)
            && opt(self.d_commutes)
            && opt(self.d_skew)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WReport {
    pub invertible: bool,
    /// w^{-1} = (-1)^{a+b} w on N1^r N2^s P_{a,b}.
    pub inverse_formula: bool,
    pub phi_symmetric: bool,
    pub phi_signature: Signature,
    pub pieces_orthogonal: bool,
}

impl WReport {
    pub fn all(&self) -> bool {
        self.invertible
            && self.inverse_formula
            && self.phi_symmetric
            && self.phi_signature.n_minus == 0
            && self.phi_signature.n_zero == 0
            && self.pieces_orthogonal
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LaplacianReport {
    pub phi_symmetric: bool,
    pub commutes_n1: bool,
    pub commutes_n2: bool,
    /// ker d = ker Laplacian + im d, orthogonally for phi, on every block.
    pub hodge_decomposition: bool,
    /// (a, b, dim ker Laplacian, dim cohomology) per block.
    pub harmonic: Vec<(i64, i64, usize, usize)>,
}

impl LaplacianReport {
    pub fn all(&self) -> bool {
        self.phi_symmetric
            && self.commutes_n1
            && self.commutes_n2
            && self.hodge_decomposition
            && self.harmonic.iter().all(|h| h.2 == h.3)
    }
}

fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, i| acc * Q::from_integer((i as i64).into()))
}

fn sign(e: i64) -> Q {
    if e.rem_euclid(2) == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

fn cols_matrix(vs: &[Vec<Q>], n: usize) -> QMatrix {
    QMatrix::from_cols(vs, n)
}

impl HLStructure {
    /// Blocks in the order given; operators are matrices on the total space.
    pub fn new(blocks: Vec<((i64, i64), usize)>, n1: QMatrix, n2: QMatrix) -> Result<HLStructure, HLError> {
        let mut offsets = BTreeMap::new();
        let mut dim = 0;
        for &(k, n) in &blocks {
            offsets.insert(k, dim..dim + n);
            dim += n;
        }
        for m in [&n1, &n2] {
            if m.rows() != dim || m.cols() != dim {
                return Err(HLError::Shape(m.rows(), m.cols(), dim));
            }
        }
        Ok(HLStructure { blocks, offsets, dim, n1, n2, psi: None, d: None })
    }

    pub fn with_psi(mut self, psi: QMatrix) -> Result<HLStructure, HLError> {
        if psi.rows() != self.dim || psi.cols() != self.dim {
            return Err(HLError::Shape(psi.rows(), psi.cols(), self.dim));
        }
        self.psi = Some(psi);
        Ok(self)
    }

    pub fn with_d(mut self, d: QMatrix) -> Result<HLStructure, HLError> {
        if d.rows() != self.dim || d.cols() != self.dim {
            return Err(HLError::Shape(d.rows(), d.cols(), self.dim));
        }
        self.d = Some(d);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[((i64, i64), usize)] {
        &self.blocks
    }

    pub fn block_dim(&self, a: i64, b: i64) -> usize {
        self.offsets.get(&(a, b)).map_or(0, |r| r.len())
    }

    fn range(&self, a: i64, b: i64) -> Range<usize> {
        self.offsets.get(&(a, b)).cloned().unwrap_or(0..0)
    }

    /// The block of m from H_{a,b} to H_{a',b'}.
    fn part(&self, m: &QMatrix, from: (i64, i64), to: (i64, i64)) -> QMatrix {
        let (s, t) = (self.range(from.0, from.1), self.range(to.0, to.1));
        m.block(t.start, s.start, t.len(), s.len())
    }

    /// Whether m maps H_{a,b} into H_{a+da,b+db} for every block.
    fn has_bidegree(&self, m: &QMatrix, da: i64, db: i64) -> bool {
        self.blocks.iter().all(|&((a, b), _)| {
            let src = self.range(a, b);
            self.blocks.iter().all(|&((a2, b2), _)| {
                (a2, b2) == (a + da, b + db) || {
                    let t = self.range(a2, b2);
                    m.block(t.start, src.start, t.len(), src.len()).is_zero()
                }
            })
        })
    }

    fn embed(&self, a: i64, b: i64, v: &[Q]) -> Vec<Q> {
        let r = self.range(a, b);
        let mut out = vec![Q::zero(); self.dim];
        for (i, x) in v.iter().enumerate() {
            out[r.start + i] = x.clone();
        }
        out
    }

    fn max_index(&self) -> (i64, i64) {
        let a = self.blocks.iter().map(|((a, _), _)| a.abs()).max().unwrap_or(0);
        let b = self.blocks.iter().map(|((_, b), _)| b.abs()).max().unwrap_or(0);
        (a, b)
    }

    /// P_{a,b} = H_{a,b} cap ker N1^{a+1} cap ker N2^{b+1}, as total-space vectors.
    pub fn primitive(&self, a: i64, b: i64) -> Vec<Vec<Q>> {
        let n = self.block_dim(a, b);
        if n == 0 || a < 0 || b < 0 {
            return Vec::new();
        }
        let r = self.range(a, b);
        let restrict = |m: &QMatrix| m.block(0, r.start, self.dim, n);
        let k1 = restrict(&self.n1.pow(a as usize + 1));
        let k2 = restrict(&self.n2.pow(b as usize + 1));
        kernel_basis(&k1.vstack(&k2)).into_iter().map(|v| self.embed(a, b, &v)).collect()
    }

    pub fn primitive_decomposition(&self) -> Decomposition {
        let mut pieces = Vec::new();
        for &((a, b), _) in &self.blocks {
            if a < 0 || b < 0 {
                continue;
            }
            let p = self.primitive(a, b);
            if p.is_empty() {
                continue;
            }
            for r in 0..=a as usize {
                let m1 = self.n1.pow(r);
                for s in 0..=b as usize {
                    let m = m1.mul(&self.n2.pow(s));
                    let basis = p.iter().map(|x| m.mul_vec(x)).collect();
                    pieces.push(Piece { a, b, r, s, basis });
                }
            }
        }
        let all: Vec<Vec<Q>> = pieces.iter().flat_map(|p| p.basis.iter().cloned()).collect();
        let complete = all.len() == self.dim && (self.dim == 0 || rank(&cols_matrix(&all, self.dim)) == self.dim);
        Decomposition { pieces, complete }
    }

    pub fn check_axioms(&self) -> AxiomReport {
        let n1n2 = self.n1.mul(&self.n2);
        let bidegrees = self.has_bidegree(&self.n1, -2, 0) && self.has_bidegree(&self.n2, 0, -2);
        let commute = n1n2 == self.n2.mul(&self.n1);
        let iso = |m: &QMatrix, first: bool| {
            self.blocks.par_iter().all(|&((a, b), n)| {
                let e = if first { a } else { b };
                if e < 0 {
                    return true;
                }
                let to = if first { (-a, b) } else { (a, -b) };
                let p = self.part(&m.pow(e as usize), (a, b), to);
                p.rows() == n && rank(&p) == n
            })
        };
        let n1_iso = iso(&self.n1, true);
        let n2_iso = iso(&self.n2, false);
        let (mut psi_support, mut psi_skew, mut psi_positive) = (None, None, None);
        if let Some(psi) = &self.psi {
            psi_support = Some(self.blocks.iter().all(|&((a, b), _)| {
                let s = self.range(a, b);
                self.blocks.iter().all(|&((a2, b2), _)| {
                    (a + a2 == 0 && b + b2 == 0) || {
                        let t = self.range(a2, b2);
                        psi.block(s.start, t.start, s.len(), t.len()).is_zero()
                    }
                })
            }));
            let skew = |m: &QMatrix| m.transpose().mul(psi).add(&psi.mul(m)).is_zero();
            psi_skew = Some(skew(&self.n1) && skew(&self.n2));
            psi_positive = Some(self.blocks.par_iter().all(|&((a, b), _)| {
                if a < 0 || b < 0 {
                    return true;
                }
                let p = self.primitive(a, b);
                if p.is_empty() {
                    return true;
                }
                let bm = cols_matrix(&p, self.dim);
                let g = bm.transpose().mul(psi).mul(&self.n1.pow(a as usize)).mul(&self.n2.pow(b as usize)).mul(&bm);
                matches!(signature(&g), Ok(s) if s.n_plus == p.len())
            }));
        }
        let (mut d_squared, mut d_commutes, mut d_skew) = (None, None, None);
        if let Some(d) = &self.d {
            d_squared = Some(self.has_bidegree(d, -1, -1) && d.mul(d).is_zero());
            d_commutes = Some(d.mul(&self.n1) == self.n1.mul(d) && d.mul(&self.n2) == self.n2.mul(d));
            d_skew = self.psi.as_ref().map(|psi| d.transpose().mul(psi).add(&psi.mul(d)).is_zero());
        }
        AxiomReport { bidegrees, commute, n1_iso, n2_iso, psi_support, psi_skew, psi_positive, d_squared, d_commutes, d_skew }
    }

    /// The operator w, built on the basis of primitive pieces.
    pub fn w_operator(&self) -> Result<QMatrix, HLError> {
        Ok(self.w_and_twist()?.0)
    }

    /// (w, w') where w' is w twisted by (-1)^{a+b} on N1^r N2^s P_{a,b}.
    fn w_and_twist(&self) -> Result<(QMatrix, QMatrix), HLError> {
        let dec = self.primitive_decomposition();
        if !dec.complete {
            return Err(HLError::NotDecomposed);
        }
        if self.dim == 0 {
            return Ok((QMatrix::zeros(0, 0), QMatrix::zeros(0, 0)));
        }
        let mut src = Vec::new();
        let mut img = Vec::new();
        let mut twisted = Vec::new();
        for piece in &dec.pieces {
            let (a, b) = (piece.a as usize, piece.b as usize);
            let (r, s) = (piece.r, piece.s);
            let coef = sign((r + s) as i64) * factorial(r) / factorial(a - r) * factorial(s) / factorial(b - s);
            let m = self.n1.pow(a - r).mul(&self.n2.pow(b - s));
            // Primitive vectors are recovered from the r = s = 0 piece with the same (a, b).
            let base = dec.pieces.iter().find(|p| p.a == piece.a && p.b == piece.b && p.r == 0 && p.s == 0).expect("base piece");
            for (v, x) in piece.basis.iter().zip(&base.basis) {
                src.push(v.clone());
                let w: Vec<Q> = m.mul_vec(x).into_iter().map(|t| t * &coef).collect();
                twisted.push(w.iter().map(|t| t * sign(piece.a + piece.b)).collect());
                img.push(w);
            }
        }
        let bm = cols_matrix(&src, self.dim);
        let binv = inverse(&bm).ok_or(HLError::NotDecomposed)?;
        Ok((cols_matrix(&img, self.dim).mul(&binv), cols_matrix(&twisted, self.dim).mul(&binv)))
    }

    /// phi = psi(., w .) as a Gram matrix on the total space.
    pub fn phi(&self) -> Result<QMatrix, HLError> {
        let psi = self.psi.as_ref().ok_or(HLError::NoPolarization)?;
        Ok(psi.mul(&self.w_operator()?))
    }

    pub fn w_report(&self) -> Result<WReport, HLError> {
        let (w, tw) = self.w_and_twist()?;
        let psi = self.psi.as_ref().ok_or(HLError::NoPolarization)?;
        let invertible = self.dim == 0 || rank(&w) == self.dim;
        let inverse_formula = w.mul(&tw) == QMatrix::identity(self.dim);
        let phi = psi.mul(&w);
        let phi_symmetric = phi.is_symmetric();
        let phi_signature = if phi_symmetric {
            signature(&phi).expect("symmetric")
        } else {
            Signature { n_plus: 0, n_minus: 0, n_zero: self.dim }
        };
        let dec = self.primitive_decomposition();
        let mut pieces_orthogonal = true;
        for (i, p) in dec.pieces.iter().enumerate() {
            for q in &dec.pieces[i + 1..] {
                for x in &p.basis {
                    let px = phi.transpose().mul_vec(x);
                    if q.basis.iter().any(|y| !dot(&px, y).is_zero()) {
                        pieces_orthogonal = false;
                    }
                }
            }
        }
        Ok(WReport { invertible, inverse_formula, phi_symmetric, phi_signature, pieces_orthogonal })
    }

    /// The codifferential -w^{-1} d w and the Laplacian d d* + d* d.
    pub fn laplacian(&self) -> Result<(QMatrix, QMatrix), HLError> {
        let d = self.d.clone().unwrap_or_else(|| QMatrix::zeros(self.dim, self.dim));
        let w = self.w_operator()?;
        if self.dim == 0 {
            return Ok((w.clone(), w));
        }
        let winv = inverse(&w).ok_or(HLError::NotDecomposed)?;
        let dstar = winv.mul(&d).mul(&w).neg();
        let lap = d.mul(&dstar).add(&dstar.mul(&d));
        Ok((dstar, lap))
    }

    pub fn laplacian_report(&self) -> Result<LaplacianReport, HLError> {
        let d = self.d.clone().unwrap_or_else(|| QMatrix::zeros(self.dim, self.dim));
        let (_, lap) = self.laplacian()?;
        let phi = self.phi()?;
        let phi_symmetric = phi.mul(&lap) == lap.transpose().mul(&phi);
        let commutes_n1 = lap.mul(&self.n1) == self.n1.mul(&lap);
        let commutes_n2 = lap.mul(&self.n2) == self.n2.mul(&lap);
        let (max_a, max_b) = self.max_index();
        let rows: Vec<((i64, i64, usize, usize), bool)> = self
            .blocks
            .par_iter()
            .map(|&((a, b), n)| {
                let lb = self.part(&lap, (a, b), (a, b));
                let harm = kernel_basis(&lb);
                let dout = self.part(&d, (a, b), (a - 1, b - 1));
                let din = self.part(&d, (a + 1, b + 1), (a, b));
                let rin = if a + 1 > max_a || b + 1 > max_b { 0 } else { rank(&din) };
                let coh = n - rank(&dout) - rin;
                // Harmonic vectors are closed and phi-orthogonal to exact ones.
                let pb = self.part(&phi, (a, b), (a, b));
                let closed = harm.iter().all(|h| dout.mul_vec(h).iter().all(|x| x.is_zero()));
                let orth = harm.iter().all(|h| {
                    let ph = pb.transpose().mul_vec(h);
                    (0..din.cols()).all(|j| dot(&din.column(j), &ph).is_zero())
                });
                ((a, b, harm.len(), coh), closed && orth)
            })
            .collect();
        let hodge_decomposition = rows.iter().all(|r| r.1 && r.0 .2 == r.0 .3);
        let harmonic = rows.into_iter().map(|r| r.0).collect();
        Ok(LaplacianReport { phi_symmetric, commutes_n1, commutes_n2, hodge_decomposition, harmonic })
    }

    /// The HL structure on harmonic elements, which represent the cohomology of d.
    pub fn cohomology_hl(&self) -> Result<HLStructure, HLError> {
        if self.d.is_none() {
            return Ok(self.clone());
        }
        let (_, lap) = self.laplacian()?;
        let mut basis: Vec<Vec<Q>> = Vec::new();
        let mut blocks = Vec::new();
        for &((a, b), _) in &self.blocks {
            let lb = self.part(&lap, (a, b), (a, b));
            let harm: Vec<Vec<Q>> = kernel_basis(&lb).into_iter().map(|v| self.embed(a, b, &v)).collect();
            blocks.push(((a, b), harm.len()));
            basis.extend(harm);
        }
        let n = basis.len();
        let bm = cols_matrix(&basis, self.dim);
        // Coordinates: the harmonic basis has full column rank, so use a left inverse.
        let restrict = |m: &QMatrix| -> QMatrix {
            if n == 0 {
                return QMatrix::zeros(0, 0);
            }
            let gram = bm.transpose().mul(&bm);
            let left = inverse(&gram).expect("independent basis").mul(&bm.transpose());
            left.mul(m).mul(&bm)
        };
        let mut h = HLStructure::new(blocks, restrict(&self.n1), restrict(&self.n2))?;
        if let Some(psi) = &self.psi {
            let g = if n == 0 { QMatrix::zeros(0, 0) } else { bm.transpose().mul(psi).mul(&bm) };
            h = h.with_psi(g)?;
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    /// A free N1, N2 orbit of one primitive vector in P_{1,1}.
    fn square() -> HLStructure {
        let blocks = vec![((1, 1), 1), ((-1, 1), 1), ((1, -1), 1), ((-1, -1), 1)];
        let mut n1 = QMatrix::zeros(4, 4);
        n1[(1, 0)] = q(1);
        n1[(3, 2)] = q(1);
        let mut n2 = QMatrix::zeros(4, 4);
        n2[(2, 0)] = q(1);
        n2[(3, 1)] = q(1);
        // psi(x, N1 N2 x) = 1 with both N skew.
        let mut psi = QMatrix::zeros(4, 4);
        psi[(0, 3)] = q(1);
        psi[(3, 0)] = q(1);
        psi[(1, 2)] = q(-1);
        psi[(2, 1)] = q(-1);
        HLStructure::new(blocks, n1, n2).unwrap().with_psi(psi).unwrap()
    }

    #[test]
    fn free_orbit() {
        let h = square();
        assert!(h.check_axioms().all(), "{:?}", h.check_axioms());
        let dec = h.primitive_decomposition();
        assert!(dec.complete);
        assert_eq!(dec.pieces.len(), 4);
        assert!(dec.pieces.iter().all(|p| p.basis.len() == 1));
        let r = h.w_report().unwrap();
        assert!(r.all(), "{r:?}");
        assert_eq!(r.phi_signature.n_plus, 4);
    }

    #[test]
    fn w_on_primitive_and_n1_images() {
        // P_{0,0} alone: w = id and phi = psi.
        let h = HLStructure::new(vec![((0, 0), 1)], QMatrix::zeros(1, 1), QMatrix::zeros(1, 1))
            .unwrap()
            .with_psi(QMatrix::from_ints(&[vec![2]]))
            .unwrap();
        assert_eq!(h.w_operator().unwrap(), QMatrix::identity(1));
        assert_eq!(h.phi().unwrap(), QMatrix::from_ints(&[vec![2]]));
        // P_{1,0} = <x>, N1 x in H_{-1,0}: w x = N1 x and w N1 x = -x.
        let mut n1 = QMatrix::zeros(2, 2);
        n1[(1, 0)] = q(1);
        let h = HLStructure::new(vec![((1, 0), 1), ((-1, 0), 1)], n1, QMatrix::zeros(2, 2)).unwrap();
        let w = h.w_operator().unwrap();
        assert_eq!(w, QMatrix::from_ints(&[vec![0, -1], vec![1, 0]]));
    }

    #[test]
    fn zero_structure() {
        let h = HLStructure::new(vec![], QMatrix::zeros(0, 0), QMatrix::zeros(0, 0)).unwrap();
        assert!(h.primitive_decomposition().pieces.is_empty());
        assert!(h.check_axioms().all());
    }

    #[test]
    fn zero_differential_is_harmonic_everywhere() {
        let h = square().with_d(QMatrix::zeros(4, 4)).unwrap();
        let (_, lap) = h.laplacian().unwrap();
        assert!(lap.is_zero());
        let c = h.cohomology_hl().unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.check_axioms().all());
    }
}
