//! Monodromy on cochains of the finite part, the surface intersection pairing and the
//! projective bundle formula at the level of Betti numbers.

use super::exterior::wedge;
use super::{cohomology_of, complex_from_cells, projection_data, CompactTropicalSpace, Cochains, TropError};
use crate::linalg::{coords_in, rank, row_space, signature, QMatrix, Signature, Q};
use crate::polyhedral::{Cell, PolyComplex};
use serde::Serialize;
use std::collections::BTreeSet;

/// Choice of a point o_delta in each finite face.
#[derive(Clone, Debug)]
pub enum Basepoint {
    Centroid,
    /// The vertex of smallest index.
    FirstVertex,
    /// One point per face of the compactification (only finite faces are read).
    Custom(Vec<Vec<Q>>),
}

/// N: C^{p,q} -> C^{p-1,q+1} on the cochains of the finite part, sending alpha on gamma to
/// (-1)^q alpha( . ^ (o_delta - o_gamma)) on each delta covering gamma.
#[derive(Clone, Debug)]
pub struct MonodromyOperator {
    pub p: usize,
    pub source: Cochains,
    pub target: Cochains,
    pub blocks: Vec<QMatrix>,
}

impl MonodromyOperator {
    /// d N = N d on every degree.
    pub fn commutes(&self) -> bool {
        (0..self.blocks.len().saturating_sub(1)).all(|q| {
            let lhs = self.target.d[q + 1].mul(&self.blocks[q]);
            let rhs = self.blocks[q + 1].mul(&self.source.d[q]);
            lhs == rhs
        })
    }

    /// Rank of the map induced on cohomology in degree q.
    pub fn rank_on_cohomology(&self, q: usize) -> usize {
        let h = cohomology_of(&self.source);
        let reps = &h.reps[q];
        let n = self.target.dims[q + 1];
        let img: Vec<Vec<Q>> = if q < self.target.d.len() { row_space(&self.target.d[q].transpose()) } else { Vec::new() };
        let mut all = img.clone();
        all.extend(reps.iter().map(|r| self.blocks[q].mul_vec(r)));
        rank(&QMatrix::from_rows_with_cols(all, n)) - rank(&QMatrix::from_rows_with_cols(img, n))
    }
}

fn basepoint(x: &CompactTropicalSpace, i: usize, choice: &Basepoint) -> Vec<Q> {
    let f = x.face(i);
    let verts = x.complex().vertices();
    match choice {
        Basepoint::Centroid => {
            let k = Q::from_integer((f.v.len() as i64).into());
            let n = x.ambient_dim();
            (0..n).map(|j| f.v.iter().map(|&v| verts[v][j].clone()).sum::<Q>() / &k).collect()
        }
        Basepoint::FirstVertex => verts[f.v[0]].clone(),
        Basepoint::Custom(pts) => pts[i].clone(),
    }
}

pub fn monodromy_cochain(x: &CompactTropicalSpace, p: usize, choice: &Basepoint) -> Result<MonodromyOperator, TropError> {
    if p == 0 {
        return Err(TropError::Invalid("monodromy needs p >= 1".into()));
    }
    if let Basepoint::Custom(pts) = choice {
        if pts.len() != x.faces().len() {
            return Err(TropError::Invalid("one basepoint per face expected".into()));
        }
    }
    let finite = x.finite_faces();
    let source = x.cochains_on(p, |i| finite.contains(&i));
    let target = x.cochains_on(p - 1, |i| finite.contains(&i));
    let n = x.ambient_dim();
    let d = x.dimension();
    let mut blocks = Vec::new();
    for q in 0..d {
        let mut m = QMatrix::zeros(target.dims[q + 1], source.dims[q]);
        for (k, &delta) in source.faces[q + 1].iter().enumerate() {
            let od = basepoint(x, delta, choice);
            let bp = x.basis(p, delta);
            let bl = x.basis(p - 1, delta);
            for &(gamma, _) in x.facets(delta) {
                let Some(gk) = source.faces[q].iter().position(|&g| g == gamma) else { continue };
                let og = basepoint(x, gamma, choice);
                let w: Vec<Q> = od.iter().zip(&og).map(|(a, b)| a - b).collect();
                // Row j: coordinates of b_j ^ w in the basis of F_p(delta).
                let mut kmat = QMatrix::zeros(bl.len(), bp.len());
                for (j, b) in bl.iter().enumerate() {
                    let bw = wedge(b, p - 1, &w, 1, n);
                    let co = coords_in(bp, &bw).ok_or_else(|| TropError::Invalid("basepoint outside the face".into()))?;
                    for (l, c) in co.into_iter().enumerate() {
                        kmat[(j, l)] = c;
                    }
                }
                let mut block = kmat.mul(&x.restriction(p, gamma, delta));
                if q % 2 == 1 {
                    block = block.neg();
                }
                m.set_block(target.offsets[q + 1][k], source.offsets[q][gk], &block);
            }
        }
        blocks.push(m);
    }
    Ok(MonodromyOperator { p, source, target, blocks })
}

#[derive(Clone, Debug, Serialize)]
pub struct HodgeIndexReport {
    pub h11: usize,
    pub b2: usize,
    pub gram: Vec<Vec<String>>,
    pub symmetric: bool,
    pub signature: Signature,
    pub expected: (usize, usize),
    pub matches: bool,
}

/// Signature of the intersection pairing on H^{1,1} of a compact tropical surface against
/// (1 + b2, h^{1,1} - 1 - b2), b2 = dim H^{0,2}.
pub fn hodge_index_check(x: &CompactTropicalSpace) -> Result<HodgeIndexReport, TropError> {
    if x.dimension() != 2 {
        return Err(TropError::Invalid("surface expected".into()));
    }
    let h1 = x.tropical_cohomology(1);
    let reps = &h1.reps[1];
    let b2 = x.tropical_cohomology(0).betti[2];
    let k = reps.len();
    let mut gram = QMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[(i, j)] = x.degree(&x.cup((1, 1, &reps[i]), (1, 1, &reps[j])));
        }
    }
    let symmetric = gram.is_symmetric();
    let sig = signature(&gram).map_err(|e| TropError::Invalid(e.to_string()))?;
    let expected = (1 + b2, k.saturating_sub(1 + b2));
    let matches = symmetric && sig.n_zero == 0 && (sig.n_plus, sig.n_minus) == expected;
    let gram_s = gram.to_rows().iter().map(|r| r.iter().map(crate::linalg::fmt_q).collect()).collect();
    Ok(HodgeIndexReport { h11: k, b2, gram: gram_s, symmetric, signature: sig, expected, matches })
}

/// Subdivides the recession cones containing sigma by the ray through the sum of its rays.
pub fn star_subdivide_recession(y: &PolyComplex, sigma: &[usize]) -> Result<PolyComplex, TropError> {
    let n = y.ambient_dim();
    let mut rays = y.rays().to_vec();
    let new: Vec<i64> = (0..n).map(|j| sigma.iter().map(|&r| y.rays()[r][j]).sum()).collect();
    rays.push(new);
    let nr = rays.len() - 1;
    let mut cells = BTreeSet::new();
    for i in y.maximal_cells() {
        let c = y.face(i);
        if sigma.len() >= 2 && sigma.iter().all(|s| c.r.contains(s)) {
            for &s in sigma {
                let mut r: Vec<usize> = c.r.iter().copied().filter(|&x| x != s).collect();
                r.push(nr);
                cells.insert(Cell::new(c.v.clone(), r));
            }
        } else {
            cells.insert(c.clone());
        }
    }
    complex_from_cells(n, y.vertices().to_vec(), rays, &cells)
}

/// The stratum of sedentarity sigma as a complex in N / span(sigma).
pub fn boundary_stratum(y: &PolyComplex, sigma: &[usize]) -> Result<PolyComplex, TropError> {
    let n = y.ambient_dim();
    let srays: Vec<Vec<i64>> = sigma.iter().map(|&r| y.rays()[r].clone()).collect();
    let (proj, _) = projection_data(&srays, n).ok_or(TropError::RecessionNotUnimodular)?;
    let m = proj.rows();
    let verts: Vec<Vec<Q>> = y.vertices().iter().map(|v| proj.mul_vec(v)).collect();
    let rays: Vec<Vec<i64>> = y
        .rays()
        .iter()
        .map(|r| {
            let v = proj.mul_vec(&crate::linalg::qvec(r));
            v.iter().map(|x| crate::linalg::to_i64(x).expect("integral projection")).collect()
        })
        .collect();
    let mut cells = BTreeSet::new();
    for c in y.faces() {
        if sigma.iter().all(|s| c.r.contains(s)) {
            let r: Vec<usize> = c.r.iter().copied().filter(|x| !sigma.contains(x)).collect();
            cells.insert(Cell::new(c.v.clone(), r));
        }
    }
    if cells.is_empty() {
        return Err(TropError::Invalid(format!("{sigma:?} is not a recession cone")));
    }
    // Rays projecting to zero are exactly those of sigma, which no remaining cell uses.
    let rays: Vec<Vec<i64>> =
        if m == 0 { Vec::new() } else { rays.into_iter().map(|r| if r.iter().all(|&x| x == 0) { unit_ray(m) } else { r }).collect() };
    complex_from_cells(m, verts, rays, &cells)
}

fn unit_ray(m: usize) -> Vec<i64> {
    let mut v = vec![0; m];
    v[0] = 1;
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectiveBundleReport {
    pub before: Vec<Vec<usize>>,
    pub after: Vec<Vec<usize>>,
    pub stratum: Vec<Vec<usize>>,
    pub predicted: Vec<Vec<usize>>,
    pub holds: bool,
}

/// h^{p,q}(X') = h^{p,q}(X) + sum_{s=1}^{|sigma|-1} h^{p-s,q-s}(D^sigma) for the star
/// subdivision X' of X along the recession cone sigma.
pub fn projective_bundle_check(y: &PolyComplex, sigma: &[usize]) -> Result<ProjectiveBundleReport, TropError> {
    let mut sigma = sigma.to_vec();
    sigma.sort_unstable();
    let x = CompactTropicalSpace::compactify(y)?;
    if !x.recession().is_cone(&sigma) {
        return Err(TropError::Invalid(format!("{sigma:?} is not a cone of the recession fan")));
    }
    let before = x.hodge_numbers();
    let after = CompactTropicalSpace::compactify(&star_subdivide_recession(y, &sigma)?)?.hodge_numbers();
    let stratum = CompactTropicalSpace::compactify(&boundary_stratum(y, &sigma)?)?.hodge_numbers();
    let d = before.len();
    let mut predicted = before.clone();
    for p in 0..d {
        for q in 0..d {
            for s in 1..sigma.len() {
                if p >= s && q >= s {
                    if let Some(v) = stratum.get(p - s).and_then(|row| row.get(q - s)) {
                        predicted[p][q] += v;
                    }
                }
            }
        }
    }
    let holds = predicted == after;
    Ok(ProjectiveBundleReport { before, after, stratum, predicted, holds })
}

#[cfg(test)]
mod tests {
    use super::super::tests::{tp1, tp1xtp1, tp2};
    use super::*;

    #[test]
    fn monodromy_basepoints() {
        let x = CompactTropicalSpace::compactify(&tp1xtp1()).unwrap();
        for p in 1..=2 {
            let f = monodromy_cochain(&x, p, &Basepoint::FirstVertex).unwrap();
            assert!(f.commutes(), "p = {p}");
        }
        // With centroids the operator is not a cochain map on a triangle.
        let c = monodromy_cochain(&x, 1, &Basepoint::Centroid).unwrap();
        assert!(!c.commutes());
    }

    #[test]
    fn monodromy_on_tp1_edge() {
        let x = CompactTropicalSpace::compactify(&tp1()).unwrap();
        let n = monodromy_cochain(&x, 1, &Basepoint::Centroid).unwrap();
        // One edge, two vertices; alpha = 1 on the vertex 0 maps to 1/2 on the edge.
        assert_eq!(n.blocks[0].rows(), 1);
        assert_eq!(n.blocks[0].cols(), 2);
        let vals: Vec<String> = n.blocks[0].row(0).iter().map(crate::linalg::fmt_q).collect();
        assert_eq!(vals, vec!["1/2", "-1/2"]);
    }

    #[test]
    fn hodge_index() {
        let r = hodge_index_check(&CompactTropicalSpace::compactify(&tp2()).unwrap()).unwrap();
        assert!(r.matches);
        assert_eq!((r.signature.n_plus, r.signature.n_minus), (1, 0));
        let r = hodge_index_check(&CompactTropicalSpace::compactify(&tp1xtp1()).unwrap()).unwrap();
        assert!(r.matches);
        assert_eq!((r.signature.n_plus, r.signature.n_minus, r.b2), (1, 1, 0));
    }

    #[test]
    fn projective_bundles() {
        let r = projective_bundle_check(&tp2(), &[0, 1]).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.after[1][1], 2);
        let r = projective_bundle_check(&tp1xtp1(), &[0, 1]).unwrap();
        assert!(r.holds, "{r:?}");
        assert_eq!(r.after[1][1], 3);
        let r = projective_bundle_check(&tp2(), &[2]).unwrap();
        assert!(r.holds);
        assert_eq!(r.before, r.after);
    }
}
