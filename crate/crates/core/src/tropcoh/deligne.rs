//! The resolution of F^p of a unimodular fan by the cohomology of its star fans:
//! 0 -> F^p(0) -> sum_{|s|=p} A^0(star s) -> ... -> sum_{|s|=1} A^{p-1}(star s) -> A^p -> 0.

use super::exterior::{binomial, wedge_vectors};
use super::TropError;
use crate::chow::{gysin, relative_star_data, ChowRing};
use crate::fan::Fan;
use crate::linalg::{coords_in, qvec, rank, row_space, QMatrix, Q};
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, Serialize)]
pub struct DeligneReport {
    pub p: usize,
    /// Dimensions of F^p(0) followed by the terms indexed by the Chow degree 0..=p.
    pub dims: Vec<usize>,
    /// Ranks of the consecutive maps.
    pub ranks: Vec<usize>,
    pub composites_vanish: bool,
    pub exact: bool,
}

fn origin_basis(f: &Fan, p: usize) -> Vec<Vec<Q>> {
    let n = f.lattice_rank();
    if p == 0 {
        return vec![vec![Q::from_integer(1.into())]];
    }
    let mut gens = Vec::new();
    for c in f.maximal_cones() {
        let rays: Vec<Vec<Q>> = c.iter().map(|&r| qvec(f.ray(r))).collect();
        for s in rays.iter().combinations(p) {
            gens.push(wedge_vectors(&s.into_iter().cloned().collect::<Vec<_>>(), n));
        }
    }
    if gens.is_empty() {
        return Vec::new();
    }
    row_space(&QMatrix::from_rows_with_cols(gens, binomial(n, p)))
}

pub fn deligne_sequence(f: &Fan, p: usize) -> Result<DeligneReport, TropError> {
    let d = f.dimension();
    if p > d {
        return Err(TropError::Invalid(format!("p = {p} exceeds the dimension {d}")));
    }
    let n = f.lattice_rank();
    // Cones of dimension at most p, with their stars and Chow rings.
    let cones: Vec<Vec<usize>> = f.cones().iter().filter(|c| c.len() <= p).cloned().collect();
    let rings: Vec<(Fan, ChowRing)> = cones
        .par_iter()
        .map(|c| {
            let s = f.star_fan(c)?;
            let r = ChowRing::build(&s)?;
            Ok((s, r))
        })
        .collect::<Result<Vec<_>, TropError>>()?;
    let pos: HashMap<&Vec<usize>, usize> = cones.iter().enumerate().map(|(i, c)| (c, i)).collect();
    // Term j gathers A^j(star s) over cones s of dimension p - j.
    let term_cones: Vec<Vec<usize>> =
        (0..=p).map(|j| (0..cones.len()).filter(|&i| cones[i].len() == p - j).collect()).collect();
    let offsets = |j: usize| -> (Vec<usize>, usize) {
        let mut o = Vec::new();
        let mut acc = 0;
        for &i in &term_cones[j] {
            o.push(acc);
            acc += rings[i].1.dim(j);
        }
        (o, acc)
    };
    let basis = origin_basis(f, p);
    let mut dims = vec![basis.len()];
    let mut maps = Vec::new();
    // F^p(0) -> sum A^0: evaluation on the wedge of the rays.
    let (_, t0) = offsets(0);
    let mut first = QMatrix::zeros(t0, basis.len());
    for (k, &i) in term_cones[0].iter().enumerate() {
        let rays: Vec<Vec<Q>> = cones[i].iter().map(|&r| qvec(f.ray(r))).collect();
        let e = wedge_vectors(&rays, n);
        let co = coords_in(&basis, &e).expect("wedge of a cone lies in F_p");
        for (l, x) in co.into_iter().enumerate() {
            first[(k, l)] = x;
        }
    }
    maps.push(first);
    for j in 0..p {
        let (so, sdim) = offsets(j);
        let (to, tdim) = offsets(j + 1);
        dims.push(sdim);
        let mut m = QMatrix::zeros(tdim, sdim);
        for (sk, &si) in term_cones[j].iter().enumerate() {
            let sigma = &cones[si];
            for (idx, r) in sigma.iter().enumerate() {
                let tau: Vec<usize> = sigma.iter().copied().filter(|x| x != r).collect();
                let ti = pos[&tau];
                let tk = term_cones[j + 1].iter().position(|&x| x == ti).unwrap();
                let (star_t, ring_t) = &rings[ti];
                let (star_s, ring_s) = &rings[si];
                let (cone, map) = relative_star_data(star_t, star_s, sigma)?;
                let g = gysin(ring_t, &cone, ring_s, &map)?;
                let block = if idx % 2 == 0 { g.matrices[j].clone() } else { g.matrices[j].neg() };
                m.set_block(to[tk], so[sk], &block);
            }
        }
        maps.push(m);
    }
    dims.push(offsets(p).1);
    let ranks: Vec<usize> = maps.par_iter().map(rank).collect();
    let composites_vanish = maps.windows(2).all(|w| w[1].mul(&w[0]).is_zero());
    let exact = (0..dims.len()).all(|k| {
        let inc = if k > 0 { ranks[k - 1] } else { 0 };
        let out = ranks.get(k).copied().unwrap_or(0);
        dims[k] == inc + out
    });
    Ok(DeligneReport { p, dims, ranks, composites_vanish, exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::bergman_fan;
    use crate::matroid::Matroid;

    #[test]
    fn exact_for_u33_and_u24() {
        for m in [Matroid::uniform(3, 3), Matroid::uniform(2, 4)] {
            let f = bergman_fan(&m).unwrap();
            for p in 0..=f.dimension() {
                let r = deligne_sequence(&f, p).unwrap();
                assert!(r.composites_vanish, "{r:?}");
                assert!(r.exact, "{r:?}");
            }
        }
    }

    #[test]
    fn dims_for_u33() {
        let f = bergman_fan(&Matroid::uniform(3, 3)).unwrap();
        let r = deligne_sequence(&f, 1).unwrap();
        // F^1(0) is the dual of the plane, six rays, A^1 of dimension four.
        assert_eq!(r.dims, vec![2, 6, 4]);
    }
}
