//! Unimodular triangulations preserving the recession fan, and quasi-projectivity.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num::{BigInt, One, Signed, ToPrimitive, Zero};

use super::convex::{fan_ampleness, strictly_convex_certificate, ConvexityCertificate, PLFunction};
use super::{
    complex_from_pieces, external_cone, independent_subset, point_in_polyhedron, slice_at_height_one, triangulate_fan,
    unimodularity_decomposition, PolyComplex, PolyError,
};
use crate::linalg::{dot, rank_of_vectors, solve, QMatrix, Q};
use crate::lp::{Cmp, Lp, LpOutcome};

/// Largest dilation tried when looking for a unimodular triangulation of the compact part.
pub const MAX_DILATION: u64 = 8;

fn lifting(p: &[Q]) -> Q {
    let mut h = Q::zero();
    for (i, x) in p.iter().enumerate() {
        h += Q::from_integer(BigInt::from(i + 1)) * x * x;
    }
    let eps = Q::new(BigInt::one(), BigInt::from(1000));
    for (i, j) in (0..p.len()).tuple_combinations() {
        h += &eps * &p[i] * &p[j];
    }
    h
}

/// Points of (1/k)Z^n in conv(verts).
fn lattice_points(verts: &[Vec<Q>], k: u64) -> Vec<Vec<Q>> {
    let n = verts[0].len();
    let kq = Q::from_integer(BigInt::from(k));
    let ranges: Vec<std::ops::RangeInclusive<i64>> = (0..n)
        .map(|i| {
            let lo = verts.iter().map(|v| (&v[i] * &kq).floor().to_integer()).min().unwrap();
            let hi = verts.iter().map(|v| (&v[i] * &kq).ceil().to_integer()).max().unwrap();
            lo.to_i64().unwrap()..=hi.to_i64().unwrap()
        })
        .collect();
    ranges
        .into_iter()
        .multi_cartesian_product()
        .map(|c| c.into_iter().map(|x| Q::new(BigInt::from(x), BigInt::from(k))).collect::<Vec<Q>>())
        .filter(|p| point_in_polyhedron(verts, &[], p))
        .collect()
}

/// Regular triangulation of conv(verts) using every point of (1/k)Z^n in it, from a fixed
/// strictly convex lifting. Returns the maximal simplices as point lists.
fn regular_triangulation(verts: &[Vec<Q>], k: u64) -> Result<Vec<Vec<Vec<Q>>>, PolyError> {
    let n = verts[0].len();
    let pts = lattice_points(verts, k);
    let diffs: Vec<Vec<Q>> = verts[1..].iter().map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
    let basis: Vec<Vec<Q>> = independent_subset(&diffs, n).into_iter().map(|i| diffs[i].clone()).collect();
    let d = basis.len();
    if d == 0 {
        return Ok(vec![vec![verts[0].clone()]]);
    }
    let local: Vec<Vec<Q>> = pts
        .iter()
        .map(|p| {
            let w: Vec<Q> = p.iter().zip(&verts[0]).map(|(a, b)| a - b).collect();
            solve(&QMatrix::from_cols(&basis, n), &w).expect("point lies in the affine span")
        })
        .collect();
    let heights: Vec<Q> = pts.iter().map(|p| lifting(p)).collect();
    let hom: Vec<Vec<Q>> = local.iter().map(|l| l.iter().cloned().chain(std::iter::once(Q::one())).collect()).collect();
    let mut out = Vec::new();
    for s in (0..pts.len()).combinations(d + 1) {
        let rows: Vec<Vec<Q>> = s.iter().map(|&i| hom[i].clone()).collect();
        if rank_of_vectors(&rows, d + 1) < d + 1 {
            continue;
        }
        let rhs: Vec<Q> = s.iter().map(|&i| heights[i].clone()).collect();
        let g = solve(&QMatrix::from_rows(rows), &rhs).expect("affinely independent");
        let mut lower = true;
        for i in (0..pts.len()).filter(|i| !s.contains(i)) {
            let gap = &heights[i] - dot(&g, &hom[i]);
            if gap.is_negative() {
                lower = false;
                break;
            }
            if gap.is_zero() {
                return Err(PolyError::CompactPartTooHard("lifting is not generic".into()));
            }
        }
        if lower {
            out.push(s.iter().map(|&i| pts[i].clone()).collect());
        }
    }
    Ok(out)
}

/// Whether a cell is combinatorially conv(V) x cone(R): its rays independent modulo the span of
/// its finite part.
fn is_product_like(x: &PolyComplex, i: usize) -> bool {
    let c = x.face(i);
    let n = x.ambient_dim();
    let verts = x.cell_vertices(c);
    let diffs: Vec<Vec<Q>> = verts[1..].iter().map(|v| v.iter().zip(&verts[0]).map(|(a, b)| a - b).collect()).collect();
    let mut all = diffs.clone();
    all.extend(x.cell_rays(c));
    rank_of_vectors(&all, n) == rank_of_vectors(&diffs, n) + c.r.len()
}

/// Simplicial subdivision with the same recession fan, unimodular with respect to (1/k)Z^n
/// for the returned k.
pub fn recession_preserving_subdivision(x: &PolyComplex) -> Result<(PolyComplex, u64), PolyError> {
    let fan = x.recession_fan()?;
    if !fan.is_unimodular() {
        return Err(PolyError::RecessionNotUnimodular);
    }
    let cells = x.maximal_cells();
    let base = if cells.iter().all(|&i| is_product_like(x, i)) {
        x.clone()
    } else {
        // Cones with a vertex at height one get blown up, which leaves the height zero part intact.
        slice_at_height_one(&triangulate_fan(&external_cone(x))?)?
    };
    let k0 = base.scale();
    let compact_dim = base.compact_faces().iter().map(|&i| base.dim_of(i)).max().unwrap_or(0);
    let mut last = String::new();
    for m in 1..=MAX_DILATION {
        let k = k0 * m;
        match refine_at_scale(&base, k) {
            Ok(y) => return Ok((y, k)),
            Err(PolyError::CompactPartTooHard(s)) => last = s,
            Err(e) => return Err(e),
        }
    }
    Err(PolyError::CompactPartTooHard(format!("compact part of dimension {compact_dim}: {last}")))
}

fn refine_at_scale(x: &PolyComplex, k: u64) -> Result<PolyComplex, PolyError> {
    let mut cache: HashMap<Vec<usize>, Vec<Vec<Vec<Q>>>> = HashMap::new();
    let mut pieces = Vec::new();
    for i in x.maximal_cells() {
        let c = x.face(i);
        if !cache.contains_key(&c.v) {
            cache.insert(c.v.clone(), regular_triangulation(&x.cell_vertices(c), k)?);
        }
        let rays: Vec<Vec<i64>> = c.r.iter().map(|&r| x.rays()[r].clone()).collect();
        for simplex in &cache[&c.v] {
            let (finite, relative) = unimodularity_decomposition(simplex, &rays, k);
            if !finite {
                return Err(PolyError::CompactPartTooHard(format!("non-unimodular simplex at scale {k}")));
            }
            if !relative {
                return Err(PolyError::RelativeNotUnimodular { face: i });
            }
            pieces.push((simplex.clone(), rays.clone()));
        }
    }
    complex_from_pieces(x.ambient_dim(), &pieces)
}

/// A unimodular triangulation with a certified strictly convex function.
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub complex: PolyComplex,
    pub k: u64,
    pub function: PLFunction,
    /// Certificate for the function on the complex.
    pub certificate: ConvexityCertificate,
    /// Certificate for its slopes on the recession fan.
    pub recession_certificate: ConvexityCertificate,
}

/// Searches for a function on y strictly convex around every face and whose slopes are
/// strictly convex on the recession fan, as one LP over values, slopes and local supports.
pub fn find_strictly_convex_function(y: &PolyComplex) -> Result<PLFunction, PolyError> {
    let n = y.ambient_dim();
    let nv = y.vertices().len();
    let nr = y.rays().len();
    let fan = y.recession_fan()?;
    let nf = y.faces().len();
    let nc = fan.cones().len();
    // Layout: f(v), s(r), then (a, c) per face, then m per recession cone, then t.
    let face_off = nv + nr;
    let cone_off = face_off + nf * (n + 1);
    let t = cone_off + nc * n;
    let nvars = t + 1;
    let mut lp = Lp::new(nvars);
    lp.free = vec![true; nvars];
    lp.objective[t] = Q::one();
    let mut rows: Vec<(BTreeMap<usize, Q>, Cmp)> = Vec::new();
    for (d, delta) in y.faces().iter().enumerate() {
        let a0 = face_off + d * (n + 1);
        // ell(w) = a.w + c as sparse coefficients.
        let ell_v = |w: usize| -> BTreeMap<usize, Q> {
            let mut row: BTreeMap<usize, Q> = (0..n).map(|j| (a0 + j, y.vertices()[w][j].clone())).collect();
            row.insert(a0 + n, Q::one());
            row
        };
        let ell_r = |r: usize| -> BTreeMap<usize, Q> { (0..n).map(|j| (a0 + j, Q::from_integer(y.rays()[r][j].into()))).collect() };
        for &v in &delta.v {
            let mut row = ell_v(v);
            row.insert(v, -Q::one());
            rows.push((row, Cmp::Eq));
        }
        for &r in &delta.r {
            let mut row = ell_r(r);
            row.insert(nv + r, -Q::one());
            rows.push((row, Cmp::Eq));
        }
        let star = y.star(d);
        let nbr_v: Vec<usize> = star.iter().flat_map(|&j| y.face(j).v.clone()).filter(|v| !delta.v.contains(v)).sorted().dedup().collect();
        let nbr_r: Vec<usize> = star.iter().flat_map(|&j| y.face(j).r.clone()).filter(|r| !delta.r.contains(r)).sorted().dedup().collect();
        // ell(w) - f(w) + t <= 0
        for v in nbr_v {
            let mut row = ell_v(v);
            row.insert(v, -Q::one());
            row.insert(t, Q::one());
            rows.push((row, Cmp::Le));
        }
        for r in nbr_r {
            let mut row = ell_r(r);
            row.insert(nv + r, -Q::one());
            row.insert(t, Q::one());
            rows.push((row, Cmp::Le));
        }
    }
    for (ci, cone) in fan.cones().iter().enumerate() {
        let m0 = cone_off + ci * n;
        let m_r = |r: usize| -> BTreeMap<usize, Q> { (0..n).map(|j| (m0 + j, Q::from_integer(fan.ray(r)[j].into()))).collect() };
        for &r in cone {
            let mut row = m_r(r);
            row.insert(nv + r, -Q::one());
            rows.push((row, Cmp::Eq));
        }
        let nbrs: Vec<usize> = fan
            .cones()
            .iter()
            .filter(|c| cone.iter().all(|r| c.contains(r)))
            .flatten()
            .copied()
            .filter(|r| !cone.contains(r))
            .sorted()
            .dedup()
            .collect();
        for r in nbrs {
            let mut row = m_r(r);
            row.insert(nv + r, -Q::one());
            row.insert(t, Q::one());
            rows.push((row, Cmp::Le));
        }
    }
    for (row, cmp) in rows {
        let mut dense = vec![Q::zero(); nvars];
        for (j, v) in row {
            dense[j] += v;
        }
        lp.add(dense, cmp, Q::zero());
    }
    let mut cap = vec![Q::zero(); nvars];
    cap[t] = Q::one();
    lp.add(cap, Cmp::Le, Q::one());
    match lp.solve() {
        LpOutcome::Optimal { x, value, .. } if value.is_positive() => {
            Ok(PLFunction { values: x[..nv].to_vec(), slopes: x[nv..nv + nr].to_vec() })
        }
        LpOutcome::Optimal { value, .. } => Err(PolyError::NotQuasiProjective(crate::linalg::fmt_q(&value))),
        LpOutcome::Infeasible { .. } => Err(PolyError::NotQuasiProjective("infeasible".into())),
        LpOutcome::Unbounded => unreachable!("margin is capped"),
    }
}

/// Unimodular triangulation preserving the recession fan, together with a strictly convex
/// function whose slopes are strictly convex on the recession fan. Both properties are
/// re-certified face by face after the search.
pub fn quasiprojective_unimodular_triangulation(x: &PolyComplex) -> Result<Triangulation, PolyError> {
    let (complex, k) = recession_preserving_subdivision(x)?;
    let function = find_strictly_convex_function(&complex)?;
    let certificate = strictly_convex_certificate(&complex, &function)?;
    let recession_certificate = fan_ampleness(&complex.recession_fan()?, &function.slopes)?;
    if !certificate.strict || !recession_certificate.strict {
        return Err(PolyError::NotQuasiProjective("post-hoc certificate failed".into()));
    }
    Ok(Triangulation { complex, k, function, certificate, recession_certificate })
}

/// Rays of y as integer vectors (for comparing recession fans across subdivisions).
pub fn sorted_rays(y: &PolyComplex) -> Vec<Vec<i64>> {
    let mut r: Vec<Vec<i64>> = y.rays().to_vec();
    r.sort();
    r
}

/// Whether two complexes have the same recession fan (same rays and cones).
pub fn same_recession(a: &PolyComplex, b: &PolyComplex) -> Result<bool, PolyError> {
    let fa = a.recession_fan()?;
    let fb = b.recession_fan()?;
    let key = |f: &crate::fan::Fan| -> Vec<Vec<Vec<i64>>> {
        let mut cones: Vec<Vec<Vec<i64>>> = f
            .cones()
            .iter()
            .map(|c| {
                let mut rs: Vec<Vec<i64>> = c.iter().map(|&r| f.ray(r).to_vec()).collect();
                rs.sort();
                rs
            })
            .collect();
        cones.sort();
        cones
    };
    Ok(key(&fa) == key(&fb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qvec;
    use crate::polyhedral::Cell;

    fn pt(xs: &[i64]) -> Vec<Q> {
        qvec(xs)
    }

    fn long_edge() -> PolyComplex {
        PolyComplex::new(1, vec![pt(&[0]), pt(&[3])], vec![vec![-1], vec![1]], &[Cell::new(vec![0, 1], vec![]), Cell::new(vec![0], vec![0]), Cell::new(vec![1], vec![1])]).unwrap()
    }

    fn square_complex() -> PolyComplex {
        let v = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])];
        // rays: +e1, -e1, +e2, -e2
        let r = vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]];
        let cells = [
            Cell::new(vec![0, 1, 2, 3], vec![]),
            Cell::new(vec![0, 1], vec![3]),
            Cell::new(vec![2, 3], vec![2]),
            Cell::new(vec![0, 2], vec![1]),
            Cell::new(vec![1, 3], vec![0]),
            Cell::new(vec![0], vec![1, 3]),
            Cell::new(vec![1], vec![0, 3]),
            Cell::new(vec![2], vec![1, 2]),
            Cell::new(vec![3], vec![0, 2]),
        ];
        PolyComplex::new(2, v, r, &cells).unwrap()
    }

    #[test]
    fn regular_triangulations() {
        assert_eq!(regular_triangulation(&[pt(&[0]), pt(&[3])], 1).unwrap().len(), 3);
        let sq = [pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])];
        assert_eq!(regular_triangulation(&sq, 1).unwrap().len(), 2);
        assert_eq!(regular_triangulation(&sq, 2).unwrap().len(), 8);
        let big = [pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2])];
        assert_eq!(regular_triangulation(&big, 1).unwrap().len(), 4);
    }

    #[test]
    fn long_edge_is_split() {
        let x = long_edge();
        let (y, k) = recession_preserving_subdivision(&x).unwrap();
        assert_eq!(k, 1);
        assert_eq!(y.vertices().len(), 4);
        assert!(y.is_unimodular(k));
        assert!(same_recession(&x, &y).unwrap());
        let t = quasiprojective_unimodular_triangulation(&x).unwrap();
        assert!(t.certificate.verify(&t.complex, &t.function));
    }

    #[test]
    fn square_complex_is_triangulated() {
        let x = square_complex();
        assert!(x.recession_fan().unwrap().is_complete());
        let t = quasiprojective_unimodular_triangulation(&x).unwrap();
        assert_eq!(t.k, 1);
        assert!(t.complex.is_unimodular(1));
        assert!(same_recession(&x, &t.complex).unwrap());
        assert_eq!(t.complex.maximal_cells().len(), 10);
    }

    #[test]
    fn unimodular_input_is_unchanged() {
        let x = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])], vec![], &[Cell::new(vec![0, 1, 2], vec![])]).unwrap();
        let t = quasiprojective_unimodular_triangulation(&x).unwrap();
        assert_eq!((t.k, t.complex.faces().len()), (1, x.faces().len()));
    }

    #[test]
    fn fan_input() {
        let f = crate::fan::Fan::new(2, vec![vec![1, 0], vec![1, 2]], &[vec![0, 1]]).unwrap();
        let x = PolyComplex::from_fan(&f);
        assert!(matches!(recession_preserving_subdivision(&x), Err(PolyError::RecessionNotUnimodular)));
        let g = crate::fan::Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let t = quasiprojective_unimodular_triangulation(&PolyComplex::from_fan(&g)).unwrap();
        assert!(t.recession_certificate.strict);
    }

    #[test]
    fn non_product_cell_goes_through_the_cone() {
        // Triangle plus the ray (1,1): four generators in dimension two.
        let x = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])], vec![vec![1, 1]], &[Cell::new(vec![0, 1, 2], vec![0])]).unwrap();
        let y = slice_at_height_one(&triangulate_fan(&external_cone(&x)).unwrap()).unwrap();
        assert!(y.is_simplicial());
        assert!(same_recession(&x, &y).unwrap());
        // The stellar step leaves the half-strip over the edge (1,0)-(2/3,2/3) with the ray
        // (1,1) at relative index 3, which no finer lattice repairs.
        assert_eq!(recession_preserving_subdivision(&x).unwrap_err(), PolyError::RelativeNotUnimodular { face: 14 });
    }
}
