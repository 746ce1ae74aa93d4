//! Kähler forms, the operators N and l, the pairing psi and the checks built on them.

use super::{SteenbrinkComplex, SteenbrinkError};
use crate::chow::ChowElement;
use crate::linalg::{kernel_basis, rank, row_space, signature, QMatrix, Signature, Q};
use crate::polyhedral::convex::{fan_ampleness, PLFunction};
use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

/// Local classes l^delta in A^1(Sigma^delta) for every compact face.
#[derive(Clone, Debug)]
pub struct KahlerForm {
    /// Values of the local convex function on the rays of each vertex star, by star index.
    pub vertex_values: Vec<(usize, Vec<Q>)>,
    pub local: Vec<ChowElement>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OperatorReport {
    pub kahler_closed: bool,
    pub n_commutes_with_i_star: bool,
    pub n_commutes_with_gys: bool,
    pub ell_commutes_with_n: bool,
    pub ell_commutes_with_i_star: bool,
    pub ell_commutes_with_gys: bool,
    /// N^{-a}: ST^{a,b} -> ST^{-a,b+2a} for a <= 0.
    pub n_powers_iso: bool,
    /// l^{d-a-b}: ST^{a,b} -> ST^{a,2d-2a-b} for a + b <= d.
    pub ell_powers_iso: bool,
    /// The same two statements on row cohomology.
    pub n_powers_iso_on_cohomology: bool,
    pub ell_powers_iso_on_cohomology: bool,
    pub diamond_symmetric: bool,
}

impl OperatorReport {
    pub fn all(&self) -> bool {
        self.kahler_closed
            && self.n_commutes_with_i_star
            && self.n_commutes_with_gys
            && self.ell_commutes_with_n
            && self.ell_commutes_with_i_star
            && self.ell_commutes_with_gys
            && self.n_powers_iso
            && self.ell_powers_iso
            && self.n_powers_iso_on_cohomology
            && self.ell_powers_iso_on_cohomology
            && self.diamond_symmetric
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimitiveReport {
    /// P^{a,b} equals the sum of the local primitive parts P^{2a+b}(delta), dim delta = -a.
    pub matches_local: bool,
    /// ST^{a,b} is the direct sum of the l^r N^s P^{a-2s,b+2s-2r}.
    pub decomposition: bool,
    /// (a, b, dim P^{a,b}) for a <= 0, b <= d - a with nonzero primitive part.
    pub dims: Vec<(i64, i64, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolarizationReport {
    /// psi(x,y) = (-1)^d psi(y,x), then skewness of N, l, (i*, gys), (gys, i*) and d.
    pub identities: [bool; 6],
    /// Signatures of psi(., l^{d-a-b} N^{-a} .) on P^{a,b}.
    pub signatures: Vec<(i64, i64, Signature)>,
    pub positive: bool,
}

impl PolarizationReport {
    pub fn all(&self) -> bool {
        self.identities.iter().all(|&x| x) && self.positive
    }
}

fn pow_chain(ms: Vec<QMatrix>, n: usize) -> QMatrix {
    ms.into_iter().fold(QMatrix::identity(n), |acc, m| m.mul(&acc))
}

/// Rank of the map induced on cohomology by m: H(src) -> H(tgt), given the cocycles of the
/// source and the coboundaries of the target.
fn induced_rank(m: &QMatrix, cocycles: &[Vec<Q>], boundaries: &QMatrix) -> usize {
    let rb = rank(boundaries);
    let img: Vec<Vec<Q>> = cocycles.iter().map(|z| m.mul_vec(z)).collect();
    let cols = QMatrix::from_cols(&img, m.rows());
    rank(&boundaries.hstack(&cols)) - rb
}

fn basis_matrix(vs: &[Vec<Q>], n: usize) -> QMatrix {
    QMatrix::from_cols(vs, n)
}

impl SteenbrinkComplex {
    /// Ray values of the local functions induced by a piecewise linear function on each vertex
    /// star: k(f(w) - f(v)) on the ray of an edge vw, the slope on an unbounded ray.
    pub fn local_values(&self, f: &PLFunction) -> Vec<(usize, Vec<Q>)> {
        let y = &self.y;
        let k = self.scale;
        self.stars
            .iter()
            .enumerate()
            .filter(|(_, st)| st.dim == 0)
            .map(|(j, st)| {
                let v = y.face(st.face).v[0];
                let vals = st
                    .cover
                    .iter()
                    .map(|&eta| {
                        let e = y.face(eta);
                        if e.r.is_empty() {
                            let w = *e.v.iter().find(|&&x| x != v).expect("edge");
                            (&f.values[w] - &f.values[v]) * Q::from_integer((k as i64).into())
                        } else {
                            f.slopes[e.r[0]].clone()
                        }
                    })
                    .collect();
                (j, vals)
            })
            .collect()
    }

    /// The element of ST^{0,2} given by local classes at the vertices.
    pub fn vertex_class(&self, values: &[(usize, Vec<Q>)]) -> Vec<Q> {
        let parts: Vec<(usize, Vec<Q>)> =
            values.iter().map(|(j, v)| (*j, self.stars[*j].ring.ell_class(v).coords)).collect();
        self.assemble(0, 2, &parts)
    }

    /// Restriction of a class on the star of gamma to the star of a compact face containing it,
    /// along the chain of faces obtained by adding the missing vertices in order.
    pub fn restrict_to(&self, x: &ChowElement, gamma: usize, delta: usize) -> ChowElement {
        let y = &self.y;
        let target = y.face(self.stars[delta].face).v.clone();
        let mut cur = gamma;
        let mut verts = y.face(self.stars[gamma].face).v.clone();
        let mut out = x.clone();
        for w in target {
            if verts.contains(&w) {
                continue;
            }
            verts.push(w);
            verts.sort_unstable();
            let f = y.face_index(&crate::polyhedral::Cell::new(verts.clone(), vec![])).expect("face");
            let next = self.pos[&f];
            out = self.pair_restriction(cur, next).expect("covering pair").apply(&out);
            cur = next;
        }
        out
    }

    /// Kähler form from local convex functions on the vertex stars: checks ampleness and edge
    /// compatibility, then sets l^delta = i*(l^v) for the first vertex v of delta.
    pub fn kahler_form(&self, values: &[(usize, Vec<Q>)]) -> Result<KahlerForm, SteenbrinkError> {
        let mut at_vertex: Vec<Option<ChowElement>> = vec![None; self.stars.len()];
        for (j, v) in values {
            let st = self.stars.get(*j).filter(|s| s.dim == 0).ok_or_else(|| {
                SteenbrinkError::Invalid(format!("{j} is not a vertex star"))
            })?;
            if v.len() != st.cover.len() {
                return Err(SteenbrinkError::Invalid(format!("wrong number of ray values at vertex star {j}")));
            }
            let cert = fan_ampleness(st.ring.fan(), v)?;
            if !cert.strict || cert.failing_face().is_some() {
                return Err(SteenbrinkError::NotAmple(st.face));
            }
            at_vertex[*j] = Some(st.ring.ell_class(v));
        }
        for (j, st) in self.stars.iter().enumerate() {
            if st.dim == 0 && at_vertex[j].is_none() {
                return Err(SteenbrinkError::Invalid(format!("no local class at vertex {}", st.face)));
            }
        }
        let vertex_star = |v: usize| -> usize {
            let f = self.y.face_index(&crate::polyhedral::Cell::new(vec![v], vec![])).expect("vertex");
            self.pos[&f]
        };
        let mut local = Vec::new();
        for (j, st) in self.stars.iter().enumerate() {
            let verts = &self.y.face(st.face).v;
            let first = vertex_star(verts[0]);
            let l = self.restrict_to(at_vertex[first].as_ref().unwrap(), first, j);
            for &w in &verts[1..] {
                let other = vertex_star(w);
                if self.restrict_to(at_vertex[other].as_ref().unwrap(), other, j) != l {
                    return Err(SteenbrinkError::EdgeIncompatible { u: verts[0], v: w, edge: st.face });
                }
            }
            local.push(l);
        }
        Ok(KahlerForm { vertex_values: values.to_vec(), local })
    }

    pub fn kahler_from_function(&self, f: &PLFunction) -> Result<KahlerForm, SteenbrinkError> {
        self.kahler_form(&self.local_values(f))
    }

    /// N: ST^{a,b} -> ST^{a+2,b-2}.
    pub fn monodromy(&self, a: i64, b: i64) -> QMatrix {
        let (src, tgt) = (self.layout(a, b), self.layout(a + 2, b - 2));
        let mut m = QMatrix::zeros(tgt.dim, src.dim);
        for x in &src.summands {
            if (x.s as i64) < (a + 2).abs() {
                continue;
            }
            if let Some(t) = tgt.find_star(x.star) {
                m.set_block(t.offset, x.offset, &QMatrix::identity(x.len));
            }
        }
        m
    }

    /// l: ST^{a,b} -> ST^{a,b+2}.
    pub fn lefschetz(&self, kf: &KahlerForm, a: i64, b: i64) -> QMatrix {
        let (src, tgt) = (self.layout(a, b), self.layout(a, b + 2));
        let mut m = QMatrix::zeros(tgt.dim, src.dim);
        for x in &src.summands {
            if let Some(t) = tgt.find_star(x.star) {
                let ring = &self.stars[x.star].ring;
                let block = ring.multiplication_matrix(&kf.local[x.star], x.k).expect("degree in range");
                m.set_block(t.offset, x.offset, &block);
            }
        }
        m
    }

    /// Gram matrix of psi between ST^{a,b} (rows) and ST^{-a,2d-b} (columns).
    pub fn psi(&self, a: i64, b: i64) -> QMatrix {
        let d = self.d as i64;
        let (src, tgt) = (self.layout(a, b), self.layout(-a, 2 * d - b));
        let mut m = QMatrix::zeros(src.dim, tgt.dim);
        if b % 2 != 0 {
            return m;
        }
        let eps = if (a + b / 2).rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
        for x in &src.summands {
            if let Some(t) = tgt.find_star(x.star) {
                let ring = &self.stars[x.star].ring;
                let block = ring.bilinear(x.k, t.k, None).expect("complementary degrees");
                m.set_block(x.offset, t.offset, &block.scale(&eps));
            }
        }
        m
    }

    fn n_power(&self, a: i64, b: i64, e: usize) -> QMatrix {
        let ms = (0..e as i64).map(|i| self.monodromy(a + 2 * i, b - 2 * i)).collect();
        pow_chain(ms, self.dim(a, b))
    }

    fn ell_power(&self, kf: &KahlerForm, a: i64, b: i64, e: usize) -> QMatrix {
        let ms = (0..e as i64).map(|i| self.lefschetz(kf, a, b + 2 * i)).collect();
        pow_chain(ms, self.dim(a, b))
    }

    fn cohomology_data(&self, a: i64, b: i64) -> (Vec<Vec<Q>>, QMatrix, usize) {
        let z = kernel_basis(&self.differential(a, b));
        let bd = self.differential(a - 1, b);
        let h = z.len() - rank(&bd);
        (z, bd, h)
    }

    pub fn operator_checks(&self, kf: &KahlerForm) -> OperatorReport {
        let d = self.d as i64;
        let omega = self.assemble(
            0,
            2,
            &self.stars.iter().enumerate().filter(|(_, s)| s.dim == 0).map(|(j, _)| (j, kf.local[j].coords.clone())).collect::<Vec<_>>(),
        );
        let kahler_closed = self.differential(0, 2).mul_vec(&omega).iter().all(|x| x.is_zero());
        let grid = self.grid();
        let checks: Vec<[bool; 11]> = grid
            .par_iter()
            .map(|&(a, b)| {
                let n0 = self.monodromy(a, b);
                let l0 = self.lefschetz(kf, a, b);
                let comm = |f: &dyn Fn(i64, i64) -> QMatrix, g: &dyn Fn(i64, i64) -> QMatrix, fa: i64, fb: i64| {
                    // g after f versus f after g, with f of bidegree (fa, fb) and g of bidegree (1, 0).
                    g(a + fa, b + fb).mul(&f(a, b)).sub(&f(a + 1, b).mul(&g(a, b))).is_zero()
                };
                let nf = |x: i64, y: i64| self.monodromy(x, y);
                let lf = |x: i64, y: i64| self.lefschetz(kf, x, y);
                let is = |x: i64, y: i64| self.i_star(x, y);
                let gy = |x: i64, y: i64| self.gys(x, y);
                let ln = self.monodromy(a, b + 2).mul(&l0).sub(&self.lefschetz(kf, a + 2, b - 2).mul(&n0)).is_zero();
                let n_iso = if a <= 0 && b % 2 == 0 {
                    let m = self.n_power(a, b, (-a) as usize);
                    let (s, t) = (self.dim(a, b), self.dim(-a, b + 2 * a));
                    s == t && rank(&m) == s
                } else {
                    true
                };
                let l_iso = if a + b <= d && b % 2 == 0 {
                    let m = self.ell_power(kf, a, b, (d - a - b) as usize);
                    let (s, t) = (self.dim(a, b), self.dim(a, 2 * d - 2 * a - b));
                    s == t && rank(&m) == s
                } else {
                    true
                };
                let n_iso_h = if a <= 0 && b % 2 == 0 {
                    let m = self.n_power(a, b, (-a) as usize);
                    let (z, _, hs) = self.cohomology_data(a, b);
                    let (_, bd, ht) = self.cohomology_data(-a, b + 2 * a);
                    hs == ht && induced_rank(&m, &z, &bd) == hs
                } else {
                    true
                };
                let l_iso_h = if a + b <= d && b % 2 == 0 {
                    let m = self.ell_power(kf, a, b, (d - a - b) as usize);
                    let (z, _, hs) = self.cohomology_data(a, b);
                    let (_, bd, ht) = self.cohomology_data(a, 2 * d - 2 * a - b);
                    hs == ht && induced_rank(&m, &z, &bd) == hs
                } else {
                    true
                };
                let diamond = {
                    let s = self.dim(a, b);
                    s == self.dim(-a, b + 2 * a) && s == self.dim(a, 2 * d - 2 * a - b)
                };
                [
                    comm(&nf, &is, 2, -2),
                    comm(&nf, &gy, 2, -2),
                    ln,
                    comm(&lf, &is, 0, 2),
                    comm(&lf, &gy, 0, 2),
                    n_iso,
                    l_iso,
                    n_iso_h,
                    l_iso_h,
                    diamond,
                    true,
                ]
            })
            .collect();
        let all = |k: usize| checks.iter().all(|c| c[k]);
        OperatorReport {
            kahler_closed,
            n_commutes_with_i_star: all(0),
            n_commutes_with_gys: all(1),
            ell_commutes_with_n: all(2),
            ell_commutes_with_i_star: all(3),
            ell_commutes_with_gys: all(4),
            n_powers_iso: all(5),
            ell_powers_iso: all(6),
            n_powers_iso_on_cohomology: all(7),
            ell_powers_iso_on_cohomology: all(8),
            diamond_symmetric: all(9),
        }
    }

    /// Basis of P^{a,b} = ST^{a,b} cap ker N^{-a+1} cap ker l^{d-a-b+1}, for a <= 0, b <= d - a.
    pub fn primitive_part(&self, kf: &KahlerForm, a: i64, b: i64) -> Vec<Vec<Q>> {
        let d = self.d as i64;
        assert!(a <= 0 && b <= d - a, "primitive parts need a <= 0 and b <= d - a");
        let n = self.dim(a, b);
        if n == 0 {
            return Vec::new();
        }
        let m = self.n_power(a, b, (1 - a) as usize).vstack(&self.ell_power(kf, a, b, (d - a - b + 1) as usize));
        kernel_basis(&m)
    }

    /// The sum over faces of dimension -a of the local primitive parts P^{2a+b}(delta).
    fn local_primitive(&self, kf: &KahlerForm, a: i64, b: i64) -> Vec<Vec<Q>> {
        let d = self.d as i64;
        let l = self.layout(a, b);
        let mut out = Vec::new();
        for x in l.summands.iter().filter(|x| x.s as i64 == -a) {
            let ring = &self.stars[x.star].ring;
            let e = (d - x.s as i64 - 2 * x.k as i64 + 1) as usize;
            let ell = &kf.local[x.star];
            let m = if x.k + e > ring.top_degree() {
                QMatrix::zeros(0, x.len)
            } else {
                (0..e).fold(QMatrix::identity(x.len), |acc, i| {
                    ring.multiplication_matrix(ell, x.k + i).expect("degree in range").mul(&acc)
                })
            };
            for v in kernel_basis(&m) {
                let mut full = vec![Q::zero(); l.dim];
                for (i, t) in v.into_iter().enumerate() {
                    full[x.offset + i] = t;
                }
                out.push(full);
            }
        }
        out
    }

    fn primitive_range(&self) -> Vec<(i64, i64)> {
        let d = self.d as i64;
        (-d..=0).flat_map(|a| (0..=(d - a)).filter(|b| b % 2 == 0).map(move |b| (a, b))).collect()
    }

    pub fn primitive_report(&self, kf: &KahlerForm) -> PrimitiveReport {
        let d = self.d as i64;
        let range = self.primitive_range();
        let prims: Vec<((i64, i64), Vec<Vec<Q>>)> =
            range.par_iter().map(|&(a, b)| ((a, b), self.primitive_part(kf, a, b))).collect();
        let matches_local = prims.par_iter().all(|((a, b), p)| {
            let n = self.dim(*a, *b);
            row_space(&basis_matrix(p, n).transpose()) == row_space(&basis_matrix(&self.local_primitive(kf, *a, *b), n).transpose())
        });
        let lookup = |a: i64, b: i64| prims.iter().find(|(k, _)| *k == (a, b)).map(|(_, p)| p.clone()).unwrap_or_default();
        let decomposition = range.par_iter().all(|&(a, b)| {
            let n = self.dim(a, b);
            let mut cols: Vec<Vec<Q>> = Vec::new();
            for s in 0..=d {
                for r in 0..=(2 * d) {
                    let (pa, pb) = (a - 2 * s, b + 2 * s - 2 * r);
                    if pa < -d || pb < 0 || pb > d - pa {
                        continue;
                    }
                    let p = lookup(pa, pb);
                    if p.is_empty() {
                        continue;
                    }
                    // l^r N^s maps ST^{pa,pb} to ST^{a,b}.
                    let nm = self.n_power(pa, pb, s as usize);
                    let lm = self.ell_power(kf, pa + 2 * s, pb - 2 * s, r as usize);
                    let m = lm.mul(&nm);
                    cols.extend(p.iter().map(|v| m.mul_vec(v)));
                }
            }
            cols.len() == n && (n == 0 || rank(&basis_matrix(&cols, n)) == n)
        });
        let dims = prims.iter().filter(|(_, p)| !p.is_empty()).map(|((a, b), p)| (*a, *b, p.len())).collect();
        PrimitiveReport { matches_local, decomposition, dims }
    }

    pub fn polarization_check(&self, kf: &KahlerForm) -> PolarizationReport {
        let d = self.d as i64;
        let sign_d = if d % 2 == 0 { Q::one() } else { -Q::one() };
        let grid = self.grid();
        let ids: Vec<[bool; 6]> = grid
            .par_iter()
            .map(|&(a, b)| {
                let g = self.psi(a, b);
                let sym = g == self.psi(-a, 2 * d - b).transpose().scale(&sign_d);
                // psi(Fx, y) + psi(x, Gy) = 0 with F: (a,b) -> (a+da, b+db).
                let skew = |f: QMatrix, gm: QMatrix, da: i64, db: i64| -> bool {
                    f.transpose().mul(&self.psi(a + da, b + db)).add(&g.mul(&gm)).is_zero()
                };
                [
                    sym,
                    skew(self.monodromy(a, b), self.monodromy(-a - 2, 2 * d - b + 2), 2, -2),
                    skew(self.lefschetz(kf, a, b), self.lefschetz(kf, -a, 2 * d - b - 2), 0, 2),
                    skew(self.i_star(a, b), self.gys(-a - 1, 2 * d - b), 1, 0),
                    skew(self.gys(a, b), self.i_star(-a - 1, 2 * d - b), 1, 0),
                    skew(self.differential(a, b), self.differential(-a - 1, 2 * d - b), 1, 0),
                ]
            })
            .collect();
        let mut identities = [true; 6];
        for c in &ids {
            for k in 0..6 {
                identities[k] &= c[k];
            }
        }
        let signatures: Vec<(i64, i64, Signature)> = self
            .primitive_range()
            .par_iter()
            .filter_map(|&(a, b)| {
                let p = self.primitive_part(kf, a, b);
                if p.is_empty() {
                    return None;
                }
                let n = self.dim(a, b);
                let bm = basis_matrix(&p, n);
                let m = self.ell_power(kf, -a, b + 2 * a, (d - a - b) as usize).mul(&self.n_power(a, b, (-a) as usize));
                let gram = bm.transpose().mul(&self.psi(a, b)).mul(&m).mul(&bm);
                let sig = signature(&gram).unwrap_or(Signature { n_plus: 0, n_minus: 0, n_zero: p.len() });
                Some((a, b, sig))
            })
            .collect();
        let positive = signatures.iter().all(|(_, _, s)| s.n_minus == 0 && s.n_zero == 0);
        PolarizationReport { identities, signatures, positive }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::build;
    use crate::linalg::q;
    use crate::polyhedral::convex::PLFunction;
    use crate::polyhedral::triangulate::find_strictly_convex_function;
    use crate::tropcoh::tests::{tp1, tp1xtp1, tp2};

    #[test]
    fn tp1_full_suite() {
        let (_, st) = build(&tp1());
        let f = find_strictly_convex_function(st.complex()).unwrap();
        let kf = st.kahler_from_function(&f).unwrap();
        let ops = st.operator_checks(&kf);
        assert!(ops.all(), "{ops:?}");
        let pr = st.primitive_report(&kf);
        assert!(pr.matches_local && pr.decomposition, "{pr:?}");
        let pol = st.polarization_check(&kf);
        assert!(pol.all(), "{pol:?}");
    }

    #[test]
    fn surfaces_full_suite() {
        for y in [tp2(), tp1xtp1()] {
            let (_, st) = build(&y);
            let f = find_strictly_convex_function(st.complex()).unwrap();
            let kf = st.kahler_from_function(&f).unwrap();
            let ops = st.operator_checks(&kf);
            assert!(ops.all(), "{ops:?}");
            let pr = st.primitive_report(&kf);
            assert!(pr.matches_local && pr.decomposition, "{pr:?}");
            let pol = st.polarization_check(&kf);
            assert!(pol.all(), "{pol:?}");
        }
    }

    #[test]
    fn vertex_indicator_is_a_boundary() {
        let (_, st) = build(&tp2());
        let y = st.complex();
        for v in 0..y.vertices().len() {
            let mut f = PLFunction::zero(y);
            f.values[v] = q(1);
            let w = st.vertex_class(&st.local_values(&f));
            assert!(st.differential(0, 2).mul_vec(&w).iter().all(|x| x == &q(0)));
            assert!(st.is_exact(0, 2, &w));
        }
    }

    #[test]
    fn non_convex_data_is_rejected() {
        let (_, st) = build(&tp2());
        let y = st.complex();
        let mut f = PLFunction::zero(y);
        f.values[0] = q(1);
        assert!(matches!(st.kahler_from_function(&f), Err(super::SteenbrinkError::NotAmple(_))));
        // Random ample classes at the vertices that disagree on edges.
        let mut vals = st.local_values(&find_strictly_convex_function(y).unwrap());
        for x in vals[0].1.iter_mut() {
            *x = &*x * q(3);
        }
        assert!(matches!(st.kahler_form(&vals), Err(super::SteenbrinkError::EdgeIncompatible { .. })));
    }
}
