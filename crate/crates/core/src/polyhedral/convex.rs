//! Strict convexity of piecewise linear functions, certified face by face with exact LPs.
//!
//! Around a face δ we look for an affine ℓ agreeing with f on δ and maximize the margin t in
//! f - ℓ >= t over the generators of the star of δ that lie outside δ. Positivity on those
//! generators implies positivity on every face of the star minus δ, since f - ℓ is affine on
//! each such face, vanishes on δ and is positive on its remaining generators.

use num::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{json_rational, point_in_polyhedron, Cell, PolyComplex, PolyError};
use crate::fan::Fan;
use crate::linalg::{dot, fmt_q, qvec, solve, QMatrix, Q};
use crate::lp::{Cmp, Lp, LpOutcome};

/// Values at the vertices and slopes along the rays of a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct PLFunction {
    pub values: Vec<Q>,
    pub slopes: Vec<Q>,
}

impl PLFunction {
    pub fn zero(x: &PolyComplex) -> PLFunction {
        PLFunction { values: vec![Q::zero(); x.vertices().len()], slopes: vec![Q::zero(); x.rays().len()] }
    }

    /// Restriction of an affine function a.x + c.
    pub fn affine(x: &PolyComplex, a: &[Q], c: &Q) -> PLFunction {
        PLFunction {
            values: x.vertices().iter().map(|v| dot(a, v) + c).collect(),
            slopes: x.rays().iter().map(|r| dot(a, &qvec(r))).collect(),
        }
    }

    pub fn add(&self, o: &PLFunction) -> PLFunction {
        PLFunction {
            values: self.values.iter().zip(&o.values).map(|(a, b)| a + b).collect(),
            slopes: self.slopes.iter().zip(&o.slopes).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> PLFunction {
        PLFunction { values: self.values.iter().map(|a| a * s).collect(), slopes: self.slopes.iter().map(|a| a * s).collect() }
    }

    /// The affine function (a, c) representing f on a face, if f is affine there.
    pub fn affine_on(&self, x: &PolyComplex, c: &Cell) -> Option<(Vec<Q>, Q)> {
        let n = x.ambient_dim();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for &v in &c.v {
            rows.push(x.vertices()[v].iter().cloned().chain(std::iter::once(Q::one())).collect::<Vec<_>>());
            rhs.push(self.values[v].clone());
        }
        for &r in &c.r {
            rows.push(qvec(&x.rays()[r]).into_iter().chain(std::iter::once(Q::zero())).collect());
            rhs.push(self.slopes[r].clone());
        }
        let sol = solve(&QMatrix::from_rows_with_cols(rows, n + 1), &rhs).ok()?;
        Some((sol[..n].to_vec(), sol[n].clone()))
    }

    pub fn check_piecewise_linear(&self, x: &PolyComplex) -> Result<(), PolyError> {
        if self.values.len() != x.vertices().len() || self.slopes.len() != x.rays().len() {
            return Err(PolyError::Invalid("function does not match the complex".into()));
        }
        for i in x.maximal_cells() {
            if self.affine_on(x, x.face(i)).is_none() {
                return Err(PolyError::NotPiecewiseLinear(i));
            }
        }
        Ok(())
    }

    /// Value at a point of the support.
    pub fn eval(&self, x: &PolyComplex, p: &[Q]) -> Option<Q> {
        let cell = x.maximal_cells().into_iter().find(|&i| x.cell_contains(x.face(i), p))?;
        let (a, c) = self.affine_on(x, x.face(cell))?;
        Some(dot(&a, p) + c)
    }

    /// The function on a subdivision y of x.
    pub fn pullback(&self, x: &PolyComplex, y: &PolyComplex) -> Option<PLFunction> {
        let values = y.vertices().iter().map(|v| self.eval(x, v)).collect::<Option<Vec<_>>>()?;
        let mut slopes = Vec::new();
        for (ri, r) in y.rays().iter().enumerate() {
            let base = y.faces().iter().find(|c| c.r.contains(&ri))?.v[0];
            let v = &y.vertices()[base];
            let w: Vec<Q> = v.iter().zip(r).map(|(a, &b)| a + Q::from_integer(b.into())).collect();
            slopes.push(self.eval(x, &w)? - self.eval(x, v)?);
        }
        Some(PLFunction { values, slopes })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "values": self.values.iter().map(fmt_q).collect::<Vec<_>>(),
            "slopes": self.slopes.iter().map(fmt_q).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<PLFunction, PolyError> {
        let list = |key: &str| -> Result<Vec<Q>, PolyError> {
            match v.get(key) {
                None | Some(Value::Null) => Ok(Vec::new()),
                Some(Value::Array(a)) => a.iter().map(|x| json_rational(x).ok_or_else(|| PolyError::Invalid(format!("bad rational in {key}")))).collect(),
                _ => Err(PolyError::Invalid(format!("{key} must be a list"))),
            }
        };
        Ok(PLFunction { values: list("values")?, slopes: list("slopes")? })
    }
}

/// Outcome of the margin LP around one face.
#[derive(Clone, Debug)]
pub struct FaceCertificate {
    pub face: usize,
    pub margin: Q,
    /// Linear part and constant of the supporting affine function.
    pub a: Vec<Q>,
    pub c: Q,
    /// Optimal dual multipliers; they bound the margin from above.
    pub duals: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct ConvexityCertificate {
    pub faces: Vec<FaceCertificate>,
    pub strict: bool,
}

impl ConvexityCertificate {
    /// A face where strict convexity fails, with its certificate.
    pub fn failing_face(&self) -> Option<&FaceCertificate> {
        self.faces.iter().find(|f| !f.margin.is_positive())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "verdict": if self.strict { "STRICT" } else { "NOT_STRICT" },
            "faces": self.faces.iter().map(|f| json!({
                "face": f.face,
                "margin": fmt_q(&f.margin),
                "ell": {"a": f.a.iter().map(fmt_q).collect::<Vec<_>>(), "c": fmt_q(&f.c)},
                "duals": f.duals.iter().map(fmt_q).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Margin LP around face `d`, restricted to faces flagged in `allowed`.
/// Variables: a (n), c, t, all free.
fn margin_lp(x: &PolyComplex, f: &PLFunction, d: usize, allowed: &[bool]) -> Lp {
    let n = x.ambient_dim();
    let mut lp = Lp::new(n + 2);
    lp.free = vec![true; n + 2];
    lp.objective[n + 1] = Q::one();
    let delta = x.face(d);
    let vrow = |v: usize, t: i64| -> Vec<Q> {
        x.vertices()[v].iter().cloned().chain([Q::one(), Q::from_integer(t.into())]).collect()
    };
    let rrow = |r: usize, t: i64| -> Vec<Q> { qvec(&x.rays()[r]).into_iter().chain([Q::zero(), Q::from_integer(t.into())]).collect() };
    for &v in &delta.v {
        lp.add(vrow(v, 0), Cmp::Eq, f.values[v].clone());
    }
    for &r in &delta.r {
        lp.add(rrow(r, 0), Cmp::Eq, f.slopes[r].clone());
    }
    let mut nv: Vec<usize> = Vec::new();
    let mut nr: Vec<usize> = Vec::new();
    for j in x.star(d) {
        if !allowed[j] {
            continue;
        }
        let c = x.face(j);
        nv.extend(c.v.iter().filter(|v| !delta.v.contains(v)));
        nr.extend(c.r.iter().filter(|r| !delta.r.contains(r)));
    }
    nv.sort_unstable();
    nv.dedup();
    nr.sort_unstable();
    nr.dedup();
    // f(w) - a.w - c >= t  <=>  a.w + c + t <= f(w)
    for v in nv {
        lp.add(vrow(v, 1), Cmp::Le, f.values[v].clone());
    }
    for r in nr {
        lp.add(rrow(r, 1), Cmp::Le, f.slopes[r].clone());
    }
    let mut cap = vec![Q::zero(); n + 2];
    cap[n + 1] = Q::one();
    lp.add(cap, Cmp::Le, Q::one());
    lp
}

fn face_certificate(x: &PolyComplex, f: &PLFunction, d: usize, allowed: &[bool]) -> Result<FaceCertificate, PolyError> {
    let n = x.ambient_dim();
    match margin_lp(x, f, d, allowed).solve() {
        LpOutcome::Optimal { x: sol, value, duals } => Ok(FaceCertificate { face: d, margin: value, a: sol[..n].to_vec(), c: sol[n].clone(), duals }),
        LpOutcome::Infeasible { .. } => Err(PolyError::NotPiecewiseLinear(d)),
        LpOutcome::Unbounded => unreachable!("margin is capped"),
    }
}

impl FaceCertificate {
    /// Independent check: the primal point attains the margin and the duals bound it.
    pub fn verify(&self, x: &PolyComplex, f: &PLFunction) -> bool {
        let allowed = vec![true; x.faces().len()];
        self.verify_within(x, f, &allowed)
    }

    fn verify_within(&self, x: &PolyComplex, f: &PLFunction, allowed: &[bool]) -> bool {
        let lp = margin_lp(x, f, self.face, allowed);
        let mut point = self.a.clone();
        point.push(self.c.clone());
        point.push(self.margin.clone());
        lp.is_feasible_point(&point) && lp.verify_dual_bound(&self.duals, &self.margin)
    }
}

impl ConvexityCertificate {
    pub fn verify(&self, x: &PolyComplex, f: &PLFunction) -> bool {
        self.faces.len() == x.faces().len()
            && self.faces.iter().enumerate().all(|(i, c)| c.face == i && c.verify(x, f))
            && self.strict == self.faces.iter().all(|c| c.margin.is_positive())
    }
}

fn certificate_on(x: &PolyComplex, f: &PLFunction, allowed: &[bool]) -> Result<ConvexityCertificate, PolyError> {
    let faces: Vec<usize> = (0..x.faces().len()).filter(|&i| allowed[i]).collect();
    let certs = faces.par_iter().map(|&d| face_certificate(x, f, d, allowed)).collect::<Result<Vec<_>, _>>()?;
    let strict = certs.iter().all(|c| c.margin.is_positive());
    Ok(ConvexityCertificate { faces: certs, strict })
}

/// Face-by-face strict convexity verdict with certificates.
pub fn strictly_convex_certificate(x: &PolyComplex, f: &PLFunction) -> Result<ConvexityCertificate, PolyError> {
    f.check_piecewise_linear(x)?;
    certificate_on(x, f, &vec![true; x.faces().len()])
}

/// Ampleness of ℓ = Σ values[ρ] x_ρ on a simplicial fan: strict convexity of the piecewise
/// linear function with the given slopes, including at the origin.
pub fn fan_ampleness(f: &Fan, values: &[Q]) -> Result<ConvexityCertificate, PolyError> {
    let x = PolyComplex::from_fan(f);
    let g = PLFunction { values: vec![Q::zero()], slopes: values.to_vec() };
    strictly_convex_certificate(&x, &g)
}

/// Faces of y lying inside the polyhedron c of x.
pub fn faces_inside(x: &PolyComplex, c: &Cell, y: &PolyComplex) -> Vec<bool> {
    let verts = x.cell_vertices(c);
    let rays = x.cell_rays(c);
    let n = x.ambient_dim();
    let in_vert: Vec<bool> = y.vertices().iter().map(|v| point_in_polyhedron(&verts, &rays, v)).collect();
    let in_rec: Vec<bool> = y.rays().iter().map(|r| point_in_polyhedron(&[vec![Q::zero(); n]], &rays, &qvec(r))).collect();
    y.faces().iter().map(|g| g.v.iter().all(|&v| in_vert[v]) && g.r.iter().all(|&r| in_rec[r])).collect()
}

/// Whether f is strictly convex on the restriction of y to every face of x.
pub fn regular_subdivision_check(x: &PolyComplex, y: &PolyComplex, f: &PLFunction) -> Result<bool, PolyError> {
    f.check_piecewise_linear(y)?;
    for c in x.faces() {
        let allowed = faces_inside(x, c, y);
        if !certificate_on(y, f, &allowed)?.strict {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;
    use crate::polyhedral::{hyperplane_cut, Hyperplane};

    fn pt(xs: &[i64]) -> Vec<Q> {
        qvec(xs)
    }

    fn two_triangles() -> PolyComplex {
        PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])], vec![], &[Cell::new(vec![0, 1, 2], vec![]), Cell::new(vec![1, 2, 3], vec![])]).unwrap()
    }

    #[test]
    fn single_polyhedron_is_strict() {
        let p = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 1])], vec![vec![1, 1]], &[Cell::new(vec![0, 1, 2], vec![0])]).unwrap();
        let cert = strictly_convex_certificate(&p, &PLFunction::zero(&p)).unwrap();
        assert!(cert.strict);
        assert!(cert.verify(&p, &PLFunction::zero(&p)));
    }

    #[test]
    fn affine_function_is_not_strict() {
        let x = two_triangles();
        let f = PLFunction::affine(&x, &pt(&[1, 2]), &q(3));
        let cert = strictly_convex_certificate(&x, &f).unwrap();
        assert!(!cert.strict);
        let bad = cert.failing_face().unwrap();
        assert!(bad.verify(&x, &f));
        assert_eq!(x.face(bad.face), &Cell::new(vec![1, 2], vec![]));
        // Bending along the diagonal fixes it.
        let g = PLFunction { values: vec![q(0), q(0), q(0), q(-1)], slopes: vec![] };
        assert!(!strictly_convex_certificate(&x, &g).unwrap().strict);
        let g = PLFunction { values: vec![q(0), q(0), q(0), q(1)], slopes: vec![] };
        assert!(strictly_convex_certificate(&x, &g).unwrap().strict);
    }

    #[test]
    fn not_piecewise_linear() {
        let sq = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])], vec![], &[Cell::new(vec![0, 1, 2, 3], vec![])]).unwrap();
        let f = PLFunction { values: vec![q(0), q(0), q(0), q(1)], slopes: vec![] };
        assert!(matches!(strictly_convex_certificate(&sq, &f), Err(PolyError::NotPiecewiseLinear(_))));
    }

    #[test]
    fn projective_plane_ampleness() {
        let tp2 = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert!(fan_ampleness(&tp2, &[q(1), q(0), q(0)]).unwrap().strict);
        assert!(!fan_ampleness(&tp2, &[q(0), q(0), q(0)]).unwrap().strict);
        assert!(!fan_ampleness(&tp2, &[q(-1), q(0), q(0)]).unwrap().strict);
    }

    #[test]
    fn distance_to_a_cut_is_regular() {
        let sq = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2]), pt(&[2, 2])], vec![], &[Cell::new(vec![0, 1, 2, 3], vec![])]).unwrap();
        let h = Hyperplane { normal: pt(&[1, 1]), offset: q(1) };
        let y = hyperplane_cut(&sq, &h).unwrap();
        // |x + y - 1| is PL on the cut.
        let f = PLFunction { values: y.vertices().iter().map(|v| (&v[0] + &v[1] - q(1)).abs()).collect(), slopes: vec![] };
        assert!(regular_subdivision_check(&sq, &y, &f).unwrap());
        assert!(!regular_subdivision_check(&sq, &y, &PLFunction::zero(&y)).unwrap());
    }

    #[test]
    fn blow_up_function_is_relatively_convex() {
        let quad = Fan::new(2, vec![vec![1, 0], vec![0, 1]], &[vec![0, 1]]).unwrap();
        let sigma = PolyComplex::from_fan(&quad);
        let y = super::super::blow_up(&sigma, &pt(&[1, 1])).unwrap();
        let slopes: Vec<Q> = y.rays().iter().map(|r| if *r == vec![1, 1] { q(-1) } else { q(0) }).collect();
        let f = PLFunction { values: vec![q(0)], slopes };
        assert!(regular_subdivision_check(&sigma, &y, &f).unwrap());
    }

    #[test]
    fn pullback_and_eval() {
        let seg = PolyComplex::new(1, vec![pt(&[0]), pt(&[2])], vec![vec![1]], &[Cell::new(vec![0, 1], vec![]), Cell::new(vec![1], vec![0])]).unwrap();
        let f = PLFunction { values: vec![q(0), q(2)], slopes: vec![q(3)] };
        assert_eq!(f.eval(&seg, &pt(&[1])), Some(q(1)));
        assert_eq!(f.eval(&seg, &pt(&[4])), Some(q(8)));
        let y = hyperplane_cut(&seg, &Hyperplane { normal: pt(&[1]), offset: q(1) }).unwrap();
        let g = f.pullback(&seg, &y).unwrap();
        assert_eq!(g.slopes, vec![q(3)]);
    }
}
