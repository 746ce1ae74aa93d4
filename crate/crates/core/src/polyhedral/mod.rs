//! Rational polyhedral complexes, their recession fans and the subdivision toolkit.

pub mod convex;
pub mod triangulate;

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::fan::{Fan, FanError};
use crate::linalg::{dot, fmt_q, is_unimodular_family, kernel_basis, parse_q, q, qvec, rank_of_vectors, smith_gcd_minors, solve, QMatrix, Q};
use crate::lp::{Cmp, Lp, LpOutcome};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("recession cones do not form a fan: {0}")]
    RecessionNotFan(String),
    #[error("recession fan is not unimodular")]
    RecessionNotUnimodular,
    #[error("compact part too hard: {0}")]
    CompactPartTooHard(String),
    #[error("face {face} is not unimodular relative to its finite part at every scale tried")]
    RelativeNotUnimodular { face: usize },
    #[error("function is not piecewise linear on face {0}")]
    NotPiecewiseLinear(usize),
    #[error("polyhedron has a nontrivial lineality space")]
    NotPointed,
    #[error("no strictly convex function exists on the subdivision (margin {0})")]
    NotQuasiProjective(String),
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A face given by its vertices and rays (indices into the complex).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub v: Vec<usize>,
    pub r: Vec<usize>,
}

impl Cell {
    pub fn new(mut v: Vec<usize>, mut r: Vec<usize>) -> Cell {
        v.sort_unstable();
        v.dedup();
        r.sort_unstable();
        r.dedup();
        Cell { v, r }
    }

    pub fn contains(&self, o: &Cell) -> bool {
        o.v.iter().all(|x| self.v.contains(x)) && o.r.iter().all(|x| self.r.contains(x))
    }

    pub fn union(&self, o: &Cell) -> Cell {
        Cell::new(self.v.iter().chain(&o.v).copied().collect(), self.r.iter().chain(&o.r).copied().collect())
    }

    pub fn is_compact(&self) -> bool {
        self.r.is_empty()
    }
}

pub fn primitive_int(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / g).collect()
    }
}

/// Primitive integer vector on the ray through a nonzero rational vector.
pub fn primitive_of(v: &[Q]) -> Vec<i64> {
    let l = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    ints.iter().map(|x| (x / &g).to_i64().expect("coordinates fit in i64")).collect()
}

fn homogenize(verts: &[Vec<Q>], rays: &[Vec<Q>]) -> Vec<Vec<Q>> {
    verts
        .iter()
        .map(|v| std::iter::once(Q::one()).chain(v.iter().cloned()).collect())
        .chain(rays.iter().map(|r| std::iter::once(Q::zero()).chain(r.iter().cloned()).collect()))
        .collect()
}

pub(crate) fn independent_subset(vs: &[Vec<Q>], n: usize) -> Vec<usize> {
    let mut cur: Vec<Vec<Q>> = Vec::new();
    let mut out = Vec::new();
    for (i, v) in vs.iter().enumerate() {
        cur.push(v.clone());
        if rank_of_vectors(&cur, n) == cur.len() {
            out.push(i);
        } else {
            cur.pop();
        }
    }
    out
}

/// Faces of conv(verts) + cone(rays) as (vertex indices, ray indices) restricted to extreme
/// generators, each paired with its dimension. Includes the polyhedron itself.
pub fn polyhedron_faces(verts: &[Vec<Q>], rays: &[Vec<Q>]) -> Result<Vec<(Vec<usize>, Vec<usize>, usize)>, PolyError> {
    if verts.is_empty() {
        return Err(PolyError::Invalid("polyhedron without vertices".into()));
    }
    let n1 = verts[0].len() + 1;
    let gens = homogenize(verts, rays);
    let m = gens.len();
    let nv = verts.len();
    let basis_idx = independent_subset(&gens, n1);
    let d = basis_idx.len();
    let basis: Vec<Vec<Q>> = basis_idx.iter().map(|&i| gens[i].clone()).collect();
    let coords: Vec<Vec<Q>> = gens
        .iter()
        .map(|g| solve(&QMatrix::from_cols(&basis, n1), g).expect("generator lies in its own span"))
        .collect();
    let split = |set: &BTreeSet<usize>| -> (Vec<usize>, Vec<usize>) {
        let v = set.iter().copied().filter(|&i| i < nv).collect();
        let r = set.iter().copied().filter(|&i| i >= nv).map(|i| i - nv).collect();
        (v, r)
    };
    let rank_of = |set: &BTreeSet<usize>| -> usize {
        let vs: Vec<Vec<Q>> = set.iter().map(|&i| coords[i].clone()).collect();
        rank_of_vectors(&vs, d)
    };
    if d == 1 {
        // A single point (possibly listed with repetitions).
        return Ok(vec![(vec![0], Vec::new(), 0)]);
    }
    let mut facets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for comb in (0..m).combinations(d - 1) {
        let rows: Vec<Vec<Q>> = comb.iter().map(|&i| coords[i].clone()).collect();
        let ker = kernel_basis(&QMatrix::from_rows_with_cols(rows, d));
        if ker.len() != 1 {
            continue;
        }
        let h = &ker[0];
        let vals: Vec<Q> = coords.iter().map(|c| dot(h, c)).collect();
        let pos = vals.iter().any(|x| x.is_positive());
        let neg = vals.iter().any(|x| x.is_negative());
        if pos && neg {
            continue;
        }
        let zero: BTreeSet<usize> = (0..m).filter(|&i| vals[i].is_zero()).collect();
        facets.insert(zero);
    }
    let all: BTreeSet<usize> = (0..m).collect();
    let meet = facets.iter().fold(all.clone(), |acc, f| acc.intersection(f).copied().collect());
    if rank_of(&meet) > 0 {
        return Err(PolyError::NotPointed);
    }
    let mut faces: BTreeSet<BTreeSet<usize>> = facets.clone();
    loop {
        let cur: Vec<BTreeSet<usize>> = faces.iter().cloned().collect();
        let mut added = false;
        for (a, b) in cur.iter().tuple_combinations() {
            let c: BTreeSet<usize> = a.intersection(b).copied().collect();
            if !c.is_empty() && rank_of(&c) > 0 && !faces.contains(&c) {
                faces.insert(c);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    faces.insert(all);
    let extreme: BTreeSet<usize> = faces.iter().filter(|f| rank_of(f) == 1).flatten().copied().collect();
    let mut out = Vec::new();
    for f in &faces {
        let ext: BTreeSet<usize> = f.intersection(&extreme).copied().collect();
        let (v, r) = split(&ext);
        if v.is_empty() {
            continue;
        }
        out.push((v, r, rank_of(f) - 1));
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PolyComplex {
    n: usize,
    vertices: Vec<Vec<Q>>,
    rays: Vec<Vec<i64>>,
    /// All faces, sorted by dimension then generators.
    faces: Vec<Cell>,
    dims: Vec<usize>,
    index: HashMap<Cell, usize>,
}

impl PolyComplex {
    /// Builds the complex generated by the given cells and all their faces. Vertices and rays
    /// are deduplicated, rays made primitive, and non-extreme generators dropped.
    pub fn new(n: usize, vertices: Vec<Vec<Q>>, rays: Vec<Vec<i64>>, cells: &[Cell]) -> Result<PolyComplex, PolyError> {
        if vertices.iter().any(|v| v.len() != n) || rays.iter().any(|r| r.len() != n) {
            return Err(PolyError::Invalid("coordinate length differs from the ambient dimension".into()));
        }
        if rays.iter().any(|r| r.iter().all(|&x| x == 0)) {
            return Err(PolyError::Invalid("zero ray".into()));
        }
        if cells.iter().any(|c| c.v.iter().any(|&i| i >= vertices.len()) || c.r.iter().any(|&i| i >= rays.len())) {
            return Err(PolyError::Invalid("cell refers to a missing generator".into()));
        }
        let mut vmap = Vec::new();
        let mut uniq_v: Vec<Vec<Q>> = Vec::new();
        for v in &vertices {
            let pos = uniq_v.iter().position(|u| u == v).unwrap_or_else(|| {
                uniq_v.push(v.clone());
                uniq_v.len() - 1
            });
            vmap.push(pos);
        }
        let mut rmap = Vec::new();
        let mut uniq_r: Vec<Vec<i64>> = Vec::new();
        for r in &rays {
            let p = primitive_int(r);
            let pos = uniq_r.iter().position(|u| *u == p).unwrap_or_else(|| {
                uniq_r.push(p);
                uniq_r.len() - 1
            });
            rmap.push(pos);
        }
        let mut faces: BTreeSet<Cell> = BTreeSet::new();
        for c in cells {
            let cv: Vec<usize> = c.v.iter().map(|&i| vmap[i]).collect::<BTreeSet<_>>().into_iter().collect();
            let cr: Vec<usize> = c.r.iter().map(|&i| rmap[i]).collect::<BTreeSet<_>>().into_iter().collect();
            if cv.is_empty() {
                return Err(PolyError::Invalid("cell without vertices".into()));
            }
            let verts: Vec<Vec<Q>> = cv.iter().map(|&i| uniq_v[i].clone()).collect();
            let rs: Vec<Vec<Q>> = cr.iter().map(|&i| qvec(&uniq_r[i])).collect();
            for (fv, fr, _) in polyhedron_faces(&verts, &rs)? {
                faces.insert(Cell::new(fv.iter().map(|&i| cv[i]).collect(), fr.iter().map(|&i| cr[i]).collect()));
            }
        }
        Self::from_faces(n, uniq_v, uniq_r, faces.into_iter().collect())
    }

    /// Assembles a complex from a face list already closed under taking faces, dropping unused
    /// generators.
    fn from_faces(n: usize, vertices: Vec<Vec<Q>>, rays: Vec<Vec<i64>>, faces: Vec<Cell>) -> Result<PolyComplex, PolyError> {
        let used_v: BTreeSet<usize> = faces.iter().flat_map(|c| c.v.iter().copied()).collect();
        let used_r: BTreeSet<usize> = faces.iter().flat_map(|c| c.r.iter().copied()).collect();
        let vnew: HashMap<usize, usize> = used_v.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let rnew: HashMap<usize, usize> = used_r.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let vertices: Vec<Vec<Q>> = used_v.iter().map(|&i| vertices[i].clone()).collect();
        let rays: Vec<Vec<i64>> = used_r.iter().map(|&i| rays[i].clone()).collect();
        let mut faces: Vec<Cell> = faces
            .iter()
            .map(|c| Cell::new(c.v.iter().map(|i| vnew[i]).collect(), c.r.iter().map(|i| rnew[i]).collect()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let dim_of = |c: &Cell| -> usize {
            let g = homogenize(
                &c.v.iter().map(|&i| vertices[i].clone()).collect::<Vec<_>>(),
                &c.r.iter().map(|&i| qvec(&rays[i])).collect::<Vec<_>>(),
            );
            rank_of_vectors(&g, n + 1) - 1
        };
        faces.sort_by_cached_key(|c| (dim_of(c), c.clone()));
        let dims = faces.iter().map(dim_of).collect();
        let index = faces.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
        Ok(PolyComplex { n, vertices, rays, faces, dims, index })
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn faces(&self) -> &[Cell] {
        &self.faces
    }

    pub fn face(&self, i: usize) -> &Cell {
        &self.faces[i]
    }

    pub fn dim_of(&self, i: usize) -> usize {
        self.dims[i]
    }

    pub fn dimension(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn face_index(&self, c: &Cell) -> Option<usize> {
        self.index.get(c).copied()
    }

    /// Smallest k with all vertices in (1/k)Z^n.
    pub fn scale(&self) -> u64 {
        let l = self.vertices.iter().flatten().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        l.to_u64().expect("scale fits in u64")
    }

    pub fn maximal_cells(&self) -> Vec<usize> {
        (0..self.faces.len())
            .filter(|&i| !(0..self.faces.len()).any(|j| j != i && self.faces[j].contains(&self.faces[i])))
            .collect()
    }

    /// Faces containing face i (including itself).
    pub fn star(&self, i: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&j| self.faces[j].contains(&self.faces[i])).collect()
    }

    /// Faces of face i of dimension one less.
    pub fn facets_of(&self, i: usize) -> Vec<usize> {
        let d = self.dims[i];
        (0..self.faces.len()).filter(|&j| self.dims[j] + 1 == d && self.faces[i].contains(&self.faces[j])).collect()
    }

    pub fn is_pure(&self) -> bool {
        let d = self.dimension();
        self.maximal_cells().iter().all(|&i| self.dims[i] == d)
    }

    pub fn is_simplicial(&self) -> bool {
        (0..self.faces.len()).all(|i| self.faces[i].v.len() + self.faces[i].r.len() == self.dims[i] + 1)
    }

    pub fn compact_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&i| self.faces[i].is_compact()).collect()
    }

    pub fn cell_vertices(&self, c: &Cell) -> Vec<Vec<Q>> {
        c.v.iter().map(|&i| self.vertices[i].clone()).collect()
    }

    pub fn cell_rays(&self, c: &Cell) -> Vec<Vec<Q>> {
        c.r.iter().map(|&i| qvec(&self.rays[i])).collect()
    }

    /// Whether p lies in the polyhedron of the cell.
    pub fn cell_contains(&self, c: &Cell, p: &[Q]) -> bool {
        point_in_polyhedron(&self.cell_vertices(c), &self.cell_rays(c), p)
    }

    pub fn contains(&self, p: &[Q]) -> bool {
        self.maximal_cells().iter().any(|&i| self.cell_contains(&self.faces[i], p))
    }

    /// Tangent directions of a face: differences of vertices and its rays.
    pub fn tangent_generators(&self, c: &Cell) -> Vec<Vec<Q>> {
        let mut out = Vec::new();
        if let Some(&v0) = c.v.first() {
            for &v in &c.v[1..] {
                out.push(self.vertices[v].iter().zip(&self.vertices[v0]).map(|(a, b)| a - b).collect());
            }
        }
        for &r in &c.r {
            out.push(qvec(&self.rays[r]));
        }
        out
    }

    /// Recession fan, with ray indices matching those of the complex.
    pub fn recession_fan(&self) -> Result<Fan, PolyError> {
        let cones: BTreeSet<Vec<usize>> = self.faces.iter().map(|c| c.r.clone()).collect();
        let cones: Vec<Vec<usize>> = cones.into_iter().collect();
        for c in &cones {
            let vs: Vec<Vec<Q>> = c.iter().map(|&i| qvec(&self.rays[i])).collect();
            if rank_of_vectors(&vs, self.n) != c.len() {
                return Err(PolyError::RecessionNotFan(format!("recession cone {c:?} is not simplicial")));
            }
        }
        let maximal: Vec<&Vec<usize>> =
            cones.iter().filter(|c| !cones.iter().any(|d| d.len() > c.len() && c.iter().all(|x| d.contains(x)))).collect();
        for (a, b) in maximal.iter().tuple_combinations() {
            if !cones_meet_in_common_face(&self.rays, a, b) {
                return Err(PolyError::RecessionNotFan(format!("cones {a:?} and {b:?} meet outside a common face")));
            }
        }
        let labels = (0..self.rays.len()).map(|i| format!("r{i}")).collect();
        Ok(Fan::with_labels(self.n, self.rays.clone(), &cones, labels)?)
    }

    /// Fan viewed as a complex with the single vertex 0.
    pub fn from_fan(f: &Fan) -> PolyComplex {
        let n = f.lattice_rank();
        // Fan cones are simplicial, so their faces are exactly the listed subsets.
        let faces: Vec<Cell> = f.cones().iter().map(|c| Cell::new(vec![0], c.clone())).collect();
        PolyComplex::from_faces(n, vec![vec![Q::zero(); n]], f.rays().to_vec(), faces).expect("fan complex")
    }

    /// Whether every face is simplicial and unimodular with respect to (1/k)Z^n.
    pub fn is_unimodular(&self, k: u64) -> bool {
        self.is_simplicial()
            && self.maximal_cells().iter().all(|&i| {
                let c = &self.faces[i];
                let rays: Vec<Vec<i64>> = c.r.iter().map(|&r| self.rays[r].clone()).collect();
                unimodularity_decomposition(&self.cell_vertices(c), &rays, k) == (true, true)
            })
    }

    pub fn to_json(&self) -> Value {
        let faces: Vec<Value> = self.maximal_cells().iter().map(|&i| json!({"v": self.faces[i].v, "r": self.faces[i].r})).collect();
        json!({
            "ambient_dim": self.n,
            "scale_k": self.scale(),
            "vertices": self.vertices.iter().map(|v| v.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "rays": self.rays,
            "faces": faces,
        })
    }

    pub fn from_json(v: &Value) -> Result<PolyComplex, PolyError> {
        let bad = |s: &str| PolyError::Invalid(s.to_string());
        let n = v["ambient_dim"].as_u64().ok_or_else(|| bad("ambient_dim"))? as usize;
        let vertices = v["vertices"]
            .as_array()
            .ok_or_else(|| bad("vertices"))?
            .iter()
            .map(|p| p.as_array().ok_or_else(|| bad("vertex")).and_then(|cs| cs.iter().map(|c| json_rational(c).ok_or_else(|| bad("coordinate"))).collect()))
            .collect::<Result<Vec<Vec<Q>>, _>>()?;
        let rays: Vec<Vec<i64>> = match v.get("rays") {
            None | Some(Value::Null) => Vec::new(),
            Some(r) => serde_json::from_value(r.clone()).map_err(|e| PolyError::Invalid(e.to_string()))?,
        };
        let faces = v["faces"]
            .as_array()
            .ok_or_else(|| bad("faces"))?
            .iter()
            .map(|f| {
                let vs: Vec<usize> = serde_json::from_value(f["v"].clone()).map_err(|e| PolyError::Invalid(e.to_string()))?;
                let rs: Vec<usize> = match f.get("r") {
                    None | Some(Value::Null) => Vec::new(),
                    Some(r) => serde_json::from_value(r.clone()).map_err(|e| PolyError::Invalid(e.to_string()))?,
                };
                Ok(Cell::new(vs, rs))
            })
            .collect::<Result<Vec<Cell>, PolyError>>()?;
        if let Some(k) = v.get("scale_k").and_then(|k| k.as_u64()) {
            let den_ok = vertices.iter().flatten().all(|x| (BigInt::from(k) % x.denom()).is_zero());
            if !den_ok {
                return Err(bad("vertex outside the (1/k)Z^n lattice for the given scale_k"));
            }
        }
        PolyComplex::new(n, vertices, rays, &faces)
    }
}

pub fn json_rational(v: &Value) -> Option<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(x) => x.as_i64().map(q),
        _ => None,
    }
}

/// Whether simplicial cones spanned by rays a and b intersect in the cone over their common rays.
pub fn cones_meet_in_common_face(rays: &[Vec<i64>], a: &[usize], b: &[usize]) -> bool {
    let only_a: Vec<usize> = a.iter().copied().filter(|x| !b.contains(x)).collect();
    let only_b: Vec<usize> = b.iter().copied().filter(|x| !a.contains(x)).collect();
    let common: Vec<usize> = a.iter().copied().filter(|x| b.contains(x)).collect();
    if only_a.is_empty() || only_b.is_empty() {
        return true;
    }
    let n = rays[0].len();
    // Variables h (free) and t; maximize t with h >= t on a only, h <= -t on b only.
    let mut lp = Lp::new(n + 1);
    lp.free = vec![true; n + 1];
    lp.objective[n] = Q::one();
    let row = |r: &[i64], s: i64, t: i64| -> Vec<Q> {
        r.iter().map(|&x| q(s * x)).chain(std::iter::once(q(t))).collect()
    };
    for &i in &only_a {
        lp.add(row(&rays[i], 1, -1), Cmp::Ge, Q::zero());
    }
    for &i in &only_b {
        lp.add(row(&rays[i], -1, -1), Cmp::Ge, Q::zero());
    }
    for &i in &common {
        lp.add(row(&rays[i], 1, 0), Cmp::Eq, Q::zero());
    }
    let mut cap = vec![Q::zero(); n + 1];
    cap[n] = Q::one();
    lp.add(cap, Cmp::Le, Q::one());
    matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value.is_positive())
}

/// Membership of p in conv(verts) + cone(rays), by an exact feasibility LP.
pub fn point_in_polyhedron(verts: &[Vec<Q>], rays: &[Vec<Q>], p: &[Q]) -> bool {
    let n = p.len();
    let (nv, nr) = (verts.len(), rays.len());
    if nv == 0 {
        return false;
    }
    // Fast path: independent generators give a unique solution.
    let gens = homogenize(verts, rays);
    if rank_of_vectors(&gens, n + 1) == nv + nr {
        let target: Vec<Q> = std::iter::once(Q::one()).chain(p.iter().cloned()).collect();
        return match solve(&QMatrix::from_cols(&gens, n + 1), &target) {
            Ok(x) => x.iter().all(|c| !c.is_negative()),
            Err(_) => false,
        };
    }
    let mut lp = Lp::new(nv + nr);
    for i in 0..=n {
        let coeffs: Vec<Q> = gens.iter().map(|g| g[i].clone()).collect();
        let rhs = if i == 0 { Q::one() } else { p[i - 1].clone() };
        lp.add(coeffs, Cmp::Eq, rhs);
    }
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

/// Unimodularity of a simplicial polyhedron conv(verts) + cone(rays) with respect to
/// (1/k)Z^n, split as (finite part unimodular, rays unimodular modulo the finite part).
pub fn unimodularity_decomposition(verts: &[Vec<Q>], rays: &[Vec<i64>], k: u64) -> (bool, bool) {
    let kq = Q::from_integer(BigInt::from(k));
    let on_lattice = verts.iter().flatten().all(|x| (x * &kq).is_integer());
    let scaled: Vec<Vec<i64>> = verts
        .iter()
        .map(|v| v.iter().map(|x| (x * &kq).to_integer().to_i64().unwrap_or(i64::MAX)).collect())
        .collect();
    let edges: Vec<Vec<i64>> = scaled[1..].iter().map(|v| v.iter().zip(&scaled[0]).map(|(a, b)| a - b).collect()).collect();
    let finite = on_lattice && is_unimodular_family(&edges);
    let mut all = edges.clone();
    all.extend(rays.iter().cloned());
    let n = verts[0].len();
    let g_all = if all.is_empty() {
        BigInt::one()
    } else if all.len() > n {
        BigInt::zero()
    } else {
        smith_gcd_minors(&all, all.len())
    };
    let g_e = if edges.is_empty() { BigInt::one() } else { smith_gcd_minors(&edges, edges.len()) };
    let relative = !g_all.is_zero() && g_all == g_e;
    (finite, relative)
}

/// Hyperplane h.x = c.
#[derive(Clone, Debug)]
pub struct Hyperplane {
    pub normal: Vec<Q>,
    pub offset: Q,
}

fn side(h: &Hyperplane, v: &[Q]) -> Q {
    dot(&h.normal, v) - &h.offset
}

/// Pieces P cap H, P cap H+, P cap H- of a polyhedron, each as (vertices, rays).
fn cut_polyhedron(verts: &[Vec<Q>], rays: &[Vec<i64>], h: &Hyperplane) -> Vec<(Vec<Vec<Q>>, Vec<Vec<i64>>)> {
    let sv: Vec<Q> = verts.iter().map(|v| side(h, v)).collect();
    let sr: Vec<Q> = rays.iter().map(|r| dot(&h.normal, &qvec(r))).collect();
    let mut on_v: Vec<Vec<Q>> = verts.iter().zip(&sv).filter(|(_, s)| s.is_zero()).map(|(v, _)| v.clone()).collect();
    let mut on_r: Vec<Vec<i64>> = rays.iter().zip(&sr).filter(|(_, s)| s.is_zero()).map(|(r, _)| r.clone()).collect();
    for (i, j) in (0..verts.len()).tuple_combinations() {
        if (sv[i].is_positive() && sv[j].is_negative()) || (sv[i].is_negative() && sv[j].is_positive()) {
            let t = &sv[i] / (&sv[i] - &sv[j]);
            on_v.push(verts[i].iter().zip(&verts[j]).map(|(a, b)| a + &t * (b - a)).collect());
        }
    }
    for (i, v) in verts.iter().enumerate() {
        for (j, r) in rays.iter().enumerate() {
            if (sv[i].is_negative() && sr[j].is_positive()) || (sv[i].is_positive() && sr[j].is_negative()) {
                let t = -&sv[i] / &sr[j];
                on_v.push(v.iter().zip(r).map(|(a, &b)| a + &t * q(b)).collect());
            }
        }
    }
    for (i, j) in (0..rays.len()).tuple_combinations() {
        if (sr[i].is_positive() && sr[j].is_negative()) || (sr[i].is_negative() && sr[j].is_positive()) {
            // Positive combination of the two rays lying on H.
            let (p, m) = if sr[i].is_positive() { (i, j) } else { (j, i) };
            let w: Vec<Q> = rays[p].iter().zip(&rays[m]).map(|(&a, &b)| &sr[p] * q(b) - &sr[m] * q(a)).collect();
            if w.iter().any(|x| !x.is_zero()) {
                on_r.push(primitive_of(&w));
            }
        }
    }
    let mut out = Vec::new();
    if !on_v.is_empty() {
        out.push((on_v.clone(), on_r.clone()));
    }
    for sign in [1, -1] {
        let keep = |s: &Q| if sign > 0 { s.is_positive() } else { s.is_negative() };
        let mut pv = on_v.clone();
        pv.extend(verts.iter().zip(&sv).filter(|(_, s)| keep(s)).map(|(v, _)| v.clone()));
        let mut pr = on_r.clone();
        pr.extend(rays.iter().zip(&sr).filter(|(_, s)| keep(s)).map(|(r, _)| r.clone()));
        if !pv.is_empty() {
            out.push((pv, pr));
        }
    }
    out
}

/// Rebuilds a complex from explicit (vertices, rays) pieces.
pub(crate) fn complex_from_pieces(n: usize, pieces: &[(Vec<Vec<Q>>, Vec<Vec<i64>>)]) -> Result<PolyComplex, PolyError> {
    let mut verts: Vec<Vec<Q>> = Vec::new();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut cells = Vec::new();
    for (pv, pr) in pieces {
        let vi: Vec<usize> = pv
            .iter()
            .map(|v| {
                verts.iter().position(|u| u == v).unwrap_or_else(|| {
                    verts.push(v.clone());
                    verts.len() - 1
                })
            })
            .collect();
        let ri: Vec<usize> = pr
            .iter()
            .map(|r| {
                let r = primitive_int(r);
                rays.iter().position(|u| *u == r).unwrap_or_else(|| {
                    rays.push(r);
                    rays.len() - 1
                })
            })
            .collect();
        cells.push(Cell::new(vi, ri));
    }
    PolyComplex::new(n, verts, rays, &cells)
}

/// Subdivision of X by the hyperplane H into the pieces on H and on either side.
pub fn hyperplane_cut(x: &PolyComplex, h: &Hyperplane) -> Result<PolyComplex, PolyError> {
    let mut pieces = Vec::new();
    for i in x.maximal_cells() {
        let c = x.face(i);
        let rays: Vec<Vec<i64>> = c.r.iter().map(|&r| x.rays[r].clone()).collect();
        pieces.extend(cut_polyhedron(&x.cell_vertices(c), &rays, h));
    }
    complex_from_pieces(x.n, &pieces)
}

/// Integral normals cutting out a simplicial cone: both signs of the normals of its span and
/// the facet normals inside the span.
fn cone_hyperplanes(rays: &[Vec<i64>], n: usize) -> Vec<Vec<Q>> {
    let rs: Vec<Vec<Q>> = rays.iter().map(|r| qvec(r)).collect();
    let mut out = kernel_basis(&QMatrix::from_rows_with_cols(rs.clone(), n));
    if !rs.is_empty() {
        // Dual basis inside the span: h_i = sum c_j r_j with h_i . r_k = delta_ik.
        let gram = QMatrix::from_rows_with_cols(rs.iter().map(|a| rs.iter().map(|b| dot(a, b)).collect()).collect(), rs.len());
        for i in 0..rs.len() {
            let e: Vec<Q> = (0..rs.len()).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
            let c = solve(&gram, &e).expect("independent rays");
            let h: Vec<Q> = (0..n).map(|k| rs.iter().zip(&c).map(|(r, cj)| &r[k] * cj).sum()).collect();
            out.push(h);
        }
    }
    out
}

/// Subdivision of the complete fan delta by the hyperplanes cutting out the cones of sigma.
/// Every cone of the result lying in the support of sigma lies in one of its cones, and the
/// support of sigma is covered by such cones (checked on barycenters).
pub fn slice_with_pencil(delta: &Fan, sigma: &Fan) -> Result<PolyComplex, PolyError> {
    let n = delta.lattice_rank();
    let mut x = PolyComplex::from_fan(delta);
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    for c in sigma.cones().iter().filter(|c| !c.is_empty()) {
        let rays: Vec<Vec<i64>> = c.iter().map(|&i| sigma.ray(i).to_vec()).collect();
        for hn in cone_hyperplanes(&rays, n) {
            let key = qvec(&primitive_of(&hn));
            if seen.insert(key.clone()) {
                x = hyperplane_cut(&x, &Hyperplane { normal: key, offset: Q::zero() })?;
            }
        }
    }
    // Subdivision check: every face meeting supp(sigma) in its relative interior lies in a cone.
    let mut inside = Vec::new();
    for (i, c) in x.faces().iter().enumerate() {
        let b: Vec<Q> = (0..n).map(|k| c.r.iter().map(|&r| q(x.rays[r][k])).sum()).collect();
        if !sigma.contains(&b) {
            continue;
        }
        let fits = sigma.cones().iter().any(|s| c.r.iter().all(|&r| sigma.cone_contains(s, &qvec(&x.rays[r]))));
        if !fits {
            return Err(PolyError::Invalid("sliced cone straddles a cone of sigma".into()));
        }
        inside.push(i);
    }
    for s in sigma.cones().iter().filter(|c| !c.is_empty()) {
        let b: Vec<Q> = (0..n).map(|k| s.iter().map(|&r| q(sigma.ray(r)[k])).sum()).collect();
        if !inside.iter().any(|&i| x.cell_contains(x.face(i), &b)) {
            return Err(PolyError::Invalid("sigma is not covered by the slicing".into()));
        }
    }
    Ok(x)
}

/// Blow-up of a fan (given as a complex with vertex 0) at the ray through x.
pub fn blow_up(f: &PolyComplex, x: &[Q]) -> Result<PolyComplex, PolyError> {
    if x.iter().all(|c| c.is_zero()) {
        return Err(PolyError::Invalid("blow-up at the origin".into()));
    }
    let n = f.n;
    let new_ray = primitive_of(x);
    let mut rays = f.rays.clone();
    let rx = rays.iter().position(|r| *r == new_ray).unwrap_or_else(|| {
        rays.push(new_ray.clone());
        rays.len() - 1
    });
    let mut cells = Vec::new();
    for i in f.maximal_cells() {
        let c = f.face(i);
        if !f.cell_contains(c, x) {
            cells.push(c.clone());
            continue;
        }
        // Faces of c not containing x, coned with x.
        for j in f.star_faces_within(i) {
            let g = f.face(j);
            if f.dims[j] + 1 == f.dims[i] && !f.cell_contains(g, x) {
                let mut r = g.r.clone();
                r.push(rx);
                cells.push(Cell::new(g.v.clone(), r));
            }
        }
    }
    PolyComplex::new(n, f.vertices.clone(), rays, &cells)
}

impl PolyComplex {
    /// Faces of face i (including itself).
    pub fn star_faces_within(&self, i: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&j| self.faces[i].contains(&self.faces[j])).collect()
    }
}

/// Simplicial refinement of a fan by blowing up minimal non-simplicial cones at the sum of
/// their rays.
pub fn triangulate_fan(f: &PolyComplex) -> Result<PolyComplex, PolyError> {
    let mut cur = f.clone();
    for _ in 0..1000 {
        let bad = (0..cur.faces.len())
            .filter(|&i| cur.faces[i].v.len() + cur.faces[i].r.len() != cur.dims[i] + 1)
            .min_by_key(|&i| (cur.dims[i], i));
        let Some(i) = bad else { return Ok(cur) };
        let c = cur.faces[i].clone();
        let x: Vec<Q> = (0..cur.n).map(|k| c.r.iter().map(|&r| q(cur.rays[r][k])).sum()).collect();
        cur = blow_up(&cur, &x)?;
    }
    Err(PolyError::Invalid("triangulation did not terminate".into()))
}

/// The cone over X placed at height one, as a fan complex in dimension n + 1.
pub fn external_cone(x: &PolyComplex) -> PolyComplex {
    let n = x.n;
    let mut rays: Vec<Vec<i64>> = x.vertices.iter().map(|v| primitive_of(&std::iter::once(Q::one()).chain(v.iter().cloned()).collect::<Vec<_>>())).collect();
    let nv = rays.len();
    rays.extend(x.rays.iter().map(|r| std::iter::once(0).chain(r.iter().copied()).collect::<Vec<_>>()));
    let faces: Vec<Cell> = x
        .faces
        .iter()
        .map(|c| Cell::new(vec![0], c.v.iter().copied().chain(c.r.iter().map(|r| r + nv)).collect()))
        .chain(std::iter::once(Cell::new(vec![0], vec![])))
        .collect();
    PolyComplex::from_faces(n + 1, vec![vec![Q::zero(); n + 1]], rays, faces).expect("cone complex")
}

/// Intersection of a fan complex in dimension n + 1 with the hyperplane x0 = 1.
pub fn slice_at_height_one(c: &PolyComplex) -> Result<PolyComplex, PolyError> {
    let n = c.n - 1;
    let mut verts: Vec<Vec<Q>> = Vec::new();
    let mut rays: Vec<Vec<i64>> = Vec::new();
    let mut vmap: HashMap<usize, usize> = HashMap::new();
    let mut rmap: HashMap<usize, usize> = HashMap::new();
    for (i, r) in c.rays.iter().enumerate() {
        if r[0] > 0 {
            vmap.insert(i, verts.len());
            verts.push(r[1..].iter().map(|&x| Q::new(x.into(), r[0].into())).collect());
        } else if r[0] == 0 {
            rmap.insert(i, rays.len());
            rays.push(r[1..].to_vec());
        }
    }
    let mut faces = Vec::new();
    for f in &c.faces {
        if f.r.iter().any(|r| c.rays[*r][0] < 0) {
            return Err(PolyError::Invalid("cone reaches below height zero".into()));
        }
        let v: Vec<usize> = f.r.iter().filter_map(|r| vmap.get(r).copied()).collect();
        if v.is_empty() {
            continue;
        }
        let rs: Vec<usize> = f.r.iter().filter_map(|r| rmap.get(r).copied()).collect();
        faces.push(Cell::new(v, rs));
    }
    PolyComplex::from_faces(n, verts, rays, faces)
}

/// Intersection of a fan complex in dimension n + 1 with x0 = 0, as a fan in dimension n.
pub fn slice_at_height_zero(c: &PolyComplex) -> Result<Fan, PolyError> {
    let n = c.n - 1;
    let idx: Vec<usize> = (0..c.rays.len()).filter(|&i| c.rays[i][0] == 0).collect();
    let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(a, &b)| (b, a)).collect();
    let rays: Vec<Vec<i64>> = idx.iter().map(|&i| c.rays[i][1..].to_vec()).collect();
    let cones: Vec<Vec<usize>> =
        c.faces.iter().filter(|f| f.r.iter().all(|r| pos.contains_key(r))).map(|f| f.r.iter().map(|r| pos[r]).collect()).collect();
    Ok(Fan::new(n, rays, &cones)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qf;

    fn pt(xs: &[i64]) -> Vec<Q> {
        qvec(xs)
    }

    pub fn tp1() -> PolyComplex {
        PolyComplex::new(1, vec![pt(&[0]), pt(&[1])], vec![vec![-1], vec![1]], &[Cell::new(vec![0, 1], vec![]), Cell::new(vec![0], vec![0]), Cell::new(vec![1], vec![1])]).unwrap()
    }

    #[test]
    fn square_faces() {
        let verts = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])];
        let faces = polyhedron_faces(&verts, &[]).unwrap();
        let by_dim = |d| faces.iter().filter(|f| f.2 == d).count();
        assert_eq!((by_dim(0), by_dim(1), by_dim(2)), (4, 4, 1));
        // Quadrant with apex and a redundant ray.
        let f = polyhedron_faces(&[pt(&[0, 0])], &[pt(&[1, 0]), pt(&[0, 1]), pt(&[1, 1])]).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.iter().all(|(_, r, _)| !r.contains(&2)));
        assert_eq!(polyhedron_faces(&[pt(&[0])], &[pt(&[1]), pt(&[-1])]), Err(PolyError::NotPointed));
    }

    #[test]
    fn recession() {
        let x = tp1();
        let f = x.recession_fan().unwrap();
        assert_eq!(f.n_rays(), 2);
        assert!(f.is_complete());
        let compact = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[1, 0])], vec![], &[Cell::new(vec![0, 1], vec![])]).unwrap();
        assert_eq!(compact.recession_fan().unwrap().n_rays(), 0);
        // Two cones whose intersection is not a face.
        let bad = PolyComplex::new(
            3,
            vec![pt(&[0, 0, 0]), pt(&[0, 0, 1])],
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]],
            &[Cell::new(vec![0], vec![0, 1]), Cell::new(vec![1], vec![0, 2])],
        )
        .unwrap();
        assert!(matches!(bad.recession_fan(), Err(PolyError::RecessionNotFan(_))));
    }

    #[test]
    fn cuts() {
        let seg = PolyComplex::new(1, vec![pt(&[0]), pt(&[2])], vec![], &[Cell::new(vec![0, 1], vec![])]).unwrap();
        let c = hyperplane_cut(&seg, &Hyperplane { normal: pt(&[1]), offset: q(1) }).unwrap();
        assert_eq!((c.vertices().len(), c.maximal_cells().len()), (3, 2));
        let same = hyperplane_cut(&seg, &Hyperplane { normal: pt(&[1]), offset: q(5) }).unwrap();
        assert_eq!(same.faces().len(), 3);
        let sq = PolyComplex::new(2, vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[0, 2]), pt(&[2, 2])], vec![], &[Cell::new(vec![0, 1, 2, 3], vec![])]).unwrap();
        let c = hyperplane_cut(&sq, &Hyperplane { normal: pt(&[1, 1]), offset: q(1) }).unwrap();
        assert_eq!(c.maximal_cells().len(), 2);
        assert_eq!(c.faces().iter().enumerate().filter(|(i, _)| c.dim_of(*i) == 2).count(), 2);
        // Unbounded cell.
        let x = tp1();
        let c = hyperplane_cut(&x, &Hyperplane { normal: pt(&[1]), offset: q(3) }).unwrap();
        assert_eq!(c.vertices().len(), 3);
        assert!(c.contains(&pt(&[7])));
    }

    #[test]
    fn blowups() {
        let quad = Fan::new(2, vec![vec![1, 0], vec![0, 1]], &[vec![0, 1]]).unwrap();
        let b = blow_up(&PolyComplex::from_fan(&quad), &pt(&[1, 1])).unwrap();
        assert_eq!(b.maximal_cells().len(), 2);
        let b = blow_up(&PolyComplex::from_fan(&quad), &pt(&[-1, 0])).unwrap();
        assert_eq!(b.maximal_cells().len(), 1);
        // Cone over a square.
        let sq = PolyComplex::new(3, vec![pt(&[0, 0, 0])], vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]], &[Cell::new(vec![0], vec![0, 1, 2, 3])]).unwrap();
        let t = triangulate_fan(&sq).unwrap();
        assert!(t.is_simplicial());
        assert_eq!(t.maximal_cells().len(), 4);
    }

    #[test]
    fn external_cones() {
        let x = tp1();
        let c = external_cone(&x);
        assert_eq!(c.maximal_cells().len(), 3);
        let back = slice_at_height_one(&c).unwrap();
        assert_eq!(back.faces().len(), x.faces().len());
        let rec = slice_at_height_zero(&c).unwrap();
        assert_eq!(rec.n_rays(), 2);
        let half = PolyComplex::new(2, vec![pt(&[1, 2])], vec![vec![1, 1]], &[Cell::new(vec![0], vec![0])]).unwrap();
        let c = external_cone(&half);
        assert_eq!(c.rays().len(), 2);
    }

    #[test]
    fn pencils() {
        let line = Fan::new(1, vec![vec![1], vec![-1]], &[vec![0], vec![1]]).unwrap();
        let ray = Fan::new(1, vec![vec![1]], &[vec![0]]).unwrap();
        let s = slice_with_pencil(&line, &ray).unwrap();
        assert_eq!(s.maximal_cells().len(), 2);
        let quad = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]], &[vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        let u23 = Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0], vec![1], vec![2]]).unwrap();
        let s = slice_with_pencil(&quad, &u23).unwrap();
        assert!(s.contains(&pt(&[-1, -1])));
        assert_eq!(s.maximal_cells().len(), 8);
    }

    #[test]
    fn unimodularity() {
        let std = [pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])];
        assert_eq!(unimodularity_decomposition(&std, &[], 1), (true, true));
        assert_eq!(unimodularity_decomposition(&[pt(&[0]), pt(&[2])], &[], 1), (false, true));
        assert_eq!(unimodularity_decomposition(&[pt(&[0, 0]), pt(&[1, 0])], &[vec![1, 2]], 1), (true, false));
        assert_eq!(unimodularity_decomposition(&[pt(&[0]), vec![qf(1, 2)]], &[], 2), (true, true));
    }
}
