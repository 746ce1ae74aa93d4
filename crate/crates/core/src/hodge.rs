//! Hard Lefschetz, Hodge-Riemann and Lefschetz decompositions on Chow rings.

use num::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::chow::{ChowElement, ChowError, ChowRing};
use crate::fan::Fan;
use crate::linalg::{fmt_q, kernel_basis, rank, rank_of_vectors, signature, QMatrix, Signature, Q};

pub use crate::chow::{keel_decomposition, KeelReport};

#[derive(Clone, Debug)]
pub struct HRDegree {
    pub k: usize,
    pub dim: usize,
    pub primitive_dim: usize,
    pub signature: Signature,
    pub expected_index: i64,
    /// (-1)^k Q_k is positive definite on the primitive part.
    pub primitive_definite: bool,
}

#[derive(Clone, Debug)]
pub struct HRReport {
    pub ell: ChowElement,
    pub degrees: Vec<HRDegree>,
    pub hl: bool,
    pub hr: bool,
    pub pd: bool,
}

impl HRReport {
    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self
            .degrees
            .iter()
            .map(|d| {
                json!({
                    "k": d.k,
                    "dim": d.dim,
                    "primitive_dim": d.primitive_dim,
                    "signature": [d.signature.n_plus, d.signature.n_minus, d.signature.n_zero],
                    "index": d.signature.index(),
                    "expected_index": d.expected_index,
                    "primitive_definite": d.primitive_definite,
                })
            })
            .collect();
        json!({
            "ell": self.ell.coords.iter().map(fmt_q).collect::<Vec<_>>(),
            "degrees": degrees,
            "hl": self.hl,
            "hr": self.hr,
            "pd": self.pd,
        })
    }
}

/// Failure of Hard Lefschetz in degree k with a kernel vector of l^{d-2k}.
#[derive(Clone, Debug)]
pub struct HLWitness {
    pub k: usize,
    pub kernel: Vec<Q>,
}

fn lefschetz_matrix(r: &ChowRing, ell: &ChowElement, k: usize) -> Result<QMatrix, ChowError> {
    let d = r.top_degree();
    let p = r.power(ell, d - 2 * k)?;
    r.multiplication_matrix(&p, k)
}

pub fn check_hl(r: &ChowRing, ell: &ChowElement) -> Result<Option<HLWitness>, ChowError> {
    let d = r.top_degree();
    for k in 0..=d / 2 {
        let m = lefschetz_matrix(r, ell, k)?;
        if !m.is_square() || rank(&m) != m.cols() {
            let kernel = kernel_basis(&m).into_iter().next().unwrap_or_default();
            return Ok(Some(HLWitness { k, kernel }));
        }
    }
    Ok(None)
}

/// Kernel of l^{d-2k+1} on A^k, as coordinate vectors.
pub fn primitive_part(r: &ChowRing, ell: &ChowElement, k: usize) -> Result<Vec<Vec<Q>>, ChowError> {
    let d = r.top_degree();
    if 2 * k > d {
        return Err(ChowError::DegreeOverflow(2 * k, d));
    }
    if k == 0 {
        // l^{d-2k+1} lands above the top degree.
        return Ok((0..r.dim(k)).map(|i| r.basis_element(k, i).coords).collect());
    }
    let p = r.power(ell, d - 2 * k + 1)?;
    Ok(kernel_basis(&r.multiplication_matrix(&p, k)?))
}

/// Q_k(a, b) = deg(l^{d-2k} a b) on A^k.
pub fn hr_form(r: &ChowRing, ell: &ChowElement, k: usize) -> Result<QMatrix, ChowError> {
    let d = r.top_degree();
    let p = r.power(ell, d - 2 * k)?;
    r.bilinear(k, k, Some(&p))
}

fn restrict_form(q: &QMatrix, basis: &[Vec<Q>]) -> QMatrix {
    let n = q.rows();
    let b = QMatrix::from_cols(basis, n);
    b.transpose().mul(q).mul(&b)
}

pub fn check_hr(r: &ChowRing, ell: &ChowElement) -> Result<HRReport, ChowError> {
    let d = r.top_degree();
    let hl = check_hl(r, ell)?.is_none();
    let pd = (0..=d).all(|k| r.poincare_pairing(k).map(|m| rank(&m) == r.dim(k)).unwrap_or(false));
    let mut degrees = Vec::new();
    let mut expected = 0i64;
    let mut hr = hl;
    for k in 0..=d / 2 {
        let prev = if k == 0 { 0 } else { r.dim(k - 1) as i64 };
        let sign = if k % 2 == 0 { 1 } else { -1 };
        expected += sign * (r.dim(k) as i64 - prev);
        let q = hr_form(r, ell, k)?;
        let sig = signature(&q).expect("symmetric form");
        let prim = primitive_part(r, ell, k)?;
        let restricted = restrict_form(&q, &prim);
        let s = signature(&restricted).expect("symmetric form");
        let definite = if k % 2 == 0 { s.n_plus == prim.len() } else { s.n_minus == prim.len() };
        hr &= definite && sig.index() == expected && sig.n_zero == 0;
        degrees.push(HRDegree {
            k,
            dim: r.dim(k),
            primitive_dim: prim.len(),
            signature: sig,
            expected_index: expected,
            primitive_definite: definite,
        });
    }
    Ok(HRReport { ell: ell.clone(), degrees, hl, hr, pd })
}

/// Subspaces l^{k-i} P^i of A^k for i = 0..k. Errors when they fail to form a Q_k-orthogonal
/// direct sum.
pub fn lefschetz_decomposition(r: &ChowRing, ell: &ChowElement, k: usize) -> Result<Vec<Vec<Vec<Q>>>, String> {
    let d = r.top_degree();
    if 2 * k > d {
        return Err("k exceeds d/2".into());
    }
    let mut parts = Vec::new();
    for i in 0..=k {
        let prim = primitive_part(r, ell, i).map_err(|e| e.to_string())?;
        let lp = r.power(ell, k - i).map_err(|e| e.to_string())?;
        let part: Vec<Vec<Q>> = prim
            .iter()
            .map(|v| {
                let a = ChowElement { degree: i, coords: v.clone() };
                r.multiply(&lp, &a).map(|x| x.coords)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        parts.push(part);
    }
    let all: Vec<Vec<Q>> = parts.iter().flatten().cloned().collect();
    if all.len() != r.dim(k) || rank_of_vectors(&all, r.dim(k)) != r.dim(k) {
        return Err("not a direct sum decomposition".into());
    }
    let q = hr_form(r, ell, k).map_err(|e| e.to_string())?;
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            for a in &parts[i] {
                let qa = q.transpose().mul_vec(a);
                for b in &parts[j] {
                    let v: Q = qa.iter().zip(b).map(|(x, y)| x * y).sum();
                    if !v.is_zero() {
                        return Err(format!("parts {i} and {j} are not orthogonal"));
                    }
                }
            }
        }
    }
    Ok(parts)
}

#[derive(Clone, Debug)]
pub struct ProbeResult {
    pub eps: Q,
    pub hr: bool,
}

/// HR(Sigma', l' - eps x_rho) on the star subdivision of `sigma`, where
/// l' = sum l(e) x_e + (sum over rays of sigma of l) x_rho.
pub fn ascent_descent_probe(f: &Fan, sigma: &[usize], values: &[Q], eps_list: &[Q]) -> Result<Vec<ProbeResult>, ChowError> {
    let sub = f.star_subdivide(sigma).map_err(|e| ChowError::NotAStarSubdivision(e.to_string()))?;
    let rp = ChowRing::build(&sub)?;
    if sigma.len() < 2 {
        let ell = rp.ell_class(values);
        return Ok(eps_list.iter().map(|e| ProbeResult { eps: e.clone(), hr: check_hr(&rp, &ell).map(|x| x.hr).unwrap_or(false) }).collect());
    }
    let mut v = values.to_vec();
    let new: Q = sigma.iter().map(|&s| values[s].clone()).sum();
    v.push(new);
    let mut out = Vec::new();
    for e in eps_list {
        let mut w = v.clone();
        let last = w.len() - 1;
        w[last] -= e;
        let hr = check_hr(&rp, &rp.ell_class(&w))?.hr;
        out.push(ProbeResult { eps: e.clone(), hr });
    }
    Ok(out)
}

pub fn default_eps() -> Vec<Q> {
    (0..=6).map(|j| Q::one() / Q::from_integer((1i64 << j).into())).collect()
}

/// Diagonal entries deg(v_i^2) of a family of degree-one classes, together with the maximal
/// absolute off-diagonal pairing (zero for an orthogonal family).
pub fn gram_diagonal(r: &ChowRing, ell: &ChowElement, family: &[ChowElement]) -> Result<(Vec<Q>, Q), ChowError> {
    let d = r.top_degree();
    let p = r.power(ell, d - 2)?;
    let mut diag = Vec::new();
    let mut off = Q::zero();
    for (i, a) in family.iter().enumerate() {
        for (j, b) in family.iter().enumerate().skip(i) {
            let v = r.degree(&r.multiply(&r.multiply(&p, a)?, b)?)?;
            if i == j {
                diag.push(v);
            } else if v.abs() > off {
                off = v.abs();
            }
        }
    }
    Ok((diag, off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::bergman_fan;
    use crate::linalg::{q, qf};
    use crate::matroid::Matroid;

    fn tp2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    fn u33() -> ChowRing {
        ChowRing::build(&bergman_fan(&Matroid::uniform(3, 3)).unwrap()).unwrap()
    }

    fn by_labels(r: &ChowRing, coeffs: &[(&str, Q)]) -> ChowElement {
        let mut v = vec![Q::zero(); r.fan().n_rays()];
        for (l, c) in coeffs {
            v[r.ray_by_label(l).unwrap()] += c;
        }
        r.ell_class(&v)
    }

    #[test]
    fn tp2_hr() {
        let r = ChowRing::build(&tp2()).unwrap();
        let x = r.generator(0);
        let rep = check_hr(&r, &x).unwrap();
        assert!(rep.hl && rep.hr && rep.pd);
        assert!(check_hl(&r, &r.zero_element(1)).unwrap().is_some());
    }

    #[test]
    fn u33_hr() {
        let r = u33();
        let l = r.ell_class(&vec![q(1); 6]);
        let rep = check_hr(&r, &l).unwrap();
        assert!(rep.hr);
        let s = rep.degrees[1].signature;
        assert_eq!((s.n_plus, s.n_minus, s.index()), (1, 3, -2));
        assert_eq!(primitive_part(&r, &l, 1).unwrap().len(), 3);
        assert_eq!(primitive_part(&r, &l, 0).unwrap().len(), 1);
        let parts = lefschetz_decomposition(&r, &l, 1).unwrap();
        assert_eq!(parts.iter().map(|p| p.len()).collect::<Vec<_>>(), vec![1, 3]);

        let one = q(1);
        let fam = vec![
            by_labels(&r, &[("0", one.clone())]),
            by_labels(&r, &[("1", one.clone())]),
            by_labels(&r, &[("2", one.clone())]),
            by_labels(&r, &[("0", one.clone()), ("0,1", one.clone()), ("1", one.clone())]),
        ];
        let (diag, off) = gram_diagonal(&r, &l, &fam).unwrap();
        assert_eq!(diag, vec![q(-1), q(-1), q(-1), q(1)]);
        assert_eq!(off, q(0));

        let lp = by_labels(&r, &[("1", one.clone()), ("1,2", one.clone()), ("2", one)]);
        assert_eq!(r.degree(&r.multiply(&lp, &lp).unwrap()).unwrap(), q(1));
        assert!(check_hr(&r, &lp).unwrap().hr);
    }

    #[test]
    fn u34_hr() {
        let r = ChowRing::build(&bergman_fan(&Matroid::uniform(3, 4)).unwrap()).unwrap();
        let e = qf(1, 100);
        let l = by_labels(
            &r,
            &[
                ("0", q(2) + q(2) * &e),
                ("2", q(1)),
                ("3", q(1)),
                ("0,1", e.clone()),
                ("0,2", q(3) + &e),
                ("0,3", q(3) + &e),
                ("2,3", q(-1)),
            ],
        );
        assert!(check_hr(&r, &l).unwrap().hr);
    }

    #[test]
    fn probe_tp2() {
        let eps = vec![q(1), qf(1, 2), qf(1, 8), qf(1, 32)];
        let res = ascent_descent_probe(&tp2(), &[0, 1], &[q(1), q(1), q(1)], &eps).unwrap();
        assert!(res.iter().all(|p| p.hr));
        assert_eq!(default_eps().len(), 7);
    }
}
