//! Acceptance suite: one PASS/FAIL line per criterion, all checks exact.

use std::collections::BTreeSet;
use std::process::ExitCode;
use trophodge::chow::{keel_decomposition, ChowRing};
use trophodge::fan::{bergman_fan, Fan};
use trophodge::hodge::check_hr;
use trophodge::linalg::{is_unimodular_family, q, qf, qvec, rank, signature, solve, to_i64, QMatrix, Q};
use trophodge::matroid::{fano, k4_edges, Matroid};
use trophodge::polyhedral::convex::{fan_ampleness, PLFunction};
use trophodge::polyhedral::triangulate::{find_strictly_convex_function, quasiprojective_unimodular_triangulation, same_recession};
use trophodge::polyhedral::PolyComplex;
use trophodge::steenbrink::SteenbrinkComplex;
use trophodge::tropcoh::{deligne_sequence, hodge_index_check, projective_bundle_check, CompactTropicalSpace};

fn corpus(name: &str) -> serde_json::Value {
    let path = format!("{}/corpus/{name}.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(&path).expect("corpus file")).expect("corpus json")
}

fn matroid(name: &str) -> Matroid {
    Matroid::from_json(&corpus(name)).expect("matroid")
}

fn complex(name: &str) -> PolyComplex {
    PolyComplex::from_json(&corpus(name)).expect("complex")
}

fn bergman(m: &Matroid) -> Fan {
    bergman_fan(m).expect("bergman fan")
}

fn ring(f: &Fan) -> ChowRing {
    ChowRing::build(f).expect("chow ring")
}

fn ell_by_labels(r: &ChowRing, coeffs: &[(&str, Q)]) -> Vec<Q> {
    let mut v = vec![q(0); r.fan().n_rays()];
    for (l, c) in coeffs {
        v[r.ray_by_label(l).expect("label")] += c;
    }
    v
}

fn deg2(r: &ChowRing, v: &[Q]) -> Q {
    let l = r.ell_class(v);
    r.degree(&r.multiply(&l, &l).unwrap()).unwrap()
}

/// Flat of a Bergman ray, read back from its label "i,j,...".
fn flat_of(label: &str) -> BTreeSet<String> {
    label.split(',').map(str::to_string).collect()
}

type Check = Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn c1_u33() -> Check {
    let f = bergman(&matroid("u33"));
    let r = ring(&f);
    ensure(r.dims() == vec![1, 4, 1], format!("dims {:?}", r.dims()))?;
    // deg(x_F x_G) against the comparability rule of the flats.
    let mut values = BTreeSet::new();
    for i in 0..f.n_rays() {
        for j in 0..f.n_rays() {
            let (a, b) = (flat_of(&f.labels()[i]), flat_of(&f.labels()[j]));
            let expect = if a == b {
                q(-1)
            } else if a.is_subset(&b) || b.is_subset(&a) {
                q(1)
            } else {
                q(0)
            };
            let got = r.degree(&r.monomial(&[i, j])).unwrap();
            ensure(got == expect, format!("deg(x_{} x_{}) = {got}", f.labels()[i], f.labels()[j]))?;
            values.insert(got);
        }
    }
    ensure(values == [q(-1), q(0), q(1)].into_iter().collect(), "degree table values")?;
    let ones = vec![q(1); f.n_rays()];
    ensure(deg2(&r, &ones) == q(6), "deg l^2")?;
    let s = signature(&r.poincare_pairing(1).unwrap()).unwrap();
    ensure((s.n_plus, s.n_minus, s.n_zero) == (1, 3, 0), format!("Q1 signature {s:?}"))?;
    ensure(check_hr(&r, &r.ell_class(&ones)).unwrap().hr, "HR for l")?;
    let lp = ell_by_labels(&r, &[("1", q(1)), ("1,2", q(1)), ("2", q(1))]);
    ensure(deg2(&r, &lp) == q(1), "deg l'^2")?;
    ensure(check_hr(&r, &r.ell_class(&lp)).unwrap().hr, "HR for l'")?;
    let cert = fan_ampleness(&f, &lp).unwrap();
    let x = PolyComplex::from_fan(&f);
    let g = PLFunction { values: vec![q(0)], slopes: lp.clone() };
    ensure(!cert.strict && cert.failing_face().is_some() && cert.verify(&x, &g), "non-ample certificate for l'")?;
    Ok("dims (1,4,1), deg table {-1,1,0}, deg l^2 = 6, Q1 (1,3), HR; l': deg 1, HR, not ample".into())
}

/// Values of l^sigma on the rays of the star fan: subtract a linear form agreeing with l on sigma.
fn star_values(f: &Fan, values: &[Q], sigma: &[usize], star: &Fan) -> Vec<Q> {
    let n = f.lattice_rank();
    let m = QMatrix::from_rows_with_cols(sigma.iter().map(|&i| qvec(f.ray(i))).collect(), n);
    let rhs: Vec<Q> = sigma.iter().map(|&i| values[i].clone()).collect();
    let lin = solve(&m, &rhs).expect("sigma is simplicial");
    star.labels()
        .iter()
        .map(|l| {
            let i = f.labels().iter().position(|x| x == l).expect("star ray label");
            let dot: Q = qvec(f.ray(i)).iter().zip(&lin).map(|(a, b)| a * b).sum();
            &values[i] - dot
        })
        .collect()
}

fn c2_u34() -> Check {
    let f = bergman(&matroid("u34"));
    let r = ring(&f);
    let e = qf(1, 100);
    let l = ell_by_labels(
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
    ensure(check_hr(&r, &r.ell_class(&l)).unwrap().hr, "HR")?;
    let cert = fan_ampleness(&f, &l).unwrap();
    let x = PolyComplex::from_fan(&f);
    let g = PLFunction { values: vec![q(0)], slopes: l.clone() };
    ensure(!cert.strict && cert.verify(&x, &g), "l is not certified non-ample")?;
    let bad: Vec<usize> = cert.faces.iter().filter(|c| c.margin <= q(0)).map(|c| c.face).collect();
    ensure(bad.iter().all(|&i| x.face(i).r.is_empty()), "a non-zero cone fails convexity")?;
    let mut count = 0;
    for sigma in f.cones().iter().filter(|c| !c.is_empty()) {
        let star = f.star_fan(sigma).unwrap();
        let sv = star_values(&f, &l, sigma, &star);
        let sc = fan_ampleness(&star, &sv).unwrap();
        let sx = PolyComplex::from_fan(&star);
        ensure(sc.strict && sc.verify(&sx, &PLFunction { values: vec![q(0)], slopes: sv }), format!("l^sigma not ample for {sigma:?}"))?;
        count += 1;
    }
    Ok(format!("HR true, l not ample (certificate at the origin), l^sigma ample on all {count} cones sigma != 0"))
}

fn c3_poincare() -> Check {
    let k4 = Matroid::graphic(4, &k4_edges()).unwrap();
    let cases: Vec<(&str, Matroid)> = vec![
        ("U(2,3)", matroid("u23")),
        ("U(2,4)", Matroid::uniform(2, 4)),
        ("U(3,4)", matroid("u34")),
        ("U(3,5)", Matroid::uniform(3, 5)),
        ("K4", k4),
        ("Fano", fano()),
    ];
    let mut out = Vec::new();
    for (name, m) in cases {
        let r = ring(&bergman(&m));
        let d = r.top_degree();
        for k in 0..=d {
            ensure(r.dim(k) == r.dim(d - k), format!("{name}: dim A^{k} != dim A^{}", d - k))?;
            let p = r.poincare_pairing(k).unwrap();
            ensure(rank(&p) == r.dim(k), format!("{name}: pairing in degree {k} degenerate"))?;
        }
        out.push(format!("{name} {:?}", r.dims()));
    }
    Ok(out.join(", "))
}

fn c4_fans() -> Vec<(&'static str, Fan)> {
    vec![
        ("U(3,3)", bergman(&matroid("u33"))),
        ("U(2,4)", bergman(&Matroid::uniform(2, 4))),
        ("K4", bergman(&matroid("k4-graphic"))),
    ]
}

fn c4_hodge() -> Check {
    let mut out = Vec::new();
    for (name, f) in c4_fans() {
        let dims = ring(&f).dims();
        let x = CompactTropicalSpace::of_fan(&f).map_err(|e| e.to_string())?;
        let h = x.hodge_numbers();
        for (p, row) in h.iter().enumerate() {
            for (qq, &v) in row.iter().enumerate() {
                let want = if p == qq { dims[p] } else { 0 };
                ensure(v == want, format!("{name}: h^{{{p},{qq}}} = {v}, expected {want}"))?;
            }
        }
        out.push(format!("{name} {dims:?}"));
    }
    Ok(out.join(", "))
}

fn c5_deligne() -> Check {
    let mut n = 0;
    for (name, f) in c4_fans() {
        for p in 0..=f.dimension() {
            let rep = deligne_sequence(&f, p).map_err(|e| e.to_string())?;
            ensure(rep.exact && rep.composites_vanish, format!("{name}, p = {p}: {rep:?}"))?;
            n += 1;
        }
    }
    Ok(format!("exact for all {n} (fan, p) pairs"))
}

fn c6_steenbrink() -> Check {
    let spaces = vec![
        ("tp1", CompactTropicalSpace::compactify(&complex("tp1"))),
        ("tp1xtp1", CompactTropicalSpace::compactify(&complex("tp1xtp1"))),
        ("tp2", CompactTropicalSpace::compactify(&complex("tp2"))),
        ("U(3,3)", CompactTropicalSpace::of_fan(&bergman(&matroid("u33")))),
    ];
    for (name, x) in spaces {
        let x = x.map_err(|e| e.to_string())?;
        let st = SteenbrinkComplex::build(&x).map_err(|e| e.to_string())?;
        let ids = st.identities();
        ensure(ids.all(), format!("{name}: {ids:?}"))?;
        let c = st.comparison_check(&x.hodge_numbers());
        ensure(c.equal, format!("{name}: {c:?}"))?;
    }
    Ok("d^2 = 0, i*^2 = 0, gys^2 = 0, i* gys + gys i* = 0, Betti tables equal on tp1, tp1xtp1, tp2, U(3,3)".into())
}

fn keel_case(name: &str, f: &Fan, sigma: &[usize]) -> Result<String, String> {
    let r = ring(f);
    let star = ring(&f.star_fan(sigma).unwrap());
    let sub = ring(&f.star_subdivide(sigma).unwrap());
    // A'^k = A^k + sum_{i=1}^{|sigma|-1} A^{k-i}(star), from independently built rings.
    let predicted: Vec<usize> = (0..=r.top_degree())
        .map(|k| r.dim(k) + (1..sigma.len()).filter(|&i| i <= k && k - i <= star.top_degree()).map(|i| star.dim(k - i)).sum::<usize>())
        .collect();
    ensure(sub.dims() == predicted, format!("{name}: {:?} vs {predicted:?}", sub.dims()))?;
    let rep = keel_decomposition(&r, sigma, &star, &sub).map_err(|e| e.to_string())?;
    ensure(rep.holds && rep.chi_ranks == sub.dims(), format!("{name}: chi not bijective {rep:?}"))?;
    Ok(format!("{name} {:?}", sub.dims()))
}

fn c7_keel() -> Check {
    let tp2 = complex("tp2").recession_fan().map_err(|e| e.to_string())?;
    let u33 = bergman(&matroid("u33"));
    let c = u33.cones_of_dim(2).next().unwrap().clone();
    Ok(format!("{}, {}", keel_case("tp2", &tp2, &[0, 1])?, keel_case("U(3,3)", &u33, &c)?))
}

fn c8_bundle() -> Check {
    let mut out = Vec::new();
    for name in ["tp2", "tp1xtp1"] {
        let rep = projective_bundle_check(&complex(name), &[0, 1]).map_err(|e| e.to_string())?;
        // h^{p,q}(X') = h^{p,q}(X) + h^{p-1,q-1}(D) for a 2-cone.
        let n = rep.after.len();
        for p in 0..n {
            for qq in 0..n {
                let extra = if p >= 1 && qq >= 1 { rep.stratum.get(p - 1).and_then(|r| r.get(qq - 1)).copied().unwrap_or(0) } else { 0 };
                ensure(rep.after[p][qq] == rep.before[p][qq] + extra, format!("{name}: h^{{{p},{qq}}}"))?;
            }
        }
        ensure(rep.holds, format!("{name}: {rep:?}"))?;
        out.push(format!("{name} {:?} -> {:?}", rep.before, rep.after));
    }
    Ok(out.join(", "))
}

fn c9_triangulation() -> Check {
    let mut out = Vec::new();
    for name in ["tp1-long-edge", "square-complex"] {
        let x = complex(name);
        let t = quasiprojective_unimodular_triangulation(&x).map_err(|e| e.to_string())?;
        let y = &t.complex;
        ensure(y.is_simplicial(), format!("{name}: not simplicial"))?;
        ensure(y.is_unimodular(t.k), format!("{name}: not unimodular"))?;
        // Independent lattice check: k(v_i - v_0) and the rays extend to a basis of Z^n.
        let k = Q::from_integer((t.k as i64).into());
        for &c in &y.maximal_cells() {
            let cell = y.face(c);
            let v0 = &y.vertices()[cell.v[0]];
            let mut gens: Vec<Vec<i64>> = cell.v[1..]
                .iter()
                .map(|&v| y.vertices()[v].iter().zip(v0).map(|(a, b)| to_i64(&((a - b) * &k)).expect("integral")).collect())
                .collect();
            gens.extend(cell.r.iter().map(|&r| y.rays()[r].clone()));
            ensure(is_unimodular_family(&gens), format!("{name}: cell {c} has index > 1"))?;
        }
        ensure(same_recession(&x, y).map_err(|e| e.to_string())?, format!("{name}: recession fan changed"))?;
        ensure(t.certificate.strict && t.certificate.verify(y, &t.function), format!("{name}: certificate"))?;
        let rec = y.recession_fan().map_err(|e| e.to_string())?;
        let g = PLFunction { values: vec![q(0)], slopes: t.function.slopes.clone() };
        ensure(t.recession_certificate.strict && t.recession_certificate.verify(&PolyComplex::from_fan(&rec), &g), format!("{name}: f_inf"))?;
        out.push(format!("{name} k = {}, {} maximal cells, STRICT", t.k, y.maximal_cells().len()));
    }
    Ok(out.join(", "))
}

fn c10_hl() -> Check {
    let mut out = Vec::new();
    for name in ["tp1xtp1", "tp2"] {
        let x = CompactTropicalSpace::compactify(&complex(name)).map_err(|e| e.to_string())?;
        let st = SteenbrinkComplex::build(&x).map_err(|e| e.to_string())?;
        let f = find_strictly_convex_function(st.complex()).map_err(|e| e.to_string())?;
        let kf = st.kahler_from_function(&f).map_err(|e| e.to_string())?;
        let h = st.hl_structure(&kf).map_err(|e| e.to_string())?;
        let ax = h.check_axioms();
        ensure(ax.all(), format!("{name}: {ax:?}"))?;
        let lap = h.laplacian_report().map_err(|e| e.to_string())?;
        ensure(lap.commutes_n1 && lap.commutes_n2 && lap.phi_symmetric && lap.hodge_decomposition, format!("{name}: {lap:?}"))?;
        let d = st.dimension() as i64;
        let mut total = 0;
        for &(ha, hb, harm, _) in &lap.harmonic {
            let (a, b) = (-ha, d + ha - hb);
            let row = st.row_cohomology((b / 2) as usize)[(a + d) as usize];
            ensure(harm == row, format!("{name}: ker Laplacian at ({a},{b}) is {harm}, row cohomology {row}"))?;
            total += harm;
        }
        let c = h.cohomology_hl().map_err(|e| e.to_string())?;
        let cax = c.check_axioms();
        ensure(cax.all() && c.dim() == total, format!("{name}: cohomology {cax:?}"))?;
        ensure(c.w_report().map_err(|e| e.to_string())?.all(), format!("{name}: cohomology polarization"))?;
        out.push(format!("{name} dim {} -> {}", h.dim(), total));
    }
    Ok(out.join(", "))
}

fn c11_index() -> Check {
    let mut out = Vec::new();
    for (name, want, b2) in [("tp2", (1, 0), 0), ("tp1xtp1", (1, 1), 0)] {
        let x = CompactTropicalSpace::compactify(&complex(name)).map_err(|e| e.to_string())?;
        let rep = hodge_index_check(&x).map_err(|e| e.to_string())?;
        let sig = (rep.signature.n_plus, rep.signature.n_minus);
        ensure(sig == want && rep.signature.n_zero == 0, format!("{name}: signature {sig:?}"))?;
        ensure(rep.b2 == b2, format!("{name}: b2 = {}", rep.b2))?;
        ensure(rep.expected == (1 + rep.b2, rep.h11 - 1 - rep.b2) && rep.matches, format!("{name}: formula"))?;
        out.push(format!("{name} {sig:?} b2 = {}", rep.b2));
    }
    Ok(out.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("U(3,3) suite", c1_u33),
        ("U(3,4) non-ample HR", c2_u34),
        ("Poincare duality", c3_poincare),
        ("cellular Hodge numbers", c4_hodge),
        ("Deligne exactness", c5_deligne),
        ("Steenbrink identities and Betti", c6_steenbrink),
        ("Keel dimensions", c7_keel),
        ("projective bundle", c8_bundle),
        ("triangulation", c9_triangulation),
        ("HL structure", c10_hl),
        ("Hodge index", c11_index),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
