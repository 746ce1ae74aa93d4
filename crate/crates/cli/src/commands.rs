use crate::input::{parse_indices, CliError, Input};
use serde_json::{json, Value};
use std::path::Path;
use trophodge::chow::ChowRing;
use trophodge::fan::tropical_modification;
use trophodge::hodge::check_hr;
use trophodge::linalg::{fmt_q, parse_q, rank, Q};
use trophodge::matroid::elements;
use trophodge::polyhedral::convex::{fan_ampleness, PLFunction};
use trophodge::polyhedral::triangulate::{find_strictly_convex_function, quasiprojective_unimodular_triangulation, same_recession};
use trophodge::polyhedral::PolyComplex;
use trophodge::steenbrink::{KahlerForm, SteenbrinkComplex, SteenbrinkError};

/// A report and whether everything it checks holds.
pub struct Report {
    pub value: Value,
    pub verified: bool,
}

impl Report {
    fn ok(value: Value) -> Report {
        Report { value, verified: true }
    }

    fn checked(value: Value, verified: bool) -> Report {
        Report { value, verified }
    }
}

type Out = Result<Report, CliError>;

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn matrix_json(m: &trophodge::linalg::QMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(fmt_q).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn matroid_info(input: &str) -> Out {
    let inp = Input::load(input)?;
    let m = inp.matroid()?;
    let flats = m.flats_unchecked();
    let loops: Vec<&String> = (0..m.size()).filter(|&e| m.is_loop(e)).map(|e| &m.labels()[e]).collect();
    Ok(Report::ok(json!({
        "ground_set": m.labels(),
        "size": m.size(),
        "rank": m.full_rank(),
        "bases": m.bases().len(),
        "simple": m.is_simple(),
        "loops": loops,
        "flats": flats.flats.len(),
        "proper_flats": flats.proper.len(),
    })))
}

pub fn matroid_flats(input: &str) -> Out {
    let inp = Input::load(input)?;
    let m = inp.matroid()?;
    let fl = m.flats_unchecked();
    let flats: Vec<Value> = fl
        .flats
        .iter()
        .zip(&fl.ranks)
        .map(|(&f, r)| json!({"rank": r, "elements": elements(f).iter().map(|&e| m.labels()[e].clone()).collect::<Vec<_>>()}))
        .collect();
    Ok(Report::ok(json!({"flats": flats, "covers": fl.covers})))
}

pub fn matroid_minor(input: &str, delete: Option<&str>, contract: Option<&str>) -> Out {
    let inp = Input::load(input)?;
    let m = inp.matroid()?;
    let minor = match (delete, contract) {
        (Some(e), None) => m.delete(m.index_of(e).map_err(CliError::input)?),
        (None, Some(e)) => m.contract(m.index_of(e).map_err(CliError::input)?),
        _ => return Err(CliError::Input("give exactly one of --delete, --contract".into())),
    }
    .map_err(CliError::input)?;
    Ok(Report::ok(json!({"matroid": minor.to_json(), "rank": minor.full_rank()})))
}

fn fan_summary(f: &trophodge::fan::Fan) -> Value {
    json!({
        "fan": f.to_json(),
        "dimension": f.dimension(),
        "rays": f.n_rays(),
        "unimodular": f.is_unimodular(),
        "balanced": f.is_balanced(),
    })
}

pub fn fan_bergman(input: &str) -> Out {
    let f = Input::load(input)?.fan()?;
    Ok(Report::ok(fan_summary(&f)))
}

pub fn fan_star(input: &str, cone: &str) -> Out {
    let f = Input::load(input)?.fan()?;
    let s = f.star_fan(&parse_indices(cone)?).map_err(CliError::input)?;
    Ok(Report::ok(fan_summary(&s)))
}

pub fn fan_subdivide(input: &str, cone: &str) -> Out {
    let f = Input::load(input)?.fan()?;
    let s = f.star_subdivide(&parse_indices(cone)?).map_err(CliError::input)?;
    Ok(Report::ok(fan_summary(&s)))
}

pub fn fan_modify(input: &str, divisor: &str) -> Out {
    let f = Input::load(input)?.fan()?;
    let cones = divisor.split(';').map(parse_indices).collect::<Result<Vec<_>, _>>()?;
    let m = tropical_modification(&f, &cones, None, None).map_err(CliError::input)?;
    let mut v = fan_summary(&m.fan);
    v["values"] = json!(m.values.iter().map(fmt_q).collect::<Vec<_>>());
    v["lift"] = json!(m.lift);
    v["new_ray"] = json!(m.new_ray);
    Ok(Report::ok(v))
}

fn ring(input: &str) -> Result<ChowRing, CliError> {
    let f = Input::load(input)?.fan()?;
    ChowRing::build(&f).map_err(CliError::input)
}

pub fn chow_build(input: &str) -> Out {
    let r = ring(input)?;
    let d = r.top_degree();
    let ranks: Vec<usize> = (0..=d).map(|k| r.poincare_pairing(k).map(|m| rank(&m)).unwrap_or(0)).collect();
    let dims = r.dims();
    let pd = (0..=d).all(|k| dims[k] == dims[d - k] && ranks[k] == dims[k]);
    let labels = r.fan().labels().to_vec();
    Ok(Report::checked(json!({"dims": dims, "top_degree": d, "pairing_ranks": ranks, "poincare_duality": pd, "generators": labels}), pd))
}

pub fn chow_degree(input: &str, monomial: &str) -> Out {
    let r = ring(input)?;
    let idx = parse_indices(monomial)?;
    if idx.len() != r.top_degree() || idx.iter().any(|&i| i >= r.fan().n_rays()) {
        return Err(CliError::Input(format!("monomial needs {} ray indices below {}", r.top_degree(), r.fan().n_rays())));
    }
    let deg = r.degree(&r.monomial(&idx)).map_err(CliError::input)?;
    Ok(Report::ok(json!({"monomial": idx, "degree": fmt_q(&deg)})))
}

pub fn chow_pairing(input: &str, k: usize) -> Out {
    let r = ring(input)?;
    if k > r.top_degree() {
        return Err(CliError::Input(format!("degree {k} exceeds {}", r.top_degree())));
    }
    let m = r.poincare_pairing(k).map_err(CliError::input)?;
    let rk = rank(&m);
    let full = rk == r.dim(k) && r.dim(k) == r.dim(r.top_degree() - k);
    Ok(Report::checked(json!({"k": k, "matrix": matrix_json(&m), "rank": rk, "full_rank": full}), full))
}

/// `label=value` pairs on ray labels; absent rays get 0, and no pairs at all means every ray gets 1.
fn ell_values(r: &ChowRing, ell: &[String]) -> Result<Vec<Q>, CliError> {
    let n = r.fan().n_rays();
    if ell.is_empty() {
        return Ok(vec![Q::from_integer(1.into()); n]);
    }
    let mut v = vec![Q::from_integer(0.into()); n];
    for e in ell {
        let (l, x) = e.rsplit_once('=').ok_or_else(|| CliError::Input(format!("expected label=value, got '{e}'")))?;
        let i = r.ray_by_label(l).ok_or_else(|| CliError::Input(format!("no ray labelled '{l}'")))?;
        v[i] += parse_q(x).ok_or_else(|| CliError::Input(format!("bad rational '{x}'")))?;
    }
    Ok(v)
}

pub fn hodge_verify(input: &str, ell: &[String]) -> Out {
    let r = ring(input)?;
    let values = ell_values(&r, ell)?;
    let l = r.ell_class(&values);
    let rep = check_hr(&r, &l).map_err(CliError::input)?;
    let top = r.power(&l, r.top_degree()).and_then(|p| r.degree(&p)).map_err(CliError::input)?;
    let cert = fan_ampleness(r.fan(), &values).map_err(CliError::input)?;
    let x = PolyComplex::from_fan(r.fan());
    let failing: Vec<Value> = cert.faces.iter().filter(|c| c.margin <= Q::from_integer(0.into())).map(|c| json!({"cone": x.face(c.face).r, "margin": fmt_q(&c.margin)})).collect();
    let mut v = rep.to_json();
    v["degree_top_power"] = json!(fmt_q(&top));
    v["ample"] = json!(cert.strict);
    v["non_ample_cones"] = json!(failing);
    v["ampleness_certificate_verified"] = json!(cert.verify(&x, &PLFunction { values: vec![Q::from_integer(0.into())], slopes: values }));
    Ok(Report::checked(v, rep.hr))
}

pub fn triangulate(input: &str, out: Option<&Path>, cert_path: Option<&Path>) -> Out {
    let x = Input::load(input)?.complex()?;
    let t = quasiprojective_unimodular_triangulation(&x).map_err(CliError::input)?;
    let simplicial = t.complex.is_simplicial();
    let unimodular = t.complex.is_unimodular(t.k);
    let recession = same_recession(&x, &t.complex).map_err(CliError::input)?;
    let cert_ok = t.certificate.verify(&t.complex, &t.function);
    let strict = t.certificate.strict && t.recession_certificate.strict;
    let write = |p: &Path, v: &Value| std::fs::write(p, serde_json::to_string_pretty(v).expect("json")).map_err(|e| CliError::Input(format!("{}: {e}", p.display())));
    if let Some(p) = out {
        write(p, &t.complex.to_json())?;
    }
    let certificate = json!({
        "scale_k": t.k,
        "function": t.function.to_json(),
        "certificate": t.certificate.to_json(),
        "recession_certificate": t.recession_certificate.to_json(),
    });
    if let Some(p) = cert_path {
        write(p, &certificate)?;
    }
    let verdict = if strict { "STRICT" } else { "NOT_STRICT" };
    let v = json!({
        "scale_k": t.k,
        "maximal_cells": t.complex.maximal_cells().len(),
        "simplicial": simplicial,
        "unimodular": unimodular,
        "recession_preserved": recession,
        "certificate_verified": cert_ok,
        "verdict": verdict,
        "complex": if out.is_none() { t.complex.to_json() } else { Value::Null },
    });
    Ok(Report::checked(v, simplicial && unimodular && recession && cert_ok && strict))
}

pub fn tropcoh_betti(input: &str) -> Out {
    let x = Input::load(input)?.space()?;
    Ok(Report::ok(json!({"hodge_numbers": x.hodge_numbers(), "betti": x.betti_json(), "f_vector": x.f_vector()})))
}

pub fn tropcoh_weight(input: &str, face: usize, p: usize) -> Out {
    let x = Input::load(input)?.space()?;
    if face >= x.faces().len() {
        return Err(CliError::Input(format!("face {face} out of range (0..{})", x.faces().len())));
    }
    let w = x.weight_filtration(face, p);
    let ok = w.graded_dims_match();
    Ok(Report::checked(json!({"face": face, "p": p, "graded_dims": w.graded_dims, "expected": w.expected_graded_dims, "match": ok}), ok))
}

pub fn tropcoh_class(input: &str, ray: usize) -> Out {
    let x = Input::load(input)?.space()?;
    let c = x.cycle_class_of_ray(ray).map_err(CliError::input)?;
    let mut v = json!({"ray": ray, "cochain": c.iter().map(fmt_q).collect::<Vec<_>>()});
    if x.dimension() == 2 {
        v["self_intersection"] = json!(fmt_q(&x.degree(&x.cup((1, 1, &c), (1, 1, &c)))));
    }
    Ok(Report::ok(v))
}

fn steenbrink(input: &str) -> Result<(trophodge::tropcoh::CompactTropicalSpace, SteenbrinkComplex), CliError> {
    let x = Input::load(input)?.space()?;
    let st = SteenbrinkComplex::build(&x).map_err(CliError::input)?;
    Ok((x, st))
}

pub fn steenbrink_build(input: &str) -> Out {
    let (_, st) = steenbrink(input)?;
    let ids = st.identities();
    let ok = ids.all();
    Ok(Report::checked(json!({"dimension": st.dimension(), "dims": st.dims_table(), "identities": to_value(&ids)}), ok))
}

pub fn steenbrink_rows(input: &str) -> Out {
    let (_, st) = steenbrink(input)?;
    let rows: Vec<Vec<usize>> = (0..=st.dimension()).map(|p| st.row_cohomology(p)).collect();
    Ok(Report::ok(json!({"row_cohomology": rows, "hodge_table": st.hodge_table()})))
}

pub fn steenbrink_compare(input: &str) -> Out {
    let (x, st) = steenbrink(input)?;
    let c = st.comparison_check(&x.hodge_numbers());
    Ok(Report::checked(to_value(&c), c.equal))
}

/// Kähler form from a function file, or from a strictly convex function found by LP.
fn kahler(st: &SteenbrinkComplex, function: Option<&str>) -> Result<Result<KahlerForm, SteenbrinkError>, CliError> {
    let f = match function {
        Some(p) => PLFunction::from_json(&crate::input::read_value(p)?).map_err(CliError::input)?,
        None => find_strictly_convex_function(st.complex()).map_err(CliError::input)?,
    };
    Ok(st.kahler_from_function(&f))
}

fn kahler_failure(e: SteenbrinkError) -> Out {
    match e {
        SteenbrinkError::NotAmple(_) | SteenbrinkError::EdgeIncompatible { .. } => Ok(Report::checked(json!({"kahler": false, "error": e.to_string()}), false)),
        e => Err(CliError::input(e)),
    }
}

pub fn steenbrink_kahler(input: &str, function: Option<&str>) -> Out {
    let (_, st) = steenbrink(input)?;
    let kf = match kahler(&st, function)? {
        Ok(k) => k,
        Err(e) => return kahler_failure(e),
    };
    let ops = st.operator_checks(&kf);
    let prim = st.primitive_report(&kf);
    let pol = st.polarization_check(&kf);
    let ok = ops.all() && prim.matches_local && prim.decomposition && pol.all();
    Ok(Report::checked(json!({"kahler": true, "operators": to_value(&ops), "primitive": to_value(&prim), "polarization": to_value(&pol)}), ok))
}

pub fn hl_check(input: &str, function: Option<&str>) -> Out {
    let (_, st) = steenbrink(input)?;
    let kf = match kahler(&st, function)? {
        Ok(k) => k,
        Err(e) => return kahler_failure(e),
    };
    let h = st.hl_structure(&kf).map_err(CliError::input)?;
    let ax = h.check_axioms();
    let w = h.w_report().map_err(CliError::input)?;
    let lap = h.laplacian_report().map_err(CliError::input)?;
    let c = h.cohomology_hl().map_err(CliError::input)?;
    let cax = c.check_axioms();
    let cw = c.w_report().map_err(CliError::input)?;
    let d = st.dimension() as i64;
    // Harmonic dimensions against row cohomology, in Steenbrink indices.
    let rows_match = lap.harmonic.iter().all(|&(ha, hb, n, _)| {
        let a = -ha;
        let b = d - a - hb;
        st.row_cohomology((b / 2) as usize)[(a + d) as usize] == n
    });
    let ok = ax.all() && w.all() && lap.all() && rows_match && cax.all() && cw.all();
    Ok(Report::checked(
        json!({
            "dimension": h.dim(),
            "axioms": to_value(&ax),
            "w": to_value(&w),
            "laplacian": to_value(&lap),
            "harmonic_matches_rows": rows_match,
            "cohomology_dimension": c.dim(),
            "cohomology_axioms": to_value(&cax),
            "cohomology_w": to_value(&cw),
        }),
        ok,
    ))
}
