use proptest::prelude::*;
use trophodge::chow::{keel_decomposition, ChowRing};
use trophodge::fan::{bergman_fan, Fan};
use trophodge::hlstruct::HLStructure;
use trophodge::hodge::check_hr;
use trophodge::linalg::{inverse, kernel_basis, q, qvec, rank, signature, solve, QMatrix, Q};
use trophodge::matroid::Matroid;
use trophodge::polyhedral::convex::fan_ampleness;
use trophodge::polyhedral::triangulate::quasiprojective_unimodular_triangulation;
use trophodge::polyhedral::{Cell, PolyComplex};
use trophodge::steenbrink::SteenbrinkComplex;
use trophodge::tropcoh::CompactTropicalSpace;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, cols), rows).prop_map(|r| QMatrix::from_ints(&r))
}

/// Unipotent upper triangular integer matrices: always invertible.
fn unipotent(n: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(-3i64..=3, n * n).prop_map(move |xs| {
        let mut m = QMatrix::identity(n);
        for i in 0..n {
            for j in i + 1..n {
                m[(i, j)] = q(xs[i * n + j]);
            }
        }
        m
    })
}

fn tp2_fan() -> Fan {
    Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| int_matrix(r, c))) {
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.len(), m.cols());
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(|x| *x == q(0)));
        }
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn inverse_and_solve(m in int_matrix(3, 3), b in prop::collection::vec(-5i64..=5, 3)) {
        match inverse(&m) {
            Some(inv) => {
                prop_assert_eq!(inv.mul(&m), QMatrix::identity(3));
                let x = solve(&m, &qvec(&b)).unwrap();
                prop_assert_eq!(m.mul_vec(&x), qvec(&b));
            }
            None => prop_assert!(rank(&m) < 3),
        }
    }

    /// Sylvester's law of inertia under unipotent congruence.
    #[test]
    fn signature_is_a_congruence_invariant(d in prop::collection::vec(-2i64..=2, 4), p in unipotent(4)) {
        let mut s = QMatrix::zeros(4, 4);
        for (i, x) in d.iter().enumerate() {
            s[(i, i)] = q(*x);
        }
        let t = p.transpose().mul(&s).mul(&p);
        prop_assert_eq!(signature(&t).unwrap(), signature(&s).unwrap());
    }
}

proptest! {
    #![proptest_config(config(24))]

    /// Adding a global linear function does not change strict convexity on a complete fan.
    #[test]
    fn ampleness_ignores_linear_functions(v in prop::collection::vec(-3i64..=3, 3), a in prop::collection::vec(-3i64..=3, 2)) {
        let f = tp2_fan();
        let vals = qvec(&v);
        let shifted: Vec<Q> = f.rays().iter().zip(&vals).map(|(r, x)| x + q(r[0] * a[0] + r[1] * a[1])).collect();
        let s1 = fan_ampleness(&f, &vals).unwrap().strict;
        let s2 = fan_ampleness(&f, &shifted).unwrap().strict;
        prop_assert_eq!(s1, s2);
        // On TP^2 the class is ample exactly when its degree is positive.
        prop_assert_eq!(s1, v.iter().sum::<i64>() > 0);
    }

    /// Ample classes satisfy Hodge-Riemann.
    #[test]
    fn ample_implies_hr(v in prop::collection::vec(-2i64..=3, 6)) {
        let f = bergman_fan(&Matroid::uniform(3, 3)).unwrap();
        let r = ChowRing::build(&f).unwrap();
        let vals = qvec(&v);
        if fan_ampleness(&f, &vals).unwrap().strict {
            prop_assert!(check_hr(&r, &r.ell_class(&vals)).unwrap().hr);
        }
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn poincare_duality_for_uniform_matroids((r, n) in (2usize..=3).prop_flat_map(|r| (Just(r), r..=5))) {
        let ring = ChowRing::build(&bergman_fan(&Matroid::uniform(r, n)).unwrap()).unwrap();
        let d = ring.top_degree();
        prop_assert_eq!(d, r - 1);
        for k in 0..=d {
            let p = ring.poincare_pairing(k).unwrap();
            if 2 * k == d {
                prop_assert!(p.is_symmetric());
            }
            prop_assert_eq!(rank(&p), ring.dim(k));
            prop_assert_eq!(ring.dim(k), ring.dim(d - k));
        }
    }

    /// Keel's decomposition for any cone of a Bergman fan of a rank-3 uniform matroid.
    #[test]
    fn keel_on_every_cone(n in 3usize..=4, pick in 0usize..64) {
        let f = bergman_fan(&Matroid::uniform(3, n)).unwrap();
        let cones: Vec<Vec<usize>> = f.cones().iter().filter(|c| c.len() >= 2).cloned().collect();
        let sigma = &cones[pick % cones.len()];
        let r = ChowRing::build(&f).unwrap();
        let star = ChowRing::build(&f.star_fan(sigma).unwrap()).unwrap();
        let sub = ChowRing::build(&f.star_subdivide(sigma).unwrap()).unwrap();
        let rep = keel_decomposition(&r, sigma, &star, &sub).unwrap();
        prop_assert!(rep.holds);
        prop_assert_eq!(&rep.dims_subdivided, &rep.dims_predicted);
    }

    /// A segment of integer length with two rays is TP^1 however it is cut.
    #[test]
    fn long_edges_triangulate_to_tp1(len in 1i64..=6) {
        let x = PolyComplex::new(1, vec![qvec(&[0]), qvec(&[len])], vec![vec![-1], vec![1]],
            &[Cell::new(vec![0, 1], vec![]), Cell::new(vec![0], vec![0]), Cell::new(vec![1], vec![1])]).unwrap();
        let t = quasiprojective_unimodular_triangulation(&x).unwrap();
        prop_assert!(t.complex.is_unimodular(t.k) && t.certificate.strict);
        prop_assert_eq!(t.complex.maximal_cells().len() as i64, len * t.k as i64 + 2);
        let x = CompactTropicalSpace::compactify(&t.complex).unwrap();
        prop_assert_eq!(x.hodge_numbers(), vec![vec![1, 0], vec![0, 1]]);
        // The Steenbrink complex sees the same cohomology, and the HL checks pass for the
        // certified function of the triangulation.
        let st = SteenbrinkComplex::build(&x).unwrap();
        prop_assert!(st.identities().all());
        prop_assert!(st.comparison_check(&x.hodge_numbers()).equal);
        let kf = st.kahler_from_function(&t.function).unwrap();
        let h = st.hl_structure(&kf).unwrap();
        prop_assert!(h.check_axioms().all());
        prop_assert!(h.laplacian_report().unwrap().all());
    }

    /// Rectangles with the four axis rays compactify to TP^1 x TP^1.
    #[test]
    fn rectangles_give_tp1xtp1(a in 1i64..=2, b in 1i64..=2) {
        let v = vec![qvec(&[0, 0]), qvec(&[a, 0]), qvec(&[0, b]), qvec(&[a, b])];
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
        let x = PolyComplex::new(2, v, r, &cells).unwrap();
        let t = quasiprojective_unimodular_triangulation(&x).unwrap();
        prop_assert!(t.complex.is_simplicial() && t.complex.is_unimodular(t.k) && t.certificate.strict);
        let h = CompactTropicalSpace::compactify(&t.complex).unwrap().hodge_numbers();
        prop_assert_eq!(h, vec![vec![1, 0, 0], vec![0, 2, 0], vec![0, 0, 1]]);
    }
}

/// Direct sum of free orbits of primitive vectors, with psi(x, N1^a N2^b x) = c > 0, then a
/// change of basis inside every block.
fn orbit_structure(types: &[(i64, i64, i64)], basis_change: &[i64]) -> HLStructure {
    // (orbit, r, s, a - 2r, b - 2s)
    let mut vecs = Vec::new();
    for (o, &(a, b, _)) in types.iter().enumerate() {
        for r in 0..=a {
            for s in 0..=b {
                vecs.push((o, r, s, a - 2 * r, b - 2 * s));
            }
        }
    }
    let mut keys: Vec<(i64, i64)> = vecs.iter().map(|v| (v.3, v.4)).collect();
    keys.sort();
    keys.dedup();
    let mut order = Vec::new();
    let mut blocks = Vec::new();
    for k in &keys {
        let members: Vec<usize> = (0..vecs.len()).filter(|&i| (vecs[i].3, vecs[i].4) == *k).collect();
        blocks.push((*k, members.len()));
        order.extend(members);
    }
    let n = vecs.len();
    let pos = |i: usize| order.iter().position(|&j| j == i).unwrap();
    let find = |o: usize, r: i64, s: i64| vecs.iter().position(|v| v.0 == o && v.1 == r && v.2 == s);
    let (mut n1, mut n2, mut psi) = (QMatrix::zeros(n, n), QMatrix::zeros(n, n), QMatrix::zeros(n, n));
    for (i, &(o, r, s, _, _)) in vecs.iter().enumerate() {
        let (a, b, c) = types[o];
        if let Some(j) = find(o, r + 1, s) {
            n1[(pos(j), pos(i))] = q(1);
        }
        if let Some(j) = find(o, r, s + 1) {
            n2[(pos(j), pos(i))] = q(1);
        }
        let j = find(o, a - r, b - s).unwrap();
        psi[(pos(i), pos(j))] = q(if (r + s) % 2 == 0 { c } else { -c });
    }
    // Unipotent change of basis inside each block.
    let mut g = QMatrix::identity(n);
    let mut off = 0;
    let mut t = 0;
    for &(_, len) in &blocks {
        for i in 0..len {
            for j in i + 1..len {
                g[(off + i, off + j)] = q(basis_change[t % basis_change.len()]);
                t += 1;
            }
        }
        off += len;
    }
    let gi = inverse(&g).unwrap();
    let h = HLStructure::new(blocks, g.mul(&n1).mul(&gi), g.mul(&n2).mul(&gi)).unwrap();
    h.with_psi(gi.transpose().mul(&psi).mul(&gi)).unwrap()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn polarized_orbits_pass_every_check(
        types in prop::collection::vec((0i64..=2, 0i64..=2, 1i64..=3), 1..4),
        change in prop::collection::vec(-2i64..=2, 1..8),
    ) {
        let h = orbit_structure(&types, &change);
        let ax = h.check_axioms();
        prop_assert!(ax.all(), "{:?}", ax);
        let dec = h.primitive_decomposition();
        prop_assert!(dec.complete);
        let expected: usize = types.iter().map(|&(a, b, _)| ((a + 1) * (b + 1)) as usize).sum();
        prop_assert_eq!(h.dim(), expected);
        let w = h.w_report().unwrap();
        prop_assert!(w.all(), "{:?}", w);
        let lap = h.with_d(QMatrix::zeros(expected, expected)).unwrap().laplacian_report().unwrap();
        prop_assert!(lap.all());
    }
}
