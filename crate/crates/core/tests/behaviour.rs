use std::collections::BTreeMap;

use num_complex::Complex64 as C;
use unitarize::braided::{factorize_braided_equivalence, verify_braiding_unitary};
use unitarize::builtin;
use unitarize::cohomology::{
    build_vecg_category, coboundary, cyclic_3_cocycle, polar_split_cocycle, trivialize_positive_cocycle, unitarize_cocycle, Cochain,
    FiniteGroup,
};
use unitarize::fusion::{
    apply_gauge, fp_dimensions, positive_character_space, verify_pentagon, verify_unitary, FSymbolSet, FusionRing, Gauge, NatIso,
};
use unitarize::linalg::{self, c, CMatrix};
use unitarize::module_cats::{
    apply_module_gauge, factorize_module_equivalence, module_nat_iso_residual, trivialize_positive_module,
    unitarize_module_equivalence, ModuleData, ModuleEquivalenceData, ModuleGauge,
};
use unitarize::polar::{hermitian_sqrt, polar_decompose_gauge, polar_decompose_matrix, positive_nth_root, transport_check};
use unitarize::sampling;
use unitarize::unitarizer::{
    factorize_equivalence, search_unitary_gauge, trivialize_positive_monoidal, unitarize_equivalence, unitarize_nat_iso,
    verify_equivalence, EquivalenceData,
};
use unitarize::Error;

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_fn(v.len(), v.len(), |i, j| if i == j { c(v[i], 0.0) } else { c(0.0, 0.0) })
}

fn builtin_fs() -> Vec<FSymbolSet> {
    vec![
        builtin::vec_z2_trivial_f(),
        builtin::semion_f(),
        builtin::vec_z3_f(),
        builtin::fibonacci_f(),
        builtin::yang_lee_f(),
        builtin::ising_f(),
    ]
}

// Fusion data.

#[test]
fn scalar_gauge_on_vec_z2_cancels() {
    // F'^{ggg}_g = g^{gg}_1 g^{1g}_g / (g^{gg}_1 g^{g1}_g) = 2·1/(2·1).
    let f = builtin::vec_z2_trivial_f();
    let g = Gauge::new(f.ring().clone(), BTreeMap::from([((1, 1, 0), linalg::scalar(c(2.0, 0.0)))])).unwrap();
    let gf = apply_gauge(&f, &g).unwrap();
    assert!((gf.block(1, 1, 1, 1).unwrap()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    assert!(verify_pentagon(&gf).unwrap().pass);
}

#[test]
fn random_gauge_keeps_pentagon_but_breaks_unitarity() {
    let f = builtin::fibonacci_f();
    let mut rng = sampling::rng(1);
    let g = sampling::random_gauge(f.ring(), 10.0, &mut rng);
    let gf = apply_gauge(&f, &g).unwrap();
    assert!(verify_pentagon(&gf).unwrap().pass);
    assert!(!verify_unitary(&gf).pass);
}

#[test]
fn gauge_group_laws() {
    let ring = FusionRing::ising();
    let id = Gauge::identity(&ring);
    assert_eq!(id.inverse().unwrap().distance(&id), 0.0);
    let mut rng = sampling::rng(2);
    let g = sampling::random_gauge(&ring, 10.0, &mut rng);
    assert_eq!(g.adjoint().adjoint().distance(&g), 0.0);
    assert!(g.compose(&g.inverse().unwrap()).unwrap().distance(&id) < 1e-10);
}

#[test]
fn builtin_rings_have_no_positive_characters() {
    for f in builtin_fs() {
        assert_eq!(positive_character_space(f.ring()).dimension, 0, "{}", f.ring());
    }
    for g in [FiniteGroup::klein_four(), FiniteGroup::symmetric3()] {
        assert_eq!(positive_character_space(&g.fusion_ring()).dimension, 0);
    }
    assert_eq!(fp_dimensions(builtin::vec_z2_trivial_f().ring()), vec![1.0, 1.0]);
}

// Polar decomposition.

#[test]
fn polar_trivial_cases() {
    assert!(linalg::rel_diff(&hermitian_sqrt(&diag(&[4.0, 9.0]), 1e-12).unwrap(), &diag(&[2.0, 3.0])) < 1e-15);
    assert!(linalg::rel_diff(&positive_nth_root(&diag(&[16.0]), 4, 1e-12).unwrap(), &diag(&[2.0])) < 1e-15);
    assert!(linalg::rel_diff(&hermitian_sqrt(&linalg::identity(3), 1e-12).unwrap(), &linalg::identity(3)) < 1e-15);

    let mut rng = sampling::rng(3);
    let u = sampling::random_unitary(3, &mut rng);
    let mp = polar_decompose_matrix(&u).unwrap();
    assert!(linalg::rel_diff(&mp.unitary, &u) < 1e-12);
    assert!(linalg::rel_diff(&mp.positive, &linalg::identity(3)) < 1e-12);

    let mp = polar_decompose_matrix(&diag(&[2.0, 3.0])).unwrap();
    assert!(linalg::rel_diff(&mp.unitary, &linalg::identity(2)) < 1e-14);
    assert!(linalg::rel_diff(&mp.positive, &diag(&[2.0, 3.0])) < 1e-14);
}

#[test]
fn polar_reconstruction_on_random_input() {
    let mut rng = sampling::rng(4);
    let g = sampling::random_invertible(3, 10.0, &mut rng);
    let p = g.adjoint() * &g;
    let s = hermitian_sqrt(&p, 1e-12).unwrap();
    assert!(linalg::rel_diff(&(&s * &s), &p) <= 1e-10);

    let p2 = sampling::random_positive(2, 10.0, &mut rng);
    let r = positive_nth_root(&p2, 3, 1e-12).unwrap();
    assert!(linalg::rel_diff(&(&r * &r * &r), &p2) <= 1e-10);

    let a = sampling::random_invertible(4, 10.0, &mut rng);
    assert!(polar_decompose_matrix(&a).unwrap().residual <= 1e-10);
}

#[test]
fn gauge_polar_cases() {
    let ring = FusionRing::fibonacci();
    let id = Gauge::identity(&ring);
    let pp = polar_decompose_gauge(&id).unwrap();
    assert!(pp.unitary_part.distance(&id) < 1e-15 && pp.positive_part.distance(&id) < 1e-15);

    let mut rng = sampling::rng(5);
    let mu = sampling::random_positive_nat_iso(&ring, &mut rng);
    let p = Gauge::coboundary(&mu);
    let pp = polar_decompose_gauge(&p).unwrap();
    assert!(pp.unitary_part.distance(&id) < 1e-14);
    assert!(pp.positive_part.distance(&p) < 1e-14);

    let g = sampling::random_gauge(&ring, 10.0, &mut rng);
    assert!(polar_decompose_gauge(&g).unwrap().residual <= 1e-10);
}

#[test]
fn transport_trivial_cases() {
    let mut rng = sampling::rng(6);
    let x = sampling::random_unitary(3, &mut rng);
    let v = sampling::random_unitary(3, &mut rng);
    let w = sampling::random_unitary(3, &mut rng);
    let y = w.adjoint() * &x * &v;
    assert!(transport_check(&x, &y, &v, &w, 1e-10).unwrap().pass);

    let x = diag(&[2.0, 3.0]);
    let i = linalg::identity(2);
    assert!(transport_check(&x, &x, &i, &i, 1e-10).unwrap().pass);

    // Without xv = wy the check refuses to run.
    let y = diag(&[3.0, 2.0]);
    assert!(matches!(transport_check(&x, &y, &i, &i, 1e-10), Err(Error::Precondition(_))));
}

// Monoidal equivalences.

#[test]
fn positive_coboundary_tensorators_are_coherent() {
    let f = builtin::fibonacci_f();
    let mut rng = sampling::rng(7);
    let mu = sampling::random_positive_nat_iso(f.ring(), &mut rng);
    let e = EquivalenceData::new(f.clone(), f.clone(), vec![0, 1], Gauge::coboundary(&mu)).unwrap();
    assert!(verify_equivalence(&e).unwrap().pass);
}

#[test]
fn factorization_trivial_cases() {
    let f = builtin::ising_f();
    let mut rng = sampling::rng(8);
    let u = sampling::random_unitary_gauge(f.ring(), &mut rng);
    let e = EquivalenceData::from_gauge(&f, &u).unwrap();
    let fact = factorize_equivalence(&e).unwrap();
    assert!(fact.positive_part.distance(&Gauge::identity(f.ring())) < 1e-12);

    let mu = sampling::random_positive_nat_iso(f.ring(), &mut rng);
    let p = Gauge::coboundary(&mu);
    let e = EquivalenceData::new(f.clone(), f.clone(), vec![0, 1, 2], p.clone()).unwrap();
    let fact = factorize_equivalence(&e).unwrap();
    assert!(fact.positive_part.distance(&p) < 1e-12);
    assert!(fact.unitary_equivalence.tensorator.distance(&Gauge::identity(f.ring())) < 1e-12);
}

#[test]
fn fibonacci_random_round_trip_certificates() {
    let f = builtin::fibonacci_f();
    let mut rng = sampling::rng(9);
    let e = sampling::round_trip_equivalence(&f, 10.0, &mut rng).unwrap();
    let c = factorize_equivalence(&e).unwrap().certificates;
    assert!(c.unitary_coherence.residual <= 1e-8);
    assert!(c.positive_coherence.residual <= 1e-8);
}

#[test]
fn arbitrary_gauges_have_non_unitary_targets() {
    // apply_gauge(F, g) with a non-unitary g is a different, non-unitary
    // presentation; the factorization has no unitary factor to land on.
    let f = builtin::fibonacci_f();
    let mut rng = sampling::rng(10);
    let g = sampling::random_gauge(f.ring(), 10.0, &mut rng);
    let e = EquivalenceData::from_gauge(&f, &g).unwrap();
    assert!(verify_equivalence(&e).unwrap().pass);
    assert!(matches!(factorize_equivalence(&e), Err(Error::Decomposition(_))));
}

#[test]
fn trivializer_cases() {
    let f = builtin::fibonacci_f();
    let t = trivialize_positive_monoidal(&Gauge::identity(f.ring()), &f).unwrap();
    assert!(t.mu.components().iter().all(|z| (z - c(1.0, 0.0)).norm() < 1e-15));

    // A positive but non-scalar block cannot come from a coboundary.
    let ring = FusionRing::from_entries(
        vec!["1".into(), "tau".into()],
        vec![0, 1],
        &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 2)],
    )
    .unwrap();
    let f2 = FSymbolSet::trivial(&ring, 1e-9).unwrap();
    let p = Gauge::new(ring, BTreeMap::from([((1, 1, 1), diag(&[1.0, 2.0]))])).unwrap();
    assert!(matches!(trivialize_positive_monoidal(&p, &f2), Err(Error::Inconsistent(_))));
}

#[test]
fn trivializer_ignores_equation_order() {
    // The solve is over the whole block set; relabelling the vertices by a
    // ring automorphism permutes the equations.
    let f = builtin::vec_z3_f();
    let mu = NatIso::new(f.ring().clone(), vec![c(1.0, 0.0), c(2.5, 0.0), c(0.3, 0.0)]).unwrap();
    let p = Gauge::coboundary(&mu);
    let a = trivialize_positive_monoidal(&p, &f).unwrap().mu;
    let swap = [0, 2, 1];
    let fs = f.relabel(&swap, f.ring());
    let ps = Gauge::from_fn(f.ring(), |x, y, z, _| p.block(swap[x], swap[y], swap[z]).unwrap().clone());
    let b = trivialize_positive_monoidal(&ps, &fs).unwrap().mu;
    for (i, &s) in swap.iter().enumerate() {
        assert!((a.components()[s] - b.components()[i]).norm() < 1e-12);
    }
}

#[test]
fn unitarize_cases() {
    let f = builtin::fibonacci_f();
    let u = unitarize_equivalence(&EquivalenceData::identity(&f)).unwrap();
    assert!(u.equivalence.tensorator.distance(&Gauge::identity(f.ring())) < 1e-14);

    let mut rng = sampling::rng(11);
    let mu = sampling::random_positive_nat_iso(f.ring(), &mut rng);
    let e = EquivalenceData::new(f.clone(), f.clone(), vec![0, 1], Gauge::coboundary(&mu)).unwrap();
    let u = unitarize_equivalence(&e).unwrap();
    assert!(u.equivalence.tensorator.distance(&Gauge::identity(f.ring())) <= 1e-8);

    let s = builtin::semion_f();
    let e = sampling::round_trip_equivalence(&s, 10.0, &mut rng).unwrap();
    let u = unitarize_equivalence(&e).unwrap();
    assert!(u.unitarity.pass && u.coherence.pass);
}

#[test]
fn nat_iso_cases() {
    let f = builtin::semion_f();
    let e = EquivalenceData::identity(&f);
    let ones = NatIso::ones(f.ring());
    let n = unitarize_nat_iso(&ones, &e, &e).unwrap();
    assert_eq!(n.certificate, 0.0);

    let grading = NatIso::new(f.ring().clone(), vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
    let n = unitarize_nat_iso(&grading, &e, &e).unwrap();
    assert_eq!(n.unitary, grading);
    assert!(n.certificate <= 1e-9);
}

#[test]
fn gauge_search_recovers_positive_gauges() {
    let f = builtin::fibonacci_f().with_tol(1e-9);
    let mut rng = sampling::rng(12);
    let p = polar_decompose_gauge(&sampling::random_gauge(f.ring(), 10.0, &mut rng)).unwrap().positive_part;
    let gf = apply_gauge(&f, &p).unwrap();
    assert!(!verify_unitary(&gf).pass);
    let s = search_unitary_gauge(&gf, 200, 1);
    assert!(s.residual <= 1e-6, "{}", s.residual);
    assert!(verify_unitary(&apply_gauge(&gf, &s.gauge).unwrap()).residual <= 1e-6);
}

// Braided data.

#[test]
fn braided_factorization_cases() {
    let f = builtin::fibonacci_f();
    let r = builtin::fibonacci_r();
    assert!(verify_braiding_unitary(&f, &r).unwrap().pass);

    let bf = factorize_braided_equivalence(&EquivalenceData::identity(&f), &r, &r).unwrap();
    assert_eq!(bf.commutation.residual, 0.0);

    let s = builtin::semion_f();
    let sr = builtin::semion_r();
    let mut rng = sampling::rng(13);
    let mu = sampling::random_positive_nat_iso(s.ring(), &mut rng);
    let e = EquivalenceData::new(s.clone(), s.clone(), vec![0, 1], Gauge::coboundary(&mu)).unwrap();
    let target_r = sr.apply_gauge(&e.tensorator).unwrap();
    let bf = factorize_braided_equivalence(&e, &sr, &target_r).unwrap();
    assert!(bf.commutation.residual < 1e-15);

    let e = sampling::round_trip_equivalence(&f, 10.0, &mut rng).unwrap();
    let target_r = r.apply_gauge(&e.tensorator).unwrap();
    let bf = factorize_braided_equivalence(&e, &r, &target_r).unwrap();
    assert!(bf.commutation.residual <= 1e-8 && bf.unitary_braided.residual <= 1e-8);
}

#[test]
fn non_braided_tensorator_is_rejected() {
    // Fibonacci R-symbols are gauge invariant, Ising ones are not.
    let f = builtin::ising_f();
    let r = builtin::ising_r();
    let mut rng = sampling::rng(14);
    let e = sampling::round_trip_equivalence(&f, 10.0, &mut rng).unwrap();
    // Pairing R with itself ignores how the tensorator moves it.
    assert!(matches!(factorize_braided_equivalence(&e, &r, &r), Err(Error::Precondition(_))));
}

// Module categories.

fn z2_regular() -> ModuleData {
    ModuleData::regular(&builtin::vec_z2_trivial_f())
}

#[test]
fn module_factorization_cases() {
    let m = z2_regular();
    let fact = factorize_module_equivalence(&ModuleEquivalenceData::identity(&m)).unwrap();
    assert!(fact.positive_part.distance(&ModuleGauge::identity(&m)) < 1e-15);

    let p = ModuleGauge::coboundary(&m, &[c(1.0, 0.0), c(3.0, 0.0)]);
    let e = ModuleEquivalenceData::new(m.clone(), m.clone(), vec![0, 1], p.clone()).unwrap();
    let fact = factorize_module_equivalence(&e).unwrap();
    assert!(fact.positive_part.distance(&p) < 1e-14);
    assert!(fact.unitary_equivalence.tensorator.distance(&ModuleGauge::identity(&m)) < 1e-14);

    let mut rng = sampling::rng(15);
    let e = sampling::module_round_trip(&m, 10.0, &mut rng).unwrap();
    let fact = factorize_module_equivalence(&e).unwrap();
    assert!(fact.unitary_coherence.residual <= 1e-8 && fact.positive_coherence.residual <= 1e-8);
}

#[test]
fn module_trivializer_and_unitarize_cases() {
    let m = z2_regular();
    let t = trivialize_positive_module(&ModuleGauge::identity(&m), &m).unwrap();
    assert!(t.mu.iter().all(|x| (x - 1.0).abs() < 1e-15));

    let u = unitarize_module_equivalence(&ModuleEquivalenceData::identity(&m)).unwrap();
    assert!(u.equivalence.tensorator.distance(&ModuleGauge::identity(&m)) < 1e-14);

    let p = ModuleGauge::coboundary(&m, &[c(1.0, 0.0), c(0.4, 0.0)]);
    let e = ModuleEquivalenceData::new(m.clone(), m.clone(), vec![0, 1], p).unwrap();
    let u = unitarize_module_equivalence(&e).unwrap();
    assert!(u.equivalence.tensorator.distance(&ModuleGauge::identity(&m)) <= 1e-8);

    let mut rng = sampling::rng(16);
    let w = ModuleGauge::from_fn(&m, |_, _, _, n| sampling::random_unitary(n, &mut rng));
    let target = apply_module_gauge(&m, &w).unwrap();
    let raw = sampling::random_module_gauge(&m, 10.0, &mut rng);
    let e = ModuleEquivalenceData::new(m.clone(), target.clone(), vec![0, 1], raw.compose(&w));
    // A random gauge composed with a unitary tensorator is generally not
    // coherent; when it is, the output must be unitary.
    if let Ok(e) = e {
        if let Ok(u) = unitarize_module_equivalence(&e) {
            assert!(u.unitarity.pass);
        }
    }
    let e = sampling::module_round_trip(&m, 10.0, &mut rng).unwrap();
    assert!(unitarize_module_equivalence(&e).unwrap().unitarity.pass);
}

#[test]
fn positive_module_nat_isos_need_not_be_trivial() {
    // Vec acting on Vec ⊕ Vec: η = (1, 5) is a positive module natural
    // isomorphism of the identity module functor that is not 1. Nothing
    // here tries to trivialize it; trivialization applies to module
    // structures, not to natural isomorphisms between module functors.
    let ring = FusionRing::trivial();
    let m = ModuleData::new(ring, vec!["m".into(), "n".into()], &[(0, 0, 0, 1), (0, 1, 1, 1)], 1e-9, BTreeMap::new()).unwrap();
    let id = ModuleGauge::identity(&m);
    let eta = [c(1.0, 0.0), c(5.0, 0.0)];
    assert!(module_nat_iso_residual(&eta, &id, &id, 1e-9).pass);
}

// Group cohomology.

fn semion_cochain() -> Cochain {
    cyclic_3_cocycle(2, 1)
}

#[test]
fn polar_split_cases() {
    let w = semion_cochain();
    let (u, r) = polar_split_cocycle(&w, 1e-9).unwrap();
    assert_eq!(u, w);
    assert!(r.distance_from_trivial() < 1e-15);

    let g = FiniteGroup::cyclic(3);
    let eta = Cochain::from_fn(&g, 2, |t| if t.contains(&0) { c(1.0, 0.0) } else { c(1.0 + (t[0] + 2 * t[1]) as f64, 0.0) }).unwrap();
    let d = coboundary(&eta).unwrap();
    let (u, r) = polar_split_cocycle(&d, 1e-9).unwrap();
    assert!(u.distance_from_trivial() < 1e-15);
    assert!(r.div(&d).unwrap().distance_from_trivial() < 1e-15);

    let w3 = cyclic_3_cocycle(3, 1);
    let (u, r) = polar_split_cocycle(&w3.mul(&d).unwrap(), 1e-9).unwrap();
    assert!(u.div(&w3).unwrap().distance_from_trivial() < 1e-12);
    assert!(r.div(&d).unwrap().distance_from_trivial() < 1e-12);
}

#[test]
fn cocycle_trivializer_and_unitarize_cases() {
    let g = FiniteGroup::cyclic(2);
    let t = trivialize_positive_cocycle(&Cochain::trivial(&g, 2).unwrap(), 1e-9).unwrap();
    assert!(t.eta.distance_from_trivial() < 1e-15);

    let w = semion_cochain();
    let u = unitarize_cocycle(&w, 1e-9).unwrap();
    assert_eq!(u.unitary, w);
    assert!(u.certificate < 1e-15);

    let g3 = FiniteGroup::cyclic(3);
    let mut rng = sampling::rng(17);
    let beta = Cochain::from_fn(&g3, 2, |t| {
        if t.contains(&0) { c(1.0, 0.0) } else { c(rand::Rng::random_range(&mut rng, -1.0f64..1.0).exp(), 0.0) }
    })
    .unwrap();
    let w3 = cyclic_3_cocycle(3, 1);
    let u = unitarize_cocycle(&w3.mul(&coboundary(&beta).unwrap()).unwrap(), 1e-9).unwrap();
    assert!(u.certificate <= 1e-10);
    assert!(u.unitary.div(&w3).unwrap().distance_from_trivial() < 1e-12);

    let bad = Cochain::from_fn(&g, 3, |t| if t == [1, 1, 1] { C::new(0.0, 1.0) } else { c(1.0, 0.0) }).unwrap();
    assert!(matches!(unitarize_cocycle(&bad, 1e-9), Err(Error::Precondition(_))));
}

#[test]
fn vecg_cases() {
    let g = FiniteGroup::cyclic(2);
    let (_, f) = build_vecg_category(&g, &Cochain::trivial(&g, 3).unwrap(), 1e-9).unwrap();
    assert!(f.blocks().all(|(_, m)| (m[(0, 0)] - c(1.0, 0.0)).norm() == 0.0));
    let (_, f) = build_vecg_category(&g, &semion_cochain(), 1e-9).unwrap();
    for (&k, m) in f.blocks() {
        let want = if k == (1, 1, 1, 1) { -1.0 } else { 1.0 };
        assert!((m[(0, 0)] - c(want, 0.0)).norm() < 1e-15, "{k:?}");
    }

    // Positively rescaled Z3 cocycle: still a pentagon solution, no longer
    // unitary, and gauge search brings it back.
    let g3 = FiniteGroup::cyclic(3);
    let beta = Cochain::from_fn(&g3, 2, |t| if t.contains(&0) { c(1.0, 0.0) } else { c(1.0 + t[0] as f64 * 0.7 + t[1] as f64 * 0.2, 0.0) }).unwrap();
    let w = cyclic_3_cocycle(3, 1).mul(&coboundary(&beta).unwrap()).unwrap();
    let (_, f) = build_vecg_category(&g3, &w, 1e-9).unwrap();
    assert!(verify_pentagon(&f).unwrap().pass);
    assert!(!verify_unitary(&f).pass);
    let s = search_unitary_gauge(&f.with_tol(1e-12), 500, 0);
    assert!(s.residual <= 1e-10, "{}", s.residual);
}
