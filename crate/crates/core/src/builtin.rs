//! The shipped example library.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::braided::RSymbolSet;
use crate::fusion::{FSymbolSet, FusionRing, Quad, DEFAULT_TOL};
use crate::fusion::basis::ActionTable;
use crate::linalg::{c, CMatrix};

pub fn phi() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

/// All non-unit blocks default to the identity; `overrides` replaces some.
fn with_overrides(ring: FusionRing, overrides: Vec<(Quad, CMatrix)>) -> FSymbolSet {
    let mut blocks = BTreeMap::new();
    for q in ActionTable::regular(&ring).admissible() {
        let n = ActionTable::regular(&ring).basis(q.0, q.1, q.2, q.3).rows;
        blocks.insert(q, CMatrix::identity(n, n));
    }
    for (q, m) in overrides {
        blocks.insert(q, m);
    }
    FSymbolSet::new(ring, DEFAULT_TOL, blocks).expect("static data")
}

fn m2(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, cc, d])
}

fn s(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

pub fn z_n_ring(n: usize) -> FusionRing {
    let table: Vec<Vec<usize>> = (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect();
    FusionRing::from_cayley_table((0..n).map(|g| g.to_string()).collect(), &table).expect("static data")
}

pub fn vec_z2_trivial_f() -> FSymbolSet {
    with_overrides(z_n_ring(2), vec![])
}

/// `Vec_{Z/2}` twisted by the nontrivial 3-cocycle: `F(g,g,g;g) = −1`.
pub fn semion_f() -> FSymbolSet {
    with_overrides(z_n_ring(2), vec![((1, 1, 1, 1), s(c(-1.0, 0.0)))])
}

pub fn vec_z3_f() -> FSymbolSet {
    with_overrides(z_n_ring(3), vec![])
}

pub fn fibonacci_f() -> FSymbolSet {
    let p = phi();
    let (a, b) = (1.0 / p, 1.0 / p.sqrt());
    with_overrides(
        FusionRing::fibonacci(),
        vec![((1, 1, 1, 1), m2(c(a, 0.0), c(b, 0.0), c(b, 0.0), c(-a, 0.0)))],
    )
}

/// The Galois conjugate of Fibonacci: no gauge makes it unitary.
pub fn yang_lee_f() -> FSymbolSet {
    let p = phi();
    let q = p.sqrt();
    with_overrides(
        FusionRing::fibonacci(),
        vec![((1, 1, 1, 1), m2(c(-p, 0.0), c(0.0, q), c(0.0, q), c(p, 0.0)))],
    )
}

pub fn ising_f() -> FSymbolSet {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (sg, ps) = (1, 2);
    with_overrides(
        FusionRing::ising(),
        vec![
            ((sg, sg, sg, sg), m2(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0))),
            ((sg, ps, sg, ps), s(c(-1.0, 0.0))),
            ((ps, sg, ps, sg), s(c(-1.0, 0.0))),
        ],
    )
}

fn r_set(ring: FusionRing, entries: Vec<((usize, usize, usize), Complex64)>) -> RSymbolSet {
    let blocks = entries.into_iter().map(|(k, z)| (k, s(z))).collect();
    RSymbolSet::new(ring, blocks).expect("static data")
}

pub fn vec_z2_symmetric_r() -> RSymbolSet {
    r_set(z_n_ring(2), vec![((1, 1, 0), c(1.0, 0.0))])
}

/// `R(g,g;0) = i`, braiding the semion associator.
pub fn semion_r() -> RSymbolSet {
    r_set(z_n_ring(2), vec![((1, 1, 0), c(0.0, 1.0))])
}

pub fn fibonacci_r() -> RSymbolSet {
    let pi = std::f64::consts::PI;
    r_set(
        FusionRing::fibonacci(),
        vec![
            ((1, 1, 0), Complex64::from_polar(1.0, -4.0 * pi / 5.0)),
            ((1, 1, 1), Complex64::from_polar(1.0, 3.0 * pi / 5.0)),
        ],
    )
}

pub fn ising_r() -> RSymbolSet {
    let pi = std::f64::consts::PI;
    let (sg, ps) = (1, 2);
    r_set(
        FusionRing::ising(),
        vec![
            ((sg, sg, 0), Complex64::from_polar(1.0, -pi / 8.0)),
            ((sg, sg, ps), Complex64::from_polar(1.0, 3.0 * pi / 8.0)),
            ((sg, ps, sg), c(0.0, -1.0)),
            ((ps, sg, sg), c(0.0, -1.0)),
            ((ps, ps, 0), c(-1.0, 0.0)),
        ],
    )
}
