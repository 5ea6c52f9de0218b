//! Seeded random test data: matrices of bounded condition number, gauges,
//! and round-trip equivalences.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fusion::{apply_gauge, FSymbolSet, FusionRing, Gauge, NatIso};
use crate::linalg::{self, CMatrix};
use crate::module_cats::{apply_module_gauge, ModuleData, ModuleEquivalenceData, ModuleGauge};
use crate::polar::{self, polar_decompose_gauge};
use crate::unitarizer::EquivalenceData;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(n: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of
/// `diag(R)` fixed.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> CMatrix {
    let qr = gaussian_matrix(n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            out[(i, j)] *= phase;
        }
    }
    out
}

/// `U₁ · diag(s) · U₂` with singular values in `[1, max_cond]`, one of them
/// pinned to each end when `n ≥ 2`.
pub fn random_invertible(n: usize, max_cond: f64, rng: &mut impl Rng) -> CMatrix {
    let mut s: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=max_cond)).collect();
    if n >= 2 {
        s[0] = 1.0;
        s[n - 1] = max_cond;
    }
    let scale = rng.random_range(0.5..2.0);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, s.iter().map(|&v| Complex64::new(v * scale, 0.0))));
    random_unitary(n, rng) * d * random_unitary(n, rng)
}

/// Positive definite with eigenvalues in `[1, max_cond]` up to a global scale.
pub fn random_positive(n: usize, max_cond: f64, rng: &mut impl Rng) -> CMatrix {
    let u = random_unitary(n, rng);
    let scale = rng.random_range(0.5..2.0);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        (0..n).map(|_| Complex64::new(scale * rng.random_range(1.0..=max_cond), 0.0)),
    ));
    &u * d * u.adjoint()
}

/// Every non-unit block independently random with condition at most `max_cond`.
pub fn random_gauge(ring: &FusionRing, max_cond: f64, rng: &mut impl Rng) -> Gauge {
    Gauge::from_fn(ring, |_, _, _, n| random_invertible(n, max_cond, rng))
}

pub fn random_unitary_gauge(ring: &FusionRing, rng: &mut impl Rng) -> Gauge {
    Gauge::from_fn(ring, |_, _, _, n| random_unitary(n, rng))
}

/// Positive components `exp(U(-1, 1))` with the unit component 1.
pub fn random_positive_nat_iso(ring: &FusionRing, rng: &mut impl Rng) -> NatIso {
    let comps = (0..ring.rank())
        .map(|a| if a == 0 { 1.0 } else { rng.random_range(-1.0f64..1.0).exp() })
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    NatIso::new(ring.clone(), comps).expect("positive components")
}

/// Unit-modulus components with the unit component 1.
pub fn random_phase_nat_iso(ring: &FusionRing, rng: &mut impl Rng) -> NatIso {
    let comps = (0..ring.rank())
        .map(|a| if a == 0 { Complex64::new(1.0, 0.0) } else { Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)) })
        .collect();
    NatIso::new(ring.clone(), comps).expect("unit-modulus components")
}

/// A seeded monoidal equivalence between unitary presentations of `f`:
/// `t = coboundary(μ) · u` where `u` is the unitary part of a random gauge
/// of condition at most `max_cond` and `μ` is a random positive family. The
/// target is `apply_gauge(f, u)`, which the coboundary factor leaves fixed.
pub fn round_trip_equivalence(f: &FSymbolSet, max_cond: f64, rng: &mut impl Rng) -> Result<EquivalenceData> {
    let ring = f.ring();
    let raw = random_gauge(ring, max_cond, rng);
    let u = polar_decompose_gauge(&raw)?.unitary_part;
    let mu = random_positive_nat_iso(ring, rng);
    let t = Gauge::coboundary(&mu).compose(&u)?;
    let target = apply_gauge(f, &u)?;
    EquivalenceData::new(f.clone(), target, (0..ring.rank()).collect(), t)
}

/// Condition number of the worst block.
pub fn max_condition(g: &Gauge) -> f64 {
    g.blocks().map(|(_, m)| linalg::condition_number(m)).fold(1.0, f64::max)
}

pub fn random_module_gauge(m: &ModuleData, max_cond: f64, rng: &mut impl Rng) -> ModuleGauge {
    ModuleGauge::from_fn(m, |_, _, _, n| random_invertible(n, max_cond, rng))
}

/// Module analogue of [`round_trip_equivalence`]: `t = coboundary(μ) · u`
/// with `u` the unitary part of a random module gauge, target gauged by `u`.
pub fn module_round_trip(m: &ModuleData, max_cond: f64, rng: &mut impl Rng) -> Result<ModuleEquivalenceData> {
    let raw = random_module_gauge(m, max_cond, rng);
    let u = ModuleGauge::from_fn(m, |a, x, y, _| {
        polar::polar_decompose_matrix(raw.block(a, x, y).expect("same vertices")).expect("invertible").unitary
    });
    let mu: Vec<Complex64> = (0..m.rank())
        .map(|i| Complex64::new(if i == 0 { 1.0 } else { rng.random_range(-1.0f64..1.0).exp() }, 0.0))
        .collect();
    let t = ModuleGauge::coboundary(m, &mu).compose(&u);
    let target = apply_module_gauge(m, &u)?;
    ModuleEquivalenceData::new(m.clone(), target, (0..m.rank()).collect(), t)
}
