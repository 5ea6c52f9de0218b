//! Builtin datasets, also shipped as files under `datasets/`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::braided::RSymbolSet;
use crate::builtin;
use crate::cohomology::{coboundary, cyclic_3_cocycle, Cochain, FiniteGroup};
use crate::fusion::{FSymbolSet, Gauge, NatIso};
use crate::io::{Dataset, EquivalenceSection, NatIsoSection};
use crate::linalg;
use crate::module_cats::ModuleData;
use crate::sampling;
use crate::unitarizer::{transport_tensorator, EquivalenceData};

pub const NAMES: &[&str] = &[
    "fibonacci",
    "yang-lee",
    "ising",
    "vec-z2-trivial",
    "vec-z2-semion",
    "vec-z3",
    "fib-braided",
    "ising-braided",
    "fib-gauge",
    "fib-equivalence",
    "ising-braided-equivalence",
    "semion-nat-iso",
    "z2",
    "z3",
    "z2xz2",
    "s3",
    "vec-z2-regular-module",
    "vec-z2-rank1-module",
    "fib-module-equivalence",
];

fn base(name: &str, description: &str, checks: &[&str]) -> Dataset {
    Dataset {
        description: Some(description.into()),
        checks: checks.iter().map(|s| s.to_string()).collect(),
        ..Dataset::new(name)
    }
}

fn with_f(mut ds: Dataset, f: FSymbolSet, r: Option<RSymbolSet>) -> Dataset {
    ds.ring = Some(f.ring().clone());
    ds.f = Some(f);
    ds.r = r;
    ds
}

const FUSION: &[&str] = &["ring", "pentagon", "unitary"];
const BRAIDED: &[&str] = &["ring", "pentagon", "unitary", "hexagon", "braiding-unitary"];

/// Positive normalized cochain with logarithms uniform in `[-1, 1]`.
fn positive_cochain(group: &FiniteGroup, degree: usize, rng: &mut impl Rng) -> Cochain {
    Cochain::from_fn(group, degree, |t| {
        if t.contains(&0) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(rng.random_range(-1.0f64..1.0).exp(), 0.0)
        }
    })
    .expect("degree within range")
}

fn group_dataset(name: &str, description: &str, group: FiniteGroup, cochain: Cochain) -> Dataset {
    let mut ds = base(name, description, &["cocycle"]);
    ds.group = Some(group);
    ds.cochain = Some(cochain);
    ds
}

pub fn example(name: &str) -> Option<Dataset> {
    let ds = match name {
        "fibonacci" => with_f(base(name, "Fibonacci fusion category, unitary gauge.", FUSION), builtin::fibonacci_f(), None),
        "yang-lee" => with_f(
            base(name, "Yang-Lee category: solves the pentagon but admits no unitary gauge.", &["ring", "pentagon"]),
            builtin::yang_lee_f(),
            None,
        ),
        "ising" => with_f(base(name, "Ising fusion category, unitary gauge.", FUSION), builtin::ising_f(), None),
        "vec-z2-trivial" => with_f(base(name, "Vec_Z2 with trivial associator.", FUSION), builtin::vec_z2_trivial_f(), None),
        "vec-z2-semion" => with_f(
            base(name, "Vec_Z2 with the nontrivial 3-cocycle and the semion braiding.", BRAIDED),
            builtin::semion_f(),
            Some(builtin::semion_r()),
        ),
        "vec-z3" => with_f(base(name, "Vec_Z3 with the generating 3-cocycle.", FUSION), builtin::vec_z3_f(), None),
        "fib-braided" => with_f(
            base(name, "Fibonacci with its unitary braiding.", BRAIDED),
            builtin::fibonacci_f(),
            Some(builtin::fibonacci_r()),
        ),
        "ising-braided" => with_f(
            base(name, "Ising with a unitary braiding.", BRAIDED),
            builtin::ising_f(),
            Some(builtin::ising_r()),
        ),
        "fib-gauge" => {
            let f = builtin::fibonacci_f();
            let mut rng = sampling::rng(11);
            let gauge = sampling::random_gauge(f.ring(), 10.0, &mut rng);
            let mu = sampling::random_positive_nat_iso(f.ring(), &mut rng);
            let mut ds = with_f(
                base(name, "Fibonacci with a random gauge and a positive coboundary gauge.", &["ring", "pentagon", "unitary"]),
                f,
                None,
            );
            ds.gauge = Some(gauge);
            ds.positive_gauge = Some(Gauge::coboundary(&mu));
            ds
        }
        "fib-equivalence" => {
            let f = builtin::fibonacci_f();
            let mut rng = sampling::rng(12);
            let e = sampling::round_trip_equivalence(&f, 10.0, &mut rng).ok()?;
            let mut ds = with_f(
                base(name, "A non-unitary monoidal autoequivalence of Fibonacci.", &["pentagon", "unitary", "equivalence"]),
                f,
                None,
            );
            ds.equivalence = Some(EquivalenceSection {
                equivalence: e,
                target_r: None,
            });
            ds
        }
        "ising-braided-equivalence" => {
            let f = builtin::ising_f();
            let r = builtin::ising_r();
            let mut rng = sampling::rng(13);
            let e = sampling::round_trip_equivalence(&f, 10.0, &mut rng).ok()?;
            let target_r = r.apply_gauge(&e.tensorator).ok()?;
            let mut ds = with_f(
                base(name, "A non-unitary braided equivalence out of braided Ising.", &["pentagon", "hexagon", "equivalence"]),
                f,
                Some(r),
            );
            ds.equivalence = Some(EquivalenceSection {
                equivalence: e,
                target_r: Some(target_r),
            });
            ds
        }
        "semion-nat-iso" => {
            let f = builtin::semion_f();
            let mut rng = sampling::rng(14);
            let u = sampling::random_unitary_gauge(f.ring(), &mut rng);
            let e = EquivalenceData::from_gauge(&f, &u).ok()?;
            let eta = NatIso::new(f.ring().clone(), vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]).ok()?;
            let t2 = transport_tensorator(&eta, &e.tensorator).ok()?;
            let mut ds = with_f(
                base(
                    name,
                    "The grading character of Z2 as a monoidal natural isomorphism between unitary equivalences.",
                    &["equivalence", "nat-iso"],
                ),
                f,
                None,
            );
            ds.equivalence = Some(EquivalenceSection {
                equivalence: e,
                target_r: None,
            });
            ds.nat_iso = Some(NatIsoSection {
                eta,
                target_tensorator: Some(t2),
            });
            ds
        }
        "z2" => {
            let g = FiniteGroup::cyclic(2);
            let eta = Cochain::new(g.clone(), 1, vec![Complex64::new(1.0, 0.0), Complex64::new(7.0, 0.0)]).ok()?;
            group_dataset(name, "A positive 2-coboundary on Z2.", g, coboundary(&eta).ok()?)
        }
        "z3" => {
            let g = FiniteGroup::cyclic(3);
            let mut rng = sampling::rng(15);
            let eta = positive_cochain(&g, 2, &mut rng);
            let omega = cyclic_3_cocycle(3, 1).mul(&coboundary(&eta).ok()?).ok()?;
            group_dataset(name, "The generating 3-cocycle of Z3 times a positive coboundary.", g, omega)
        }
        "z2xz2" => {
            let g = FiniteGroup::klein_four();
            let mut rng = sampling::rng(16);
            let eta = positive_cochain(&g, 1, &mut rng);
            group_dataset(name, "A positive 2-coboundary on Z2 x Z2.", g, coboundary(&eta).ok()?)
        }
        "s3" => {
            let g = FiniteGroup::symmetric3();
            let mut rng = sampling::rng(17);
            let eta = positive_cochain(&g, 2, &mut rng);
            group_dataset(name, "A positive 3-coboundary on S3.", g, coboundary(&eta).ok()?)
        }
        "vec-z2-regular-module" => {
            let f = builtin::vec_z2_trivial_f();
            let mut ds = with_f(
                base(name, "Vec_Z2 acting on itself.", &["pentagon", "module-pentagon", "module-unitary"]),
                f.clone(),
                None,
            );
            ds.module = Some(ModuleData::regular(&f));
            ds
        }
        "vec-z2-rank1-module" => {
            let f = builtin::vec_z2_trivial_f();
            let one = linalg::identity(1);
            let m = ModuleData::new(
                f.ring().clone(),
                vec!["m".into()],
                &[(0, 0, 0, 1), (1, 0, 0, 1)],
                f.tol(),
                BTreeMap::from([((1, 1, 0, 0), one)]),
            )
            .ok()?;
            let mut ds = with_f(
                base(name, "Vec_Z2 acting on Vec through the trivial fiber functor.", &["pentagon", "module-pentagon", "module-unitary"]),
                f,
                None,
            );
            ds.module = Some(m);
            ds
        }
        "fib-module-equivalence" => {
            let f = builtin::fibonacci_f();
            let m = ModuleData::regular(&f);
            let mut rng = sampling::rng(18);
            let e = sampling::module_round_trip(&m, 10.0, &mut rng).ok()?;
            let mut ds = with_f(
                base(
                    name,
                    "A non-unitary module equivalence of the regular Fibonacci module.",
                    &["module-pentagon", "module-unitary", "module-equivalence"],
                ),
                f,
                None,
            );
            ds.module = Some(m);
            ds.module_equivalence = Some(e);
            ds
        }
        _ => return None,
    };
    Some(ds)
}

/// Every builtin dataset, in [`NAMES`] order.
pub fn all() -> Vec<Dataset> {
    NAMES
        .iter()
        .map(|n| example(n).expect("builtin datasets are well formed"))
        .collect()
}
