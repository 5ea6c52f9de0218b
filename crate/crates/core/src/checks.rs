//! Named checks that can be run against a [`Dataset`].

use serde::Serialize;

use crate::braided::{verify_braiding_unitary, verify_hexagon};
use crate::cohomology::verify_cocycle;
use crate::error::{Error, Result};
use crate::fusion::{verify_pentagon, verify_ring_axioms, verify_unitary, Gauge};
use crate::io::Dataset;
use crate::module_cats::{verify_module_equivalence, verify_module_pentagon, verify_module_unitary};
use crate::report::Residual;
use crate::unitarizer::{monoidality_residual, verify_equivalence, EquivalenceData};

pub const CHECKS: &[&str] = &[
    "ring",
    "pentagon",
    "unitary",
    "hexagon",
    "braiding-unitary",
    "equivalence",
    "nat-iso",
    "module-pentagon",
    "module-unitary",
    "module-equivalence",
    "cocycle",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(flatten)]
    pub residual: Residual,
}

/// Checks whose sections are present in `ds`.
pub fn applicable_checks(ds: &Dataset) -> Vec<&'static str> {
    CHECKS
        .iter()
        .copied()
        .filter(|c| match *c {
            "ring" => ds.ring.is_some(),
            "pentagon" | "unitary" => ds.f.is_some(),
            "hexagon" | "braiding-unitary" => ds.f.is_some() && ds.r.is_some(),
            "equivalence" => ds.equivalence.is_some(),
            "nat-iso" => ds.nat_iso.is_some() && ds.f.is_some(),
            "module-pentagon" => ds.module.is_some() && ds.f.is_some(),
            "module-unitary" => ds.module.is_some(),
            "module-equivalence" => ds.module_equivalence.is_some(),
            "cocycle" => ds.cochain.is_some(),
            _ => false,
        })
        .collect()
}

fn need<'a, T>(v: &'a Option<T>, check: &str, section: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Input(format!("check `{check}` needs the `{section}` section")))
}

/// The first equivalence of a nat-iso section: the dataset equivalence, or
/// the identity of the F-symbols.
pub fn nat_iso_domain(ds: &Dataset) -> Result<EquivalenceData> {
    match &ds.equivalence {
        Some(s) => Ok(s.equivalence.clone()),
        None => Ok(EquivalenceData::identity(need(&ds.f, "nat-iso", "f_symbols")?)),
    }
}

pub fn nat_iso_codomain(ds: &Dataset) -> Result<EquivalenceData> {
    let e1 = nat_iso_domain(ds)?;
    let sec = need(&ds.nat_iso, "nat-iso", "nat_iso")?;
    let t: Gauge = sec.target_tensorator.clone().unwrap_or_else(|| e1.tensorator.clone());
    Ok(e1.with_tensorator(t))
}

pub fn run_check(ds: &Dataset, name: &str) -> Result<CheckResult> {
    let residual = match name {
        "ring" => {
            let ring = need(&ds.ring, name, "fusion_ring")?;
            let rep = verify_ring_axioms(ring);
            Residual::new(if rep.pass { 0.0 } else { 1.0 }, 0.0, rep.violation, 1)
        }
        "pentagon" => verify_pentagon(need(&ds.f, name, "f_symbols")?)?,
        "unitary" => verify_unitary(need(&ds.f, name, "f_symbols")?),
        "hexagon" => verify_hexagon(need(&ds.f, name, "f_symbols")?, need(&ds.r, name, "r_symbols")?)?,
        "braiding-unitary" => {
            let b = verify_braiding_unitary(need(&ds.f, name, "f_symbols")?, need(&ds.r, name, "r_symbols")?)?;
            Residual::new(b.residual, ds.tol, None, b.hexagon.instances)
        }
        "equivalence" => verify_equivalence(&need(&ds.equivalence, name, "equivalence")?.equivalence)?,
        "nat-iso" => {
            let sec = need(&ds.nat_iso, name, "nat_iso")?;
            let e1 = nat_iso_domain(ds)?;
            let e2 = nat_iso_codomain(ds)?;
            monoidality_residual(&sec.eta, &e1.tensorator, &e2.tensorator, ds.tol)?
        }
        "module-pentagon" => verify_module_pentagon(need(&ds.module, name, "module_data")?, need(&ds.f, name, "f_symbols")?)?,
        "module-unitary" => verify_module_unitary(need(&ds.module, name, "module_data")?),
        "module-equivalence" => verify_module_equivalence(need(&ds.module_equivalence, name, "module_equivalence")?),
        "cocycle" => {
            let r = verify_cocycle(need(&ds.cochain, name, "cochain")?, ds.tol);
            let worst = r.violation.map(|t| format!("{t:?}"));
            Residual::new(r.residual, ds.tol, worst, 1)
        }
        other => {
            return Err(Error::Input(format!(
                "unknown check `{other}`; expected one of {}",
                CHECKS.join(", ")
            )))
        }
    };
    Ok(CheckResult {
        name: name.to_string(),
        residual,
    })
}
