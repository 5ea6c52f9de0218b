//! Braidings as R-symbols, the hexagon equations, and braided equivalences.
//!
//! `R(a,b;c)` is the braiding `a ⊗ b → b ⊗ a` restricted to channel `c`,
//! acting on coordinates of `Hom(c, a ⊗ b)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fusion::{verify_pentagon, verify_unitary, FSymbolSet, FusionRing, Gauge, Vertex};
use crate::linalg::{self, block_diag, kron, CMatrix};
use crate::report::{MaxTracker, Residual};
use crate::unitarizer::{factorize_equivalence, EquivalenceData, Factorization};

#[derive(Debug, Clone, PartialEq)]
pub struct RSymbolSet {
    ring: FusionRing,
    blocks: BTreeMap<Vertex, CMatrix>,
}

impl RSymbolSet {
    /// Unit blocks may be omitted and default to the identity; the ring must
    /// be commutative.
    pub fn new(ring: FusionRing, mut blocks: BTreeMap<Vertex, CMatrix>) -> Result<Self> {
        let r = ring.rank();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if ring.n(a, b, c) != ring.n(b, a, c) {
                        return Err(Error::input("a braiding requires commutative fusion rules"));
                    }
                }
            }
        }
        for &(a, b, c) in blocks.keys() {
            if a >= r || b >= r || c >= r || ring.n(a, b, c) == 0 {
                return Err(Error::input(format!("R-block ({a},{b};{c}) is not an admissible vertex")));
            }
        }
        for (a, b, c) in ring.vertices() {
            let n = ring.n(a, b, c);
            let unit = a == 0 || b == 0;
            let block = match blocks.get(&(a, b, c)) {
                Some(m) => m,
                None if unit => {
                    blocks.insert((a, b, c), linalg::identity(n));
                    continue;
                }
                None => return Err(Error::input(format!("missing R-block ({a},{b};{c})"))),
            };
            if block.shape() != (n, n) {
                return Err(Error::input(format!(
                    "R-block ({a},{b};{c}) has shape {:?}, expected {n}x{n}",
                    block.shape()
                )));
            }
            if unit && linalg::rel_diff(block, &linalg::identity(n)) > 1e-12 {
                return Err(Error::input(format!("R-block ({a},{b};{c}) touches the unit but is not the identity")));
            }
            if linalg::inverse(block).is_none() {
                return Err(Error::Numerical {
                    block: format!("R({a},{b};{c})"),
                    message: "block is singular".into(),
                });
            }
        }
        Ok(RSymbolSet { ring, blocks })
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn block(&self, a: usize, b: usize, c: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, b, c))
    }

    pub(crate) fn get(&self, a: usize, b: usize, c: usize) -> &CMatrix {
        &self.blocks[&(a, b, c)]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Vertex, &CMatrix)> {
        self.blocks.iter()
    }

    pub fn with_block(&self, key: Vertex, m: CMatrix) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.insert(key, m);
        RSymbolSet::new(self.ring.clone(), blocks)
    }

    /// The reverse braiding `R'(a,b;c) = R(b,a;c)⁻¹`.
    pub fn reverse(&self) -> Result<Self> {
        let mut blocks = BTreeMap::new();
        for &(a, b, c) in self.blocks.keys() {
            let inv = linalg::inverse(self.get(b, a, c)).ok_or_else(|| Error::Numerical {
                block: format!("R({b},{a};{c})"),
                message: "block is singular".into(),
            })?;
            blocks.insert((a, b, c), inv);
        }
        Ok(RSymbolSet {
            ring: self.ring.clone(),
            blocks,
        })
    }

    pub fn relabel(&self, map: &[usize], target: &FusionRing) -> RSymbolSet {
        RSymbolSet {
            ring: target.clone(),
            blocks: self.blocks.iter().map(|(&(a, b, c), m)| ((map[a], map[b], map[c]), m.clone())).collect(),
        }
    }

    /// The R-symbols transported along `(id, u)`: `R'(a,b;c) = u(b,a;c) R(a,b;c) u(a,b;c)⁻¹`.
    pub fn apply_gauge(&self, u: &Gauge) -> Result<RSymbolSet> {
        self.ring.ensure_same(u.ring())?;
        let mut blocks = BTreeMap::new();
        for (&(a, b, c), m) in &self.blocks {
            let inv = linalg::inverse(u.get(a, b, c)).ok_or_else(|| Error::Numerical {
                block: format!("({a},{b};{c})"),
                message: "gauge block is singular".into(),
            })?;
            blocks.insert((a, b, c), u.get(b, a, c) * m * inv);
        }
        Ok(RSymbolSet {
            ring: self.ring.clone(),
            blocks,
        })
    }
}

fn r_left(r: &RSymbolSet, x: usize, y: usize, ch: impl Iterator<Item = usize>, inner: impl Fn(usize) -> usize) -> CMatrix {
    let parts: Vec<CMatrix> = ch.map(|z| kron(r.get(x, y, z), &linalg::identity(inner(z)))).collect();
    block_diag(&parts)
}

/// One hexagon family:
/// `Fᵀ(b,c,a) · ⊕_f (1 ⊗ R(a,f;d)) · Fᵀ(a,b,c) = ⊕_g (R(a,c;g) ⊗ 1) · Fᵀ(b,a,c) · ⊕_e (R(a,b;e) ⊗ 1)`.
fn hexagon_family(f: &FSymbolSet, r: &RSymbolSet, worst: &mut MaxTracker, family: &str) {
    let ring = f.ring();
    let rank = ring.rank();
    for a in 0..rank {
        for b in 0..rank {
            for c in 0..rank {
                for d in 0..rank {
                    let Some(fabc) = f.block(a, b, c, d) else { continue };
                    let fbca = f.get(b, c, a, d);
                    let fbac = f.get(b, a, c, d);
                    let lhs_mid = {
                        let parts: Vec<CMatrix> = (0..rank)
                            .filter(|&x| ring.n(b, c, x) > 0 && ring.n(a, x, d) > 0)
                            .map(|x| kron(&linalg::identity(ring.n(b, c, x)), r.get(a, x, d)))
                            .collect();
                        block_diag(&parts)
                    };
                    let lhs = fbca.transpose() * lhs_mid * fabc.transpose();
                    let rg = r_left(
                        r,
                        a,
                        c,
                        (0..rank).filter(|&g| ring.n(a, c, g) > 0 && ring.n(b, g, d) > 0),
                        |g| ring.n(b, g, d),
                    );
                    let re = r_left(
                        r,
                        a,
                        b,
                        (0..rank).filter(|&e| ring.n(a, b, e) > 0 && ring.n(e, c, d) > 0),
                        |e| ring.n(e, c, d),
                    );
                    let rhs = rg * fbac.transpose() * re;
                    worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("{family} ({a},{b},{c};{d})"));
                }
            }
        }
    }
}

/// Max residual over both hexagon families; the second is the first for
/// the reverse braiding.
pub fn verify_hexagon(f: &FSymbolSet, r: &RSymbolSet) -> Result<Residual> {
    f.ring().ensure_same(r.ring())?;
    let mut worst = MaxTracker::default();
    hexagon_family(f, r, &mut worst, "hexagon");
    hexagon_family(f, &r.reverse()?, &mut worst, "inverse hexagon");
    Ok(worst.finish(f.tol()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraidingUnitarity {
    pub pass: bool,
    /// Max `‖R†R − I‖` over blocks.
    pub residual: f64,
    pub hexagon: Residual,
}

/// On a unitary fusion category every braiding is unitary; a failure here
/// means the input data is inconsistent.
pub fn verify_braiding_unitary(f: &FSymbolSet, r: &RSymbolSet) -> Result<BraidingUnitarity> {
    let pent = verify_pentagon(f)?;
    if !pent.pass {
        return Err(Error::Precondition(format!("F fails the pentagon (residual {:e})", pent.residual)));
    }
    let unit = verify_unitary(f);
    if !unit.pass {
        return Err(Error::Precondition(format!("F is not unitary (residual {:e})", unit.residual)));
    }
    let hexagon = verify_hexagon(f, r)?;
    if !hexagon.pass {
        return Err(Error::Inconsistent(format!(
            "R fails the hexagon (residual {:e} at {})",
            hexagon.residual,
            hexagon.worst.as_deref().unwrap_or("?")
        )));
    }
    let residual = r.blocks.values().map(linalg::unitarity_residual).fold(0.0, f64::max);
    Ok(BraidingUnitarity {
        pass: residual <= f.tol(),
        residual,
        hexagon,
    })
}

/// Max over vertices of `‖t(b,a;c) R_src(a,b;c) − R_tgt(a,b;c) t(a,b;c)‖`
/// relative, with `R_src` over target labels.
pub fn braided_compatibility(t: &Gauge, r_src: &RSymbolSet, r_tgt: &RSymbolSet, tol: f64) -> Result<Residual> {
    t.ring().ensure_same(r_src.ring())?;
    t.ring().ensure_same(r_tgt.ring())?;
    let mut worst = MaxTracker::default();
    for (&(a, b, c), rs) in r_src.blocks() {
        let lhs = t.get(b, a, c) * rs;
        let rhs = r_tgt.get(a, b, c) * t.get(a, b, c);
        worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("({a},{b};{c})"));
    }
    Ok(worst.finish(tol))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BraidedFactorization {
    pub factorization: Factorization,
    pub compatibility: Residual,
    /// `p(b,a;c) R(a,b;c) = R(a,b;c) p(a,b;c)` on the target.
    pub commutation: Residual,
    /// Braided compatibility of the unitary factor.
    pub unitary_braided: Residual,
}

pub fn factorize_braided_equivalence(e: &EquivalenceData, r_src: &RSymbolSet, r_tgt: &RSymbolSet) -> Result<BraidedFactorization> {
    let tol = e.tol();
    let src = r_src.relabel(&e.simple_map, e.target_f.ring());
    let compatibility = braided_compatibility(&e.tensorator, &src, r_tgt, tol)?;
    if !compatibility.pass {
        return Err(Error::Precondition(format!(
            "tensorator is not braided (residual {:e} at {})",
            compatibility.residual,
            compatibility.worst.as_deref().unwrap_or("?")
        )));
    }
    let factorization = factorize_equivalence(e)?;
    let commutation = braided_compatibility(&factorization.positive_part, r_tgt, r_tgt, 10.0 * tol)?;
    let unitary_braided = braided_compatibility(&factorization.unitary_equivalence.tensorator, &src, r_tgt, 10.0 * tol)?;
    Ok(BraidedFactorization {
        factorization,
        compatibility,
        commutation,
        unitary_braided,
    })
}
