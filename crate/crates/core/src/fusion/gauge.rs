use std::collections::BTreeMap;

use num_complex::Complex64;

use super::ring::FusionRing;
use crate::error::{Error, Result};
use crate::linalg::{self, block_diag, kron, CMatrix};

pub type Vertex = (usize, usize, usize);

/// A family of invertible matrices `g(a,b;c)` acting on `Hom(c, a ⊗ b)`.
///
/// This is the skeletal form of a tensorator: `g(a,b;c)` is the matrix of
/// `f_{a,b} ∘ F(−)` in the vertex bases, acting on coordinate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Gauge {
    ring: FusionRing,
    blocks: BTreeMap<Vertex, CMatrix>,
}

impl Gauge {
    /// Validates sizes, invertibility and unit normalization. Missing unit
    /// blocks are filled with identities.
    pub fn new(ring: FusionRing, mut blocks: BTreeMap<Vertex, CMatrix>) -> Result<Self> {
        let r = ring.rank();
        for &(a, b, c) in blocks.keys() {
            if a >= r || b >= r || c >= r || ring.n(a, b, c) == 0 {
                return Err(Error::input(format!("gauge block ({a},{b};{c}) is not an admissible vertex")));
            }
        }
        for (a, b, c) in ring.vertices() {
            let n = ring.n(a, b, c);
            let unit = a == 0 || b == 0;
            let block = blocks.entry((a, b, c)).or_insert_with(|| linalg::identity(n));
            if block.shape() != (n, n) {
                return Err(Error::input(format!(
                    "gauge block ({a},{b};{c}) has shape {:?}, expected {n}x{n}",
                    block.shape()
                )));
            }
            if unit && linalg::rel_diff(block, &linalg::identity(n)) > 1e-12 {
                return Err(Error::input(format!("gauge block ({a},{b};{c}) touches the unit but is not the identity")));
            }
            if linalg::inverse(block).is_none() {
                return Err(Error::Numerical {
                    block: format!("({a},{b};{c})"),
                    message: "gauge block is singular".into(),
                });
            }
        }
        Ok(Gauge { ring, blocks })
    }

    pub fn identity(ring: &FusionRing) -> Self {
        Gauge::from_fn(ring, |_, _, _, n| linalg::identity(n))
    }

    /// Builds a gauge from a block generator; unit blocks are forced to the
    /// identity and the generator is not called for them.
    pub fn from_fn(ring: &FusionRing, mut f: impl FnMut(usize, usize, usize, usize) -> CMatrix) -> Self {
        let mut blocks = BTreeMap::new();
        for (a, b, c) in ring.vertices() {
            let n = ring.n(a, b, c);
            let m = if a == 0 || b == 0 { linalg::identity(n) } else { f(a, b, c, n) };
            blocks.insert((a, b, c), m);
        }
        Gauge {
            ring: ring.clone(),
            blocks,
        }
    }

    /// The coboundary `μ_a μ_b / μ_c` of a scalar family, as a gauge.
    pub fn coboundary(nat: &NatIso) -> Self {
        let mu = nat.components();
        let unit = mu[0];
        // Dividing by μ_0 keeps unit blocks normalized for non-monoidal families.
        Gauge::from_fn(nat.ring(), |a, b, c, n| linalg::identity(n) * (mu[a] * mu[b] / (mu[c] * unit)))
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

    /// Applies `f` to every block, keeping unit blocks fixed.
    pub(crate) fn map_blocks(&self, mut f: impl FnMut(Vertex, &CMatrix) -> CMatrix) -> Gauge {
        let blocks = self
            .blocks
            .iter()
            .map(|(&(a, b, c), m)| {
                let out = if a == 0 || b == 0 { m.clone() } else { f((a, b, c), m) };
                ((a, b, c), out)
            })
            .collect();
        Gauge {
            ring: self.ring.clone(),
            blocks,
        }
    }

    /// Blockwise product `self · other` (`other` acts first).
    pub fn compose(&self, other: &Gauge) -> Result<Gauge> {
        self.ring.ensure_same(&other.ring)?;
        let mut blocks = BTreeMap::new();
        for (key, m) in &self.blocks {
            blocks.insert(*key, m * &other.blocks[key]);
        }
        Ok(Gauge {
            ring: self.ring.clone(),
            blocks,
        })
    }

    pub fn inverse(&self) -> Result<Gauge> {
        let mut blocks = BTreeMap::new();
        for (&(a, b, c), m) in &self.blocks {
            let inv = linalg::inverse(m).ok_or_else(|| Error::Numerical {
                block: format!("({a},{b};{c})"),
                message: "cannot invert singular gauge block".into(),
            })?;
            blocks.insert((a, b, c), inv);
        }
        Ok(Gauge {
            ring: self.ring.clone(),
            blocks,
        })
    }

    pub fn adjoint(&self) -> Gauge {
        Gauge {
            ring: self.ring.clone(),
            blocks: self.blocks.iter().map(|(k, m)| (*k, m.adjoint())).collect(),
        }
    }

    /// Max relative deviation from `other` over all blocks.
    pub fn distance(&self, other: &Gauge) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| linalg::rel_diff(m, &other.blocks[k]))
            .fold(0.0, f64::max)
    }

    /// Max `‖B†B − I‖` over blocks.
    pub fn unitarity_residual(&self) -> f64 {
        self.blocks.values().map(linalg::unitarity_residual).fold(0.0, f64::max)
    }

    /// The gauge on the left-tree basis of the F-block `(a,b,c;d)`:
    /// `⊕_e g(a,b;e) ⊗ g(e,c;d)`.
    pub fn left_tree(&self, a: usize, b: usize, c: usize, d: usize) -> CMatrix {
        let r = &self.ring;
        let parts: Vec<CMatrix> = (0..r.rank())
            .filter(|&e| r.n(a, b, e) > 0 && r.n(e, c, d) > 0)
            .map(|e| kron(self.get(a, b, e), self.get(e, c, d)))
            .collect();
        block_diag(&parts)
    }

    /// The gauge on the right-tree basis of the F-block `(a,b,c;d)`:
    /// `⊕_f g(b,c;f) ⊗ g(a,f;d)`.
    pub fn right_tree(&self, a: usize, b: usize, c: usize, d: usize) -> CMatrix {
        let r = &self.ring;
        let parts: Vec<CMatrix> = (0..r.rank())
            .filter(|&f| r.n(b, c, f) > 0 && r.n(a, f, d) > 0)
            .map(|f| kron(self.get(b, c, f), self.get(a, f, d)))
            .collect();
        block_diag(&parts)
    }
}

pub fn compose_gauges(g1: &Gauge, g2: &Gauge) -> Result<Gauge> {
    g1.compose(g2)
}

pub fn invert_gauge(g: &Gauge) -> Result<Gauge> {
    g.inverse()
}

pub fn adjoint_gauge(g: &Gauge) -> Gauge {
    g.adjoint()
}

/// One nonzero scalar per simple: a natural isomorphism between functors
/// whose underlying simple maps agree.
#[derive(Debug, Clone, PartialEq)]
pub struct NatIso {
    ring: FusionRing,
    components: Vec<Complex64>,
}

impl NatIso {
    pub fn new(ring: FusionRing, components: Vec<Complex64>) -> Result<Self> {
        if components.len() != ring.rank() {
            return Err(Error::input(format!(
                "natural isomorphism has {} components but the ring has rank {}",
                components.len(),
                ring.rank()
            )));
        }
        if let Some(i) = components.iter().position(|z| z.norm() == 0.0 || !z.norm().is_finite()) {
            return Err(Error::input(format!("component {i} of the natural isomorphism is zero or non-finite")));
        }
        Ok(NatIso { ring, components })
    }

    pub fn ones(ring: &FusionRing) -> Self {
        NatIso {
            ring: ring.clone(),
            components: vec![Complex64::new(1.0, 0.0); ring.rank()],
        }
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn components(&self) -> &[Complex64] {
        &self.components
    }

    pub fn inverse(&self) -> NatIso {
        NatIso {
            ring: self.ring.clone(),
            components: self.components.iter().map(|z| z.inv()).collect(),
        }
    }

    /// Max `|η_a| − 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.components.iter().map(|z| (z.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn identity_is_neutral_and_self_inverse() {
        let ring = FusionRing::fibonacci();
        let id = Gauge::identity(&ring);
        assert_eq!(id.inverse().unwrap(), id);
        assert_eq!(id.adjoint(), id);
    }

    #[test]
    fn coboundary_of_fibonacci_family() {
        let ring = FusionRing::fibonacci();
        let mu = NatIso::new(ring.clone(), vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let g = Gauge::coboundary(&mu);
        assert_eq!(g.get(1, 1, 0)[(0, 0)], c(4.0, 0.0));
        assert_eq!(g.get(1, 1, 1)[(0, 0)], c(2.0, 0.0));
        assert_eq!(g.get(0, 1, 1)[(0, 0)], c(1.0, 0.0));
    }

    #[test]
    fn singular_block_reports_block_id() {
        let ring = FusionRing::fibonacci();
        let g = Gauge::from_fn(&ring, |a, b, c, n| {
            if (a, b, c) == (1, 1, 1) {
                CMatrix::zeros(n, n)
            } else {
                linalg::identity(n)
            }
        });
        match g.inverse().unwrap_err() {
            Error::Numerical { block, .. } => assert_eq!(block, "(1,1;1)"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn rejects_non_normalized_unit_block() {
        let ring = FusionRing::fibonacci();
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 1, 1), linalg::scalar(c(2.0, 0.0)));
        assert!(Gauge::new(ring, blocks).is_err());
    }

    #[test]
    fn nat_iso_rejects_zero_component() {
        let ring = FusionRing::fibonacci();
        assert!(NatIso::new(ring, vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
    }
}
