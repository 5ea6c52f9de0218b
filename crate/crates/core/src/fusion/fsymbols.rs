use std::collections::BTreeMap;

use super::basis::{ActionTable, BlockBasis};
use super::gauge::Gauge;
use super::ring::FusionRing;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::report::{MaxTracker, Residual};

pub type Quad = (usize, usize, usize, usize);

pub const DEFAULT_TOL: f64 = 1e-9;

/// Skeletal associator: one matrix per admissible `(a,b,c;d)`.
///
/// Row `(e,α,β)` of block `(a,b,c;d)` is the left tree
/// `d → e ⊗ c → (a ⊗ b) ⊗ c`, column `(f,μ,ν)` the right tree
/// `d → a ⊗ f → a ⊗ (b ⊗ c)`, and
/// `α ∘ left(e,α,β) = Σ F[(e,α,β),(f,μ,ν)] · right(f,μ,ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FSymbolSet {
    ring: FusionRing,
    tol: f64,
    blocks: BTreeMap<Quad, CMatrix>,
}

/// Anything that supplies associator-like blocks over an action table:
/// F-symbols (the regular action) and module L-symbols.
pub(crate) trait AssociatorBlocks {
    fn table(&self) -> ActionTable<'_>;
    fn assoc(&self, a: usize, b: usize, m: usize, m2: usize) -> Option<&CMatrix>;
}

impl AssociatorBlocks for FSymbolSet {
    fn table(&self) -> ActionTable<'_> {
        ActionTable::regular(&self.ring)
    }

    fn assoc(&self, a: usize, b: usize, m: usize, m2: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, b, m, m2))
    }
}

impl FSymbolSet {
    /// Validates block presence, shapes, invertibility and unit
    /// normalization. Unit blocks may be omitted and are filled in.
    pub fn new(ring: FusionRing, tol: f64, blocks: BTreeMap<Quad, CMatrix>) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::input(format!("tolerance must be positive, got {tol}")));
        }
        let blocks = validate_blocks(&ActionTable::regular(&ring), blocks, tol, "F")?;
        Ok(FSymbolSet { ring, tol, blocks })
    }

    /// All blocks equal to the identity.
    pub fn trivial(ring: &FusionRing, tol: f64) -> Result<Self> {
        let table = ActionTable::regular(ring);
        let blocks = table
            .admissible()
            .into_iter()
            .map(|q| (q, linalg::identity(table.basis(q.0, q.1, q.2, q.3).rows)))
            .collect();
        FSymbolSet::new(ring.clone(), tol, blocks)
    }

    pub(crate) fn from_parts(ring: FusionRing, tol: f64, blocks: BTreeMap<Quad, CMatrix>) -> Self {
        FSymbolSet { ring, tol, blocks }
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn block(&self, a: usize, b: usize, c: usize, d: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, b, c, d))
    }

    pub(crate) fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &CMatrix {
        &self.blocks[&(a, b, c, d)]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Quad, &CMatrix)> {
        self.blocks.iter()
    }

    /// Blocks with no index equal to the unit.
    pub fn nontrivial_blocks(&self) -> impl Iterator<Item = (&Quad, &CMatrix)> {
        self.blocks.iter().filter(|(k, _)| k.0 != 0 && k.1 != 0 && k.2 != 0)
    }

    /// Replaces one block, revalidating the whole set.
    pub fn with_block(&self, key: Quad, m: CMatrix) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.insert(key, m);
        FSymbolSet::new(self.ring.clone(), self.tol, blocks)
    }

    /// Max relative block deviation.
    pub fn distance(&self, other: &FSymbolSet) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| other.blocks.get(k).map_or(f64::INFINITY, |o| linalg::rel_diff(m, o)))
            .fold(0.0, f64::max)
    }

    /// Transports the data along a relabeling `a ↦ map[a]` of simples.
    /// `target` must be the relabeled ring.
    pub fn relabel(&self, map: &[usize], target: &FusionRing) -> FSymbolSet {
        let ring = &self.ring;
        let t_table = ActionTable::regular(target);
        let s_table = ActionTable::regular(ring);
        let mut blocks = BTreeMap::new();
        for (&(a, b, c, d), m) in &self.blocks {
            let sb = s_table.basis(a, b, c, d);
            let (ta, tb, tc, td) = (map[a], map[b], map[c], map[d]);
            let tbasis = t_table.basis(ta, tb, tc, td);
            let rows = enumerate_rows(ring, &s_table, a, b, c, d);
            let cols = enumerate_cols(ring, &s_table, a, b, c, d);
            let mut out = CMatrix::zeros(tbasis.rows, tbasis.cols);
            for &(e, x, y) in &rows {
                for &(f, u, v) in &cols {
                    out[(tbasis.row(map[e], x, y), tbasis.col(map[f], u, v))] = m[(sb.row(e, x, y), sb.col(f, u, v))];
                }
            }
            blocks.insert((ta, tb, tc, td), out);
        }
        FSymbolSet::from_parts(target.clone(), self.tol, blocks)
    }
}

pub(crate) fn enumerate_rows(
    ring: &FusionRing,
    table: &ActionTable,
    a: usize,
    b: usize,
    m: usize,
    m2: usize,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for e in 0..ring.rank() {
        for x in 0..ring.n(a, b, e) {
            for y in 0..table.mult(e, m, m2) {
                out.push((e, x, y));
            }
        }
    }
    out
}

pub(crate) fn enumerate_cols(
    _ring: &FusionRing,
    table: &ActionTable,
    a: usize,
    b: usize,
    m: usize,
    m2: usize,
) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for mm in 0..table.acted_rank {
        for x in 0..table.mult(b, m, mm) {
            for y in 0..table.mult(a, mm, m2) {
                out.push((mm, x, y));
            }
        }
    }
    out
}

/// Shared block validation for F- and L-symbols.
pub(crate) fn validate_blocks(
    table: &ActionTable,
    mut blocks: BTreeMap<Quad, CMatrix>,
    tol: f64,
    kind: &str,
) -> Result<BTreeMap<Quad, CMatrix>> {
    let admissible = table.admissible();
    for key in blocks.keys() {
        if admissible.binary_search(key).is_err() {
            return Err(Error::input(format!("{kind}-block {key:?} is not admissible")));
        }
    }
    for &(a, b, m, m2) in &admissible {
        let basis = table.basis(a, b, m, m2);
        let touches_unit = a == 0 || b == 0 || (kind == "F" && m == 0);
        let block = match blocks.get(&(a, b, m, m2)) {
            Some(block) => block,
            None if touches_unit => {
                blocks.insert((a, b, m, m2), linalg::identity(basis.rows));
                continue;
            }
            None => {
                return Err(Error::input(format!("missing {kind}-block for admissible quadruple ({a},{b},{m};{m2})")));
            }
        };
        if block.shape() != (basis.rows, basis.cols) {
            return Err(Error::input(format!(
                "{kind}-block ({a},{b},{m};{m2}) has shape {:?}, expected {}x{}",
                block.shape(),
                basis.rows,
                basis.cols
            )));
        }
        if !linalg::is_finite(block) {
            return Err(Error::input(format!("{kind}-block ({a},{b},{m};{m2}) has non-finite entries")));
        }
        if touches_unit && linalg::rel_diff(block, &linalg::identity(basis.rows)) > tol {
            return Err(Error::input(format!(
                "{kind}-block ({a},{b},{m};{m2}) touches the unit but is not the identity"
            )));
        }
        if linalg::inverse(block).is_none() {
            return Err(Error::Numerical {
                block: format!("{kind}({a},{b},{m};{m2})"),
                message: "block is singular".into(),
            });
        }
    }
    Ok(blocks)
}

/// Max relative Frobenius deviation between the two sides of the pentagon
/// over all instances. Passes iff the residual is at most `F.tol`.
pub fn verify_pentagon(f: &FSymbolSet) -> Result<Residual> {
    pentagon_residual(f, f)
}

/// Pentagon for an action `L` of the fusion category with associator `F`:
///
/// `Σ L(f,c,m;m2) L(a,b,l;m2) = Σ F(a,b,c;g) L(a,h,m;m2) L(b,c,m;k)`
/// with the F-case obtained for `L = F`.
pub(crate) fn pentagon_residual(f: &FSymbolSet, l: &impl AssociatorBlocks) -> Result<Residual> {
    let ring = &f.ring;
    let lt = l.table();
    let ft = f.table();
    let r = ring.rank();
    let ar = lt.acted_rank;

    let mut lbases: BTreeMap<Quad, BlockBasis> = BTreeMap::new();
    for q in lt.admissible() {
        lbases.insert(q, lt.basis(q.0, q.1, q.2, q.3));
    }
    let mut fbases: BTreeMap<Quad, BlockBasis> = BTreeMap::new();
    for q in ft.admissible() {
        fbases.insert(q, ft.basis(q.0, q.1, q.2, q.3));
    }
    let lblock = |q: Quad| -> Result<(&CMatrix, &BlockBasis)> {
        let m = l
            .assoc(q.0, q.1, q.2, q.3)
            .ok_or_else(|| Error::input(format!("missing block for admissible quadruple {q:?}")))?;
        Ok((m, &lbases[&q]))
    };
    let fblock = |q: Quad| -> Result<(&CMatrix, &BlockBasis)> {
        let m = f
            .assoc(q.0, q.1, q.2, q.3)
            .ok_or_else(|| Error::input(format!("missing F-block for admissible quadruple {q:?}")))?;
        Ok((m, &fbases[&q]))
    };

    let mut worst = MaxTracker::default();
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for m in 0..ar {
                    for m2 in 0..ar {
                        let mut init = Vec::new();
                        for fi in 0..r {
                            for g in 0..r {
                                let (n1, n2, n3) = (ring.n(a, b, fi), ring.n(fi, c, g), lt.mult(g, m, m2));
                                for x1 in 0..n1 {
                                    for x2 in 0..n2 {
                                        for x3 in 0..n3 {
                                            init.push((fi, g, x1, x2, x3));
                                        }
                                    }
                                }
                            }
                        }
                        let mut fin = Vec::new();
                        for k in 0..ar {
                            for li in 0..ar {
                                let (n1, n2, n3) = (lt.mult(c, m, li), lt.mult(b, li, k), lt.mult(a, k, m2));
                                for y1 in 0..n1 {
                                    for z1 in 0..n2 {
                                        for z2 in 0..n3 {
                                            fin.push((k, li, y1, z1, z2));
                                        }
                                    }
                                }
                            }
                        }
                        if init.is_empty() && fin.is_empty() {
                            continue;
                        }
                        if init.len() != fin.len() {
                            return Err(Error::input(format!(
                                "action is not associative at ({a},{b},{c},{m};{m2})"
                            )));
                        }
                        let dim = init.len();
                        let mut lhs = CMatrix::zeros(dim, dim);
                        let mut rhs = CMatrix::zeros(dim, dim);
                        for (i, &(fi, g, x1, x2, x3)) in init.iter().enumerate() {
                            for (j, &(k, li, y1, z1, z2)) in fin.iter().enumerate() {
                                let n_fl = lt.mult(fi, li, m2);
                                if n_fl > 0 {
                                    let (p1, b1) = lblock((fi, c, m, m2))?;
                                    let (p2, b2) = lblock((a, b, li, m2))?;
                                    let mut s = num_complex::Complex64::new(0.0, 0.0);
                                    for y2 in 0..n_fl {
                                        s += p1[(b1.row(g, x2, x3), b1.col(li, y1, y2))]
                                            * p2[(b2.row(fi, x1, y2), b2.col(k, z1, z2))];
                                    }
                                    lhs[(i, j)] = s;
                                }
                                let mut s = num_complex::Complex64::new(0.0, 0.0);
                                for h in 0..r {
                                    let (n_bc, n_ah, n_hm) = (ring.n(b, c, h), ring.n(a, h, g), lt.mult(h, m, k));
                                    if n_bc == 0 || n_ah == 0 || n_hm == 0 {
                                        continue;
                                    }
                                    let (q1, c1) = fblock((a, b, c, g))?;
                                    let (q2, c2) = lblock((a, h, m, m2))?;
                                    let (q3, c3) = lblock((b, c, m, k))?;
                                    for w1 in 0..n_bc {
                                        for w2 in 0..n_ah {
                                            let t1 = q1[(c1.row(fi, x1, x2), c1.col(h, w1, w2))];
                                            for v1 in 0..n_hm {
                                                s += t1
                                                    * q2[(c2.row(g, w2, x3), c2.col(k, v1, z2))]
                                                    * q3[(c3.row(h, w1, v1), c3.col(li, y1, z1))];
                                            }
                                        }
                                    }
                                }
                                rhs[(i, j)] = s;
                            }
                        }
                        let res = linalg::rel_diff(&rhs, &lhs);
                        worst.observe(res, || format!("({a},{b},{c},{m};{m2})"));
                    }
                }
            }
        }
    }
    Ok(worst.finish(f.tol))
}

/// Max `‖B†B − I‖` over blocks; passes iff every block is unitary within
/// `F.tol`. The pentagon is not checked here.
pub fn verify_unitary(f: &FSymbolSet) -> Residual {
    let mut worst = MaxTracker::default();
    for (&(a, b, c, d), m) in &f.blocks {
        worst.observe(linalg::unitarity_residual(m), || format!("({a},{b},{c};{d})"));
    }
    worst.finish(f.tol)
}

/// The F-symbols of the target of the monoidal equivalence `(id, g)`:
/// `F'(a,b,c;d) = (G_Lᵀ)⁻¹ F(a,b,c;d) G_Rᵀ` with `G_L`, `G_R` the gauge
/// on the left and right trees.
pub fn apply_gauge(f: &FSymbolSet, g: &Gauge) -> Result<FSymbolSet> {
    f.ring.ensure_same(g.ring())?;
    let mut blocks = BTreeMap::new();
    for (&(a, b, c, d), m) in &f.blocks {
        let out = if a == 0 || b == 0 || c == 0 {
            m.clone()
        } else {
            let left = g.left_tree(a, b, c, d).transpose();
            let right = g.right_tree(a, b, c, d).transpose();
            let left_inv = linalg::inverse(&left).ok_or_else(|| Error::Numerical {
                block: format!("({a},{b},{c};{d})"),
                message: "gauge is singular on the left-tree basis".into(),
            })?;
            left_inv * m * right
        };
        blocks.insert((a, b, c, d), out);
    }
    Ok(FSymbolSet::from_parts(f.ring.clone(), f.tol, blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::linalg::c;

    #[test]
    fn missing_nontrivial_block_is_input_error() {
        let ring = FusionRing::fibonacci();
        let mut blocks = BTreeMap::new();
        blocks.insert((1, 1, 1, 0), linalg::identity(1));
        let err = FSymbolSet::new(ring, 1e-9, blocks).unwrap_err();
        assert!(err.to_string().contains("missing F-block"), "{err}");
    }

    #[test]
    fn wrong_shape_and_non_admissible_blocks_are_rejected() {
        let ring = FusionRing::fibonacci();
        // Identity blocks do not solve the Fibonacci pentagon; construction only checks structure.
        let f = FSymbolSet::trivial(&ring, 1e-9).unwrap();
        assert!(f.with_block((1, 1, 1, 1), linalg::identity(3)).is_err());
        let mut blocks = BTreeMap::new();
        blocks.insert((0, 0, 0, 1), linalg::identity(1));
        assert!(FSymbolSet::new(ring, 1e-9, blocks).is_err());
    }

    #[test]
    fn unit_blocks_must_be_identity() {
        let ring = FusionRing::fibonacci();
        let f = FSymbolSet::trivial(&ring, 1e-9).unwrap();
        assert!(f.with_block((0, 1, 1, 0), linalg::scalar(c(-1.0, 0.0))).is_err());
    }

    #[test]
    fn identity_gauge_is_exact_noop() {
        for f in [builtin::fibonacci_f(), builtin::ising_f(), builtin::semion_f()] {
            let g = Gauge::identity(f.ring());
            assert_eq!(apply_gauge(&f, &g).unwrap(), f);
        }
    }

    #[test]
    fn vec_z2_trivial_pentagon_is_exact() {
        let f = builtin::vec_z2_trivial_f();
        let rep = verify_pentagon(&f).unwrap();
        assert_eq!(rep.residual, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn fibonacci_sign_flip_breaks_pentagon() {
        let f = builtin::fibonacci_f();
        let mut m = f.get(1, 1, 1, 1).clone();
        m[(0, 0)] = -m[(0, 0)];
        let broken = f.with_block((1, 1, 1, 1), m).unwrap();
        let rep = verify_pentagon(&broken).unwrap();
        assert!(!rep.pass);
        assert!(rep.residual > 0.1, "residual {}", rep.residual);
    }

    #[test]
    fn unitarity_of_builtins() {
        assert!(verify_unitary(&builtin::semion_f()).pass);
        assert!(verify_unitary(&builtin::fibonacci_f()).pass);
        let yl = verify_unitary(&builtin::yang_lee_f());
        assert!(!yl.pass && yl.residual > 0.1);
    }
}
