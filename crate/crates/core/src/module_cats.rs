//! Skeletal module categories over a fusion category and module
//! equivalences between them.
//!
//! `n(a,m;m')` counts `Hom(m', a ▷ m)`. The L-block `(a,b,m;m2)` maps the
//! tree basis of `(a ⊗ b) ▷ m` to that of `a ▷ (b ▷ m)`, indexed as F-blocks
//! with module labels in the second vertex.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fusion::basis::ActionTable;
use crate::fusion::fsymbols::{pentagon_residual, validate_blocks, AssociatorBlocks};
use crate::fusion::{FSymbolSet, FusionRing, Quad, Vertex};
use crate::linalg::{self, block_diag, kron, CMatrix};
use crate::polar::{self, polar_decompose_matrix};
use crate::report::{MaxTracker, Residual};

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleData {
    ring: FusionRing,
    labels: Vec<String>,
    n: Vec<u32>,
    tol: f64,
    blocks: BTreeMap<Quad, CMatrix>,
}

impl AssociatorBlocks for ModuleData {
    fn table(&self) -> ActionTable<'_> {
        ActionTable::new(&self.ring, self.labels.len(), &self.n)
    }

    fn assoc(&self, a: usize, b: usize, m: usize, m2: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, b, m, m2))
    }
}

impl ModuleData {
    /// `action` lists nonzero `(a, m, m', n)`. Checks the unit action and
    /// associativity of the action exactly, then the L-block structure.
    pub fn new(
        ring: FusionRing,
        labels: Vec<String>,
        action: &[(usize, usize, usize, u32)],
        tol: f64,
        blocks: BTreeMap<Quad, CMatrix>,
    ) -> Result<Self> {
        let k = labels.len();
        if k == 0 {
            return Err(Error::input("module category must have at least one simple object"));
        }
        let r = ring.rank();
        let mut n = vec![0u32; r * k * k];
        for &(a, m, m2, v) in action {
            if a >= r || m >= k || m2 >= k {
                return Err(Error::input(format!("action entry ({a},{m},{m2}) out of range")));
            }
            n[(a * k + m) * k + m2] = v;
        }
        let data = ModuleData {
            ring,
            labels,
            n,
            tol,
            blocks: BTreeMap::new(),
        };
        data.check_action()?;
        let blocks = validate_blocks(&data.table(), blocks, tol, "L")?;
        Ok(ModuleData { blocks, ..data })
    }

    /// The fusion category acting on itself, with `L = F`.
    pub fn regular(f: &FSymbolSet) -> Self {
        let ring = f.ring().clone();
        ModuleData {
            labels: ring.labels().to_vec(),
            n: ring.tensor().to_vec(),
            tol: f.tol(),
            blocks: f.blocks().map(|(k, m)| (*k, m.clone())).collect(),
            ring,
        }
    }

    fn check_action(&self) -> Result<()> {
        let t = self.table();
        let (r, k) = (self.ring.rank(), self.rank());
        for m in 0..k {
            for m2 in 0..k {
                if t.mult(0, m, m2) != usize::from(m == m2) {
                    return Err(Error::input(format!("the unit must act as the identity on {}", self.labels[m])));
                }
            }
        }
        for a in 0..r {
            for b in 0..r {
                for m in 0..k {
                    for m2 in 0..k {
                        let lhs: usize = (0..r).map(|e| self.ring.n(a, b, e) * t.mult(e, m, m2)).sum();
                        let rhs: usize = (0..k).map(|mm| t.mult(b, m, mm) * t.mult(a, mm, m2)).sum();
                        if lhs != rhs {
                            return Err(Error::input(format!(
                                "action is not associative at ({},{},{};{}): {lhs} != {rhs}",
                                self.ring.label(a),
                                self.ring.label(b),
                                self.labels[m],
                                self.labels[m2]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ring(&self) -> &FusionRing {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn mult(&self, a: usize, m: usize, m2: usize) -> usize {
        self.table().mult(a, m, m2)
    }

    /// Nonzero `(a, m, m', n)` in lexicographic order.
    pub fn action(&self) -> Vec<(usize, usize, usize, u32)> {
        let (r, k) = (self.ring.rank(), self.rank());
        let mut out = Vec::new();
        for a in 0..r {
            for m in 0..k {
                for m2 in 0..k {
                    let v = self.mult(a, m, m2);
                    if v > 0 {
                        out.push((a, m, m2, v as u32));
                    }
                }
            }
        }
        out
    }

    /// Admissible `(a, m, m')`.
    pub fn vertices(&self) -> Vec<Vertex> {
        self.action().into_iter().map(|(a, m, m2, _)| (a, m, m2)).collect()
    }

    pub fn block(&self, a: usize, b: usize, m: usize, m2: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, b, m, m2))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Quad, &CMatrix)> {
        self.blocks.iter()
    }

    pub fn with_block(&self, key: Quad, m: CMatrix) -> Result<Self> {
        let mut blocks = self.blocks.clone();
        blocks.insert(key, m);
        ModuleData::new(self.ring.clone(), self.labels.clone(), &self.action(), self.tol, blocks)
    }

    /// Same action tensor and ring.
    fn same_structure(&self, other: &ModuleData) -> bool {
        self.ring.same_structure(&other.ring) && self.n == other.n
    }

    /// Transport along `m ↦ map[m]`; `target` supplies the relabeled structure.
    fn relabel(&self, map: &[usize], target: &ModuleData) -> ModuleData {
        let st = self.table();
        let tt = target.table();
        let ring = &self.ring;
        let mut blocks = BTreeMap::new();
        for (&(a, b, m, m2), blk) in &self.blocks {
            let sb = st.basis(a, b, m, m2);
            let tb = tt.basis(a, b, map[m], map[m2]);
            let mut out = CMatrix::zeros(tb.rows, tb.cols);
            for e in 0..ring.rank() {
                for x in 0..ring.n(a, b, e) {
                    for y in 0..st.mult(e, m, m2) {
                        for mm in 0..self.rank() {
                            for u in 0..st.mult(b, m, mm) {
                                for v in 0..st.mult(a, mm, m2) {
                                    out[(tb.row(e, x, y), tb.col(map[mm], u, v))] = blk[(sb.row(e, x, y), sb.col(mm, u, v))];
                                }
                            }
                        }
                    }
                }
            }
            blocks.insert((a, b, map[m], map[m2]), out);
        }
        ModuleData {
            blocks,
            ..target.clone()
        }
    }
}

/// Mixed pentagon for `L` and `F`; for the regular module it is the
/// pentagon of `F`.
pub fn verify_module_pentagon(m: &ModuleData, f: &FSymbolSet) -> Result<Residual> {
    m.ring.ensure_same(f.ring())?;
    pentagon_residual(&f.clone().with_tol(m.tol), m)
}

/// Max `‖B†B − I‖` over L-blocks.
pub fn verify_module_unitary(m: &ModuleData) -> Residual {
    let mut worst = MaxTracker::default();
    for (&(a, b, x, y), blk) in &m.blocks {
        worst.observe(linalg::unitarity_residual(blk), || format!("({a},{b},{x};{y})"));
    }
    worst.finish(m.tol)
}

/// Invertible matrices `t(a,m;m')` of size `n(a,m;m')`, identity for `a = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleGauge {
    blocks: BTreeMap<Vertex, CMatrix>,
}

impl ModuleGauge {
    pub fn new(m: &ModuleData, mut blocks: BTreeMap<Vertex, CMatrix>) -> Result<Self> {
        let verts = m.vertices();
        for key in blocks.keys() {
            if verts.binary_search(key).is_err() {
                return Err(Error::input(format!("module gauge block {key:?} is not an admissible vertex")));
            }
        }
        for &(a, x, y) in &verts {
            let n = m.mult(a, x, y);
            let blk = blocks.entry((a, x, y)).or_insert_with(|| linalg::identity(n));
            if blk.shape() != (n, n) {
                return Err(Error::input(format!("module gauge block ({a},{x};{y}) must be {n}x{n}")));
            }
            if a == 0 && linalg::rel_diff(blk, &linalg::identity(n)) > 1e-12 {
                return Err(Error::input(format!("module gauge block (1,{x};{y}) must be the identity")));
            }
            if linalg::inverse(blk).is_none() {
                return Err(Error::Numerical {
                    block: format!("({a},{x};{y})"),
                    message: "module gauge block is singular".into(),
                });
            }
        }
        Ok(ModuleGauge { blocks })
    }

    pub fn identity(m: &ModuleData) -> Self {
        ModuleGauge::from_fn(m, |_, _, _, n| linalg::identity(n))
    }

    pub fn from_fn(m: &ModuleData, mut f: impl FnMut(usize, usize, usize, usize) -> CMatrix) -> Self {
        let blocks = m
            .vertices()
            .into_iter()
            .map(|(a, x, y)| {
                let n = m.mult(a, x, y);
                let blk = if a == 0 { linalg::identity(n) } else { f(a, x, y, n) };
                ((a, x, y), blk)
            })
            .collect();
        ModuleGauge { blocks }
    }

    /// `t(a,m;m') = μ_m / μ_{m'}`: the structure induced by a natural
    /// isomorphism `id ⇒ id` with components `μ`.
    pub fn coboundary(m: &ModuleData, mu: &[Complex64]) -> Self {
        ModuleGauge::from_fn(m, |_, x, y, n| linalg::identity(n) * (mu[x] / mu[y]))
    }

    pub fn block(&self, a: usize, m: usize, m2: usize) -> Option<&CMatrix> {
        self.blocks.get(&(a, m, m2))
    }

    fn get(&self, a: usize, m: usize, m2: usize) -> &CMatrix {
        &self.blocks[&(a, m, m2)]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&Vertex, &CMatrix)> {
        self.blocks.iter()
    }

    /// Blockwise `self · other`.
    pub fn compose(&self, other: &ModuleGauge) -> ModuleGauge {
        ModuleGauge {
            blocks: self.blocks.iter().map(|(k, m)| (*k, m * &other.blocks[k])).collect(),
        }
    }

    pub fn distance(&self, other: &ModuleGauge) -> f64 {
        self.blocks
            .iter()
            .map(|(k, m)| linalg::rel_diff(m, &other.blocks[k]))
            .fold(0.0, f64::max)
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.blocks.values().map(linalg::unitarity_residual).fold(0.0, f64::max)
    }

    /// `⊕_e 1 ⊗ t(e,m;m2)` on the rows of L-block `(a,b,m;m2)`.
    fn left_tree(&self, md: &ModuleData, a: usize, b: usize, m: usize, m2: usize) -> CMatrix {
        let ring = &md.ring;
        let parts: Vec<CMatrix> = (0..ring.rank())
            .filter(|&e| ring.n(a, b, e) > 0 && md.mult(e, m, m2) > 0)
            .map(|e| kron(&linalg::identity(ring.n(a, b, e)), self.get(e, m, m2)))
            .collect();
        block_diag(&parts)
    }

    /// `⊕_{m'} t(b,m;m') ⊗ t(a,m';m2)` on the columns.
    fn right_tree(&self, md: &ModuleData, a: usize, b: usize, m: usize, m2: usize) -> CMatrix {
        let parts: Vec<CMatrix> = (0..md.rank())
            .filter(|&mm| md.mult(b, m, mm) > 0 && md.mult(a, mm, m2) > 0)
            .map(|mm| kron(self.get(b, m, mm), self.get(a, mm, m2)))
            .collect();
        block_diag(&parts)
    }
}

/// L-symbols of the target of the module equivalence `(id, t)`.
pub fn apply_module_gauge(m: &ModuleData, t: &ModuleGauge) -> Result<ModuleData> {
    let mut blocks = BTreeMap::new();
    for (&(a, b, x, y), blk) in &m.blocks {
        let left = t.left_tree(m, a, b, x, y).transpose();
        let inv = linalg::inverse(&left).ok_or_else(|| Error::Numerical {
            block: format!("({a},{b},{x};{y})"),
            message: "module gauge is singular on the left-tree basis".into(),
        })?;
        blocks.insert((a, b, x, y), inv * blk * t.right_tree(m, a, b, x, y).transpose());
    }
    Ok(ModuleData {
        blocks,
        ..m.clone()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleEquivalenceData {
    pub source: ModuleData,
    pub target: ModuleData,
    /// `simple_map[m]` is the target index of source module simple `m`.
    pub simple_map: Vec<usize>,
    /// Over target labels.
    pub tensorator: ModuleGauge,
}

impl ModuleEquivalenceData {
    pub fn new(source: ModuleData, target: ModuleData, simple_map: Vec<usize>, tensorator: ModuleGauge) -> Result<Self> {
        source.ring.ensure_same(&target.ring)?;
        let k = source.rank();
        if target.rank() != k || simple_map.len() != k {
            return Err(Error::input("module simple map has the wrong length"));
        }
        let mut seen = vec![false; k];
        for &m in &simple_map {
            if m >= k || seen[m] {
                return Err(Error::input("module simple map is not a bijection"));
            }
            seen[m] = true;
        }
        for a in 0..source.ring.rank() {
            for x in 0..k {
                for y in 0..k {
                    if source.mult(a, x, y) != target.mult(a, simple_map[x], simple_map[y]) {
                        return Err(Error::input(format!("module simple map does not preserve n({a},{x};{y})")));
                    }
                }
            }
        }
        ModuleGauge::new(&target, tensorator.blocks.clone())?;
        Ok(ModuleEquivalenceData {
            source,
            target,
            simple_map,
            tensorator,
        })
    }

    pub fn identity(m: &ModuleData) -> Self {
        ModuleEquivalenceData {
            source: m.clone(),
            target: m.clone(),
            simple_map: (0..m.rank()).collect(),
            tensorator: ModuleGauge::identity(m),
        }
    }

    pub fn from_gauge(m: &ModuleData, t: &ModuleGauge) -> Result<Self> {
        let target = apply_module_gauge(m, t)?;
        ModuleEquivalenceData::new(m.clone(), target, (0..m.rank()).collect(), t.clone())
    }

    pub fn tol(&self) -> f64 {
        self.target.tol
    }

    pub fn relabeled_source(&self) -> ModuleData {
        self.source.relabel(&self.simple_map, &self.target)
    }

    pub fn with_tensorator(&self, tensorator: ModuleGauge) -> Self {
        ModuleEquivalenceData {
            tensorator,
            ..self.clone()
        }
    }
}

/// Max relative residual of `G_R(t) L_Mᵀ = L_Nᵀ G_L(t)` over L-blocks.
pub fn module_coherence_residual(lm: &ModuleData, ln: &ModuleData, t: &ModuleGauge, tol: f64) -> Residual {
    debug_assert!(lm.same_structure(ln));
    let mut worst = MaxTracker::default();
    for (&(a, b, x, y), blk) in &lm.blocks {
        let lhs = t.right_tree(ln, a, b, x, y) * blk.transpose();
        let rhs = ln.blocks[&(a, b, x, y)].transpose() * t.left_tree(ln, a, b, x, y);
        worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("({a},{b},{x};{y})"));
    }
    worst.finish(tol)
}

pub fn verify_module_equivalence(e: &ModuleEquivalenceData) -> Residual {
    module_coherence_residual(&e.relabeled_source(), &e.target, &e.tensorator, e.tol())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleFactorization {
    pub unitary_equivalence: ModuleEquivalenceData,
    pub positive_part: ModuleGauge,
    pub recomposition: f64,
    pub unitarity: f64,
    pub unitary_coherence: Residual,
    pub positive_coherence: Residual,
}

/// Blockwise `t = p · u` with both factors certified.
pub fn factorize_module_equivalence(e: &ModuleEquivalenceData) -> Result<ModuleFactorization> {
    let tol = e.tol();
    let coherence = verify_module_equivalence(e);
    if !coherence.pass {
        return Err(Error::Precondition(format!(
            "module equivalence is not coherent (residual {:e} at {})",
            coherence.residual,
            coherence.worst.as_deref().unwrap_or("?")
        )));
    }
    let mut recomposition = 0.0f64;
    let mut up = BTreeMap::new();
    let mut pp = BTreeMap::new();
    for (&(a, x, y), blk) in e.tensorator.blocks() {
        if a == 0 {
            up.insert((a, x, y), blk.clone());
            pp.insert((a, x, y), blk.clone());
            continue;
        }
        let split = polar_decompose_matrix(blk).map_err(|err| match err {
            Error::Numerical { message, .. } => Error::Numerical {
                block: format!("({a},{x};{y})"),
                message,
            },
            other => other,
        })?;
        recomposition = recomposition.max(split.residual);
        up.insert((a, x, y), split.unitary);
        pp.insert((a, x, y), split.positive);
    }
    let u = ModuleGauge { blocks: up };
    let p = ModuleGauge { blocks: pp };
    let unitary_coherence = module_coherence_residual(&e.relabeled_source(), &e.target, &u, 100.0 * tol);
    let positive_coherence = module_coherence_residual(&e.target, &e.target, &p, 100.0 * tol);
    for (name, res) in [("unitary factor", &unitary_coherence), ("positive factor", &positive_coherence)] {
        if !res.pass {
            return Err(Error::Decomposition(format!(
                "{name} is not coherent (residual {:e} at {}); the input is not a module equivalence between unitary presentations",
                res.residual,
                res.worst.as_deref().unwrap_or("?")
            )));
        }
    }
    Ok(ModuleFactorization {
        unitary_equivalence: e.with_tensorator(u.clone()),
        positive_part: p,
        recomposition,
        unitarity: u.unitarity_residual(),
        unitary_coherence,
        positive_coherence,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleTrivialization {
    /// One positive scalar per module simple, `1` on the first simple of
    /// each connected component.
    pub mu: Vec<f64>,
    pub lstsq_residual: f64,
    pub reconstruction: f64,
}

/// Connected components of the action graph, each listed in increasing order.
pub fn module_components(m: &ModuleData) -> Vec<Vec<usize>> {
    let k = m.rank();
    let mut comp = vec![usize::MAX; k];
    let mut out = Vec::new();
    for start in 0..k {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        comp[start] = id;
        while let Some(x) = stack.pop() {
            members.push(x);
            for (_, a, b) in m.vertices().into_iter().filter(|v| v.1 == x || v.2 == x) {
                for y in [a, b] {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        stack.push(y);
                    }
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Recovers `μ` with `t(a,m;m') = μ_m / μ_{m'}` from a positive module
/// structure on the identity functor.
pub fn trivialize_positive_module(p: &ModuleGauge, m: &ModuleData) -> Result<ModuleTrivialization> {
    let tol = m.tol;
    let k = m.rank();
    let comps = module_components(m);
    let mut rows: Vec<(Vec<(usize, f64)>, f64)> = comps.iter().map(|c| (vec![(c[0], 1.0)], 0.0)).collect();
    for (&(a, x, y), blk) in p.blocks() {
        if !polar::is_positive(blk, tol) {
            return Err(Error::Precondition(format!("module gauge block ({a},{x};{y}) is not positive")));
        }
        let (lambda, dev) = linalg::scalar_part(blk);
        if dev > tol {
            return Err(Error::Inconsistent(format!(
                "module gauge block ({a},{x};{y}) is not a scalar multiple of the identity (deviation {dev:e})"
            )));
        }
        if a != 0 {
            rows.push((vec![(x, 1.0), (y, -1.0)], lambda.re.ln()));
        }
    }
    let mut am = nalgebra::DMatrix::zeros(rows.len(), k);
    let mut bv = nalgebra::DVector::zeros(rows.len());
    for (i, (coeffs, v)) in rows.iter().enumerate() {
        for &(j, w) in coeffs {
            am[(i, j)] += w;
        }
        bv[i] = *v;
    }
    let sol = linalg::min_norm_lstsq(&am, &bv);
    if sol.residual > tol {
        return Err(Error::Inconsistent(format!(
            "log-linear system has residual {:e}; the positive module structure is not a coboundary",
            sol.residual
        )));
    }
    let mu: Vec<f64> = sol.x.iter().map(|v| v.exp()).collect();
    let mu_c: Vec<Complex64> = mu.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let reconstruction = ModuleGauge::coboundary(m, &mu_c).distance(p);
    let coherence = module_coherence_residual(m, m, p, 100.0 * tol);
    if !coherence.pass {
        return Err(Error::Precondition(format!(
            "positive module structure is not coherent (residual {:e})",
            coherence.residual
        )));
    }
    if reconstruction > 100.0 * tol {
        return Err(Error::Inconsistent(format!("coboundary of the solution misses p by {reconstruction:e}")));
    }
    Ok(ModuleTrivialization {
        mu,
        lstsq_residual: sol.residual,
        reconstruction,
    })
}

/// Max relative residual of `g(a,m;m') η_{m'} = η_m f(a,m;m')`: the
/// naturality of `η` as a module natural transformation `(id, f) ⇒ (id, g)`.
pub fn module_nat_iso_residual(eta: &[Complex64], f: &ModuleGauge, g: &ModuleGauge, tol: f64) -> Residual {
    let mut worst = MaxTracker::default();
    for (&(a, x, y), fb) in f.blocks() {
        let lhs = g.get(a, x, y) * eta[y];
        let rhs = fb * eta[x];
        worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("({a},{x};{y})"));
    }
    worst.finish(tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarizedModuleEquivalence {
    pub equivalence: ModuleEquivalenceData,
    /// Components of the module natural isomorphism from input to output.
    pub nat_iso: Vec<f64>,
    pub factorization: ModuleFactorization,
    pub trivialization: ModuleTrivialization,
    pub unitarity: Residual,
    pub coherence: Residual,
    pub naturality: Residual,
}

/// Factor, trivialize the positive part, fold `η = 1/μ` back in.
pub fn unitarize_module_equivalence(e: &ModuleEquivalenceData) -> Result<UnitarizedModuleEquivalence> {
    let tol = e.tol();
    for (name, md) in [("source", &e.source), ("target", &e.target)] {
        let u = verify_module_unitary(md);
        if !u.pass {
            return Err(Error::Precondition(format!(
                "{name} L-symbols are not unitary (residual {:e}); both ends must be unitary presentations",
                u.residual
            )));
        }
    }
    let factorization = factorize_module_equivalence(e)?;
    let trivialization = trivialize_positive_module(&factorization.positive_part, &e.target)?;
    let eta: Vec<f64> = trivialization.mu.iter().map(|v| 1.0 / v).collect();
    let eta_c: Vec<Complex64> = eta.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let out = ModuleGauge::coboundary(&e.target, &eta_c).compose(&e.tensorator);
    let unitarity = Residual::new(out.unitarity_residual(), 10.0 * tol, None, out.blocks.len());
    let coherence = module_coherence_residual(&e.relabeled_source(), &e.target, &out, 100.0 * tol);
    let naturality = module_nat_iso_residual(&eta_c, &e.tensorator, &out, 100.0 * tol);
    if !unitarity.pass || !coherence.pass {
        return Err(Error::Decomposition(format!(
            "unitarized module tensorator misses its certificates (unitarity {:e}, coherence {:e})",
            unitarity.residual, coherence.residual
        )));
    }
    Ok(UnitarizedModuleEquivalence {
        equivalence: e.with_tensorator(out),
        nat_iso: eta,
        factorization,
        trivialization,
        unitarity,
        coherence,
        naturality,
    })
}
