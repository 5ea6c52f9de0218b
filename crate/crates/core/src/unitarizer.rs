//! Monoidal equivalences between skeletal fusion categories and their
//! unitarization.
//!
//! An equivalence is a bijection of simples together with a tensorator
//! `t(a,b;c)` written over target labels. It is coherent iff the target
//! F-symbols are the relabeled source F-symbols gauged by `t`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fusion::basis::ActionTable;
use crate::fusion::{verify_unitary, FSymbolSet, FusionRing, Gauge, NatIso};
use crate::linalg::{self, CMatrix};
use crate::polar::{self, polar_decompose_gauge};
use crate::report::{MaxTracker, Residual};

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceData {
    pub source_f: FSymbolSet,
    pub target_f: FSymbolSet,
    /// `simple_map[a]` is the target index of source simple `a`.
    pub simple_map: Vec<usize>,
    /// Over target labels.
    pub tensorator: Gauge,
}

impl EquivalenceData {
    /// Checks that `simple_map` is a ring isomorphism and that the
    /// tensorator lives over the target ring. Coherence is not checked.
    pub fn new(source_f: FSymbolSet, target_f: FSymbolSet, simple_map: Vec<usize>, tensorator: Gauge) -> Result<Self> {
        check_ring_isomorphism(source_f.ring(), target_f.ring(), &simple_map)?;
        target_f.ring().ensure_same(tensorator.ring())?;
        Ok(EquivalenceData {
            source_f,
            target_f,
            simple_map,
            tensorator,
        })
    }

    pub fn identity(f: &FSymbolSet) -> Self {
        EquivalenceData {
            source_f: f.clone(),
            target_f: f.clone(),
            simple_map: (0..f.ring().rank()).collect(),
            tensorator: Gauge::identity(f.ring()),
        }
    }

    /// `(id, t)` from `f` to `apply_gauge(f, t)`.
    pub fn from_gauge(f: &FSymbolSet, t: &Gauge) -> Result<Self> {
        let target = crate::fusion::apply_gauge(f, t)?;
        EquivalenceData::new(f.clone(), target, (0..f.ring().rank()).collect(), t.clone())
    }

    pub fn tol(&self) -> f64 {
        self.target_f.tol()
    }

    /// Source F-symbols transported to target labels.
    pub fn relabeled_source(&self) -> FSymbolSet {
        self.source_f.relabel(&self.simple_map, self.target_f.ring())
    }

    pub fn with_tensorator(&self, tensorator: Gauge) -> Self {
        EquivalenceData {
            tensorator,
            ..self.clone()
        }
    }
}

/// Exact check that `map` is a bijection preserving duals and fusion
/// multiplicities.
pub fn check_ring_isomorphism(src: &FusionRing, tgt: &FusionRing, map: &[usize]) -> Result<()> {
    let r = src.rank();
    if tgt.rank() != r || map.len() != r {
        return Err(Error::input(format!(
            "simple map of length {} between rings of rank {} and {}",
            map.len(),
            r,
            tgt.rank()
        )));
    }
    let mut seen = vec![false; r];
    for &m in map {
        if m >= r || seen[m] {
            return Err(Error::input("simple map is not a bijection"));
        }
        seen[m] = true;
    }
    if map[0] != 0 {
        return Err(Error::input("simple map must send the unit to the unit"));
    }
    for a in 0..r {
        if map[src.dual(a)] != tgt.dual(map[a]) {
            return Err(Error::input(format!("simple map does not preserve the dual of {}", src.label(a))));
        }
        for b in 0..r {
            for c in 0..r {
                if src.n(a, b, c) != tgt.n(map[a], map[b], map[c]) {
                    return Err(Error::input(format!(
                        "simple map does not preserve N({},{},{})",
                        src.label(a),
                        src.label(b),
                        src.label(c)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Max over blocks of `‖G_R(t) F_Cᵀ − F_Dᵀ G_L(t)‖ / ‖F_Dᵀ G_L(t)‖`, the
/// skeletal coherence equation of `(id, t): F_C → F_D`.
pub fn coherence_residual(fc: &FSymbolSet, fd: &FSymbolSet, t: &Gauge, tol: f64) -> Residual {
    let mut worst = MaxTracker::default();
    for (&(a, b, c, d), m) in fc.blocks() {
        let target = fd.get(a, b, c, d);
        let lhs = t.right_tree(a, b, c, d) * m.transpose();
        let rhs = target.transpose() * t.left_tree(a, b, c, d);
        worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("({a},{b},{c};{d})"));
    }
    worst.finish(tol)
}

pub fn verify_equivalence(e: &EquivalenceData) -> Result<Residual> {
    check_ring_isomorphism(e.source_f.ring(), e.target_f.ring(), &e.simple_map)?;
    e.target_f.ring().ensure_same(e.tensorator.ring())?;
    Ok(coherence_residual(&e.relabeled_source(), &e.target_f, &e.tensorator, e.tol()))
}

/// Residuals certifying a factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationCertificates {
    /// Max blockwise `‖p·u − t‖ / ‖t‖`.
    pub recomposition: f64,
    /// Max blockwise unitarity defect of `u`.
    pub unitarity: f64,
    /// Coherence of `(id, u)` from source to target.
    pub unitary_coherence: Residual,
    /// Coherence of `(id, p)` as an auto-equivalence of the target.
    pub positive_coherence: Residual,
    /// Max deviation of `p` on the tree bases from `√(G G†)` of the
    /// tensorator on the same bases.
    pub positive_root: f64,
    /// Transport identity `|G_R| F_Dᵀ = F_Dᵀ |G_L|`, only available when both
    /// F-sets are unitary.
    pub transport: Option<Residual>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub unitary_equivalence: EquivalenceData,
    pub positive_part: Gauge,
    pub certificates: FactorizationCertificates,
}

/// Splits the tensorator as `t = p · u` blockwise and certifies both factors.
pub fn factorize_equivalence(e: &EquivalenceData) -> Result<Factorization> {
    let tol = e.tol();
    let coherence = verify_equivalence(e)?;
    if !coherence.pass {
        return Err(Error::Precondition(format!(
            "equivalence is not coherent (residual {:e} at {})",
            coherence.residual,
            coherence.worst.as_deref().unwrap_or("?")
        )));
    }
    let split = polar_decompose_gauge(&e.tensorator)?;
    let (u, p) = (split.unitary_part, split.positive_part);
    let fc = e.relabeled_source();
    let fd = &e.target_f;

    let unitary_coherence = coherence_residual(&fc, fd, &u, 100.0 * tol);
    let positive_coherence = coherence_residual(fd, fd, &p, 100.0 * tol);

    let mut positive_root = 0.0f64;
    for (&(a, b, c, d), _) in fd.nontrivial_blocks() {
        for (tree_t, tree_p) in [
            (e.tensorator.right_tree(a, b, c, d), p.right_tree(a, b, c, d)),
            (e.tensorator.left_tree(a, b, c, d), p.left_tree(a, b, c, d)),
        ] {
            let root = polar::hermitian_sqrt(&(&tree_t * tree_t.adjoint()), tol)?;
            positive_root = positive_root.max(linalg::rel_diff(&tree_p, &root));
        }
    }

    let unitary_ends = verify_unitary(&fc).pass && verify_unitary(fd).pass;
    let transport = if unitary_ends {
        let mut worst = MaxTracker::default();
        for (&(a, b, c, d), m) in fc.nontrivial_blocks() {
            let x = e.tensorator.right_tree(a, b, c, d);
            let y = e.tensorator.left_tree(a, b, c, d);
            let v = m.transpose();
            let w = fd.get(a, b, c, d).transpose();
            let res = polar::transport_check(&x, &y, &v, &w, 10.0 * tol)?;
            worst.observe(res.residual, || format!("({a},{b},{c};{d})"));
        }
        Some(worst.finish(100.0 * tol))
    } else {
        None
    };

    for (name, res) in [("unitary factor", &unitary_coherence), ("positive factor", &positive_coherence)] {
        if !res.pass {
            return Err(Error::Decomposition(format!(
                "{name} is not coherent (residual {:e} at {}); the input is not a monoidal equivalence between unitary presentations",
                res.residual,
                res.worst.as_deref().unwrap_or("?")
            )));
        }
    }

    Ok(Factorization {
        unitary_equivalence: e.with_tensorator(u.clone()),
        positive_part: p,
        certificates: FactorizationCertificates {
            recomposition: split.residual,
            unitarity: u.unitarity_residual(),
            unitary_coherence,
            positive_coherence,
            positive_root,
            transport,
        },
    })
}

/// Positive scalars `μ` with `coboundary(μ) = p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trivialization {
    pub mu: NatIso,
    /// Max-abs residual of the log-linear system.
    pub lstsq_residual: f64,
    /// Max relative deviation of `coboundary(μ)` from `p`.
    pub reconstruction: f64,
}

/// Min-norm solution of `x_a + x_b − x_c = v` over the given equations
/// together with `x_0 = 0`. Returns the solution and the max-abs residual.
pub fn solve_positive_coboundary(rank: usize, equations: &[(usize, usize, usize, f64)]) -> (Vec<f64>, f64) {
    let rows = equations.len() + 1;
    let mut a = DMatrix::zeros(rows, rank);
    let mut b = DVector::zeros(rows);
    a[(0, 0)] = 1.0;
    for (i, &(x, y, z, v)) in equations.iter().enumerate() {
        a[(i + 1, x)] += 1.0;
        a[(i + 1, y)] += 1.0;
        a[(i + 1, z)] -= 1.0;
        b[i + 1] = v;
    }
    let sol = linalg::min_norm_lstsq(&a, &b);
    (sol.x.iter().copied().collect(), sol.residual)
}

/// Recovers `μ` from a positive coherent monoidal structure `p` on the
/// identity of `F`, by solving `log μ_a + log μ_b − log μ_c = log λ(a,b;c)`.
pub fn trivialize_positive_monoidal(p: &Gauge, f: &FSymbolSet) -> Result<Trivialization> {
    let tol = f.tol();
    let ring = f.ring();
    ring.ensure_same(p.ring())?;
    let mut equations = Vec::new();
    for (&(a, b, c), m) in p.blocks() {
        if !polar::is_positive(m, tol) {
            return Err(Error::Precondition(format!("gauge block ({a},{b};{c}) is not positive")));
        }
        let (lambda, dev) = linalg::scalar_part(m);
        if dev > tol {
            return Err(Error::Inconsistent(format!(
                "gauge block ({a},{b};{c}) is not a scalar multiple of the identity (deviation {dev:e}); not coherent, not trivializable"
            )));
        }
        if a != 0 && b != 0 {
            equations.push((a, b, c, lambda.re.ln()));
        }
    }
    let (x, lstsq_residual) = solve_positive_coboundary(ring.rank(), &equations);
    if lstsq_residual > tol {
        return Err(Error::Inconsistent(format!(
            "log-linear system has residual {lstsq_residual:e}; the positive structure is not a coboundary"
        )));
    }
    let coherence = coherence_residual(f, f, p, 100.0 * tol);
    if !coherence.pass {
        return Err(Error::Precondition(format!(
            "positive structure is not coherent (residual {:e} at {})",
            coherence.residual,
            coherence.worst.as_deref().unwrap_or("?")
        )));
    }
    let mu = NatIso::new(ring.clone(), x.iter().map(|v| Complex64::new(v.exp(), 0.0)).collect())?;
    let reconstruction = Gauge::coboundary(&mu).distance(p);
    if reconstruction > 100.0 * tol {
        return Err(Error::Inconsistent(format!("coboundary of the solution misses p by {reconstruction:e}")));
    }
    Ok(Trivialization {
        mu,
        lstsq_residual,
        reconstruction,
    })
}

/// Max over vertices of `‖g η_c − η_a η_b f‖ / ‖η_a η_b f‖`: the
/// monoidality of `η: (F, f) ⇒ (F, g)`.
pub fn monoidality_residual(eta: &NatIso, f: &Gauge, g: &Gauge, tol: f64) -> Result<Residual> {
    f.ring().ensure_same(g.ring())?;
    f.ring().ensure_same(eta.ring())?;
    let e = eta.components();
    let mut worst = MaxTracker::default();
    for (&(a, b, c), fm) in f.blocks() {
        let lhs = g.get(a, b, c) * e[c];
        let rhs = fm * (e[a] * e[b]);
        worst.observe(linalg::rel_diff(&lhs, &rhs), || format!("({a},{b};{c})"));
    }
    Ok(worst.finish(tol))
}

/// `c(η) · t`: the tensorator transported along `η`.
pub fn transport_tensorator(eta: &NatIso, t: &Gauge) -> Result<Gauge> {
    let e = eta.components();
    let unit = e[0];
    Ok(t.map_blocks(|(a, b, c), m| m * (e[a] * e[b] / (e[c] * unit))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitarizedEquivalence {
    pub equivalence: EquivalenceData,
    /// Monoidal natural isomorphism from the input to the output.
    pub nat_iso: NatIso,
    pub factorization: FactorizationCertificates,
    pub trivialization: Trivialization,
    /// Max blockwise unitarity defect of the output tensorator.
    pub unitarity: Residual,
    pub coherence: Residual,
    pub monoidality: Residual,
}

/// Factor, trivialize the positive part, and fold the trivializer back in as
/// a monoidal natural isomorphism.
pub fn unitarize_equivalence(e: &EquivalenceData) -> Result<UnitarizedEquivalence> {
    let tol = e.tol();
    for (name, f) in [("source", &e.source_f), ("target", &e.target_f)] {
        let u = verify_unitary(f);
        if !u.pass {
            return Err(Error::Precondition(format!(
                "{name} F-symbols are not unitary (residual {:e}); both ends must be unitary presentations",
                u.residual
            )));
        }
    }
    let fact = factorize_equivalence(e)?;
    let triv = trivialize_positive_monoidal(&fact.positive_part, &e.target_f)?;
    let eta = triv.mu.inverse();
    let out = transport_tensorator(&eta, &e.tensorator)?;
    let unitarity = Residual::new(out.unitarity_residual(), 10.0 * tol, None, out.blocks().count());
    let coherence = coherence_residual(&e.relabeled_source(), &e.target_f, &out, 100.0 * tol);
    let monoidality = monoidality_residual(&eta, &e.tensorator, &out, 100.0 * tol)?;
    if !unitarity.pass || !coherence.pass {
        return Err(Error::Decomposition(format!(
            "unitarized tensorator misses its certificates (unitarity {:e}, coherence {:e})",
            unitarity.residual, coherence.residual
        )));
    }
    Ok(UnitarizedEquivalence {
        equivalence: e.with_tensorator(out),
        nat_iso: eta,
        factorization: fact.certificates,
        trivialization: triv,
        unitarity,
        coherence,
        monoidality,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NatIsoUnitarization {
    /// Unit-modulus components `η_a / |η_a|`.
    pub unitary: NatIso,
    /// Max `||η_a| − 1|`.
    pub certificate: f64,
    pub monoidality: Residual,
    /// Max `|ρ_a ρ_b / ρ_c − 1|` over channels for `ρ = |η|`.
    pub character_residual: f64,
}

/// A monoidal natural isomorphism between unitary equivalences is unitary:
/// splits `η = u · ρ`, checks that `ρ` is a positive character and that it is
/// trivial.
pub fn unitarize_nat_iso(eta: &NatIso, e1: &EquivalenceData, e2: &EquivalenceData) -> Result<NatIsoUnitarization> {
    let tol = e1.tol();
    if e1.simple_map != e2.simple_map {
        return Err(Error::input("natural isomorphism between equivalences with different simple maps"));
    }
    for (name, e) in [("first", e1), ("second", e2)] {
        let res = e.tensorator.unitarity_residual();
        if res > 10.0 * tol {
            return Err(Error::Precondition(format!("{name} equivalence has a non-unitary tensorator (residual {res:e})")));
        }
    }
    let monoidality = monoidality_residual(eta, &e1.tensorator, &e2.tensorator, tol)?;
    if !monoidality.pass {
        return Err(Error::Precondition(format!(
            "natural isomorphism is not monoidal (residual {:e} at {})",
            monoidality.residual,
            monoidality.worst.as_deref().unwrap_or("?")
        )));
    }
    let rho: Vec<f64> = eta.components().iter().map(|z| z.norm()).collect();
    let ring = eta.ring();
    let mut character_residual = 0.0f64;
    for (a, b, c) in ring.vertices() {
        character_residual = character_residual.max((rho[a] * rho[b] / rho[c] - 1.0).abs());
    }
    if character_residual > tol {
        return Err(Error::Inconsistent(format!(
            "|η| is not a character of the fusion ring (residual {character_residual:e})"
        )));
    }
    let certificate = rho.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    if certificate > tol {
        return Err(Error::Inconsistent(format!(
            "|η| is a nontrivial positive character (max ||η_a| − 1| = {certificate:e})"
        )));
    }
    let unitary = NatIso::new(ring.clone(), eta.components().iter().map(|z| z / z.norm()).collect())?;
    Ok(NatIsoUnitarization {
        unitary,
        certificate,
        monoidality,
        character_residual,
    })
}

/// Outcome of [`search_unitary_gauge`].
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeSearch {
    pub gauge: Gauge,
    /// Unitarity residual of `apply_gauge(F, gauge)`.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Scalar exponents describing how a positive scalar gauge rescales one
/// F-block: entry `(i, j)` is multiplied by `exp(col[j]·x − row[i]·x)`.
struct BlockScaling {
    block: CMatrix,
    row: Vec<Vec<(usize, f64)>>,
    col: Vec<Vec<(usize, f64)>>,
}

/// Heuristic search for a gauge making `F` unitary.
///
/// The search runs over positive scalar gauges `exp(x_v)` (phases and
/// unitary blocks cannot change unitarity). Each iteration linearizes the
/// entries of `B†B − I` over all rescaled blocks and takes a damped
/// Gauss-Newton step with damping 0.5, backtracking on increase. Stalls
/// trigger a seeded random restart; the best gauge seen is returned.
pub fn search_unitary_gauge(f: &FSymbolSet, max_iters: usize, seed: u64) -> GaugeSearch {
    let ring = f.ring();
    let tol = f.tol();
    let start = verify_unitary(f).residual;
    if start <= tol {
        return GaugeSearch {
            gauge: Gauge::identity(ring),
            residual: start,
            iterations: 0,
            converged: true,
        };
    }

    let vars: Vec<(usize, usize, usize)> = ring.vertices().into_iter().filter(|v| v.0 != 0 && v.1 != 0).collect();
    let index: BTreeMap<(usize, usize, usize), usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let table = ActionTable::regular(ring);
    let scalings: Vec<BlockScaling> = f
        .nontrivial_blocks()
        .map(|(&(a, b, c, d), m)| {
            let basis = table.basis(a, b, c, d);
            let mut row = vec![Vec::new(); basis.rows];
            let mut col = vec![Vec::new(); basis.cols];
            for e in ring.channels(a, b) {
                for x in 0..ring.n(a, b, e) {
                    for y in 0..ring.n(e, c, d) {
                        let i = basis.row(e, x, y);
                        push_var(&mut row[i], &index, (a, b, e));
                        push_var(&mut row[i], &index, (e, c, d));
                    }
                }
            }
            for fi in ring.channels(b, c) {
                for x in 0..ring.n(b, c, fi) {
                    for y in 0..ring.n(a, fi, d) {
                        let j = basis.col(fi, x, y);
                        push_var(&mut col[j], &index, (b, c, fi));
                        push_var(&mut col[j], &index, (a, fi, d));
                    }
                }
            }
            BlockScaling {
                block: m.clone(),
                row,
                col,
            }
        })
        .collect();

    let nv = vars.len();
    let eval = |x: &[f64]| -> (Vec<CMatrix>, f64) {
        let blocks: Vec<CMatrix> = scalings.iter().map(|s| rescale(s, x)).collect();
        let res = blocks.iter().map(linalg::unitarity_residual).fold(0.0, f64::max);
        (blocks, if res.is_nan() { f64::INFINITY } else { res })
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; nv];
    let (mut blocks, mut res) = eval(&x);
    let mut best = (x.clone(), res);
    let mut stall = 0;
    let mut iterations = 0;
    while iterations < max_iters && best.1 > tol {
        iterations += 1;
        let (jac, r) = linearize(&scalings, &blocks, nv);
        let delta = linalg::min_norm_lstsq(&jac, &(-r)).x;
        let mut step = 0.5;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(xi, di)| xi + step * di).collect();
            let (tb, tr) = eval(&trial);
            if tr < res {
                x = trial;
                blocks = tb;
                res = tr;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if res < best.1 {
            best = (x.clone(), res);
        }
        if improved {
            stall = 0;
        } else {
            stall += 1;
            if stall >= 3 {
                x = (0..nv).map(|_| rng.random_range(-1.0..1.0)).collect();
                (blocks, res) = eval(&x);
                stall = 0;
            }
        }
    }

    let xbest = best.0;
    let gauge = Gauge::from_fn(ring, |a, b, c, n| {
        let s = index.get(&(a, b, c)).map_or(1.0, |&i| xbest[i].exp());
        linalg::identity(n) * Complex64::new(s, 0.0)
    });
    let residual = crate::fusion::apply_gauge(f, &gauge)
        .map(|g| verify_unitary(&g).residual)
        .unwrap_or(f64::INFINITY);
    GaugeSearch {
        gauge,
        residual,
        iterations,
        converged: residual <= tol,
    }
}

fn push_var(list: &mut Vec<(usize, f64)>, index: &BTreeMap<(usize, usize, usize), usize>, v: (usize, usize, usize)) {
    if let Some(&i) = index.get(&v) {
        list.push((i, 1.0));
    }
}

fn exponent(s: &BlockScaling, i: usize, j: usize, x: &[f64]) -> f64 {
    let c: f64 = s.col[j].iter().map(|&(k, w)| w * x[k]).sum();
    let r: f64 = s.row[i].iter().map(|&(k, w)| w * x[k]).sum();
    c - r
}

fn rescale(s: &BlockScaling, x: &[f64]) -> CMatrix {
    let mut out = s.block.clone();
    for i in 0..out.nrows() {
        for j in 0..out.ncols() {
            out[(i, j)] *= exponent(s, i, j, x).exp();
        }
    }
    out
}

/// Residual vector (real and imaginary parts of `B†B − I`) and its
/// Jacobian in the log-scale variables.
fn linearize(scalings: &[BlockScaling], blocks: &[CMatrix], nv: usize) -> (DMatrix<f64>, DVector<f64>) {
    let total: usize = blocks.iter().map(|b| 2 * b.ncols() * b.ncols()).sum();
    let mut jac = DMatrix::zeros(total, nv);
    let mut r = DVector::zeros(total);
    let mut row0 = 0;
    for (s, b) in scalings.iter().zip(blocks) {
        let n = b.ncols();
        let m = b.adjoint() * b - linalg::identity(n);
        for p in 0..n {
            for q in 0..n {
                let k = row0 + 2 * (p * n + q);
                r[k] = m[(p, q)].re;
                r[k + 1] = m[(p, q)].im;
            }
        }
        // d/dx_v of B_ij is B_ij * (col_j − row_i)_v.
        for v in 0..nv {
            let mut db = CMatrix::zeros(b.nrows(), n);
            let mut any = false;
            for i in 0..b.nrows() {
                let rw: f64 = s.row[i].iter().filter(|e| e.0 == v).map(|e| e.1).sum();
                for j in 0..n {
                    let cw: f64 = s.col[j].iter().filter(|e| e.0 == v).map(|e| e.1).sum();
                    let w = cw - rw;
                    if w != 0.0 {
                        db[(i, j)] = b[(i, j)] * w;
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            let dm = db.adjoint() * b + b.adjoint() * &db;
            for p in 0..n {
                for q in 0..n {
                    let k = row0 + 2 * (p * n + q);
                    jac[(k, v)] = dm[(p, q)].re;
                    jac[(k + 1, v)] = dm[(p, q)].im;
                }
            }
        }
        row0 += 2 * n * n;
    }
    (jac, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::linalg::c;

    #[test]
    fn identity_equivalence_has_zero_residual() {
        let f = builtin::fibonacci_f();
        let rep = verify_equivalence(&EquivalenceData::identity(&f)).unwrap();
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn non_isomorphism_is_rejected() {
        let f = builtin::ising_f();
        // Swapping sigma and psi does not preserve the fusion rules.
        let err = EquivalenceData::new(f.clone(), f.clone(), vec![0, 2, 1], Gauge::identity(f.ring())).unwrap_err();
        assert!(err.is_input_error());
    }

    #[test]
    fn doubled_block_breaks_coherence() {
        let f = builtin::fibonacci_f();
        let t = Gauge::from_fn(f.ring(), |a, b, cc, n| {
            let s = if (a, b, cc) == (1, 1, 1) { 2.0 } else { 1.0 };
            linalg::identity(n) * c(s, 0.0)
        });
        let e = EquivalenceData::new(f.clone(), f.clone(), vec![0, 1], t).unwrap();
        assert!(!verify_equivalence(&e).unwrap().pass);
    }

    #[test]
    fn fibonacci_trivializer_recovers_mu() {
        let f = builtin::fibonacci_f();
        let mu = NatIso::new(f.ring().clone(), vec![c(1.0, 0.0), c(2.0, 0.0)]).unwrap();
        let p = Gauge::coboundary(&mu);
        let t = trivialize_positive_monoidal(&p, &f).unwrap();
        assert!((t.mu.components()[1].re - 2.0).abs() < 1e-14);
        assert!(t.lstsq_residual < 1e-14);
    }

    #[test]
    fn fibonacci_phase_violating_monoidality() {
        let f = builtin::fibonacci_f();
        let e = EquivalenceData::identity(&f);
        let eta = NatIso::new(f.ring().clone(), vec![c(1.0, 0.0), Complex64::from_polar(1.0, 0.7)]).unwrap();
        assert!(matches!(unitarize_nat_iso(&eta, &e, &e), Err(Error::Precondition(_))));
    }

    #[test]
    fn already_unitary_search_returns_identity() {
        let f = builtin::fibonacci_f();
        let s = search_unitary_gauge(&f, 10, 0);
        assert_eq!(s.iterations, 0);
        assert_eq!(s.gauge, Gauge::identity(f.ring()));
        assert!(s.converged);
    }
}
