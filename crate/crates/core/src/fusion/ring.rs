use std::fmt;

use crate::error::{Error, Result};

/// Fusion rules of a skeletal fusion category.
///
/// Simples are indexed `0..rank`, the unit is always `0`, and
/// `N(a, b, c) = dim Hom(c, a ⊗ b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionRing {
    labels: Vec<String>,
    dual: Vec<usize>,
    n: Vec<u32>,
}

/// Outcome of [`verify_ring_axioms`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingReport {
    pub pass: bool,
    /// First violated identity, in a human-readable form.
    pub violation: Option<String>,
}

impl FusionRing {
    /// Builds a ring from a dense `rank × rank × rank` tensor.
    ///
    /// Only the shape is checked here; the axioms are checked by
    /// [`verify_ring_axioms`].
    pub fn new(labels: Vec<String>, dual: Vec<usize>, fusion: &[Vec<Vec<u32>>]) -> Result<Self> {
        let rank = labels.len();
        if rank == 0 {
            return Err(Error::input("fusion ring must have at least one simple object"));
        }
        if dual.len() != rank {
            return Err(Error::input(format!(
                "dual table has length {} but rank is {rank}",
                dual.len()
            )));
        }
        if let Some(&bad) = dual.iter().find(|&&d| d >= rank) {
            return Err(Error::input(format!("dual index {bad} out of range")));
        }
        if fusion.len() != rank || fusion.iter().any(|m| m.len() != rank || m.iter().any(|r| r.len() != rank)) {
            return Err(Error::input(format!("fusion tensor must have shape {rank}x{rank}x{rank}")));
        }
        let n = fusion.iter().flatten().flatten().copied().collect();
        Ok(FusionRing { labels, dual, n })
    }

    /// Builds a ring from its nonzero multiplicities `(a, b, c, N)`.
    pub fn from_entries(labels: Vec<String>, dual: Vec<usize>, entries: &[(usize, usize, usize, u32)]) -> Result<Self> {
        let rank = labels.len();
        let mut dense = vec![vec![vec![0u32; rank]; rank]; rank];
        for &(a, b, c, m) in entries {
            if a >= rank || b >= rank || c >= rank {
                return Err(Error::input(format!("fusion entry ({a},{b},{c}) out of range")));
            }
            dense[a][b][c] = m;
        }
        FusionRing::new(labels, dual, &dense)
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn unit(&self) -> usize {
        0
    }

    pub fn dual(&self, a: usize) -> usize {
        self.dual[a]
    }

    pub fn duals(&self) -> &[usize] {
        &self.dual
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn n(&self, a: usize, b: usize, c: usize) -> usize {
        let r = self.rank();
        self.n[(a * r + b) * r + c] as usize
    }

    pub(crate) fn tensor(&self) -> &[u32] {
        &self.n
    }

    /// Channels `c` with `N(a, b, c) > 0`.
    pub fn channels(&self, a: usize, b: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.rank()).filter(move |&c| self.n(a, b, c) > 0)
    }

    /// Nonzero entries `(a, b, c, N)` in lexicographic order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, u32)> {
        let r = self.rank();
        let mut out = Vec::new();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    let m = self.n(a, b, c) as u32;
                    if m > 0 {
                        out.push((a, b, c, m));
                    }
                }
            }
        }
        out
    }

    /// Admissible vertices `(a, b, c)` with `N(a, b, c) > 0`.
    pub fn vertices(&self) -> Vec<(usize, usize, usize)> {
        self.entries().into_iter().map(|(a, b, c, _)| (a, b, c)).collect()
    }

    /// Same duals and fusion tensor; labels are ignored.
    pub fn same_structure(&self, other: &FusionRing) -> bool {
        self.dual == other.dual && self.n == other.n
    }

    pub(crate) fn ensure_same(&self, other: &FusionRing) -> Result<()> {
        if self.same_structure(other) {
            Ok(())
        } else {
            Err(Error::RingMismatch(
                "operands are defined over different fusion rings".into(),
            ))
        }
    }

    pub fn is_multiplicity_free(&self) -> bool {
        self.n.iter().all(|&m| m <= 1)
    }

    /// The rank-one ring of `Vec`.
    pub fn trivial() -> Self {
        FusionRing::from_entries(vec!["1".into()], vec![0], &[(0, 0, 0, 1)]).expect("static data")
    }

    /// `τ ⊗ τ = 1 ⊕ τ`.
    pub fn fibonacci() -> Self {
        FusionRing::from_entries(
            vec!["1".into(), "tau".into()],
            vec![0, 1],
            &[(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)],
        )
        .expect("static data")
    }

    /// `σ ⊗ σ = 1 ⊕ ψ`, `σ ⊗ ψ = σ`, `ψ ⊗ ψ = 1`.
    pub fn ising() -> Self {
        let (one, s, p) = (0, 1, 2);
        FusionRing::from_entries(
            vec!["1".into(), "sigma".into(), "psi".into()],
            vec![0, 1, 2],
            &[
                (one, one, one, 1),
                (one, s, s, 1),
                (one, p, p, 1),
                (s, one, s, 1),
                (p, one, p, 1),
                (s, s, one, 1),
                (s, s, p, 1),
                (s, p, s, 1),
                (p, s, s, 1),
                (p, p, one, 1),
            ],
        )
        .expect("static data")
    }

    /// Group ring of a finite group given by its Cayley table (identity at 0).
    pub fn from_cayley_table(labels: Vec<String>, table: &[Vec<usize>]) -> Result<Self> {
        let r = table.len();
        let mut entries = Vec::new();
        let mut dual = vec![usize::MAX; r];
        for g in 0..r {
            for h in 0..r {
                let gh = table[g][h];
                entries.push((g, h, gh, 1));
                if gh == 0 {
                    dual[g] = h;
                }
            }
        }
        if dual.contains(&usize::MAX) {
            return Err(Error::input("Cayley table lacks inverses"));
        }
        FusionRing::from_entries(labels, dual, &entries)
    }
}

impl fmt::Display for FusionRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "fusion ring of rank {} ({})", self.rank(), self.labels.join(", "))
    }
}

/// Checks unit laws, duality, Frobenius reciprocity and associativity with
/// exact integer arithmetic, reporting the first violated identity.
pub fn verify_ring_axioms(ring: &FusionRing) -> RingReport {
    match first_violation(ring) {
        None => RingReport {
            pass: true,
            violation: None,
        },
        Some(v) => RingReport {
            pass: false,
            violation: Some(v),
        },
    }
}

fn first_violation(ring: &FusionRing) -> Option<String> {
    let r = ring.rank();
    let l = |a: usize| ring.label(a).to_string();

    if ring.dual(0) != 0 {
        return Some("dual(1) must equal the unit".into());
    }
    for a in 0..r {
        if ring.dual(ring.dual(a)) != a {
            return Some(format!("dual is not an involution at {}", l(a)));
        }
    }
    for a in 0..r {
        for b in 0..r {
            let want = usize::from(a == b);
            if ring.n(0, a, b) != want {
                return Some(format!("unit law: N(1,{},{}) = {} != {want}", l(a), l(b), ring.n(0, a, b)));
            }
            if ring.n(a, 0, b) != want {
                return Some(format!("unit law: N({},1,{}) = {} != {want}", l(a), l(b), ring.n(a, 0, b)));
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            let want = usize::from(b == ring.dual(a));
            if ring.n(a, b, 0) != want {
                return Some(format!("rigidity: N({},{},1) = {} != {want}", l(a), l(b), ring.n(a, b, 0)));
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                let v = ring.n(a, b, c);
                let left = ring.n(ring.dual(a), c, b);
                let right = ring.n(c, ring.dual(b), a);
                if v != left || v != right {
                    return Some(format!(
                        "Frobenius reciprocity: N({},{},{}) = {v}, N({}*,{},{}) = {left}, N({},{}*,{}) = {right}",
                        l(a), l(b), l(c), l(a), l(c), l(b), l(c), l(b), l(a)
                    ));
                }
            }
        }
    }
    for a in 0..r {
        for b in 0..r {
            for c in 0..r {
                for d in 0..r {
                    let lhs: usize = (0..r).map(|e| ring.n(a, b, e) * ring.n(e, c, d)).sum();
                    let rhs: usize = (0..r).map(|f| ring.n(b, c, f) * ring.n(a, f, d)).sum();
                    if lhs != rhs {
                        return Some(format!(
                            "associativity at ({},{},{};{}): {lhs} != {rhs}",
                            l(a), l(b), l(c), l(d)
                        ));
                    }
                }
            }
        }
    }
    None
}
