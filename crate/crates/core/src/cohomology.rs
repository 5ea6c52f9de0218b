//! Cochains of finite groups with values in `ℂ^×` and trivial action.
//!
//! The coboundary of an `n`-cochain is the multiplicative bar form
//!
//! ```text
//! δc(g₁,…,g_{n+1}) = c(g₂,…,g_{n+1}) · ∏_{i=1..n} c(…, g_i g_{i+1}, …)^{(−1)^i} · c(g₁,…,g_n)^{(−1)^{n+1}}
//! ```
//!
//! so that
//!
//! ```text
//! δη(g,h)     = η(h) η(gh)⁻¹ η(g)
//! δη(a,b,c)   = η(b,c) η(ab,c)⁻¹ η(a,bc) η(a,b)⁻¹
//! δω(a,b,c,d) = ω(b,c,d) ω(ab,c,d)⁻¹ ω(a,bc,d) ω(a,b,cd)⁻¹ ω(a,b,c)
//! ```

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fusion::{FSymbolSet, FusionRing};
use crate::linalg::{self, CMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, the identity at index 0 and
    /// inverses, all exactly.
    pub fn new(name: impl Into<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::input("group must have at least one element"));
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err(Error::input(format!("Cayley table must be {n}x{n} with entries below {n}")));
        }
        for g in 0..n {
            if table[0][g] != g || table[g][0] != g {
                return Err(Error::input("element 0 must be the identity"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::input(format!("Cayley table is not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for g in 0..n {
            match (0..n).find(|&h| table[g][h] == 0 && table[h][g] == 0) {
                Some(h) => inverse[g] = h,
                None => return Err(Error::input(format!("element {g} has no inverse"))),
            }
        }
        Ok(FiniteGroup {
            name: name.into(),
            table,
            inverse,
        })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect();
        FiniteGroup::new(format!("Z{n}"), table).expect("static data")
    }

    /// `Z2 × Z2` with `(x, y) ↦ 2x + y`.
    pub fn klein_four() -> Self {
        let table = (0..4).map(|g| (0..4).map(|h| g ^ h).collect()).collect();
        FiniteGroup::new("Z2xZ2", table).expect("static data")
    }

    /// Permutations of three letters in lexicographic order of their images.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).expect("closed");
        let table = perms
            .iter()
            .map(|g| perms.iter().map(|h| index([g[h[0]], g[h[1]], g[h[2]]])).collect())
            .collect();
        FiniteGroup::new("S3", table).expect("static data")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverse[g]
    }

    /// The fusion ring of `Vec_G`.
    pub fn fusion_ring(&self) -> FusionRing {
        FusionRing::from_cayley_table((0..self.order()).map(|g| g.to_string()).collect(), &self.table)
            .expect("validated table")
    }
}

/// A function `G^n → ℂ^×`, stored in lexicographic order of arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    group: FiniteGroup,
    degree: usize,
    values: Vec<Complex64>,
}

pub const MAX_DEGREE: usize = 3;

impl Cochain {
    pub fn new(group: FiniteGroup, degree: usize, values: Vec<Complex64>) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::input(format!("cochain degree {degree} exceeds {MAX_DEGREE}")));
        }
        let len = group.order().pow(degree as u32);
        if values.len() != len {
            return Err(Error::input(format!(
                "a degree-{degree} cochain on a group of order {} needs {len} values, got {}",
                group.order(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|z| !(z.norm() > 0.0 && z.norm().is_finite())) {
            return Err(Error::input(format!("cochain value {i} is zero or non-finite")));
        }
        Ok(Cochain { group, degree, values })
    }

    pub fn from_fn(group: &FiniteGroup, degree: usize, mut f: impl FnMut(&[usize]) -> Complex64) -> Result<Self> {
        let values = tuples(group.order(), degree).iter().map(|t| f(t)).collect();
        Cochain::new(group.clone(), degree, values)
    }

    pub fn trivial(group: &FiniteGroup, degree: usize) -> Result<Self> {
        Cochain::from_fn(group, degree, |_| Complex64::new(1.0, 0.0))
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, args: &[usize]) -> Complex64 {
        self.values[flat_index(self.group.order(), args)]
    }

    /// Value 1 whenever an argument is the identity.
    pub fn is_normalized(&self, tol: f64) -> bool {
        tuples(self.group.order(), self.degree)
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| t.contains(&0))
            .all(|(_, z)| (z - 1.0).norm() <= tol)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Cochain::new(self.group.clone(), self.degree, values)
    }

    /// Pointwise quotient.
    pub fn div(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a / b).collect();
        Cochain::new(self.group.clone(), self.degree, values)
    }

    /// Max `|c(x) − 1|`.
    pub fn distance_from_trivial(&self) -> f64 {
        self.values.iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max)
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.group != other.group || self.degree != other.degree {
            return Err(Error::input("cochains live on different groups or degrees"));
        }
        Ok(())
    }
}

fn flat_index(order: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &g| acc * order + g)
}

/// All `n`-tuples of group elements in lexicographic order.
pub fn tuples(order: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..order).map(move |g| {
                    let mut t = t.clone();
                    t.push(g);
                    t
                })
            })
            .collect();
    }
    out
}

/// The argument lists and exponents of the `n + 2` factors of `δc(args)`.
fn coboundary_terms(group: &FiniteGroup, args: &[usize]) -> Vec<(Vec<usize>, i32)> {
    let m = args.len();
    let n = m - 1;
    let mut terms = Vec::with_capacity(m + 1);
    terms.push((args[1..].to_vec(), 1));
    for i in 0..n {
        let mut t = Vec::with_capacity(n);
        t.extend_from_slice(&args[..i]);
        t.push(group.mul(args[i], args[i + 1]));
        t.extend_from_slice(&args[i + 2..]);
        terms.push((t, if i % 2 == 0 { -1 } else { 1 }));
    }
    terms.push((args[..n].to_vec(), if n.is_multiple_of(2) { -1 } else { 1 }));
    terms
}

fn coboundary_value(c: &Cochain, args: &[usize]) -> Complex64 {
    coboundary_terms(&c.group, args)
        .into_iter()
        .fold(Complex64::new(1.0, 0.0), |acc, (t, e)| {
            let v = c.value(&t);
            if e > 0 {
                acc * v
            } else {
                acc / v
            }
        })
}

/// `δc`, defined for degrees up to 2.
pub fn coboundary(c: &Cochain) -> Result<Cochain> {
    if c.degree + 1 > MAX_DEGREE {
        return Err(Error::input(format!("coboundary of a degree-{} cochain exceeds degree {MAX_DEGREE}", c.degree)));
    }
    Cochain::from_fn(&c.group, c.degree + 1, |args| coboundary_value(c, args))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport {
    pub pass: bool,
    /// Max `|δω − 1|`.
    pub residual: f64,
    pub violation: Option<Vec<usize>>,
}

/// Evaluates `δω` on every tuple, including degree 4 for 3-cochains.
/// `violation` is the first tuple in lexicographic order exceeding `tol`.
pub fn verify_cocycle(omega: &Cochain, tol: f64) -> CocycleReport {
    let mut residual = 0.0f64;
    let mut violation = None;
    for args in tuples(omega.group.order(), omega.degree + 1) {
        let dev = (coboundary_value(omega, &args) - 1.0).norm();
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        residual = residual.max(dev);
        if dev > tol && violation.is_none() {
            violation = Some(args);
        }
    }
    CocycleReport {
        pass: residual <= tol,
        residual,
        violation,
    }
}

fn require_cocycle(omega: &Cochain, tol: f64) -> Result<()> {
    let rep = verify_cocycle(omega, tol);
    if rep.pass {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "input is not a cocycle (|δω − 1| = {:e} at {:?})",
            rep.residual,
            rep.violation.unwrap_or_default()
        )))
    }
}

/// `ω = u · r` with `u = ω/|ω|` unit-modulus and `r = |ω|` positive.
pub fn polar_split_cocycle(omega: &Cochain, tol: f64) -> Result<(Cochain, Cochain)> {
    require_cocycle(omega, tol)?;
    let u = omega.values.iter().map(|z| z / z.norm()).collect();
    let r = omega.values.iter().map(|z| Complex64::new(z.norm(), 0.0)).collect();
    Ok((
        Cochain::new(omega.group.clone(), omega.degree, u)?,
        Cochain::new(omega.group.clone(), omega.degree, r)?,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleTrivializer {
    /// Positive, of degree one less than the input.
    pub eta: Cochain,
    /// Max-abs residual of `δ(log η) = log r`.
    pub residual: f64,
}

/// The real matrix of `log c ↦ log δc` from degree `n − 1` to degree `n`.
pub fn coboundary_matrix(group: &FiniteGroup, n: usize) -> DMatrix<f64> {
    let order = group.order();
    let rows = tuples(order, n);
    let cols = order.pow((n - 1) as u32);
    let mut a = DMatrix::zeros(rows.len(), cols);
    for (i, args) in rows.iter().enumerate() {
        for (t, e) in coboundary_terms(group, args) {
            a[(i, flat_index(order, &t))] += f64::from(e);
        }
    }
    a
}

/// Minimum-norm positive `η` with `δη = r`.
pub fn trivialize_positive_cocycle(r: &Cochain, tol: f64) -> Result<CocycleTrivializer> {
    if r.degree == 0 {
        return Err(Error::input("a degree-0 cochain has no trivializer"));
    }
    if let Some(i) = r.values.iter().position(|z| !(z.re > 0.0 && z.im.abs() <= tol * z.re)) {
        return Err(Error::Precondition(format!("value {i} of the cochain is not a positive real")));
    }
    let a = coboundary_matrix(&r.group, r.degree);
    let b = DVector::from_iterator(r.values.len(), r.values.iter().map(|z| z.re.ln()));
    let sol = linalg::min_norm_lstsq(&a, &b);
    if sol.residual > tol {
        return Err(Error::Inconsistent(format!(
            "log-linear coboundary system has residual {:e}; the input is not a cocycle",
            sol.residual
        )));
    }
    let eta = Cochain::new(
        r.group.clone(),
        r.degree - 1,
        sol.x.iter().map(|v| Complex64::new(v.exp(), 0.0)).collect(),
    )?;
    Ok(CocycleTrivializer {
        eta,
        residual: sol.residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleUnitarization {
    pub unitary: Cochain,
    /// Positive cochain with `ω / unitary = δη`.
    pub eta: Cochain,
    /// Max `|ω / (unitary · δη) − 1|`.
    pub certificate: f64,
}

pub fn unitarize_cocycle(omega: &Cochain, tol: f64) -> Result<CocycleUnitarization> {
    let (u, r) = polar_split_cocycle(omega, tol)?;
    let triv = trivialize_positive_cocycle(&r, tol)?;
    let d = coboundary(&triv.eta)?;
    let certificate = omega.div(&u)?.div(&d)?.distance_from_trivial();
    Ok(CocycleUnitarization {
        unitary: u,
        eta: triv.eta,
        certificate,
    })
}

/// `Vec_G^ω`: `N(g,h;gh) = 1` and `F(g,h,k;ghk) = ω(g,h,k)`.
pub fn build_vecg_category(group: &FiniteGroup, omega: &Cochain, tol: f64) -> Result<(FusionRing, FSymbolSet)> {
    if omega.degree != 3 || omega.group != *group {
        return Err(Error::input("expected a 3-cochain on the given group"));
    }
    require_cocycle(omega, tol)?;
    if !omega.is_normalized(tol) {
        return Err(Error::Precondition("3-cocycle must be normalized".into()));
    }
    let ring = group.fusion_ring();
    let mut blocks = BTreeMap::new();
    for args in tuples(group.order(), 3) {
        let (g, h, k) = (args[0], args[1], args[2]);
        let d = group.mul(group.mul(g, h), k);
        let v = if args.contains(&0) { Complex64::new(1.0, 0.0) } else { omega.value(&args) };
        blocks.insert((g, h, k, d), CMatrix::from_element(1, 1, v));
    }
    let f = FSymbolSet::new(ring.clone(), tol, blocks)?;
    Ok((ring, f))
}

/// The 3-cocycle `ω(a,b,c) = exp(2πi p a (b + c − [b + c]) / N²)` on `Z_N`,
/// with `[x]` the residue in `0..N`.
pub fn cyclic_3_cocycle(n: usize, p: usize) -> Cochain {
    let g = FiniteGroup::cyclic(n);
    let nn = n as f64;
    Cochain::from_fn(&g, 3, |t| {
        let (a, b, c) = (t[0] as f64, t[1] as f64, t[2] as f64);
        let carry = b + c - ((t[1] + t[2]) % n) as f64;
        Complex64::from_polar(1.0, std::f64::consts::TAU * p as f64 * a * carry / (nn * nn))
    })
    .expect("unit-modulus values")
}
