//! Positive square roots and polar decompositions, for single matrices and
//! for gauges.
//!
//! Convention: an invertible `f` factors as `f = p · u` with
//! `p = √(f f†)` positive and `u` unitary.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::fusion::Gauge;
use crate::linalg::{self, CMatrix};
use crate::report::Residual;

/// Eigendecomposition of a Hermitian matrix that is positive definite
/// relative to `tol`.
fn positive_eigen(p: &CMatrix, tol: f64) -> Result<SymmetricEigen<num_complex::Complex64, nalgebra::Dyn>> {
    if p.nrows() != p.ncols() {
        return Err(Error::input(format!("expected a square matrix, got {}x{}", p.nrows(), p.ncols())));
    }
    if !linalg::is_finite(p) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let herm = linalg::hermiticity_residual(p);
    if herm > tol {
        return Err(Error::Domain {
            message: format!("matrix is not Hermitian (relative deviation {herm:e})"),
            eigenvalue: f64::NAN,
        });
    }
    let sym = (p + p.adjoint()) * num_complex::Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let lo = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if p.nrows() > 0 && lo <= tol * scale {
        return Err(Error::Domain {
            message: "matrix is not positive definite".into(),
            eigenvalue: lo,
        });
    }
    Ok(eig)
}

fn spectral_map(eig: &SymmetricEigen<num_complex::Complex64, nalgebra::Dyn>, f: impl Fn(f64) -> f64) -> CMatrix {
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let s = f(*lam);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    let out = scaled * v.adjoint();
    // Exact Hermitian symmetry of the output.
    (&out + out.adjoint()) * num_complex::Complex64::new(0.5, 0.0)
}

/// The unique positive square root of a positive definite matrix.
pub fn hermitian_sqrt(p: &CMatrix, tol: f64) -> Result<CMatrix> {
    let eig = positive_eigen(p, tol)?;
    Ok(spectral_map(&eig, f64::sqrt))
}

/// The unique positive `n`-th root of a positive definite matrix.
pub fn positive_nth_root(p: &CMatrix, n: u32, tol: f64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::input("root order must be positive"));
    }
    let eig = positive_eigen(p, tol)?;
    let inv = 1.0 / f64::from(n);
    Ok(spectral_map(&eig, |x| x.powf(inv)))
}

/// Hermitian within `tol` with all eigenvalues above `tol · λ_max`.
pub fn is_positive(p: &CMatrix, tol: f64) -> bool {
    positive_eigen(p, tol).is_ok()
}

/// Polar factors of one invertible matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolar {
    pub unitary: CMatrix,
    pub positive: CMatrix,
    /// `‖p·u − f‖ / ‖f‖`.
    pub residual: f64,
    pub condition: f64,
}

/// `f = p · u` with `p = √(f f†)` and `u = p⁻¹ f`.
pub fn polar_decompose_matrix(f: &CMatrix) -> Result<MatrixPolar> {
    if f.nrows() != f.ncols() {
        return Err(Error::input(format!("expected a square matrix, got {}x{}", f.nrows(), f.ncols())));
    }
    if !linalg::is_finite(f) {
        return Err(Error::input("matrix has non-finite entries"));
    }
    let n = f.nrows();
    if n == 0 {
        return Ok(MatrixPolar {
            unitary: f.clone(),
            positive: f.clone(),
            residual: 0.0,
            condition: 1.0,
        });
    }
    let condition = linalg::condition_number(f);
    if !condition.is_finite() || condition > 1e14 {
        return Err(Error::Numerical {
            block: String::new(),
            message: format!("matrix is numerically singular (condition number {condition:e})"),
        });
    }
    // nalgebra's complex SVD loses up to ~1e-9 even on well conditioned
    // input, the Hermitian eigensolver does not.
    let ff = f * f.adjoint();
    let eig = SymmetricEigen::new((&ff + ff.adjoint()) * num_complex::Complex64::new(0.5, 0.0));
    let positive = spectral_map(&eig, f64::sqrt);
    let unitary = spectral_map(&eig, |x| 1.0 / x.sqrt()) * f;
    let residual = linalg::rel_diff(&(&positive * &unitary), f);
    Ok(MatrixPolar {
        unitary,
        positive,
        residual,
        condition,
    })
}

/// Blockwise polar factors of a gauge: `g = p ∘ u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPair {
    pub unitary_part: Gauge,
    pub positive_part: Gauge,
    /// Max blockwise reconstruction error.
    pub residual: f64,
}

pub fn polar_decompose_gauge(g: &Gauge) -> Result<PolarPair> {
    let mut residual = 0.0f64;
    let mut positive = std::collections::BTreeMap::new();
    let mut unitary = std::collections::BTreeMap::new();
    for (&(a, b, c), m) in g.blocks() {
        let split = polar_decompose_matrix(m).map_err(|e| match e {
            Error::Numerical { message, .. } => Error::Numerical {
                block: format!("({a},{b};{c})"),
                message,
            },
            other => other,
        })?;
        residual = residual.max(split.residual);
        if a == 0 || b == 0 {
            positive.insert((a, b, c), m.clone());
            unitary.insert((a, b, c), m.clone());
        } else {
            positive.insert((a, b, c), split.positive);
            unitary.insert((a, b, c), split.unitary);
        }
    }
    let ring = g.ring().clone();
    Ok(PolarPair {
        unitary_part: Gauge::new(ring.clone(), unitary)?,
        positive_part: Gauge::new(ring, positive)?,
        residual,
    })
}

/// Given `x v = w y` with `v`, `w` unitary, checks `|x| w = w |y|` where
/// `|x| = √(x x†)`. Passes iff the relative residual is at most `10·tol`.
pub fn transport_check(x: &CMatrix, y: &CMatrix, v: &CMatrix, w: &CMatrix, tol: f64) -> Result<Residual> {
    let n = x.nrows();
    for (name, m) in [("x", x), ("y", y), ("v", v), ("w", w)] {
        if m.shape() != (n, n) {
            return Err(Error::input(format!("{name} has shape {:?}, expected {n}x{n}", m.shape())));
        }
    }
    for (name, m) in [("v", v), ("w", w)] {
        let res = linalg::unitarity_residual(m);
        if res > tol {
            return Err(Error::Precondition(format!("{name} is not unitary (residual {res:e})")));
        }
    }
    let pre = linalg::rel_diff(&(x * v), &(w * y));
    if pre > tol {
        return Err(Error::Precondition(format!("x·v differs from w·y (relative residual {pre:e})")));
    }
    let abs_x = hermitian_sqrt(&(x * x.adjoint()), tol)?;
    let abs_y = hermitian_sqrt(&(y * y.adjoint()), tol)?;
    let residual = linalg::rel_diff(&(&abs_x * w), &(w * &abs_y));
    Ok(Residual::new(residual, 10.0 * tol, None, 1))
}
