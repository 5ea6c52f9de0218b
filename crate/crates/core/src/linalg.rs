//! Dense complex matrix helpers shared by every module.
//!
//! All block data is stored as `nalgebra::DMatrix<Complex64>`. Residuals are
//! relative Frobenius norms unless noted otherwise.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn scalar(z: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, z)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖a − b‖ / ‖b‖`, falling back to the absolute deviation when `b` vanishes.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    let diff = frobenius(&(a - b));
    let scale = frobenius(b);
    if scale > f64::MIN_POSITIVE {
        diff / scale
    } else {
        diff
    }
}

/// Kronecker product with the row index of `a` as the major index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn block_diag(blocks: &[CMatrix]) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let (mut r, mut col) = (0, 0);
    for b in blocks {
        out.view_mut((r, col), b.shape()).copy_from(b);
        r += b.nrows();
        col += b.ncols();
    }
    out
}

/// `‖B†B − I‖ / ‖I‖`; zero for unitary blocks.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let prod = m.adjoint() * m;
    frobenius(&(prod - identity(n))) / (n as f64).sqrt()
}

/// `‖M − M†‖ / ‖M‖`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    rel_diff(&m.adjoint(), m)
}

/// `‖M − λ·I‖ / ‖M‖` with `λ = tr(M)/n`, together with `λ`.
pub fn scalar_part(m: &CMatrix) -> (Complex64, f64) {
    let n = m.nrows();
    let lambda = m.trace() / n as f64;
    let dev = frobenius(&(m - identity(n) * lambda));
    let scale = frobenius(m).max(f64::MIN_POSITIVE);
    (lambda, dev / scale)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// 2-norm condition number; infinite for singular matrices.
pub fn condition_number(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Matrix inverse, refusing matrices whose condition number exceeds `1e14`.
pub fn inverse(m: &CMatrix) -> Option<CMatrix> {
    if m.nrows() != m.ncols() {
        return None;
    }
    if m.nrows() == 0 {
        return Some(m.clone());
    }
    if !condition_number(m).is_finite() || condition_number(m) > 1e14 {
        return None;
    }
    m.clone().try_inverse()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Result of a real least-squares solve.
#[derive(Debug, Clone)]
pub struct LstsqSolution {
    pub x: DVector<f64>,
    /// Max-abs entry of `A x − b`.
    pub residual: f64,
    pub rank: usize,
}

/// Minimum-norm least-squares solution of `A x = b`.
///
/// Solves the normal equations `AᵀA x = Aᵀb` through a symmetric
/// eigendecomposition of `AᵀA`, discarding eigenvalues below
/// `1e-12 · λ_max`; the retained spectrum gives the pseudo-inverse and
/// therefore the minimum-norm representative.
pub fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> LstsqSolution {
    let n = a.ncols();
    if n == 0 {
        let residual = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        return LstsqSolution {
            x: DVector::zeros(0),
            residual,
            rank: 0,
        };
    }
    let ata = a.transpose() * a;
    let atb = a.transpose() * b;
    let eig = SymmetricEigen::new(ata);
    let lmax = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let cutoff = 1e-12 * lmax.max(f64::MIN_POSITIVE);
    let coords = eig.eigenvectors.transpose() * &atb;
    let mut scaled = DVector::zeros(n);
    let mut rank = 0;
    for i in 0..n {
        let lam = eig.eigenvalues[i];
        if lam > cutoff {
            scaled[i] = coords[i] / lam;
            rank += 1;
        }
    }
    let x = &eig.eigenvectors * scaled;
    let r = a * &x - b;
    let residual = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    LstsqSolution { x, residual, rank }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_orders_first_factor_major() {
        let a = CMatrix::from_row_slice(2, 1, &[c(1.0, 0.0), c(2.0, 0.0)]);
        let b = CMatrix::from_row_slice(2, 1, &[c(3.0, 0.0), c(5.0, 0.0)]);
        let k = kron(&a, &b);
        let got: Vec<f64> = k.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![3.0, 5.0, 6.0, 10.0]);
    }

    #[test]
    fn block_diag_places_blocks() {
        let m = block_diag(&[scalar(c(2.0, 0.0)), identity(2)]);
        assert_eq!(m.shape(), (3, 3));
        assert_eq!(m[(0, 0)], c(2.0, 0.0));
        assert_eq!(m[(2, 2)], c(1.0, 0.0));
        assert_eq!(m[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn lstsq_min_norm_on_rank_deficient_system() {
        // x0 + x1 = 2 has minimum-norm solution (1, 1).
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![2.0]);
        let sol = min_norm_lstsq(&a, &b);
        assert_eq!(sol.rank, 1);
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = CMatrix::zeros(2, 2);
        assert!(inverse(&m).is_none());
        assert!(inverse(&identity(3)).is_some());
    }
}
