//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Moore-Penrose pseudo-inverse with a relative singular-value cutoff.
#[derive(Debug, Clone)]
pub struct PseudoInverse {
    pub matrix: CMat,
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Number of singular values above `rel_tol * max`.
    pub rank: usize,
}

impl PseudoInverse {
    pub fn min_singular_value(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn max_singular_value(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Singular values below `rel_tol` times the largest one are treated as zero.
pub fn pinv(a: &CMat, rel_tol: f64) -> PseudoInverse {
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return PseudoInverse {
            matrix: CMat::zeros(cols, rows),
            singular_values: Vec::new(),
            rank: 0,
        };
    }
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();

    let s_max = sv.iter().copied().fold(0.0, f64::max);
    let cutoff = rel_tol * s_max;
    let mut out = CMat::zeros(cols, rows);
    let mut rank = 0;
    for (i, &s) in sv.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            rank += 1;
            // out += v_i (1/s) u_i^H
            let vi = v_t.row(i).adjoint();
            let ui = u.column(i);
            out += (vi * ui.adjoint()) * Complex64::new(1.0 / s, 0.0);
        }
    }
    sv.sort_by(|a, b| b.total_cmp(a));
    PseudoInverse {
        matrix: out,
        singular_values: sv,
        rank,
    }
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_lambda_max(r: &CMat) -> f64 {
    if r.nrows() == 0 {
        return 0.0;
    }
    // Symmetrize so rounding in a Gram product cannot leak into the eigensolver.
    let sym = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
    sym.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(r: &CMat) -> Vec<f64> {
    let sym = (r + r.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// `x^H A x`, real part (A Hermitian).
pub fn quad_form(a: &CMat, x: &CVec) -> f64 {
    x.dotc(&(a * x)).re
}

pub fn frobenius_sq(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pinv_of_wide_matrix_is_right_inverse() {
        let a = CMat::from_row_slice(
            2,
            3,
            &[c(1.0, 0.5), c(0.0, 1.0), c(2.0, -1.0), c(-1.0, 0.0), c(0.3, 0.3), c(1.0, 1.0)],
        );
        let p = pinv(&a, 1e-10);
        assert_eq!(p.rank, 2);
        let id = &a * &p.matrix;
        assert!((id - CMat::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn pinv_drops_tiny_singular_values() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-14, 0.0)]);
        let p = pinv(&a, 1e-10);
        assert_eq!(p.rank, 1);
        assert!((p.matrix[(1, 1)]).norm() == 0.0);
        assert!((p.matrix[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn lambda_max_of_diagonal() {
        let r = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0, 0.0), c(4.0, 0.0), c(2.0, 0.0)]));
        assert!((hermitian_lambda_max(&r) - 4.0).abs() < 1e-12);
        assert_eq!(hermitian_eigenvalues(&r).len(), 3);
    }
}
