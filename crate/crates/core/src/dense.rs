// SPDX-License-Identifier: AGPL-3.0-only

//! Dense linear algebra used by the truncation oracle.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues in ascending order, optionally with orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    n: usize,
    pub values: Vec<f64>,
    /// Column-major: column k is the eigenvector of `values[k]`.
    vectors: Option<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vector(&self, k: usize) -> Option<&[f64]> {
        self.vectors.as_ref().map(|v| &v[k * self.n..(k + 1) * self.n])
    }

    /// Index of the eigenvalue with the smallest magnitude.
    pub fn nearest_zero(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Diagonalizes the symmetric `n × n` row-major matrix `a`.
pub fn symmetric_eigen(a: &[f64], n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(Error::InvalidInput(format!("matrix has {} entries, expected {}", a.len(), n * n)));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let m = DMatrix::from_row_slice(n, n, a);
    let (raw_values, raw_vectors) = if want_vectors {
        let e = m.symmetric_eigen();
        (e.eigenvalues, Some(e.eigenvectors))
    } else {
        (m.symmetric_eigenvalues(), None)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_values[i].total_cmp(&raw_values[j]));
    let values = order.iter().map(|&i| raw_values[i]).collect();
    let vectors = raw_vectors.map(|v| {
        let mut cols = Vec::with_capacity(n * n);
        for &i in &order {
            cols.extend(v.column(i).iter());
        }
        cols
    });
    Ok(SymmetricEigen { n, values, vectors })
}

/// LU factorization of a dense complex matrix with partial pivoting.
pub struct ComplexLu {
    n: usize,
    lu: nalgebra::LU<Complex64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl ComplexLu {
    /// `a` is row-major.
    pub fn factor(a: &[Complex64], n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::InvalidInput(format!("matrix has {} entries, expected {}", a.len(), n * n)));
        }
        let lu = DMatrix::from_row_slice(n, n, a).lu();
        if !lu.is_invertible() {
            return Err(Error::Numerical("singular matrix".into()));
        }
        Ok(Self { n, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.lu
            .solve(&DVector::from_column_slice(b))
            .map(|x| x.iter().copied().collect())
            .ok_or_else(|| Error::Numerical("singular matrix".into()))
    }
}

/// Hager–Higham estimate of ‖A⁻¹‖₁ for complex symmetric A.
pub fn inverse_norm1_estimate_symmetric(lu: &ComplexLu) -> Result<f64> {
    let n = lu.dim();
    // A = Aᵀ, so A⁻ᴴ b = conj(A⁻¹ conj(b)).
    let solve_h = |b: &[Complex64]| -> Result<Vec<Complex64>> {
        let cb: Vec<Complex64> = b.iter().map(|v| v.conj()).collect();
        Ok(lu.solve(&cb)?.into_iter().map(|v| v.conj()).collect())
    };
    let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
    let mut estimate: f64 = 0.0;
    for iter in 0..5 {
        let y = lu.solve(&x)?;
        estimate = estimate.max(y.iter().map(|v| v.norm()).sum());
        let xi: Vec<Complex64> = y
            .iter()
            .map(|v| if v.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { v / v.norm() })
            .collect();
        let z = solve_h(&xi)?;
        let (j, zmax) = z
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
        if iter > 0 && zmax <= ztx {
            break;
        }
        x = vec![Complex64::new(0.0, 0.0); n];
        x[j] = Complex64::new(1.0, 0.0);
    }
    Ok(estimate)
}
