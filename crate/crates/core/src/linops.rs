//! Dense matrix and subspace primitives shared by the rest of the crate.
//!
//! Everything is double precision. Rank decisions go through singular values
//! compared against `residual_tol` times a norm of the operator, never through
//! pivot counts.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Numerical thresholds used throughout a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub residual_tol: f64,
    pub eigen_gap_tol: f64,
    pub certificate_margin_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-9,
            eigen_gap_tol: 1e-6,
            certificate_margin_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.residual_tol,
            self.eigen_gap_tol,
            self.certificate_margin_tol,
        ];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::InvalidTolerance(
                "all tolerances must be finite and strictly positive".into(),
            ));
        }
        if self.residual_tol >= self.eigen_gap_tol {
            return Err(Error::InvalidTolerance(format!(
                "residual_tol ({}) must be below eigen_gap_tol ({})",
                self.residual_tol, self.eigen_gap_tol
            )));
        }
        Ok(())
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }
}

/// A subspace of a real coordinate space, stored as basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSubspace {
    ambient_dim: usize,
    basis: RealMatrix,
}

impl RealSubspace {
    /// Wraps `basis` (columns) after checking linear independence.
    pub fn new(basis: RealMatrix, cfg: &ToleranceConfig) -> Result<Self> {
        let k = basis.ncols();
        if k > 0 {
            let mut normalized = basis.clone();
            for mut c in normalized.column_iter_mut() {
                let n = c.norm();
                if n == 0.0 {
                    return Err(Error::DimensionMismatch("zero basis vector".into()));
                }
                c /= n;
            }
            let gram = normalized.transpose() * &normalized;
            let (vals, _) = symmetric_eigen(&gram);
            if vals[0] <= cfg.residual_tol {
                return Err(Error::DimensionMismatch(
                    "basis vectors are linearly dependent".into(),
                ));
            }
        }
        Ok(Self {
            ambient_dim: basis.nrows(),
            basis,
        })
    }

    /// Trusted constructor for bases that are orthonormal by construction.
    pub(crate) fn from_orthonormal(basis: RealMatrix) -> Self {
        Self {
            ambient_dim: basis.nrows(),
            basis,
        }
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: RealMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: RealMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &RealMatrix {
        &self.basis
    }

    /// Euclidean orthogonal projector onto the span (basis must be orthonormal).
    pub fn projector(&self) -> RealMatrix {
        &self.basis * self.basis.transpose()
    }

    /// Distance of `v` from the span, relative to `‖v‖`; assumes an orthonormal basis.
    pub fn relative_distance(&self, v: &DVector<f64>) -> f64 {
        let nv = v.norm();
        if nv == 0.0 {
            return 0.0;
        }
        let coeffs = self.basis.transpose() * v;
        (v - &self.basis * coeffs).norm() / nv
    }

    /// Orthonormal complement of `self` inside `outer`; both orthonormal.
    pub fn complement_within(&self, outer: &RealSubspace, cfg: &ToleranceConfig) -> RealSubspace {
        let reduced = outer.basis() - self.projector() * outer.basis();
        let span = column_span(&reduced, cfg.residual_tol.sqrt());
        // the residual vectors have norm ~1 or ~0, a loose gate is fine
        RealSubspace::from_orthonormal(span)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(
    m: &ComplexMatrix,
    cfg: &ToleranceConfig,
) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let scale = m.norm();
    let residual = (m - m.adjoint()).norm();
    if residual > cfg.residual_tol * scale.max(f64::MIN_POSITIVE) && residual > 0.0 {
        return Err(Error::NonHermitianInput {
            residual: residual / scale,
        });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok((values, vectors))
}

/// Real symmetric eigen-decomposition (input is symmetrized), ascending.
pub fn symmetric_eigen(m: &RealMatrix) -> (Vec<f64>, RealMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), RealMatrix::zeros(0, 0));
    }
    let sym = (m + m.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = RealMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Smallest eigenvalue of a symmetric matrix together with a unit eigenvector.
pub fn min_eigenpair(m: &RealMatrix) -> (f64, DVector<f64>) {
    let (vals, vecs) = symmetric_eigen(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Right singular vectors of `a` whose singular value is at most `threshold`.
fn small_singular_subspace(a: &RealMatrix, threshold: f64) -> RealMatrix {
    let (r, k) = a.shape();
    if k == 0 {
        return RealMatrix::zeros(0, 0);
    }
    let padded;
    let target = if r < k {
        let mut p = RealMatrix::zeros(k, k);
        p.view_mut((0, 0), (r, k)).copy_from(a);
        padded = p;
        &padded
    } else {
        a
    };
    let svd = SVD::new(target.clone(), false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let picked: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= threshold)
        .collect();
    let mut out = RealMatrix::zeros(k, picked.len());
    for (c, &i) in picked.iter().enumerate() {
        out.set_column(c, &v_t.row(i).transpose());
    }
    out
}

/// Common kernel `{v : ‖A_i v‖ ≤ tol·‖A_i‖·‖v‖ for all i}` with an orthonormal basis.
///
/// `‖A_i‖` is the Frobenius norm. The operators are processed one at a time,
/// each restricted to the kernel of the previous ones.
pub fn joint_kernel(maps: &[RealMatrix], ambient_dim: usize, cfg: &ToleranceConfig) -> RealSubspace {
    let mut kernel = RealMatrix::identity(ambient_dim, ambient_dim);
    for a in maps {
        assert_eq!(a.ncols(), ambient_dim, "operator acts on a different space");
        if kernel.ncols() == 0 {
            break;
        }
        let norm = a.norm();
        if norm == 0.0 {
            continue;
        }
        let restricted = (a * &kernel) / norm;
        let sub = small_singular_subspace(&restricted, cfg.residual_tol);
        kernel = &kernel * sub;
    }
    RealSubspace::from_orthonormal(kernel)
}

/// Orthonormal basis of the column span of `m`, thresholding at `rel_tol · σ_max`.
pub fn column_span(m: &RealMatrix, rel_tol: f64) -> RealMatrix {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return RealMatrix::zeros(r, 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested left singular vectors");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return RealMatrix::zeros(r, 0);
    }
    let mut picked: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax)
        .collect();
    picked.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut out = RealMatrix::zeros(r, picked.len());
    for (k, &i) in picked.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Singular values of `m` in descending order.
pub fn singular_values(m: &RealMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = SVD::new(m.clone(), false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Makes the basis of `s` orthonormal for the symmetric form `inner`.
pub fn orthonormalize(s: &RealSubspace, inner: &RealMatrix) -> Result<RealSubspace> {
    if inner.nrows() != s.ambient_dim() || inner.ncols() != s.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "inner product has the wrong size".into(),
        ));
    }
    if s.dim() == 0 {
        return Ok(s.clone());
    }
    let b = s.basis();
    let gram = b.transpose() * inner * b;
    let gram = (&gram + gram.transpose()).scale(0.5);
    let chol = Cholesky::new(gram).ok_or(Error::DegenerateForm)?;
    let l = chol.l();
    // B L^{-T}: solve L X^T = B^T
    let xt = l
        .solve_lower_triangular(&b.transpose())
        .ok_or(Error::DegenerateForm)?;
    Ok(RealSubspace::from_orthonormal(xt.transpose()))
}

/// Groups sorted values into runs whose consecutive gaps are below `gap`.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Interleaved real coordinates `(re, im)` of a complex matrix, row-major.
pub fn complex_to_real_vec(m: &ComplexMatrix) -> DVector<f64> {
    let (r, c) = m.shape();
    let mut v = DVector::zeros(2 * r * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            v[2 * (i * c + j)] = z.re;
            v[2 * (i * c + j) + 1] = z.im;
        }
    }
    v
}

pub fn real_vec_to_complex(v: &DVector<f64>, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(v[2 * (i * cols + j)], v[2 * (i * cols + j) + 1])
    })
}

/// Real part of the Frobenius inner product `Re tr(A† B)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// The real `2k × 2k` matrix of a complex `k × k` matrix, with `z_j = x_j + i y_j`
/// mapped to the interleaved coordinates `(x_1, y_1, …, x_k, y_k)`.
pub fn realify(m: &ComplexMatrix) -> RealMatrix {
    let (r, c) = m.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = -z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = z.re;
        }
    }
    out
}

/// Real matrix of the conjugate-linear map `x ↦ T x̄` in interleaved coordinates.
pub fn realify_conjugate_linear(m: &ComplexMatrix) -> RealMatrix {
    let (r, c) = m.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = m[(i, j)];
            out[(2 * i, 2 * j)] = z.re;
            out[(2 * i, 2 * j + 1)] = z.im;
            out[(2 * i + 1, 2 * j)] = z.im;
            out[(2 * i + 1, 2 * j + 1)] = -z.re;
        }
    }
    out
}

/// Complex-structure matrix `i_ℝ`: block-diagonal `[[0, −1], [1, 0]]`.
pub fn complex_structure(k: usize) -> RealMatrix {
    realify(&ComplexMatrix::from_diagonal_element(k, k, I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dmatrix;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn eigen_of_diagonal() {
        let m = to_complex(&dmatrix![1.0, 0.0; 0.0, 2.0]);
        let (vals, vecs) = hermitian_eigen(&m, &cfg()).unwrap();
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 2.0, epsilon = 1e-14);
        assert_relative_eq!(vecs[(0, 0)].norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(vecs[(1, 1)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eigen_of_zero_matrix() {
        let m = ComplexMatrix::zeros(3, 3);
        let (vals, vecs) = hermitian_eigen(&m, &cfg()).unwrap();
        assert!(vals.iter().all(|v| v.abs() < 1e-15));
        let gram = vecs.adjoint() * &vecs;
        assert!((gram - ComplexMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn eigen_of_swap() {
        let m = to_complex(&dmatrix![0.0, 1.0; 1.0, 0.0]);
        let (vals, vecs) = hermitian_eigen(&m, &cfg()).unwrap();
        assert_relative_eq!(vals[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 1.0, epsilon = 1e-14);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // eigenvector for -1 is (1, -1)/√2 up to phase
        let v = vecs.column(0);
        assert_relative_eq!((v[0] + v[1]).norm(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(v[0].norm(), h, epsilon = 1e-12);
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = to_complex(&dmatrix![0.0, 1.0; 0.0, 0.0]);
        assert!(matches!(
            hermitian_eigen(&m, &cfg()),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let k = joint_kernel(&[RealMatrix::identity(4, 4)], 4, &cfg());
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn kernel_without_constraints_is_everything() {
        let k = joint_kernel(&[], 4, &cfg());
        assert_eq!(k.dim(), 4);
    }

    #[test]
    fn sl2_has_trivial_center() {
        // sl(2,C) realified: basis E12, E21, H and their i-multiples
        let e = |r: usize, c: usize| {
            let mut m = ComplexMatrix::zeros(2, 2);
            m[(r, c)] = Complex64::new(1.0, 0.0);
            m
        };
        let h = e(0, 0) - e(1, 1);
        let mut basis = vec![e(0, 1), e(1, 0), h];
        let imag: Vec<_> = basis.iter().map(|m| m * I).collect();
        basis.extend(imag);
        let coords = |m: &ComplexMatrix| -> DVector<f64> {
            // the basis is orthogonal for Re tr(A†B)
            DVector::from_iterator(
                basis.len(),
                basis
                    .iter()
                    .map(|b| frobenius_inner(b, m) / frobenius_inner(b, b)),
            )
        };
        let ad = |x: &ComplexMatrix| -> RealMatrix {
            let cols: Vec<_> = basis.iter().map(|b| coords(&commutator(x, b))).collect();
            RealMatrix::from_columns(&cols)
        };
        let k = joint_kernel(&[ad(&e(0, 1)), ad(&e(1, 0))], 6, &cfg());
        assert_eq!(k.dim(), 0);
    }

    #[test]
    fn orthonormalize_examples() {
        let s = RealSubspace::new(dmatrix![2.0; 0.0], &cfg()).unwrap();
        let o = orthonormalize(&s, &RealMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(o.basis()[(0, 0)], 1.0, epsilon = 1e-14);
        assert_relative_eq!(o.basis()[(1, 0)], 0.0, epsilon = 1e-14);

        let s = RealSubspace::new(dmatrix![1.0, 1.0; 0.0, 1.0], &cfg()).unwrap();
        let o = orthonormalize(&s, &RealMatrix::identity(2, 2)).unwrap();
        assert_relative_eq!(o.basis(), &RealMatrix::identity(2, 2), epsilon = 1e-14);

        let s = RealSubspace::new(dmatrix![1.0; 1.0], &cfg()).unwrap();
        let o = orthonormalize(&s, &dmatrix![1.0, 0.0; 0.0, 4.0]).unwrap();
        let r5 = 5f64.sqrt();
        assert_relative_eq!(o.basis()[(0, 0)], 1.0 / r5, epsilon = 1e-14);
        assert_relative_eq!(o.basis()[(1, 0)], 1.0 / r5, epsilon = 1e-14);
    }

    #[test]
    fn orthonormalize_rejects_indefinite_form() {
        let s = RealSubspace::new(dmatrix![1.0; 0.0], &cfg()).unwrap();
        let inner = dmatrix![-1.0, 0.0; 0.0, 1.0];
        assert_eq!(orthonormalize(&s, &inner), Err(Error::DegenerateForm));
    }

    #[test]
    fn dependent_basis_is_rejected() {
        assert!(RealSubspace::new(dmatrix![1.0, 2.0; 1.0, 2.0], &cfg()).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(cfg().validate().is_ok());
        assert!(cfg().with_residual_tol(1e-3).validate().is_err());
        assert!(cfg().with_residual_tol(0.0).validate().is_err());
    }

    #[test]
    fn realify_is_multiplicative() {
        let a = ComplexMatrix::from_fn(3, 3, |r, c| Complex64::new(r as f64 - c as f64, (r * c) as f64));
        let b = ComplexMatrix::from_fn(3, 3, |r, c| Complex64::new(1.0 + c as f64, r as f64 - 1.0));
        assert!((realify(&(&a * &b)) - realify(&a) * realify(&b)).norm() < 1e-12);
        let j = complex_structure(3);
        assert!((&j * &j + RealMatrix::identity(6, 6)).norm() < 1e-15);
    }

    #[test]
    fn clustering() {
        let r = cluster_sorted(&[0.0, 1e-9, 1.0, 1.0 + 1e-8, 3.0], 1e-6);
        assert_eq!(r, vec![0..2, 2..4, 4..5]);
    }
}
