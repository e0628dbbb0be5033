//! Real matrix Lie algebras: basis bookkeeping, brackets and the trace form
//! `B(X, Y) = Re tr(XY)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    commutator, complex_to_real_vec, frobenius_inner, joint_kernel, symmetric_eigen,
    ComplexMatrix, RealMatrix, RealSubspace, ToleranceConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixField {
    Real,
    Complex,
}

/// The matrix model an algebra was built in, which fixes its Cartan involution.
#[derive(Debug, Clone)]
pub enum Realization {
    /// `su(p,q)` for the Hermitian form `form`; `θ(X) = J X J`.
    Unitary { form: ComplexMatrix },
    /// `sp` of the real symplectic form `omega` on a realified space; `θ(X) = −Xᵗ`.
    RealSymplectic { omega: RealMatrix },
    /// `so*` preserving the skew-Hermitian form `j`; `θ(X) = −X†`.
    SoStar { j: ComplexMatrix },
    /// `so` of the real symmetric form `form` on a realified space; `θ(X) = S X S`.
    RealOrthogonal { form: RealMatrix },
    /// No attached involution.
    Plain,
}

impl Realization {
    fn apply(&self, x: &ComplexMatrix) -> Option<ComplexMatrix> {
        match self {
            Realization::Unitary { form } => Some(form * x * form),
            Realization::RealSymplectic { .. } => Some(-x.transpose()),
            Realization::SoStar { .. } => Some(-x.adjoint()),
            Realization::RealOrthogonal { form } => {
                let s = form.map(|v| Complex64::new(v, 0.0));
                Some(&s * x * &s)
            }
            Realization::Plain => None,
        }
    }
}

/// A real Lie algebra of `matrix_size × matrix_size` matrices with an explicit
/// real basis.
pub struct RealLieAlgebra {
    name: String,
    matrix_size: usize,
    field: MatrixField,
    basis: Vec<ComplexMatrix>,
    /// Basis vectors as columns of interleaved real coordinates.
    stacked: RealMatrix,
    gram_inv: RealMatrix,
    realization: Realization,
    tol: ToleranceConfig,
}

impl fmt::Debug for RealLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealLieAlgebra")
            .field("name", &self.name)
            .field("matrix_size", &self.matrix_size)
            .field("field", &self.field)
            .field("dim", &self.dim())
            .finish()
    }
}

impl RealLieAlgebra {
    /// Builds and validates an algebra: independence, bracket closure, real
    /// trace form, and (when a realization carries one) that `θ` is an
    /// involutive automorphism with `−B(X, θX) > 0`.
    pub fn new(
        name: impl Into<String>,
        field: MatrixField,
        basis: Vec<ComplexMatrix>,
        realization: Realization,
        tol: ToleranceConfig,
    ) -> Result<Self> {
        let name = name.into();
        let matrix_size = basis.first().map(|b| b.nrows()).unwrap_or(0);
        for b in &basis {
            if b.nrows() != matrix_size || b.ncols() != matrix_size {
                return Err(Error::DimensionMismatch(format!(
                    "basis of {name} mixes matrix sizes"
                )));
            }
            if b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite);
            }
            if field == MatrixField::Real && b.iter().any(|z| z.im != 0.0) {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is declared real but has complex entries"
                )));
            }
        }
        let d = basis.len();
        let cols: Vec<DVector<f64>> = basis.iter().map(complex_to_real_vec).collect();
        let stacked = if d == 0 {
            RealMatrix::zeros(2 * matrix_size * matrix_size, 0)
        } else {
            RealMatrix::from_columns(&cols)
        };
        let gram = stacked.transpose() * &stacked;
        let gram_inv = if d == 0 {
            RealMatrix::zeros(0, 0)
        } else {
            let (vals, _) = symmetric_eigen(&gram);
            if vals[0] <= tol.residual_tol * vals[d - 1] {
                return Err(Error::DimensionMismatch(format!(
                    "basis of {name} is linearly dependent"
                )));
            }
            gram.clone().try_inverse().ok_or(Error::DegenerateForm)?
        };
        let alg = Self {
            name,
            matrix_size,
            field,
            basis,
            stacked,
            gram_inv,
            realization,
            tol,
        };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<()> {
        let tol = self.tol.residual_tol;
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let c = commutator(&self.basis[i], &self.basis[j]);
                let (_, res) = self.coords_of(&c);
                if res > tol {
                    return Err(Error::ClosureViolation { residual: res });
                }
            }
            for j in i..self.dim() {
                let t = (&self.basis[i] * &self.basis[j]).trace();
                if t.im.abs() > tol * (1.0 + t.norm()) {
                    return Err(Error::ResidualTooHigh {
                        context: format!("imaginary trace form on {}", self.name),
                        residual: t.im.abs(),
                        tol,
                    });
                }
            }
        }
        if !matches!(self.realization, Realization::Plain) {
            self.validate_involution()?;
        }
        Ok(())
    }

    fn validate_involution(&self) -> Result<()> {
        let tol = self.tol.residual_tol;
        let images: Vec<ComplexMatrix> = self
            .basis
            .iter()
            .map(|b| self.realization.apply(b).expect("involution present"))
            .collect();
        for (b, t) in self.basis.iter().zip(&images) {
            let (_, res) = self.coords_of(t);
            let back = self.realization.apply(t).expect("involution present");
            let invol = (&back - b).norm() / b.norm();
            if res > tol || invol > tol {
                return Err(Error::ResidualTooHigh {
                    context: format!("Cartan involution of {} does not preserve it", self.name),
                    residual: res.max(invol),
                    tol,
                });
            }
        }
        for i in 0..self.dim() {
            for j in (i + 1)..self.dim() {
                let lhs = self
                    .realization
                    .apply(&commutator(&self.basis[i], &self.basis[j]))
                    .expect("involution present");
                let rhs = commutator(&images[i], &images[j]);
                let scale = self.basis[i].norm() * self.basis[j].norm();
                if (lhs - rhs).norm() > tol * scale {
                    return Err(Error::ResidualTooHigh {
                        context: format!("Cartan involution of {} is not an automorphism", self.name),
                        residual: f64::NAN,
                        tol,
                    });
                }
            }
        }
        let d = self.dim();
        let form = RealMatrix::from_fn(d, d, |i, j| -(&self.basis[i] * &images[j]).trace().re);
        if d > 0 {
            let (vals, _) = symmetric_eigen(&form);
            if vals[0] <= 0.0 {
                return Err(Error::DegenerateForm);
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix_size(&self) -> usize {
        self.matrix_size
    }

    pub fn field(&self) -> MatrixField {
        self.field
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn realization(&self) -> &Realization {
        &self.realization
    }

    pub fn tolerances(&self) -> &ToleranceConfig {
        &self.tol
    }

    /// Least-squares coordinates of `m` and the relative residual of the fit.
    pub fn coords_of(&self, m: &ComplexMatrix) -> (DVector<f64>, f64) {
        let v = complex_to_real_vec(m);
        let c = &self.gram_inv * (self.stacked.transpose() * &v);
        let fit = &self.stacked * &c;
        let nv = v.norm();
        let res = if nv == 0.0 { 0.0 } else { (v - fit).norm() / nv };
        (c, res)
    }

    pub fn matrix_of(&self, coords: &DVector<f64>) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.matrix_size, self.matrix_size);
        for (c, b) in coords.iter().zip(&self.basis) {
            if *c != 0.0 {
                m += b * Complex64::new(*c, 0.0);
            }
        }
        m
    }

    /// Cartan involution applied to a matrix of the algebra.
    pub fn theta(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.realization
            .apply(x)
            .ok_or_else(|| Error::MissingInvolution(self.name.clone()))
    }

    /// `B(e_i, e_j)` on the basis.
    pub fn trace_form_gram(&self) -> RealMatrix {
        let d = self.dim();
        RealMatrix::from_fn(d, d, |i, j| (&self.basis[i] * &self.basis[j]).trace().re)
    }

    /// `Re tr(e_i† e_j)` on the basis. For every realization here this equals
    /// `−B(e_i, θ e_j)`.
    pub fn frobenius_gram(&self) -> RealMatrix {
        self.stacked.transpose() * &self.stacked
    }

    /// Matrix of `ad(x)` in basis coordinates.
    pub fn ad_matrix(&self, x: &ComplexMatrix) -> RealMatrix {
        let cols: Vec<DVector<f64>> = self
            .basis
            .iter()
            .map(|b| self.coords_of(&commutator(x, b)).0)
            .collect();
        RealMatrix::from_columns(&cols)
    }

    /// Matrix of `θ` in basis coordinates.
    pub fn theta_matrix(&self) -> Result<RealMatrix> {
        let cols = self
            .basis
            .iter()
            .map(|b| Ok(self.coords_of(&self.theta(b)?).0))
            .collect::<Result<Vec<_>>>()?;
        Ok(RealMatrix::from_columns(&cols))
    }
}

/// An element of a [`RealLieAlgebra`] given by real coordinates.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    algebra: Arc<RealLieAlgebra>,
    coords: DVector<f64>,
}

impl AlgebraElement {
    pub fn new(algebra: Arc<RealLieAlgebra>, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != algebra.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for an algebra of dimension {}",
                coords.len(),
                algebra.dim()
            )));
        }
        Ok(Self { algebra, coords })
    }

    /// Element with the given matrix, failing if the matrix is outside the span.
    pub fn from_matrix(algebra: Arc<RealLieAlgebra>, m: &ComplexMatrix) -> Result<Self> {
        let (coords, res) = algebra.coords_of(m);
        if res > algebra.tol.residual_tol {
            return Err(Error::ClosureViolation { residual: res });
        }
        Ok(Self { algebra, coords })
    }

    pub fn zero(algebra: Arc<RealLieAlgebra>) -> Self {
        let d = algebra.dim();
        Self {
            algebra,
            coords: DVector::zeros(d),
        }
    }

    pub fn algebra(&self) -> &Arc<RealLieAlgebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.algebra.matrix_of(&self.coords)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coords: &self.coords * s,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_algebra(self, other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coords: &self.coords + &other.coords,
        })
    }

    /// Norm `√(−B(X, θX))`, the Frobenius norm of the matrix.
    pub fn norm(&self) -> f64 {
        self.matrix().norm()
    }
}

fn same_algebra(x: &AlgebraElement, y: &AlgebraElement) -> Result<()> {
    if Arc::ptr_eq(&x.algebra, &y.algebra) {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "elements of {} and {}",
            x.algebra.name, y.algebra.name
        )))
    }
}

/// `[X, Y] = XY − YX`, expressed back in the algebra basis.
pub fn bracket(x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
    same_algebra(x, y)?;
    AlgebraElement::from_matrix(x.algebra.clone(), &commutator(&x.matrix(), &y.matrix()))
}

/// `B(X, Y) = Re tr(XY)`.
pub fn trace_form(x: &AlgebraElement, y: &AlgebraElement) -> f64 {
    trace_form_matrices(&x.matrix(), &y.matrix())
}

pub fn trace_form_matrices(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    // tr(XY) = Σ_ij X_ij Y_ji
    let n = x.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += x[(i, j)] * y[(j, i)];
        }
    }
    acc.re
}

/// Largest Jacobi defect over basis triples, each divided by `‖X‖‖Y‖‖W‖`.
pub fn jacobi_residual(g: &RealLieAlgebra) -> f64 {
    let d = g.dim();
    let b = g.basis();
    let norms: Vec<f64> = b.iter().map(|m| m.norm()).collect();
    let mut brackets = vec![None; d * d];
    for i in 0..d {
        for j in (i + 1)..d {
            brackets[i * d + j] = Some(commutator(&b[i], &b[j]));
        }
    }
    let br = |i: usize, j: usize| brackets[i * d + j].as_ref().expect("i < j");
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            for k in (j + 1)..d {
                // [[i,j],k] + [[j,k],i] + [[k,i],j], with [k,i] = -[i,k]
                let s = commutator(br(i, j), &b[k]) + commutator(br(j, k), &b[i])
                    - commutator(br(i, k), &b[j]);
                let scale = norms[i] * norms[j] * norms[k];
                worst = worst.max(s.norm() / scale);
            }
        }
    }
    worst
}

/// `+1` eigenspace of the attached Cartan involution, in basis coordinates,
/// orthonormal for `Re tr(X†Y)`.
pub fn cartan_involution_fixed_part(g: &RealLieAlgebra) -> Result<RealSubspace> {
    let theta = g.theta_matrix()?;
    let d = g.dim();
    let k = joint_kernel(&[theta - RealMatrix::identity(d, d)], d, &g.tol);
    crate::linops::orthonormalize(&k, &g.frobenius_gram())
}

/// `Re tr(X†Y)` for matrices, exposed for callers that work with raw matrices.
pub fn frobenius(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    frobenius_inner(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::I;

    fn e(n: usize, r: usize, c: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        m[(r, c)] = Complex64::new(1.0, 0.0);
        m
    }

    fn sl2() -> Arc<RealLieAlgebra> {
        let basis = vec![e(2, 0, 1), e(2, 1, 0), e(2, 0, 0) - e(2, 1, 1)];
        Arc::new(
            RealLieAlgebra::new(
                "sl(2,R)",
                MatrixField::Real,
                basis,
                Realization::Plain,
                ToleranceConfig::default(),
            )
            .unwrap(),
        )
    }

    #[test]
    fn sl2_bracket() {
        let g = sl2();
        let x = AlgebraElement::from_matrix(g.clone(), &e(2, 0, 1)).unwrap();
        let y = AlgebraElement::from_matrix(g.clone(), &e(2, 1, 0)).unwrap();
        let h = bracket(&x, &y).unwrap();
        assert!((h.matrix() - (e(2, 0, 0) - e(2, 1, 1))).norm() < 1e-14);
        let z = bracket(&x, &x).unwrap();
        assert!(z.coords().norm() < 1e-15);
    }

    #[test]
    fn root_and_cartan_parts_are_orthogonal() {
        let g = sl2();
        let x = AlgebraElement::from_matrix(g.clone(), &(e(2, 0, 1) - e(2, 1, 0))).unwrap();
        let y = AlgebraElement::from_matrix(g.clone(), &(e(2, 0, 0) - e(2, 1, 1))).unwrap();
        assert!(trace_form(&x, &y).abs() < 1e-15);
    }

    #[test]
    fn bracket_outside_span_is_reported() {
        // [E12, E21] = E11 - E22 is missing from the span
        let broken = RealLieAlgebra::new(
            "broken",
            MatrixField::Real,
            vec![e(2, 0, 1), e(2, 1, 0)],
            Realization::Plain,
            ToleranceConfig::default(),
        );
        assert!(matches!(broken, Err(Error::ClosureViolation { .. })));
    }

    #[test]
    fn missing_involution() {
        let g = sl2();
        assert!(matches!(
            cartan_involution_fixed_part(&g),
            Err(Error::MissingInvolution(_))
        ));
    }

    #[test]
    fn realified_scalar_trace() {
        // multiplication by i on R^6 squares to -Id
        let j = crate::linops::to_complex(&crate::linops::complex_structure(3));
        assert!((trace_form_matrices(&j, &j) + 6.0).abs() < 1e-14);
        let iz = ComplexMatrix::from_diagonal_element(3, 3, I);
        assert!((trace_form_matrices(&iz, &iz) + 3.0).abs() < 1e-14);
    }
}
