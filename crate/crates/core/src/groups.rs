//! Constructors for the matrix models used here: `su(p,q)` for a diagonal
//! Hermitian form, `sp(n+1, ℝ)` for `ω(x, y) = Im(Jx, y)` on `ℝ^{2n+2}`,
//! `so*(2n+2)` preserving `j = [[0, J], [−J, 0]]`, and `so(2n, 2)` for
//! `Re(x, y)_J` on `ℝ^{2n+2}`.
//!
//! Every basis is obtained by solving the defining linear conditions with
//! [`joint_kernel`], so the conditions are the only thing written by hand.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::liealg::{AlgebraElement, MatrixField, RealLieAlgebra, Realization};
use crate::linops::{
    complex_to_real_vec, joint_kernel, realify, real_vec_to_complex, to_complex, ComplexMatrix,
    RealMatrix, ToleranceConfig, I,
};

/// `diag(±1, …)` with `p` positive and `q` negative entries, in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureForm {
    p: usize,
    q: usize,
    matrix: ComplexMatrix,
}

impl SignatureForm {
    /// `diag(I_p, −I_q)`.
    pub fn standard(p: usize, q: usize) -> Self {
        let signs: Vec<f64> = std::iter::repeat(1.0)
            .take(p)
            .chain(std::iter::repeat(-1.0).take(q))
            .collect();
        Self::from_signs(&signs).expect("±1 entries")
    }

    pub fn from_signs(signs: &[f64]) -> Result<Self> {
        if signs.iter().any(|s| *s != 1.0 && *s != -1.0) {
            return Err(Error::BadSignature("entries must be ±1".into()));
        }
        let p = signs.iter().filter(|s| **s > 0.0).count();
        let q = signs.len() - p;
        let diag = DVector::from_iterator(signs.len(), signs.iter().map(|s| Complex64::new(*s, 0.0)));
        Ok(Self {
            p,
            q,
            matrix: ComplexMatrix::from_diagonal(&diag),
        })
    }

    /// Block-diagonal concatenation, e.g. `diag(J₁, J₂)`.
    pub fn block(parts: &[SignatureForm]) -> Self {
        let signs: Vec<f64> = parts
            .iter()
            .flat_map(|f| f.matrix.diagonal().iter().map(|z| z.re).collect::<Vec<_>>())
            .collect();
        Self::from_signs(&signs).expect("parts are signature forms")
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn size(&self) -> usize {
        self.p + self.q
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn real_matrix(&self) -> RealMatrix {
        self.matrix.map(|z| z.re)
    }
}

/// The embedding families, with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupCase {
    /// Diagonal embedding into `su(p, q)` through `su(n q₀, q₀)`.
    SuPq { n: usize, q0: usize, p: usize, q: usize },
    /// Satake embedding into `sp(n+1, ℝ)`.
    SpReal { n: usize },
    /// Ihara embedding into `so*(2n+2)`.
    SoStar { n: usize },
    /// Ihara embedding into `so(2n, 2)`.
    So2n2 { n: usize },
}

impl GroupCase {
    pub fn n(&self) -> usize {
        match *self {
            GroupCase::SuPq { n, .. }
            | GroupCase::SpReal { n }
            | GroupCase::SoStar { n }
            | GroupCase::So2n2 { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(Error::BadParameters(format!("n = {n}, need n ≥ 2")));
        }
        if let GroupCase::SuPq { n, q0, p, q } = *self {
            if q0 == 0 {
                return Err(Error::BadParameters("q0 must be positive".into()));
            }
            if p < n * q0 || q < q0 {
                return Err(Error::BadParameters(format!(
                    "need p ≥ n·q0 = {} and q ≥ q0 = {q0}, got p = {p}, q = {q}",
                    n * q0
                )));
            }
        }
        Ok(())
    }

    pub fn is_ihara(&self) -> bool {
        matches!(self, GroupCase::SoStar { .. } | GroupCase::So2n2 { .. })
    }
}

impl fmt::Display for GroupCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupCase::SuPq { n, q0, p, q } => {
                write!(f, "diagonal su({n},1) -> su({p},{q}), q0 = {q0}")
            }
            GroupCase::SpReal { n } => write!(f, "satake su({n},1) -> sp({},R)", n + 1),
            GroupCase::SoStar { n } => write!(f, "ihara su({n},1) -> so*({})", 2 * n + 2),
            GroupCase::So2n2 { n } => write!(f, "ihara su({n},1) -> so({},2)", 2 * n),
        }
    }
}

type Condition<'a> = Box<dyn Fn(&ComplexMatrix) -> ComplexMatrix + 'a>;

/// Real basis of `{X : c(X) = 0 for every condition}` in the space of real or
/// complex `size × size` matrices. The basis is orthonormal for `Re tr(X†Y)`.
fn solve_conditions(
    size: usize,
    field: MatrixField,
    conditions: &[Condition<'_>],
    tol: &ToleranceConfig,
) -> Vec<ComplexMatrix> {
    let unknown = |k: usize| -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(size, size);
        match field {
            MatrixField::Real => m[(k / size, k % size)] = Complex64::new(1.0, 0.0),
            MatrixField::Complex => {
                let e = k / 2;
                m[(e / size, e % size)] = if k % 2 == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    I
                };
            }
        }
        m
    };
    let n_unknowns = match field {
        MatrixField::Real => size * size,
        MatrixField::Complex => 2 * size * size,
    };
    let units: Vec<ComplexMatrix> = (0..n_unknowns).map(unknown).collect();
    let ops: Vec<RealMatrix> = conditions
        .iter()
        .map(|c| {
            let cols: Vec<DVector<f64>> = units.iter().map(|u| complex_to_real_vec(&c(u))).collect();
            RealMatrix::from_columns(&cols)
        })
        .collect();
    let kernel = joint_kernel(&ops, n_unknowns, tol);
    kernel
        .basis()
        .column_iter()
        .map(|col| {
            let cleaned = col.map(|x| if x.abs() < 1e-15 { 0.0 } else { x });
            match field {
                MatrixField::Complex => real_vec_to_complex(&cleaned, size, size),
                MatrixField::Real => ComplexMatrix::from_fn(size, size, |r, c| {
                    Complex64::new(cleaned[r * size + c], 0.0)
                }),
            }
        })
        .collect()
}

fn check_dim(name: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::DimensionMismatch(format!(
            "{name}: kernel solve gave dimension {got}, expected {want}"
        )));
    }
    Ok(())
}

/// `su(p, q) = {X : X†J + JX = 0, tr X = 0}` for the given form.
pub fn build_su(p: usize, q: usize, form: &SignatureForm, tol: &ToleranceConfig) -> Result<RealLieAlgebra> {
    if form.p() != p || form.q() != q {
        return Err(Error::BadSignature(format!(
            "form has signature ({}, {}), expected ({p}, {q})",
            form.p(),
            form.q()
        )));
    }
    let size = p + q;
    if size < 2 {
        return Err(Error::BadSignature("need p + q ≥ 2".into()));
    }
    let j = form.matrix().clone();
    let conds: Vec<Condition<'_>> = vec![
        Box::new(|x: &ComplexMatrix| x.adjoint() * &j + &j * x),
        Box::new(|x: &ComplexMatrix| ComplexMatrix::from_element(1, 1, x.trace())),
    ];
    let basis = solve_conditions(size, MatrixField::Complex, &conds, tol);
    drop(conds);
    let name = format!("su({p},{q})");
    check_dim(&name, basis.len(), size * size - 1)?;
    RealLieAlgebra::new(
        name,
        MatrixField::Complex,
        basis,
        Realization::Unitary { form: j },
        *tol,
    )
}

/// `diag(I_n, −1)`.
pub fn j_n1(n: usize) -> ComplexMatrix {
    SignatureForm::standard(n, 1).matrix().clone()
}

/// The real symplectic form `ω(x, y) = Im(Jx, y) = xᵗ Ω y` on `ℝ^{2n+2}`.
pub fn satake_symplectic_form(n: usize) -> RealMatrix {
    realify(&(j_n1(n) * I))
}

/// `sp(n+1, ℝ)` as real maps of `ℝ^{2n+2} = ℂ^{n+1}` with `XᵗΩ + ΩX = 0`.
pub fn build_sp_real(n: usize, tol: &ToleranceConfig) -> Result<RealLieAlgebra> {
    if n < 1 {
        return Err(Error::BadParameters("n ≥ 1 required".into()));
    }
    let omega = to_complex(&satake_symplectic_form(n));
    let conds: Vec<Condition<'_>> = vec![Box::new(|x: &ComplexMatrix| x.transpose() * &omega + &omega * x)];
    let basis = solve_conditions(2 * n + 2, MatrixField::Real, &conds, tol);
    let name = format!("sp({},R)", n + 1);
    check_dim(&name, basis.len(), (n + 1) * (2 * n + 3))?;
    RealLieAlgebra::new(
        name,
        MatrixField::Real,
        basis,
        Realization::RealSymplectic {
            omega: satake_symplectic_form(n),
        },
        *tol,
    )
}

/// `j = [[0, J], [−J, 0]]` with `J = diag(I_n, −1)`.
pub fn so_star_form(n: usize) -> ComplexMatrix {
    let m = n + 1;
    let j = j_n1(n);
    let mut out = ComplexMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, m), (m, m)).copy_from(&j);
    out.view_mut((m, 0), (m, m)).copy_from(&(-j));
    out
}

/// `so*(2n+2) = {X : Xᵗ = −X, X†j + jX = 0}` as a real span of complex matrices.
pub fn build_so_star(n: usize, tol: &ToleranceConfig) -> Result<RealLieAlgebra> {
    if n < 1 {
        return Err(Error::BadParameters("n ≥ 1 required".into()));
    }
    let j = so_star_form(n);
    let conds: Vec<Condition<'_>> = vec![
        Box::new(|x: &ComplexMatrix| x.transpose() + x),
        Box::new(|x: &ComplexMatrix| x.adjoint() * &j + &j * x),
    ];
    let basis = solve_conditions(2 * n + 2, MatrixField::Complex, &conds, tol);
    drop(conds);
    let name = format!("so*({})", 2 * n + 2);
    check_dim(&name, basis.len(), (n + 1) * (2 * n + 1))?;
    RealLieAlgebra::new(name, MatrixField::Complex, basis, Realization::SoStar { j }, *tol)
}

/// `so(2n, 2)` as real maps of `ℝ^{2n+2} = ℂ^{n+1}` antisymmetric for `Re(x, y)_J`.
pub fn build_so_2n2(n: usize, tol: &ToleranceConfig) -> Result<RealLieAlgebra> {
    if n < 1 {
        return Err(Error::BadParameters("n ≥ 1 required".into()));
    }
    let s_real = realify(&j_n1(n));
    let s = to_complex(&s_real);
    let conds: Vec<Condition<'_>> = vec![Box::new(|x: &ComplexMatrix| x.transpose() * &s + &s * x)];
    let basis = solve_conditions(2 * n + 2, MatrixField::Real, &conds, tol);
    let name = format!("so({},2)", 2 * n);
    check_dim(&name, basis.len(), (n + 1) * (2 * n + 1))?;
    RealLieAlgebra::new(
        name,
        MatrixField::Real,
        basis,
        Realization::RealOrthogonal { form: s_real },
        *tol,
    )
}

/// Largest defining-condition residual over the basis, relative to `‖X‖`.
///
/// For real-field algebras the imaginary part counts towards the residual.
pub fn defining_residual(g: &RealLieAlgebra) -> f64 {
    let residual = |x: &ComplexMatrix| -> f64 {
        let conds: Vec<f64> = match g.realization() {
            Realization::Unitary { form } => vec![
                (x.adjoint() * form + form * x).norm(),
                x.trace().norm(),
            ],
            Realization::RealSymplectic { omega } => {
                let o = to_complex(omega);
                vec![(x.transpose() * &o + &o * x).norm()]
            }
            Realization::SoStar { j } => vec![
                (x.transpose() + x).norm(),
                (x.adjoint() * j + j * x).norm(),
            ],
            Realization::RealOrthogonal { form } => {
                let s = to_complex(form);
                vec![(x.transpose() * &s + &s * x).norm()]
            }
            Realization::Plain => vec![0.0],
        };
        let imag = match g.field() {
            MatrixField::Real => x.map(|v| v.im).norm(),
            MatrixField::Complex => 0.0,
        };
        conds.into_iter().fold(imag, f64::max) / x.norm()
    };
    g.basis().iter().map(residual).fold(0.0, f64::max)
}

fn unit(size: usize, r: usize, c: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(size, size);
    m[(r, c)] = Complex64::new(1.0, 0.0);
    m
}

/// The fixed basis of `su(n, 1)` that embeddings record images of.
///
/// With `N = n + 1` and 1-based indices, the order is
/// 1. `i(E_kk − E_{k+1,k+1})` for `k = 1..n`;
/// 2. for `1 ≤ j < k ≤ N` lexicographically, a pair of elements:
///    `E_jk − E_kj`, `i(E_jk + E_kj)` when `k ≤ n` (compact), and
///    `E_jN + E_Nj`, `i(E_jN − E_Nj)` when `k = N` (noncompact).
pub fn su_n1_standard_basis(n: usize) -> Vec<ComplexMatrix> {
    let size = n + 1;
    let mut basis = Vec::with_capacity(size * size - 1);
    for k in 0..n {
        basis.push((unit(size, k, k) - unit(size, k + 1, k + 1)) * I);
    }
    for j in 0..size {
        for k in (j + 1)..size {
            let (ejk, ekj) = (unit(size, j, k), unit(size, k, j));
            if k < n {
                basis.push(&ejk - &ekj);
                basis.push((&ejk + &ekj) * I);
            } else {
                basis.push(&ejk + &ekj);
                basis.push((&ejk - &ekj) * I);
            }
        }
    }
    basis
}

/// Indices into [`su_n1_standard_basis`] of the elements lying in `s(u(n) ⊕ u(1))`.
pub fn su_n1_compact_indices(n: usize) -> Vec<usize> {
    let size = n + 1;
    let mut out: Vec<usize> = (0..n).collect();
    let mut idx = n;
    for j in 0..size {
        for k in (j + 1)..size {
            if k < n {
                out.push(idx);
                out.push(idx + 1);
            }
            idx += 2;
        }
    }
    out
}

/// `su(n, 1)` with the standard basis; the source of every embedding.
pub fn build_su_n1_source(n: usize, tol: &ToleranceConfig) -> Result<Arc<RealLieAlgebra>> {
    if n < 1 {
        return Err(Error::BadParameters("n ≥ 1 required".into()));
    }
    Ok(Arc::new(RealLieAlgebra::new(
        format!("su({n},1)"),
        MatrixField::Complex,
        su_n1_standard_basis(n),
        Realization::Unitary { form: j_n1(n) },
        *tol,
    )?))
}

/// `T₀ = (n+1)⁻¹ i diag(1, …, 1, −n)` as a matrix.
pub fn t0_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64 + 1.0);
    let diag = DVector::from_fn(n + 1, |k, _| {
        let v = if k < n { 1.0 } else { -(n as f64) };
        I * (v * scale)
    });
    ComplexMatrix::from_diagonal(&diag)
}

/// The central element `T₀` of `s(u(n) ⊕ u(1))` as an element of `source`.
pub fn central_element_t0(source: &Arc<RealLieAlgebra>) -> Result<AlgebraElement> {
    let n = source.matrix_size() - 1;
    AlgebraElement::from_matrix(source.clone(), &t0_matrix(n))
}
