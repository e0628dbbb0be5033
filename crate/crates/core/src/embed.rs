//! The three embedding families of `su(n, 1)`: diagonal into `su(p, q)`,
//! Satake into `sp(n+1, ℝ)`, Ihara into `so*(2n+2)` and `so(2n, 2)`.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groups::{
    build_so_2n2, build_so_star, build_sp_real, build_su, build_su_n1_source, j_n1,
    t0_matrix, GroupCase, SignatureForm,
};
use crate::liealg::{AlgebraElement, RealLieAlgebra};
use crate::linops::{
    commutator, complex_structure, joint_kernel, realify, singular_values, to_complex,
    ComplexMatrix, RealMatrix, RealSubspace, ToleranceConfig, I,
};

/// A Lie algebra homomorphism `su(n, 1) → g`, stored as the images of the
/// standard source basis.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Arc<RealLieAlgebra>,
    target: Arc<RealLieAlgebra>,
    images: Vec<AlgebraElement>,
    case: GroupCase,
    ad_ops: Vec<RealMatrix>,
}

impl Embedding {
    /// Validates membership, injectivity and the homomorphism property.
    pub fn new(
        source: Arc<RealLieAlgebra>,
        target: Arc<RealLieAlgebra>,
        image_matrices: &[ComplexMatrix],
        case: GroupCase,
    ) -> Result<Self> {
        let e = Self::from_matrices(source, target, image_matrices, case)?;
        let tol = e.target.tolerances().residual_tol;
        let smin = e.injectivity_margin();
        if smin <= 1e-8 {
            return Err(Error::ResidualTooHigh {
                context: "embedding is not injective".into(),
                residual: smin,
                tol: 1e-8,
            });
        }
        let res = homomorphism_residual(&e);
        if res > tol {
            return Err(Error::ResidualTooHigh {
                context: format!("homomorphism {case}"),
                residual: res,
                tol,
            });
        }
        Ok(e)
    }

    fn from_matrices(
        source: Arc<RealLieAlgebra>,
        target: Arc<RealLieAlgebra>,
        image_matrices: &[ComplexMatrix],
        case: GroupCase,
    ) -> Result<Self> {
        if image_matrices.len() != source.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a source of dimension {}",
                image_matrices.len(),
                source.dim()
            )));
        }
        let images = image_matrices
            .iter()
            .map(|m| AlgebraElement::from_matrix(target.clone(), m))
            .collect::<Result<Vec<_>>>()?;
        let ad_ops = image_matrices.iter().map(|m| target.ad_matrix(m)).collect();
        Ok(Self {
            source,
            target,
            images,
            case,
            ad_ops,
        })
    }

    pub fn source(&self) -> &Arc<RealLieAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RealLieAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[AlgebraElement] {
        &self.images
    }

    pub fn case(&self) -> GroupCase {
        self.case
    }

    /// `ad(φ(X_i))` in target coordinates, one per source basis element.
    pub fn ad_operators(&self) -> &[RealMatrix] {
        &self.ad_ops
    }

    /// Target coordinates of `φ(X)` for source coordinates `x`.
    pub fn map_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.target.dim());
        for (c, img) in x.iter().zip(&self.images) {
            out += img.coords() * *c;
        }
        out
    }

    /// `φ(X)` for a matrix `X` of the source algebra.
    pub fn map_matrix(&self, x: &ComplexMatrix) -> Result<AlgebraElement> {
        let (c, res) = self.source.coords_of(x);
        if res > self.source.tolerances().residual_tol {
            return Err(Error::ClosureViolation { residual: res });
        }
        AlgebraElement::new(self.target.clone(), self.map_coords(&c))
    }

    /// `ad(φ(X))` in target coordinates.
    pub fn ad_of_source_coords(&self, x: &DVector<f64>) -> RealMatrix {
        let d = self.target.dim();
        let mut out = RealMatrix::zeros(d, d);
        for (c, op) in x.iter().zip(&self.ad_ops) {
            if *c != 0.0 {
                out += op * *c;
            }
        }
        out
    }

    /// `φ(T₀)`.
    pub fn t0_image(&self) -> AlgebraElement {
        self.map_matrix(&t0_matrix(self.case.n()))
            .expect("T0 lies in su(n,1)")
    }

    /// Smallest singular value of the coordinate map over the largest, with
    /// both sides measured in their Frobenius norms.
    pub fn injectivity_margin(&self) -> f64 {
        let ds = self.source.dim();
        let dt = self.target.dim();
        // orthonormalize coordinates on both sides so the ratio is intrinsic
        let fs = cholesky_factor(&self.source.frobenius_gram());
        let ft = cholesky_factor(&self.target.frobenius_gram());
        let mut map = RealMatrix::zeros(dt, ds);
        for (k, img) in self.images.iter().enumerate() {
            map.set_column(k, img.coords());
        }
        let normalized = ft.transpose() * map * fs.transpose().try_inverse().expect("pd gram");
        let s = singular_values(&normalized);
        if s.is_empty() || s[0] == 0.0 {
            return 0.0;
        }
        s[s.len() - 1] / s[0]
    }
}

fn cholesky_factor(gram: &RealMatrix) -> RealMatrix {
    nalgebra::Cholesky::new(gram.clone())
        .expect("Frobenius gram is positive definite")
        .l()
}

/// `max_{i<j} ‖φ([X_i, X_j]) − [φX_i, φX_j]‖ / max_k ‖φX_k‖²`.
pub fn homomorphism_residual(e: &Embedding) -> f64 {
    let src = e.source.basis();
    let imgs: Vec<ComplexMatrix> = e.images.iter().map(|x| x.matrix()).collect();
    let scale = imgs
        .iter()
        .map(|m| m.norm_squared())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut worst: f64 = 0.0;
    for i in 0..src.len() {
        for j in (i + 1)..src.len() {
            let (c, _) = e.source.coords_of(&commutator(&src[i], &src[j]));
            let lhs = e.target.matrix_of(&e.map_coords(&c));
            let rhs = commutator(&imgs[i], &imgs[j]);
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    worst
}

/// Sizes of the diagonal-embedding blocks: `p₁ = p − n q₀`, `q₁ = q − q₀`.
pub fn diagonal_blocks(n: usize, q0: usize, p: usize, q: usize) -> (usize, usize) {
    (p - n * q0, q - q0)
}

/// The form `diag(J₁, J₂)` with `J₁ = diag(I_{nq₀}, −I_{q₀})`, `J₂ = diag(I_{p₁}, −I_{q₁})`.
pub fn diagonal_form(n: usize, q0: usize, p: usize, q: usize) -> SignatureForm {
    let (p1, q1) = diagonal_blocks(n, q0, p, q);
    SignatureForm::block(&[
        SignatureForm::standard(n * q0, q0),
        SignatureForm::standard(p1, q1),
    ])
}

fn kron_identity(x: &ComplexMatrix, k: usize) -> ComplexMatrix {
    x.kronecker(&ComplexMatrix::identity(k, k))
}

fn place(block: &ComplexMatrix, size: usize, at: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(size, size);
    out.view_mut((at, at), block.shape()).copy_from(block);
    out
}

/// `X ↦ diag(X ⊗ I_{q₀}, 0)` into `su(p, q)` with the form `diag(J₁, J₂)`.
pub fn diagonal_embedding(
    n: usize,
    q0: usize,
    p: usize,
    q: usize,
    tol: &ToleranceConfig,
) -> Result<Embedding> {
    let case = GroupCase::SuPq { n, q0, p, q };
    case.validate()?;
    let source = build_su_n1_source(n, tol)?;
    let target = Arc::new(build_su(p, q, &diagonal_form(n, q0, p, q), tol)?);
    let size = p + q;
    let images: Vec<ComplexMatrix> = source
        .basis()
        .iter()
        .map(|x| place(&kron_identity(x, q0), size, 0))
        .collect();
    Embedding::new(source, target, &images, case)
}

/// Generators of the partners commuting with the diagonal image: `I ⊗ su(q₀)`,
/// the element `E`, and `su(p₁, q₁)` in the `J₂` block.
pub fn diagonal_commutant_generators(
    n: usize,
    q0: usize,
    p: usize,
    q: usize,
    tol: &ToleranceConfig,
) -> Result<Vec<ComplexMatrix>> {
    let (p1, q1) = diagonal_blocks(n, q0, p, q);
    let size = p + q;
    let mut out = Vec::new();
    if q0 >= 2 {
        let su_q0 = build_su(q0, 0, &SignatureForm::standard(q0, 0), tol)?;
        for h in su_q0.basis() {
            out.push(place(&ComplexMatrix::identity(n + 1, n + 1).kronecker(h), size, 0));
        }
    }
    if p1 + q1 > 0 {
        out.push(element_e(n, q0, p, q));
    }
    if p1 + q1 >= 2 {
        let block = build_su(p1, q1, &SignatureForm::standard(p1, q1), tol)?;
        for h in block.basis() {
            out.push(place(h, size, (n + 1) * q0));
        }
    }
    Ok(out)
}

/// `E = diag(i(p₁+q₁) I_{(n+1)q₀}, −i(n+1)q₀ I_{p₁+q₁})`.
pub fn element_e(n: usize, q0: usize, p: usize, q: usize) -> ComplexMatrix {
    let (p1, q1) = diagonal_blocks(n, q0, p, q);
    let a = ((n + 1) * q0) as f64;
    let b = (p1 + q1) as f64;
    let diag = DVector::from_fn(p + q, |k, _| {
        if k < (n + 1) * q0 {
            I * b
        } else {
            I * (-a)
        }
    });
    ComplexMatrix::from_diagonal(&diag)
}

/// `X(b) = [[0, b], [−J₂ b† J₁, 0]]` for `b` of size `(n+1)q₀ × (p₁+q₁)`.
pub fn diagonal_x_of_b(n: usize, q0: usize, p: usize, q: usize, b: &ComplexMatrix) -> ComplexMatrix {
    let (p1, q1) = diagonal_blocks(n, q0, p, q);
    let top = (n + 1) * q0;
    assert_eq!(b.shape(), (top, p1 + q1), "b has the wrong shape");
    let j1 = SignatureForm::standard(n * q0, q0).matrix().clone();
    let j2 = SignatureForm::standard(p1, q1).matrix().clone();
    let mut out = ComplexMatrix::zeros(p + q, p + q);
    out.view_mut((0, top), b.shape()).copy_from(b);
    let lower = -(&j2 * b.adjoint() * &j1);
    out.view_mut((top, 0), lower.shape()).copy_from(&lower);
    out
}

/// Realification `X ↦ X_ℝ` of `su(n, 1)` into `sp(n+1, ℝ)`.
pub fn satake_embedding(n: usize, tol: &ToleranceConfig) -> Result<Embedding> {
    let case = GroupCase::SpReal { n };
    case.validate()?;
    let source = build_su_n1_source(n, tol)?;
    let target = Arc::new(build_sp_real(n, tol)?);
    let images: Vec<ComplexMatrix> = source
        .basis()
        .iter()
        .map(|x| to_complex(&realify(x)))
        .collect();
    Embedding::new(source, target, &images, case)
}

/// `Z₀`: multiplication by `i` on `ℝ^{2n+2}`.
pub fn z0_matrix(n: usize) -> ComplexMatrix {
    to_complex(&complex_structure(n + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IharaTarget {
    SoStar,
    So2n2,
}

/// Image of `T ∈ u(n, 1)` in `so*(2n+2)`:
/// `½ [[T − Tᵗ, −i(T + Tᵗ)], [i(T + Tᵗ), T − Tᵗ]]`.
///
/// This is `T ↦ diag(T, −Tᵗ)` conjugated by `S = [[I, I], [iI, −iI]]/√2`, which
/// carries the split form `[[0, I], [I, 0]]` to the identity and the form
/// `i diag(J, −J)` to `j`.
pub fn so_star_image(t: &ComplexMatrix) -> ComplexMatrix {
    let m = t.nrows();
    let tt = t.transpose();
    let a = (t - &tt) * Complex64::new(0.5, 0.0);
    let s = (t + &tt) * (I * 0.5);
    let mut out = ComplexMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, 0), (m, m)).copy_from(&a);
    out.view_mut((0, m), (m, m)).copy_from(&(-&s));
    out.view_mut((m, 0), (m, m)).copy_from(&s);
    out.view_mut((m, m), (m, m)).copy_from(&a);
    out
}

/// Inverse of [`so_star_image`] on its range: `X ↦ A + iB` for the top blocks.
pub fn so_star_to_unitary(x: &ComplexMatrix) -> ComplexMatrix {
    let m = x.nrows() / 2;
    let a = x.view((0, 0), (m, m)).into_owned();
    let b = x.view((0, m), (m, m)).into_owned();
    a + b * I
}

/// The alternative identification `X ↦ A − iBJ` of real block matrices.
pub fn so_star_block_identification(x: &ComplexMatrix) -> ComplexMatrix {
    let m = x.nrows() / 2;
    let j = j_n1(m - 1);
    let a = x.view((0, 0), (m, m)).into_owned();
    let b = x.view((0, m), (m, m)).into_owned();
    a - b * &j * I
}

/// `j₁ = [[0, I], [−I, 0]]`.
pub fn so_star_split_form(n: usize) -> ComplexMatrix {
    let m = n + 1;
    let mut out = ComplexMatrix::zeros(2 * m, 2 * m);
    out.view_mut((0, m), (m, m)).fill_with_identity();
    out.view_mut((m, 0), (m, m))
        .copy_from(&(-ComplexMatrix::identity(m, m)));
    out
}

/// The involution of `g` whose fixed algebra is the image of `u(n, 1)`.
///
/// For `so(2n, 2)` it is conjugation by multiplication by `i`; for `so*(2n+2)`
/// it is `Ad(j₁)`.
pub fn ihara_involution(target: IharaTarget, n: usize, x: &ComplexMatrix) -> ComplexMatrix {
    match target {
        IharaTarget::So2n2 => {
            let i_r = to_complex(&complex_structure(n + 1));
            -(&i_r * x * &i_r)
        }
        IharaTarget::SoStar => {
            let j1 = so_star_split_form(n);
            -(&j1 * x * &j1)
        }
    }
}

/// Holomorphic embedding of `su(n, 1)` into `so*(2n+2)` or `so(2n, 2)`.
pub fn ihara_embedding(n: usize, target: IharaTarget, tol: &ToleranceConfig) -> Result<Embedding> {
    let source = build_su_n1_source(n, tol)?;
    match target {
        IharaTarget::So2n2 => {
            let case = GroupCase::So2n2 { n };
            case.validate()?;
            let g = Arc::new(build_so_2n2(n, tol)?);
            let images: Vec<ComplexMatrix> = source
                .basis()
                .iter()
                .map(|x| to_complex(&realify(x)))
                .collect();
            Embedding::new(source, g, &images, case)
        }
        IharaTarget::SoStar => {
            let case = GroupCase::SoStar { n };
            case.validate()?;
            let g = Arc::new(build_so_star(n, tol)?);
            let images: Vec<ComplexMatrix> = source.basis().iter().map(so_star_image).collect();
            Embedding::new(source, g, &images, case)
        }
    }
}

/// `(ker(σ − 1), ker(σ + 1))` in target coordinates for the Ihara involution σ.
pub fn ihara_splitting(e: &Embedding, target: IharaTarget) -> (RealSubspace, RealSubspace) {
    let g = e.target();
    let d = g.dim();
    let n = e.case().n();
    let cols: Vec<DVector<f64>> = g
        .basis()
        .iter()
        .map(|b| g.coords_of(&ihara_involution(target, n, b)).0)
        .collect();
    let sigma = RealMatrix::from_columns(&cols);
    let id = RealMatrix::identity(d, d);
    let tol = g.tolerances();
    (
        joint_kernel(&[&sigma - &id], d, tol),
        joint_kernel(&[&sigma + &id], d, tol),
    )
}

/// Builds the embedding a case describes.
pub fn embedding_for(case: GroupCase, tol: &ToleranceConfig) -> Result<Embedding> {
    case.validate()?;
    match case {
        GroupCase::SuPq { n, q0, p, q } => diagonal_embedding(n, q0, p, q, tol),
        GroupCase::SpReal { n } => satake_embedding(n, tol),
        GroupCase::SoStar { n } => ihara_embedding(n, IharaTarget::SoStar, tol),
        GroupCase::So2n2 { n } => ihara_embedding(n, IharaTarget::So2n2, tol),
    }
}

/// For a real matrix of a conjugate-linear map `z ↦ A z̄`, recovers `A`.
pub fn conjugate_linear_part(x: &ComplexMatrix) -> ComplexMatrix {
    let m = x.nrows() / 2;
    ComplexMatrix::from_fn(m, m, |r, c| {
        Complex64::new(x[(2 * r, 2 * c)].re, x[(2 * r + 1, 2 * c)].re)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::MatrixField;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn diagonal_block_position() {
        let e = diagonal_embedding(2, 1, 3, 2, &tol()).unwrap();
        assert!(homomorphism_residual(&e) < 1e-12);
        for (x, img) in e.source().basis().iter().zip(e.images()) {
            let m = img.matrix();
            assert_eq!(m.nrows(), 5);
            assert!((m.view((0, 0), (3, 3)) - x).norm() < 1e-12);
            assert!(m.view((3, 0), (2, 5)).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_kronecker_images() {
        let e = diagonal_embedding(2, 2, 4, 2, &tol()).unwrap();
        for (x, img) in e.source().basis().iter().zip(e.images()) {
            assert!((img.matrix() - x.kronecker(&ComplexMatrix::identity(2, 2))).norm() < 1e-12);
        }
        let h = ComplexMatrix::from_diagonal(&DVector::from_vec(vec![I, -I, I * 0.0]));
        let img = e.map_matrix(&h).unwrap();
        assert!(img.matrix().trace().norm() < 1e-12);
    }

    #[test]
    fn diagonal_rejects_bad_parameters() {
        assert!(matches!(
            diagonal_embedding(2, 1, 1, 2, &tol()),
            Err(Error::BadParameters(_))
        ));
    }

    #[test]
    fn satake_images_commute_with_z0() {
        let e = satake_embedding(2, &tol()).unwrap();
        assert_eq!(e.images().len(), 8);
        assert_eq!(e.target().dim(), 21);
        let z0 = z0_matrix(2);
        for img in e.images() {
            assert!(commutator(&img.matrix(), &z0).norm() < 1e-13);
        }
        assert!(commutator(&e.t0_image().matrix(), &z0).norm() < 1e-13);
    }

    #[test]
    fn zeroed_image_breaks_homomorphism() {
        let e = satake_embedding(2, &tol()).unwrap();
        let mut mats: Vec<ComplexMatrix> = e.images().iter().map(|x| x.matrix()).collect();
        mats[0] = ComplexMatrix::zeros(6, 6);
        let broken = Embedding::from_matrices(
            e.source().clone(),
            e.target().clone(),
            &mats,
            e.case(),
        )
        .unwrap();
        assert!(homomorphism_residual(&broken) > 0.1);
        assert!(Embedding::new(e.source().clone(), e.target().clone(), &mats, e.case()).is_err());
    }

    #[test]
    fn ihara_splitting_dimensions() {
        let e = ihara_embedding(2, IharaTarget::So2n2, &tol()).unwrap();
        let (plus, minus) = ihara_splitting(&e, IharaTarget::So2n2);
        assert_eq!(plus.dim(), 9);
        assert_eq!(minus.dim(), 6);
        let e = ihara_embedding(3, IharaTarget::SoStar, &tol()).unwrap();
        let (plus, minus) = ihara_splitting(&e, IharaTarget::SoStar);
        assert_eq!(plus.dim(), 16);
        assert_eq!(minus.dim(), 12);
        // the image lies in the fixed part
        for img in e.images() {
            assert!(plus.relative_distance(img.coords()) < 1e-12);
        }
    }

    #[test]
    fn so_star_identification_is_an_isomorphism() {
        let n = 2;
        let u = RealLieAlgebra::new(
            "u(2,1)",
            MatrixField::Complex,
            {
                let mut b = crate::groups::su_n1_standard_basis(n);
                b.push(ComplexMatrix::identity(n + 1, n + 1) * I);
                b
            },
            crate::liealg::Realization::Plain,
            tol(),
        )
        .unwrap();
        for t in u.basis() {
            let x = so_star_image(t);
            assert!((so_star_to_unitary(&x) - t).norm() < 1e-14);
        }
        // the centre of u(n,1) maps to j₁
        let c = so_star_image(&(ComplexMatrix::identity(3, 3) * I));
        assert!((c - so_star_split_form(2)).norm() < 1e-14);
    }

    #[test]
    fn so2n2_anti_linear_part_is_antisymmetric() {
        let n = 3;
        let e = ihara_embedding(n, IharaTarget::So2n2, &tol()).unwrap();
        let (_, minus) = ihara_splitting(&e, IharaTarget::So2n2);
        let j = j_n1(n);
        for col in minus.basis().column_iter() {
            let x = e.target().matrix_of(&col.into_owned());
            let a = conjugate_linear_part(&x);
            let back = to_complex(&crate::linops::realify_conjugate_linear(&a));
            assert!((back - &x).norm() < 1e-12);
            let at = &j * a;
            assert!((at.transpose() + &at).norm() < 1e-12);
        }
    }
}
