//! Isotypic decomposition of `g` under `ad ∘ φ` of `su(n, 1)`.
//!
//! The Casimir operator splits `g` into eigenspaces. Inside each eigenspace the
//! isotypic component of a reference representation `R` is the span of the
//! images of all intertwiners `R → g`, found by a kernel solve. Whatever no
//! reference accounts for is reported as `other`. The trivial isotype is the
//! centralizer `z_g(l)`; it is split further into its centre and derived part.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{homomorphism_residual, Embedding};
use crate::error::{Error, Result};
use crate::groups::{su_n1_compact_indices, su_n1_standard_basis, t0_matrix, GroupCase};
use crate::linops::{
    cluster_sorted, column_span, commutator, hermitian_eigen, joint_kernel, orthonormalize,
    realify, singular_values, symmetric_eigen, ComplexMatrix, RealMatrix, RealSubspace,
    ToleranceConfig, I,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum ComponentLabel {
    Adjoint,
    Trivial,
    SymPower(usize),
    Other(String),
}

impl fmt::Display for ComponentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComponentLabel::Adjoint => write!(f, "adjoint"),
            ComponentLabel::Trivial => write!(f, "trivial"),
            ComponentLabel::SymPower(m) => write!(f, "sym_power({m})"),
            ComponentLabel::Other(tag) => write!(f, "other({tag})"),
        }
    }
}

/// Tag of the non-central part of the centralizer `z_g(l)`.
pub const CENTRALIZER_DERIVED_TAG: &str = "centralizer-derived";

/// One `ad(φ(l))`-invariant summand of `g`, in target coordinates.
#[derive(Debug, Clone)]
pub struct IsotypicComponent {
    pub subspace: RealSubspace,
    pub label: ComponentLabel,
    pub real_dim: usize,
    pub multiplicity: usize,
    pub casimir_scalar: f64,
    /// Eigenvalues of `−i·ad(φ(T₀))` on the component, ascending.
    pub t0_spectrum: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub case: GroupCase,
    pub components: Vec<IsotypicComponent>,
    /// Real dimension of the `S^m` isotype, for each `m ≥ 1` that occurs.
    pub g1_dims: BTreeMap<usize, usize>,
    pub g0_dim: usize,
    /// `‖C − Cᵗ‖ / ‖C‖` before symmetrization.
    pub casimir_asymmetry: f64,
}

impl DecompositionReport {
    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.real_dim).sum()
    }

    pub fn find(&self, label: &ComponentLabel) -> Option<&IsotypicComponent> {
        self.components.iter().find(|c| &c.label == label)
    }

    pub fn sym_powers(&self) -> impl Iterator<Item = (usize, &IsotypicComponent)> {
        self.components.iter().filter_map(|c| match c.label {
            ComponentLabel::SymPower(m) if m >= 1 => Some((m, c)),
            _ => None,
        })
    }

    pub fn has_sym_power(&self) -> bool {
        self.sym_powers().next().is_some()
    }

    /// Multiplicity `d_m` of `S^m(V)`, zero when absent.
    pub fn d(&self, m: usize) -> usize {
        self.find(&ComponentLabel::SymPower(m))
            .map(|c| c.multiplicity)
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    SymPower(usize),
    Adjoint,
}

/// A reference real representation of `su(n, 1)`: matrices for the standard basis.
#[derive(Debug, Clone)]
pub struct ReferenceRep {
    pub kind: ReferenceKind,
    pub n: usize,
    pub matrices: Vec<RealMatrix>,
    pub dim: usize,
    /// Realified action of `T₀`.
    pub t0: RealMatrix,
    /// Subspace on which the action of `T₀` is `i·m/(n+1)` (only for `S^m`):
    /// the monomials free of the last variable.
    pub top_weight: Option<RealMatrix>,
}

impl ReferenceRep {
    pub fn label(&self) -> ComponentLabel {
        match self.kind {
            ReferenceKind::SymPower(m) => ComponentLabel::SymPower(m),
            ReferenceKind::Adjoint => ComponentLabel::Adjoint,
        }
    }

    /// Casimir scalar by the trace identity `Σ B^{ij} tr(ρ_i ρ_j) / dim`.
    pub fn casimir_scalar(&self) -> f64 {
        let ginv = source_dual_gram(self.n);
        let k = self.matrices.len();
        let mut acc = 0.0;
        for i in 0..k {
            for j in 0..k {
                if ginv[(i, j)] != 0.0 {
                    acc += ginv[(i, j)] * (&self.matrices[i] * &self.matrices[j]).trace();
                }
            }
        }
        acc / self.dim as f64
    }

    /// Sorted eigenvalues of `−i·ρ(T₀)`.
    pub fn t0_spectrum(&self) -> Vec<f64> {
        skew_spectrum(&self.t0)
    }

    /// `max ‖ρ([X_i, X_j]) − [ρ_i, ρ_j]‖ / max ‖ρ_k‖²`.
    pub fn homomorphism_residual(&self) -> f64 {
        let basis = su_n1_standard_basis(self.n);
        let source = crate::groups::build_su_n1_source(self.n, &ToleranceConfig::default())
            .expect("source algebra");
        let scale = self
            .matrices
            .iter()
            .map(|m| m.norm_squared())
            .fold(f64::MIN_POSITIVE, f64::max);
        let mut worst: f64 = 0.0;
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let (c, _) = source.coords_of(&commutator(&basis[i], &basis[j]));
                let mut lhs = RealMatrix::zeros(self.dim, self.dim);
                for (k, ck) in c.iter().enumerate() {
                    lhs += &self.matrices[k] * *ck;
                }
                let rhs = &self.matrices[i] * &self.matrices[j] - &self.matrices[j] * &self.matrices[i];
                worst = worst.max((lhs - rhs).norm() / scale);
            }
        }
        worst
    }
}

/// Inverse Gram matrix of the trace form on the standard basis of `su(n, 1)`.
fn source_dual_gram(n: usize) -> RealMatrix {
    let basis = su_n1_standard_basis(n);
    let k = basis.len();
    let g = RealMatrix::from_fn(k, k, |i, j| (&basis[i] * &basis[j]).trace().re);
    g.try_inverse().expect("trace form is nondegenerate on su(n,1)")
}

fn exponents(vars: usize, degree: usize) -> Vec<Vec<usize>> {
    if vars == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in exponents(vars - 1, degree - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Binomial coefficient.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn sym_power_matrix(x: &ComplexMatrix, monomials: &[Vec<usize>], index: &BTreeMap<Vec<usize>, usize>) -> ComplexMatrix {
    let dim = monomials.len();
    let nv = x.nrows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (col, alpha) in monomials.iter().enumerate() {
        for j in 0..nv {
            if alpha[j] == 0 {
                continue;
            }
            for i in 0..nv {
                let xij = x[(i, j)];
                if xij.norm() == 0.0 {
                    continue;
                }
                let mut beta = alpha.clone();
                beta[j] -= 1;
                beta[i] += 1;
                out[(index[&beta], col)] += xij * alpha[j] as f64;
            }
        }
    }
    out
}

/// Realified `S^m(ℂ^{n+1})` with the derivation action on degree-`m` monomials.
pub fn reference_symmetric_power(n: usize, m: usize) -> ReferenceRep {
    let monomials = exponents(n + 1, m);
    let index: BTreeMap<Vec<usize>, usize> = monomials
        .iter()
        .enumerate()
        .map(|(k, a)| (a.clone(), k))
        .collect();
    let matrices = su_n1_standard_basis(n)
        .iter()
        .map(|x| realify(&sym_power_matrix(x, &monomials, &index)))
        .collect();
    let t0 = realify(&sym_power_matrix(&t0_matrix(n), &monomials, &index));
    let dim = 2 * monomials.len();
    let top: Vec<usize> = monomials
        .iter()
        .enumerate()
        .filter(|(_, a)| a[n] == 0)
        .map(|(k, _)| k)
        .collect();
    let mut top_weight = RealMatrix::zeros(dim, 2 * top.len());
    for (c, &k) in top.iter().enumerate() {
        top_weight[(2 * k, 2 * c)] = 1.0;
        top_weight[(2 * k + 1, 2 * c + 1)] = 1.0;
    }
    ReferenceRep {
        kind: ReferenceKind::SymPower(m),
        n,
        matrices,
        dim,
        t0,
        top_weight: Some(top_weight),
    }
}

/// Adjoint representation of `su(n, 1)`, in a Frobenius-orthonormal basis.
pub fn reference_adjoint(n: usize) -> ReferenceRep {
    let tol = ToleranceConfig::default();
    let source = crate::groups::build_su_n1_source(n, &tol).expect("source algebra");
    let d = source.dim();
    let on = orthonormalize(&RealSubspace::full(d), &source.frobenius_gram())
        .expect("Frobenius gram is positive definite");
    let q = on.basis().clone();
    let qinv = q.clone().try_inverse().expect("change of basis");
    let conj = |a: RealMatrix| &qinv * a * &q;
    let matrices = source
        .basis()
        .iter()
        .map(|x| conj(source.ad_matrix(x)))
        .collect();
    let t0 = conj(source.ad_matrix(&t0_matrix(n)));
    ReferenceRep {
        kind: ReferenceKind::Adjoint,
        n,
        matrices,
        dim: d,
        t0,
        top_weight: None,
    }
}

/// Sorted eigenvalues of `−i·A` for a (numerically) skew matrix `A`.
fn skew_spectrum(a: &RealMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let skew = (a - a.transpose()) * 0.5;
    let h = skew.map(|x| -I * x);
    let loose = ToleranceConfig::default().with_residual_tol(1e-6);
    hermitian_eigen(&h, &loose).expect("−iA is Hermitian").0
}

/// `C = Σ B^{ij} ad(φX_i) ad(φX_j)` on `g`, in target coordinates.
pub fn casimir_operator(e: &Embedding) -> Result<RealMatrix> {
    let src = e.source();
    let gram = src.trace_form_gram();
    let (vals, _) = symmetric_eigen(&gram);
    let amax = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if vals.iter().any(|v| v.abs() <= src.tolerances().residual_tol * amax) {
        return Err(Error::DegenerateForm);
    }
    let ginv = gram.try_inverse().ok_or(Error::DegenerateForm)?;
    let ops = e.ad_operators();
    let d = e.target().dim();
    let mut c = RealMatrix::zeros(d, d);
    for i in 0..ops.len() {
        for j in 0..ops.len() {
            if ginv[(i, j)].abs() > 0.0 {
                c += (&ops[i] * &ops[j]) * ginv[(i, j)];
            }
        }
    }
    Ok(c)
}

/// Action of the source basis restricted to the subspace with orthonormal basis `q`.
fn restricted_ops(ops: &[RealMatrix], q: &RealMatrix) -> Vec<RealMatrix> {
    ops.iter().map(|a| q.transpose() * a * q).collect()
}

/// Orthonormal basis (in `q`-coordinates) of the solution space of
/// `T ρ(X_i) = A_i T`, returned as `u × r` matrices.
fn intertwiner_space(restricted: &[RealMatrix], reference: &ReferenceRep, tol: &ToleranceConfig) -> Vec<RealMatrix> {
    let u = restricted.first().map(|a| a.nrows()).unwrap_or(0);
    let r = reference.dim;
    if u == 0 || r == 0 {
        return Vec::new();
    }
    let id_u = RealMatrix::identity(u, u);
    let id_r = RealMatrix::identity(r, r);
    let system: Vec<RealMatrix> = restricted
        .iter()
        .zip(&reference.matrices)
        .map(|(a, rho)| rho.transpose().kronecker(&id_u) - id_r.kronecker(a))
        .collect();
    let kernel = joint_kernel(&system, u * r, tol);
    kernel
        .basis()
        .column_iter()
        .map(|col| RealMatrix::from_column_slice(u, r, col.as_slice()))
        .collect()
}

/// A numerically found intertwiner from a reference into a component.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    /// `u × r` matrix mapping reference coordinates to component-basis coordinates.
    pub map: RealMatrix,
    /// Real dimension of the space of all intertwiners.
    pub solution_dim: usize,
}

/// Schur test: is there an injective `T` with `T ρ(X) = ad(φX) T`?
pub fn equivalence_test(
    component: &IsotypicComponent,
    reference: &ReferenceRep,
    e: &Embedding,
    cfg: &ToleranceConfig,
) -> Option<Intertwiner> {
    if component.real_dim == 0 || component.real_dim % reference.dim != 0 {
        return None;
    }
    let q = component.subspace.basis();
    let restricted = restricted_ops(e.ad_operators(), q);
    let sols = intertwiner_space(&restricted, reference, cfg);
    if sols.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1507_7e57);
    for _ in 0..4 {
        let mut t = RealMatrix::zeros(q.ncols(), reference.dim);
        for s in &sols {
            t += s * rng.gen_range(-1.0..1.0);
        }
        let sv = singular_values(&t);
        if sv.len() == reference.dim && sv[sv.len() - 1] > cfg.residual_tol.sqrt() * sv[0] {
            return Some(Intertwiner {
                map: t,
                solution_dim: sols.len(),
            });
        }
    }
    None
}

/// Largest `m` worth testing: below the first `m` with `dim_ℝ S^m(V) > dim g`.
pub fn max_sym_power(n: usize, dim_g: usize) -> usize {
    let mut m = 1;
    while 2 * binomial(n + m, m) <= dim_g {
        m += 1;
    }
    m - 1
}

fn spectra_match(got: &[f64], reference: &[f64], copies: usize, tol: f64) -> bool {
    let mut want: Vec<f64> = reference
        .iter()
        .flat_map(|v| std::iter::repeat(*v).take(copies))
        .collect();
    want.sort_by(|a, b| a.total_cmp(b));
    got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).abs() < tol)
}

fn make_component(
    basis: RealMatrix,
    label: ComponentLabel,
    multiplicity: usize,
    casimir: f64,
    a0: &RealMatrix,
) -> IsotypicComponent {
    let spectrum = skew_spectrum(&(basis.transpose() * a0 * &basis));
    IsotypicComponent {
        real_dim: basis.ncols(),
        subspace: RealSubspace::from_orthonormal(basis),
        label,
        multiplicity,
        casimir_scalar: casimir,
        t0_spectrum: spectrum,
    }
}

/// Span of what is left of an orthonormal block after projecting part of it away.
/// Directions of norm below `tol` are dropped, so a fully consumed block is empty.
fn leftover_span(m: &RealMatrix, tol: f64) -> RealMatrix {
    let svd = nalgebra::SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested left singular vectors");
    let keep: Vec<_> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .map(|i| u.column(i).into_owned())
        .collect();
    if keep.is_empty() {
        RealMatrix::zeros(m.nrows(), 0)
    } else {
        RealMatrix::from_columns(&keep)
    }
}

/// Splits the centralizer `z` (orthonormal columns) into its centre and the rest.
fn split_centralizer(e: &Embedding, z: &RealMatrix, cfg: &ToleranceConfig) -> (RealMatrix, RealMatrix) {
    let g = e.target();
    let k = z.ncols();
    let mats: Vec<ComplexMatrix> = z
        .column_iter()
        .map(|c| g.matrix_of(&c.into_owned()))
        .collect();
    // u ↦ [v_k, u] restricted to z, for every basis vector v_k
    // operators that already vanish on z are dropped, joint_kernel would rescale their noise
    let ops: Vec<RealMatrix> = mats
        .iter()
        .filter_map(|v| {
            let ad = g.ad_matrix(v);
            let scale = ad.norm();
            let r = ad * z;
            (scale > 0.0 && r.norm() > cfg.residual_tol * scale).then_some(r)
        })
        .collect();
    let centre_coords = joint_kernel(&ops, k, cfg);
    let centre = z * centre_coords.basis();
    let rest = z - &centre * (centre.transpose() * z);
    let rest = leftover_span(&rest, cfg.residual_tol.sqrt());
    (centre, rest)
}

/// Decomposes `g` into isotypic components under `ad ∘ φ`.
pub fn decompose_adjoint(e: &Embedding, cfg: &ToleranceConfig) -> Result<DecompositionReport> {
    cfg.validate()?;
    let hres = homomorphism_residual(e);
    if hres > cfg.residual_tol {
        return Err(Error::ResidualTooHigh {
            context: "homomorphism residual".into(),
            residual: hres,
            tol: cfg.residual_tol,
        });
    }
    let n = e.case().n();
    let d = e.target().dim();
    let ops = e.ad_operators();
    let a0 = e.t0_image();
    let a0 = e.target().ad_matrix(&a0.matrix());

    let c = casimir_operator(e)?;
    let cnorm = c.norm().max(f64::MIN_POSITIVE);
    let casimir_asymmetry = (&c - c.transpose()).norm() / cnorm;
    if casimir_asymmetry > cfg.residual_tol.sqrt() {
        return Err(Error::ResidualTooHigh {
            context: "Casimir operator is not self-adjoint".into(),
            residual: casimir_asymmetry,
            tol: cfg.residual_tol.sqrt(),
        });
    }
    let (vals, vecs) = symmetric_eigen(&c);

    let mut references = vec![reference_adjoint(n)];
    for m in 1..=max_sym_power(n, d) {
        references.push(reference_symmetric_power(n, m));
    }
    let ref_casimirs: Vec<f64> = references.iter().map(|r| r.casimir_scalar()).collect();

    let mut components = Vec::new();
    for range in cluster_sorted(&vals, cfg.eigen_gap_tol) {
        let scalar = vals[range.clone()].iter().sum::<f64>() / range.len() as f64;
        let cluster = vecs.columns(range.start, range.len()).into_owned();

        if scalar.abs() < cfg.eigen_gap_tol {
            // trivial isotype: must be annihilated by the whole action
            let worst = ops
                .iter()
                .map(|a| (a * &cluster).norm() / a.norm().max(f64::MIN_POSITIVE))
                .fold(0.0_f64, f64::max);
            if worst > cfg.residual_tol.sqrt() {
                return Err(Error::UnresolvedComponent(format!(
                    "Casimir kernel is not annihilated by l (residual {worst:.3e})"
                )));
            }
            let (centre, rest) = split_centralizer(e, &cluster, cfg);
            if centre.ncols() > 0 {
                let k = centre.ncols();
                components.push(make_component(centre, ComponentLabel::Trivial, k, 0.0, &a0));
            }
            if rest.ncols() > 0 {
                let k = rest.ncols();
                components.push(make_component(
                    rest,
                    ComponentLabel::Other(CENTRALIZER_DERIVED_TAG.into()),
                    k,
                    0.0,
                    &a0,
                ));
            }
            continue;
        }

        let mut remaining = cluster;
        for (reference, rc) in references.iter().zip(&ref_casimirs) {
            if (rc - scalar).abs() > cfg.eigen_gap_tol.max(1e-6 * scalar.abs()) || remaining.ncols() == 0 {
                continue;
            }
            let restricted = restricted_ops(ops, &remaining);
            let sols = intertwiner_space(&restricted, reference, cfg);
            if sols.is_empty() {
                continue;
            }
            let stacked = RealMatrix::from_columns(
                &sols
                    .iter()
                    .flat_map(|s| s.column_iter().map(|c| c.into_owned()).collect::<Vec<DVector<f64>>>())
                    .collect::<Vec<_>>(),
            );
            let image = &remaining * column_span(&stacked, cfg.residual_tol.sqrt());
            let dim = image.ncols();
            if dim % reference.dim != 0 {
                return Err(Error::UnresolvedComponent(format!(
                    "{} isotype of dimension {dim} is not a multiple of {}",
                    reference.label(),
                    reference.dim
                )));
            }
            let copies = dim / reference.dim;
            let comp = make_component(image.clone(), reference.label(), copies, scalar, &a0);
            if !spectra_match(&comp.t0_spectrum, &reference.t0_spectrum(), copies, cfg.eigen_gap_tol) {
                return Err(Error::UnresolvedComponent(format!(
                    "T0 spectrum of the {} isotype does not match {copies} reference copies",
                    reference.label()
                )));
            }
            components.push(comp);
            remaining = &remaining - &image * (image.transpose() * &remaining);
            remaining = leftover_span(&remaining, cfg.residual_tol.sqrt());
        }
        if remaining.ncols() > 0 {
            let dim = remaining.ncols();
            let tag = format!("dim{dim}-casimir{scalar:.6}");
            components.push(make_component(remaining, ComponentLabel::Other(tag), 1, scalar, &a0));
        }
    }

    components.sort_by(|a, b| a.label.cmp(&b.label));
    let total: usize = components.iter().map(|c| c.real_dim).sum();
    if total != d {
        return Err(Error::UnresolvedComponent(format!(
            "component dimensions sum to {total}, algebra has dimension {d}"
        )));
    }
    let mut g1_dims = BTreeMap::new();
    for comp in &components {
        if let ComponentLabel::SymPower(m) = comp.label {
            *g1_dims.entry(m).or_insert(0) += comp.real_dim;
        }
    }
    let g0_dim = d - g1_dims.values().sum::<usize>();
    Ok(DecompositionReport {
        case: e.case(),
        components,
        g1_dims,
        g0_dim,
        casimir_asymmetry,
    })
}

/// `‖(I − P) ad(φX_i) P‖` maximized over the source basis, relative to `‖ad(φX_i)‖`.
pub fn invariance_residual(component: &IsotypicComponent, e: &Embedding) -> f64 {
    let q = component.subspace.basis();
    e.ad_operators()
        .iter()
        .map(|a| {
            let aq = a * q;
            let out = &aq - q * (q.transpose() * &aq);
            out.norm() / a.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// The `s^m`-isotype `W_m` inside an `S^m` component, with complex structure `J_m`.
#[derive(Debug, Clone)]
pub struct WmSubspace {
    pub m: usize,
    /// Orthonormal basis in target coordinates.
    pub subspace: RealSubspace,
    /// `J_m = ((n+1)/m)·ad(φ(T₀))` in the basis of `subspace`.
    pub j_m: RealMatrix,
    pub d_m: usize,
}

impl WmSubspace {
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// `J_m² + Id` in operator norm terms (Frobenius).
    pub fn square_residual(&self) -> f64 {
        let k = self.dim();
        (&self.j_m * &self.j_m + RealMatrix::identity(k, k)).norm()
    }

    /// Largest `‖[J_m, ad(φX)|_W]‖` over the compact part of the source basis,
    /// together with the largest leak `‖(I − P_W) ad(φX) P_W‖`.
    pub fn equivariance_residual(&self, e: &Embedding) -> (f64, f64) {
        let w = self.subspace.basis();
        let mut comm: f64 = 0.0;
        let mut leak: f64 = 0.0;
        for idx in su_n1_compact_indices(e.case().n()) {
            let a = &e.ad_operators()[idx];
            let scale = a.norm().max(f64::MIN_POSITIVE);
            let aw = a * w;
            let r = w.transpose() * &aw;
            leak = leak.max((&aw - w * &r).norm() / scale);
            comm = comm.max((&self.j_m * &r - &r * &self.j_m).norm() / scale);
        }
        (comm, leak)
    }

    /// Coordinates in the `W_m` basis of a target-coordinate vector.
    pub fn local_coords(&self, x: &DVector<f64>) -> DVector<f64> {
        self.subspace.basis().transpose() * x
    }
}

/// Extracts `W_m` inside an `S^m` component: the images of the top-weight space
/// `S^m(ℂⁿ)` of the reference under every intertwiner. There `ad(φ(T₀))` acts as
/// `+i·m/(n+1)` for the transported complex structure.
///
/// `W_m` always lies in `ker(ad(φT₀)² + (m/(n+1))²)` and equals it unless another
/// weight of `S^m` has the same absolute value (for instance `n = 3, m = 2`).
pub fn extract_wm(component: &IsotypicComponent, e: &Embedding, cfg: &ToleranceConfig) -> Result<WmSubspace> {
    let m = match component.label {
        ComponentLabel::SymPower(m) if m >= 1 => m,
        ref other => {
            return Err(Error::BadParameters(format!(
                "W_m needs a sym_power(m ≥ 1) component, got {other}"
            )))
        }
    };
    let n = e.case().n();
    let lambda = m as f64 / (n as f64 + 1.0);
    let q = component.subspace.basis();
    let a0 = e.target().ad_matrix(&e.t0_image().matrix());
    let r0 = q.transpose() * &a0 * q;
    let u = r0.nrows();
    let k = &r0 * &r0 + RealMatrix::identity(u, u) * (lambda * lambda);
    let ker = joint_kernel(&[k.clone()], u, cfg);
    if ker.dim() == 0 {
        return Err(Error::EigenvalueAbsent { expected: lambda });
    }

    let reference = reference_symmetric_power(n, m);
    let top = reference.top_weight.as_ref().expect("symmetric powers carry a top weight");
    let sols = intertwiner_space(&restricted_ops(e.ad_operators(), q), &reference, cfg);
    let images: Vec<DVector<f64>> = sols
        .iter()
        .flat_map(|t| (t * top).column_iter().map(|c| c.into_owned()).collect::<Vec<_>>())
        .collect();
    let local = if images.is_empty() {
        RealMatrix::zeros(u, 0)
    } else {
        column_span(&RealMatrix::from_columns(&images), cfg.residual_tol.sqrt())
    };
    let expected = component.multiplicity * 2 * binomial(n + m - 1, m);
    if local.ncols() != expected {
        return Err(Error::DimensionMismatch(format!(
            "W_{m} has dimension {}, expected d_m·2·C(n+m−1, m) = {expected}",
            local.ncols()
        )));
    }
    let leak = (&k * &local).norm() / k.norm().max(f64::MIN_POSITIVE);
    if leak > cfg.residual_tol.sqrt() {
        return Err(Error::ResidualTooHigh {
            context: format!("W_{m} outside the ±i·{lambda} eigenspace"),
            residual: leak,
            tol: cfg.residual_tol.sqrt(),
        });
    }
    let w = q * local;
    let j_m = (w.transpose() * &a0 * &w) / lambda;
    let out = WmSubspace {
        m,
        subspace: RealSubspace::from_orthonormal(w),
        j_m,
        d_m: component.multiplicity,
    };
    let sq = out.square_residual();
    if sq > cfg.residual_tol.sqrt() {
        return Err(Error::ResidualTooHigh {
            context: format!("J_{m}² + Id"),
            residual: sq,
            tol: cfg.residual_tol.sqrt(),
        });
    }
    Ok(out)
}
