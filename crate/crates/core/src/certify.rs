//! Centralizers, the quadratic forms `Q_Z(X) = −B(Z, [X, J_m X])`, explicit
//! and searched positivity certificates, and the rigidity verdict.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::embed::Embedding;
use crate::error::{Error, Result};
use crate::groups::GroupCase;
use crate::isotype::{extract_wm, DecompositionReport, IsotypicComponent, WmSubspace};
use crate::liealg::{AlgebraElement, RealLieAlgebra};
use crate::linops::{joint_kernel, min_eigenpair, ComplexMatrix, RealMatrix, RealSubspace, ToleranceConfig, I};

/// `z_g(l)`: the joint kernel of all `ad(φ(X_i))`.
pub fn centralizer(e: &Embedding) -> RealSubspace {
    let g = e.target();
    joint_kernel(e.ad_operators(), g.dim(), g.tolerances())
}

/// `z_k(l) = z_g(l) ∩ k`, orthonormal for `−B(·, θ·)`.
pub fn centralizer_in_k(e: &Embedding) -> Result<RealSubspace> {
    let g = e.target();
    let d = g.dim();
    let theta = g.theta_matrix()?;
    let mut maps: Vec<RealMatrix> = e.ad_operators().to_vec();
    maps.push(theta - RealMatrix::identity(d, d));
    Ok(joint_kernel(&maps, d, g.tolerances()))
}

/// `−B(X, θX)`; equal to `‖X‖²_F` for every realization in scope.
pub fn cartan_norm_sq(x: &AlgebraElement) -> Result<f64> {
    let m = x.matrix();
    let t = x.algebra().theta(&m)?;
    Ok(-(m * t).trace().re)
}

/// Symmetrized Gram matrix of `Q_Z` on `W_m`, with the norm of the discarded
/// antisymmetric part.
#[derive(Debug, Clone)]
pub struct QGram {
    pub sym: RealMatrix,
    pub antisym_norm: f64,
}

/// `β_Z(X, Y) = −½ B(Z, [X, J_m Y] + [Y, J_m X])` in the basis of `W_m`.
pub fn gram_of_q_full(z: &AlgebraElement, w: &WmSubspace) -> QGram {
    let g = z.algebra();
    let bg = g.trace_form_gram();
    gram_with(&g.ad_matrix(&z.matrix()), &bg, w)
}

fn gram_with(ad_z: &RealMatrix, bg: &RealMatrix, w: &WmSubspace) -> QGram {
    let basis = w.subspace.basis();
    // B([Z, X], J Y) = xᵗ (ad_Z W)ᵗ B_g W J y
    let m = -((ad_z * basis).transpose() * bg * basis * &w.j_m);
    let sym = (&m + m.transpose()) * 0.5;
    let antisym_norm = ((&m - m.transpose()) * 0.5).norm();
    QGram { sym, antisym_norm }
}

pub fn gram_of_q(z: &AlgebraElement, w: &WmSubspace) -> RealMatrix {
    gram_of_q_full(z, w).sym
}

/// `Q_Z(X) = −B(Z, [X, J_m X])` for `X` given in `W_m` coordinates.
pub fn q_value(z: &AlgebraElement, w: &WmSubspace, x: &DVector<f64>) -> f64 {
    (x.transpose() * gram_of_q(z, w) * x)[(0, 0)]
}

/// The window `(lower, upper)` for `γ`; `None` when `p₁ = 0` and `γ` is unused.
pub fn gamma_window(n: usize, q0: usize, p: usize, q: usize) -> Option<(f64, f64)> {
    let (p1, q1) = crate::embed::diagonal_blocks(n, q0, p, q);
    if p1 == 0 {
        return None;
    }
    let a = ((n + 1) * q0) as f64;
    let (p1, q1) = (p1 as f64, q1 as f64);
    let upper = if q1 == 0.0 { f64::INFINITY } else { (a + p1) / q1 };
    Some((p1 / (a + q1), upper))
}

/// Midpoint of the window (one past the lower end when it is unbounded).
pub fn default_gamma(n: usize, q0: usize, p: usize, q: usize) -> Option<f64> {
    gamma_window(n, q0, p, q).map(|(lo, hi)| if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 })
}

/// `Z = diag(iα I_{(n+1)q₀}, iβ I_{p₁}, iγ I_{q₁})` with `β = −1` and
/// `α = (p₁ − γq₁)/((n+1)q₀)`; for `p₁ = 0`, `Z = diag(−i q₁/((n+1)q₀) I, i I)`.
pub fn explicit_z_diagonal_matrix(n: usize, q0: usize, p: usize, q: usize, gamma: f64) -> Result<ComplexMatrix> {
    GroupCase::SuPq { n, q0, p, q }.validate()?;
    let (p1, q1) = crate::embed::diagonal_blocks(n, q0, p, q);
    let top = (n + 1) * q0;
    let a = top as f64;
    let (alpha, beta, gamma) = match gamma_window(n, q0, p, q) {
        None => (-(q1 as f64) / a, 0.0, 1.0),
        Some((lower, upper)) => {
            if !(gamma > lower && gamma < upper) {
                return Err(Error::GammaOutOfWindow { gamma, lower, upper });
            }
            ((p1 as f64 - gamma * q1 as f64) / a, -1.0, gamma)
        }
    };
    let diag = DVector::from_fn(p + q, |k, _| {
        if k < top {
            I * alpha
        } else if k < top + p1 {
            I * beta
        } else {
            I * gamma
        }
    });
    Ok(ComplexMatrix::from_diagonal(&diag))
}

/// [`explicit_z_diagonal_matrix`] as an element of the target of a diagonal embedding.
pub fn explicit_z_diagonal(e: &Embedding, gamma: f64) -> Result<AlgebraElement> {
    match e.case() {
        GroupCase::SuPq { n, q0, p, q } => {
            let m = explicit_z_diagonal_matrix(n, q0, p, q, gamma)?;
            AlgebraElement::from_matrix(e.target().clone(), &m)
        }
        other => Err(Error::BadParameters(format!("{other} is not a diagonal case"))),
    }
}

/// A point `Z ∈ z_k(l)` with `Q_Z > 0` on every `W_m`.
#[derive(Debug, Clone)]
pub struct PositivityCertificate {
    pub z: AlgebraElement,
    /// Coordinates of `Z` in the orthonormal basis of `z_k(l)`.
    pub centralizer_coords: DVector<f64>,
    /// Smallest eigenvalue of the symmetrized `Q_Z` on `W_m`.
    pub margins: BTreeMap<usize, f64>,
    /// `−B(Z, θZ)`.
    pub normalization: f64,
    pub antisym_norms: BTreeMap<usize, f64>,
}

impl PositivityCertificate {
    pub fn margin(&self) -> f64 {
        self.margins.values().copied().fold(f64::INFINITY, f64::min)
    }
}

/// The best point found when no certificate exists.
#[derive(Debug, Clone)]
pub struct InfeasibilityReport {
    pub best_z: AlgebraElement,
    pub centralizer_coords: DVector<f64>,
    pub best_value: f64,
    pub margins: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Certificate(PositivityCertificate),
    Infeasible(InfeasibilityReport),
}

impl SearchOutcome {
    pub fn value(&self) -> f64 {
        match self {
            SearchOutcome::Certificate(c) => c.margin(),
            SearchOutcome::Infeasible(r) => r.best_value,
        }
    }

    pub fn certificate(&self) -> Option<&PositivityCertificate> {
        match self {
            SearchOutcome::Certificate(c) => Some(c),
            SearchOutcome::Infeasible(_) => None,
        }
    }
}

/// Fresh margins of `Z` on each `W_m`, recomputed from the matrices.
pub fn evaluate_margins(z: &AlgebraElement, ws: &[WmSubspace]) -> (BTreeMap<usize, f64>, BTreeMap<usize, f64>) {
    let mut margins = BTreeMap::new();
    let mut antisym = BTreeMap::new();
    for w in ws {
        let q = gram_of_q_full(z, w);
        margins.insert(w.m, min_eigenpair(&q.sym).0);
        antisym.insert(w.m, q.antisym_norm);
    }
    (margins, antisym)
}

/// Checks a candidate independently of how it was found.
pub fn verify_certificate(
    e: &Embedding,
    z: &AlgebraElement,
    ws: &[WmSubspace],
    cfg: &ToleranceConfig,
) -> Result<PositivityCertificate> {
    let zm = z.matrix();
    let scale = z.norm().max(f64::MIN_POSITIVE);
    for img in e.images() {
        let c = crate::linops::commutator(&zm, &img.matrix()).norm() / (scale * img.norm());
        if c > cfg.residual_tol {
            return Err(Error::ResidualTooHigh {
                context: "Z does not commute with the image".into(),
                residual: c,
                tol: cfg.residual_tol,
            });
        }
    }
    let theta = z.algebra().theta(&zm)?;
    let off = (&theta - &zm).norm() / scale;
    if off > cfg.residual_tol {
        return Err(Error::ResidualTooHigh {
            context: "Z is not fixed by the Cartan involution".into(),
            residual: off,
            tol: cfg.residual_tol,
        });
    }
    let (margins, antisym_norms) = evaluate_margins(z, ws);
    let kz = centralizer_in_k(e)?;
    let centralizer_coords = kz.basis().transpose() * z.coords();
    Ok(PositivityCertificate {
        z: z.clone(),
        centralizer_coords,
        margins,
        normalization: cartan_norm_sq(z)?,
        antisym_norms,
    })
}

/// Extracts `W_m` for every `S^m` component of the report.
pub fn wm_subspaces(e: &Embedding, rep: &DecompositionReport, cfg: &ToleranceConfig) -> Result<Vec<WmSubspace>> {
    rep.sym_powers().map(|(_, c)| extract_wm(c, e, cfg)).collect()
}

struct Objective {
    /// `grams[m][j]`: Gram of `Q_{z_j}` on `W_m` for the centralizer basis vector `z_j`.
    grams: Vec<Vec<RealMatrix>>,
}

impl Objective {
    fn assemble(&self, m: usize, c: &DVector<f64>) -> RealMatrix {
        let mut acc = RealMatrix::zeros(self.grams[m][0].nrows(), self.grams[m][0].ncols());
        for (g, cj) in self.grams[m].iter().zip(c.iter()) {
            acc += g * *cj;
        }
        acc
    }

    /// `(f(c), index of the active m, its minimal eigenvector)`.
    fn eval(&self, c: &DVector<f64>) -> (f64, usize, DVector<f64>) {
        let mut best = (f64::INFINITY, 0, DVector::zeros(0));
        for m in 0..self.grams.len() {
            let (lam, v) = min_eigenpair(&self.assemble(m, c));
            if lam < best.0 {
                best = (lam, m, v);
            }
        }
        best
    }

    fn subgradient(&self, m: usize, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.grams[m].len(),
            self.grams[m].iter().map(|g| (v.transpose() * g * v)[(0, 0)]),
        )
    }
}

const SPHERE_SAMPLES: usize = 10_000;

fn sphere_points(k: usize) -> Vec<DVector<f64>> {
    const DENSE: usize = SPHERE_SAMPLES;
    match k {
        1 => vec![DVector::from_element(1, 1.0), DVector::from_element(1, -1.0)],
        2 => (0..DENSE)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / DENSE as f64;
                DVector::from_vec(vec![t.cos(), t.sin()])
            })
            .collect(),
        3 => {
            // Fibonacci lattice
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..DENSE)
                .map(|i| {
                    let y = 1.0 - 2.0 * (i as f64 + 0.5) / DENSE as f64;
                    let r = (1.0 - y * y).sqrt();
                    let t = golden * i as f64;
                    DVector::from_vec(vec![r * t.cos(), y, r * t.sin()])
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0xc3e7_0001);
            (0..DENSE)
                .map(|_| {
                    let v = DVector::<f64>::from_fn(k, |_, _| StandardNormal.sample(&mut rng));
                    let n = v.norm();
                    v / n
                })
                .collect()
        }
    }
}

fn lex_less(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Maximizes `min_m λ_min(Q_Z|W_m)` over the unit sphere of `z_k(l)`.
pub fn certificate_search(e: &Embedding, rep: &DecompositionReport, cfg: &ToleranceConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let ws = wm_subspaces(e, rep, cfg)?;
    if ws.is_empty() {
        return Err(Error::BadParameters(
            "certificate search needs a sym_power(m ≥ 1) component".into(),
        ));
    }
    let kz = centralizer_in_k(e)?;
    if kz.dim() == 0 {
        return Err(Error::EmptyCentralizer);
    }
    let g: &Arc<RealLieAlgebra> = e.target();
    let bg = g.trace_form_gram();
    let basis_elems: Vec<AlgebraElement> = kz
        .basis()
        .column_iter()
        .map(|c| AlgebraElement::new(g.clone(), c.into_owned()))
        .collect::<Result<_>>()?;
    let ad_z: Vec<RealMatrix> = basis_elems.iter().map(|z| g.ad_matrix(&z.matrix())).collect();
    let obj = Objective {
        grams: ws
            .iter()
            .map(|w| ad_z.iter().map(|a| gram_with(a, &bg, w).sym).collect())
            .collect(),
    };

    let k = kz.dim();
    let mut best_c = DVector::zeros(k);
    let mut best_f = f64::NEG_INFINITY;
    for c in sphere_points(k) {
        let f = obj.eval(&c).0;
        if f > best_f || (f == best_f && lex_less(&c, &best_c)) {
            best_f = f;
            best_c = c;
        }
    }
    // step h/k, with h the angular resolution of the sampling
    let h = match k {
        1 => 0.0,
        2 => 2.0 * PI / SPHERE_SAMPLES as f64,
        3 => (4.0 * PI / SPHERE_SAMPLES as f64).sqrt(),
        _ => 0.1,
    };
    let mut c = best_c.clone();
    for it in 1..=200 {
        if h == 0.0 {
            break;
        }
        let (_, m, v) = obj.eval(&c);
        let grad = obj.subgradient(m, &v);
        // project onto the tangent space of the sphere
        let tangent = &grad - &c * c.dot(&grad);
        let tn = tangent.norm();
        if tn == 0.0 {
            break;
        }
        let next = &c + tangent * (h / (it as f64 * tn));
        c = &next / next.norm();
        let f = obj.eval(&c).0;
        if f > best_f {
            best_f = f;
            best_c = c.clone();
        }
    }
    // monotone pattern search along tangent coordinate directions
    let mut step = h;
    while k > 1 && step > 1e-12 {
        let mut improved = false;
        for axis in 0..k {
            for sign in [1.0, -1.0] {
                let mut dir = DVector::zeros(k);
                dir[axis] = sign;
                let dir = &dir - &best_c * best_c.dot(&dir);
                let dn = dir.norm();
                if dn < 1e-12 {
                    continue;
                }
                let trial = &best_c + dir * (step / dn);
                let trial = &trial / trial.norm();
                let f = obj.eval(&trial).0;
                if f > best_f {
                    best_f = f;
                    best_c = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let z = AlgebraElement::new(g.clone(), kz.basis() * &best_c)?;
    if best_f > cfg.certificate_margin_tol {
        let cert = verify_certificate(e, &z, &ws, cfg)?;
        if cert.margin() > cfg.certificate_margin_tol {
            return Ok(SearchOutcome::Certificate(cert));
        }
    }
    let (margins, _) = evaluate_margins(&z, &ws);
    Ok(SearchOutcome::Infeasible(InfeasibilityReport {
        best_z: z,
        centralizer_coords: best_c,
        best_value: best_f,
        margins,
    }))
}

/// `max |B(Z, [u, v])| / (‖Z‖‖u‖‖v‖)` over basis pairs of two components.
pub fn schur_cross_residual(z: &AlgebraElement, a: &IsotypicComponent, b: &IsotypicComponent) -> f64 {
    let zn = z.norm();
    if zn == 0.0 {
        return 0.0;
    }
    let g = z.algebra();
    let ua = a.subspace.basis();
    let ub = b.subspace.basis();
    // basis vectors are Frobenius-unit, so only ‖Z‖ is left to divide by
    let vals = (g.ad_matrix(&z.matrix()) * ua).transpose() * g.trace_form_gram() * ub;
    vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())) / zn
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    RigidByVanishing,
    RigidByCertificate,
    Inconclusive,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::RigidByVanishing => "rigid_by_vanishing",
            Outcome::RigidByCertificate => "rigid_by_certificate",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

pub const DUALITY_FLAG: &str =
    "n = 2 Ihara case: the 6-dimensional second exterior power is the dual of the standard representation, so it matches sym_power(1)";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub case: GroupCase,
    pub outcome: Outcome,
    pub flags: Vec<String>,
    pub diagnostics: Vec<String>,
}

/// Vanishing when no `S^m` (m ≥ 1) occurs; certificate when one covers every `W_m`.
/// Never claims non-rigidity.
pub fn rigidity_verdict(
    e: &Embedding,
    rep: &DecompositionReport,
    cert: Option<&PositivityCertificate>,
    cfg: &ToleranceConfig,
) -> Verdict {
    let mut flags = Vec::new();
    let mut diagnostics = Vec::new();
    if e.case().is_ihara() && e.case().n() == 2 {
        flags.push(DUALITY_FLAG.to_string());
    }
    let outcome = if !rep.has_sym_power() {
        Outcome::RigidByVanishing
    } else if let Some(cert) = cert {
        match wm_subspaces(e, rep, cfg).and_then(|ws| verify_certificate(e, &cert.z, &ws, cfg)) {
            Ok(fresh) => {
                let missing: Vec<usize> = rep
                    .sym_powers()
                    .map(|(m, _)| m)
                    .filter(|m| !fresh.margins.contains_key(m))
                    .collect();
                if !missing.is_empty() {
                    diagnostics.push(format!("certificate does not cover m = {missing:?}"));
                    Outcome::Inconclusive
                } else if fresh.margin() > cfg.certificate_margin_tol {
                    Outcome::RigidByCertificate
                } else {
                    diagnostics.push(format!(
                        "certificate margin {:.3e} is not above {:.1e}",
                        fresh.margin(),
                        cfg.certificate_margin_tol
                    ));
                    Outcome::Inconclusive
                }
            }
            Err(err) => {
                diagnostics.push(format!("certificate rejected: {err}"));
                Outcome::Inconclusive
            }
        }
    } else {
        diagnostics.push("symmetric powers present and no positivity certificate".into());
        Outcome::Inconclusive
    };
    Verdict {
        case: e.case(),
        outcome,
        flags,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::{diagonal_embedding, diagonal_x_of_b, ihara_embedding, satake_embedding, z0_matrix, IharaTarget};
    use crate::isotype::{decompose_adjoint, ComponentLabel};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn centralizer_dimensions() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        assert_eq!(centralizer(&e).dim(), 4);
        assert_eq!(centralizer_in_k(&e).unwrap().dim(), 2);
        let e = satake_embedding(2, &cfg()).unwrap();
        let z = centralizer(&e);
        assert_eq!(z.dim(), 1);
        let (z0, _) = e.target().coords_of(&z0_matrix(2));
        assert!(z.relative_distance(&z0) < 1e-10);
        let e = ihara_embedding(3, IharaTarget::SoStar, &cfg()).unwrap();
        assert!(centralizer_in_k(&e).unwrap().dim() >= 1);
    }

    #[test]
    fn explicit_z_examples() {
        let z = explicit_z_diagonal_matrix(2, 1, 3, 2, 1.0).unwrap();
        let want = [0.0, 0.0, 0.0, -1.0, 1.0];
        for (k, w) in want.iter().enumerate() {
            assert!((z[(k, k)] - I * *w).norm() < 1e-15);
        }
        let z = explicit_z_diagonal_matrix(2, 1, 2, 2, 0.0).unwrap();
        let want = [-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0, 1.0];
        for (k, w) in want.iter().enumerate() {
            assert!((z[(k, k)] - I * *w).norm() < 1e-15);
        }
        assert!(matches!(
            explicit_z_diagonal_matrix(2, 1, 3, 2, 5.0),
            Err(Error::GammaOutOfWindow { .. })
        ));
        let (lo, hi) = gamma_window(2, 1, 3, 2).unwrap();
        assert!((lo - 0.25).abs() < 1e-15 && (hi - 4.0).abs() < 1e-15);
    }

    #[test]
    fn explicit_z_lies_in_centralizer() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        let z = explicit_z_diagonal(&e, 1.0).unwrap();
        let kz = centralizer_in_k(&e).unwrap();
        assert!(kz.relative_distance(z.coords()) < 1e-10);
    }

    #[test]
    fn gram_is_linear_and_zero_at_zero() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let ws = wm_subspaces(&e, &rep, &cfg()).unwrap();
        let kz = centralizer_in_k(&e).unwrap();
        let g = e.target().clone();
        let z1 = AlgebraElement::new(g.clone(), kz.basis().column(0).into_owned()).unwrap();
        let z2 = AlgebraElement::new(g.clone(), kz.basis().column(1).into_owned()).unwrap();
        let combo = z1.scale(0.7).add(&z2.scale(-1.3)).unwrap();
        let lhs = gram_of_q(&combo, &ws[0]);
        let rhs = gram_of_q(&z1, &ws[0]) * 0.7 - gram_of_q(&z2, &ws[0]) * 1.3;
        assert!((lhs - rhs).norm() < 1e-10);
        let zero = AlgebraElement::zero(g);
        assert!(gram_of_q(&zero, &ws[0]).norm() == 0.0);
    }

    #[test]
    fn diagonal_formula_single_sample() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let w = extract_wm(rep.find(&ComponentLabel::SymPower(1)).unwrap(), &e, &cfg()).unwrap();
        let z = explicit_z_diagonal(&e, 1.0).unwrap();
        let mut b = ComplexMatrix::zeros(3, 2);
        b[(0, 0)] = num_complex::Complex64::new(1.0, 0.5);
        b[(1, 1)] = num_complex::Complex64::new(-0.25, 2.0);
        let x = diagonal_x_of_b(2, 1, 3, 2, &b);
        let (coords, res) = e.target().coords_of(&x);
        assert!(res < 1e-12);
        assert!(w.subspace.relative_distance(&coords) < 1e-10);
        let q = q_value(&z, &w, &w.local_coords(&coords));
        assert!((q - 2.0 * b.norm_squared()).abs() < 1e-10 * b.norm_squared());
    }

    #[test]
    fn satake_certificate_is_along_minus_z0() {
        let e = satake_embedding(2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let out = certificate_search(&e, &rep, &cfg()).unwrap();
        let cert = out.certificate().expect("feasible");
        let (z0, _) = e.target().coords_of(&z0_matrix(2));
        let cos = cert.z.coords().dot(&z0) / (cert.z.coords().norm() * z0.norm());
        assert!((cos + 1.0).abs() < 1e-9);
        assert!((cert.normalization - 1.0).abs() < 1e-12);
        let v = rigidity_verdict(&e, &rep, Some(cert), &cfg());
        assert_eq!(v.outcome, Outcome::RigidByCertificate);
    }

    #[test]
    fn scaling_scales_margins() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let ws = wm_subspaces(&e, &rep, &cfg()).unwrap();
        let z = explicit_z_diagonal(&e, 1.0).unwrap();
        let (m1, _) = evaluate_margins(&z, &ws);
        let (m3, _) = evaluate_margins(&z.scale(3.0), &ws);
        for (k, v) in &m1 {
            assert!((m3[k] - 3.0 * v).abs() < 1e-10);
            assert!(*v > 0.0);
        }
    }

    #[test]
    fn schur_examples() {
        let e = diagonal_embedding(2, 1, 3, 2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let z = explicit_z_diagonal(&e, 1.0).unwrap();
        let s = rep.find(&ComponentLabel::SymPower(1)).unwrap();
        let a = rep.find(&ComponentLabel::Adjoint).unwrap();
        assert!(schur_cross_residual(&z, s, a) < 1e-9);
        assert!(schur_cross_residual(&z, s, s) > 1e-3);
        assert_eq!(schur_cross_residual(&AlgebraElement::zero(e.target().clone()), s, a), 0.0);
    }

    #[test]
    fn verdicts() {
        let e = ihara_embedding(3, IharaTarget::So2n2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        let v = rigidity_verdict(&e, &rep, None, &cfg());
        assert_eq!(v.outcome, Outcome::RigidByVanishing);
        assert!(v.flags.is_empty());

        let e = ihara_embedding(2, IharaTarget::So2n2, &cfg()).unwrap();
        let rep = decompose_adjoint(&e, &cfg()).unwrap();
        assert_eq!(rep.d(1), 1);
        let v = rigidity_verdict(&e, &rep, None, &cfg());
        assert_eq!(v.outcome, Outcome::Inconclusive);
        assert_eq!(v.flags, vec![DUALITY_FLAG.to_string()]);
    }
}
