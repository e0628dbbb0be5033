//! The acceptance matrix: numbered criteria with pinned thresholds, shared by
//! the `acceptance` test target and the `verify-paper` command.

use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certify::{
    centralizer_in_k, certificate_search, evaluate_margins, gram_of_q, explicit_z_diagonal, rigidity_verdict,
    schur_cross_residual, wm_subspaces, Outcome, DUALITY_FLAG,
};
use crate::embed::{
    conjugate_linear_part, diagonal_blocks, diagonal_x_of_b, embedding_for, homomorphism_residual, z0_matrix,
    Embedding,
};
use crate::error::Result;
use crate::groups::{
    build_so_2n2, build_so_star, build_sp_real, build_su, defining_residual, GroupCase, SignatureForm,
};
use crate::isotype::{
    casimir_operator, decompose_adjoint, equivalence_test, extract_wm, invariance_residual, reference_symmetric_power,
    ComponentLabel, DecompositionReport, CENTRALIZER_DERIVED_TAG,
};
use crate::liealg::{jacobi_residual, AlgebraElement, RealLieAlgebra};
use crate::linops::{realify_conjugate_linear, ComplexMatrix, RealMatrix, ToleranceConfig};

pub const CONSTRUCTION_RESIDUAL: f64 = 1e-12;
pub const JACOBI_RESIDUAL: f64 = 1e-10;
pub const CONSTRUCTION_SECONDS: f64 = 10.0;
pub const HOMOMORPHISM_RESIDUAL: f64 = 1e-10;
pub const SPECTRAL_RESIDUAL: f64 = 1e-9;
pub const FORMULA_RELATIVE: f64 = 1e-9;
pub const FORMULA_SAMPLES: usize = 50;
pub const SEARCH_SLACK: f64 = 1e-6;
pub const SEARCH_SECONDS: f64 = 60.0;
pub const SCHUR_RESIDUAL: f64 = 1e-9;
pub const PROPERTY_RESIDUAL: f64 = 1e-9;
pub const LINEARITY_RESIDUAL: f64 = 1e-10;
pub const TOTAL_SECONDS: f64 = 300.0;

/// Checks that are run as stated but cannot pass: `(criterion, check suffix)`.
///
/// For `p₁ = 0` the explicit diagonal element gives
/// `Q_Z(X) = 2(1 + q₁/((n+1)q₀))·tr b*b` rather than `2 tr b*b`.
pub const KNOWN_UNATTAINABLE: &[(usize, &str)] = &[(7, "Q_Z(X) = 2 tr b*b")];

/// Whether a failed check is one of [`KNOWN_UNATTAINABLE`].
pub fn is_known_unattainable(criterion: usize, check: &Check) -> bool {
    KNOWN_UNATTAINABLE
        .iter()
        .any(|(id, what)| *id == criterion && check.what.ends_with(what))
}

/// Every embedding exercised by the matrix.
pub fn case_matrix() -> Vec<GroupCase> {
    vec![
        GroupCase::SuPq { n: 2, q0: 1, p: 3, q: 2 },
        GroupCase::SuPq { n: 2, q0: 1, p: 4, q: 2 },
        GroupCase::SuPq { n: 2, q0: 2, p: 4, q: 3 },
        GroupCase::SuPq { n: 3, q0: 1, p: 4, q: 2 },
        GroupCase::SpReal { n: 2 },
        GroupCase::SpReal { n: 3 },
        GroupCase::SoStar { n: 2 },
        GroupCase::SoStar { n: 3 },
        GroupCase::So2n2 { n: 2 },
        GroupCase::So2n2 { n: 3 },
    ]
}

#[derive(Debug, Clone)]
pub struct Check {
    pub what: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {:>2} {:<22} {:>3} checks  {:>8.2}s",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )?;
        for c in self.failures() {
            write!(f, "\n       failed: {} ({})", c.what, c.detail)?;
        }
        Ok(())
    }
}

#[derive(Default)]
struct Ctx {
    checks: Vec<Check>,
}

impl Ctx {
    fn check(&mut self, what: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            what: what.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn below(&mut self, what: impl Into<String>, value: f64, bound: f64) {
        self.check(what, value < bound, format!("{value:.3e} < {bound:.0e}"));
    }

    fn equal<T: PartialEq + fmt::Debug>(&mut self, what: impl Into<String>, got: T, want: T) {
        let ok = got == want;
        self.check(what, ok, format!("got {got:?}, want {want:?}"));
    }

    fn ok<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(what, false, format!("error: {e}"));
                None
            }
        }
    }
}

type Runner = fn(&ToleranceConfig, &mut Ctx);

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub summary: &'static str,
    run: Runner,
}

impl Criterion {
    pub fn run(&self, cfg: &ToleranceConfig) -> CriterionResult {
        let mut ctx = Ctx::default();
        let start = Instant::now();
        (self.run)(cfg, &mut ctx);
        CriterionResult {
            id: self.id,
            name: self.name,
            checks: ctx.checks,
            elapsed: start.elapsed(),
        }
    }

    pub fn matches(&self, filter: &str) -> bool {
        let f = filter.trim().to_ascii_lowercase();
        f == self.name || f == self.id.to_string()
    }
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "construction", summary: "classical algebras satisfy their defining conditions, Jacobi and dimension formulas", run: construction },
        Criterion { id: 2, name: "embedding", summary: "every embedding in the case matrix is a homomorphism", run: embedding },
        Criterion { id: 3, name: "diagonal-multiplicity", summary: "standard representation multiplicity in the diagonal case", run: diagonal_multiplicity },
        Criterion { id: 4, name: "diagonal-vanishing", summary: "no symmetric power when p = n q0 and q = q0", run: diagonal_vanishing },
        Criterion { id: 5, name: "ihara", summary: "holomorphic embeddings: no symmetric powers at n = 3, duality at n = 2", run: ihara },
        Criterion { id: 6, name: "satake", summary: "Satake decomposition and the Z0 quadratic form", run: satake },
        Criterion { id: 7, name: "diagonal-certificate", summary: "explicit diagonal certificates", run: diagonal_certificate },
        Criterion { id: 8, name: "search", summary: "searched certificate dominates the explicit one", run: search },
        Criterion { id: 9, name: "schur", summary: "cross-isotype orthogonality against the centralizer", run: schur },
        Criterion { id: 10, name: "properties", summary: "invariants over the whole case matrix", run: properties },
    ]
}

/// Runs the criteria matching `only` (all when `None`).
pub fn run_criteria(cfg: &ToleranceConfig, only: Option<&str>) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| only.map_or(true, |f| c.matches(f)))
        .map(|c| c.run(cfg))
        .collect()
}

fn labels(rep: &DecompositionReport) -> Vec<(ComponentLabel, usize)> {
    let mut v: Vec<_> = rep.components.iter().map(|c| (c.label.clone(), c.real_dim)).collect();
    v.sort();
    v
}

fn sorted(mut v: Vec<(ComponentLabel, usize)>) -> Vec<(ComponentLabel, usize)> {
    v.sort();
    v
}

fn is_other(l: &ComponentLabel) -> bool {
    matches!(l, ComponentLabel::Other(_))
}

fn construction(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let start = Instant::now();
    let check_algebra = |ctx: &mut Ctx, g: Result<RealLieAlgebra>, name: String, dim: usize| {
        if let Some(g) = ctx.ok(&name, g) {
            ctx.equal(format!("{name} dimension"), g.dim(), dim);
            ctx.below(format!("{name} defining residual"), defining_residual(&g), CONSTRUCTION_RESIDUAL);
            ctx.below(format!("{name} jacobi"), jacobi_residual(&g), JACOBI_RESIDUAL);
        }
    };
    for size in 2..=8usize {
        for q in 1..=size / 2 {
            let p = size - q;
            check_algebra(
                ctx,
                build_su(p, q, &SignatureForm::standard(p, q), cfg),
                format!("su({p},{q})"),
                size * size - 1,
            );
        }
    }
    for n in [2usize, 3] {
        check_algebra(ctx, build_sp_real(n, cfg), format!("sp({},R)", n + 1), (n + 1) * (2 * n + 3));
        check_algebra(ctx, build_so_star(n, cfg), format!("so*({})", 2 * n + 2), (n + 1) * (2 * n + 1));
        check_algebra(ctx, build_so_2n2(n, cfg), format!("so({},2)", 2 * n), (n + 1) * (2 * n + 1));
    }
    ctx.below("construction wall time (s)", start.elapsed().as_secs_f64(), CONSTRUCTION_SECONDS);
}

fn embedding(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    for case in case_matrix() {
        if let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) {
            ctx.below(format!("{case} homomorphism"), homomorphism_residual(&e), HOMOMORPHISM_RESIDUAL);
        }
    }
}

fn spectral_checks(ctx: &mut Ctx, e: &Embedding, rep: &DecompositionReport) {
    let case = e.case();
    ctx.below(format!("{case} Casimir asymmetry"), rep.casimir_asymmetry, SPECTRAL_RESIDUAL);
    for c in &rep.components {
        ctx.below(
            format!("{case} {} invariance", c.label),
            invariance_residual(c, e),
            SPECTRAL_RESIDUAL,
        );
    }
}

fn diagonal_multiplicity(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    for (n, q0, p, q) in [(2, 1, 3, 2), (3, 1, 4, 2)] {
        let case = GroupCase::SuPq { n, q0, p, q };
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let (p1, q1) = diagonal_blocks(n, q0, p, q);
        ctx.equal(format!("{case} d1 = q0(p1+q1)"), rep.d(1), q0 * (p1 + q1));
        ctx.equal(format!("{case} dims sum"), rep.dim(), e.target().dim());
        if (n, q0, p, q) == (2, 1, 3, 2) {
            ctx.equal(
                format!("{case} components"),
                labels(&rep),
                sorted(vec![
                    (ComponentLabel::Adjoint, 8),
                    (ComponentLabel::Other(CENTRALIZER_DERIVED_TAG.into()), 3),
                    (ComponentLabel::Trivial, 1),
                    (ComponentLabel::SymPower(1), 12),
                ]),
            );
            ctx.equal(format!("{case} total"), rep.dim(), 24);
        }
        spectral_checks(ctx, &e, &rep);
    }
}

fn diagonal_vanishing(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let case = GroupCase::SuPq { n: 2, q0: 2, p: 4, q: 2 };
    let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { return };
    let Some(rep) = ctx.ok("decomposition", decompose_adjoint(&e, cfg)) else { return };
    ctx.check(format!("{case} has no symmetric power"), !rep.has_sym_power(), format!("{:?}", rep.g1_dims));
    let v = rigidity_verdict(&e, &rep, None, cfg);
    ctx.equal(format!("{case} verdict"), v.outcome, Outcome::RigidByVanishing);
}

fn ihara(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    for case in [GroupCase::SoStar { n: 3 }, GroupCase::So2n2 { n: 3 }] {
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let shape: Vec<(bool, usize)> = labels(&rep).iter().map(|(l, d)| (is_other(l), *d)).collect();
        ctx.equal(format!("{case} shape"), shape, vec![(false, 15), (false, 1), (true, 12)]);
        ctx.equal(
            format!("{case} adjoint/trivial"),
            (rep.find(&ComponentLabel::Adjoint).map(|c| c.real_dim), rep.find(&ComponentLabel::Trivial).map(|c| c.real_dim)),
            (Some(15), Some(1)),
        );
        ctx.check(format!("{case} has no symmetric power"), !rep.has_sym_power(), format!("{:?}", rep.g1_dims));
        let v1 = reference_symmetric_power(3, 1);
        for c in rep.components.iter().filter(|c| is_other(&c.label)) {
            ctx.check(
                format!("{case} {} vs standard representation", c.label),
                equivalence_test(c, &v1, &e, cfg).is_none(),
                "intertwiner must not exist",
            );
        }
        ctx.equal(format!("{case} verdict"), rigidity_verdict(&e, &rep, None, cfg).outcome, Outcome::RigidByVanishing);
    }
    for case in [GroupCase::SoStar { n: 2 }, GroupCase::So2n2 { n: 2 }] {
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let comp = rep.find(&ComponentLabel::SymPower(1));
        ctx.equal(format!("{case} 6-dim component matches V"), comp.map(|c| c.real_dim), Some(6));
        if let Some(c) = comp {
            ctx.check(
                format!("{case} intertwiner with the standard representation"),
                equivalence_test(c, &reference_symmetric_power(2, 1), &e, cfg).is_some(),
                "intertwiner expected",
            );
        }
        let v = rigidity_verdict(&e, &rep, None, cfg);
        ctx.check(format!("{case} duality flag"), v.flags.iter().any(|f| f == DUALITY_FLAG), format!("{:?}", v.flags));
    }
}

/// Random element of `W_m` in local coordinates.
fn random_local(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0))
}

fn satake(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a7a_4e00);
    for n in [2usize, 3] {
        let case = GroupCase::SpReal { n };
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let g = e.target().clone();
        let d = g.dim();
        ctx.equal(
            format!("{case} components"),
            labels(&rep),
            sorted(vec![
                (ComponentLabel::Adjoint, n * n + 2 * n),
                (ComponentLabel::Trivial, 1),
                (ComponentLabel::SymPower(2), d - (n * n + 2 * n) - 1),
            ]),
        );
        ctx.equal(format!("{case} d2"), rep.d(2), 1);
        let Some(z0) = ctx.ok("Z0", AlgebraElement::from_matrix(g.clone(), &z0_matrix(n))) else { continue };
        if let Some(t) = rep.find(&ComponentLabel::Trivial) {
            ctx.below(format!("{case} trivial component is R Z0"), t.subspace.relative_distance(z0.coords()), SPECTRAL_RESIDUAL);
        }
        let Some(comp) = rep.find(&ComponentLabel::SymPower(2)) else { continue };
        let Some(w) = ctx.ok("W2", extract_wm(comp, &e, cfg)) else { continue };
        let gram = gram_of_q(&z0, &w);
        let (mut worst_formula, mut worst_j, mut worst_sign) = (0.0_f64, 0.0_f64, 0.0_f64);
        for _ in 0..FORMULA_SAMPLES {
            let x = random_local(&mut rng, w.dim());
            let full = w.subspace.basis() * &x;
            let xm = g.matrix_of(&full);
            // X^c as the conjugate-linear map z ↦ T z̄; tr_C T T† from the matrix model
            let t = conjugate_linear_part(&xm);
            let model = realify_conjugate_linear(&t);
            worst_j = worst_j.max((xm.map(|v| v.re) - &model).norm() / model.norm());
            let jx = g.matrix_of(&(w.subspace.basis() * (&w.j_m * &x)));
            let it = conjugate_linear_part(&jx);
            worst_j = worst_j.max((it - &t * crate::linops::I).norm() / t.norm());
            let tr = (&t * t.adjoint()).trace().re;
            // B(Z0, [X, J X]) = −Q_{Z0}(X)
            let b_value = -(x.transpose() * &gram * &x)[(0, 0)];
            worst_formula = worst_formula.max((b_value - 4.0 * tr).abs() / (4.0 * tr));
            worst_sign = worst_sign.max(((x.transpose() * &gram * &x)[(0, 0)] + 4.0 * tr).abs() / (4.0 * tr));
        }
        ctx.below(format!("{case} J2 acts as X^c -> (iX)^c"), worst_j, SPECTRAL_RESIDUAL);
        ctx.below(format!("{case} B(Z0,[X,J2 X]) = 4 tr XX*"), worst_formula, FORMULA_RELATIVE);
        ctx.below(format!("{case} Q_Z0 = -4 tr XX* (Q = -B)"), worst_sign, FORMULA_RELATIVE);
        match certificate_search(&e, &rep, cfg) {
            Ok(out) => {
                ctx.check(format!("{case} certificate margin > 0"), out.certificate().is_some(), format!("{:.3e}", out.value()));
                let v = rigidity_verdict(&e, &rep, out.certificate(), cfg);
                ctx.equal(format!("{case} verdict"), v.outcome, Outcome::RigidByCertificate);
            }
            Err(err) => ctx.check(format!("{case} certificate search"), false, err.to_string()),
        }
    }
}

fn diagonal_certificate(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1a6_0001);
    for (n, q0, p, q, gamma) in [(2usize, 1usize, 3usize, 2usize, 1.0), (2, 1, 2, 2, 0.0)] {
        let case = GroupCase::SuPq { n, q0, p, q };
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let Some(z) = ctx.ok("explicit Z", explicit_z_diagonal(&e, gamma)) else { continue };
        let Some(comp) = rep.find(&ComponentLabel::SymPower(1)) else {
            ctx.check(format!("{case} sym_power(1)"), false, "missing");
            continue;
        };
        let Some(w) = ctx.ok("W1", extract_wm(comp, &e, cfg)) else { continue };
        let gram = gram_of_q(&z, &w);
        let (p1, q1) = diagonal_blocks(n, q0, p, q);
        let top = (n + 1) * q0;
        let mut worst = 0.0_f64;
        for _ in 0..FORMULA_SAMPLES {
            // b with the rows of the negative part of J1 set to zero
            let b = ComplexMatrix::from_fn(top, p1 + q1, |r, _| {
                if r < n * q0 {
                    num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    num_complex::Complex64::new(0.0, 0.0)
                }
            });
            let (coords, _) = e.target().coords_of(&diagonal_x_of_b(n, q0, p, q, &b));
            let x = w.local_coords(&coords);
            let q_val = (x.transpose() * &gram * &x)[(0, 0)];
            let want = 2.0 * b.norm_squared();
            worst = worst.max((q_val - want).abs() / want);
        }
        let label = if p1 == 0 { "Q_Z(X) = 2 tr b*b" } else { "Q_Z(X(b)) = 2|b|^2" };
        ctx.below(format!("{case} {label}"), worst, FORMULA_RELATIVE);
        match certificate_search(&e, &rep, cfg) {
            Ok(out) => {
                let v = rigidity_verdict(&e, &rep, out.certificate(), cfg);
                ctx.equal(format!("{case} verdict"), v.outcome, Outcome::RigidByCertificate);
            }
            Err(err) => ctx.check(format!("{case} certificate search"), false, err.to_string()),
        }
    }
}

fn search(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let start = Instant::now();
    let case = GroupCase::SuPq { n: 2, q0: 1, p: 3, q: 2 };
    let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { return };
    let Some(rep) = ctx.ok("decomposition", decompose_adjoint(&e, cfg)) else { return };
    let Some(ws) = ctx.ok("W_m", wm_subspaces(&e, &rep, cfg)) else { return };
    let Some(z) = ctx.ok("explicit Z", explicit_z_diagonal(&e, 1.0)) else { return };
    let normalized = z.scale(1.0 / z.norm());
    let (m, _) = evaluate_margins(&normalized, &ws);
    let explicit = m.values().copied().fold(f64::INFINITY, f64::min);
    let Some(out) = ctx.ok("certificate search", certificate_search(&e, &rep, cfg)) else { return };
    ctx.check(
        "searched margin >= explicit margin - 1e-6",
        out.value() >= explicit - SEARCH_SLACK,
        format!("search {:.6}, explicit {:.6}", out.value(), explicit),
    );
    ctx.check("search returns a certificate", out.certificate().is_some(), format!("{:.3e}", out.value()));
    ctx.below("search wall time (s)", start.elapsed().as_secs_f64(), SEARCH_SECONDS);
}

fn schur(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    for case in case_matrix() {
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        let Some(kz) = ctx.ok("centralizer", centralizer_in_k(&e)) else { continue };
        let g = e.target();
        let mut worst = 0.0_f64;
        for zc in kz.basis().column_iter() {
            let Some(z) = ctx.ok("Z", AlgebraElement::new(g.clone(), zc.into_owned())) else { continue };
            for (i, a) in rep.components.iter().enumerate() {
                for b in rep.components.iter().skip(i + 1) {
                    if a.label != b.label {
                        worst = worst.max(schur_cross_residual(&z, a, b));
                    }
                }
            }
        }
        ctx.below(format!("{case} cross residual"), worst, SCHUR_RESIDUAL);
    }
}

fn properties(cfg: &ToleranceConfig, ctx: &mut Ctx) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e0_9e27);
    for case in case_matrix() {
        let Some(e) = ctx.ok(&case.to_string(), embedding_for(case, cfg)) else { continue };
        let g = e.target().clone();
        let d = g.dim();
        let bg = g.trace_form_gram();
        let bnorm = bg.norm();

        // ad-invariance of the trace form: ad_Xᵗ B + B ad_X = 0
        let mut worst = 0.0_f64;
        let mut probes: Vec<RealMatrix> = e.ad_operators().to_vec();
        for _ in 0..3 {
            let x = DVector::from_fn(d, |_, _| rng.gen_range(-1.0..1.0));
            probes.push(g.ad_matrix(&g.matrix_of(&x)));
        }
        for a in &probes {
            let r = a.transpose() * &bg + &bg * a;
            worst = worst.max(r.norm() / (a.norm() * bnorm));
        }
        ctx.below(format!("{case} trace form ad-invariance"), worst, PROPERTY_RESIDUAL);

        let Some(rep) = ctx.ok(&format!("{case} decomposition"), decompose_adjoint(&e, cfg)) else { continue };
        ctx.equal(format!("{case} completeness"), rep.dim(), d);
        if let Some(c) = ctx.ok("Casimir", casimir_operator(&e)) {
            let cn = c.norm();
            let worst = e
                .ad_operators()
                .iter()
                .map(|a| (&c * a - a * &c).norm() / (cn * a.norm()))
                .fold(0.0, f64::max);
            ctx.below(format!("{case} Casimir commutes"), worst, PROPERTY_RESIDUAL);
        }
        for comp in &rep.components {
            ctx.below(format!("{case} {} ad-invariance", comp.label), invariance_residual(comp, &e), PROPERTY_RESIDUAL);
        }
        let mut cross = 0.0_f64;
        for (i, a) in rep.components.iter().enumerate() {
            for b in rep.components.iter().skip(i + 1) {
                if a.label != b.label {
                    let m = a.subspace.basis().transpose() * &bg * b.subspace.basis();
                    cross = cross.max(m.amax() / bnorm.max(1.0));
                }
            }
        }
        ctx.below(format!("{case} cross-isotype B-orthogonality"), cross, PROPERTY_RESIDUAL);

        let Some(ws) = ctx.ok(&format!("{case} W_m"), wm_subspaces(&e, &rep, cfg)) else { continue };
        let kz = centralizer_in_k(&e).ok();
        for w in &ws {
            ctx.below(format!("{case} J_{}^2 = -Id", w.m), w.square_residual(), PROPERTY_RESIDUAL);
            let (comm, leak) = w.equivariance_residual(&e);
            ctx.below(format!("{case} J_{} equivariance", w.m), comm.max(leak), PROPERTY_RESIDUAL);
            if let Some(kz) = &kz {
                if kz.dim() >= 1 {
                    let zs: Vec<AlgebraElement> = kz
                        .basis()
                        .column_iter()
                        .filter_map(|c| AlgebraElement::new(g.clone(), c.into_owned()).ok())
                        .collect();
                    let z1 = &zs[0];
                    let z2 = zs.last().expect("nonempty");
                    let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                    let combo = z1.scale(a).add(&z2.scale(b)).expect("same algebra");
                    let lhs = gram_of_q(&combo, w);
                    let rhs = gram_of_q(z1, w) * a + gram_of_q(z2, w) * b;
                    let scale = lhs.norm().max(1.0);
                    ctx.below(format!("{case} Gram linearity (m = {})", w.m), (lhs - rhs).norm() / scale, LINEARITY_RESIDUAL);
                }
            }
        }
    }
    ctx.below("properties wall time (s)", start.elapsed().as_secs_f64(), TOTAL_SECONDS);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_filterable() {
        let all = criteria();
        assert_eq!(all.len(), 10);
        for (k, c) in all.iter().enumerate() {
            assert_eq!(c.id, k + 1);
            assert!(c.matches(c.name));
            assert!(c.matches(&c.id.to_string()));
        }
        assert!(all.iter().filter(|c| c.matches("satake")).count() == 1);
    }

    #[test]
    fn over_tight_tolerance_is_reported_not_panicking() {
        let cfg = ToleranceConfig::default().with_residual_tol(1e-15);
        let out = run_criteria(&cfg, Some("embedding"));
        assert_eq!(out.len(), 1);
        assert!(!out[0].passed());
    }
}
