//! End-to-end analysis of one case: embed, decompose, search, decide.

use std::collections::BTreeMap;

use crate::certify::{
    certificate_search, default_gamma, evaluate_margins, explicit_z_diagonal, rigidity_verdict, wm_subspaces,
    SearchOutcome, Verdict,
};
use crate::embed::{embedding_for, z0_matrix, Embedding};
use crate::error::Result;
use crate::groups::GroupCase;
use crate::isotype::{decompose_adjoint, DecompositionReport};
use crate::liealg::AlgebraElement;
use crate::linops::ToleranceConfig;

/// The explicit element of a case family, evaluated on every `W_m`.
#[derive(Debug, Clone)]
pub struct ExplicitZ {
    pub description: String,
    pub gamma: Option<f64>,
    pub z: AlgebraElement,
    /// Smallest eigenvalue of `Q_Z` on `W_m`, for `Z` as given.
    pub margins: BTreeMap<usize, f64>,
    /// The same after scaling `Z` to `−B(Z, θZ) = 1`.
    pub normalized_margins: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub embedding: Embedding,
    pub report: DecompositionReport,
    pub search: Option<SearchOutcome>,
    pub explicit_z: Option<ExplicitZ>,
    pub verdict: Verdict,
}

/// `Z` for the diagonal family (at `gamma`, or the window midpoint) and `Z₀`
/// for the Satake family.
pub fn explicit_z(e: &Embedding, rep: &DecompositionReport, gamma: Option<f64>, cfg: &ToleranceConfig) -> Result<Option<ExplicitZ>> {
    let (description, gamma, z) = match e.case() {
        GroupCase::SuPq { n, q0, p, q } => {
            let g = gamma.or_else(|| default_gamma(n, q0, p, q));
            let z = explicit_z_diagonal(e, g.unwrap_or(0.0))?;
            ("diag(i alpha, i beta, i gamma)".to_string(), g, z)
        }
        GroupCase::SpReal { n } => (
            "Z0 = multiplication by i".to_string(),
            None,
            AlgebraElement::from_matrix(e.target().clone(), &z0_matrix(n))?,
        ),
        _ => return Ok(None),
    };
    let ws = wm_subspaces(e, rep, cfg)?;
    let (margins, _) = evaluate_margins(&z, &ws);
    let norm = z.norm();
    let normalized_margins = margins.iter().map(|(m, v)| (*m, v / norm)).collect();
    Ok(Some(ExplicitZ {
        description,
        gamma,
        z,
        margins,
        normalized_margins,
    }))
}

/// Full pipeline. The search only runs when a symmetric power occurs.
pub fn analyze(case: GroupCase, gamma: Option<f64>, cfg: &ToleranceConfig) -> Result<Analysis> {
    cfg.validate()?;
    let embedding = embedding_for(case, cfg)?;
    let report = decompose_adjoint(&embedding, cfg)?;
    let search = if report.has_sym_power() {
        Some(certificate_search(&embedding, &report, cfg)?)
    } else {
        None
    };
    let explicit_z = if report.has_sym_power() {
        explicit_z(&embedding, &report, gamma, cfg)?
    } else {
        None
    };
    let verdict = rigidity_verdict(
        &embedding,
        &report,
        search.as_ref().and_then(|s| s.certificate()),
        cfg,
    );
    Ok(Analysis {
        embedding,
        report,
        search,
        explicit_z,
        verdict,
    })
}

/// Decomposition only.
pub fn decompose_case(case: GroupCase, cfg: &ToleranceConfig) -> Result<(Embedding, DecompositionReport)> {
    cfg.validate()?;
    let e = embedding_for(case, cfg)?;
    let rep = decompose_adjoint(&e, cfg)?;
    Ok((e, rep))
}
