//! Machine-readable report documents.
//!
//! Field order is the declaration order below and maps are `BTreeMap`, so the
//! JSON output is stable. Nothing time-dependent is recorded.

use std::collections::BTreeMap;

use serde::Serialize;

use rigidity_core::certify::{centralizer_in_k, wm_subspaces, Outcome, SearchOutcome};
use rigidity_core::embed::Embedding;
use rigidity_core::groups::GroupCase;
use rigidity_core::isotype::DecompositionReport;
use rigidity_core::linops::{ComplexMatrix, ToleranceConfig};
use rigidity_core::pipeline::Analysis;
use rigidity_core::Result;

use crate::case::CaseSpec;

pub const TOOL_NAME: &str = "rigidity";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Row-major `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_json(m: &ComplexMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentJson {
    pub label: String,
    pub real_dim: usize,
    pub multiplicity: usize,
    pub casimir_scalar: f64,
    pub t0_spectrum: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WmJson {
    pub m: usize,
    pub dim: usize,
    pub d_m: usize,
    pub square_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionJson {
    pub target: String,
    pub dim_g: usize,
    pub components: Vec<ComponentJson>,
    /// Sym-power multiplicities `d_m`.
    pub d: BTreeMap<usize, usize>,
    pub g1_dims: BTreeMap<usize, usize>,
    pub g0_dim: usize,
    pub casimir_asymmetry: f64,
    pub wm: Vec<WmJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplicitZJson {
    pub description: String,
    pub gamma: Option<f64>,
    pub z: MatrixJson,
    pub margins: BTreeMap<usize, f64>,
    pub normalized_margins: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SearchJson {
    Certificate {
        centralizer_coords: Vec<f64>,
        z: MatrixJson,
        margins: BTreeMap<usize, f64>,
        normalization: f64,
        antisym_norms: BTreeMap<usize, f64>,
    },
    Infeasible {
        centralizer_coords: Vec<f64>,
        z: MatrixJson,
        best_value: f64,
        margins: BTreeMap<usize, f64>,
    },
}

impl From<&SearchOutcome> for SearchJson {
    fn from(s: &SearchOutcome) -> Self {
        match s {
            SearchOutcome::Certificate(c) => SearchJson::Certificate {
                centralizer_coords: c.centralizer_coords.iter().copied().collect(),
                z: matrix_json(&c.z.matrix()),
                margins: c.margins.clone(),
                normalization: c.normalization,
                antisym_norms: c.antisym_norms.clone(),
            },
            SearchOutcome::Infeasible(r) => SearchJson::Infeasible {
                centralizer_coords: r.centralizer_coords.iter().copied().collect(),
                z: matrix_json(&r.best_z.matrix()),
                best_value: r.best_value,
                margins: r.margins.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictJson {
    pub outcome: Outcome,
    pub flags: Vec<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: ToolInfo,
    pub command: &'static str,
    pub spec: CaseSpec,
    pub case: GroupCase,
    pub tolerances: ToleranceConfig,
    pub decomposition: DecompositionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centralizer_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit_z: Option<ExplicitZJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
}

fn decomposition_json(e: &Embedding, rep: &DecompositionReport, cfg: &ToleranceConfig) -> Result<DecompositionJson> {
    let wm = if rep.has_sym_power() {
        wm_subspaces(e, rep, cfg)?
            .iter()
            .map(|w| WmJson {
                m: w.m,
                dim: w.dim(),
                d_m: w.d_m,
                square_residual: w.square_residual(),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(DecompositionJson {
        target: e.target().name().to_string(),
        dim_g: e.target().dim(),
        components: rep
            .components
            .iter()
            .map(|c| ComponentJson {
                label: c.label.to_string(),
                real_dim: c.real_dim,
                multiplicity: c.multiplicity,
                casimir_scalar: c.casimir_scalar,
                t0_spectrum: c.t0_spectrum.clone(),
            })
            .collect(),
        d: rep.sym_powers().map(|(m, c)| (m, c.multiplicity)).collect(),
        g1_dims: rep.g1_dims.clone(),
        g0_dim: rep.g0_dim,
        casimir_asymmetry: rep.casimir_asymmetry,
        wm,
    })
}

fn base(command: &'static str, spec: &CaseSpec, cfg: &ToleranceConfig, e: &Embedding, rep: &DecompositionReport) -> Result<ReportDocument> {
    Ok(ReportDocument {
        tool: ToolInfo {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        },
        command,
        spec: spec.clone(),
        case: e.case(),
        tolerances: *cfg,
        decomposition: decomposition_json(e, rep, cfg)?,
        centralizer_dim: None,
        explicit_z: None,
        search: None,
        verdict: None,
    })
}

pub fn decompose_document(
    spec: &CaseSpec,
    cfg: &ToleranceConfig,
    e: &Embedding,
    rep: &DecompositionReport,
) -> Result<ReportDocument> {
    base("decompose", spec, cfg, e, rep)
}

pub fn certify_document(spec: &CaseSpec, cfg: &ToleranceConfig, a: &Analysis) -> Result<ReportDocument> {
    let mut doc = base("certify", spec, cfg, &a.embedding, &a.report)?;
    doc.centralizer_dim = Some(centralizer_in_k(&a.embedding).map(|s| s.dim()).unwrap_or(0));
    doc.explicit_z = a.explicit_z.as_ref().map(|x| ExplicitZJson {
        description: x.description.clone(),
        gamma: x.gamma,
        z: matrix_json(&x.z.matrix()),
        margins: x.margins.clone(),
        normalized_margins: x.normalized_margins.clone(),
    });
    doc.search = a.search.as_ref().map(SearchJson::from);
    doc.verdict = Some(VerdictJson {
        outcome: a.verdict.outcome,
        flags: a.verdict.flags.clone(),
        diagnostics: a.verdict.diagnostics.clone(),
    });
    Ok(doc)
}

pub fn to_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report documents always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rigidity_core::linops::I;
    use rigidity_core::pipeline::decompose_case;

    use crate::case::CaseKind;

    #[test]
    fn complex_matrices_are_row_major_pairs() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| I * (j as f64) + i as f64);
        let j = matrix_json(&m);
        assert_eq!(j.len(), 2);
        assert_eq!(j[1][2], [1.0, 2.0]);
    }

    #[test]
    fn decompose_document_echoes_spec_and_tolerances() {
        let cfg = ToleranceConfig::default();
        let spec = CaseSpec {
            kind: CaseKind::IharaSo,
            n: Some(3),
            q0: None,
            p: None,
            q: None,
            gamma: None,
            residual_tol: None,
        };
        let (e, rep) = decompose_case(spec.group_case().unwrap(), &cfg).unwrap();
        let doc = decompose_document(&spec, &cfg, &e, &rep).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&doc)).unwrap();
        assert_eq!(v["spec"]["kind"], "ihara-so");
        assert_eq!(v["case"]["kind"], "so2n2");
        assert_eq!(v["tolerances"]["residual_tol"], cfg.residual_tol);
        assert_eq!(v["decomposition"]["dim_g"], 28);
        assert!(v["decomposition"]["d"].as_object().unwrap().is_empty());
        assert!(v.get("verdict").is_none());
    }
}
