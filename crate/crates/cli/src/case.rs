use clap::ValueEnum;
use serde::Serialize;

use rigidity_core::groups::GroupCase;
use rigidity_core::linops::ToleranceConfig;
use rigidity_core::{Error, Result};

/// Name of the environment variable that overrides `residual_tol`.
pub const TOL_ENV: &str = "RIGIDITY_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    Diagonal,
    Satake,
    IharaSo,
    IharaSostar,
}

/// A case as given on the command line, before validation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseSpec {
    pub kind: CaseKind,
    pub n: Option<usize>,
    pub q0: Option<usize>,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub gamma: Option<f64>,
    pub residual_tol: Option<f64>,
}

impl CaseSpec {
    fn need(&self, name: &str, v: Option<usize>) -> Result<usize> {
        v.ok_or_else(|| Error::BadParameters(format!("--{name} is required for this case")))
    }

    /// Validated group case.
    pub fn group_case(&self) -> Result<GroupCase> {
        let n = self.need("n", self.n)?;
        let case = match self.kind {
            CaseKind::Diagonal => GroupCase::SuPq {
                n,
                q0: self.need("q0", self.q0)?,
                p: self.need("p", self.p)?,
                q: self.need("q", self.q)?,
            },
            CaseKind::Satake => GroupCase::SpReal { n },
            CaseKind::IharaSo => GroupCase::So2n2 { n },
            CaseKind::IharaSostar => GroupCase::SoStar { n },
        };
        if self.kind != CaseKind::Diagonal && (self.q0.is_some() || self.p.is_some() || self.q.is_some()) {
            return Err(Error::BadParameters("--q0/--p/--q only apply to --case diagonal".into()));
        }
        if self.kind != CaseKind::Diagonal && self.gamma.is_some() {
            return Err(Error::BadParameters("--gamma only applies to --case diagonal".into()));
        }
        if let Some(g) = self.gamma {
            if !g.is_finite() {
                return Err(Error::BadParameters("--gamma must be finite".into()));
            }
        }
        case.validate()?;
        Ok(case)
    }
}

/// Tolerances from defaults, then `RIGIDITY_TOL`, then the `--tol` flag.
/// A flag makes the environment value irrelevant, so it is not parsed.
pub fn tolerances(env_value: Option<&str>, flag: Option<f64>) -> Result<ToleranceConfig> {
    let residual = match (flag, env_value) {
        (Some(v), _) => Some(v),
        (None, Some(raw)) => Some(
            raw.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidTolerance(format!("{TOL_ENV}={raw:?} is not a number")))?,
        ),
        (None, None) => None,
    };
    let cfg = match residual {
        Some(v) => ToleranceConfig::default().with_residual_tol(v),
        None => ToleranceConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: CaseKind) -> CaseSpec {
        CaseSpec {
            kind,
            n: Some(2),
            q0: None,
            p: None,
            q: None,
            gamma: None,
            residual_tol: None,
        }
    }

    #[test]
    fn diagonal_needs_all_parameters() {
        let mut s = spec(CaseKind::Diagonal);
        assert!(s.group_case().is_err());
        s.q0 = Some(1);
        s.p = Some(3);
        s.q = Some(2);
        assert_eq!(s.group_case().unwrap(), GroupCase::SuPq { n: 2, q0: 1, p: 3, q: 2 });
        s.p = Some(1);
        assert!(matches!(s.group_case(), Err(Error::BadParameters(_))));
    }

    #[test]
    fn other_cases_reject_diagonal_flags() {
        let mut s = spec(CaseKind::IharaSo);
        assert_eq!(s.group_case().unwrap(), GroupCase::So2n2 { n: 2 });
        s.p = Some(3);
        assert!(s.group_case().is_err());
        let mut s = spec(CaseKind::Satake);
        s.gamma = Some(1.0);
        assert!(s.group_case().is_err());
    }

    #[test]
    fn tolerance_precedence() {
        assert_eq!(tolerances(None, None).unwrap(), ToleranceConfig::default());
        assert_eq!(tolerances(Some("1e-8"), None).unwrap().residual_tol, 1e-8);
        assert_eq!(tolerances(Some("1e-8"), Some(1e-7)).unwrap().residual_tol, 1e-7);
        assert!(tolerances(Some("abc"), None).is_err());
        assert!(tolerances(Some("abc"), Some(1e-9)).is_ok());
        assert!(tolerances(None, Some(-1.0)).is_err());
    }
}
