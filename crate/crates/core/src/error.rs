use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: relative residual {residual:.3e}")]
    NonHermitianInput { residual: f64 },

    #[error("bilinear form is not positive definite on the subspace")]
    DegenerateForm,

    #[error("bracket leaves the span of the basis (residual {residual:.3e})")]
    ClosureViolation { residual: f64 },

    #[error("algebra `{0}` carries no Cartan involution")]
    MissingInvolution(String),

    #[error("bad signature form: {0}")]
    BadSignature(String),

    #[error("bad parameters: {0}")]
    BadParameters(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("residual {residual:.3e} exceeds tolerance {tol:.3e} ({context})")]
    ResidualTooHigh {
        context: String,
        residual: f64,
        tol: f64,
    },

    #[error("unresolved component: {0}")]
    UnresolvedComponent(String),

    #[error("eigenvalue pair ±{expected:.6}i of the central element is absent from the component")]
    EigenvalueAbsent { expected: f64 },

    #[error("gamma = {gamma} lies outside the open window ({lower}, {upper})")]
    GammaOutOfWindow { gamma: f64, lower: f64, upper: f64 },

    #[error("centralizer of the embedded subalgebra in k is trivial")]
    EmptyCentralizer,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry in input matrix")]
    NonFinite,
}
