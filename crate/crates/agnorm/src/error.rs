use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed group spec `{0}`")]
    Spec(String),
    #[error("group axiom violated: {0}")]
    Axiom(String),
    #[error("{what} limit exceeded: {got} > {limit}")]
    Limit {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("operands live on different groups")]
    GroupMismatch,
    #[error("set is not a subgroup")]
    NotSubgroup,
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("not a convolution operator: commutator with right translation by {y} is {defect:.3e}")]
    NotConvolution { y: usize, defect: f64 },
    #[error("audit failed at stage `{stage}`: {detail}")]
    Audit { stage: &'static str, detail: String },
    #[error("not {eps}-almost integer-valued at element {point} (value {value})")]
    NotAlmostInteger { eps: f64, point: usize, value: f64 },
    #[error("no admissible subgroup")]
    NoAdmissibleSubgroup,
    #[error("support violation: {0}")]
    Support(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn audit(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Audit {
            stage,
            detail: detail.into(),
        }
    }
}
