use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid graphon: {0}")]
    InvalidGraphon(String),
    #[error("invalid K3-tree: {0}")]
    InvalidTree(String),
    #[error("enumeration budget exceeded: {terms} terms needed, budget {budget}")]
    BudgetExceeded { terms: u128, budget: u128 },
    #[error("graph has {vertices} vertices, above the cap of {cap}")]
    SizeExceeded { vertices: usize, cap: usize },
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
