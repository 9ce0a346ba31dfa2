use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("series has zero constant term and no reciprocal")]
    ZeroConstantTerm,

    #[error("the zero polynomial has no Sturm chain")]
    ZeroPolynomial,

    #[error("requested width {eps:e} not reached at {precision} bits (got {width:e})")]
    PrecisionExhausted { eps: f64, precision: u32, width: f64 },

    #[error("term budget of {budget} exceeded (needed about {needed})")]
    TermBudget { budget: usize, needed: usize },

    #[error("no sign change found for {what} below x = {limit}")]
    SearchFailure { what: &'static str, limit: f64 },

    #[error("missing or failed ingredient certificate: {0}")]
    Ingredient(String),
}
