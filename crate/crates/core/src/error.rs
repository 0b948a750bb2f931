use thiserror::Error;

#[derive(Debug, Error)]
pub enum VcspError {
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("mixed infinities: {0}")]
    MixedInfinities(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("budget exceeded: {what} needs about {required} units, budget is {budget}")]
    Budget {
        what: String,
        required: f64,
        budget: f64,
    },

    #[error("structure is not diagonalisable")]
    NotDiagonalisable,

    #[error("strategy error: {0}")]
    Strategy(String),

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error("internal consistency check failed: {0}")]
    Bug(String),

    #[error("size limit: {0}")]
    SizeCap(String),
}

pub type Result<T, E = VcspError> = std::result::Result<T, E>;

impl VcspError {
    pub fn budget(what: impl Into<String>, required: f64, budget: f64) -> Self {
        VcspError::Budget {
            what: what.into(),
            required,
            budget,
        }
    }
}
