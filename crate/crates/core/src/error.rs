use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the supported domain of a function.
    #[error("{func}: argument {arg} = {value} outside domain ({expected})")]
    Domain {
        func: &'static str,
        arg: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A model parameter violated its invariant.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    /// Conditioning event of a survival ratio is numerically extinct.
    #[error("conditioning event P[X > {t_a}] = {mass:e} is numerically zero")]
    DegenerateCondition { t_a: f64, mass: f64 },

    #[error("relay set is empty")]
    EmptyRelaySet,

    #[error("parking lot is empty at hour {hour}")]
    EmptyLot { hour: u32 },

    /// Closed-form capacity needs identical source and relay powers.
    #[error("select-combining closed form needs p_s == p_r (got p_s = {p_s}, p_r = {p_r})")]
    HeterogeneousPowers { p_s: f64, p_r: f64 },

    #[error("closed-form capacity supports at most {max} branches, got {k}")]
    TooManyBranches { k: usize, max: usize },

    /// Parking table or run configuration failed validation.
    #[error("{0}")]
    Config(String),
}

pub(crate) fn domain(func: &'static str, arg: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        func,
        arg,
        value,
        expected,
    }
}
