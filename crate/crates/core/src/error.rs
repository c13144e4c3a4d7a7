use thiserror::Error;

/// Errors surfaced by chart construction, operator evaluation and the
/// verification drivers.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point {point:?} lies outside the chart domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("metric is not positive definite at {point:?} (smallest eigenvalue {eigenvalue:.3e})")]
    MetricNotSpd { point: Vec<f64>, eigenvalue: f64 },

    #[error("singular matrix while {context}")]
    Singular { context: String },

    #[error("sampler found only {found} of {requested} admissible points")]
    SamplerExhausted { requested: usize, found: usize },

    #[error("finite-difference step {step} too large for the domain at {point:?}")]
    StepTooLarge { step: f64, point: Vec<f64> },

    #[error(
        "dual vector {k_index} pairs non-integrally with lattice generator {basis_index}: \
         <k, gamma> = {pairing}"
    )]
    NonIntegralCharacter {
        k_index: usize,
        basis_index: usize,
        pairing: f64,
    },

    #[error("family is not lambda-diagonal: lambda_{index} = {lambda} but A_{index}{index} = {a_ii}")]
    NotLambdaDiagonal {
        index: usize,
        lambda: String,
        a_ii: String,
    },

    #[error("field {label} vanishes at sampled point {point:?}")]
    VanishingField { label: String, point: Vec<f64> },

    #[error("quotient construction requires a uniform (lambda, mu)-eigenfamily: {reason}")]
    NotUniformFamily { reason: String },

    #[error("denominator stays below the guard {guard} on {excluded} of {total} sampled points")]
    DenominatorTooSmall {
        guard: f64,
        excluded: usize,
        total: usize,
    },

    #[error("{excluded} of {total} sampled points were excluded; result would not be meaningful")]
    TooManyExclusions { excluded: usize, total: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
