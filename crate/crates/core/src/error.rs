use thiserror::Error;

/// Every failure the library can report. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) used by the command line tool.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("root certification failed at {bits} bits")]
    PrecisionExhausted { bits: u32 },

    #[error("series division by a non-unit (zero constant term)")]
    DivisionByNonUnit,

    #[error("no tail bound available: series has no radius hint and no tail ratio was given")]
    TailUnbounded,

    #[error("top half of the stored coefficients is zero")]
    AllZeroTail,

    #[error("degenerate witness: Q'(u) = 0")]
    DegenerateWitness,

    #[error("no admissible witness found up to {max_bits} bits")]
    NoWitnessFound { max_bits: u32 },

    #[error("inadmissible witness: {0}")]
    InadmissibleWitness(String),

    #[error("root ball meets the branch cut (-inf, 0]")]
    BranchCut,

    #[error("expansion point is within a singularity ball")]
    SingularCenter,

    #[error("path step cannot keep a positive margin from the singularities")]
    StepTooClose,

    #[error("Wronskian determinant is not certifiably nonzero")]
    WronskianVanishes,

    #[error("Abel identity violated at coefficient {index}")]
    AbelViolation { index: usize },

    #[error("closed-form Wronskian fit inconsistent: {0}")]
    FitInconsistent(String),

    #[error("truncation too short to decide the leading term")]
    TruncationInconclusive,

    #[error("singular profile fit diverged")]
    FitDiverged,

    #[error("Gamma(-tau) has a pole (tau = {tau} is a nonnegative integer)")]
    DegenerateGamma { tau: f64 },

    #[error("oscillating coefficients: supply candidate singular directions")]
    OscillationUnresolved,

    #[error("amplitude system is numerically singular")]
    NearSingular,

    #[error("radius hint {radius} does not exceed 1")]
    RadiusTooSmall { radius: f64 },

    #[error("syntax error at {start}..{end}: {message}")]
    Syntax { start: usize, end: usize, message: String },

    #[error("not a polynomial at {start}..{end}: {message}")]
    NonPolynomial { start: usize, end: usize, message: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::PrecisionExhausted { .. } => "precision_exhausted",
            Error::DivisionByNonUnit => "division_by_non_unit",
            Error::TailUnbounded => "tail_unbounded",
            Error::AllZeroTail => "all_zero_tail",
            Error::DegenerateWitness => "degenerate_witness",
            Error::NoWitnessFound { .. } => "no_witness_found",
            Error::InadmissibleWitness(_) => "inadmissible_witness",
            Error::BranchCut => "branch_cut",
            Error::SingularCenter => "singular_center",
            Error::StepTooClose => "step_too_close",
            Error::WronskianVanishes => "wronskian_vanishes",
            Error::AbelViolation { .. } => "abel_violation",
            Error::FitInconsistent(_) => "fit_inconsistent",
            Error::TruncationInconclusive => "truncation_inconclusive",
            Error::FitDiverged => "fit_diverged",
            Error::DegenerateGamma { .. } => "degenerate_gamma",
            Error::OscillationUnresolved => "oscillation_unresolved",
            Error::NearSingular => "near_singular",
            Error::RadiusTooSmall { .. } => "radius_too_small",
            Error::Syntax { .. } => "syntax_error",
            Error::NonPolynomial { .. } => "non_polynomial",
            Error::Schema { .. } => "schema_error",
            Error::InvalidArgument(_) => "invalid_argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
