//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building graphs or evaluating physics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown mode id `{0}`")]
    UnknownMode(String),

    #[error("duplicate mode id `{0}`")]
    DuplicateMode(String),

    #[error("duplicate coupling between `{0}` and `{1}`")]
    DuplicateCoupling(String, String),

    #[error("self-coupling on mode `{0}` is not allowed")]
    SelfCoupling(String),

    #[error("matrix is not Hermitian (max asymmetry {0:.3e} GHz)")]
    NonHermitian(f64),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("branch index {index} out of range (have {count} branches)")]
    BranchIndex { index: usize, count: usize },

    #[error(
        "zero detuning between cavity mode {cavity} and magnon mode {magnon} \
         (delta_c and delta_m coincide at this operating point); \
         the dispersive expansion is singular"
    )]
    ZeroDetuning { cavity: usize, magnon: usize },

    #[error("magnon-magnon coupling requires omega_m = omega_c (got a mismatch of {0:.3e} GHz)")]
    DetuningCondition(f64),

    #[error("singular response at probe {probe_ghz} GHz (vanishing denominator; needs loss > 0)")]
    SingularResponse { probe_ghz: f64 },

    #[error("no mode couples to bath `{0}`")]
    UnknownBath(String),

    #[error("transmission map failed at sweep row {row}, probe column {col}: {source}")]
    MapPoint {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("sample region contains no grid points")]
    EmptyRegion,

    #[error("field map has zero total magnetic energy")]
    ZeroFieldEnergy,

    #[error("coupling phase undefined: transverse field integral vanishes")]
    UndefinedPhase,

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("field CSV parse error at line {line}: {message}")]
    FieldCsv { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
