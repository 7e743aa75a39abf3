use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("prime {p} is outside the supported range (p <= {max})")]
    PrimeOutOfRange { p: u64, max: u64 },

    #[error("index k = {k} is outside the allowed range {lo}..={hi}")]
    IndexOutOfRange { k: i64, lo: i64, hi: i64 },

    #[error("module dimension {dim} exceeds the resource cap {cap}")]
    ResourceCap { dim: usize, cap: usize },

    #[error("generator action does not have order dividing {p}")]
    WrongOrder { p: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("no differential family on page {r} for {group}")]
    UnsupportedPage { group: String, r: u32 },

    #[error("bidegree law violated by d_{r}: {source_label} -> {target_label}")]
    BidegreeLaw {
        r: u32,
        source_label: String,
        target_label: String,
    },

    #[error("engine inconsistency: {0}")]
    Inconsistent(String),

    #[error("{what} is not defined for group {group}")]
    GroupNotSupported { what: &'static str, group: String },

    #[error("gamma must be nonzero modulo p")]
    ZeroGamma,

    #[error("routes disagree for {group} at p = {p}: dual route gives {dual} ({dual_certificate}), det route gives {det} ({det_certificate})")]
    RouteDisagreement {
        group: String,
        p: u64,
        dual: i64,
        dual_certificate: String,
        det: i64,
        det_certificate: String,
    },

    #[error("unknown group `{0}` (expected Cp, F or G)")]
    UnknownGroup(String),

    #[error("unknown output format `{0}` (expected svg, ascii or json)")]
    UnknownFormat(String),

    #[error("malformed chart document: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a mathematical verification, as opposed to bad input.
    pub fn is_verification_failure(&self) -> bool {
        matches!(
            self,
            Error::Inconsistent(_) | Error::RouteDisagreement { .. } | Error::BidegreeLaw { .. }
        )
    }
}
