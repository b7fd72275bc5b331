use thiserror::Error;

/// Errors surfaced at module boundaries. Programmer errors (dimension
/// mismatches inside the contraction engine, malformed slot tables built in
/// code) panic instead.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A jet does not carry enough Taylor data for the requested computation.
    #[error("jet truncation degree {actual} is too low for {what} (need at least {required})")]
    Truncation {
        what: String,
        required: u32,
        actual: u32,
    },

    /// Coefficient order outside {0, 2, 4, 6}.
    #[error("heat-trace coefficient a_{n} is not supported (n must be 0, 2, 4 or 6)")]
    UnsupportedOrder { n: u32 },

    /// An evaluator restricted to one parity of the dimension was called with
    /// the other.
    #[error("{what} requires {expected} dimension, got m = {m}")]
    Parity {
        what: &'static str,
        expected: &'static str,
        m: usize,
    },

    /// Operator extraction found a non-scalar leading symbol.
    #[error("operator is not of Laplace type: leading symbol is not g^{{ij}} times the identity")]
    NotLaplaceType,

    /// Form degree outside [0, m].
    #[error("form degree {p} out of range 0..={m}")]
    FormDegree { p: usize, m: usize },

    /// Curvature chain window of odd length.
    #[error("curvature chain window [{s}, {t}] has odd length")]
    OddWindow { s: usize, t: usize },

    /// Unknown named invariant or suite.
    #[error("unknown name: {0}")]
    UnknownName(String),

    /// The power of the dilaton prefactor has the wrong parity for the
    /// requested invariant.
    #[error("invariant {name} requires {expected} power of the dilaton, got l = {l}")]
    PowerParity {
        name: &'static str,
        expected: &'static str,
        l: u32,
    },

    /// Jet file failed to parse or violated the normal-gauge contract.
    #[error("jet format error: {0}")]
    JetFormat(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
