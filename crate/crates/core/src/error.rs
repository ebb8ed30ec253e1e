//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the workbench.
///
/// Every failure mode named in the module contracts maps to a variant here;
/// validation-style checks that are "data, not exceptions" instead return
/// report structures (see [`crate::report`]).
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix fails to be a finite-type Cartan matrix.
    #[error("not a finite-type Cartan matrix: {0}")]
    NotCartan(String),

    /// Weyl group enumeration exceeded the safety cap.
    #[error("Weyl group enumeration exceeded cap of {0} elements")]
    WeylGroupTooLarge(usize),

    /// A matrix expected to be an involution is not.
    #[error("matrix is not an involution")]
    NotInvolution,

    /// A set of matrices is not closed under multiplication.
    #[error("matrix set is not closed under multiplication")]
    GroupNotClosed,

    /// Unknown builtin block name.
    #[error("unknown block '{name}'; available: {available}")]
    UnknownBlock { name: String, available: String },

    /// Block data failed validation.
    #[error("block '{name}' failed validation:\n{report}")]
    InvalidBlock { name: String, report: String },

    /// Malformed block file.
    #[error("malformed block file: {0}")]
    BlockFile(String),

    /// The block is missing a metadata flag required by an operation.
    #[error("block '{block}' is missing required flag or data: {what}")]
    MissingFlag { block: String, what: String },

    /// Cross action of the recorded real Weyl group is not transitive on the
    /// open-orbit parameters.
    #[error("real Weyl group does not act transitively on open-orbit parameters of '{0}'")]
    NotTransitive(String),

    /// Two counts that must agree (data consistency) disagree.
    #[error("count mismatch in {what}: {left} vs {right}")]
    CountMismatch {
        what: String,
        left: usize,
        right: usize,
    },

    /// KLV recursion hit a status case it cannot handle.
    #[error("KLV recursion: unhandled case at cell ({delta}, {gamma}): {why}")]
    UnhandledCell {
        delta: String,
        gamma: String,
        why: String,
    },

    /// KLV recursion could not resolve a type-II Cayley ambiguity.
    #[error("KLV recursion: unresolved type-II split at parameter {0}")]
    UnresolvedTypeII(String),

    /// A word that must be reduced is not.
    #[error("word {0:?} is not reduced")]
    NotReduced(Vec<usize>),

    /// Mismatched matrix dimensions.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Negative or otherwise unusable truncation degree.
    #[error("invalid truncation degree: {0}")]
    BadDegree(String),

    /// The truncation window is too small for the requested computation.
    #[error("truncation degree {given} too small for {what}; need at least {needed}")]
    TruncationTooSmall {
        what: String,
        given: usize,
        needed: usize,
    },

    /// A basis extraction that is guaranteed for reflection groups failed.
    #[error("basis extraction failed: {0}")]
    BasisExtraction(String),

    /// Krull–Schmidt splitting needed an irrational idempotent.
    #[error("decomposition requires an irrational splitting field: {0}")]
    IrrationalSplitting(String),

    /// Idempotent lifting did not stabilize inside the window.
    #[error("idempotent lifting unstable within the truncation window: {0}")]
    UnstableIdempotent(String),

    /// A canonical-object schedule produced no summand of the right character.
    #[error("no summand matching parameter '{param}': {why}")]
    NoMatchingSummand { param: String, why: String },

    /// Equivariant action data is inconsistent.
    #[error("equivariant action data inconsistent: {0}")]
    BadAction(String),

    /// Ext-algebra composition failed associativity on the window.
    #[error("composition not associative on window: {0}")]
    NotAssociative(String),

    /// Importer for atlas-style block output could not parse its input.
    #[error("block import failed at line {line}: {why}")]
    Import { line: usize, why: String },

    /// I/O error wrapper.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization error wrapper.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
