//! Computations around beta-expansions over the digit alphabet {0, …, α}.
//!
//! The crate is organized in layers:
//!
//! * [`numerics`] — adaptive-precision real arithmetic: directed-rounding
//!   enclosures, comparison with precision escalation, monotone root solving.
//!   Every real number in the crate is a [`numerics::RefinableReal`].
//! * [`symseq`] — digits, finite words, infinite symbolic sequences with exact
//!   backends, the shift map, reflection, lexicographic order, and the
//!   ultrametric ρ_β.
//! * [`expand`] — the projection Π_β, quasi-greedy expansions, a brute-force
//!   expansion-counting oracle, and recovery of a base from a prescribed
//!   expansion of 1.
//! * [`univoque`] — membership tests for the univoque set U_β, its closure
//!   variant U'_β, the strongly-univoque subset, and base classification.
//! * [`wconstruct`] — constructions of univoque-but-not-strongly-univoque
//!   sequences: index-sequence recursions, concatenation assembly, and
//!   convergence-rate variants.
//! * [`mirror`] — admissible words, mirror sequences (generalized Thue–Morse),
//!   and the bases for which they expand 1 (de Vries–Komornik numbers).
//! * [`dimension`] — Hausdorff-dimension machinery: Moran-equation solving,
//!   finite-subsystem lower bounds, binary-tree cover sums, and a cylinder
//!   box-count estimate.
//!
//! Numbers are never silently rounded: every real-valued result is an
//! enclosure `[lo, hi]` that provably contains the true value, and every
//! strict comparison either certifies an ordering or reports that it could
//! not be decided within the configured precision ceiling.

pub mod expand;
pub mod numerics;
pub mod symseq;
pub mod univoque;
pub mod wconstruct;

use thiserror::Error;

/// Unified error type for the crate.
///
/// Variants are grouped by the failure class they represent so that callers
/// (in particular the CLI) can map them to stable exit codes: precision
/// failures are retryable with a higher bit ceiling, hypothesis failures mean
/// the requested object provably does not exist for the given inputs, and the
/// rest indicate invalid input.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A strict sign or ordering decision could not be certified within the
    /// precision ceiling.
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    /// A bracketing precondition failed: the function has the same certified
    /// sign at both bracket endpoints.
    #[error("no sign change over the bracket [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },

    /// An interval divisor contains zero.
    #[error("division by an interval containing zero")]
    IntervalDivisionByZero,

    /// A polynomial-root bracket does not isolate exactly one real root.
    #[error("bracket [{lo}, {hi}] contains {count} roots of the polynomial, expected exactly 1")]
    BadBracket { lo: String, hi: String, count: usize },

    /// Input violated a domain precondition (digit out of range, empty
    /// period, malformed grammar, x outside [0, α/(β−1)], …).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two sequences could not be distinguished within the comparison
    /// horizon, but the operation requires a first differing index.
    #[error("sequences agree to the comparison horizon {horizon}")]
    IndistinguishableToHorizon { horizon: u64 },

    /// The sequence has no qualifying digit within the horizon (all digits
    /// are 0 or all are α), so the threshold indices are undefined.
    #[error("degenerate sequence: {0}")]
    DegenerateSequence(String),

    /// A theorem hypothesis required by a construction fails for this base,
    /// with a finite witness where available.
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    /// An index sequence is not d-positive: d_{m_k} = 0 at the reported k.
    #[error("index sequence is not d-positive at position {k} (m = {m})")]
    NotDPositive { k: usize, m: u64 },

    /// A lazy search exceeded its digit-read budget before finding the next
    /// term.
    #[error("search budget exhausted after {steps} digit reads while {context}")]
    HorizonExhausted { steps: u64, context: String },

    /// The rate function cannot satisfy the required growth inequality.
    #[error("rate function too slow: {0}")]
    RateTooSlow(String),

    /// A generator word fails the admissibility inequalities.
    #[error("word is not admissible: {0}")]
    NotAdmissible(String),

    /// The solved base failed its quasi-greedy replay cross-check.
    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),

    /// A word system violates prefix-freeness (diagnostic; must not occur
    /// for correctly constructed systems).
    #[error("word system is not prefix-free: word {a:?} is a prefix of {b:?}")]
    PrefixFreenessViolated { a: String, b: String },

    /// A tree-sum level exceeds the supported depth.
    #[error("tree level {n} beyond supported depth {max}")]
    LevelTooDeep { n: u32, max: u32 },

    /// A counting walk exceeded its node budget.
    #[error("expansion counting exceeded the node budget {budget}")]
    CountBudgetExceeded { budget: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
