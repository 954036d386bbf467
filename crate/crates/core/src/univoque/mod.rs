//! Membership tests for unique expansions, and per-base classification.
//!
//! Over the alphabet {0, …, α} in base β, a sequence ω is the unique
//! expansion of its value exactly when every tail stays lexicographically
//! strictly below the quasi-greedy expansion d of 1, on both sides of the
//! digit reflection x ↦ α − x:
//!
//! ```text
//! σⁿ(ω) < d   and   σⁿ(ω̄) < d   for every n ≥ 0.
//! ```
//!
//! All verdicts here are three-valued: certified in, certified out with a
//! concrete witness shift, or undecided up to a stated horizon. Exact
//! sequence structure (eventual periodicity, the mirror-doubling rule,
//! tagged block constructions) turns the universally quantified conditions
//! into finitely many decidable comparisons; anything without usable
//! structure degrades to an honest windowed scan that can certify failure
//! but never membership.

mod classify;
mod member;
mod strong;

pub use classify::{
    classify_base, BaseClassification, DStructure, DimHint, LimsupStatus, WStatus,
};
pub use member::{in_u, in_u_prime, FailedCondition, GeCertificate, MembershipVerdict};
pub use strong::{is_strongly_univoque, StrongVerdict};

use crate::expand::{ExpansionDomain, ExpansionOutcome};
use crate::numerics::{Origin, PrecisionContext, RefinableReal};
use crate::symseq::{Alphabet, SymbolicSequence, Word};
use crate::Result;

/// The quasi-greedy expansion of 1 in a fixed base, in the form available
/// to the membership tests.
///
/// Comparisons against an `Exact` expansion can quantify over all shifts
/// when the other sequence has finite tail structure; against a `Prefix`
/// they are inherently horizon-limited and are reported as such.
#[derive(Debug, Clone)]
pub enum DExpansion {
    /// Exact infinite structure: eventually periodic, or generated by the
    /// mirror-doubling rule.
    Exact(SymbolicSequence),
    /// Certified first digits only, for bases where no cycle was found
    /// within the expansion horizon.
    Prefix(Word),
}

impl DExpansion {
    /// Expand 1 in the given base and package the result.
    ///
    /// The base must satisfy 1 < β < α + 1. A base carrying a mirror-rule
    /// pedigree for this alphabet short-circuits to the exact
    /// mirror-doubling sequence; otherwise the quasi-greedy digits are
    /// streamed until the remainder provably cycles (exact structure) or
    /// `horizon` digits have been produced (certified prefix).
    pub fn for_base(
        beta: &RefinableReal,
        alphabet: Alphabet,
        ctx: &PrecisionContext,
        horizon: usize,
    ) -> Result<DExpansion> {
        // Certify the base range up front, whichever branch produces digits.
        let domain = ExpansionDomain::new(alphabet, beta, ctx)?;
        if let Some(Origin::MirrorBase { generator, alpha }) = beta.origin() {
            if *alpha == alphabet.alpha() {
                let first = Word::new(alphabet, generator.clone())?.increment_last()?;
                return Ok(DExpansion::Exact(SymbolicSequence::pmirror_rule(first)?));
            }
        }
        match domain.expansion_of_one(horizon)? {
            ExpansionOutcome::Periodic(seq) => Ok(DExpansion::Exact(seq)),
            ExpansionOutcome::Truncated { digits } => {
                Ok(DExpansion::Prefix(Word::new(alphabet, digits)?))
            }
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            DExpansion::Exact(seq) => seq.alphabet(),
            DExpansion::Prefix(w) => w.alphabet(),
        }
    }

    /// The first `n` digits, clamped to what is available for a prefix.
    pub fn prefix_digits(&self, n: usize) -> Result<Vec<u8>> {
        match self {
            DExpansion::Exact(seq) => seq.materialize_prefix(n),
            DExpansion::Prefix(w) => Ok(w.digits()[..n.min(w.len())].to_vec()),
        }
    }

    /// Usable comparison-window length for a scan with the given horizon.
    pub(crate) fn window(&self, horizon: usize) -> usize {
        match self {
            DExpansion::Exact(_) => horizon,
            DExpansion::Prefix(w) => horizon.min(w.len()),
        }
    }

    /// The exact sequence, when there is one.
    pub fn as_sequence(&self) -> Option<&SymbolicSequence> {
        match self {
            DExpansion::Exact(seq) => Some(seq),
            DExpansion::Prefix(_) => None,
        }
    }
}
