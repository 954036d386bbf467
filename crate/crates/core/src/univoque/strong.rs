//! Separating unique expansions whose tails stay uniformly below d from
//! those whose tails come arbitrarily close to it.

use super::{member, DExpansion, MembershipVerdict};
use crate::symseq::{lex_compare, matching_stats, LexVerdict, SymbolicSequence};
use crate::{Error, Result};

/// Verdict on the strict subset of unique expansions: those with both
/// limsup_{n} σⁿ(ω) and limsup_{n} σⁿ(ω̄) lexicographically strictly below
/// d. A unique expansion outside that subset has tails matching arbitrarily
/// long prefixes of d; it sits in the boundary layer W.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrongVerdict {
    /// Both limsups strictly below d.
    CertifiedIn,
    /// Tails of ω (or of ω̄) match arbitrarily long prefixes of d, so ω
    /// lies in W whenever the underlying membership holds. For the
    /// structural forms recognized here the limsup claim is exact; the
    /// membership hypothesis is inherited from the caller's test.
    CertifiedInW,
    /// No structural argument applied. `max_match` is the longest d-prefix
    /// match seen among the scanned tails of ω and ω̄, and
    /// `last_improvement` the last shift at which that running maximum
    /// grew: a maximum that freezes early suggests the limsup stays below
    /// d, one that keeps growing suggests W.
    UndecidedToHorizon { horizon: u64, max_match: u64, last_improvement: u64 },
}

/// Classify a unique expansion as strictly inside (both limsups below d) or
/// in the boundary layer W.
///
/// Errors with [`Error::HypothesisFailed`] when ω is certified not to be a
/// unique expansion at all. Decides exactly for eventually periodic ω (a
/// unique expansion with finitely many tail classes always stays strictly
/// inside) and for block constructions tagged at build time, whose cut or
/// block lengths grow without bound and force arbitrarily long d-prefixes
/// into the digits; the tag is honored only when its recorded base sequence
/// is the d under test. Everything else gets an honest evidence report.
pub fn is_strongly_univoque(
    omega: &SymbolicSequence,
    d: &DExpansion,
    horizon: u64,
) -> Result<StrongVerdict> {
    let membership = member::in_u(omega, d, horizon)?;
    if let MembershipVerdict::CertifiedOut { shift, condition, .. } = membership {
        return Err(Error::HypothesisFailed(format!(
            "not a unique expansion: the tail at shift {shift} ({condition:?} side) reaches the expansion of 1"
        )));
    }

    // Tagged block constructions: growing cuts (each block a decremented
    // d-prefix) and growing distinct block pairs (each opening with a
    // d-prefix as long as the block) both place arbitrarily long d-prefixes
    // into ω, pinning limsup σⁿ(ω) at d exactly.
    if omega.structural_kind().is_some() {
        if let (Some(base), Some(dseq)) = (omega.structural_base(), d.as_sequence()) {
            if same_sequence(&base, dseq, horizon)? {
                return Ok(StrongVerdict::CertifiedInW);
            }
        }
    }

    // Finitely many tail classes, each certified strictly below d: both
    // limsups are maxima over those classes, hence strictly below d.
    if omega.as_eventually_periodic().is_some() && membership.is_in() {
        return Ok(StrongVerdict::CertifiedIn);
    }

    // No structure: report how the d-prefix matches grew over the scan.
    let h = usize::try_from(horizon)
        .map_err(|_| Error::InvalidInput("horizon exceeds addressable memory".to_string()))?;
    let w = d.window(h);
    let dpre = d.prefix_digits(w)?;
    let text = omega.materialize_prefix(h + w)?;
    let alpha = omega.alphabet().alpha();
    let reflected: Vec<u8> = text.iter().map(|&x| alpha - x).collect();
    let ms_direct = matching_stats(&dpre, &text);
    let ms_reflected = matching_stats(&dpre, &reflected);
    let mut max_match = 0u64;
    let mut last_improvement = 0u64;
    for n in 0..h {
        let t = ms_direct[n].max(ms_reflected[n]) as u64;
        if t > max_match {
            max_match = t;
            last_improvement = n as u64;
        }
    }
    Ok(StrongVerdict::UndecidedToHorizon { horizon, max_match, last_improvement })
}

/// Do two sequences coincide? Exact for two mirror-rule sequences and for
/// two eventually periodic ones; otherwise prefix agreement to the cap is
/// accepted as a plausible match.
fn same_sequence(a: &SymbolicSequence, b: &SymbolicSequence, cap: u64) -> Result<bool> {
    if let (Some(fa), Some(fb)) = (a.as_pmirror_first(), b.as_pmirror_first()) {
        return Ok(fa.digits() == fb.digits());
    }
    Ok(matches!(
        lex_compare(a, b, cap.max(64))?,
        LexVerdict::DecidedEqual | LexVerdict::EqualToHorizon { .. }
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symseq::{parse_sequence, Alphabet, BlockGen, Repeat, StructuralKind, Word};

    fn seq(text: &str) -> SymbolicSequence {
        parse_sequence(text).unwrap()
    }

    fn tribonacci_d() -> DExpansion {
        DExpansion::Exact(seq("alpha=1; seq=(110)^inf"))
    }

    #[test]
    fn periodic_member_stays_strictly_inside() {
        let omega = seq("alpha=1; seq=(10)^inf");
        let v = is_strongly_univoque(&omega, &tribonacci_d(), 200).unwrap();
        assert_eq!(v, StrongVerdict::CertifiedIn);
    }

    #[test]
    fn growing_cuts_land_in_the_boundary_layer() {
        // Cut lengths 4, 7, 10, … grow without bound, so the concatenation
        // of decremented d-prefixes contains d-prefixes of every length.
        let omega = seq("alpha=1; seq=mconcat(d=(110)^inf;m=4,7,10,...)");
        let v = is_strongly_univoque(&omega, &tribonacci_d(), 600).unwrap();
        assert_eq!(v, StrongVerdict::CertifiedInW);
    }

    #[test]
    fn constant_cuts_collapse_to_a_strictly_inside_point() {
        // m ≡ 2 collapses at construction to the periodic sequence (10)^∞,
        // which is certified strictly inside, not in W.
        let omega = seq("alpha=1; seq=mconcat(d=(110)^inf;m=2,2,...)");
        assert!(omega.as_eventually_periodic().is_some());
        let v = is_strongly_univoque(&omega, &tribonacci_d(), 200).unwrap();
        assert_eq!(v, StrongVerdict::CertifiedIn);
    }

    #[test]
    fn tag_over_a_different_base_is_not_honored() {
        // A concatenation built from (10)^∞-prefixes carries a structural
        // tag, but its base is not the d under test, so no exact limsup
        // claim is available against (110)^∞.
        let omega = seq("alpha=1; seq=mconcat(d=(10)^inf;m=1,3,5,...)");
        assert_eq!(omega.structural_kind(), Some(StructuralKind::PrefixConcatUnboundedCuts));
        let v = is_strongly_univoque(&omega, &tribonacci_d(), 300).unwrap();
        assert!(
            matches!(v, StrongVerdict::UndecidedToHorizon { .. }),
            "mismatched base must fall back to the evidence scan, got {v:?}"
        );
    }

    struct DoublingPairs {
        d: SymbolicSequence,
        len: usize,
    }

    impl BlockGen for DoublingPairs {
        fn next_block(&mut self) -> crate::Result<Option<(Word, Repeat)>> {
            let b = Word::new(self.d.alphabet(), self.d.materialize_prefix(self.len)?)?;
            self.len *= 2;
            Ok(Some((b.concat(&b.reflect()), Repeat::finite_u64(1))))
        }
    }

    #[test]
    fn growing_block_pairs_are_certified_in_w() {
        // Blocks b·b̄ with b running over doubling prefixes of the
        // mirror-doubling expansion: each block opens with a d-prefix as
        // long as b, so the limsup is pinned at d.
        let d = seq("alpha=1; seq=pmirror(0)");
        let omega = SymbolicSequence::from_blocks_tagged(
            d.alphabet(),
            Box::new(DoublingPairs { d: d.clone(), len: 1 }),
            "block pairs",
            None,
            Some((StructuralKind::BlockProductDistinct, d.clone())),
        );
        let v = is_strongly_univoque(&omega, &DExpansion::Exact(d), 400).unwrap();
        assert_eq!(v, StrongVerdict::CertifiedInW);
    }

    #[test]
    fn non_member_is_a_hypothesis_error() {
        let omega = seq("alpha=1; seq=(110)^inf");
        let err = is_strongly_univoque(&omega, &tribonacci_d(), 100).unwrap_err();
        assert!(matches!(err, Error::HypothesisFailed(_)), "got {err:?}");
    }

    #[test]
    fn untagged_aperiodic_sequence_reports_frozen_match_evidence() {
        // The mirror-doubling expansion never matches more than 4 digits of
        // (110)^∞ at any shift on either side: a tail starting 1101 must
        // continue with 0. The running maximum therefore freezes early.
        let omega = seq("alpha=1; seq=pmirror(0)");
        let v = is_strongly_univoque(&omega, &tribonacci_d(), 400).unwrap();
        match v {
            StrongVerdict::UndecidedToHorizon { max_match, last_improvement, .. } => {
                assert_eq!(max_match, 4);
                assert!(last_improvement < 20, "maximum froze at shift {last_improvement}");
            }
            other => panic!("expected an evidence report, got {other:?}"),
        }
    }
}
