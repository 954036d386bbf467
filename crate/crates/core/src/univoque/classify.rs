//! Per-base classification: does the boundary layer W contain anything,
//! and how do the tails of the reflected expansion of 1 behave?
//!
//! Everything here is driven by one object, the quasi-greedy expansion d of
//! 1, and one family of comparisons, σⁿ(d̄) against d:
//!
//! * some tail σⁿ(d̄) reaches d (n ≥ 1)  ⇔  W is empty;
//! * every tail stays strictly below     ⇔  W is uncountable;
//! * the limsup of the tails sits strictly below d exactly when W also
//!   carries positive Hausdorff dimension, while mirror-rule bases pin the
//!   limsup at d and force dimension zero.

use super::member::GeCertificate;
use super::DExpansion;
use crate::numerics::{PrecisionContext, RefinableReal};
use crate::symseq::{lex_compare, matching_stats, Alphabet, LexVerdict, SymbolicSequence, Word};
use crate::{Error, Result};

/// Digits of d kept in the report, so records stay printable even at large
/// scan horizons.
const REPORT_PREFIX: usize = 256;

/// Status of the boundary layer W: unique expansions whose tails approach
/// the expansion of 1 without reaching it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WStatus {
    /// W is empty: the tail of d̄ at `witness` reaches d, by equality or by
    /// strict excess.
    Empty { witness: u64, certificate: GeCertificate },
    /// Every scanned tail of d̄ stayed strictly below d, but d was only
    /// known to the stated horizon, so no universal claim is possible.
    NonemptyEvidence { horizon: u64 },
    /// Every tail of d̄ is certified strictly below d, which makes W
    /// nonempty, indeed uncountable.
    DecidedNonempty,
}

/// Position of limsup σⁿ(d̄) relative to d. `exact` marks statuses decided
/// from exact structure; a status derived from a truncated scan is
/// evidence, never a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimsupStatus {
    /// Recurring tails of d̄ match at most `max_match` leading digits of d.
    StrictlyBelow { max_match: u64, exact: bool },
    /// Tails of d̄ match arbitrarily long prefixes of d without recurring
    /// excess (for a truncated scan: match lengths kept growing).
    EqualsD { exact: bool },
    /// A recurring tail of d̄ strictly exceeds d.
    Above { witness: u64, exact: bool },
}

/// Coarse dimension information for the value set of W.
#[derive(Debug, Clone, PartialEq)]
pub enum DimHint {
    /// A certified positive lower bound on the Hausdorff dimension.
    PositiveLowerBound(f64),
    /// d follows the mirror-doubling rule: W is uncountable yet its value
    /// set has Hausdorff dimension zero.
    ZeroByPMirror,
    Unknown,
}

/// The structure of d the classification was able to use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DStructure {
    EventuallyPeriodic { preperiod: Word, period: Word },
    MirrorRule { first: Word },
    TruncatedScan { len: u64 },
}

/// Everything decided about one base.
#[derive(Debug, Clone)]
pub struct BaseClassification {
    pub beta: RefinableReal,
    pub alphabet: Alphabet,
    pub d_structure: DStructure,
    /// Leading digits of d, capped at a printable length.
    pub d_prefix: Word,
    pub w_status: WStatus,
    pub limsup_status: LimsupStatus,
    pub dim_hint: DimHint,
    pub horizon: u64,
}

/// Classify one base: expand 1, then compare every tail of the reflected
/// expansion against the expansion itself.
///
/// Exact when the expansion of 1 is eventually periodic (finitely many tail
/// classes) or follows the mirror-doubling rule (structurally decided);
/// otherwise the first `horizon` digits are scanned and every status is
/// reported as evidence.
pub fn classify_base(
    beta: &RefinableReal,
    alphabet: Alphabet,
    horizon: u64,
    ctx: &PrecisionContext,
) -> Result<BaseClassification> {
    let h = usize::try_from(horizon)
        .map_err(|_| Error::InvalidInput("horizon exceeds addressable memory".to_string()))?;
    let d = DExpansion::for_base(beta, alphabet, ctx, h)?;
    match &d {
        DExpansion::Exact(seq) => {
            if let Some(first) = seq.as_pmirror_first() {
                classify_mirror(beta, alphabet, seq, first, horizon, h)
            } else if let Some((pre, per)) = seq.as_eventually_periodic() {
                classify_ep(beta, alphabet, seq, pre, per, horizon, h)
            } else {
                Err(Error::InvalidInput(
                    "expansion of 1 lacks a recognized exact structure".to_string(),
                ))
            }
        }
        DExpansion::Prefix(w) => classify_truncated(beta, alphabet, w, horizon),
    }
}

/// Mirror-doubling d: each doubling step writes the reflection of
/// everything so far (final digit incremented), so d̄ reproduces ever
/// longer d-prefixes one step behind. Every tail of d̄ still stays strictly
/// below d, which settles nonemptiness; the limsup is pinned at d exactly;
/// and the value set of W collapses to Hausdorff dimension zero.
fn classify_mirror(
    beta: &RefinableReal,
    alphabet: Alphabet,
    dseq: &SymbolicSequence,
    first: Word,
    horizon: u64,
    h: usize,
) -> Result<BaseClassification> {
    Ok(BaseClassification {
        beta: beta.clone(),
        alphabet,
        d_structure: DStructure::MirrorRule { first },
        d_prefix: Word::new(alphabet, dseq.materialize_prefix(h.min(REPORT_PREFIX))?)?,
        w_status: WStatus::DecidedNonempty,
        limsup_status: LimsupStatus::EqualsD { exact: true },
        dim_hint: DimHint::ZeroByPMirror,
        horizon,
    })
}

/// Eventually periodic d: the tails of d̄ for n ≥ 1 are exactly the tails
/// at n ∈ [1, 1+a+q), and the ones recurring infinitely often are those at
/// n ∈ [max(a,1), max(a,1)+q). Both the emptiness test and the limsup
/// reduce to finitely many comparisons, each decided outright.
fn classify_ep(
    beta: &RefinableReal,
    alphabet: Alphabet,
    dseq: &SymbolicSequence,
    pre: Word,
    per: Word,
    horizon: u64,
    h: usize,
) -> Result<BaseClassification> {
    let a = pre.len() as u64;
    let q = per.len() as u64;
    let dbar = dseq.reflect();
    let recur_start = a.max(1);

    let mut empty: Option<(u64, GeCertificate)> = None;
    let mut recur_greater: Option<u64> = None;
    let mut recur_equal = false;
    let mut recur_match = 0u64;
    for n in 1..1 + a + q {
        let recurring = (recur_start..recur_start + q).contains(&n);
        match lex_compare(&dbar.shift(n), dseq, horizon)? {
            LexVerdict::Less { witness } => {
                if recurring {
                    recur_match = recur_match.max(witness - 1);
                }
            }
            LexVerdict::Greater { witness } => {
                if empty.is_none() {
                    empty = Some((n, GeCertificate::GreaterAt { digit_index: witness }));
                }
                if recurring && recur_greater.is_none() {
                    recur_greater = Some(n);
                }
            }
            LexVerdict::DecidedEqual => {
                if empty.is_none() {
                    empty = Some((n, GeCertificate::Equal));
                }
                if recurring {
                    recur_equal = true;
                }
            }
            LexVerdict::EqualToHorizon { .. } => {
                unreachable!("two eventually periodic sequences always compare decisively")
            }
        }
    }

    let w_status = match empty {
        Some((witness, certificate)) => WStatus::Empty { witness, certificate },
        None => WStatus::DecidedNonempty,
    };
    let limsup_status = if let Some(witness) = recur_greater {
        LimsupStatus::Above { witness, exact: true }
    } else if recur_equal {
        LimsupStatus::EqualsD { exact: true }
    } else {
        LimsupStatus::StrictlyBelow { max_match: recur_match, exact: true }
    };
    // TODO: when the limsup sits strictly below d, wire in the certified
    // positive lower bound on the dimension of W from the cover
    // construction.
    let dim_hint = DimHint::Unknown;

    Ok(BaseClassification {
        beta: beta.clone(),
        alphabet,
        d_structure: DStructure::EventuallyPeriodic { preperiod: pre, period: per },
        d_prefix: Word::new(alphabet, dseq.materialize_prefix(h.min(REPORT_PREFIX))?)?,
        w_status,
        limsup_status,
        dim_hint,
        horizon,
    })
}

/// d known only as a finite prefix: scan every shift of d̄ against it.
/// Digits are exact data, so an excess found here is a certified emptiness
/// witness; everything else is evidence at the stated horizon.
fn classify_truncated(
    beta: &RefinableReal,
    alphabet: Alphabet,
    dw: &Word,
    horizon: u64,
) -> Result<BaseClassification> {
    let digits = dw.digits();
    let l = digits.len();
    let alpha = alphabet.alpha();
    let dbar: Vec<u8> = digits.iter().map(|&x| alpha - x).collect();
    let ms = matching_stats(digits, &dbar);

    let mut first_greater: Option<(u64, u64)> = None;
    let mut last_greater: Option<u64> = None;
    let mut max_match = 0u64;
    let mut last_improvement = 0u64;
    for n in 1..l {
        let t = ms[n];
        if t as u64 > max_match {
            max_match = t as u64;
            last_improvement = n as u64;
        }
        if n + t == l {
            // Ran off the known digits while still matching: unresolved.
            continue;
        }
        if dbar[n + t] > digits[t] {
            if first_greater.is_none() {
                first_greater = Some((n as u64, t as u64 + 1));
            }
            last_greater = Some(n as u64);
        }
    }

    let w_status = match first_greater {
        Some((witness, digit_index)) => WStatus::Empty {
            witness,
            certificate: GeCertificate::GreaterAt { digit_index },
        },
        None => WStatus::NonemptyEvidence { horizon },
    };
    // Evidence-grade limsup reading: recurring excess in the later half of
    // the scan suggests Above; a match maximum still growing there suggests
    // the limsup reaches d; a maximum that froze early suggests it stays
    // below.
    let half = (l / 2) as u64;
    let limsup_status = if let Some(witness) = last_greater.filter(|&n| n >= half) {
        LimsupStatus::Above { witness, exact: false }
    } else if max_match > 0 && last_improvement >= half {
        LimsupStatus::EqualsD { exact: false }
    } else {
        LimsupStatus::StrictlyBelow { max_match, exact: false }
    };

    Ok(BaseClassification {
        beta: beta.clone(),
        alphabet,
        d_structure: DStructure::TruncatedScan { len: l as u64 },
        d_prefix: dw.prefix(REPORT_PREFIX),
        w_status,
        limsup_status,
        dim_hint: DimHint::Unknown,
        horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{IntPoly, Origin};
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn root(coeffs: &[i64], lo: (i64, i64), hi: (i64, i64)) -> RefinableReal {
        let poly = IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect());
        RefinableReal::poly_root(&poly, ratio(lo.0, lo.1), ratio(hi.0, hi.1)).unwrap()
    }

    fn classify(beta: &RefinableReal, alpha: u8, horizon: u64) -> BaseClassification {
        classify_base(beta, Alphabet::new(alpha), horizon, &PrecisionContext::default())
            .unwrap()
    }

    #[test]
    fn golden_base_is_empty_by_recurring_equality() {
        // x² = x + 1: d = (10)^∞ and the shifted reflection repeats d
        // exactly, so the emptiness witness is equality at shift 1.
        let beta = root(&[-1, -1, 1], (1, 1), (2, 1));
        let c = classify(&beta, 1, 64);
        assert_eq!(
            c.w_status,
            WStatus::Empty { witness: 1, certificate: GeCertificate::Equal }
        );
        assert_eq!(c.limsup_status, LimsupStatus::EqualsD { exact: true });
        assert!(matches!(c.d_structure, DStructure::EventuallyPeriodic { .. }));
        assert_eq!(c.d_prefix.digits()[..4], [1, 0, 1, 0]);
    }

    #[test]
    fn tribonacci_base_has_an_uncountable_layer_bounded_away_from_d() {
        // x³ = x² + x + 1: d = (110)^∞, every recurring tail of d̄ matches
        // at most one leading digit of d.
        let beta = root(&[-1, -1, -1, 1], (1, 1), (2, 1));
        let c = classify(&beta, 1, 64);
        assert_eq!(c.w_status, WStatus::DecidedNonempty);
        assert_eq!(
            c.limsup_status,
            LimsupStatus::StrictlyBelow { max_match: 1, exact: true }
        );
        match c.d_structure {
            DStructure::EventuallyPeriodic { preperiod, period } => {
                assert!(preperiod.is_empty());
                assert_eq!(period.digits(), &[1, 1, 0]);
            }
            other => panic!("expected periodic structure, got {other:?}"),
        }
    }

    #[test]
    fn cubic_with_recurring_excess_is_empty_and_above() {
        // x³ = x² + 1: d = (100)^∞ and σ¹(d̄) = (110)^∞ > d recurs forever.
        let beta = root(&[-1, 0, -1, 1], (1, 1), (2, 1));
        let c = classify(&beta, 1, 64);
        assert_eq!(
            c.w_status,
            WStatus::Empty {
                witness: 1,
                certificate: GeCertificate::GreaterAt { digit_index: 2 }
            }
        );
        assert_eq!(c.limsup_status, LimsupStatus::Above { witness: 1, exact: true });
    }

    #[test]
    fn mirror_rule_base_is_decided_critical() {
        let beta = RefinableReal::from_rational(ratio(17_872_316_501, 10_000_000_000))
            .with_origin(Origin::MirrorBase { generator: vec![0], alpha: 1 });
        let c = classify(&beta, 1, 128);
        assert_eq!(c.w_status, WStatus::DecidedNonempty);
        assert_eq!(c.limsup_status, LimsupStatus::EqualsD { exact: true });
        assert_eq!(c.dim_hint, DimHint::ZeroByPMirror);
        assert_eq!(c.d_structure, DStructure::MirrorRule {
            first: Word::new(Alphabet::new(1), vec![1]).unwrap()
        });
        assert_eq!(
            &c.d_prefix.digits()[..15],
            &[1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0]
        );
    }

    #[test]
    fn mirror_pedigree_for_the_wrong_alphabet_falls_back_to_scanning() {
        let beta = RefinableReal::from_rational(ratio(17_872_316_501, 10_000_000_000))
            .with_origin(Origin::MirrorBase { generator: vec![0], alpha: 1 });
        let c = classify(&beta, 2, 48);
        assert!(matches!(c.d_structure, DStructure::TruncatedScan { len: 48 }));
    }

    #[test]
    fn rational_base_below_critical_is_certified_empty() {
        // d(3/2) = 101000001…: the tail of d̄ at shift 1 matches 101 and
        // then exceeds, a certified witness even though d never cycles.
        let beta = RefinableReal::from_rational(ratio(3, 2));
        let c = classify(&beta, 1, 64);
        assert_eq!(
            c.w_status,
            WStatus::Empty {
                witness: 1,
                certificate: GeCertificate::GreaterAt { digit_index: 4 }
            }
        );
        assert!(matches!(c.d_structure, DStructure::TruncatedScan { len: 64 }));
    }

    #[test]
    fn bases_below_the_critical_point_scan_empty() {
        for (n, d) in [(31, 20), (13, 8), (17, 10), (7, 4)] {
            let beta = RefinableReal::from_rational(ratio(n, d));
            let c = classify(&beta, 1, 512);
            assert!(
                matches!(c.w_status, WStatus::Empty { .. }),
                "β = {n}/{d} should have an empty layer, got {:?}",
                c.w_status
            );
        }
    }

    #[test]
    fn integer_like_base_over_a_wider_alphabet_is_empty_by_equality() {
        // β = 2 over {0, 1, 2}: d = (1)^∞ is its own reflection.
        let beta = RefinableReal::from_rational(ratio(2, 1));
        let c = classify(&beta, 2, 32);
        assert_eq!(
            c.w_status,
            WStatus::Empty { witness: 1, certificate: GeCertificate::Equal }
        );
        assert_eq!(c.limsup_status, LimsupStatus::EqualsD { exact: true });
    }
}
