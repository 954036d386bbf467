//! The two-sided lexicographic membership tests.

use super::DExpansion;
use crate::symseq::{lex_compare, matching_stats, LexVerdict, SymbolicSequence};
use crate::{Error, Result};

/// Which of the two tail conditions a certificate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailedCondition {
    /// σⁿ(ω) ≥ d.
    Direct,
    /// σⁿ(ω̄) ≥ d.
    Reflected,
}

/// How a tail was certified to reach d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeCertificate {
    /// The tail agrees with d before `digit_index` (1-based within the
    /// tail) and exceeds it there.
    GreaterAt { digit_index: u64 },
    /// The tail equals d, decided from exact structure.
    Equal,
}

/// Three-valued outcome of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MembershipVerdict {
    /// Every required tail of ω and of its reflection is certified strictly
    /// below d.
    CertifiedIn,
    /// A concrete violation: the tail of the stated side at `shift` reaches
    /// d.
    CertifiedOut { shift: u64, condition: FailedCondition, certificate: GeCertificate },
    /// No violation was found, but the structure did not allow a conclusion
    /// for all shifts. `first_unresolved` is the first shift whose
    /// comparison could not be decided within the window; `None` means
    /// every scanned shift was certified strictly below d and only shifts
    /// beyond the horizon remain open.
    UndecidedToHorizon { horizon: u64, first_unresolved: Option<u64> },
}

impl MembershipVerdict {
    pub fn is_in(&self) -> bool {
        matches!(self, MembershipVerdict::CertifiedIn)
    }

    pub fn is_out(&self) -> bool {
        matches!(self, MembershipVerdict::CertifiedOut { .. })
    }
}

/// Is ω the unique expansion of its value in the base whose quasi-greedy
/// expansion of 1 is d? Tests σⁿ(ω) < d and σⁿ(ω̄) < d for all n ≥ 0.
///
/// Exact whenever ω is eventually periodic and d is exact (both sides then
/// reduce to finitely many tail classes); exact structural equality with a
/// mirror-rule d is also recognized. Everything else is scanned to the
/// horizon.
pub fn in_u(omega: &SymbolicSequence, d: &DExpansion, horizon: u64) -> Result<MembershipVerdict> {
    membership(omega, d, horizon, 0, 0)
}

/// The relaxed membership test that forgives a leading run.
///
/// The direct condition σⁿ(ω) < d is required only from m⁺, the first
/// 1-based index with ω_{m⁺} < α, and the reflected condition σⁿ(ω̄) < d
/// only from m⁻, the first index with ω_{m⁻} > 0. This admits sequences
/// that begin with a maximal run of α's or of 0's which the full test
/// rejects on that run alone; on sequences with ω₁ ∉ {0, α} it agrees with
/// [`in_u`].
///
/// The constant sequences 0^∞ and α^∞ have no qualifying indices at all and
/// are rejected with [`Error::DegenerateSequence`]; for sequences without
/// exact structure the search for the indices gives up at the horizon with
/// the same error.
pub fn in_u_prime(
    omega: &SymbolicSequence,
    d: &DExpansion,
    horizon: u64,
) -> Result<MembershipVerdict> {
    let (m_plus, m_minus) = leading_run_thresholds(omega, horizon)?;
    membership(omega, d, horizon, m_plus, m_minus)
}

/// (m⁺, m⁻): the first 1-based index with a digit < α, and the first with a
/// digit > 0. Exact for eventually periodic sequences, horizon-limited
/// otherwise.
fn leading_run_thresholds(omega: &SymbolicSequence, horizon: u64) -> Result<(u64, u64)> {
    let alpha = omega.alphabet().alpha();
    let find = |digits: &[u8]| {
        let plus = digits.iter().position(|&x| x < alpha);
        let minus = digits.iter().position(|&x| x > 0);
        (plus, minus)
    };
    if let Some((pre, per)) = omega.as_eventually_periodic() {
        // A qualifying digit occurs iff it occurs within pre · per.
        let digits: Vec<u8> = pre.digits().iter().chain(per.digits()).copied().collect();
        if let (Some(p), Some(m)) = find(&digits) {
            return Ok((p as u64 + 1, m as u64 + 1));
        }
        return Err(Error::DegenerateSequence(
            "a constant sequence of 0's or α's has no relaxed membership test".to_string(),
        ));
    }
    let h = usize::try_from(horizon).unwrap_or(usize::MAX);
    let mut cap = 64usize.min(h).max(1);
    loop {
        let digits = omega.materialize_prefix(cap.min(h))?;
        if let (Some(p), Some(m)) = find(&digits) {
            return Ok((p as u64 + 1, m as u64 + 1));
        }
        if cap >= h {
            return Err(Error::DegenerateSequence(format!(
                "no digit below α, or none above 0, within the first {h} digits"
            )));
        }
        cap *= 2;
    }
}

/// Shared engine: σⁿ(ω) < d for n ≥ start_direct and σⁿ(ω̄) < d for
/// n ≥ start_reflected.
fn membership(
    omega: &SymbolicSequence,
    d: &DExpansion,
    horizon: u64,
    start_direct: u64,
    start_reflected: u64,
) -> Result<MembershipVerdict> {
    if omega.alphabet() != d.alphabet() {
        return Err(Error::InvalidInput(
            "sequence and expansion of 1 use different alphabets".to_string(),
        ));
    }

    // Structural equality with a mirror-rule d: lexicographic scanning can
    // never decide equality of two aperiodic sequences, but identical first
    // blocks make them the same sequence.
    if let Some(dseq) = d.as_sequence() {
        if let Some(first) = dseq.as_pmirror_first() {
            if start_direct == 0 && omega.as_pmirror_first().as_ref() == Some(&first) {
                return Ok(out(0, FailedCondition::Direct, GeCertificate::Equal));
            }
            if start_reflected == 0
                && omega.reflect().as_pmirror_first().as_ref() == Some(&first)
            {
                return Ok(out(0, FailedCondition::Reflected, GeCertificate::Equal));
            }
        }
        if let Some((pre, per)) = omega.as_eventually_periodic() {
            return exact_ep(
                omega,
                pre.len() as u64,
                per.len() as u64,
                dseq,
                horizon,
                start_direct,
                start_reflected,
            );
        }
    }
    scan_membership(omega, d, horizon, start_direct, start_reflected)
}

fn out(shift: u64, condition: FailedCondition, certificate: GeCertificate) -> MembershipVerdict {
    MembershipVerdict::CertifiedOut { shift, condition, certificate }
}

/// ω eventually periodic with preperiod a and period q: the tails σⁿ(ω) for
/// n ≥ start are exactly the tails at n ∈ [start, start + a + q), so each
/// universally quantified condition reduces to finitely many comparisons.
/// Each comparison is decided outright against an eventually periodic d and
/// decided-or-horizon-reported against other exact structure.
fn exact_ep(
    omega: &SymbolicSequence,
    a: u64,
    q: u64,
    dseq: &SymbolicSequence,
    horizon: u64,
    start_direct: u64,
    start_reflected: u64,
) -> Result<MembershipVerdict> {
    let mut first_unresolved: Option<u64> = None;
    let sides = [
        (FailedCondition::Direct, omega.clone(), start_direct),
        (FailedCondition::Reflected, omega.reflect(), start_reflected),
    ];
    for (condition, seq, start) in sides {
        for n in start..start + a + q {
            match lex_compare(&seq.shift(n), dseq, horizon)? {
                LexVerdict::Less { .. } => {}
                LexVerdict::Greater { witness } => {
                    return Ok(out(
                        n,
                        condition,
                        GeCertificate::GreaterAt { digit_index: witness },
                    ));
                }
                LexVerdict::DecidedEqual => {
                    return Ok(out(n, condition, GeCertificate::Equal));
                }
                LexVerdict::EqualToHorizon { .. } => {
                    if first_unresolved.is_none() {
                        first_unresolved = Some(n);
                    }
                }
            }
        }
    }
    Ok(match first_unresolved {
        None => MembershipVerdict::CertifiedIn,
        Some(_) => MembershipVerdict::UndecidedToHorizon { horizon, first_unresolved },
    })
}

/// Windowed scan for sequences without usable exact structure. Every shift
/// n < horizon is compared against the first W digits of d; a mismatch
/// within the window decides that shift exactly (digits are exact data),
/// while a tail matching the whole window stays unresolved. The scan can
/// therefore certify failure, but never membership.
fn scan_membership(
    omega: &SymbolicSequence,
    d: &DExpansion,
    horizon: u64,
    start_direct: u64,
    start_reflected: u64,
) -> Result<MembershipVerdict> {
    let h = usize::try_from(horizon)
        .map_err(|_| Error::InvalidInput("horizon exceeds addressable memory".to_string()))?;
    let w = d.window(h);
    let dpre = d.prefix_digits(w)?;
    let text = omega.materialize_prefix(h + w)?;
    let alpha = omega.alphabet().alpha();
    let reflected: Vec<u8> = text.iter().map(|&x| alpha - x).collect();

    let mut first_unresolved: Option<u64> = None;
    let sides = [
        (FailedCondition::Direct, &text, start_direct),
        (FailedCondition::Reflected, &reflected, start_reflected),
    ];
    for (condition, side, start) in sides {
        let ms = matching_stats(&dpre, side);
        let start = usize::try_from(start).unwrap_or(usize::MAX);
        for n in start..h {
            let t = ms[n];
            if t == w {
                // The whole window matched; this shift cannot be decided.
                if first_unresolved.is_none() {
                    first_unresolved = Some(n as u64);
                }
                continue;
            }
            // Positions n < h always have the full window in range, so a
            // match shorter than the window pinpoints a mismatched digit.
            if side[n + t] > dpre[t] {
                return Ok(out(
                    n as u64,
                    condition,
                    GeCertificate::GreaterAt { digit_index: t as u64 + 1 },
                ));
            }
        }
    }
    Ok(MembershipVerdict::UndecidedToHorizon { horizon, first_unresolved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symseq::{parse_sequence, Alphabet, Word};

    fn seq(text: &str) -> SymbolicSequence {
        parse_sequence(text).unwrap()
    }

    fn tribonacci_d() -> DExpansion {
        DExpansion::Exact(seq("alpha=1; seq=(110)^inf"))
    }

    #[test]
    fn interior_periodic_point_is_certified_in() {
        let omega = seq("alpha=1; seq=(10)^inf");
        let v = in_u(&omega, &tribonacci_d(), 100).unwrap();
        assert_eq!(v, MembershipVerdict::CertifiedIn);
        // The relaxed test agrees on sequences that start inside the
        // alphabet's interior.
        let v = in_u_prime(&omega, &tribonacci_d(), 100).unwrap();
        assert_eq!(v, MembershipVerdict::CertifiedIn);
    }

    #[test]
    fn the_expansion_of_one_itself_fails_at_shift_zero() {
        let omega = seq("alpha=1; seq=(110)^inf");
        let v = in_u(&omega, &tribonacci_d(), 100).unwrap();
        assert_eq!(
            v,
            MembershipVerdict::CertifiedOut {
                shift: 0,
                condition: FailedCondition::Direct,
                certificate: GeCertificate::Equal,
            }
        );
    }

    #[test]
    fn the_zero_sequence_fails_on_the_reflected_side() {
        let omega = seq("alpha=1; seq=(0)^inf");
        let v = in_u(&omega, &tribonacci_d(), 100).unwrap();
        // The reflection is 1^∞, which first exceeds (110)^∞ at digit 3.
        assert_eq!(
            v,
            MembershipVerdict::CertifiedOut {
                shift: 0,
                condition: FailedCondition::Reflected,
                certificate: GeCertificate::GreaterAt { digit_index: 3 },
            }
        );
    }

    #[test]
    fn relaxed_test_forgives_a_leading_alpha_run() {
        // 1111(10)^∞ fails the full test on its leading run, but every tail
        // from the first sub-α digit on stays strictly below (110)^∞.
        let omega = seq("alpha=1; seq=1111(10)^inf");
        let full = in_u(&omega, &tribonacci_d(), 100).unwrap();
        assert_eq!(
            full,
            MembershipVerdict::CertifiedOut {
                shift: 0,
                condition: FailedCondition::Direct,
                certificate: GeCertificate::GreaterAt { digit_index: 3 },
            }
        );
        let relaxed = in_u_prime(&omega, &tribonacci_d(), 100).unwrap();
        assert_eq!(relaxed, MembershipVerdict::CertifiedIn);
    }

    #[test]
    fn reflection_swaps_the_failing_side() {
        let omega = seq("alpha=1; seq=1111(10)^inf");
        let direct = in_u(&omega, &tribonacci_d(), 100).unwrap();
        let mirrored = in_u(&omega.reflect(), &tribonacci_d(), 100).unwrap();
        match (direct, mirrored) {
            (
                MembershipVerdict::CertifiedOut { shift: s1, condition: c1, certificate: g1 },
                MembershipVerdict::CertifiedOut { shift: s2, condition: c2, certificate: g2 },
            ) => {
                assert_eq!(s1, s2);
                assert_eq!(g1, g2);
                assert_eq!(c1, FailedCondition::Direct);
                assert_eq!(c2, FailedCondition::Reflected);
            }
            other => panic!("expected symmetric failures, got {other:?}"),
        }
    }

    #[test]
    fn constant_sequences_have_no_relaxed_test() {
        for text in ["alpha=1; seq=(0)^inf", "alpha=1; seq=(1)^inf"] {
            let omega = seq(text);
            let err = in_u_prime(&omega, &tribonacci_d(), 100).unwrap_err();
            assert!(matches!(err, Error::DegenerateSequence(_)), "got {err:?}");
        }
    }

    #[test]
    fn mirror_rule_expansion_equals_itself() {
        let d = seq("alpha=1; seq=pmirror(0)");
        let v = in_u(&d, &DExpansion::Exact(d.clone()), 64).unwrap();
        assert_eq!(
            v,
            MembershipVerdict::CertifiedOut {
                shift: 0,
                condition: FailedCondition::Direct,
                certificate: GeCertificate::Equal,
            }
        );
        // Its reflection is caught on the other side.
        let v = in_u(&d.reflect(), &DExpansion::Exact(d.clone()), 64).unwrap();
        assert_eq!(
            v,
            MembershipVerdict::CertifiedOut {
                shift: 0,
                condition: FailedCondition::Reflected,
                certificate: GeCertificate::Equal,
            }
        );
    }

    #[test]
    fn periodic_point_against_the_mirror_rule_is_decided() {
        // All tail classes of (10)^∞ and its reflection mismatch the
        // mirror-doubling expansion early, so the verdict is exact even
        // though d is aperiodic.
        let d = DExpansion::Exact(seq("alpha=1; seq=pmirror(0)"));
        let omega = seq("alpha=1; seq=(10)^inf");
        assert_eq!(in_u(&omega, &d, 4096).unwrap(), MembershipVerdict::CertifiedIn);
    }

    #[test]
    fn scan_certifies_every_checked_shift_without_overclaiming() {
        // The mirror-doubling sequence for the smallest two-digit critical
        // base stays below (110)^∞ at every shift; the scan certifies each
        // checked shift but honestly refuses the universal claim.
        let omega = seq("alpha=1; seq=pmirror(0)");
        let v = in_u(&omega, &tribonacci_d(), 500).unwrap();
        assert_eq!(
            v,
            MembershipVerdict::UndecidedToHorizon { horizon: 500, first_unresolved: None }
        );
    }

    #[test]
    fn scan_reports_a_certified_failure_with_its_witness() {
        // Insert a window that exceeds d into an otherwise harmless
        // aperiodic sequence: the scan must find and certify it.
        let d = DExpansion::Prefix(
            Word::new(Alphabet::new(1), vec![1, 1, 0, 1, 1, 0, 1, 0, 1]).unwrap(),
        );
        let omega = seq("alpha=1; seq=01111(10)^inf");
        let v = in_u(&omega, &d, 64);
        // ω is eventually periodic but d is a bare prefix, so this exercises
        // the scan path.
        assert_eq!(
            v.unwrap(),
            MembershipVerdict::CertifiedOut {
                shift: 1,
                condition: FailedCondition::Direct,
                certificate: GeCertificate::GreaterAt { digit_index: 3 },
            }
        );
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let omega = seq("alpha=2; seq=(10)^inf");
        let err = in_u(&omega, &tribonacci_d(), 10).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
