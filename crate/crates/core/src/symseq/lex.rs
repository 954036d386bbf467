//! Lexicographic comparison of infinite sequences.

use super::seq::SymbolicSequence;
use crate::Result;
use num_integer::Integer;

/// Outcome of comparing two infinite sequences digit by digit.
///
/// `witness` is the 1-based index of the first differing digit. Equality is
/// only ever *decided* when both sequences expose exact eventually periodic
/// structure; otherwise agreement up to the scan horizon is reported as such
/// and the caller chooses how to interpret it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexVerdict {
    Less { witness: u64 },
    Greater { witness: u64 },
    DecidedEqual,
    EqualToHorizon { checked: u64 },
}

impl LexVerdict {
    pub fn is_less(&self) -> bool {
        matches!(self, LexVerdict::Less { .. })
    }

    pub fn is_greater(&self) -> bool {
        matches!(self, LexVerdict::Greater { .. })
    }

    /// First index where the sequences differ, when one was found.
    pub fn witness(&self) -> Option<u64> {
        match self {
            LexVerdict::Less { witness } | LexVerdict::Greater { witness } => Some(*witness),
            _ => None,
        }
    }
}

/// Compare `a` and `b` lexicographically, scanning at most `horizon` digits.
///
/// When both sequences are exactly eventually periodic the comparison is
/// decided outright: two such sequences that agree on
/// |pre_a| + |pre_b| + 2·lcm(|per_a|, |per_b|) digits are equal, so the scan
/// is capped at that bound (the horizon is ignored) and full agreement
/// returns `DecidedEqual`.
pub fn lex_compare(a: &SymbolicSequence, b: &SymbolicSequence, horizon: u64) -> Result<LexVerdict> {
    let decisive = match (a.as_eventually_periodic(), b.as_eventually_periodic()) {
        (Some((pre_a, per_a)), Some((pre_b, per_b))) => {
            let bound = pre_a.len() as u64
                + pre_b.len() as u64
                + 2 * (per_a.len() as u64).lcm(&(per_b.len() as u64));
            Some(bound)
        }
        _ => None,
    };
    let limit = decisive.unwrap_or(horizon);

    // Scan prefixes of geometrically growing length so structural backends
    // materialize in bulk; total work stays linear in the decided witness.
    let mut done: usize = 0;
    let mut cap: u64 = 256;
    while (done as u64) < limit {
        let take = cap.min(limit) as usize;
        let xs = a.materialize_prefix(take)?;
        let ys = b.materialize_prefix(take)?;
        for i in done..take {
            if xs[i] != ys[i] {
                let witness = i as u64 + 1;
                return Ok(if xs[i] < ys[i] {
                    LexVerdict::Less { witness }
                } else {
                    LexVerdict::Greater { witness }
                });
            }
        }
        done = take;
        cap = cap.saturating_mul(2);
    }
    Ok(if decisive.is_some() {
        LexVerdict::DecidedEqual
    } else {
        LexVerdict::EqualToHorizon { checked: limit }
    })
}
