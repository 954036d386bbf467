//! The bounded-recurrence cut construction.
//!
//! Let d be the expansion of 1 and d̄ its digit reflection. When every tail
//! of d̄ stays strictly below d, the prefixes of d that occur inside d̄ have
//! a maximal infinitely recurring length k₀ and a maximal overall length
//! l₀. Cuts are placed one position past each recurrence of d₁⋯d_{k₀},
//! starting beyond a floor that clears every longer, finite match. The
//! concatenation ω(M) of the decremented prefixes at these cuts is then a
//! unique expansion whose shifted tails approach d, which is exactly the
//! univoque-but-not-strongly-univoque behaviour the construction exists to
//! produce.
//!
//! For exact eventually periodic d the recurrence structure is computed
//! outright from the finitely many tail classes. Anything else is analysed
//! on a finite window: the estimates are heuristic, so the assembled
//! sequence is re-checked by the membership scan before it is returned.

use super::msequence::{
    KeyStep, MSequence, Provenance, ReadBudget, StepDetail, TermDriver, TermOut,
};
use super::omega::omega_of_m;
use crate::symseq::{lex_compare, matching_stats, LexVerdict, SymbolicSequence};
use crate::univoque::{in_u, DExpansion};
use crate::{Error, Result};

/// Build the cut sequence of the bounded-recurrence construction.
///
/// `horizon` bounds the analysis window when d has no eventually periodic
/// structure; it is ignored when the recurrence constants can be computed
/// exactly. Fails with [`Error::HypothesisFailed`] when some tail of d̄
/// reaches or exceeds d (the construction's premise), and with
/// [`Error::HorizonExhausted`] when a window is too short to certify the
/// estimates.
pub fn build_m0_key(d: &DExpansion, horizon: usize) -> Result<MSequence> {
    match d {
        DExpansion::Exact(seq) => {
            if seq.as_pmirror_first().is_some() {
                return Err(Error::HypothesisFailed(
                    "the reflected sequence matches arbitrarily long prefixes of a \
                     mirror-doubling expansion; no bounded recurrence length exists"
                        .to_string(),
                ));
            }
            if seq.as_eventually_periodic().is_some() {
                return build_exact(d, seq);
            }
            let digits = seq.materialize_prefix(horizon)?;
            build_windowed(d, digits)
        }
        DExpansion::Prefix(word) => {
            let take = horizon.min(word.len());
            build_windowed(d, word.digits()[..take].to_vec())
        }
    }
}

/// Exact path: d eventually periodic with preperiod a and period q. The
/// match lengths t_n = |lcp(σⁿ(d̄), d)| take finitely many values, one per
/// tail class n ∈ [0, a + q), and every class is decided outright.
fn build_exact(d: &DExpansion, seq: &SymbolicSequence) -> Result<MSequence> {
    let (pre, per) = seq.as_eventually_periodic().expect("caller checked periodicity");
    let a = pre.len() as u64;
    let q = per.len() as u64;
    let dbar = seq.reflect();

    let mut t: Vec<u64> = Vec::with_capacity((a + q) as usize);
    for n in 0..a + q {
        match lex_compare(&dbar.shift(n), seq, 0)? {
            LexVerdict::Less { witness } => t.push(witness - 1),
            LexVerdict::Greater { witness } => {
                return Err(Error::HypothesisFailed(format!(
                    "the reflected tail at shift {n} exceeds the expansion at digit \
                     {witness}; no tail of the reflection may reach the expansion"
                )));
            }
            LexVerdict::DecidedEqual => {
                return Err(Error::HypothesisFailed(format!(
                    "the reflected tail at shift {n} equals the expansion itself"
                )));
            }
            LexVerdict::EqualToHorizon { .. } => {
                // Two eventually periodic sequences always compare outright.
                return Err(Error::HypothesisFailed(
                    "comparison of periodic structure was left undecided".to_string(),
                ));
            }
        }
    }

    // Shifts inside the period recur forever; their maximal match length is
    // the recurring length k₀. Longer matches can only sit in the
    // preperiod, and the floor m₀ clears every one of them.
    let k0 = t[a as usize..].iter().copied().max().unwrap_or(0);
    let l0 = t.iter().copied().max().unwrap_or(0);
    let m0 = t
        .iter()
        .enumerate()
        .filter(|&(_, &tn)| tn > k0)
        .map(|(n, &tn)| n as u64 + tn)
        .max()
        .unwrap_or(0);

    let driver = ExactKeyDriver { t, a, q, k0, last_m: m0 };
    Ok(MSequence::from_driver(
        d.clone(),
        Provenance::KeyConstruction { k0: k0 as usize, l0: l0 as usize, m0 },
        Box::new(driver),
        true,
    ))
}

/// Streams cuts from the exact class table: the next recurrence of
/// d₁⋯d_{k₀} strictly past the previous cut, then one step further.
struct ExactKeyDriver {
    /// Match lengths per tail class, preperiod classes first.
    t: Vec<u64>,
    a: u64,
    q: u64,
    k0: u64,
    last_m: u64,
}

impl ExactKeyDriver {
    fn t_class(&self, n: u64) -> u64 {
        if n < self.a {
            self.t[n as usize]
        } else {
            self.t[(self.a + (n - self.a) % self.q) as usize]
        }
    }
}

impl TermDriver for ExactKeyDriver {
    fn next_term(&mut self, budget: &mut ReadBudget) -> Result<Option<TermOut>> {
        let n = if self.k0 == 0 {
            budget.charge(1, "while placing a cut")?;
            self.last_m + 1
        } else {
            // k₀ is attained by a recurring class, so the scan ends within
            // one full period once it leaves the preperiod.
            let limit = self.last_m + self.a + 2 * self.q + 2;
            let mut n = self.last_m + 1;
            loop {
                budget.charge(1, "while searching for the next recurrence")?;
                if self.t_class(n) >= self.k0 {
                    break;
                }
                n += 1;
                if n > limit {
                    return Err(Error::HypothesisFailed(
                        "no recurrence within a full period; the class table is inconsistent"
                            .to_string(),
                    ));
                }
            }
            n
        };
        let m = n + self.k0 + 1;
        self.last_m = m;
        Ok(Some(TermOut { m, detail: StepDetail::Key(KeyStep { n, m }) }))
    }
}

/// Windowed path: estimate the recurrence constants from the first `len`
/// digits, place every cut the window supports, and verify the assembled
/// sequence against the membership conditions before accepting it.
fn build_windowed(d: &DExpansion, digits: Vec<u8>) -> Result<MSequence> {
    let len = digits.len();
    if len < 16 {
        return Err(Error::InvalidInput(
            "the analysis window is too short to estimate recurrence structure".to_string(),
        ));
    }
    let alpha = d.alphabet().alpha();
    let dbar: Vec<u8> = digits.iter().map(|&x| alpha - x).collect();
    // ms[n] = length of the longest common prefix of d̄_{n+1}d̄_{n+2}… and d,
    // as far as the window shows it.
    let ms = matching_stats(&digits, &dbar);
    let resolved = |n: usize| n + ms[n] < len;

    // A mismatch inside the window is exact data; one in the wrong
    // direction refutes the construction's premise outright.
    for n in 0..len {
        if resolved(n) && dbar[n + ms[n]] > digits[ms[n]] {
            return Err(Error::HypothesisFailed(format!(
                "the reflected tail at shift {n} exceeds the expansion at digit {}",
                ms[n] + 1
            )));
        }
    }

    // Estimates: matches still alive in the tail half stand in for the
    // infinitely recurring ones. The verification pass below is what makes
    // the construction trustworthy, not these choices.
    let mut k0 = 0usize;
    for n in len / 2..len {
        if resolved(n) {
            k0 = k0.max(ms[n]);
        }
    }
    let l0 = ms.iter().copied().max().unwrap_or(0);
    let m0 = (0..len).filter(|&n| ms[n] > k0).map(|n| n + ms[n]).max().unwrap_or(0);

    let mut steps: Vec<KeyStep> = Vec::new();
    let mut last_m = m0 as u64;
    loop {
        let n = if k0 == 0 {
            last_m as usize + 1
        } else {
            let mut n = last_m as usize + 1;
            loop {
                if n + k0 > len {
                    break usize::MAX;
                }
                if ms[n] >= k0 {
                    break n;
                }
                n += 1;
            }
        };
        if n == usize::MAX {
            break;
        }
        let m = (n + k0 + 1) as u64;
        if m > len as u64 {
            break;
        }
        steps.push(KeyStep { n: n as u64, m });
        last_m = m;
    }
    if steps.len() < 2 {
        return Err(Error::HorizonExhausted {
            steps: len as u64,
            context: "the analysis window yields too few cuts to verify the construction"
                .to_string(),
        });
    }

    let count = steps.len();
    let mseq = MSequence::from_driver(
        d.clone(),
        Provenance::KeyConstruction { k0, l0, m0: m0 as u64 },
        Box::new(ReplayDriver { steps, idx: 0 }),
        true,
    );

    // Mandatory verification: materialize every cut (this also enforces
    // d-positivity) and run the membership scan over the assembled
    // sequence. A certified violation means the window misread the
    // recurrence structure and the whole construction is rejected.
    let total = mseq.partial_sum(count)?;
    let omega = omega_of_m(&mseq)?;
    let h = (len as u64 / 3).min(total / 2);
    if h < 8 {
        return Err(Error::HorizonExhausted {
            steps: len as u64,
            context: "the analysis window is too short to verify the construction".to_string(),
        });
    }
    let verdict = in_u(&omega, d, h)?;
    if verdict.is_out() {
        return Err(Error::HypothesisFailed(format!(
            "the assembled sequence fails the membership conditions ({verdict:?}); \
             the analysis window misread the recurrence structure"
        )));
    }
    Ok(mseq)
}

/// Replays cuts fixed at construction time.
struct ReplayDriver {
    steps: Vec<KeyStep>,
    idx: usize,
}

impl TermDriver for ReplayDriver {
    fn next_term(&mut self, _budget: &mut ReadBudget) -> Result<Option<TermOut>> {
        let Some(step) = self.steps.get(self.idx).copied() else {
            return Ok(None);
        };
        self.idx += 1;
        Ok(Some(TermOut { m: step.m, detail: StepDetail::Key(step) }))
    }
}
