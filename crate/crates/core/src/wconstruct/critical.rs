//! The layered cut construction for expansions with unbounded recurrence.
//!
//! When tails of the reflected sequence d̄ match prefixes of d of
//! arbitrary length (as they do for the mirror-doubling expansions), the
//! bounded-recurrence construction has no maximal recurring length to work
//! with. The cuts are instead placed layer by layer: layer l_k is a match
//! length to beat, n_k is the first shift whose match reaches it, the cut
//! m_k lands one step past the point where that match breaks, and the next
//! layer jumps past every match seen up to m_k. Each step therefore
//! certifies that no earlier shift matches as long as the one it cut at,
//! which is what keeps the assembled sequence strictly below d everywhere.
//!
//! Match lengths are read off a digit window that grows geometrically on
//! demand. Every fact used (a match of length t, its breaking digit, the
//! absence of longer matches below a bound) is a statement about finitely
//! many digits and is certified inside the window before use; the digit
//! budget of the owning [`MSequence`] caps the total work.

use super::msequence::{
    CriticalStep, MSequence, Provenance, ReadBudget, StepDetail, TermDriver, TermOut,
};
use crate::symseq::{matching_stats, SymbolicSequence};
use crate::univoque::DExpansion;
use crate::{Error, Result};

const INITIAL_WINDOW: usize = 4096;

/// Build `count` cuts of the layered construction.
///
/// Eventually periodic expansions are rejected outright: their match
/// lengths are bounded, so the layers would stop finding shifts. A
/// certified prefix is used as a fixed window and fails with
/// [`Error::HorizonExhausted`] once a layer needs digits past its end;
/// exact aperiodic structure extends the window as needed, subject to the
/// digit budget.
pub fn build_m0_critical(d: &DExpansion, count: usize) -> Result<MSequence> {
    if count == 0 {
        return Err(Error::InvalidInput("at least one cut must be requested".to_string()));
    }
    let source = match d {
        DExpansion::Exact(seq) => {
            if seq.as_eventually_periodic().is_some() {
                return Err(Error::HypothesisFailed(
                    "an eventually periodic expansion has bounded match lengths; \
                     the layered construction needs matches of unbounded length"
                        .to_string(),
                ));
            }
            WindowSource::Extensible(seq.clone())
        }
        DExpansion::Prefix(word) => WindowSource::Fixed(word.digits().to_vec()),
    };
    let driver = CriticalDriver {
        source,
        alpha: d.alphabet().alpha(),
        window: Vec::new(),
        wbar: Vec::new(),
        ms: Vec::new(),
        l: 1,
        last_m: 0,
        emitted: 0,
        count,
    };
    Ok(MSequence::from_driver(d.clone(), Provenance::CriticalCase, Box::new(driver), true))
}

enum WindowSource {
    Extensible(SymbolicSequence),
    Fixed(Vec<u8>),
}

struct CriticalDriver {
    source: WindowSource,
    alpha: u8,
    window: Vec<u8>,
    wbar: Vec<u8>,
    /// ms[n] = digits of d matched by d̄ from position n, as far as the
    /// window shows; exact whenever the match breaks inside the window.
    ms: Vec<usize>,
    /// Current layer l_k (l₁ = 1).
    l: u64,
    last_m: u64,
    emitted: usize,
    count: usize,
}

impl CriticalDriver {
    /// Make at least `want` digits visible and rebuild the match table.
    /// Growth is geometric, so total rebuild cost stays linear in the final
    /// window; both the digits and the table rebuild are charged.
    fn ensure(&mut self, want: usize, budget: &mut ReadBudget) -> Result<()> {
        if !self.window.is_empty() && want <= self.window.len() {
            return Ok(());
        }
        let new_window = match &self.source {
            WindowSource::Fixed(digits) => {
                if self.window.is_empty() && want <= digits.len() {
                    budget.charge(2 * digits.len() as u64, "while building the match window")?;
                    digits.clone()
                } else {
                    return Err(Error::HorizonExhausted {
                        steps: digits.len() as u64,
                        context: format!(
                            "the construction needs {want} digits but the certified \
                             prefix ends at {}",
                            digits.len()
                        ),
                    });
                }
            }
            WindowSource::Extensible(seq) => {
                let new_len = want
                    .next_power_of_two()
                    .max(INITIAL_WINDOW)
                    .max(self.window.len().saturating_mul(4));
                budget.charge(2 * new_len as u64, "while growing the match window")?;
                seq.materialize_prefix(new_len)?
            }
        };
        self.window = new_window;
        self.wbar = self.window.iter().map(|&x| self.alpha - x).collect();
        self.ms = matching_stats(&self.window, &self.wbar);
        Ok(())
    }

    fn grow(&mut self, budget: &mut ReadBudget) -> Result<()> {
        let want = self.window.len() + 1;
        self.ensure(want, budget)
    }

    /// l_{k+1} = 1 + max{t_n : n ≤ m_k}: the next layer beats every match
    /// seen up to the previous cut. Each of those matches must break
    /// inside the window for its length to be exact.
    fn advance_layer(&mut self, budget: &mut ReadBudget) -> Result<()> {
        let bound = usize::try_from(self.last_m)
            .map_err(|_| Error::InvalidInput("cut length exceeds addressable memory".to_string()))?;
        loop {
            self.ensure(bound + 1, budget)?;
            match (0..=bound).find(|&n| n + self.ms[n] >= self.window.len()) {
                Some(_) => self.grow(budget)?,
                None => break,
            }
        }
        let best = (0..=bound).map(|n| self.ms[n]).max();
        self.l = best.unwrap_or(0) as u64 + 1;
        Ok(())
    }
}

impl TermDriver for CriticalDriver {
    fn next_term(&mut self, budget: &mut ReadBudget) -> Result<Option<TermOut>> {
        if self.emitted == self.count {
            return Ok(None);
        }
        self.ensure(1, budget)?;
        if self.emitted > 0 {
            self.advance_layer(budget)?;
        }
        let l = usize::try_from(self.l)
            .map_err(|_| Error::InvalidInput("layer exceeds addressable memory".to_string()))?;

        // n_k: first shift whose match reaches the layer. Ruling a shift
        // out needs l digits in view from it; confirming one needs only the
        // matched digits, which the table already certifies.
        let mut n = 0usize;
        loop {
            self.ensure(n + l, budget)?;
            if self.ms[n] >= l {
                break;
            }
            n += 1;
        }
        // The cut sits where this match breaks, so the break must be
        // visible.
        while n + self.ms[n] >= self.window.len() {
            self.grow(budget)?;
        }
        let t = self.ms[n];
        if self.wbar[n + t] > self.window[t] {
            return Err(Error::HypothesisFailed(format!(
                "the reflected tail at shift {n} exceeds the expansion at digit {}",
                t + 1
            )));
        }

        let n64 = n as u64;
        let m = n64 + t as u64 + 1;
        if self.emitted > 0 && n64 <= self.last_m {
            // The construction guarantees each layer's shift clears the
            // previous cut; a violation means the input is not what the
            // layered recursion is for.
            return Err(Error::HypothesisFailed(format!(
                "layer {} matched at shift {n}, at or before the previous cut {}",
                self.l, self.last_m
            )));
        }
        let step = CriticalStep { l: self.l, n: n64, m };
        self.last_m = m;
        self.emitted += 1;
        Ok(Some(TermOut { m, detail: StepDetail::Critical(step) }))
    }
}
