//! Cut sequences M = (m_k), the raw material for the decremented-prefix
//! concatenations ω(M) = ∏_k d₁⋯d_{m_k}⁻.
//!
//! A cut sequence is lazy: terms come from a driver (a manual list, or one
//! of the two recursions in [`key`](super::key) and
//! [`critical`](super::critical)) and are memoized as they materialize.
//! Every materialized term is checked against the base expansion: the digit
//! d_{m_k} must be positive, or the decrement that ω(M) performs at the
//! block boundary would fall outside the alphabet.

use crate::univoque::DExpansion;
use crate::{Error, Result};
use std::sync::{Arc, Mutex};

/// How the terms of a cut sequence were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// The bounded-match recursion: prefixes of the base expansion d recur
    /// in the reflected sequence d̄ with a maximal recurring length k₀, and
    /// each cut lands one position past such a recurrence. Carries the
    /// computed constants: the longest match length `l0` seen anywhere, and
    /// the floor `m0` above which the recurrence searches start.
    KeyConstruction { k0: usize, l0: usize, m0: u64 },
    /// The layered recursion for bases whose reflected sequence matches
    /// arbitrarily long prefixes of d: each cut is placed where a match of
    /// length l_k first fails, and l_{k+1} jumps past every match seen so
    /// far.
    CriticalCase,
    /// Terms supplied directly by the caller, or selected from another cut
    /// sequence.
    Manual,
}

/// One step of the bounded-match recursion: the match position n_k and the
/// cut m_k = n_k + k₀ + 1 placed just past it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyStep {
    pub n: u64,
    pub m: u64,
}

/// One step of the layered recursion: the layer l_k, the first position n_k
/// where the reflected sequence matches d to length ≥ l_k, and the cut m_k
/// at the first strict dominance past it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalStep {
    pub l: u64,
    pub n: u64,
    pub m: u64,
}

/// Per-term detail recorded by the drivers that have one.
#[derive(Debug, Clone, Copy)]
pub(crate) enum StepDetail {
    Plain,
    Key(KeyStep),
    Critical(CriticalStep),
}

/// A materialized term together with its recorded detail.
pub(crate) struct TermOut {
    pub m: u64,
    pub detail: StepDetail,
}

/// Meter for the digit reads a construction performs. Searches that touch
/// more digits than the budget allows fail loudly instead of spinning;
/// in-memory table lookups are free, only materialization and match-table
/// builds are charged.
pub(crate) struct ReadBudget {
    cap: u64,
    spent: u64,
}

impl ReadBudget {
    fn new(cap: u64) -> Self {
        ReadBudget { cap, spent: 0 }
    }

    pub fn charge(&mut self, reads: u64, context: &str) -> Result<()> {
        self.spent = self.spent.saturating_add(reads);
        if self.spent > self.cap {
            return Err(Error::HorizonExhausted {
                steps: self.cap,
                context: format!("digit-read budget exhausted {context}"),
            });
        }
        Ok(())
    }
}

/// Default digit-read budget for construction searches.
pub const DEFAULT_READ_BUDGET: u64 = 1_000_000;

/// Produces terms one at a time. `Ok(None)` means the stream is exhausted by
/// construction (a finite manual list, or a recursion capped at a term
/// count).
pub(crate) trait TermDriver: Send {
    fn next_term(&mut self, budget: &mut ReadBudget) -> Result<Option<TermOut>>;
}

struct MState {
    terms: Vec<u64>,
    details: Vec<StepDetail>,
    driver: Option<Box<dyn TermDriver>>,
    budget: ReadBudget,
}

/// A lazily materialized cut sequence over a fixed base expansion. Clones
/// share state: terms materialize once for all handles.
#[derive(Clone)]
pub struct MSequence {
    d: DExpansion,
    provenance: Provenance,
    /// Whether terms are required to be strictly increasing (true for the
    /// two recursions, whose proofs guarantee it; manual lists may repeat).
    strict: bool,
    /// The (cuts, gap) pair for sequences built by [`MSequence::manual`],
    /// kept so the assembled sequence can reuse exact block structure.
    manual_shape: Option<(Vec<u64>, Option<u64>)>,
    state: Arc<Mutex<MState>>,
}

impl std::fmt::Debug for MSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let st = self.state.lock().unwrap();
        f.debug_struct("MSequence")
            .field("provenance", &self.provenance)
            .field("materialized", &st.terms)
            .field("exhausted", &st.driver.is_none())
            .finish_non_exhaustive()
    }
}

struct ManualDriver {
    cuts: Vec<u64>,
    gap: Option<u64>,
    idx: usize,
    last: u64,
}

impl TermDriver for ManualDriver {
    fn next_term(&mut self, _budget: &mut ReadBudget) -> Result<Option<TermOut>> {
        let m = if self.idx < self.cuts.len() {
            self.cuts[self.idx]
        } else if let Some(gap) = self.gap {
            self.last.checked_add(gap).ok_or_else(|| {
                Error::InvalidInput("cut-length overflow in arithmetic continuation".to_string())
            })?
        } else {
            return Ok(None);
        };
        self.idx += 1;
        self.last = m;
        Ok(Some(TermOut { m, detail: StepDetail::Plain }))
    }
}

impl MSequence {
    /// A cut sequence listed outright: the given cuts, optionally continued
    /// forever by a fixed arithmetic gap (a gap of 0 repeats the last cut).
    /// Cuts must be positive; d-positivity is checked as terms are read.
    pub fn manual(d: DExpansion, cuts: Vec<u64>, gap: Option<u64>) -> Result<MSequence> {
        if cuts.is_empty() {
            return Err(Error::InvalidInput("empty cut list".to_string()));
        }
        if cuts.contains(&0) {
            return Err(Error::InvalidInput("cut lengths must be positive".to_string()));
        }
        let driver = ManualDriver { cuts: cuts.clone(), gap, idx: 0, last: 0 };
        let mut m = Self::from_driver(d, Provenance::Manual, Box::new(driver), false);
        m.manual_shape = Some((cuts, gap));
        Ok(m)
    }

    pub(crate) fn from_driver(
        d: DExpansion,
        provenance: Provenance,
        driver: Box<dyn TermDriver>,
        strict: bool,
    ) -> MSequence {
        MSequence {
            d,
            provenance,
            strict,
            manual_shape: None,
            state: Arc::new(Mutex::new(MState {
                terms: Vec::new(),
                details: Vec::new(),
                driver: Some(driver),
                budget: ReadBudget::new(DEFAULT_READ_BUDGET),
            })),
        }
    }

    /// Replace the remaining digit-read budget. Applies to terms not yet
    /// materialized; already-materialized terms are unaffected.
    pub fn with_budget(self, digit_reads: u64) -> MSequence {
        self.state.lock().unwrap().budget = ReadBudget::new(digit_reads);
        self
    }

    /// The base expansion the cuts refer to.
    pub fn d(&self) -> &DExpansion {
        &self.d
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The (cuts, gap) pair when this sequence came from
    /// [`MSequence::manual`].
    pub(crate) fn manual_shape(&self) -> Option<(Vec<u64>, Option<u64>)> {
        self.manual_shape.clone()
    }

    /// Read the digit d_m of the base expansion (1-indexed).
    fn d_digit(&self, m: u64) -> Result<u8> {
        match &self.d {
            DExpansion::Exact(seq) => seq.digit(m),
            DExpansion::Prefix(word) => {
                let idx = usize::try_from(m - 1)
                    .map_err(|_| Error::InvalidInput("cut length overflows".to_string()))?;
                word.digits().get(idx).copied().ok_or_else(|| Error::HorizonExhausted {
                    steps: word.len() as u64,
                    context: format!(
                        "cut position {m} lies beyond the certified prefix of the base expansion"
                    ),
                })
            }
        }
    }

    /// The k-th term (1-indexed), or `None` when the stream ends before it.
    /// Materializing a term enforces d-positivity and, for the recursion
    /// drivers, strict growth.
    pub fn try_term(&self, k: usize) -> Result<Option<u64>> {
        if k == 0 {
            return Err(Error::InvalidInput("term indices start at 1".to_string()));
        }
        let mut guard = self.state.lock().unwrap();
        let st = &mut *guard;
        while st.terms.len() < k {
            let Some(driver) = st.driver.as_mut() else {
                return Ok(None);
            };
            let Some(out) = driver.next_term(&mut st.budget)? else {
                st.driver = None;
                return Ok(None);
            };
            if out.m == 0 {
                return Err(Error::InvalidInput("cut lengths must be positive".to_string()));
            }
            if self.strict {
                if let Some(&prev) = st.terms.last() {
                    if out.m <= prev {
                        return Err(Error::HypothesisFailed(format!(
                            "construction produced a non-increasing cut {} after {prev}",
                            out.m
                        )));
                    }
                }
            }
            st.budget.charge(1, "reading the digit at a cut position")?;
            let digit = self.d_digit(out.m)?;
            if digit == 0 {
                return Err(Error::NotDPositive { k: st.terms.len() + 1, m: out.m });
            }
            st.terms.push(out.m);
            st.details.push(out.detail);
        }
        Ok(Some(st.terms[k - 1]))
    }

    /// The k-th term (1-indexed); erring when the stream ends before it.
    pub fn term(&self, k: usize) -> Result<u64> {
        match self.try_term(k)? {
            Some(m) => Ok(m),
            None => {
                let have = self.state.lock().unwrap().terms.len();
                Err(Error::HorizonExhausted {
                    steps: have as u64,
                    context: format!("the cut stream ends after {have} terms; term {k} requested"),
                })
            }
        }
    }

    /// The first `count` terms.
    pub fn terms(&self, count: usize) -> Result<Vec<u64>> {
        (1..=count).map(|k| self.term(k)).collect()
    }

    /// m_1 + ⋯ + m_j, the digit length of the first j blocks of ω(M).
    pub fn partial_sum(&self, j: usize) -> Result<u64> {
        let mut sum: u64 = 0;
        for k in 1..=j {
            sum = sum
                .checked_add(self.term(k)?)
                .ok_or_else(|| Error::InvalidInput("partial sum overflows".to_string()))?;
        }
        Ok(sum)
    }

    /// Terms materialized so far, without driving the stream.
    pub fn materialized(&self) -> Vec<u64> {
        self.state.lock().unwrap().terms.clone()
    }

    /// Recorded bounded-match steps for terms materialized so far.
    pub fn key_steps(&self) -> Vec<KeyStep> {
        self.state
            .lock()
            .unwrap()
            .details
            .iter()
            .filter_map(|d| match d {
                StepDetail::Key(s) => Some(*s),
                _ => None,
            })
            .collect()
    }

    /// Recorded layered steps for terms materialized so far.
    pub fn critical_steps(&self) -> Vec<CriticalStep> {
        self.state
            .lock()
            .unwrap()
            .details
            .iter()
            .filter_map(|d| match d {
                StepDetail::Critical(s) => Some(*s),
                _ => None,
            })
            .collect()
    }
}
