//! Infinite symbolic sequences with structural backends.

use super::word::{Alphabet, Word};
use crate::{Error, Result};
use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Repetition count for one block of a lazily generated sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Repeat {
    Finite(BigUint),
    Infinite,
}

impl Repeat {
    pub fn finite_u64(k: u64) -> Repeat {
        Repeat::Finite(BigUint::from(k))
    }
}

/// Producer of successive blocks for a lazily assembled sequence. Returning
/// `Ok(None)` means the stream has no further blocks, which is an error to
/// read past unless an `Infinite` repeat was already emitted.
pub trait BlockGen: Send {
    fn next_block(&mut self) -> Result<Option<(Word, Repeat)>>;
}

/// Structural shape of a lazily generated sequence, recorded at construction
/// time. Membership tests use this to decide limsup questions that no finite
/// digit scan could settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuralKind {
    /// Concatenation ∏_k d₁⋯d_{m_k}⁻ of decremented prefixes of a fixed base
    /// sequence, with cut lengths m_k that grow without bound.
    PrefixConcatUnboundedCuts,
    /// Concatenation of block pairs (w w̄)^{k} built from infinitely many
    /// distinct words w of strictly growing length.
    BlockProductDistinct,
}

struct Segment {
    digits: Vec<u8>,
    repeat: Repeat,
    /// 0-based index of the segment's first digit.
    start: BigUint,
}

impl Segment {
    /// Digit at 0-based global index `i`, if this segment covers it.
    fn lookup(&self, i: &BigUint) -> Option<u8> {
        if i < &self.start {
            return None;
        }
        let off = i - &self.start;
        let len = BigUint::from(self.digits.len());
        match &self.repeat {
            Repeat::Infinite => {}
            Repeat::Finite(k) => {
                if off >= &len * k {
                    return None;
                }
            }
        }
        let j = (&off % &len).to_usize().expect("block length fits usize");
        Some(self.digits[j])
    }
}

struct BlockState {
    gen: Option<Box<dyn BlockGen>>,
    segments: Vec<Segment>,
    /// Total digits covered by finite segments so far.
    covered: BigUint,
    infinite_tail: bool,
    /// Text-grammar rendering, when the construction is representable.
    grammar: Option<String>,
    /// Construction shape and the base sequence the shape refers to, when
    /// one of the recognized kinds applies.
    kind: Option<(StructuralKind, SymbolicSequence)>,
}

enum Backend {
    EventuallyPeriodic { pre: Vec<u8>, per: Vec<u8> },
    /// The mirror-doubling rule: blocks b_1 = first, b_{m+1} = b_m · (α−b_m
    /// with last digit +1). `first` must end in a digit ≥ 1 so every block
    /// boundary stays inside the alphabet.
    PMirror { first: Vec<u8> },
    Blocks { label: String, state: Mutex<BlockState> },
    Shifted { base: SymbolicSequence, offset: u64 },
    Reflected { base: SymbolicSequence },
}

struct SeqInner {
    alphabet: Alphabet,
    backend: Backend,
}

/// An infinite digit sequence. Clones share backend state (memoized blocks
/// extend once for all handles); the type is `Send + Sync`.
#[derive(Clone)]
pub struct SymbolicSequence {
    inner: Arc<SeqInner>,
}

impl SymbolicSequence {
    // ----- constructors -----

    /// pre · per^∞. The period must be nonempty.
    pub fn eventually_periodic(pre: Word, per: Word) -> Result<Self> {
        if per.is_empty() {
            return Err(Error::InvalidInput("empty period".to_string()));
        }
        if pre.alphabet() != per.alphabet() {
            return Err(Error::InvalidInput("preperiod and period alphabets differ".to_string()));
        }
        Ok(Self::build(
            per.alphabet(),
            Backend::EventuallyPeriodic { pre: pre.digits().to_vec(), per: per.digits().to_vec() },
        ))
    }

    /// per^∞.
    pub fn periodic(per: Word) -> Result<Self> {
        let alphabet = per.alphabet();
        Self::eventually_periodic(Word::empty(alphabet), per)
    }

    pub fn constant(alphabet: Alphabet, digit: u8) -> Result<Self> {
        Self::periodic(Word::new(alphabet, vec![digit])?)
    }

    /// The mirror-doubling sequence whose first block is `first`: each
    /// doubling appends the reflection of everything so far with the final
    /// digit incremented. Requires a nonempty block ending in a digit ≥ 1,
    /// which keeps every digit of the infinite sequence inside the alphabet.
    pub fn pmirror_rule(first: Word) -> Result<Self> {
        if first.is_empty() {
            return Err(Error::InvalidInput("empty mirror block".to_string()));
        }
        let last = *first.digits().last().unwrap();
        if last == 0 {
            return Err(Error::InvalidInput(
                "mirror block must end in a digit >= 1 (block ends reflect and increment)"
                    .to_string(),
            ));
        }
        Ok(Self::build(first.alphabet(), Backend::PMirror { first: first.digits().to_vec() }))
    }

    /// A sequence assembled from lazily generated blocks.
    pub fn from_blocks(
        alphabet: Alphabet,
        gen: Box<dyn BlockGen>,
        label: impl Into<String>,
        grammar: Option<String>,
    ) -> Self {
        Self::from_blocks_tagged(alphabet, gen, label, grammar, None)
    }

    /// Like [`from_blocks`](Self::from_blocks), additionally recording the
    /// construction's structural shape, together with the base sequence the
    /// shape is built from, for later limsup decisions.
    pub fn from_blocks_tagged(
        alphabet: Alphabet,
        gen: Box<dyn BlockGen>,
        label: impl Into<String>,
        grammar: Option<String>,
        kind: Option<(StructuralKind, SymbolicSequence)>,
    ) -> Self {
        Self::build(
            alphabet,
            Backend::Blocks {
                label: label.into(),
                state: Mutex::new(BlockState {
                    gen: Some(gen),
                    segments: Vec::new(),
                    covered: BigUint::zero(),
                    infinite_tail: false,
                    grammar,
                    kind,
                }),
            },
        )
    }

    fn build(alphabet: Alphabet, backend: Backend) -> Self {
        SymbolicSequence { inner: Arc::new(SeqInner { alphabet, backend }) }
    }

    // ----- views -----

    /// The shifted sequence σ^k ω = ω_{k+1} ω_{k+2} …
    pub fn shift(&self, k: u64) -> SymbolicSequence {
        if k == 0 {
            return self.clone();
        }
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => {
                let (new_pre, new_per) = shift_ep(pre, per, k);
                Self::build(
                    self.inner.alphabet,
                    Backend::EventuallyPeriodic { pre: new_pre, per: new_per },
                )
            }
            Backend::Shifted { base, offset } => Self::build(
                self.inner.alphabet,
                Backend::Shifted {
                    base: base.clone(),
                    offset: offset.checked_add(k).expect("shift offset overflow"),
                },
            ),
            _ => Self::build(
                self.inner.alphabet,
                Backend::Shifted { base: self.clone(), offset: k },
            ),
        }
    }

    /// The reflected sequence ω̄ = (α−ω_1)(α−ω_2)…
    pub fn reflect(&self) -> SymbolicSequence {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => {
                let a = self.inner.alphabet;
                Self::build(
                    a,
                    Backend::EventuallyPeriodic {
                        pre: pre.iter().map(|&d| a.reflect_digit(d)).collect(),
                        per: per.iter().map(|&d| a.reflect_digit(d)).collect(),
                    },
                )
            }
            Backend::Reflected { base } => base.clone(),
            _ => Self::build(self.inner.alphabet, Backend::Reflected { base: self.clone() }),
        }
    }

    // ----- inspection -----

    pub fn alphabet(&self) -> Alphabet {
        self.inner.alphabet
    }

    /// The digit ω_n (1-indexed).
    pub fn digit(&self, n: u64) -> Result<u8> {
        if n == 0 {
            return Err(Error::InvalidInput("sequence indices start at 1".to_string()));
        }
        self.digit0(n - 1)
    }

    fn digit0(&self, i: u64) -> Result<u8> {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => {
                let i = i as usize;
                Ok(if i < pre.len() { pre[i] } else { per[(i - pre.len()) % per.len()] })
            }
            Backend::PMirror { first } => {
                Ok(pm_digit(first, self.inner.alphabet.alpha(), i + 1))
            }
            Backend::Blocks { state, .. } => blocks_digit(state, i),
            Backend::Shifted { base, offset } => base.digit0(
                i.checked_add(*offset)
                    .ok_or_else(|| Error::InvalidInput("sequence index overflow".to_string()))?,
            ),
            Backend::Reflected { base } => {
                Ok(self.inner.alphabet.reflect_digit(base.digit0(i)?))
            }
        }
    }

    /// The first `n` digits as a vector. Structural backends materialize in
    /// O(n) rather than per-digit.
    pub fn materialize_prefix(&self, n: usize) -> Result<Vec<u8>> {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => {
                let mut v = Vec::with_capacity(n);
                v.extend_from_slice(&pre[..pre.len().min(n)]);
                while v.len() < n {
                    let take = (n - v.len()).min(per.len());
                    v.extend_from_slice(&per[..take]);
                }
                Ok(v)
            }
            Backend::PMirror { first } => {
                let alpha = self.inner.alphabet.alpha();
                let mut v = first.clone();
                while v.len() < n {
                    let mut tail: Vec<u8> = v.iter().map(|&d| alpha - d).collect();
                    let last = tail.last_mut().expect("nonempty mirror block");
                    *last += 1;
                    v.extend_from_slice(&tail);
                }
                v.truncate(n);
                Ok(v)
            }
            Backend::Reflected { base } => {
                let alpha = self.inner.alphabet.alpha();
                let mut v = base.materialize_prefix(n)?;
                for d in &mut v {
                    *d = alpha - *d;
                }
                Ok(v)
            }
            Backend::Shifted { base, offset } => {
                let total = (*offset as usize)
                    .checked_add(n)
                    .ok_or_else(|| Error::InvalidInput("prefix length overflow".to_string()))?;
                let mut v = base.materialize_prefix(total)?;
                v.drain(..*offset as usize);
                Ok(v)
            }
            Backend::Blocks { .. } => {
                let mut v = Vec::with_capacity(n);
                for i in 0..n as u64 {
                    v.push(self.digit0(i)?);
                }
                Ok(v)
            }
        }
    }

    /// Exact eventually periodic structure, if this sequence has one
    /// physically: (preperiod, period).
    pub fn as_eventually_periodic(&self) -> Option<(Word, Word)> {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => Some((
                Word::new(self.inner.alphabet, pre.clone()).expect("validated at construction"),
                Word::new(self.inner.alphabet, per.clone()).expect("validated at construction"),
            )),
            _ => None,
        }
    }

    /// First block of the mirror-doubling rule, if that is this sequence's
    /// backend.
    pub fn as_pmirror_first(&self) -> Option<Word> {
        match &self.inner.backend {
            Backend::PMirror { first } => Some(
                Word::new(self.inner.alphabet, first.clone()).expect("validated at construction"),
            ),
            _ => None,
        }
    }

    /// The structural shape recorded at construction, for block-generated
    /// sequences that declared one.
    pub fn structural_kind(&self) -> Option<StructuralKind> {
        match &self.inner.backend {
            Backend::Blocks { state, .. } => state.lock().unwrap().kind.as_ref().map(|(k, _)| *k),
            _ => None,
        }
    }

    /// The base sequence a recorded structural shape refers to.
    pub fn structural_base(&self) -> Option<SymbolicSequence> {
        match &self.inner.backend {
            Backend::Blocks { state, .. } => {
                state.lock().unwrap().kind.as_ref().map(|(_, base)| base.clone())
            }
            _ => None,
        }
    }

    /// Grammar rendering when the backend structure is representable.
    pub(crate) fn structural_grammar(&self) -> Option<String> {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { pre, per } => {
                let a = self.inner.alphabet;
                let pre_w = Word::new(a, pre.clone()).ok()?;
                let per_w = Word::new(a, per.clone()).ok()?;
                let mut s = String::new();
                if !pre_w.is_empty() {
                    s.push_str(&pre_w.to_string());
                    if a.alpha() > 9 {
                        s.push(',');
                    }
                }
                s.push_str(&format!("({per_w})^inf"));
                Some(s)
            }
            Backend::PMirror { first } => {
                let a = self.inner.alphabet;
                let gen = Word::new(a, first.clone()).ok()?.decrement_last().ok()?;
                Some(format!("pmirror({gen})"))
            }
            Backend::Blocks { state, .. } => state.lock().unwrap().grammar.clone(),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match &self.inner.backend {
            Backend::EventuallyPeriodic { .. } => "eventually-periodic".to_string(),
            Backend::PMirror { .. } => "mirror-rule".to_string(),
            Backend::Blocks { label, .. } => label.clone(),
            Backend::Shifted { base, offset } => format!("shift[{offset}] of {}", base.label()),
            Backend::Reflected { base } => format!("reflection of {}", base.label()),
        }
    }
}

impl fmt::Debug for SymbolicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = self
            .materialize_prefix(16)
            .map(|v| {
                v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(
                    if self.inner.alphabet.alpha() > 9 { "," } else { "" },
                )
            })
            .unwrap_or_else(|_| "<unavailable>".to_string());
        write!(f, "SymbolicSequence[{}; {}…]", self.label(), prefix)
    }
}

/// Shift an eventually periodic description by k.
fn shift_ep(pre: &[u8], per: &[u8], k: u64) -> (Vec<u8>, Vec<u8>) {
    if k < pre.len() as u64 {
        (pre[k as usize..].to_vec(), per.to_vec())
    } else {
        let j = ((k - pre.len() as u64) % per.len() as u64) as usize;
        let mut rotated = per[j..].to_vec();
        rotated.extend_from_slice(&per[..j]);
        (Vec::new(), rotated)
    }
}

/// Mirror-rule digit by descent: the digit at 1-based index n is determined
/// by reflecting down through doubling levels in O(log n).
fn pm_digit(first: &[u8], alpha: u8, n: u64) -> u8 {
    let p = first.len() as u64;
    if n <= p {
        return first[(n - 1) as usize];
    }
    let mut len = p;
    while (len as u128) * 2 < n as u128 {
        len *= 2;
    }
    // n lies in (len, 2len]: digit = α − digit(n − len), plus one at the
    // block boundary n = 2len.
    let inner = pm_digit(first, alpha, n - len);
    let boundary = if n == 2 * len { 1 } else { 0 };
    alpha - inner + boundary
}

fn blocks_digit(state: &Mutex<BlockState>, i: u64) -> Result<u8> {
    let mut st = state.lock().unwrap();
    let idx = BigUint::from(i);
    loop {
        // Segments are ordered; scan from the back since reads cluster at
        // the frontier.
        for seg in st.segments.iter().rev() {
            if let Some(d) = seg.lookup(&idx) {
                return Ok(d);
            }
        }
        if st.infinite_tail {
            unreachable!("an infinite tail covers every index beyond its start");
        }
        let Some(gen) = st.gen.as_mut() else {
            return Err(Error::InvalidInput(format!(
                "sequence has only {} digits; index {} is beyond its end",
                st.covered, i + 1
            )));
        };
        match gen.next_block()? {
            None => {
                st.gen = None;
            }
            Some((word, repeat)) => {
                if word.is_empty() {
                    return Err(Error::InvalidInput("empty block in sequence".to_string()));
                }
                let start = st.covered.clone();
                match &repeat {
                    Repeat::Infinite => {
                        st.infinite_tail = true;
                        st.gen = None;
                    }
                    Repeat::Finite(k) => {
                        st.covered = &start + BigUint::from(word.len()) * k;
                    }
                }
                st.segments.push(Segment { digits: word.digits().to_vec(), repeat, start });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(alpha: u8, digits: &[u8]) -> Word {
        Word::new(Alphabet::new(alpha), digits.to_vec()).unwrap()
    }

    fn ep(alpha: u8, pre: &[u8], per: &[u8]) -> SymbolicSequence {
        SymbolicSequence::eventually_periodic(w(alpha, pre), w(alpha, per)).unwrap()
    }

    #[test]
    fn eventually_periodic_digits() {
        let s = ep(1, &[1, 1], &[0, 1]);
        let digits: Vec<u8> = (1..=8).map(|n| s.digit(n).unwrap()).collect();
        assert_eq!(digits, vec![1, 1, 0, 1, 0, 1, 0, 1]);
        assert!(s.digit(0).is_err());
    }

    #[test]
    fn shift_stays_exact_on_periodic_sequences() {
        let s = ep(1, &[1, 1], &[0, 1]);
        // σ^3: drops the preperiod and one period digit.
        let t = s.shift(3);
        let (pre, per) = t.as_eventually_periodic().expect("shift of periodic is periodic");
        assert!(pre.is_empty());
        assert_eq!(per.digits(), &[1, 0]);
        // Agreement with direct digit reads.
        for n in 1..=6 {
            assert_eq!(t.digit(n).unwrap(), s.digit(n + 3).unwrap());
        }
    }

    #[test]
    fn reflect_is_exact_and_involutive_on_periodic() {
        let s = ep(2, &[2], &[1, 0]);
        let r = s.reflect();
        let (pre, per) = r.as_eventually_periodic().unwrap();
        assert_eq!(pre.digits(), &[0]);
        assert_eq!(per.digits(), &[1, 2]);
        let rr = r.reflect();
        let (pre2, per2) = rr.as_eventually_periodic().unwrap();
        assert_eq!(pre2.digits(), &[2]);
        assert_eq!(per2.digits(), &[1, 0]);
    }

    #[test]
    fn mirror_rule_produces_the_classic_binary_sequence() {
        // first = 11 over {0,1}: 11 01 0011 01001101 ... — the shifted
        // binary mirror sequence. Its first 16 digits:
        let s = SymbolicSequence::pmirror_rule(w(1, &[1, 1])).unwrap();
        let got = s.materialize_prefix(16).unwrap();
        assert_eq!(got, vec![1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0, 1]);
        // Descent digits agree with materialization far beyond the memo.
        let far = s.digit(1 << 40).unwrap();
        assert!(far <= 1);
    }

    #[test]
    fn mirror_descent_matches_materialization() {
        let s = SymbolicSequence::pmirror_rule(w(2, &[2, 1])).unwrap();
        let pref = s.materialize_prefix(512).unwrap();
        for (i, &d) in pref.iter().enumerate() {
            assert_eq!(s.digit(i as u64 + 1).unwrap(), d, "digit {}", i + 1);
        }
    }

    #[test]
    fn mirror_rule_rejects_zero_final_digit() {
        assert!(SymbolicSequence::pmirror_rule(w(1, &[1, 0])).is_err());
    }

    #[test]
    fn shifted_and_reflected_views_compose() {
        let s = SymbolicSequence::pmirror_rule(w(1, &[1, 1])).unwrap();
        let t = s.shift(2).reflect();
        for n in 1..=12 {
            let expect = 1 - s.digit(n + 2).unwrap();
            assert_eq!(t.digit(n).unwrap(), expect);
        }
        // Shift offsets merge instead of nesting.
        let u = s.shift(1).shift(4);
        for n in 1..=12 {
            assert_eq!(u.digit(n).unwrap(), s.digit(n + 5).unwrap());
        }
        // Double reflection unwraps.
        let v = t.reflect();
        for n in 1..=12 {
            assert_eq!(v.digit(n).unwrap(), s.digit(n + 2).unwrap());
        }
    }

    struct CountBlocks {
        next: u8,
        max: u8,
    }
    impl BlockGen for CountBlocks {
        fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
            if self.next > self.max {
                return Ok(None);
            }
            let d = self.next;
            self.next += 1;
            let word = Word::new(Alphabet::new(9), vec![d])?;
            let repeat =
                if d == self.max { Repeat::Infinite } else { Repeat::finite_u64(d as u64) };
            Ok(Some((word, repeat)))
        }
    }

    #[test]
    fn block_sequences_extend_lazily_and_memoize() {
        // 1 22 333 4^inf
        let gen = CountBlocks { next: 1, max: 4 };
        let s = SymbolicSequence::from_blocks(Alphabet::new(9), Box::new(gen), "count", None);
        let pref = s.materialize_prefix(10).unwrap();
        assert_eq!(pref, vec![1, 2, 2, 3, 3, 3, 4, 4, 4, 4]);
        // A clone shares the extension state.
        let c = s.clone();
        assert_eq!(c.digit(1000).unwrap(), 4);
    }

    #[test]
    fn finite_block_stream_errors_past_the_end() {
        struct TwoBlocks(u8);
        impl BlockGen for TwoBlocks {
            fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
                if self.0 >= 2 {
                    return Ok(None);
                }
                self.0 += 1;
                Ok(Some((Word::new(Alphabet::new(1), vec![1, 0])?, Repeat::finite_u64(1))))
            }
        }
        let s =
            SymbolicSequence::from_blocks(Alphabet::new(1), Box::new(TwoBlocks(0)), "two", None);
        assert_eq!(s.materialize_prefix(4).unwrap(), vec![1, 0, 1, 0]);
        assert!(s.digit(5).is_err());
    }

    #[test]
    fn huge_block_repeats_index_correctly() {
        struct Huge(bool);
        impl BlockGen for Huge {
            fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
                if self.0 {
                    return Ok(Some((Word::new(Alphabet::new(1), vec![1])?, Repeat::Infinite)));
                }
                self.0 = true;
                Ok(Some((
                    Word::new(Alphabet::new(1), vec![0, 1])?,
                    Repeat::Finite(BigUint::from(10u64).pow(30)),
                )))
            }
        }
        let s = SymbolicSequence::from_blocks(Alphabet::new(1), Box::new(Huge(false)), "x", None);
        assert_eq!(s.digit(1).unwrap(), 0);
        assert_eq!(s.digit(2).unwrap(), 1);
        assert_eq!(s.digit(u64::MAX).unwrap(), 0); // odd index inside the repeat
        assert_eq!(s.digit(u64::MAX - 1).unwrap(), 1);
    }
}
