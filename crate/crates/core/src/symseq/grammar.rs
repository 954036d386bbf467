//! Text grammar for describing sequences: `alpha=<n>; seq=<body>`.
//!
//! A body is a run of finite items followed by one infinite tail:
//!
//! * digit literals, contiguous for alphabets up to {0..9} and
//!   comma-separated beyond (`110`, `10,11,0`);
//! * `(w)^k` repeats the word w a finite number of times;
//! * `(w)^inf` closes the body with the periodic tail w^∞;
//! * `pmirror(t)` is the mirror-doubling sequence generated by t (its first
//!   block is t with the final digit incremented); it must form the whole
//!   body;
//! * `mconcat(d=<body>;m=m1,m2,...)` concatenates the prefixes of length
//!   m_k of the sequence d, each with its final digit decremented. The cut
//!   lengths must be positive but need not be monotone. A trailing `...`
//!   continues the m-list arithmetically with the difference of its last two
//!   entries (which must be non-negative); a constant continuation collapses
//!   to the equivalent periodic form. It must form the whole body.

use super::seq::{BlockGen, Repeat, StructuralKind, SymbolicSequence};
use super::word::{Alphabet, Word};
use crate::{Error, Result};

/// Parse a bare word: contiguous digits for alphabets up to {0..9},
/// comma-separated values beyond. The empty string is the empty word.
pub fn parse_word(alphabet: Alphabet, text: &str) -> Result<Word> {
    let mut digits = Vec::new();
    if alphabet.alpha() <= 9 {
        for ch in text.chars() {
            let d = ch
                .to_digit(10)
                .ok_or_else(|| Error::InvalidInput(format!("bad digit character {ch:?}")))?
                as u8;
            digits.push(d);
        }
    } else {
        for part in text.split(',') {
            if part.is_empty() {
                return Err(Error::InvalidInput("empty entry in digit list".to_string()));
            }
            let d: u8 = part
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad digit {part:?}")))?;
            digits.push(d);
        }
    }
    Word::new(alphabet, digits)
}

/// Parse a full `alpha=<n>; seq=<body>` description.
pub fn parse_sequence(input: &str) -> Result<SymbolicSequence> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let rest = compact
        .strip_prefix("alpha=")
        .ok_or_else(|| Error::InvalidInput("expected leading alpha=<n>".to_string()))?;
    let semi = rest
        .find(';')
        .ok_or_else(|| Error::InvalidInput("expected ';' after the alphabet".to_string()))?;
    let alpha: u8 = rest[..semi]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad alphabet size {:?}", &rest[..semi])))?;
    if alpha == 0 {
        return Err(Error::InvalidInput("alphabet must contain a nonzero digit".to_string()));
    }
    let body = rest[semi + 1..]
        .strip_prefix("seq=")
        .ok_or_else(|| Error::InvalidInput("expected seq=<body> after the alphabet".to_string()))?;
    parse_body(Alphabet::new(alpha), body)
}

/// Render a sequence back to grammar text. Only sequences with structural
/// backends (periodic, mirror-rule, labeled block constructions) are
/// representable.
pub fn format_sequence(seq: &SymbolicSequence) -> Result<String> {
    let body = seq.structural_grammar().ok_or_else(|| {
        Error::InvalidInput("sequence has no grammar representation".to_string())
    })?;
    Ok(format!("alpha={}; seq={}", seq.alphabet().alpha(), body))
}

/// Split text that follows an opening parenthesis into (inside, after),
/// where `inside` excludes the matching close.
fn split_paren(s: &str) -> Result<(&str, &str)> {
    let mut depth = 1usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&s[..i], &s[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(Error::InvalidInput("unbalanced parentheses".to_string()))
}

fn take_integer(s: &str) -> Result<(u64, &str)> {
    let end = s.find(|c: char| !c.is_ascii_digit()).unwrap_or(s.len());
    if end == 0 {
        return Err(Error::InvalidInput(format!("expected an integer at {s:?}")));
    }
    let v: u64 = s[..end]
        .parse()
        .map_err(|_| Error::InvalidInput(format!("repeat count {:?} out of range", &s[..end])))?;
    Ok((v, &s[end..]))
}

fn parse_body(alphabet: Alphabet, body: &str) -> Result<SymbolicSequence> {
    let mut prefix: Vec<u8> = Vec::new();
    let mut rest = body;
    loop {
        if rest.is_empty() {
            return Err(Error::InvalidInput(
                "sequence body must end with an infinite construction".to_string(),
            ));
        }
        if let Some(after_open) = rest.strip_prefix("pmirror(") {
            let (inside, after) = split_paren(after_open)?;
            if !after.is_empty() {
                return Err(Error::InvalidInput(
                    "nothing may follow pmirror(..)".to_string(),
                ));
            }
            if !prefix.is_empty() {
                return Err(Error::InvalidInput(
                    "pmirror(..) must form the whole body".to_string(),
                ));
            }
            let generator = parse_word(alphabet, inside)?;
            let first = generator.increment_last()?;
            return SymbolicSequence::pmirror_rule(first);
        }
        if let Some(after_open) = rest.strip_prefix("mconcat(") {
            let (inside, after) = split_paren(after_open)?;
            if !after.is_empty() {
                return Err(Error::InvalidInput(
                    "nothing may follow mconcat(..)".to_string(),
                ));
            }
            if !prefix.is_empty() {
                return Err(Error::InvalidInput(
                    "mconcat(..) must form the whole body".to_string(),
                ));
            }
            return parse_mconcat(alphabet, inside);
        }
        if let Some(after_open) = rest.strip_prefix('(') {
            let (inside, after) = split_paren(after_open)?;
            let word = parse_word(alphabet, inside)?;
            if word.is_empty() {
                return Err(Error::InvalidInput("empty group".to_string()));
            }
            let powered = after.strip_prefix('^').ok_or_else(|| {
                Error::InvalidInput("a group must carry a power: (w)^k or (w)^inf".to_string())
            })?;
            if let Some(trailing) = powered.strip_prefix("inf") {
                if !trailing.is_empty() {
                    return Err(Error::InvalidInput(
                        "nothing may follow the (w)^inf tail".to_string(),
                    ));
                }
                let pre = Word::new(alphabet, prefix)?;
                return SymbolicSequence::eventually_periodic(pre, word);
            }
            let (k, next) = take_integer(powered)?;
            if k == 0 {
                return Err(Error::InvalidInput("repeat count must be positive".to_string()));
            }
            for _ in 0..k {
                prefix.extend_from_slice(word.digits());
            }
            rest = next;
            continue;
        }
        // Literal digit run up to the next group.
        let stop = rest.find('(').unwrap_or(rest.len());
        let run = rest[..stop].trim_end_matches(',');
        let word = parse_word(alphabet, run)?;
        prefix.extend_from_slice(word.digits());
        rest = &rest[stop..];
        if rest.is_empty() {
            return Err(Error::InvalidInput(
                "sequence body must end with an infinite construction".to_string(),
            ));
        }
    }
}

struct MConcatGen {
    d: SymbolicSequence,
    ms: Vec<u64>,
    continuation: Option<u64>,
    next_index: usize,
    last_m: u64,
}

impl BlockGen for MConcatGen {
    fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
        let m = if self.next_index < self.ms.len() {
            self.ms[self.next_index]
        } else if let Some(diff) = self.continuation {
            self.last_m.checked_add(diff).ok_or_else(|| {
                Error::InvalidInput("cut-length overflow in block construction".to_string())
            })?
        } else {
            return Ok(None);
        };
        self.next_index += 1;
        self.last_m = m;
        let block = decremented_prefix(&self.d, self.next_index, m)?;
        Ok(Some((block, Repeat::finite_u64(1))))
    }
}

/// One decremented prefix d₁⋯d_m⁻ of the base sequence, or the d-positivity
/// failure that makes the decrement illegal.
fn decremented_prefix(d: &SymbolicSequence, k: usize, m: u64) -> Result<Word> {
    let mut digits = d.materialize_prefix(m as usize)?;
    let last = digits.last_mut().expect("cut lengths are positive");
    if *last == 0 {
        return Err(Error::NotDPositive { k, m });
    }
    *last -= 1;
    Word::new(d.alphabet(), digits)
}

/// Build the block-concatenation sequence ∏_k d₁⋯d_{m_k}⁻ from a base
/// sequence and a positive cut list. Shared by the grammar and the
/// programmatic constructions. A constant arithmetic continuation yields an
/// exact eventually periodic sequence; a growing one yields a lazy stream
/// whose unbounded-cut structure is recorded for limsup decisions.
pub(crate) fn mconcat_sequence(
    d: SymbolicSequence,
    ms: Vec<u64>,
    continuation: Option<u64>,
    grammar: Option<String>,
) -> Result<SymbolicSequence> {
    if ms.is_empty() {
        return Err(Error::InvalidInput("empty cut list".to_string()));
    }
    if ms.contains(&0) {
        return Err(Error::InvalidInput("cut lengths must be positive".to_string()));
    }
    let alphabet = d.alphabet();
    if continuation == Some(0) {
        // The cut list is eventually constant, so the sequence is exactly
        // eventually periodic: listed blocks, then the last block forever.
        let mut pre: Vec<u8> = Vec::new();
        for (i, &m) in ms.iter().enumerate() {
            pre.extend_from_slice(decremented_prefix(&d, i + 1, m)?.digits());
        }
        let per = decremented_prefix(&d, ms.len(), *ms.last().unwrap())?;
        // Absorb period copies from the end of the preperiod: w·p·p^∞ = w·p^∞.
        while pre.ends_with(per.digits()) {
            pre.truncate(pre.len() - per.len());
        }
        return SymbolicSequence::eventually_periodic(Word::new(alphabet, pre)?, per);
    }
    let kind =
        continuation.map(|_| (StructuralKind::PrefixConcatUnboundedCuts, d.clone()));
    let gen = MConcatGen { d, ms, continuation, next_index: 0, last_m: 0 };
    Ok(SymbolicSequence::from_blocks_tagged(
        alphabet,
        Box::new(gen),
        "block-concatenation",
        grammar,
        kind,
    ))
}

fn parse_mconcat(alphabet: Alphabet, inside: &str) -> Result<SymbolicSequence> {
    let after_d = inside
        .strip_prefix("d=")
        .ok_or_else(|| Error::InvalidInput("mconcat must start with d=<body>".to_string()))?;
    // Find the last `;m=` at parenthesis depth zero; the d-body may nest.
    let mut depth = 0usize;
    let mut split_at = None;
    let bytes = after_d.as_bytes();
    for i in 0..bytes.len() {
        match bytes[i] {
            b'(' => depth += 1,
            b')' => depth = depth.saturating_sub(1),
            b';' if depth == 0 && after_d[i..].starts_with(";m=") => split_at = Some(i),
            _ => {}
        }
    }
    let split_at = split_at
        .ok_or_else(|| Error::InvalidInput("mconcat is missing its ;m=<list> part".to_string()))?;
    let d = parse_body(alphabet, &after_d[..split_at])?;
    let list_text = &after_d[split_at + 3..];

    let mut ms: Vec<u64> = Vec::new();
    let mut continuation = None;
    let parts: Vec<&str> = list_text.split(',').collect();
    for (i, part) in parts.iter().enumerate() {
        if *part == "..." {
            if i + 1 != parts.len() {
                return Err(Error::InvalidInput("'...' must end the cut list".to_string()));
            }
            if ms.len() < 2 {
                return Err(Error::InvalidInput(
                    "'...' needs at least two cut lengths to continue from".to_string(),
                ));
            }
            continuation = Some(ms[ms.len() - 1].checked_sub(ms[ms.len() - 2]).ok_or_else(
                || {
                    Error::InvalidInput(
                        "'...' continues arithmetically; the final step must not decrease"
                            .to_string(),
                    )
                },
            )?);
        } else {
            let v: u64 = part
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad cut length {part:?}")))?;
            ms.push(v);
        }
    }

    let d_grammar = d
        .structural_grammar()
        .ok_or_else(|| Error::InvalidInput("unrepresentable mconcat base".to_string()))?;
    let mut list_canon: Vec<String> = ms.iter().map(|m| m.to_string()).collect();
    if continuation.is_some() {
        list_canon.push("...".to_string());
    }
    let grammar = format!("mconcat(d={};m={})", d_grammar, list_canon.join(","));
    mconcat_sequence(d, ms, continuation, Some(grammar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_round_trip() {
        let s = parse_sequence("alpha=1; seq=(10)^inf").unwrap();
        assert_eq!(s.materialize_prefix(6).unwrap(), vec![1, 0, 1, 0, 1, 0]);
        assert_eq!(format_sequence(&s).unwrap(), "alpha=1; seq=(10)^inf");
    }

    #[test]
    fn preperiod_and_finite_powers_flatten() {
        let s = parse_sequence("alpha=2; seq=2(10)^3(0)^inf").unwrap();
        assert_eq!(
            s.materialize_prefix(10).unwrap(),
            vec![2, 1, 0, 1, 0, 1, 0, 0, 0, 0]
        );
        assert_eq!(format_sequence(&s).unwrap(), "alpha=2; seq=2101010(0)^inf");
    }

    #[test]
    fn wide_alphabets_use_commas() {
        let s = parse_sequence("alpha=11; seq=10,3(11,0)^inf").unwrap();
        assert_eq!(s.materialize_prefix(6).unwrap(), vec![10, 3, 11, 0, 11, 0]);
        assert_eq!(format_sequence(&s).unwrap(), "alpha=11; seq=10,3,(11,0)^inf");
        // The canonical rendering parses back to the same digits.
        let t = parse_sequence(&format_sequence(&s).unwrap()).unwrap();
        assert_eq!(t.materialize_prefix(6).unwrap(), s.materialize_prefix(6).unwrap());
    }

    #[test]
    fn mirror_rule_body() {
        let s = parse_sequence("alpha=1; seq=pmirror(10)").unwrap();
        // Generator 10, first block 11: the classic doubling sequence.
        assert_eq!(s.materialize_prefix(8).unwrap(), vec![1, 1, 0, 1, 0, 0, 1, 1]);
        assert_eq!(format_sequence(&s).unwrap(), "alpha=1; seq=pmirror(10)");
    }

    #[test]
    fn block_concatenation_body() {
        // d = (110)^inf, cuts 2,5,8 continuing by 3: blocks 10, 11010,
        // 11011010, ...
        let s = parse_sequence("alpha=1; seq=mconcat(d=(110)^inf;m=2,5,8,...)").unwrap();
        let got = s.materialize_prefix(15).unwrap();
        assert_eq!(got, vec![1, 0, 1, 1, 0, 1, 0, 1, 1, 0, 1, 1, 0, 1, 0]);
        assert_eq!(
            format_sequence(&s).unwrap(),
            "alpha=1; seq=mconcat(d=(110)^inf;m=2,5,8,...)"
        );
        // Deep reads keep following the arithmetic continuation.
        assert!(s.digit(10_000).is_ok());
    }

    #[test]
    fn block_concatenation_rejects_zero_cut_digit() {
        // d = (10)^inf has d_2 = 0: the second cut cannot be decremented.
        let s = parse_sequence("alpha=1; seq=mconcat(d=(10)^inf;m=2,4,...)").unwrap();
        match s.digit(3) {
            Err(Error::NotDPositive { k: 1, m: 2 }) => {}
            other => panic!("expected a zero-digit cut failure, got {other:?}"),
        }
        // A constant continuation hits the same check eagerly.
        match parse_sequence("alpha=1; seq=mconcat(d=(10)^inf;m=2,2,...)") {
            Err(Error::NotDPositive { k: 1, m: 2 }) => {}
            other => panic!("expected a zero-digit cut failure, got {other:?}"),
        }
    }

    #[test]
    fn constant_cut_lists_collapse_to_periodic_form() {
        // d = (110)^inf with every cut 2: blocks d_1 d_2^- = 10 repeated.
        let s = parse_sequence("alpha=1; seq=mconcat(d=(110)^inf;m=2,2,...)").unwrap();
        let (pre, per) = s.as_eventually_periodic().expect("constant cuts are periodic");
        assert!(pre.is_empty());
        assert_eq!(per.digits(), &[1, 0]);
        // Mixed lead-in cuts: 11010·10·10·… collapses to 1·(10)^∞.
        let t = parse_sequence("alpha=1; seq=mconcat(d=(110)^inf;m=5,2,2,...)").unwrap();
        let (pre, per) = t.as_eventually_periodic().unwrap();
        assert_eq!(pre.digits(), &[1]);
        assert_eq!(per.digits(), &[1, 0]);
        assert_eq!(t.materialize_prefix(9).unwrap(), vec![1, 1, 0, 1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn growing_cut_lists_record_their_shape() {
        let s = parse_sequence("alpha=1; seq=mconcat(d=(110)^inf;m=2,5,8,...)").unwrap();
        assert_eq!(s.structural_kind(), Some(StructuralKind::PrefixConcatUnboundedCuts));
        // A finite list has an end, hence no unbounded-cut structure.
        let t = parse_sequence("alpha=1; seq=mconcat(d=(110)^inf;m=5,2)").unwrap();
        assert_eq!(t.structural_kind(), None);
        assert_eq!(
            t.materialize_prefix(7).unwrap(),
            vec![1, 1, 0, 1, 0, 1, 0],
            "non-monotone finite cut lists are legal"
        );
        assert!(t.digit(8).is_err(), "reads past a finite cut list fail");
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        for bad in [
            "alpha=1; seq=110",                       // no infinite tail
            "alpha=1; seq=(10)^2",                    // finite power only
            "alpha=1; seq=1pmirror(10)",              // prefix before pmirror
            "alpha=1; seq=(10)^inf(0)^inf",           // trailing content
            "alpha=1; seq=(2)^inf",                   // digit out of range
            "alpha=1; seq=()^inf",                    // empty group
            "alpha=1; seq=(10)^0(1)^inf",             // zero repeat
            "alpha=0; seq=(0)^inf",                   // degenerate alphabet
            "seq=(10)^inf",                           // missing alpha
            "alpha=1; seq=mconcat(d=(110)^inf;m=5,2,...)", // decreasing continuation
            "alpha=1; seq=mconcat(d=(110)^inf;m=0,2)", // zero cut length
            "alpha=1; seq=mconcat(d=(110)^inf;m=2,...)", // continuation needs two
            "alpha=1; seq=(10^inf",                   // unbalanced parens
        ] {
            assert!(parse_sequence(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse_sequence("alpha=1; seq=11 (01)^inf").unwrap();
        let b = parse_sequence("alpha=1;seq=11(01)^inf").unwrap();
        assert_eq!(a.materialize_prefix(8).unwrap(), b.materialize_prefix(8).unwrap());
    }
}
