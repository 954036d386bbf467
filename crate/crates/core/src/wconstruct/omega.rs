//! Assembling ω(M) = d₁⋯d_{m₁}⁻ · d₁⋯d_{m₂}⁻ · … from a cut sequence.
//!
//! Each block is the prefix of the base expansion at a cut, with its final
//! digit decremented; the d-positivity of the cuts (checked as terms
//! materialize) is exactly what keeps the decrement inside the alphabet.

use super::msequence::{MSequence, Provenance};
use crate::symseq::{BlockGen, Repeat, StructuralKind, SymbolicSequence, Word};
use crate::univoque::DExpansion;
use crate::{Error, Result};

/// The concatenation of decremented prefixes of the base expansion at the
/// cut lengths of M.
///
/// Exact structure is kept wherever it exists: a manual cut list with a
/// constant continuation collapses to an exact eventually periodic
/// sequence, and cuts produced by the two recursions are tagged with their
/// unbounded-cut shape over the base expansion, which is what keeps limsup
/// questions about the result decidable. Everything else streams lazily,
/// surfacing any d-positivity failure at the offending block.
pub fn omega_of_m(m: &MSequence) -> Result<SymbolicSequence> {
    if let Some((cuts, gap)) = m.manual_shape() {
        // Materializing the explicit cuts validates them (positivity of the
        // cut digits included) before any block is assembled.
        let explicit = m.terms(cuts.len())?;
        match (m.d(), gap) {
            (DExpansion::Exact(seq), _) => {
                let grammar = seq.structural_grammar().map(|dg| {
                    let mut list: Vec<String> =
                        explicit.iter().map(|v| v.to_string()).collect();
                    if gap.is_some() {
                        list.push("...".to_string());
                    }
                    format!("mconcat(d={};m={})", dg, list.join(","))
                });
                return crate::symseq::mconcat_sequence(seq.clone(), explicit, gap, grammar);
            }
            (DExpansion::Prefix(word), Some(0)) => {
                return prefix_constant_collapse(word, &explicit);
            }
            (DExpansion::Prefix(_), _) => {
                // Growing or finite cuts over a certified prefix: stream,
                // and fail honestly once a cut passes the prefix end.
            }
        }
    }

    let kind = match (m.provenance(), m.d()) {
        (
            Provenance::KeyConstruction { .. } | Provenance::CriticalCase,
            DExpansion::Exact(seq),
        ) => Some((StructuralKind::PrefixConcatUnboundedCuts, seq.clone())),
        _ => None,
    };
    let gen = OmegaGen { m: m.clone(), k: 0 };
    Ok(SymbolicSequence::from_blocks_tagged(
        m.d().alphabet(),
        Box::new(gen),
        "cut-concatenation",
        None,
        kind,
    ))
}

/// Constant cuts over a certified prefix still produce an exact sequence:
/// the listed blocks, then the final block forever.
fn prefix_constant_collapse(word: &Word, cuts: &[u64]) -> Result<SymbolicSequence> {
    let mut blocks: Vec<Vec<u8>> = Vec::with_capacity(cuts.len());
    for (i, &m) in cuts.iter().enumerate() {
        // Availability and positivity were validated when the terms
        // materialized; the checks here keep the function total.
        let mlen = usize::try_from(m)
            .map_err(|_| Error::InvalidInput("cut length exceeds addressable memory".to_string()))?;
        let mut digits = word.digits()[..mlen].to_vec();
        let last = digits.last_mut().expect("cut lengths are positive");
        if *last == 0 {
            return Err(Error::NotDPositive { k: i + 1, m });
        }
        *last -= 1;
        blocks.push(digits);
    }
    let per = blocks.last().expect("cut lists are nonempty").clone();
    let mut pre: Vec<u8> = blocks[..blocks.len() - 1].concat();
    // Absorb period copies from the end of the preperiod: w·p·p^∞ = w·p^∞.
    while pre.ends_with(&per) {
        pre.truncate(pre.len() - per.len());
    }
    SymbolicSequence::eventually_periodic(
        Word::new(word.alphabet(), pre)?,
        Word::new(word.alphabet(), per)?,
    )
}

/// Streams one decremented prefix per cut, pulling cuts (and their
/// validation) from the shared cut sequence on demand.
struct OmegaGen {
    m: MSequence,
    k: usize,
}

impl BlockGen for OmegaGen {
    fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
        self.k += 1;
        let Some(cut) = self.m.try_term(self.k)? else {
            return Ok(None);
        };
        let mlen = usize::try_from(cut)
            .map_err(|_| Error::InvalidInput("cut length exceeds addressable memory".to_string()))?;
        let mut digits = match self.m.d() {
            DExpansion::Exact(seq) => seq.materialize_prefix(mlen)?,
            // try_term read the digit at the cut, so the prefix covers it.
            DExpansion::Prefix(word) => word.digits()[..mlen].to_vec(),
        };
        let last = digits.last_mut().expect("cut lengths are positive");
        if *last == 0 {
            return Err(Error::NotDPositive { k: self.k, m: cut });
        }
        *last -= 1;
        Ok(Some((Word::new(self.m.d().alphabet(), digits)?, Repeat::finite_u64(1))))
    }
}
