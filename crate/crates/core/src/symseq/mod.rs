//! Digits, finite words, and infinite symbolic sequences.
//!
//! Sequences are 1-indexed throughout the public API, matching the usual
//! expansion notation ω = ω_1 ω_2 ω_3 …; the digit alphabet is {0, …, α}.
//! Infinite sequences come with exact structural backends (eventually
//! periodic, mirror-doubling rule, lazy block concatenation) so that
//! lexicographic comparisons can be decided exactly whenever the structure
//! allows, and honestly reported as horizon-limited otherwise.

mod grammar;
mod lex;
mod metric;
mod seq;
mod word;
mod zfun;

pub use grammar::{format_sequence, parse_sequence, parse_word};
pub(crate) use grammar::mconcat_sequence;
pub use lex::{lex_compare, LexVerdict};
pub use metric::{power_enclosure, MetricContext};
pub use seq::{BlockGen, Repeat, StructuralKind, SymbolicSequence};
pub use word::{Alphabet, Word};
pub use zfun::{matching_stats, z_array};
