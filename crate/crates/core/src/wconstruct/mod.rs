//! Constructions of univoque-but-not-strongly-univoque sequences.
//!
//! Everything here is organized around index sequences M = (m_k): strictly
//! increasing cut positions along d = d(β) such that the concatenation
//!
//! ω(M) = d₁…d_{m₁}⁻ · d₁…d_{m₂}⁻ · d₁…d_{m₃}⁻ ⋯
//!
//! (each block a prefix of d with its last digit decremented) lands in the
//! univoque set without being strongly univoque. [`MSequence`] is the shared
//! carrier: terms are produced lazily by a driver behind a read budget, so a
//! construction that would need to scan astronomically far fails with an
//! explicit budget error instead of hanging.
//!
//! Two recursions build canonical index sequences:
//!
//! * [`build_m0_key`] covers bases whose reflected expansion recurs with
//!   bounded match lengths; it extracts the two recurrence constants and
//!   emits cuts in arithmetic-like progressions.
//! * [`build_m0_critical`] covers the opposite regime, where match lengths
//!   between the reflected expansion and d grow without bound (the
//!   mirror-doubling bases); its cuts grow geometrically.
//!
//! On top of those, [`subsequence_for_rate`] thins an index sequence to meet
//! a growth target θ, [`rate_checkpoints`] certifies the resulting
//! convergence products, and [`fast_block_sequence`] /
//! [`fast_block_repeats`] / [`block_product`] build the mirror-block
//! products whose distance to strong univoqueness decays at a prescribed
//! rate. [`omega_of_m`] assembles the actual sequence ω(M) from any index
//! sequence.

mod critical;
mod key;
mod msequence;
mod omega;
mod rate;

pub use critical::build_m0_critical;
pub use key::build_m0_key;
pub use msequence::{CriticalStep, KeyStep, MSequence, Provenance, DEFAULT_READ_BUDGET};
pub use omega::omega_of_m;
pub use rate::{
    block_product, fast_block_repeats, fast_block_sequence, rate_checkpoints,
    subsequence_for_rate, RateSpec, ThetaFn,
};
