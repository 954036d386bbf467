//! Adaptive-precision real arithmetic.
//!
//! The model: a real number is an enclosure `[lo, hi]` of exact rationals
//! together with a way to shrink it on demand. Arithmetic is performed on
//! enclosures with directed rounding at a working precision, so every
//! computed interval provably contains the exact value. Predicates (sign
//! tests, comparisons) escalate precision geometrically until they either
//! certify an answer or hit the configured ceiling, in which case they
//! report indecision rather than guessing.

mod dfloat;
mod dyadic;
mod elem;
mod enclosure;
mod field;
mod poly;
mod real;
mod solve;

pub use dfloat::{DFloat, Dir};
pub use elem::{ln_enclosure, log_ratio, nth_root_enclosure};
pub use enclosure::{rational_decimal, Enclosure};
pub use field::{FieldElem, PolyField};
pub use poly::{IntPoly, SturmChain};
pub use real::{AlgebraicForm, CmpOutcome, Origin, RefinableReal, SignFn, Tag};
pub use solve::{solve_monotone, Sign};

use num_rational::BigRational;

/// Precision policy for predicate evaluation.
///
/// `working_bits` is the precision at which a decision is first attempted;
/// on indecision the bit count is multiplied by `escalation_factor` until it
/// exceeds `max_bits`, at which point the predicate gives up.
#[derive(Debug, Clone)]
pub struct PrecisionContext {
    pub working_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext { working_bits: 128, max_bits: 4096, escalation_factor: 2 }
    }
}

impl PrecisionContext {
    pub fn new(working_bits: u32, max_bits: u32) -> Self {
        PrecisionContext { working_bits, max_bits, escalation_factor: 2 }
    }

    /// The escalation ladder: working_bits, working_bits * factor, …, capped
    /// at (and including) max_bits.
    pub fn bit_ladder(&self) -> impl Iterator<Item = u32> {
        let max = self.max_bits.max(8);
        let factor = self.escalation_factor.max(2);
        let mut next = Some(self.working_bits.clamp(8, max));
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur >= max { None } else { Some(cur.saturating_mul(factor).min(max)) };
            Some(cur)
        })
    }

    /// A context with the ceiling raised to at least `bits`.
    pub fn with_max_bits(&self, bits: u32) -> Self {
        PrecisionContext { max_bits: bits.max(self.working_bits), ..self.clone() }
    }
}

/// 2^k as a positive rational, for k possibly negative.
pub(crate) fn pow2(k: i64) -> BigRational {
    use num_bigint::BigInt;
    use num_traits::One;
    let one = BigInt::one();
    if k >= 0 {
        BigRational::from_integer(one << (k as usize))
    } else {
        BigRational::new(one.clone(), one << ((-k) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ladder_escalates_to_ceiling() {
        let ctx = PrecisionContext::new(128, 1024);
        let ladder: Vec<u32> = ctx.bit_ladder().collect();
        assert_eq!(ladder, vec![128, 256, 512, 1024]);
    }

    #[test]
    fn bit_ladder_single_step_when_working_equals_max() {
        let ctx = PrecisionContext::new(256, 256);
        let ladder: Vec<u32> = ctx.bit_ladder().collect();
        assert_eq!(ladder, vec![256]);
    }

    #[test]
    fn bit_ladder_caps_at_max_even_if_not_power_step() {
        let ctx = PrecisionContext::new(100, 300);
        let ladder: Vec<u32> = ctx.bit_ladder().collect();
        assert_eq!(ladder, vec![100, 200, 300]);
    }

    #[test]
    fn pow2_signs() {
        use num_traits::ToPrimitive;
        assert_eq!(pow2(3).to_f64().unwrap(), 8.0);
        assert_eq!(pow2(-2).to_f64().unwrap(), 0.25);
        assert_eq!(pow2(0).to_f64().unwrap(), 1.0);
    }
}
