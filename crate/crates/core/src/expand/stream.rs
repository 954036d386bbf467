//! The quasi-greedy expansion: digit by digit, with exact cycle detection
//! when the base supports exact arithmetic.

use super::{strict_floor_rational, Backend, ExactValue, ExpansionDomain};
use crate::numerics::Enclosure;
use crate::symseq::{SymbolicSequence, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::HashMap;

/// Result of expanding a value to a horizon.
#[derive(Debug, Clone)]
pub enum ExpansionOutcome {
    /// The remainder state repeated: the expansion is exactly eventually
    /// periodic and is returned with that structure.
    Periodic(SymbolicSequence),
    /// No repetition was found before the horizon; the digits produced so
    /// far are exact.
    Truncated { digits: Vec<u8> },
}

/// Streaming quasi-greedy expansion of a value x ∈ (0, α/(β−1)].
///
/// Each digit is the largest a ≤ α with a < β·r, where r is the running
/// remainder; the remainder is then β·r − a. Keeping the inequality strict
/// is what makes every expansion infinite (the remainder never reaches 0),
/// and it is certified per digit: exact backends decide boundary cases
/// outright, the interval backend escalates precision and fails honestly if
/// a digit sits too close to a boundary to resolve.
pub struct QuasiGreedyStream {
    domain: ExpansionDomain,
    digits: Vec<u8>,
    state: StreamState,
    cycle: Option<(usize, usize)>,
}

enum StreamState {
    Exact {
        r: ExactValue,
        /// Remainder states already seen, keyed canonically, valued by the
        /// number of digits emitted when the state was current.
        seen: HashMap<Vec<BigRational>, usize>,
    },
    Interval {
        x: BigRational,
        r: Enclosure,
        bits: u32,
    },
}

impl QuasiGreedyStream {
    pub(crate) fn new(domain: &ExpansionDomain, x: &BigRational) -> Result<Self> {
        if !x.is_positive() {
            return Err(Error::InvalidInput(
                "quasi-greedy expansions are defined for positive values".to_string(),
            ));
        }
        let state = match domain.backend() {
            Backend::Rational { .. } | Backend::Algebraic { .. } => {
                let r = domain.ev_from_rational(x.clone())?;
                let bound = domain.value_bound_exact()?;
                if domain.ev_cmp(&r, &bound)? == Ordering::Greater {
                    return Err(Error::InvalidInput(
                        "value exceeds α/(β−1) and has no expansion".to_string(),
                    ));
                }
                let mut seen = HashMap::new();
                seen.insert(domain.ev_key(&r), 0usize);
                StreamState::Exact { r, seen }
            }
            Backend::Interval { .. } => {
                let bits = domain.context().working_bits;
                let bound = domain.value_bound_enclosure(bits)?;
                if x > bound.hi() {
                    return Err(Error::InvalidInput(
                        "value exceeds α/(β−1) and has no expansion".to_string(),
                    ));
                }
                if x > bound.lo() {
                    return Err(Error::PrecisionExhausted {
                        bits,
                        context: "value too close to α/(β−1) to certify expandability"
                            .to_string(),
                    });
                }
                StreamState::Interval { x: x.clone(), r: Enclosure::point(x.clone()), bits }
            }
        };
        Ok(QuasiGreedyStream { domain: domain.clone(), digits: Vec::new(), state, cycle: None })
    }

    pub fn digits_so_far(&self) -> &[u8] {
        &self.digits
    }

    /// (preperiod length, period length) once the remainder state has been
    /// seen twice. Only exact backends detect cycles.
    pub fn detected_cycle(&self) -> Option<(usize, usize)> {
        self.cycle
    }

    /// Produce the next digit.
    pub fn next_digit(&mut self) -> Result<u8> {
        if let Some((pre, per)) = self.cycle {
            // Continue reading from the detected cycle without arithmetic.
            let idx = pre + (self.digits.len() - pre) % per;
            let d = self.digits[idx];
            self.digits.push(d);
            return Ok(d);
        }
        let alpha = self.domain.alphabet().alpha();
        match &mut self.state {
            StreamState::Exact { r, seen } => {
                let y = self.domain.ev_scale(r);
                let c = self.domain.ev_strict_floor(&y)?;
                debug_assert!(c >= BigInt::zero(), "remainder stayed positive");
                let d = if c >= BigInt::from(alpha) {
                    alpha
                } else {
                    c.to_u8().expect("digit candidate in 0..α")
                };
                let next = self.domain.ev_sub_integer(&y, d as i64);
                debug_assert!(
                    self.domain.ev_cmp_integer(&next, 0).map(|o| o == Ordering::Greater)
                        .unwrap_or(true),
                    "strict digit rule keeps the remainder positive"
                );
                self.digits.push(d);
                let key = self.domain.ev_key(&next);
                if let Some(&at) = seen.get(&key) {
                    self.cycle = Some((at, self.digits.len() - at));
                } else {
                    seen.insert(key, self.digits.len());
                }
                *r = next;
                Ok(d)
            }
            StreamState::Interval { x, r, bits } => {
                // Try at current precision; on ambiguity escalate and replay
                // the digits produced so far from x.
                loop {
                    let beta = self.domain.beta_enclosure(*bits)?;
                    let y = beta.mul_r(r, *bits);
                    if let Some(d) = certify_digit(&y, alpha) {
                        let next =
                            y.sub_r(&Enclosure::from_i64(d as i64), *bits);
                        self.digits.push(d);
                        *r = next;
                        return Ok(d);
                    }
                    let escalated = self
                        .domain
                        .context()
                        .bit_ladder()
                        .find(|&b| b > *bits)
                        .ok_or_else(|| Error::PrecisionExhausted {
                            bits: *bits,
                            context: format!(
                                "digit {} of the expansion sits on a decision boundary",
                                self.digits.len() + 1
                            ),
                        })?;
                    *bits = escalated;
                    let beta = self.domain.beta_enclosure(*bits)?;
                    let mut replay = Enclosure::point(x.clone());
                    for &d in &self.digits {
                        replay = beta
                            .mul_r(&replay, *bits)
                            .sub_r(&Enclosure::from_i64(d as i64), *bits);
                    }
                    *r = replay;
                }
            }
        }
    }

    /// Produce the next `n` digits.
    pub fn take_digits(&mut self, n: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.next_digit()?);
        }
        Ok(out)
    }

    /// Drive the stream until a cycle is detected or `horizon` digits have
    /// been produced, and package the outcome.
    pub fn run_to_structure(&mut self, horizon: usize) -> Result<ExpansionOutcome> {
        while self.cycle.is_none() && self.digits.len() < horizon {
            self.next_digit()?;
        }
        if let Some((pre_len, per_len)) = self.cycle {
            let alphabet = self.domain.alphabet();
            let pre = Word::new(alphabet, self.digits[..pre_len].to_vec())?;
            let per = Word::new(alphabet, self.digits[pre_len..pre_len + per_len].to_vec())?;
            Ok(ExpansionOutcome::Periodic(SymbolicSequence::eventually_periodic(pre, per)?))
        } else {
            Ok(ExpansionOutcome::Truncated { digits: self.digits.clone() })
        }
    }
}

/// Certify min(α, strict_floor(y)) from an enclosure of y, or report that
/// the enclosure is too wide to decide.
fn certify_digit(y: &Enclosure, alpha: u8) -> Option<u8> {
    let alpha_q = BigRational::from_integer(BigInt::from(alpha));
    if y.lo() > &alpha_q {
        return Some(alpha);
    }
    let c = strict_floor_rational(y.hi());
    if c < BigInt::zero() || c > BigInt::from(alpha) {
        return None;
    }
    let c_q = BigRational::from_integer(c.clone());
    if y.lo() > &c_q {
        Some(c.to_u8().expect("candidate in 0..=α"))
    } else {
        None
    }
}

impl ExpansionDomain {
    /// Quasi-greedy expansion stream of x ∈ (0, α/(β−1)].
    pub fn quasi_greedy(&self, x: &BigRational) -> Result<QuasiGreedyStream> {
        QuasiGreedyStream::new(self, x)
    }

    /// The expansion of 1, whose digits govern which sequences occur as
    /// expansions at this base.
    pub fn quasi_greedy_of_one(&self) -> Result<QuasiGreedyStream> {
        self.quasi_greedy(&BigRational::from_integer(BigInt::from(1)))
    }

    /// Expansion of 1 packaged structurally: exact periodic form when a
    /// remainder cycle is found within `horizon` digits.
    pub fn expansion_of_one(&self, horizon: usize) -> Result<ExpansionOutcome> {
        self.quasi_greedy_of_one()?.run_to_structure(horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{IntPoly, PrecisionContext, RefinableReal, Sign, SignFn};
    use crate::symseq::Alphabet;
    use std::str::FromStr;
    use std::sync::Arc;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    fn domain_rational(alpha: u8, beta: &str) -> ExpansionDomain {
        ExpansionDomain::new(
            Alphabet::new(alpha),
            &RefinableReal::from_rational(rat(beta)),
            &PrecisionContext::default(),
        )
        .unwrap()
    }

    fn domain_root(alpha: u8, coeffs: &[i64], lo: &str, hi: &str) -> ExpansionDomain {
        let beta =
            RefinableReal::poly_root(&IntPoly::from_i64(coeffs), rat(lo), rat(hi)).unwrap();
        ExpansionDomain::new(Alphabet::new(alpha), &beta, &PrecisionContext::default()).unwrap()
    }

    fn expansion_of_one(domain: &ExpansionDomain) -> (Vec<u8>, Vec<u8>) {
        match domain.expansion_of_one(10_000).unwrap() {
            ExpansionOutcome::Periodic(seq) => {
                let (pre, per) = seq.as_eventually_periodic().unwrap();
                (pre.digits().to_vec(), per.digits().to_vec())
            }
            ExpansionOutcome::Truncated { .. } => panic!("expected a cycle"),
        }
    }

    #[test]
    fn base_two_expansion_of_one_is_all_ones() {
        // α = 2, β = 2: the quasi-greedy expansion avoids the finite 2·0^∞.
        let d = domain_rational(2, "2");
        assert_eq!(expansion_of_one(&d), (vec![], vec![1]));
    }

    #[test]
    fn golden_ratio_expansion_of_one() {
        let d = domain_root(1, &[-1, -1, 1], "1", "2");
        assert_eq!(expansion_of_one(&d), (vec![], vec![1, 0]));
    }

    #[test]
    fn tribonacci_expansion_of_one() {
        let d = domain_root(1, &[-1, -1, -1, 1], "1", "2");
        assert_eq!(expansion_of_one(&d), (vec![], vec![1, 1, 0]));
    }

    #[test]
    fn one_plus_sqrt_three_expansion_of_one() {
        // x^2 − 2x − 2, α = 2: digits (21)^∞.
        let d = domain_root(2, &[-2, -2, 1], "5/2", "3");
        assert_eq!(expansion_of_one(&d), (vec![], vec![2, 1]));
    }

    #[test]
    fn base_three_halves_never_cycles_and_obeys_the_strict_rule() {
        // β = 3/2, α = 1: remainder denominators are exactly 2^k, so the
        // expansion of 1 is aperiodic and the stream must say so.
        let d = domain_rational(1, "3/2");
        match d.expansion_of_one(200).unwrap() {
            ExpansionOutcome::Truncated { digits } => assert_eq!(digits.len(), 200),
            ExpansionOutcome::Periodic(_) => panic!("no remainder cycle exists here"),
        }
        // Replay: every digit obeys the strict rule d_k < β·r_{k−1} ≤ d_k + 1.
        let mut s = d.quasi_greedy_of_one().unwrap();
        let digits = s.take_digits(50).unwrap();
        let beta = rat("3/2");
        let mut r = rat("1");
        for &dk in &digits {
            let y = &beta * &r;
            let d_q = BigRational::from_integer(BigInt::from(dk));
            assert!(d_q < y && y <= &d_q + BigRational::from_integer(BigInt::from(1)));
            r = y - d_q;
        }
    }

    #[test]
    fn value_at_representable_supremum_expands_to_all_alphas() {
        let d = domain_rational(2, "5/2");
        // α/(β−1) = 2/(3/2) = 4/3.
        let mut s = d.quasi_greedy(&rat("4/3")).unwrap();
        assert_eq!(s.take_digits(6).unwrap(), vec![2, 2, 2, 2, 2, 2]);
        // Just above the bound there is no expansion.
        assert!(d.quasi_greedy(&rat("134/100")).is_err());
    }

    #[test]
    fn digits_never_exceed_alpha_and_remainders_recycle() {
        let d = domain_root(1, &[-1, 0, -1, 1], "1", "2"); // x^3 = x^2 + 1
        let mut s = d.quasi_greedy_of_one().unwrap();
        let digits = s.take_digits(60).unwrap();
        assert!(digits.iter().all(|&x| x <= 1));
        assert!(s.detected_cycle().is_some(), "algebraic remainders repeat here");
    }

    /// √3 through a bisection oracle: the base is only an enclosure, so the
    /// stream must run in interval mode. Its digits must agree with the
    /// exact algebraic backend for the same number.
    #[test]
    fn interval_mode_agrees_with_algebraic_backend() {
        struct SqrtThree;
        impl SignFn for SqrtThree {
            fn sign_at(&self, x: &BigRational, _ctx: &PrecisionContext) -> crate::Result<Sign> {
                Ok(Sign::of_rational(&(x * x - rat("3"))))
            }
            fn describe(&self) -> String {
                "x^2 - 3".to_string()
            }
        }
        let ctx = PrecisionContext::default();
        let opaque =
            RefinableReal::bisect_root(Arc::new(SqrtThree), rat("1"), rat("2"), &ctx).unwrap();
        let interval_domain =
            ExpansionDomain::new(Alphabet::new(1), &opaque, &ctx).unwrap();
        let exact_domain = domain_root(1, &[-3, 0, 1], "3/2", "2");

        let via_interval =
            interval_domain.quasi_greedy_of_one().unwrap().take_digits(100).unwrap();
        let via_field = exact_domain.quasi_greedy_of_one().unwrap().take_digits(100).unwrap();
        assert_eq!(via_interval, via_field);
    }

    #[test]
    fn zero_and_negative_values_are_rejected() {
        let d = domain_rational(1, "3/2");
        assert!(d.quasi_greedy(&rat("0")).is_err());
        assert!(d.quasi_greedy(&rat("-1/2")).is_err());
    }
}
