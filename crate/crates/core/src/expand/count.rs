//! Counting expansion prefixes: how many words w_1…w_n open at least one
//! expansion of x in the given base.

use super::{Backend, ExactValue, ExpansionDomain};
use crate::numerics::Enclosure;
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

impl ExpansionDomain {
    /// The number of length-`depth` words that are prefixes of some
    /// expansion of x: a word extends to a full expansion exactly when its
    /// remainder u = β^k x − Σ w_j β^{k−j} satisfies 0 ≤ u ≤ α/(β−1), both
    /// ends inclusive. The search walks the feasible tree; `budget` caps
    /// the number of visited nodes.
    pub fn count_expansion_prefixes(
        &self,
        x: &BigRational,
        depth: u32,
        budget: u64,
    ) -> Result<BigUint> {
        if x.is_negative() {
            return Ok(BigUint::zero());
        }
        match self.backend() {
            Backend::Rational { .. } | Backend::Algebraic { .. } => {
                let bound = self.value_bound_exact()?;
                let u0 = self.ev_from_rational(x.clone())?;
                if self.ev_cmp(&u0, &bound)? == Ordering::Greater {
                    return Ok(BigUint::zero());
                }
                let mut nodes: u64 = 0;
                self.count_exact(&u0, &bound, depth, budget, &mut nodes)
            }
            Backend::Interval { .. } => {
                let mut nodes: u64 = 0;
                let mut bits = self.context().working_bits;
                self.count_interval(x, &mut Vec::new(), depth, budget, &mut nodes, &mut bits)
            }
        }
    }

    /// Feasible digit range from u: a ∈ [max(0, ⌈βu − bound⌉), min(α, ⌊βu⌋)],
    /// computed with certified integer parts.
    fn count_exact(
        &self,
        u: &ExactValue,
        bound: &ExactValue,
        depth: u32,
        budget: u64,
        nodes: &mut u64,
    ) -> Result<BigUint> {
        if depth == 0 {
            return Ok(BigUint::from(1u32));
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::CountBudgetExceeded { budget });
        }
        let y = self.ev_scale(u);
        let alpha = BigInt::from(self.alphabet().alpha());
        // a ≤ βu (inclusive: remainder 0 extends as 0^∞).
        let a_max = self.ev_floor(&y)?.min(alpha.clone());
        // a ≥ βu − bound (inclusive: remainder at the cap extends as α^∞).
        let over = match (&y, bound) {
            (ExactValue::Rat(a), ExactValue::Rat(b)) => ExactValue::Rat(a - b),
            (ExactValue::Field(a), ExactValue::Field(b)) => match self.backend() {
                Backend::Algebraic { field, .. } => ExactValue::Field(field.sub(a, b)),
                _ => unreachable!("field values only arise on the algebraic backend"),
            },
            _ => unreachable!("mixed backend values"),
        };
        let a_min = ceil_exact(self, &over)?.max(BigInt::zero());
        if a_min > a_max {
            return Ok(BigUint::zero());
        }
        let lo = a_min.to_u8().expect("digit range within alphabet");
        let hi = a_max.to_u8().expect("digit range within alphabet");
        let mut total = BigUint::zero();
        for a in lo..=hi {
            let next = self.ev_sub_integer(&y, a as i64);
            total += self.count_exact(&next, bound, depth - 1, budget, nodes)?;
        }
        Ok(total)
    }

    /// Interval-mode walk: branch decisions come from enclosures of
    /// u = β^k x − Σ w_j β^{k−j}; when an enclosure straddles a decision
    /// boundary the whole path is replayed at higher precision. At a
    /// transcendental base no remainder hits a boundary exactly (the
    /// defining polynomial has leading coefficient 1), so escalation
    /// terminates; an exhausted ladder is reported honestly.
    fn count_interval(
        &self,
        x: &BigRational,
        path: &mut Vec<u8>,
        depth: u32,
        budget: u64,
        nodes: &mut u64,
        bits: &mut u32,
    ) -> Result<BigUint> {
        if depth == 0 {
            return Ok(BigUint::from(1u32));
        }
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::CountBudgetExceeded { budget });
        }
        let (lo, hi) = loop {
            match self.interval_digit_range(x, path, *bits)? {
                Some(range) => break range,
                None => {
                    let escalated =
                        self.context().bit_ladder().find(|&b| b > *bits).ok_or_else(|| {
                            Error::PrecisionExhausted {
                                bits: *bits,
                                context: format!(
                                    "digit range at depth {} sits on a decision boundary",
                                    path.len() + 1
                                ),
                            }
                        })?;
                    *bits = escalated;
                }
            }
        };
        if lo > hi {
            return Ok(BigUint::zero());
        }
        let mut total = BigUint::zero();
        for a in lo..=hi {
            path.push(a);
            let sub = self.count_interval(x, path, depth - 1, budget, nodes, bits)?;
            path.pop();
            total += sub;
        }
        Ok(total)
    }

    /// Certified [a_min, a_max] for the next digit after `path`, or None if
    /// the current precision cannot separate a remainder from a boundary.
    fn interval_digit_range(
        &self,
        x: &BigRational,
        path: &[u8],
        bits: u32,
    ) -> Result<Option<(u8, u8)>> {
        let beta = self.beta_enclosure(bits)?;
        let bound = self.value_bound_enclosure(bits)?;
        let mut u = Enclosure::point(x.clone());
        for &d in path {
            u = beta.mul_r(&u, bits).sub_r(&Enclosure::from_i64(d as i64), bits);
        }
        let y = beta.mul_r(&u, bits);
        let alpha = self.alphabet().alpha();

        // a_max = min(α, ⌊y⌋): certified when ⌊y.lo⌋ = ⌊y.hi⌋ or the whole
        // enclosure clears α.
        let a_max = if y.lo() > &BigRational::from_integer(BigInt::from(alpha)) {
            alpha as i64
        } else {
            let f_lo = y.lo().floor().to_integer();
            let f_hi = y.hi().floor().to_integer();
            if f_lo != f_hi {
                return Ok(None);
            }
            f_lo.to_i64().expect("digit-sized integer").min(alpha as i64)
        };

        let z = y.sub_r(&bound, bits);
        let a_min = if z.hi() < &BigRational::zero() {
            0i64
        } else {
            let c_lo = ceil_rational(z.lo());
            let c_hi = ceil_rational(z.hi());
            if c_lo != c_hi {
                return Ok(None);
            }
            c_lo.to_i64().expect("digit-sized integer").max(0)
        };
        if a_min > a_max {
            // Empty certified range: infeasible node.
            return Ok(Some((1, 0)));
        }
        Ok(Some((a_min as u8, a_max as u8)))
    }
}

fn ceil_rational(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

/// Exact ⌈v⌉ for a backend value, via ⌈v⌉ = −⌊−v⌋ in the field case.
fn ceil_exact(domain: &ExpansionDomain, v: &ExactValue) -> Result<BigInt> {
    match v {
        ExactValue::Rat(q) => Ok(q.ceil().to_integer()),
        ExactValue::Field(_) => Ok(-domain.ev_floor(&domain.ev_scale_by_minus_one(v))?),
    }
}

impl ExpansionDomain {
    pub(crate) fn ev_scale_by_minus_one(&self, v: &ExactValue) -> ExactValue {
        match (self.backend(), v) {
            (Backend::Rational { .. }, ExactValue::Rat(q)) => ExactValue::Rat(-q),
            (Backend::Algebraic { field, .. }, ExactValue::Field(e)) => {
                ExactValue::Field(field.neg(e))
            }
            _ => unreachable!("value built for a different backend"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{IntPoly, PrecisionContext, RefinableReal};
    use crate::symseq::Alphabet;
    use num_traits::One;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    fn count(domain: &ExpansionDomain, n: u32) -> u64 {
        domain
            .count_expansion_prefixes(&BigRational::one(), n, 10_000_000)
            .unwrap()
            .to_u64()
            .unwrap()
    }

    #[test]
    fn golden_ratio_counts_grow_linearly() {
        let ctx = PrecisionContext::default();
        let phi = RefinableReal::poly_root(&IntPoly::from_i64(&[-1, -1, 1]), rat("1"), rat("2"))
            .unwrap();
        let d = ExpansionDomain::new(Alphabet::new(1), &phi, &ctx).unwrap();
        for n in 1..=8 {
            assert_eq!(count(&d, n), n as u64 + 1, "n = {n}");
        }
    }

    #[test]
    fn base_two_alpha_two_counts_are_odd_ladders() {
        let ctx = PrecisionContext::default();
        let two = RefinableReal::from_rational(rat("2"));
        let d = ExpansionDomain::new(Alphabet::new(2), &two, &ctx).unwrap();
        for n in 1..=10 {
            assert_eq!(count(&d, n), 2 * n as u64 + 1, "n = {n}");
        }
    }

    #[test]
    fn tetranacci_counts_match_exhaustive_feasibility() {
        // Cross-check the branch-and-bound against brute-force enumeration:
        // w extends to a full expansion of x iff the final remainder
        // β^n x − Σ w_j β^{n−j} lies in [0, α/(β−1)] (overshoot and
        // undershoot are both absorbing).
        let ctx = PrecisionContext::default();
        let beta = RefinableReal::poly_root(
            &IntPoly::from_i64(&[-1, -1, -1, -1, 1]),
            rat("3/2"),
            rat("2"),
        )
        .unwrap();
        let d = ExpansionDomain::new(Alphabet::new(1), &beta, &ctx).unwrap();
        let bound = d.value_bound_exact().unwrap();
        for n in 1..=8u32 {
            let mut brute = 0u64;
            for mask in 0u32..(1 << n) {
                let mut u = d.ev_from_rational(BigRational::one()).unwrap();
                for j in 0..n {
                    let digit = ((mask >> j) & 1) as i64;
                    u = d.ev_sub_integer(&d.ev_scale(&u), digit);
                }
                let nonneg =
                    d.ev_cmp_integer(&u, 0).unwrap() != std::cmp::Ordering::Less;
                let capped = d.ev_cmp(&u, &bound).unwrap() != std::cmp::Ordering::Greater;
                if nonneg && capped {
                    brute += 1;
                }
            }
            assert_eq!(count(&d, n), brute, "n = {n}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let ctx = PrecisionContext::default();
        let two = RefinableReal::from_rational(rat("2"));
        let d = ExpansionDomain::new(Alphabet::new(2), &two, &ctx).unwrap();
        match d.count_expansion_prefixes(&BigRational::one(), 30, 10) {
            Err(Error::CountBudgetExceeded { budget: 10 }) => {}
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn boundary_values_count_correctly() {
        let ctx = PrecisionContext::default();
        let beta = RefinableReal::from_rational(rat("7/4"));
        let d = ExpansionDomain::new(Alphabet::new(1), &beta, &ctx).unwrap();
        // α/(β−1) = 4/3: x just above it is unrepresentable.
        assert_eq!(
            d.count_expansion_prefixes(&rat("3/2"), 4, 1000).unwrap(),
            BigUint::zero()
        );
        assert_eq!(
            d.count_expansion_prefixes(&rat("-1"), 4, 1000).unwrap(),
            BigUint::zero()
        );
        // x = 0 has exactly the all-zeros prefix.
        assert_eq!(
            d.count_expansion_prefixes(&rat("0"), 10, 1000).unwrap(),
            BigUint::from(1u32)
        );
        // x at the supremum has exactly the all-α prefix.
        assert_eq!(
            d.count_expansion_prefixes(&rat("4/3"), 10, 1000).unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn interval_backend_matches_exact_backend() {
        use crate::numerics::{Sign, SignFn};
        use std::sync::Arc;
        struct SqrtThree;
        impl SignFn for SqrtThree {
            fn sign_at(
                &self,
                x: &BigRational,
                _ctx: &PrecisionContext,
            ) -> crate::Result<Sign> {
                Ok(Sign::of_rational(&(x * x - rat("3"))))
            }
        }
        let ctx = PrecisionContext::default();
        let opaque =
            RefinableReal::bisect_root(Arc::new(SqrtThree), rat("1"), rat("2"), &ctx).unwrap();
        let d_int = ExpansionDomain::new(Alphabet::new(1), &opaque, &ctx).unwrap();
        let beta = RefinableReal::poly_root(&IntPoly::from_i64(&[-3, 0, 1]), rat("3/2"), rat("2"))
            .unwrap();
        let d_alg = ExpansionDomain::new(Alphabet::new(1), &beta, &ctx).unwrap();
        for n in 1..=10 {
            assert_eq!(count(&d_int, n), count(&d_alg, n), "n = {n}");
        }
    }
}
