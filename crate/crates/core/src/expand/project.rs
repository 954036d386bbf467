//! The value map Π(ω) = Σ_{j≥1} ω_j β^{−j} and its inverse problem: find
//! the base at which a prescribed sequence has value 1.

use super::{Backend, ExpansionDomain};
use crate::numerics::{
    solve_monotone, Enclosure, PrecisionContext, RefinableReal, Sign, SignFn, Tag,
};
use crate::symseq::{Alphabet, SymbolicSequence};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

impl ExpansionDomain {
    /// Π(ω) as a refinable real: exact (a rational or an element of ℚ(β))
    /// when ω is eventually periodic and the base has exact structure,
    /// otherwise an on-demand enclosure with a certified geometric tail
    /// bound.
    pub fn project(&self, omega: &SymbolicSequence) -> Result<RefinableReal> {
        if omega.alphabet() != self.alphabet() {
            return Err(Error::InvalidInput(
                "sequence alphabet differs from the domain's".to_string(),
            ));
        }
        if let Some((pre, per)) = omega.as_eventually_periodic() {
            match self.backend() {
                Backend::Rational { beta } => {
                    let v = periodic_value_rational(beta, pre.digits(), per.digits());
                    return Ok(RefinableReal::from_rational(v));
                }
                Backend::Algebraic { field, beta } => {
                    // Horner for the preperiod and one period in ℚ(β).
                    let inv = field.inv(beta)?;
                    let horner = |digits: &[u8]| {
                        let mut acc = field.zero();
                        for &d in digits.iter().rev() {
                            acc = field.mul(
                                &inv,
                                &field.add(
                                    &acc,
                                    &field.from_rational(BigRational::from_integer(
                                        BigInt::from(d),
                                    )),
                                ),
                            );
                        }
                        acc
                    };
                    let s_pre = horner(pre.digits());
                    let s_per = horner(per.digits());
                    // Π = s_pre + β^{−|pre|}·s_per / (1 − β^{−|per|}).
                    let shift = field.pow(&inv, pre.len() as u64);
                    let per_scale = field.pow(&inv, per.len() as u64);
                    let denom = field.sub(&field.one(), &per_scale);
                    let tail = field.div(&field.mul(&shift, &s_per), &denom)?;
                    let total = field.add(&s_pre, &tail);
                    return Ok(RefinableReal::field_element(
                        field.clone(),
                        total,
                        Tag::SolverOutput,
                    ));
                }
                Backend::Interval { .. } => {}
            }
        }
        // General case: partial sums with a certified tail bound, refined on
        // demand.
        let domain = self.clone();
        let omega = omega.clone();
        let f: Arc<dyn Fn(u32) -> Result<Enclosure> + Send + Sync> =
            Arc::new(move |bits| projection_enclosure(&domain, &omega, bits));
        let initial = f(64)?;
        Ok(RefinableReal::computed(f, initial, Tag::SolverOutput))
    }
}

/// Exact value of pre·per^∞ at a rational base.
fn periodic_value_rational(beta: &BigRational, pre: &[u8], per: &[u8]) -> BigRational {
    let inv = beta.recip();
    let horner = |digits: &[u8]| {
        let mut acc = BigRational::zero();
        for &d in digits.iter().rev() {
            acc = &inv * (acc + BigRational::from_integer(BigInt::from(d)));
        }
        acc
    };
    let s_pre = horner(pre);
    let s_per = horner(per);
    let shift = pow_rational(&inv, pre.len() as u64);
    let per_scale = pow_rational(&inv, per.len() as u64);
    s_pre + shift * s_per / (BigRational::one() - per_scale)
}

fn pow_rational(b: &BigRational, mut k: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut sq = b.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc *= &sq;
        }
        k >>= 1;
        sq = &sq * &sq;
    }
    acc
}

/// Enclosure of Π(ω) with both endpoints certified: a partial interval
/// Horner sum plus [0, tail] where tail ≥ α·β^{−N}/(β−1).
fn projection_enclosure(
    domain: &ExpansionDomain,
    omega: &SymbolicSequence,
    bits: u32,
) -> Result<Enclosure> {
    let work = bits + 16;
    let beta = domain.beta_enclosure(work)?;
    let inv = beta.recip()?.rounded(work);
    let bound = domain.value_bound_enclosure(work)?;
    let target = crate::numerics::pow2(-(bits as i64));

    let mut n: usize = 32.max((bits as usize) / 2);
    loop {
        // Tail after n digits: at most α/(β−1)·β^{−n}.
        let tail_hi = bound.mul_r(&inv.pow_r(n as u64, work), work).hi().clone();
        if tail_hi <= target {
            let digits = omega.materialize_prefix(n)?;
            let mut acc = Enclosure::point(BigRational::zero());
            for &d in digits.iter().rev() {
                acc = inv.mul_r(
                    &acc.add_r(&Enclosure::from_i64(d as i64), work),
                    work,
                );
            }
            let tail = Enclosure::new(BigRational::zero(), tail_hi);
            return Ok(acc.add_r(&tail, work));
        }
        if n >= (1 << 26) {
            return Err(Error::HorizonExhausted {
                steps: n as u64,
                context: "projection tail shrinks too slowly at this base".to_string(),
            });
        }
        n *= 2;
    }
}

/// Sign oracle for Π_q(ω) − 1 as a function of the rational base q,
/// decreasing in q. Exact for eventually periodic ω; otherwise decided from
/// partial sums with tail bounds at escalating precision.
struct ProjectionRoot {
    omega: SymbolicSequence,
    alphabet: Alphabet,
}

impl SignFn for ProjectionRoot {
    fn sign_at(&self, q: &BigRational, ctx: &PrecisionContext) -> Result<Sign> {
        let one = BigRational::one();
        if let Some((pre, per)) = self.omega.as_eventually_periodic() {
            let v = periodic_value_rational(q, pre.digits(), per.digits());
            return Ok(Sign::of_rational(&(v - one)));
        }
        let alpha_q = BigRational::from_integer(BigInt::from(self.alphabet.alpha()));
        let inv = q.recip();
        let bound = &alpha_q / (q - &one);
        let mut n: usize = 64;
        for bits in ctx.bit_ladder() {
            let target = crate::numerics::pow2(-(bits as i64));
            while &bound * pow_rational(&inv, n as u64) > target {
                n *= 2;
                if n >= (1 << 26) {
                    return Err(Error::HorizonExhausted {
                        steps: n as u64,
                        context: "projection tail shrinks too slowly at this base".to_string(),
                    });
                }
            }
            let digits = self.omega.materialize_prefix(n)?;
            let mut acc = BigRational::zero();
            for &d in digits.iter().rev() {
                acc = &inv * (acc + BigRational::from_integer(BigInt::from(d)));
            }
            // True value lies in [acc, acc + target].
            if &acc + &target < one {
                return Ok(Sign::Neg);
            }
            if acc > one {
                return Ok(Sign::Pos);
            }
        }
        Err(Error::PrecisionExhausted {
            bits: ctx.max_bits,
            context: format!("sign of Π(ω) − 1 at base {q} undecided"),
        })
    }

    fn describe(&self) -> String {
        "base ↦ Π(ω) − 1".to_string()
    }
}

/// Find the base β ∈ (lo, hi) at which Π_β(ω) = 1.
///
/// Π is strictly decreasing in the base for a fixed nonzero sequence, so
/// there is at most one such base; the bracket endpoints must straddle it.
/// The result stays refinable to arbitrary precision.
pub fn base_from_expansion(
    omega: &SymbolicSequence,
    lo: BigRational,
    hi: BigRational,
    tol: &BigRational,
    ctx: &PrecisionContext,
) -> Result<RefinableReal> {
    if lo <= BigRational::one() {
        return Err(Error::InvalidInput(
            "bracket must lie strictly above 1".to_string(),
        ));
    }
    let f = Arc::new(ProjectionRoot { omega: omega.clone(), alphabet: omega.alphabet() });
    solve_monotone(f, lo, hi, tol, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::IntPoly;
    use crate::symseq::Word;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    fn seq(alpha: u8, pre: &[u8], per: &[u8]) -> SymbolicSequence {
        SymbolicSequence::eventually_periodic(
            Word::new(Alphabet::new(alpha), pre.to_vec()).unwrap(),
            Word::new(Alphabet::new(alpha), per.to_vec()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn rational_projection_is_exact() {
        let ctx = PrecisionContext::default();
        let d = ExpansionDomain::new(
            Alphabet::new(2),
            &RefinableReal::from_rational(rat("2")),
            &ctx,
        )
        .unwrap();
        // Π_2((10)^∞) = (1/2)/(1 − 1/4) = 2/3.
        let v = d.project(&seq(2, &[], &[1, 0])).unwrap();
        assert!(v.enclosure().is_point());
        assert_eq!(v.enclosure().lo(), &rat("2/3"));
        // With a preperiod: Π_2(2(10)^∞) = 1 + 2/3/2 = 4/3.
        let v = d.project(&seq(2, &[2], &[1, 0])).unwrap();
        assert_eq!(v.enclosure().lo(), &rat("4/3"));
    }

    #[test]
    fn golden_ratio_projection_of_its_expansion_is_exactly_one() {
        let ctx = PrecisionContext::default();
        let phi = RefinableReal::poly_root(&IntPoly::from_i64(&[-1, -1, 1]), rat("1"), rat("2"))
            .unwrap();
        let d = ExpansionDomain::new(Alphabet::new(1), &phi, &ctx).unwrap();
        let v = d.project(&seq(1, &[], &[1, 0])).unwrap();
        // Exactness: the field element equals 1, so v − 1 has a zero
        // polynomial representation.
        match v.algebraic_form() {
            crate::numerics::AlgebraicForm::FieldElement { field, elem } => {
                let diff = field.sub(&elem, &field.one());
                assert!(diff.is_zero_poly(), "Π_φ((10)^∞) = 1 exactly");
            }
            crate::numerics::AlgebraicForm::Rational(q) => assert_eq!(q, rat("1")),
            other => panic!("expected exact form, got {other:?}"),
        }
    }

    #[test]
    fn aperiodic_projection_brackets_its_partial_sums() {
        let ctx = PrecisionContext::default();
        let d = ExpansionDomain::new(
            Alphabet::new(1),
            &RefinableReal::from_rational(rat("15/8")),
            &ctx,
        )
        .unwrap();
        let tm = SymbolicSequence::pmirror_rule(
            Word::new(Alphabet::new(1), vec![1, 1]).unwrap(),
        )
        .unwrap();
        let v = d.project(&tm).unwrap();
        v.refine_to_width(&rat("1/1000000000000000000000000000000")).unwrap();
        let enc = v.enclosure();
        // Partial sum of 200 digits: the true value exceeds it, but by less
        // than (8/15)^200 < 2^{-150}.
        let digits = tm.materialize_prefix(200).unwrap();
        let mut partial = BigRational::zero();
        let inv = rat("8/15");
        for &dd in digits.iter().rev() {
            partial = &inv * (partial + BigRational::from_integer(BigInt::from(dd)));
        }
        assert!(enc.hi() > &partial);
        assert!(enc.lo() < &(partial + crate::numerics::pow2(-150)));
    }

    #[test]
    fn base_recovery_finds_the_golden_ratio() {
        let ctx = PrecisionContext::default();
        let omega = seq(1, &[], &[1, 0]);
        let beta = base_from_expansion(
            &omega,
            rat("11/10"),
            rat("2"),
            &rat("1/100000000000000000000"),
            &ctx,
        )
        .unwrap();
        let enc = beta.enclosure();
        // φ = 1.6180339887498948482…
        assert!(enc.lo() < &rat("16180339887498948483/10000000000000000000"));
        assert!(enc.hi() > &rat("16180339887498948482/10000000000000000000"));
    }

    #[test]
    fn base_recovery_collapses_on_exact_rational_roots() {
        // (1)^∞ over α = 2 has value 1 exactly at β = 2.
        let ctx = PrecisionContext::default();
        let omega = seq(2, &[], &[1]);
        let beta =
            base_from_expansion(&omega, rat("3/2"), rat("5/2"), &rat("1/1000"), &ctx).unwrap();
        assert!(beta.enclosure().is_point());
        assert_eq!(beta.enclosure().lo(), &rat("2"));
    }

    #[test]
    fn base_recovery_from_an_aperiodic_sequence() {
        // The doubling sequence over α = 1: the root is the base whose
        // expansion of 1 it is; bracket it loosely and check the value
        // projects back to 1.
        let ctx = PrecisionContext::default();
        let tm = SymbolicSequence::pmirror_rule(
            Word::new(Alphabet::new(1), vec![1, 1]).unwrap(),
        )
        .unwrap();
        let beta =
            base_from_expansion(&tm, rat("3/2"), rat("2"), &rat("1/100000000000"), &ctx).unwrap();
        let enc = beta.enclosure();
        // Known value 1.78723165018296593…
        assert!(enc.lo() < &rat("178723165019/100000000000"));
        assert!(enc.hi() > &rat("178723165018/100000000000"));
        // And the projection of the sequence at the recovered base is 1 to
        // within the enclosure widths.
        let d = ExpansionDomain::new(Alphabet::new(1), &beta, &ctx).unwrap();
        let v = d.project(&tm).unwrap();
        v.refine_to_width(&rat("1/10000000000")).unwrap();
        assert!(v.enclosure().contains(&rat("1")));
    }
}
