//! Certified root location for monotone functions.

use super::real::{RefinableReal, SignFn};
use super::PrecisionContext;
use crate::Result;
use num_rational::BigRational;
use std::sync::Arc;

/// Certified sign of a function value. `Zero` must only be reported when the
/// implementation can prove exact equality (rational arithmetic, field
/// arithmetic); enclosure-based oracles escalate precision and report an
/// error if a strict sign never emerges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of_rational(q: &BigRational) -> Sign {
        use num_traits::Signed;
        if q.is_positive() {
            Sign::Pos
        } else if q.is_negative() {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }
}

/// Locate the root of a monotone function inside `(lo, hi)` by bisection.
///
/// The oracle must have opposite certified signs at the endpoints (else
/// `NoSignChange`). The result is refined until its enclosure width is at
/// most `tol` and stays refinable afterwards: the returned real carries the
/// oracle and continues bisecting on demand.
///
/// Exact roots are handled: if a probe point is certified as a root the
/// enclosure collapses to it, and probe points where the sign cannot be
/// decided (an enclosure-only oracle sitting exactly on its root) are
/// sidestepped by perturbed probes, which is safe because a monotone
/// function has at most one root.
pub fn solve_monotone(
    f: Arc<dyn SignFn>,
    lo: BigRational,
    hi: BigRational,
    tol: &BigRational,
    ctx: &PrecisionContext,
) -> Result<RefinableReal> {
    let root = RefinableReal::bisect_root(f, lo, hi, ctx)?;
    root.refine_to_width(tol)?;
    Ok(root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{CmpOutcome, Enclosure};
    use crate::Error;
    use num_traits::{Signed, Zero};
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    /// x^2 - 2, sign decided exactly on rationals.
    struct SquareMinusTwo;
    impl SignFn for SquareMinusTwo {
        fn sign_at(&self, x: &BigRational, _ctx: &PrecisionContext) -> Result<Sign> {
            Ok(Sign::of_rational(&(x * x - rat("2"))))
        }
    }

    /// x^3 - x^2 - x - 1, exact rational sign.
    struct TribonacciPoly;
    impl SignFn for TribonacciPoly {
        fn sign_at(&self, x: &BigRational, _ctx: &PrecisionContext) -> Result<Sign> {
            let v = x * x * x - x * x - x - rat("1");
            Ok(Sign::of_rational(&v))
        }
    }

    /// x - 2 with signs certified only through an interval of width 1e-30,
    /// so the sign at exactly 2 is never decidable. Exercises the perturbed
    /// probes.
    struct FuzzyLine;
    impl SignFn for FuzzyLine {
        fn sign_at(&self, x: &BigRational, ctx: &PrecisionContext) -> Result<Sign> {
            let v = x - rat("2");
            let eps = rat("1/1000000000000000000000000000000");
            if v.abs() > eps {
                Ok(Sign::of_rational(&v))
            } else if v.is_zero() {
                Err(Error::PrecisionExhausted {
                    bits: ctx.max_bits,
                    context: "exact root, enclosure never separates".to_string(),
                })
            } else {
                Ok(Sign::of_rational(&v))
            }
        }
    }

    #[test]
    fn locates_sqrt_two() {
        let ctx = PrecisionContext::default();
        let tol = rat("1/1000000000000");
        let r = solve_monotone(Arc::new(SquareMinusTwo), rat("1"), rat("2"), &tol, &ctx).unwrap();
        let e = r.enclosure();
        assert!(e.width() <= tol);
        assert!(e.lo() < &rat("14142135623731/10000000000000"));
        assert!(e.hi() > &rat("14142135623730/10000000000000"));
    }

    #[test]
    fn tribonacci_root_to_high_precision() {
        let ctx = PrecisionContext::default();
        let tol = rat("1/100000000000000000000");
        let r = solve_monotone(Arc::new(TribonacciPoly), rat("1"), rat("2"), &tol, &ctx).unwrap();
        // 1.8392867552141611325518525646532866...
        let e = r.enclosure();
        assert!(e.lo() < &rat("18392867552141612/10000000000000000"));
        assert!(e.hi() > &rat("18392867552141611/10000000000000000"));
        // Residual of the defining cubic over the enclosure must be tiny.
        let x = Enclosure::new(e.lo().clone(), e.hi().clone());
        let p = crate::numerics::IntPoly::from_i64(&[-1, -1, -1, 1]);
        let residual = p.eval_enclosure(&x, 256);
        assert!(residual.contains(&rat("0")));
        assert!(residual.width() < rat("1/10000000000"));
    }

    #[test]
    fn no_sign_change_is_rejected() {
        let ctx = PrecisionContext::default();
        let tol = rat("1/1000");
        let e = solve_monotone(Arc::new(SquareMinusTwo), rat("2"), rat("3"), &tol, &ctx);
        assert!(matches!(e, Err(Error::NoSignChange { .. })));
    }

    #[test]
    fn exact_rational_root_collapses_to_a_point() {
        // Root of x^2 - 2x over (1, 3) is 2; the first midpoint hits it.
        struct P;
        impl SignFn for P {
            fn sign_at(&self, x: &BigRational, _ctx: &PrecisionContext) -> Result<Sign> {
                Ok(Sign::of_rational(&(x * x - rat("2") * x)))
            }
        }
        let ctx = PrecisionContext::default();
        let r = solve_monotone(Arc::new(P), rat("1"), rat("3"), &rat("1/1000000"), &ctx).unwrap();
        let e = r.enclosure();
        assert!(e.is_point());
        assert_eq!(e.lo(), &rat("2"));
    }

    #[test]
    fn undecidable_midpoint_is_sidestepped() {
        // Root exactly at 2, oracle cannot certify the sign there; the
        // bracket (1, 3) puts the first midpoint right on it.
        let ctx = PrecisionContext::default();
        let tol = rat("1/1000000000");
        let r = solve_monotone(Arc::new(FuzzyLine), rat("1"), rat("3"), &tol, &ctx).unwrap();
        let e = r.enclosure();
        assert!(e.width() <= tol);
        assert!(e.contains(&rat("2")));
    }

    #[test]
    fn solved_roots_remain_refinable_and_comparable() {
        let ctx = PrecisionContext::default();
        let tol = rat("1/1000");
        let r = solve_monotone(Arc::new(SquareMinusTwo), rat("1"), rat("2"), &tol, &ctx).unwrap();
        r.refine_to_bits(200).unwrap();
        assert!(r.width() <= crate::numerics::pow2(-200));
        let below = RefinableReal::from_rational(rat("141421356237309504/100000000000000000"));
        assert_eq!(r.compare(&below, &ctx).unwrap(), CmpOutcome::Greater);
    }
}
