//! The β-adic metric on sequence space: ρ(x, y) = β^{1−n*} where n* is the
//! index of the first differing digit.

use super::lex::{lex_compare, LexVerdict};
use super::seq::SymbolicSequence;
use crate::numerics::{Enclosure, RefinableReal};
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::One;

/// Distance computations at a fixed base. The base is kept as a refinable
/// real so distances inherit its precision on demand.
#[derive(Clone)]
pub struct MetricContext {
    beta: RefinableReal,
    horizon: u64,
}

impl MetricContext {
    /// `beta` must exceed 1 for ρ to be an ultrametric; this is not checked
    /// here because the base's enclosure may still be wide, but distances at
    /// a base at or below 1 are meaningless.
    pub fn new(beta: RefinableReal, horizon: u64) -> Self {
        MetricContext { beta, horizon }
    }

    pub fn beta(&self) -> &RefinableReal {
        &self.beta
    }

    /// ρ(x, y) = β^{1−n*}, n* the first index where x and y differ; 0 when
    /// they are decidably equal. Sequences that merely agree to the scan
    /// horizon are reported as indistinguishable rather than assigned a
    /// fake distance.
    pub fn rho(&self, x: &SymbolicSequence, y: &SymbolicSequence) -> Result<RefinableReal> {
        match lex_compare(x, y, self.horizon)? {
            LexVerdict::DecidedEqual => Ok(RefinableReal::from_integer(0)),
            LexVerdict::EqualToHorizon { checked } => {
                Err(Error::IndistinguishableToHorizon { horizon: checked })
            }
            LexVerdict::Less { witness } | LexVerdict::Greater { witness } => {
                self.power(1i64 - witness as i64)
            }
        }
    }

    /// β^e as a refinable real, for any integer e.
    fn power(&self, e: i64) -> Result<RefinableReal> {
        if e == 0 {
            return Ok(RefinableReal::from_integer(1));
        }
        // Exact when the base itself is an exact rational point.
        let base_enc = self.beta.enclosure();
        if base_enc.is_point() {
            let b = base_enc.lo().clone();
            let p = pow_rational(&b, e.unsigned_abs());
            let v = if e > 0 { p } else { BigRational::one() / p };
            return Ok(RefinableReal::from_rational(v));
        }
        let beta = self.beta.clone();
        let f: std::sync::Arc<dyn Fn(u32) -> Result<Enclosure> + Send + Sync> =
            std::sync::Arc::new(move |bits| {
                let enc = beta.enclosure_at_bits(bits)?;
                let mag = enc.pow_r(e.unsigned_abs(), bits);
                if e > 0 {
                    Ok(mag)
                } else {
                    Ok(mag.recip()?.rounded(bits))
                }
            });
        let initial = f(64)?;
        Ok(RefinableReal::computed(f, initial, crate::numerics::Tag::SolverOutput))
    }
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

/// Convenience: enclosure of β^e at the base's current precision.
pub fn power_enclosure(beta: &Enclosure, e: i64, bits: u32) -> Result<Enclosure> {
    if e >= 0 {
        Ok(beta.pow_r(e as u64, bits))
    } else {
        Ok(beta.pow_r(e.unsigned_abs(), bits).recip()?.rounded(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symseq::word::{Alphabet, Word};
    use num_bigint::BigInt;

    fn seq(alpha: u8, pre: &[u8], per: &[u8]) -> SymbolicSequence {
        SymbolicSequence::eventually_periodic(
            Word::new(Alphabet::new(alpha), pre.to_vec()).unwrap(),
            Word::new(Alphabet::new(alpha), per.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn distance_uses_first_difference() {
        // Differ first at index 3 with base 2: ρ = 2^{1-3} = 1/4.
        let ctx = MetricContext::new(RefinableReal::from_integer(2), 1000);
        let x = seq(1, &[], &[1, 1, 0, 0]);
        let y = seq(1, &[], &[1, 1, 1, 0]);
        let d = ctx.rho(&x, &y).unwrap();
        assert_eq!(d.enclosure().lo(), &rat(1, 4));
        assert!(d.enclosure().is_point());
    }

    #[test]
    fn equal_sequences_have_distance_zero() {
        let ctx = MetricContext::new(RefinableReal::from_integer(2), 1000);
        let x = seq(1, &[], &[1, 0]);
        let y = seq(1, &[1], &[0, 1]);
        let d = ctx.rho(&x, &y).unwrap();
        assert!(d.enclosure().is_point());
        assert_eq!(d.enclosure().lo(), &rat(0, 1));
    }

    #[test]
    fn indistinguishable_sequences_are_an_error_not_a_distance() {
        let m1 = SymbolicSequence::pmirror_rule(
            Word::new(Alphabet::new(1), vec![1, 1]).unwrap(),
        )
        .unwrap();
        let m2 = SymbolicSequence::pmirror_rule(
            Word::new(Alphabet::new(1), vec![1, 1]).unwrap(),
        )
        .unwrap();
        let ctx = MetricContext::new(RefinableReal::from_integer(2), 500);
        match ctx.rho(&m1, &m2) {
            Err(Error::IndistinguishableToHorizon { horizon }) => assert_eq!(horizon, 500),
            other => panic!("expected horizon error, got {other:?}"),
        }
    }

    #[test]
    fn irrational_base_distance_refines() {
        // Golden-ratio base: differ first at index 2 gives ρ = φ^{-1}.
        let phi = RefinableReal::poly_root(
            &crate::numerics::IntPoly::from_i64(&[-1, -1, 1]),
            rat(1, 1),
            rat(2, 1),
        )
        .unwrap();
        let ctx = MetricContext::new(phi, 1000);
        let x = seq(1, &[], &[1, 1, 0]);
        let y = seq(1, &[], &[1, 0, 1]);
        let d = ctx.rho(&x, &y).unwrap();
        d.refine_to_width(&rat(1, 1_000_000_000)).unwrap();
        let enc = d.enclosure();
        // 1/φ = 0.6180339887…
        assert!(enc.lo() < &rat(6_180_339_888, 10_000_000_000u64 as i64));
        assert!(enc.hi() > &rat(6_180_339_887, 10_000_000_000u64 as i64));
    }
}
