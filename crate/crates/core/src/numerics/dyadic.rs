//! Directed rounding of rationals to dyadic numbers.
//!
//! Exact rational arithmetic is used throughout the crate, but iterated
//! operations (expansion remainders, interval Horner evaluation, series)
//! would blow up denominators without control. These helpers round a
//! rational to a dyadic with roughly `bits` significant bits, in a chosen
//! direction, so enclosures stay sound while coefficient sizes stay bounded.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::Zero;

/// floor(log2 |q|), within ±1, from numerator/denominator bit lengths.
/// Exact enough for choosing a rounding scale. `q` must be nonzero.
fn magnitude_exponent(q: &BigRational) -> i64 {
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    nb - db
}

/// Round `q` down (toward −∞) to a dyadic with about `bits` significant bits.
pub fn round_down(q: &BigRational, bits: u32) -> BigRational {
    round_directed(q, bits, false)
}

/// Round `q` up (toward +∞) to a dyadic with about `bits` significant bits.
pub fn round_up(q: &BigRational, bits: u32) -> BigRational {
    round_directed(q, bits, true)
}

fn round_directed(q: &BigRational, bits: u32, up: bool) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    // Scale so q * 2^shift has about `bits` bits, then take floor/ceil.
    let shift = bits as i64 - magnitude_exponent(q);
    if shift <= 0 {
        // q is already huge compared to the precision; keep the integer part
        // scaled down. floor/ceil of q / 2^(-shift).
        let k = (-shift) as u64;
        let denom = q.denom() * (BigInt::from(1) << k);
        let i = div_directed(q.numer(), &denom, up);
        return BigRational::from_integer(i) * super::pow2(k as i64);
    }
    let k = shift as u64;
    let numer = q.numer() * (BigInt::from(1) << k);
    let i = div_directed(&numer, q.denom(), up);
    BigRational::new(i, BigInt::from(1) << k)
}

/// floor or ceil of numer/denom with denom > 0.
fn div_directed(numer: &BigInt, denom: &BigInt, up: bool) -> BigInt {
    debug_assert!(denom.sign() == Sign::Plus);
    let (quot, rem) = num_integer::Integer::div_mod_floor(numer, denom);
    if up && !rem.is_zero() {
        quot + 1
    } else {
        quot
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    #[test]
    fn rounding_brackets_the_value() {
        let q = rat("355/113");
        let lo = round_down(&q, 24);
        let hi = round_up(&q, 24);
        assert!(lo <= q && q <= hi);
        assert!(&hi - &lo < rat("1/1000000"));
    }

    #[test]
    fn exact_dyadics_are_fixed_points() {
        let q = rat("7/8");
        assert_eq!(round_down(&q, 16), q);
        assert_eq!(round_up(&q, 16), q);
    }

    #[test]
    fn negative_values_round_toward_the_right_side() {
        let q = rat("-355/113");
        let lo = round_down(&q, 24);
        let hi = round_up(&q, 24);
        assert!(lo <= q && q <= hi);
        assert!(lo < hi);
    }

    #[test]
    fn zero_is_zero() {
        assert!(round_down(&BigRational::zero(), 10).is_zero());
        assert!(round_up(&BigRational::zero(), 10).is_zero());
    }

    #[test]
    fn huge_values_still_bracket() {
        // Magnitude far above 2^bits: rounding must scale, not truncate to 0.
        let q = rat("123456789123456789123456789/7");
        let lo = round_down(&q, 16);
        let hi = round_up(&q, 16);
        assert!(lo <= q && q <= hi);
        // Relative error stays near 2^-16.
        let rel = (&hi - &lo) / q.abs();
        assert!(rel < rat("1/30000"));
    }

    #[test]
    fn denominator_stays_dyadic_and_small() {
        let q = rat("123456789/987654321");
        let r = round_down(&q, 32);
        // Denominator is a power of two.
        let d = r.denom();
        assert_eq!(d & (d - 1u8), num_bigint::BigInt::from(0));
    }
}
