//! Rational interval arithmetic with directed outward rounding.

use super::dyadic::{round_down, round_up};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// A closed interval `[lo, hi]` of rationals guaranteed to contain the exact
/// value it stands for.
///
/// Arithmetic comes in two flavours: exact (`add`, `mul`, …) which can grow
/// denominators, and rounded (`*_r` taking a bit count) which outward-rounds
/// both endpoints to dyadics of about that many significant bits. Iterated
/// computations should use the rounded flavour.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    lo: BigRational,
    hi: BigRational,
}

impl Enclosure {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi }
    }

    pub fn point(v: BigRational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::point(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Certified sign: Some(ordering vs zero) if the interval excludes zero
    /// on one side, None if it straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Certified comparison against another enclosure: decided only when the
    /// intervals are disjoint (or both are the same point).
    pub fn compare(&self, other: &Enclosure) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Outward-round both endpoints to about `bits` significant bits.
    pub fn rounded(&self, bits: u32) -> Enclosure {
        Enclosure { lo: round_down(&self.lo, bits), hi: round_up(&self.hi, bits) }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn add(&self, rhs: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }

    pub fn sub(&self, rhs: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo - &rhs.hi, hi: &self.hi - &rhs.lo }
    }

    pub fn mul(&self, rhs: &Enclosure) -> Enclosure {
        let c1 = &self.lo * &rhs.lo;
        let c2 = &self.lo * &rhs.hi;
        let c3 = &self.hi * &rhs.lo;
        let c4 = &self.hi * &rhs.hi;
        let mut lo = c1.clone();
        let mut hi = c1;
        for c in [c2, c3, c4] {
            if c < lo {
                lo = c.clone();
            }
            if c > hi {
                hi = c;
            }
        }
        Enclosure { lo, hi }
    }

    /// Reciprocal; errors if the interval contains zero.
    pub fn recip(&self) -> Result<Enclosure> {
        if self.contains_zero() {
            return Err(Error::IntervalDivisionByZero);
        }
        Ok(Enclosure { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    pub fn div(&self, rhs: &Enclosure) -> Result<Enclosure> {
        Ok(self.mul(&rhs.recip()?))
    }

    pub fn add_r(&self, rhs: &Enclosure, bits: u32) -> Enclosure {
        self.add(rhs).rounded(bits)
    }

    pub fn sub_r(&self, rhs: &Enclosure, bits: u32) -> Enclosure {
        self.sub(rhs).rounded(bits)
    }

    pub fn mul_r(&self, rhs: &Enclosure, bits: u32) -> Enclosure {
        self.mul(rhs).rounded(bits)
    }

    pub fn div_r(&self, rhs: &Enclosure, bits: u32) -> Result<Enclosure> {
        Ok(self.div(rhs)?.rounded(bits))
    }

    /// Integer power by repeated squaring with rounding at each step.
    pub fn pow_r(&self, mut exp: u64, bits: u32) -> Enclosure {
        let mut result = Enclosure::point(BigRational::one());
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul_r(&base, bits);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_r(&base, bits);
            }
        }
        result
    }

    /// Intersection, for combining two enclosures of the same value.
    /// Errors if they are disjoint (which would mean one of them is wrong).
    pub fn intersect(&self, other: &Enclosure) -> Result<Enclosure> {
        let lo = if self.lo >= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi <= other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo > hi {
            return Err(Error::InvalidInput(
                "disjoint enclosures of the same value".to_string(),
            ));
        }
        Ok(Enclosure { lo, hi })
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        let lo = if self.lo <= other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi >= other.hi { self.hi.clone() } else { other.hi.clone() };
        Enclosure { lo, hi }
    }

    /// Absolute-value enclosure.
    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = if -&self.lo > self.hi { -self.lo.clone() } else { self.hi.clone() };
            Enclosure { lo: BigRational::zero(), hi: m }
        }
    }

    /// Decimal rendering of the midpoint with enough digits for the current
    /// width, annotated with a radius bound. For diagnostics and CLI output.
    pub fn decimal(&self, max_digits: usize) -> String {
        let width = self.width();
        let digits = if width.is_zero() {
            max_digits
        } else {
            // Count decimal digits resolved by the current width.
            let mut k = 0usize;
            let mut w = width.clone();
            let ten = BigRational::from_integer(BigInt::from(10));
            let one = BigRational::one();
            while w < one && k < max_digits {
                w *= &ten;
                k += 1;
            }
            k.saturating_sub(1).min(max_digits)
        };
        rational_decimal(&self.midpoint(), digits)
    }
}

/// Fixed-point decimal rendering of a rational, truncated toward zero.
pub fn rational_decimal(q: &BigRational, digits: usize) -> String {
    let neg = q.is_negative();
    let a = q.abs();
    let scale = BigInt::from(10).pow(digits as u32);
    let scaled = (a.numer() * &scale) / a.denom();
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let sign = if neg { "-" } else { "" };
    if digits == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part:0>width$}", width = digits)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.decimal(30))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    fn enc(lo: &str, hi: &str) -> Enclosure {
        Enclosure::new(rat(lo), rat(hi))
    }

    #[test]
    fn mul_handles_sign_mixtures() {
        let a = enc("-2", "3");
        let b = enc("-5", "1");
        let p = a.mul(&b);
        assert_eq!(p.lo(), &rat("-15"));
        assert_eq!(p.hi(), &rat("10"));
    }

    #[test]
    fn division_by_zero_straddling_interval_fails() {
        let a = enc("1", "2");
        let b = enc("-1", "1");
        assert!(matches!(a.div(&b), Err(Error::IntervalDivisionByZero)));
    }

    #[test]
    fn rounded_ops_keep_containment() {
        let a = enc("1/3", "1/3");
        let b = enc("1/7", "1/7");
        let exact = rat("1/3") * rat("1/7");
        let p = a.mul_r(&b, 40);
        assert!(p.contains(&exact));
        assert!(p.width() < rat("1/1000000000"));
    }

    #[test]
    fn pow_contains_exact_power() {
        let a = enc("1839286755214161/1000000000000000", "1839286755214162/1000000000000000");
        let p = a.pow_r(64, 256);
        // Exact endpoint powers bracket the rounded result.
        let exact_lo = num_traits::pow::pow(rat("1839286755214161/1000000000000000"), 64);
        let exact_hi = num_traits::pow::pow(rat("1839286755214162/1000000000000000"), 64);
        assert!(p.lo() <= &exact_lo && &exact_hi <= p.hi());
        assert!(p.lo().is_positive());
    }

    #[test]
    fn pow_zero_is_one() {
        let a = enc("2", "3");
        let p = a.pow_r(0, 32);
        assert!(p.is_point());
        assert_eq!(p.lo(), &rat("1"));
    }

    #[test]
    fn compare_decides_only_on_disjoint() {
        let a = enc("1", "2");
        let b = enc("3", "4");
        let c = enc("2", "3");
        assert_eq!(a.compare(&b), Some(Ordering::Less));
        assert_eq!(b.compare(&a), Some(Ordering::Greater));
        assert_eq!(a.compare(&c), None);
        let p = Enclosure::point(rat("5"));
        assert_eq!(p.compare(&Enclosure::point(rat("5"))), Some(Ordering::Equal));
    }

    #[test]
    fn sign_detection() {
        assert_eq!(enc("1/1000", "2").sign(), Some(Ordering::Greater));
        assert_eq!(enc("-2", "-1/1000").sign(), Some(Ordering::Less));
        assert_eq!(enc("0", "0").sign(), Some(Ordering::Equal));
        assert_eq!(enc("-1", "1").sign(), None);
        // Zero endpoint on one side is not a certified strict sign.
        assert_eq!(enc("0", "1").sign(), None);
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_decimal(&rat("355/113"), 6), "3.141592");
        assert_eq!(rational_decimal(&rat("-1/4"), 2), "-0.25");
        assert_eq!(rational_decimal(&rat("7"), 0), "7");
    }

    #[test]
    fn intersect_and_hull() {
        let a = enc("1", "3");
        let b = enc("2", "5");
        assert_eq!(a.intersect(&b).unwrap(), enc("2", "3"));
        assert_eq!(a.hull(&b), enc("1", "5"));
        assert!(enc("1", "2").intersect(&enc("3", "4")).is_err());
    }
}
