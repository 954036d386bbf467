//! Directed elementary functions on enclosures: natural log and n-th roots.
//!
//! Everything here is monotone, so an enclosure maps to the enclosure of the
//! endpoint images, each computed with one-sided rounding.

use super::dyadic::{round_down, round_up};
use super::enclosure::Enclosure;
use super::pow2;
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Enclosure of ln x for x > 0 (certified: errors if the input can touch 0).
pub fn ln_enclosure(x: &Enclosure, bits: u32) -> Result<Enclosure> {
    if !x.lo().is_positive() {
        return Err(Error::InvalidInput("ln of a non-positive enclosure".to_string()));
    }
    let lo = ln_directed(x.lo(), bits, false);
    let hi = ln_directed(x.hi(), bits, true);
    Ok(Enclosure::new(lo, hi))
}

/// Enclosure of ln(a)/ln(b) for positive a, b. Errors if b's enclosure
/// contains 1 (the denominator would straddle zero).
pub fn log_ratio(a: &Enclosure, b: &Enclosure, bits: u32) -> Result<Enclosure> {
    let la = ln_enclosure(a, bits)?;
    let lb = ln_enclosure(b, bits)?;
    la.div_r(&lb, bits)
}

/// Enclosure of x^(1/n) for x ≥ 0, n ≥ 1, by directed dyadic bisection.
pub fn nth_root_enclosure(x: &Enclosure, n: u32, bits: u32) -> Result<Enclosure> {
    if n == 0 {
        return Err(Error::InvalidInput("zeroth root".to_string()));
    }
    if x.lo().is_negative() {
        return Err(Error::InvalidInput("n-th root of a negative enclosure".to_string()));
    }
    let lo = nth_root_directed(x.lo(), n, bits, false);
    let hi = nth_root_directed(x.hi(), n, bits, true);
    Ok(Enclosure::new(lo, hi))
}

fn nth_root_directed(q: &BigRational, n: u32, bits: u32, up: bool) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    if n == 1 {
        return if up { round_up(q, bits + 8) } else { round_down(q, bits + 8) };
    }
    let one = BigRational::one();
    // Initial bracket [lo, hi] with lo^n <= q <= hi^n.
    let (mut lo, mut hi) = if q >= &one {
        (one.clone(), q.clone().max(one))
    } else {
        (BigRational::zero(), one)
    };
    // Each bisection halves the bracket; the bracket starts no wider than
    // max(q, 1), so log2(q) extra halvings cover the initial width.
    let extra = (q.numer().bits() as i64 - q.denom().bits() as i64).unsigned_abs() as u32 + 2;
    for _ in 0..(bits + extra + 8) {
        let m = round_down(&((&lo + &hi) / BigRational::from_integer(2.into())), bits + 64);
        // The rounded midpoint can leave the bracket; nudge back inside.
        let m = if m <= lo || m >= hi { (&lo + &hi) / BigRational::from_integer(2.into()) } else { m };
        let mp = num_traits::pow::pow(m.clone(), n as usize);
        if &mp <= q {
            lo = m;
        } else {
            hi = m;
        }
    }
    if up { hi } else { lo }
}

/// Directed ln of a positive rational: result <= ln q when rounding down,
/// >= ln q when rounding up, within about 2^-bits of the truth.
fn ln_directed(q: &BigRational, bits: u32, up: bool) -> BigRational {
    debug_assert!(q.is_positive());
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    let three_halves = BigRational::new(3.into(), 2.into());
    let three_quarters = BigRational::new(3.into(), 4.into());

    // Range reduction: q = m * 2^k with m in [3/4, 3/2).
    let mut m = round_directed_pos(q, bits + 16, up);
    let mut k: i64 = 0;
    while m >= three_halves {
        m *= &half;
        k += 1;
    }
    while m < three_quarters {
        m *= BigRational::from_integer(2.into());
        k -= 1;
    }

    // ln m = 2 atanh(t), t = (m-1)/(m+1) in (-1/7, 1/5].
    let t = (&m - &one) / (&m + &one);
    let ln_m = atanh_directed(&t, bits + 8, up) * BigRational::from_integer(2.into());

    // k * ln 2, rounded consistently with the requested direction: the sign
    // of k decides which side of ln 2 keeps the total on the right side.
    let total = if k == 0 {
        ln_m
    } else {
        let ln2_up = (k >= 0) == up;
        let ln2 = atanh_directed(&BigRational::new(1.into(), 3.into()), bits + 8, ln2_up)
            * BigRational::from_integer(2.into());
        ln_m + ln2 * BigRational::from_integer(k.into())
    };
    if up {
        round_up(&total, bits + 8)
    } else {
        round_down(&total, bits + 8)
    }
}

fn round_directed_pos(q: &BigRational, bits: u32, up: bool) -> BigRational {
    if up {
        round_up(q, bits)
    } else {
        round_down(q, bits)
    }
}

/// Directed atanh for |t| <= 1/3, via the odd power series with an explicit
/// tail bound.
fn atanh_directed(t: &BigRational, bits: u32, up: bool) -> BigRational {
    if t.is_zero() {
        return BigRational::zero();
    }
    if t.is_negative() {
        // atanh is odd; swap the rounding direction through the negation.
        return -atanh_directed(&-t.clone(), bits, !up);
    }
    let u = t.clone();
    let u2 = round_up(&(&u * &u), bits + 16);
    debug_assert!(u2 < BigRational::new(1.into(), 8.into()) * BigRational::from_integer(2.into()));
    let eps = pow2(-(bits as i64) - 4);
    let mut sum = BigRational::zero();
    // Power iterate rounded in the requested direction: all terms are
    // positive, so one-sided rounding of the iterate stays one-sided for
    // every term.
    let mut p = if up { round_up(&u, bits + 16) } else { round_down(&u, bits + 16) };
    let mut i = 0u32;
    loop {
        let term = &p / BigRational::from_integer((2 * i + 1).into());
        sum += if up { round_up(&term, bits + 16) } else { round_down(&term, bits + 16) };
        sum = if up { round_up(&sum, bits + 16) } else { round_down(&sum, bits + 16) };
        // Tail after this term: sum_{j>i} u^(2j+1)/(2j+1) <= p*u2 / (1-u2).
        let tail_hi = round_up(&(&p * &u2 / (BigRational::one() - &u2)), bits + 16);
        if tail_hi <= eps {
            if up {
                sum += tail_hi;
            }
            return sum;
        }
        p = if up {
            round_up(&(&p * &u2), bits + 16)
        } else {
            round_down(&(&p * &u2), bits + 16)
        };
        i += 1;
    }
}
