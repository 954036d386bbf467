//! A directed-rounding floating-point type for hot loops.
//!
//! `DFloat` represents a nonnegative real as `m * 2^(e - 127)` with a
//! normalized 128-bit mantissa (top bit set) or the exact zero. Every
//! operation takes an explicit rounding direction, so a pair of `DFloat`
//! values driven down/up forms a rigorous enclosure at ~2^-127 relative
//! error per operation. This is what makes exhaustive tree-sum walks with
//! tens of millions of nodes feasible; general code should prefer
//! [`super::Enclosure`].

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;

/// Exponents below this saturate: rounding down gives exact zero, rounding
/// up gives the smallest representable positive value. Both directions stay
/// sound, long products of small factors (γ^(2^j)) cannot overflow the
/// exponent field, and `to_rational` of a saturated value stays cheap
/// (a 2^20-bit denominator, not an astronomical one).
const MIN_EXP: i64 = -(1 << 20);
const MAX_EXP: i64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DFloat {
    /// Normalized mantissa: 0, or in [2^127, 2^128).
    m: u128,
    /// Value is m * 2^(e - 127).
    e: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Down,
    Up,
}

impl DFloat {
    pub const ZERO: DFloat = DFloat { m: 0, e: 0 };

    pub fn one() -> DFloat {
        DFloat { m: 1u128 << 127, e: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0
    }

    /// Smallest positive representable value, used when rounding up out of
    /// the saturation zone.
    fn tiny() -> DFloat {
        DFloat { m: 1u128 << 127, e: MIN_EXP }
    }

    fn saturate(m: u128, e: i64, dir: Dir) -> DFloat {
        if m == 0 {
            return DFloat::ZERO;
        }
        if e < MIN_EXP {
            return match dir {
                Dir::Down => DFloat::ZERO,
                Dir::Up => DFloat::tiny(),
            };
        }
        assert!(e <= MAX_EXP, "DFloat exponent overflow");
        DFloat { m, e }
    }

    pub fn from_u64(v: u64) -> DFloat {
        if v == 0 {
            return DFloat::ZERO;
        }
        let shift = v.leading_zeros() + 64;
        let m = (v as u128) << shift;
        DFloat { m, e: 127 - shift as i64 }
    }

    /// Convert a positive rational, rounding in the given direction.
    pub fn from_rational(q: &BigRational, dir: Dir) -> DFloat {
        assert!(!q.is_negative(), "DFloat is nonnegative-only");
        if q.is_zero() {
            return DFloat::ZERO;
        }
        let num = q.numer().magnitude();
        let den = q.denom().magnitude();
        // Scale so the quotient has at least 129 bits, divide, then trim to
        // 128 with directed rounding.
        let nb = num.bits() as i64;
        let db = den.bits() as i64;
        let shift = 130 - (nb - db);
        let (scaled_num, scaled_den) = if shift >= 0 {
            (num << shift as u64, den.clone())
        } else {
            (num.clone(), den << (-shift) as u64)
        };
        let (quot, rem) = num_integer::Integer::div_rem(&scaled_num, &scaled_den);
        // Value = (quot + rem/den') * 2^(-shift); quot has 129..=131 bits.
        let qb = quot.bits();
        debug_assert!(qb >= 129);
        let extra = qb - 128;
        let kept: BigUint = &quot >> extra;
        let dropped_nonzero = !rem.is_zero() || (&kept << extra) != quot;
        let mut m = u128::try_from(&kept).expect("mantissa fits after trim");
        let mut e = 127 - shift + extra as i64;
        if dir == Dir::Up && dropped_nonzero {
            m = match m.checked_add(1) {
                Some(v) => v,
                None => {
                    e += 1;
                    1u128 << 127
                }
            };
            if m.leading_zeros() != 0 {
                // Carry ripple: 2^128 -> renormalize (handled above), or a
                // non-normalized value cannot occur otherwise.
                unreachable!("mantissa stays normalized");
            }
        }
        Self::saturate(m, e, dir)
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.m == 0 {
            return BigRational::zero();
        }
        let m = BigRational::from_integer(BigInt::from(self.m));
        m * super::pow2(self.e - 127)
    }

    pub fn mul(&self, rhs: &DFloat, dir: Dir) -> DFloat {
        if self.m == 0 || rhs.m == 0 {
            return DFloat::ZERO;
        }
        let (hi, lo) = wide_mul(self.m, rhs.m);
        // Product of two [2^127, 2^128) mantissas is in [2^254, 2^256).
        let (m, dropped, e) = if hi >> 127 != 0 {
            (hi, lo != 0, self.e + rhs.e + 1)
        } else {
            ((hi << 1) | (lo >> 127), lo << 1 != 0, self.e + rhs.e)
        };
        finish(m, e, dropped, dir)
    }

    pub fn add(&self, rhs: &DFloat, dir: Dir) -> DFloat {
        if self.m == 0 {
            return *rhs;
        }
        if rhs.m == 0 {
            return *self;
        }
        let (big, small) = if (self.e, self.m) >= (rhs.e, rhs.m) {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let shift = big.e - small.e;
        if shift >= 128 {
            // The small addend is entirely below the mantissa.
            return match dir {
                Dir::Down => *big,
                Dir::Up => big.next_up(),
            };
        }
        let shift = shift as u32;
        let aligned = if shift == 0 { small.m } else { small.m >> shift };
        let dropped_align = shift != 0 && (small.m << (128 - shift)) != 0;
        let (sum, carry) = big.m.overflowing_add(aligned);
        if carry {
            let dropped = dropped_align || (sum & 1) != 0;
            let m = (1u128 << 127) | (sum >> 1);
            finish(m, big.e + 1, dropped, dir)
        } else {
            finish(sum, big.e, dropped_align, dir)
        }
    }

    fn next_up(&self) -> DFloat {
        if self.m == 0 {
            return DFloat::tiny();
        }
        match self.m.checked_add(1) {
            Some(v) => DFloat { m: v, e: self.e },
            None => DFloat { m: 1u128 << 127, e: self.e + 1 },
        }
    }

    /// Integer power by squaring.
    pub fn pow(&self, mut k: u64, dir: Dir) -> DFloat {
        let mut result = DFloat::one();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, dir);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, dir);
            }
        }
        result
    }
}

impl PartialOrd for DFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DFloat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.m == 0, other.m == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => (self.e, self.m).cmp(&(other.e, other.m)),
        }
    }
}

fn finish(m: u128, e: i64, dropped: bool, dir: Dir) -> DFloat {
    debug_assert!(m >> 127 != 0, "mantissa must be normalized");
    if dir == Dir::Up && dropped {
        match m.checked_add(1) {
            Some(v) => DFloat::saturate(v, e, dir),
            None => DFloat::saturate(1u128 << 127, e + 1, dir),
        }
    } else {
        DFloat::saturate(m, e, dir)
    }
}

/// Full 128x128 -> 256 bit multiply, returning (high, low) halves.
fn wide_mul(a: u128, b: u128) -> (u128, u128) {
    let (a_hi, a_lo) = (a >> 64, a & u64::MAX as u128);
    let (b_hi, b_lo) = (b >> 64, b & u64::MAX as u128);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & u64::MAX as u128) + (hl & u64::MAX as u128);
    let low = (mid << 64) | (ll & u64::MAX as u128);
    let high = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (high, low)
}
