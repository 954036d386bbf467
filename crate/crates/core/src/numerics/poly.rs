//! Integer polynomials, Sturm chains, and rational-coefficient helpers.
//!
//! These are the certificates behind "β is the unique root of p in [a, b]":
//! a Sturm chain counts distinct real roots in an interval exactly, so
//! bracket isolation is verified rather than assumed.

use super::enclosure::Enclosure;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// A polynomial with integer coefficients, little-endian (index = degree).
/// Invariant: no trailing zero coefficient; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    c: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut c = coeffs;
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        IntPoly { c }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&v| BigInt::from(v)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { c: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.c.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Interval Horner evaluation with directed rounding.
    pub fn eval_enclosure(&self, x: &Enclosure, bits: u32) -> Enclosure {
        let mut acc = Enclosure::from_i64(0);
        for c in self.c.iter().rev() {
            let term = Enclosure::point(BigRational::from_integer(c.clone()));
            acc = acc.mul_r(x, bits).add_r(&term, bits);
        }
        acc
    }

    pub fn derivative(&self) -> IntPoly {
        if self.c.len() <= 1 {
            return IntPoly::zero();
        }
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        IntPoly::new(c)
    }

    /// Divide out the content (gcd of coefficients). The sign of the leading
    /// coefficient is preserved, so sign evaluations are unchanged up to a
    /// positive factor. Safe inside Sturm chains.
    pub fn primitive_scaled(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut content = BigInt::zero();
        for c in &self.c {
            content = num_integer::Integer::gcd(&content, c);
        }
        IntPoly::new(self.c.iter().map(|c| c / &content).collect())
    }

    /// Squarefree part: p / gcd(p, p'), primitive, leading sign preserved.
    pub fn squarefree_part(&self) -> IntPoly {
        if self.degree().unwrap_or(0) <= 1 {
            return self.primitive_scaled();
        }
        let g = rat_gcd(&RatPoly::from_int(self), &RatPoly::from_int(&self.derivative()));
        if g.degree().unwrap_or(0) == 0 {
            return self.primitive_scaled();
        }
        let (q, r) = RatPoly::from_int(self).divmod(&g);
        debug_assert!(r.is_zero(), "gcd must divide the polynomial");
        q.to_primitive_int()
    }

    /// Number of distinct real roots in the open interval (lo, hi).
    /// Endpoints must not be roots.
    pub fn count_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        SturmChain::build(self).count_roots_in(lo, hi)
    }

    /// An upper bound B such that all real roots lie in (−B, B): the Cauchy
    /// bound 1 + max |c_i| / |c_n|.
    pub fn root_bound(&self) -> BigRational {
        let n = match self.degree() {
            None | Some(0) => return BigRational::one(),
            Some(n) => n,
        };
        let lead = BigRational::from_integer(self.c[n].abs());
        let mut m = BigRational::zero();
        for c in &self.c[..n] {
            let a = BigRational::from_integer(c.abs()) / &lead;
            if a > m {
                m = a;
            }
        }
        m + BigRational::one()
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.c.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match i {
                0 => write!(f, "{mag}")?,
                1 => {
                    if mag.is_one() {
                        write!(f, "x")?;
                    } else {
                        write!(f, "{mag}*x")?;
                    }
                }
                _ => {
                    if mag.is_one() {
                        write!(f, "x^{i}")?;
                    } else {
                        write!(f, "{mag}*x^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sturm chain of the squarefree part of a polynomial.
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn build(p: &IntPoly) -> Self {
        let sf = p.squarefree_part();
        let mut chain = vec![sf.clone()];
        if sf.degree().unwrap_or(0) >= 1 {
            chain.push(sf.derivative().primitive_scaled());
            loop {
                let n = chain.len();
                let (_, r) =
                    RatPoly::from_int(&chain[n - 2]).divmod(&RatPoly::from_int(&chain[n - 1]));
                if r.is_zero() {
                    break;
                }
                // Negated remainder, rescaled by a positive constant only.
                chain.push(r.neg().to_primitive_int_keep_sign());
            }
        }
        SturmChain { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last: Option<Ordering> = None;
        for p in &self.chain {
            let v = p.eval_rational(x);
            let s = if v.is_positive() {
                Ordering::Greater
            } else if v.is_negative() {
                Ordering::Less
            } else {
                continue;
            };
            if let Some(prev) = last {
                if prev != s {
                    count += 1;
                }
            }
            last = Some(s);
        }
        count
    }

    /// Distinct real roots in (lo, hi); endpoints must not be roots of the
    /// squarefree part.
    pub fn count_roots_in(&self, lo: &BigRational, hi: &BigRational) -> usize {
        assert!(lo < hi, "empty interval");
        assert!(
            !self.chain[0].eval_rational(lo).is_zero()
                && !self.chain[0].eval_rational(hi).is_zero(),
            "Sturm endpoints must not be roots"
        );
        self.variations(lo) - self.variations(hi)
    }
}

/// Polynomial with rational coefficients, little-endian. Internal helper for
/// Euclidean algorithms and residue arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RatPoly {
    pub(crate) c: Vec<BigRational>,
}

impl RatPoly {
    pub(crate) fn new(coeffs: Vec<BigRational>) -> Self {
        let mut c = coeffs;
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        RatPoly { c }
    }

    pub(crate) fn zero() -> Self {
        RatPoly { c: Vec::new() }
    }

    pub(crate) fn one() -> Self {
        RatPoly { c: vec![BigRational::one()] }
    }

    pub(crate) fn constant(v: BigRational) -> Self {
        Self::new(vec![v])
    }

    pub(crate) fn from_int(p: &IntPoly) -> Self {
        RatPoly { c: p.c.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub(crate) fn degree(&self) -> Option<usize> {
        if self.c.is_empty() { None } else { Some(self.c.len() - 1) }
    }

    pub(crate) fn leading(&self) -> &BigRational {
        self.c.last().expect("leading coefficient of zero polynomial")
    }

    pub(crate) fn neg(&self) -> RatPoly {
        RatPoly { c: self.c.iter().map(|v| -v).collect() }
    }

    pub(crate) fn scale(&self, k: &BigRational) -> RatPoly {
        if k.is_zero() {
            return RatPoly::zero();
        }
        RatPoly { c: self.c.iter().map(|v| v * k).collect() }
    }

    pub(crate) fn add(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.c.len().max(rhs.c.len());
        let mut c = vec![BigRational::zero(); n];
        for (i, v) in self.c.iter().enumerate() {
            c[i] += v;
        }
        for (i, v) in rhs.c.iter().enumerate() {
            c[i] += v;
        }
        RatPoly::new(c)
    }

    pub(crate) fn sub(&self, rhs: &RatPoly) -> RatPoly {
        self.add(&rhs.neg())
    }

    pub(crate) fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![BigRational::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }

    /// Euclidean division: self = q * rhs + r with deg r < deg rhs.
    pub(crate) fn divmod(&self, rhs: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!rhs.is_zero(), "division by zero polynomial");
        let d = rhs.degree().unwrap();
        let lead = rhs.leading().clone();
        let mut rem = self.c.clone();
        let mut quot = vec![
            BigRational::zero();
            if self.c.len() >= rhs.c.len() { self.c.len() - rhs.c.len() + 1 } else { 0 }
        ];
        while rem.len() > d {
            let k = rem.len() - 1 - d;
            let factor = rem.last().unwrap() / &lead;
            if !factor.is_zero() {
                quot[k] = factor.clone();
                for (j, b) in rhs.c.iter().enumerate() {
                    let t = b * &factor;
                    rem[k + j] -= t;
                }
            }
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
            if rem.len() <= d {
                break;
            }
        }
        (RatPoly::new(quot), RatPoly { c: rem })
    }

    pub(crate) fn rem(&self, rhs: &RatPoly) -> RatPoly {
        self.divmod(rhs).1
    }

    fn monic(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let lead = self.leading().clone();
        RatPoly { c: self.c.iter().map(|v| v / &lead).collect() }
    }

    /// Clear denominators and divide out content; leading coefficient made
    /// positive (use only where global sign does not matter).
    pub(crate) fn to_primitive_int(&self) -> IntPoly {
        let p = self.to_primitive_int_keep_sign();
        if p.c.last().is_some_and(Signed::is_negative) {
            IntPoly::new(p.c.iter().map(|v| -v).collect())
        } else {
            p
        }
    }

    /// Clear denominators and divide out content, multiplying by a positive
    /// constant only, so the sign at every point is preserved.
    pub(crate) fn to_primitive_int_keep_sign(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut denom_lcm = BigInt::one();
        for v in &self.c {
            denom_lcm = num_integer::Integer::lcm(&denom_lcm, v.denom());
        }
        let ints: Vec<BigInt> = self
            .c
            .iter()
            .map(|v| {
                let scaled = v * BigRational::from_integer(denom_lcm.clone());
                debug_assert!(scaled.denom().is_one());
                scaled.numer().clone()
            })
            .collect();
        IntPoly::new(ints).primitive_scaled()
    }
}

/// Monic gcd of two rational polynomials via the Euclidean algorithm.
pub(crate) fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut x = a.monic();
    let mut y = b.monic();
    if x.is_zero() {
        return y;
    }
    while !y.is_zero() {
        let r = x.rem(&y).monic();
        x = y;
        y = r;
    }
    x
}

/// Extended gcd: returns (g, s, t) with s*a + t*b = g, g monic (or zero).
pub(crate) fn rat_ext_gcd(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
    let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    if r0.is_zero() {
        return (r0, s0, t0);
    }
    let lead = r0.leading().clone();
    let inv = lead.recip();
    (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
}
