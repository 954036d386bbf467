//! Exact arithmetic in ℚ(β) for an algebraic β given by an isolating bracket.
//!
//! Elements are residues in ℚ[x]/(m) where m is a squarefree integer
//! polynomial with exactly one root β inside a rational bracket (verified by
//! a Sturm chain at construction). The key operation is `sign`: the sign of
//! an element evaluated at β, decided exactly. A nonzero residue separates
//! from zero under bracket refinement; a residue that vanishes at β is
//! certified by a gcd argument: if g = gcd(e, m) has a root in the bracket,
//! that root can only be β, because β is the only root of m there.
//!
//! The modulus need not be irreducible. When an inversion meets a zero
//! divisor (gcd(e, m) nontrivial but not vanishing at β), the modulus is
//! replaced by the factor that still contains β and the operation retries.
//! Elements are re-reduced against the current modulus on entry to every
//! operation, so values held across a split stay valid: reduction modulo a
//! divisor of the old modulus does not change the value at β.

use super::enclosure::Enclosure;
use super::poly::{rat_ext_gcd, rat_gcd, IntPoly, RatPoly, SturmChain};
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::sync::Mutex;

/// The field context: modulus polynomial plus the isolating bracket for β.
pub struct PolyField {
    state: Mutex<FieldState>,
}

impl std::fmt::Debug for PolyField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let st = self.state.lock().unwrap();
        write!(f, "PolyField({} on ({}, {}))", st.modulus, st.lo, st.hi)
    }
}

struct FieldState {
    modulus: IntPoly,
    lo: BigRational,
    hi: BigRational,
    /// Sign of the modulus at `lo`; kept so bisection steps need one
    /// evaluation, not two. Meaningless once the bracket is a point.
    sign_lo: Ordering,
}

/// An element of ℚ(β), as a residue polynomial evaluated at β.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldElem {
    pub(crate) poly: RatPoly,
}

impl FieldElem {
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.poly.c.clone()
    }

    pub fn is_zero_poly(&self) -> bool {
        self.poly.is_zero()
    }
}

impl PolyField {
    /// Build the field from any integer polynomial with exactly one root of
    /// its squarefree part in (lo, hi). Endpoints must not be roots.
    pub fn new(poly: &IntPoly, lo: BigRational, hi: BigRational) -> Result<PolyField> {
        if lo >= hi {
            return Err(Error::InvalidInput("empty root bracket".to_string()));
        }
        let sf = poly.squarefree_part();
        if sf.degree().unwrap_or(0) == 0 {
            return Err(Error::InvalidInput("constant polynomial has no roots".to_string()));
        }
        let at_lo = sf.eval_rational(&lo);
        let at_hi = sf.eval_rational(&hi);
        if at_lo.is_zero() || at_hi.is_zero() {
            return Err(Error::InvalidInput(
                "root bracket endpoint is itself a root; shrink the bracket".to_string(),
            ));
        }
        let count = SturmChain::build(&sf).count_roots_in(&lo, &hi);
        if count != 1 {
            return Err(Error::BadBracket { lo: lo.to_string(), hi: hi.to_string(), count });
        }
        let sign_lo = if at_lo.is_positive() { Ordering::Greater } else { Ordering::Less };
        Ok(PolyField { state: Mutex::new(FieldState { modulus: sf, lo, hi, sign_lo }) })
    }

    /// The current modulus (may shrink over the field's lifetime).
    pub fn modulus(&self) -> IntPoly {
        self.state.lock().unwrap().modulus.clone()
    }

    pub fn bracket(&self) -> (BigRational, BigRational) {
        let s = self.state.lock().unwrap();
        (s.lo.clone(), s.hi.clone())
    }

    pub fn bracket_enclosure(&self) -> Enclosure {
        let s = self.state.lock().unwrap();
        Enclosure::new(s.lo.clone(), s.hi.clone())
    }

    /// One bisection step on the bracket. If the midpoint is an exact root,
    /// the bracket collapses to a point and β is rational.
    pub fn refine_bracket(&self) {
        let mut s = self.state.lock().unwrap();
        if s.lo == s.hi {
            return;
        }
        let m = (&s.lo + &s.hi) / BigRational::from_integer(2.into());
        let v = s.modulus.eval_rational(&m);
        if v.is_zero() {
            s.lo = m.clone();
            s.hi = m;
            return;
        }
        let sign_m = if v.is_positive() { Ordering::Greater } else { Ordering::Less };
        if sign_m == s.sign_lo {
            s.lo = m;
        } else {
            s.hi = m;
        }
    }

    /// Refine until the bracket width is at most `target`.
    pub fn refine_bracket_to(&self, target: &BigRational) {
        loop {
            {
                let s = self.state.lock().unwrap();
                if &(&s.hi - &s.lo) <= target {
                    return;
                }
            }
            self.refine_bracket();
        }
    }

    // ----- element constructors -----

    pub fn from_rational(&self, q: BigRational) -> FieldElem {
        FieldElem { poly: RatPoly::constant(q) }
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { poly: RatPoly::zero() }
    }

    pub fn one(&self) -> FieldElem {
        FieldElem { poly: RatPoly::one() }
    }

    /// The generator β itself.
    pub fn beta(&self) -> FieldElem {
        self.reduce(FieldElem {
            poly: RatPoly::new(vec![BigRational::zero(), BigRational::one()]),
        })
    }

    fn reduce(&self, e: FieldElem) -> FieldElem {
        let s = self.state.lock().unwrap();
        FieldElem { poly: e.poly.rem(&RatPoly::from_int(&s.modulus)) }
    }

    // ----- arithmetic -----

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.reduce(FieldElem { poly: a.poly.add(&b.poly) })
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.reduce(FieldElem { poly: a.poly.sub(&b.poly) })
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        self.reduce(FieldElem { poly: a.poly.mul(&b.poly) })
    }

    pub fn mul_rational(&self, a: &FieldElem, q: &BigRational) -> FieldElem {
        FieldElem { poly: a.poly.scale(q) }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        FieldElem { poly: a.poly.neg() }
    }

    pub fn pow(&self, a: &FieldElem, mut k: u64) -> FieldElem {
        let mut result = self.one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = self.mul(&result, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Multiplicative inverse. Splits the modulus when it meets a zero
    /// divisor; errors only if the element is zero at β.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        loop {
            let e = self.reduce(a.clone());
            if e.poly.is_zero() {
                return Err(Error::InvalidInput(
                    "inverse of the zero field element".to_string(),
                ));
            }
            let modulus = RatPoly::from_int(&self.state.lock().unwrap().modulus);
            let (g, s, _) = rat_ext_gcd(&e.poly, &modulus);
            match g.degree() {
                Some(0) | None => {
                    // g is the constant 1 (monic): s * e ≡ 1.
                    return Ok(self.reduce(FieldElem { poly: s }));
                }
                Some(_) => {
                    if self.split_on(&g)? {
                        // β was a root of g, so e(β) = 0 after all.
                        return Err(Error::InvalidInput(
                            "inverse of an element that vanishes at the base".to_string(),
                        ));
                    }
                    // Modulus shrank; retry against the new modulus.
                }
            }
        }
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        let binv = self.inv(b)?;
        Ok(self.mul(a, &binv))
    }

    /// Handle a nontrivial divisor g of the modulus: decide which factor β
    /// belongs to and shrink the modulus to it. Returns true if β is a root
    /// of g itself.
    fn split_on(&self, g: &RatPoly) -> Result<bool> {
        let g_int = g.to_primitive_int();
        let mut s = self.state.lock().unwrap();
        // Endpoints of the bracket are non-roots of the modulus, and g
        // divides the modulus, so Sturm counting over the bracket is valid.
        let in_g = SturmChain::build(&g_int).count_roots_in(&s.lo, &s.hi);
        if in_g >= 1 {
            return Ok(true);
        }
        let (q, r) = RatPoly::from_int(&s.modulus).divmod(g);
        debug_assert!(r.is_zero(), "split divisor must divide the modulus");
        let new_modulus = q.to_primitive_int_keep_sign();
        debug_assert_eq!(
            SturmChain::build(&new_modulus).count_roots_in(&s.lo, &s.hi),
            1,
            "β must remain isolated by the shrunken modulus"
        );
        let at_lo = new_modulus.eval_rational(&s.lo);
        s.sign_lo = if at_lo.is_positive() { Ordering::Greater } else { Ordering::Less };
        s.modulus = new_modulus;
        Ok(false)
    }

    // ----- sign decisions -----

    /// Enclosure of the element's value at β via interval Horner over the
    /// current bracket.
    pub fn eval_enclosure(&self, a: &FieldElem, bits: u32) -> Enclosure {
        let e = self.reduce(a.clone());
        let bracket = self.bracket_enclosure();
        let mut acc = Enclosure::from_i64(0);
        for c in e.poly.c.iter().rev() {
            acc = acc.mul_r(&bracket, bits).add_r(&Enclosure::point(c.clone()), bits);
        }
        acc
    }

    /// Exact sign of the element's value at β.
    ///
    /// Fast path: interval evaluation over the current bracket. If that
    /// straddles zero, a gcd certificate decides whether the value is
    /// exactly zero; if not, the bracket is refined until the sign shows.
    pub fn sign(&self, a: &FieldElem) -> Result<Ordering> {
        let e = self.reduce(a.clone());
        if e.poly.is_zero() {
            return Ok(Ordering::Equal);
        }
        // Rational point bracket: evaluate exactly.
        {
            let s = self.state.lock().unwrap();
            if s.lo == s.hi {
                let v = e.poly.c.iter().rev().fold(BigRational::zero(), |acc, c| acc * &s.lo + c);
                return Ok(if v.is_zero() {
                    Ordering::Equal
                } else if v.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                });
            }
        }
        // Quick interval attempts before paying for a gcd.
        for bits in [128u32, 256] {
            if let Some(sign) = self.eval_enclosure(&e, bits).sign() {
                if sign != Ordering::Equal {
                    return Ok(sign);
                }
            }
        }
        // Zero certificate: gcd(e, modulus) has a root in the bracket only
        // if that root is β.
        let modulus = RatPoly::from_int(&self.state.lock().unwrap().modulus);
        let g = rat_gcd(&e.poly, &modulus);
        if g.degree().unwrap_or(0) >= 1 {
            let g_int = g.to_primitive_int();
            let (lo, hi) = self.bracket();
            if SturmChain::build(&g_int).count_roots_in(&lo, &hi) >= 1 {
                return Ok(Ordering::Equal);
            }
        }
        // Nonzero at β: refine until the interval separates.
        let mut bits = 256u32;
        for round in 0..10_000u32 {
            self.refine_bracket();
            if round % 8 == 7 {
                bits = bits.saturating_mul(2).min(1 << 22);
            }
            if let Some(sign) = self.eval_enclosure(&e, bits).sign() {
                if sign != Ordering::Equal {
                    return Ok(sign);
                }
            }
        }
        Err(Error::PrecisionExhausted {
            bits,
            context: "sign of a nonzero field element failed to separate".to_string(),
        })
    }

    /// Convenience: sign of a - b.
    pub fn cmp_elems(&self, a: &FieldElem, b: &FieldElem) -> Result<Ordering> {
        self.sign(&self.sub(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;
    use std::sync::Arc;

    fn rat(s: &str) -> BigRational {
        BigRational::from_str(s).unwrap()
    }

    /// φ as the root of x^2 - x - 1 in (1, 2).
    fn golden_field() -> PolyField {
        PolyField::new(&IntPoly::from_i64(&[-1, -1, 1]), rat("1"), rat("2")).unwrap()
    }

    #[test]
    fn beta_satisfies_its_polynomial() {
        let f = golden_field();
        let b = f.beta();
        // β^2 - β - 1 = 0 exactly.
        let v = f.sub(&f.sub(&f.mul(&b, &b), &b), &f.one());
        assert_eq!(f.sign(&v).unwrap(), Ordering::Equal);
    }

    #[test]
    fn sign_of_simple_combinations() {
        let f = golden_field();
        let b = f.beta();
        // β - 8/5 > 0 and β - 13/8 < 0 (φ between consecutive Fibonacci ratios).
        let lo = f.sub(&b, &f.from_rational(rat("8/5")));
        let hi = f.sub(&b, &f.from_rational(rat("13/8")));
        assert_eq!(f.sign(&lo).unwrap(), Ordering::Greater);
        assert_eq!(f.sign(&hi).unwrap(), Ordering::Less);
    }

    #[test]
    fn inverse_roundtrips() {
        let f = golden_field();
        let b = f.beta();
        let inv = f.inv(&b).unwrap();
        let prod = f.mul(&b, &inv);
        assert_eq!(f.cmp_elems(&prod, &f.one()).unwrap(), Ordering::Equal);
        // 1/φ = φ - 1 exactly.
        let expected = f.sub(&b, &f.one());
        assert_eq!(f.cmp_elems(&inv, &expected).unwrap(), Ordering::Equal);
    }

    #[test]
    fn reducible_modulus_splits_on_inversion() {
        // (x^2 - x - 1)(x - 1) = x^3 - 2x^2 + 1; root φ isolated in (3/2, 2).
        let p = IntPoly::from_i64(&[1, 0, -2, 1]);
        let f = PolyField::new(&p, rat("3/2"), rat("2")).unwrap();
        let b = f.beta();
        // β - 1 is invertible at β = φ, but x - 1 divides the modulus, so
        // the field must split before inverting.
        let e = f.sub(&b, &f.one());
        let inv = f.inv(&e).unwrap();
        let prod = f.mul(&e, &inv);
        assert_eq!(f.cmp_elems(&prod, &f.one()).unwrap(), Ordering::Equal);
        // The modulus is now the golden polynomial.
        assert_eq!(f.modulus(), IntPoly::from_i64(&[-1, -1, 1]));
        // And β² = β + 1 holds in the shrunken field.
        let v = f.sub(&f.mul(&b, &b), &f.add(&b, &f.one()));
        assert_eq!(f.sign(&v).unwrap(), Ordering::Equal);
    }

    #[test]
    fn inverse_of_zero_value_is_rejected() {
        let f = golden_field();
        let b = f.beta();
        // β² - β - 1 is the zero element even though its residue is reduced.
        let z = f.sub(&f.sub(&f.mul(&b, &b), &b), &f.one());
        assert!(f.inv(&z).is_err());
    }

    #[test]
    fn bracket_refinement_tightens() {
        let f = golden_field();
        f.refine_bracket_to(&rat("1/1000000"));
        let (lo, hi) = f.bracket();
        assert!(&hi - &lo <= rat("1/1000000"));
        assert!(lo < rat("1618034/1000000") && rat("1618033/1000000") < hi);
    }

    #[test]
    fn rational_root_collapses_to_point() {
        // x^2 - 4 has root 2 in (3/2, 3); bisection lands on it exactly.
        let f = PolyField::new(&IntPoly::from_i64(&[-4, 0, 1]), rat("3/2"), rat("5/2")).unwrap();
        for _ in 0..4 {
            f.refine_bracket();
        }
        let (lo, hi) = f.bracket();
        assert_eq!(lo, rat("2"));
        assert_eq!(hi, rat("2"));
        // Signs still decide exactly at the point.
        let e = f.sub(&f.beta(), &f.from_rational(rat("2")));
        assert_eq!(f.sign(&e).unwrap(), Ordering::Equal);
    }

    #[test]
    fn field_is_shareable_across_threads() {
        let f = Arc::new(golden_field());
        let mut handles = Vec::new();
        for _ in 0..4 {
            let f = Arc::clone(&f);
            handles.push(std::thread::spawn(move || {
                let b = f.beta();
                let v = f.sub(&f.mul(&b, &b), &f.add(&b, &f.one()));
                f.sign(&v).unwrap()
            }));
        }
        for h in handles {
            assert_eq!(h.join().unwrap(), Ordering::Equal);
        }
    }
}
