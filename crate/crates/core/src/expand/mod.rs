//! Digit expansions in a non-integer base: the quasi-greedy expansion, the
//! value map Π(ω) = Σ ω_j β^{−j}, prefix counting, and base recovery from a
//! prescribed expansion.
//!
//! A domain fixes the alphabet {0..α} and the base β with 1 < β < α+1, and
//! carries one of three arithmetic backends chosen from the base's exact
//! structure: exact rational, exact arithmetic in ℚ(β) for an algebraic β,
//! or certified interval arithmetic for bases only known through a
//! refinable enclosure. Exact backends decide every digit outright;
//! the interval backend escalates precision and reports honestly when a
//! decision is out of reach.

mod count;
mod project;
mod stream;

pub use project::base_from_expansion;
pub use stream::{ExpansionOutcome, QuasiGreedyStream};

use crate::numerics::{
    AlgebraicForm, Enclosure, FieldElem, PolyField, PrecisionContext, RefinableReal,
};
use crate::symseq::Alphabet;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::cmp::Ordering;
use std::sync::Arc;

#[derive(Clone)]
pub(crate) enum Backend {
    Rational { beta: BigRational },
    Algebraic { field: Arc<PolyField>, beta: FieldElem },
    Interval { beta: RefinableReal },
}

/// An expansion setting: alphabet {0..α} and base β with 1 < β < α+1.
#[derive(Clone)]
pub struct ExpansionDomain {
    alphabet: Alphabet,
    backend: Backend,
    beta: RefinableReal,
    ctx: PrecisionContext,
}

impl ExpansionDomain {
    /// Build a domain, picking the sharpest backend the base supports and
    /// certifying 1 < β < α+1.
    pub fn new(alphabet: Alphabet, beta: &RefinableReal, ctx: &PrecisionContext) -> Result<Self> {
        let backend = match beta.algebraic_form() {
            AlgebraicForm::Rational(q) => Backend::Rational { beta: q },
            AlgebraicForm::PolyRoot { modulus, bracket } => {
                let field = Arc::new(PolyField::new(&modulus, bracket.0, bracket.1)?);
                let gen = field.beta();
                Backend::Algebraic { field, beta: gen }
            }
            AlgebraicForm::FieldElement { field, elem } => Backend::Algebraic { field, beta: elem },
            AlgebraicForm::Opaque => Backend::Interval { beta: beta.clone() },
        };
        let domain = ExpansionDomain {
            alphabet,
            backend,
            beta: beta.clone(),
            ctx: ctx.clone(),
        };
        domain.certify_base_range()?;
        Ok(domain)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// The base as a refinable real (exact for rational and algebraic
    /// backends).
    pub fn beta(&self) -> &RefinableReal {
        &self.beta
    }

    pub(crate) fn context(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub(crate) fn backend(&self) -> &Backend {
        &self.backend
    }

    fn certify_base_range(&self) -> Result<()> {
        let one = BigRational::one();
        let cap = BigRational::from_integer(BigInt::from(self.alphabet.alpha() as i64 + 1));
        let lo_ok = self.cmp_beta_rational(&one)? == Ordering::Greater;
        let hi_ok = self.cmp_beta_rational(&cap)? == Ordering::Less;
        if !lo_ok || !hi_ok {
            return Err(Error::InvalidInput(format!(
                "base must lie strictly between 1 and {} for the alphabet {}",
                self.alphabet.alpha() as u16 + 1,
                self.alphabet,
            )));
        }
        Ok(())
    }

    /// Certified comparison of β against a rational.
    pub(crate) fn cmp_beta_rational(&self, q: &BigRational) -> Result<Ordering> {
        match &self.backend {
            Backend::Rational { beta } => Ok(beta.cmp(q)),
            Backend::Algebraic { field, beta } => {
                let diff = field.sub(beta, &field.from_rational(q.clone()));
                field.sign(&diff)
            }
            Backend::Interval { beta } => match beta.compare_rational(q, &self.ctx)? {
                crate::numerics::CmpOutcome::Less => Ok(Ordering::Less),
                crate::numerics::CmpOutcome::Greater => Ok(Ordering::Greater),
                crate::numerics::CmpOutcome::Undecided { bits } => {
                    Err(Error::PrecisionExhausted {
                        bits,
                        context: "comparing an enclosure-only base against a rational".to_string(),
                    })
                }
            },
        }
    }

    /// α/(β−1), the supremum of representable values, exact per backend.
    pub(crate) fn value_bound_exact(&self) -> Result<ExactValue> {
        let alpha = BigRational::from_integer(BigInt::from(self.alphabet.alpha()));
        match &self.backend {
            Backend::Rational { beta } => {
                Ok(ExactValue::Rat(alpha / (beta - BigRational::one())))
            }
            Backend::Algebraic { field, beta } => {
                let denom = field.sub(beta, &field.one());
                let inv = field.inv(&denom)?;
                Ok(ExactValue::Field(field.mul_rational(&inv, &alpha)))
            }
            Backend::Interval { .. } => Err(Error::InvalidInput(
                "no exact value bound for an enclosure-only base".to_string(),
            )),
        }
    }

    /// Enclosure of α/(β−1) at roughly `bits` precision.
    pub(crate) fn value_bound_enclosure(&self, bits: u32) -> Result<Enclosure> {
        let alpha = Enclosure::from_i64(self.alphabet.alpha() as i64);
        let beta = self.beta_enclosure(bits)?;
        let one = Enclosure::from_i64(1);
        alpha.div_r(&beta.sub_r(&one, bits + 8), bits)
    }

    pub(crate) fn beta_enclosure(&self, bits: u32) -> Result<Enclosure> {
        match &self.backend {
            Backend::Rational { beta } => Ok(Enclosure::point(beta.clone())),
            Backend::Algebraic { field, beta } => Ok(field.eval_enclosure(beta, bits)),
            Backend::Interval { beta } => beta.enclosure_at_bits(bits),
        }
    }

    // ----- exact arithmetic on backend values -----

    pub(crate) fn ev_from_rational(&self, q: BigRational) -> Result<ExactValue> {
        match &self.backend {
            Backend::Rational { .. } => Ok(ExactValue::Rat(q)),
            Backend::Algebraic { field, .. } => Ok(ExactValue::Field(field.from_rational(q))),
            Backend::Interval { .. } => Err(Error::InvalidInput(
                "exact arithmetic unavailable for an enclosure-only base".to_string(),
            )),
        }
    }

    /// β·v.
    pub(crate) fn ev_scale(&self, v: &ExactValue) -> ExactValue {
        match (&self.backend, v) {
            (Backend::Rational { beta }, ExactValue::Rat(r)) => ExactValue::Rat(beta * r),
            (Backend::Algebraic { field, beta }, ExactValue::Field(e)) => {
                ExactValue::Field(field.mul(beta, e))
            }
            _ => unreachable!("value built for a different backend"),
        }
    }

    /// v − n.
    pub(crate) fn ev_sub_integer(&self, v: &ExactValue, n: i64) -> ExactValue {
        let q = BigRational::from_integer(BigInt::from(n));
        match (&self.backend, v) {
            (Backend::Rational { .. }, ExactValue::Rat(r)) => ExactValue::Rat(r - q),
            (Backend::Algebraic { field, .. }, ExactValue::Field(e)) => {
                ExactValue::Field(field.sub(e, &field.from_rational(q)))
            }
            _ => unreachable!("value built for a different backend"),
        }
    }

    /// Certified sign of v − n.
    pub(crate) fn ev_cmp_integer(&self, v: &ExactValue, n: i64) -> Result<Ordering> {
        match (&self.backend, v) {
            (Backend::Rational { .. }, ExactValue::Rat(r)) => {
                Ok(r.cmp(&BigRational::from_integer(BigInt::from(n))))
            }
            (Backend::Algebraic { field, .. }, ExactValue::Field(e)) => {
                let diff = field.sub(
                    e,
                    &field.from_rational(BigRational::from_integer(BigInt::from(n))),
                );
                field.sign(&diff)
            }
            _ => unreachable!("value built for a different backend"),
        }
    }

    /// Certified sign of a − b.
    pub(crate) fn ev_cmp(&self, a: &ExactValue, b: &ExactValue) -> Result<Ordering> {
        match (&self.backend, a, b) {
            (Backend::Rational { .. }, ExactValue::Rat(x), ExactValue::Rat(y)) => Ok(x.cmp(y)),
            (Backend::Algebraic { field, .. }, ExactValue::Field(x), ExactValue::Field(y)) => {
                field.cmp_elems(x, y)
            }
            _ => unreachable!("values built for a different backend"),
        }
    }

    /// Largest integer strictly below v (v must be positive and modest in
    /// size; used for digit selection).
    pub(crate) fn ev_strict_floor(&self, v: &ExactValue) -> Result<BigInt> {
        match (&self.backend, v) {
            (Backend::Rational { .. }, ExactValue::Rat(r)) => Ok(strict_floor_rational(r)),
            (Backend::Algebraic { field, .. }, ExactValue::Field(e)) => {
                let enc = field.eval_enclosure(e, 128);
                let mut m = strict_floor_rational(enc.hi());
                let floor_lo = enc.lo().floor().to_integer() - BigInt::one();
                loop {
                    // Strict floor is m iff m < v.
                    let diff = field.sub(
                        e,
                        &field.from_rational(BigRational::from_integer(m.clone())),
                    );
                    if field.sign(&diff)? == Ordering::Greater {
                        return Ok(m);
                    }
                    m -= 1;
                    if m < floor_lo {
                        return Err(Error::CrossCheckFailed(
                            "strict floor search left its certified enclosure".to_string(),
                        ));
                    }
                }
            }
            _ => unreachable!("value built for a different backend"),
        }
    }

    /// Exact floor of v (largest integer ≤ v).
    pub(crate) fn ev_floor(&self, v: &ExactValue) -> Result<BigInt> {
        match (&self.backend, v) {
            (Backend::Rational { .. }, ExactValue::Rat(r)) => Ok(r.floor().to_integer()),
            (Backend::Algebraic { field, .. }, ExactValue::Field(e)) => {
                let enc = field.eval_enclosure(e, 128);
                let mut m = enc.hi().floor().to_integer();
                let floor_lo = enc.lo().floor().to_integer() - BigInt::one();
                loop {
                    // Floor is m iff v − m ≥ 0.
                    let diff = field.sub(
                        e,
                        &field.from_rational(BigRational::from_integer(m.clone())),
                    );
                    if field.sign(&diff)? != Ordering::Less {
                        return Ok(m);
                    }
                    m -= 1;
                    if m < floor_lo {
                        return Err(Error::CrossCheckFailed(
                            "floor search left its certified enclosure".to_string(),
                        ));
                    }
                }
            }
            _ => unreachable!("value built for a different backend"),
        }
    }

    /// Canonical hash key for cycle detection.
    pub(crate) fn ev_key(&self, v: &ExactValue) -> Vec<BigRational> {
        match v {
            ExactValue::Rat(r) => vec![r.clone()],
            ExactValue::Field(e) => e.coeffs(),
        }
    }
}

/// An exact backend value: a rational, or an element of ℚ(β).
#[derive(Clone)]
pub(crate) enum ExactValue {
    Rat(BigRational),
    Field(FieldElem),
}

/// Largest integer strictly less than q.
pub(crate) fn strict_floor_rational(q: &BigRational) -> BigInt {
    let f = q.floor().to_integer();
    if q.is_integer() {
        f - BigInt::one()
    } else {
        f
    }
}
