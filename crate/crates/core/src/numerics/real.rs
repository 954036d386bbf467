//! Refinable real numbers: an enclosure plus a way to shrink it.

use super::enclosure::Enclosure;
use super::field::{FieldElem, PolyField};
use super::poly::{IntPoly, SturmChain};
use super::solve::Sign;
use super::PrecisionContext;
use crate::{Error, Result};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::sync::{Arc, Mutex};

/// Provenance label carried by every real, for diagnostics and output
/// records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Literal,
    PolynomialRoot,
    SolverOutput,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Literal => write!(f, "literal"),
            Tag::PolynomialRoot => write!(f, "polynomial-root"),
            Tag::SolverOutput => write!(f, "solver-output"),
        }
    }
}

/// Extra construction metadata a real can carry. A base produced by the
/// mirror-sequence solver remembers its generator word, which lets the
/// classifier use the structure theorem for such bases instead of a finite
/// scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    MirrorBase { generator: Vec<u8>, alpha: u8 },
}

/// Sign-at-a-point oracle for bisection-backed reals. Implementations decide
/// the sign of a fixed monotone function at exact rational arguments, either
/// exactly or by escalating internal precision; `Sign::Zero` must only be
/// returned when certified.
pub trait SignFn: Send + Sync {
    fn sign_at(&self, x: &BigRational, ctx: &PrecisionContext) -> Result<Sign>;
    fn describe(&self) -> String {
        "monotone function".to_string()
    }
}

/// Outcome of a comparison under a precision budget. Equality is never
/// certified: two reals that agree to the bit ceiling report `Undecided`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOutcome {
    Less,
    Greater,
    Undecided { bits: u32 },
}

/// Structural description of a real, for code that can exploit exactness.
#[derive(Debug)]
pub enum AlgebraicForm {
    /// The value is this exact rational.
    Rational(BigRational),
    /// The unique root of `modulus` in `bracket`.
    PolyRoot { modulus: IntPoly, bracket: (BigRational, BigRational) },
    /// An exact element of ℚ(β) for the field's bracketed root β.
    FieldElement { field: Arc<PolyField>, elem: FieldElem },
    /// No exact structure is available; only the enclosure is.
    Opaque,
}

enum RealKind {
    Point,
    PolyRoot {
        sf: IntPoly,
        /// Sign of `sf` at the current lower endpoint (constant under
        /// bisection).
        sign_lo: Sign,
    },
    Bisect {
        f: Arc<dyn SignFn>,
        sign_lo: Sign,
        ctx: PrecisionContext,
    },
    Computed {
        f: Arc<dyn Fn(u32) -> Result<Enclosure> + Send + Sync>,
        bits: Mutex<u32>,
    },
    FieldElement {
        field: Arc<PolyField>,
        elem: FieldElem,
        bits: Mutex<u32>,
    },
}

struct RealInner {
    kind: RealKind,
    cell: Mutex<Enclosure>,
    tag: Tag,
    origin: Option<Origin>,
}

/// A real number known through a shrinkable enclosure.
///
/// Clones share state: refining one handle refines them all. The type is
/// `Send + Sync`; interior updates are mutex-guarded.
#[derive(Clone)]
pub struct RefinableReal {
    inner: Arc<RealInner>,
}

impl RefinableReal {
    // ----- constructors -----

    pub fn from_rational(q: BigRational) -> Self {
        Self::build(RealKind::Point, Enclosure::point(q), Tag::Literal, None)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(v.into()))
    }

    /// The unique root of `poly` in `(lo, hi)`. The bracket is verified with
    /// a Sturm chain of the squarefree part; endpoints must not be roots.
    pub fn poly_root(poly: &IntPoly, lo: BigRational, hi: BigRational) -> Result<Self> {
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
        let sign_lo = if at_lo.is_positive() { Sign::Pos } else { Sign::Neg };
        Ok(Self::build(
            RealKind::PolyRoot { sf, sign_lo },
            Enclosure::new(lo, hi),
            Tag::PolynomialRoot,
            None,
        ))
    }

    /// A root of the sign oracle inside `(lo, hi)`, located by bisection.
    /// The oracle must have certified opposite strict signs at the
    /// endpoints; if an endpoint sign is `Zero`, the endpoint itself is the
    /// root and a point real is returned.
    pub fn bisect_root(
        f: Arc<dyn SignFn>,
        lo: BigRational,
        hi: BigRational,
        ctx: &PrecisionContext,
    ) -> Result<Self> {
        if lo >= hi {
            return Err(Error::InvalidInput("empty bisection bracket".to_string()));
        }
        let s_lo = f.sign_at(&lo, ctx)?;
        if s_lo == Sign::Zero {
            return Ok(Self::build(RealKind::Point, Enclosure::point(lo), Tag::SolverOutput, None));
        }
        let s_hi = f.sign_at(&hi, ctx)?;
        if s_hi == Sign::Zero {
            return Ok(Self::build(RealKind::Point, Enclosure::point(hi), Tag::SolverOutput, None));
        }
        if s_lo == s_hi {
            return Err(Error::NoSignChange { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Self::build(
            RealKind::Bisect { f, sign_lo: s_lo, ctx: ctx.clone() },
            Enclosure::new(lo, hi),
            Tag::SolverOutput,
            None,
        ))
    }

    /// A value defined by an enclosure-producing procedure: `f(bits)` must
    /// return an enclosure of the value whose width tends to zero as `bits`
    /// grows. `initial` must already contain the value.
    pub fn computed(
        f: Arc<dyn Fn(u32) -> Result<Enclosure> + Send + Sync>,
        initial: Enclosure,
        tag: Tag,
    ) -> Self {
        Self::build(RealKind::Computed { f, bits: Mutex::new(64) }, initial, tag, None)
    }

    /// An exact element of ℚ(β).
    pub fn field_element(field: Arc<PolyField>, elem: FieldElem, tag: Tag) -> Self {
        let cell = field.eval_enclosure(&elem, 192);
        Self::build(
            RealKind::FieldElement { field, elem, bits: Mutex::new(192) },
            cell,
            tag,
            None,
        )
    }

    fn build(kind: RealKind, cell: Enclosure, tag: Tag, origin: Option<Origin>) -> Self {
        RefinableReal { inner: Arc::new(RealInner { kind, cell: Mutex::new(cell), tag, origin }) }
    }

    /// Attach construction metadata. Intended for use at construction time,
    /// before the value is shared: the returned handle has its own enclosure
    /// cell (snapshotted now) but shares any underlying oracle state.
    pub fn with_origin(&self, origin: Origin) -> Self {
        let cell = self.enclosure();
        RefinableReal {
            inner: Arc::new(RealInner {
                kind: clone_kind(&self.inner.kind),
                cell: Mutex::new(cell),
                tag: self.inner.tag,
                origin: Some(origin),
            }),
        }
    }

    // ----- inspection -----

    pub fn tag(&self) -> Tag {
        self.inner.tag
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.inner.origin.as_ref()
    }

    /// Snapshot of the current enclosure.
    pub fn enclosure(&self) -> Enclosure {
        self.inner.cell.lock().unwrap().clone()
    }

    pub fn width(&self) -> BigRational {
        self.enclosure().width()
    }

    /// Exact structure, if any. A collapsed bisection (point cell) reports
    /// `Rational` regardless of its kind.
    pub fn algebraic_form(&self) -> AlgebraicForm {
        let cell = self.enclosure();
        if cell.is_point() {
            return AlgebraicForm::Rational(cell.lo().clone());
        }
        match &self.inner.kind {
            RealKind::PolyRoot { sf, .. } => AlgebraicForm::PolyRoot {
                modulus: sf.clone(),
                bracket: (cell.lo().clone(), cell.hi().clone()),
            },
            RealKind::FieldElement { field, elem, .. } => {
                AlgebraicForm::FieldElement { field: Arc::clone(field), elem: elem.clone() }
            }
            _ => AlgebraicForm::Opaque,
        }
    }

    /// Midpoint as f64, for non-certified uses (choosing truncation depths,
    /// progress displays). Never feed this back into a certified decision.
    pub fn approx_f64(&self) -> f64 {
        self.enclosure().midpoint().to_f64().unwrap_or(f64::NAN)
    }

    // ----- refinement -----

    /// Shrink the enclosure to at most half its current width.
    pub fn refine(&self) -> Result<()> {
        let entry_width = self.width();
        if entry_width.is_zero() {
            return Ok(());
        }
        let target = entry_width / BigRational::from_integer(2.into());
        self.refine_to_width(&target)
    }

    /// Shrink the enclosure until its width is at most `target`.
    pub fn refine_to_width(&self, target: &BigRational) -> Result<()> {
        if target.is_negative() {
            return Err(Error::InvalidInput("negative width target".to_string()));
        }
        loop {
            if &self.width() <= target {
                return Ok(());
            }
            self.refine_step(target)?;
        }
    }

    /// Shrink until the width is at most 2^-bits.
    pub fn refine_to_bits(&self, bits: u32) -> Result<()> {
        self.refine_to_width(&super::pow2(-(bits as i64)))
    }

    /// Enclosure refined to width at most 2^-bits.
    pub fn enclosure_at_bits(&self, bits: u32) -> Result<Enclosure> {
        self.refine_to_bits(bits)?;
        Ok(self.enclosure())
    }

    fn refine_step(&self, target: &BigRational) -> Result<()> {
        match &self.inner.kind {
            RealKind::Point => Ok(()),
            RealKind::PolyRoot { sf, sign_lo } => {
                let mut cell = self.inner.cell.lock().unwrap();
                let m = cell.midpoint();
                let v = sf.eval_rational(&m);
                *cell = if v.is_zero() {
                    Enclosure::point(m)
                } else if (v.is_positive() && *sign_lo == Sign::Pos)
                    || (v.is_negative() && *sign_lo == Sign::Neg)
                {
                    Enclosure::new(m, cell.hi().clone())
                } else {
                    Enclosure::new(cell.lo().clone(), m)
                };
                Ok(())
            }
            RealKind::Bisect { f, sign_lo, ctx } => {
                let mut cell = self.inner.cell.lock().unwrap();
                let new_cell = bisect_once(f.as_ref(), &cell, *sign_lo, ctx)?;
                *cell = new_cell;
                Ok(())
            }
            RealKind::Computed { f, bits } => {
                let mut bits = bits.lock().unwrap();
                let mut rounds = 0;
                loop {
                    *bits = bits.saturating_mul(2).min(1 << 22);
                    let e = f(*bits)?;
                    {
                        let mut cell = self.inner.cell.lock().unwrap();
                        *cell = cell.intersect(&e)?;
                        if &cell.width() <= target {
                            return Ok(());
                        }
                    }
                    rounds += 1;
                    if *bits >= 1 << 22 && rounds > 4 {
                        return Err(Error::PrecisionExhausted {
                            bits: *bits,
                            context: "computed value stopped converging".to_string(),
                        });
                    }
                }
            }
            RealKind::FieldElement { field, elem, bits } => {
                let mut bits = bits.lock().unwrap();
                for _ in 0..8 {
                    field.refine_bracket();
                }
                *bits = bits.saturating_add(64).min(1 << 22);
                let e = field.eval_enclosure(elem, *bits);
                let mut cell = self.inner.cell.lock().unwrap();
                *cell = cell.intersect(&e)?;
                Ok(())
            }
        }
    }
}

/// One bisection step that preserves the endpoint-sign invariant. When the
/// midpoint sign cannot be decided (it may be an exact root of a function
/// that certifies signs only by enclosure), nearby interior points are tried
/// before giving up: a monotone function has at most one root, so at most
/// one probe point can be undecidable for that reason.
fn bisect_once(
    f: &dyn SignFn,
    cell: &Enclosure,
    sign_lo: Sign,
    ctx: &PrecisionContext,
) -> Result<Enclosure> {
    let width = cell.width();
    let probes: [(i64, i64); 3] = [(1, 2), (5, 11), (7, 13)];
    let mut last_err = None;
    for (num, den) in probes {
        let m = cell.lo().clone()
            + &width * BigRational::new(num.into(), den.into());
        match f.sign_at(&m, ctx) {
            Ok(Sign::Zero) => return Ok(Enclosure::point(m)),
            Ok(s) => {
                return Ok(if s == sign_lo {
                    Enclosure::new(m, cell.hi().clone())
                } else {
                    Enclosure::new(cell.lo().clone(), m)
                });
            }
            Err(e @ Error::PrecisionExhausted { .. }) => {
                last_err = Some(e);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("loop ran"))
}

fn clone_kind(kind: &RealKind) -> RealKind {
    match kind {
        RealKind::Point => RealKind::Point,
        RealKind::PolyRoot { sf, sign_lo } => {
            RealKind::PolyRoot { sf: sf.clone(), sign_lo: *sign_lo }
        }
        RealKind::Bisect { f, sign_lo, ctx } => {
            RealKind::Bisect { f: Arc::clone(f), sign_lo: *sign_lo, ctx: ctx.clone() }
        }
        RealKind::Computed { f, bits } => RealKind::Computed {
            f: Arc::clone(f),
            bits: Mutex::new(*bits.lock().unwrap()),
        },
        RealKind::FieldElement { field, elem, bits } => RealKind::FieldElement {
            field: Arc::clone(field),
            elem: elem.clone(),
            bits: Mutex::new(*bits.lock().unwrap()),
        },
    }
}

/// Compare two reals under a precision budget.
///
/// Both enclosures are refined along the context's bit ladder until they
/// separate. Equality is never certified: values that agree to the ceiling
/// come back `Undecided` with the exhausted bit count, and comparing a real
/// against itself is `Undecided` by definition.
pub fn compare(a: &RefinableReal, b: &RefinableReal, ctx: &PrecisionContext) -> Result<CmpOutcome> {
    use std::cmp::Ordering;
    if Arc::ptr_eq(&a.inner, &b.inner) {
        return Ok(CmpOutcome::Undecided { bits: ctx.max_bits });
    }
    for bits in ctx.bit_ladder() {
        match a.enclosure().compare(&b.enclosure()) {
            Some(Ordering::Less) => return Ok(CmpOutcome::Less),
            Some(Ordering::Greater) => return Ok(CmpOutcome::Greater),
            Some(Ordering::Equal) | None => {}
        }
        // Point-vs-point that failed to separate is exact equality; no
        // amount of refinement changes it.
        if a.width().is_zero() && b.width().is_zero() {
            return Ok(CmpOutcome::Undecided { bits: ctx.max_bits });
        }
        match (a.refine_to_bits(bits), b.refine_to_bits(bits)) {
            (Ok(()), Ok(())) => {}
            // A side that cannot refine further may still be separable by
            // the other side's progress; keep going.
            (Err(Error::PrecisionExhausted { .. }), _)
            | (_, Err(Error::PrecisionExhausted { .. })) => {}
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    match a.enclosure().compare(&b.enclosure()) {
        Some(Ordering::Less) => Ok(CmpOutcome::Less),
        Some(Ordering::Greater) => Ok(CmpOutcome::Greater),
        _ => Ok(CmpOutcome::Undecided { bits: ctx.max_bits }),
    }
}

impl RefinableReal {
    /// Method form of [`compare`].
    pub fn compare(&self, other: &RefinableReal, ctx: &PrecisionContext) -> Result<CmpOutcome> {
        compare(self, other, ctx)
    }

    /// Compare against an exact rational.
    pub fn compare_rational(
        &self,
        q: &BigRational,
        ctx: &PrecisionContext,
    ) -> Result<CmpOutcome> {
        self.compare(&RefinableReal::from_rational(q.clone()), ctx)
    }
}

impl fmt::Debug for RefinableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = self.enclosure();
        write!(f, "RefinableReal({} tag={} width={})", cell, self.inner.tag, cell.width())
    }
}

impl fmt::Display for RefinableReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.enclosure())
    }
}
