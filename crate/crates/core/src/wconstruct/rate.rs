//! Rate-constrained cut selection and fast-growing block products.
//!
//! Both constructions take a target growth rate θ and certify every
//! comparison against powers of the base with interval arithmetic,
//! escalating precision along the context's bit ladder. A rate that
//! cannot meet its obligations is reported as such rather than
//! approximated.

use super::msequence::{MSequence, Provenance, ReadBudget, StepDetail, TermDriver, TermOut};
use crate::expand::ExpansionDomain;
use crate::numerics::{Enclosure, PrecisionContext, RefinableReal};
use crate::symseq::{BlockGen, Repeat, StructuralKind, SymbolicSequence, Word};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::sync::Arc;

/// A growth target n ↦ θ_n with exact rational values.
#[derive(Clone)]
pub enum ThetaFn {
    /// θ_n = 1: no growth requirement at all.
    One,
    /// θ_n = n.
    Linear,
    /// θ_n = 2ⁿ.
    PowerOfTwo,
    /// Any positive rational-valued rate.
    Custom(Arc<dyn Fn(u64) -> BigRational + Send + Sync>),
}

impl ThetaFn {
    /// Evaluate θ_n. Rates must be positive wherever they are consulted.
    pub fn eval(&self, n: u64) -> Result<BigRational> {
        let value = match self {
            ThetaFn::One => BigRational::one(),
            ThetaFn::Linear => BigRational::from_integer(BigInt::from(n)),
            ThetaFn::PowerOfTwo => {
                let shift = usize::try_from(n)
                    .ok()
                    .filter(|&s| s <= 1 << 24)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("2^{n} is too large to represent"))
                    })?;
                BigRational::from_integer(BigInt::one() << shift)
            }
            ThetaFn::Custom(f) => f(n),
        };
        if value <= BigRational::zero() {
            return Err(Error::InvalidInput(format!(
                "rate value θ_{n} = {value} is not positive"
            )));
        }
        Ok(value)
    }
}

/// A rate together with the declaration the searches rely on.
#[derive(Clone)]
pub struct RateSpec {
    pub theta: ThetaFn,
    /// Whether θ is nondecreasing and unbounded. The block-product search
    /// bisects on this declaration and refuses rates without it; the cut
    /// selection does not need it.
    pub monotone_unbounded: bool,
}

impl RateSpec {
    pub fn one() -> RateSpec {
        RateSpec { theta: ThetaFn::One, monotone_unbounded: false }
    }

    pub fn linear() -> RateSpec {
        RateSpec { theta: ThetaFn::Linear, monotone_unbounded: true }
    }

    pub fn power_of_two() -> RateSpec {
        RateSpec { theta: ThetaFn::PowerOfTwo, monotone_unbounded: true }
    }

    pub fn custom(
        f: impl Fn(u64) -> BigRational + Send + Sync + 'static,
        monotone_unbounded: bool,
    ) -> RateSpec {
        RateSpec { theta: ThetaFn::Custom(Arc::new(f)), monotone_unbounded }
    }
}

/// Certified β^m ≥ θ, escalating along the precision ladder.
fn pow_at_least(
    beta: &RefinableReal,
    m: u64,
    theta: &BigRational,
    ctx: &PrecisionContext,
) -> Result<bool> {
    for bits in ctx.bit_ladder() {
        let enc = beta.enclosure_at_bits(bits)?.pow_r(m, bits + 16);
        if enc.lo() >= theta {
            return Ok(true);
        }
        if enc.hi() < theta {
            return Ok(false);
        }
    }
    Err(Error::PrecisionExhausted {
        bits: ctx.max_bits,
        context: format!("deciding β^{m} against the rate target"),
    })
}

/// Select from M₀, in order, the earliest still-unconsidered cut m with
/// β^m ≥ θ_s, where s is the total digit length already selected.
///
/// The first selection is unconstrained (there is no previous block to
/// protect), as is any step whose target does not exceed 1. Candidates
/// skipped during a search are never revisited, so the result is a genuine
/// subsequence of M₀ and distinct targets produce distinct selections. The
/// returned sequence shares M₀'s memoized terms and ends exactly where M₀
/// ends.
pub fn subsequence_for_rate(
    m0: &MSequence,
    rate: &RateSpec,
    beta: &RefinableReal,
    ctx: &PrecisionContext,
) -> Result<MSequence> {
    let driver = RateDriver {
        m0: m0.clone(),
        rate: rate.clone(),
        beta: beta.clone(),
        ctx: ctx.clone(),
        next_index: 0,
        selected_digits: 0,
    };
    Ok(MSequence::from_driver(m0.d().clone(), Provenance::Manual, Box::new(driver), false))
}

struct RateDriver {
    m0: MSequence,
    rate: RateSpec,
    beta: RefinableReal,
    ctx: PrecisionContext,
    next_index: usize,
    selected_digits: u64,
}

impl TermDriver for RateDriver {
    fn next_term(&mut self, budget: &mut ReadBudget) -> Result<Option<TermOut>> {
        let target = if self.selected_digits == 0 {
            None
        } else {
            let theta = self.rate.theta.eval(self.selected_digits)?;
            if theta <= BigRational::one() {
                None
            } else {
                Some(theta)
            }
        };
        loop {
            budget.charge(1, "while examining a candidate cut")?;
            self.next_index += 1;
            let Some(m) = self.m0.try_term(self.next_index)? else {
                return Ok(None);
            };
            let selected = match &target {
                None => true,
                Some(theta) => pow_at_least(&self.beta, m, theta, &self.ctx)?,
            };
            if selected {
                self.selected_digits =
                    self.selected_digits.checked_add(m).ok_or_else(|| {
                        Error::InvalidInput("selected digit length overflows".to_string())
                    })?;
                return Ok(Some(TermOut { m, detail: StepDetail::Plain }));
            }
        }
    }
}

/// The certified products θ_s · (1 − Π_β(σ^s ω(M))) at the block
/// boundaries s = m₁ + ⋯ + m_j, for j = 1..=count. The enclosure widths
/// shrink with θ so the products stay meaningful even for rates like 2ⁿ.
pub fn rate_checkpoints(
    m: &MSequence,
    rate: &RateSpec,
    domain: &ExpansionDomain,
    count: usize,
) -> Result<Vec<Enclosure>> {
    let omega = super::omega::omega_of_m(m)?;
    let one = Enclosure::point(BigRational::one());
    let mut out = Vec::with_capacity(count);
    for j in 1..=count {
        let s = m.partial_sum(j)?;
        let theta = rate.theta.eval(s)?;
        // Absolute precision must outpace θ's magnitude for the product to
        // keep ~30 significant bits.
        let theta_bits = u32::try_from(theta.numer().bits()).unwrap_or(u32::MAX - 64);
        let bits = theta_bits.saturating_add(32).max(64);
        let tail = domain.project(&omega.shift(s))?;
        let diff = one.sub_r(&tail.enclosure_at_bits(bits)?, bits);
        out.push(Enclosure::point(theta).mul_r(&diff, bits));
    }
    Ok(out)
}

/// The least k with θ_k ≥ β^{2^{i+1}}, for i = 1..=count: the repeat
/// counts that make the mirror-block product converge at the rate θ.
pub fn fast_block_repeats(
    rate: &RateSpec,
    beta: &RefinableReal,
    ctx: &PrecisionContext,
    count: usize,
) -> Result<Vec<u64>> {
    if !rate.monotone_unbounded {
        return Err(Error::RateTooSlow(
            "the block construction needs a rate declared nondecreasing and unbounded"
                .to_string(),
        ));
    }
    (1..=count).map(|i| least_k_reaching(rate, beta, block_exponent(i)?, ctx)).collect()
}

fn block_exponent(i: usize) -> Result<u64> {
    u32::try_from(i + 1)
        .ok()
        .filter(|&s| s < 64)
        .map(|s| 1u64 << s)
        .ok_or_else(|| Error::InvalidInput("block index overflows the exponent range".to_string()))
}

/// Least k ≥ 1 with θ_k ≥ β^exp, by doubling then bisection; the declared
/// monotonicity is what justifies the bisection.
fn least_k_reaching(
    rate: &RateSpec,
    beta: &RefinableReal,
    exp: u64,
    ctx: &PrecisionContext,
) -> Result<u64> {
    const CAP: u64 = 1 << 62;
    let reaches = |k: u64| -> Result<bool> {
        let theta = rate.theta.eval(k)?;
        theta_at_least_pow(&theta, beta, exp, ctx)
    };
    let mut hi = 1u64;
    while !reaches(hi)? {
        if hi >= CAP {
            return Err(Error::RateTooSlow(format!(
                "the rate does not reach β^{exp} within 2^62 steps"
            )));
        }
        hi *= 2;
    }
    if hi == 1 {
        return Ok(1);
    }
    let mut lo = hi / 2; // the last value that failed
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Certified θ ≥ β^exp.
fn theta_at_least_pow(
    theta: &BigRational,
    beta: &RefinableReal,
    exp: u64,
    ctx: &PrecisionContext,
) -> Result<bool> {
    for bits in ctx.bit_ladder() {
        let enc = beta.enclosure_at_bits(bits)?.pow_r(exp, bits + 16);
        if theta >= enc.hi() {
            return Ok(true);
        }
        if theta < enc.lo() {
            return Ok(false);
        }
    }
    Err(Error::PrecisionExhausted {
        bits: ctx.max_bits,
        context: format!("comparing the rate against β^{exp}"),
    })
}

/// The finite product (b₁b̄₁)^{k₁} ⋯ (b_r b̄_r)^{k_r}, where b_i is the
/// prefix of d of length p·2^{i−1} and p is the length of d's first mirror
/// block. Exposed separately so neighbouring repeat counts can be compared
/// against the canonical ones.
pub fn block_product(d: &SymbolicSequence, repeats: &[u64]) -> Result<SymbolicSequence> {
    let first = d.as_pmirror_first().ok_or_else(|| {
        Error::InvalidInput("block products need a mirror-doubling base sequence".to_string())
    })?;
    if repeats.is_empty() {
        return Err(Error::InvalidInput("at least one block is needed".to_string()));
    }
    let p = first.len();
    let mut segments = Vec::with_capacity(repeats.len());
    for (i, &k) in repeats.iter().enumerate() {
        if k == 0 {
            return Err(Error::InvalidInput("repeat counts must be positive".to_string()));
        }
        segments.push((mirror_segment(d, p, i)?, Repeat::finite_u64(k)));
    }
    let gen = SegmentGen { segments: segments.into_iter() };
    Ok(SymbolicSequence::from_blocks(
        d.alphabet(),
        Box::new(gen),
        "mirror-block product",
        None,
    ))
}

/// b_i · b̄_i for the 0-based block index `i`.
fn mirror_segment(d: &SymbolicSequence, p: usize, i: usize) -> Result<Word> {
    let blen = u32::try_from(i)
        .ok()
        .and_then(|i| p.checked_shl(i))
        .ok_or_else(|| Error::InvalidInput("block length overflows".to_string()))?;
    let b = Word::new(d.alphabet(), d.materialize_prefix(blen)?)?;
    Ok(b.concat(&b.reflect()))
}

struct SegmentGen {
    segments: std::vec::IntoIter<(Word, Repeat)>,
}

impl BlockGen for SegmentGen {
    fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
        Ok(self.segments.next())
    }
}

/// The infinite mirror-block product ∏_i (b_i b̄_i)^{k_i} with the k_i of
/// [`fast_block_repeats`]: the first `count` repeat counts are certified
/// eagerly, later ones are computed on demand as reads reach them (and a
/// rate that stops reaching its targets fails at that read).
pub fn fast_block_sequence(
    rate: &RateSpec,
    d: &SymbolicSequence,
    beta: &RefinableReal,
    count: usize,
    ctx: &PrecisionContext,
) -> Result<SymbolicSequence> {
    let first = d.as_pmirror_first().ok_or_else(|| {
        Error::InvalidInput("the block construction needs a mirror-doubling base sequence".to_string())
    })?;
    let repeats = fast_block_repeats(rate, beta, ctx, count)?;
    let gen = FastBlockGen {
        d: d.clone(),
        p: first.len(),
        rate: rate.clone(),
        beta: beta.clone(),
        ctx: ctx.clone(),
        repeats,
        index: 0,
    };
    Ok(SymbolicSequence::from_blocks_tagged(
        d.alphabet(),
        Box::new(gen),
        "fast mirror-block product",
        None,
        Some((StructuralKind::BlockProductDistinct, d.clone())),
    ))
}

struct FastBlockGen {
    d: SymbolicSequence,
    p: usize,
    rate: RateSpec,
    beta: RefinableReal,
    ctx: PrecisionContext,
    repeats: Vec<u64>,
    index: usize,
}

impl BlockGen for FastBlockGen {
    fn next_block(&mut self) -> Result<Option<(Word, Repeat)>> {
        let i = self.index;
        self.index += 1;
        let k = if i < self.repeats.len() {
            self.repeats[i]
        } else {
            least_k_reaching(&self.rate, &self.beta, block_exponent(i + 1)?, &self.ctx)?
        };
        Ok(Some((mirror_segment(&self.d, self.p, i)?, Repeat::finite_u64(k))))
    }
}
