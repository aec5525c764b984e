//! Independent reference implementations used to validate both engines.
//!
//! Nothing here reuses the engines' computational paths. The truncation
//! oracle replaces each fair tail by `extension_depth` explicit fair bits
//! over a zero tail, then enumerates realisations with plain scaled-integer
//! arithmetic; a law built this way is within total variation `2^(1-E)` of
//! the exact sum law and `scale * 2^-E` of the exact product law. The
//! sampler draws realisations from a seeded, fully specified generator and
//! tallies window patterns.
//!
//! Extension bits are not looped over one combination at a time: for each
//! explicit realisation the number of extension values landing in a window
//! pattern is an exact integer interval count (a stride count for products,
//! a triangular count for sums). The result is identical to the literal
//! loop — the unit tests check that against a naive double loop — and keeps
//! deep extensions affordable.
//!
//! Randomness contract: the sampler uses the ChaCha8 stream (rand_chacha's
//! `ChaCha8Rng`) seeded with the configured 64-bit seed. Bounded uniforms
//! are drawn by top-bit rejection on the raw 64-bit stream, so identical
//! seeds give identical reports on every platform.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{FiqError, Result};
use crate::exact::DEFAULT_ENUMERATION_CAP;
use crate::law::{BitPattern, JointLaw, TailNote, Window};
use crate::number::{Fiq, Tail};
use crate::propensity::Propensity;

/// Deepest supported tail extension; keeps every scaled value inside u128.
const MAX_EXTENSION: u32 = 48;

/// Parameters of an oracle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    extension_depth: u32,
    sample_count: u64,
    seed: u64,
}

impl OracleConfig {
    pub fn new(extension_depth: u32, sample_count: u64, seed: u64) -> Result<Self> {
        if extension_depth == 0 {
            return Err(FiqError::InvalidArgument(
                "extension depth must be at least 1".into(),
            ));
        }
        if sample_count == 0 {
            return Err(FiqError::InvalidArgument(
                "sample count must be at least 1".into(),
            ));
        }
        Ok(Self {
            extension_depth,
            sample_count,
            seed,
        })
    }

    pub fn extension_depth(&self) -> u32 {
        self.extension_depth
    }

    pub fn sample_count(&self) -> u64 {
        self.sample_count
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Explicit bits of one operand, aligned to a common depth and scaled by
/// `2^depth`: a deterministic base plus per-bit weights for the rest.
struct ScaledBits {
    base: u128,
    weights: Vec<u128>,
    probs: Vec<Propensity>,
}

fn scaled_bits(q: &Fiq, depth: u32) -> ScaledBits {
    let mut base = 0u128;
    let mut weights = Vec::new();
    let mut probs = Vec::new();
    for k in 1..=depth {
        let p = q.propensity_at(k);
        let weight = 1u128 << (depth - k);
        if p.is_one() {
            base += weight;
        } else if !p.is_zero() {
            weights.push(weight);
            probs.push(p);
        }
    }
    ScaledBits {
        base,
        weights,
        probs,
    }
}

fn check_limits(depth: u32, extension: u32, scale_bits: u32, indeterminate: usize) -> Result<()> {
    if extension == 0 || extension > MAX_EXTENSION {
        return Err(FiqError::InvalidArgument(format!(
            "extension depth must be in 1..={MAX_EXTENSION}, got {extension}"
        )));
    }
    let total_bits = depth + extension + scale_bits + 2;
    if total_bits >= 120 {
        return Err(FiqError::DepthLimit {
            bits: total_bits,
            max: 120,
        });
    }
    if indeterminate as u32 > DEFAULT_ENUMERATION_CAP {
        return Err(FiqError::EnumerationLimit {
            bits: indeterminate as u32,
            cap: DEFAULT_ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// Visits every assignment of the explicit indeterminate bits with its
/// scaled value and exact probability. Plain mask iteration.
fn for_each_realisation(operands: &[&ScaledBits], mut visit: impl FnMut(u128, &BigRational)) {
    let weights: Vec<u128> = operands.iter().flat_map(|b| b.weights.clone()).collect();
    let probs: Vec<Propensity> = operands.iter().flat_map(|b| b.probs.clone()).collect();
    let base: u128 = operands.iter().map(|b| b.base).sum();
    let n = weights.len();
    for mask in 0u64..(1u64 << n) {
        let mut value = base;
        let mut weight = BigRational::one();
        for i in 0..n {
            if (mask >> i) & 1 == 1 {
                value += weights[i];
                weight *= probs[i].ratio();
            } else {
                weight *= probs[i].complement().ratio();
            }
        }
        visit(value, &weight);
    }
}

/// Counts of tail-extension outcomes by their value sum.
#[derive(Debug, Clone, Copy)]
enum TailSpan {
    /// Both tails zero: the single outcome 0.
    Fixed,
    /// One fair tail of `2^e` equally likely values.
    Single { e: u32 },
    /// Two independent fair tails; sums follow the triangular pair count.
    Double { e: u32 },
}

impl TailSpan {
    fn max_sum(self) -> u128 {
        match self {
            TailSpan::Fixed => 0,
            TailSpan::Single { e } => (1u128 << e) - 1,
            TailSpan::Double { e } => (2u128 << e) - 2,
        }
    }

    fn total_outcomes(self) -> u128 {
        match self {
            TailSpan::Fixed => 1,
            TailSpan::Single { e } => 1u128 << e,
            TailSpan::Double { e } => 1u128 << (2 * e),
        }
    }

    /// How many extension outcomes have value sum at most `x`.
    fn count_at_most(self, x: i128) -> u128 {
        if x < 0 {
            return 0;
        }
        let x = x as u128;
        match self {
            TailSpan::Fixed => 1,
            TailSpan::Single { e } => (x + 1).min(1u128 << e),
            TailSpan::Double { e } => {
                let n = 1u128 << e;
                if x < n {
                    (x + 1) * (x + 2) / 2
                } else if x <= 2 * n - 2 {
                    n * n - (2 * n - 2 - x) * (2 * n - 1 - x) / 2
                } else {
                    n * n
                }
            }
        }
    }

    /// Outcomes with value sum inside `[lo, hi]`.
    fn count_in(self, lo: i128, hi: i128) -> u128 {
        if hi < lo {
            return 0;
        }
        self.count_at_most(hi) - self.count_at_most(lo - 1)
    }
}

/// Deep-truncation law of a sum: fair tails become `extension_depth`
/// explicit fair bits over a zero tail, and every realisation is binned by
/// its window pattern.
pub fn truncation_law_add(
    q: &Fiq,
    r: &Fiq,
    window_depth: u32,
    extension_depth: u32,
) -> Result<JointLaw> {
    let depth = q.depth().max(r.depth());
    if window_depth > depth {
        return Err(FiqError::WindowTooDeep {
            window: window_depth,
            depth,
        });
    }
    let qa = scaled_bits(q, depth);
    let qb = scaled_bits(r, depth);
    check_limits(
        depth,
        extension_depth,
        1,
        qa.weights.len() + qb.weights.len(),
    )?;

    let span = match (q.tail(), r.tail()) {
        (Tail::Zero, Tail::Zero) => TailSpan::Fixed,
        (Tail::Fair, Tail::Fair) => TailSpan::Double { e: extension_depth },
        _ => TailSpan::Single { e: extension_depth },
    };
    let shift = depth + extension_depth - window_depth;
    let bucket = 1u128 << shift;
    let outcomes = BigRational::from_integer(span.total_outcomes().into());

    let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
    for_each_realisation(&[&qa, &qb], |value, weight| {
        let base = value << extension_depth;
        let t_lo = base >> shift;
        let t_hi = (base + span.max_sum()) >> shift;
        for t in t_lo..=t_hi {
            let lo = (t * bucket) as i128 - base as i128;
            let hi = ((t + 1) * bucket) as i128 - base as i128 - 1;
            let count = span.count_in(lo, hi);
            if count > 0 {
                let mass = weight * BigRational::from_integer(count.into()) / &outcomes;
                *tally.entry(t).or_insert_with(BigRational::zero) += mass;
            }
        }
    });
    Ok(JointLaw::from_tally(window_depth, tally, TailNote::Zero))
}

/// Deep-truncation law of `scale * Q`, binned by window pattern. The
/// leading-pair impossibility of the scale-3 product holds at every
/// extension depth, not just in the limit.
pub fn truncation_law_mul(
    q: &Fiq,
    scale: u64,
    window_depth: u32,
    extension_depth: u32,
) -> Result<JointLaw> {
    if scale == 0 {
        return Err(FiqError::ZeroScale);
    }
    let depth = q.depth();
    if window_depth > depth {
        return Err(FiqError::WindowTooDeep {
            window: window_depth,
            depth,
        });
    }
    let bits = scaled_bits(q, depth);
    check_limits(
        depth,
        extension_depth,
        64 - scale.leading_zeros(),
        bits.weights.len(),
    )?;

    let fair_tail = q.tail() == Tail::Fair;
    let extension_count = if fair_tail {
        1u128 << extension_depth
    } else {
        1
    };
    let outcomes = BigRational::from_integer(extension_count.into());
    let shift = depth + extension_depth - window_depth;
    let bucket = 1u128 << shift;
    let scale = scale as u128;

    let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
    for_each_realisation(&[&bits], |value, weight| {
        let base = scale * (value << extension_depth);
        let t_lo = base >> shift;
        let t_hi = (base + scale * (extension_count - 1)) >> shift;
        for t in t_lo..=t_hi {
            // Extension values e with t*bucket <= base + scale*e <
            // (t+1)*bucket, intersected with [0, extension_count).
            let e_lo = if t * bucket <= base {
                0
            } else {
                (t * bucket - base).div_ceil(scale)
            };
            let e_hi = ((t + 1) * bucket - base)
                .div_ceil(scale)
                .min(extension_count);
            if e_hi > e_lo {
                let count = e_hi - e_lo;
                let mass = weight * BigRational::from_integer(count.into()) / &outcomes;
                *tally.entry(t).or_insert_with(BigRational::zero) += mass;
            }
        }
    });
    Ok(JointLaw::from_tally(window_depth, tally, TailNote::Zero))
}

/// Operation a sampling run estimates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SampleOp {
    Add { rhs: Fiq },
    MulConstant { scale: u64 },
}

/// Per-position estimate from a sampling run, with a binomial confidence
/// half-width at four standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalEstimate {
    pub position: i32,
    pub successes: u64,
    pub estimate: f64,
    pub half_width: f64,
}

/// Tallied output of a seeded Monte Carlo run.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    pub window: Window,
    pub sample_count: u64,
    pub seed: u64,
    pub extension_depth: u32,
    pub pattern_counts: Vec<(BitPattern, u64)>,
    pub marginals: Vec<MarginalEstimate>,
}

/// Uniform draw below `bound` by top-bit rejection: take the highest
/// `bits(bound - 1)` bits of the next 64-bit word and retry until below
/// the bound.
fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    debug_assert!(bound >= 1);
    if bound == 1 {
        return 0;
    }
    let bits = 64 - (bound - 1).leading_zeros();
    loop {
        let value = rng.next_u64() >> (64 - bits);
        if value < bound {
            return value;
        }
    }
}

/// Exact Bernoulli draw: true with probability `p`, by comparing a uniform
/// draw below the denominator against the numerator.
fn bernoulli(rng: &mut ChaCha8Rng, p: &Propensity) -> Result<bool> {
    use num_traits::ToPrimitive;
    if p.is_zero() {
        return Ok(false);
    }
    if p.is_one() {
        return Ok(true);
    }
    let numer = p.ratio().numer().to_u64();
    let denom = p.ratio().denom().to_u64();
    match (numer, denom) {
        (Some(n), Some(d)) => Ok(uniform_below(rng, d) < n),
        _ => Err(FiqError::InvalidArgument(
            "sampling supports propensity denominators up to 64 bits".into(),
        )),
    }
}

/// Seeded Monte Carlo estimate of the window law of an operation. Fair
/// tails are sampled to the configured extension depth; arithmetic per
/// sample is exact. Identical configurations give identical reports.
pub fn sample_law(
    q: &Fiq,
    op: &SampleOp,
    window_depth: u32,
    config: &OracleConfig,
) -> Result<SampleReport> {
    let extension = config.extension_depth;
    let (depth, scale_bits) = match op {
        SampleOp::Add { rhs } => (q.depth().max(rhs.depth()), 1),
        SampleOp::MulConstant { scale: 0 } => return Err(FiqError::ZeroScale),
        SampleOp::MulConstant { scale } => (q.depth(), 64 - scale.leading_zeros()),
    };
    if window_depth > depth {
        return Err(FiqError::WindowTooDeep {
            window: window_depth,
            depth,
        });
    }
    check_limits(depth, extension, scale_bits, 0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shift = depth + extension - window_depth;
    let ext_mask = (1u64 << extension) - 1;

    // One full-scale operand realisation: explicit bits by exact Bernoulli,
    // then `extension` fair bits from one raw 64-bit word.
    let draw = |rng: &mut ChaCha8Rng, operand: &Fiq| -> Result<u128> {
        let mut value = 0u128;
        for k in 1..=depth {
            let p = operand.propensity_at(k);
            if bernoulli(rng, &p)? {
                value += 1u128 << (depth - k);
            }
        }
        let tail = match operand.tail() {
            Tail::Fair => rng.next_u64() & ext_mask,
            Tail::Zero => 0,
        };
        Ok((value << extension) + tail as u128)
    };

    let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
    for _ in 0..config.sample_count {
        let result = match op {
            SampleOp::Add { rhs } => draw(&mut rng, q)? + draw(&mut rng, rhs)?,
            SampleOp::MulConstant { scale } => *scale as u128 * draw(&mut rng, q)?,
        };
        *counts.entry(result >> shift).or_insert(0) += 1;
    }

    let max_pattern = counts.keys().max().copied().unwrap_or(0);
    let used_bits = 128 - max_pattern.leading_zeros();
    let window = Window {
        integer_bits: used_bits.saturating_sub(window_depth),
        fractional_depth: window_depth,
    };
    let width = window.width();
    let n = config.sample_count as f64;
    let marginals = window
        .positions()
        .map(|position| {
            let bit_shift = (window_depth as i32 - position) as u32;
            let successes: u64 = counts
                .iter()
                .filter(|(pattern, _)| (*pattern >> bit_shift) & 1 == 1)
                .map(|(_, count)| count)
                .sum();
            let estimate = successes as f64 / n;
            let half_width = 4.0 * (estimate * (1.0 - estimate) / n).sqrt();
            MarginalEstimate {
                position,
                successes,
                estimate,
                half_width,
            }
        })
        .collect();
    let pattern_counts = counts
        .into_iter()
        .map(|(value, count)| (BitPattern::new(width, value), count))
        .collect();

    Ok(SampleReport {
        window,
        sample_count: config.sample_count,
        seed: config.seed,
        extension_depth: extension,
        pattern_counts,
        marginals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::tv_distance;
    use crate::number::fiq_validate;
    use num_traits::Signed;

    fn p(n: u64, d: u64) -> Propensity {
        Propensity::new(n, d).unwrap()
    }

    /// Literal-loop reimplementation of the truncated product law: every
    /// extension value is visited one at a time.
    fn naive_mul(q: &Fiq, scale: u64, window: u32, extension: u32) -> JointLaw {
        let depth = q.depth();
        let bits = scaled_bits(q, depth);
        let ext_count = match q.tail() {
            Tail::Fair => 1u128 << extension,
            Tail::Zero => 1,
        };
        let outcomes = BigRational::from_integer(ext_count.into());
        let shift = depth + extension - window;
        let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
        for_each_realisation(&[&bits], |value, weight| {
            for e in 0..ext_count {
                let result = scale as u128 * ((value << extension) + e);
                let mass = weight / &outcomes;
                *tally
                    .entry(result >> shift)
                    .or_insert_with(BigRational::zero) += mass;
            }
        });
        JointLaw::from_tally(window, tally, TailNote::Zero)
    }

    /// Literal double loop over both operands' extension values.
    fn naive_add(q: &Fiq, r: &Fiq, window: u32, extension: u32) -> JointLaw {
        let depth = q.depth().max(r.depth());
        let qa = scaled_bits(q, depth);
        let qb = scaled_bits(r, depth);
        let ext = |tail: Tail| match tail {
            Tail::Fair => 1u128 << extension,
            Tail::Zero => 1,
        };
        let (ca, cb) = (ext(q.tail()), ext(r.tail()));
        let outcomes = BigRational::from_integer((ca * cb).into());
        let shift = depth + extension - window;
        let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
        for_each_realisation(&[&qa, &qb], |value, weight| {
            for ea in 0..ca {
                for eb in 0..cb {
                    let result = (value << extension) + ea + eb;
                    let mass = weight / &outcomes;
                    *tally
                        .entry(result >> shift)
                        .or_insert_with(BigRational::zero) += mass;
                }
            }
        });
        JointLaw::from_tally(window, tally, TailNote::Zero)
    }

    #[test]
    fn deterministic_inputs_give_the_exact_binary_sum() {
        let q = Fiq::from_bits(&[1, 0, 1]);
        let r = Fiq::from_bits(&[0, 1, 1]);
        for e in [1, 4, 16] {
            // 0.101 + 0.011 = 1.000
            let law = truncation_law_add(&q, &r, 3, e).unwrap();
            assert_eq!(law.support().len(), 1);
            assert_eq!(law.support()[0].0.scaled_value(), 0b1000);
        }
    }

    #[test]
    fn counting_matches_the_literal_loop_for_products() {
        let corpus = [
            fiq_validate(&[(1, 3), (1, 2)], Tail::Fair).unwrap(),
            fiq_validate(&[(2, 7), (1, 5), (1, 2)], Tail::Fair).unwrap(),
            Fiq::from_bits(&[1, 1, 0]),
            Fiq::unknown(),
        ];
        for q in &corpus {
            for scale in [1u64, 2, 3, 5, 7, 11] {
                for e in [1u32, 2, 5] {
                    let window = q.depth();
                    let fast = truncation_law_mul(q, scale, window, e).unwrap();
                    let naive = naive_mul(q, scale, window, e);
                    assert_eq!(fast, naive, "scale {scale}, extension {e}");
                }
            }
        }
    }

    #[test]
    fn counting_matches_the_literal_loop_for_sums() {
        let cases = [
            (
                fiq_validate(&[(1, 3), (1, 2)], Tail::Fair).unwrap(),
                fiq_validate(&[(1, 5)], Tail::Fair).unwrap(),
            ),
            (
                fiq_validate(&[(2, 3)], Tail::Fair).unwrap(),
                Fiq::from_bits(&[1, 1]),
            ),
            (Fiq::from_bits(&[1]), Fiq::from_bits(&[1])),
        ];
        for (q, r) in &cases {
            for e in [1u32, 2, 5] {
                let window = q.depth().max(r.depth());
                let fast = truncation_law_add(q, r, window, e).unwrap();
                let naive = naive_add(q, r, window, e);
                assert_eq!(fast, naive, "extension {e}");
            }
        }
    }

    #[test]
    fn refinement_converges_in_total_variation() {
        let q = fiq_validate(&[(1, 1)], Tail::Fair).unwrap();
        let r = fiq_validate(&[(0, 1)], Tail::Fair).unwrap();
        let exact = crate::exact::joint_add(&q, &r, 1).unwrap();
        let mut last = BigRational::one();
        for e in [1u32, 4, 8, 16] {
            let law = truncation_law_add(&q, &r, 1, e).unwrap();
            let tv = tv_distance(&law, &exact).unwrap();
            assert!(tv <= last, "extension {e} did not refine");
            let bound = BigRational::new(2.into(), (1u128 << e).into());
            assert!(tv <= bound, "extension {e} exceeded 2^(1-E)");
            last = tv;
        }
    }

    #[test]
    fn leading_pair_of_the_scale3_product_is_impossible_at_every_extension() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        for e in [1u32, 3, 8, 16] {
            let law = truncation_law_mul(&q, 3, 3, e).unwrap();
            let p12 = law.pattern_propensity(&[(1, true), (2, true)]).unwrap();
            assert!(p12.is_zero(), "extension {e}");
        }
    }

    #[test]
    fn scale3_marginal_approaches_one_third() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let law = truncation_law_mul(&q, 3, 3, 16).unwrap();
        let m1 = law.marginal_of(1).unwrap();
        let gap = (m1.ratio() - BigRational::new(1.into(), 3.into())).abs();
        let bound = BigRational::new(3.into(), (1u128 << 16).into());
        assert!(gap <= bound, "gap {gap}");
    }

    #[test]
    fn identity_scale_truncates_the_quantity_itself() {
        let q = fiq_validate(&[(1, 4), (1, 2)], Tail::Fair).unwrap();
        let law = truncation_law_mul(&q, 1, 2, 8).unwrap();
        assert_eq!(law.marginal_of(1).unwrap(), p(1, 4));
        assert_eq!(law.marginal_of(2).unwrap(), p(1, 2));
    }

    #[test]
    fn sampling_is_deterministic_given_the_seed() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let config = OracleConfig::new(8, 2000, 42).unwrap();
        let op = SampleOp::MulConstant { scale: 3 };
        let a = sample_law(&q, &op, 3, &config).unwrap();
        let b = sample_law(&q, &op, 3, &config).unwrap();
        assert_eq!(a, b);
        let other = sample_law(&q, &op, 3, &OracleConfig::new(8, 2000, 43).unwrap()).unwrap();
        assert_ne!(a.pattern_counts, other.pattern_counts);
    }

    #[test]
    fn deterministic_inputs_sample_with_zero_variance() {
        let q = Fiq::from_bits(&[1, 0, 1]);
        let config = OracleConfig::new(4, 500, 7).unwrap();
        let report = sample_law(&q, &SampleOp::MulConstant { scale: 1 }, 3, &config).unwrap();
        assert_eq!(report.pattern_counts.len(), 1);
        assert_eq!(report.pattern_counts[0].1, 500);
        for estimate in &report.marginals {
            assert!(estimate.half_width == 0.0);
            assert!(estimate.estimate == 0.0 || estimate.estimate == 1.0);
        }
    }

    #[test]
    fn sampled_marginals_cover_the_truncation_truth() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let config = OracleConfig::new(12, 20_000, 2024).unwrap();
        let report = sample_law(&q, &SampleOp::MulConstant { scale: 3 }, 3, &config).unwrap();
        let truth = truncation_law_mul(&q, 3, 3, 12).unwrap();
        for estimate in &report.marginals {
            let target = truth.marginal_of(estimate.position).unwrap().to_f64();
            assert!(
                (estimate.estimate - target).abs() <= estimate.half_width.max(1e-12),
                "position {}: {} vs {}",
                estimate.position,
                estimate.estimate,
                target
            );
        }
    }

    #[test]
    fn config_rejects_degenerate_parameters() {
        assert!(OracleConfig::new(0, 1, 0).is_err());
        assert!(OracleConfig::new(1, 0, 0).is_err());
    }

    #[test]
    fn sum_laws_meet_the_tv_bound_on_a_random_corpus() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(500);
        let random_fiq = |rng: &mut ChaCha8Rng| {
            let depth = rng.gen_range(1..=4u32);
            let props = (0..depth)
                .map(|_| {
                    let d = rng.gen_range(1..=9u64);
                    Propensity::new(rng.gen_range(0..=d), d).unwrap()
                })
                .collect();
            Fiq::new(props, Tail::Fair)
        };
        for e in [4u32, 10, 16] {
            let bound = BigRational::new(2.into(), (1u128 << e).into());
            for _ in 0..12 {
                let q = random_fiq(&mut rng);
                let r = random_fiq(&mut rng);
                let window = q.depth().max(r.depth());
                let exact = crate::exact::joint_add(&q, &r, window).unwrap();
                let oracle = truncation_law_add(&q, &r, window, e).unwrap();
                let tv = tv_distance(&exact, &oracle).unwrap();
                assert!(tv <= bound, "extension {e}: TV {tv} above 2^(1-E)");
            }
        }
    }

    #[test]
    fn sampling_of_sums_matches_the_truncation_marginals() {
        let q = fiq_validate(&[(1, 3)], Tail::Fair).unwrap();
        let r = fiq_validate(&[(1, 5)], Tail::Fair).unwrap();
        let config = OracleConfig::new(10, 30_000, 99).unwrap();
        let op = SampleOp::Add { rhs: r.clone() };
        let report = sample_law(&q, &op, 1, &config).unwrap();
        let truth = truncation_law_add(&q, &r, 1, 10).unwrap();
        for estimate in &report.marginals {
            let target = truth.marginal_of(estimate.position).unwrap().to_f64();
            assert!(
                (estimate.estimate - target).abs() <= estimate.half_width.max(1e-12),
                "position {}: {} vs {}",
                estimate.position,
                estimate.estimate,
                target
            );
        }
    }

    /// Seeded runs bracket the truncation truth at the stated confidence:
    /// with half-widths at four standard errors, a miss on any position in
    /// more than one of fifty runs would be far outside expectation.
    #[test]
    fn coverage_holds_across_fifty_seeded_runs() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let truth = truncation_law_mul(&q, 3, 3, 8).unwrap();
        let op = SampleOp::MulConstant { scale: 3 };
        let mut covered = 0;
        for seed in 0..50u64 {
            let config = OracleConfig::new(8, 2_000, seed).unwrap();
            let report = sample_law(&q, &op, 3, &config).unwrap();
            let all_positions_hit = report.marginals.iter().all(|estimate| {
                let target = truth.marginal_of(estimate.position).unwrap().to_f64();
                (estimate.estimate - target).abs() <= estimate.half_width.max(1e-12)
            });
            if all_positions_hit {
                covered += 1;
            }
        }
        assert!(covered >= 49, "only {covered}/50 runs covered the truth");
    }
}
