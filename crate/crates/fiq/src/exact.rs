//! Exact joint laws of result bits.
//!
//! Where the marginal engine propagates one propensity per position, this
//! engine enumerates the full outcome space: every assignment of the
//! indeterminate explicit bits, combined with an analytically exact carry
//! from the infinite tail. Shared bits between shifted copies and carry
//! correlations are therefore represented, not assumed away. This is the
//! semantics under which result bits of a product are visibly dependent.
//!
//! Tail handling is analytic rather than truncated. Adding two independent
//! fair tails produces a carry into the explicit region that is exactly
//! Bernoulli(1/2) and independent of the explicit bits; a fair tail scaled
//! by an integer `L` produces a carry exactly uniform on `{0, ..., L-1}`
//! (the integer and fractional parts of a uniform variable on `[0, L)` are
//! independent). A zero tail, alone or against a fair tail, never carries.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{FiqError, Result};
use crate::law::{JointLaw, TailNote};
use crate::number::{Fiq, Tail};
use crate::propensity::Propensity;

/// Default cap on enumerated indeterminate bits (2^24 outcomes).
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;

/// Widest supported scaled-integer arithmetic, in bits.
const SCALED_WIDTH: u32 = 120;

/// Carry distribution entering the explicit region from the tails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailCarrySpec {
    /// Zero tails (or a zero tail against a fair one): no carry.
    None,
    /// Addition of two independent fair tails: Bernoulli(1/2).
    BernoulliHalf,
    /// Multiplication of a fair tail by `scale`: uniform on `{0..scale-1}`.
    Uniform { scale: u64 },
}

impl TailCarrySpec {
    /// `(carry value, probability)` support of this carry distribution.
    fn support(&self) -> Vec<(u128, BigRational)> {
        match self {
            TailCarrySpec::None => vec![(0, BigRational::one())],
            TailCarrySpec::BernoulliHalf => {
                let half = BigRational::new(1.into(), 2.into());
                vec![(0, half.clone()), (1, half)]
            }
            TailCarrySpec::Uniform { scale } => {
                let w = BigRational::new(1.into(), (*scale).into());
                (0..*scale).map(|k| (k as u128, w.clone())).collect()
            }
        }
    }
}

/// Explicit bits of one operand aligned to a common depth: a deterministic
/// base value plus weighted indeterminate bits.
struct AlignedBits {
    base: u128,
    /// `(scaled weight 2^(depth-k), propensity)` of each indeterminate bit.
    indeterminate: Vec<(u128, Propensity)>,
}

fn align_bits(q: &Fiq, depth: u32) -> Result<AlignedBits> {
    if depth >= SCALED_WIDTH {
        return Err(FiqError::DepthLimit {
            bits: depth,
            max: SCALED_WIDTH,
        });
    }
    let mut base = 0u128;
    let mut indeterminate = Vec::new();
    for k in 1..=depth {
        let p = q.propensity_at(k);
        let weight = 1u128 << (depth - k);
        if p.is_one() {
            base += weight;
        } else if !p.is_zero() {
            indeterminate.push((weight, p));
        }
    }
    Ok(AlignedBits {
        base,
        indeterminate,
    })
}

/// Enumerates every assignment of the indeterminate bits, calling `tally`
/// with the realised scaled value and its exact probability.
fn enumerate(bits: &AlignedBits, tally: &mut impl FnMut(u128, &BigRational)) {
    fn recurse(
        remaining: &[(u128, Propensity)],
        value: u128,
        weight: BigRational,
        tally: &mut impl FnMut(u128, &BigRational),
    ) {
        match remaining.split_first() {
            None => tally(value, &weight),
            Some(((bit_weight, p), rest)) => {
                recurse(rest, value + bit_weight, &weight * p.ratio(), tally);
                recurse(rest, value, weight * p.complement().ratio(), tally);
            }
        }
    }
    recurse(&bits.indeterminate, bits.base, BigRational::one(), tally);
}

fn check_cap(indeterminate_bits: usize, cap: u32) -> Result<()> {
    if indeterminate_bits as u32 > cap {
        return Err(FiqError::EnumerationLimit {
            bits: indeterminate_bits as u32,
            cap,
        });
    }
    Ok(())
}

/// Exact joint law of the sum of two independent quantities over the window
/// `1..=window_depth` plus whatever integer bits the sum reaches.
///
/// The window may not exceed the deeper explicit region: bits of the sum
/// below the explicit region are marginally fair but jointly correlated
/// with the window, and silently wrong joint probabilities are refused.
pub fn joint_add(q: &Fiq, r: &Fiq, window_depth: u32) -> Result<JointLaw> {
    joint_add_with_cap(q, r, window_depth, DEFAULT_ENUMERATION_CAP)
}

/// `joint_add` with an explicit cap on enumerated indeterminate bits.
pub fn joint_add_with_cap(q: &Fiq, r: &Fiq, window_depth: u32, cap: u32) -> Result<JointLaw> {
    let depth = q.depth().max(r.depth());
    if window_depth > depth {
        return Err(FiqError::WindowTooDeep {
            window: window_depth,
            depth,
        });
    }
    let qa = align_bits(q, depth)?;
    let qb = align_bits(r, depth)?;
    check_cap(qa.indeterminate.len() + qb.indeterminate.len(), cap)?;

    let carry = match (q.tail(), r.tail()) {
        (Tail::Fair, Tail::Fair) => TailCarrySpec::BernoulliHalf,
        _ => TailCarrySpec::None,
    };
    let tail_note = match (q.tail(), r.tail()) {
        (Tail::Zero, Tail::Zero) => TailNote::Zero,
        _ => TailNote::FairMarginalsOnly,
    };
    let carry_support = carry.support();

    let drop_bits = depth - window_depth;
    let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
    let mut outer = |va: u128, wa: &BigRational| {
        let mut inner = |vb: u128, wb: &BigRational| {
            for (kappa, wk) in &carry_support {
                let sum = va + vb + kappa;
                let pattern = sum >> drop_bits;
                *tally.entry(pattern).or_insert_with(BigRational::zero) += wa * wb * wk;
            }
        };
        enumerate(&qb, &mut inner);
    };
    enumerate(&qa, &mut outer);
    Ok(JointLaw::from_tally(window_depth, tally, tail_note))
}

/// Exact joint law of `scale * Q` over the window `1..=window_depth` plus
/// the integer bits the product reaches.
pub fn joint_mul_constant(q: &Fiq, scale: u64, window_depth: u32) -> Result<JointLaw> {
    joint_mul_constant_with_cap(q, scale, window_depth, DEFAULT_ENUMERATION_CAP)
}

/// `joint_mul_constant` with an explicit cap on enumerated bits.
pub fn joint_mul_constant_with_cap(
    q: &Fiq,
    scale: u64,
    window_depth: u32,
    cap: u32,
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
    if depth + 64 - scale.leading_zeros() >= SCALED_WIDTH {
        return Err(FiqError::DepthLimit {
            bits: depth + 64 - scale.leading_zeros(),
            max: SCALED_WIDTH,
        });
    }
    let bits = align_bits(q, depth)?;
    check_cap(bits.indeterminate.len(), cap)?;

    let (carry, tail_note) = match q.tail() {
        Tail::Fair => (
            TailCarrySpec::Uniform { scale },
            TailNote::UniformIndependent,
        ),
        Tail::Zero => (TailCarrySpec::None, TailNote::Zero),
    };
    let carry_support = carry.support();

    let drop_bits = depth - window_depth;
    let mut tally: BTreeMap<u128, BigRational> = BTreeMap::new();
    let mut visit = |v: u128, w: &BigRational| {
        for (kappa, wk) in &carry_support {
            let product = scale as u128 * v + kappa;
            let pattern = product >> drop_bits;
            *tally.entry(pattern).or_insert_with(BigRational::zero) += w * wk;
        }
    };
    enumerate(&bits, &mut visit);
    Ok(JointLaw::from_tally(window_depth, tally, tail_note))
}
