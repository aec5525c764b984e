//! Exact finite probability laws over bit patterns in a window.
//!
//! A `JointLaw` is the full joint distribution of the result bits of one
//! arithmetic operation, restricted to a window of positions. Unlike the
//! marginal engine's per-bit vectors, it retains every dependence between
//! bits, which is exactly the information a marginal projection deletes.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{FiqError, Result};
use crate::number::{Tail, WideMarginal};
use crate::propensity::Propensity;

/// The positions a law covers: `integer_bits` positions `0, -1, ...` and
/// `fractional_depth` positions `1..=W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub integer_bits: u32,
    pub fractional_depth: u32,
}

impl Window {
    pub fn width(&self) -> u32 {
        self.integer_bits + self.fractional_depth
    }

    pub fn contains(&self, position: i32) -> bool {
        position > -(self.integer_bits as i32) && position <= self.fractional_depth as i32
    }

    /// Positions most-significant first: `1 - I ..= W`.
    pub fn positions(&self) -> impl Iterator<Item = i32> {
        (1 - self.integer_bits as i32)..=(self.fractional_depth as i32)
    }
}

/// One realisation of the window bits, stored as the pattern's numeric value
/// scaled by `2^fractional_depth`, so ascending `value` is ascending order
/// of the represented number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BitPattern {
    width: u32,
    value: u128,
}

impl BitPattern {
    pub fn new(width: u32, value: u128) -> Self {
        debug_assert!(width >= 128 - value.leading_zeros());
        Self { width, value }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// The pattern's value scaled by `2^fractional_depth`.
    pub fn scaled_value(&self) -> u128 {
        self.value
    }

    /// Bit at a position, given the window the pattern belongs to.
    pub fn bit(&self, position: i32, window: &Window) -> bool {
        debug_assert!(window.contains(position));
        let shift = (window.fractional_depth as i32 - position) as u32;
        (self.value >> shift) & 1 == 1
    }
}

/// What the law asserts about bits beyond its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailNote {
    /// Deeper bits are i.i.d. fair and independent of the window
    /// (multiplication of a fair tail).
    UniformIndependent,
    /// Deeper bits are marginally fair but jointly correlated with the
    /// window (addition of fair tails); the correlation is not represented.
    FairMarginalsOnly,
    /// Deeper bits are deterministically zero.
    Zero,
}

/// Exact probability law over the bit patterns of a window.
///
/// Invariants: probabilities are positive, patterns pairwise distinct and
/// sorted ascending, and the total mass is exactly 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointLaw {
    window: Window,
    support: Vec<(BitPattern, Propensity)>,
    tail_note: TailNote,
}

impl JointLaw {
    /// Builds a law from tallied pattern masses. Masses must be positive and
    /// sum to exactly 1; both are enforced.
    pub(crate) fn from_tally(
        fractional_depth: u32,
        tally: BTreeMap<u128, BigRational>,
        tail_note: TailNote,
    ) -> Self {
        let mut total = BigRational::zero();
        let mut max_value = 0u128;
        for (value, mass) in &tally {
            assert!(mass.is_positive(), "law masses must be positive");
            total += mass;
            max_value = max_value.max(*value);
        }
        assert!(total.is_one(), "law masses must sum to exactly 1");
        let used_bits = 128 - max_value.leading_zeros();
        let integer_bits = used_bits.saturating_sub(fractional_depth);
        let window = Window {
            integer_bits,
            fractional_depth,
        };
        let width = window.width();
        let support = tally
            .into_iter()
            .map(|(value, mass)| {
                let p = Propensity::from_ratio(mass).expect("law mass lies in [0,1]");
                (BitPattern::new(width, value), p)
            })
            .collect();
        Self {
            window,
            support,
            tail_note,
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn tail_note(&self) -> TailNote {
        self.tail_note
    }

    /// Patterns and their exact probabilities, ascending by pattern value.
    pub fn support(&self) -> &[(BitPattern, Propensity)] {
        &self.support
    }

    /// Marginal propensity of the bit at one window position.
    pub fn marginal_of(&self, position: i32) -> Result<Propensity> {
        if !self.window.contains(position) {
            return Err(FiqError::PositionOutOfWindow(position));
        }
        let mut total = BigRational::zero();
        for (pattern, mass) in &self.support {
            if pattern.bit(position, &self.window) {
                total += mass.ratio();
            }
        }
        Ok(Propensity::from_ratio(total).expect("marginal lies in [0,1]"))
    }

    /// Total probability of patterns consistent with a partial assignment
    /// of window positions to bits. The empty assignment has probability 1.
    pub fn pattern_propensity(&self, assignment: &[(i32, bool)]) -> Result<Propensity> {
        for (position, _) in assignment {
            if !self.window.contains(*position) {
                return Err(FiqError::PositionOutOfWindow(*position));
            }
        }
        let mut total = BigRational::zero();
        for (pattern, mass) in &self.support {
            let consistent = assignment
                .iter()
                .all(|&(position, bit)| pattern.bit(position, &self.window) == bit);
            if consistent {
                total += mass.ratio();
            }
        }
        Ok(Propensity::from_ratio(total).expect("event probability lies in [0,1]"))
    }

    /// Projects the law onto its per-position marginals, deleting every
    /// dependence between bits. The tail flag reflects that deeper bits are
    /// marginally fair for both fair-tail notes and zero otherwise.
    pub fn project_to_marginal(&self) -> WideMarginal {
        let tail = match self.tail_note {
            TailNote::UniformIndependent | TailNote::FairMarginalsOnly => Tail::Fair,
            TailNote::Zero => Tail::Zero,
        };
        let mut integer = Vec::with_capacity(self.window.integer_bits as usize);
        for i in 0..self.window.integer_bits as i32 {
            integer.push(self.marginal_of(-i).expect("window position"));
        }
        let mut fractional = Vec::with_capacity(self.window.fractional_depth as usize);
        for k in 1..=self.window.fractional_depth as i32 {
            fractional.push(self.marginal_of(k).expect("window position"));
        }
        WideMarginal::new(integer, fractional, tail)
    }

    /// Largest absolute gap between a joint assignment probability over the
    /// given positions and the product of the matching marginals. Zero gap
    /// on every assignment means the bits are mutually independent.
    pub fn independence_defect(&self, positions: &[i32]) -> Result<(Propensity, bool)> {
        let mut distinct: Vec<i32> = positions.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return Err(FiqError::InvalidArgument(
                "independence defect needs at least two distinct positions".into(),
            ));
        }
        for &position in &distinct {
            if !self.window.contains(position) {
                return Err(FiqError::PositionOutOfWindow(position));
            }
        }
        let marginals: Vec<Propensity> = distinct
            .iter()
            .map(|&p| self.marginal_of(p).expect("checked position"))
            .collect();
        let mut max_defect = BigRational::zero();
        for mask in 0u64..(1u64 << distinct.len()) {
            let assignment: Vec<(i32, bool)> = distinct
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, (mask >> i) & 1 == 1))
                .collect();
            let joint = self
                .pattern_propensity(&assignment)
                .expect("checked positions");
            let mut product = BigRational::one();
            for (i, (_, bit)) in assignment.iter().enumerate() {
                let m = &marginals[i];
                product *= if *bit {
                    m.ratio().clone()
                } else {
                    m.complement().ratio().clone()
                };
            }
            let defect = (joint.ratio() - product).abs();
            if defect > max_defect {
                max_defect = defect;
            }
        }
        let independent = max_defect.is_zero();
        Ok((
            Propensity::from_ratio(max_defect).expect("defect lies in [0,1]"),
            independent,
        ))
    }
}

/// Total variation distance between two laws over the same fractional
/// depth: half the L1 distance of their pattern masses.
pub fn tv_distance(a: &JointLaw, b: &JointLaw) -> Result<BigRational> {
    if a.window.fractional_depth != b.window.fractional_depth {
        return Err(FiqError::InvalidArgument(format!(
            "total variation needs matching fractional depths, got {} and {}",
            a.window.fractional_depth, b.window.fractional_depth
        )));
    }
    let mut masses: BTreeMap<u128, BigRational> = BTreeMap::new();
    for (pattern, mass) in &a.support {
        *masses
            .entry(pattern.scaled_value())
            .or_insert_with(BigRational::zero) += mass.ratio();
    }
    for (pattern, mass) in &b.support {
        *masses
            .entry(pattern.scaled_value())
            .or_insert_with(BigRational::zero) -= mass.ratio();
    }
    let l1: BigRational = masses.values().map(Signed::abs).sum();
    Ok(l1 / BigRational::from_integer(2.into()))
}
