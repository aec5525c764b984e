//! Quantity representations: the finite-information quantity itself and the
//! wide marginal vectors produced by arithmetic on it.
//!
//! Position convention: fractional position `k >= 1` carries weight `2^-k`
//! (so a quantity `0.Q1 Q2 Q3...` puts `Q1` at position 1), and integer
//! position `j <= 0` carries weight `2^-j` (position 0 is the units bit,
//! position -1 the twos bit, and so on).

use crate::error::Result;
use crate::propensity::Propensity;

/// Semantics of every bit beyond the explicit propensity list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tail {
    /// All deeper bits are fair (propensity 1/2) and carry no information.
    Fair,
    /// All deeper bits are deterministically 0. This embeds ordinary dyadic
    /// numbers so the engines can be differential-tested against plain
    /// binary arithmetic.
    Zero,
}

impl Tail {
    /// Propensity of any single bit in the tail.
    pub fn bit(self) -> Propensity {
        match self {
            Tail::Fair => Propensity::half(),
            Tail::Zero => Propensity::zero(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tail::Fair => "fair",
            Tail::Zero => "zero",
        }
    }
}

/// A finite-information quantity in [0, 1]: an ordered vector of bit
/// propensities for fractional positions `1..=M` plus a tail model for
/// everything deeper.
///
/// The empty vector with a fair tail is the totally unknown quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fiq {
    propensities: Vec<Propensity>,
    tail: Tail,
    unit_label: Option<String>,
}

impl Fiq {
    /// Builds a quantity from explicit bit propensities. Trailing explicit
    /// 1/2 entries are kept as given; no canonicalization is applied.
    pub fn new(propensities: Vec<Propensity>, tail: Tail) -> Self {
        Self {
            propensities,
            tail,
            unit_label: None,
        }
    }

    /// The totally unknown quantity: no explicit bits, fair tail.
    pub fn unknown() -> Self {
        Self::new(Vec::new(), Tail::Fair)
    }

    /// Convenience constructor from `(numerator, denominator)` pairs.
    pub fn from_ratios(ratios: &[(u64, u64)], tail: Tail) -> Result<Self> {
        let propensities = ratios
            .iter()
            .map(|&(n, d)| Propensity::new(n, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(propensities, tail))
    }

    /// Embeds a dyadic value given as explicit bits, e.g. `[1, 0, 1]` for
    /// 0.101. Bits map to deterministic propensities over a zero tail.
    pub fn from_bits(bits: &[u8]) -> Self {
        let propensities = bits
            .iter()
            .map(|&b| {
                if b == 0 {
                    Propensity::zero()
                } else {
                    Propensity::one()
                }
            })
            .collect();
        Self::new(propensities, Tail::Zero)
    }

    pub fn with_unit(mut self, label: impl Into<String>) -> Self {
        self.unit_label = Some(label.into());
        self
    }

    /// Number of explicit fractional positions, `M`.
    pub fn depth(&self) -> u32 {
        self.propensities.len() as u32
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn unit_label(&self) -> Option<&str> {
        self.unit_label.as_deref()
    }

    pub fn propensities(&self) -> &[Propensity] {
        &self.propensities
    }

    /// Propensity at fractional position `k >= 1`, falling back to the tail
    /// beyond the explicit region.
    pub fn propensity_at(&self, position: u32) -> Propensity {
        assert!(position >= 1, "fractional positions start at 1");
        self.propensities
            .get(position as usize - 1)
            .cloned()
            .unwrap_or_else(|| self.tail.bit())
    }
}

/// Marginal bit-propensity vector spanning integer and fractional positions;
/// the result type of the marginal engine (sums and products can exceed 1).
///
/// Integer positions beyond the explicit list are deterministically 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WideMarginal {
    /// Propensities at positions 0, -1, -2, ... — index `i` is position `-i`.
    integer: Vec<Propensity>,
    /// Propensities at positions 1, 2, ... — index `i` is position `i + 1`.
    fractional: Vec<Propensity>,
    tail: Tail,
}

impl WideMarginal {
    pub fn new(integer: Vec<Propensity>, fractional: Vec<Propensity>, tail: Tail) -> Self {
        let mut value = Self {
            integer,
            fractional,
            tail,
        };
        value.trim_integer();
        value
    }

    /// Drops most-significant integer entries that are exactly 0.
    fn trim_integer(&mut self) {
        while self.integer.last().is_some_and(Propensity::is_zero) {
            self.integer.pop();
        }
    }

    pub fn integer_propensities(&self) -> &[Propensity] {
        &self.integer
    }

    pub fn fractional_propensities(&self) -> &[Propensity] {
        &self.fractional
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Number of explicit integer positions.
    pub fn integer_len(&self) -> u32 {
        self.integer.len() as u32
    }

    /// Number of explicit fractional positions.
    pub fn depth(&self) -> u32 {
        self.fractional.len() as u32
    }

    /// Propensity at any position: explicit entries, then implicit values
    /// (0 above the integer list, the tail bit below the fractional list).
    pub fn propensity_at(&self, position: i32) -> Propensity {
        if position >= 1 {
            self.fractional
                .get(position as usize - 1)
                .cloned()
                .unwrap_or_else(|| self.tail.bit())
        } else {
            self.integer
                .get((-position) as usize)
                .cloned()
                .unwrap_or_else(Propensity::zero)
        }
    }

    /// Position-wise equality over the union of explicit spans, honouring
    /// the implicit values each side assigns beyond its lists. Two results
    /// that print the same table compare equal here even if one carries an
    /// extra explicit `1/2` over a fair tail.
    pub fn eq_semantic(&self, other: &Self) -> bool {
        if self.tail != other.tail {
            return false;
        }
        let depth = self.depth().max(other.depth()) as i32;
        let ints = self.integer_len().max(other.integer_len()) as i32;
        ((1 - ints)..=depth).all(|p| self.propensity_at(p) == other.propensity_at(p))
    }

    /// Iterates explicit positions most-significant first:
    /// integer positions descending weight, then fractional 1..=depth.
    pub fn explicit_positions(&self) -> impl Iterator<Item = i32> + '_ {
        let ints = self.integer.len() as i32;
        ((1 - ints)..=0).chain(1..=self.fractional.len() as i32)
    }

    /// Explicit propensities in `explicit_positions` order.
    pub fn explicit_propensities(&self) -> impl Iterator<Item = &Propensity> {
        self.integer.iter().rev().chain(self.fractional.iter())
    }
}

impl From<&Fiq> for WideMarginal {
    fn from(q: &Fiq) -> Self {
        WideMarginal::new(Vec::new(), q.propensities().to_vec(), q.tail())
    }
}

impl From<Fiq> for WideMarginal {
    fn from(q: Fiq) -> Self {
        WideMarginal::from(&q)
    }
}

/// Validates a raw propensity list into a quantity; entries outside [0, 1]
/// are rejected at `Propensity` construction.
pub fn fiq_validate(raw: &[(u64, u64)], tail: Tail) -> Result<Fiq> {
    Fiq::from_ratios(raw, tail)
}
