//! Marginal propensity propagation.
//!
//! Addition runs the binary full adder over bit propensities, assuming at
//! each position that the two addend bits and the incoming carry are
//! independent. Multiplication by an integer constant is shift-and-add over
//! the same rule. The independence assumption is the whole point of this
//! engine: it is cheap, it reproduces the closed-form product propensities,
//! and it silently discards the correlations the exact engine retains.

use num_rational::BigRational;

use crate::error::{FiqError, Result};
use crate::number::{Fiq, Tail, WideMarginal};
use crate::propensity::Propensity;

/// Carry value assumed below the deepest explicit position.
///
/// With fair addend tails the carry recursion has 1/2 as its exact fixed
/// point, so starting the recursion at the explicit boundary with carry 1/2
/// gives the same result as iterating up from any deeper position.
/// `TruncateZero` instead embeds ordinary binary arithmetic over zero tails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarryModel {
    /// Carry-in 0 below the explicit region; requires zero tails.
    TruncateZero,
    /// Carry-in 1/2 below the explicit region; requires fair tails.
    FairTailFixedPoint,
}

impl CarryModel {
    fn required_tail(self) -> Tail {
        match self {
            CarryModel::TruncateZero => Tail::Zero,
            CarryModel::FairTailFixedPoint => Tail::Fair,
        }
    }

    fn carry_in(self) -> Propensity {
        match self {
            CarryModel::TruncateZero => Propensity::zero(),
            CarryModel::FairTailFixedPoint => Propensity::half(),
        }
    }

    fn label(self) -> &'static str {
        match self {
            CarryModel::TruncateZero => "truncate_zero",
            CarryModel::FairTailFixedPoint => "fair_tail_fixed_point",
        }
    }

    fn check(self, a: &WideMarginal, b: &WideMarginal) -> Result<()> {
        let required = self.required_tail();
        if a.tail() != required || b.tail() != required {
            return Err(FiqError::ModelTailMismatch {
                model: self.label(),
                required: required.label(),
                got: format!("{} and {}", a.tail().label(), b.tail().label()),
            });
        }
        Ok(())
    }
}

/// One row of the binary full adder: `(sum, carry_out)` for bit inputs.
pub fn adder_truth_row(q_bit: u8, r_bit: u8, carry_in: u8) -> (u8, u8) {
    debug_assert!(q_bit <= 1 && r_bit <= 1 && carry_in <= 1);
    let sum = q_bit ^ r_bit ^ carry_in;
    let carry_out = (q_bit & r_bit) | (q_bit & carry_in) | (r_bit & carry_in);
    (sum, carry_out)
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Propensity of the sum bit: `q + r + c - 2(qr + qc + rc) + 4qrc`, the
/// total mass of the four sum=1 adder rows under bit independence.
pub fn propagate_sum(q: &Propensity, r: &Propensity, carry: &Propensity) -> Propensity {
    let (q, r, c) = (q.ratio(), r.ratio(), carry.ratio());
    let qr = q * r;
    let qc = q * c;
    let rc = r * c;
    let qrc = &qr * c;
    let s = q + r + c - (qr + qc + rc) * int(2) + qrc * int(4);
    Propensity::from_ratio(s).expect("sum propensity stays in [0,1]")
}

/// Propensity of the carry bit: `qr + qc + rc - 2qrc`, the total mass of
/// the four carry=1 adder rows under bit independence.
pub fn propagate_carry(q: &Propensity, r: &Propensity, carry: &Propensity) -> Propensity {
    let (q, r, c) = (q.ratio(), r.ratio(), carry.ratio());
    let qrc = q * r * c;
    let out = q * r + q * c + r * c - qrc * int(2);
    Propensity::from_ratio(out).expect("carry propensity stays in [0,1]")
}

/// Adds two marginal vectors with the full-adder recursion, running from the
/// deepest explicit position upward with the model's carry-in. The final
/// carry extends the integer side by one position.
pub fn add_marginal(a: &WideMarginal, b: &WideMarginal, model: CarryModel) -> Result<WideMarginal> {
    model.check(a, b)?;
    let depth = a.depth().max(b.depth());
    let integer_len = a.integer_len().max(b.integer_len());

    let mut carry = model.carry_in();
    let mut fractional = vec![Propensity::zero(); depth as usize];
    for k in (1..=depth as i32).rev() {
        let qa = a.propensity_at(k);
        let qb = b.propensity_at(k);
        fractional[k as usize - 1] = propagate_sum(&qa, &qb, &carry);
        carry = propagate_carry(&qa, &qb, &carry);
    }
    let mut integer = Vec::with_capacity(integer_len as usize + 1);
    for p in (1 - integer_len as i32..=0).rev() {
        let qa = a.propensity_at(p);
        let qb = b.propensity_at(p);
        integer.push(propagate_sum(&qa, &qb, &carry));
        carry = propagate_carry(&qa, &qb, &carry);
    }
    // Above the explicit integer region both addends are deterministically
    // zero, so the carry lands as one more bit and propagation stops.
    integer.push(carry);

    Ok(WideMarginal::new(
        integer,
        fractional,
        model.required_tail(),
    ))
}

/// Moves every propensity from position `k` to `k - j`, i.e. multiplies the
/// quantity by `2^j`. A fair tail stays fair around the shifted boundary.
pub fn shift(m: &WideMarginal, j: u32) -> WideMarginal {
    if j == 0 {
        return m.clone();
    }
    let old_int = m.integer_len() as i32;
    let new_int_len = old_int + j as i32;
    let mut integer = Vec::with_capacity(new_int_len as usize);
    for i in 0..new_int_len {
        // New position -i held what was at position j - i.
        integer.push(m.propensity_at(j as i32 - i));
    }
    let new_depth = m.depth().saturating_sub(j);
    let mut fractional = Vec::with_capacity(new_depth as usize);
    for k in 1..=new_depth as i32 {
        fractional.push(m.propensity_at(k + j as i32));
    }
    WideMarginal::new(integer, fractional, m.tail())
}

/// Multiplies a quantity by a positive integer constant via shift-and-add:
/// the constant's set binary digits, in increasing significance, select
/// shifted copies that are summed left-associated with `add_marginal`.
///
/// Each addition applies the bit-independence assumption even though the
/// shifted copies share bits; that is this engine's defining semantics, and
/// it is what the exact engine's joint law is audited against.
pub fn mul_constant_marginal(q: &Fiq, scale: u64, model: CarryModel) -> Result<WideMarginal> {
    let order = canonical_shift_order(scale)?;
    mul_constant_marginal_with_order(q, scale, model, &order)
}

/// The canonical shift sequence for a scale factor: its set binary digits in
/// increasing significance.
pub fn canonical_shift_order(scale: u64) -> Result<Vec<u32>> {
    if scale == 0 {
        return Err(FiqError::ZeroScale);
    }
    Ok((0..64).filter(|i| (scale >> i) & 1 == 1).collect())
}

/// `mul_constant_marginal` with an explicit association order over the
/// scale's set digits. Under the independence assumption the order can
/// matter for scales with three or more set digits; the canonical order
/// keeps results reproducible, and this entry point exposes the knob.
pub fn mul_constant_marginal_with_order(
    q: &Fiq,
    scale: u64,
    model: CarryModel,
    shift_order: &[u32],
) -> Result<WideMarginal> {
    if scale == 0 {
        return Err(FiqError::ZeroScale);
    }
    let mut sorted = shift_order.to_vec();
    sorted.sort_unstable();
    if sorted != canonical_shift_order(scale)? {
        return Err(FiqError::InvalidArgument(format!(
            "shift order {shift_order:?} is not a permutation of the set digits of {scale}"
        )));
    }
    let wide = WideMarginal::from(q);
    // A single set digit is a pure shift; the contract is checked anyway so
    // a scale of 1 behaves like every other scale.
    model.check(&wide, &wide)?;
    let mut acc = shift(&wide, shift_order[0]);
    for &j in &shift_order[1..] {
        acc = add_marginal(&acc, &shift(&wide, j), model)?;
    }
    Ok(acc)
}
