//! # fiq
//!
//! Arithmetic on finite-information quantities: numbers in [0, 1] whose
//! binary digits are random bits with specified propensities, only finitely
//! many of which differ from the fair value 1/2.
//!
//! The crate keeps two deliberately different engines side by side:
//!
//! - [`marginal`] propagates one propensity per bit position through the
//!   binary full adder, assuming bit independence at every step. This is
//!   the cheap, closed-form calculus; shift-and-add gives multiplication by
//!   an integer constant.
//! - [`exact`] enumerates the true joint law of the result bits, including
//!   the correlations that shared bits and carries induce. Its laws expose
//!   what the marginal picture cannot represent: result bits of a product
//!   are dependent, so per-bit propensities alone lose information.
//!
//! The [`oracle`] module validates both engines by brute force (deep tail
//! truncation and seeded Monte Carlo), and [`analysis`] quantifies the
//! information a marginal projection deletes under a change of measurement
//! unit, e.g. rescaling a quantity by an integer factor.
//!
//! Probabilities are exact rationals end to end; floating point appears
//! only in entropy summaries. Every core type is an immutable value, safe
//! to share across threads.
//!
//! ```
//! use fiq::{Fiq, Propensity, Tail};
//! use fiq::marginal::{mul_constant_marginal, CarryModel};
//!
//! // 0.00Q3 with a fair q3 bit, scaled by 3.
//! let q = Fiq::new(
//!     vec![Propensity::zero(), Propensity::zero(), Propensity::half()],
//!     Tail::Fair,
//! );
//! let product = mul_constant_marginal(&q, 3, CarryModel::FairTailFixedPoint).unwrap();
//! assert_eq!(product.propensity_at(1), Propensity::new(1, 4).unwrap());
//!
//! // The exact joint law shows the leading product bits are dependent.
//! let law = fiq::exact::joint_mul_constant(&q, 3, 3).unwrap();
//! assert!(law.pattern_propensity(&[(1, true), (2, true)]).unwrap().is_zero());
//! ```

pub mod analysis;
pub mod error;
pub mod exact;
pub mod format;
pub mod law;
pub mod marginal;
pub mod number;
pub mod oracle;
pub mod propensity;

pub use error::{FiqError, Result};
pub use law::{BitPattern, JointLaw, TailNote, Window};
pub use number::{fiq_validate, Fiq, Tail, WideMarginal};
pub use propensity::Propensity;
