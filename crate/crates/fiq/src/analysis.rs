//! Information metrics and the unit-change audit.
//!
//! A change of measurement unit `U' = U / L` rescales the numerical value
//! by `L`. The audit runs that rescaling through both engines and puts the
//! results side by side: the per-bit propensities the marginal calculus
//! produces, the true marginals of the exact joint law, the pairwise
//! dependences among result bits, and two information summaries. When the
//! joint entropy falls short of the summed per-bit entropies, the marginal
//! representation of the rescaled quantity has measurably lost information.
//!
//! Probabilities stay rational everywhere else in the crate; this module is
//! where floating point is allowed, because entropies involve logarithms.
//! Comparisons against these summaries carry an explicit tolerance.

use num_rational::BigRational;
use num_traits::One;

use crate::error::{FiqError, Result};
use crate::exact::joint_mul_constant;
use crate::law::JointLaw;
use crate::marginal::{mul_constant_marginal, CarryModel};
use crate::number::{Fiq, Tail, WideMarginal};
use crate::propensity::Propensity;

/// Tolerance for assertions on floating-point entropy comparisons.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;

/// Binary entropy of a bit, in bits: `-q log2 q - (1-q) log2 (1-q)`,
/// with the deterministic endpoints contributing zero.
pub fn bit_entropy(q: &Propensity) -> f64 {
    if q.is_deterministic() {
        return 0.0;
    }
    let p = q.to_f64();
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Determinate information over explicit positions, in bits: each position
/// contributes `1 - H2(q)`. A fair bit contributes nothing, so the fair
/// tail adds zero by construction.
pub fn information_content<'a>(propensities: impl IntoIterator<Item = &'a Propensity>) -> f64 {
    propensities.into_iter().map(|q| 1.0 - bit_entropy(q)).sum()
}

/// Shannon entropy of a joint law, in bits.
pub fn law_entropy_bits(law: &JointLaw) -> f64 {
    law.support()
        .iter()
        .map(|(_, mass)| {
            let p = mass.to_f64();
            if p == 0.0 {
                0.0
            } else {
                -p * p.log2()
            }
        })
        .sum()
}

/// Dependence between two window positions as found by the audit.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDefect {
    pub positions: (i32, i32),
    pub defect: Propensity,
}

/// Side-by-side account of what a unit change does to a quantity: the
/// marginal engine's output, the exact marginals, pairwise dependences,
/// and information summaries before and after.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub input: Fiq,
    pub scale: u64,
    pub marginal_engine: WideMarginal,
    pub exact_marginals: WideMarginal,
    pub law: JointLaw,
    pub pair_defects: Vec<PairDefect>,
    pub joint_entropy_bits: f64,
    pub marginal_entropy_sum_bits: f64,
    pub information_before_bits: f64,
    pub information_after_bits: f64,
    pub marginals_disagree: bool,
    pub dependence_detected: bool,
    pub unit_label: Option<String>,
}

/// Multiplies a quantity by `scale` with both engines and reports every
/// discrepancy between the marginal picture and the exact joint law.
///
/// The "after" information content is measured on the exact marginals over
/// the law's window: it is the per-bit information the rescaled quantity's
/// marginal representation retains.
pub fn unit_change_audit(q: &Fiq, scale: u64, new_unit: Option<&str>) -> Result<AuditReport> {
    let model = match q.tail() {
        Tail::Fair => CarryModel::FairTailFixedPoint,
        Tail::Zero => CarryModel::TruncateZero,
    };
    let marginal_engine = mul_constant_marginal(q, scale, model)?;
    let law = joint_mul_constant(q, scale, q.depth())?;
    let exact_marginals = law.project_to_marginal();

    let window = law.window();
    let positions: Vec<i32> = window.positions().collect();
    let mut pair_defects = Vec::new();
    for (i, &a) in positions.iter().enumerate() {
        for &b in &positions[i + 1..] {
            let (defect, _) = law.independence_defect(&[a, b])?;
            pair_defects.push(PairDefect {
                positions: (a, b),
                defect,
            });
        }
    }
    let dependence_detected = pair_defects.iter().any(|d| !d.defect.is_zero());

    let joint_entropy_bits = law_entropy_bits(&law);
    let marginal_entropy_sum_bits: f64 = positions
        .iter()
        .map(|&p| bit_entropy(&exact_marginals.propensity_at(p)))
        .sum();
    assert!(
        joint_entropy_bits <= marginal_entropy_sum_bits + ENTROPY_TOLERANCE,
        "joint entropy must not exceed the sum of marginal entropies"
    );

    let marginals_disagree = !marginal_engine.eq_semantic(&exact_marginals);

    let information_before_bits = information_content(q.propensities());
    let information_after_bits: f64 = positions
        .iter()
        .map(|&p| 1.0 - bit_entropy(&exact_marginals.propensity_at(p)))
        .sum();

    let unit_label = match (new_unit, q.unit_label()) {
        (Some(label), _) => Some(label.to_string()),
        (None, Some(old)) if scale > 1 => Some(format!("{old}/{scale}")),
        (None, old) => old.map(str::to_string),
    };

    Ok(AuditReport {
        input: q.clone(),
        scale,
        marginal_engine,
        exact_marginals,
        law,
        pair_defects,
        joint_entropy_bits,
        marginal_entropy_sum_bits,
        information_before_bits,
        information_after_bits,
        marginals_disagree,
        dependence_detected,
        unit_label,
    })
}

/// Exact distribution of a quantity's value truncated at `depth`, over
/// `bin_count` equal bins of [0, 1).
///
/// Bins must be a power of two no finer than the truncation: then no
/// truncated value can straddle a bin boundary, the mass of bin `b` is the
/// probability that the first `log2(bin_count)` bits spell `b`, and the
/// masses are exact rationals. The truncation error bound
/// `bin_count/2 * 2^-depth` quoted in emitted reports is conservative.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub depth: u32,
    pub bin_count: u64,
    pub masses: Vec<Propensity>,
}

/// Builds the digit-distribution histogram of a quantity with independent
/// bits. The fair tail is truncated at `depth`.
pub fn digit_histogram(q: &Fiq, depth: u32, bin_count: u64) -> Result<Histogram> {
    if depth == 0 {
        return Err(FiqError::InvalidArgument("depth must be at least 1".into()));
    }
    if !bin_count.is_power_of_two() {
        return Err(FiqError::InvalidArgument(format!(
            "bin count must be a power of two, got {bin_count}"
        )));
    }
    let bin_bits = bin_count.trailing_zeros();
    if depth < bin_bits {
        return Err(FiqError::InvalidArgument(format!(
            "{bin_count} bins need depth >= {bin_bits}, got {depth}"
        )));
    }
    let mut masses = Vec::with_capacity(bin_count as usize);
    for bin in 0..bin_count {
        let mut mass = BigRational::one();
        for k in 1..=bin_bits {
            let p = q.propensity_at(k);
            let bit = (bin >> (bin_bits - k)) & 1;
            mass *= if bit == 1 {
                p.ratio().clone()
            } else {
                p.complement().ratio().clone()
            };
        }
        masses.push(Propensity::from_ratio(mass).expect("bin mass lies in [0,1]"));
    }
    let total: BigRational = masses.iter().map(|m| m.ratio().clone()).sum();
    assert!(total.is_one(), "histogram masses must sum to 1");
    Ok(Histogram {
        depth,
        bin_count,
        masses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::fiq_validate;
    use num_traits::Zero;

    fn p(n: u64, d: u64) -> Propensity {
        Propensity::new(n, d).unwrap()
    }

    #[test]
    fn entropy_of_the_fair_bit_is_one() {
        assert_eq!(bit_entropy(&Propensity::half()), 1.0);
        assert_eq!(bit_entropy(&Propensity::zero()), 0.0);
        assert_eq!(bit_entropy(&Propensity::one()), 0.0);
    }

    #[test]
    fn entropy_of_a_quarter_bit() {
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert!((bit_entropy(&p(1, 4)) - expected).abs() < 1e-12);
    }

    #[test]
    fn information_of_deterministic_bits() {
        let q = Fiq::from_bits(&[1, 1]);
        assert!((information_content(q.propensities()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn information_ignores_the_fair_tail() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        assert!((information_content(q.propensities()) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn information_counts_partial_bits() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 4)], Tail::Fair).unwrap();
        let expected = 2.0 + 1.0 - (2.0 - 0.75 * 3f64.log2());
        assert!((information_content(q.propensities()) - expected).abs() < 1e-9);
    }

    #[test]
    fn audit_of_the_scale3_case_flags_everything() {
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let report = unit_change_audit(&q, 3, None).unwrap();
        assert!(report.dependence_detected);
        assert!(report.marginals_disagree);
        // Marginal engine: (1/4, 1/2, 1/2); exact: (1/3, 1/3, 1/2).
        assert_eq!(report.marginal_engine.propensity_at(1), p(1, 4));
        assert_eq!(report.exact_marginals.propensity_at(1), p(1, 3));
        assert_eq!(report.exact_marginals.propensity_at(2), p(1, 3));
        assert_eq!(report.exact_marginals.propensity_at(3), p(1, 2));
        let pair = report
            .pair_defects
            .iter()
            .find(|d| d.positions == (1, 2))
            .unwrap();
        assert_eq!(pair.defect, p(1, 9));
        // Joint entropy log2(6) against marginal sum 2*H2(1/3) + 1.
        assert!((report.joint_entropy_bits - 6f64.log2()).abs() < 1e-9);
        assert!(
            report.marginal_entropy_sum_bits - report.joint_entropy_bits > 0.1,
            "information loss should exceed a tenth of a bit"
        );
    }

    #[test]
    fn audit_of_a_deterministic_quantity_is_clean() {
        let q = Fiq::from_bits(&[1, 0, 1]);
        let report = unit_change_audit(&q, 5, None).unwrap();
        assert!(!report.dependence_detected);
        assert!(!report.marginals_disagree);
        assert_eq!(report.joint_entropy_bits, 0.0);
        assert!((report.information_before_bits - 3.0).abs() < 1e-12);
    }

    #[test]
    fn identity_audit_raises_no_flags() {
        let q = fiq_validate(&[(1, 3), (1, 2)], Tail::Fair).unwrap();
        let report = unit_change_audit(&q, 1, None).unwrap();
        assert!(!report.dependence_detected);
        assert!(!report.marginals_disagree);
        assert!((report.information_before_bits - report.information_after_bits).abs() < 1e-9);
    }

    #[test]
    fn audit_renames_the_unit() {
        let q = fiq_validate(&[(1, 2)], Tail::Fair).unwrap().with_unit("V");
        let report = unit_change_audit(&q, 3, None).unwrap();
        assert_eq!(report.unit_label.as_deref(), Some("V/3"));
        let report = unit_change_audit(&q, 3, Some("mV")).unwrap();
        assert_eq!(report.unit_label.as_deref(), Some("mV"));
    }

    #[test]
    fn uniform_histogram_from_fair_bits() {
        let q = Fiq::unknown();
        let hist = digit_histogram(&q, 16, 256).unwrap();
        let uniform = p(1, 256);
        assert!(hist.masses.iter().all(|m| *m == uniform));
    }

    #[test]
    fn deterministic_ones_pile_into_the_last_bin() {
        let q = Fiq::new(vec![Propensity::one(); 16], Tail::Zero);
        let hist = digit_histogram(&q, 16, 256).unwrap();
        assert!(hist.masses[..255].iter().all(Propensity::is_zero));
        assert!(hist.masses[255].is_one());
    }

    #[test]
    fn skewed_bits_give_the_quarter_split() {
        let q = Fiq::new(vec![p(1, 4); 16], Tail::Zero);
        let hist = digit_histogram(&q, 16, 4).unwrap();
        assert_eq!(hist.masses, vec![p(9, 16), p(3, 16), p(3, 16), p(1, 16)]);
    }

    /// Brute-force oracle: enumerate all 2^depth truncated values and bin
    /// them. Validates the first-bits product shortcut.
    fn histogram_by_enumeration(q: &Fiq, depth: u32, bin_count: u64) -> Vec<BigRational> {
        let mut masses = vec![BigRational::zero(); bin_count as usize];
        let bin_bits = bin_count.trailing_zeros();
        for value in 0u64..(1 << depth) {
            let mut mass = BigRational::one();
            for k in 1..=depth {
                let p = q.propensity_at(k);
                let bit = (value >> (depth - k)) & 1;
                mass *= if bit == 1 {
                    p.ratio().clone()
                } else {
                    p.complement().ratio().clone()
                };
            }
            let bin = value >> (depth - bin_bits);
            masses[bin as usize] += mass;
        }
        masses
    }

    #[test]
    fn histogram_matches_full_enumeration_at_depth_16() {
        let q = Fiq::new(vec![p(1, 4); 16], Tail::Zero);
        let hist = digit_histogram(&q, 16, 4).unwrap();
        let brute = histogram_by_enumeration(&q, 16, 4);
        for (mass, expected) in hist.masses.iter().zip(&brute) {
            assert_eq!(mass.ratio(), expected);
        }
    }

    #[test]
    fn refinement_splits_masses_exactly() {
        let q = fiq_validate(&[(1, 3), (2, 5), (1, 7), (1, 2)], Tail::Fair).unwrap();
        for bins in [4u64, 8] {
            let coarse = digit_histogram(&q, 12, bins).unwrap();
            let fine = digit_histogram(&q, 12, bins * 2).unwrap();
            for (i, parent) in coarse.masses.iter().enumerate() {
                let children = fine.masses[2 * i].ratio() + fine.masses[2 * i + 1].ratio();
                assert_eq!(parent.ratio(), &children);
            }
        }
    }

    #[test]
    fn histogram_rejects_bins_finer_than_the_depth() {
        let q = Fiq::unknown();
        assert!(digit_histogram(&q, 4, 32).is_err());
        assert!(digit_histogram(&q, 4, 6).is_err());
        assert!(digit_histogram(&q, 0, 1).is_err());
    }

    #[test]
    fn subadditivity_is_tight_only_for_independent_bits() {
        // Product law: independent bits, equality.
        let det = Fiq::from_bits(&[1, 0]);
        let fair = fiq_validate(&[(0, 1), (1, 2)], Tail::Zero).unwrap();
        let product_law = crate::exact::joint_add(&det, &fair, 2).unwrap();
        let joint = law_entropy_bits(&product_law);
        let marginal_sum: f64 = product_law
            .window()
            .positions()
            .map(|p| bit_entropy(&product_law.marginal_of(p).unwrap()))
            .sum();
        assert!((joint - marginal_sum).abs() < ENTROPY_TOLERANCE);

        // The scale-3 law: dependent bits, strict inequality.
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let law = joint_mul_constant(&q, 3, 3).unwrap();
        let joint = law_entropy_bits(&law);
        let marginal_sum: f64 = law
            .window()
            .positions()
            .map(|p| bit_entropy(&law.marginal_of(p).unwrap()))
            .sum();
        assert!(joint < marginal_sum - ENTROPY_TOLERANCE);
    }

    #[test]
    fn two_laws_can_share_marginals_yet_differ() {
        // The marginal projection is not faithful: the scale-3 law and the
        // product law of its marginals have identical projections but are
        // different laws.
        let q = fiq_validate(&[(0, 1), (0, 1), (1, 2)], Tail::Fair).unwrap();
        let law = joint_mul_constant(&q, 3, 3).unwrap();
        let marginals = law.project_to_marginal();
        // Build the product law by adding the marginal vector to zero.
        let independent = Fiq::new(
            (1..=3).map(|k| marginals.propensity_at(k)).collect(),
            Tail::Zero,
        );
        let product_law = crate::exact::joint_add(&independent, &Fiq::from_bits(&[]), 3).unwrap();
        let reprojected = product_law.project_to_marginal();
        for k in 1..=3 {
            assert_eq!(
                reprojected.propensity_at(k),
                marginals.propensity_at(k),
                "projections agree at position {k}"
            );
        }
        assert_ne!(law.support(), product_law.support());
    }
}
