//! Document format and tabular emission.
//!
//! Quantities travel as JSON documents with rational strings, never binary
//! floats, so exact values survive round trips:
//!
//! ```json
//! {
//!   "propensities": ["0", "0", "1/2"],
//!   "tail": "fair",
//!   "unit": "V"
//! }
//! ```
//!
//! Emitted tables render probabilities twice: the exact rational and a
//! 12-significant-digit decimal. CSV output uses `.` as the decimal
//! separator and LF newlines regardless of locale.

use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analysis::{AuditReport, Histogram};
use crate::error::{FiqError, Result};
use crate::law::{BitPattern, JointLaw, Window};
use crate::number::{Fiq, Tail, WideMarginal};
use crate::oracle::SampleReport;
use crate::propensity::Propensity;

/// Serialized form of a quantity; the `.fiq` file payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiqDocument {
    pub propensities: Vec<String>,
    pub tail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

/// Parses a `.fiq` JSON document into a validated quantity.
pub fn parse_fiq(text: &str) -> Result<Fiq> {
    let doc: FiqDocument = serde_json::from_str(text).map_err(|e| FiqError::Parse {
        field: "document".into(),
        message: e.to_string(),
    })?;
    let tail = match doc.tail.as_str() {
        "fair" => Tail::Fair,
        "zero" => Tail::Zero,
        other => {
            return Err(FiqError::Parse {
                field: "tail".into(),
                message: format!("expected \"fair\" or \"zero\", got \"{other}\""),
            })
        }
    };
    let mut propensities = Vec::with_capacity(doc.propensities.len());
    for (index, raw) in doc.propensities.iter().enumerate() {
        let p: Propensity = raw.parse().map_err(|e| match e {
            FiqError::Parse { message, .. } => FiqError::Parse {
                field: format!("propensities[{index}]"),
                message,
            },
            other => other,
        })?;
        propensities.push(p);
    }
    let q = Fiq::new(propensities, tail);
    Ok(match doc.unit {
        Some(unit) => q.with_unit(unit),
        None => q,
    })
}

/// Serializes a quantity to its canonical document: reduced rational
/// strings, two-space indentation, trailing newline.
pub fn serialize_fiq(q: &Fiq) -> String {
    let doc = FiqDocument {
        propensities: q.propensities().iter().map(|p| p.to_string()).collect(),
        tail: q.tail().label().to_string(),
        unit: q.unit_label().map(str::to_string),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

/// Decimal approximation of `x` to `sig` significant digits, in plain
/// positional notation.
pub fn decimal_approx(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let formatted = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = formatted.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if negative { "-" } else { "" };
    if exponent >= 0 {
        let point = exponent as usize + 1;
        if point >= digits.len() {
            let zeros = "0".repeat(point - digits.len());
            format!("{sign}{digits}{zeros}")
        } else {
            format!("{sign}{}.{}", &digits[..point], &digits[point..])
        }
    } else {
        let zeros = "0".repeat((-exponent - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

fn rational_decimal(value: &BigRational) -> String {
    decimal_approx(value.to_f64().unwrap_or(f64::NAN), 12)
}

/// Bit string of a pattern: integer bits, point, fractional window bits.
/// A window without integer bits is prefixed with a conventional `0`.
pub fn pattern_string(pattern: &BitPattern, window: &Window) -> String {
    let mut out = String::new();
    if window.integer_bits == 0 {
        out.push('0');
    }
    for position in window.positions() {
        if position == 1 {
            out.push('.');
        }
        out.push(if pattern.bit(position, window) {
            '1'
        } else {
            '0'
        });
    }
    if window.fractional_depth == 0 {
        out.push('.');
    }
    out
}

fn write_table(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            if c > 0 {
                line.push_str("  ");
            }
            let _ = write!(line, "{cell:<width$}", width = widths[c]);
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

/// Renders a joint law as a table: one row per pattern, ascending, with the
/// exact rational probability and its decimal approximation, then a total
/// row summing to 1.
pub fn emit_joint_law(law: &JointLaw) -> String {
    let window = law.window();
    let mut rows = vec![vec![
        "pattern".to_string(),
        "probability".to_string(),
        "decimal".to_string(),
    ]];
    let mut total = BigRational::zero();
    for (pattern, mass) in law.support() {
        total += mass.ratio();
        rows.push(vec![
            pattern_string(pattern, &window),
            mass.to_string(),
            rational_decimal(mass.ratio()),
        ]);
    }
    rows.push(vec![
        "total".to_string(),
        rational_display(&total),
        rational_decimal(&total),
    ]);
    write_table(&rows)
}

fn rational_display(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

fn weight_display(position: i32) -> String {
    rational_display(&BigRational::from_integer(2.into()).pow(-position))
}

/// Renders a marginal vector: one row per explicit position with its
/// weight, propensity, and decimal, plus the tail behaviour.
pub fn render_marginal(m: &WideMarginal) -> String {
    let mut rows = vec![vec![
        "position".to_string(),
        "weight".to_string(),
        "propensity".to_string(),
        "decimal".to_string(),
    ]];
    for position in m.explicit_positions() {
        let p = m.propensity_at(position);
        rows.push(vec![
            position.to_string(),
            weight_display(position),
            p.to_string(),
            decimal_approx(p.to_f64(), 12),
        ]);
    }
    let mut out = write_table(&rows);
    let _ = writeln!(
        out,
        "tail: {} (positions > {})",
        m.tail().label(),
        m.depth()
    );
    out
}

/// CSV rendering of a histogram: a comment header with the truncation
/// error bound, then `bin_start,bin_end,mass_rational,mass_decimal` rows.
pub fn histogram_csv(hist: &Histogram) -> String {
    let bins = BigRational::from_integer(hist.bin_count.into());
    let bound = BigRational::new(
        hist.bin_count.into(),
        BigRational::from_integer(2.into())
            .pow(hist.depth as i32 + 1)
            .to_integer(),
    );
    let mut out = format!(
        "# depth {}, {} bins; fair-tail truncation bounds each bin mass error by bins/2 * 2^-depth = {}\n",
        hist.depth,
        hist.bin_count,
        rational_display(&bound),
    );
    out.push_str("bin_start,bin_end,mass_rational,mass_decimal\n");
    for (bin, mass) in hist.masses.iter().enumerate() {
        let start = BigRational::from_integer((bin as u64).into()) / &bins;
        let end = BigRational::from_integer((bin as u64 + 1).into()) / &bins;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            rational_display(&start),
            rational_display(&end),
            mass,
            decimal_approx(mass.to_f64(), 12),
        );
    }
    out
}

fn flag(value: bool) -> String {
    value.to_string()
}

fn option_display(value: Option<&str>) -> String {
    value.map_or_else(|| "(none)".to_string(), str::to_string)
}

/// Human-readable audit report. The machine-readable JSON from
/// [`audit_json`] mirrors it field for field.
pub fn render_audit(report: &AuditReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "unit-change audit: scale {}", report.scale);
    let input_props: Vec<String> = report
        .input
        .propensities()
        .iter()
        .map(Propensity::to_string)
        .collect();
    let _ = writeln!(out, "input propensities   [{}]", input_props.join(", "));
    let _ = writeln!(out, "input tail           {}", report.input.tail().label());
    let _ = writeln!(
        out,
        "input unit           {}",
        option_display(report.input.unit_label())
    );
    let _ = writeln!(
        out,
        "new unit             {}",
        option_display(report.unit_label.as_deref())
    );
    out.push('\n');

    let window = report.law.window();
    let mut positions: Vec<i32> = window.positions().collect();
    for p in report.marginal_engine.explicit_positions() {
        if !positions.contains(&p) {
            positions.push(p);
        }
    }
    positions.sort_unstable();
    let mut rows = vec![vec![
        "position".to_string(),
        "marginal-engine".to_string(),
        "exact-marginal".to_string(),
    ]];
    for &position in &positions {
        let engine = report.marginal_engine.propensity_at(position);
        let exact = if window.contains(position) {
            report.exact_marginals.propensity_at(position).to_string()
        } else {
            "-".to_string()
        };
        rows.push(vec![position.to_string(), engine.to_string(), exact]);
    }
    out.push_str(&write_table(&rows));
    out.push('\n');

    out.push_str("pair defects (max |joint - product of marginals|)\n");
    let mut rows = vec![vec![
        "positions".to_string(),
        "defect".to_string(),
        "decimal".to_string(),
    ]];
    for pair in &report.pair_defects {
        rows.push(vec![
            format!("({}, {})", pair.positions.0, pair.positions.1),
            pair.defect.to_string(),
            decimal_approx(pair.defect.to_f64(), 12),
        ]);
    }
    out.push_str(&write_table(&rows));
    out.push('\n');

    let _ = writeln!(
        out,
        "joint entropy (bits)             {:.9}",
        report.joint_entropy_bits
    );
    let _ = writeln!(
        out,
        "sum of marginal entropies (bits) {:.9}",
        report.marginal_entropy_sum_bits
    );
    let _ = writeln!(
        out,
        "information before (bits)        {:.9}",
        report.information_before_bits
    );
    let _ = writeln!(
        out,
        "information after (bits)         {:.9}",
        report.information_after_bits
    );
    let _ = writeln!(
        out,
        "marginals_disagree               {}",
        flag(report.marginals_disagree)
    );
    let _ = writeln!(
        out,
        "dependence_detected              {}",
        flag(report.dependence_detected)
    );
    out
}

fn marginal_json(m: &WideMarginal) -> serde_json::Value {
    json!({
        "positions": m.explicit_positions().collect::<Vec<_>>(),
        "propensities": m.explicit_propensities().map(Propensity::to_string).collect::<Vec<_>>(),
        "tail": m.tail().label(),
    })
}

/// Machine-readable audit report, mirroring [`render_audit`] 1:1.
pub fn audit_json(report: &AuditReport) -> serde_json::Value {
    json!({
        "scale": report.scale,
        "input": {
            "propensities": report.input.propensities().iter().map(Propensity::to_string).collect::<Vec<_>>(),
            "tail": report.input.tail().label(),
            "unit": report.input.unit_label(),
        },
        "new_unit": report.unit_label,
        "window": {
            "integer_bits": report.law.window().integer_bits,
            "fractional_depth": report.law.window().fractional_depth,
        },
        "marginal_engine": marginal_json(&report.marginal_engine),
        "exact_marginals": marginal_json(&report.exact_marginals),
        "pair_defects": report.pair_defects.iter().map(|pair| json!({
            "positions": [pair.positions.0, pair.positions.1],
            "defect": pair.defect.to_string(),
        })).collect::<Vec<_>>(),
        "joint_entropy_bits": report.joint_entropy_bits,
        "marginal_entropy_sum_bits": report.marginal_entropy_sum_bits,
        "information_before_bits": report.information_before_bits,
        "information_after_bits": report.information_after_bits,
        "marginals_disagree": report.marginals_disagree,
        "dependence_detected": report.dependence_detected,
    })
}

/// [`audit_json`] rendered as pretty JSON with a trailing newline; the
/// payload behind `audit --out`.
pub fn audit_json_string(report: &AuditReport) -> String {
    let mut text = serde_json::to_string_pretty(&audit_json(report)).expect("report serializes");
    text.push('\n');
    text
}

/// Renders the engine-vs-oracle comparison: total variation distance,
/// the `scale * 2^-extension` bound, and per-position marginal gaps.
pub fn render_oracle_check(
    exact: &JointLaw,
    oracle: &JointLaw,
    scale: u64,
    extension_depth: u32,
) -> Result<String> {
    let tv = crate::law::tv_distance(exact, oracle)?;
    let bound = BigRational::new(
        scale.into(),
        BigRational::from_integer(2.into())
            .pow(extension_depth as i32)
            .to_integer(),
    );
    let mut out = String::new();
    let _ = writeln!(
        out,
        "total variation exact vs truncation@{extension_depth}: {} ({})",
        rational_display(&tv),
        rational_decimal(&tv),
    );
    let _ = writeln!(
        out,
        "bound scale * 2^-extension:                {} ({})",
        rational_display(&bound),
        rational_decimal(&bound),
    );
    let _ = writeln!(
        out,
        "within bound:                              {}",
        tv <= bound
    );
    out.push('\n');
    let mut rows = vec![vec![
        "position".to_string(),
        "exact".to_string(),
        "oracle".to_string(),
        "gap".to_string(),
    ]];
    for position in exact.window().positions() {
        let e = exact.marginal_of(position)?;
        let o = if oracle.window().contains(position) {
            oracle.marginal_of(position)?
        } else {
            Propensity::zero()
        };
        let gap = num_traits::Signed::abs(&(e.ratio() - o.ratio()));
        rows.push(vec![
            position.to_string(),
            e.to_string(),
            o.to_string(),
            rational_decimal(&gap),
        ]);
    }
    out.push_str(&write_table(&rows));
    Ok(out)
}

/// Renders a Monte Carlo report: pattern tallies, then per-position
/// estimates with four-standard-error half-widths.
pub fn render_sample_report(report: &SampleReport) -> String {
    let mut out = format!(
        "monte carlo: {} samples, seed {}, extension depth {}\n",
        report.sample_count, report.seed, report.extension_depth
    );
    let mut rows = vec![vec![
        "pattern".to_string(),
        "count".to_string(),
        "frequency".to_string(),
    ]];
    for (pattern, count) in &report.pattern_counts {
        rows.push(vec![
            pattern_string(pattern, &report.window),
            count.to_string(),
            decimal_approx(*count as f64 / report.sample_count as f64, 12),
        ]);
    }
    out.push_str(&write_table(&rows));
    out.push('\n');
    let mut rows = vec![vec![
        "position".to_string(),
        "estimate".to_string(),
        "half-width(4se)".to_string(),
    ]];
    for estimate in &report.marginals {
        rows.push(vec![
            estimate.position.to_string(),
            decimal_approx(estimate.estimate, 12),
            decimal_approx(estimate.half_width, 12),
        ]);
    }
    out.push_str(&write_table(&rows));
    out
}
