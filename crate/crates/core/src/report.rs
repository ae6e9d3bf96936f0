//! Report structs for every CLI subcommand plus the serializers that
//! make output deterministic: floats are printed with 17 significant
//! digits (round-trip exact for f64), JSON is compact with a trailing
//! newline, CSV uses `\n` line endings.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::analysis::{
    ConsistencyRow, HarmonicCoeffs, SupEstimate, SweepRow, UncertaintyAudit,
};
use crate::model::ModelParams;
use crate::protocol::BranchDetail;
use crate::{Error, Result};

/// Every energy is in units of hbar = 1; times are inverse energies.
pub const UNITS: &str = "hbar=1";

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "non-finite float in report",
            ));
        }
        writer.write_all(fmt_float(value).as_bytes())
    }

    // serde_json lowers NaN and infinities to null before write_f64
    // ever runs. Every optional report field skips None, so the only
    // way a null reaches this formatter is a non-finite float.
    fn write_null<W>(&mut self, _writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "non-finite float in report",
        ))
    }
}

/// Serializes any report to compact JSON with deterministic float
/// formatting and a trailing newline.
pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    report
        .serialize(&mut ser)
        .map_err(|e| Error::numeric(format!("serialization failed: {e}")))?;
    let mut out = String::from_utf8(buf)
        .map_err(|e| Error::numeric(format!("serialization produced invalid utf-8: {e}")))?;
    out.push('\n');
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub units: String,
    pub params: ModelParams,
    pub theta: f64,
    pub wait_time: f64,
    pub e_injected: f64,
    pub e_after_operation: f64,
    pub e_extracted: f64,
    pub e_injected_over_k: f64,
    pub e_extracted_over_k: f64,
    pub wait_time_times_k: f64,
    pub branch_details: Vec<BranchDetail>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub units: String,
    pub params: ModelParams,
    pub theta_star: f64,
    pub e_b_max: f64,
    pub e_b_max_over_k: f64,
    pub harmonic_coeffs: HarmonicCoeffs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub t_times_k: f64,
    #[serde(rename = "energy_B")]
    pub energy_b: f64,
    pub energy_b_over_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveReport {
    pub units: String,
    pub params: ModelParams,
    pub n_samples: usize,
    pub samples: Vec<CurveSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub units: String,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub rows: Vec<SweepRow>,
    pub sup_estimate: SupEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub units: String,
    pub params: ModelParams,
    pub epsilon: f64,
    pub t_teleportation: f64,
    pub t_teleportation_times_k: f64,
    pub e_b_max: f64,
    pub e_b_max_over_k: f64,
    pub product_e_t: f64,
    pub paper_bound: f64,
    pub eq99_satisfied: bool,
    pub eq103_satisfied: bool,
    pub delta_t: f64,
    pub delta_e: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_cc: Option<f64>,
}

impl AuditReport {
    pub fn from_audit(params: ModelParams, audit: &UncertaintyAudit) -> Self {
        AuditReport {
            units: UNITS.to_string(),
            params,
            epsilon: audit.epsilon,
            t_teleportation: audit.t_teleportation,
            t_teleportation_times_k: audit.t_teleportation * params.k,
            e_b_max: audit.e_b_max,
            e_b_max_over_k: audit.e_b_max / params.k,
            product_e_t: audit.product_e_t,
            paper_bound: audit.paper_bound,
            eq99_satisfied: audit.eq99_satisfied,
            eq103_satisfied: audit.eq103_satisfied,
            delta_t: audit.delta_t,
            delta_e: audit.delta_e,
            e_cc: audit.e_cc,
        }
    }
}

/// One named structural check with its measured value and threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Passes when the measured value stays at or below the threshold.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        CheckRow {
            name: name.to_string(),
            value,
            threshold,
            pass: value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub units: String,
    pub params: ModelParams,
    pub checks: Vec<CheckRow>,
    pub all_structural_pass: bool,
    pub formula_rows: Vec<ConsistencyRow>,
}

pub fn curve_csv(report: &CurveReport) -> String {
    let mut out = String::from("t,energy_B\n");
    for s in &report.samples {
        out.push_str(&fmt_float(s.t));
        out.push(',');
        out.push_str(&fmt_float(s.energy_b));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(report: &SweepReport) -> String {
    let mut out = String::from("x,theta_star,eb_over_k\n");
    for r in &report.rows {
        out.push_str(&fmt_float(r.x));
        out.push(',');
        out.push_str(&fmt_float(r.theta_star));
        out.push(',');
        out.push_str(&fmt_float(r.e_b_over_k));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_round_trip_exact() {
        for v in [
            0.07257277587322123,
            -1.3416407864998738,
            1e-300,
            0.0,
            2.0,
            f64::MIN_POSITIVE,
        ] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
    }

    #[test]
    fn json_is_compact_with_trailing_newline() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let json = to_json(&params).unwrap();
        assert!(json.ends_with('\n'));
        assert!(!json.trim_end().contains('\n'));
        assert!(!json.contains(": "));
        assert!(json.contains("1.0000000000000000e0"));
    }

    #[test]
    fn non_finite_floats_refuse_to_serialize() {
        #[derive(Serialize)]
        struct Bad {
            x: f64,
        }
        assert!(matches!(
            to_json(&Bad { x: f64::NAN }),
            Err(Error::Numeric(_))
        ));
        assert!(matches!(
            to_json(&Bad {
                x: f64::INFINITY
            }),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn reports_round_trip_through_json() {
        let params = ModelParams::new(1.0, 2.0).unwrap();
        let report = OptimizeReport {
            units: UNITS.to_string(),
            params,
            theta_star: 0.25,
            e_b_max: 0.125,
            e_b_max_over_k: 0.0625,
            harmonic_coeffs: HarmonicCoeffs {
                gamma: -1.0,
                alpha: 1.0,
                beta: 0.5,
            },
        };
        let json = to_json(&report).unwrap();
        let back: OptimizeReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn optional_fields_are_omitted_not_null() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let audit = crate::analysis::uncertainty_audit(params, 1e-3, None).unwrap();
        let report = AuditReport::from_audit(params, &audit);
        let json = to_json(&report).unwrap();
        assert!(!json.contains("null"));
        assert!(!json.contains("e_cc"));
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let audit = crate::analysis::uncertainty_audit(params, 1e-3, Some(3.0)).unwrap();
        let report = AuditReport::from_audit(params, &audit);
        let json = to_json(&report).unwrap();
        assert!(json.contains("\"e_cc\":3.0000000000000000e0"));
        let back: AuditReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn csv_shapes_are_stable() {
        let params = ModelParams::new(1.0, 1.0).unwrap();
        let curve = CurveReport {
            units: UNITS.to_string(),
            params,
            n_samples: 2,
            samples: vec![
                CurveSample {
                    t: 0.0,
                    t_times_k: 0.0,
                    energy_b: 0.0,
                    energy_b_over_k: 0.0,
                },
                CurveSample {
                    t: 0.5,
                    t_times_k: 0.5,
                    energy_b: 0.25,
                    energy_b_over_k: 0.25,
                },
            ],
        };
        let csv = curve_csv(&curve);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,energy_B");
        assert_eq!(lines.len(), 3);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));

        let sweep = SweepReport {
            units: UNITS.to_string(),
            x_min: 0.5,
            x_max: 2.0,
            n: 1,
            rows: vec![SweepRow {
                x: 1.0,
                theta_star: 0.16,
                e_b_over_k: 0.07,
            }],
            sup_estimate: SupEstimate {
                x_at_max: 1.0,
                value: 0.07,
            },
        };
        let csv = sweep_csv(&sweep);
        assert!(csv.starts_with("x,theta_star,eb_over_k\n"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn check_row_threshold_semantics() {
        assert!(CheckRow::at_most("a", 1e-13, 1e-12).pass);
        assert!(CheckRow::at_most("b", 1e-12, 1e-12).pass);
        assert!(!CheckRow::at_most("c", 2e-12, 1e-12).pass);
    }

    #[test]
    fn energy_field_keeps_capital_b_name() {
        let sample = CurveSample {
            t: 1.0,
            t_times_k: 1.0,
            energy_b: 0.5,
            energy_b_over_k: 0.5,
        };
        let json = to_json(&sample).unwrap();
        assert!(json.contains("\"energy_B\""));
    }
}
