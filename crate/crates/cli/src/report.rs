//! Machine-readable reports: a schema-versioned JSON object per scenario
//! kind, and a tabular CSV projection of the same numbers.
//!
//! CSV prints floats with 12 significant digits; JSON keeps serde_json's
//! shortest-round-trip encoding so a re-parsed report compares equal to the
//! in-memory one.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema_version: u32,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Payload {
    Entropy {
        state: String,
        rows: Vec<EntropyRow>,
    },
    Correlations {
        state: String,
        subset_entropies: Vec<QuantityRow>,
        derived: Vec<QuantityRow>,
        /// Result of the explicit block query, when one was given.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        block_correlation: Option<f64>,
    },
    Evolve {
        acts_on: Vec<String>,
        columns: Vec<String>,
        rows: Vec<EvolveRow>,
        invariant_drift: Vec<QuantityRow>,
        max_invariant_drift: f64,
    },
    Invariants {
        trials: usize,
        seed: u64,
        invariant_subsets: Vec<String>,
        entropy_drift: Vec<QuantityRow>,
        correlation_drift: Vec<QuantityRow>,
        max_invariant_drift: f64,
        holds: bool,
    },
    Swap {
        a_sq: f64,
        c_sq: f64,
        i12: f64,
        i34: f64,
        eps1: f64,
        eps3: f64,
        eps1_m: f64,
        expected_i14: f64,
        outcomes: Vec<SwapRow>,
        holds_all_outcomes: bool,
        psi_branches_hold: bool,
        mean_holds: bool,
    },
    Jcm {
        t1: f64,
        t2: f64,
        coupling: f64,
        fock_cutoff: usize,
        stages: Vec<JcmRow>,
        identity_max_residual: f64,
        s_a1_drift: f64,
        excitation_drift: f64,
        final_s_f: f64,
        final_i_a1_a2: f64,
    },
    Sweep {
        rows: Vec<SweepRow>,
        points: usize,
        per_outcome_violations: usize,
        psi_branch_violations: usize,
        mean_violations: usize,
        bias_failures: usize,
    },
    Selftest {
        criteria: Vec<CriterionRow>,
        all_passed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyRow {
    pub subset: String,
    pub entropy_nats: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantityRow {
    pub quantity: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveRow {
    pub time: f64,
    /// Values in the order of the payload's `columns`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwapRow {
    pub outcome: String,
    pub probability: f64,
    pub rho1_p0: f64,
    pub rho1_p1: f64,
    pub bias: f64,
    pub i14: f64,
    pub holds: bool,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcmRow {
    pub stage: String,
    pub time: f64,
    pub s_a1: f64,
    pub s_f: f64,
    pub s_a2: f64,
    pub s_total: f64,
    pub i_a1_f: f64,
    pub i_f_a2: f64,
    pub i_a1_a2: f64,
    pub e_a2_rest: f64,
    pub e_a1_rest: f64,
    pub excitation: f64,
    pub top_fock: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub a_sq: f64,
    pub c_sq: f64,
    pub i12: f64,
    pub i34: f64,
    pub i14_psi_plus: f64,
    pub i14_psi_minus: f64,
    pub i14_phi_plus: f64,
    pub i14_phi_minus: f64,
    pub expected_i14: f64,
    pub eps1_m: f64,
    pub eps3: f64,
    pub holds_all_outcomes: bool,
    pub psi_branches_hold: bool,
    pub mean_holds: bool,
    pub ordering_assumptions: bool,
    pub bias_increases: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionRow {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// A float with 12 significant digits, `.` decimal separator.
pub fn format_f64(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    format!("{value:.11e}")
}

fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

impl Report {
    pub fn new(kind: &str, seed: Option<u64>, payload: Payload) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            kind: kind.to_string(),
            seed,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Validation(format!("report serialization: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    /// CSV projection: a header row of quantity names, then one row per
    /// subset, time, outcome, grid point, stage, or criterion.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let write_record =
            |writer: &mut csv::Writer<Vec<u8>>, fields: &[String]| -> Result<(), CliError> {
                writer
                    .write_record(fields)
                    .map_err(|e| CliError::Validation(format!("csv: {e}")))
            };

        match &self.payload {
            Payload::Entropy { rows, .. } => {
                write_record(&mut writer, &["subset".into(), "entropy_nats".into()])?;
                for row in rows {
                    write_record(
                        &mut writer,
                        &[row.subset.clone(), format_f64(row.entropy_nats)],
                    )?;
                }
            }
            Payload::Correlations {
                subset_entropies,
                derived,
                block_correlation,
                ..
            } => {
                write_record(&mut writer, &["quantity".into(), "value_nats".into()])?;
                for row in subset_entropies {
                    write_record(
                        &mut writer,
                        &[format!("S_{}", row.quantity), format_f64(row.value)],
                    )?;
                }
                for row in derived {
                    write_record(&mut writer, &[row.quantity.clone(), format_f64(row.value)])?;
                }
                if let Some(value) = block_correlation {
                    write_record(&mut writer, &["I_blocks".into(), format_f64(*value)])?;
                }
            }
            Payload::Evolve { columns, rows, .. } => {
                let mut header = vec!["time".to_string()];
                header.extend(columns.iter().cloned());
                write_record(&mut writer, &header)?;
                for row in rows {
                    let mut record = vec![format_f64(row.time)];
                    record.extend(row.values.iter().map(|v| format_f64(*v)));
                    write_record(&mut writer, &record)?;
                }
            }
            Payload::Invariants {
                entropy_drift,
                correlation_drift,
                invariant_subsets,
                ..
            } => {
                write_record(
                    &mut writer,
                    &["quantity".into(), "max_drift".into(), "invariant".into()],
                )?;
                for row in entropy_drift {
                    let invariant = invariant_subsets.contains(&row.quantity);
                    write_record(
                        &mut writer,
                        &[
                            format!("S_{}", row.quantity),
                            format_f64(row.value),
                            bool_str(invariant).into(),
                        ],
                    )?;
                }
                for row in correlation_drift {
                    write_record(
                        &mut writer,
                        &[row.quantity.clone(), format_f64(row.value), "true".into()],
                    )?;
                }
            }
            Payload::Swap {
                i12, i34, outcomes, ..
            } => {
                write_record(
                    &mut writer,
                    &[
                        "outcome".into(),
                        "probability".into(),
                        "rho1_p0".into(),
                        "rho1_p1".into(),
                        "bias".into(),
                        "i14".into(),
                        "i12".into(),
                        "i34".into(),
                        "holds".into(),
                    ],
                )?;
                for row in outcomes {
                    write_record(
                        &mut writer,
                        &[
                            row.outcome.clone(),
                            format_f64(row.probability),
                            format_f64(row.rho1_p0),
                            format_f64(row.rho1_p1),
                            format_f64(row.bias),
                            format_f64(row.i14),
                            format_f64(*i12),
                            format_f64(*i34),
                            bool_str(row.holds).into(),
                        ],
                    )?;
                }
            }
            Payload::Jcm { stages, .. } => {
                write_record(
                    &mut writer,
                    &[
                        "stage".into(),
                        "time".into(),
                        "S_A1".into(),
                        "S_F".into(),
                        "S_A2".into(),
                        "S_total".into(),
                        "I_A1F".into(),
                        "I_FA2".into(),
                        "I_A1A2".into(),
                        "E_A2rest".into(),
                        "E_A1rest".into(),
                        "excitation".into(),
                        "top_fock".into(),
                    ],
                )?;
                for row in stages {
                    write_record(
                        &mut writer,
                        &[
                            row.stage.clone(),
                            format_f64(row.time),
                            format_f64(row.s_a1),
                            format_f64(row.s_f),
                            format_f64(row.s_a2),
                            format_f64(row.s_total),
                            format_f64(row.i_a1_f),
                            format_f64(row.i_f_a2),
                            format_f64(row.i_a1_a2),
                            format_f64(row.e_a2_rest),
                            format_f64(row.e_a1_rest),
                            format_f64(row.excitation),
                            format_f64(row.top_fock),
                        ],
                    )?;
                }
            }
            Payload::Sweep { rows, .. } => {
                write_record(
                    &mut writer,
                    &[
                        "a_sq".into(),
                        "c_sq".into(),
                        "i12".into(),
                        "i34".into(),
                        "i14_psi_plus".into(),
                        "i14_psi_minus".into(),
                        "i14_phi_plus".into(),
                        "i14_phi_minus".into(),
                        "expected_i14".into(),
                        "eps1_m".into(),
                        "eps3".into(),
                        "holds_all_outcomes".into(),
                        "psi_branches_hold".into(),
                        "mean_holds".into(),
                        "ordering_assumptions".into(),
                        "bias_increases".into(),
                    ],
                )?;
                for row in rows {
                    write_record(
                        &mut writer,
                        &[
                            format_f64(row.a_sq),
                            format_f64(row.c_sq),
                            format_f64(row.i12),
                            format_f64(row.i34),
                            format_f64(row.i14_psi_plus),
                            format_f64(row.i14_psi_minus),
                            format_f64(row.i14_phi_plus),
                            format_f64(row.i14_phi_minus),
                            format_f64(row.expected_i14),
                            format_f64(row.eps1_m),
                            format_f64(row.eps3),
                            bool_str(row.holds_all_outcomes).into(),
                            bool_str(row.psi_branches_hold).into(),
                            bool_str(row.mean_holds).into(),
                            bool_str(row.ordering_assumptions).into(),
                            bool_str(row.bias_increases).into(),
                        ],
                    )?;
                }
            }
            Payload::Selftest { criteria, .. } => {
                write_record(
                    &mut writer,
                    &[
                        "criterion".into(),
                        "name".into(),
                        "passed".into(),
                        "detail".into(),
                    ],
                )?;
                for row in criteria {
                    write_record(
                        &mut writer,
                        &[
                            row.id.to_string(),
                            row.name.clone(),
                            bool_str(row.passed).into(),
                            row.detail.clone(),
                        ],
                    )?;
                }
            }
        }

        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Validation(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Validation(format!("csv: {e}")))
    }

    pub fn render(&self, format: crate::scenario::Format) -> Result<String, CliError> {
        match format {
            crate::scenario::Format::Csv => self.to_csv(),
            crate::scenario::Format::Json => self.to_json(),
        }
    }

    pub fn write_to(
        &self,
        format: crate::scenario::Format,
        mut destination: impl Write,
    ) -> Result<(), CliError> {
        let text = self.render(format)?;
        destination.write_all(text.as_bytes()).map_err(CliError::Io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_12_significant_digits() {
        assert_eq!(format_f64(0.0), "0");
        assert_eq!(format_f64(0.34375), "3.43750000000e-1");
        assert_eq!(format_f64(2.0_f64.ln()), "6.93147180560e-1");
        assert_eq!(format_f64(-1.5), "-1.50000000000e0");
    }

    #[test]
    fn json_round_trip_is_exact() {
        let report = Report::new(
            "entropy",
            None,
            Payload::Entropy {
                state: "bell".into(),
                rows: vec![EntropyRow {
                    subset: "1".into(),
                    entropy_nats: 2.0_f64.ln(),
                }],
            },
        );
        let text = report.to_json().unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn empty_rows_give_header_only_csv() {
        let report = Report::new(
            "evolve",
            Some(1),
            Payload::Evolve {
                acts_on: vec!["2".into(), "3".into()],
                columns: vec!["S_1".into()],
                rows: vec![],
                invariant_drift: vec![],
                max_invariant_drift: 0.0,
            },
        );
        let csv = report.to_csv().unwrap();
        assert_eq!(csv.lines().count(), 1);
        assert!(csv.starts_with("time,S_1"));
    }
}
