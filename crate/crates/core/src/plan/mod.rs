//! Response plans as binary action vectors.

mod extract;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use extract::{extract_binary_plan, render_bits, ExtractError};

/// A fixed-length 0/1 vector over the action catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryPlan {
    bits: Vec<u8>,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_text: Option<String>,
}

impl BinaryPlan {
    /// Fails when any element is not 0 or 1, or when `bits` is empty.
    pub fn new(bits: Vec<u8>, source: impl Into<String>) -> Result<Self, PlanError> {
        if bits.is_empty() {
            return Err(PlanError::EmptyPlan);
        }
        if let Some(pos) = bits.iter().position(|b| *b > 1) {
            return Err(PlanError::NonBinary {
                index: pos,
                value: bits[pos],
            });
        }
        Ok(BinaryPlan {
            bits,
            source: source.into(),
            raw_text: None,
        })
    }

    /// Like [`BinaryPlan::new`] but also checks the length.
    pub fn with_len(bits: Vec<u8>, n: usize, source: impl Into<String>) -> Result<Self, PlanError> {
        if bits.len() != n {
            return Err(PlanError::DimensionMismatch {
                expected: n,
                found: bits.len(),
            });
        }
        Self::new(bits, source)
    }

    pub fn zeros(n: usize, source: impl Into<String>) -> Self {
        BinaryPlan {
            bits: alloc::vec![0; n.max(1)],
            source: source.into(),
            raw_text: None,
        }
    }

    pub fn with_raw_text(mut self, text: impl Into<String>) -> Self {
        self.raw_text = Some(text.into());
        self
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_included(&self, index: usize) -> bool {
        self.bits.get(index) == Some(&1)
    }

    /// Flips one bit; used by what-if editing.
    pub fn toggle(&mut self, index: usize) -> Result<(), PlanError> {
        let len = self.bits.len();
        let bit = self
            .bits
            .get_mut(index)
            .ok_or(PlanError::DimensionMismatch {
                expected: len,
                found: index + 1,
            })?;
        *bit ^= 1;
        Ok(())
    }
}

impl fmt::Display for BinaryPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_bits(&self.bits))
    }
}

/// Action label to weight, in catalog order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightTable {
    entries: Vec<(String, f64)>,
}

impl WeightTable {
    pub fn new(entries: Vec<(String, f64)>) -> Self {
        WeightTable { entries }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn weights(&self) -> Vec<f64> {
        self.entries.iter().map(|(_, w)| *w).collect()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(l, _)| l.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, w)| *w)
    }

    /// All weights must be finite and nonnegative.
    pub fn validate(&self) -> Result<(), PlanError> {
        match self
            .entries
            .iter()
            .find(|(_, w)| !w.is_finite() || *w < 0.0)
        {
            Some((label, _)) => Err(PlanError::InvalidWeight(label.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanError {
    EmptyPlan,
    NonBinary { index: usize, value: u8 },
    DimensionMismatch { expected: usize, found: usize },
    InvalidWeight(String),
    MissingManual(String),
    UnknownColumn(String),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::EmptyPlan => f.write_str("plan has no actions"),
            PlanError::NonBinary { index, value } => {
                write!(f, "element {index} is {value}, expected 0 or 1")
            }
            PlanError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            PlanError::InvalidWeight(label) => {
                write!(f, "weight of {label:?} must be finite and nonnegative")
            }
            PlanError::MissingManual(incident) => {
                write!(f, "incident {incident} has no manual score")
            }
            PlanError::UnknownColumn(name) => write!(f, "no score column named {name:?}"),
        }
    }
}

/// `sum_i w_i * a_i`.
pub fn score_plan(plan: &BinaryPlan, weights: &WeightTable) -> Result<f64, PlanError> {
    Ok(score_breakdown(plan, weights)?.score)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionContribution {
    pub index: usize,
    pub name: String,
    pub weight: f64,
    pub included: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub score: f64,
    pub per_action: Vec<ActionContribution>,
}

/// The score together with each action's weight and inclusion flag.
pub fn score_breakdown(
    plan: &BinaryPlan,
    weights: &WeightTable,
) -> Result<ScoreBreakdown, PlanError> {
    if plan.len() != weights.len() {
        return Err(PlanError::DimensionMismatch {
            expected: weights.len(),
            found: plan.len(),
        });
    }
    weights.validate()?;
    let per_action: Vec<ActionContribution> = weights
        .entries()
        .iter()
        .enumerate()
        .map(|(index, (name, weight))| ActionContribution {
            index,
            name: name.clone(),
            weight: *weight,
            included: plan.is_included(index),
        })
        .collect();
    let score = per_action
        .iter()
        .filter(|a| a.included)
        .map(|a| a.weight)
        .sum();
    Ok(ScoreBreakdown { score, per_action })
}

/// Per-incident plan scores, one column per model plus a manual column.
/// A missing value is `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTable {
    pub columns: Vec<String>,
    pub manual_column: String,
    pub rows: Vec<ScoreRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub incident_id: String,
    pub scores: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidentScores {
    pub incident_id: String,
    pub models: Vec<(String, Option<f64>)>,
    pub manual: f64,
}

/// Model scores per incident and the mean absolute gap to the manual plan.
/// Column order follows the input; the manual column reports 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub manual_label: String,
    pub per_incident: Vec<IncidentScores>,
    pub average_difference: Vec<(String, f64)>,
}

impl ScoreReport {
    pub fn average_for(&self, label: &str) -> Option<f64> {
        self.average_difference
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, d)| *d)
    }
}

/// For every model column, the mean of `|score - manual|` over the incidents
/// where the model has a score.
pub fn compare_to_manual(table: &ScoreTable) -> Result<ScoreReport, PlanError> {
    let manual_idx = table
        .columns
        .iter()
        .position(|c| *c == table.manual_column)
        .ok_or_else(|| PlanError::UnknownColumn(table.manual_column.clone()))?;

    let mut per_incident = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        if row.scores.len() != table.columns.len() {
            return Err(PlanError::DimensionMismatch {
                expected: table.columns.len(),
                found: row.scores.len(),
            });
        }
        let manual = row.scores[manual_idx]
            .ok_or_else(|| PlanError::MissingManual(row.incident_id.clone()))?;
        let models = table
            .columns
            .iter()
            .zip(&row.scores)
            .enumerate()
            .filter(|(i, _)| *i != manual_idx)
            .map(|(_, (label, score))| (label.clone(), *score))
            .collect();
        per_incident.push(IncidentScores {
            incident_id: row.incident_id.clone(),
            models,
            manual,
        });
    }

    let average_difference = table
        .columns
        .iter()
        .enumerate()
        .map(|(col, label)| {
            if col == manual_idx {
                return (label.clone(), 0.0);
            }
            let (sum, count) = table.rows.iter().fold((0.0, 0usize), |(sum, count), row| {
                match (row.scores[col], row.scores[manual_idx]) {
                    (Some(s), Some(m)) => (sum + (s - m).abs(), count + 1),
                    _ => (sum, count),
                }
            });
            let mean = if count == 0 { 0.0 } else { sum / count as f64 };
            (label.clone(), mean)
        })
        .collect();

    Ok(ScoreReport {
        manual_label: table.manual_column.clone(),
        per_incident,
        average_difference,
    })
}

/// Builds a score table from scored plans. Each plan's `source` names its
/// column; columns keep first-seen order and the manual column goes last.
pub fn score_table_from_plans(
    plans: &[(String, BinaryPlan)],
    weights: &WeightTable,
    manual_label: &str,
) -> Result<ScoreTable, PlanError> {
    let mut columns: Vec<String> = Vec::new();
    let mut incidents: Vec<String> = Vec::new();
    for (incident, plan) in plans {
        if plan.source != manual_label && !columns.contains(&plan.source) {
            columns.push(plan.source.clone());
        }
        if !incidents.contains(incident) {
            incidents.push(incident.clone());
        }
    }
    columns.push(manual_label.to_string());

    let mut rows: Vec<ScoreRow> = incidents
        .iter()
        .map(|id| ScoreRow {
            incident_id: id.clone(),
            scores: alloc::vec![None; columns.len()],
        })
        .collect();
    for (incident, plan) in plans {
        let score = score_plan(plan, weights)?;
        let row = incidents
            .iter()
            .position(|i| i == incident)
            .expect("incident collected above");
        let col = columns
            .iter()
            .position(|c| *c == plan.source)
            .expect("column collected above");
        rows[row].scores[col] = Some(score);
    }
    Ok(ScoreTable {
        columns,
        manual_column: manual_label.to_string(),
        rows,
    })
}

/// Two-decimal rendering used in reports.
pub fn format_score(value: f64) -> String {
    format!("{value:.2}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::canonical_catalog;
    use crate::topsis::{default_criteria, derive_action_weights, DecisionMatrix};
    use alloc::vec;

    fn topsis_weights() -> WeightTable {
        derive_action_weights(&DecisionMatrix::from_catalog(
            &canonical_catalog(),
            default_criteria(),
        ))
        .unwrap()
    }

    fn plan(bits: &[u8]) -> BinaryPlan {
        BinaryPlan::new(bits.to_vec(), "test").unwrap()
    }

    #[test]
    fn plan_invariants() {
        assert_eq!(
            BinaryPlan::new(vec![], "x").unwrap_err(),
            PlanError::EmptyPlan
        );
        assert_eq!(
            BinaryPlan::new(vec![1, 2], "x").unwrap_err(),
            PlanError::NonBinary { index: 1, value: 2 }
        );
        assert!(BinaryPlan::with_len(vec![1, 0], 3, "x").is_err());
    }

    #[test]
    fn toggle_is_an_involution() {
        let mut p = plan(&[0, 1, 0]);
        p.toggle(0).unwrap();
        assert_eq!(p.bits(), &[1, 1, 0]);
        p.toggle(0).unwrap();
        assert_eq!(p.bits(), &[0, 1, 0]);
        assert!(p.toggle(3).is_err());
    }

    #[test]
    fn score_spot_checks() {
        let w = topsis_weights();
        let s = score_plan(&plan(&[1, 1, 1, 1, 1, 1, 1, 1, 0, 1]), &w).unwrap();
        assert!((s - 4.966881).abs() < 1e-6);
        let s = score_plan(&plan(&[1; 10]), &w).unwrap();
        assert!((s - 5.158015).abs() < 1e-6);
        assert_eq!(score_plan(&plan(&[0; 10]), &w).unwrap(), 0.0);
    }

    #[test]
    fn score_dimension_mismatch() {
        let w = topsis_weights();
        assert!(matches!(
            score_plan(&plan(&[1, 0]), &w),
            Err(PlanError::DimensionMismatch {
                expected: 10,
                found: 2
            })
        ));
        let bad = WeightTable::new(vec![("a".into(), -1.0)]);
        assert!(matches!(
            score_plan(&plan(&[1]), &bad),
            Err(PlanError::InvalidWeight(_))
        ));
    }

    #[test]
    fn example_weight_fixture_sums() {
        let w = WeightTable::new(
            [
                0.787, 0.579, 0.432, 0.322, 0.369, 0.251, 0.162, 0.095, 0.042, 1.000,
            ]
            .iter()
            .enumerate()
            .map(|(i, w)| (canonical_catalog()[i].name.clone(), *w))
            .collect(),
        );
        let manual = score_plan(&plan(&[1, 1, 1, 1, 1, 1, 1, 1, 1, 0]), &w).unwrap();
        assert!((manual - 3.039).abs() < 1e-9);
    }

    #[test]
    fn breakdown_lists_every_action() {
        let w = topsis_weights();
        let b = score_breakdown(&plan(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0]), &w).unwrap();
        assert_eq!(b.per_action.len(), 10);
        assert!(b.per_action[0].included && !b.per_action[1].included);
        assert_eq!(b.per_action[0].name, "Deploy IRV");
        assert_eq!(b.score, b.per_action[0].weight);
    }

    fn table(cols: &[&str], manual: &str, rows: &[(&str, &[Option<f64>])]) -> ScoreTable {
        ScoreTable {
            columns: cols.iter().map(|c| c.to_string()).collect(),
            manual_column: manual.into(),
            rows: rows
                .iter()
                .map(|(id, s)| ScoreRow {
                    incident_id: id.to_string(),
                    scores: s.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn compare_arithmetic_mean() {
        let t = table(
            &["m", "manual"],
            "manual",
            &[
                ("a", &[Some(2.0), Some(1.0)]),
                ("b", &[Some(0.0), Some(3.0)]),
            ],
        );
        let r = compare_to_manual(&t).unwrap();
        assert_eq!(r.average_for("m"), Some(2.0));
        assert_eq!(r.average_for("manual"), Some(0.0));
        assert_eq!(r.per_incident[1].manual, 3.0);
    }

    #[test]
    fn compare_self_is_zero() {
        let t = table(
            &["copy", "manual"],
            "manual",
            &[
                ("a", &[Some(2.5), Some(2.5)]),
                ("b", &[Some(1.0), Some(1.0)]),
            ],
        );
        assert_eq!(
            compare_to_manual(&t).unwrap().average_for("copy"),
            Some(0.0)
        );
    }

    #[test]
    fn compare_requires_manual() {
        let t = table(&["m", "manual"], "manual", &[("a", &[Some(2.0), None])]);
        assert_eq!(
            compare_to_manual(&t).unwrap_err(),
            PlanError::MissingManual("a".into())
        );
        let t = table(&["m"], "manual", &[("a", &[Some(2.0)])]);
        assert!(matches!(
            compare_to_manual(&t),
            Err(PlanError::UnknownColumn(_))
        ));
    }

    #[test]
    fn table_from_plans_keeps_order() {
        let w = WeightTable::new(vec![("a".into(), 1.0), ("b".into(), 2.0)]);
        let mut p1 = plan(&[1, 1]);
        p1.source = "gpt".into();
        let mut p2 = plan(&[0, 1]);
        p2.source = "manual".into();
        let mut p3 = plan(&[1, 0]);
        p3.source = "gemini".into();
        let plans = vec![
            ("X".to_string(), p1),
            ("X".to_string(), p2),
            ("X".to_string(), p3),
        ];
        let t = score_table_from_plans(&plans, &w, "manual").unwrap();
        assert_eq!(t.columns, vec!["gpt", "gemini", "manual"]);
        assert_eq!(t.rows[0].scores, vec![Some(3.0), Some(1.0), Some(2.0)]);
    }
}
