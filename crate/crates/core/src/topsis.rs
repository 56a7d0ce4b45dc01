//! TOPSIS over a decision matrix of alternatives by criteria.
//!
//! The pipeline is vector normalization, weighting, ideal and negative-ideal
//! solutions, Euclidean separations and relative closeness. Each step is a
//! public function so intermediate tables can be reported; [`run`] composes
//! them and [`derive_action_weights`] turns the closeness column into a
//! [`WeightTable`].

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::catalog::CatalogAction;
use crate::plan::WeightTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CriterionKind {
    #[default]
    Benefit,
    Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSpec {
    pub name: String,
    pub weight: f64,
    #[serde(default)]
    pub kind: CriterionKind,
}

impl CriterionSpec {
    pub fn benefit(name: &str, weight: f64) -> Self {
        CriterionSpec {
            name: name.into(),
            weight,
            kind: CriterionKind::Benefit,
        }
    }

    pub fn cost(name: &str, weight: f64) -> Self {
        CriterionSpec {
            name: name.into(),
            weight,
            kind: CriterionKind::Cost,
        }
    }
}

/// Impact 0.7 and Resource Engagement 0.3, both maximized.
pub fn default_criteria() -> Vec<CriterionSpec> {
    vec![
        CriterionSpec::benefit("Impact", 0.7),
        CriterionSpec::benefit("Resource Engagement", 0.3),
    ]
}

/// Alternatives (rows) scored against criteria (columns).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrix {
    pub alternatives: Vec<String>,
    pub criteria: Vec<CriterionSpec>,
    pub values: Vec<Vec<f64>>,
}

impl DecisionMatrix {
    /// The catalog as an Impact / Resource Engagement matrix.
    pub fn from_catalog(catalog: &[CatalogAction], criteria: Vec<CriterionSpec>) -> Self {
        DecisionMatrix {
            alternatives: catalog.iter().map(|a| a.name.clone()).collect(),
            criteria,
            values: catalog
                .iter()
                .map(|a| vec![a.impact, a.resource_engagement])
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.values.len()
    }

    pub fn cols(&self) -> usize {
        self.criteria.len()
    }

    pub fn validate(&self) -> Result<(), TopsisError> {
        let (m, n) = (self.rows(), self.cols());
        if m == 0 || n == 0 {
            return Err(TopsisError::Empty);
        }
        if self.alternatives.len() != m {
            return Err(TopsisError::DimensionMismatch {
                expected: m,
                found: self.alternatives.len(),
            });
        }
        for row in &self.values {
            if row.len() != n {
                return Err(TopsisError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(TopsisError::InvalidValue);
            }
        }
        weight_factors(&self.criteria)?;
        Ok(())
    }
}

/// Every intermediate table of one TOPSIS evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopsisResult {
    pub normalized: Vec<Vec<f64>>,
    pub weighted: Vec<Vec<f64>>,
    pub a_plus: Vec<f64>,
    pub a_minus: Vec<f64>,
    pub s_plus: Vec<f64>,
    pub s_minus: Vec<f64>,
    pub closeness: Vec<f64>,
    /// 1-based; rank 1 has the largest closeness.
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopsisError {
    Empty,
    ZeroColumn(usize),
    DimensionMismatch { expected: usize, found: usize },
    InvalidValue,
    InvalidWeights,
}

impl fmt::Display for TopsisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopsisError::Empty => {
                f.write_str("decision matrix needs at least one alternative and one criterion")
            }
            TopsisError::ZeroColumn(j) => write!(f, "criterion column {j} is all zeros"),
            TopsisError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            TopsisError::InvalidValue => {
                f.write_str("decision matrix entries must be finite and nonnegative")
            }
            TopsisError::InvalidWeights => f.write_str(
                "criterion weights must be finite, nonnegative and sum to a positive value",
            ),
        }
    }
}

/// Criterion weights rescaled to sum 1.
pub fn weight_factors(criteria: &[CriterionSpec]) -> Result<Vec<f64>, TopsisError> {
    if criteria
        .iter()
        .any(|c| !c.weight.is_finite() || c.weight < 0.0)
    {
        return Err(TopsisError::InvalidWeights);
    }
    let total: f64 = criteria.iter().map(|c| c.weight).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(TopsisError::InvalidWeights);
    }
    Ok(criteria.iter().map(|c| c.weight / total).collect())
}

/// `r_ij = x_ij / sqrt(sum_k x_kj^2)`.
pub fn normalize(matrix: &DecisionMatrix) -> Result<Vec<Vec<f64>>, TopsisError> {
    matrix.validate()?;
    let n = matrix.cols();
    let mut norms = vec![0.0f64; n];
    for row in &matrix.values {
        for (acc, x) in norms.iter_mut().zip(row) {
            *acc += x * x;
        }
    }
    for (j, acc) in norms.iter_mut().enumerate() {
        if *acc == 0.0 {
            return Err(TopsisError::ZeroColumn(j));
        }
        *acc = libm::sqrt(*acc);
    }
    Ok(matrix
        .values
        .iter()
        .map(|row| row.iter().zip(&norms).map(|(x, norm)| x / norm).collect())
        .collect())
}

/// `v_ij = r_ij * w_j` with weights renormalized to sum 1.
pub fn apply_weights(
    normalized: &[Vec<f64>],
    criteria: &[CriterionSpec],
) -> Result<Vec<Vec<f64>>, TopsisError> {
    let weights = weight_factors(criteria)?;
    normalized
        .iter()
        .map(|row| {
            if row.len() != weights.len() {
                return Err(TopsisError::DimensionMismatch {
                    expected: weights.len(),
                    found: row.len(),
                });
            }
            Ok(row.iter().zip(&weights).map(|(r, w)| r * w).collect())
        })
        .collect()
}

/// Positive and negative ideal solutions, column by column.
pub fn ideal_solutions(
    weighted: &[Vec<f64>],
    criteria: &[CriterionSpec],
) -> Result<(Vec<f64>, Vec<f64>), TopsisError> {
    if weighted.is_empty() {
        return Err(TopsisError::Empty);
    }
    let n = criteria.len();
    let mut best = Vec::with_capacity(n);
    let mut worst = Vec::with_capacity(n);
    for (j, criterion) in criteria.iter().enumerate() {
        let mut max = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for row in weighted {
            let v = *row.get(j).ok_or(TopsisError::DimensionMismatch {
                expected: n,
                found: row.len(),
            })?;
            max = max.max(v);
            min = min.min(v);
        }
        match criterion.kind {
            CriterionKind::Benefit => {
                best.push(max);
                worst.push(min);
            }
            CriterionKind::Cost => {
                best.push(min);
                worst.push(max);
            }
        }
    }
    Ok((best, worst))
}

fn distance(row: &[f64], target: &[f64]) -> f64 {
    libm::sqrt(row.iter().zip(target).map(|(v, t)| (v - t) * (v - t)).sum())
}

/// Euclidean distance of each row from the positive and negative ideals.
pub fn separations(
    weighted: &[Vec<f64>],
    a_plus: &[f64],
    a_minus: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), TopsisError> {
    if a_plus.len() != a_minus.len() {
        return Err(TopsisError::DimensionMismatch {
            expected: a_plus.len(),
            found: a_minus.len(),
        });
    }
    let mut s_plus = Vec::with_capacity(weighted.len());
    let mut s_minus = Vec::with_capacity(weighted.len());
    for row in weighted {
        if row.len() != a_plus.len() {
            return Err(TopsisError::DimensionMismatch {
                expected: a_plus.len(),
                found: row.len(),
            });
        }
        s_plus.push(distance(row, a_plus));
        s_minus.push(distance(row, a_minus));
    }
    Ok((s_plus, s_minus))
}

/// `C* = S- / (S+ + S-)`, with C* = 1 when both separations vanish.
/// Ranks are 1-based, descending by closeness, ties going to the lower row.
pub fn closeness(s_plus: &[f64], s_minus: &[f64]) -> Result<(Vec<f64>, Vec<usize>), TopsisError> {
    if s_plus.len() != s_minus.len() {
        return Err(TopsisError::DimensionMismatch {
            expected: s_plus.len(),
            found: s_minus.len(),
        });
    }
    let scores: Vec<f64> = s_plus
        .iter()
        .zip(s_minus)
        .map(|(p, m)| {
            let total = p + m;
            if total == 0.0 {
                1.0
            } else {
                m / total
            }
        })
        .collect();
    let ranks = rank_descending(&scores);
    Ok((scores, ranks))
}

/// 1-based ranks, largest value first, stable on ties.
pub fn rank_descending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let mut ranks = vec![0; values.len()];
    for (position, &row) in order.iter().enumerate() {
        ranks[row] = position + 1;
    }
    ranks
}

/// Runs all six steps and keeps the intermediate tables.
pub fn run(matrix: &DecisionMatrix) -> Result<TopsisResult, TopsisError> {
    let normalized = normalize(matrix)?;
    let weighted = apply_weights(&normalized, &matrix.criteria)?;
    let (a_plus, a_minus) = ideal_solutions(&weighted, &matrix.criteria)?;
    let (s_plus, s_minus) = separations(&weighted, &a_plus, &a_minus)?;
    let (closeness, ranks) = closeness(&s_plus, &s_minus)?;
    Ok(TopsisResult {
        normalized,
        weighted,
        a_plus,
        a_minus,
        s_plus,
        s_minus,
        closeness,
        ranks,
    })
}

/// Per-alternative weights: each alternative's closeness coefficient.
pub fn derive_action_weights(matrix: &DecisionMatrix) -> Result<WeightTable, TopsisError> {
    let result = run(matrix)?;
    Ok(WeightTable::new(
        matrix
            .alternatives
            .iter()
            .cloned()
            .zip(result.closeness)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::canonical_catalog;
    use alloc::string::ToString;

    fn reference_matrix() -> DecisionMatrix {
        DecisionMatrix::from_catalog(&canonical_catalog(), default_criteria())
    }

    fn single_column(values: &[f64]) -> DecisionMatrix {
        DecisionMatrix {
            alternatives: (0..values.len()).map(|i| i.to_string()).collect(),
            criteria: vec![CriterionSpec::benefit("c", 1.0)],
            values: values.iter().map(|v| vec![*v]).collect(),
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn normalize_examples() {
        let r = normalize(&reference_matrix()).unwrap();
        assert!(close(r[0][0], 9.0 / libm::sqrt(385.0), 1e-15));
        assert!(close(r[0][0], 0.4587, 1e-4));
        let r = normalize(&single_column(&[3.0, 4.0])).unwrap();
        assert!(close(r[0][0], 0.6, 1e-15) && close(r[1][0], 0.8, 1e-15));
        let r = normalize(&single_column(&[5.0, 5.0])).unwrap();
        assert!(
            close(r[0][0], core::f64::consts::FRAC_1_SQRT_2, 1e-4)
                && close(r[1][0], core::f64::consts::FRAC_1_SQRT_2, 1e-4)
        );
    }

    #[test]
    fn normalized_columns_have_unit_norm() {
        let r = normalize(&reference_matrix()).unwrap();
        for j in 0..2 {
            let norm: f64 = r.iter().map(|row| row[j] * row[j]).sum();
            assert!(close(norm, 1.0, 1e-12));
        }
    }

    #[test]
    fn zero_column_is_rejected() {
        let m = single_column(&[0.0, 0.0]);
        assert_eq!(normalize(&m).unwrap_err(), TopsisError::ZeroColumn(0));
        assert_eq!(
            derive_action_weights(&m).unwrap_err(),
            TopsisError::ZeroColumn(0)
        );
    }

    #[test]
    fn invalid_matrices() {
        let mut m = reference_matrix();
        m.values[2].push(1.0);
        assert!(matches!(
            normalize(&m),
            Err(TopsisError::DimensionMismatch { .. })
        ));
        let mut m = reference_matrix();
        m.values[0][0] = -1.0;
        assert_eq!(normalize(&m).unwrap_err(), TopsisError::InvalidValue);
        let mut m = reference_matrix();
        m.criteria[0].weight = 0.0;
        m.criteria[1].weight = 0.0;
        assert_eq!(normalize(&m).unwrap_err(), TopsisError::InvalidWeights);
        let m = DecisionMatrix {
            alternatives: vec![],
            criteria: default_criteria(),
            values: vec![],
        };
        assert_eq!(normalize(&m).unwrap_err(), TopsisError::Empty);
    }

    #[test]
    fn weighting_examples() {
        let r = normalize(&reference_matrix()).unwrap();
        let v = apply_weights(&r, &default_criteria()).unwrap();
        assert!(close(v[0][0], 0.3211, 1e-4));

        let criteria = vec![
            CriterionSpec::benefit("a", 1.0),
            CriterionSpec::benefit("b", 0.0),
        ];
        let v = apply_weights(&r, &criteria).unwrap();
        for (row_r, row_v) in r.iter().zip(&v) {
            assert_eq!(row_r[0], row_v[0]);
            assert_eq!(row_v[1], 0.0);
        }
        assert!(matches!(
            apply_weights(&r, &[CriterionSpec::benefit("a", 1.0)]),
            Err(TopsisError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn ideal_solutions_examples() {
        let m = reference_matrix();
        let v = apply_weights(&normalize(&m).unwrap(), &m.criteria).unwrap();
        let (plus, minus) = ideal_solutions(&v, &m.criteria).unwrap();
        assert!(close(plus[0], 0.356753, 1e-6) && close(plus[1], 0.136720, 1e-6));
        assert!(close(minus[0], 0.035675, 1e-6) && close(minus[1], 0.045573, 1e-6));

        let mut flipped = m.criteria.clone();
        flipped[1].kind = CriterionKind::Cost;
        let (fp, fm) = ideal_solutions(&v, &flipped).unwrap();
        assert_eq!((fp[0], fm[0]), (plus[0], minus[0]));
        assert_eq!((fp[1], fm[1]), (minus[1], plus[1]));

        let row = vec![vec![0.2, 0.4]];
        let (p, n) = ideal_solutions(&row, &m.criteria).unwrap();
        assert_eq!(p, row[0]);
        assert_eq!(n, row[0]);
    }

    #[test]
    fn separation_examples() {
        let result = run(&reference_matrix()).unwrap();
        assert_eq!(result.s_plus[9], 0.0);
        assert!(close(result.s_plus[0], 0.0468, 1e-4));
        assert!(close(result.s_minus[0], 0.2918, 1e-4));

        let (_, s_minus) = separations(&[vec![0.1, 0.2]], &[0.3, 0.3], &[0.1, 0.2]).unwrap();
        assert_eq!(s_minus[0], 0.0);
    }

    #[test]
    fn closeness_examples() {
        let result = run(&reference_matrix()).unwrap();
        assert!(close(result.closeness[9], 1.0, 1e-12));
        assert_eq!(result.ranks[9], 1);
        assert!(close(result.closeness[0], 0.861632, 1e-6));
        assert_eq!(result.ranks[0], 2);

        let (c, _) = closeness(&[0.3], &[0.3]).unwrap();
        assert_eq!(c[0], 0.5);
        let (c, r) = closeness(&[0.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(c, vec![1.0, 1.0]);
        assert_eq!(r, vec![1, 2]);
    }

    #[test]
    fn domination_gives_one_and_zero() {
        let m = DecisionMatrix {
            alternatives: vec!["good".into(), "bad".into()],
            criteria: default_criteria(),
            values: vec![vec![9.0, 8.0], vec![2.0, 1.0]],
        };
        let w = derive_action_weights(&m).unwrap();
        assert_eq!(w.weights(), vec![1.0, 0.0]);
    }

    #[test]
    fn duplicated_rows_share_weights() {
        let m = DecisionMatrix {
            alternatives: vec!["a".into(), "b".into(), "a2".into()],
            criteria: default_criteria(),
            values: vec![vec![7.0, 2.0], vec![3.0, 6.0], vec![7.0, 2.0]],
        };
        let w = derive_action_weights(&m).unwrap().weights();
        assert_eq!(w[0], w[2]);
        assert_ne!(w[0], w[1]);
    }

    #[test]
    fn ties_rank_lower_row_first() {
        assert_eq!(rank_descending(&[0.5, 0.9, 0.5]), vec![2, 1, 3]);
    }
}
