//! Traffic performance measures and the normalized heuristic used to compare
//! strategies.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub const MEAN_SPEED: &str = "V_avg";
pub const MEAN_WAITING_TIME: &str = "W_avg";
pub const MEAN_TIME_LOSS: &str = "TL_avg";
pub const MEAN_TRAVEL_TIME: &str = "MT_trav";

/// Measure name to observed value.
pub type MeasureValues = BTreeMap<String, f64>;

/// One vehicle's trip summary: speed in km/h, times in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VehicleRecord {
    pub vehicle_id: String,
    pub speed: f64,
    pub waiting_time: f64,
    pub time_loss: f64,
    pub total_travel_time: f64,
}

impl VehicleRecord {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let fail = |reason: &str| {
            Err(MetricsError::InvalidRecord {
                vehicle: self.vehicle_id.clone(),
                reason: reason.to_string(),
            })
        };
        let values = [
            self.speed,
            self.waiting_time,
            self.time_loss,
            self.total_travel_time,
        ];
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return fail("values must be finite and nonnegative");
        }
        if self.total_travel_time <= 0.0 {
            return fail("total travel time must be positive");
        }
        if self.waiting_time > self.time_loss {
            return fail("waiting time exceeds time loss");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Orientation {
    /// Larger is better.
    #[default]
    Benefit,
    /// Smaller is better; the normalized term is inverted.
    Cost,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub name: String,
    pub weight: f64,
    pub lower: f64,
    pub upper: f64,
    #[serde(default)]
    pub orientation: Orientation,
}

impl MeasureSpec {
    pub fn new(name: &str, weight: f64, lower: f64, upper: f64, orientation: Orientation) -> Self {
        MeasureSpec {
            name: name.to_string(),
            weight,
            lower,
            upper,
            orientation,
        }
    }

    fn validate(&self) -> Result<(), MetricsError> {
        if !(self.weight.is_finite()
            && self.weight >= 0.0
            && self.lower.is_finite()
            && self.upper.is_finite())
        {
            return Err(MetricsError::InvalidSpec(self.name.clone()));
        }
        if self.lower == self.upper {
            return Err(MetricsError::DegenerateBounds(self.name.clone()));
        }
        if self.lower > self.upper {
            return Err(MetricsError::InvalidSpec(self.name.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy_id: String,
    pub values: MeasureValues,
    pub heuristic: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    EmptyTrace,
    EmptyOutcomes,
    InvalidRecord { vehicle: String, reason: String },
    MissingMeasure(String),
    DegenerateBounds(String),
    InvalidSpec(String),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::EmptyTrace => f.write_str("trace has no vehicles"),
            MetricsError::EmptyOutcomes => f.write_str("no strategy outcomes to choose from"),
            MetricsError::InvalidRecord { vehicle, reason } => {
                write!(f, "vehicle {vehicle}: {reason}")
            }
            MetricsError::MissingMeasure(name) => write!(f, "no value for measure {name}"),
            MetricsError::DegenerateBounds(name) => {
                write!(f, "measure {name} has equal lower and upper bounds")
            }
            MetricsError::InvalidSpec(name) => write!(
                f,
                "measure {name} needs finite bounds with lower < upper and a nonnegative weight"
            ),
        }
    }
}

/// Network-wide means of speed, waiting time, time loss and travel time.
pub fn aggregate_measures(trace: &[VehicleRecord]) -> Result<MeasureValues, MetricsError> {
    if trace.is_empty() {
        return Err(MetricsError::EmptyTrace);
    }
    let mut sums = [0.0f64; 4];
    for record in trace {
        record.validate()?;
        sums[0] += record.speed;
        sums[1] += record.waiting_time;
        sums[2] += record.time_loss;
        sums[3] += record.total_travel_time;
    }
    let n = trace.len() as f64;
    Ok([
        MEAN_SPEED,
        MEAN_WAITING_TIME,
        MEAN_TIME_LOSS,
        MEAN_TRAVEL_TIME,
    ]
    .iter()
    .zip(sums)
    .map(|(name, sum)| (name.to_string(), sum / n))
    .collect())
}

/// The heuristic value with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicScore {
    pub value: f64,
    /// Sum of the spec weights, the largest value H can take.
    pub weight_sum: f64,
    /// Measures whose value fell outside their bounds and were clamped.
    pub clamped: Vec<String>,
}

/// `H = sum_j w_j * n_j`, where `n_j` is the min-max normalized value of
/// measure `j`, inverted for cost measures. Out-of-range values are clamped
/// and reported in [`HeuristicScore::clamped`].
pub fn heuristic_score(
    values: &MeasureValues,
    specs: &[MeasureSpec],
) -> Result<HeuristicScore, MetricsError> {
    let mut value = 0.0;
    let mut weight_sum = 0.0;
    let mut clamped = Vec::new();
    for spec in specs {
        spec.validate()?;
        let observed = *values
            .get(&spec.name)
            .ok_or_else(|| MetricsError::MissingMeasure(spec.name.clone()))?;
        if !observed.is_finite() {
            return Err(MetricsError::InvalidSpec(spec.name.clone()));
        }
        let bounded = if observed < spec.lower || observed > spec.upper {
            clamped.push(spec.name.clone());
            observed.clamp(spec.lower, spec.upper)
        } else {
            observed
        };
        let normalized = (bounded - spec.lower) / (spec.upper - spec.lower);
        let term = match spec.orientation {
            Orientation::Benefit => normalized,
            Orientation::Cost => 1.0 - normalized,
        };
        value += spec.weight * term;
        weight_sum += spec.weight;
    }
    Ok(HeuristicScore {
        value,
        weight_sum,
        clamped,
    })
}

/// Scores one strategy's measures.
pub fn evaluate_outcome(
    strategy_id: &str,
    values: MeasureValues,
    specs: &[MeasureSpec],
) -> Result<(StrategyOutcome, HeuristicScore), MetricsError> {
    let score = heuristic_score(&values, specs)?;
    let outcome = StrategyOutcome {
        strategy_id: strategy_id.to_string(),
        values,
        heuristic: score.value,
    };
    Ok((outcome, score))
}

/// Position of the best heuristic value; the earliest strategy wins ties.
pub fn best_outcome_index(
    outcomes: &[StrategyOutcome],
    objective: Objective,
) -> Result<usize, MetricsError> {
    let mut best: Option<usize> = None;
    for (i, outcome) in outcomes.iter().enumerate() {
        let better = match best {
            None => true,
            Some(b) => match objective {
                Objective::Maximize => outcome.heuristic > outcomes[b].heuristic,
                Objective::Minimize => outcome.heuristic < outcomes[b].heuristic,
            },
        };
        if better {
            best = Some(i);
        }
    }
    best.ok_or(MetricsError::EmptyOutcomes)
}

pub fn best_outcome(
    outcomes: &[StrategyOutcome],
    objective: Objective,
) -> Result<&str, MetricsError> {
    let index = best_outcome_index(outcomes, objective)?;
    Ok(&outcomes[index].strategy_id)
}

/// Fallback bounds taken from the observed outcomes, for measures that have
/// no configured range. A measure with a single observed value gets the
/// range `[v, v + 1]`.
pub fn observed_bounds(
    observations: &[MeasureValues],
    name: &str,
) -> Result<(f64, f64), MetricsError> {
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for values in observations {
        let v = *values
            .get(name)
            .ok_or_else(|| MetricsError::MissingMeasure(name.to_string()))?;
        lower = lower.min(v);
        upper = upper.max(v);
    }
    if observations.is_empty() {
        return Err(MetricsError::EmptyOutcomes);
    }
    if lower == upper {
        upper = lower + 1.0;
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn vehicle(id: &str, speed: f64, wait: f64, loss: f64, travel: f64) -> VehicleRecord {
        VehicleRecord {
            vehicle_id: id.into(),
            speed,
            waiting_time: wait,
            time_loss: loss,
            total_travel_time: travel,
        }
    }

    fn values(pairs: &[(&str, f64)]) -> MeasureValues {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn outcome(id: &str, h: f64) -> StrategyOutcome {
        StrategyOutcome {
            strategy_id: id.into(),
            values: MeasureValues::new(),
            heuristic: h,
        }
    }

    #[test]
    fn mean_speed() {
        let trace = vec![
            vehicle("a", 10.0, 0.0, 1.0, 5.0),
            vehicle("b", 20.0, 0.0, 1.0, 5.0),
            vehicle("c", 30.0, 0.0, 1.0, 5.0),
        ];
        assert_eq!(aggregate_measures(&trace).unwrap()[MEAN_SPEED], 20.0);
    }

    #[test]
    fn single_vehicle_passes_through() {
        let m = aggregate_measures(&[vehicle("a", 42.0, 3.0, 7.5, 120.0)]).unwrap();
        assert_eq!(m[MEAN_SPEED], 42.0);
        assert_eq!(m[MEAN_WAITING_TIME], 3.0);
        assert_eq!(m[MEAN_TIME_LOSS], 7.5);
        assert_eq!(m[MEAN_TRAVEL_TIME], 120.0);
    }

    #[test]
    fn aggregate_errors() {
        assert_eq!(
            aggregate_measures(&[]).unwrap_err(),
            MetricsError::EmptyTrace
        );
        let err = aggregate_measures(&[vehicle("x", 1.0, 9.0, 2.0, 3.0)]).unwrap_err();
        assert!(matches!(err, MetricsError::InvalidRecord { .. }));
        let err = aggregate_measures(&[vehicle("x", 1.0, 0.0, 2.0, 0.0)]).unwrap_err();
        assert!(matches!(err, MetricsError::InvalidRecord { .. }));
    }

    #[test]
    fn heuristic_bounds() {
        let specs = vec![
            MeasureSpec::new("a", 0.5, 0.0, 10.0, Orientation::Benefit),
            MeasureSpec::new("b", 0.5, 5.0, 15.0, Orientation::Benefit),
        ];
        let low = heuristic_score(&values(&[("a", 0.0), ("b", 5.0)]), &specs).unwrap();
        assert_eq!(low.value, 0.0);
        let high = heuristic_score(&values(&[("a", 10.0), ("b", 15.0)]), &specs).unwrap();
        assert_eq!(high.value, 1.0);
        assert_eq!(high.weight_sum, 1.0);
    }

    #[test]
    fn heuristic_mixed_orientation() {
        let specs = vec![
            MeasureSpec::new(MEAN_SPEED, 0.6, 0.0, 100.0, Orientation::Benefit),
            MeasureSpec::new(MEAN_WAITING_TIME, 0.4, 0.0, 600.0, Orientation::Cost),
        ];
        let h = heuristic_score(
            &values(&[(MEAN_SPEED, 50.0), (MEAN_WAITING_TIME, 150.0)]),
            &specs,
        )
        .unwrap();
        assert!((h.value - 0.6).abs() < 1e-12);
    }

    #[test]
    fn heuristic_clamps_and_reports() {
        let specs = vec![MeasureSpec::new("a", 1.0, 0.0, 10.0, Orientation::Benefit)];
        let h = heuristic_score(&values(&[("a", 12.0)]), &specs).unwrap();
        assert_eq!(h.value, 1.0);
        assert_eq!(h.clamped, vec!["a".to_string()]);
    }

    #[test]
    fn heuristic_errors() {
        let specs = vec![MeasureSpec::new("a", 1.0, 3.0, 3.0, Orientation::Benefit)];
        assert_eq!(
            heuristic_score(&values(&[("a", 3.0)]), &specs).unwrap_err(),
            MetricsError::DegenerateBounds("a".into())
        );
        let specs = vec![MeasureSpec::new("a", 1.0, 0.0, 3.0, Orientation::Benefit)];
        assert_eq!(
            heuristic_score(&values(&[("b", 3.0)]), &specs).unwrap_err(),
            MetricsError::MissingMeasure("a".into())
        );
    }

    #[test]
    fn best_outcome_rules() {
        let outcomes = vec![outcome("s0", 0.2), outcome("s1", 0.9), outcome("s2", 0.5)];
        assert_eq!(
            best_outcome_index(&outcomes, Objective::Maximize).unwrap(),
            1
        );
        assert_eq!(
            best_outcome_index(&outcomes, Objective::Minimize).unwrap(),
            0
        );
        assert_eq!(best_outcome(&outcomes, Objective::Maximize).unwrap(), "s1");
        let tie = vec![outcome("s0", 0.5), outcome("s1", 0.5)];
        assert_eq!(best_outcome_index(&tie, Objective::Maximize).unwrap(), 0);
        assert_eq!(
            best_outcome_index(&[], Objective::Maximize).unwrap_err(),
            MetricsError::EmptyOutcomes
        );
    }

    #[test]
    fn observed_bounds_fallback() {
        let obs = vec![values(&[("a", 3.0)]), values(&[("a", 7.0)])];
        assert_eq!(observed_bounds(&obs, "a").unwrap(), (3.0, 7.0));
        let obs = vec![values(&[("a", 3.0)])];
        assert_eq!(observed_bounds(&obs, "a").unwrap(), (3.0, 4.0));
    }
}
