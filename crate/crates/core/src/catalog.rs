//! The constrained action space.
//!
//! A recommendation may only be expressed as a sequence of [`PermittedAction`]s,
//! each a (lane, speed limit, VMS text, closure state) tuple checked against a
//! network definition. Separately, the ten canonical incident response actions
//! used for plan encoding live in [`canonical_catalog`].

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// Longest VMS message accepted.
pub const MAX_VMS_CHARS: usize = 120;

/// Number of canonical response actions.
pub const CATALOG_SIZE: usize = 10;

/// A lane of the managed network with its legal speed range in km/h.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkLane {
    pub id: String,
    pub v_min: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Closure {
    Open,
    Closed,
}

/// One lane intervention. A closed lane carries speed 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermittedAction {
    pub lane: String,
    pub speed: u32,
    pub vms: String,
    pub closure: Closure,
}

impl PermittedAction {
    pub fn open(lane: &str, speed: u32, vms: &str) -> Self {
        PermittedAction {
            lane: lane.to_string(),
            speed,
            vms: vms.to_string(),
            closure: Closure::Open,
        }
    }

    pub fn closed(lane: &str, vms: &str) -> Self {
        PermittedAction {
            lane: lane.to_string(),
            speed: 0,
            vms: vms.to_string(),
            closure: Closure::Closed,
        }
    }
}

/// An ordered sequence of permitted actions. The empty strategy is the
/// "do nothing" baseline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub id: String,
    pub actions: Vec<PermittedAction>,
}

/// A canonical response action with its decision-matrix scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogAction {
    pub index: usize,
    pub name: String,
    pub impact: f64,
    pub resource_engagement: f64,
}

const CANONICAL: [(&str, f64, f64); CATALOG_SIZE] = [
    ("Deploy IRV", 9.0, 7.0),
    ("Temporary Lane Closure", 8.0, 6.0),
    ("Use VMS to Warn Drivers", 7.0, 5.0),
    ("Notify Police & EMS", 6.0, 4.0),
    ("Quick Clearance Policy", 5.0, 6.0),
    ("Use VMS & Social Media", 4.0, 3.0),
    ("Full or Partial Lane Closures", 3.0, 5.0),
    ("Divert Traffic to Detour Routes", 2.0, 7.0),
    ("Activate EOC", 1.0, 8.0),
    ("Full Road Closure", 10.0, 9.0),
];

/// The ten canonical response actions in decision-matrix order.
pub fn canonical_catalog() -> Vec<CatalogAction> {
    CANONICAL
        .iter()
        .enumerate()
        .map(
            |(index, &(name, impact, resource_engagement))| CatalogAction {
                index,
                name: name.to_string(),
                impact,
                resource_engagement,
            },
        )
        .collect()
}

/// Checks that a replacement catalog keeps the canonical shape: ten rows,
/// indices a permutation of 0..10, names matching the canonical labels.
/// Scores may differ. Returns the rows sorted by index.
pub fn validate_catalog_override(
    rows: Vec<CatalogAction>,
) -> Result<Vec<CatalogAction>, ActionError> {
    if rows.len() != CATALOG_SIZE {
        return Err(ActionError::CatalogShape(alloc::format!(
            "expected {} rows, found {}",
            CATALOG_SIZE,
            rows.len()
        )));
    }
    let mut rows = rows;
    rows.sort_by_key(|r| r.index);
    for (expected, row) in rows.iter().enumerate() {
        if row.index != expected {
            return Err(ActionError::CatalogShape(alloc::format!(
                "indices are not a permutation of 0..{}",
                CATALOG_SIZE
            )));
        }
        if row.name != CANONICAL[expected].0 {
            return Err(ActionError::CatalogShape(alloc::format!(
                "row {} is named {:?}, expected {:?}",
                expected,
                row.name,
                CANONICAL[expected].0
            )));
        }
        let valid = |v: f64| v.is_finite() && (1.0..=10.0).contains(&v);
        if !valid(row.impact) || !valid(row.resource_engagement) {
            return Err(ActionError::CatalogShape(alloc::format!(
                "row {} has scores outside 1..=10",
                expected
            )));
        }
    }
    Ok(rows)
}

/// A rule broken by an otherwise well-formed action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SpeedBelowMin,
    SpeedAboveMax,
    ClosedWithSpeed,
    VmsTooLong,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msg = match self {
            Violation::SpeedBelowMin => "speed below v_min",
            Violation::SpeedAboveMax => "speed above v_max",
            Violation::ClosedWithSpeed => "closed lane must carry speed 0",
            Violation::VmsTooLong => "VMS message longer than 120 characters",
        };
        f.write_str(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionError {
    EmptyNetwork,
    UnknownLane(String),
    InvalidNetwork(String),
    InvalidAction {
        index: usize,
        violations: Vec<Violation>,
    },
    ConflictingLaneState(String),
    CatalogShape(String),
}

impl fmt::Display for ActionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionError::EmptyNetwork => f.write_str("network definition is empty"),
            ActionError::UnknownLane(lane) => write!(f, "unknown lane {lane:?}"),
            ActionError::InvalidNetwork(msg) => write!(f, "invalid network: {msg}"),
            ActionError::InvalidAction { index, violations } => {
                write!(f, "action {index} is not permitted:")?;
                for v in violations {
                    write!(f, " {v};")?;
                }
                Ok(())
            }
            ActionError::ConflictingLaneState(lane) => {
                write!(f, "lane {lane:?} is both open and closed in one strategy")
            }
            ActionError::CatalogShape(msg) => write!(f, "invalid catalog: {msg}"),
        }
    }
}

/// Checks lane ids are unique and every lane has `0 <= v_min < v_max`.
pub fn validate_network(network: &[NetworkLane]) -> Result<(), ActionError> {
    if network.is_empty() {
        return Err(ActionError::EmptyNetwork);
    }
    for (i, lane) in network.iter().enumerate() {
        if !(lane.v_min.is_finite() && lane.v_max.is_finite())
            || lane.v_min < 0.0
            || lane.v_min >= lane.v_max
        {
            return Err(ActionError::InvalidNetwork(alloc::format!(
                "lane {:?} needs 0 <= v_min < v_max",
                lane.id
            )));
        }
        if network[..i].iter().any(|other| other.id == lane.id) {
            return Err(ActionError::InvalidNetwork(alloc::format!(
                "duplicate lane id {:?}",
                lane.id
            )));
        }
    }
    Ok(())
}

/// Returns the list of broken rules; an empty list means the action is
/// permitted. Fails only when the network is empty or the lane is unknown.
pub fn validate_action(
    action: &PermittedAction,
    network: &[NetworkLane],
) -> Result<Vec<Violation>, ActionError> {
    if network.is_empty() {
        return Err(ActionError::EmptyNetwork);
    }
    let lane = network
        .iter()
        .find(|l| l.id == action.lane)
        .ok_or_else(|| ActionError::UnknownLane(action.lane.clone()))?;

    let mut violations = Vec::new();
    match action.closure {
        Closure::Open => {
            let speed = f64::from(action.speed);
            if speed < lane.v_min {
                violations.push(Violation::SpeedBelowMin);
            }
            if speed > lane.v_max {
                violations.push(Violation::SpeedAboveMax);
            }
        }
        Closure::Closed => {
            if action.speed != 0 {
                violations.push(Violation::ClosedWithSpeed);
            }
        }
    }
    if action.vms.chars().count() > MAX_VMS_CHARS {
        violations.push(Violation::VmsTooLong);
    }
    Ok(violations)
}

/// Builds a strategy, preserving input order. Each action must be permitted
/// on its own, and no lane may be both open and closed. Repeated speed
/// limits on one lane are accepted.
pub fn compose_strategy(
    id: &str,
    actions: Vec<PermittedAction>,
    network: &[NetworkLane],
) -> Result<Strategy, ActionError> {
    for (index, action) in actions.iter().enumerate() {
        let violations = validate_action(action, network)?;
        if !violations.is_empty() {
            return Err(ActionError::InvalidAction { index, violations });
        }
    }
    for (i, action) in actions.iter().enumerate() {
        let conflict = actions[..i]
            .iter()
            .any(|earlier| earlier.lane == action.lane && earlier.closure != action.closure);
        if conflict {
            return Err(ActionError::ConflictingLaneState(action.lane.clone()));
        }
    }
    Ok(Strategy {
        id: id.to_string(),
        actions,
    })
}
