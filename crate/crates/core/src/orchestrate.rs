//! Incident + guidelines -> `m` generations -> extraction with reprompts ->
//! fusion -> score.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::fusion::{fuse, FusionError};
use crate::incident::{render_incident_report, IncidentRecord};
use crate::plan::{
    extract_binary_plan, score_plan, BinaryPlan, ExtractError, PlanError, WeightTable,
};
use crate::synthesis::{
    fill, generate_with_retry, GenerationBackend, GuidelineTable, PromptTemplates, RetryExhausted,
    RetryPolicy, Sleep,
};

/// Generations per job unless configured otherwise.
pub const DEFAULT_GENERATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSettings {
    pub generations: usize,
    /// Reprompts allowed per generation when extraction fails.
    pub reprompts: u32,
    pub retry: RetryPolicy,
}

impl Default for PlanSettings {
    fn default() -> Self {
        PlanSettings {
            generations: DEFAULT_GENERATIONS,
            reprompts: 3,
            retry: RetryPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttemptKind {
    Initial,
    Reprompt,
}

/// One raw response with what came of it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub generation: usize,
    pub kind: AttemptKind,
    pub response: String,
    /// `None` when the response yielded a plan.
    pub extraction_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanOutcome {
    pub prompt: String,
    pub generations: Vec<BinaryPlan>,
    pub fused: BinaryPlan,
    pub score: f64,
    pub reprompts: usize,
    pub audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrchestrateError {
    EmptyGuidelines,
    NoGenerations,
    BackendFailure(RetryExhausted),
    ExtractionExhausted {
        generation: usize,
        last: ExtractError,
    },
    Fusion(FusionError),
    Score(PlanError),
}

impl fmt::Display for OrchestrateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrchestrateError::EmptyGuidelines => f.write_str("guideline table is empty"),
            OrchestrateError::NoGenerations => f.write_str("generation count must be at least 1"),
            OrchestrateError::BackendFailure(e) => e.fmt(f),
            OrchestrateError::ExtractionExhausted { generation, last } => {
                write!(
                    f,
                    "generation {generation}: no usable plan after reprompts ({last})"
                )
            }
            OrchestrateError::Fusion(e) => e.fmt(f),
            OrchestrateError::Score(e) => e.fmt(f),
        }
    }
}

/// Numbered action list for the prompt, one per line.
pub fn action_list(weights: &WeightTable) -> String {
    weights
        .labels()
        .enumerate()
        .map(|(i, label)| format!("{}. {}\n", i + 1, label))
        .collect()
}

/// The plan prompt: incident report, guideline table and the binary-answer
/// instruction.
pub fn build_plan_prompt(
    templates: &PromptTemplates,
    incident: &IncidentRecord,
    guidelines: &GuidelineTable,
    weights: &WeightTable,
) -> String {
    let n = weights.len().to_string();
    fill(
        &templates.plan,
        &[
            ("incident_report", &render_incident_report(incident)),
            ("guideline_table", &guidelines.to_markdown()),
            ("action_list", &action_list(weights)),
            ("n_actions", &n),
        ],
    )
}

/// Runs `settings.generations` generations, extracting a plan of
/// `weights.len()` actions from each with up to `settings.reprompts`
/// reprompts, then fuses and scores. Every raw response lands in the audit
/// log, so a finished job holds `generations + reprompts` entries.
pub fn generate_plan(
    backend: &dyn GenerationBackend,
    sleep: &dyn Sleep,
    templates: &PromptTemplates,
    incident: &IncidentRecord,
    guidelines: &GuidelineTable,
    weights: &WeightTable,
    settings: &PlanSettings,
) -> Result<PlanOutcome, OrchestrateError> {
    if guidelines.is_empty() {
        return Err(OrchestrateError::EmptyGuidelines);
    }
    if settings.generations == 0 {
        return Err(OrchestrateError::NoGenerations);
    }
    weights.validate().map_err(OrchestrateError::Score)?;
    let n = weights.len();
    let n_text = n.to_string();
    let prompt = build_plan_prompt(templates, incident, guidelines, weights);

    let mut generations = Vec::with_capacity(settings.generations);
    let mut audit = Vec::new();
    let mut reprompts = 0;
    for generation in 0..settings.generations {
        let mut kind = AttemptKind::Initial;
        let mut request = prompt.clone();
        let mut used = 0;
        let plan = loop {
            let response = generate_with_retry(backend, &request, &settings.retry, sleep)
                .map_err(OrchestrateError::BackendFailure)?;
            match extract_binary_plan(&response, n) {
                Ok(mut plan) => {
                    audit.push(AuditEntry {
                        generation,
                        kind,
                        response,
                        extraction_error: None,
                    });
                    plan.source = format!("{}#{}", backend.id(), generation);
                    break plan;
                }
                Err(err) => {
                    audit.push(AuditEntry {
                        generation,
                        kind,
                        response,
                        extraction_error: Some(err.to_string()),
                    });
                    if used >= settings.reprompts {
                        return Err(OrchestrateError::ExtractionExhausted {
                            generation,
                            last: err,
                        });
                    }
                    used += 1;
                    reprompts += 1;
                    kind = AttemptKind::Reprompt;
                    request = fill(
                        &templates.plan_reprompt,
                        &[
                            ("prompt", &prompt),
                            ("error", &err.to_string()),
                            ("n_actions", &n_text),
                        ],
                    );
                }
            }
        };
        generations.push(plan);
    }

    let fused = fuse(&generations).map_err(OrchestrateError::Fusion)?;
    let score = score_plan(&fused, weights).map_err(OrchestrateError::Score)?;
    Ok(PlanOutcome {
        prompt,
        generations,
        fused,
        score,
        reprompts,
        audit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::canonical_catalog;
    use crate::incident::liverpool_record;
    use crate::synthesis::{GuidelineRow, MockBackend, MockReply, NoSleep, Severity};
    use crate::topsis::{default_criteria, derive_action_weights, DecisionMatrix};
    use alloc::vec;

    fn weights() -> WeightTable {
        derive_action_weights(&DecisionMatrix::from_catalog(
            &canonical_catalog(),
            default_criteria(),
        ))
        .unwrap()
    }

    fn guidelines() -> GuidelineTable {
        GuidelineTable {
            rows: vec![GuidelineRow {
                scenario_id: 5,
                incident_type: "Overturned Truck".into(),
                severity: Severity::Moderate,
                location: "Highway On-ramp/Off-ramp".into(),
                actions: vec!["Partial ramp closure".into()],
                equipment: vec!["Tow Trucks".into()],
            }],
        }
    }

    fn settings(m: usize) -> PlanSettings {
        PlanSettings {
            generations: m,
            reprompts: 3,
            retry: RetryPolicy::immediate(3),
        }
    }

    fn text(s: &str) -> MockReply {
        MockReply::Text(s.into())
    }

    #[test]
    fn prompt_contains_report_table_and_length() {
        let p = build_plan_prompt(
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
        );
        assert!(p.contains("Accident ID: A-2760450, Source: Source2"));
        assert!(p.contains("| 5 | Overturned Truck | Moderate |"));
        assert!(p.contains("exactly 10 values"));
        assert!(p.contains("10. Full Road Closure"));
    }

    #[test]
    fn three_generations_fuse_by_majority() {
        let mock = MockBackend::new("mock").with_script(vec![
            text("Plan: [1,0,1,1,0,1,0,1,0,1]"),
            text("Plan: [1,1,0,0,1,0,1,0,1,0]"),
            text("Plan: [1,0,1,0,1,1,0,1,0,1]"),
        ]);
        let out = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
            &settings(3),
        )
        .unwrap();
        assert_eq!(out.fused.bits(), &[1, 0, 1, 0, 1, 1, 0, 1, 0, 1]);
        assert_eq!(out.generations[1].source, "mock#1");
        assert_eq!(out.audit.len(), 3);
        assert_eq!(out.reprompts, 0);
        assert!((out.score - score_plan(&out.fused, &weights()).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn wrong_length_triggers_reprompt() {
        let long = format!("[{}]", vec!["1"; 24].join(", "));
        let mock =
            MockBackend::new("mock").with_script(vec![text(&long), text("[0,1,1,0,1,1,1,0,0,1]")]);
        let out = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
            &settings(1),
        )
        .unwrap();
        assert_eq!(out.reprompts, 1);
        assert_eq!(out.audit.len(), 2);
        assert_eq!(out.audit[0].kind, AttemptKind::Initial);
        assert!(out.audit[0]
            .extraction_error
            .as_deref()
            .unwrap()
            .contains("24"));
        assert_eq!(out.audit[1].kind, AttemptKind::Reprompt);
        assert_eq!(out.fused.bits(), &[0, 1, 1, 0, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn extraction_exhausted() {
        let mock = MockBackend::new("mock").with_rule("", text("I would run a script to decide."));
        let err = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
            &settings(2),
        )
        .unwrap_err();
        assert_eq!(
            err,
            OrchestrateError::ExtractionExhausted {
                generation: 0,
                last: ExtractError::NotFound
            }
        );
        assert_eq!(mock.calls(), 4);
    }

    #[test]
    fn unreachable_backend() {
        let mock =
            MockBackend::new("down").with_rule("", MockReply::Fail("connection refused".into()));
        let err = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
            &settings(3),
        )
        .unwrap_err();
        assert!(matches!(err, OrchestrateError::BackendFailure(_)));
    }

    #[test]
    fn input_checks() {
        let mock = MockBackend::new("m");
        let empty = GuidelineTable::default();
        let err = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &empty,
            &weights(),
            &settings(3),
        )
        .unwrap_err();
        assert_eq!(err, OrchestrateError::EmptyGuidelines);
        let err = generate_plan(
            &mock,
            &NoSleep,
            &PromptTemplates::default(),
            &liverpool_record(),
            &guidelines(),
            &weights(),
            &settings(0),
        )
        .unwrap_err();
        assert_eq!(err, OrchestrateError::NoGenerations);
    }
}
