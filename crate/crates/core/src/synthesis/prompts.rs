//! Default prompt texts. All templates are plain strings with `{name}`
//! placeholders, so deployments can replace any of them from config.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Replaces every `{key}` with its value. Unknown placeholders stay as they are.
pub fn fill(template: &str, values: &[(&str, &str)]) -> String {
    let mut out = template.to_string();
    for (key, value) in values {
        let placeholder = alloc::format!("{{{key}}}");
        out = out.replace(&placeholder, value);
    }
    out
}

/// How a stage asks for information: one kind of fact at a time, or
/// scenario-action pairs that need reasoning across facts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionStyle {
    Atomic,
    CoJoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    DecisionTables,
    Keypoints,
    IncidentAspects,
    ResponseActions,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::DecisionTables,
        Modality::Keypoints,
        Modality::IncidentAspects,
        Modality::ResponseActions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Modality::DecisionTables => "decision_tables",
            Modality::Keypoints => "keypoints",
            Modality::IncidentAspects => "incident_aspects",
            Modality::ResponseActions => "response_actions",
        }
    }

    pub fn heading(self) -> &'static str {
        match self {
            Modality::DecisionTables => "Decision tables",
            Modality::Keypoints => "Keypoints and highlights",
            Modality::IncidentAspects => "Incident aspects",
            Modality::ResponseActions => "Response actions",
        }
    }
}

/// One extraction stage: what to look for and how to ask.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSpec {
    pub goal: String,
    pub style: ExtractionStyle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PromptTemplates {
    /// Per-chunk query. Placeholders: `{query}`, `{chunk}`, `{chunk_index}`, `{chunk_count}`.
    pub chunk: String,
    /// Sent when a chunk answer had no usable table. Placeholders: `{prompt}`, `{error}`.
    pub chunk_reprompt: String,
    /// Final S-cycle step. Placeholders: `{query}`, `{partials}`.
    pub synthesis: String,
    /// Single-fact query. Placeholder: `{goal}`.
    pub atomic: String,
    /// Scenario-action pairing query. Placeholder: `{goal}`.
    pub cojoint: String,
    pub decision_tables: StageSpec,
    pub keypoints: StageSpec,
    pub incident_aspects: StageSpec,
    pub response_actions: StageSpec,
    /// The co-joint stage run next to the four modalities.
    pub scenario_pairs: StageSpec,
    /// Guideline table generation from the concatenated material. Placeholder: `{material}`.
    pub generation: String,
    /// Refinement of the generated table. Placeholder: `{table}`.
    pub refine: String,
    /// Plan request. Placeholders: `{incident_report}`, `{guideline_table}`, `{action_list}`, `{n_actions}`.
    pub plan: String,
    /// Sent when a plan answer had no usable array. Placeholders: `{prompt}`, `{error}`, `{n_actions}`.
    pub plan_reprompt: String,
}

impl PromptTemplates {
    pub fn stage(&self, modality: Modality) -> &StageSpec {
        match modality {
            Modality::DecisionTables => &self.decision_tables,
            Modality::Keypoints => &self.keypoints,
            Modality::IncidentAspects => &self.incident_aspects,
            Modality::ResponseActions => &self.response_actions,
        }
    }

    /// The query text for a stage, from the atomic or co-joint family.
    pub fn stage_query(&self, stage: &StageSpec) -> String {
        let template = match stage.style {
            ExtractionStyle::Atomic => &self.atomic,
            ExtractionStyle::CoJoint => &self.cojoint,
        };
        fill(template, &[("goal", &stage.goal)])
    }

    /// Every stage in the order the pipeline runs them.
    pub fn stages(&self) -> Vec<&StageSpec> {
        let mut stages: Vec<&StageSpec> = Modality::ALL.iter().map(|m| self.stage(*m)).collect();
        stages.push(&self.scenario_pairs);
        stages
    }
}

fn atomic(goal: &str) -> StageSpec {
    StageSpec {
        goal: goal.to_string(),
        style: ExtractionStyle::Atomic,
    }
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            chunk: "{query}\n\nThis is part {chunk_index} of {chunk_count} of a traffic incident management guideline. \
Answer only from this part and format the answer as a markdown table.\n\n---\n{chunk}\n---"
                .into(),
            chunk_reprompt: "{prompt}\n\nYour previous answer could not be read as a table ({error}). \
Reply with a single markdown table and nothing else."
                .into(),
            synthesis: "{query}\n\nBelow are tables extracted from consecutive parts of one guideline document. \
Synthesize them into a single markdown table, merging duplicates and keeping every distinct item.\n\n{partials}"
                .into(),
            atomic: "Extract the {goal} stated in the text. List one fact per row and do not infer anything that is not written."
                .into(),
            cojoint: "Identify the incident scenarios described in the text and pair each scenario with the {goal}. One scenario per row."
                .into(),
            decision_tables: atomic("decision criteria and thresholds (decision tables) used to choose a response"),
            keypoints: atomic("keypoints and highlights"),
            incident_aspects: atomic("incident aspects (incident types, severity indicators, locations, hazards)"),
            response_actions: atomic("response actions and the equipment or technology each action requires"),
            scenario_pairs: StageSpec {
                goal: "response actions and equipment recommended for it".into(),
                style: ExtractionStyle::CoJoint,
            },
            generation: "Using the material below, generate a traffic incident mitigation strategies table with the columns \
Scenario ID | Incident Type | Severity | Location | Action | Equipment/Technology Required. \
Severity is one of Low, Moderate, High, Very High, Variable. Separate multiple actions or equipment items with <br>.\n\n{material}"
                .into(),
            refine: "Refine the traffic incident mitigation strategies table below: remove duplicate or overlapping scenarios, \
keep scenario ids unique, keep the same six columns, and return only the markdown table.\n\n{table}"
                .into(),
            plan: "You support a traffic management center. Decide which response actions to take for the incident below.\n\n\
Incident report:\n{incident_report}\n\nTraffic incident mitigation strategies:\n{guideline_table}\n\
Candidate actions, in order:\n{action_list}\n\
Answer with a binary array of exactly {n_actions} values in the order above, 1 to take the action and 0 to skip it, \
for example [1, 0, 1, ...]. Put the array on the last line."
                .into(),
            plan_reprompt: "{prompt}\n\nYour previous answer could not be used ({error}). \
Reply with exactly one binary array of {n_actions} values and nothing else."
                .into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_replaces_known_keys_only() {
        assert_eq!(fill("{a} and {b}", &[("a", "x")]), "x and {b}");
    }

    #[test]
    fn atomic_stages_ask_one_thing() {
        let t = PromptTemplates::default();
        for stage in t.stages() {
            let query = t.stage_query(stage);
            match stage.style {
                ExtractionStyle::Atomic => {
                    assert_eq!(query.matches("Extract").count(), 1);
                    assert!(!query.contains("pair"), "{query}");
                    assert_eq!(query.matches(&stage.goal).count(), 1);
                }
                ExtractionStyle::CoJoint => assert!(query.contains("pair each scenario")),
            }
        }
    }

    #[test]
    fn every_modality_has_a_distinct_goal() {
        let t = PromptTemplates::default();
        let goals: Vec<&str> = Modality::ALL
            .iter()
            .map(|m| t.stage(*m).goal.as_str())
            .collect();
        for (i, g) in goals.iter().enumerate() {
            assert!(!goals[..i].contains(g));
        }
    }
}
