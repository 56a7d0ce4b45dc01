//! Guideline synthesis over a pluggable text-generation backend.
//!
//! The building block is the S-cycle: split a long document into chunks, ask
//! the same query of every chunk in order, then ask once more to synthesize
//! the per-chunk tables into one. Modality pull runs one S-cycle per
//! modality (decision tables, keypoints, incident aspects, response actions);
//! a co-joint stage pairs scenarios with actions. All results are
//! concatenated into a single generation prompt, and the generated table is
//! refined in a second call before being parsed into a [`GuidelineTable`].

mod backend;
mod chunk;
pub mod prompts;
mod table;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use backend::{
    generate_with_retry, BackendError, GenerationBackend, MockBackend, MockReply, MockRule,
    NoSleep, RetryExhausted, RetryPolicy, Sleep,
};
pub use chunk::{
    chunk_text, chunk_text_with, Chunk, Tokenizer, WhitespaceTokenizer, DEFAULT_CHUNK_TOKENS,
};
pub use prompts::{fill, ExtractionStyle, Modality, PromptTemplates, StageSpec};
pub use table::{
    split_items, GuidelineRow, GuidelineTable, SchemaError, Severity, TableError, TextTable,
};

/// Nested re-chunking of an over-long synthesis prompt stops at this depth.
const MAX_COMBINE_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthesisError {
    EmptyDocument,
    BackendFailure(RetryExhausted),
    MalformedResult {
        chunk: Option<usize>,
        error: TableError,
    },
    /// Per-chunk tables could not be condensed below the backend's prompt limit.
    PromptCapacity {
        tokens: usize,
        limit: usize,
    },
    /// Stages that failed during modality pull, by stage name.
    Modalities(Vec<(String, SynthesisError)>),
    SchemaViolation(SchemaError),
}

impl fmt::Display for SynthesisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthesisError::EmptyDocument => f.write_str("guideline document is empty"),
            SynthesisError::BackendFailure(e) => e.fmt(f),
            SynthesisError::MalformedResult {
                chunk: Some(i),
                error,
            } => write!(f, "chunk {i}: {error}"),
            SynthesisError::MalformedResult { chunk: None, error } => {
                write!(f, "synthesis step: {error}")
            }
            SynthesisError::PromptCapacity { tokens, limit } => {
                write!(
                    f,
                    "combined tables need {tokens} tokens, backend accepts {limit}"
                )
            }
            SynthesisError::Modalities(failed) => {
                f.write_str("modality pull failed:")?;
                for (name, err) in failed {
                    write!(f, " {name} ({err});")?;
                }
                Ok(())
            }
            SynthesisError::SchemaViolation(e) => {
                write!(f, "guideline table does not match the schema: {e}")
            }
        }
    }
}

impl From<RetryExhausted> for SynthesisError {
    fn from(e: RetryExhausted) -> Self {
        SynthesisError::BackendFailure(e)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthesisConfig {
    pub chunk_tokens: usize,
    pub retry: RetryPolicy,
    /// Extra attempts when a chunk or synthesis answer is not a table.
    pub table_reprompts: u32,
    pub prompts: PromptTemplates,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            chunk_tokens: DEFAULT_CHUNK_TOKENS,
            retry: RetryPolicy::default(),
            table_reprompts: 1,
            prompts: PromptTemplates::default(),
        }
    }
}

/// Output of one S-cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SCycleOutput {
    pub chunk_count: usize,
    pub partials: Vec<TextTable>,
    pub combined: TextTable,
}

/// The four modality tables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModalityBundle {
    pub decision_tables: TextTable,
    pub keypoints: TextTable,
    pub incident_aspects: TextTable,
    pub response_actions: TextTable,
}

impl ModalityBundle {
    pub fn get(&self, modality: Modality) -> &TextTable {
        match modality {
            Modality::DecisionTables => &self.decision_tables,
            Modality::Keypoints => &self.keypoints,
            Modality::IncidentAspects => &self.incident_aspects,
            Modality::ResponseActions => &self.response_actions,
        }
    }

    fn slot(&mut self, modality: Modality) -> &mut TextTable {
        match modality {
            Modality::DecisionTables => &mut self.decision_tables,
            Modality::Keypoints => &mut self.keypoints,
            Modality::IncidentAspects => &mut self.incident_aspects,
            Modality::ResponseActions => &mut self.response_actions,
        }
    }
}

/// Everything produced on the way to a guideline table, kept for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidelineSynthesis {
    pub table: GuidelineTable,
    pub bundle: ModalityBundle,
    pub scenario_pairs: TextTable,
    pub generation_prompt: String,
    pub generated_text: String,
    pub refined_text: String,
}

/// One synthesis job over one backend. Not meant to be shared between jobs.
pub struct Synthesizer<'a> {
    backend: &'a dyn GenerationBackend,
    config: &'a SynthesisConfig,
    sleep: &'a dyn Sleep,
    tokenizer: &'a dyn Tokenizer,
}

impl<'a> Synthesizer<'a> {
    pub fn new(
        backend: &'a dyn GenerationBackend,
        config: &'a SynthesisConfig,
        sleep: &'a dyn Sleep,
    ) -> Self {
        Synthesizer {
            backend,
            config,
            sleep,
            tokenizer: &WhitespaceTokenizer,
        }
    }

    pub fn with_tokenizer(mut self, tokenizer: &'a dyn Tokenizer) -> Self {
        self.tokenizer = tokenizer;
        self
    }

    fn call(&self, prompt: &str) -> Result<String, SynthesisError> {
        Ok(generate_with_retry(
            self.backend,
            prompt,
            &self.config.retry,
            self.sleep,
        )?)
    }

    /// Sends `prompt` and parses the answer as a table, re-asking up to
    /// `table_reprompts` times when it is not one.
    fn table_call(&self, prompt: &str, chunk: Option<usize>) -> Result<TextTable, SynthesisError> {
        let mut response = self.call(prompt)?;
        let mut attempt = 0;
        loop {
            match TextTable::parse(&response) {
                Ok(table) => return Ok(table),
                Err(error) if attempt >= self.config.table_reprompts => {
                    return Err(SynthesisError::MalformedResult { chunk, error });
                }
                Err(error) => {
                    attempt += 1;
                    let reprompt = fill(
                        &self.config.prompts.chunk_reprompt,
                        &[("prompt", prompt), ("error", &error.to_string())],
                    );
                    response = self.call(&reprompt)?;
                }
            }
        }
    }

    /// Runs `query` over every chunk of `doc` in order, then synthesizes the
    /// partial tables with one more call. Uses `chunk_count + 1` backend
    /// calls when every answer parses and the combined prompt fits.
    pub fn run_s_cycle(&self, doc: &str, query: &str) -> Result<SCycleOutput, SynthesisError> {
        self.s_cycle_at_depth(doc, query, 0)
    }

    fn s_cycle_at_depth(
        &self,
        doc: &str,
        query: &str,
        depth: usize,
    ) -> Result<SCycleOutput, SynthesisError> {
        if doc.trim().is_empty() {
            return Err(SynthesisError::EmptyDocument);
        }
        let chunks = chunk_text_with(doc, self.config.chunk_tokens, self.tokenizer);
        let count = chunks.len().to_string();
        let mut partials = Vec::with_capacity(chunks.len());
        for chunk in &chunks {
            let index = (chunk.index + 1).to_string();
            let prompt = fill(
                &self.config.prompts.chunk,
                &[
                    ("query", query),
                    ("chunk", &chunk.text),
                    ("chunk_index", &index),
                    ("chunk_count", &count),
                ],
            );
            partials.push(self.table_call(&prompt, Some(chunk.index))?);
        }
        let combined = self.combine(query, &partials, depth)?;
        Ok(SCycleOutput {
            chunk_count: chunks.len(),
            partials,
            combined,
        })
    }

    fn combine(
        &self,
        query: &str,
        partials: &[TextTable],
        depth: usize,
    ) -> Result<TextTable, SynthesisError> {
        let joined = partials
            .iter()
            .map(TextTable::to_markdown)
            .collect::<Vec<_>>()
            .join("\n");
        let prompt = fill(
            &self.config.prompts.synthesis,
            &[("query", query), ("partials", &joined)],
        );
        let tokens = self.tokenizer.count(&prompt);
        let limit = self.backend.max_prompt_tokens();
        if tokens <= limit {
            return self.table_call(&prompt, None);
        }
        // Over capacity: condense the concatenated tables with a nested S-cycle.
        if depth >= MAX_COMBINE_DEPTH || partials.len() <= 1 {
            return Err(SynthesisError::PromptCapacity { tokens, limit });
        }
        Ok(self.s_cycle_at_depth(&joined, query, depth + 1)?.combined)
    }

    /// One dedicated S-cycle per modality. Every stage runs even if an
    /// earlier one fails, and all failures are reported together.
    pub fn modality_pull(&self, doc: &str) -> Result<ModalityBundle, SynthesisError> {
        if doc.trim().is_empty() {
            return Err(SynthesisError::EmptyDocument);
        }
        let prompts = &self.config.prompts;
        let mut bundle = ModalityBundle::default();
        let mut failed = Vec::new();
        for modality in Modality::ALL {
            let query = prompts.stage_query(prompts.stage(modality));
            match self.run_s_cycle(doc, &query) {
                Ok(out) => *bundle.slot(modality) = out.combined,
                Err(err) => failed.push((modality.name().to_string(), err)),
            }
        }
        if failed.is_empty() {
            Ok(bundle)
        } else {
            Err(SynthesisError::Modalities(failed))
        }
    }

    /// Modality pull plus the co-joint scenario stage, concatenated into one
    /// generation prompt; the generated table is then refined and parsed.
    /// Refinement is retried up to `retry.retries` times when its output
    /// does not fit the guideline schema.
    pub fn synthesize_guidelines(&self, doc: &str) -> Result<GuidelineSynthesis, SynthesisError> {
        let bundle = self.modality_pull(doc)?;
        let prompts = &self.config.prompts;
        let scenario_pairs = self
            .run_s_cycle(doc, &prompts.stage_query(&prompts.scenario_pairs))?
            .combined;

        let material = mass_concatenate(&bundle, &scenario_pairs);
        let generation_prompt = fill(&prompts.generation, &[("material", &material)]);
        let generated_text = self.call(&generation_prompt)?;
        let refine_prompt = fill(&prompts.refine, &[("table", &generated_text)]);

        let mut last_error = SchemaError::Empty;
        for _ in 0..=self.config.retry.retries {
            let refined_text = self.call(&refine_prompt)?;
            match GuidelineTable::parse(&refined_text) {
                Ok(table) => {
                    return Ok(GuidelineSynthesis {
                        table,
                        bundle,
                        scenario_pairs,
                        generation_prompt,
                        generated_text,
                        refined_text,
                    })
                }
                Err(e) => last_error = e,
            }
        }
        Err(SynthesisError::SchemaViolation(last_error))
    }
}

/// All stage outputs as one markdown document, one section per stage.
pub fn mass_concatenate(bundle: &ModalityBundle, scenario_pairs: &TextTable) -> String {
    let mut sections: Vec<String> = Modality::ALL
        .iter()
        .map(|m| format!("## {}\n\n{}", m.heading(), bundle.get(*m).to_markdown()))
        .collect();
    sections.push(format!(
        "## Scenario-action pairs\n\n{}",
        scenario_pairs.to_markdown()
    ));
    sections.join("\n")
}
