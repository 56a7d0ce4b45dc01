//! Operations shared by the CLI and the HTTP service.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tidss_core::catalog::{canonical_catalog, CatalogAction};
use tidss_core::incident::IncidentRecord;
use tidss_core::orchestrate::{generate_plan, PlanSettings};
use tidss_core::plan::{
    compare_to_manual, score_breakdown, score_table_from_plans, ScoreBreakdown, ScoreReport,
    ScoreTable,
};
use tidss_core::synthesis::{GuidelineSynthesis, SynthesisConfig, Synthesizer};
use tidss_core::topsis::{self, derive_action_weights, DecisionMatrix, TopsisResult};
use tidss_core::{fuse, BinaryPlan, WeightTable};

use crate::backend::{Backends, SharedBackend, ThreadSleep};
use crate::config::{AppConfig, BackendConfig, WeightSource};
use crate::error::{Error, Result};
use crate::formats::{
    read_catalog_override, read_guidelines, read_weights, score_report_csv, GuidelineDocument,
    PlanFile,
};
use crate::ingest::{parse_accident_csv, AccidentBatch, IngestOptions};
use crate::jobs::{JobStore, PlanJob};

/// A catalog action with its active weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedAction {
    #[serde(flatten)]
    pub action: CatalogAction,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub table: ScoreTable,
    pub report: ScoreReport,
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedPlan {
    pub bits: Vec<u8>,
    pub source: String,
    pub score: f64,
}

/// Loaded configuration with the active catalog and weight table.
pub struct App {
    pub config: AppConfig,
    catalog: Vec<CatalogAction>,
    weights: WeightTable,
    backends: Backends,
    jobs: JobStore,
}

impl App {
    pub fn new(config: AppConfig) -> Result<Self> {
        config.validate()?;
        let catalog = match &config.catalog_override {
            Some(path) => read_catalog_override(path)?,
            None => canonical_catalog(),
        };
        let weights = match &config.weights {
            WeightSource::TopsisEngine => derive_action_weights(&DecisionMatrix::from_catalog(
                &catalog,
                config.criteria.clone(),
            ))?,
            WeightSource::ExternalFile { path } => read_weights(path)?,
        };
        if weights.len() != catalog.len() {
            return Err(Error::Config(format!(
                "weight table has {} entries, catalog has {}",
                weights.len(),
                catalog.len()
            )));
        }
        let jobs = JobStore::new(&config.data_dir);
        Ok(App {
            config,
            catalog,
            weights,
            backends: Backends::default(),
            jobs,
        })
    }

    pub fn load(config_path: Option<&Path>) -> Result<Self> {
        let config = match config_path {
            Some(path) => AppConfig::load(path)?,
            None => AppConfig::default(),
        };
        App::new(config)
    }

    /// Replaces the active weights, e.g. from a `--weights-file` flag.
    pub fn with_weights_file(mut self, path: &Path) -> Result<Self> {
        let weights = read_weights(path)?;
        if weights.len() != self.catalog.len() {
            return Err(Error::format(
                path,
                format!(
                    "{} weights for {} catalog actions",
                    weights.len(),
                    self.catalog.len()
                ),
            ));
        }
        self.config.weights = WeightSource::ExternalFile {
            path: path.to_path_buf(),
        };
        self.weights = weights;
        Ok(self)
    }

    pub fn weights(&self) -> &WeightTable {
        &self.weights
    }

    pub fn jobs(&self) -> &JobStore {
        &self.jobs
    }

    pub fn actions(&self) -> Vec<WeightedAction> {
        self.catalog
            .iter()
            .zip(self.weights.weights())
            .map(|(action, weight)| WeightedAction {
                action: action.clone(),
                weight,
            })
            .collect()
    }

    pub fn backend_config(&self, id: Option<&str>) -> Result<&BackendConfig> {
        self.config.backend(id)
    }

    pub fn backend(&self, id: Option<&str>) -> Result<SharedBackend> {
        self.backends.build(self.config.backend(id)?)
    }

    pub fn topsis(&self, matrix: &DecisionMatrix) -> Result<(TopsisResult, WeightTable)> {
        Ok((topsis::run(matrix)?, derive_action_weights(matrix)?))
    }

    pub fn accidents(&self, path: Option<&Path>) -> Result<AccidentBatch> {
        let path = path
            .map(Path::to_path_buf)
            .or_else(|| self.config.accidents.clone())
            .ok_or_else(|| Error::Config("no accidents file configured".into()))?;
        let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
        Ok(parse_accident_csv(file, IngestOptions::default())?)
    }

    pub fn incident(&self, id: &str, accidents: Option<&Path>) -> Result<IncidentRecord> {
        self.accidents(accidents)?
            .find(id)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("incident {id}")))
    }

    pub fn guidelines_path(&self, path: Option<&Path>) -> Result<PathBuf> {
        path.map(Path::to_path_buf)
            .or_else(|| self.config.guidelines.clone())
            .ok_or_else(|| Error::Config("no guidelines file configured".into()))
    }

    pub fn guidelines(&self, path: Option<&Path>) -> Result<GuidelineDocument> {
        read_guidelines(&self.guidelines_path(path)?)
    }

    pub fn synthesize(&self, document: &str, backend: Option<&str>) -> Result<GuidelineSynthesis> {
        let backend_config = self.backend_config(backend)?;
        let backend = self.backends.build(backend_config)?;
        let config = SynthesisConfig {
            retry: backend_config.retry.clone(),
            ..self.config.synthesis.clone()
        };
        Ok(Synthesizer::new(backend.as_ref(), &config, &ThreadSleep)
            .synthesize_guidelines(document)?)
    }

    /// Runs and stores a plan job. A failed run is stored too and returned
    /// as `Ok` with status `Failed`.
    pub fn generate(
        &self,
        incident: &IncidentRecord,
        guidelines: &GuidelineDocument,
        guidelines_ref: &str,
        backend: Option<&str>,
        m: Option<usize>,
        reprompts: Option<u32>,
    ) -> Result<PlanJob> {
        incident
            .validate()
            .map_err(|e| Error::Config(format!("incident {}: {e}", incident.id)))?;
        let backend_config = self.backend_config(backend)?;
        let settings = PlanSettings {
            generations: m.unwrap_or(self.config.m),
            reprompts: reprompts.unwrap_or(self.config.reprompts),
            retry: backend_config.retry.clone(),
        };
        let reference = format!("{guidelines_ref}@{}", guidelines.revision);
        let mut job = PlanJob::new(
            &incident.id,
            &reference,
            &backend_config.id,
            settings.generations,
            settings.reprompts,
        );
        self.jobs.save(&job)?;
        job.status = crate::jobs::JobStatus::Running;
        self.jobs.save(&job)?;

        let outcome = self.backends.build(backend_config).and_then(|b| {
            Ok(generate_plan(
                b.as_ref(),
                &ThreadSleep,
                &self.config.synthesis.prompts,
                incident,
                &guidelines.table,
                &self.weights,
                &settings,
            )?)
        });
        match outcome {
            Ok(outcome) => {
                let breakdown = score_breakdown(&outcome.fused, &self.weights)?;
                job.finish(outcome, breakdown);
            }
            Err(e) => job.fail(&e),
        }
        self.jobs.save(&job)?;
        Ok(job)
    }

    pub fn score(&self, bits: Vec<u8>) -> Result<ScoreBreakdown> {
        let plan = BinaryPlan::with_len(bits, self.weights.len(), "request")?;
        Ok(score_breakdown(&plan, &self.weights)?)
    }

    pub fn fuse(&self, vectors: Vec<Vec<u8>>) -> Result<FusedPlan> {
        let plans = vectors
            .into_iter()
            .map(|bits| BinaryPlan::with_len(bits, self.weights.len(), "request"))
            .collect::<Result<Vec<_>, _>>()?;
        let fused = fuse(&plans)?;
        let score = score_breakdown(&fused, &self.weights)?.score;
        Ok(FusedPlan {
            bits: fused.bits().to_vec(),
            source: fused.source,
            score,
        })
    }

    /// Scores plan files per incident and compares every source against the
    /// manual one.
    pub fn compare(&self, plans: &[PlanFile], manual_label: Option<&str>) -> Result<Comparison> {
        let manual = manual_label.unwrap_or(&self.config.manual_label);
        let scored = plans
            .iter()
            .map(|p| {
                Ok((
                    p.incident_id.clone(),
                    BinaryPlan::with_len(p.bits.clone(), self.weights.len(), p.source.clone())?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let table = score_table_from_plans(&scored, &self.weights, manual)?;
        compare_table(table)
    }
}

/// Comparison report for an already scored table.
pub fn compare_table(table: ScoreTable) -> Result<Comparison> {
    let report = compare_to_manual(&table)?;
    let csv = score_report_csv(&table, &report);
    Ok(Comparison { table, report, csv })
}
