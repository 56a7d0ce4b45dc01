//! Plan jobs, persisted as one JSON file each under `<data_dir>/jobs`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tidss_core::orchestrate::{AuditEntry, PlanOutcome};
use tidss_core::plan::ScoreBreakdown;

use crate::error::{Error, Result};
use crate::formats::{read_json, write_json, PlanFile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobStatus {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobResult {
    pub generations: Vec<PlanFile>,
    pub fused: PlanFile,
    pub score: f64,
    pub breakdown: ScoreBreakdown,
    pub reprompts: usize,
    pub prompt: String,
    /// Every raw response, reprompts included.
    pub audit: Vec<AuditEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanJob {
    pub id: String,
    pub incident_id: String,
    /// Guideline file and revision the plan was built from.
    pub guidelines: String,
    pub backend: String,
    pub m: usize,
    pub reprompts: u32,
    pub status: JobStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<JobResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PlanJob {
    pub fn new(
        incident_id: &str,
        guidelines: &str,
        backend: &str,
        m: usize,
        reprompts: u32,
    ) -> Self {
        PlanJob {
            id: uuid::Uuid::new_v4().to_string(),
            incident_id: incident_id.to_string(),
            guidelines: guidelines.to_string(),
            backend: backend.to_string(),
            m,
            reprompts,
            status: JobStatus::Pending,
            result: None,
            error: None,
        }
    }

    pub fn finish(&mut self, outcome: PlanOutcome, breakdown: ScoreBreakdown) {
        let incident = self.incident_id.clone();
        self.result = Some(JobResult {
            generations: outcome
                .generations
                .iter()
                .map(|p| PlanFile::from_plan(&incident, p))
                .collect(),
            fused: PlanFile::from_plan(&incident, &outcome.fused),
            score: outcome.score,
            breakdown,
            reprompts: outcome.reprompts,
            prompt: outcome.prompt,
            audit: outcome.audit,
        });
        self.status = JobStatus::Done;
    }

    pub fn fail(&mut self, error: &dyn std::fmt::Display) {
        self.error = Some(error.to_string());
        self.status = JobStatus::Failed;
    }
}

#[derive(Debug, Clone)]
pub struct JobStore {
    dir: PathBuf,
}

impl JobStore {
    pub fn new(data_dir: &Path) -> Self {
        JobStore {
            dir: data_dir.join("jobs"),
        }
    }

    fn path(&self, id: &str) -> Result<PathBuf> {
        // ids are uuids; refuse anything that could escape the directory
        if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-') {
            return Err(Error::NotFound(format!("job {id}")));
        }
        Ok(self.dir.join(format!("{id}.json")))
    }

    pub fn save(&self, job: &PlanJob) -> Result<()> {
        write_json(&self.path(&job.id)?, job)
    }

    pub fn load(&self, id: &str) -> Result<PlanJob> {
        let path = self.path(id)?;
        if !path.exists() {
            return Err(Error::NotFound(format!("job {id}")));
        }
        read_json(&path)
    }
}
