use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tidss_core::incident::render_incident_report;
use tidss_core::metrics::{aggregate_measures, best_outcome, evaluate_outcome, Objective};

use crate::app::{compare_table, App};
use crate::error::{Error, Result};
use crate::formats::{
    read_decision_matrix, read_measure_specs, read_plans, read_text, read_trace, save_guidelines,
    score_table_from_csv, to_json, weights_to_csv, weights_to_json, write_text, PlanFile,
};
use crate::ingest::write_reports_jsonl;
use crate::reproduce::reproduce_tables;

#[derive(Debug, Parser)]
#[command(name = "tidss", version, about = "Traffic incident response planning")]
pub struct Cli {
    /// Configuration file (JSON). Built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Backend id from the configuration.
    #[arg(long, global = true)]
    pub backend: Option<String>,
    /// Generations fused per plan.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Weight table (JSON or CSV) used instead of the configured source.
    #[arg(long, global = true)]
    pub weights_file: Option<PathBuf>,
    /// Output file or directory, depending on the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ObjectiveArg {
    Max,
    Min,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Condense a guideline document into a guideline table.
    Synthesize {
        /// Plain-text guideline document.
        #[arg(long)]
        document: PathBuf,
    },
    /// Action weights from a decision matrix (the catalog when omitted).
    Weights {
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Generate, fuse and score a response plan for one incident.
    Generate {
        #[arg(long)]
        incident: String,
        #[arg(long)]
        accidents: Option<PathBuf>,
        #[arg(long)]
        guidelines: Option<PathBuf>,
        #[arg(long)]
        reprompts: Option<u32>,
    },
    /// Score a plan file or a literal vector such as 1,0,1.
    Score {
        #[arg(long, conflicts_with = "bits")]
        plan: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        bits: Option<Vec<u8>>,
    },
    /// Majority-fuse plans from one or more plan files.
    Fuse {
        #[arg(required = true)]
        plans: Vec<PathBuf>,
    },
    /// Compare model plans or a score table with the manual solution.
    Compare {
        /// Plan files; sources name the columns.
        #[arg(long, num_args = 1.., conflicts_with = "scores")]
        plans: Vec<PathBuf>,
        /// Score table CSV, incidents by models.
        #[arg(long)]
        scores: Option<PathBuf>,
        /// Column holding the manual solution.
        #[arg(long)]
        manual: Option<String>,
    },
    /// Regenerate the reference tables from fixtures with pass/fail marks.
    ReproduceTables {
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
    /// Render incident reports, one JSON line per record.
    Report {
        #[arg(long)]
        accidents: Option<PathBuf>,
        #[arg(long)]
        incident: Option<String>,
    },
    /// Heuristic H for strategy traces; the file stem is the strategy id.
    Evaluate {
        #[arg(long)]
        measures: PathBuf,
        #[arg(required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "max")]
        objective: ObjectiveArg,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
}

/// Writes to `--out` when given, stdout otherwise.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_app(cli: &Cli) -> Result<App> {
    let app = App::load(cli.config.as_deref())?;
    match &cli.weights_file {
        Some(path) => app.with_weights_file(path),
        None => Ok(app),
    }
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Synthesize { document } => {
            let app = load_app(&cli)?;
            let text = read_text(document)?;
            let backend_id = app.backend_config(cli.backend.as_deref())?.id.clone();
            let result = app.synthesize(&text, cli.backend.as_deref())?;
            match out {
                Some(path) => {
                    let doc = save_guidelines(path, result.table, &backend_id)?;
                    eprintln!(
                        "{} scenarios, revision {} -> {}",
                        doc.table.rows.len(),
                        doc.revision,
                        path.display()
                    );
                }
                None => print!("{}", result.table.to_markdown()),
            }
        }
        Command::Weights { matrix } => {
            let app = load_app(&cli)?;
            let weights = match matrix {
                Some(path) => app.topsis(&read_decision_matrix(path)?)?.1,
                None => app.weights().clone(),
            };
            emit(out, &weights_to_json(&weights))?;
            if let Some(path) = out {
                write_text(&path.with_extension("csv"), &weights_to_csv(&weights))?;
            }
        }
        Command::Generate {
            incident,
            accidents,
            guidelines,
            reprompts,
        } => {
            let app = load_app(&cli)?;
            let record = app.incident(incident, accidents.as_deref())?;
            let path = app.guidelines_path(guidelines.as_deref())?;
            let doc = app.guidelines(Some(&path))?;
            let job = app.generate(
                &record,
                &doc,
                &path.display().to_string(),
                cli.backend.as_deref(),
                cli.m,
                *reprompts,
            )?;
            let result = match (&job.result, &job.error) {
                (Some(result), _) => result,
                (None, error) => {
                    eprintln!(
                        "job {} failed: {}",
                        job.id,
                        error.as_deref().unwrap_or("unknown error")
                    );
                    return Ok(ExitCode::FAILURE);
                }
            };
            let plan = PlanFile {
                incident_id: job.incident_id.clone(),
                source: job.backend.clone(),
                bits: result.fused.bits.clone(),
            };
            emit(out, &to_json(&plan))?;
            eprintln!(
                "job {}: score {:.3}, {} reprompts",
                job.id, result.score, result.reprompts
            );
        }
        Command::Score { plan, bits } => {
            let app = load_app(&cli)?;
            let bits = match (plan, bits) {
                (Some(path), _) => {
                    let plans = read_plans(path)?;
                    let [single] = plans.as_slice() else {
                        return Err(Error::format(path, "expected exactly one plan"));
                    };
                    single.bits.clone()
                }
                (None, Some(bits)) => bits.clone(),
                (None, None) => return Err(Error::Config("give --plan or --bits".into())),
            };
            emit(out, &to_json(&app.score(bits)?))?;
        }
        Command::Fuse { plans } => {
            let app = load_app(&cli)?;
            let mut vectors = Vec::new();
            let mut incident = None;
            for path in plans {
                for p in read_plans(path)? {
                    incident.get_or_insert_with(|| p.incident_id.clone());
                    vectors.push(p.bits);
                }
            }
            let fused = app.fuse(vectors)?;
            let plan = PlanFile {
                incident_id: incident.unwrap_or_default(),
                source: fused.source,
                bits: fused.bits,
            };
            emit(out, &to_json(&plan))?;
        }
        Command::Compare {
            plans,
            scores,
            manual,
        } => {
            let app = load_app(&cli)?;
            let comparison = match scores {
                Some(path) => compare_table(
                    score_table_from_csv(&read_text(path)?, manual.as_deref(), path)?.table,
                )?,
                None => {
                    let mut all = Vec::new();
                    for path in plans {
                        all.extend(read_plans(path)?);
                    }
                    app.compare(&all, manual.as_deref())?
                }
            };
            emit(out, &comparison.csv)?;
        }
        Command::ReproduceTables { fixtures } => {
            let dir = match fixtures {
                Some(dir) => dir.clone(),
                None => load_app(&cli)?.config.fixtures_dir,
            };
            let reproduction = reproduce_tables(&dir)?;
            if let Some(out) = out {
                reproduction.write(out)?;
            }
            print!("{}", reproduction.summary_csv());
            if !reproduction.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Report {
            accidents,
            incident,
        } => {
            let app = load_app(&cli)?;
            let batch = app.accidents(accidents.as_deref())?;
            match incident {
                Some(id) => {
                    let record = batch
                        .find(id)
                        .ok_or_else(|| Error::NotFound(format!("incident {id}")))?;
                    emit(out, &format!("{}\n", render_incident_report(record)))?;
                }
                None => {
                    let mut buffer = Vec::new();
                    write_reports_jsonl(&batch.records, &mut buffer)
                        .map_err(|e| Error::io("<memory>", e))?;
                    emit(out, &String::from_utf8(buffer).expect("json is utf-8"))?;
                }
            }
        }
        Command::Evaluate {
            measures,
            traces,
            objective,
        } => {
            let specs = read_measure_specs(measures)?;
            let mut outcomes = Vec::new();
            for path in traces {
                let id = path
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or("strategy");
                let values = aggregate_measures(&read_trace(path)?)?;
                let (outcome, score) = evaluate_outcome(id, values, &specs)?;
                if !score.clamped.is_empty() {
                    log::warn!("{id}: clamped {}", score.clamped.join(", "));
                }
                outcomes.push(outcome);
            }
            let objective = match objective {
                ObjectiveArg::Max => Objective::Maximize,
                ObjectiveArg::Min => Objective::Minimize,
            };
            emit(out, &crate::formats::outcomes_csv(&outcomes, &specs))?;
            eprintln!("best: {}", best_outcome(&outcomes, objective)?);
        }
        Command::Serve { addr } => {
            let app = load_app(&cli)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| Error::io("<runtime>", e))?;
            runtime
                .block_on(crate::service::serve(app, *addr))
                .map_err(|e| Error::io(addr.to_string(), e))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
