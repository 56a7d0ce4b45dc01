//! File formats: decision matrices, weight tables, plans, score reports,
//! traces, measure specs, outcomes, networks and guideline documents.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tidss_core::catalog::{
    validate_catalog_override, validate_network, CatalogAction, NetworkLane,
};
use tidss_core::metrics::{MeasureSpec, StrategyOutcome, VehicleRecord};
use tidss_core::plan::{format_score, ScoreReport, ScoreRow, ScoreTable};
use tidss_core::synthesis::GuidelineTable;
use tidss_core::topsis::{CriterionSpec, DecisionMatrix};
use tidss_core::{BinaryPlan, WeightTable};

use crate::error::{Error, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &to_json(value))
}

fn csv_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_string(write: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    write(&mut writer).expect("writing to memory");
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("csv of utf-8 cells")
}

// Decision matrix

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlternativeRow {
    pub label: String,
    pub values: Vec<f64>,
}

/// `{criteria: [{name, weight, kind}], alternatives: [{label, values}]}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionMatrixFile {
    pub criteria: Vec<CriterionSpec>,
    pub alternatives: Vec<AlternativeRow>,
}

impl From<DecisionMatrixFile> for DecisionMatrix {
    fn from(file: DecisionMatrixFile) -> Self {
        let (alternatives, values) = file
            .alternatives
            .into_iter()
            .map(|a| (a.label, a.values))
            .unzip();
        DecisionMatrix {
            alternatives,
            criteria: file.criteria,
            values,
        }
    }
}

impl From<&DecisionMatrix> for DecisionMatrixFile {
    fn from(m: &DecisionMatrix) -> Self {
        DecisionMatrixFile {
            criteria: m.criteria.clone(),
            alternatives: m
                .alternatives
                .iter()
                .zip(&m.values)
                .map(|(label, values)| AlternativeRow {
                    label: label.clone(),
                    values: values.clone(),
                })
                .collect(),
        }
    }
}

pub fn read_decision_matrix(path: &Path) -> Result<DecisionMatrix> {
    let matrix: DecisionMatrix = read_json::<DecisionMatrixFile>(path)?.into();
    matrix.validate()?;
    Ok(matrix)
}

// Weight tables

/// JSON object of label to weight; key order is catalog order.
pub fn weights_to_json(weights: &WeightTable) -> String {
    let map: serde_json::Map<String, serde_json::Value> = weights
        .entries()
        .iter()
        .map(|(label, w)| (label.clone(), serde_json::Value::from(*w)))
        .collect();
    to_json(&map)
}

pub fn weights_from_json(text: &str, path: &Path) -> Result<WeightTable> {
    let map: serde_json::Map<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })?;
    let entries = map
        .into_iter()
        .map(|(label, v)| {
            v.as_f64()
                .map(|w| (label.clone(), w))
                .ok_or_else(|| Error::format(path, format!("weight of {label:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = WeightTable::new(entries);
    table.validate()?;
    Ok(table)
}

/// `label,weight` rows under a header.
pub fn weights_to_csv(weights: &WeightTable) -> String {
    csv_string(|w| {
        w.write_record(["label", "weight"])?;
        for (label, weight) in weights.entries() {
            w.write_record([label.as_str(), &weight.to_string()])?;
        }
        Ok(())
    })
}

pub fn weights_from_csv(text: &str, path: &Path) -> Result<WeightTable> {
    #[derive(Deserialize)]
    struct Row {
        label: String,
        weight: f64,
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let entries = reader
        .deserialize::<Row>()
        .map(|r| r.map(|r| (r.label, r.weight)))
        .collect::<csv::Result<Vec<_>>>()
        .map_err(csv_error(path))?;
    let table = WeightTable::new(entries);
    table.validate()?;
    Ok(table)
}

/// Loads a weight table from `.json` or `.csv`.
pub fn read_weights(path: &Path) -> Result<WeightTable> {
    let text = read_text(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => weights_from_csv(&text, path),
        _ => weights_from_json(&text, path),
    }
}

// Plans

/// `{incident_id, source, bits}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanFile {
    pub incident_id: String,
    pub source: String,
    pub bits: Vec<u8>,
}

impl PlanFile {
    pub fn from_plan(incident_id: &str, plan: &BinaryPlan) -> Self {
        PlanFile {
            incident_id: incident_id.to_string(),
            source: plan.source.clone(),
            bits: plan.bits().to_vec(),
        }
    }

    pub fn to_plan(&self) -> Result<BinaryPlan, tidss_core::plan::PlanError> {
        BinaryPlan::new(self.bits.clone(), self.source.clone())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(PlanFile),
    Many(Vec<PlanFile>),
}

/// Reads a single plan object or an array of them.
pub fn read_plans(path: &Path) -> Result<Vec<PlanFile>> {
    Ok(match read_json::<OneOrMany>(path)? {
        OneOrMany::One(p) => vec![p],
        OneOrMany::Many(v) => v,
    })
}

// Score reports

/// Score table parsed from CSV, with the printed "Average Difference" row
/// when the file carries one.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCsv {
    pub table: ScoreTable,
    pub printed_average: Option<Vec<Option<f64>>>,
}

pub const AVERAGE_ROW: &str = "Average Difference";

/// Reads rows of incident scores. `manual` names the manual column; `None`
/// takes the last column.
pub fn score_table_from_csv(text: &str, manual: Option<&str>, path: &Path) -> Result<ScoreCsv> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error(path))?.clone();
    let columns: Vec<String> = headers
        .iter()
        .skip(1)
        .map(|h| h.trim().to_string())
        .collect();
    let manual_column = match manual {
        Some(m) => m.to_string(),
        None => columns
            .last()
            .cloned()
            .ok_or_else(|| Error::format(path, "no score columns"))?,
    };
    let mut rows = Vec::new();
    let mut printed_average = None;
    for record in reader.records() {
        let record = record.map_err(csv_error(path))?;
        let id = record.get(0).unwrap_or("").trim().to_string();
        let scores = record
            .iter()
            .skip(1)
            .map(|cell| {
                let cell = cell.trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|_| {
                        Error::format(path, format!("row {id}: {cell:?} is not a number"))
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if id == AVERAGE_ROW {
            printed_average = Some(scores);
        } else {
            rows.push(ScoreRow {
                incident_id: id,
                scores,
            });
        }
    }
    Ok(ScoreCsv {
        table: ScoreTable {
            columns,
            manual_column,
            rows,
        },
        printed_average,
    })
}

/// Rows are incidents, columns are models in input order, the last row is
/// the average difference. Values have two decimals; missing scores are
/// empty cells.
pub fn score_report_csv(table: &ScoreTable, report: &ScoreReport) -> String {
    csv_string(|w| {
        let mut header = vec!["Incident".to_string()];
        header.extend(table.columns.iter().cloned());
        w.write_record(&header)?;
        for row in &table.rows {
            let mut cells = vec![row.incident_id.clone()];
            cells.extend(
                row.scores
                    .iter()
                    .map(|s| s.map(format_score).unwrap_or_default()),
            );
            w.write_record(&cells)?;
        }
        let mut last = vec![AVERAGE_ROW.to_string()];
        last.extend(
            table
                .columns
                .iter()
                .map(|c| report.average_for(c).map(format_score).unwrap_or_default()),
        );
        w.write_record(&last)
    })
}

// Traffic measures

/// Trace CSV with columns vehicle_id, speed, waiting_time, time_loss,
/// total_travel_time.
pub fn read_trace(path: &Path) -> Result<Vec<VehicleRecord>> {
    let text = read_text(path)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<csv::Result<Vec<VehicleRecord>>>()
        .map_err(csv_error(path))
}

pub fn read_measure_specs(path: &Path) -> Result<Vec<MeasureSpec>> {
    read_json(path)
}

/// strategy_id, one column per measure in spec order, then H.
pub fn outcomes_csv(outcomes: &[StrategyOutcome], specs: &[MeasureSpec]) -> String {
    csv_string(|w| {
        let mut header = vec!["strategy_id".to_string()];
        header.extend(specs.iter().map(|s| s.name.clone()));
        header.push("H".into());
        w.write_record(&header)?;
        for o in outcomes {
            let mut row = vec![o.strategy_id.clone()];
            row.extend(specs.iter().map(|s| {
                o.values
                    .get(&s.name)
                    .map(|v| v.to_string())
                    .unwrap_or_default()
            }));
            row.push(o.heuristic.to_string());
            w.write_record(&row)?;
        }
        Ok(())
    })
}

// Network and catalog

pub fn read_network(path: &Path) -> Result<Vec<NetworkLane>> {
    let network: Vec<NetworkLane> = read_json(path)?;
    validate_network(&network)?;
    Ok(network)
}

/// Replacement scores for the ten catalog actions.
pub fn read_catalog_override(path: &Path) -> Result<Vec<CatalogAction>> {
    Ok(validate_catalog_override(read_json(path)?)?)
}

// Guidelines

pub const GUIDELINE_FORMAT_VERSION: u32 = 1;

/// A stored guideline table. `revision` increases each time the table is
/// re-synthesized into the same file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidelineDocument {
    pub format_version: u32,
    pub revision: u32,
    pub backend: String,
    pub table: GuidelineTable,
}

pub fn read_guidelines(path: &Path) -> Result<GuidelineDocument> {
    let doc: GuidelineDocument = read_json(path)?;
    if doc.format_version != GUIDELINE_FORMAT_VERSION {
        return Err(Error::format(
            path,
            format!(
                "guideline format version {} is not supported",
                doc.format_version
            ),
        ));
    }
    Ok(doc)
}

/// Writes `table` to `path`, bumping the revision of any document already
/// there.
pub fn save_guidelines(
    path: &Path,
    table: GuidelineTable,
    backend: &str,
) -> Result<GuidelineDocument> {
    let revision = if path.exists() {
        read_guidelines(path)?.revision + 1
    } else {
        1
    };
    let doc = GuidelineDocument {
        format_version: GUIDELINE_FORMAT_VERSION,
        revision,
        backend: backend.to_string(),
        table,
    };
    write_json(path, &doc)?;
    Ok(doc)
}
