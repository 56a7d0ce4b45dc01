//! Regenerates the reference tables from fixtures and checks each value
//! against its expected counterpart within a fixed tolerance.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use tidss_core::plan::{compare_to_manual, render_bits, score_plan};
use tidss_core::topsis::{self, derive_action_weights};
use tidss_core::BinaryPlan;

use crate::error::{Error, Result};
use crate::formats::{
    read_decision_matrix, read_json, read_plans, read_text, read_weights, score_table_from_csv,
    write_text, PlanFile,
};

pub const DECISION_MATRIX: &str = "decision_matrix.json";
pub const EXPECTED_TABLES: &str = "expected_tables.json";
pub const MODEL_SCORES: &str = "model_scores.csv";
pub const MODEL_PLANS: &str = "model_plans.json";
pub const EXAMPLE_WEIGHTS: &str = "example_weights.json";
pub const EXAMPLE_COMPARISON: &str = "example_comparison.json";

#[derive(Debug, Deserialize)]
struct LabeledValues {
    label: String,
    values: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct MatrixCheck {
    tolerance: f64,
    rows: Vec<LabeledValues>,
}

#[derive(Debug, Deserialize)]
struct IdealCheck {
    tolerance: f64,
    a_plus: Vec<f64>,
    a_minus: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct ClosenessRow {
    label: String,
    closeness: f64,
    rank: usize,
}

#[derive(Debug, Deserialize)]
struct ClosenessCheck {
    tolerance: f64,
    rows: Vec<ClosenessRow>,
}

#[derive(Debug, Deserialize)]
struct SpotCheck {
    name: String,
    bits: Vec<u8>,
    expected: f64,
}

#[derive(Debug, Deserialize)]
struct SpotChecks {
    tolerance: f64,
    rows: Vec<SpotCheck>,
}

#[derive(Debug, Deserialize)]
struct ToleranceOnly {
    tolerance: f64,
}

#[derive(Debug, Deserialize)]
struct ExpectedTables {
    normalized: MatrixCheck,
    weighted: MatrixCheck,
    ideal: IdealCheck,
    closeness: ClosenessCheck,
    spot_checks: SpotChecks,
    average_difference: ToleranceOnly,
}

#[derive(Debug, Deserialize)]
struct ExampleComparison {
    listed_totals: std::collections::BTreeMap<String, f64>,
    plans: Vec<PlanFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported for reference, not checked.
    Info,
}

impl Status {
    fn within(got: f64, expected: f64, tolerance: f64) -> Self {
        if (got - expected).abs() <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn and(self, other: Status) -> Self {
        if self == Status::Fail || other == Status::Fail {
            Status::Fail
        } else {
            self
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

/// One regenerated table: CSV rows whose last cell is the status.
#[derive(Debug, Clone)]
pub struct CheckedTable {
    pub name: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<(Vec<String>, Status)>,
}

impl CheckedTable {
    fn new(name: &'static str, header: &[&str]) -> Self {
        CheckedTable {
            name,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, cells: Vec<String>, status: Status) {
        self.rows.push((cells, status));
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|(_, s)| *s == status).count()
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = self.header.clone();
        header.push("status".into());
        writer.write_record(&header).expect("writing to memory");
        for (cells, status) in &self.rows {
            let mut row = cells.clone();
            row.push(status.as_str().into());
            writer.write_record(&row).expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 cells")
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub tables: Vec<CheckedTable>,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.tables.iter().all(|t| t.count(Status::Fail) == 0)
    }

    pub fn table(&self, name: &str) -> Option<&CheckedTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn summary_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer
            .write_record(["table", "pass", "fail", "info"])
            .expect("writing to memory");
        for t in &self.tables {
            writer
                .write_record([
                    t.name.to_string(),
                    t.count(Status::Pass).to_string(),
                    t.count(Status::Fail).to_string(),
                    t.count(Status::Info).to_string(),
                ])
                .expect("writing to memory");
        }
        String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 cells")
    }

    /// Writes `<name>.csv` per table plus `summary.csv`.
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for t in &self.tables {
            let path = out.join(format!("{}.csv", t.name));
            write_text(&path, &t.to_csv())?;
            written.push(path);
        }
        let path = out.join("summary.csv");
        write_text(&path, &self.summary_csv())?;
        written.push(path);
        Ok(written)
    }
}

fn fixture(dir: &Path, name: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::FixtureMissing(path))
    }
}

fn num(v: f64) -> String {
    format!("{v:.6}")
}

pub fn reproduce_tables(fixtures: &Path) -> Result<Reproduction> {
    let matrix = read_decision_matrix(&fixture(fixtures, DECISION_MATRIX)?)?;
    let expected: ExpectedTables = read_json(&fixture(fixtures, EXPECTED_TABLES)?)?;
    let scores_path = fixture(fixtures, MODEL_SCORES)?;
    let plans = read_plans(&fixture(fixtures, MODEL_PLANS)?)?;

    let result = topsis::run(&matrix)?;
    let weights = derive_action_weights(&matrix)?;
    let criteria: Vec<&str> = matrix.criteria.iter().map(|c| c.name.as_str()).collect();
    let mut tables = Vec::new();

    for (name, values, check) in [
        (
            "normalized_matrix",
            &result.normalized,
            &expected.normalized,
        ),
        ("weighted_matrix", &result.weighted, &expected.weighted),
    ] {
        let mut header = vec!["action".to_string()];
        header.extend(criteria.iter().map(|c| c.to_string()));
        header.extend(criteria.iter().map(|c| format!("expected {c}")));
        header.push("tolerance".into());
        let mut table = CheckedTable {
            name,
            header,
            rows: Vec::new(),
        };
        for (i, label) in matrix.alternatives.iter().enumerate() {
            let reference = check.rows.iter().find(|r| r.label == *label);
            let status = match reference {
                Some(r) if r.values.len() == values[i].len() => values[i]
                    .iter()
                    .zip(&r.values)
                    .fold(Status::Pass, |s, (got, want)| {
                        s.and(Status::within(*got, *want, check.tolerance))
                    }),
                _ => Status::Fail,
            };
            let mut cells = vec![label.clone()];
            cells.extend(values[i].iter().map(|v| num(*v)));
            cells.extend(
                reference
                    .map(|r| r.values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
                    .unwrap_or_else(|| vec![String::new(); criteria.len()]),
            );
            cells.push(check.tolerance.to_string());
            table.push(cells, status);
        }
        tables.push(table);
    }

    let mut ideal = CheckedTable::new(
        "ideal_solutions",
        &["solution", "values", "expected", "tolerance"],
    );
    for (label, got, want) in [
        ("A+", &result.a_plus, &expected.ideal.a_plus),
        ("A-", &result.a_minus, &expected.ideal.a_minus),
    ] {
        let status = if got.len() == want.len() {
            got.iter().zip(want).fold(Status::Pass, |s, (g, w)| {
                s.and(Status::within(*g, *w, expected.ideal.tolerance))
            })
        } else {
            Status::Fail
        };
        let join = |v: &[f64]| v.iter().map(|x| num(*x)).collect::<Vec<_>>().join(" ");
        ideal.push(
            vec![
                label.into(),
                join(got),
                join(want),
                expected.ideal.tolerance.to_string(),
            ],
            status,
        );
    }
    tables.push(ideal);

    let mut scores = CheckedTable::new(
        "topsis_scores",
        &[
            "action",
            "S+",
            "S-",
            "closeness",
            "rank",
            "expected closeness",
            "expected rank",
            "tolerance",
        ],
    );
    for (i, label) in matrix.alternatives.iter().enumerate() {
        let reference = expected.closeness.rows.iter().find(|r| r.label == *label);
        let status = match reference {
            Some(r) => Status::within(
                result.closeness[i],
                r.closeness,
                expected.closeness.tolerance,
            )
            .and(if result.ranks[i] == r.rank {
                Status::Pass
            } else {
                Status::Fail
            }),
            None => Status::Fail,
        };
        scores.push(
            vec![
                label.clone(),
                num(result.s_plus[i]),
                num(result.s_minus[i]),
                num(result.closeness[i]),
                result.ranks[i].to_string(),
                reference.map(|r| num(r.closeness)).unwrap_or_default(),
                reference.map(|r| r.rank.to_string()).unwrap_or_default(),
                expected.closeness.tolerance.to_string(),
            ],
            status,
        );
    }
    tables.push(scores);

    // Spot checks are pass/fail; the other plans are scored for reference
    // next to the score listed for the same cell in the score fixture.
    let printed = score_table_from_csv(&read_text(&scores_path)?, None, &scores_path)?;
    let mut plan_scores = CheckedTable::new(
        "plan_scores",
        &[
            "incident",
            "model",
            "bits",
            "score",
            "expected",
            "tolerance",
        ],
    );
    for spot in &expected.spot_checks.rows {
        let plan = BinaryPlan::with_len(spot.bits.clone(), weights.len(), spot.name.clone())?;
        let score = score_plan(&plan, &weights)?;
        plan_scores.push(
            vec![
                spot.name.clone(),
                String::new(),
                render_bits(plan.bits()),
                format!("{score:.3}"),
                spot.expected.to_string(),
                expected.spot_checks.tolerance.to_string(),
            ],
            Status::within(score, spot.expected, expected.spot_checks.tolerance),
        );
    }
    for p in &plans {
        let plan = BinaryPlan::with_len(p.bits.clone(), weights.len(), p.source.clone())?;
        let score = score_plan(&plan, &weights)?;
        let listed = printed
            .table
            .rows
            .iter()
            .find(|r| r.incident_id == p.incident_id)
            .and_then(|r| {
                let col = printed
                    .table
                    .columns
                    .iter()
                    .position(|c| c.eq_ignore_ascii_case(&p.source))?;
                r.scores[col]
            });
        plan_scores.push(
            vec![
                p.incident_id.clone(),
                p.source.clone(),
                render_bits(plan.bits()),
                format!("{score:.3}"),
                listed.map(|v| format!("{v:.2}")).unwrap_or_default(),
                String::new(),
            ],
            Status::Info,
        );
    }
    tables.push(plan_scores);

    let report = compare_to_manual(&printed.table)?;
    let tolerance = expected.average_difference.tolerance;
    let mut averages = CheckedTable::new(
        "average_difference",
        &["model", "average difference", "expected", "tolerance"],
    );
    for (i, column) in printed.table.columns.iter().enumerate() {
        let got = report.average_for(column).unwrap_or(f64::NAN);
        let want = printed
            .printed_average
            .as_ref()
            .and_then(|row| row.get(i).copied().flatten());
        let status = match want {
            Some(w) => Status::within(got, w, tolerance),
            None => Status::Fail,
        };
        averages.push(
            vec![
                column.clone(),
                format!("{got:.4}"),
                want.map(|w| format!("{w:.2}")).unwrap_or_default(),
                tolerance.to_string(),
            ],
            status,
        );
    }
    tables.push(averages);

    // The worked comparison example is optional and informational: its
    // listed totals do not follow from its own weights and bits.
    let (weights_path, example_path) = (
        fixtures.join(EXAMPLE_WEIGHTS),
        fixtures.join(EXAMPLE_COMPARISON),
    );
    if weights_path.is_file() && example_path.is_file() {
        let example_weights = read_weights(&weights_path)?;
        let example: ExampleComparison = read_json(&example_path)?;
        let mut rows = CheckedTable::new(
            "example_comparison",
            &["plan", "bits", "score", "listed total"],
        );
        for p in &example.plans {
            let plan =
                BinaryPlan::with_len(p.bits.clone(), example_weights.len(), p.source.clone())?;
            let score = score_plan(&plan, &example_weights)?;
            rows.push(
                vec![
                    plan.source.clone(),
                    render_bits(plan.bits()),
                    format!("{score:.3}"),
                    example
                        .listed_totals
                        .get(&plan.source)
                        .map(|v| v.to_string())
                        .unwrap_or_default(),
                ],
                Status::Info,
            );
        }
        tables.push(rows);
    }

    Ok(Reproduction { tables })
}
