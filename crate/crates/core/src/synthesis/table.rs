//! Pipe/markdown tables in model output, and the guideline table schema.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

/// A parsed pipe table: header cells plus data rows of equal width.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableError {
    NoTable,
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::NoTable => f.write_str("response contains no pipe table"),
            TableError::RaggedRow {
                line,
                expected,
                found,
            } => {
                write!(
                    f,
                    "table line {line} has {found} cells, header has {expected}"
                )
            }
        }
    }
}

fn is_table_line(line: &str) -> bool {
    let t = line.trim();
    t.starts_with('|') || (t.contains('|') && t.matches('|').count() >= 2)
}

fn is_rule_line(line: &str) -> bool {
    let t = line.trim();
    t.contains('-') && t.chars().all(|c| matches!(c, '|' | '-' | ':' | ' ' | '+'))
}

fn split_cells(line: &str) -> Vec<String> {
    let t = line.trim();
    let t = t.strip_prefix('|').unwrap_or(t);
    let t = t.strip_suffix('|').unwrap_or(t);
    t.split('|').map(|c| c.trim().to_string()).collect()
}

impl TextTable {
    /// Parses the first block of consecutive pipe-delimited lines. Markdown
    /// rule lines (`|---|:--|`) are skipped. Every data row must have as
    /// many cells as the header.
    pub fn parse(text: &str) -> Result<TextTable, TableError> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .skip_while(|(_, l)| !is_table_line(l))
            .take_while(|(_, l)| is_table_line(l))
            .collect();
        let mut iter = lines.iter().filter(|(_, l)| !is_rule_line(l));
        let (_, header) = iter.next().ok_or(TableError::NoTable)?;
        let headers = split_cells(header);
        let mut rows = Vec::new();
        for (line, raw) in iter {
            let cells = split_cells(raw);
            if cells.len() != headers.len() {
                return Err(TableError::RaggedRow {
                    line: line + 1,
                    expected: headers.len(),
                    found: cells.len(),
                });
            }
            rows.push(cells);
        }
        Ok(TextTable { headers, rows })
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        out.push_str(&line(&self.headers));
        out.push('|');
        for _ in &self.headers {
            out.push_str("---|");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Low,
    Moderate,
    High,
    VeryHigh,
    Variable,
}

impl Severity {
    pub fn parse(s: &str) -> Option<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        match key.as_str() {
            "low" => Some(Severity::Low),
            "moderate" | "medium" => Some(Severity::Moderate),
            "high" => Some(Severity::High),
            "veryhigh" | "critical" => Some(Severity::VeryHigh),
            "variable" => Some(Severity::Variable),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Severity::Low => "Low",
            Severity::Moderate => "Moderate",
            Severity::High => "High",
            Severity::VeryHigh => "Very High",
            Severity::Variable => "Variable",
        }
    }
}

/// One scenario with its recommended actions and equipment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidelineRow {
    pub scenario_id: u32,
    pub incident_type: String,
    pub severity: Severity,
    pub location: String,
    pub actions: Vec<String>,
    pub equipment: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuidelineTable {
    pub rows: Vec<GuidelineRow>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemaError {
    Table(TableError),
    MissingColumn(&'static str),
    BadScenarioId { row: usize, value: String },
    BadSeverity { row: usize, value: String },
    NoActions { row: usize },
    DuplicateScenario(u32),
    Empty,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemaError::Table(e) => e.fmt(f),
            SchemaError::MissingColumn(c) => write!(f, "missing column {c:?}"),
            SchemaError::BadScenarioId { row, value } => {
                write!(f, "row {row}: scenario id {value:?} is not an integer")
            }
            SchemaError::BadSeverity { row, value } => {
                write!(f, "row {row}: unknown severity {value:?}")
            }
            SchemaError::NoActions { row } => write!(f, "row {row} lists no actions"),
            SchemaError::DuplicateScenario(id) => {
                write!(f, "scenario id {id} appears more than once")
            }
            SchemaError::Empty => f.write_str("table has no rows"),
        }
    }
}

/// Splits a cell holding several items: `<br>`, `;`, LaTeX `\newline` and
/// line breaks separate items, and bullet markers are dropped.
pub fn split_items(cell: &str) -> Vec<String> {
    let mut normalized = String::from(cell);
    for sep in ["<br />", "<br/>", "<br>", "\\newline", "\n"] {
        normalized = normalized.replace(sep, ";");
    }
    normalized
        .split(';')
        .map(|item| {
            item.trim()
                .trim_start_matches(['-', '*', '•'])
                .trim()
                .to_string()
        })
        .filter(|item| !item.is_empty())
        .collect()
}

const COLUMNS: [(&str, &[&str]); 6] = [
    ("Scenario ID", &["scenario"]),
    ("Incident Type", &["incident", "type"]),
    ("Severity", &["severity"]),
    ("Location", &["location"]),
    ("Action", &["action"]),
    (
        "Equipment/Technology Required",
        &["equipment", "technology"],
    ),
];

fn matches_column(header: &str, keys: &[&str]) -> bool {
    let header = header.to_lowercase();
    keys.iter().any(|k| header.contains(k))
}

impl GuidelineTable {
    /// Parses a scenario-action table with the six columns Scenario ID,
    /// Incident Type, Severity, Location, Action and Equipment/Technology
    /// Required. Headers match by keyword, case-insensitively.
    pub fn parse(text: &str) -> Result<GuidelineTable, SchemaError> {
        let table = TextTable::parse(text).map_err(SchemaError::Table)?;
        Self::from_text_table(&table)
    }

    pub fn from_text_table(table: &TextTable) -> Result<GuidelineTable, SchemaError> {
        let mut idx = [0usize; 6];
        // a header is claimed by the first column that matches it
        for (slot, (name, keys)) in COLUMNS.iter().enumerate() {
            idx[slot] = table
                .headers
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx[..slot].contains(i))
                .find(|(_, h)| matches_column(h, keys))
                .map(|(i, _)| i)
                .ok_or(SchemaError::MissingColumn(name))?;
        }

        if table.rows.is_empty() {
            return Err(SchemaError::Empty);
        }
        let mut rows: Vec<GuidelineRow> = Vec::with_capacity(table.rows.len());
        for (r, cells) in table.rows.iter().enumerate() {
            let row_no = r + 1;
            let id_cell = cells[idx[0]].trim();
            let scenario_id: u32 = id_cell.parse().map_err(|_| SchemaError::BadScenarioId {
                row: row_no,
                value: id_cell.to_string(),
            })?;
            let severity =
                Severity::parse(&cells[idx[2]]).ok_or_else(|| SchemaError::BadSeverity {
                    row: row_no,
                    value: cells[idx[2]].clone(),
                })?;
            let actions = split_items(&cells[idx[4]]);
            if actions.is_empty() {
                return Err(SchemaError::NoActions { row: row_no });
            }
            if rows
                .iter()
                .any(|existing| existing.scenario_id == scenario_id)
            {
                return Err(SchemaError::DuplicateScenario(scenario_id));
            }
            rows.push(GuidelineRow {
                scenario_id,
                incident_type: cells[idx[1]].trim().to_string(),
                severity,
                location: cells[idx[3]].trim().to_string(),
                actions,
                equipment: split_items(&cells[idx[5]]),
            });
        }
        Ok(GuidelineTable { rows })
    }

    /// Markdown rendering with `<br>` between list items; parses back to
    /// the same table.
    pub fn to_markdown(&self) -> String {
        let table = TextTable {
            headers: COLUMNS.iter().map(|(name, _)| name.to_string()).collect(),
            rows: self
                .rows
                .iter()
                .map(|row| {
                    alloc::vec![
                        row.scenario_id.to_string(),
                        row.incident_type.clone(),
                        row.severity.label().to_string(),
                        row.location.clone(),
                        row.actions.join("<br>"),
                        row.equipment.join("<br>"),
                    ]
                })
                .collect(),
        };
        table.to_markdown()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "Here is the table:\n\n\
| Scenario ID | Incident Type | Severity | Location | Action | Equipment/Technology Required |\n\
|---|---|---|---|---|---|\n\
| 1 | Vehicle Breakdown | Low | Highway/Freeway Lane | - Deploy Incident Response Vehicle<br>- Temporary lane closure | Service Patrol Vehicle<br>Traffic Cones or Barriers |\n\
| 5 | Overturned Truck | Moderate | Highway On-ramp/Off-ramp | Partial ramp closure; Speed limit reduction in area | Tow Trucks |\n\
\nLet me know if you need more.";

    #[test]
    fn parses_pipe_table() {
        let t = TextTable::parse(SAMPLE).unwrap();
        assert_eq!(t.headers.len(), 6);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[1][1], "Overturned Truck");
    }

    #[test]
    fn ragged_and_missing() {
        assert_eq!(
            TextTable::parse("no table here").unwrap_err(),
            TableError::NoTable
        );
        let err = TextTable::parse("| a | b |\n|---|---|\n| 1 |\n").unwrap_err();
        assert!(matches!(
            err,
            TableError::RaggedRow {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn guideline_rows() {
        let g = GuidelineTable::parse(SAMPLE).unwrap();
        assert_eq!(
            g.rows[0].actions,
            ["Deploy Incident Response Vehicle", "Temporary lane closure"]
        );
        assert_eq!(g.rows[1].severity, Severity::Moderate);
        assert_eq!(
            g.rows[1].actions,
            ["Partial ramp closure", "Speed limit reduction in area"]
        );
    }

    #[test]
    fn markdown_round_trip() {
        let g = GuidelineTable::parse(SAMPLE).unwrap();
        assert_eq!(GuidelineTable::parse(&g.to_markdown()).unwrap(), g);
    }

    #[test]
    fn schema_gate() {
        let no_severity = "| Scenario ID | Incident Type | Location | Action | Equipment |\n|---|---|---|---|---|\n| 1 | Fog | Highway | Slow down | VMS |\n";
        assert_eq!(
            GuidelineTable::parse(no_severity).unwrap_err(),
            SchemaError::MissingColumn("Severity")
        );
        let dup = "| Scenario ID | Incident Type | Severity | Location | Action | Equipment |\n|---|---|---|---|---|---|\n| 1 | Fog | Low | Highway | Slow down | VMS |\n| 1 | Fog | Low | Highway | Slow down | VMS |\n";
        assert_eq!(
            GuidelineTable::parse(dup).unwrap_err(),
            SchemaError::DuplicateScenario(1)
        );
        let no_action = "| Scenario ID | Incident Type | Severity | Location | Action | Equipment |\n|---|---|---|---|---|---|\n| 1 | Fog | Low | Highway |  | VMS |\n";
        assert_eq!(
            GuidelineTable::parse(no_action).unwrap_err(),
            SchemaError::NoActions { row: 1 }
        );
    }

    #[test]
    fn severity_labels() {
        assert_eq!(Severity::parse("Very High"), Some(Severity::VeryHigh));
        assert_eq!(Severity::parse("variable"), Some(Severity::Variable));
        assert_eq!(Severity::parse("extreme"), None);
    }
}
