//! Accident records in the US-Accidents CSV layout.
//!
//! Parsing is driven by the header row, so column order does not matter and
//! unknown columns are ignored. Empty cells become absent fields. Type and
//! range errors are collected per row instead of aborting the file, up to an
//! error budget.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};

use chrono::{Datelike, NaiveDateTime, Timelike};
use serde::Serialize;
use tidss_core::incident::{format_decimal, render_incident_report, DayNight, IncidentRecord};

pub const ID_COLUMN: &str = "ID";

/// Boolean point-of-interest columns. A true cell adds the column name, with
/// underscores as spaces, to the record's flags.
pub const POI_COLUMNS: [&str; 13] = [
    "Amenity",
    "Bump",
    "Crossing",
    "Give_Way",
    "Junction",
    "No_Exit",
    "Railway",
    "Roundabout",
    "Station",
    "Stop",
    "Traffic_Calming",
    "Traffic_Signal",
    "Turning_Loop",
];

/// Columns written by [`write_accident_csv`].
pub const CSV_COLUMNS: [&str; 42] = [
    "ID",
    "Source",
    "Severity",
    "Start_Lat",
    "Start_Lng",
    "Distance(mi)",
    "Description",
    "Street",
    "City",
    "County",
    "State",
    "Zipcode",
    "Timezone",
    "Airport_Code",
    "Temperature(F)",
    "Humidity(%)",
    "Pressure(in)",
    "Visibility(mi)",
    "Wind_Direction",
    "Wind_Speed(mph)",
    "Weather_Condition",
    "Amenity",
    "Bump",
    "Crossing",
    "Give_Way",
    "Junction",
    "No_Exit",
    "Railway",
    "Roundabout",
    "Station",
    "Stop",
    "Traffic_Calming",
    "Traffic_Signal",
    "Turning_Loop",
    "Sunrise_Sunset",
    "Civil_Twilight",
    "Nautical_Twilight",
    "Astronomical_Twilight",
    "Start_Time_hour",
    "Start_Time_month",
    "Weather_Timestamp_hour",
    "Weather_Timestamp_month",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowError {
    /// 1-based line in the input, header included.
    pub line: u64,
    pub field: String,
    pub message: String,
}

impl fmt::Display for RowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, {}: {}", self.line, self.field, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("header has no {0:?} column")]
    HeaderMismatch(String),
    #[error("{} row errors exceed the budget of {budget}; first: {}", errors.len(), errors[0])]
    ErrorBudget {
        budget: usize,
        errors: Vec<RowError>,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy)]
pub struct IngestOptions {
    /// Rows with errors tolerated before parsing fails.
    pub error_budget: usize,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { error_budget: 100 }
    }
}

#[derive(Debug, Default)]
pub struct AccidentBatch {
    pub records: Vec<IncidentRecord>,
    /// Rows skipped because of type or range errors.
    pub errors: Vec<RowError>,
}

impl AccidentBatch {
    pub fn find(&self, id: &str) -> Option<&IncidentRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

struct Row<'a> {
    columns: &'a HashMap<String, usize>,
    record: &'a csv::StringRecord,
    line: u64,
}

impl Row<'_> {
    fn text(&self, column: &str) -> Option<String> {
        let cell = self.record.get(*self.columns.get(column)?)?.trim();
        (!cell.is_empty()).then(|| cell.to_string())
    }

    fn error(&self, field: &str, message: impl Into<String>) -> RowError {
        RowError {
            line: self.line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn parsed<T: std::str::FromStr>(&self, column: &str) -> Result<Option<T>, RowError> {
        match self.text(column) {
            None => Ok(None),
            Some(cell) => cell
                .parse()
                .map(Some)
                .map_err(|_| self.error(column, format!("cannot parse {cell:?}"))),
        }
    }

    fn flag(&self, column: &str) -> Result<bool, RowError> {
        match self.text(column).as_deref() {
            None => Ok(false),
            Some(cell) => match cell.to_ascii_lowercase().as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                _ => Err(self.error(column, format!("expected True or False, got {cell:?}"))),
            },
        }
    }

    fn day_night(&self, column: &str) -> Result<Option<DayNight>, RowError> {
        match self.text(column) {
            None => Ok(None),
            Some(cell) => DayNight::parse(&cell)
                .map(Some)
                .ok_or_else(|| self.error(column, format!("expected Day or Night, got {cell:?}"))),
        }
    }

    /// Hour and month from the derived columns when present, otherwise from
    /// the timestamp column.
    fn hour_month(
        &self,
        timestamp: &str,
        hour_col: &str,
        month_col: &str,
    ) -> Result<(Option<u8>, Option<u8>), RowError> {
        let mut hour = self.parsed::<u8>(hour_col)?;
        let mut month = self.parsed::<u8>(month_col)?;
        if hour.is_none() || month.is_none() {
            if let Some(cell) = self.text(timestamp) {
                let parsed =
                    NaiveDateTime::parse_from_str(&cell, "%Y-%m-%d %H:%M:%S%.f").map_err(|_| {
                        self.error(timestamp, format!("cannot parse {cell:?} as a timestamp"))
                    })?;
                hour = hour.or(Some(parsed.hour() as u8));
                month = month.or(Some(parsed.month() as u8));
            }
        }
        Ok((hour, month))
    }

    fn to_record(&self) -> Result<IncidentRecord, RowError> {
        let id = self
            .text(ID_COLUMN)
            .ok_or_else(|| self.error(ID_COLUMN, "empty"))?;
        let mut r = IncidentRecord::new(&id);
        r.source = self.text("Source");
        r.severity = self.parsed("Severity")?;
        r.start_lat = self.parsed("Start_Lat")?;
        r.start_lng = self.parsed("Start_Lng")?;
        r.extent_miles = self.parsed("Distance(mi)")?;
        r.description = self.text("Description");
        r.street = self.text("Street");
        r.city = self.text("City");
        r.county = self.text("County");
        r.state = self.text("State");
        r.zipcode = self.text("Zipcode");
        r.timezone = self.text("Timezone");
        r.airport_code = self.text("Airport_Code");
        r.weather.temperature_f = self.parsed("Temperature(F)")?;
        r.weather.humidity_pct = self.parsed("Humidity(%)")?;
        r.weather.pressure_inch = self.parsed("Pressure(in)")?;
        r.weather.visibility_miles = self.parsed("Visibility(mi)")?;
        r.weather.wind_direction = self.text("Wind_Direction");
        r.weather.wind_speed_mph = self.parsed("Wind_Speed(mph)")?;
        r.weather.condition = self.text("Weather_Condition");
        for column in POI_COLUMNS {
            if self.flag(column)? {
                r.poi_flags.push(column.replace('_', " "));
            }
        }
        r.daylight.sunrise_sunset = self.day_night("Sunrise_Sunset")?;
        r.daylight.civil = self.day_night("Civil_Twilight")?;
        r.daylight.nautical = self.day_night("Nautical_Twilight")?;
        r.daylight.astronomical = self.day_night("Astronomical_Twilight")?;
        (r.start_hour, r.start_month) =
            self.hour_month("Start_Time", "Start_Time_hour", "Start_Time_month")?;
        (r.weather_hour, r.weather_month) = self.hour_month(
            "Weather_Timestamp",
            "Weather_Timestamp_hour",
            "Weather_Timestamp_month",
        )?;
        r.validate().map_err(|e| self.error(e.field, e.reason))?;
        Ok(r)
    }
}

/// Reads accident rows. Bad rows are skipped and reported in
/// [`AccidentBatch::errors`]; more than `options.error_budget` of them fails
/// the whole read.
pub fn parse_accident_csv<R: Read>(
    input: R,
    options: IngestOptions,
) -> Result<AccidentBatch, IngestError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let columns: HashMap<String, usize> = reader
        .headers()?
        .iter()
        .enumerate()
        .map(|(i, h)| (h.trim().to_string(), i))
        .collect();
    if !columns.contains_key(ID_COLUMN) {
        return Err(IngestError::HeaderMismatch(ID_COLUMN.to_string()));
    }

    let mut batch = AccidentBatch::default();
    let mut seen = HashSet::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        if !reader.read_record(&mut record)? {
            break;
        }
        let row = Row {
            columns: &columns,
            record: &record,
            line,
        };
        let parsed = row.to_record().and_then(|r| {
            if seen.insert(r.id.clone()) {
                Ok(r)
            } else {
                Err(row.error(ID_COLUMN, format!("duplicate id {}", r.id)))
            }
        });
        match parsed {
            Ok(r) => batch.records.push(r),
            Err(e) => {
                batch.errors.push(e);
                if batch.errors.len() > options.error_budget {
                    return Err(IngestError::ErrorBudget {
                        budget: options.error_budget,
                        errors: batch.errors,
                    });
                }
            }
        }
    }
    for e in &batch.errors {
        log::warn!("skipped accident row: {e}");
    }
    Ok(batch)
}

/// Writes records back in the same layout, with derived hour and month
/// columns in place of raw timestamps.
pub fn write_accident_csv<W: Write>(
    records: &[IncidentRecord],
    output: W,
) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(CSV_COLUMNS)?;
    let num = |v: Option<f64>| v.map(format_decimal).unwrap_or_default();
    let int = |v: Option<u8>| v.map(|x| x.to_string()).unwrap_or_default();
    let text = |v: &Option<String>| v.clone().unwrap_or_default();
    let day = |v: Option<DayNight>| v.map(|d| d.as_str().to_string()).unwrap_or_default();
    for r in records {
        let mut row = vec![
            r.id.clone(),
            text(&r.source),
            int(r.severity),
            num(r.start_lat),
            num(r.start_lng),
            num(r.extent_miles),
            text(&r.description),
            text(&r.street),
            text(&r.city),
            text(&r.county),
            text(&r.state),
            text(&r.zipcode),
            text(&r.timezone),
            text(&r.airport_code),
            num(r.weather.temperature_f),
            num(r.weather.humidity_pct),
            num(r.weather.pressure_inch),
            num(r.weather.visibility_miles),
            text(&r.weather.wind_direction),
            num(r.weather.wind_speed_mph),
            text(&r.weather.condition),
        ];
        for column in POI_COLUMNS {
            let name = column.replace('_', " ");
            row.push(
                if r.poi_flags.contains(&name) {
                    "True"
                } else {
                    "False"
                }
                .to_string(),
            );
        }
        row.extend([
            day(r.daylight.sunrise_sunset),
            day(r.daylight.civil),
            day(r.daylight.nautical),
            day(r.daylight.astronomical),
            int(r.start_hour),
            int(r.start_month),
            int(r.weather_hour),
            int(r.weather_month),
        ]);
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ReportLine<'a> {
    id: &'a str,
    report: String,
}

/// One JSON object `{id, report}` per line.
pub fn write_reports_jsonl<W: Write>(
    records: &[IncidentRecord],
    mut output: W,
) -> std::io::Result<()> {
    for r in records {
        let line = ReportLine {
            id: &r.id,
            report: render_incident_report(r),
        };
        serde_json::to_writer(&mut output, &line)?;
        output.write_all(b"\n")?;
    }
    Ok(())
}
