//! Accident records and the report text embedded in plan prompts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayNight {
    Day,
    Night,
}

impl DayNight {
    pub fn as_str(self) -> &'static str {
        match self {
            DayNight::Day => "Day",
            DayNight::Night => "Night",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "Day" => Some(DayNight::Day),
            "Night" => Some(DayNight::Night),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Weather {
    pub temperature_f: Option<f64>,
    pub humidity_pct: Option<f64>,
    pub pressure_inch: Option<f64>,
    pub visibility_miles: Option<f64>,
    pub wind_direction: Option<String>,
    pub wind_speed_mph: Option<f64>,
    pub condition: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Daylight {
    pub sunrise_sunset: Option<DayNight>,
    pub civil: Option<DayNight>,
    pub nautical: Option<DayNight>,
    pub astronomical: Option<DayNight>,
}

/// One accident. Everything except the id is optional; absent attributes
/// are omitted from the rendered report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IncidentRecord {
    pub id: String,
    pub source: Option<String>,
    pub severity: Option<u8>,
    pub start_lat: Option<f64>,
    pub start_lng: Option<f64>,
    pub extent_miles: Option<f64>,
    pub description: Option<String>,
    pub street: Option<String>,
    pub city: Option<String>,
    pub county: Option<String>,
    pub state: Option<String>,
    pub zipcode: Option<String>,
    pub timezone: Option<String>,
    pub airport_code: Option<String>,
    #[serde(default)]
    pub weather: Weather,
    /// Points of interest near the accident, e.g. "Traffic Signal".
    #[serde(default)]
    pub poi_flags: Vec<String>,
    #[serde(default)]
    pub daylight: Daylight,
    pub start_hour: Option<u8>,
    pub start_month: Option<u8>,
    pub weather_hour: Option<u8>,
    pub weather_month: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: &'static str,
    pub reason: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.reason)
    }
}

impl IncidentRecord {
    pub fn new(id: &str) -> Self {
        IncidentRecord {
            id: id.to_string(),
            ..Default::default()
        }
    }

    /// Range checks on coordinates, hours and months.
    pub fn validate(&self) -> Result<(), FieldError> {
        if self.id.trim().is_empty() {
            return Err(FieldError {
                field: "ID",
                reason: "must not be empty".into(),
            });
        }
        let range = |field: &'static str, v: Option<f64>, lo: f64, hi: f64| match v {
            Some(x) if !(lo..=hi).contains(&x) => Err(FieldError {
                field,
                reason: format!("{x} outside [{lo}, {hi}]"),
            }),
            _ => Ok(()),
        };
        range("Start_Lat", self.start_lat, -90.0, 90.0)?;
        range("Start_Lng", self.start_lng, -180.0, 180.0)?;
        range("Distance(mi)", self.extent_miles, 0.0, f64::MAX)?;
        let int_range = |field: &'static str, v: Option<u8>, lo: u8, hi: u8| match v {
            Some(x) if !(lo..=hi).contains(&x) => Err(FieldError {
                field,
                reason: format!("{x} outside {lo}..={hi}"),
            }),
            _ => Ok(()),
        };
        int_range("Start_Time_hour", self.start_hour, 0, 23)?;
        int_range("Weather_Timestamp_hour", self.weather_hour, 0, 23)?;
        int_range("Start_Time_month", self.start_month, 1, 12)?;
        int_range("Weather_Timestamp_month", self.weather_month, 1, 12)?;
        Ok(())
    }
}

/// Shortest round-trip decimal with at least one fractional digit
/// (`72.0`, `43.090641`), matching the dataset's own formatting.
pub fn format_decimal(value: f64) -> String {
    format!("{value:?}")
}

/// Renders `Label: value` pairs joined by `", "` in the dataset's column
/// order. Absent fields are skipped; point-of-interest flags appear by name.
pub fn render_incident_report(record: &IncidentRecord) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut text = |label: &str, value: &Option<String>| {
        if let Some(v) = value {
            parts.push(format!("{label}: {v}"));
        }
    };
    text("Accident ID", &Some(record.id.clone()));
    text("Source", &record.source);
    text("Severity", &record.severity.map(|s| s.to_string()));
    text("Start Latitude", &record.start_lat.map(format_decimal));
    text("Start Longitude", &record.start_lng.map(format_decimal));
    text(
        "Accident extent (miles)",
        &record.extent_miles.map(format_decimal),
    );
    text("Description", &record.description);
    text("Street", &record.street);
    text("City", &record.city);
    text("County", &record.county);
    text("State", &record.state);
    text("ZipCode", &record.zipcode);
    text("Timezone", &record.timezone);
    text("Airport Code", &record.airport_code);
    let w = &record.weather;
    text("Temperature (F)", &w.temperature_f.map(format_decimal));
    text("Humidity (%)", &w.humidity_pct.map(format_decimal));
    text("Pressure (inch)", &w.pressure_inch.map(format_decimal));
    text(
        "Visibility (miles)",
        &w.visibility_miles.map(format_decimal),
    );
    text("Wind Direction", &w.wind_direction);
    text("Wind Speed (mph)", &w.wind_speed_mph.map(format_decimal));
    text("Weather Condition", &w.condition);
    for flag in &record.poi_flags {
        parts.push(flag.clone());
    }
    let d = &record.daylight;
    let day = |v: Option<DayNight>| v.map(|x| x.as_str().to_string());
    let mut text = |label: &str, value: Option<String>| {
        if let Some(v) = value {
            parts.push(format!("{label}: {v}"));
        }
    };
    text("Sunrise/Sunset", day(d.sunrise_sunset));
    text("Civil Twilight", day(d.civil));
    text("Nautical Twilight", day(d.nautical));
    text("Astronomical Twilight", day(d.astronomical));
    text("Start_Time_hour", record.start_hour.map(|v| v.to_string()));
    text(
        "Start_Time_month",
        record.start_month.map(|v| v.to_string()),
    );
    text(
        "Weather_Timestamp_hour",
        record.weather_hour.map(|v| v.to_string()),
    );
    text(
        "Weather_Timestamp_month",
        record.weather_month.map(|v| v.to_string()),
    );
    parts.join(", ")
}

#[cfg(test)]
pub(crate) fn liverpool_record() -> IncidentRecord {
    IncidentRecord {
        id: "A-2760450".into(),
        source: Some("Source2".into()),
        severity: None,
        start_lat: Some(43.090641),
        start_lng: Some(-76.168594),
        extent_miles: Some(0.49),
        description: Some(
            "Entry ramp to I-81 Southbound from 7th North St closed due to stalled truck.".into(),
        ),
        street: Some("7th North St".into()),
        city: Some("Liverpool".into()),
        county: Some("Onondaga".into()),
        state: Some("NY".into()),
        zipcode: Some("13088".into()),
        timezone: Some("US/Eastern".into()),
        airport_code: Some("KSYR".into()),
        weather: Weather {
            temperature_f: Some(62.1),
            humidity_pct: Some(72.0),
            pressure_inch: Some(29.86),
            visibility_miles: Some(10.0),
            wind_direction: Some("WNW".into()),
            wind_speed_mph: Some(15.0),
            condition: Some("Overcast".into()),
        },
        poi_flags: alloc::vec!["Traffic Signal".into()],
        daylight: Daylight {
            sunrise_sunset: Some(DayNight::Day),
            civil: Some(DayNight::Day),
            nautical: Some(DayNight::Day),
            astronomical: Some(DayNight::Day),
        },
        start_hour: Some(14),
        start_month: Some(6),
        weather_hour: Some(14),
        weather_month: Some(6),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LIVERPOOL_REPORT: &str = "Accident ID: A-2760450, Source: Source2, Start Latitude: 43.090641, \
Start Longitude: -76.168594, Accident extent (miles): 0.49, Description: Entry ramp to I-81 Southbound \
from 7th North St closed due to stalled truck., Street: 7th North St, City: Liverpool, County: Onondaga, \
State: NY, ZipCode: 13088, Timezone: US/Eastern, Airport Code: KSYR, Temperature (F): 62.1, \
Humidity (%): 72.0, Pressure (inch): 29.86, Visibility (miles): 10.0, Wind Direction: WNW, \
Wind Speed (mph): 15.0, Weather Condition: Overcast, Traffic Signal, Sunrise/Sunset: Day, \
Civil Twilight: Day, Nautical Twilight: Day, Astronomical Twilight: Day, Start_Time_hour: 14, \
Start_Time_month: 6, Weather_Timestamp_hour: 14, Weather_Timestamp_month: 6";

    #[test]
    fn liverpool_report_matches_layout() {
        let report = render_incident_report(&liverpool_record());
        assert!(report
            .starts_with("Accident ID: A-2760450, Source: Source2, Start Latitude: 43.090641"));
        assert_eq!(report, LIVERPOOL_REPORT);
        assert_eq!(report, render_incident_report(&liverpool_record()));
    }

    #[test]
    fn minimal_record_has_two_fields() {
        let mut r = IncidentRecord::new("A-1");
        r.description = Some("Crash".into());
        assert_eq!(
            render_incident_report(&r),
            "Accident ID: A-1, Description: Crash"
        );
    }

    #[test]
    fn severity_only_when_present() {
        let mut r = IncidentRecord::new("A-1");
        r.source = Some("Source1".into());
        r.severity = Some(3);
        assert_eq!(
            render_incident_report(&r),
            "Accident ID: A-1, Source: Source1, Severity: 3"
        );
    }

    #[test]
    fn validation_ranges() {
        assert!(liverpool_record().validate().is_ok());
        let mut r = liverpool_record();
        r.start_lat = Some(999.0);
        assert_eq!(r.validate().unwrap_err().field, "Start_Lat");
        let mut r = liverpool_record();
        r.start_month = Some(13);
        assert_eq!(r.validate().unwrap_err().field, "Start_Time_month");
        assert!(IncidentRecord::new(" ").validate().is_err());
    }
}
