//! Published disease estimates and their analysis.
//!
//! Records are read from a CSV file with the exact header [`CSV_HEADER`].
//! Empty fields mean "absent". Published target values are kept together
//! with the number of decimals they were printed with, so golden checks can
//! compare at that precision.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta_model::{fit_from_risk_and_frr, BetaRiskModel, LorenzCurve};
use crate::dichotomous::{solve_risk_structure, RiskStructureSolution};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "name",
    "relationship",
    "frr1",
    "frr2",
    "lifetime_risk",
    "source",
    "expected_irr",
    "expected_q",
    "expected_gini",
    "expected_top10",
];

const BUNDLED_CSV: &str = include_str!("../data/diseases.csv");

pub const LORENZ_POINTS: usize = 1001;
pub const TOP_FRACTION: f64 = 0.1;

/// A number as printed in a publication: its value and decimal count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrintedValue {
    pub value: f64,
    pub decimals: u32,
}

impl PrintedValue {
    /// True when `computed`, rounded to the printed decimals, is within one
    /// unit of the last printed digit.
    pub fn matches(&self, computed: f64) -> bool {
        let scale = 10f64.powi(self.decimals as i32);
        let rounded = (computed * scale).round();
        let printed = (self.value * scale).round();
        (rounded - printed).abs() <= 1.0
    }
}

impl FromStr for PrintedValue {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        let value: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
        if !value.is_finite() {
            return Err(format!("not finite: {s:?}"));
        }
        let decimals = s.split_once('.').map_or(0, |(_, frac)| frac.len() as u32);
        Ok(Self { value, decimals })
    }
}

impl fmt::Display for PrintedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.*}", self.decimals as usize, self.value)
    }
}

impl Serialize for PrintedValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PrintedValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectedValues {
    pub irr: Option<PrintedValue>,
    pub q: Option<PrintedValue>,
    pub gini: Option<PrintedValue>,
    /// Burden share of the top 10% at highest risk.
    pub top10: Option<PrintedValue>,
}

impl ExpectedValues {
    pub fn is_empty(&self) -> bool {
        self.irr.is_none() && self.q.is_none() && self.gini.is_none() && self.top10.is_none()
    }
}

/// One published disease estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiseaseRecord {
    pub name: String,
    pub relationship: String,
    pub frr1: Option<f64>,
    pub frr2: Option<f64>,
    pub lifetime_risk: Option<f64>,
    pub source: String,
    pub expected: ExpectedValues,
}

impl DiseaseRecord {
    pub fn has_dichotomous_inputs(&self) -> bool {
        self.frr1.is_some() && self.frr2.is_some()
    }

    pub fn has_continuous_inputs(&self) -> bool {
        self.frr1.is_some() && self.lifetime_risk.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |message: String| Error::Validation {
            name: self.name.clone(),
            message,
        };
        if self.name.trim().is_empty() {
            return Err(invalid("name must not be empty".into()));
        }
        for (label, v) in [("frr1", self.frr1), ("frr2", self.frr2)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("{label} = {v} must be positive")));
                }
            }
        }
        if let Some(mu) = self.lifetime_risk {
            if !(mu > 0.0 && mu < 1.0) {
                return Err(invalid(format!("lifetime_risk = {mu} must lie in (0, 1)")));
            }
        }
        let expected = [
            ("expected_irr", self.expected.irr),
            ("expected_q", self.expected.q),
            ("expected_gini", self.expected.gini),
            ("expected_top10", self.expected.top10),
        ];
        for (label, v) in expected {
            if let Some(v) = v {
                if v.value <= 0.0 {
                    return Err(invalid(format!("{label} = {v} must be positive")));
                }
            }
        }
        if !(self.has_dichotomous_inputs() || self.has_continuous_inputs()) {
            return Err(invalid(
                "needs frr1 with frr2, or frr1 with lifetime_risk".into(),
            ));
        }
        Ok(())
    }
}

fn parse_field<T: FromStr>(row: u64, column: &str, raw: &str) -> Result<Option<T>>
where
    T::Err: fmt::Display,
{
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<T>().map(Some).map_err(|e| Error::Parse {
        row,
        column: column.to_string(),
        message: format!("{raw:?}: {e}"),
    })
}

/// Parses and validates records from CSV text in the dataset schema.
pub fn parse_records<R: Read>(reader: R) -> Result<Vec<DiseaseRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(&e))?.clone();
    let found: Vec<&str> = headers.iter().collect();
    if found != CSV_HEADER {
        return Err(Error::Parse {
            row: 1,
            column: "header".into(),
            message: format!(
                "expected {:?}, found {:?}",
                CSV_HEADER.join(","),
                found.join(",")
            ),
        });
    }

    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(i).unwrap_or("");
        let record = DiseaseRecord {
            name: field(0).trim().to_string(),
            relationship: field(1).trim().to_string(),
            frr1: parse_field(line, CSV_HEADER[2], field(2))?,
            frr2: parse_field(line, CSV_HEADER[3], field(3))?,
            lifetime_risk: parse_field(line, CSV_HEADER[4], field(4))?,
            source: field(5).trim().to_string(),
            expected: ExpectedValues {
                irr: parse_field(line, CSV_HEADER[6], field(6))?,
                q: parse_field(line, CSV_HEADER[7], field(7))?,
                gini: parse_field(line, CSV_HEADER[8], field(8))?,
                top10: parse_field(line, CSV_HEADER[9], field(9))?,
            },
        };
        record.validate()?;
        records.push(record);
    }
    Ok(records)
}

fn csv_error(e: &csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line());
    Error::Parse {
        row,
        column: "-".into(),
        message: e.to_string(),
    }
}

pub fn load_records(path: &Path) -> Result<Vec<DiseaseRecord>> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_records(file)
}

/// The dataset shipped with the crate: seven (FRR1, FRR2) cancer estimates
/// and eight (lifetime risk, FRR) disease estimates.
pub fn bundled_records() -> Vec<DiseaseRecord> {
    parse_records(BUNDLED_CSV.as_bytes()).expect("bundled dataset is valid")
}

pub fn bundled_csv() -> &'static str {
    BUNDLED_CSV
}

/// Writes records in the dataset schema.
pub fn write_records(records: &[DiseaseRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(|e| csv_error(&e))?;
    for r in records {
        w.write_record(record_fields(r))
            .map_err(|e| csv_error(&e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub(crate) fn record_fields(r: &DiseaseRecord) -> Vec<String> {
    fn opt<T: fmt::Display>(v: &Option<T>) -> String {
        v.as_ref().map(ToString::to_string).unwrap_or_default()
    }
    vec![
        r.name.clone(),
        r.relationship.clone(),
        opt(&r.frr1),
        opt(&r.frr2),
        opt(&r.lifetime_risk),
        r.source.clone(),
        opt(&r.expected.irr),
        opt(&r.expected.q),
        opt(&r.expected.gini),
        opt(&r.expected.top10),
    ]
}

/// Continuous-model results for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousAnalysis {
    pub model: BetaRiskModel,
    pub gini: f64,
    pub top_share_10: f64,
    pub mean_risk_ratio_10: f64,
    pub lorenz: LorenzCurve,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisResult {
    pub record: DiseaseRecord,
    pub dichotomous: Option<RiskStructureSolution>,
    pub continuous: Option<ContinuousAnalysis>,
}

/// Runs every analysis the record's inputs allow.
pub fn analyze(record: &DiseaseRecord) -> Result<AnalysisResult> {
    let attach = |e: Error| Error::Record {
        name: record.name.clone(),
        source: Box::new(e),
    };
    record.validate().map_err(attach)?;

    let dichotomous = match (record.frr1, record.frr2) {
        (Some(f1), Some(f2)) => Some(solve_risk_structure(f1, f2).map_err(attach)?),
        _ => None,
    };
    let continuous = match (record.frr1, record.lifetime_risk) {
        (Some(frr), Some(mu)) => {
            let model = fit_from_risk_and_frr(mu, frr).map_err(attach)?;
            let lorenz = model.lorenz_curve(LORENZ_POINTS);
            Some(ContinuousAnalysis {
                gini: lorenz.gini,
                top_share_10: model.top_share(TOP_FRACTION).map_err(attach)?,
                mean_risk_ratio_10: model.mean_risk_ratio(TOP_FRACTION).map_err(attach)?,
                lorenz,
                model,
            })
        }
        _ => None,
    };
    Ok(AnalysisResult {
        record: record.clone(),
        dichotomous,
        continuous,
    })
}

/// A record together with its analysis or the error that stopped it.
#[derive(Debug, Clone)]
pub struct RecordOutcome {
    pub record: DiseaseRecord,
    pub analysis: Result<AnalysisResult>,
}

/// Analyzes records in parallel; output order matches input order and no
/// record is dropped.
pub fn analyze_all(records: &[DiseaseRecord]) -> Vec<RecordOutcome> {
    records
        .par_iter()
        .map(|r| RecordOutcome {
            record: r.clone(),
            analysis: analyze(r),
        })
        .collect()
}
