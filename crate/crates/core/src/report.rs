//! Rendering of analyses as aligned text tables, CSV, JSON and SVG.
//!
//! Every number goes through [`round_sig`] so that the three text formats
//! carry the same values at a given precision.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::beta_model::LorenzCurve;
use crate::dataset::{record_fields, DiseaseRecord, RecordOutcome, CSV_HEADER};
use crate::dichotomous::RiskStructureSolution;
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Self::Table),
            "csv" | "delimited" => Ok(Self::Csv),
            "json" | "structured" => Ok(Self::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// Rounds to `sig` significant digits.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", sig.clamp(1, 17) - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Formats like C's `%.{sig}g`: fixed notation for moderate exponents,
/// scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sig = sig.clamp(1, 17);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= sig as i32 {
        return format!("{}e{}", trim_zeros(mantissa), exp);
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn text(&self, precision: usize) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, precision),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, precision: usize) -> serde_json::Value {
        match self {
            Cell::Num(x) => json_number(*x, precision),
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

fn json_number(x: f64, precision: usize) -> serde_json::Value {
    serde_json::Number::from_f64(round_sig(x, precision))
        .map_or(serde_json::Value::Null, serde_json::Value::Number)
}

/// A titled grid of cells rendered in any [`ReportFormat`].
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(title: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: ReportFormat, precision: usize) -> String {
        match format {
            ReportFormat::Table => self.render_text(precision),
            ReportFormat::Csv => self.render_csv(precision),
            ReportFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(precision))
                    .expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    fn render_text(&self, precision: usize) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|c| c.text(precision)).collect())
            .collect();
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        let line = |out: &mut String, row: &[String]| {
            let padded: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}", w = *w))
                .collect();
            out.push_str(padded.join("  ").trim_end());
            out.push('\n');
        };
        line(&mut out, &self.columns);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(&mut out, &rule);
        for row in &cells {
            line(&mut out, row);
        }
        out
    }

    fn render_csv(&self, precision: usize) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text(precision)))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_json(&self, precision: usize) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.clone(), c.json(precision)))
                    .collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }
}

/// Computed values of one record in the structured report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousSummary {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gini: f64,
    pub top10: f64,
    pub mean_ratio10: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredEntry {
    pub record: DiseaseRecord,
    pub dichotomous: Option<RiskStructureSolution>,
    pub continuous: Option<ContinuousSummary>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredReport {
    pub records: Vec<StructuredEntry>,
}

fn round_opt(x: Option<f64>, p: usize) -> Option<f64> {
    x.map(|v| round_sig(v, p))
}

fn structured(outcomes: &[RecordOutcome], precision: usize) -> StructuredReport {
    let p = precision;
    let records = outcomes
        .iter()
        .map(|o| match &o.analysis {
            Ok(a) => StructuredEntry {
                record: o.record.clone(),
                dichotomous: a.dichotomous.map(|d| RiskStructureSolution {
                    irr: round_sig(d.irr, p),
                    q: round_opt(d.q, p),
                    residual_norm: round_sig(d.residual_norm, p),
                    iterations: d.iterations,
                }),
                continuous: a.continuous.as_ref().map(|c| ContinuousSummary {
                    alpha: round_opt(c.model.params().map(|b| b.alpha()), p),
                    beta: round_opt(c.model.params().map(|b| b.beta()), p),
                    gini: round_sig(c.gini, p),
                    top10: round_sig(c.top_share_10, p),
                    mean_ratio10: round_sig(c.mean_risk_ratio_10, p),
                }),
                error: None,
            },
            Err(e) => StructuredEntry {
                record: o.record.clone(),
                dichotomous: None,
                continuous: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    StructuredReport { records }
}

/// Parses a report rendered with [`ReportFormat::Json`].
pub fn parse_structured(text: &str) -> Result<StructuredReport> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        row: e.line() as u64,
        column: e.column().to_string(),
        message: e.to_string(),
    })
}

pub fn dichotomous_table(outcomes: &[RecordOutcome]) -> Table {
    let mut t = Table::new(
        "Two-group model: IRR and high-risk proportion q from FRR1 and FRR2",
        &[
            "Disease",
            "Relationship",
            "FRR1",
            "FRR2",
            "IRR",
            "q",
            "Residual",
        ],
    );
    for o in outcomes {
        let Ok(a) = &o.analysis else { continue };
        let Some(d) = a.dichotomous else { continue };
        t.push(vec![
            o.record.name.as_str().into(),
            o.record.relationship.as_str().into(),
            o.record.frr1.into(),
            o.record.frr2.into(),
            d.irr.into(),
            match d.q {
                Some(q) => q.into(),
                None => "any".into(),
            },
            d.residual_norm.into(),
        ]);
    }
    t
}

pub fn continuous_table(outcomes: &[RecordOutcome]) -> Table {
    let mut t = Table::new(
        "Beta model: risk inequality from lifetime risk and FRR",
        &[
            "Disease",
            "Lifetime risk",
            "FRR",
            "alpha",
            "beta",
            "Gini",
            "Top 10% share",
            "Top/rest mean risk",
        ],
    );
    for o in outcomes {
        let Ok(a) = &o.analysis else { continue };
        let Some(c) = &a.continuous else { continue };
        let params = c.model.params();
        t.push(vec![
            o.record.name.as_str().into(),
            o.record.lifetime_risk.into(),
            o.record.frr1.into(),
            params.map(|b| b.alpha()).into(),
            params.map(|b| b.beta()).into(),
            c.gini.into(),
            c.top_share_10.into(),
            c.mean_risk_ratio_10.into(),
        ]);
    }
    t
}

fn error_table(outcomes: &[RecordOutcome]) -> Table {
    let mut t = Table::new("Records that could not be analyzed", &["Disease", "Error"]);
    for o in outcomes {
        if let Err(e) = &o.analysis {
            t.push(vec![o.record.name.as_str().into(), e.to_string().into()]);
        }
    }
    t
}

/// Renders analyzed records. Output is a pure function of its inputs.
pub fn render_report(outcomes: &[RecordOutcome], format: ReportFormat, precision: usize) -> String {
    match format {
        ReportFormat::Table => {
            let sections: Vec<String> = [
                dichotomous_table(outcomes),
                continuous_table(outcomes),
                error_table(outcomes),
            ]
            .iter()
            .filter(|t| !t.rows.is_empty())
            .map(|t| t.render(ReportFormat::Table, precision))
            .collect();
            sections.join("\n")
        }
        ReportFormat::Csv => render_report_csv(outcomes, precision),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&structured(outcomes, precision))
                .expect("report serializes");
            s.push('\n');
            s
        }
    }
}

pub const REPORT_CSV_EXTRA: [&str; 9] = [
    "irr",
    "q",
    "residual",
    "alpha",
    "beta",
    "gini",
    "top10",
    "mean_ratio10",
    "error",
];

fn render_report_csv(outcomes: &[RecordOutcome], precision: usize) -> String {
    let num = |x: Option<f64>| x.map(|v| format_sig(v, precision)).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = CSV_HEADER
        .iter()
        .chain(&REPORT_CSV_EXTRA)
        .copied()
        .collect();
    w.write_record(&header).expect("in-memory write");
    for o in outcomes {
        let mut row = record_fields(&o.record);
        match &o.analysis {
            Ok(a) => {
                let d = a.dichotomous;
                let c = a.continuous.as_ref();
                let params = c.and_then(|c| c.model.params());
                row.extend([
                    num(d.map(|d| d.irr)),
                    num(d.and_then(|d| d.q)),
                    num(d.map(|d| d.residual_norm)),
                    num(params.map(|b| b.alpha())),
                    num(params.map(|b| b.beta())),
                    num(c.map(|c| c.gini)),
                    num(c.map(|c| c.top_share_10)),
                    num(c.map(|c| c.mean_risk_ratio_10)),
                    String::new(),
                ]);
            }
            Err(e) => {
                row.extend(std::iter::repeat_n(String::new(), 8));
                row.push(e.to_string());
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

const SVG_WIDTH: f64 = 800.0;
const SVG_HEIGHT: f64 = 600.0;
const PLOT_LEFT: f64 = 80.0;
const PLOT_TOP: f64 = 40.0;
const PLOT_SIZE: f64 = 500.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn to_svg(u: f64, l: f64) -> (f64, f64) {
    (PLOT_LEFT + u * PLOT_SIZE, PLOT_TOP + (1.0 - l) * PLOT_SIZE)
}

/// Standalone SVG with the equality diagonal, one polyline per Lorenz curve
/// and a legend giving each label with its Gini index.
pub fn render_lorenz_figure(curves: &[(String, LorenzCurve)]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (x0, y0) = to_svg(0.0, 0.0);
    let (x1, y1) = to_svg(1.0, 1.0);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y1}" width="{PLOT_SIZE}" height="{PLOT_SIZE}" fill="none" stroke="black"/>"#
    );
    for k in 0..=5 {
        let v = k as f64 / 5.0;
        let (tx, _) = to_svg(v, 0.0);
        let (_, ty) = to_svg(0.0, v);
        let _ = writeln!(
            s,
            r#"<text x="{tx:.2}" y="{:.2}" font-size="12" text-anchor="middle">{v:.1}</text>"#,
            y0 + 18.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{v:.1}</text>"#,
            x0 - 8.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">Proportion of population (lowest risk first)</text>"#,
        PLOT_LEFT + PLOT_SIZE / 2.0,
        y0 + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 20 {:.2})">Proportion of diagnoses</text>"#,
        PLOT_TOP + PLOT_SIZE / 2.0,
        PLOT_TOP + PLOT_SIZE / 2.0
    );
    let _ = writeln!(
        s,
        r##"<line class="equality" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="#888888" stroke-dasharray="6 4"/>"##
    );
    for (i, (label, curve)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = curve
            .points
            .iter()
            .map(|&(u, l)| {
                let (x, y) = to_svg(u, l);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline class="lorenz" fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = PLOT_TOP + 20.0 + 24.0 * i as f64;
        let lx = PLOT_LEFT + PLOT_SIZE + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            s,
            r#"<text class="legend" x="{}" y="{}" font-size="13">{} (Gini {:.2})</text>"#,
            lx + 30.0,
            ly + 4.0,
            xml_escape(label),
            curve.gini
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Simulated family risks as `label,family,risk` rows.
pub fn render_samples_csv(series: &[(String, Vec<f64>)], precision: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["label", "family", "risk"])
        .expect("in-memory write");
    for (label, risks) in series {
        for (i, r) in risks.iter().enumerate() {
            w.write_record([
                label.clone(),
                (i + 1).to_string(),
                format_sig(*r, precision),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}
