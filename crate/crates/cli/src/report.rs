//! Structured reports and their renderers.
//!
//! A report is a titled list of sections, each a table of cells carrying a
//! display string alongside the unrounded value. Markdown and CSV render
//! the display strings; JSON serializes the whole structure so chained
//! commands never accumulate rounding error.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

/// Environment variable overriding display decimals.
pub const PRECISION_ENV: &str = "CIBENCH_PRECISION";

/// Display rounding: 3 decimals for coefficients/R^2/correlations, 2 for
/// monetary values and effect sizes; TF quantities render as integers.
#[derive(Debug, Clone, Copy)]
pub struct Precision {
    pub coeff: usize,
    pub money: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self { coeff: 3, money: 2 }
    }
}

impl Precision {
    /// Defaults, overridden wholesale by `CIBENCH_PRECISION` when it parses
    /// as an integer 0..=12.
    pub fn from_env() -> Self {
        match std::env::var(PRECISION_ENV) {
            Ok(raw) => match raw.trim().parse::<usize>() {
                Ok(n) if n <= 12 => Self { coeff: n, money: n },
                _ => Self::default(),
            },
            Err(_) => Self::default(),
        }
    }
}

/// One table cell: what to print, plus the unrounded value when numeric.
/// Non-finite values carry no raw value (JSON has no representation for
/// them).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub display: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell {
            display: s.into(),
            value: None,
        }
    }

    pub fn blank() -> Cell {
        Cell::text("")
    }

    fn raw_of(v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }

    /// Fixed-decimal numeric cell.
    pub fn number(v: f64, decimals: usize) -> Cell {
        Cell {
            display: format!("{v:.decimals$}"),
            value: Self::raw_of(v),
        }
    }

    pub fn optional_number(v: Option<f64>, decimals: usize) -> Cell {
        match v {
            Some(v) => Cell::number(v, decimals),
            None => Cell::blank(),
        }
    }

    /// Dollar-prefixed fixed-decimal cell (values in $M).
    pub fn money(v: f64, decimals: usize) -> Cell {
        Cell {
            display: format!("${v:.decimals$}"),
            value: Self::raw_of(v),
        }
    }

    pub fn optional_money(v: Option<f64>, decimals: usize) -> Cell {
        match v {
            Some(v) => Cell::money(v, decimals),
            None => Cell::blank(),
        }
    }

    /// TeraFLOPS cell: rounded to an integer with thousands separators.
    pub fn teraflops(v: f64) -> Cell {
        Cell {
            display: group_thousands(v.round() as i64),
            value: Self::raw_of(v),
        }
    }

    pub fn optional_teraflops(v: Option<f64>) -> Cell {
        match v {
            Some(v) => Cell::teraflops(v),
            None => Cell::blank(),
        }
    }

    pub fn integer(v: i64) -> Cell {
        Cell {
            display: v.to_string(),
            value: Some(v as f64),
        }
    }

    /// Full-precision cell (shortest round-trip formatting); used for
    /// plot-ready data series.
    pub fn full(v: f64) -> Cell {
        Cell {
            display: format!("{v}"),
            value: Self::raw_of(v),
        }
    }
}

pub fn group_thousands(v: i64) -> String {
    let digits = v.unsigned_abs().to_string();
    let mut grouped = String::with_capacity(digits.len() + digits.len() / 3 + 1);
    let lead = digits.len() % 3;
    for (i, ch) in digits.chars().enumerate() {
        if i != 0 && (i + 3 - lead).is_multiple_of(3) {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    if v < 0 {
        format!("-{grouped}")
    } else {
        grouped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Section {
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Section {
        Section {
            title: title.into(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert!(self.columns.is_empty() || row.len() == self.columns.len());
        self.rows.push(row);
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Section {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Report {
        Report {
            title: title.into(),
            sections: Vec::new(),
        }
    }
}

/// Renders a report in the requested format. Output is deterministic:
/// identical reports produce byte-identical text.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Markdown => render_markdown(report),
        Format::Csv => render_csv(report),
        Format::Json => render_json(report),
    }
}

fn escape_markdown(cell: &str) -> String {
    cell.replace('|', "\\|")
}

fn render_markdown(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {}\n", report.title));
    for section in &report.sections {
        out.push('\n');
        out.push_str(&format!("## {}\n\n", section.title));
        if !section.columns.is_empty() {
            out.push_str(&format!(
                "| {} |\n",
                section
                    .columns
                    .iter()
                    .map(|c| escape_markdown(c))
                    .collect::<Vec<_>>()
                    .join(" | ")
            ));
            out.push_str(&format!(
                "|{}\n",
                " --- |".repeat(section.columns.len())
            ));
            for row in &section.rows {
                out.push_str(&format!(
                    "| {} |\n",
                    row.iter()
                        .map(|c| escape_markdown(&c.display))
                        .collect::<Vec<_>>()
                        .join(" | ")
                ));
            }
        }
        for note in &section.notes {
            out.push_str(&format!("\n*{note}*\n"));
        }
    }
    out
}

fn render_csv(report: &Report) -> String {
    let mut writer = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(Vec::new());
    // A single-section report is emitted as a bare table so the output is
    // directly plot- or spreadsheet-ready; multi-section reports carry
    // section banners.
    let bare = report.sections.len() == 1;
    for (i, section) in report.sections.iter().enumerate() {
        if !bare {
            if i > 0 {
                writer.write_record([""]).expect("csv write");
            }
            writer
                .write_record(["section", section.title.as_str()])
                .expect("csv write");
        }
        if !section.columns.is_empty() {
            writer.write_record(&section.columns).expect("csv write");
            for row in &section.rows {
                writer
                    .write_record(row.iter().map(|c| c.display.as_str()))
                    .expect("csv write");
            }
        }
        if !bare {
            for note in &section.notes {
                writer.write_record(["note", note]).expect("csv write");
            }
        }
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv output is utf-8")
}

fn render_json(report: &Report) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Parses a JSON rendering back into a report (round-trip counterpart of
/// [`render`] with [`Format::Json`]).
pub fn parse_json(text: &str) -> Result<Report, serde_json::Error> {
    serde_json::from_str(text)
}
