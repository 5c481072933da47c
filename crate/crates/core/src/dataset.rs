//! Panel and survey data model: CSV ingestion, validation, and normalization
//! of raw survey fields into canonical units.
//!
//! Canonical units throughout the crate: capacity in FP64 TeraFLOPS, all
//! monetary quantities (salaries, HERD expenditures) in millions of USD.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use thiserror::Error;

/// Exact lowercase header of a panel CSV. Empty cell = missing.
pub const PANEL_HEADER: [&str; 8] = [
    "institution",
    "year",
    "teraflops",
    "salaries_musd",
    "herd_musd",
    "doctorates",
    "publications",
    "hi_impact_pubs",
];

/// Exact lowercase header of a survey CSV.
pub const SURVEY_HEADER: [&str; 8] = [
    "institution",
    "year",
    "teraflops",
    "salaries_musd",
    "fte_count",
    "herd_musd",
    "doctorates",
    "publications",
];

/// Exact lowercase header of a sidecar inventory CSV.
pub const INVENTORY_HEADER: [&str; 3] = ["institution", "device_count", "gf_per_device"];

/// Accepted calendar-year range for observations.
pub const YEAR_RANGE: (i32, i32) = (1990, 2100);

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed csv (line {line}): {message}")]
    MalformedCsv { line: u64, message: String },
    #[error("schema violation: missing column `{column}`")]
    SchemaViolation { column: String },
    #[error("duplicate observation for `{institution}` in {year}")]
    DuplicateKey { institution: String, year: i32 },
    #[error("dataset contains no usable rows")]
    EmptyDataset,
    #[error("`{institution}` {year}: invalid {field}: {message}")]
    InvalidValue {
        institution: String,
        year: i32,
        field: &'static str,
        message: String,
    },
    #[error("`{institution}` {year}: {message}")]
    InsufficientData {
        institution: String,
        year: i32,
        message: String,
    },
    #[error("invalid ingest config: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// The four institutional outputs modeled by the production function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputKind {
    Publications,
    Doctorates,
    Herd,
    HiImpactPubs,
}

impl OutputKind {
    /// Canonical table order.
    pub const ALL: [OutputKind; 4] = [
        OutputKind::Publications,
        OutputKind::Doctorates,
        OutputKind::Herd,
        OutputKind::HiImpactPubs,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OutputKind::Publications => "Publications",
            OutputKind::Doctorates => "Earned Doctorates",
            OutputKind::Herd => "HERD Expenditures",
            OutputKind::HiImpactPubs => "High Impact Publications",
        }
    }

    /// Column name in the panel CSV.
    pub fn column(self) -> &'static str {
        match self {
            OutputKind::Publications => "publications",
            OutputKind::Doctorates => "doctorates",
            OutputKind::Herd => "herd_musd",
            OutputKind::HiImpactPubs => "hi_impact_pubs",
        }
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One institution-year observation in canonical units.
///
/// Inputs are `teraflops` (capital) and `salaries` (labor, $M); the four
/// output fields are optional because public series have gaps. Analyses
/// listwise-delete incomplete rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationRow {
    pub institution: String,
    pub year: i32,
    pub teraflops: Option<f64>,
    pub salaries: Option<f64>,
    pub herd: Option<f64>,
    pub doctorates: Option<f64>,
    pub publications: Option<f64>,
    pub hi_impact_pubs: Option<f64>,
}

impl ObservationRow {
    pub fn output(&self, kind: OutputKind) -> Option<f64> {
        match kind {
            OutputKind::Publications => self.publications,
            OutputKind::Doctorates => self.doctorates,
            OutputKind::Herd => self.herd,
            OutputKind::HiImpactPubs => self.hi_impact_pubs,
        }
    }

    /// True when both inputs and all four outputs are present.
    pub fn is_complete(&self) -> bool {
        self.teraflops.is_some()
            && self.salaries.is_some()
            && OutputKind::ALL.iter().all(|k| self.output(*k).is_some())
    }

    fn validate(&self) -> Result<(), DatasetError> {
        if self.institution.trim().is_empty() {
            return Err(DatasetError::InvalidValue {
                institution: self.institution.clone(),
                year: self.year,
                field: "institution",
                message: "empty label".into(),
            });
        }
        if self.year < YEAR_RANGE.0 || self.year > YEAR_RANGE.1 {
            return Err(DatasetError::InvalidValue {
                institution: self.institution.clone(),
                year: self.year,
                field: "year",
                message: format!("outside [{}, {}]", YEAR_RANGE.0, YEAR_RANGE.1),
            });
        }
        let fields: [(&'static str, Option<f64>); 6] = [
            ("teraflops", self.teraflops),
            ("salaries_musd", self.salaries),
            ("herd_musd", self.herd),
            ("doctorates", self.doctorates),
            ("publications", self.publications),
            ("hi_impact_pubs", self.hi_impact_pubs),
        ];
        for (name, value) in fields {
            if let Some(v) = value {
                if !v.is_finite() {
                    return Err(DatasetError::InvalidValue {
                        institution: self.institution.clone(),
                        year: self.year,
                        field: name,
                        message: "not finite".into(),
                    });
                }
                if v < 0.0 {
                    return Err(DatasetError::InvalidValue {
                        institution: self.institution.clone(),
                        year: self.year,
                        field: name,
                        message: format!("negative value {v}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Validated multi-institution, multi-year panel. Rows are kept sorted by
/// (institution, year) with no duplicate institution-year pairs; immutable
/// after construction.
#[derive(Debug, Clone)]
pub struct PanelDataset {
    rows: Vec<ObservationRow>,
    provenance: String,
}

impl PanelDataset {
    pub fn new(
        mut rows: Vec<ObservationRow>,
        provenance: impl Into<String>,
    ) -> Result<Self, DatasetError> {
        if rows.is_empty() {
            return Err(DatasetError::EmptyDataset);
        }
        for row in &rows {
            row.validate()?;
        }
        rows.sort_by(|a, b| (a.institution.as_str(), a.year).cmp(&(b.institution.as_str(), b.year)));
        for pair in rows.windows(2) {
            if pair[0].institution == pair[1].institution && pair[0].year == pair[1].year {
                return Err(DatasetError::DuplicateKey {
                    institution: pair[0].institution.clone(),
                    year: pair[0].year,
                });
            }
        }
        Ok(Self {
            rows,
            provenance: provenance.into(),
        })
    }

    pub fn rows(&self) -> &[ObservationRow] {
        &self.rows
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Sorted, de-duplicated institution labels.
    pub fn institutions(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.rows.iter().map(|r| r.institution.as_str()).collect();
        labels.dedup();
        labels
    }

    pub fn contains_institution(&self, name: &str) -> bool {
        self.rows.iter().any(|r| r.institution == name)
    }

    /// Rows for one institution, ascending by year.
    pub fn institution_rows(&self, name: &str) -> Vec<&ObservationRow> {
        self.rows.iter().filter(|r| r.institution == name).collect()
    }

    /// Serializes the panel back to the canonical CSV schema. Present values
    /// are written with shortest round-trip float formatting, so reloading
    /// reproduces the numeric content bit-for-bit.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), DatasetError> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(PANEL_HEADER)
            .map_err(|e| csv_error(&e))?;
        for row in &self.rows {
            let record = [
                row.institution.clone(),
                row.year.to_string(),
                fmt_opt(row.teraflops),
                fmt_opt(row.salaries),
                fmt_opt(row.herd),
                fmt_opt(row.doctorates),
                fmt_opt(row.publications),
                fmt_opt(row.hi_impact_pubs),
            ];
            w.write_record(&record).map_err(|e| csv_error(&e))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    match value {
        Some(v) => format!("{v}"),
        None => String::new(),
    }
}

fn csv_error(err: &csv::Error) -> DatasetError {
    let line = match err.position() {
        Some(pos) => pos.line(),
        None => 0,
    };
    DatasetError::MalformedCsv {
        line,
        message: err.to_string(),
    }
}

/// One device class reported in a survey inventory sidecar.
#[derive(Debug, Clone, PartialEq)]
pub struct InventoryItem {
    pub device_count: f64,
    pub gf_per_device: f64,
}

/// Raw survey response before normalization. Capacity may arrive as
/// TeraFLOPS or as a device inventory; labor as salary dollars or an FTE
/// headcount.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub institution: String,
    pub year: i32,
    pub teraflops: Option<f64>,
    pub core_inventory: Vec<InventoryItem>,
    pub salaries: Option<f64>,
    pub fte_count: Option<f64>,
    pub herd: f64,
    pub doctorates: f64,
    pub publications: f64,
}

/// Ingestion settings.
#[derive(Debug, Clone)]
pub struct IngestConfig {
    /// USD per FTE used to derive salary spend from a headcount.
    pub median_compensation: f64,
    /// When set, validation failures abort the load instead of dropping rows.
    pub strict: bool,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            median_compensation: 90_000.0,
            strict: false,
        }
    }
}

impl IngestConfig {
    fn validate(&self) -> Result<(), DatasetError> {
        if !(self.median_compensation.is_finite() && self.median_compensation > 0.0) {
            return Err(DatasetError::InvalidConfig(format!(
                "median_compensation must be positive, got {}",
                self.median_compensation
            )));
        }
        Ok(())
    }
}

/// A row dropped (or value skipped) during a non-strict load.
#[derive(Debug, Clone, PartialEq)]
pub struct IngestWarning {
    pub line: u64,
    pub message: String,
}

impl fmt::Display for IngestWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Result of a panel load: the dataset plus any non-strict drop warnings.
#[derive(Debug)]
pub struct PanelLoad {
    pub dataset: PanelDataset,
    pub warnings: Vec<IngestWarning>,
}

/// Result of a survey load: normalized observation rows plus warnings.
#[derive(Debug)]
pub struct SurveyLoad {
    pub rows: Vec<ObservationRow>,
    pub warnings: Vec<IngestWarning>,
}

/// Loads and validates a panel CSV (header [`PANEL_HEADER`]).
///
/// Strict mode aborts on the first invalid row; non-strict drops the row
/// and records a warning. An input that yields no valid rows is
/// `EmptyDataset` either way.
pub fn load_panel(path: &Path, config: &IngestConfig) -> Result<PanelLoad, DatasetError> {
    config.validate()?;
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);

    let header = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let idx = column_indices(&header, &PANEL_HEADER)?;

    let mut rows: Vec<ObservationRow> = Vec::new();
    let mut warnings: Vec<IngestWarning> = Vec::new();
    let mut seen: HashSet<(String, i32)> = HashSet::new();

    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let err = csv_error(&e);
                if config.strict {
                    return Err(err);
                }
                warnings.push(IngestWarning {
                    line: match e.position() {
                        Some(p) => p.line(),
                        None => 0,
                    },
                    message: format!("skipped: {err}"),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_panel_row(&record, &idx) {
            Ok(row) => {
                let key = (row.institution.clone(), row.year);
                if !seen.insert(key) {
                    let err = DatasetError::DuplicateKey {
                        institution: row.institution.clone(),
                        year: row.year,
                    };
                    if config.strict {
                        return Err(err);
                    }
                    warnings.push(IngestWarning {
                        line,
                        message: format!("dropped: {err}"),
                    });
                    continue;
                }
                rows.push(row);
            }
            Err(err) => {
                if config.strict {
                    return Err(err);
                }
                warnings.push(IngestWarning {
                    line,
                    message: format!("dropped: {err}"),
                });
            }
        }
    }

    let dataset = PanelDataset::new(rows, path.display().to_string())?;
    Ok(PanelLoad { dataset, warnings })
}

fn column_indices(
    header: &csv::StringRecord,
    expected: &[&'static str],
) -> Result<Vec<usize>, DatasetError> {
    expected
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or(DatasetError::SchemaViolation {
                    column: (*name).to_string(),
                })
        })
        .collect()
}

fn parse_panel_row(record: &csv::StringRecord, idx: &[usize]) -> Result<ObservationRow, DatasetError> {
    let get = |i: usize| record.get(idx[i]).unwrap_or("").trim();
    let institution = get(0).to_string();
    let year = parse_year(&institution, get(1))?;
    let row = ObservationRow {
        institution: institution.clone(),
        year,
        teraflops: parse_opt(&institution, year, "teraflops", get(2))?,
        salaries: parse_opt(&institution, year, "salaries_musd", get(3))?,
        herd: parse_opt(&institution, year, "herd_musd", get(4))?,
        doctorates: parse_opt(&institution, year, "doctorates", get(5))?,
        publications: parse_opt(&institution, year, "publications", get(6))?,
        hi_impact_pubs: parse_opt(&institution, year, "hi_impact_pubs", get(7))?,
    };
    row.validate()?;
    Ok(row)
}

fn parse_year(institution: &str, cell: &str) -> Result<i32, DatasetError> {
    cell.parse::<i32>().map_err(|_| DatasetError::InvalidValue {
        institution: institution.to_string(),
        year: 0,
        field: "year",
        message: format!("unparseable `{cell}`"),
    })
}

fn parse_opt(
    institution: &str,
    year: i32,
    field: &'static str,
    cell: &str,
) -> Result<Option<f64>, DatasetError> {
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) => Ok(Some(v)),
        Err(_) => Err(DatasetError::InvalidValue {
            institution: institution.to_string(),
            year,
            field,
            message: format!("unparseable `{cell}`"),
        }),
    }
}

/// Normalizes a raw survey record into canonical units.
///
/// Explicit TeraFLOPS and salary values always win; otherwise capacity is
/// derived from the device inventory (count x GF / 1000) and salaries from
/// the FTE headcount times the configured median compensation, in $M.
pub fn normalize_survey(
    record: &SurveyRecord,
    config: &IngestConfig,
) -> Result<ObservationRow, DatasetError> {
    config.validate()?;
    let teraflops = match record.teraflops {
        Some(tf) => tf,
        None => {
            if record.core_inventory.is_empty() {
                return Err(DatasetError::InsufficientData {
                    institution: record.institution.clone(),
                    year: record.year,
                    message: "neither teraflops nor core inventory present".into(),
                });
            }
            record
                .core_inventory
                .iter()
                .map(|item| item.device_count * item.gf_per_device)
                .sum::<f64>()
                / 1000.0
        }
    };
    let salaries = match record.salaries {
        Some(s) => s,
        None => match record.fte_count {
            Some(fte) => fte * config.median_compensation / 1.0e6,
            None => {
                return Err(DatasetError::InsufficientData {
                    institution: record.institution.clone(),
                    year: record.year,
                    message: "neither salaries nor fte_count present".into(),
                })
            }
        },
    };
    let row = ObservationRow {
        institution: record.institution.clone(),
        year: record.year,
        teraflops: Some(teraflops),
        salaries: Some(salaries),
        herd: Some(record.herd),
        doctorates: Some(record.doctorates),
        publications: Some(record.publications),
        hi_impact_pubs: None,
    };
    row.validate()?;
    Ok(row)
}

/// Loads a survey CSV (header [`SURVEY_HEADER`]) plus an optional inventory
/// sidecar, returning normalized observation rows.
pub fn load_survey(
    path: &Path,
    inventory_path: Option<&Path>,
    config: &IngestConfig,
) -> Result<SurveyLoad, DatasetError> {
    config.validate()?;
    let inventory = match inventory_path {
        Some(p) => load_inventory(p, config)?,
        None => Vec::new(),
    };

    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let idx = column_indices(&header, &SURVEY_HEADER)?;

    let mut rows: Vec<ObservationRow> = Vec::new();
    let mut warnings: Vec<IngestWarning> = Vec::new();
    let mut seen: HashSet<(String, i32)> = HashSet::new();

    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let err = csv_error(&e);
                if config.strict {
                    return Err(err);
                }
                warnings.push(IngestWarning {
                    line: match e.position() {
                        Some(p) => p.line(),
                        None => 0,
                    },
                    message: format!("skipped: {err}"),
                });
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match parse_survey_row(&record, &idx, &inventory, config) {
            Ok(row) => {
                let key = (row.institution.clone(), row.year);
                if !seen.insert(key) {
                    let err = DatasetError::DuplicateKey {
                        institution: row.institution.clone(),
                        year: row.year,
                    };
                    if config.strict {
                        return Err(err);
                    }
                    warnings.push(IngestWarning {
                        line,
                        message: format!("dropped: {err}"),
                    });
                    continue;
                }
                rows.push(row);
            }
            Err(err) => {
                if config.strict {
                    return Err(err);
                }
                warnings.push(IngestWarning {
                    line,
                    message: format!("dropped: {err}"),
                });
            }
        }
    }

    if rows.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    rows.sort_by(|a, b| (a.institution.as_str(), a.year).cmp(&(b.institution.as_str(), b.year)));
    Ok(SurveyLoad { rows, warnings })
}

fn parse_survey_row(
    record: &csv::StringRecord,
    idx: &[usize],
    inventory: &[(String, InventoryItem)],
    config: &IngestConfig,
) -> Result<ObservationRow, DatasetError> {
    let get = |i: usize| record.get(idx[i]).unwrap_or("").trim();
    let institution = get(0).to_string();
    let year = parse_year(&institution, get(1))?;
    let required = |field: &'static str, cell: &str| -> Result<f64, DatasetError> {
        parse_opt(&institution, year, field, cell)?.ok_or(DatasetError::InvalidValue {
            institution: institution.clone(),
            year,
            field,
            message: "missing required output".into(),
        })
    };
    let survey = SurveyRecord {
        institution: institution.clone(),
        year,
        teraflops: parse_opt(&institution, year, "teraflops", get(2))?,
        salaries: parse_opt(&institution, year, "salaries_musd", get(3))?,
        fte_count: parse_opt(&institution, year, "fte_count", get(4))?,
        herd: required("herd_musd", get(5))?,
        doctorates: required("doctorates", get(6))?,
        publications: required("publications", get(7))?,
        core_inventory: inventory
            .iter()
            .filter(|(name, _)| *name == institution)
            .map(|(_, item)| item.clone())
            .collect(),
    };
    normalize_survey(&survey, config)
}

fn load_inventory(
    path: &Path,
    config: &IngestConfig,
) -> Result<Vec<(String, InventoryItem)>, DatasetError> {
    let file = File::open(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader.headers().map_err(|e| csv_error(&e))?.clone();
    let idx = column_indices(&header, &INVENTORY_HEADER)?;
    let mut items = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let get = |i: usize| record.get(idx[i]).unwrap_or("").trim();
        let institution = get(0).to_string();
        let count = parse_opt(&institution, 0, "device_count", get(1))?;
        let gf = parse_opt(&institution, 0, "gf_per_device", get(2))?;
        let (count, gf) = match (count, gf) {
            (Some(c), Some(g)) if c >= 0.0 && g >= 0.0 => (c, g),
            _ => {
                let err = DatasetError::InvalidValue {
                    institution: institution.clone(),
                    year: 0,
                    field: "device_count",
                    message: "inventory row needs nonnegative device_count and gf_per_device".into(),
                };
                if config.strict {
                    return Err(err);
                }
                continue;
            }
        };
        items.push((
            institution,
            InventoryItem {
                device_count: count,
                gf_per_device: gf,
            },
        ));
    }
    Ok(items)
}
