//! Decision matrix ingestion, validation and canonical serialization.
//!
//! CSV header: `dmu,in:<label>[unit],...,out:<label>[unit],...`.
//! JSON: `{"dmus": [...], "inputs": [{"label", "unit"}], "outputs": [...], "X": [[...]], "Y": [[...]]}`
//! with `X[i][j]` the i-th input of the j-th DMU.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Global max/min entry ratio above which a scaling warning is raised.
pub const MAGNITUDE_WARNING_RATIO: f64 = 1e6;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum DatasetError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: usize,
        message: String,
    },
    #[error("malformed dataset: {0}")]
    Shape(String),
    #[error("{criterion} of DMU {dmu} must be positive, got {value}")]
    NonPositive {
        dmu: String,
        criterion: String,
        value: f64,
    },
    #[error("duplicate DMU label {0:?}")]
    DuplicateLabel(String),
    #[error("at least 2 DMUs are required, got {0}")]
    TooFewDmus(usize),
    #[error("at least one input and one output are required")]
    MissingCriteria,
    #[error("unknown DMU {0:?}")]
    UnknownDmu(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub label: String,
    #[serde(default)]
    pub unit: String,
}

impl Criterion {
    pub fn new(label: &str, unit: &str) -> Self {
        Criterion {
            label: label.to_string(),
            unit: unit.to_string(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawMatrix {
    dmus: Vec<String>,
    inputs: Vec<Criterion>,
    outputs: Vec<Criterion>,
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
}

impl TryFrom<RawMatrix> for DecisionMatrix {
    type Error = DatasetError;
    fn try_from(r: RawMatrix) -> Result<Self, Self::Error> {
        DecisionMatrix::new(r.dmus, r.inputs, r.outputs, r.x, r.y)
    }
}

/// `n` DMUs, `m` inputs, `s` outputs, every entry strictly positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix")]
pub struct DecisionMatrix {
    dmus: Vec<String>,
    inputs: Vec<Criterion>,
    outputs: Vec<Criterion>,
    #[serde(rename = "X")]
    x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    y: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guess from a file name, falling back to content sniffing.
    pub fn detect(name: &str, text: &str) -> Format {
        if name.to_ascii_lowercase().ends_with(".json") || text.trim_start().starts_with('{') {
            Format::Json
        } else {
            Format::Csv
        }
    }
}

impl DecisionMatrix {
    pub fn new(
        dmus: Vec<String>,
        inputs: Vec<Criterion>,
        outputs: Vec<Criterion>,
        x: Vec<Vec<f64>>,
        y: Vec<Vec<f64>>,
    ) -> Result<Self, DatasetError> {
        let n = dmus.len();
        if n < 2 {
            return Err(DatasetError::TooFewDmus(n));
        }
        if inputs.is_empty() || outputs.is_empty() {
            return Err(DatasetError::MissingCriteria);
        }
        if x.len() != inputs.len() || y.len() != outputs.len() {
            return Err(DatasetError::Shape(format!(
                "expected {} input rows and {} output rows, got {} and {}",
                inputs.len(),
                outputs.len(),
                x.len(),
                y.len()
            )));
        }
        for (k, row) in x.iter().chain(y.iter()).enumerate() {
            if row.len() != n {
                return Err(DatasetError::Shape(format!("criterion row {k} has {} entries, expected {n}", row.len())));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for d in &dmus {
            if !seen.insert(d.as_str()) {
                return Err(DatasetError::DuplicateLabel(d.clone()));
            }
        }
        for (crit, row) in inputs.iter().zip(&x).chain(outputs.iter().zip(&y)) {
            for (j, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v > 0.0) {
                    return Err(DatasetError::NonPositive {
                        dmu: dmus[j].clone(),
                        criterion: crit.label.clone(),
                        value: v,
                    });
                }
            }
        }
        Ok(DecisionMatrix {
            dmus,
            inputs,
            outputs,
            x,
            y,
        })
    }

    pub fn n(&self) -> usize {
        self.dmus.len()
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn s(&self) -> usize {
        self.outputs.len()
    }

    pub fn dmus(&self) -> &[String] {
        &self.dmus
    }

    pub fn inputs(&self) -> &[Criterion] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Criterion] {
        &self.outputs
    }

    /// Input `i` of DMU `j`.
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.x[i][j]
    }

    /// Output `r` of DMU `j`.
    pub fn y(&self, r: usize, j: usize) -> f64 {
        self.y[r][j]
    }

    pub fn input_column(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|row| row[j]).collect()
    }

    pub fn output_column(&self, j: usize) -> Vec<f64> {
        self.y.iter().map(|row| row[j]).collect()
    }

    pub fn dmu_index(&self, label: &str) -> Result<usize, DatasetError> {
        self.dmus
            .iter()
            .position(|d| d == label)
            .ok_or_else(|| DatasetError::UnknownDmu(label.to_string()))
    }

    /// Copy with DMU `j`'s data replaced.
    pub fn with_dmu_data(&self, j: usize, x: &[f64], y: &[f64]) -> Result<Self, DatasetError> {
        let mut xs = self.x.clone();
        let mut ys = self.y.clone();
        for (i, v) in x.iter().enumerate() {
            xs[i][j] = *v;
        }
        for (r, v) in y.iter().enumerate() {
            ys[r][j] = *v;
        }
        DecisionMatrix::new(self.dmus.clone(), self.inputs.clone(), self.outputs.clone(), xs, ys)
    }

    /// Copy with DMU `j` removed.
    pub fn without_dmu(&self, j: usize) -> Result<Self, DatasetError> {
        let mut dmus = self.dmus.clone();
        dmus.remove(j);
        let drop = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|r| {
                    let mut r = r.clone();
                    r.remove(j);
                    r
                })
                .collect()
        };
        DecisionMatrix::new(dmus, self.inputs.clone(), self.outputs.clone(), drop(&self.x), drop(&self.y))
    }

    pub fn from_json_str(text: &str) -> Result<Self, DatasetError> {
        serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            match e.classify() {
                serde_json::error::Category::Data => DatasetError::Shape(message),
                _ => DatasetError::Parse {
                    line: e.line() as u64,
                    column: e.column(),
                    message,
                },
            }
        })
    }

    pub fn from_csv_str(text: &str) -> Result<Self, DatasetError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let header = rdr
            .headers()
            .map_err(|e| csv_error(&e, 1))?
            .iter()
            .map(str::to_string)
            .collect::<Vec<_>>();
        if header.first().map(|h| h.to_ascii_lowercase()) != Some("dmu".to_string()) {
            return Err(DatasetError::Parse {
                line: 1,
                column: 1,
                message: "first header field must be `dmu`".into(),
            });
        }
        let mut roles = Vec::new();
        let mut inputs = Vec::new();
        let mut outputs = Vec::new();
        for (k, h) in header.iter().enumerate().skip(1) {
            let (is_input, rest) = if let Some(rest) = h.strip_prefix("in:") {
                (true, rest)
            } else if let Some(rest) = h.strip_prefix("out:") {
                (false, rest)
            } else {
                return Err(DatasetError::Parse {
                    line: 1,
                    column: k + 1,
                    message: format!("header {h:?} must start with `in:` or `out:`"),
                });
            };
            let crit = parse_criterion(rest).ok_or_else(|| DatasetError::Parse {
                line: 1,
                column: k + 1,
                message: format!("cannot read label and unit from {h:?}"),
            })?;
            roles.push(is_input);
            if is_input {
                inputs.push(crit);
            } else {
                outputs.push(crit);
            }
        }
        let mut dmus = Vec::new();
        let mut x: Vec<Vec<f64>> = vec![Vec::new(); inputs.len()];
        let mut y: Vec<Vec<f64>> = vec![Vec::new(); outputs.len()];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(&e, 0))?;
            let line = rec.position().map_or(0, |p| p.line());
            if rec.len() != header.len() {
                return Err(DatasetError::Parse {
                    line,
                    column: rec.len().min(header.len()) + 1,
                    message: format!("expected {} fields, got {}", header.len(), rec.len()),
                });
            }
            dmus.push(rec[0].to_string());
            let (mut ii, mut rr) = (0, 0);
            for (k, is_input) in roles.iter().enumerate() {
                let field = &rec[k + 1];
                let v: f64 = field.parse().map_err(|_| DatasetError::Parse {
                    line,
                    column: k + 2,
                    message: format!("{field:?} is not a number"),
                })?;
                if *is_input {
                    x[ii].push(v);
                    ii += 1;
                } else {
                    y[rr].push(v);
                    rr += 1;
                }
            }
        }
        DecisionMatrix::new(dmus, inputs, outputs, x, y)
    }

    pub fn parse(text: &str, format: Format) -> Result<Self, DatasetError> {
        match format {
            Format::Csv => Self::from_csv_str(text),
            Format::Json => Self::from_json_str(text),
        }
    }

    /// Compact canonical JSON; numbers use the shortest exact round-trip form.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).expect("matrix serializes")
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["dmu".to_string()];
        header.extend(self.inputs.iter().map(|c| format!("in:{}", format_criterion(c))));
        header.extend(self.outputs.iter().map(|c| format!("out:{}", format_criterion(c))));
        w.write_record(&header).expect("in-memory write");
        for j in 0..self.n() {
            let mut rec = vec![self.dmus[j].clone()];
            rec.extend(self.x.iter().map(|r| r[j].to_string()));
            rec.extend(self.y.iter().map(|r| r[j].to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json_string().as_bytes()))
    }
}

fn parse_criterion(text: &str) -> Option<Criterion> {
    match text.find('[') {
        Some(open) => {
            let rest = text[open + 1..].strip_suffix(']')?;
            let label = text[..open].trim();
            (!label.is_empty()).then(|| Criterion::new(label, rest.trim()))
        }
        None => (!text.trim().is_empty()).then(|| Criterion::new(text.trim(), "")),
    }
}

fn format_criterion(c: &Criterion) -> String {
    if c.unit.is_empty() {
        c.label.clone()
    } else {
        format!("{}[{}]", c.label, c.unit)
    }
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> DatasetError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    DatasetError::Parse {
        line,
        column: 0,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionSummary {
    pub label: String,
    pub unit: String,
    pub role: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub hash: Option<String>,
    pub criteria: Vec<CriterionSummary>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Warnings and per-criterion magnitudes for an accepted matrix.
pub fn validate(m: &DecisionMatrix) -> ValidationReport {
    let mut warnings = Vec::new();
    if m.n() < 2 * (m.m() + m.s()) {
        warnings.push(format!(
            "discrimination: {} DMUs is fewer than 2(m+s) = {}",
            m.n(),
            2 * (m.m() + m.s())
        ));
    }
    let mut criteria = Vec::new();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for (role, crits, rows) in [("input", &m.inputs, &m.x), ("output", &m.outputs, &m.y)] {
        for (c, row) in crits.iter().zip(rows.iter()) {
            let cmin = row.iter().cloned().fold(f64::INFINITY, f64::min);
            let cmax = row.iter().cloned().fold(0.0, f64::max);
            lo = lo.min(cmin);
            hi = hi.max(cmax);
            criteria.push(CriterionSummary {
                label: c.label.clone(),
                unit: c.unit.clone(),
                role: role.to_string(),
                min: cmin,
                max: cmax,
            });
        }
    }
    if hi / lo > MAGNITUDE_WARNING_RATIO {
        warnings.push(format!(
            "magnitude spread: entries range from {lo:e} to {hi:e} (ratio above {MAGNITUDE_WARNING_RATIO:e})"
        ));
    }
    ValidationReport {
        errors: Vec::new(),
        warnings,
        n: m.n(),
        m: m.m(),
        s: m.s(),
        hash: Some(m.hash()),
        criteria,
    }
}

/// Parses and validates raw text; parse failures become report errors.
pub fn validate_source(text: &str, format: Format) -> ValidationReport {
    match DecisionMatrix::parse(text, format) {
        Ok(m) => validate(&m),
        Err(e) => ValidationReport {
            errors: vec![e.to_string()],
            warnings: Vec::new(),
            n: 0,
            m: 0,
            s: 0,
            hash: None,
            criteria: Vec::new(),
        },
    }
}

/// The six-DMU, two-input, two-output matrix used throughout the examples.
pub fn example_matrix() -> DecisionMatrix {
    DecisionMatrix::new(
        ["K", "A", "B", "D", "G", "H"].iter().map(|s| s.to_string()).collect(),
        vec![Criterion::new("x1", "ton"), Criterion::new("x2", "hr")],
        vec![Criterion::new("y1", "m3"), Criterion::new("y2", "%")],
        vec![
            vec![1.6, 2.3, 1.0, 1.9, 1.8, 2.5],
            vec![145.0, 120.0, 29.0, 281.0, 250.0, 100.0],
        ],
        vec![
            vec![1036.0, 1327.0, 567.0, 2446.0, 1794.0, 1000.0],
            vec![49.0, 97.0, 89.0, 97.0, 57.0, 70.0],
        ],
    )
    .expect("example matrix is valid")
}
