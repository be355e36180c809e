//! Result rows and their CSV / JSON-lines encodings.
//!
//! Floating-point values are written with 12 significant digits in both
//! formats, so a file parses back to exactly the values the other format
//! holds. Missing values are empty CSV fields and JSON `null`.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::config::OutputFormat;
use crate::error::{CliError, CliResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub const RESULT_HEADER: [&str; 13] = [
    "experiment",
    "seed",
    "mu",
    "eps",
    "k",
    "eta",
    "q",
    "iterations",
    "retries",
    "aborted",
    "energy_out",
    "energy_exact_nearest",
    "wall_time_ms",
];

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Text(String),
    Int(Option<u64>),
    Real(Option<f64>),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(Some(v)) => v.to_string(),
            Cell::Real(Some(x)) => format_significant(*x),
            Cell::Int(None) | Cell::Real(None) => String::new(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Int(Some(v)) => Value::from(*v),
            Cell::Real(Some(x)) => Number::from_f64(round_significant(*x))
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Int(None) | Cell::Real(None) => Value::Null,
            Cell::Bool(b) => Value::Bool(*b),
        }
    }
}

/// A row of any output table.
pub trait Record {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
    /// Whether this row counts as a successful run for the exit code.
    fn success(&self) -> bool;
}

/// One run of an amplification-based experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub seed: u64,
    pub mu: Option<f64>,
    pub eps: Option<f64>,
    pub k: Option<u64>,
    pub eta: Option<u64>,
    pub q: Option<f64>,
    pub iterations: Option<u64>,
    pub retries: Option<u64>,
    pub aborted: bool,
    /// `⟨H⟩` of the output in original units; empty unless the run succeeded.
    pub energy_out: Option<f64>,
    pub energy_exact_nearest: Option<f64>,
    pub wall_time_ms: f64,
    /// Not written; drives the exit code.
    pub succeeded: bool,
}

impl Record for ResultRow {
    fn header() -> &'static [&'static str] {
        &RESULT_HEADER
    }

    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Text(self.experiment.clone()),
            Cell::Int(Some(self.seed)),
            Cell::Real(self.mu),
            Cell::Real(self.eps),
            Cell::Int(self.k),
            Cell::Int(self.eta),
            Cell::Real(self.q),
            Cell::Int(self.iterations),
            Cell::Int(self.retries),
            Cell::Bool(self.aborted),
            Cell::Real(self.energy_out),
            Cell::Real(self.energy_exact_nearest),
            Cell::Real(Some(self.wall_time_ms)),
        ]
    }

    fn success(&self) -> bool {
        self.succeeded
    }
}

/// `%.12g`-style formatting: fixed notation for decimal exponents in
/// `[-5, 12)`, scientific otherwise, trailing zeros removed.
pub fn format_significant(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_owned()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

/// The value a reader recovers from [`format_significant`].
pub fn round_significant(x: f64) -> f64 {
    format_significant(x).parse().unwrap_or(x)
}

/// Streams rows to a writer, flushing after each one so an interrupted run
/// leaves a parseable prefix.
pub struct RowWriter<W: Write> {
    format: OutputFormat,
    header: &'static [&'static str],
    csv: Option<csv::Writer<W>>,
    raw: Option<W>,
}

impl<W: Write> RowWriter<W> {
    pub fn new<R: Record>(out: W, format: OutputFormat) -> CliResult<Self> {
        let header = R::header();
        let mut writer = match format {
            OutputFormat::Csv => RowWriter {
                format,
                header,
                csv: Some(csv::WriterBuilder::new().from_writer(out)),
                raw: None,
            },
            OutputFormat::Jsonl => RowWriter {
                format,
                header,
                csv: None,
                raw: Some(out),
            },
        };
        if let Some(w) = writer.csv.as_mut() {
            w.write_record(header)?;
            w.flush()?;
        }
        Ok(writer)
    }

    pub fn write<R: Record>(&mut self, row: &R) -> CliResult<()> {
        let cells = row.cells();
        if cells.len() != self.header.len() {
            return Err(CliError::output(format!(
                "row has {} fields, header has {}",
                cells.len(),
                self.header.len()
            )));
        }
        match self.format {
            OutputFormat::Csv => {
                let w = self.csv.as_mut().expect("csv writer");
                w.write_record(cells.iter().map(Cell::csv))?;
                w.flush()?;
            }
            OutputFormat::Jsonl => {
                let w = self.raw.as_mut().expect("raw writer");
                let object: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(&cells)
                    .map(|(k, c)| ((*k).to_owned(), c.json()))
                    .collect();
                serde_json::to_writer(&mut *w, &Value::Object(object))
                    .map_err(|e| CliError::output(e.to_string()))?;
                w.write_all(b"\n")?;
                w.flush()?;
            }
        }
        Ok(())
    }
}
