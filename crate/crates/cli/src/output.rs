//! CSV / JSON / plain-text serialization of results.

use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{CliError, Result};
use crate::report::RunReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// `v` with exactly ten significant digits in positional notation, or in
/// exponent notation outside [1e-5, 1e10). Non-finite values print as
/// `inf`, `-inf` and `nan`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.9e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..10).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        out.push_str(&digits[..int_len]);
        if int_len < digits.len() {
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    out
}

/// `v` rounded to ten significant digits, as a JSON number (or a string
/// for non-finite values).
pub fn ser_sig<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(fmt_sig(*v).parse::<f64>().expect("formatted float parses"))
    } else {
        s.serialize_str(&fmt_sig(*v))
    }
}

pub fn ser_sig_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_sig(x, s),
        None => s.serialize_none(),
    }
}

/// Where a result row sits: a single abscissa or a gap (r, s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Abscissa {
    X(f64),
    Interval(f64, f64),
}

/// One output line: analytic value plus optional Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub at: Abscissa,
    pub analytic: f64,
    pub mc_value: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub z_score: Option<f64>,
}

impl ResultRow {
    pub fn analytic(at: Abscissa, analytic: f64) -> Self {
        Self { at, analytic, mc_value: None, mc_stderr: None, z_score: None }
    }

    /// Attaches an MC estimate; z is |analytic − mc| / stderr.
    pub fn with_mc(mut self, value: f64, stderr: f64) -> Self {
        self.mc_value = Some(value);
        self.mc_stderr = Some(stderr);
        self.z_score = Some(z_score(self.analytic, value, stderr));
        self
    }
}

/// |a − b| / se, with 0/0 read as 0 and d/0 as infinity.
pub fn z_score(a: f64, b: f64, se: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        0.0
    } else {
        d / se
    }
}

#[derive(Serialize)]
struct JsonRow {
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_sig_opt")]
    x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_sig_opt")]
    r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_sig_opt")]
    s: Option<f64>,
    #[serde(serialize_with = "ser_sig")]
    analytic: f64,
    #[serde(serialize_with = "ser_sig_opt")]
    mc_value: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    mc_stderr: Option<f64>,
    #[serde(serialize_with = "ser_sig_opt")]
    z_score: Option<f64>,
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

fn csv_bytes(rows: &[ResultRow]) -> Result<Vec<u8>> {
    let interval = matches!(rows.first().map(|r| r.at), Some(Abscissa::Interval(..)));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let map = |e: csv::Error| CliError::Numerical(format!("csv: {e}"));
    if interval {
        w.write_record(["r", "s", "analytic", "mc_value", "mc_stderr", "z_score"]).map_err(map)?;
    } else {
        w.write_record(["x", "analytic", "mc_value", "mc_stderr", "z_score"]).map_err(map)?;
    }
    for row in rows {
        let mut rec = match row.at {
            Abscissa::X(x) => vec![fmt_sig(x)],
            Abscissa::Interval(r, s) => vec![fmt_sig(r), fmt_sig(s)],
        };
        rec.extend([fmt_sig(row.analytic), opt(row.mc_value), opt(row.mc_stderr), opt(row.z_score)]);
        w.write_record(&rec).map_err(map)?;
    }
    w.into_inner().map_err(|e| CliError::Numerical(format!("csv: {e}")))
}

fn json_rows(rows: &[ResultRow]) -> Vec<JsonRow> {
    rows.iter()
        .map(|row| {
            let (x, r, s) = match row.at {
                Abscissa::X(x) => (Some(x), None, None),
                Abscissa::Interval(r, s) => (None, Some(r), Some(s)),
            };
            JsonRow { x, r, s, analytic: row.analytic, mc_value: row.mc_value, mc_stderr: row.mc_stderr, z_score: row.z_score }
        })
        .collect()
}

fn text_bytes(rows: &[ResultRow]) -> Vec<u8> {
    let mut out = String::new();
    for row in rows {
        if rows.len() > 1 {
            match row.at {
                Abscissa::X(x) => out += &format!("{} ", fmt_sig(x)),
                Abscissa::Interval(r, s) => out += &format!("{} {} ", fmt_sig(r), fmt_sig(s)),
            }
        }
        out += &fmt_sig(row.analytic);
        if let (Some(v), Some(e)) = (row.mc_value, row.mc_stderr) {
            out += &format!(" (mc {} ± {})", fmt_sig(v), fmt_sig(e));
        }
        out.push('\n');
    }
    out.into_bytes()
}

/// Serialized bytes for a list of rows; always newline-terminated.
pub fn render_rows(rows: &[ResultRow], format: Format) -> Result<Vec<u8>> {
    if rows.is_empty() {
        return Err(CliError::validation("nothing to emit"));
    }
    match format {
        Format::Text => Ok(text_bytes(rows)),
        Format::Csv => csv_bytes(rows),
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(&json_rows(rows)).map_err(|e| CliError::Numerical(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
    }
}

/// Serialized bytes for a table report. CSV lists two rows per record, the
/// E(r,s) row followed by the Ẽ(r,s) row.
pub fn render_report(report: &RunReport, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(report).map_err(|e| CliError::Numerical(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
        Format::Csv => csv_bytes(&report.rows()),
        Format::Text => Ok(report.summary().into_bytes()),
    }
}

/// Writes `bytes` to `path`, or to stdout when no path is given.
pub fn write_out(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Renders rows in `format` and writes them to `path` (stdout if `None`).
pub fn emit(rows: &[ResultRow], format: Format, path: Option<&Path>) -> Result<()> {
    write_out(&render_rows(rows, format)?, path)
}
