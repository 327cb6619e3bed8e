//! Text formats: sample files, null specifications, critical-value and
//! power-curve CSV, and JSON with 17 significant digits.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gofstats::{pit, Family, UnitSample};
use crate::mcharness::PowerCurve;
use crate::numeric::special::normal_cdf;

/// One decimal per line; `#` starts a comment, blank lines are skipped.
pub fn parse_sample_text(text: &str) -> Result<Vec<f64>> {
    parse_sample_lines(text).map(|(values, _)| values)
}

/// [`parse_sample_text`] plus the 1-based source line of every value.
pub fn parse_sample_lines(text: &str) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("not a decimal number: '{body}'") })?;
        if !v.is_finite() {
            return Err(Error::Parse { line, message: format!("value is not finite: '{body}'") });
        }
        out.push(v);
        lines.push(line);
    }
    if out.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok((out, lines))
}

/// Hypothesized distribution of raw data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullSpec {
    Uniform,
    Normal { mu: f64, sigma: f64 },
}

impl NullSpec {
    /// Maps raw data to [0, 1] through the null CDF.
    pub fn transform(&self, data: &[f64]) -> Result<UnitSample> {
        match *self {
            NullSpec::Uniform => UnitSample::new(data.to_vec()),
            NullSpec::Normal { mu, sigma } => pit(data, |v| normal_cdf((v - mu) / sigma)),
        }
    }
}

impl fmt::Display for NullSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullSpec::Uniform => f.write_str("uniform"),
            NullSpec::Normal { mu, sigma } => write!(f, "normal({mu},{sigma})"),
        }
    }
}

impl FromStr for NullSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_null_spec(s)
    }
}

/// `uniform` or `normal(MU,SIGMA)` with `SIGMA > 0`.
pub fn parse_null_spec(text: &str) -> Result<NullSpec> {
    let bad = |msg: &str| Error::InvalidArgument(format!("null spec '{text}': {msg}"));
    let t = text.trim();
    if t.eq_ignore_ascii_case("uniform") {
        return Ok(NullSpec::Uniform);
    }
    let lower = t.to_ascii_lowercase();
    let inner = lower
        .strip_prefix("normal")
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad("expected 'uniform' or 'normal(MU,SIGMA)'"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(bad("normal takes exactly two arguments"));
    }
    let mu: f64 = parts[0].parse().map_err(|_| bad("MU is not a number"))?;
    let sigma: f64 = parts[1].parse().map_err(|_| bad("SIGMA is not a number"))?;
    if !mu.is_finite() {
        return Err(bad("MU must be finite"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(bad("SIGMA must be positive and finite"));
    }
    Ok(NullSpec::Normal { mu, sigma })
}

pub const CRITICAL_HEADER: [&str; 7] = ["family", "m", "truncated", "alpha", "critical_value", "method", "tolerance"];

/// One row of a critical-value table. `tolerance` is the probability error
/// for analytic rows and the bootstrap standard error for simulated rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalRow {
    pub family: String,
    pub m: usize,
    pub truncated: bool,
    pub alpha: f64,
    pub critical_value: f64,
    pub method: String,
    pub tolerance: f64,
}

impl CriticalRow {
    pub fn family(&self) -> Result<Family> {
        self.family.parse::<Family>()?.with_truncation(self.truncated)
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse { line, message: e.to_string() }
}

pub fn write_critical_table<W: Write>(rows: &[CriticalRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    if rows.is_empty() {
        w.write_record(CRITICAL_HEADER).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_critical_table(text: &str) -> Result<Vec<CriticalRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?;
    if header.iter().ne(CRITICAL_HEADER) {
        return Err(Error::Parse { line: 1, message: format!("expected header {}", CRITICAL_HEADER.join(",")) });
    }
    let mut rows = Vec::new();
    for rec in r.deserialize::<CriticalRow>() {
        let row = rec.map_err(csv_error)?;
        let line = rows.len() + 2;
        row.family().map_err(|e| Error::Parse { line, message: e.to_string() })?;
        if !(row.alpha > 0.0 && row.alpha < 1.0) || !row.critical_value.is_finite() {
            return Err(Error::Parse { line, message: "alpha must lie in (0, 1) and the value be finite".into() });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub const POWER_HEADER: [&str; 6] = ["param", "rate", "se", "replicates", "family", "m"];

#[derive(Serialize)]
struct PowerRow<'a> {
    param: f64,
    rate: f64,
    se: f64,
    replicates: usize,
    family: &'a str,
    m: usize,
}

pub fn write_power_curve<W: Write>(curve: &PowerCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in &curve.points {
        w.serialize(PowerRow {
            param: p.param,
            rate: p.rate,
            se: p.se,
            replicates: curve.replicates,
            family: curve.family.name(),
            m: curve.m,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes every float with 17 significant digits, enough to round-trip.
struct SeventeenDigits;

impl serde_json::ser::Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with 17 significant digits per float; non-finite floats
/// become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
