use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::config::Format;
use crate::Failure;

/// Inclusive sweep `start:end:step` with `round((end - start)/step) + 1`
/// samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    start: f64,
    end: f64,
    step: f64,
}

impl Range {
    pub fn new(start: f64, end: f64, step: f64) -> Result<Self, String> {
        if !(start.is_finite() && end.is_finite() && step.is_finite()) {
            return Err(format!("range bounds must be finite: {start}:{end}:{step}"));
        }
        if start != end && !(step > 0.0 && end > start) {
            return Err(format!("range {start}:{end}:{step} needs end > start and step > 0"));
        }
        Ok(Range { start, end, step })
    }

    pub fn len(&self) -> usize {
        if self.start == self.end {
            1
        } else {
            ((self.end - self.start) / self.step).round() as usize + 1
        }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| if i == 0 { self.start } else { self.start + i as f64 * self.step })
    }
}

impl FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range must be start:end:step, got {s:?}"));
        }
        let v: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("range component {p:?}: {e}")))
            .collect::<Result<_, _>>()?;
        Range::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.end, self.step)
    }
}

fn json_err(e: serde_json::Error) -> Failure {
    match e.io_error_kind() {
        Some(k) => io::Error::from(k).into(),
        None => Failure::Domain(format!("serialization: {e}")),
    }
}

fn csv_err(e: csv::Error) -> Failure {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e.into(),
        k => Failure::Domain(format!("csv: {k:?}")),
    }
}

/// JSON lines or CSV with a header row.
pub fn emit<T: Serialize>(out: &mut impl Write, format: Format, rows: &[T]) -> Result<(), Failure> {
    match format {
        Format::Json => {
            for r in rows {
                serde_json::to_writer(&mut *out, r).map_err(json_err)?;
                writeln!(out)?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in rows {
                w.serialize(r).map_err(csv_err)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// As [`emit`], preceded by a parameter echo: a `# {json}` line for CSV or a
/// `{"header": ...}` line for JSON.
pub fn emit_with_header<T: Serialize>(
    out: &mut impl Write,
    format: Format,
    header: &serde_json::Value,
    rows: &[T],
) -> Result<(), Failure> {
    match format {
        Format::Csv => writeln!(out, "# {}", serde_json::to_string(header).map_err(json_err)?)?,
        Format::Json => writeln!(out, "{}", serde_json::json!({ "header": header }))?,
    }
    emit(out, format, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_counts() {
        assert_eq!("-3:3:0.01".parse::<Range>().unwrap().len(), 601);
        assert_eq!("1:1:0.5".parse::<Range>().unwrap().len(), 1);
        assert_eq!("0:1:0.25".parse::<Range>().unwrap().values().collect::<Vec<_>>(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("1:0:0.1".parse::<Range>().is_err());
        assert!("0:1".parse::<Range>().is_err());
        assert!("0:1:0".parse::<Range>().is_err());
    }
}
