//! Deterministic CSV and JSON writers.
//!
//! Floats in CSV are written with 17 significant digits (round-trip exact
//! for doubles); negative zero is normalized so algebraically identical
//! runs produce identical bytes. JSON goes through `serde_json`, whose
//! shortest-round-trip float formatting is deterministic.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::spec::RunConfig;

/// 17-significant-digit scientific form with `-0` normalized to `0`.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// A CSV file with the run configuration embedded as comment lines.
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(config: &RunConfig, certified: Option<bool>, header: &str) -> Result<Csv> {
        let mut buf = String::new();
        let config_json = serde_json::to_string(config).context("serialize run config")?;
        writeln!(buf, "# config: {config_json}").ok();
        if let Some(flag) = certified {
            writeln!(buf, "# certified: {flag}").ok();
        }
        writeln!(buf, "{header}").ok();
        Ok(Csv { buf })
    }

    pub fn row(&mut self, fields: &[CsvField<'_>]) {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            match f {
                CsvField::Num(v) => self.buf.push_str(&fmt_f64(*v)),
                CsvField::Text(s) => self.buf.push_str(s),
            }
        }
        self.buf.push('\n');
    }

    pub fn write(self, path: &Path) -> Result<()> {
        std::fs::write(path, self.buf)
            .with_context(|| format!("cannot write {}", path.display()))
    }
}

pub enum CsvField<'a> {
    Num(f64),
    Text(&'a str),
}

/// Writes a pretty-printed JSON document.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("serialize output")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
