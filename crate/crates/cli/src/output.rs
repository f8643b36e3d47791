use std::fs;
use std::io::Write;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::OutputArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A finished report: the command's config, the pass flag, the full result
/// for JSON output, and a flat table for CSV output.
pub struct Output {
    pub command: &'static str,
    pub config: Value,
    pub pass: bool,
    pub result: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    command: &'a str,
    config: &'a Value,
    pass: bool,
    result: &'a Value,
}

impl Output {
    pub fn new(
        command: &'static str,
        config: &impl Serialize,
        pass: bool,
        result: &impl Serialize,
    ) -> anyhow::Result<Self> {
        Ok(Self {
            command,
            config: serde_json::to_value(config)?,
            pass,
            result: serde_json::to_value(result)?,
            header: Vec::new(),
            rows: Vec::new(),
        })
    }

    pub fn table(mut self, header: &[&str], rows: Vec<Vec<String>>) -> Self {
        self.header = header.iter().map(|h| h.to_string()).collect();
        self.rows = rows;
        self
    }

    pub fn render(&self, format: Format) -> anyhow::Result<Vec<u8>> {
        match format {
            Format::Json => {
                let report = JsonReport {
                    command: self.command,
                    config: &self.config,
                    pass: self.pass,
                    result: &self.result,
                };
                let mut bytes = serde_json::to_vec_pretty(&report)?;
                bytes.push(b'\n');
                Ok(bytes)
            }
            Format::Csv => {
                let mut bytes = Vec::new();
                writeln!(bytes, "# command: {}", self.command)?;
                writeln!(bytes, "# config: {}", serde_json::to_string(&self.config)?)?;
                writeln!(bytes, "# pass: {}", self.pass)?;
                let mut w = csv::Writer::from_writer(bytes);
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                Ok(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)
            }
        }
    }

    pub fn write(&self, out: &OutputArgs) -> anyhow::Result<()> {
        let bytes = self.render(out.format)?;
        match &out.out {
            Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))?,
            None => std::io::stdout().write_all(&bytes)?,
        }
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}
