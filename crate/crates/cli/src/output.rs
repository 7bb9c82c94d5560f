use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::cli::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Rows plus the metadata written ahead of them.
#[derive(Debug)]
pub struct Dataset<R> {
    pub kind: &'static str,
    pub columns: &'static [&'static str],
    pub params: Vec<(&'static str, String)>,
    pub summary: Vec<(&'static str, Value)>,
    pub notes: Vec<String>,
    pub rows: Vec<R>,
}

impl<R: Serialize> Dataset<R> {
    pub fn new(kind: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            kind,
            columns,
            params: Vec::new(),
            summary: Vec::new(),
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &'static str, value: impl ToString) {
        self.params.push((key, value.to_string()));
    }

    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<(), CliError> {
        let sink: Box<dyn Write> = match out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        match format {
            Format::Csv => self.write_csv(sink),
            Format::Json => self.write_json(sink),
        }
    }

    fn write_csv(&self, mut sink: Box<dyn Write>) -> Result<(), CliError> {
        writeln!(sink, "# thetadelay {} schema v{SCHEMA_VERSION}", self.kind)?;
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        writeln!(sink, "# params {}", params.join(" "))?;
        for (k, v) in &self.summary {
            let v = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            writeln!(sink, "# summary {k}={v}")?;
        }
        for note in &self.notes {
            writeln!(sink, "# note {note}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(sink);
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    fn write_json(&self, mut sink: Box<dyn Write>) -> Result<(), CliError> {
        let mut doc = Map::new();
        doc.insert(
            "schema".into(),
            format!("thetadelay/{}/v{SCHEMA_VERSION}", self.kind).into(),
        );
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), Value::from(v.clone())))
            .collect();
        doc.insert("params".into(), params.into());
        let summary: Map<String, Value> = self
            .summary
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect();
        doc.insert("summary".into(), summary.into());
        doc.insert("notes".into(), self.notes.clone().into());
        doc.insert("columns".into(), self.columns.to_vec().into());
        doc.insert("rows".into(), serde_json::to_value(&self.rows)?);
        serde_json::to_writer_pretty(&mut sink, &doc)?;
        writeln!(sink)?;
        sink.flush()?;
        Ok(())
    }
}
