use std::io::{self, Write};

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::CheckFailed => "check_failed",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: IndexMap<String, String>,
    pub outputs: IndexMap<String, String>,
    pub elapsed_ms: u64,
    pub status: Status,
}

impl OutputRecord {
    pub fn new(command: &str) -> Self {
        OutputRecord {
            command: command.to_string(),
            inputs: IndexMap::new(),
            outputs: IndexMap::new(),
            elapsed_ms: 0,
            status: Status::Ok,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn output(mut self, key: &str, value: impl ToString) -> Self {
        self.outputs.insert(key.to_string(), value.to_string());
        self
    }

    pub fn elapsed(mut self, elapsed: std::time::Duration) -> Self {
        self.elapsed_ms = elapsed.as_millis() as u64;
        self
    }

    /// Marks the record as an engine error and echoes it to stderr.
    pub fn failed(mut self, err: impl std::fmt::Display) -> Self {
        eprintln!("error: {err}");
        self.status = Status::Error;
        self.output("error", err)
    }

    /// `Ok` when `pass`, `CheckFailed` otherwise.
    pub fn check(mut self, pass: bool) -> Self {
        self.status = if pass {
            Status::Ok
        } else {
            Status::CheckFailed
        };
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// JSON lines are written as they arrive. CSV rows are held until
/// [`Sink::finish`] so the header can cover every column seen.
pub struct Sink {
    format: Format,
    held: Vec<OutputRecord>,
    worst: Status,
}

impl Sink {
    pub fn new(format: Format) -> Self {
        Sink {
            format,
            held: Vec::new(),
            worst: Status::Ok,
        }
    }

    pub fn emit(&mut self, record: OutputRecord) -> io::Result<()> {
        self.worst = match (self.worst, record.status) {
            (Status::Error, _) | (_, Status::Error) => Status::Error,
            (Status::CheckFailed, _) | (_, Status::CheckFailed) => Status::CheckFailed,
            _ => Status::Ok,
        };
        match self.format {
            Format::Json => {
                let mut out = io::stdout().lock();
                serde_json::to_writer(&mut out, &record)?;
                out.write_all(b"\n")?;
                out.flush()
            }
            Format::Csv => {
                self.held.push(record);
                Ok(())
            }
        }
    }

    pub fn worst(&self) -> Status {
        self.worst
    }

    pub fn finish(self) -> io::Result<()> {
        if self.format == Format::Csv && !self.held.is_empty() {
            write_csv(io::stdout().lock(), &self.held)?;
        }
        Ok(())
    }
}

pub fn write_csv<W: Write>(out: W, records: &[OutputRecord]) -> io::Result<()> {
    let inputs: IndexSet<&str> = records
        .iter()
        .flat_map(|r| r.inputs.keys().map(String::as_str))
        .collect();
    let outputs: IndexSet<&str> = records
        .iter()
        .flat_map(|r| r.outputs.keys().map(String::as_str))
        .collect();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["command".to_string()];
    header.extend(inputs.iter().map(|k| format!("input.{k}")));
    header.extend(outputs.iter().map(|k| format!("output.{k}")));
    header.extend(["elapsed_ms".to_string(), "status".to_string()]);
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.command.clone()];
        row.extend(
            inputs
                .iter()
                .map(|k| r.inputs.get(*k).cloned().unwrap_or_default()),
        );
        row.extend(
            outputs
                .iter()
                .map(|k| r.outputs.get(*k).cloned().unwrap_or_default()),
        );
        row.push(r.elapsed_ms.to_string());
        row.push(r.status.as_str().to_string());
        w.write_record(&row)?;
    }
    w.flush()
}
