//! Experiment reports: rows of named scalars, checked assertions and
//! diagnostics, written as pretty JSON plus a flat CSV of the rows.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// One named scalar, grouped by `series` and indexed by `param`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub series: String,
    pub param: f64,
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// A checked claim; `measured` is NaN when the check could not be run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            tolerance,
            passed: measured <= tolerance,
            error: None,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            tolerance,
            passed: measured >= tolerance,
            error: None,
        }
    }

    /// A check that could not be evaluated; always fails.
    pub fn failed(
        name: impl Into<String>,
        relation: Relation,
        tolerance: f64,
        error: &Error,
    ) -> Self {
        Assertion {
            name: name.into(),
            measured: f64::NAN,
            relation,
            tolerance,
            passed: false,
            error: Some(error.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub experiment: String,
    /// The configuration the report was produced from.
    pub config: serde_json::Value,
    /// Gating marks such as `exploratory` or `below-acceptance-resolution`.
    pub flags: Vec<String>,
    pub rows: Vec<Row>,
    pub assertions: Vec<Assertion>,
    pub diagnostics: Vec<Diagnostic>,
    pub notes: Vec<String>,
    pub passed: bool,
}

impl Report {
    pub fn new(id: &str, experiment: &str, config: &impl Serialize) -> Self {
        Report {
            id: id.into(),
            experiment: experiment.into(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            flags: Vec::new(),
            rows: Vec::new(),
            assertions: Vec::new(),
            diagnostics: Vec::new(),
            notes: Vec::new(),
            passed: true,
        }
    }

    pub fn row(&mut self, series: &str, param: f64, name: &str, value: f64) {
        self.rows.push(Row {
            series: series.into(),
            param,
            name: name.into(),
            value,
        });
    }

    pub fn assert(&mut self, a: Assertion) {
        self.passed &= a.passed;
        self.assertions.push(a);
    }

    pub fn diagnostic(&mut self, name: &str, value: f64) {
        self.diagnostics.push(Diagnostic {
            name: name.into(),
            value,
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn flag(&mut self, flag: &str) {
        if !self.flags.iter().any(|f| f == flag) {
            self.flags.push(flag.into());
        }
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["experiment", "series", "param", "name", "value"])
            .map_err(csv_error)?;
        for r in &self.rows {
            w.write_record([
                &self.experiment,
                &r.series,
                &r.param.to_string(),
                &r.name,
                &r.value.to_string(),
            ])
            .map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }

    /// Base path (without extension) of this report inside `dir`.
    pub fn stem(&self, dir: &Path) -> PathBuf {
        dir.join(format!("{}-{}", self.id, self.experiment))
    }

    /// Writes `<id>-<experiment>.json` and `.csv`, each via a rename so a
    /// reader never sees a partial file.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let stem = self.stem(dir);
        write_atomic(&stem.with_extension("json"), self.to_json().as_bytes())?;
        write_atomic(&stem.with_extension("csv"), self.to_csv()?.as_bytes())
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
