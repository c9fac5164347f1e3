//! File handling and the mapping from library errors to exit statuses.

use std::fs;
use std::io::Write;
use std::path::Path;

use tailmass::bayesnet::BayesNet;
use tailmass::gcurve::{ProbSample, WeightMode};
use tailmass::Error;

use crate::{EXIT_CONFIG, EXIT_IO, EXIT_NUMERICAL};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InsufficientTail { .. }
            | Error::TooFewEstimates { .. }
            | Error::NoSeparatingThreshold(_)
            | Error::ScheduleUndershoot { .. }
            | Error::ZeroProbability => EXIT_NUMERICAL,
            Error::Io(_) | Error::NetworkFormat(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T = ()> = Result<T, Failure>;

/// Writes to `path`, or to stdout when there is none.
pub fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::io(format!("stdout: {e}"))),
    }
}

pub fn read_network(path: &Path) -> CliResult<BayesNet> {
    BayesNet::read(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// Reads the `p` column of a CSV file. Other columns are ignored.
pub fn read_sample(path: &Path, mode: WeightMode) -> CliResult<ProbSample> {
    let name = path.display();
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| Failure::io(format!("{name}: {e}")))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::io(format!("{name}: {e}")))?
        .clone();
    let column = headers
        .iter()
        .position(|h| h.trim() == "p")
        .ok_or_else(|| Failure::io(format!("{name}: no `p` column in header")))?;
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Failure::io(format!("{name}: {e}")))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record
            .get(column)
            .ok_or_else(|| Failure::io(format!("{name}: line {line}: missing `p` field")))?;
        let value: f64 = field
            .trim()
            .parse()
            .map_err(|_| Failure::io(format!("{name}: line {line}: `{field}` is not a number")))?;
        values.push(value);
    }
    ProbSample::new(values, mode).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{name}: {}", f.message);
        f
    })
}

pub fn ensure_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}
