use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use sha2::{Digest, Sha256};
use sharpconc_core::{Error, Estimate, ExactScalar};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Violation,
    Finding,
    NonConvergent,
}

impl Verdict {
    /// Verdict for a check that ended in a core error.
    pub fn of_error(e: &Error) -> Self {
        match e {
            Error::Violation { .. } | Error::FormMismatch(_) | Error::RootFailure(_) => {
                Verdict::Violation
            }
            _ => Verdict::NonConvergent,
        }
    }
}

/// A reported value: exact rationals as `"num/den"` strings, floats always
/// with an error bar.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Exact(String),
    Float { value: f64, error: f64 },
    Count(u64),
    Flag(bool),
}

impl From<&ExactScalar> for Quantity {
    fn from(v: &ExactScalar) -> Self {
        Quantity::Exact(v.to_exact_string())
    }
}

impl From<ExactScalar> for Quantity {
    fn from(v: ExactScalar) -> Self {
        Quantity::from(&v)
    }
}

impl From<Estimate> for Quantity {
    fn from(e: Estimate) -> Self {
        Quantity::Float {
            value: e.value,
            error: e.error,
        }
    }
}

impl From<u64> for Quantity {
    fn from(v: u64) -> Self {
        Quantity::Count(v)
    }
}

impl From<bool> for Quantity {
    fn from(v: bool) -> Self {
        Quantity::Flag(v)
    }
}

pub fn float(value: f64, error: f64) -> Quantity {
    Quantity::Float { value, error }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub check: String,
    pub params: BTreeMap<String, String>,
    pub values: BTreeMap<String, Quantity>,
    pub margin: Option<Quantity>,
    pub verdict: Verdict,
    pub detail: String,
}

impl Record {
    pub fn new(check: &str, params: &[(&str, String)]) -> Self {
        Self {
            check: check.into(),
            params: params
                .iter()
                .map(|(k, v)| ((*k).into(), v.clone()))
                .collect(),
            values: BTreeMap::new(),
            margin: None,
            verdict: Verdict::Pass,
            detail: String::new(),
        }
    }

    pub fn value(mut self, key: &str, q: impl Into<Quantity>) -> Self {
        self.values.insert(key.into(), q.into());
        self
    }

    pub fn margin(mut self, q: impl Into<Quantity>) -> Self {
        self.margin = Some(q.into());
        self
    }

    pub fn verdict(mut self, v: Verdict, detail: impl Into<String>) -> Self {
        self.verdict = v;
        self.detail = detail.into();
        self
    }

    /// Record for a check that failed with a core error.
    pub fn failed(self, e: &Error) -> Self {
        let v = Verdict::of_error(e);
        self.verdict(v, e.to_string())
    }
}

/// One row of a concentration profile.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub function: String,
    pub n: u32,
    pub alpha: String,
    pub variant: String,
    pub s: f64,
    pub i_raw: f64,
    pub i_hat: f64,
    pub theta: f64,
    pub margin: f64,
    pub err: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub violation: usize,
    pub finding: usize,
    pub non_convergent: usize,
}

impl Summary {
    pub fn of(records: &[Record]) -> Self {
        let mut s = Summary {
            total: records.len(),
            ..Default::default()
        };
        for r in records {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Violation => s.violation += 1,
                Verdict::Finding => s.finding += 1,
                Verdict::NonConvergent => s.non_convergent += 1,
            }
        }
        s
    }

    pub fn exit_code(&self) -> u8 {
        if self.violation > 0 {
            1
        } else if self.non_convergent > 0 {
            2
        } else {
            0
        }
    }
}

/// Output of one command.
#[derive(Debug, Default)]
pub struct Section {
    pub records: Vec<Record>,
    pub rows: Vec<ProfileRow>,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub run_id: String,
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Vec<RunConfig>,
    pub records: Vec<Record>,
    pub summary: Summary,
    /// Wall-clock seconds per command; excluded from the run id.
    pub timings: BTreeMap<String, f64>,
}

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the canonical resolved configuration and tool version.
pub fn run_id(config: &[RunConfig]) -> String {
    let canonical = serde_json::to_vec(&(TOOL, VERSION, config)).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

impl Report {
    pub fn new(
        config: Vec<RunConfig>,
        records: Vec<Record>,
        timings: BTreeMap<String, f64>,
    ) -> Self {
        Self {
            run_id: run_id(&config),
            tool: TOOL,
            version: VERSION,
            summary: Summary::of(&records),
            config,
            records,
            timings,
        }
    }

    pub fn write_json(&self, out: &mut impl Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)
    }
}

const PROFILE_HEADER: [&str; 10] = [
    "function", "n", "alpha", "variant", "s", "I_raw", "I_hat", "theta", "margin", "err",
];

fn csv_writer(out: &mut impl Write) -> csv::Writer<&mut impl Write> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out)
}

pub fn write_profile_csv(rows: &[ProfileRow], out: &mut impl Write) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(PROFILE_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

fn quantity_text(q: &Quantity) -> String {
    match q {
        Quantity::Exact(s) => s.clone(),
        Quantity::Float { value, error } => format!("{value:e}+-{error:e}"),
        Quantity::Count(c) => c.to_string(),
        Quantity::Flag(b) => b.to_string(),
    }
}

/// Flat table of records for commands without profile rows.
pub fn write_records_csv(records: &[Record], out: &mut impl Write) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["check", "params", "margin", "verdict", "detail"])?;
    for r in records {
        let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let verdict = serde_json::to_value(r.verdict).expect("verdict serializes");
        w.write_record([
            r.check.as_str(),
            &params.join(";"),
            &r.margin.as_ref().map(quantity_text).unwrap_or_default(),
            verdict.as_str().unwrap_or_default(),
            &r.detail,
        ])?;
    }
    w.flush()
}
