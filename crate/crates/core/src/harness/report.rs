//! Suite reports and their serializations.
//!
//! JSON is pretty-printed with a trailing newline. CSV has one row per check
//! under the header [`CSV_HEADER`]; floats use Rust's shortest round-trip
//! exponent form (`1.5e-12`), empty cells mean "no value".

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Params;
use crate::harness::checks::CheckId;

pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 8] =
    ["name", "mode", "n_points", "max_residual", "min_residual", "tolerance", "pass", "error"];

pub const RIEMANN_CONVENTION: &str = "R^rho_{sigma mu nu} = d_mu Gamma^rho_{sigma nu} - d_nu Gamma^rho_{sigma mu} \
     + Gamma^rho_{lambda mu} Gamma^lambda_{sigma nu} - Gamma^rho_{lambda nu} Gamma^lambda_{sigma mu}, \
     last lower index of Gamma is the derivative slot; Ric_{sigma nu} = R^rho_{sigma rho nu}";

pub const EINSTEIN_SIGN: &str = "G_tt = +3 (da/dt / a)^2 for ds^2 = dt^2 - a^2 dx^2";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Passes when every residual is at most the tolerance.
    UpperBound,
    /// Passes when every residual is at least the tolerance.
    LowerBound,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::UpperBound => "upper_bound",
            Mode::LowerBound => "lower_bound",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: CheckId,
    pub mode: Mode,
    pub n_points: usize,
    /// `None` when no point produced a residual.
    pub max_residual: Option<f64>,
    pub min_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    /// First evaluation error, if any point failed to evaluate.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TetradInfo {
    pub name: String,
    pub coords: Vec<String>,
    pub params: Params,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conventions {
    pub signature: Vec<i8>,
    pub riemann: String,
    pub einstein_sign: String,
    pub k: f64,
    /// Measured `π = c₁ h S` constant, when the fit ran and was non-degenerate.
    pub c1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub tetrad: TetradInfo,
    pub seed: u64,
    pub n_points: usize,
    pub non_vacuum: bool,
    pub conventions: Conventions,
    pub records: Vec<CheckRecord>,
    pub pass: bool,
}

impl Report {
    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

pub fn emit_report(r: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(r)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => emit_csv(r),
        Format::Text => Ok(emit_text(r).into_bytes()),
    }
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

fn short(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into())
}

fn emit_csv(r: &Report) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for rec in &r.records {
        w.write_record([
            rec.name.name().to_string(),
            rec.mode.name().to_string(),
            rec.n_points.to_string(),
            num(rec.max_residual),
            num(rec.min_residual),
            num(Some(rec.tolerance)),
            rec.pass.to_string(),
            rec.error.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn emit_text(r: &Report) -> String {
    let mut s = String::new();
    let params = r
        .tetrad
        .params
        .iter()
        .map(|(k, v)| match v {
            crate::expr::Param::Value(x) => format!("{k}={x}"),
            crate::expr::Param::Expr(e) => format!("{k}={e}"),
        })
        .collect::<Vec<_>>()
        .join(", ");
    let sig: Vec<&str> = r.conventions.signature.iter().map(|s| if *s > 0 { "+" } else { "-" }).collect();
    let _ = writeln!(s, "telegrav {} (report schema {})", r.artifact_version, r.schema_version);
    let _ = writeln!(s, "tetrad     {} ({}) [{}]", r.tetrad.name, r.tetrad.coords.join(", "), params);
    let _ = writeln!(s, "seed       {}   points {}   non-vacuum {}", r.seed, r.n_points, r.non_vacuum);
    let _ = writeln!(s, "signature  ({})   k {}   c1 {}", sig.join(","), r.conventions.k, short(r.conventions.c1));
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<28} {:<12} {:>13} {:>13} {:>10}  result",
        "check", "mode", "max_residual", "min_residual", "tolerance"
    );
    for rec in &r.records {
        let _ = write!(
            s,
            "{:<28} {:<12} {:>13} {:>13} {:>10}  {}",
            rec.name.name(),
            rec.mode.name(),
            short(rec.max_residual),
            short(rec.min_residual),
            short(Some(rec.tolerance)),
            if rec.pass { "pass" } else { "FAIL" }
        );
        if let Some(e) = &rec.error {
            let _ = write!(s, "  ({e})");
        }
        s.push('\n');
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "overall    {}", if r.pass { "PASS" } else { "FAIL" });
    s
}
