//! Suite configuration and tetrad references.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Param, Params};
use crate::harness::checks::{self, CheckId};
use crate::harness::report::Format;
use crate::tetrad::{catalog, TetradField, TetradSpec};

/// Loads a tetrad from a spec file path or from catalog syntax
/// `name[:key=value,...]`. Numeric values become numbers, anything else an
/// expression parameter.
pub fn load_tetrad(reference: &str) -> Result<TetradField> {
    let path = Path::new(reference);
    if path.is_file() {
        return TetradField::from_json(&std::fs::read_to_string(path)?);
    }
    if reference.ends_with(".json") {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("tetrad spec file `{reference}` not found"),
        )));
    }
    let (name, rest) = reference.split_once(':').unwrap_or((reference, ""));
    catalog(name.trim(), &parse_params(rest)?)
}

fn parse_params(text: &str) -> Result<Params> {
    let mut out = Params::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("parameter `{item}` must look like key=value")))?;
        let (k, v) = (k.trim(), v.trim());
        let value = match v.parse::<f64>() {
            Ok(x) => Param::Value(x),
            Err(_) => Param::Expr(v.to_string()),
        };
        if out.insert(k.to_string(), value).is_some() {
            return Err(Error::InvalidArgument(format!("parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

/// Where the tetrad comes from: an inline spec or a reference string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TetradSource {
    Inline(Box<TetradSpec>),
    Reference(String),
}

impl TetradSource {
    pub fn load(&self) -> Result<TetradField> {
        match self {
            TetradSource::Inline(spec) => TetradField::from_spec(spec),
            TetradSource::Reference(r) => load_tetrad(r),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    #[serde(default)]
    pub format: Format,
}

/// Contents of a suite configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfigFile {
    pub tetrad: Option<TetradSource>,
    pub seed: Option<u64>,
    pub n_points: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Option<Vec<String>>,
    pub output: Option<OutputConfig>,
    pub non_vacuum: Option<bool>,
    pub k: Option<f64>,
}

impl SuiteConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_POINTS: usize = 100;

/// A validated suite run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub tetrad: TetradField,
    pub seed: u64,
    pub n_points: usize,
    /// Per-check overrides of the class defaults.
    pub tolerances: BTreeMap<CheckId, f64>,
    pub checks: Vec<CheckId>,
    pub non_vacuum: bool,
    pub k: f64,
    pub parallel: bool,
}

impl SuiteConfig {
    pub fn new(tetrad: TetradField) -> Self {
        SuiteConfig {
            tetrad,
            seed: DEFAULT_SEED,
            n_points: DEFAULT_POINTS,
            tolerances: BTreeMap::new(),
            checks: CheckId::ALL.to_vec(),
            non_vacuum: false,
            k: 1.0,
            parallel: true,
        }
    }

    pub fn from_file(file: &SuiteConfigFile, tetrad_override: Option<TetradField>) -> Result<Self> {
        let tetrad = match (tetrad_override, &file.tetrad) {
            (Some(t), _) => t,
            (None, Some(src)) => src.load()?,
            (None, None) => return Err(Error::Config("no tetrad given".into())),
        };
        let mut cfg = SuiteConfig::new(tetrad);
        if let Some(s) = file.seed {
            cfg.seed = s;
        }
        if let Some(n) = file.n_points {
            cfg.n_points = n;
        }
        if let Some(list) = &file.checks {
            cfg.checks = list.iter().map(|c| c.parse()).collect::<Result<_>>()?;
        }
        for (name, tol) in &file.tolerances {
            cfg.set_tolerance(name, *tol)?;
        }
        if let Some(nv) = file.non_vacuum {
            cfg.non_vacuum = nv;
        }
        if let Some(k) = file.k {
            cfg.k = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets a tolerance for one check, or for a whole class
    /// (`algebraic`, `differential`, `divergence`, ...).
    pub fn set_tolerance(&mut self, name: &str, tol: f64) -> Result<()> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::Config(format!("tolerance for `{name}` must be positive, got {tol}")));
        }
        if let Ok(class) = name.parse::<checks::ToleranceClass>() {
            for id in CheckId::ALL.iter().filter(|c| c.class() == class) {
                self.tolerances.insert(*id, tol);
            }
            return Ok(());
        }
        self.tolerances.insert(name.parse()?, tol);
        Ok(())
    }

    pub fn tolerance(&self, id: CheckId) -> f64 {
        self.tolerances.get(&id).copied().unwrap_or_else(|| id.class().default_tolerance())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points == 0 {
            return Err(Error::Config("n_points must be at least 1".into()));
        }
        if self.checks.is_empty() {
            return Err(Error::Config("no checks selected".into()));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::Config(format!("coupling k must be positive, got {}", self.k)));
        }
        Ok(())
    }
}
