//! Run configuration: a JSON file, overridden by command-line flags, then
//! completed with per-model defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use peakctl_core::models::counterexamples::{counterexample, COUNTEREXAMPLE_NAMES};
use peakctl_core::models::{builtin, Params, BUILTIN_NAMES};
use peakctl_core::verify::{default_box, GridBox, GridSpec, OracleOptions};
use peakctl_core::{PlanarModel, SimOptions, State, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "peakctl-config/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "box", default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<GridBox>,
    /// Upper `y` bound of the Green-flux check; defaults to the box top.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ycap: Option<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n: 200, bbox: None, ycap: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    pub samples: usize,
    pub pieces: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { samples: 500, pieces: 8, seed: 42, horizon: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub schema: String,
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub budget: f64,
    pub horizon: f64,
    pub tol: Tolerances,
    pub grid: GridConfig,
    pub oracle: OracleConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub uncontrolled: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema: CONFIG_SCHEMA.to_string(),
            model: "example1".to_string(),
            params: BTreeMap::new(),
            x0: None,
            y0: None,
            budget: 0.1,
            horizon: SimOptions::default().horizon,
            tol: Tolerances::default(),
            grid: GridConfig::default(),
            oracle: OracleConfig::default(),
            out: None,
            uncontrolled: false,
        }
    }
}

fn default_params(model: &str) -> &'static [(&'static str, f64)] {
    match model {
        "sir" => &[("alpha", 0.1), ("beta", 0.5)],
        "monod" | "contois" => &[("Y", 1.0), ("m", 0.2)],
        _ => &[],
    }
}

fn default_start(model: &str) -> (f64, f64) {
    match model {
        "sir" | "phi4_degenerate" => (0.99, 0.01),
        "monod" | "contois" => (5.0, 0.5),
        "phi3_decreasing" => (1.0, 1.0),
        _ => (2.0, 2.0),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        if cfg.schema != CONFIG_SCHEMA {
            return Err(CliError::Usage(format!(
                "unsupported config schema {:?}, expected {CONFIG_SCHEMA:?}",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    /// Fills in the model's default parameters and starting point.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let known = BUILTIN_NAMES.contains(&self.model.as_str()) || COUNTEREXAMPLE_NAMES.contains(&self.model.as_str());
        if !known {
            return Err(CliError::Usage(format!("unknown model {:?}", self.model)));
        }
        for (k, v) in default_params(&self.model) {
            self.params.entry(k.to_string()).or_insert(*v);
        }
        let (x0, y0) = default_start(&self.model);
        self.x0.get_or_insert(x0);
        self.y0.get_or_insert(y0);
        if self.grid.n < 2 {
            return Err(CliError::Usage("grid needs at least 2 nodes per axis".into()));
        }
        if !(self.budget >= 0.0 && self.budget.is_finite()) {
            return Err(CliError::Usage("budget must be finite and non-negative".into()));
        }
        Ok(self)
    }

    pub fn build_model(&self) -> Result<PlanarModel, CliError> {
        if BUILTIN_NAMES.contains(&self.model.as_str()) {
            let params: Params = self.params.clone();
            return builtin(&self.model, &params).map_err(CliError::from);
        }
        if !self.params.is_empty() {
            return Err(CliError::Usage(format!("model {:?} takes no parameters", self.model)));
        }
        counterexample(&self.model).map_err(CliError::from)
    }

    pub fn start(&self) -> State {
        State::new(self.x0.unwrap_or(f64::NAN), self.y0.unwrap_or(f64::NAN))
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions { horizon: self.horizon, tol: self.tol, ..SimOptions::default() }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            n_samples: self.oracle.samples,
            n_pieces: self.oracle.pieces,
            seed: self.oracle.seed,
            horizon: self.oracle.horizon,
            inject_nsn: true,
            sim: self.sim_options(),
        }
    }

    pub fn grid_spec(&self, model: &PlanarModel) -> Result<GridSpec, CliError> {
        let bbox = self.grid.bbox.unwrap_or_else(|| default_box(model));
        GridSpec::new(bbox, self.grid.n).map_err(CliError::from)
    }
}

/// Parses `k=v` pairs, also accepting comma-separated lists.
pub fn parse_params(items: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut out = BTreeMap::new();
    for item in items.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("parameter {item:?} is not of the form key=value")))?;
        let v: f64 =
            v.trim().parse().map_err(|_| CliError::Usage(format!("parameter {k:?} has a non-numeric value")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_resolve_per_model() {
        let cfg = RunConfig { model: "sir".into(), ..Default::default() }.resolve().unwrap();
        assert_eq!(cfg.params["beta"], 0.5);
        assert_eq!(cfg.params["alpha"], 0.1);
        assert_eq!((cfg.x0, cfg.y0), (Some(0.99), Some(0.01)));
        cfg.build_model().unwrap();
    }

    #[test]
    fn explicit_values_survive_resolution() {
        let mut cfg = RunConfig { model: "sir".into(), x0: Some(0.5), ..Default::default() };
        cfg.params.insert("beta".into(), 0.8);
        let cfg = cfg.resolve().unwrap();
        assert_eq!(cfg.params["beta"], 0.8);
        assert_eq!(cfg.x0, Some(0.5));
    }

    #[test]
    fn param_lists() {
        let p = parse_params(&["beta=0.4,alpha=0.2".into(), "x=1".into()]).unwrap();
        assert_eq!(p.len(), 3);
        assert!(parse_params(&["beta".into()]).is_err());
        assert!(parse_params(&["beta=x".into()]).is_err());
    }

    #[test]
    fn round_trip_and_unknown_fields() {
        let cfg = RunConfig::default().resolve().unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert!(serde_json::from_str::<RunConfig>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn unknown_model_is_a_usage_error() {
        let r = RunConfig { model: "lotka".into(), ..Default::default() }.resolve();
        assert!(matches!(r, Err(CliError::Usage(_))));
    }
}
