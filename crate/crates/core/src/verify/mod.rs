//! Grid-sampled checks of the sufficient conditions and a randomized
//! optimality oracle.
//!
//! Checks evaluate a pointwise condition at every grid node of a region
//! (`D₊`, the switching curve `D₀`, the whole domain, …). A failing
//! condition carries the first violating node as a witness; feeding the
//! witness back through [`CheckReport::reevaluate`] reproduces the violation.
//!
//! The oracle draws piecewise-constant controls. That class is a strict
//! subset of the admissible controls, so the oracle can refute optimality of
//! the NSN strategy but never certify it.

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::PlanarModel;

mod checks;
mod conditions;
mod oracle;

pub use checks::{
    check_all, check_assumption1, check_assumption2, check_assumption3, check_assumption4, check_green,
    check_hypotheses5, default_box, green_flux, green_flux_fd, kolmogorov_green, CheckError, SuiteReport,
};
pub use conditions::{Condition, Region, Requirement};
pub use oracle::{
    assemble_oracle, nsn_replay, oracle_compare, oracle_horizon, oracle_sample, random_indices, OracleOptions,
    OracleReport, OracleSample, PiecewiseControl, SampleFailure, SampleSource,
};

/// Below this magnitude a finite-difference value cannot certify a strict sign.
pub const INCONCLUSIVE_BELOW: f64 = 1e-12;
/// Slack for non-strict inequalities on finite-difference values.
pub const FD_SLACK: f64 = 1e-9;
/// Slack for non-strict inequalities on directly evaluated values.
pub const DIRECT_SLACK: f64 = 1e-12;
/// Tolerance for equality conditions.
pub const ZERO_TOL: f64 = 1e-10;

/// Rectangle sampled by a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl GridBox {
    pub const fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        Self { x_min, x_max, y_min, y_max }
    }
}

/// `n × n` nodes on a box, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(rename = "box")]
    pub bbox: GridBox,
    pub n: usize,
}

impl GridSpec {
    pub fn new(bbox: GridBox, n: usize) -> crate::Result<Self> {
        if n < 2 {
            return Err(crate::Error::InvalidArgument("grid needs at least 2 nodes per axis"));
        }
        if !(bbox.x_max > bbox.x_min && bbox.y_max > bbox.y_min) {
            return Err(crate::Error::InvalidArgument("grid box is empty"));
        }
        Ok(Self { bbox, n })
    }

    fn node(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| Self::node(self.bbox.x_min, self.bbox.x_max, self.n, i))
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| Self::node(self.bbox.y_min, self.bbox.y_max, self.n, i))
    }

    /// Finite-difference steps: a tenth of the grid spacing scale.
    pub fn steps(&self) -> Steps {
        let n = self.n as f64;
        Steps {
            hx: (self.bbox.x_max - self.bbox.x_min) / (10.0 * n),
            hy: (self.bbox.y_max - self.bbox.y_min) / (10.0 * n),
        }
    }

    /// [`Self::steps`], shortened near the lower domain edges so stencils
    /// stay inside the domain.
    pub fn steps_at(&self, model: &PlanarModel, x: f64, y: f64) -> Steps {
        let d = model.domain();
        let cap = |h: f64, v: f64, lo: f64| if lo.is_finite() && v > lo { h.min(0.5 * (v - lo)) } else { h };
        let s = self.steps();
        Steps { hx: cap(s.hx, x, d.x_min), hy: cap(s.hy, y, d.y_min) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Steps {
    pub hx: f64,
    pub hy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Skipped,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub condition: Condition,
    pub status: Status,
    pub witness: Option<Witness>,
    pub checked: usize,
    pub violations: usize,
    pub inconclusive: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub model: String,
    pub grid: GridSpec,
    pub conditions: Vec<ConditionResult>,
    /// Grid estimate of `sup (φ₂ − φ₁)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_estimate: Option<f64>,
    /// `φ₁ = φ₂` and `φ₄ − φ₃ ≡ α > 0` on the grid; holds `α`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shortcut_alpha: Option<f64>,
}

impl CheckReport {
    pub fn verdict(&self) -> Status {
        self.conditions.iter().map(|c| c.status).max().unwrap_or(Status::Skipped)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> {
        self.conditions.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn condition(&self, c: Condition) -> Option<&ConditionResult> {
        self.conditions.iter().find(|r| r.condition == c)
    }

    /// Re-evaluates a failed condition at its witness; `true` when the
    /// condition is still not satisfied there.
    pub fn reevaluate(&self, model: &PlanarModel, result: &ConditionResult) -> bool {
        match result.witness {
            Some(w) => {
                let v = result.condition.value(model, w.x, w.y, &self.grid);
                conditions::judge(result.condition, model, v) != conditions::Judgement::Holds
            }
            None => false,
        }
    }
}
