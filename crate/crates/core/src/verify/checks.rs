//! The condition checks.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::conditions::{judge_value, Condition, Judgement, Region};
use super::{CheckReport, ConditionResult, GridBox, GridSpec, Status, Witness};
use crate::diff::{partial_x, partial_y, scaled_step};
use crate::models::{KolmogorovForm, PlanarModel, State};
use crate::synthesis::x_h;
use crate::{Error, Result};

/// Tolerance of the `φ₁ = φ₂`, `φ₄ − φ₃ = α` pattern detector.
const SHORTCUT_TOL: f64 = 1e-10;

/// Side of the coarse subgrid used for boundedness runs.
const STARTS_PER_AXIS: usize = 5;

/// `∂_y(f₂/Δ) + ∂_x(f₁/Δ)`, exact when the model provides it.
pub fn green_flux(model: &PlanarModel, s: State) -> Result<f64> {
    model.check_domain(s)?;
    if model.delta_unchecked(s.x, s.y) == 0.0 {
        return Err(Error::SingularDelta { x: s.x, y: s.y });
    }
    if let Some(v) = model.exact_green_flux(s.x, s.y) {
        return Ok(v);
    }
    Ok(green_flux_fd(model, s.x, s.y, scaled_step(s.x), scaled_step(s.y)))
}

/// Central-difference Green flux with explicit steps.
pub fn green_flux_fd(model: &PlanarModel, x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    partial_y(|a, b| model.f2(a, b) / model.delta_unchecked(a, b), x, y, hy)
        + partial_x(|a, b| model.f1(a, b) / model.delta_unchecked(a, b), x, y, hx)
}

/// Numerator of the Green flux of a Kolmogorov system, which equals the
/// flux times `δ²xy`:
/// `(φ₃(φ₄∂_yφ₁ − φ₃∂_yφ₂) + φ₁[φ₃,φ₄]_y)·y + (φ₃[φ₁,φ₂]_x + φ₁(φ₂∂_xφ₃ − φ₁∂_xφ₄))·x`.
pub fn kolmogorov_green(k: &KolmogorovForm, x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    let p = |i: usize| k.phi(i, x, y);
    let dx = |i: usize| partial_x(|a, b| k.phi(i, a, b), x, y, hx);
    let dy = |i: usize| partial_y(|a, b| k.phi(i, a, b), x, y, hy);
    let (p1, p2, p3, p4) = (p(1), p(2), p(3), p(4));
    let bracket34_y = p3 * dy(4) - p4 * dy(3);
    let bracket12_x = p1 * dx(2) - p2 * dx(1);
    let a = p3 * (p4 * dy(1) - p3 * dy(2)) + p1 * bracket34_y;
    let b = p3 * bracket12_x + p1 * (p2 * dx(3) - p1 * dx(4));
    a * y + b * x
}

/// A box suited to a builtin or counterexample model, falling back to the
/// unit square intersected with the domain.
pub fn default_box(model: &PlanarModel) -> GridBox {
    let p = |k: &str, d: f64| model.param(k).unwrap_or(d);
    match model.name() {
        "example1" | "g2_zero" | "flat_ratio" | "sign_flipped" => GridBox::new(-0.5, 4.5, 0.05, 5.0),
        "sir" | "phi4_degenerate" => GridBox::new(0.01, 0.99, 0.01, 0.99),
        "monod" => {
            let (m, k) = (p("m", 0.2), p("K", 1.0));
            let reach = if m < 1.0 { 2.0 * k * m / (1.0 - m) } else { 0.0 };
            GridBox::new(0.01, reach.max(10.0), 0.01, 5.0)
        }
        "contois" => {
            let m = p("m", 0.2);
            let reach = if m < 1.0 { 2.0 * 5.0 * m / (1.0 - m) } else { 0.0 };
            GridBox::new(0.01, reach.max(10.0), 0.01, 5.0)
        }
        "phi3_decreasing" => GridBox::new(0.01, 10.0, 0.01, 5.0),
        _ => {
            let d = model.domain();
            let lo_x = d.x_min.max(0.0);
            let lo_y = d.y_min.max(0.0);
            GridBox::new(lo_x + 0.01, lo_x + 1.0, lo_y + 0.01, lo_y + 1.0)
        }
    }
}

fn domain_nodes(model: &PlanarModel, grid: &GridSpec) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(grid.n * grid.n);
    for y in grid.ys() {
        for x in grid.xs() {
            if model.domain().contains(x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

fn points(model: &PlanarModel, grid: &GridSpec, region: Region, ycap: f64) -> Vec<(f64, f64)> {
    let phi3 = |x: f64, y: f64| model.kolmogorov().map_or(f64::NAN, |k| k.phi(3, x, y));
    match region {
        Region::Domain => domain_nodes(model, grid),
        Region::DPlus => {
            domain_nodes(model, grid).into_iter().filter(|&(x, y)| y <= ycap && model.f2(x, y) > 0.0).collect()
        }
        Region::D0 => grid
            .ys()
            .filter_map(|y| x_h(model, y).ok().map(|x| (x, y)))
            .filter(|&(x, y)| model.domain().contains(x, y))
            .collect(),
        Region::Phi3NonNegative => domain_nodes(model, grid).into_iter().filter(|&(x, y)| phi3(x, y) >= 0.0).collect(),
        Region::Phi3Positive => domain_nodes(model, grid).into_iter().filter(|&(x, y)| phi3(x, y) > 0.0).collect(),
        Region::LeftEdge => {
            let x0 = model.domain().x_min;
            let x0 = if x0.is_finite() { x0 } else { grid.bbox.x_min };
            grid.ys().map(|y| (x0, y)).collect()
        }
        Region::RightEdge => grid.ys().map(|y| (grid.bbox.x_max, y)).collect(),
        Region::Lines => grid
            .ys()
            .filter(|&y| grid.xs().any(|x| model.domain().contains(x, y) && model.f2(x, y) > 0.0))
            .map(|y| (grid.bbox.x_min, y))
            .collect(),
        Region::Starts => {
            let stride = ((grid.n - 1) / (STARTS_PER_AXIS - 1)).max(1);
            let xs: Vec<f64> = grid.xs().step_by(stride).collect();
            let ys: Vec<f64> = grid.ys().step_by(stride).collect();
            ys.iter()
                .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
                .filter(|&(x, y)| model.domain().contains(x, y))
                .collect()
        }
    }
}

fn evaluate(model: &PlanarModel, grid: &GridSpec, c: Condition, pts: &[(f64, f64)]) -> ConditionResult {
    let fd = c.finite_difference(model);
    let req = c.requirement();
    let existence = matches!(c, Condition::DPlusNonEmpty | Condition::DMinusNonEmpty);

    let mut res = ConditionResult {
        condition: c,
        status: Status::Pass,
        witness: None,
        checked: 0,
        violations: 0,
        inconclusive: 0,
        note: None,
    };
    let mut first_inconclusive = None;
    let mut best: Option<Witness> = None;
    let mut any_holds = false;

    for &(x, y) in pts {
        let v = c.value(model, x, y, grid);
        res.checked += 1;
        match judge_value(req, fd, v) {
            Judgement::Holds => any_holds = true,
            Judgement::Violated => {
                res.violations += 1;
                res.witness.get_or_insert(Witness { x, y, value: v });
            }
            Judgement::Inconclusive => {
                res.inconclusive += 1;
                first_inconclusive.get_or_insert(Witness { x, y, value: v });
            }
        }
        // For existence conditions keep the node closest to qualifying.
        let closer = match best {
            None => true,
            Some(b) => {
                (c == Condition::DPlusNonEmpty && v > b.value) || (c == Condition::DMinusNonEmpty && v < b.value)
            }
        };
        if existence && closer {
            best = Some(Witness { x, y, value: v });
        }
    }

    if existence {
        res.violations = 0;
        res.witness = None;
        if !any_holds {
            res.status = Status::Fail;
            res.witness = best;
            res.note = Some("no grid node qualifies".to_string());
        }
        return res;
    }
    res.status = if res.violations > 0 {
        Status::Fail
    } else if res.checked == 0 {
        res.note = Some("no grid node in region".to_string());
        Status::Skipped
    } else if res.inconclusive == res.checked {
        res.witness = first_inconclusive;
        res.note = Some("derivative vanishes at every node".to_string());
        Status::Fail
    } else if res.inconclusive > 0 {
        res.note = Some(format!("{} inconclusive nodes", res.inconclusive));
        Status::Skipped
    } else {
        Status::Pass
    };
    res
}

fn run(model: &PlanarModel, grid: &GridSpec, check: &str, conditions: &[Condition], ycap: f64) -> CheckReport {
    let mut cache: Vec<(Region, Vec<(f64, f64)>)> = Vec::new();
    let mut results = Vec::with_capacity(conditions.len());
    for &c in conditions {
        let region = c.region();
        let idx = match cache.iter().position(|(r, _)| *r == region) {
            Some(i) => i,
            None => {
                cache.push((region, points(model, grid, region, ycap)));
                cache.len() - 1
            }
        };
        results.push(evaluate(model, grid, c, &cache[idx].1));
    }
    CheckReport {
        check: check.to_string(),
        model: model.name().to_string(),
        grid: *grid,
        conditions: results,
        m_estimate: None,
        shortcut_alpha: None,
    }
}

fn require_d_plus(model: &PlanarModel, grid: &GridSpec, ycap: f64) -> Result<()> {
    if points(model, grid, Region::DPlus, ycap).is_empty() {
        return Err(Error::EmptyRegion);
    }
    Ok(())
}

/// Non-empty `D±`, a single switching abscissa per line, and bounded
/// uncontrolled orbits from a coarse set of starts.
pub fn check_assumption1(model: &PlanarModel, grid: &GridSpec) -> Result<CheckReport> {
    use Condition::*;
    Ok(run(model, grid, "assumption1", &[DPlusNonEmpty, DMinusNonEmpty, UniqueSwitch, Bounded], f64::INFINITY))
}

/// Signs and monotonicity of the fields on `D₊` and on `D₀`.
pub fn check_assumption2(model: &PlanarModel, grid: &GridSpec) -> Result<CheckReport> {
    use Condition::*;
    require_d_plus(model, grid, f64::INFINITY)?;
    let conds = [
        F1Negative,
        F1DecreasingX,
        F1DecreasingY,
        G1IncreasingX,
        G1IncreasingY,
        F1PlusG1NonPositive,
        F2IncreasingX,
        G2DecreasingX,
        G2DecreasingY,
        F2PlusG2Negative,
        F1NegativeOnD0,
        F2IncreasingXOnD0,
        F2NonIncreasingYOnD0,
    ];
    Ok(run(model, grid, "assumption2", &conds, f64::INFINITY))
}

/// `f₂/Δ` increasing in `y` on `D₊`.
pub fn check_assumption3(model: &PlanarModel, grid: &GridSpec) -> Result<CheckReport> {
    require_d_plus(model, grid, f64::INFINITY)?;
    Ok(run(model, grid, "assumption3", &[Condition::RatioIncreasingY], f64::INFINITY))
}

/// `g₂ < 0` and `∇f₂·(f + g) ≥ 0` along `D₀`.
pub fn check_assumption4(model: &PlanarModel, grid: &GridSpec) -> Result<CheckReport> {
    Ok(run(model, grid, "assumption4", &[Condition::G2NegativeOnD0, Condition::DriftOnD0], f64::INFINITY))
}

/// Green flux positive on `D₊ ∩ {y ≤ ycap}`.
pub fn check_green(model: &PlanarModel, grid: &GridSpec, ycap: f64) -> Result<CheckReport> {
    require_d_plus(model, grid, ycap)?;
    Ok(run(model, grid, "green", &[Condition::GreenFlux], ycap))
}

/// Hypotheses on the per-capita rates of a Kolmogorov model, plus the
/// pointwise Green condition written in those rates.
pub fn check_hypotheses5(model: &PlanarModel, grid: &GridSpec) -> Result<CheckReport> {
    use Condition::*;
    let k = model.kolmogorov().ok_or(Error::InvalidArgument("model has no Kolmogorov form"))?;
    let conds = [
        Phi1Positive,
        Phi2Positive,
        Phi3IncreasingX,
        Phi3NonIncreasingY,
        Phi3NegativeAtLeft,
        Phi3PositiveAtRight,
        Phi1AtLeastPhi2,
        DyPhi1AtLeastDyPhi2,
        DyPhi2Positive,
        Phi1EqualsPhi2OnD0,
        XPhi1Increasing,
        XPhi2Increasing,
        Phi4IncreasingX,
        Phi4ExceedsPhi3,
        BracketPhi3Phi4,
        YPhi4Increasing,
        KolmogorovGreen,
    ];
    let mut report = run(model, grid, "hypotheses5", &conds, f64::INFINITY);

    let nodes = domain_nodes(model, grid);
    report.m_estimate = nodes.iter().map(|&(x, y)| k.phi(2, x, y) - k.phi(1, x, y)).reduce(f64::max);
    let gap = |&(x, y): &(f64, f64)| k.phi(4, x, y) - k.phi(3, x, y);
    if let Some(alpha) = nodes.first().map(gap) {
        let pattern = alpha > SHORTCUT_TOL
            && nodes.iter().all(|&(x, y)| {
                (k.phi(1, x, y) - k.phi(2, x, y)).abs() <= SHORTCUT_TOL && (gap(&(x, y)) - alpha).abs() <= SHORTCUT_TOL
            });
        if pattern {
            report.shortcut_alpha = Some(alpha);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckError {
    pub check: String,
    pub message: String,
    pub empty_region: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub model: String,
    pub grid: GridSpec,
    pub ycap: f64,
    pub reports: Vec<CheckReport>,
    pub errors: Vec<CheckError>,
    pub not_applicable: Vec<String>,
}

impl SuiteReport {
    /// `Fail` if any check fails or finds no `D₊`; `Skipped` if a check
    /// was inconclusive or hit a numerical error; `Pass` otherwise.
    pub fn verdict(&self) -> Status {
        let reports = self.reports.iter().map(CheckReport::verdict).max().unwrap_or(Status::Pass);
        if reports == Status::Fail || self.errors.iter().any(|e| e.empty_region) {
            Status::Fail
        } else if !self.errors.is_empty() {
            Status::Skipped
        } else {
            reports
        }
    }

    pub fn numerical_failure(&self) -> bool {
        self.errors.iter().any(|e| !e.empty_region)
    }

    pub fn report(&self, check: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.check == check)
    }
}

/// All checks on one grid. Errors are collected rather than propagated.
pub fn check_all(model: &PlanarModel, grid: &GridSpec, ycap: f64) -> SuiteReport {
    let mut suite = SuiteReport {
        model: model.name().to_string(),
        grid: *grid,
        ycap,
        reports: Vec::new(),
        errors: Vec::new(),
        not_applicable: Vec::new(),
    };
    let outcomes = [
        ("assumption1", check_assumption1(model, grid)),
        ("assumption2", check_assumption2(model, grid)),
        ("assumption3", check_assumption3(model, grid)),
        ("assumption4", check_assumption4(model, grid)),
        ("green", check_green(model, grid, ycap)),
    ];
    for (name, outcome) in outcomes {
        push(&mut suite, name, outcome);
    }
    if model.kolmogorov().is_some() {
        push(&mut suite, "hypotheses5", check_hypotheses5(model, grid));
    } else {
        suite.not_applicable.push("hypotheses5".to_string());
    }
    suite
}

fn push(suite: &mut SuiteReport, name: &str, outcome: Result<CheckReport>) {
    match outcome {
        Ok(r) => suite.reports.push(r),
        Err(e) => suite.errors.push(CheckError {
            check: name.to_string(),
            message: e.to_string(),
            empty_region: matches!(e, Error::EmptyRegion),
        }),
    }
}
