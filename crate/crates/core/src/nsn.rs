//! The null–singular–null (NSN) feedback and its closed-loop simulation.
//!
//! With `u ≡ 0` the state rises until `y` reaches the level `ȳ*`. The
//! singular feedback then holds `y` there while `x` slides to `x_h(ȳ*)`,
//! after which the control is switched off for good.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::diff::{gradient, scaled_step};
use crate::integrate::{
    event_budget, event_f2_zero, event_settled, event_y_crosses, integrate_from, null_policy, solve, Direction,
    EventKind, EventSpec, Policy, Sample, System, Tolerances, Trajectory, DEFAULT_HORIZON, Z,
};
use crate::models::{PlanarModel, State};
use crate::synthesis::{solve_ystar_with, x_h, Regime, SynthesisOptions, SynthesisReport};
use crate::{Error, Result};

/// Default half-width of the band around `ȳ` where the singular law acts.
pub const DEFAULT_BAND: f64 = 1e-9;

/// Clamping beyond this much triggers a warning.
const CLAMP_WARN: f64 = 1e-6;

/// Overshoot of `ȳ` after the singular arc that is flagged as re-entry.
const REENTRY_MARGIN: f64 = 1e-6;

/// The final coast stops once the state norm drops below this share of its start.
const SETTLE_FRACTION: f64 = 1e-9;

fn clamp_unit(u: f64, what: &str) -> f64 {
    let c = u.clamp(0.0, 1.0);
    if (c - u).abs() > CLAMP_WARN {
        log::warn!("{what} control {u} clamped to {c}");
    }
    c
}

/// The NSN feedback for a fixed level `ȳ`.
#[derive(Debug, Clone)]
pub struct NsnPolicy {
    pub ybar: f64,
    pub xh_at_ybar: f64,
    pub band: f64,
    model: PlanarModel,
}

impl NsnPolicy {
    pub fn new(model: &PlanarModel, ybar: f64) -> Result<Self> {
        let xh = x_h(model, ybar)?;
        Ok(Self { ybar, xh_at_ybar: xh, band: DEFAULT_BAND, model: model.clone() })
    }

    pub fn with_band(mut self, band: f64) -> Self {
        self.band = band;
        self
    }

    /// `−f₂(x, ȳ)/g₂(x, ȳ)`, unclamped.
    pub fn singular_control(&self, x: f64) -> Result<f64> {
        let g2 = self.model.g2(x, self.ybar);
        if g2 == 0.0 {
            return Err(Error::G2Zero { x });
        }
        Ok(-self.model.f2(x, self.ybar) / g2)
    }
}

/// The singular law near `y = ȳ` inside `D₊`, zero elsewhere.
pub fn nsn_feedback(policy: &NsnPolicy, s: State) -> Result<f64> {
    policy.model.check_domain(s)?;
    if (s.y - policy.ybar).abs() <= policy.band && policy.model.f2(s.x, policy.ybar) > 0.0 {
        return Ok(clamp_unit(policy.singular_control(s.x)?, "singular"));
    }
    Ok(0.0)
}

/// Raw state feedback. Points outside the domain or with `g₂ = 0` get `0`;
/// use [`nsn_feedback`] to see those errors.
impl Policy for NsnPolicy {
    fn control(&self, _t: f64, s: State) -> f64 {
        nsn_feedback(self, s).unwrap_or(0.0)
    }
}

/// The control keeping the state on the switching curve `f₂ = 0`:
/// `−(∇f₂·f)/(∇f₂·g)`, clamped to `[0, 1]`.
pub fn ridge_feedback(model: &PlanarModel, s: State) -> Result<f64> {
    model.check_domain(s)?;
    let f2 = model.f2(s.x, s.y);
    if f2.abs() >= 1e-8 {
        return Err(Error::NotOnSwitchingCurve { x: s.x, y: s.y, f2 });
    }
    let (gx, gy) = model
        .exact_grad_f2(s.x, s.y)
        .unwrap_or_else(|| gradient(|x, y| model.f2(x, y), s.x, s.y, scaled_step(s.x), scaled_step(s.y)));
    let drift = gx * model.f1(s.x, s.y) + gy * f2;
    let push = gx * model.g1(s.x, s.y) + gy * model.g2(s.x, s.y);
    if push == 0.0 || !push.is_finite() {
        return Err(Error::DegenerateGradient { x: s.x, y: s.y });
    }
    Ok(clamp_unit(-drift / push, "ridge"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub horizon: f64,
    pub tol: Tolerances,
    pub band: f64,
    pub synthesis: SynthesisOptions,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            horizon: DEFAULT_HORIZON,
            tol: Tolerances::default(),
            band: DEFAULT_BAND,
            synthesis: SynthesisOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Null1,
    Singular,
    Null2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpan {
    pub phase: Phase,
    pub t_start: f64,
    pub t_end: f64,
}

impl PhaseSpan {
    pub fn is_empty(&self) -> bool {
        self.t_end <= self.t_start
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_end
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NsnResult {
    pub synthesis: SynthesisReport,
    pub trajectory: Trajectory,
    pub peak: f64,
    pub spent: f64,
    pub phases: Vec<PhaseSpan>,
    /// The singular arc was cut by the budget safety event.
    pub safety_exit: bool,
    /// The run ended at the horizon before the final null phase.
    pub horizon_terminal: bool,
    /// `y` rose above `ȳ*` again after the singular arc.
    pub reentry: bool,
}

impl NsnResult {
    pub fn ystar(&self) -> f64 {
        self.synthesis.ystar
    }

    pub fn regime(&self) -> Regime {
        self.synthesis.regime
    }

    pub fn phase(&self, phase: Phase) -> &PhaseSpan {
        &self.phases[phase as usize]
    }

    /// The applied control as a function of time: the singular law along the
    /// singular phase and `0` otherwise.
    pub fn control_at(&self, model: &PlanarModel, t: f64) -> f64 {
        if !self.phase(Phase::Singular).contains(t) {
            return 0.0;
        }
        let ybar = self.ystar();
        self.trajectory.state_at(t).map_or(0.0, |z| (-model.f2(z[0], ybar) / model.g2(z[0], ybar)).clamp(0.0, 1.0))
    }
}

/// Reduced dynamics on the singular arc: `y` frozen at `ȳ`,
/// `ẋ = −Δ(x, ȳ)/g₂(x, ȳ)` and the spent budget grows at `k(x)`.
struct SingularArc<'a> {
    model: &'a PlanarModel,
    ybar: f64,
}

impl SingularArc<'_> {
    fn k(&self, x: f64) -> f64 {
        -self.model.f2(x, self.ybar) / self.model.g2(x, self.ybar)
    }
}

impl System for SingularArc<'_> {
    fn rhs(&self, _t: f64, z: &Z) -> Z {
        let (x, y) = (z[0], self.ybar);
        [-self.model.delta_unchecked(x, y) / self.model.g2(x, y), 0.0, self.k(x)]
    }

    fn control(&self, _t: f64, z: &Z) -> f64 {
        self.k(z[0])
    }

    fn in_domain(&self, z: &Z) -> bool {
        self.model.domain().contains(z[0], self.ybar)
    }
}

fn single_sample(t: f64, s: State, spent: f64) -> Trajectory {
    Trajectory { samples: alloc::vec![Sample { t, x: s.x, y: s.y, u: 0.0, spent }], ..Default::default() }
}

/// Closed-loop NSN run from `s0` with budget `k`.
pub fn simulate_nsn(model: &PlanarModel, s0: State, k: f64, opts: &SimOptions) -> Result<NsnResult> {
    let synthesis = solve_ystar_with(model, s0, k, &opts.synthesis)?;
    let horizon = opts.horizon;
    let tol = opts.tol;
    let mut horizon_terminal = false;

    // Phase 1: coast up to the level.
    let (mut traj, on_level) = if synthesis.regime == Regime::Trivial {
        (single_sample(0.0, s0, 0.0), false)
    } else if s0.y >= synthesis.ystar {
        (single_sample(0.0, s0, 0.0), true)
    } else {
        let events = [event_y_crosses(synthesis.ystar), event_f2_zero(model)];
        let t = integrate_from(model, &null_policy, 0.0, [s0.x, s0.y, 0.0], horizon, &events, tol)?;
        let kind = t.terminal_event().map(|e| e.kind);
        horizon_terminal = kind == Some(EventKind::Horizon);
        (t, kind == Some(EventKind::HitYbar))
    };
    let t1 = traj.end_time();

    // Phase 2: hold y at the level.
    let mut safety_exit = false;
    if on_level && !horizon_terminal {
        let ybar = synthesis.ystar;
        let last = *traj.last().expect("non-empty trajectory");
        let x = last.x;
        if model.g2(x, ybar) == 0.0 {
            return Err(Error::G2Zero { x });
        }
        let sys = SingularArc { model, ybar };
        let m = model.clone();
        let events = [
            EventSpec::new(EventKind::HitD0, Direction::Falling, true, move |_, z| m.f2(z[0], ybar)),
            event_budget(k + 5e-9 * k.max(1.0)),
        ];
        let arc = solve(&sys, t1, [x, ybar, last.spent], horizon, &events, tol)?;
        match arc.terminal_event().map(|e| e.kind) {
            Some(EventKind::BudgetExhausted) => {
                log::warn!("singular arc stopped by the budget safety event");
                safety_exit = true;
            }
            Some(EventKind::Horizon) => horizon_terminal = true,
            _ => {}
        }
        if let Some(bad) = arc.samples.iter().find(|s| !(-1e-12..=1.0 + 1e-12).contains(&s.u)) {
            return Err(Error::InvalidControl { u: bad.u });
        }
        traj.append(arc);
    }
    let t2 = traj.end_time();

    // Phase 3: coast with the control off.
    let mut reentry = false;
    if !horizon_terminal && t2 < horizon {
        let last = *traj.last().expect("non-empty trajectory");
        let level = synthesis.ystar + REENTRY_MARGIN;
        let floor = SETTLE_FRACTION * libm::hypot(last.x, last.y);
        let events = [event_y_crosses(level).terminal(false), event_settled(floor), EventSpec::left_domain()];
        let tail = integrate_from(model, &null_policy, t2, [last.x, last.y, last.spent], horizon, &events, tol)?;
        reentry = tail.events.iter().any(|e| e.kind == EventKind::HitYbar);
        if reentry {
            log::warn!("trajectory rose above the singular level after the singular arc");
        }
        traj.append(tail);
    }
    let t3 = traj.end_time();

    let peak = traj.peak();
    let spent = traj.spent();
    let phases = alloc::vec![
        PhaseSpan { phase: Phase::Null1, t_start: 0.0, t_end: t1 },
        PhaseSpan { phase: Phase::Singular, t_start: t1, t_end: t2 },
        PhaseSpan { phase: Phase::Null2, t_start: t2, t_end: t3 },
    ];
    Ok(NsnResult { synthesis, trajectory: traj, peak, spent, phases, safety_exit, horizon_terminal, reentry })
}
