//! Ingredients of the NSN strategy: the switching abscissa `x_h(y)`, the
//! uncontrolled arc and its peak `y⁰max`, the entry abscissa `x̄(ȳ)`, the
//! budget curve `L(ȳ)` and the optimal level `ȳ*` with `L(ȳ*) = K`.
//!
//! `L(ȳ) = ∫_{x_h(ȳ)}^{x̄(ȳ)} −f₂(x, ȳ)/Δ(x, ȳ) dx` is strictly decreasing on
//! `[y₀, y⁰max]` with `L(y⁰max) = 0`, so `ȳ*` is found by bisection.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::integrate::{self, event_f2_zero, null_policy, EventKind, Tolerances, Trajectory, DEFAULT_HORIZON};
use crate::models::{PlanarModel, State};
use crate::quadrature::{self, QuadOptions};
use crate::roots::{brent, RootOptions};
use crate::{Error, Result};

/// Geometric bracket expansion steps before giving up on `x_h`.
pub const XH_SCAN_STEPS: usize = 64;

/// Iteration cap for the `ȳ*` bisection.
pub const BISECTION_CAP: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub tol: Tolerances,
    pub horizon: f64,
    /// Number of levels sampled for the reported curves.
    pub curve_points: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self { tol: Tolerances::new(1e-11, 1e-13), horizon: DEFAULT_HORIZON, curve_points: 21 }
    }
}

/// The unique `x` with `f₂(x, y) = 0`, scanning rightwards from the left
/// edge of the domain.
pub fn x_h(model: &PlanarModel, y: f64) -> Result<f64> {
    let d = model.domain();
    let f = |x: f64| model.f2(x, y);
    let mut lo = if d.x_min.is_finite() { d.x_min } else { -1.0 };
    let upper = d.x_upper(y);
    let mut f_lo = f(lo);
    if !f_lo.is_finite() {
        lo += 1e-12 * lo.abs().max(1.0);
        f_lo = f(lo);
    }
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if !f_lo.is_finite() || !(upper > lo) {
        return Err(Error::NoBracket { y });
    }

    let base = 1e-6 * lo.abs().max(1.0);
    let (mut a, mut fa) = (lo, f_lo);
    let mut width = base;
    for _ in 0..XH_SCAN_STEPS {
        let b = (lo + width).min(upper);
        let fb = f(b);
        if fb == 0.0 {
            return Ok(b);
        }
        if fb.is_finite() && fb.signum() != fa.signum() {
            return brent(f, a, b, RootOptions::default()).map_err(|_| Error::NoBracket { y });
        }
        if b >= upper {
            break;
        }
        if fb.is_finite() {
            a = b;
            fa = fb;
        }
        width *= 2.0;
    }
    Err(Error::NoBracket { y })
}

/// The uncontrolled orbit from `s0` up to the switching curve.
#[derive(Debug, Clone)]
pub struct UncontrolledArc {
    pub y0max: f64,
    pub arc: Trajectory,
}

pub fn uncontrolled_arc(model: &PlanarModel, s0: State, opts: &SynthesisOptions) -> Result<UncontrolledArc> {
    model.check_domain(s0)?;
    let f2 = model.f2(s0.x, s0.y);
    if f2 < 0.0 {
        return Err(Error::NotInDPlus { x: s0.x, y: s0.y, f2 });
    }
    if f2 == 0.0 {
        let arc = Trajectory {
            samples: alloc::vec![integrate::Sample { t: 0.0, x: s0.x, y: s0.y, u: 0.0, spent: 0.0 }],
            ..Default::default()
        };
        return Ok(UncontrolledArc { y0max: s0.y, arc });
    }
    let arc = integrate::integrate(model, &null_policy, s0, opts.horizon, &[event_f2_zero(model)], opts.tol)?;
    match arc.terminal_event() {
        Some(e) if e.kind == EventKind::HitD0 => Ok(UncontrolledArc { y0max: e.y, arc }),
        _ => Err(Error::HorizonReached { horizon: opts.horizon }),
    }
}

/// Abscissa where the uncontrolled arc first reaches `ybar`.
pub fn x_bar(arc: &Trajectory, ybar: f64) -> Result<f64> {
    let (first, last) = match (arc.first(), arc.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidArgument("empty arc")),
    };
    let slack = 1e-12 * ybar.abs().max(1.0);
    if !(ybar >= first.y - slack && ybar <= last.y + slack) {
        return Err(Error::OutOfRange { level: ybar, lo: first.y, hi: last.y });
    }
    if ybar <= first.y {
        return Ok(first.x);
    }
    if ybar >= last.y {
        return Ok(last.x);
    }
    let i = arc.samples.partition_point(|s| s.y < ybar);
    let (a, b) = (&arc.samples[i - 1], &arc.samples[i]);
    if b.y == ybar {
        return Ok(b.x);
    }
    let g = |t: f64| arc.state_at(t).map_or(f64::NAN, |z| z[1]) - ybar;
    let opts = RootOptions { xtol_abs: 0.0, xtol_rel: 4.0 * f64::EPSILON, ftol: 0.0, max_iter: 200 };
    let t = brent(g, a.t, b.t, opts)?;
    arc.state_at(t).map(|z| z[0]).ok_or(Error::InvalidArgument("level outside the dense output"))
}

/// `L(ȳ) = ∫_{x_h}^{x̄} −f₂(x, ȳ)/Δ(x, ȳ) dx`.
pub fn budget_l(model: &PlanarModel, ybar: f64, xh: f64, xbar: f64) -> Result<f64> {
    let scale = xh.abs().max(1.0);
    if xbar <= xh {
        // x̄ can land a hair left of x_h when ȳ = y⁰max; the integrand
        // vanishes there.
        if xh - xbar <= 1e-8 * scale {
            return Ok(0.0);
        }
        return Err(Error::InvalidArgument("x_bar must exceed x_h"));
    }
    let mut sign = 0.0f64;
    let mut singular_at: Option<f64> = None;
    let integrand = |x: f64| {
        let d = model.delta_unchecked(x, ybar);
        if d == 0.0 || !d.is_finite() || (sign != 0.0 && d.signum() != sign) {
            singular_at.get_or_insert(x);
            return 0.0;
        }
        sign = d.signum();
        -model.f2(x, ybar) / d
    };
    let res = quadrature::integrate(integrand, xh, xbar, QuadOptions::default());
    if let Some(x) = singular_at {
        return Err(Error::SingularDelta { x, y: ybar });
    }
    Ok(res?.value)
}

/// `L(ȳ)` read off a stored uncontrolled arc.
pub fn budget_at(model: &PlanarModel, arc: &UncontrolledArc, ybar: f64) -> Result<f64> {
    if ybar >= arc.y0max {
        if ybar - arc.y0max <= 1e-12 * arc.y0max.abs().max(1.0) {
            return Ok(0.0);
        }
        let y0 = arc.arc.first().map_or(ybar, |s| s.y);
        return Err(Error::OutOfRange { level: ybar, lo: y0, hi: arc.y0max });
    }
    let xbar = x_bar(&arc.arc, ybar)?;
    let xh = x_h(model, ybar)?;
    budget_l(model, ybar, xh, xbar)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `L(y₀) ≥ K`: the singular level solves `L(ȳ*) = K`.
    Interior,
    /// `K > L(y₀)`: the budget suffices to hold `y` at `y₀`.
    Saturated,
    /// `s0 ∉ D₊`: `y` never rises and the strategy is `u ≡ 0`.
    Trivial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisReport {
    pub s0: State,
    pub budget: f64,
    pub y0max: f64,
    pub ystar: f64,
    pub regime: Regime,
    pub l_at_y0: Option<f64>,
    /// Sampled `(ȳ, x̄(ȳ))`.
    pub xbar_arc: Vec<[f64; 2]>,
    /// Sampled `(ȳ, L(ȳ))`.
    #[serde(rename = "curve")]
    pub budget_curve: Vec<[f64; 2]>,
    #[serde(skip)]
    pub arc: Option<UncontrolledArc>,
}

/// Levels `y₀ … y⁰max`, equispaced, endpoints included.
pub fn levels(y0: f64, y0max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![y0],
        _ => (0..n).map(|i| if i + 1 == n { y0max } else { y0 + (y0max - y0) * i as f64 / (n - 1) as f64 }).collect(),
    }
}

/// `ȳ*` with default options.
pub fn solve_ystar(model: &PlanarModel, s0: State, k: f64) -> Result<SynthesisReport> {
    solve_ystar_with(model, s0, k, &SynthesisOptions::default())
}

pub fn solve_ystar_with(model: &PlanarModel, s0: State, k: f64, opts: &SynthesisOptions) -> Result<SynthesisReport> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument("budget must be finite and non-negative"));
    }
    model.check_domain(s0)?;
    if model.f2(s0.x, s0.y) <= 0.0 {
        return Ok(SynthesisReport {
            s0,
            budget: k,
            y0max: s0.y,
            ystar: s0.y,
            regime: Regime::Trivial,
            l_at_y0: None,
            xbar_arc: Vec::new(),
            budget_curve: Vec::new(),
            arc: None,
        });
    }

    let arc = uncontrolled_arc(model, s0, opts)?;
    let y0max = arc.y0max;
    let l_y0 = budget_at(model, &arc, s0.y)?;

    let (ystar, regime) = if k > l_y0 {
        (s0.y, Regime::Saturated)
    } else if k == 0.0 {
        (y0max, Regime::Interior)
    } else {
        (bisect_level(model, &arc, s0.y, k)?, Regime::Interior)
    };

    let mut xbar_arc = Vec::with_capacity(opts.curve_points);
    let mut budget_curve = Vec::with_capacity(opts.curve_points);
    for y in levels(s0.y, y0max, opts.curve_points) {
        xbar_arc.push([y, x_bar(&arc.arc, y)?]);
        budget_curve.push([y, budget_at(model, &arc, y)?]);
    }

    Ok(SynthesisReport {
        s0,
        budget: k,
        y0max,
        ystar,
        regime,
        l_at_y0: Some(l_y0),
        xbar_arc,
        budget_curve,
        arc: Some(arc),
    })
}

fn bisect_level(model: &PlanarModel, arc: &UncontrolledArc, y0: f64, k: f64) -> Result<f64> {
    let tol = 1e-9 * k.max(1.0);
    let (mut lo, mut hi) = (y0, arc.y0max);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..BISECTION_CAP {
        mid = 0.5 * (lo + hi);
        let l = budget_at(model, arc, mid)?;
        if (l - k).abs() < tol {
            return Ok(mid);
        }
        if l > k {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    log::warn!("level bisection hit the iteration cap at ybar = {mid}");
    Ok(mid)
}
