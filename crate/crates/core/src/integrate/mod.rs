//! Adaptive Dormand–Prince 5(4) integration of the budget-augmented system
//! `[x, y, spent]` with dense output and event location.
//!
//! Integration stops at the first terminal event or at the horizon, which is
//! then recorded as a `Horizon` event. Events are located on the dense
//! interpolant with Brent's method.

use alloc::sync::Arc;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::{PlanarModel, State};
use crate::roots::{brent, RootOptions};
use crate::{Error, Result};

mod dopri;

pub use dopri::{DenseStep, Z};

/// Events are polished until `|g| <= EVENT_TOL` where the root allows it.
pub const EVENT_TOL: f64 = 1e-10;

/// Default horizon standing in for `t = +∞`.
pub const DEFAULT_HORIZON: f64 = 1e4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    HitYbar,
    #[serde(rename = "hit_D0")]
    HitD0,
    BudgetExhausted,
    LeftDomain,
    Horizon,
    /// Local maximum of `y` (ẏ crosses zero downwards).
    YPeak,
    /// The state norm outgrew a divergence threshold.
    Diverged,
    /// The state norm fell below a floor.
    Settled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Rising,
    Falling,
    Either,
}

impl Direction {
    fn crosses(self, before: f64, after: f64) -> bool {
        match self {
            Direction::Rising => before < 0.0 && after >= 0.0,
            Direction::Falling => before > 0.0 && after <= 0.0,
            Direction::Either => (before < 0.0 && after >= 0.0) || (before > 0.0 && after <= 0.0),
        }
    }

    fn matches_slope(self, slope: f64) -> bool {
        match self {
            Direction::Rising => slope > 0.0,
            Direction::Falling => slope < 0.0,
            Direction::Either => slope != 0.0,
        }
    }
}

type EventFn = Arc<dyn Fn(f64, &Z) -> f64 + Send + Sync>;

/// A scalar event function on `(t, [x, y, spent])`.
#[derive(Clone)]
pub struct EventSpec {
    pub kind: EventKind,
    pub direction: Direction,
    pub terminal: bool,
    func: EventFn,
}

impl EventSpec {
    pub fn new<F>(kind: EventKind, direction: Direction, terminal: bool, func: F) -> Self
    where
        F: Fn(f64, &Z) -> f64 + Send + Sync + 'static,
    {
        Self { kind, direction, terminal, func: Arc::new(func) }
    }

    pub fn terminal(mut self, terminal: bool) -> Self {
        self.terminal = terminal;
        self
    }

    pub fn eval(&self, t: f64, z: &Z) -> f64 {
        (self.func)(t, z)
    }

    /// Stop cleanly (instead of failing) when the state leaves the domain.
    pub fn left_domain() -> Self {
        Self::new(EventKind::LeftDomain, Direction::Either, true, |_, _| 0.0)
    }
}

impl core::fmt::Debug for EventSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EventSpec")
            .field("kind", &self.kind)
            .field("direction", &self.direction)
            .field("terminal", &self.terminal)
            .finish_non_exhaustive()
    }
}

/// `y − level`, rising, terminal.
pub fn event_y_crosses(level: f64) -> EventSpec {
    EventSpec::new(EventKind::HitYbar, Direction::Rising, true, move |_, z| z[1] - level)
}

/// `f₂(x, y)`, falling (D₊ → D₋), terminal.
pub fn event_f2_zero(model: &PlanarModel) -> EventSpec {
    let m = model.clone();
    EventSpec::new(EventKind::HitD0, Direction::Falling, true, move |_, z| m.f2(z[0], z[1]))
}

/// `spent − k`, rising, terminal.
pub fn event_budget(k: f64) -> EventSpec {
    EventSpec::new(EventKind::BudgetExhausted, Direction::Rising, true, move |_, z| z[2] - k)
}

/// `‖(x, y)‖ − floor`, falling, terminal.
pub fn event_settled(floor: f64) -> EventSpec {
    EventSpec::new(EventKind::Settled, Direction::Falling, true, move |_, z| libm::hypot(z[0], z[1]) - floor)
}

/// `ẏ` under the constant control `u`, falling, non-terminal.
pub fn event_y_peak(model: &PlanarModel, u: f64) -> EventSpec {
    let m = model.clone();
    EventSpec::new(EventKind::YPeak, Direction::Falling, false, move |_, z| m.f2(z[0], z[1]) + m.g2(z[0], z[1]) * u)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub u: f64,
    pub spent: f64,
}

impl Sample {
    pub fn state(&self) -> State {
        State::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub t: f64,
    pub kind: EventKind,
    pub x: f64,
    pub y: f64,
    pub spent: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<EventRecord>,
    #[serde(skip)]
    pub dense: Vec<DenseStep>,
}

impl Trajectory {
    pub fn first(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn end_time(&self) -> f64 {
        self.last().map_or(0.0, |s| s.t)
    }

    /// Largest `y` over samples and event states.
    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.y).chain(self.events.iter().map(|e| e.y)).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn spent(&self) -> f64 {
        self.last().map_or(0.0, |s| s.spent)
    }

    /// The event that ended the integration, if any.
    pub fn terminal_event(&self) -> Option<&EventRecord> {
        self.events.last().filter(|e| (e.t - self.end_time()).abs() <= 0.0 && e.kind != EventKind::YPeak)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&EventRecord> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// Interpolated `[x, y, spent]` at `t`, within the integrated span.
    pub fn state_at(&self, t: f64) -> Option<Z> {
        let first = self.first()?;
        let last = self.last()?;
        if t < first.t || t > last.t {
            return None;
        }
        if t == last.t {
            return Some([last.x, last.y, last.spent]);
        }
        // A step cut short by a terminal event still spans its full width,
        // so pick the latest step starting at or before `t`.
        let idx = self.dense.partition_point(|d| d.t0 <= t).checked_sub(1)?;
        self.dense.get(idx).map(|d| d.eval(t))
    }

    /// Concatenates a continuation that starts where `self` ends. The joint
    /// sample keeps the continuation's control, so `u` is right-continuous.
    pub fn append(&mut self, mut next: Trajectory) {
        if let (Some(last), Some(head)) = (self.samples.last_mut(), next.samples.first()) {
            if head.t <= last.t {
                last.u = head.u;
                next.samples.remove(0);
            }
        }
        self.samples.append(&mut next.samples);
        self.events.append(&mut next.events);
        self.dense.append(&mut next.dense);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12 }
    }
}

impl Tolerances {
    pub const fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }
}

/// Right-hand side of an augmented system `[x, y, spent]`.
pub trait System {
    fn rhs(&self, t: f64, z: &Z) -> Z;
    /// The control applied at `(t, z)`; becomes the derivative of `spent`.
    fn control(&self, t: f64, z: &Z) -> f64;
    fn in_domain(&self, z: &Z) -> bool;
}

/// A feedback or open-loop control law.
pub trait Policy {
    fn control(&self, t: f64, s: State) -> f64;
}

impl<F: Fn(f64, State) -> f64> Policy for F {
    fn control(&self, t: f64, s: State) -> f64 {
        self(t, s)
    }
}

/// `u ≡ 0`.
pub fn null_policy(_t: f64, _s: State) -> f64 {
    0.0
}

struct ClosedLoop<'a, P: ?Sized> {
    model: &'a PlanarModel,
    policy: &'a P,
}

impl<P: Policy + ?Sized> System for ClosedLoop<'_, P> {
    fn rhs(&self, t: f64, z: &Z) -> Z {
        let u = self.control(t, z);
        let (dx, dy) = self.model.rhs(z[0], z[1], u);
        [dx, dy, u]
    }

    fn control(&self, t: f64, z: &Z) -> f64 {
        self.policy.control(t, State::new(z[0], z[1])).clamp(0.0, 1.0)
    }

    fn in_domain(&self, z: &Z) -> bool {
        self.model.domain().contains(z[0], z[1])
    }
}

const CONTROL_SLACK: f64 = 1e-12;

/// Integrates the closed loop from `s0` at `t = 0` with zero spent budget.
pub fn integrate<P: Policy + ?Sized>(
    model: &PlanarModel,
    policy: &P,
    s0: State,
    horizon: f64,
    events: &[EventSpec],
    tol: Tolerances,
) -> Result<Trajectory> {
    integrate_from(model, policy, 0.0, [s0.x, s0.y, 0.0], horizon, events, tol)
}

/// Integrates the closed loop on `[t0, t_end]` from an augmented state.
pub fn integrate_from<P: Policy + ?Sized>(
    model: &PlanarModel,
    policy: &P,
    t0: f64,
    z0: Z,
    t_end: f64,
    events: &[EventSpec],
    tol: Tolerances,
) -> Result<Trajectory> {
    let u = policy.control(t0, State::new(z0[0], z0[1]));
    if !(-CONTROL_SLACK..=1.0 + CONTROL_SLACK).contains(&u) {
        return Err(Error::InvalidControl { u });
    }
    let sys = ClosedLoop { model, policy };
    let traj = solve(&sys, t0, z0, t_end, events, tol)?;
    if let Some(bad) = traj.samples.iter().find(|s| !(-CONTROL_SLACK..=1.0 + CONTROL_SLACK).contains(&s.u)) {
        return Err(Error::InvalidControl { u: bad.u });
    }
    Ok(traj)
}

const MAX_STEPS: usize = 2_000_000;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;

fn rms_scaled(v: &Z, z: &Z, tol: Tolerances) -> f64 {
    let s: f64 = (0..3)
        .map(|i| {
            let r = v[i] / (tol.atol + tol.rtol * z[i].abs());
            r * r
        })
        .sum();
    libm::sqrt(s / 3.0)
}

fn initial_step<S: System>(sys: &S, t0: f64, z0: &Z, f0: &Z, span: f64, tol: Tolerances) -> f64 {
    let d0 = rms_scaled(z0, z0, tol);
    let d1 = rms_scaled(f0, z0, tol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let z1 = [z0[0] + h0 * f0[0], z0[1] + h0 * f0[1], z0[2] + h0 * f0[2]];
    let f1 = sys.rhs(t0 + h0, &z1);
    let diff = [f1[0] - f0[0], f1[1] - f0[1], f1[2] - f0[2]];
    let d2 = rms_scaled(&diff, z0, tol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { libm::pow(0.01 / d1.max(d2), 0.2) };
    (100.0 * h0).min(h1).min(span)
}

fn sample_of<S: System>(sys: &S, t: f64, z: &Z) -> Sample {
    Sample { t, x: z[0], y: z[1], u: sys.control(t, z), spent: z[2] }
}

fn record(kind: EventKind, t: f64, z: &Z) -> EventRecord {
    EventRecord { t, kind, x: z[0], y: z[1], spent: z[2] }
}

/// Core integration loop shared by the closed loop and the reduced
/// singular-arc dynamics.
pub(crate) fn solve<S: System>(
    sys: &S,
    t0: f64,
    z0: Z,
    t_end: f64,
    events: &[EventSpec],
    tol: Tolerances,
) -> Result<Trajectory> {
    if !(t_end > t0) {
        return Err(Error::InvalidArgument("horizon must exceed the start time"));
    }
    if !(tol.rtol > 0.0 && tol.atol > 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive"));
    }
    if !sys.in_domain(&z0) {
        return Err(Error::Domain { x: z0[0], y: z0[1] });
    }
    let stop_on_exit = events.iter().any(|e| e.kind == EventKind::LeftDomain);
    let watched: Vec<&EventSpec> = events.iter().filter(|e| e.kind != EventKind::LeftDomain).collect();

    let mut traj = Trajectory::default();
    traj.samples.push(sample_of(sys, t0, &z0));

    let mut k1 = sys.rhs(t0, &z0);

    // Events sitting exactly at zero at the start fire if the flow pushes
    // them the right way.
    let mut g_prev: Vec<f64> = watched.iter().map(|e| e.eval(t0, &z0)).collect();
    let probe_dt = 1e-7 * (t_end - t0).min(1.0);
    let probe_z = [z0[0] + probe_dt * k1[0], z0[1] + probe_dt * k1[1], z0[2] + probe_dt * k1[2]];
    for (e, g) in watched.iter().zip(g_prev.iter()) {
        if g.abs() <= EVENT_TOL {
            let slope = e.eval(t0 + probe_dt, &probe_z) - g;
            if e.direction.matches_slope(slope) {
                traj.events.push(record(e.kind, t0, &z0));
                if e.terminal {
                    return Ok(traj);
                }
            }
        }
    }

    let mut t = t0;
    let mut z = z0;
    let mut h = initial_step(sys, t0, &z0, &k1, t_end - t0, tol);
    let mut facold: f64 = 1e-4;
    let mut rejected = false;
    let mut n_steps = 0usize;
    let mut rhs = |tt: f64, zz: &Z| sys.rhs(tt, zz);

    while t < t_end {
        n_steps += 1;
        if n_steps > MAX_STEPS {
            return Err(Error::Stiffness { t, h });
        }
        let remaining = t_end - t;
        let last_step = h >= remaining;
        if last_step {
            h = remaining;
        }
        if h < 1e-14 * t.abs().max(1.0) && !last_step {
            return Err(Error::Stiffness { t, h });
        }

        let out = dopri::step(&mut rhs, t, &z, &k1, h, tol.rtol, tol.atol);
        let finite = out.err.is_finite() && out.z1.iter().all(|v| v.is_finite());
        if !finite || out.err > 1.0 {
            let fac11 = if finite { libm::pow(out.err, EXPO1) } else { 1.0 / FAC_MIN };
            h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
            rejected = true;
            continue;
        }

        let t_new = if last_step { t_end } else { t + h };
        let dense = out.dense;
        let z1 = out.z1;

        // Earliest crossing per watched event.
        let g_new: Vec<f64> = watched.iter().map(|e| e.eval(t_new, &z1)).collect();
        let mut hits: Vec<(f64, usize)> = Vec::new();
        for (i, e) in watched.iter().enumerate() {
            if e.direction.crosses(g_prev[i], g_new[i]) {
                let te = if g_new[i] == 0.0 {
                    t_new
                } else {
                    let opts = RootOptions { xtol_abs: 0.0, xtol_rel: 4.0 * f64::EPSILON, ftol: 1e-14, max_iter: 200 };
                    brent(|tt| e.eval(tt, &dense.eval(tt)), t, t_new, opts).unwrap_or(t_new)
                };
                hits.push((te, i));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        let first_terminal = hits.iter().find(|(_, i)| watched[*i].terminal).copied();

        traj.dense.push(dense);
        for &(te, i) in &hits {
            if first_terminal.is_some_and(|(tt, _)| te > tt) {
                break;
            }
            let ze = dense.eval(te);
            traj.events.push(record(watched[i].kind, te, &ze));
            if watched[i].terminal {
                if te > traj.end_time() {
                    traj.samples.push(sample_of(sys, te, &ze));
                }
                return Ok(traj);
            }
        }

        if !sys.in_domain(&z1) {
            if stop_on_exit {
                traj.samples.push(sample_of(sys, t_new, &z1));
                traj.events.push(record(EventKind::LeftDomain, t_new, &z1));
                return Ok(traj);
            }
            return Err(Error::Domain { x: z1[0], y: z1[1] });
        }

        traj.samples.push(sample_of(sys, t_new, &z1));
        g_prev = g_new;
        t = t_new;
        z = z1;
        k1 = out.k7;

        let fac11 = libm::pow(out.err, EXPO1);
        let fac = (fac11 / libm::pow(facold, BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;
        if rejected {
            h_new = h_new.min(h);
        }
        facold = out.err.max(1e-4);
        rejected = false;
        h = h_new;
    }

    traj.events.push(record(EventKind::Horizon, t, &z));
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin, Params};

    fn sir() -> PlanarModel {
        let p: Params = [("beta".into(), 0.5), ("alpha".into(), 0.1)].into_iter().collect();
        builtin("sir", &p).unwrap()
    }

    fn example1() -> PlanarModel {
        builtin("example1", &Params::new()).unwrap()
    }

    #[test]
    fn exponential_decay_accuracy() {
        struct Decay;
        impl System for Decay {
            fn rhs(&self, _t: f64, z: &Z) -> Z {
                [-z[0], -2.0 * z[1], 0.0]
            }
            fn control(&self, _t: f64, _z: &Z) -> f64 {
                0.0
            }
            fn in_domain(&self, _z: &Z) -> bool {
                true
            }
        }
        let tr = solve(&Decay, 0.0, [1.0, 1.0, 0.0], 5.0, &[], Tolerances::default()).unwrap();
        let end = tr.last().unwrap();
        assert_eq!(end.t, 5.0);
        assert!((end.x - libm::exp(-5.0)).abs() < 1e-10);
        assert!((end.y - libm::exp(-10.0)).abs() < 1e-10);
        // dense output between steps
        let mid = tr.state_at(2.345).unwrap();
        assert!((mid[0] - libm::exp(-2.345)).abs() < 1e-9);
        assert_eq!(tr.events.last().unwrap().kind, EventKind::Horizon);
    }

    #[test]
    fn null_policy_spends_nothing() {
        let tr = integrate(&sir(), &null_policy, State::new(0.9, 0.05), 50.0, &[], Tolerances::default()).unwrap();
        assert!(tr.samples.iter().all(|s| s.spent == 0.0 && s.u == 0.0));
    }

    #[test]
    fn budget_event_at_start() {
        let full = |_t: f64, _s: State| 1.0;
        let tr =
            integrate(&sir(), &full, State::new(0.9, 0.05), 10.0, &[event_budget(0.0)], Tolerances::default()).unwrap();
        assert_eq!(tr.events.len(), 1);
        assert_eq!(tr.events[0].kind, EventKind::BudgetExhausted);
        assert_eq!(tr.events[0].t, 0.0);
        assert_eq!(tr.samples.len(), 1);
    }

    #[test]
    fn budget_event_located_in_time() {
        let half = |_t: f64, _s: State| 0.5;
        let tr =
            integrate(&sir(), &half, State::new(0.9, 0.05), 10.0, &[event_budget(0.3)], Tolerances::default()).unwrap();
        let e = tr.terminal_event().unwrap();
        assert_eq!(e.kind, EventKind::BudgetExhausted);
        assert!((e.t - 0.6).abs() < 1e-10);
        assert!((e.spent - 0.3).abs() < 1e-10);
    }

    #[test]
    fn sir_switching_event_at_alpha_over_beta() {
        let m = sir();
        let tr = integrate(&m, &null_policy, State::new(0.99, 0.01), 1e4, &[event_f2_zero(&m)], Tolerances::default())
            .unwrap();
        let e = tr.terminal_event().unwrap();
        assert_eq!(e.kind, EventKind::HitD0);
        assert!((e.x - 0.2).abs() < 1e-9);
        assert!(m.f2(e.x, e.y).abs() < EVENT_TOL);
    }

    #[test]
    fn example1_level_crossing_matches_quadrature_oracle() {
        // ∫₂^x̄ s/(s+1)² ds = 2 − 2.2, solved independently: x̄ = 1.1554735587236682
        let tr = integrate(
            &example1(),
            &null_policy,
            State::new(2.0, 2.0),
            10.0,
            &[event_y_crosses(2.2)],
            Tolerances::default(),
        )
        .unwrap();
        let e = tr.terminal_event().unwrap();
        assert_eq!(e.kind, EventKind::HitYbar);
        assert!((e.y - 2.2).abs() < EVENT_TOL);
        assert!((e.x - 1.155_473_558_723_668_2).abs() < 1e-8);
    }

    #[test]
    fn example1_uncontrolled_peak() {
        let tr = integrate(&example1(), &null_policy, State::new(2.0, 2.0), 20.0, &[], Tolerances::default()).unwrap();
        let m = example1();
        let tr_peak =
            integrate(&m, &null_policy, State::new(2.0, 2.0), 20.0, &[event_y_peak(&m, 0.0)], Tolerances::default())
                .unwrap();
        let exact = 2.431_945_622_001_443;
        assert!((tr_peak.peak() - exact).abs() < 1e-9);
        assert!(tr.peak() <= exact + 1e-9 && tr.peak() > exact - 1e-3);
    }

    #[test]
    fn sir_uncontrolled_peak_conserved_quantity() {
        // x + y − (α/β) ln x is conserved; the peak sits at x = α/β.
        let m = sir();
        let tr =
            integrate(&m, &null_policy, State::new(0.99, 0.01), 200.0, &[event_y_peak(&m, 0.0)], Tolerances::default())
                .unwrap();
        assert!((tr.peak() - 0.480_122_484_683_880_14).abs() < 1e-9);
    }

    #[test]
    fn leaving_domain_without_event_is_an_error() {
        // y grows past 1 under this drift.
        let m = PlanarModel::new(
            "grow",
            crate::models::Domain { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0, sum_max: None },
            |_, _| 0.0,
            |_, _| 1.0,
            |_, _| 0.0,
            |_, _| 0.0,
        );
        let r = integrate(&m, &null_policy, State::new(0.5, 0.5), 2.0, &[], Tolerances::default());
        assert!(matches!(r, Err(Error::Domain { .. })));
        let tr =
            integrate(&m, &null_policy, State::new(0.5, 0.5), 2.0, &[EventSpec::left_domain()], Tolerances::default())
                .unwrap();
        assert_eq!(tr.terminal_event().unwrap().kind, EventKind::LeftDomain);
    }

    #[test]
    fn finite_time_blowup_is_reported_as_stiffness() {
        struct Blowup;
        impl System for Blowup {
            fn rhs(&self, _t: f64, z: &Z) -> Z {
                [z[0] * z[0], 0.0, 0.0]
            }
            fn control(&self, _t: f64, _z: &Z) -> f64 {
                0.0
            }
            fn in_domain(&self, _z: &Z) -> bool {
                true
            }
        }
        let r = solve(&Blowup, 0.0, [1.0, 0.0, 0.0], 2.0, &[], Tolerances::default());
        assert!(matches!(r, Err(Error::Stiffness { .. })), "{r:?}");
    }

    #[test]
    fn out_of_range_policy_is_rejected() {
        let bad = |_t: f64, _s: State| 1.5;
        let r = integrate(&sir(), &bad, State::new(0.5, 0.1), 1.0, &[], Tolerances::default());
        assert!(matches!(r, Err(Error::InvalidControl { .. })));
    }

    #[test]
    fn bad_arguments() {
        let m = sir();
        assert!(integrate(&m, &null_policy, State::new(0.5, 0.1), 0.0, &[], Tolerances::default()).is_err());
        assert!(integrate(&m, &null_policy, State::new(0.5, 0.1), 1.0, &[], Tolerances::new(0.0, 1e-9)).is_err());
        assert!(matches!(
            integrate(&m, &null_policy, State::new(0.9, 0.9), 1.0, &[], Tolerances::default()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn lookup_after_append_uses_the_continuation() {
        let m = example1();
        let tol = Tolerances::default();
        let mut tr = integrate(&m, &null_policy, State::new(2.0, 2.0), 10.0, &[event_y_crosses(2.2)], tol).unwrap();
        let t1 = tr.end_time();
        let last = *tr.last().unwrap();
        let hold = |_t: f64, _s: State| 1.0;
        let next = integrate_from(&m, &hold, t1, [last.x, last.y, 0.0], t1 + 0.1, &[], tol).unwrap();
        let probe = t1 + 1e-3;
        let expected = next.state_at(probe).unwrap();
        tr.append(next);
        assert_eq!(tr.state_at(probe).unwrap(), expected);
    }
}
