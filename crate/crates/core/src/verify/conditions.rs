//! Pointwise conditions and how their values are judged.

use serde::{Deserialize, Serialize};

use super::{GridSpec, DIRECT_SLACK, FD_SLACK, INCONCLUSIVE_BELOW, ZERO_TOL};
use crate::diff::{partial_x, partial_y};
use crate::integrate::{event_settled, integrate, null_policy, Direction, EventKind, EventSpec, Tolerances};
use crate::models::{KolmogorovForm, PlanarModel, State};
use crate::synthesis::x_h;

/// Divergence threshold relative to the initial state norm.
pub const DIVERGENCE_FACTOR: f64 = 1e3;
/// Horizon of the boundedness simulations.
pub const BOUNDEDNESS_HORIZON: f64 = 1e3;

/// Where a condition is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Grid nodes in the domain.
    Domain,
    /// Grid nodes with `f₂ > 0`.
    DPlus,
    /// `(x_h(y), y)` for each grid ordinate.
    D0,
    /// Grid nodes with `φ₃ ≥ 0`.
    Phi3NonNegative,
    /// Grid nodes with `φ₃ > 0`.
    Phi3Positive,
    /// The left domain boundary (or box edge) at each grid ordinate.
    LeftEdge,
    /// `(x_max, y)` for each grid ordinate.
    RightEdge,
    /// `(x_min, y)` for each grid ordinate whose line meets `D₊`.
    Lines,
    /// A coarse subgrid of starting points.
    Starts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Positive,
    Negative,
    NonNegative,
    NonPositive,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    DPlusNonEmpty,
    DMinusNonEmpty,
    UniqueSwitch,
    Bounded,

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

    RatioIncreasingY,

    G2NegativeOnD0,
    DriftOnD0,

    GreenFlux,

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
}

impl Condition {
    pub fn region(self) -> Region {
        use Condition::*;
        match self {
            DPlusNonEmpty | DMinusNonEmpty => Region::Domain,
            UniqueSwitch => Region::Lines,
            Bounded => Region::Starts,
            F1Negative | F1DecreasingX | F1DecreasingY | G1IncreasingX | G1IncreasingY | F1PlusG1NonPositive
            | F2IncreasingX | G2DecreasingX | G2DecreasingY | F2PlusG2Negative | RatioIncreasingY | GreenFlux
            | KolmogorovGreen => Region::DPlus,
            F1NegativeOnD0 | F2IncreasingXOnD0 | F2NonIncreasingYOnD0 | G2NegativeOnD0 | DriftOnD0
            | Phi1EqualsPhi2OnD0 => Region::D0,
            Phi1Positive | Phi2Positive | Phi3IncreasingX | Phi3NonIncreasingY | XPhi1Increasing | XPhi2Increasing
            | YPhi4Increasing => Region::Domain,
            Phi3NegativeAtLeft => Region::LeftEdge,
            Phi3PositiveAtRight => Region::RightEdge,
            Phi1AtLeastPhi2 | DyPhi1AtLeastDyPhi2 | DyPhi2Positive => Region::Phi3NonNegative,
            Phi4IncreasingX | Phi4ExceedsPhi3 | BracketPhi3Phi4 => Region::Phi3Positive,
        }
    }

    pub fn requirement(self) -> Requirement {
        use Condition::*;
        match self {
            DPlusNonEmpty | G1IncreasingX | G1IncreasingY | F2IncreasingX | RatioIncreasingY | F2IncreasingXOnD0
            | GreenFlux | Phi1Positive | Phi2Positive | Phi3IncreasingX | Phi3PositiveAtRight | DyPhi2Positive
            | XPhi1Increasing | XPhi2Increasing | Phi4IncreasingX | Phi4ExceedsPhi3 | YPhi4Increasing
            | KolmogorovGreen => Requirement::Positive,
            DMinusNonEmpty | F1Negative | F1DecreasingX | F1DecreasingY | G2DecreasingX | G2DecreasingY
            | F2PlusG2Negative | F1NegativeOnD0 | G2NegativeOnD0 | Phi3NegativeAtLeft => Requirement::Negative,
            DriftOnD0 | Phi1AtLeastPhi2 | DyPhi1AtLeastDyPhi2 | BracketPhi3Phi4 => Requirement::NonNegative,
            F1PlusG1NonPositive | F2NonIncreasingYOnD0 | Phi3NonIncreasingY | Bounded => Requirement::NonPositive,
            UniqueSwitch | Phi1EqualsPhi2OnD0 => Requirement::Zero,
        }
    }

    /// Whether the value comes from finite differences on `model`.
    pub fn finite_difference(self, model: &PlanarModel) -> bool {
        use Condition::*;
        match self {
            F1DecreasingX | F1DecreasingY | G1IncreasingX | G1IncreasingY | F2IncreasingX | G2DecreasingX
            | G2DecreasingY | F2IncreasingXOnD0 | F2NonIncreasingYOnD0 | RatioIncreasingY | DriftOnD0
            | Phi3IncreasingX | Phi3NonIncreasingY | DyPhi1AtLeastDyPhi2 | DyPhi2Positive | XPhi1Increasing
            | XPhi2Increasing | Phi4IncreasingX | BracketPhi3Phi4 | YPhi4Increasing | KolmogorovGreen => true,
            GreenFlux => model.exact_green_flux(1.0, 1.0).is_none(),
            _ => false,
        }
    }

    /// The condition's value at `(x, y)`; non-finite when undefined there.
    pub fn value(self, model: &PlanarModel, x: f64, y: f64, grid: &GridSpec) -> f64 {
        use Condition::*;
        let h = grid.steps_at(model, x, y);
        let dx = |f: &dyn Fn(f64, f64) -> f64| partial_x(f, x, y, h.hx);
        let dy = |f: &dyn Fn(f64, f64) -> f64| partial_y(f, x, y, h.hy);
        let m = model;
        match self {
            DPlusNonEmpty | DMinusNonEmpty => m.f2(x, y),
            UniqueSwitch => extra_roots(m, y, grid),
            Bounded => divergence(m, State::new(x, y)),

            F1Negative | F1NegativeOnD0 => m.f1(x, y),
            F1DecreasingX => dx(&|a, b| m.f1(a, b)),
            F1DecreasingY => dy(&|a, b| m.f1(a, b)),
            G1IncreasingX => dx(&|a, b| m.g1(a, b)),
            G1IncreasingY => dy(&|a, b| m.g1(a, b)),
            F1PlusG1NonPositive => m.f1(x, y) + m.g1(x, y),
            F2IncreasingX | F2IncreasingXOnD0 => dx(&|a, b| m.f2(a, b)),
            F2NonIncreasingYOnD0 => dy(&|a, b| m.f2(a, b)),
            G2DecreasingX => dx(&|a, b| m.g2(a, b)),
            G2DecreasingY => dy(&|a, b| m.g2(a, b)),
            F2PlusG2Negative => m.f2(x, y) + m.g2(x, y),
            RatioIncreasingY => dy(&|a, b| m.f2(a, b) / m.delta_unchecked(a, b)),
            G2NegativeOnD0 => m.g2(x, y),
            DriftOnD0 => {
                let gx = dx(&|a, b| m.f2(a, b));
                let gy = dy(&|a, b| m.f2(a, b));
                gx * (m.f1(x, y) + m.g1(x, y)) + gy * (m.f2(x, y) + m.g2(x, y))
            }
            GreenFlux => super::green_flux(m, State::new(x, y)).unwrap_or(f64::NAN),

            _ => match m.kolmogorov() {
                Some(k) => kolmogorov_value(self, k, x, y, grid.steps_at(model, x, y)),
                None => f64::NAN,
            },
        }
    }
}

fn kolmogorov_value(c: Condition, k: &KolmogorovForm, x: f64, y: f64, h: super::Steps) -> f64 {
    use Condition::*;
    let p = |i: usize| k.phi(i, x, y);
    let dx = |i: usize| partial_x(|a, b| k.phi(i, a, b), x, y, h.hx);
    let dy = |i: usize| partial_y(|a, b| k.phi(i, a, b), x, y, h.hy);
    match c {
        Phi1Positive => p(1),
        Phi2Positive => p(2),
        Phi3IncreasingX => dx(3),
        Phi3NonIncreasingY => dy(3),
        Phi3NegativeAtLeft | Phi3PositiveAtRight => p(3),
        Phi1AtLeastPhi2 => p(1) - p(2),
        DyPhi1AtLeastDyPhi2 => dy(1) - dy(2),
        DyPhi2Positive => dy(2),
        Phi1EqualsPhi2OnD0 => p(1) - p(2),
        XPhi1Increasing => partial_x(|a, b| k.phi(1, a, b) * a, x, y, h.hx),
        XPhi2Increasing => partial_x(|a, b| k.phi(2, a, b) * a, x, y, h.hx),
        Phi4IncreasingX => dx(4),
        Phi4ExceedsPhi3 => p(4) - p(3),
        BracketPhi3Phi4 => p(3) * dy(4) - p(4) * dy(3),
        YPhi4Increasing => partial_y(|a, b| k.phi(4, a, b) * b, x, y, h.hy),
        KolmogorovGreen => super::kolmogorov_green(k, x, y, h.hx, h.hy),
        _ => f64::NAN,
    }
}

/// Sign changes of `f₂` on the grid line at `y` other than the one at
/// `x_h(y)`; `−1` when `x_h(y)` does not exist.
fn extra_roots(model: &PlanarModel, y: f64, grid: &GridSpec) -> f64 {
    let Ok(xh) = x_h(model, y) else {
        return -1.0;
    };
    let h = grid.steps().hx;
    let mut changes = 0usize;
    for side in [false, true] {
        let mut prev: Option<f64> = None;
        for x in grid.xs().filter(|&x| model.domain().contains(x, y) && ((x > xh + h) == side) && (x - xh).abs() > h) {
            let s = model.f2(x, y).signum();
            if let Some(p) = prev {
                if s != p {
                    changes += 1;
                }
            }
            prev = Some(s);
        }
    }
    changes as f64
}

/// `max‖z(t)‖/‖z₀‖ − DIVERGENCE_FACTOR` along the uncontrolled orbit.
fn divergence(model: &PlanarModel, s0: State) -> f64 {
    let n0 = libm::hypot(s0.x, s0.y).max(1e-12);
    let limit = DIVERGENCE_FACTOR * n0;
    let blowup =
        EventSpec::new(EventKind::Diverged, Direction::Rising, true, move |_, z| libm::hypot(z[0], z[1]) - limit);
    let events = [blowup, event_settled(1e-9 * n0), EventSpec::left_domain()];
    match integrate(model, &null_policy, s0, BOUNDEDNESS_HORIZON, &events, Tolerances::new(1e-8, 1e-10)) {
        Ok(tr) => {
            let peak = tr.samples.iter().map(|s| libm::hypot(s.x, s.y)).fold(0.0, f64::max);
            peak / n0 - DIVERGENCE_FACTOR
        }
        Err(_) => f64::INFINITY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Judgement {
    Holds,
    Violated,
    Inconclusive,
}

pub(crate) fn judge(c: Condition, model: &PlanarModel, v: f64) -> Judgement {
    judge_value(c.requirement(), c.finite_difference(model), v)
}

pub(crate) fn judge_value(req: Requirement, fd: bool, v: f64) -> Judgement {
    use Judgement::*;
    if !v.is_finite() {
        return Violated;
    }
    let slack = if fd { FD_SLACK } else { DIRECT_SLACK };
    let strict = |ok: bool| {
        if fd && v.abs() < INCONCLUSIVE_BELOW {
            Inconclusive
        } else if ok {
            Holds
        } else {
            Violated
        }
    };
    match req {
        Requirement::Positive => strict(v > 0.0),
        Requirement::Negative => strict(v < 0.0),
        Requirement::NonNegative if v >= -slack => Holds,
        Requirement::NonPositive if v <= slack => Holds,
        Requirement::Zero if v.abs() <= ZERO_TOL => Holds,
        _ => Violated,
    }
}
