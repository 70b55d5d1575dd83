//! Hand-built models that violate one sufficient condition each. They exist
//! so the condition checks have something to reject.

use alloc::string::ToString;

use super::{kolmogorov_to_planar, Domain, KolmogorovForm, PlanarModel};
use crate::{Error, Result};

pub const COUNTEREXAMPLE_NAMES: [&str; 5] =
    ["g2_zero", "flat_ratio", "phi4_degenerate", "sign_flipped", "phi3_decreasing"];

const HALF_PLANE: Domain =
    Domain { x_min: -1.0, x_max: f64::INFINITY, y_min: 0.0, y_max: f64::INFINITY, sum_max: None };

pub fn counterexample(name: &str) -> Result<PlanarModel> {
    match name {
        "g2_zero" => Ok(g2_zero()),
        "flat_ratio" => Ok(flat_ratio()),
        "phi4_degenerate" => Ok(phi4_degenerate()),
        "sign_flipped" => Ok(sign_flipped()),
        "phi3_decreasing" => Ok(phi3_decreasing()),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// `example1` with the control removed from the `y` equation, so that
/// `f₂ + g₂ = f₂ > 0` on D₊.
pub fn g2_zero() -> PlanarModel {
    PlanarModel::new(
        "g2_zero",
        HALF_PLANE,
        |x, y| -(x + 1.0) * (x + 1.0) * y,
        |x, y| x * y,
        |x, y| (x + 1.0) * (x + 1.0) * y,
        |_, _| 0.0,
    )
}

/// `f₂/Δ = −x/(x + 1)²` does not depend on `y`.
pub fn flat_ratio() -> PlanarModel {
    PlanarModel::new(
        "flat_ratio",
        HALF_PLANE,
        |x, _| -(x + 1.0) * (x + 1.0),
        |x, y| x * y,
        |x, _| (x + 1.0) * (x + 1.0),
        |x, y| -(x + 1.0) * y,
    )
}

/// SIR rates with `φ₄ = φ₃`, so `g₂` vanishes on the switching line.
pub fn phi4_degenerate() -> PlanarModel {
    let (beta, alpha) = (0.5, 0.1);
    kolmogorov_to_planar(KolmogorovForm::new(
        move |_, y| beta * y,
        move |_, y| beta * y,
        move |x, _| beta * x - alpha,
        move |x, _| beta * x - alpha,
    ))
    .with_name("phi4_degenerate")
    .with_domain(Domain { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0, sum_max: Some(1.0) })
}

/// `example1` with `f₁` of the wrong sign; the Green flux is negative on D₊.
pub fn sign_flipped() -> PlanarModel {
    PlanarModel::new(
        "sign_flipped",
        HALF_PLANE,
        |x, y| (x + 1.0) * (x + 1.0) * y,
        |x, y| x * y,
        |x, y| (x + 1.0) * (x + 1.0) * y,
        |x, y| -(x + 1.0) * y,
    )
}

/// Kolmogorov rates with `φ₃` decreasing in `x`.
pub fn phi3_decreasing() -> PlanarModel {
    kolmogorov_to_planar(KolmogorovForm::new(|_, y| y, |_, y| y, |x, _| 0.2 - x / (1.0 + x), |_, _| 1.0))
        .with_name("phi3_decreasing")
}
