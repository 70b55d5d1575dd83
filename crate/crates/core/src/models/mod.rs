//! Planar control-affine systems `ẋ = f₁ + g₁u`, `ẏ = f₂ + g₂u`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

mod builtins;
pub mod counterexamples;

pub use builtins::{builtin, BUILTIN_NAMES};

/// Membership tolerance absorbing integrator overshoot at domain edges.
pub const DOMAIN_TOL: f64 = 1e-9;

/// A scalar field on the plane.
pub type ScalarField = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A vector field on the plane, used for exact gradients.
pub type GradientField = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;

/// Named scalar parameters of a model.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
}

impl State {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Axis-aligned box, optionally cut by `x + y <= sum_max` (the SIR simplex).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub sum_max: Option<f64>,
}

impl Domain {
    pub const POSITIVE_QUADRANT: Domain =
        Domain { x_min: 0.0, x_max: f64::INFINITY, y_min: 0.0, y_max: f64::INFINITY, sum_max: None };

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x.is_finite()
            && y.is_finite()
            && x >= self.x_min - DOMAIN_TOL
            && x <= self.x_max + DOMAIN_TOL
            && y >= self.y_min - DOMAIN_TOL
            && y <= self.y_max + DOMAIN_TOL
            && self.sum_max.is_none_or(|s| x + y <= s + DOMAIN_TOL)
    }

    /// Largest admissible abscissa on the line at height `y`.
    pub fn x_upper(&self, y: f64) -> f64 {
        match self.sum_max {
            Some(s) => self.x_max.min(s - y),
            None => self.x_max,
        }
    }
}

/// Per-capita rates of a Kolmogorov system
/// `ẋ = −(φ₁ − φ₂u)x`, `ẏ = (φ₃ − φ₄u)y`.
#[derive(Clone)]
pub struct KolmogorovForm {
    pub phi1: ScalarField,
    pub phi2: ScalarField,
    pub phi3: ScalarField,
    pub phi4: ScalarField,
}

impl KolmogorovForm {
    pub fn new<A, B, C, D>(phi1: A, phi2: B, phi3: C, phi4: D) -> Self
    where
        A: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { phi1: Arc::new(phi1), phi2: Arc::new(phi2), phi3: Arc::new(phi3), phi4: Arc::new(phi4) }
    }

    pub fn phi(&self, i: usize, x: f64, y: f64) -> f64 {
        match i {
            1 => (self.phi1)(x, y),
            2 => (self.phi2)(x, y),
            3 => (self.phi3)(x, y),
            4 => (self.phi4)(x, y),
            _ => panic!("phi index {i} out of range 1..=4"),
        }
    }

    /// `δ = φ₃φ₂ − φ₁φ₄`.
    pub fn delta(&self, x: f64, y: f64) -> f64 {
        (self.phi3)(x, y) * (self.phi2)(x, y) - (self.phi1)(x, y) * (self.phi4)(x, y)
    }
}

impl fmt::Debug for KolmogorovForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("KolmogorovForm { .. }")
    }
}

/// A planar control-affine model. Cheap to clone; all fields are shared.
#[derive(Clone)]
pub struct PlanarModel {
    name: String,
    params: Params,
    domain: Domain,
    f1: ScalarField,
    f2: ScalarField,
    g1: ScalarField,
    g2: ScalarField,
    kolmogorov: Option<KolmogorovForm>,
    grad_f2: Option<GradientField>,
    green_flux: Option<ScalarField>,
}

impl PlanarModel {
    pub fn new<A, B, C, D>(name: impl Into<String>, domain: Domain, f1: A, f2: B, g1: C, g2: D) -> Self
    where
        A: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params: Params::new(),
            domain,
            f1: Arc::new(f1),
            f2: Arc::new(f2),
            g1: Arc::new(g1),
            g2: Arc::new(g2),
            kolmogorov: None,
            grad_f2: None,
            green_flux: None,
        }
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_kolmogorov(mut self, k: KolmogorovForm) -> Self {
        self.kolmogorov = Some(k);
        self
    }

    /// Exact `∇f₂`, used instead of finite differences where available.
    pub fn with_grad_f2<G>(mut self, g: G) -> Self
    where
        G: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        self.grad_f2 = Some(Arc::new(g));
        self
    }

    /// Exact `∂_y(f₂/Δ) + ∂_x(f₁/Δ)`.
    pub fn with_green_flux<G>(mut self, g: G) -> Self
    where
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.green_flux = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn kolmogorov(&self) -> Option<&KolmogorovForm> {
        self.kolmogorov.as_ref()
    }

    pub fn exact_grad_f2(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        self.grad_f2.as_ref().map(|g| g(x, y))
    }

    pub fn exact_green_flux(&self, x: f64, y: f64) -> Option<f64> {
        self.green_flux.as_ref().map(|g| g(x, y))
    }

    #[inline]
    pub fn f1(&self, x: f64, y: f64) -> f64 {
        (self.f1)(x, y)
    }

    #[inline]
    pub fn f2(&self, x: f64, y: f64) -> f64 {
        (self.f2)(x, y)
    }

    #[inline]
    pub fn g1(&self, x: f64, y: f64) -> f64 {
        (self.g1)(x, y)
    }

    #[inline]
    pub fn g2(&self, x: f64, y: f64) -> f64 {
        (self.g2)(x, y)
    }

    /// `Δ = f₂g₁ − f₁g₂` without the domain check.
    #[inline]
    pub fn delta_unchecked(&self, x: f64, y: f64) -> f64 {
        self.f2(x, y) * self.g1(x, y) - self.f1(x, y) * self.g2(x, y)
    }

    /// Right-hand side without domain or control checks.
    #[inline]
    pub fn rhs(&self, x: f64, y: f64, u: f64) -> (f64, f64) {
        (self.f1(x, y) + self.g1(x, y) * u, self.f2(x, y) + self.g2(x, y) * u)
    }

    pub fn contains(&self, s: State) -> bool {
        self.domain.contains(s.x, s.y)
    }

    pub(crate) fn check_domain(&self, s: State) -> Result<()> {
        if self.contains(s) {
            Ok(())
        } else {
            Err(Error::Domain { x: s.x, y: s.y })
        }
    }
}

impl fmt::Debug for PlanarModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PlanarModel")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("kolmogorov", &self.kolmogorov.is_some())
            .finish_non_exhaustive()
    }
}

/// `(f₁ + g₁u, f₂ + g₂u)` at `s`.
pub fn vector_field(model: &PlanarModel, s: State, u: f64) -> Result<(f64, f64)> {
    model.check_domain(s)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidControl { u });
    }
    Ok(model.rhs(s.x, s.y, u))
}

/// `Δ = f₂g₁ − f₁g₂` at `s`.
pub fn delta(model: &PlanarModel, s: State) -> Result<f64> {
    model.check_domain(s)?;
    Ok(model.delta_unchecked(s.x, s.y))
}

/// Expands a Kolmogorov form into direct fields `f₁ = −φ₁x`, `g₁ = φ₂x`,
/// `f₂ = φ₃y`, `g₂ = −φ₄y` on the positive quadrant.
pub fn kolmogorov_to_planar(k: KolmogorovForm) -> PlanarModel {
    let (p1, p2, p3, p4) = (k.phi1.clone(), k.phi2.clone(), k.phi3.clone(), k.phi4.clone());
    PlanarModel::new(
        "kolmogorov",
        Domain::POSITIVE_QUADRANT,
        move |x, y| -p1(x, y) * x,
        move |x, y| p3(x, y) * y,
        move |x, y| p2(x, y) * x,
        move |x, y| -p4(x, y) * y,
    )
    .with_kolmogorov(k)
}
