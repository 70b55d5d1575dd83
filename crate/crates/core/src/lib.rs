//! Peak minimization of a planar control-affine system under an L¹ budget.
//!
//! The system is
//!
//! ```text
//! ẋ = f₁(x, y) + g₁(x, y)·u
//! ẏ = f₂(x, y) + g₂(x, y)·u,      u ∈ [0, 1],   ∫ u dt ≤ K
//! ```
//!
//! and the goal is to keep `sup_t y(t)` as low as possible. The crate builds
//! the null-singular-null (NSN) feedback: do nothing until `y` reaches a level
//! `ȳ`, hold `y ≡ ȳ` with the singular control `−f₂/g₂` until the state lands
//! on the switching curve `f₂ = 0`, then release. The level is chosen so that
//! the budget spent on the singular arc equals `K`.
//!
//! Modules:
//! - [`models`]: the planar system, the Kolmogorov subclass and the builtins
//!   (`example1`, `sir`, `monod`, `contois`).
//! - [`integrate`]: Dormand–Prince 5(4) with dense output and event location.
//! - [`synthesis`]: `x_h`, the uncontrolled arc, `x̄(ȳ)`, the budget curve and `ȳ*`.
//! - [`nsn`]: the feedback law, the ridge feedback on `f₂ = 0`, and closed-loop
//!   simulation.
//! - [`verify`]: grid checks of the sufficient conditions and a randomized
//!   optimality oracle.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diff;
mod error;
pub mod integrate;
pub mod models;
pub mod nsn;
pub mod quadrature;
pub mod roots;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
pub use integrate::{integrate, EventKind, EventSpec, Sample, Tolerances, Trajectory};
pub use models::{builtin, KolmogorovForm, PlanarModel, State};
pub use nsn::{simulate_nsn, NsnPolicy, NsnResult, SimOptions};
pub use synthesis::{solve_ystar, Regime, SynthesisReport};
