use alloc::string::{String, ToString};

use super::{Domain, KolmogorovForm, Params, PlanarModel};
use crate::{Error, Result};

pub const BUILTIN_NAMES: [&str; 4] = ["example1", "sir", "monod", "contois"];

struct ParamReader<'a> {
    model: &'static str,
    params: &'a Params,
}

impl ParamReader<'_> {
    fn required(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::MissingParam { model: self.model.to_string(), param: key.to_string() })
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.required(key)?;
        positive(key, v)
    }

    fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        match self.params.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::UnknownParam { model: self.model.to_string(), param: k.clone() }),
            None => Ok(()),
        }
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParam { param: String::from(key), value: v, reason: "must be positive" })
    }
}

/// Builds one of the builtin models.
///
/// | name       | params                       | domain                    |
/// |------------|------------------------------|---------------------------|
/// | `example1` | none                         | `x > −1, y > 0`           |
/// | `sir`      | `beta`, `alpha`              | `x, y ≥ 0, x + y ≤ 1`     |
/// | `monod`    | `m`, `Y`, optional `K` (= 1) | positive quadrant         |
/// | `contois`  | `m`, `Y`                     | positive quadrant         |
///
/// The mortality `m` only has to be positive here; `m ≥ 1` builds a model
/// without an outbreak region, which the condition checks then reject.
pub fn builtin(name: &str, params: &Params) -> Result<PlanarModel> {
    match name {
        "example1" => {
            ParamReader { model: "example1", params }.reject_unknown(&[])?;
            Ok(example1())
        }
        "sir" => {
            let r = ParamReader { model: "sir", params };
            r.reject_unknown(&["beta", "alpha"])?;
            Ok(sir(r.positive("beta")?, r.positive("alpha")?))
        }
        "monod" => {
            let r = ParamReader { model: "monod", params };
            r.reject_unknown(&["m", "Y", "K"])?;
            let k = match params.get("K") {
                Some(&k) => positive("K", k)?,
                None => 1.0,
            };
            Ok(monod(r.positive("m")?, r.positive("Y")?, k))
        }
        "contois" => {
            let r = ParamReader { model: "contois", params };
            r.reject_unknown(&["m", "Y"])?;
            Ok(contois(r.positive("m")?, r.positive("Y")?))
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

fn params_of(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

fn example1() -> PlanarModel {
    let domain = Domain { x_min: -1.0, x_max: f64::INFINITY, y_min: 0.0, y_max: f64::INFINITY, sum_max: None };
    PlanarModel::new(
        "example1",
        domain,
        |x, y| -(x + 1.0) * (x + 1.0) * y,
        |x, y| x * y,
        |x, y| (x + 1.0) * (x + 1.0) * y,
        |x, y| -(x + 1.0) * y,
    )
    .with_grad_f2(|x, y| (y, x))
    .with_green_flux(|x, y| x / ((x + 1.0) * (x + 1.0) * y * y))
}

fn sir(beta: f64, alpha: f64) -> PlanarModel {
    let domain = Domain { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0, sum_max: Some(1.0) };
    PlanarModel::new(
        "sir",
        domain,
        move |x, y| -beta * x * y,
        move |x, y| beta * x * y - alpha * y,
        move |x, y| beta * x * y,
        move |x, y| -beta * x * y,
    )
    .with_params(params_of(&[("beta", beta), ("alpha", alpha)]))
    .with_kolmogorov(KolmogorovForm::new(
        move |_, y| beta * y,
        move |_, y| beta * y,
        move |x, _| beta * x - alpha,
        move |x, _| beta * x,
    ))
    .with_grad_f2(move |x, y| (beta * y, beta * x - alpha))
    .with_green_flux(move |x, y| (beta * x - alpha) / (alpha * beta * x * y * y))
}

fn monod(m: f64, yield_: f64, k: f64) -> PlanarModel {
    let mu = move |x: f64| x / (k + x);
    PlanarModel::new(
        "monod",
        Domain::POSITIVE_QUADRANT,
        move |x, y| -mu(x) * y / yield_,
        move |x, y| mu(x) * y - m * y,
        move |x, y| mu(x) * y / yield_,
        move |x, y| -mu(x) * y,
    )
    .with_params(params_of(&[("m", m), ("Y", yield_), ("K", k)]))
    .with_kolmogorov(KolmogorovForm::new(
        move |x, y| y / (yield_ * (k + x)),
        move |x, y| y / (yield_ * (k + x)),
        move |x, _| mu(x) - m,
        move |x, _| mu(x),
    ))
    .with_grad_f2(move |x, y| (k * y / ((k + x) * (k + x)), mu(x) - m))
    .with_green_flux(move |x, y| (mu(x) - m) * yield_ * (k + x) / (m * x * y * y))
}

fn contois(m: f64, yield_: f64) -> PlanarModel {
    let mu = |x: f64, y: f64| x / (x + y);
    PlanarModel::new(
        "contois",
        Domain::POSITIVE_QUADRANT,
        move |x, y| -mu(x, y) * y / yield_,
        move |x, y| mu(x, y) * y - m * y,
        move |x, y| mu(x, y) * y / yield_,
        move |x, y| -mu(x, y) * y,
    )
    .with_params(params_of(&[("m", m), ("Y", yield_)]))
    .with_kolmogorov(KolmogorovForm::new(
        move |x, y| y / (yield_ * (x + y)),
        move |x, y| y / (yield_ * (x + y)),
        move |x, y| mu(x, y) - m,
        mu,
    ))
    .with_grad_f2(move |x, y| {
        let s = (x + y) * (x + y);
        (y * y / s, x * x / s - m)
    })
    .with_green_flux(move |_, y| yield_ * (1.0 - m) / (m * y * y))
}
