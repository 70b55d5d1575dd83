//! Bracketed scalar root finding (Brent's inverse-quadratic / secant /
//! bisection hybrid).

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute part of the bracket-width tolerance.
    pub xtol_abs: f64,
    /// Relative part of the bracket-width tolerance, scaled by `max(1, |x|)`.
    pub xtol_rel: f64,
    /// Return as soon as `|f| <= ftol`. Zero disables the early exit.
    pub ftol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { xtol_abs: 0.0, xtol_rel: 1e-12, ftol: 0.0, max_iter: 200 }
    }
}

/// Finds a root of `f` in `[a, b]`, which must bracket a sign change.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: RootOptions) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(Error::RootNotBracketed { a, b });
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..opts.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * (opts.xtol_abs + opts.xtol_rel * b.abs().max(1.0));
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 || fb.abs() <= opts.ftol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::RootNotBracketed { a, b });
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r - libm::cbrt(2.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_root_is_returned_exactly() {
        assert_eq!(brent(|x| x, 0.0, 1.0, RootOptions::default()).unwrap(), 0.0);
    }

    #[test]
    fn same_sign_is_rejected() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default()),
            Err(Error::RootNotBracketed { .. })
        ));
    }

    #[test]
    fn steep_function_converges_in_x() {
        let r = brent(|x| libm::tanh(1e6 * (x - 0.3)), 0.0, 1.0, RootOptions::default()).unwrap();
        assert!((r - 0.3).abs() < 1e-12);
    }
}
