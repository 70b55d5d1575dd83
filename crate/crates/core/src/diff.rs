//! Central finite differences.

/// Relative step used when no explicit step is given.
pub const REL_STEP: f64 = 1e-6;

/// Step scaled to the magnitude of the coordinate, never below `REL_STEP`.
pub fn scaled_step(coord: f64) -> f64 {
    REL_STEP * coord.abs().max(1.0)
}

/// `∂f/∂x` at `(x, y)` with step `h`.
pub fn partial_x<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    (f(x + h, y) - f(x - h, y)) / (2.0 * h)
}

/// `∂f/∂y` at `(x, y)` with step `h`.
pub fn partial_y<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, h: f64) -> f64 {
    (f(x, y + h) - f(x, y - h)) / (2.0 * h)
}

/// Gradient with independent steps per axis.
pub fn gradient<F: Fn(f64, f64) -> f64>(f: F, x: f64, y: f64, hx: f64, hy: f64) -> (f64, f64) {
    (partial_x(&f, x, y, hx), partial_y(&f, x, y, hy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact_up_to_rounding() {
        let f = |x: f64, y: f64| 3.0 * x * x + x * y - 2.0 * y * y;
        let (gx, gy) = gradient(f, 1.5, -0.5, 1e-3, 1e-3);
        assert!((gx - (9.0 - 0.5)).abs() < 1e-9);
        assert!((gy - (1.5 + 2.0)).abs() < 1e-9);
    }

    #[test]
    fn step_scales_with_magnitude() {
        assert_eq!(scaled_step(0.0), REL_STEP);
        assert_eq!(scaled_step(-200.0), 200.0 * REL_STEP);
    }
}
