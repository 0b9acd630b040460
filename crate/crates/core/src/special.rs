//! Mittag-Leffler function `E_β(z) = Σ z^n / Γ(βn + 1)` on the negative
//! real axis, `0 < β < 1`.
//!
//! Small arguments use the power series. Beyond `|z|^{1/β} = 6` the series
//! cancels catastrophically and the positive integral representation
//!
//! ```text
//! E_β(−x) = (x sin βπ / βπ) ∫_0^∞ e^{−v^{1/β}} / (v² + 2xv cos βπ + x²) dv
//! ```
//!
//! is integrated instead.

use std::f64::consts::PI;

use crate::quadrature;

const SERIES_SWITCH: f64 = 6.0;

fn use_series(beta: f64, z: f64) -> bool {
    z.abs().powf(1.0 / beta) <= SERIES_SWITCH
}

/// `E_β(z)` for `0 < β < 1`, `z ≤ 0`, absolute accuracy about `1e-12`.
/// Positive `z` is only supported inside the series radius (NaN beyond).
pub fn mittag_leffler(beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    if use_series(beta, z) {
        return series(beta, z, 0);
    }
    if z > 0.0 {
        return f64::NAN;
    }
    let x = -z;
    let (s, c) = (beta * PI).sin_cos();
    let f = |v: f64| (-v.powf(1.0 / beta)).exp() / (v * v + 2.0 * x * v * c + x * x);
    x * s / (beta * PI) * integral(beta, x, c, f)
}

/// `E'_β(z) = d/dz E_β(z)` on the same domain as [`mittag_leffler`].
pub fn mittag_leffler_deriv(beta: f64, z: f64) -> f64 {
    if use_series(beta, z) {
        return series(beta, z, 1);
    }
    if z > 0.0 {
        return f64::NAN;
    }
    let x = -z;
    let (s, c) = (beta * PI).sin_cos();
    let f = |v: f64| {
        let d = v * v + 2.0 * x * v * c + x * x;
        (-v.powf(1.0 / beta)).exp() * (x * x - v * v) / (d * d)
    };
    s / (beta * PI) * integral(beta, x, c, f)
}

fn integral<F: Fn(f64) -> f64>(beta: f64, x: f64, cos_bp: f64, f: F) -> f64 {
    let upper = 40f64.powf(beta);
    let peak = -x * cos_bp;
    quadrature::integrate_with_breaks(f, 0.0, upper, &[peak, 1.0], 1e-15)
        .map(|e| e.value)
        .unwrap_or(f64::NAN)
}

/// Series for `E_β` (`order = 0`) or its first derivative (`order = 1`).
fn series(beta: f64, z: f64, order: u32) -> f64 {
    let lz = z.abs().ln();
    let neg = z < 0.0;
    let mut sum = if order == 0 { 1.0 } else { 0.0 };
    let mut peaked = false;
    let mut prev = f64::INFINITY;
    for n in 1..400 {
        let nf = n as f64;
        let (power, coeff) = if order == 0 { (nf, 1.0) } else { (nf - 1.0, nf) };
        let mag = if power == 0.0 {
            coeff * (-libm::lgamma(beta * nf + 1.0)).exp()
        } else {
            coeff * (power * lz - libm::lgamma(beta * nf + 1.0)).exp()
        };
        let odd = power as u64 % 2 == 1;
        sum += if neg && odd { -mag } else { mag };
        if mag < prev {
            peaked = true;
        }
        prev = mag;
        if peaked && mag < 1e-17 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}
