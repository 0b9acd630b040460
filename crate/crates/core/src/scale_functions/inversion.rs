//! Scale functions by numerical inversion of the tilted transform
//! `β ↦ 1/(ψ_Y(β + Φ) − q)`, where `Φ` is the right inverse of `ψ_Y − q`,
//! so that the inverted function `W_Φ(x) = e^{−Φx} W(x)` stays bounded.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::levy_model::LevyModel;
use crate::talbot::{Talbot, CHECK_NODES, NODES};

/// Tolerance on the difference between the two node counts, relative to
/// `1 + |W_Φ(x)|`.
pub const INVERSION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct TalbotScale {
    model: LevyModel,
    delta: f64,
    q: f64,
    root: f64,
    w0: f64,
    w1_0: f64,
    primary: Talbot,
    check: Talbot,
}

impl TalbotScale {
    pub fn new(model: &LevyModel, delta: f64, q: f64, root: f64) -> Self {
        let sigma2 = model.sigma() * model.sigma();
        let (w0, w1_0) = if sigma2 > 0.0 {
            (0.0, 2.0 / sigma2)
        } else if let Some(c) = model.bv_drift() {
            let d = c - delta;
            (1.0 / d, (model.jump_rate() + q) / (d * d) - root / d)
        } else {
            (0.0, f64::INFINITY)
        };
        TalbotScale {
            model: model.clone(),
            delta,
            q,
            root,
            w0,
            w1_0,
            primary: Talbot::new(NODES),
            check: Talbot::new(CHECK_NODES),
        }
    }

    fn kernel(&self, s: Complex64) -> Complex64 {
        let z = s + self.root;
        1.0 / (self.model.laplace_exponent_complex(z) - z * self.delta - self.q)
    }

    pub fn value_at_zero(&self) -> f64 {
        self.w0
    }

    /// `W_Φ(x)`.
    pub fn tilted(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return self.w0;
        }
        self.primary.invert(|s| self.kernel(s), x)
    }

    /// `(W_Φ(x), W_Φ'(x))`.
    pub fn tilted_with_slope(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (if x == 0.0 { self.w0 } else { 0.0 }, if x == 0.0 { self.w1_0 } else { 0.0 });
        }
        let w0 = self.w0;
        let [a, b] = self.primary.invert_many(|s| self.kernel(s), |s, g| [g, s * g - w0], x);
        (a, b)
    }

    /// `(W_Φ, W_Φ', W_Φ'')` at `x`; the last entry needs a Gaussian part.
    pub fn tilted_with_curvature(&self, x: f64) -> (f64, f64, f64) {
        if x <= 0.0 {
            let (a, b) = self.tilted_with_slope(x);
            return (a, b, f64::NAN);
        }
        let (w0, w1) = (self.w0, self.w1_0);
        let [a, b, c] = self.primary.invert_many(
            |s| self.kernel(s),
            |s, g| [g, s * g - w0, s * s * g - s * w0 - w1],
            x,
        );
        (a, b, c)
    }

    /// `e^{−Φx} ∫_0^x W(y) dy`.
    pub fn tilted_integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let root = self.root;
        self.primary.invert(|s| self.kernel(s) / (s + root), x)
    }

    /// Error estimate of [`tilted`](Self::tilted): difference between the
    /// two node counts.
    pub fn error_estimate(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let a = self.primary.invert(|s| self.kernel(s), x);
        let b = self.check.invert(|s| self.kernel(s), x);
        (a - b).abs()
    }

    /// Fails with the inversion diagnostics if the error estimate at `x` is
    /// above tolerance.
    pub fn check_point(&self, x: f64) -> Result<()> {
        let est = self.error_estimate(x);
        let tol = INVERSION_TOLERANCE * (1.0 + self.tilted(x).abs());
        if est > tol || !est.is_finite() {
            return Err(Error::InversionFailure { x, estimate: est, tolerance: tol });
        }
        Ok(())
    }
}

/// Scale function sampled on a uniform mesh of `[0, x_max]`, with linear
/// interpolation between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    pub x_max: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Largest inversion error estimate met while building the table.
    pub max_error_estimate: f64,
}

impl Tabulated {
    pub(crate) fn build(scale: &TalbotScale, x_max: f64, mesh: usize) -> Result<Self> {
        let h = x_max / (mesh - 1) as f64;
        let mut values = Vec::with_capacity(mesh);
        let mut worst = 0.0f64;
        for i in 0..mesh {
            let x = i as f64 * h;
            let tilted = scale.tilted(x);
            if i > 0 {
                let est = scale.error_estimate(x);
                let tol = INVERSION_TOLERANCE * (1.0 + tilted.abs());
                if est > tol || !est.is_finite() {
                    return Err(Error::InversionFailure { x, estimate: est, tolerance: tol });
                }
                worst = worst.max(est * (scale.root * x).exp());
            }
            values.push(tilted * (scale.root * x).exp());
        }
        let first = differences(&values, h);
        let second = differences(&first, h);
        Ok(Tabulated { x_max, h, values, first, second, max_error_estimate: worst })
    }

    fn interp(&self, data: &[f64], x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x > self.x_max * (1.0 + 1e-12) {
            return f64::NAN;
        }
        let pos = x / self.h;
        let i = (pos.floor() as usize).min(data.len() - 2);
        let frac = pos - i as f64;
        data[i] * (1.0 - frac) + data[i + 1] * frac
    }

    /// `W(x)`; zero for `x < 0`, NaN beyond `x_max`.
    pub fn w(&self, x: f64) -> f64 {
        self.interp(&self.values, x)
    }

    /// `W^{(order)}(x)` from centred differences, `order ∈ {1, 2}`.
    pub fn deriv(&self, x: f64, order: u8) -> f64 {
        match order {
            1 => self.interp(&self.first, x),
            _ => self.interp(&self.second, x),
        }
    }

    pub fn mesh(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| i as f64 * self.h)
    }
}

fn differences(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    d
}
