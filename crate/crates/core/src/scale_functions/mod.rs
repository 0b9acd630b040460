//! Scale functions `W^{(q)}`, `Z^{(q)}` of `X` and of `Y = X − δt`.
//!
//! The representation is chosen from the model:
//!
//! | jumps | q | representation |
//! |---|---|---|
//! | hyper-exponential or none | any | partial fractions |
//! | stable, `σ = 0`, drift of `Y` positive | 0 | Mittag-Leffler |
//! | stable, otherwise | any | pointwise Talbot inversion |

mod inversion;
mod rational;
mod stable;

use serde::Serialize;

pub use inversion::{Tabulated, TalbotScale, INVERSION_TOLERANCE};
pub use rational::HyperExpClosedForm;
pub use stable::StableClosedForm;

pub use crate::special::{mittag_leffler, mittag_leffler_deriv};

use crate::error::{Error, Result};
use crate::levy_model::{validate_refraction, JumpSpec, LevyModel, RefractionConfig};
use crate::quadrature;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleMethod {
    PartialFractions,
    MittagLeffler,
    LaplaceInversion,
}

#[derive(Debug, Clone)]
enum Repr {
    Rational(HyperExpClosedForm),
    MittagLeffler(StableClosedForm),
    Inverted(Box<TalbotScale>),
}

/// The `q`-scale function of `X − δt` (`δ = 0` gives `X` itself).
#[derive(Debug, Clone)]
pub struct ScaleFunction {
    q: f64,
    delta: f64,
    root: f64,
    limit: f64,
    w0: f64,
    sigma: f64,
    repr: Repr,
}

impl ScaleFunction {
    pub fn new(model: &LevyModel, delta: f64, q: f64) -> Result<Self> {
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::invalid("q", format!("must be non-negative, got {q}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::invalid("delta", format!("must be non-negative, got {delta}")));
        }
        let slope0 = model.mean() - delta;
        if q == 0.0 && slope0.abs() <= 1e-12 * model.drift().abs().max(1.0) {
            return Err(Error::DegenerateZeroDrift);
        }
        if let Some(c) = model.bv_drift() {
            if delta >= c {
                return Err(Error::HypothesisHViolation { c, delta });
            }
        }
        let root = model.phi_inverse(delta, q);
        let limit = 1.0 / (model.psi_prime(root) - delta);
        let w0 = model.bv_drift().map_or(0.0, |c| 1.0 / (c - delta));
        let repr = match model.jumps() {
            JumpSpec::HyperExponential { .. } | JumpSpec::NoJumps => {
                Repr::Rational(HyperExpClosedForm::new(model, delta, q)?)
            }
            JumpSpec::StableTail { alpha } => {
                let c = model.drift() - delta;
                if q == 0.0 && model.sigma() == 0.0 && c > 0.0 {
                    Repr::MittagLeffler(StableClosedForm { alpha: *alpha, c })
                } else {
                    let t = TalbotScale::new(model, delta, q, root);
                    for x in [1e-3, 0.1, 1.0, 10.0] {
                        t.check_point(x)?;
                    }
                    Repr::Inverted(Box::new(t))
                }
            }
        };
        Ok(ScaleFunction { q, delta, root, limit, w0, sigma: model.sigma(), repr })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// The right inverse `Φ_δ(q)` used for tilting.
    pub fn root(&self) -> f64 {
        self.root
    }

    /// `lim_{x→∞} e^{−Φx} W(x) = 1/(ψ'(Φ) − δ)`.
    pub fn tilted_limit(&self) -> f64 {
        self.limit
    }

    /// `W(0+)`.
    pub fn value_at_zero(&self) -> f64 {
        self.w0
    }

    pub fn method(&self) -> ScaleMethod {
        match self.repr {
            Repr::Rational(_) => ScaleMethod::PartialFractions,
            Repr::MittagLeffler(_) => ScaleMethod::MittagLeffler,
            Repr::Inverted(_) => ScaleMethod::LaplaceInversion,
        }
    }

    pub fn closed_form(&self) -> Option<&HyperExpClosedForm> {
        match &self.repr {
            Repr::Rational(r) => Some(r),
            _ => None,
        }
    }

    /// `W(x)`, zero for `x < 0` and `W(0+)` at `x = 0`.
    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x == 0.0 {
            return self.w0;
        }
        match &self.repr {
            Repr::Rational(r) => r.w(x),
            Repr::MittagLeffler(s) => s.w(x),
            Repr::Inverted(t) => t.tilted(x) * (self.root * x).exp(),
        }
    }

    /// `W'(x)` for `x > 0` (right derivative at 0, zero below).
    pub fn w1(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Rational(r) => r.w1(x),
            Repr::MittagLeffler(s) => s.w1(x),
            Repr::Inverted(_) => self.tilted(1, x) * (self.root * x).exp(),
        }
    }

    pub fn has_second_derivative(&self) -> bool {
        match self.repr {
            Repr::Rational(_) => true,
            Repr::MittagLeffler(_) => false,
            Repr::Inverted(_) => self.sigma > 0.0,
        }
    }

    /// `W''(x)`; NaN when [`has_second_derivative`](Self::has_second_derivative)
    /// is false.
    pub fn w2(&self, x: f64) -> f64 {
        if !self.has_second_derivative() {
            return f64::NAN;
        }
        if x < 0.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Rational(r) => r.w2(x),
            _ => self.tilted(2, x) * (self.root * x).exp(),
        }
    }

    /// `e^{−Φx} W^{(k)}(x)` for `k ∈ {0, 1, 2}`.
    pub fn tilted(&self, k: i32, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let p = self.root;
        match &self.repr {
            Repr::Rational(r) => r.tilted(k, x),
            Repr::MittagLeffler(s) => match k {
                0 => s.w(x),
                1 => s.w1(x),
                _ => f64::NAN,
            },
            Repr::Inverted(t) => match k {
                0 => t.tilted(x),
                1 => {
                    let (a, b) = t.tilted_with_slope(x);
                    p * a + b
                }
                _ => {
                    if self.sigma == 0.0 {
                        return f64::NAN;
                    }
                    let (a, b, c) = t.tilted_with_curvature(x);
                    p * p * a + 2.0 * p * b + c
                }
            },
        }
    }

    /// `lim_{x→∞} e^{−Φx} W^{(k)}(x) = Φ^k W_Φ(∞)`.
    pub fn tilted_limit_deriv(&self, k: i32) -> f64 {
        self.root.powi(k) * self.limit
    }

    /// `Φ^k W_Φ(∞) − e^{−Φy} W^{(k)}(y)`, equal to the limit for `y < 0`.
    pub fn tilted_deficit(&self, k: i32, y: f64) -> f64 {
        match &self.repr {
            Repr::Rational(r) => r.deficit(k, y),
            _ if y < 0.0 => self.tilted_limit_deriv(k),
            _ => self.tilted_limit_deriv(k) - self.tilted(k, y),
        }
    }

    /// Length scale on which the tilted functions settle to their limits.
    pub fn decay_scale(&self) -> f64 {
        match &self.repr {
            Repr::Rational(r) if r.roots.len() > 1 => 1.0 / (r.roots[0] - r.roots[1]),
            _ => 1.0,
        }
    }

    /// `∫_0^x W(y) dy`.
    pub fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Rational(r) => r.integral(x),
            Repr::MittagLeffler(s) => quadrature::integrate(|y| s.w(y), 0.0, x, 1e-13)
                .map(|e| e.value)
                .unwrap_or(f64::NAN),
            Repr::Inverted(t) => t.tilted_integral(x) * (self.root * x).exp(),
        }
    }

    /// `Z(x) = 1 + q ∫_0^x W`.
    pub fn z(&self, x: f64) -> f64 {
        if x <= 0.0 || self.q == 0.0 {
            return 1.0;
        }
        1.0 + self.q * self.integral(x)
    }

    /// Checks the inversion error estimate at `x` (a no-op for closed forms).
    pub fn diagnose(&self, x: f64) -> Result<()> {
        match &self.repr {
            Repr::Inverted(t) => t.check_point(x),
            _ => Ok(()),
        }
    }
}

/// `W^{(q)}(x)` of `X`.
pub fn scale_w(model: &LevyModel, q: f64, x: f64) -> Result<f64> {
    let sf = ScaleFunction::new(model, 0.0, q)?;
    sf.diagnose(x)?;
    Ok(sf.w(x))
}

/// `Z^{(q)}(x)` of `X`.
pub fn scale_z(model: &LevyModel, q: f64, x: f64) -> Result<f64> {
    let sf = ScaleFunction::new(model, 0.0, q)?;
    sf.diagnose(x)?;
    Ok(sf.z(x))
}

/// First or second derivative of `W^{(q)}` at `x > 0`.
pub fn scale_w_deriv(model: &LevyModel, q: f64, x: f64, order: u8) -> Result<f64> {
    let sf = ScaleFunction::new(model, 0.0, q)?;
    deriv(&sf, x, order)
}

fn deriv(sf: &ScaleFunction, x: f64, order: u8) -> Result<f64> {
    sf.diagnose(x)?;
    match order {
        1 => Ok(sf.w1(x)),
        2 if sf.has_second_derivative() => Ok(sf.w2(x)),
        2 => Err(Error::SecondDerivativeUnavailable),
        _ => Err(Error::invalid("order", "must be 1 or 2")),
    }
}

/// `𝕎^{(q)}(x)`, the scale function of `Y = X − δt`.
pub fn refracted_scale(model: &LevyModel, refraction: &RefractionConfig, q: f64, x: f64) -> Result<f64> {
    validate_refraction(model, refraction)?;
    let sf = ScaleFunction::new(model, refraction.delta, q)?;
    sf.diagnose(x)?;
    Ok(sf.w(x))
}

/// Derivative of `𝕎^{(q)}` of order 1 or 2.
pub fn refracted_scale_deriv(
    model: &LevyModel,
    refraction: &RefractionConfig,
    q: f64,
    x: f64,
    order: u8,
) -> Result<f64> {
    validate_refraction(model, refraction)?;
    let sf = ScaleFunction::new(model, refraction.delta, q)?;
    deriv(&sf, x, order)
}

/// Roots and coefficients of the partial-fraction form of the scale function
/// of `X − δt`.
pub fn hyperexp_partial_fractions(model: &LevyModel, delta: f64, q: f64) -> Result<HyperExpClosedForm> {
    if !(q >= 0.0) {
        return Err(Error::invalid("q", "must be non-negative"));
    }
    HyperExpClosedForm::new(model, delta, q)
}

/// Tabulates the scale function of `X − δt` on `mesh` equally spaced points
/// of `[0, x_max]` by Talbot inversion of the tilted transform.
pub fn invert_laplace_scale(
    model: &LevyModel,
    delta: f64,
    q: f64,
    x_max: f64,
    mesh: usize,
) -> Result<Tabulated> {
    if !(x_max > 0.0 && x_max.is_finite()) {
        return Err(Error::invalid("x_max", "must be positive"));
    }
    if mesh < 64 {
        return Err(Error::invalid("mesh", "needs at least 64 points"));
    }
    if !(q >= 0.0) {
        return Err(Error::invalid("q", "must be non-negative"));
    }
    let slope0 = model.mean() - delta;
    if q == 0.0 && slope0.abs() <= 1e-12 * model.drift().abs().max(1.0) {
        return Err(Error::DegenerateZeroDrift);
    }
    let root = model.phi_inverse(delta, q);
    let scale = TalbotScale::new(model, delta, q, root);
    Tabulated::build(&scale, x_max, mesh)
}
