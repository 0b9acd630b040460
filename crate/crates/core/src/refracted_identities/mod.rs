//! Fluctuation identities of the refracted process
//! `U_t = X_t − δ ∫_0^t 1{U_s > b} ds`.
//!
//! Everything is expressed through `W = W^{(q)}` (scale function of `X`) and
//! `𝕎 = 𝕎^{(q)}` (scale function of `Y = X − δt`). The recurring building
//! blocks are
//!
//! ```text
//! ω(x)   = W(x) + δ 1{x ≥ b} ∫_b^x 𝕎(x − y) W'(y) dy
//! ζ(x)   = Z(x) + δ q 1{x ≥ b} ∫_b^x 𝕎(x − y) W(y) dy
//! ē(x)   = e^{Φx} + δ Φ 1{x ≥ b} ∫_b^x e^{Φz} 𝕎(x − z) dz
//! ```
//!
//! Semi-infinite integrals `∫_s^∞ e^{−φy} W^{(k)}(y) dy` are rewritten with the
//! tilted functions `g_k(y) = e^{−Φy} W^{(k)}(y) → L_k`, so that only the
//! decaying deficit `L_k − g_k` is ever integrated.

mod classical;
mod key_identity;
mod resolvent;

use serde::{Deserialize, Serialize};

pub use classical::{classical_overshoot, classical_resolvent, classical_two_sided, ClassicalResolvent};
pub use key_identity::{key_identity_sides, verify_key_identity};
pub use resolvent::{
    resolvent_free, resolvent_killed_above, resolvent_killed_below, resolvent_two_sided, ResolventDensity,
    ResolventKind,
};

use crate::error::{Error, Result};
use crate::levy_model::{validate_refraction, LevyModel, RefractionConfig};
use crate::quadrature::{self, Estimate};
use crate::scale_functions::ScaleFunction;

/// Absolute target of every quadrature inside an identity.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Discount rate standing in for `q = 0` where only the `q > 0` formula is
/// available.
pub const NUMERIC_LIMIT_Q: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    NumericLimit,
}

/// Value of an identity with its accumulated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResult {
    pub value: f64,
    pub quadrature_error: f64,
    pub method: Method,
}

impl IdentityResult {
    pub fn exact(value: f64) -> Self {
        IdentityResult { value, quadrature_error: 0.0, method: Method::ClosedForm }
    }

    pub(crate) fn from_estimate(e: Estimate) -> Self {
        let method = if e.error > 0.0 { Method::Quadrature } else { Method::ClosedForm };
        IdentityResult { value: e.value, quadrature_error: e.error, method }
    }

    pub(crate) fn as_limit(self) -> Self {
        IdentityResult { method: Method::NumericLimit, ..self }
    }
}

/// Start level `x`, upper level `a`, discount `q` and refraction pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExitQuery {
    pub x: f64,
    pub a: f64,
    pub q: f64,
    pub refraction: RefractionConfig,
}

impl ExitQuery {
    pub fn new(x: f64, a: f64, q: f64, refraction: RefractionConfig) -> Self {
        ExitQuery { x, a, q, refraction }
    }
}

/// Scale functions of `X` and `Y` for one `(δ, b, q)`, with the integrals
/// shared by all identities.
#[derive(Debug, Clone)]
pub struct Refracted {
    delta: f64,
    b: f64,
    q: f64,
    mean: f64,
    sigma: f64,
    w: ScaleFunction,
    ww: ScaleFunction,
    eps: f64,
    tol: f64,
}

impl Refracted {
    pub fn new(model: &LevyModel, refraction: &RefractionConfig, q: f64) -> Result<Self> {
        validate_refraction(model, refraction)?;
        if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::invalid("q", format!("must be non-negative, got {q}")));
        }
        let w = ScaleFunction::new(model, 0.0, q)?;
        let ww = ScaleFunction::new(model, refraction.delta, q)?;
        Ok(Refracted {
            delta: refraction.delta,
            b: refraction.b,
            q,
            mean: model.mean(),
            sigma: model.sigma(),
            eps: model.phi_gap(refraction.delta, q),
            w,
            ww,
            tol: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `W^{(q)}` of `X`.
    pub fn scale(&self) -> &ScaleFunction {
        &self.w
    }

    /// `𝕎^{(q)}` of `Y`.
    pub fn refracted_scale(&self) -> &ScaleFunction {
        &self.ww
    }

    /// `Φ(q)`.
    pub fn big_phi(&self) -> f64 {
        self.w.root()
    }

    /// `φ(q)`.
    pub fn small_phi(&self) -> f64 {
        self.ww.root()
    }

    /// `φ(q) − Φ(q)`.
    pub fn gap(&self) -> f64 {
        self.eps
    }

    pub(crate) fn integrate<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> Result<Estimate> {
        if hi <= lo {
            return Ok(Estimate::exact(0.0));
        }
        let e = quadrature::integrate(f, lo, hi, self.tol)?;
        Ok(Estimate::new(e.value, e.error.max(f64::MIN_POSITIVE)))
    }

    /// `ω(x)`.
    pub fn omega(&self, x: f64) -> Result<Estimate> {
        self.omega_from(x, self.b)
    }

    /// `ω(x)` with the refraction level replaced by `level`.
    pub fn omega_from(&self, x: f64, level: f64) -> Result<Estimate> {
        let base = Estimate::exact(self.w.w(x));
        if x <= level {
            return Ok(base);
        }
        let i = self.integrate(|y| self.ww.w(x - y) * self.w.w1(y), level, x)?;
        Ok(base + i * self.delta)
    }

    /// `ζ(x)`.
    pub fn zeta(&self, x: f64) -> Result<Estimate> {
        let base = Estimate::exact(self.w.z(x));
        if x <= self.b || self.q == 0.0 {
            return Ok(base);
        }
        let i = self.integrate(|y| self.ww.w(x - y) * self.w.w(y), self.b, x)?;
        Ok(base + i * (self.delta * self.q))
    }

    /// `e^{−Φa} ē(x)`.
    pub fn ebar_scaled(&self, x: f64, a: f64) -> Result<Estimate> {
        let p = self.big_phi();
        let base = Estimate::exact((p * (x - a)).exp());
        if x <= self.b || p == 0.0 {
            return Ok(base);
        }
        let i = self.integrate(|z| (p * (z - a)).exp() * self.ww.w(x - z), self.b, x)?;
        Ok(base + i * (self.delta * p))
    }

    /// `W(x − y) + δ 1{x ≥ b} ∫_b^x 𝕎(x − z) W'(z − y) dz` for `y < b`.
    pub fn omega_shift(&self, x: f64, y: f64) -> Result<Estimate> {
        let base = Estimate::exact(self.w.w(x - y));
        if x <= self.b {
            return Ok(base);
        }
        let i = self.integrate(|z| self.ww.w(x - z) * self.w.w1(z - y), self.b, x)?;
        Ok(base + i * self.delta)
    }

    /// `e^{−Φy} Δ(x, y)` with
    /// `Δ(x, y) = e^{Φx} d_0(x − y) + δ 1{x ≥ b} ∫_b^x 𝕎(x − z) e^{Φz} d_1(z − y) dz`
    /// and `d_k = L_k − g_k`; it equals `L_0 ē(x) e^{−Φy}` minus
    /// [`omega_shift`](Self::omega_shift) without the cancellation for `y ≪ 0`.
    pub fn shifted_deficit(&self, x: f64, y: f64) -> Result<Estimate> {
        let p = self.big_phi();
        let scaled = |s: f64, k: i32| {
            let d = self.w.tilted_deficit(k, s);
            if d == 0.0 {
                0.0
            } else {
                (p * s).exp() * d
            }
        };
        let base = Estimate::exact(scaled(x - y, 0));
        if x <= self.b {
            return Ok(base);
        }
        let i = self.integrate(|z| self.ww.w(x - z) * scaled(z - y, 1), self.b, x)?;
        Ok(base + i * self.delta)
    }

    /// `R_k(s) = ∫_0^∞ e^{−εu} d_k(u + s) du`, `s ≥ 0`.
    pub fn deficit_transform(&self, k: i32, s: f64) -> Result<Estimate> {
        if let Some(r) = self.w.closed_form() {
            return Ok(Estimate::exact(r.deficit_transform(k, s, self.eps)));
        }
        let eps = self.eps;
        let e = quadrature::integrate_to_infinity(
            |u| (-eps * u).exp() * self.w.tilted_deficit(k, u + s),
            0.0,
            self.w.decay_scale(),
            self.tol,
        )?;
        Ok(Estimate::new(e.value, e.error.max(f64::MIN_POSITIVE)))
    }

    /// `ε e^{εs} ∫_s^∞ e^{−φy} W^{(k)}(y) dy · e^{Φs}`, i.e. `L_k − ε R_k(s)`.
    /// Ratios of these are ratios of the semi-infinite integrals.
    pub fn tail_scaled(&self, k: i32, s: f64) -> Result<Estimate> {
        let r = self.deficit_transform(k, s)?;
        Ok(Estimate::exact(self.w.tilted_limit_deriv(k)) - r * self.eps)
    }

    pub fn two_sided_up(&self, x: f64, a: f64) -> Result<IdentityResult> {
        if x == a {
            return Ok(IdentityResult::exact(1.0));
        }
        let r = self.omega(x)?.div(self.omega(a)?);
        Ok(IdentityResult::from_estimate(r))
    }

    pub fn two_sided_down(&self, x: f64, a: f64) -> Result<IdentityResult> {
        let ratio = if x == a { Estimate::exact(1.0) } else { self.omega(x)?.div(self.omega(a)?) };
        let r = self.zeta(x)? - self.zeta(a)?.mul(ratio);
        Ok(IdentityResult::from_estimate(r))
    }

    pub fn one_sided_up(&self, x: f64, a: f64) -> Result<IdentityResult> {
        if x == a {
            return Ok(IdentityResult::exact(1.0));
        }
        let r = self.ebar_scaled(x, a)?.div(self.ebar_scaled(a, a)?);
        Ok(IdentityResult::from_estimate(r))
    }

    pub fn one_sided_down(&self, x: f64) -> Result<IdentityResult> {
        if self.q <= 0.0 {
            return Err(Error::NonPositiveQ { q: self.q });
        }
        let ratio = self.tail_scaled(0, self.b)?.div(self.tail_scaled(1, self.b)?);
        let r = self.zeta(x)? - ratio.mul(self.omega(x)?) * self.q;
        Ok(IdentityResult::from_estimate(r))
    }

    /// Ruin probability; needs a context built with `q = 0`.
    pub fn ruin_probability(&self, x: f64) -> Result<IdentityResult> {
        if self.q != 0.0 {
            return Err(Error::invalid("q", "the ruin probability is the q = 0 identity"));
        }
        if self.delta >= self.mean {
            return Err(Error::DriftNotDominating { mean: self.mean, delta: self.delta });
        }
        let k = (self.mean - self.delta) / (1.0 - self.delta * self.w.w(self.b));
        let r = -(self.omega(x)? * k) + 1.0;
        Ok(IdentityResult::from_estimate(r))
    }

    /// Creeping transform; zero without a Gaussian part.
    pub fn creeping(&self, x: f64) -> Result<IdentityResult> {
        if self.sigma == 0.0 {
            return Ok(IdentityResult::exact(0.0));
        }
        if self.q <= 0.0 {
            return Err(Error::NonPositiveQ { q: self.q });
        }
        if !self.w.has_second_derivative() {
            return Err(Error::SecondDerivativeUnavailable);
        }
        let mut inner = Estimate::exact(self.w.w1(x));
        if x > self.b {
            let i = self.integrate(|z| self.ww.w(x - z) * self.w.w2(z), self.b, x)?;
            inner = inner + i * self.delta;
        }
        let ratio = self.tail_scaled(2, self.b)?.div(self.tail_scaled(1, self.b)?);
        let r = (inner - ratio.mul(self.omega(x)?)) * (0.5 * self.sigma * self.sigma);
        Ok(IdentityResult::from_estimate(r))
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

fn check_window(x: f64, a: f64, b: f64, lower_bound: bool) -> Result<()> {
    finite("x", x)?;
    finite("a", a)?;
    if lower_bound && x < 0.0 {
        return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
    }
    if x > a {
        return Err(Error::invalid("x", format!("must not exceed a = {a}, got {x}")));
    }
    if b > a {
        return Err(Error::invalid("b", format!("must not exceed a = {a}, got {b}")));
    }
    Ok(())
}

fn check_lower(x: f64) -> Result<()> {
    finite("x", x)?;
    if x < 0.0 {
        return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
    }
    Ok(())
}

/// `E_x[e^{−qκ⁺_a}; κ⁺_a < κ⁻_0]`.
pub fn two_sided_up(model: &LevyModel, query: &ExitQuery) -> Result<IdentityResult> {
    check_window(query.x, query.a, query.refraction.b, true)?;
    Refracted::new(model, &query.refraction, query.q)?.two_sided_up(query.x, query.a)
}

/// `E_x[e^{−qκ⁻_0}; κ⁻_0 < κ⁺_a]`.
pub fn two_sided_down(model: &LevyModel, query: &ExitQuery) -> Result<IdentityResult> {
    check_window(query.x, query.a, query.refraction.b, true)?;
    Refracted::new(model, &query.refraction, query.q)?.two_sided_down(query.x, query.a)
}

/// `E_x[e^{−qκ⁺_a}; κ⁺_a < ∞]`.
pub fn one_sided_up(
    model: &LevyModel,
    x: f64,
    a: f64,
    q: f64,
    refraction: &RefractionConfig,
) -> Result<IdentityResult> {
    check_window(x, a, refraction.b, false)?;
    Refracted::new(model, refraction, q)?.one_sided_up(x, a)
}

/// `E_x[e^{−qκ⁻_0}; κ⁻_0 < ∞]` for `q > 0`.
pub fn one_sided_down(model: &LevyModel, x: f64, q: f64, refraction: &RefractionConfig) -> Result<IdentityResult> {
    check_lower(x)?;
    if !(q > 0.0) {
        return Err(Error::NonPositiveQ { q });
    }
    Refracted::new(model, refraction, q)?.one_sided_down(x)
}

/// `P_x(κ⁻_0 < ∞)` for `0 < δ < E X_1`.
pub fn ruin_probability(model: &LevyModel, x: f64, refraction: &RefractionConfig) -> Result<IdentityResult> {
    check_lower(x)?;
    validate_refraction(model, refraction)?;
    if refraction.delta >= model.mean() {
        return Err(Error::DriftNotDominating { mean: model.mean(), delta: refraction.delta });
    }
    Refracted::new(model, refraction, 0.0)?.ruin_probability(x)
}

/// `E_x[e^{−qκ⁻_0}; U_{κ⁻_0} = 0]`; `q = 0` is evaluated at
/// [`NUMERIC_LIMIT_Q`].
pub fn creeping(model: &LevyModel, x: f64, q: f64, refraction: &RefractionConfig) -> Result<IdentityResult> {
    check_lower(x)?;
    if !(q >= 0.0) {
        return Err(Error::NonPositiveQ { q });
    }
    validate_refraction(model, refraction)?;
    if model.sigma() == 0.0 {
        return Ok(IdentityResult::exact(0.0));
    }
    if q == 0.0 {
        let ctx = Refracted::new(model, refraction, NUMERIC_LIMIT_Q)?;
        return ctx.creeping(x).map(IdentityResult::as_limit);
    }
    Refracted::new(model, refraction, q)?.creeping(x)
}

#[cfg(test)]
mod tests;
