//! Discounted occupation densities of `U`, possibly killed on leaving
//! `[0, ∞)`, `(−∞, a]` or `[0, a]`.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use super::{check_lower, check_window, finite, Method, Refracted, NUMERIC_LIMIT_Q};
use crate::error::{Error, Result};
use crate::levy_model::{LevyModel, RefractionConfig};
use crate::quadrature::{self, Estimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResolventKind {
    /// Killed on leaving `[0, a]`.
    TwoSided,
    /// Killed below 0.
    KilledBelow,
    /// Killed above `a`.
    KilledAbove,
    /// No killing.
    Free,
}

/// `y ↦ u(x, y)` with `∫_B u(x, y) dy = E_x ∫_0^∞ e^{−qt} 1{U_t ∈ B, alive} dt`.
#[derive(Debug, Clone)]
pub struct ResolventDensity {
    kind: ResolventKind,
    ctx: Refracted,
    x: f64,
    a: f64,
    coef: f64,
    tail_b: f64,
    method: Method,
}

impl ResolventDensity {
    fn build(kind: ResolventKind, ctx: Refracted, x: f64, a: f64, method: Method) -> Result<Self> {
        let b = ctx.b();
        let (coef, tail_b) = match kind {
            ResolventKind::TwoSided => (ctx.omega(x)?.value / ctx.omega(a)?.value, 0.0),
            ResolventKind::KilledBelow => (ctx.omega(x)?.value, ctx.tail_scaled(1, b)?.value),
            ResolventKind::KilledAbove => (ctx.ebar_scaled(x, a)?.value / ctx.ebar_scaled(a, a)?.value, 0.0),
            ResolventKind::Free => (ctx.ebar_scaled(x, b)?.value, 0.0),
        };
        Ok(ResolventDensity { kind, ctx, x, a, coef, tail_b, method })
    }

    pub fn kind(&self) -> ResolventKind {
        self.kind
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn q(&self) -> f64 {
        self.ctx.q()
    }

    /// The window `(lo, hi)` outside which the density vanishes.
    pub fn window(&self) -> (f64, f64) {
        match self.kind {
            ResolventKind::TwoSided => (0.0, self.a),
            ResolventKind::KilledBelow => (0.0, f64::INFINITY),
            ResolventKind::KilledAbove => (f64::NEG_INFINITY, self.a),
            ResolventKind::Free => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Density at `y`.
    pub fn density(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.window();
        if y < lo || y > hi {
            return Ok(0.0);
        }
        let c = &self.ctx;
        let (x, a, b) = (self.x, self.a, c.b());
        let ww = c.refracted_scale();
        let big = c.big_phi();
        let eps = c.gap();
        let v = match self.kind {
            ResolventKind::TwoSided => {
                if y >= b {
                    self.coef * ww.w(a - y) - ww.w(x - y)
                } else {
                    self.coef * c.omega_shift(a, y)?.value - c.omega_shift(x, y)?.value
                }
            }
            ResolventKind::KilledBelow => {
                if y >= b {
                    self.head(y) - ww.w(x - y)
                } else {
                    let ratio = c.tail_scaled(1, b - y)?.value / self.tail_b;
                    self.coef * (-big * y).exp() * ratio - c.omega_shift(x, y)?.value
                }
            }
            ResolventKind::KilledAbove => {
                if y >= b {
                    self.coef * ww.w(a - y) - ww.w(x - y)
                } else {
                    c.shifted_deficit(x, y)?.value - self.coef * c.shifted_deficit(a, y)?.value
                }
            }
            ResolventKind::Free => {
                if y >= b {
                    self.head(y) - ww.w(x - y)
                } else {
                    let r = c.deficit_transform(1, b - y)?.value;
                    let tail = if r == 0.0 { 0.0 } else { (big * (b - y)).exp() * r };
                    c.shifted_deficit(x, y)?.value - self.coef * (eps / big) * tail
                }
            }
        };
        Ok(v)
    }

    /// The exponential part `C e^{−φ(y − b)}` of the density above `b`
    /// (unbounded windows only).
    fn head(&self, y: f64) -> f64 {
        let c = &self.ctx;
        let (b, big, small, eps, delta) = (c.b(), c.big_phi(), c.small_phi(), c.gap(), c.delta());
        match self.kind {
            ResolventKind::KilledBelow => self.coef * (-small * (y - b) - big * b).exp() * eps / (delta * self.tail_b),
            ResolventKind::Free => self.coef * eps / (delta * big) * (-small * (y - b)).exp(),
            _ => 0.0,
        }
    }

    /// `∫_lo^hi u(x, y) dy`; infinite limits are allowed.
    pub fn mass(&self, lo: f64, hi: f64) -> Result<Estimate> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::invalid("interval", "bounds must not be NaN"));
        }
        let (wlo, whi) = self.window();
        let lo = lo.max(wlo);
        let hi = hi.min(whi);
        if !(hi > lo) {
            return Ok(Estimate::exact(0.0));
        }
        let failure: RefCell<Option<Error>> = RefCell::new(None);
        let f = |y: f64| match self.density(y) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        };
        let tol = 10.0 * self.ctx.tolerance();
        let mut breaks = vec![self.ctx.b(), self.x];
        if self.a.is_finite() {
            breaks.push(self.a);
        }
        let first = breaks.iter().copied().fold(f64::INFINITY, f64::min);
        let last = breaks.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let inner_lo = if lo.is_finite() { lo } else { first.min(hi) };
        let inner_hi = if hi.is_finite() { hi } else { last.max(inner_lo) };
        let mut total = quadrature::integrate_with_breaks(f, inner_lo, inner_hi, &breaks, tol);

        if total.is_ok() && lo == f64::NEG_INFINITY {
            let scale = self.ctx.scale().decay_scale().max(self.ctx.refracted_scale().decay_scale());
            total = total.and_then(|t| Ok(t + quadrature::integrate_to_minus_infinity(f, inner_lo, scale, tol)?));
        }
        if total.is_ok() && hi == f64::INFINITY {
            // beyond max(b, x) the density is c e^{−φ(y − b)}
            let tail = self.head(inner_hi) / self.ctx.small_phi();
            total = total.map(|t| t + Estimate::exact(tail));
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let t = total?;
        if !t.value.is_finite() {
            return Err(Error::QuadratureFailure { estimate: f64::INFINITY, tolerance: tol });
        }
        Ok(t)
    }

    /// Mass of the whole window.
    pub fn total_mass(&self) -> Result<Estimate> {
        self.mass(f64::NEG_INFINITY, f64::INFINITY)
    }
}

fn with_limit(
    model: &LevyModel,
    refraction: &RefractionConfig,
    q: f64,
    allow_zero: bool,
) -> Result<(Refracted, Method)> {
    if !(q >= 0.0) {
        return Err(Error::NonPositiveQ { q });
    }
    if q == 0.0 && !allow_zero {
        return Ok((Refracted::new(model, refraction, NUMERIC_LIMIT_Q)?, Method::NumericLimit));
    }
    Ok((Refracted::new(model, refraction, q)?, Method::Quadrature))
}

/// Resolvent killed on leaving `[0, a]`.
pub fn resolvent_two_sided(
    model: &LevyModel,
    x: f64,
    a: f64,
    q: f64,
    refraction: &RefractionConfig,
) -> Result<ResolventDensity> {
    check_window(x, a, refraction.b, true)?;
    let (ctx, m) = with_limit(model, refraction, q, true)?;
    ResolventDensity::build(ResolventKind::TwoSided, ctx, x, a, m)
}

/// Resolvent killed below 0; `q = 0` is evaluated at the numeric limit.
pub fn resolvent_killed_below(
    model: &LevyModel,
    x: f64,
    q: f64,
    refraction: &RefractionConfig,
) -> Result<ResolventDensity> {
    check_lower(x)?;
    let (ctx, m) = with_limit(model, refraction, q, false)?;
    ResolventDensity::build(ResolventKind::KilledBelow, ctx, x, f64::INFINITY, m)
}

/// Resolvent killed above `a`.
pub fn resolvent_killed_above(
    model: &LevyModel,
    x: f64,
    a: f64,
    q: f64,
    refraction: &RefractionConfig,
) -> Result<ResolventDensity> {
    check_window(x, a, refraction.b, false)?;
    let (ctx, m) = with_limit(model, refraction, q, true)?;
    ResolventDensity::build(ResolventKind::KilledAbove, ctx, x, a, m)
}

/// Resolvent without killing; `q = 0` is evaluated at the numeric limit.
pub fn resolvent_free(model: &LevyModel, x: f64, q: f64, refraction: &RefractionConfig) -> Result<ResolventDensity> {
    finite("x", x)?;
    let (ctx, m) = with_limit(model, refraction, q, false)?;
    ResolventDensity::build(ResolventKind::Free, ctx, x, f64::INFINITY, m)
}
