//! Unrefracted identities for `X` itself, used as building blocks and as the
//! `δ → 0` reference.

use super::check_window;
use crate::error::{Error, Result};
use crate::levy_model::{JumpSpec, LevyModel};
use crate::quadrature;
use crate::scale_functions::ScaleFunction;

const TOL: f64 = 1e-10;

/// `E_x[e^{−qτ⁺_a}; τ⁺_a < τ⁻_0] = W(x)/W(a)`.
pub fn classical_two_sided(x: f64, a: f64, q: f64, model: &LevyModel) -> Result<f64> {
    check_window(x, a, 0.0, true)?;
    if x == a {
        return Ok(1.0);
    }
    let w = ScaleFunction::new(model, 0.0, q)?;
    w.diagnose(a)?;
    Ok(w.w(x) / w.w(a))
}

/// Resolvent of `X` killed on leaving `[0, a]`.
#[derive(Debug, Clone)]
pub struct ClassicalResolvent {
    w: ScaleFunction,
    x: f64,
    a: f64,
    ratio: f64,
}

impl ClassicalResolvent {
    /// `W(x) W(a − y)/W(a) − W(x − y)` on `[0, a]`.
    pub fn density(&self, y: f64) -> f64 {
        if y < 0.0 || y > self.a {
            return 0.0;
        }
        self.ratio * self.w.w(self.a - y) - self.w.w(self.x - y)
    }

    pub fn mass(&self, lo: f64, hi: f64) -> Result<f64> {
        let lo = lo.max(0.0);
        let hi = hi.min(self.a);
        if !(hi > lo) {
            return Ok(0.0);
        }
        Ok(quadrature::integrate_with_breaks(|y| self.density(y), lo, hi, &[self.x], TOL)?.value)
    }
}

pub fn classical_resolvent(x: f64, a: f64, q: f64, model: &LevyModel) -> Result<ClassicalResolvent> {
    check_window(x, a, 0.0, true)?;
    let w = ScaleFunction::new(model, 0.0, q)?;
    let ratio = w.w(x) / w.w(a);
    Ok(ClassicalResolvent { w, x, a, ratio })
}

/// `E_x[e^{−qτ⁻_0} f(X_{τ⁻_0}) g(X_{τ⁻_0−}); τ⁻_0 < τ⁺_a]` for hyper-exponential
/// (or absent) jumps.
pub fn classical_overshoot<F, G>(x: f64, a: f64, q: f64, model: &LevyModel, f: F, g: G) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    check_window(x, a, 0.0, true)?;
    let (lambda, weights, rates) = match model.jumps() {
        JumpSpec::HyperExponential { lambda, weights, rates } => (*lambda, weights.clone(), rates.clone()),
        JumpSpec::NoJumps => return Ok(0.0),
        JumpSpec::StableTail { .. } => {
            return Err(Error::Unsupported("overshoot law needs hyper-exponential jumps".into()))
        }
    };
    // ∫_{(y,∞)} f(y − θ) Π(dθ) = Σ_k e^{−α_k y} λ A_k α_k ∫_0^∞ f(−t) e^{−α_k t} dt
    let mut coef = Vec::with_capacity(rates.len());
    for (w, r) in weights.iter().zip(&rates) {
        let m = quadrature::integrate_to_infinity(|t| f(-t) * (-r * t).exp(), 0.0, 1.0 / r, TOL)?;
        coef.push(lambda * w * r * m.value);
    }
    let res = classical_resolvent(x, a, q, model)?;
    let integrand = |y: f64| {
        let inner: f64 = coef.iter().zip(&rates).map(|(c, r)| c * (-r * y).exp()).sum();
        inner * g(y) * res.density(y)
    };
    Ok(quadrature::integrate_with_breaks(integrand, 0.0, a, &[x], TOL)?.value)
}
