//! Both sides of the key analytical identity for bounded-variation models:
//!
//! ```text
//! ∫_0^∞ ∫_{(z,∞)} W(z − θ + m) Π(dθ) [𝕎(v−m−z) 𝕎(u−m)/𝕎(v−m) − 𝕎(u−m−z)] dz
//!   = −𝕎(u−m)/𝕎(v−m) · ω_m(v) + ω_m(u)
//! ```
//!
//! where `ω_m` is `ω` with the refraction level moved to `m`.

use super::Refracted;
use crate::error::{Error, Result};
use crate::levy_model::{JumpSpec, LevyModel, RefractionConfig};
use crate::quadrature;

/// `(lhs, rhs)` of the identity for `v ≥ u > m ≥ 0`.
pub fn key_identity_sides(
    u: f64,
    v: f64,
    m: f64,
    model: &LevyModel,
    refraction: &RefractionConfig,
    q: f64,
) -> Result<(f64, f64)> {
    if model.bv_drift().is_none() {
        return Err(Error::Unsupported("the key identity needs bounded-variation paths".into()));
    }
    if !(m >= 0.0 && u > m && v >= u && v.is_finite()) {
        return Err(Error::invalid("u", format!("need v >= u > m >= 0, got u = {u}, v = {v}, m = {m}")));
    }
    let ctx = Refracted::new(model, refraction, q)?;
    let (w, ww) = (ctx.scale(), ctx.refracted_scale());
    let tol = ctx.tolerance();

    // ∫_{(z,∞)} W(z − θ + m) Π(dθ) = Σ_k c_k e^{−α_k z}
    let mut terms = Vec::new();
    if let JumpSpec::HyperExponential { lambda, weights, rates } = model.jumps() {
        for (a, r) in weights.iter().zip(rates) {
            let i = quadrature::integrate(|s| w.w(s) * (r * (s - m)).exp(), 0.0, m, tol)?;
            terms.push((lambda * a * r * i.value, *r));
        }
    }
    let inner = |z: f64| terms.iter().map(|(c, r)| c * (-r * z).exp()).sum::<f64>();
    let ratio = ww.w(u - m) / ww.w(v - m);
    let bracket = |z: f64| ww.w(v - m - z) * ratio - ww.w(u - m - z);
    let lhs = quadrature::integrate_with_breaks(|z| inner(z) * bracket(z), 0.0, v - m, &[u - m], tol)?;

    let rhs = ctx.omega_from(u, m)?.value - ratio * ctx.omega_from(v, m)?.value;
    Ok((lhs.value, rhs))
}

/// `|lhs − rhs|` of the key identity.
pub fn verify_key_identity(
    u: f64,
    v: f64,
    m: f64,
    model: &LevyModel,
    refraction: &RefractionConfig,
    q: f64,
) -> Result<f64> {
    let (lhs, rhs) = key_identity_sides(u, v, m, model, refraction, q)?;
    Ok((lhs - rhs).abs())
}
