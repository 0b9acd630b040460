//! Spectrally negative Lévy models, their Laplace exponents and right inverses.
//!
//! A model is stored through its *linear drift* `d`, the coefficient of `θ`
//! once the exponent is written in the centred form used below:
//!
//! * hyper-exponential jumps: `ψ(θ) = dθ + σ²θ²/2 − λ Σ A_k θ/(α_k + θ)`
//! * stable jumps:            `ψ(θ) = dθ + σ²θ²/2 + θ^α`
//! * no jumps:                `ψ(θ) = dθ + σ²θ²/2`
//!
//! For bounded-variation models `d` is the familiar premium rate `c` of the
//! representation `X_t = ct − S_t`. The Lévy–Khintchine drift `γ` is
//! available through [`LevyModel::gamma`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;

/// Parametric description of the Lévy measure `Π` on `(0, ∞)`.
///
/// Jumps are given by their magnitude: a jump of size `x > 0` moves the
/// process down by `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpSpec {
    /// `Π(dx) = λ Σ_k A_k α_k e^{−α_k x} dx`.
    HyperExponential { lambda: f64, weights: Vec<f64>, rates: Vec<f64> },
    /// `Π(dx) = x^{−1−α} dx / Γ(−α)`, `1 < α < 2`.
    StableTail { alpha: f64 },
    NoJumps,
}

impl JumpSpec {
    /// Exponential jumps with mean `1/rate` arriving at intensity `lambda`.
    pub fn single_exponential(lambda: f64, rate: f64) -> Self {
        JumpSpec::HyperExponential { lambda, weights: vec![1.0], rates: vec![rate] }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
                }
                if weights.is_empty() || weights.len() != rates.len() {
                    return Err(Error::invalid(
                        "weights",
                        "weights and rates must be non-empty and of equal length",
                    ));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::invalid("weights", "all weights must be positive"));
                }
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid("weights", format!("must sum to 1, sum is {total}")));
                }
                if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
                    return Err(Error::invalid("rates", "all rates must be positive"));
                }
                for i in 0..rates.len() {
                    for j in 0..i {
                        if rates[i] == rates[j] {
                            return Err(Error::invalid("rates", "rates must be distinct"));
                        }
                    }
                }
                Ok(())
            }
            JumpSpec::StableTail { alpha } => {
                if !(*alpha > 1.0 && *alpha < 2.0) {
                    return Err(Error::invalid("alpha", format!("must lie in (1, 2), got {alpha}")));
                }
                Ok(())
            }
            JumpSpec::NoJumps => Ok(()),
        }
    }

    /// Constant `C` of the stable Lévy density `C x^{−1−α}`.
    pub fn stable_constant(alpha: f64) -> f64 {
        1.0 / libm::tgamma(-alpha)
    }

    /// Density of `Π` at `x > 0`.
    pub fn density(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match self {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                lambda * weights.iter().zip(rates).map(|(a, r)| a * r * (-r * x).exp()).sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => Self::stable_constant(*alpha) * x.powf(-1.0 - alpha),
            JumpSpec::NoJumps => 0.0,
        }
    }

    /// Tail mass `Π((x, ∞))` for `x > 0`.
    pub fn tail(&self, x: f64) -> f64 {
        match self {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                let x = x.max(0.0);
                lambda * weights.iter().zip(rates).map(|(a, r)| a * (-r * x).exp()).sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                if x <= 0.0 {
                    f64::INFINITY
                } else {
                    Self::stable_constant(*alpha) * x.powf(-alpha) / alpha
                }
            }
            JumpSpec::NoJumps => 0.0,
        }
    }

    /// `∫_{(ε,∞)} x Π(dx)`.
    pub fn tail_first_moment(&self, eps: f64) -> f64 {
        match self {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                lambda
                    * weights
                        .iter()
                        .zip(rates)
                        .map(|(a, r)| a * (-r * eps).exp() * (eps + 1.0 / r))
                        .sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                Self::stable_constant(*alpha) * eps.powf(1.0 - alpha) / (alpha - 1.0)
            }
            JumpSpec::NoJumps => 0.0,
        }
    }

    /// `∫_{(0,ε)} x² Π(dx)`.
    pub fn small_jump_variance(&self, eps: f64) -> f64 {
        match self {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                lambda
                    * weights
                        .iter()
                        .zip(rates)
                        .map(|(a, r)| {
                            let u = r * eps;
                            a * (2.0 - (2.0 + 2.0 * u + u * u) * (-u).exp()) / (r * r)
                        })
                        .sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                Self::stable_constant(*alpha) * eps.powf(2.0 - alpha) / (2.0 - alpha)
            }
            JumpSpec::NoJumps => 0.0,
        }
    }

    fn has_bounded_variation(&self) -> bool {
        !matches!(self, JumpSpec::StableTail { .. })
    }
}

/// A spectrally negative Lévy process, stored by linear drift, Gaussian
/// coefficient and jump specification.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    drift: f64,
    sigma: f64,
    jumps: JumpSpec,
}

impl LevyModel {
    /// Builds a model from the Lévy–Khintchine triplet `(γ, σ, Π)`.
    pub fn new(gamma: f64, sigma: f64, jumps: JumpSpec) -> Result<Self> {
        jumps.validate()?;
        let shift = drift_shift(&jumps);
        Self::with_linear_drift(gamma + shift, sigma, jumps)
    }

    /// Builds a model from its linear drift (the premium rate `c` for
    /// bounded-variation models).
    pub fn with_linear_drift(drift: f64, sigma: f64, jumps: JumpSpec) -> Result<Self> {
        jumps.validate()?;
        if !drift.is_finite() {
            return Err(Error::invalid("drift", "must be finite"));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::invalid("sigma", format!("must be non-negative, got {sigma}")));
        }
        let model = LevyModel { drift, sigma, jumps };
        if model.is_bounded_variation() && drift <= 0.0 {
            return Err(Error::invalid(
                "drift",
                format!("bounded-variation model needs c > 0 (got {drift}); otherwise -X is a subordinator"),
            ));
        }
        Ok(model)
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn jumps(&self) -> &JumpSpec {
        &self.jumps
    }

    /// Lévy–Khintchine drift `γ`.
    pub fn gamma(&self) -> f64 {
        self.drift - drift_shift(&self.jumps)
    }

    pub fn is_bounded_variation(&self) -> bool {
        self.sigma == 0.0 && self.jumps.has_bounded_variation()
    }

    /// `c` for bounded-variation models.
    pub fn bv_drift(&self) -> Option<f64> {
        self.is_bounded_variation().then_some(self.drift)
    }

    /// Total jump intensity `Π((0, ∞))` (infinite for stable jumps).
    pub fn jump_rate(&self) -> f64 {
        self.jumps.tail(0.0)
    }

    /// Smallest pole `−min α_k` of the hyper-exponential exponent, `None`
    /// when the exponent is entire on the real line.
    pub fn pole_bound(&self) -> Option<f64> {
        match &self.jumps {
            JumpSpec::HyperExponential { rates, .. } => {
                Some(-rates.iter().cloned().fold(f64::INFINITY, f64::min))
            }
            _ => None,
        }
    }

    /// `ψ(θ) = log E e^{θ X_1}`. Hyper-exponential models accept any `θ`
    /// away from the poles `−α_k`; stable models need `θ ≥ 0`.
    pub fn laplace_exponent(&self, theta: f64) -> Result<f64> {
        let base = self.drift * theta + 0.5 * self.sigma * self.sigma * theta * theta;
        match &self.jumps {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                let mut s = 0.0;
                for (a, r) in weights.iter().zip(rates) {
                    if r + theta == 0.0 {
                        return Err(Error::DomainError { theta });
                    }
                    s += a / (r + theta);
                }
                Ok(base - lambda * theta * s)
            }
            JumpSpec::StableTail { alpha } => {
                if theta < 0.0 {
                    return Err(Error::DomainError { theta });
                }
                Ok(base + theta.powf(*alpha))
            }
            JumpSpec::NoJumps => Ok(base),
        }
    }

    /// `ψ` for arguments where the caller has already checked the domain.
    pub(crate) fn psi(&self, theta: f64) -> f64 {
        self.laplace_exponent(theta).unwrap_or(f64::NAN)
    }

    /// `ψ'(θ)`.
    pub fn psi_prime(&self, theta: f64) -> f64 {
        let base = self.drift + self.sigma * self.sigma * theta;
        match &self.jumps {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                base - lambda
                    * weights.iter().zip(rates).map(|(a, r)| a * r / ((r + theta) * (r + theta))).sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                if theta == 0.0 {
                    base
                } else {
                    base + alpha * theta.powf(alpha - 1.0)
                }
            }
            JumpSpec::NoJumps => base,
        }
    }

    /// `ψ''(θ)`.
    pub fn psi_second(&self, theta: f64) -> f64 {
        let base = self.sigma * self.sigma;
        match &self.jumps {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                base + 2.0
                    * lambda
                    * weights.iter().zip(rates).map(|(a, r)| a * r / (r + theta).powi(3)).sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                if theta == 0.0 {
                    f64::INFINITY
                } else {
                    base + alpha * (alpha - 1.0) * theta.powf(alpha - 2.0)
                }
            }
            JumpSpec::NoJumps => base,
        }
    }

    /// `(ψ(a) − ψ(b)) / (a − b)`, accurate when `a` and `b` are close.
    pub fn psi_divided_difference(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return self.psi_prime(a);
        }
        let base = self.drift + 0.5 * self.sigma * self.sigma * (a + b);
        match &self.jumps {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                base - lambda
                    * weights.iter().zip(rates).map(|(w, r)| w * r / ((r + a) * (r + b))).sum::<f64>()
            }
            JumpSpec::StableTail { alpha } => {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                if lo <= 0.0 {
                    return base + (hi.powf(*alpha) - lo.max(0.0).powf(*alpha)) / (hi - lo);
                }
                let h = hi - lo;
                base + lo.powf(*alpha) * (alpha * (h / lo).ln_1p()).exp_m1() / h
            }
            JumpSpec::NoJumps => base,
        }
    }

    /// `ψ` continued to the complex half-plane `Re s > −min α_k` (principal
    /// branch of `s^α` for stable jumps).
    pub fn laplace_exponent_complex(&self, s: Complex64) -> Complex64 {
        let base = s * self.drift + s * s * (0.5 * self.sigma * self.sigma);
        match &self.jumps {
            JumpSpec::HyperExponential { lambda, weights, rates } => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (a, r) in weights.iter().zip(rates) {
                    acc += *a / (s + *r);
                }
                base - s * acc * *lambda
            }
            JumpSpec::StableTail { alpha } => base + s.powf(*alpha),
            JumpSpec::NoJumps => base,
        }
    }

    /// `E X_1 = ψ'(0+)`.
    pub fn mean(&self) -> f64 {
        self.psi_prime(0.0)
    }

    /// Largest non-negative root of `ψ(θ) − δθ = q`: `Φ(q)` for `δ = 0` and
    /// `φ(q)` otherwise.
    pub fn phi_inverse(&self, delta: f64, q: f64) -> f64 {
        let f = |t: f64| self.psi(t) - delta * t - q;
        let df = |t: f64| self.psi_prime(t) - delta;
        if q <= 0.0 && df(0.0) >= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while f(hi) <= 0.0 {
            hi *= 2.0;
        }
        // Newton from the right converges monotonically for a convex function.
        let lo = if q > 0.0 { 0.0 } else { roots::convex_minimiser(&df, 0.0, hi) };
        roots::newton_from_right(&f, &df, lo, hi, 1e-14)
    }

    /// `φ(q) − Φ(q)` computed without cancellation for small `δ`.
    pub fn phi_gap(&self, delta: f64, q: f64) -> f64 {
        let big = self.phi_inverse(0.0, q);
        let small_phi = self.phi_inverse(delta, q);
        let mut eps = small_phi - big;
        if big > 0.0 && eps < 1e-3 * big {
            // ε = δ(Φ + ε) / ((ψ(Φ+ε) − ψ(Φ))/ε − δ)
            for _ in 0..50 {
                let next = delta * (big + eps) / (self.psi_divided_difference(big + eps, big) - delta);
                let done = (next - eps).abs() <= 1e-16 * next.abs();
                eps = next;
                if done {
                    break;
                }
            }
        }
        eps
    }
}

/// Linear drift minus `γ`: `∫_{(0,1)} x Π(dx)` for finite-variation jumps,
/// `−∫_{(1,∞)} x Π(dx)` for stable jumps.
fn drift_shift(jumps: &JumpSpec) -> f64 {
    match jumps {
        JumpSpec::HyperExponential { lambda, weights, rates } => {
            lambda
                * weights
                    .iter()
                    .zip(rates)
                    .map(|(a, r)| a * (1.0 - (1.0 + r) * (-r).exp()) / r)
                    .sum::<f64>()
        }
        JumpSpec::StableTail { .. } => -jumps.tail_first_moment(1.0),
        JumpSpec::NoJumps => 0.0,
    }
}

/// The refraction pair: drift reduction `δ` applied above level `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefractionConfig {
    pub delta: f64,
    pub b: f64,
}

impl RefractionConfig {
    pub fn new(delta: f64, b: f64) -> Self {
        RefractionConfig { delta, b }
    }
}

/// Checks `δ > 0`, `b ≥ 0` and, for bounded-variation models, `δ < c`.
pub fn validate_refraction(model: &LevyModel, refraction: &RefractionConfig) -> Result<()> {
    let RefractionConfig { delta, b } = *refraction;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::NonPositiveDelta { delta });
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::invalid("b", format!("must be non-negative and finite, got {b}")));
    }
    if let Some(c) = model.bv_drift() {
        if delta >= c {
            return Err(Error::HypothesisHViolation { c, delta });
        }
    }
    Ok(())
}

/// JSON shape of a jump specification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum JumpsConfig {
    Hyperexp { lambda: f64, weights: Vec<f64>, rates: Vec<f64> },
    Exp { lambda: f64, rate: f64 },
    Stable { alpha: f64 },
    None,
}

impl From<JumpsConfig> for JumpSpec {
    fn from(c: JumpsConfig) -> Self {
        match c {
            JumpsConfig::Hyperexp { lambda, weights, rates } => {
                JumpSpec::HyperExponential { lambda, weights, rates }
            }
            JumpsConfig::Exp { lambda, rate } => JumpSpec::single_exponential(lambda, rate),
            JumpsConfig::Stable { alpha } => JumpSpec::StableTail { alpha },
            JumpsConfig::None => JumpSpec::NoJumps,
        }
    }
}

impl From<&JumpSpec> for JumpsConfig {
    fn from(j: &JumpSpec) -> Self {
        match j {
            JumpSpec::HyperExponential { lambda, weights, rates } => JumpsConfig::Hyperexp {
                lambda: *lambda,
                weights: weights.clone(),
                rates: rates.clone(),
            },
            JumpSpec::StableTail { alpha } => JumpsConfig::Stable { alpha: *alpha },
            JumpSpec::NoJumps => JumpsConfig::None,
        }
    }
}

/// JSON shape of a model plus optional refraction.
///
/// Exactly one of `gamma` (Lévy–Khintchine drift) and `c` (linear drift)
/// must be given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default)]
    pub sigma: f64,
    pub jumps: JumpsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

impl ModelConfig {
    /// Field names accepted by this schema.
    pub const FIELDS: &'static [&'static str] = &["gamma", "c", "sigma", "jumps", "delta", "b"];

    pub fn model(&self) -> Result<LevyModel> {
        let jumps: JumpSpec = self.jumps.clone().into();
        match (self.gamma, self.c) {
            (Some(g), None) => LevyModel::new(g, self.sigma, jumps),
            (None, Some(c)) => LevyModel::with_linear_drift(c, self.sigma, jumps),
            _ => Err(Error::Config("exactly one of `gamma` and `c` must be given".into())),
        }
    }

    /// The refraction, validated against the model, if `delta` is present.
    pub fn refraction(&self) -> Result<Option<RefractionConfig>> {
        match self.delta {
            None => Ok(None),
            Some(delta) => {
                let r = RefractionConfig::new(delta, self.b.unwrap_or(0.0));
                validate_refraction(&self.model()?, &r)?;
                Ok(Some(r))
            }
        }
    }

    pub fn from_model(model: &LevyModel, refraction: Option<RefractionConfig>) -> Self {
        ModelConfig {
            gamma: None,
            c: Some(model.drift()),
            sigma: model.sigma(),
            jumps: model.jumps().into(),
            delta: refraction.map(|r| r.delta),
            b: refraction.map(|r| r.b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1() -> LevyModel {
        LevyModel::with_linear_drift(2.0, 0.0, JumpSpec::single_exponential(1.0, 1.0)).unwrap()
    }

    #[test]
    fn exponent_examples() {
        assert_eq!(m1().laplace_exponent(0.0).unwrap(), 0.0);
        assert!((m1().laplace_exponent(1.0).unwrap() - 1.5).abs() < 1e-15);
        let bm = LevyModel::new(0.0, 2f64.sqrt(), JumpSpec::NoJumps).unwrap();
        assert!((bm.laplace_exponent(3.0).unwrap() - 9.0).abs() < 1e-12);
        assert!(matches!(m1().laplace_exponent(-1.0), Err(Error::DomainError { .. })));
    }

    #[test]
    fn means() {
        assert_eq!(m1().mean(), 1.0);
        let bm = LevyModel::new(0.7, 1.0, JumpSpec::NoJumps).unwrap();
        assert_eq!(bm.mean(), 0.7);
        let st = LevyModel::with_linear_drift(1.3, 0.0, JumpSpec::StableTail { alpha: 1.5 }).unwrap();
        let h = 1e-7;
        let fd = (st.psi(2.0 * h) - st.psi(h)) / h;
        assert_eq!(st.mean(), 1.3);
        assert!((fd - 1.3).abs() < 1e-3);
    }

    #[test]
    fn gamma_round_trip() {
        let m = LevyModel::new(0.4, 0.3, JumpSpec::single_exponential(1.5, 2.0)).unwrap();
        assert!((m.gamma() - 0.4).abs() < 1e-14);
        let s = LevyModel::new(0.4, 0.0, JumpSpec::StableTail { alpha: 1.5 }).unwrap();
        assert!((s.gamma() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn stable_constant_normalises_exponent() {
        // ∫_0^∞ (e^{−θx} − 1 + θx) C x^{−1−α} dx = θ^α
        let alpha = 1.5;
        let c = JumpSpec::stable_constant(alpha);
        let theta: f64 = 2.0;
        let f = |x: f64| ((-theta * x).exp_m1() + theta * x) * c * x.powf(-1.0 - alpha);
        // x = u² removes the endpoint singularity on (0, 1)
        let g = |u: f64| 2.0 * u * f(u * u);
        let v = crate::quadrature::integrate(g, 0.0, 1.0, 1e-12).unwrap().value
            + crate::quadrature::integrate_to_infinity(f, 1.0, 1.0, 1e-12).unwrap().value;
        assert!((v - theta.powf(alpha)).abs() < 1e-7, "{v}");
    }

    #[test]
    fn phi_inverse_examples() {
        let bm = LevyModel::new(0.0, 2f64.sqrt(), JumpSpec::NoJumps).unwrap();
        assert!((bm.phi_inverse(0.0, 4.0) - 2.0).abs() < 1e-12);
        assert_eq!(m1().phi_inverse(0.0, 0.0), 0.0);
        // bisection oracle on 2θ − 1 + 1/(1+θ) = 0.5
        let g = |t: f64| 2.0 * t - 1.0 + 1.0 / (1.0 + t) - 0.5;
        let (mut lo, mut hi) = (0.1, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid
            } else {
                lo = mid
            }
        }
        assert!((m1().phi_inverse(0.0, 0.5) - lo).abs() < 1e-12);
    }

    #[test]
    fn phi_inverse_negative_drift() {
        let m = LevyModel::with_linear_drift(1.0, 0.0, JumpSpec::single_exponential(2.0, 1.0)).unwrap();
        let r = m.phi_inverse(0.0, 0.0);
        assert!(r > 0.0);
        assert!(m.psi(r).abs() < 1e-12);
    }

    #[test]
    fn phi_gap_small_delta() {
        let m = m1();
        let q = 0.5;
        let delta = 1e-8;
        let gap = m.phi_gap(delta, q);
        let big = m.phi_inverse(0.0, q);
        // first-order expansion: ε ≈ δΦ/(ψ'(Φ) − δ)
        let approx = delta * big / (m.psi_prime(big) - delta);
        assert!((gap / approx - 1.0).abs() < 1e-6);
    }

    #[test]
    fn refraction_validation() {
        let m = m1();
        assert!(validate_refraction(&m, &RefractionConfig::new(1.0, 0.0)).is_ok());
        assert!(matches!(
            validate_refraction(&m, &RefractionConfig::new(2.5, 0.0)),
            Err(Error::HypothesisHViolation { .. })
        ));
        assert!(matches!(
            validate_refraction(&m, &RefractionConfig::new(-1.0, 0.0)),
            Err(Error::NonPositiveDelta { .. })
        ));
        let st = LevyModel::with_linear_drift(1.0, 0.0, JumpSpec::StableTail { alpha: 1.5 }).unwrap();
        assert!(validate_refraction(&st, &RefractionConfig::new(10.0, 1.0)).is_ok());
    }

    #[test]
    fn config_parsing() {
        let cfg: ModelConfig = serde_json::from_str(
            r#"{"c":2,"sigma":0,"jumps":{"type":"exp","lambda":1,"rate":1},"delta":0.5,"b":1}"#,
        )
        .unwrap();
        assert_eq!(cfg.model().unwrap(), m1());
        assert_eq!(cfg.refraction().unwrap(), Some(RefractionConfig::new(0.5, 1.0)));
        let bad = serde_json::from_str::<ModelConfig>(r#"{"c":2,"jumps":{"type":"none"},"bogus":1}"#);
        assert!(bad.is_err());
        let both: ModelConfig =
            serde_json::from_str(r#"{"c":2,"gamma":1,"jumps":{"type":"none"}}"#).unwrap();
        assert!(both.model().is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let j = JumpSpec::HyperExponential { lambda: 1.0, weights: vec![0.5, 0.4], rates: vec![1.0, 2.0] };
        assert!(j.validate().is_err());
        let j = JumpSpec::HyperExponential { lambda: 1.0, weights: vec![0.5, 0.5], rates: vec![1.0, 1.0] };
        assert!(j.validate().is_err());
    }
}
