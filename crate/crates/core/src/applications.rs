//! Ruin-theory quantities built on the refracted identities: the value of
//! dividends paid at rate `δ` above `b`, the joint law of undershoot and
//! overshoot at ruin, smooth pasting at the threshold, and the closed forms
//! for stable and hyper-exponential claims.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::levy_model::{validate_refraction, JumpSpec, LevyModel, RefractionConfig};
use crate::quadrature::{self, Estimate};
use crate::refracted_identities::{IdentityResult, Refracted, DEFAULT_TOLERANCE};
use crate::roots;
use crate::scale_functions::hyperexp_partial_fractions;
use crate::special::{mittag_leffler, mittag_leffler_deriv};

/// Start level, discount rate and refraction of a dividend valuation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DividendQuery {
    pub x: f64,
    pub q: f64,
    pub refraction: RefractionConfig,
}

impl DividendQuery {
    pub fn new(x: f64, q: f64, refraction: RefractionConfig) -> Self {
        DividendQuery { x, q, refraction }
    }

    fn check(&self) -> Result<()> {
        if !(self.q > 0.0) || !self.q.is_finite() {
            return Err(Error::NonPositiveQ { q: self.q });
        }
        if !self.x.is_finite() {
            return Err(Error::invalid("x", "must be finite"));
        }
        Ok(())
    }
}

/// `φ ∫_0^∞ e^{−φy} W'(y + s) dy`.
fn dividend_denominator(ctx: &Refracted, s: f64) -> Result<Estimate> {
    let t = ctx.tail_scaled(1, s)?;
    Ok(t * (ctx.small_phi() * (ctx.big_phi() * s).exp() / ctx.gap()))
}

impl Refracted {
    /// Expected discounted dividends paid until ruin from `x`.
    pub fn dividend_value(&self, x: f64) -> Result<IdentityResult> {
        if x < 0.0 {
            return Ok(IdentityResult::exact(0.0));
        }
        let k = dividend_denominator(self, self.b())?;
        let mut v = self.omega(x)?.div(k);
        if x > self.b() {
            // (δ/q)(1 − ℤ(x − b)) = −δ ∫_0^{x−b} 𝕎
            v = v - Estimate::exact(self.delta() * self.refracted_scale().integral(x - self.b()));
        }
        Ok(IdentityResult::from_estimate(v))
    }
}

/// `V(x) = (δ/q)(1 − ℤ(x − b)) + ω(x) / (φ ∫_0^∞ e^{−φy} W'(y + b) dy)`.
pub fn dividend_value(model: &LevyModel, query: &DividendQuery) -> Result<IdentityResult> {
    query.check()?;
    Refracted::new(model, &query.refraction, query.q)?.dividend_value(query.x)
}

/// Partial-fraction pieces of the dividend value for rational exponents.
#[derive(Debug, Clone)]
pub struct HyperExpDividend {
    delta: f64,
    b: f64,
    q: f64,
    /// `(θ_i, D_i)` of `W`.
    x_roots: Vec<(f64, f64)>,
    /// `(θ̃_j, D̃_j)` of `𝕎`.
    y_roots: Vec<(f64, f64)>,
    k: f64,
}

impl HyperExpDividend {
    pub fn new(model: &LevyModel, refraction: &RefractionConfig, q: f64) -> Result<Self> {
        if matches!(model.jumps(), JumpSpec::StableTail { .. }) {
            return Err(Error::Unsupported("the partial-fraction dividend value needs hyper-exponential jumps".into()));
        }
        validate_refraction(model, refraction)?;
        if !(q > 0.0) {
            return Err(Error::NonPositiveQ { q });
        }
        let w = hyperexp_partial_fractions(model, 0.0, q)?;
        let ww = hyperexp_partial_fractions(model, refraction.delta, q)?;
        let x_roots: Vec<(f64, f64)> = w.roots.iter().copied().zip(w.coefficients.iter().copied()).collect();
        let y_roots: Vec<(f64, f64)> = ww.roots.iter().copied().zip(ww.coefficients.iter().copied()).collect();
        let t0 = y_roots[0].0;
        let b = refraction.b;
        let k = t0 * x_roots.iter().map(|&(t, d)| d * t * (t * b).exp() / (t0 - t)).sum::<f64>();
        Ok(HyperExpDividend { delta: refraction.delta, b, q, x_roots, y_roots, k })
    }

    /// `θ̃_0 Σ_i D_i θ_i e^{θ_i b} / (θ̃_0 − θ_i)`.
    pub fn denominator(&self) -> f64 {
        self.k
    }

    /// The curly-bracket coefficients
    /// `K^{-1} Σ_i D̃_j D_i θ_i e^{θ_i b}/(θ̃_j − θ_i) − D̃_j/θ̃_j`, one per `j`.
    pub fn brackets(&self) -> Vec<f64> {
        self.y_roots
            .iter()
            .map(|&(tj, dj)| {
                let s: f64 = self.x_roots.iter().map(|&(t, d)| dj * d * t * (t * self.b).exp() / (tj - t)).sum();
                s / self.k - dj / tj
            })
            .collect()
    }

    pub fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if x <= self.b {
            return self.x_roots.iter().map(|&(t, d)| d * (t * x).exp()).sum::<f64>() / self.k;
        }
        // j = 0 is identically zero and would multiply a growing exponential
        let tail: f64 = self
            .brackets()
            .iter()
            .zip(&self.y_roots)
            .skip(1)
            .map(|(c, &(tj, _))| c * (tj * (x - self.b)).exp())
            .sum();
        self.delta / self.q + self.delta * tail
    }

    /// The `x ≥ b` expression evaluated at any `x`, including the `j = 0` term.
    pub fn upper_branch(&self, x: f64) -> f64 {
        let s: f64 = self
            .brackets()
            .iter()
            .zip(&self.y_roots)
            .map(|(c, &(tj, _))| c * (tj * (x - self.b)).exp())
            .sum();
        self.delta / self.q + self.delta * s
    }
}

/// Dividend value from the partial-fraction roots of `ψ − q` and `ψ − δθ − q`.
pub fn dividend_value_hyperexp(model: &LevyModel, query: &DividendQuery) -> Result<IdentityResult> {
    query.check()?;
    let h = HyperExpDividend::new(model, &query.refraction, query.q)?;
    Ok(IdentityResult::exact(h.value(query.x)))
}

/// A half-open interval `(lo, hi]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        v > self.lo && v <= self.hi
    }
}

/// Joint law of `(U_{κ⁻_0}, U_{κ⁻_0−})` started from `x`.
#[derive(Debug, Clone)]
pub struct OvershootLaw {
    x: f64,
    jumps: JumpSpec,
    ctx: Refracted,
    scale: f64,
    omega_x: f64,
    norm: f64,
}

impl OvershootLaw {
    pub fn new(model: &LevyModel, x: f64, refraction: &RefractionConfig) -> Result<Self> {
        let rates = match model.jumps() {
            JumpSpec::HyperExponential { rates, .. } => rates.clone(),
            JumpSpec::NoJumps => vec![1.0],
            JumpSpec::StableTail { .. } => {
                return Err(Error::Unsupported("overshoot law needs hyper-exponential jumps".into()))
            }
        };
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
        }
        let mean = model.mean();
        if refraction.delta >= mean {
            return Err(Error::DriftNotDominating { mean, delta: refraction.delta });
        }
        let ctx = Refracted::new(model, refraction, 0.0)?;
        let omega_x = ctx.omega(x)?.value;
        let norm = 1.0 - refraction.delta * ctx.scale().w(refraction.b);
        let scale = 1.0 / rates.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(OvershootLaw { x, jumps: model.jumps().clone(), ctx, scale, omega_x, norm })
    }

    /// Weight of undershoot level `y ≥ 0`, to be multiplied by the jump law.
    pub fn kernel(&self, y: f64) -> Result<f64> {
        let (b, delta) = (self.ctx.b(), self.ctx.delta());
        let lead = (1.0 - delta * self.ctx.scale().w(b - y)) / self.norm * self.omega_x;
        let sub = if y < b { self.ctx.omega_shift(self.x, y)?.value } else { self.ctx.refracted_scale().w(self.x - y) };
        Ok(lead - sub)
    }

    /// Density in `(overshoot u < 0, undershoot y ≥ 0)`.
    pub fn density(&self, u: f64, y: f64) -> Result<f64> {
        if u >= 0.0 || y < 0.0 {
            return Ok(0.0);
        }
        Ok(self.jumps.density(y - u) * self.kernel(y)?)
    }

    /// `Π(y − A)`.
    fn jump_mass(&self, y: f64, a: &Interval) -> f64 {
        let lo = (y - a.hi).max(0.0);
        let hi = y - a.lo;
        if hi <= lo {
            return 0.0;
        }
        self.jumps.tail(lo) - if hi.is_finite() { self.jumps.tail(hi) } else { 0.0 }
    }

    /// `P_x(U_{κ⁻_0} ∈ A, U_{κ⁻_0−} ∈ B)`.
    pub fn rectangle_mass(&self, a: &Interval, b: &Interval) -> Result<IdentityResult> {
        if a.hi > 0.0 || b.lo < 0.0 {
            return Err(Error::invalid("interval", "need A within (−∞, 0] and B within [0, ∞)"));
        }
        let a_lo = a.lo;
        let lo = b.lo.max(0.0);
        if b.hi <= lo || a.hi <= a_lo {
            return Ok(IdentityResult::exact(0.0));
        }
        let failure = std::cell::RefCell::new(None);
        let f = |y: f64| {
            let m = self.jump_mass(y, a);
            if m == 0.0 {
                return 0.0;
            }
            match self.kernel(y) {
                Ok(k) => m * k,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let tol = 10.0 * DEFAULT_TOLERANCE;
        let mut breaks = vec![self.ctx.b(), self.x];
        breaks.extend([a.hi, a.lo].iter().map(|e| -e).filter(|e| e.is_finite()));
        let finite_hi = if b.hi.is_finite() { b.hi } else { lo.max(self.x).max(self.ctx.b()) };
        let mut e = quadrature::integrate_with_breaks(f, lo, finite_hi, &breaks, tol)?;
        if !b.hi.is_finite() {
            e = e + quadrature::integrate_to_infinity(f, finite_hi, self.scale, tol)?;
        }
        if let Some(err) = failure.into_inner() {
            return Err(err);
        }
        Ok(IdentityResult::from_estimate(Estimate::new(e.value, e.error.max(f64::MIN_POSITIVE))))
    }

    /// Mass of the whole quadrant: the probability of ruin by a jump.
    pub fn total_mass(&self) -> Result<IdentityResult> {
        self.rectangle_mass(&Interval::new(f64::NEG_INFINITY, 0.0), &Interval::new(0.0, f64::INFINITY))
    }
}

/// `P_x(U_{κ⁻_0} ∈ A, U_{κ⁻_0−} ∈ B)` for hyper-exponential jumps.
pub fn overshoot_undershoot(
    model: &LevyModel,
    x: f64,
    refraction: &RefractionConfig,
    a: &Interval,
    b: &Interval,
) -> Result<IdentityResult> {
    OvershootLaw::new(model, x, refraction)?.rectangle_mass(a, b)
}

/// One-sided derivatives of the dividend value at the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PastingDiagnostics {
    pub left_deriv: f64,
    pub right_deriv: f64,
    pub gap: f64,
    /// `φ ∫_0^∞ e^{−φy} W'(y + b) dy − W'(b)`.
    pub condition_residual: f64,
    pub condition_holds: bool,
}

/// Residual tolerance of the pasting condition, relative to `1 + W'(b)`.
pub const PASTING_TOLERANCE: f64 = 1e-8;

/// `V'(b−) = W'(b)/K`, `V'(b+) = −δ𝕎(0) + W'(b)(1 + δ𝕎(0))/K`.
pub fn smooth_pasting_gap(model: &LevyModel, refraction: &RefractionConfig, q: f64) -> Result<PastingDiagnostics> {
    if !(q > 0.0) {
        return Err(Error::NonPositiveQ { q });
    }
    let ctx = Refracted::new(model, refraction, q)?;
    let k = dividend_denominator(&ctx, refraction.b)?.value;
    let w1 = ctx.scale().w1(refraction.b);
    let ww0 = ctx.refracted_scale().value_at_zero();
    let dw = refraction.delta * ww0;
    let left = w1 / k;
    let right = -dw + w1 * (1.0 + dw) / k;
    let residual = k - w1;
    Ok(PastingDiagnostics {
        left_deriv: left,
        right_deriv: right,
        gap: dw * (w1 - k) / k,
        condition_residual: residual,
        condition_holds: residual.abs() < PASTING_TOLERANCE * (1.0 + w1.abs()),
    })
}

/// Smallest threshold in `[0, b_max]` at which the pasting condition holds,
/// for the drift reduction `delta`.
pub fn pasting_threshold(model: &LevyModel, delta: f64, q: f64, b_max: f64) -> Result<Option<f64>> {
    if !(q > 0.0) {
        return Err(Error::NonPositiveQ { q });
    }
    let ctx = Refracted::new(model, &RefractionConfig::new(delta, 0.0), q)?;
    let residual = |b: f64| -> f64 {
        match dividend_denominator(&ctx, b) {
            Ok(k) => k.value - ctx.scale().w1(b),
            Err(_) => f64::NAN,
        }
    };
    let n = 400;
    let mut prev = (0.0, residual(0.0));
    for i in 1..=n {
        let b = b_max * i as f64 / n as f64;
        let r = residual(b);
        if prev.1.signum() != r.signum() {
            return Ok(roots::brent(residual, prev.0, b, 1e-14));
        }
        prev = (b, r);
    }
    Ok(None)
}

/// Ruin probability for `ψ(θ) = cθ + θ^α` refracted by `δ` above `b`, with
/// `W(x) = (1 − E_β(−c x^β))/c`, `β = α − 1`.
///
/// The convolution term is integrated in `t = y^β`.
pub fn ruin_probability_stable(x: f64, b: f64, c: f64, delta: f64, alpha: f64) -> Result<IdentityResult> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::invalid("alpha", format!("must lie in (1, 2), got {alpha}")));
    }
    if !(delta > 0.0) {
        return Err(Error::NonPositiveDelta { delta });
    }
    if !(c > delta) || !c.is_finite() {
        return Err(Error::DriftNotDominating { mean: c, delta });
    }
    if !(x >= 0.0 && x.is_finite()) || !(b >= 0.0 && b.is_finite()) {
        return Err(Error::invalid("x", "x and b must be non-negative and finite"));
    }
    if x == 0.0 {
        return Ok(IdentityResult::exact(1.0));
    }
    let beta = alpha - 1.0;
    let cd = c - delta;
    let k = cd / (cd + delta * mittag_leffler(beta, -c * b.powf(beta)));
    let mut brace = Estimate::exact(1.0 - mittag_leffler(beta, -c * x.powf(beta)));
    if x > b {
        let f = |t: f64| {
            let y = t.powf(1.0 / beta);
            let inner = 1.0 - mittag_leffler(beta, -cd * (x - y).max(0.0).powf(beta));
            inner * mittag_leffler_deriv(beta, -c * t)
        };
        let i = quadrature::integrate(f, b.powf(beta), x.powf(beta), DEFAULT_TOLERANCE)?;
        brace = brace + Estimate::new(i.value, i.error.max(f64::MIN_POSITIVE)) * (c * delta / cd);
    }
    Ok(IdentityResult::from_estimate(-(brace * k) + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::Canonical;

    fn m1() -> (LevyModel, RefractionConfig) {
        (Canonical::M1.model(), Canonical::M1.refraction())
    }

    #[test]
    fn dividend_forms_agree() {
        let (m, r) = m1();
        for q in [0.05, 0.1, 0.5] {
            let h = HyperExpDividend::new(&m, &r, q).unwrap();
            let ctx = Refracted::new(&m, &r, q).unwrap();
            for i in 0..=20 {
                let x = 0.25 * i as f64;
                let g = ctx.dividend_value(x).unwrap().value;
                assert!((g - h.value(x)).abs() < 1e-9, "q={q} x={x}: {g} vs {}", h.value(x));
            }
        }
    }

    #[test]
    fn dividend_limits_and_continuity() {
        let (m, r) = m1();
        let q = 0.1;
        let h = HyperExpDividend::new(&m, &r, q).unwrap();
        assert!(h.brackets()[0].abs() < 1e-12);
        assert!((h.value(r.b) - h.upper_branch(r.b)).abs() < 1e-12);
        assert!((h.value(r.b + 50.0) - r.delta / q).abs() < 1e-6);
        let mut prev = 0.0;
        for i in 0..100 {
            let v = h.value(0.1 * i as f64);
            assert!(v >= prev && v <= r.delta / q);
            prev = v;
        }
    }

    #[test]
    fn pasting_gap_matches_finite_differences() {
        let (m, r) = m1();
        let q = 0.1;
        let p = smooth_pasting_gap(&m, &r, q).unwrap();
        let ctx = Refracted::new(&m, &r, q).unwrap();
        let v = |x: f64| ctx.dividend_value(x).unwrap().value;
        let h = 1e-5;
        let left = (v(r.b) - v(r.b - h)) / h;
        let right = (v(r.b + h) - v(r.b)) / h;
        assert!((left - p.left_deriv).abs() < 1e-4, "{left} {}", p.left_deriv);
        assert!((right - p.right_deriv).abs() < 1e-4, "{right} {}", p.right_deriv);
        assert!(p.gap.abs() > 1e-3);
        assert_eq!(p.gap.signum(), -p.condition_residual.signum());
    }

    #[test]
    fn gaussian_part_pastes_smoothly() {
        let m = Canonical::M2.model();
        let p = smooth_pasting_gap(&m, &Canonical::M2.refraction(), 0.1).unwrap();
        assert!(p.gap.abs() < 1e-12);
        assert!((p.left_deriv - p.right_deriv).abs() < 1e-12);
    }

    #[test]
    fn pasting_root_closes_gap() {
        let (m, r) = m1();
        let q = 0.01;
        let b = pasting_threshold(&m, r.delta, q, 20.0).unwrap().expect("root");
        let p = smooth_pasting_gap(&m, &RefractionConfig::new(r.delta, b), q).unwrap();
        assert!(p.gap.abs() < 1e-10 && p.condition_holds, "{p:?}");
    }

    #[test]
    fn overshoot_total_is_ruin() {
        let (m, r) = m1();
        for x in [0.0, 0.5, 1.0, 2.5] {
            let law = OvershootLaw::new(&m, x, &r).unwrap();
            let total = law.total_mass().unwrap().value;
            let ctx = Refracted::new(&m, &r, 0.0).unwrap();
            let ruin = ctx.ruin_probability(x).unwrap().value;
            assert!((total - ruin).abs() < 1e-8, "x={x}: {total} vs {ruin}");
        }
    }

    #[test]
    fn overshoot_rectangles_are_monotone_and_vanish_far_out() {
        let (m, r) = m1();
        let law = OvershootLaw::new(&m, 1.5, &r).unwrap();
        let small = law.rectangle_mass(&Interval::new(-1.0, 0.0), &Interval::new(0.0, 1.0)).unwrap().value;
        let big = law.rectangle_mass(&Interval::new(-2.0, 0.0), &Interval::new(0.0, 2.0)).unwrap().value;
        assert!(0.0 < small && small < big);
        let far = law.rectangle_mass(&Interval::new(-1e6, -1e5), &Interval::new(0.0, 5.0)).unwrap().value;
        assert!(far.abs() < 1e-12);
        for (u, y) in [(-0.5, 0.2), (-1.0, 1.5), (-0.1, 3.0)] {
            assert!(law.density(u, y).unwrap() >= 0.0);
        }
    }

    #[test]
    fn stable_ruin_matches_generic_identity() {
        let (m, r) = (Canonical::M3.model(), Canonical::M3.refraction());
        let ctx = Refracted::new(&m, &r, 0.0).unwrap();
        assert_eq!(ruin_probability_stable(0.0, r.b, 1.0, r.delta, 1.5).unwrap().value, 1.0);
        for x in [0.3, 1.0, 2.0, 4.0] {
            let a = ruin_probability_stable(x, r.b, 1.0, r.delta, 1.5).unwrap().value;
            let g = ctx.ruin_probability(x).unwrap().value;
            assert!((a - g).abs() < 1e-8, "x={x}: {a} vs {g}");
        }
    }

    #[test]
    fn stable_ruin_below_threshold_and_at_zero_level() {
        let v = ruin_probability_stable(0.5, 1.0, 1.0, 0.3, 1.5).unwrap().value;
        let k = 0.7 / (0.7 + 0.3 * mittag_leffler(0.5, -1.0));
        assert!((v - (1.0 - k * (1.0 - mittag_leffler(0.5, -0.5f64.sqrt())))).abs() < 1e-14);
        let v0 = ruin_probability_stable(2.0, 0.0, 1.0, 0.3, 1.5).unwrap().value;
        assert!(v0 > 0.0 && v0 < 1.0);
    }
}
