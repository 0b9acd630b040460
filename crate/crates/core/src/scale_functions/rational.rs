//! Partial-fraction scale functions for exponents that are rational in `θ`
//! (hyper-exponential jumps, possibly with a Gaussian part, and the jump-free
//! case).

use crate::error::{Error, Result};
use crate::levy_model::{JumpSpec, LevyModel};
use crate::roots;

/// `W(x) = Σ_i D_i e^{θ_i x}` where `θ_i` are the roots of `ψ(θ) − δθ = q`
/// and `D_i = 1/(ψ'(θ_i) − δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperExpClosedForm {
    /// Roots in decreasing order; `roots[0]` is the right inverse.
    pub roots: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub q: f64,
}

const SEPARATION: f64 = 1e-10;

impl HyperExpClosedForm {
    pub fn new(model: &LevyModel, delta: f64, q: f64) -> Result<Self> {
        let (lambda, weights, rates): (f64, &[f64], &[f64]) = match model.jumps() {
            JumpSpec::HyperExponential { lambda, weights, rates } => (*lambda, weights, rates),
            JumpSpec::NoJumps => (0.0, &[], &[]),
            JumpSpec::StableTail { .. } => {
                return Err(Error::Unsupported("partial fractions need hyper-exponential jumps".into()))
            }
        };
        let d = model.drift() - delta;
        let s2 = 0.5 * model.sigma() * model.sigma();
        let slope0 = model.mean() - delta;
        if q == 0.0 && slope0.abs() <= 1e-12 * model.drift().abs().max(1.0) {
            return Err(Error::DegenerateZeroDrift);
        }
        if s2 == 0.0 && d <= 0.0 {
            return Err(Error::HypothesisHViolation { c: model.drift(), delta });
        }

        // P(θ) = (ψ_Y(θ) − q) Π_k (α_k + θ), with the root at 0 divided out
        // when q = 0.
        let deflate = q == 0.0;
        let poly = |t: f64| -> f64 {
            let mut prod = 1.0;
            for r in rates {
                prod *= r + t;
            }
            let mut cross = 0.0;
            for (k, a) in weights.iter().enumerate() {
                let mut p = *a;
                for (l, r) in rates.iter().enumerate() {
                    if l != k {
                        p *= r + t;
                    }
                }
                cross += p;
            }
            if deflate {
                (d + s2 * t) * prod - lambda * cross
            } else {
                (d * t + s2 * t * t - q) * prod - lambda * t * cross
            }
        };

        let theta0 = model.phi_inverse(delta, q);
        let mut found = vec![theta0];
        if deflate && theta0 > 0.0 {
            found.push(0.0);
        }

        let mut poles: Vec<f64> = rates.iter().map(|r| -r).collect();
        poles.sort_by(|a, b| b.total_cmp(a));
        let mut brackets = Vec::new();
        let first_negative_needed = !(deflate && theta0 > 0.0);
        let upper = 0.0;
        match poles.first() {
            Some(&p1) => {
                if first_negative_needed {
                    brackets.push((p1, upper));
                }
                for w in poles.windows(2) {
                    brackets.push((w[1], w[0]));
                }
                if s2 > 0.0 {
                    let last = *poles.last().expect("non-empty");
                    brackets.push((left_bracket(&poly, last), last));
                }
            }
            None => {
                if s2 > 0.0 && first_negative_needed {
                    brackets.push((left_bracket(&poly, 0.0), upper));
                }
            }
        }
        for (lo, hi) in brackets {
            let tol = 1e-15 * lo.abs().max(hi.abs()).max(1.0);
            let r = roots::brent(poly, lo, hi, tol).ok_or(Error::RootSeparationFailure { gap: 0.0 })?;
            found.push(polish(model, delta, q, r, lo, hi));
        }
        found.sort_by(|a, b| b.total_cmp(a));
        for w in found.windows(2) {
            let gap = w[0] - w[1];
            if gap < SEPARATION {
                return Err(Error::RootSeparationFailure { gap });
            }
        }
        let coefficients = found.iter().map(|t| 1.0 / (model.psi_prime(*t) - delta)).collect();
        Ok(HyperExpClosedForm { roots: found, coefficients, q })
    }

    pub fn w(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.roots.iter().zip(&self.coefficients).map(|(t, d)| d * (t * x).exp()).sum()
    }

    pub fn w1(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.roots.iter().zip(&self.coefficients).map(|(t, d)| d * t * (t * x).exp()).sum()
    }

    pub fn w2(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        self.roots.iter().zip(&self.coefficients).map(|(t, d)| d * t * t * (t * x).exp()).sum()
    }

    /// `e^{−θ_0 x} W^{(k)}(x)`.
    pub fn tilted(&self, k: i32, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let t0 = self.roots[0];
        self.roots
            .iter()
            .zip(&self.coefficients)
            .map(|(t, d)| d * t.powi(k) * ((t - t0) * x).exp())
            .sum()
    }

    /// `θ_0^k D_0 − e^{−θ_0 y} W^{(k)}(y)`: how far the tilted derivative is
    /// from its limit.
    pub fn deficit(&self, k: i32, y: f64) -> f64 {
        let t0 = self.roots[0];
        if y < 0.0 {
            return self.coefficients[0] * t0.powi(k);
        }
        -self.roots[1..]
            .iter()
            .zip(&self.coefficients[1..])
            .map(|(t, d)| d * t.powi(k) * ((t - t0) * y).exp())
            .sum::<f64>()
    }

    /// `∫_0^∞ e^{−εu} deficit(k, u + s) du` for `s ≥ 0`, `ε ≥ 0`.
    pub fn deficit_transform(&self, k: i32, s: f64, eps: f64) -> f64 {
        let t0 = self.roots[0];
        -self.roots[1..]
            .iter()
            .zip(&self.coefficients[1..])
            .map(|(t, d)| d * t.powi(k) * ((t - t0) * s).exp() / (eps + t0 - t))
            .sum::<f64>()
    }

    /// `∫_0^x W(y) dy`.
    pub fn integral(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.roots
            .iter()
            .zip(&self.coefficients)
            .map(|(t, d)| if *t == 0.0 { d * x } else { d * (t * x).exp_m1() / t })
            .sum()
    }
}

fn left_bracket<P: Fn(f64) -> f64>(poly: &P, right: f64) -> f64 {
    let target = poly(right).signum();
    let mut step = 1.0;
    loop {
        let lo = right - step;
        if poly(lo).signum() != target || step > 1e12 {
            return lo;
        }
        step *= 2.0;
    }
}

/// One or two Newton steps on `ψ_Y − q` to remove the rounding of the
/// polynomial form.
fn polish(model: &LevyModel, delta: f64, q: f64, r: f64, lo: f64, hi: f64) -> f64 {
    let mut x = r;
    for _ in 0..2 {
        let Ok(f) = model.laplace_exponent(x) else { return r };
        let step = (f - delta * x - q) / (model.psi_prime(x) - delta);
        let next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            return x;
        }
        x = next;
    }
    x
}
