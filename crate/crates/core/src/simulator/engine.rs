//! Event-driven path engine shared by both schemes.
//!
//! Between jump epochs `U` moves linearly (no diffusion) or by Euler steps
//! on a grid of width `h`; in the latter case level crossings inside a step
//! are detected with the Brownian-bridge exit probability.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Pareto, StandardNormal};

use crate::error::{Error, Result};
use crate::levy_model::{JumpSpec, LevyModel, RefractionConfig};

use super::Scheme;

#[derive(Debug, Clone)]
pub(crate) enum JumpSampler {
    None,
    /// Sizes `shift + Exp(rate_k)` with component `k` chosen from `cumulative`.
    Mixture { rate: f64, cumulative: Vec<f64>, rates: Vec<f64>, shift: f64 },
    Pareto { rate: f64, law: Pareto<f64> },
}

impl JumpSampler {
    fn rate(&self) -> f64 {
        match self {
            JumpSampler::None => 0.0,
            JumpSampler::Mixture { rate, .. } | JumpSampler::Pareto { rate, .. } => *rate,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            JumpSampler::None => 0.0,
            JumpSampler::Mixture { cumulative, rates, shift, .. } => {
                let k = if rates.len() == 1 {
                    0
                } else {
                    let u: f64 = rng.random();
                    cumulative.iter().position(|c| u < *c).unwrap_or(rates.len() - 1)
                };
                let e: f64 = Exp1.sample(rng);
                shift + e / rates[k]
            }
            JumpSampler::Pareto { law, .. } => law.sample(rng),
        }
    }

    fn mixture(lambda: f64, weights: &[f64], rates: &[f64], eps: f64) -> Self {
        let w: Vec<f64> = weights.iter().zip(rates).map(|(a, r)| a * (-r * eps).exp()).collect();
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let cumulative = w
            .iter()
            .map(|x| {
                acc += x / total;
                acc
            })
            .collect();
        JumpSampler::Mixture { rate: lambda * total, cumulative, rates: rates.to_vec(), shift: eps }
    }
}

/// Drift, diffusion and jump law of the simulated process.
#[derive(Debug, Clone)]
pub(crate) struct Dynamics {
    pub drift: f64,
    pub delta: f64,
    pub b: f64,
    pub diffusion: f64,
    pub h: f64,
    pub jumps: JumpSampler,
}

impl Dynamics {
    pub fn new(model: &LevyModel, refraction: &RefractionConfig, scheme: &Scheme) -> Result<Self> {
        let (delta, b) = (refraction.delta, refraction.b);
        match *scheme {
            Scheme::ExactBV => {
                let reason = if model.sigma() > 0.0 {
                    Some("Gaussian part present")
                } else if !model.is_bounded_variation() {
                    Some("jumps of unbounded variation")
                } else {
                    None
                };
                if let Some(reason) = reason {
                    return Err(Error::SchemeMismatch { scheme: "exact-bv", reason: reason.into() });
                }
                let jumps = match model.jumps() {
                    JumpSpec::HyperExponential { lambda, weights, rates } => {
                        JumpSampler::mixture(*lambda, weights, rates, 0.0)
                    }
                    _ => JumpSampler::None,
                };
                Ok(Dynamics { drift: model.drift(), delta, b, diffusion: 0.0, h: f64::INFINITY, jumps })
            }
            Scheme::StrongApprox { eps, h, gaussian } => {
                if !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::invalid("eps", format!("must be positive, got {eps}")));
                }
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::invalid("h", format!("must be positive, got {h}")));
                }
                let spec = model.jumps();
                let drift = model.mean() + spec.tail_first_moment(eps);
                let small = if gaussian { spec.small_jump_variance(eps) } else { 0.0 };
                let diffusion = (model.sigma() * model.sigma() + small).sqrt();
                let jumps = match spec {
                    JumpSpec::HyperExponential { lambda, weights, rates } => {
                        JumpSampler::mixture(*lambda, weights, rates, eps)
                    }
                    JumpSpec::StableTail { alpha } => {
                        let rate = JumpSpec::stable_constant(*alpha) * eps.powf(-alpha) / alpha;
                        let law = Pareto::new(eps, *alpha).map_err(|e| Error::invalid("eps", e.to_string()))?;
                        JumpSampler::Pareto { rate, law }
                    }
                    JumpSpec::NoJumps => JumpSampler::None,
                };
                if diffusion == 0.0 && drift - delta <= 0.0 {
                    return Err(Error::SchemeMismatch {
                        scheme: "strong-approx",
                        reason: format!("refracted drift {} is not positive", drift - delta),
                    });
                }
                Ok(Dynamics { drift, delta, b, diffusion, h, jumps })
            }
        }
    }
}

/// Levels at which a path is stopped.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stops {
    pub upper: f64,
    pub stop_below: bool,
    pub horizon: f64,
}

/// A stretch without jumps from `(t0, u0)` to `(t1, u1)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub u0: f64,
    pub u1: f64,
    /// Whether the drift reduction applied on this stretch.
    pub refracted: bool,
    /// Gaussian increment (zero on exact linear pieces).
    pub noise: f64,
}

pub(crate) trait Observer {
    fn piece(&mut self, _p: &Piece) {}
    fn jump(&mut self, _t: f64, _before: f64, _after: f64) {}
}

impl Observer for () {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Ruin {
    pub time: f64,
    pub undershoot: f64,
    pub overshoot: f64,
    pub creep: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum End {
    Above,
    Below,
    Horizon,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub end: End,
    pub time: f64,
    pub ruin: Option<Ruin>,
    pub up: Option<f64>,
}

impl Dynamics {
    pub fn run<R: Rng + ?Sized, O: Observer>(&self, x0: f64, stops: &Stops, rng: &mut R, obs: &mut O) -> Outcome {
        let mut out = Outcome { end: End::Horizon, time: stops.horizon, ruin: None, up: None };
        if x0 >= stops.upper {
            out.up = Some(0.0);
            out.end = End::Above;
            out.time = 0.0;
            return out;
        }
        let rate = self.jumps.rate();
        let mut t = 0.0;
        let mut u = x0;
        let mut next_jump = waiting_time(rng, rate);
        let mut step = 0u64;
        loop {
            let grid = if self.diffusion > 0.0 { (step + 1) as f64 * self.h } else { f64::INFINITY };
            let t_next = next_jump.min(grid).min(stops.horizon);
            let flow = if self.diffusion > 0.0 {
                self.euler(t, t_next, u, stops, rng, obs, &mut out)
            } else {
                self.linear(t, t_next, u, stops, obs, &mut out)
            };
            match flow {
                Flow::Stop => return out,
                Flow::Continue(v) => u = v,
            }
            t = t_next;
            if t >= stops.horizon {
                out.end = End::Horizon;
                out.time = stops.horizon;
                return out;
            }
            if t == grid {
                step += 1;
            }
            if t == next_jump {
                let before = u;
                u -= self.jumps.sample(rng);
                obs.jump(t, before, u);
                if u < 0.0 && out.ruin.is_none() {
                    out.ruin = Some(Ruin { time: t, undershoot: before, overshoot: u, creep: false });
                    if stops.stop_below {
                        out.end = End::Below;
                        out.time = t;
                        return out;
                    }
                }
                next_jump = t + waiting_time(rng, rate);
            }
        }
    }

    fn linear<O: Observer>(&self, t0: f64, t1: f64, u0: f64, stops: &Stops, obs: &mut O, out: &mut Outcome) -> Flow {
        let (mut t, mut u) = (t0, u0);
        while t < t1 {
            let refracted = u >= self.b;
            let slope = if refracted { self.drift - self.delta } else { self.drift };
            let mut end = t1;
            if !refracted && slope > 0.0 {
                end = end.min(t + (self.b - u) / slope);
            }
            let mut v = if end == t1 { u + slope * (t1 - t) } else { self.b };
            let mut hit = false;
            if out.up.is_none() && slope > 0.0 && v >= stops.upper {
                end = t + (stops.upper - u) / slope;
                v = stops.upper;
                hit = true;
            }
            obs.piece(&Piece { t0: t, t1: end, u0: u, u1: v, refracted, noise: 0.0 });
            t = end;
            u = v;
            if hit {
                out.up = Some(t);
                if stops.upper.is_finite() {
                    out.end = End::Above;
                    out.time = t;
                    return Flow::Stop;
                }
            }
        }
        Flow::Continue(u)
    }

    #[allow(clippy::too_many_arguments)]
    fn euler<R: Rng + ?Sized, O: Observer>(
        &self,
        t0: f64,
        t1: f64,
        u: f64,
        stops: &Stops,
        rng: &mut R,
        obs: &mut O,
        out: &mut Outcome,
    ) -> Flow {
        let dt = t1 - t0;
        if dt <= 0.0 {
            return Flow::Continue(u);
        }
        let refracted = u > self.b;
        let slope = if refracted { self.drift - self.delta } else { self.drift };
        let z: f64 = StandardNormal.sample(rng);
        let noise = self.diffusion * dt.sqrt() * z;
        let v = u + slope * dt + noise;
        let var = self.diffusion * self.diffusion * dt;
        let crossed = |gap0: f64, gap1: f64, rng: &mut R| {
            if gap1 <= 0.0 {
                return true;
            }
            let p = (-2.0 * gap0 * gap1 / var).exp();
            rng.random::<f64>() < p
        };
        let piece = Piece { t0, t1, u0: u, u1: v, refracted, noise };
        if out.ruin.is_none() && u >= 0.0 && crossed(u, v, rng) {
            obs.piece(&piece);
            out.ruin = Some(Ruin { time: t1, undershoot: 0.0, overshoot: 0.0, creep: true });
            if stops.stop_below {
                out.end = End::Below;
                out.time = t1;
                return Flow::Stop;
            }
            return Flow::Continue(v);
        }
        if out.up.is_none() && stops.upper.is_finite() && crossed(stops.upper - u, stops.upper - v, rng) {
            obs.piece(&piece);
            out.up = Some(t1);
            out.end = End::Above;
            out.time = t1;
            return Flow::Stop;
        }
        obs.piece(&piece);
        Flow::Continue(v)
    }
}

fn waiting_time<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    if rate > 0.0 {
        let e: f64 = Exp1.sample(rng);
        e / rate
    } else {
        f64::INFINITY
    }
}

enum Flow {
    Continue(f64),
    Stop,
}

/// `∫ e^{−qt} 1{U_t ∈ (lo, hi]} dt` over a piece, `U` interpolated linearly.
pub(crate) fn occupation(p: &Piece, lo: f64, hi: f64, q: f64) -> f64 {
    let dt = p.t1 - p.t0;
    if dt <= 0.0 {
        return 0.0;
    }
    let du = p.u1 - p.u0;
    let (s0, s1) = if du == 0.0 {
        if p.u0 > lo && p.u0 <= hi {
            (0.0, 1.0)
        } else {
            return 0.0;
        }
    } else {
        let a = (lo - p.u0) / du;
        let b = (hi - p.u0) / du;
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        (a.max(0.0), b.min(1.0))
    };
    if s1 <= s0 {
        return 0.0;
    }
    let (ta, tb) = (p.t0 + s0 * dt, p.t0 + s1 * dt);
    if q == 0.0 {
        tb - ta
    } else {
        ((-q * ta).exp() - (-q * tb).exp()) / q
    }
}
