//! Full path records.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::levy_model::{LevyModel, RefractionConfig};

use super::engine::{Dynamics, Observer, Piece, Stops};
use super::Scheme;

/// Drift regime on the stretch ending at an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopeTag {
    /// Full drift, `U ≤ b`.
    Free,
    /// Drift reduced by `δ`, `U > b`.
    Refracted,
}

/// Ruin epoch with the positions just before and at it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinRecord {
    pub time: f64,
    /// `U_{κ⁻_0−}`.
    pub undershoot: f64,
    /// `U_{κ⁻_0}`.
    pub overshoot: f64,
    /// Ruin by continuous passage rather than by a jump.
    pub creep: bool,
}

/// One simulated trajectory of `U` on `[0, T]`.
///
/// Event `i` is a jump, a crossing of `b`, a grid step or the horizon;
/// `left_values[i]` is `U_{t_i−}` and `values[i]` is `U_{t_i}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub x0: f64,
    pub horizon: f64,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub left_values: Vec<f64>,
    pub slopes: Vec<SlopeTag>,
    /// `X_t − X_0` at each event.
    pub free_path: Vec<f64>,
    /// `∫_0^t 1{U_s > b} ds` at each event.
    pub occupation: Vec<f64>,
    pub running_sup: Vec<f64>,
    pub running_inf: Vec<f64>,
    pub ruin: Option<RuinRecord>,
}

struct Recorder {
    drift: f64,
    path: PathSample,
    x: f64,
    occ: f64,
}

impl Recorder {
    fn push(&mut self, t: f64, left: f64, value: f64, tag: SlopeTag) {
        let p = &mut self.path;
        let sup = p.running_sup.last().copied().unwrap_or(p.x0).max(left).max(value);
        let inf = p.running_inf.last().copied().unwrap_or(p.x0).min(left).min(value);
        p.times.push(t);
        p.left_values.push(left);
        p.values.push(value);
        p.slopes.push(tag);
        p.free_path.push(self.x);
        p.occupation.push(self.occ);
        p.running_sup.push(sup);
        p.running_inf.push(inf);
    }
}

impl Observer for Recorder {
    fn piece(&mut self, p: &Piece) {
        let dt = p.t1 - p.t0;
        if dt <= 0.0 {
            return;
        }
        self.x += self.drift * dt + p.noise;
        if p.refracted {
            self.occ += dt;
        }
        let tag = if p.refracted { SlopeTag::Refracted } else { SlopeTag::Free };
        self.push(p.t1, p.u1, p.u1, tag);
    }

    fn jump(&mut self, t: f64, before: f64, after: f64) {
        self.x -= before - after;
        let n = self.path.times.len();
        if n > 0 && self.path.times[n - 1] == t {
            let p = &mut self.path;
            p.values[n - 1] = after;
            p.free_path[n - 1] = self.x;
            p.running_inf[n - 1] = p.running_inf[n - 1].min(after);
        } else {
            let tag = self.path.slopes.last().copied().unwrap_or(SlopeTag::Free);
            self.push(t, before, after, tag);
        }
    }
}

impl PathSample {
    /// First time `U ≥ a`.
    pub fn first_passage_above(&self, a: f64) -> Option<f64> {
        if self.x0 >= a {
            return Some(0.0);
        }
        let mut t_prev = 0.0;
        let mut u_prev = self.x0;
        for i in 0..self.times.len() {
            let (t, left) = (self.times[i], self.left_values[i]);
            if left >= a {
                // paths only creep upward, so interpolate on the stretch
                let s = (a - u_prev) / (left - u_prev);
                return Some(t_prev + s * (t - t_prev));
            }
            t_prev = t;
            u_prev = self.values[i];
        }
        None
    }

    /// `max_i |U_{t_i} − (x0 + X_{t_i} − δ ∫_0^{t_i} 1{U_s > b} ds)|`.
    pub fn sde_residual(&self, delta: f64) -> f64 {
        (0..self.times.len())
            .map(|i| (self.values[i] - (self.x0 + self.free_path[i] - delta * self.occupation[i])).abs())
            .fold(0.0, f64::max)
    }

    /// Rows `(time, U, slope tag)` for a trace file.
    pub fn trace(&self) -> impl Iterator<Item = (f64, f64, SlopeTag)> + '_ {
        (0..self.times.len()).map(move |i| (self.times[i], self.values[i], self.slopes[i]))
    }
}

fn record(model: &LevyModel, refraction: &RefractionConfig, scheme: &Scheme, x0: f64, horizon: f64, seed: u64) -> Result<PathSample> {
    let dynamics = Dynamics::new(model, refraction, scheme)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = Recorder {
        drift: dynamics.drift,
        path: PathSample {
            x0,
            horizon,
            times: Vec::new(),
            values: Vec::new(),
            left_values: Vec::new(),
            slopes: Vec::new(),
            free_path: Vec::new(),
            occupation: Vec::new(),
            running_sup: Vec::new(),
            running_inf: Vec::new(),
            ruin: None,
        },
        x: 0.0,
        occ: 0.0,
    };
    let stops = Stops { upper: f64::INFINITY, stop_below: false, horizon };
    let out = dynamics.run(x0, &stops, &mut rng, &mut rec);
    let mut path = rec.path;
    path.ruin = out.ruin.map(|r| RuinRecord {
        time: r.time,
        undershoot: r.undershoot,
        overshoot: r.overshoot,
        creep: r.creep,
    });
    Ok(path)
}

/// Exact path of a bounded-variation model: linear stretches with slope `c`
/// or `c − δ`, switching at the crossings of `b`, and exact jump epochs.
pub fn simulate_exact_bv(
    model: &LevyModel,
    refraction: &RefractionConfig,
    x0: f64,
    horizon: f64,
    seed: u64,
) -> Result<PathSample> {
    record(model, refraction, &Scheme::ExactBV, x0, horizon, seed)
}

/// Path of the approximation keeping jumps of size at least `eps`.
#[allow(clippy::too_many_arguments)]
pub fn simulate_strong_approx(
    model: &LevyModel,
    refraction: &RefractionConfig,
    x0: f64,
    horizon: f64,
    seed: u64,
    eps: f64,
    h: f64,
    gaussian: bool,
) -> Result<PathSample> {
    record(model, refraction, &Scheme::StrongApprox { eps, h, gaussian }, x0, horizon, seed)
}
