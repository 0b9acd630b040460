//! Monte Carlo oracle: sample paths of `U` and estimates of the functionals
//! whose expectations the identities give in closed form.
//!
//! Paths are generated in blocks of [`BLOCK_SIZE`]; block `k` draws from the
//! ChaCha8 stream `k` of the master seed and blocks are merged in index
//! order, so estimates do not depend on the number of worker threads.

mod engine;
mod path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use path::{simulate_exact_bv, simulate_strong_approx, PathSample, RuinRecord, SlopeTag};

use crate::applications::Interval;
use crate::error::{Error, Result};
use crate::levy_model::{LevyModel, RefractionConfig};
use crate::refracted_identities::ResolventKind;
use crate::scale_functions::ScaleFunction;
use engine::{occupation, Dynamics, End, Observer, Piece, Stops};

pub const BLOCK_SIZE: usize = 2048;

/// Band half-widths whose counts are extrapolated to zero for creeping.
pub const CREEP_BANDS: [f64; 3] = [0.02, 0.01, 0.005];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scheme {
    ExactBV,
    /// Jumps below `eps` dropped with compensated drift, optionally replaced
    /// by a Brownian motion of matching variance; Euler grid `h`.
    StrongApprox { eps: f64, h: f64, gaussian: bool },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ExactBV => "exact-bv",
            Scheme::StrongApprox { .. } => "strong-approx",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scheme: Scheme,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(scheme: Scheme, horizon: f64, n_paths: usize, seed: u64) -> Self {
        SimConfig { scheme, horizon, n_paths, seed }
    }

    /// Horizon with `e^{−qT} = tolerance`.
    pub fn discount_horizon(q: f64, tolerance: f64) -> f64 {
        (1.0 / tolerance).ln() / q
    }
}

/// Quantity whose expectation is estimated.
///
/// Level caps stop a path once `U` reaches them; the time-zero value of the
/// remaining path is then `completion` if given, and zero otherwise, with the
/// classical ruin probability of `X − δt` from the cap counted as bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Functional {
    TwoSidedUp { a: f64 },
    TwoSidedDown { a: f64 },
    OneSidedUp { a: f64 },
    OneSidedDown,
    Ruin {
        level_cap: f64,
        #[serde(default)]
        completion: Option<f64>,
    },
    Creep,
    ResolventMass { kind: ResolventKind, a: f64, set: Interval },
    Dividends,
    Overshoot { overshoot: Interval, undershoot: Interval, level_cap: f64 },
}

impl Functional {
    pub fn name(&self) -> &'static str {
        match self {
            Functional::TwoSidedUp { .. } => "two_sided_up",
            Functional::TwoSidedDown { .. } => "two_sided_down",
            Functional::OneSidedUp { .. } => "one_sided_up",
            Functional::OneSidedDown => "one_sided_down",
            Functional::Ruin { .. } => "ruin",
            Functional::Creep => "creep",
            Functional::ResolventMass { .. } => "resolvent_mass",
            Functional::Dividends => "dividends",
            Functional::Overshoot { .. } => "overshoot",
        }
    }

    fn stops(&self, horizon: f64) -> Stops {
        let (upper, stop_below) = match *self {
            Functional::TwoSidedUp { a } | Functional::TwoSidedDown { a } => (a, true),
            Functional::OneSidedUp { a } => (a, false),
            Functional::OneSidedDown | Functional::Creep | Functional::Dividends => (f64::INFINITY, true),
            Functional::Ruin { level_cap, .. } | Functional::Overshoot { level_cap, .. } => (level_cap, true),
            Functional::ResolventMass { kind, a, .. } => match kind {
                ResolventKind::TwoSided => (a, true),
                ResolventKind::KilledBelow => (f64::INFINITY, true),
                ResolventKind::KilledAbove => (a, false),
                ResolventKind::Free => (f64::INFINITY, false),
            },
        };
        Stops { upper, stop_below, horizon }
    }

    fn is_undiscounted(&self) -> bool {
        matches!(self, Functional::Ruin { .. } | Functional::Overshoot { .. })
    }
}

/// Sample mean with its standard error and a bound on the truncation bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateResult {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
    pub bias_bound: f64,
}

impl EstimateResult {
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.stderr == 0.0 {
            if self.mean == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference) / self.stderr
        }
    }
}

/// Running mean and centred second moment, merged pairwise.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
    capped: usize,
    open: usize,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
            capped: self.capped + o.capped,
            open: self.open + o.open,
        }
    }
}

struct Occupation {
    lo: f64,
    hi: f64,
    q: f64,
    total: f64,
}

impl Observer for Occupation {
    fn piece(&mut self, p: &Piece) {
        self.total += occupation(p, self.lo, self.hi, self.q);
    }
}

/// Least-squares intercept weights for counts in [`CREEP_BANDS`].
fn creep_weights() -> [f64; 3] {
    let n = CREEP_BANDS.len() as f64;
    let mean = CREEP_BANDS.iter().sum::<f64>() / n;
    let ss: f64 = CREEP_BANDS.iter().map(|e| (e - mean) * (e - mean)).sum();
    let mut w = [0.0; 3];
    for (wi, e) in w.iter_mut().zip(CREEP_BANDS) {
        *wi = 1.0 / n - mean * (e - mean) / ss;
    }
    w
}

/// Monte Carlo estimate of `functional` started from `x` with discount `q`.
pub fn estimate_functional(
    model: &LevyModel,
    refraction: &RefractionConfig,
    functional: &Functional,
    x: f64,
    q: f64,
    sim: &SimConfig,
) -> Result<EstimateResult> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::invalid("q", format!("must be non-negative, got {q}")));
    }
    if !x.is_finite() {
        return Err(Error::invalid("x", "must be finite"));
    }
    if sim.n_paths < 2 {
        return Err(Error::invalid("n_paths", "need at least two paths"));
    }
    if !(sim.horizon > 0.0) {
        return Err(Error::invalid("horizon", "must be positive"));
    }
    if functional.is_undiscounted() && q != 0.0 {
        return Err(Error::invalid("q", "ruin and overshoot functionals are undiscounted"));
    }
    let dynamics = Dynamics::new(model, refraction, &sim.scheme)?;
    let stops = functional.stops(sim.horizon);
    let weights = creep_weights();
    let (delta, b) = (refraction.delta, refraction.b);

    let one_path = |rng: &mut ChaCha8Rng, acc: &mut Moments| {
        let (set, scale) = match *functional {
            Functional::ResolventMass { set, .. } => ((set.lo, set.hi), 1.0),
            Functional::Dividends => ((b, f64::INFINITY), delta),
            _ => ((0.0, 0.0), 0.0),
        };
        let mut occ = Occupation { lo: set.0, hi: set.1, q, total: 0.0 };
        let out = if scale > 0.0 { dynamics.run(x, &stops, rng, &mut occ) } else { dynamics.run(x, &stops, rng, &mut ()) };
        let disc = |t: f64| if q == 0.0 { 1.0 } else { (-q * t).exp() };
        let value = match *functional {
            Functional::TwoSidedUp { .. } | Functional::OneSidedUp { .. } => match out.up {
                Some(t) if out.end == End::Above => disc(t),
                _ => 0.0,
            },
            Functional::TwoSidedDown { .. } | Functional::OneSidedDown => match out.ruin {
                Some(r) if out.end == End::Below => disc(r.time),
                _ => 0.0,
            },
            Functional::Ruin { completion, .. } => match out.end {
                End::Below => 1.0,
                End::Above => completion.unwrap_or(0.0),
                End::Horizon => 0.0,
            },
            Functional::Creep => match out.ruin {
                Some(r) if out.end == End::Below => {
                    let hits: f64 =
                        CREEP_BANDS.iter().zip(weights).filter(|(e, _)| r.overshoot > -*e).map(|(_, w)| w).sum();
                    disc(r.time) * hits
                }
                _ => 0.0,
            },
            Functional::ResolventMass { .. } | Functional::Dividends => scale * occ.total,
            Functional::Overshoot { overshoot, undershoot, .. } => match out.ruin {
                Some(r) if out.end == End::Below && overshoot.contains(r.overshoot) && undershoot.contains(r.undershoot) => 1.0,
                _ => 0.0,
            },
        };
        acc.push(value);
        match out.end {
            End::Horizon => acc.open += 1,
            End::Above if functional.is_undiscounted() => acc.capped += 1,
            _ => {}
        }
    };

    let n_blocks = sim.n_paths.div_ceil(BLOCK_SIZE);
    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);
            rng.set_stream(k as u64);
            let size = BLOCK_SIZE.min(sim.n_paths - k * BLOCK_SIZE);
            let mut acc = Moments::default();
            for _ in 0..size {
                one_path(&mut rng, &mut acc);
            }
            acc
        })
        .collect();
    let m = blocks.into_iter().fold(Moments::default(), Moments::merge);
    let n = m.n as f64;
    let stderr = (m.m2 / (n - 1.0) / n).sqrt();

    let open = m.open as f64 / n;
    let mut bias = match functional {
        Functional::ResolventMass { .. } => open * (-q * sim.horizon).exp() / q,
        Functional::Dividends => open * delta * (-q * sim.horizon).exp() / q,
        _ if q > 0.0 => open * (-q * sim.horizon).exp(),
        _ => open,
    };
    if let Functional::Ruin { level_cap, completion: None } | Functional::Overshoot { level_cap, .. } = *functional {
        if m.capped > 0 {
            bias += m.capped as f64 / n * classical_ruin(model, delta, level_cap)?;
        }
    }
    if bias > stderr / 3.0 && bias > 0.0 {
        return Err(Error::BiasBudgetExceeded { bound: bias, budget: stderr / 3.0 });
    }
    Ok(EstimateResult { mean: m.mean, stderr, n: m.n, bias_bound: bias })
}

/// Ruin probability of `X − δt` (no refraction) from `level`.
fn classical_ruin(model: &LevyModel, delta: f64, level: f64) -> Result<f64> {
    let slope = model.mean() - delta;
    if slope <= 0.0 {
        return Ok(1.0);
    }
    let w = ScaleFunction::new(model, delta, 0.0)?;
    Ok((1.0 - slope * w.w(level)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests;
