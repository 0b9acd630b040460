//! One function per subcommand.

use refracted::applications::{
    dividend_value, dividend_value_hyperexp, overshoot_undershoot, pasting_threshold, ruin_probability_stable,
    smooth_pasting_gap, DividendQuery, Interval,
};
use refracted::refracted_identities::{
    creeping, one_sided_down, one_sided_up, resolvent_free, resolvent_killed_above, resolvent_killed_below,
    resolvent_two_sided, ruin_probability, two_sided_down, two_sided_up, ExitQuery, IdentityResult, Method,
    ResolventDensity, ResolventKind,
};
use refracted::scale_functions::ScaleFunction;
use refracted::simulator::{estimate_functional, simulate_exact_bv, simulate_strong_approx, Scheme, SimConfig};
use refracted::{Error, JumpSpec, Result};
use serde_json::Value;

use crate::config::{require, Direction, RunConfig};
use crate::output::{num, object, Output, Table};

/// Settings given on the command line that override the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub paths: Option<usize>,
}

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_PATHS: usize = 100_000;

fn method_name(m: Method) -> Value {
    serde_json::to_value(m).expect("method serialises")
}

fn identity(r: IdentityResult, query: Value) -> Output {
    Output::record(object([
        ("value", num(r.value)),
        ("stderr_analytic", num(r.quadrature_error)),
        ("method", method_name(r.method)),
        ("query", query),
    ]))
}

fn interval(i: &Interval) -> Value {
    object([("lo", num(i.lo)), ("hi", num(i.hi))])
}

pub fn cmd_scale(cfg: &RunConfig) -> Result<Output> {
    let (model, refraction) = cfg.model()?;
    let p = &cfg.params;
    let q = p.q.unwrap_or(0.0);
    let delta = if p.refracted.unwrap_or(false) {
        refraction.ok_or_else(|| Error::Config("`refracted` needs `delta`".into()))?.delta
    } else {
        0.0
    };
    let x_max = p.x_max.unwrap_or(10.0);
    let n = p.points.unwrap_or(101);
    if n < 2 || !(x_max > 0.0) {
        return Err(Error::Config("need `points` ≥ 2 and `x_max` > 0".into()));
    }
    let sf = ScaleFunction::new(&model, delta, q)?;
    let second = p.second_derivative.unwrap_or(false);
    if second && !sf.has_second_derivative() {
        return Err(Error::SecondDerivativeUnavailable);
    }
    let mut header = vec!["x", "W", "Wprime", "Z"];
    if second {
        header.push("Wsecond");
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let x = x_max * i as f64 / (n - 1) as f64;
        if x > 0.0 {
            sf.diagnose(x)?;
        }
        let mut row = vec![x, sf.w(x), sf.w1(x), sf.z(x)];
        if second {
            row.push(sf.w2(x));
        }
        rows.push(row);
    }
    let table = Table { header, rows };
    let record = object([
        ("q", num(q)),
        ("delta", num(delta)),
        ("method", serde_json::to_value(sf.method()).unwrap_or(Value::Null)),
        ("rows", table.to_json()),
    ]);
    Ok(Output { record, table: Some(table) })
}

pub fn cmd_exit(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let x = require(p.x, "x")?;
    let q = p.q.unwrap_or(0.0);
    let dir = p.direction.unwrap_or(Direction::Up);
    let one_sided = p.one_sided.unwrap_or(p.a.is_none());
    let (name, res) = match (one_sided, dir) {
        (false, Direction::Up) => ("two_sided_up", two_sided_up(&model, &ExitQuery::new(x, require(p.a, "a")?, q, r))?),
        (false, Direction::Down) => {
            ("two_sided_down", two_sided_down(&model, &ExitQuery::new(x, require(p.a, "a")?, q, r))?)
        }
        (true, Direction::Up) => ("one_sided_up", one_sided_up(&model, x, require(p.a, "a")?, q, &r)?),
        (true, Direction::Down) => ("one_sided_down", one_sided_down(&model, x, q, &r)?),
    };
    let mut query = vec![("x", num(x)), ("q", num(q))];
    if let Some(a) = p.a {
        query.push(("a", num(a)));
    }
    let mut out = identity(res, object(query));
    if let Value::Object(m) = &mut out.record {
        m.insert("identity".into(), Value::String(name.into()));
    }
    Ok(out)
}

pub fn cmd_ruin(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let x = require(cfg.params.x, "x")?;
    Ok(identity(ruin_probability(&model, x, &r)?, object([("x", num(x))])))
}

fn resolvent(cfg: &RunConfig) -> Result<(ResolventDensity, ResolventKind, f64, f64, f64)> {
    let (model, r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let x = require(p.x, "x")?;
    let q = p.q.unwrap_or(0.0);
    let kind = p.kind.unwrap_or(ResolventKind::TwoSided);
    let a = p.a.unwrap_or(f64::INFINITY);
    let d = match kind {
        ResolventKind::TwoSided => resolvent_two_sided(&model, x, require(p.a, "a")?, q, &r)?,
        ResolventKind::KilledBelow => resolvent_killed_below(&model, x, q, &r)?,
        ResolventKind::KilledAbove => resolvent_killed_above(&model, x, require(p.a, "a")?, q, &r)?,
        ResolventKind::Free => resolvent_free(&model, x, q, &r)?,
    };
    Ok((d, kind, x, a, q))
}

pub fn cmd_resolvent(cfg: &RunConfig) -> Result<Output> {
    let (d, kind, x, a, q) = resolvent(cfg)?;
    let p = &cfg.params;
    let set = p.set.unwrap_or(Interval::new(f64::NEG_INFINITY, f64::INFINITY));
    let mass = d.mass(set.lo, set.hi)?;
    let (lo, hi) = d.window();
    let y_min = p.y_min.unwrap_or(if lo.is_finite() { lo } else { x - 5.0 });
    let y_max = p.y_max.unwrap_or(if hi.is_finite() { hi } else { x + 5.0 });
    let n = p.points.unwrap_or(101).max(2);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let y = y_min + (y_max - y_min) * i as f64 / (n - 1) as f64;
        rows.push(vec![y, d.density(y)?]);
    }
    let table = Table { header: vec!["y", "density"], rows };
    let record = object([
        ("value", num(mass.value)),
        ("stderr_analytic", num(mass.error)),
        ("method", method_name(d.method())),
        (
            "query",
            object([
                ("kind", serde_json::to_value(kind).expect("kind serialises")),
                ("x", num(x)),
                ("a", num(a)),
                ("q", num(q)),
                ("set", interval(&set)),
            ]),
        ),
    ]);
    Ok(Output { record, table: Some(table) })
}

pub fn cmd_creep(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let x = require(cfg.params.x, "x")?;
    let q = cfg.params.q.unwrap_or(0.0);
    Ok(identity(creeping(&model, x, q, &r)?, object([("x", num(x)), ("q", num(q))])))
}

pub fn cmd_dividends(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let query = DividendQuery::new(require(p.x, "x")?, require(p.q, "q")?, r);
    let closed = p.closed_form.unwrap_or(false);
    let res = if closed { dividend_value_hyperexp(&model, &query)? } else { dividend_value(&model, &query)? };
    Ok(identity(
        res,
        object([
            ("x", num(query.x)),
            ("q", num(query.q)),
            ("delta", num(r.delta)),
            ("b", num(r.b)),
            ("closed_form", Value::Bool(closed)),
        ]),
    ))
}

pub fn cmd_overshoot(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let x = require(p.x, "x")?;
    let a = p.overshoot.unwrap_or(Interval::new(f64::NEG_INFINITY, 0.0));
    let b = p.undershoot.unwrap_or(Interval::new(0.0, f64::INFINITY));
    let res = overshoot_undershoot(&model, x, &r, &a, &b)?;
    Ok(identity(res, object([("x", num(x)), ("overshoot", interval(&a)), ("undershoot", interval(&b))])))
}

pub fn cmd_pasting(cfg: &RunConfig) -> Result<Output> {
    let (model, mut r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let q = require(p.q, "q")?;
    let mut threshold = Value::Null;
    if p.find_threshold.unwrap_or(false) {
        let b_max = p.b_max.unwrap_or(20.0);
        match pasting_threshold(&model, r.delta, q, b_max)? {
            Some(b) => {
                threshold = num(b);
                r.b = b;
            }
            None => threshold = Value::String(format!("no root in [0, {b_max}]")),
        }
    }
    let d = smooth_pasting_gap(&model, &r, q)?;
    Ok(Output::record(object([
        ("left_deriv", num(d.left_deriv)),
        ("right_deriv", num(d.right_deriv)),
        ("gap", num(d.gap)),
        ("condition_residual", num(d.condition_residual)),
        ("condition_holds", Value::Bool(d.condition_holds)),
        ("threshold", threshold),
        ("query", object([("q", num(q)), ("delta", num(r.delta)), ("b", num(r.b))])),
    ])))
}

pub fn cmd_stable_ruin(cfg: &RunConfig) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let alpha = match model.jumps() {
        JumpSpec::StableTail { alpha } if model.sigma() == 0.0 => *alpha,
        _ => return Err(Error::Unsupported("stable-ruin needs stable jumps and no Gaussian part".into())),
    };
    let x = require(cfg.params.x, "x")?;
    let c = model.drift();
    let res = ruin_probability_stable(x, r.b, c, r.delta, alpha)?;
    Ok(identity(
        res,
        object([("x", num(x)), ("b", num(r.b)), ("c", num(c)), ("delta", num(r.delta)), ("alpha", num(alpha))]),
    ))
}

pub fn sim_config(cfg: &RunConfig, ov: Overrides) -> Result<SimConfig> {
    let p = &cfg.params;
    let scheme = p.scheme.unwrap_or(Scheme::ExactBV);
    let horizon = p.horizon.unwrap_or(100.0);
    let n = ov.paths.or(p.n_paths).unwrap_or(DEFAULT_PATHS);
    let seed = ov.seed.or(p.seed).unwrap_or(DEFAULT_SEED);
    Ok(SimConfig::new(scheme, horizon, n, seed))
}

pub fn cmd_simulate(cfg: &RunConfig, ov: Overrides) -> Result<Output> {
    let (model, r) = cfg.refracted_model()?;
    let p = &cfg.params;
    let f = p.functional.ok_or_else(|| Error::Config("missing parameter `functional`".into()))?;
    let x = require(p.x, "x")?;
    let q = p.q.unwrap_or(0.0);
    let sim = sim_config(cfg, ov)?;
    let e = estimate_functional(&model, &r, &f, x, q, &sim)?;
    let record = object([
        ("functional", Value::String(f.name().into())),
        ("mean", num(e.mean)),
        ("stderr", num(e.stderr)),
        ("n_paths", Value::from(e.n)),
        ("bias_bound", num(e.bias_bound)),
        ("scheme", Value::String(sim.scheme.name().into())),
        ("seed", Value::from(sim.seed)),
        ("query", object([("x", num(x)), ("q", num(q)), ("horizon", num(sim.horizon))])),
    ]);
    Ok(Output::record(record))
}

/// CSV trace `(time, U, slope)` of the path drawn with the run's seed.
pub fn trace(cfg: &RunConfig, ov: Overrides) -> Result<String> {
    let (model, r) = cfg.refracted_model()?;
    let x = require(cfg.params.x, "x")?;
    let sim = sim_config(cfg, ov)?;
    let path = match sim.scheme {
        Scheme::ExactBV => simulate_exact_bv(&model, &r, x, sim.horizon, sim.seed)?,
        Scheme::StrongApprox { eps, h, gaussian } => {
            simulate_strong_approx(&model, &r, x, sim.horizon, sim.seed, eps, h, gaussian)?
        }
    };
    let mut s = String::from("time,U,slope\n");
    for (t, u, tag) in path.trace() {
        let tag = serde_json::to_value(tag).expect("tag serialises");
        s.push_str(&format!("{},{},{}\n", crate::output::csv_num(t), crate::output::csv_num(u), tag.as_str().unwrap_or("")));
    }
    Ok(s)
}
