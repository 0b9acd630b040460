//! The validation report: Monte Carlo agreement of the identities and the
//! deterministic cross-checks, for a list of reference models.

use refracted::applications::{
    pasting_threshold, ruin_probability_stable, smooth_pasting_gap, HyperExpDividend, Interval, OvershootLaw,
};
use refracted::refracted_identities::{
    key_identity_sides, resolvent_free, resolvent_killed_above, resolvent_killed_below, resolvent_two_sided,
    Refracted,
};
use refracted::quadrature::integrate;
use refracted::scale_functions::ScaleFunction;
use refracted::simulator::{estimate_functional, Functional, Scheme, SimConfig};
use refracted::{Canonical, LevyModel, RefractionConfig, Result};
use serde_json::Value;

use crate::output::{num, object};

/// Largest `|z|` accepted for a Monte Carlo check.
pub const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct ValidateSettings {
    pub models: Vec<Canonical>,
    pub n_paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    MonteCarlo { mean: f64, stderr: f64, z: f64 },
    Residual { residual: f64, tolerance: f64 },
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub model: Canonical,
    pub analytic: f64,
    pub outcome: Outcome,
}

impl CheckRow {
    pub fn pass(&self) -> bool {
        match self.outcome {
            Outcome::MonteCarlo { z, .. } => z.abs() < Z_LIMIT,
            Outcome::Residual { residual, tolerance } => residual < tolerance,
            Outcome::Failed(_) => false,
        }
    }

    fn to_json(&self) -> Value {
        let mut fields = vec![
            ("check", Value::String(self.check.clone())),
            ("model", Value::String(self.model.name().into())),
            ("analytic", num(self.analytic)),
        ];
        match &self.outcome {
            Outcome::MonteCarlo { mean, stderr, z } => {
                fields.extend([("mc_mean", num(*mean)), ("mc_stderr", num(*stderr)), ("z_score", num(*z))]);
            }
            Outcome::Residual { residual, tolerance } => {
                fields.extend([("residual", num(*residual)), ("tolerance", num(*tolerance))]);
            }
            Outcome::Failed(msg) => fields.push(("error", Value::String(msg.clone()))),
        }
        fields.push(("pass", Value::Bool(self.pass())));
        object(fields)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub settings: ValidateSettings,
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(CheckRow::pass)
    }

    pub fn to_json(&self) -> Value {
        let passed = self.rows.iter().filter(|r| r.pass()).count();
        object([
            ("seed", Value::from(self.settings.seed)),
            ("n_paths", Value::from(self.settings.n_paths)),
            ("models", Value::Array(self.settings.models.iter().map(|m| Value::String(m.name().into())).collect())),
            ("checks", Value::Array(self.rows.iter().map(CheckRow::to_json).collect())),
            ("passed", Value::from(passed)),
            ("failed", Value::from(self.rows.len() - passed)),
            ("all_pass", Value::Bool(self.all_pass())),
        ])
    }
}

struct Ctx<'a> {
    model: Canonical,
    settings: &'a ValidateSettings,
    rows: Vec<CheckRow>,
}

impl Ctx<'_> {
    #[allow(clippy::too_many_arguments)]
    fn mc(&mut self, check: &str, analytic: Result<f64>, f: Functional, x: f64, q: f64, scheme: Scheme, horizon: f64) {
        let m = self.model.model();
        let r = self.model.refraction();
        let sim = SimConfig::new(scheme, horizon, self.settings.n_paths, self.settings.seed);
        let outcome = match analytic {
            Err(e) => (f64::NAN, Outcome::Failed(e.to_string())),
            Ok(v) => match estimate_functional(&m, &r, &f, x, q, &sim) {
                Ok(e) => (v, Outcome::MonteCarlo { mean: e.mean, stderr: e.stderr, z: e.z_score(v) }),
                Err(e) => (v, Outcome::Failed(e.to_string())),
            },
        };
        self.rows.push(CheckRow { check: check.into(), model: self.model, analytic: outcome.0, outcome: outcome.1 });
    }

    fn residual(&mut self, check: &str, analytic: f64, residual: Result<f64>, tolerance: f64) {
        let outcome = match residual {
            Ok(r) if r.is_finite() => Outcome::Residual { residual: r, tolerance },
            Ok(r) => Outcome::Failed(format!("non-finite residual {r}")),
            Err(e) => Outcome::Failed(e.to_string()),
        };
        self.rows.push(CheckRow { check: check.into(), model: self.model, analytic, outcome });
    }
}

fn max_abs<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    let mut m = 0.0f64;
    for v in it {
        m = m.max(v?.abs());
    }
    Ok(m)
}

/// `q·mass + exit transforms − 1` for the four resolvents.
fn complementarity(m: &LevyModel, r: &RefractionConfig) -> Result<f64> {
    let (a, q) = (3.0, 0.5);
    let ctx = Refracted::new(m, r, q)?;
    let mut worst = 0.0f64;
    for x in [0.5, 1.5, 2.5] {
        let two = resolvent_two_sided(m, x, a, q, r)?.total_mass()?.value;
        let up = ctx.two_sided_up(x, a)?.value;
        let down = ctx.two_sided_down(x, a)?.value;
        worst = worst.max((q * two + up + down - 1.0).abs());
        let below = resolvent_killed_below(m, x, q, r)?.total_mass()?.value;
        worst = worst.max((q * below + ctx.one_sided_down(x)?.value - 1.0).abs());
        let above = resolvent_killed_above(m, x, a, q, r)?.total_mass()?.value;
        worst = worst.max((q * above + ctx.one_sided_up(x, a)?.value - 1.0).abs());
        let free = resolvent_free(m, x, q, r)?.total_mass()?.value;
        worst = worst.max((q * free - 1.0).abs());
    }
    Ok(worst)
}

/// Identities at `δ = 1e-8` against the unrefracted formulas in `W`.
fn delta_reduction(m: &LevyModel, b: f64) -> Result<f64> {
    let r = RefractionConfig::new(1e-8, b);
    let (a, q) = (3.0, 0.5);
    let ctx = Refracted::new(m, &r, q)?;
    let ruin_ctx = Refracted::new(m, &r, 0.0)?;
    let w = ScaleFunction::new(m, 0.0, q)?;
    let w0 = ScaleFunction::new(m, 0.0, 0.0)?;
    let phi = w.root();
    let mut worst = 0.0f64;
    for x in [0.5, 1.5, 2.5] {
        let checks = [
            (ctx.two_sided_up(x, a)?.value, w.w(x) / w.w(a)),
            (ctx.two_sided_down(x, a)?.value, w.z(x) - w.z(a) * w.w(x) / w.w(a)),
            (ctx.one_sided_down(x)?.value, w.z(x) - q / phi * w.w(x)),
            (ctx.one_sided_up(x, a)?.value, (-phi * (a - x)).exp()),
            (ruin_ctx.ruin_probability(x)?.value, 1.0 - m.mean() * w0.w(x)),
        ];
        for (refr, classical) in checks {
            worst = worst.max((refr - classical).abs());
        }
    }
    Ok(worst)
}

/// `δ∫_0^a 𝕎(a−y)W(y)dy − ∫_0^a 𝕎 + ∫_0^a W` over a few `a`.
fn convolution(m: &LevyModel, delta: f64) -> Result<f64> {
    let q = 0.4;
    let w = ScaleFunction::new(m, 0.0, q)?;
    let ww = ScaleFunction::new(m, delta, q)?;
    max_abs([0.3, 1.0, 2.5, 6.0].map(|a| {
        let conv = integrate(|y| ww.w(a - y) * w.w(y), 0.0, a, 1e-8)?.value;
        Ok(delta * conv - ww.integral(a) + w.integral(a))
    }))
}

fn key_identity(m: &LevyModel, r: &RefractionConfig) -> Result<f64> {
    max_abs((0..20).map(|i| {
        let mm = 0.1 + 0.15 * (i % 5) as f64;
        let u = mm + 0.3 + 0.2 * (i % 4) as f64;
        let v = u + 0.5 + 0.25 * (i % 3) as f64;
        let q = [0.05, 0.1, 0.5, 1.0][i % 4];
        key_identity_sides(u, v, mm, m, r, q).map(|(l, rr)| l - rr)
    }))
}

fn validate_m1(c: &mut Ctx) {
    let m = c.model.model();
    let r = c.model.refraction();
    let (x, a, q) = (2.0, 3.0, 0.1);
    let ctx = Refracted::new(&m, &r, q);
    let ruin_ctx = Refracted::new(&m, &r, 0.0);
    let value = |f: &dyn Fn(&Refracted) -> Result<f64>, c: &std::result::Result<Refracted, refracted::Error>| match c {
        Ok(c) => f(c),
        Err(e) => Err(e.clone()),
    };
    let exact = Scheme::ExactBV;
    let cap = 25.0;
    c.mc("two_sided_up", value(&|c| Ok(c.two_sided_up(x, a)?.value), &ctx), Functional::TwoSidedUp { a }, x, q, exact, 100.0);
    c.mc("two_sided_down", value(&|c| Ok(c.two_sided_down(x, a)?.value), &ctx), Functional::TwoSidedDown { a }, x, q, exact, 100.0);
    c.mc("one_sided_down", value(&|c| Ok(c.one_sided_down(x)?.value), &ctx), Functional::OneSidedDown, x, q, exact, 100.0);
    c.mc(
        "ruin_probability",
        value(&|c| Ok(c.ruin_probability(x)?.value), &ruin_ctx),
        Functional::Ruin { level_cap: cap, completion: None },
        x,
        0.0,
        exact,
        1e4,
    );
    c.mc("dividend_value", value(&|c| Ok(c.dividend_value(x)?.value), &ctx), Functional::Dividends, x, q, exact, 150.0);
    let (oa, ob) = (Interval::new(-1.0, 0.0), Interval::new(0.0, 1.5));
    let law = OvershootLaw::new(&m, x, &r).and_then(|l| Ok(l.rectangle_mass(&oa, &ob)?.value));
    c.mc(
        "overshoot_rectangle",
        law,
        Functional::Overshoot { overshoot: oa, undershoot: ob, level_cap: cap },
        x,
        0.0,
        exact,
        1e4,
    );
    let set = Interval::new(0.5, 2.5);
    let mass = resolvent_two_sided(&m, x, a, q, &r).and_then(|d| Ok(d.mass(set.lo, set.hi)?.value));
    c.mc(
        "resolvent_two_sided_mass",
        mass,
        Functional::ResolventMass { kind: refracted::refracted_identities::ResolventKind::TwoSided, a, set },
        x,
        q,
        exact,
        100.0,
    );
    c.residual("key_identity", f64::NAN, key_identity(&m, &r), 1e-6);
    c.residual("convolution", f64::NAN, convolution(&m, r.delta), 1e-6);
    c.residual("delta_reduction", f64::NAN, delta_reduction(&m, r.b), 1e-5);
    c.residual("complementarity", f64::NAN, complementarity(&m, &r), 1e-6);
    let closed = (|| {
        let h = HyperExpDividend::new(&m, &r, q)?;
        let generic = Refracted::new(&m, &r, q)?;
        max_abs((0..=20).map(|i| {
            let x = 0.25 * i as f64;
            Ok(generic.dividend_value(x)?.value - h.value(x))
        }))
    })();
    c.residual("dividend_closed_form", f64::NAN, closed, 1e-8);
    let pasting = (|| {
        let q = 0.01;
        let b = pasting_threshold(&m, r.delta, q, 20.0)?
            .ok_or_else(|| refracted::Error::Unsupported("no pasting threshold found".into()))?;
        Ok((b, smooth_pasting_gap(&m, &RefractionConfig::new(r.delta, b), q)?.gap))
    })();
    match pasting {
        Ok((b, gap)) => c.residual("pasting_gap_at_threshold", b, Ok(gap.abs()), 1e-6),
        Err(e) => c.residual("pasting_gap_at_threshold", f64::NAN, Err(e), 1e-6),
    }
}

fn validate_m2(c: &mut Ctx) {
    let m = c.model.model();
    let r = c.model.refraction();
    let scheme = Scheme::StrongApprox { eps: 1e-6, h: 0.01, gaussian: false };
    let (x, q) = (0.5, 0.5);
    let creep = Refracted::new(&m, &r, q).and_then(|c| Ok(c.creeping(x)?.value));
    c.mc("creeping", creep, Functional::Creep, x, q, scheme, 20.0);
    let (x, a, q) = (2.0, 3.0, 0.1);
    let up = Refracted::new(&m, &r, q).and_then(|c| Ok(c.two_sided_up(x, a)?.value));
    c.mc("two_sided_up", up, Functional::TwoSidedUp { a }, x, q, scheme, 100.0);
    c.residual("convolution", f64::NAN, convolution(&m, r.delta), 1e-6);
    c.residual("delta_reduction", f64::NAN, delta_reduction(&m, r.b), 1e-5);
    c.residual("complementarity", f64::NAN, complementarity(&m, &r), 1e-6);
    let gap = smooth_pasting_gap(&m, &r, 0.1).map(|d| d.gap.abs());
    c.residual("pasting_gap", f64::NAN, gap, 1e-6);
}

fn validate_m3(c: &mut Ctx) {
    let m = c.model.model();
    let r = c.model.refraction();
    let (alpha, drift) = (1.5, m.drift());
    let x = 2.0;
    let cap = 4.0;
    let stable = |x: f64| ruin_probability_stable(x, r.b, drift, r.delta, alpha).map(|v| v.value);
    let scheme = Scheme::StrongApprox { eps: 1e-3, h: 1e-3, gaussian: true };
    match stable(cap) {
        Ok(completion) => c.mc(
            "stable_ruin",
            stable(x),
            Functional::Ruin { level_cap: cap, completion: Some(completion) },
            x,
            0.0,
            scheme,
            1e4,
        ),
        Err(e) => c.residual("stable_ruin", f64::NAN, Err(e), 0.0),
    }
    let generic = (|| {
        let ctx = Refracted::new(&m, &r, 0.0)?;
        max_abs([0.5, 2.0].map(|x| Ok(stable(x)? - ctx.ruin_probability(x)?.value)))
    })();
    c.residual("stable_ruin_vs_identity", f64::NAN, generic, 1e-8);
    c.residual("stable_ruin_at_zero", 1.0, stable(0.0).map(|v| (v - 1.0).abs()), f64::MIN_POSITIVE);
}

pub fn run_validate(settings: &ValidateSettings) -> Report {
    let mut rows = Vec::new();
    for &model in &settings.models {
        let mut c = Ctx { model, settings, rows: Vec::new() };
        match model {
            Canonical::M1 => validate_m1(&mut c),
            Canonical::M2 => validate_m2(&mut c),
            Canonical::M3 => validate_m3(&mut c),
        }
        rows.extend(c.rows);
    }
    Report { settings: settings.clone(), rows }
}
