//! Run configuration: the model fields of [`ModelConfig`] at top level, next
//! to the parameters of the command.

use std::path::Path;

use refracted::applications::Interval;
use refracted::refracted_identities::ResolventKind;
use refracted::simulator::{Functional, Scheme};
use refracted::{Canonical, Error, LevyModel, ModelConfig, RefractionConfig, Result};
use serde::Deserialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

/// Command parameters; every field is optional and unknown keys are errors.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub canonical: Option<Canonical>,
    pub x: Option<f64>,
    pub a: Option<f64>,
    pub q: Option<f64>,
    pub direction: Option<Direction>,
    pub one_sided: Option<bool>,
    pub x_max: Option<f64>,
    pub points: Option<usize>,
    pub second_derivative: Option<bool>,
    pub refracted: Option<bool>,
    pub kind: Option<ResolventKind>,
    pub set: Option<Interval>,
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub closed_form: Option<bool>,
    pub overshoot: Option<Interval>,
    pub undershoot: Option<Interval>,
    pub find_threshold: Option<bool>,
    pub b_max: Option<f64>,
    pub functional: Option<Functional>,
    pub scheme: Option<Scheme>,
    pub horizon: Option<f64>,
    pub n_paths: Option<usize>,
    pub seed: Option<u64>,
    pub models: Option<Vec<Canonical>>,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub model: Option<ModelConfig>,
    pub params: Params,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(Error::Config("top level must be a JSON object".into()));
        };
        let (mut model, mut rest) = (Map::new(), Map::new());
        for (k, v) in map {
            if ModelConfig::FIELDS.contains(&k.as_str()) {
                model.insert(k, v);
            } else {
                rest.insert(k, v);
            }
        }
        let params: Params = serde_json::from_value(Value::Object(rest)).map_err(|e| Error::Config(e.to_string()))?;
        let model = if model.is_empty() {
            None
        } else {
            Some(serde_json::from_value(Value::Object(model)).map_err(|e| Error::Config(e.to_string()))?)
        };
        Ok(RunConfig { model, params })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The model and, if configured, its refraction.
    pub fn model(&self) -> Result<(LevyModel, Option<RefractionConfig>)> {
        match (&self.model, self.params.canonical) {
            (Some(_), Some(_)) => Err(Error::Config("give either model fields or `canonical`, not both".into())),
            (Some(m), None) => Ok((m.model()?, m.refraction()?)),
            (None, Some(c)) => Ok((c.model(), Some(c.refraction()))),
            (None, None) => Err(Error::Config("no model: give model fields or `canonical`".into())),
        }
    }

    pub fn refracted_model(&self) -> Result<(LevyModel, RefractionConfig)> {
        let (m, r) = self.model()?;
        let r = r.ok_or_else(|| Error::Config("this command needs `delta` (and optionally `b`)".into()))?;
        Ok((m, r))
    }
}

pub fn require(value: Option<f64>, name: &str) -> Result<f64> {
    value.ok_or_else(|| Error::Config(format!("missing parameter `{name}`")))
}
