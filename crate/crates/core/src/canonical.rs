//! The three reference models used by the validation report.
//!
//! | name | model | δ | b |
//! |---|---|---|---|
//! | M1 | `c = 2`, exponential jumps `λ = 1`, rate 1 | 0.5 | 1 |
//! | M2 | M1 plus `σ = 1` | 0.5 | 1 |
//! | M3 | `ψ(θ) = θ + θ^{1.5}` | 0.3 | 1 |

use serde::{Deserialize, Serialize};

use crate::levy_model::{JumpSpec, LevyModel, RefractionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Canonical {
    M1,
    M2,
    M3,
}

impl Canonical {
    pub const ALL: [Canonical; 3] = [Canonical::M1, Canonical::M2, Canonical::M3];

    pub fn name(self) -> &'static str {
        match self {
            Canonical::M1 => "M1",
            Canonical::M2 => "M2",
            Canonical::M3 => "M3",
        }
    }

    pub fn model(self) -> LevyModel {
        let m = match self {
            Canonical::M1 => LevyModel::with_linear_drift(2.0, 0.0, JumpSpec::single_exponential(1.0, 1.0)),
            Canonical::M2 => LevyModel::with_linear_drift(2.0, 1.0, JumpSpec::single_exponential(1.0, 1.0)),
            Canonical::M3 => LevyModel::with_linear_drift(1.0, 0.0, JumpSpec::StableTail { alpha: 1.5 }),
        };
        m.expect("canonical parameters are valid")
    }

    pub fn refraction(self) -> RefractionConfig {
        match self {
            Canonical::M1 | Canonical::M2 => RefractionConfig::new(0.5, 1.0),
            Canonical::M3 => RefractionConfig::new(0.3, 1.0),
        }
    }
}

impl std::str::FromStr for Canonical {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "M1" => Ok(Canonical::M1),
            "M2" => Ok(Canonical::M2),
            "M3" => Ok(Canonical::M3),
            _ => Err(format!("unknown canonical model `{s}` (expected M1, M2 or M3)")),
        }
    }
}
