//! Scale functions, fluctuation identities and a Monte Carlo oracle for
//! refracted spectrally negative Lévy processes
//! `dU_t = −δ 1{U_t > b} dt + dX_t`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod canonical;
pub mod error;
pub mod levy_model;
pub mod quadrature;
pub mod refracted_identities;
pub mod roots;
pub mod scale_functions;
pub mod simulator;
pub mod special;
pub mod talbot;

pub use canonical::Canonical;
pub use error::{Error, Result};
pub use levy_model::{validate_refraction, JumpSpec, LevyModel, ModelConfig, RefractionConfig};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/models.md")]
    mod models {}
    #[doc = include_str!("../../../book/src/scale-functions.md")]
    mod scale_functions {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/applications.md")]
    mod applications {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
