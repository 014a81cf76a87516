//! Zooming Thompson sampling for switching Lipschitz bandits, and Continuous
//! Dynamic Tuning (CDT) of contextual bandit hyperparameters.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`] and [`rng`]: dense ridge-regression state and seeded draws.
//! - [`lipschitz`]: the continuum-armed learners on `[0,1]^p`.
//! - [`glb`]: contextual (generalized) linear bandits with tunable
//!   exploration rates and step sizes.
//! - [`tuners`]: hyperparameter selection layers (CDT, TL/Syndicated, OP,
//!   theoretical values, fixed values).
//! - [`env`]: synthetic, switching-Lipschitz and CSV-backed testbeds.
//! - [`harness`]: seeded experiment runs, aggregation and CSV output.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod env;
pub mod error;
pub mod glb;
pub mod harness;
pub mod linalg;
pub mod lipschitz;
pub mod rng;
pub mod tuners;

pub use error::{Error, Result};
pub use rng::SeededRng;
