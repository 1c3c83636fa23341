//! Simulation and analysis of one-way communication strategies for the
//! exclusion game: Alice holds `x ∈ {0,1}^n`, Bob holds an `m`-subset `y`,
//! and Bob must output an `m`-bit string that differs from `x` restricted
//! to `y`.
#![no_std]

extern crate alloc;

mod error;

pub mod bits;
pub mod bounds;
pub mod game;
pub mod linalg;
pub mod protocols;

pub use bits::{BitString, Bits, Subset};
pub use bounds::{ExactRational, HighPrecision};
pub use error::{Error, Result};
pub use game::{GameInstance, InputPair};
pub use linalg::{AmplitudeVector, DensityMatrix, ProbabilityDistribution, C64};
