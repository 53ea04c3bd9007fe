//! Boolean matrix factorization by proximal alternating linearized
//! minimization, with the PANPAL and PRIMP cost models.

pub mod cli;
pub mod error;
pub mod eval;
pub mod format;
pub mod imageio;
pub mod manifest;
pub mod matrix;
pub mod objectives;
pub mod paltiling;
pub mod penalty;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::{BinaryMatrix, RealMatrix, SignedMatrix};
pub use objectives::{CostModel, ModelKind};
pub use paltiling::{pal_tiling, PalConfig, Tiling};
