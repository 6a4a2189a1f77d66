//! Modulational instability of small-amplitude periodic waves in
//! Ostrovsky-type equations
//!
//! ```text
//! (u_t - beta (M u)_x + (u^2)_x)_x = gamma u
//! ```
//!
//! with a general dispersion symbol `m(k)`. The crate evaluates the
//! instability index, builds Stokes expansions, computes Floquet-Hill spectra
//! as an independent check, and locates critical wavenumbers.

pub mod critical;
pub mod error;
pub mod floquet_hill;
pub mod mi_index;
pub mod roots;
pub mod stokes;
pub mod symbols;

pub use error::{Error, Result};
pub use symbols::{DispersionSymbol, ModelParams};
