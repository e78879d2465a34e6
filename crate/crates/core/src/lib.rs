//! Quasicrystallic circle patterns: grid-projection rhombic embeddings, quad
//! surfaces in Z^d, the Hirota equation, discrete Z^γ maps, a radius solver
//! and empirical checks.

pub mod analysis;
pub mod angle;
pub mod cli;
pub mod dd;
pub mod error;
pub mod graph;
pub mod hirota;
pub mod io;
pub mod pattern;
pub mod projection;
pub mod sg;
pub mod solver;
pub mod surface;
pub mod svg;

pub use error::{Error, Result};
