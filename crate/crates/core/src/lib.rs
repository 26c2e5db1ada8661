//! Numerical toolkit for maximal operators on a discretized torus: spectral
//! Littlewood-Paley projections, the `B` norm, sharp/diamond/kernel maximal
//! functions, lacunary counterexample families and the verification suite
//! built on them.

pub mod constructions;
pub mod dd;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod format;
pub mod grid;
pub mod kernel;
pub mod maximal;
pub mod spectral;

#[cfg(test)]
mod properties;

pub use error::{Error, Result};
pub use grid::{Extension, GridFunction, NormKind, RadiiSet, TorusGrid};
pub use kernel::Kernel;
pub use maximal::{ConvolutionPath, MaximalResult};
pub use spectral::{BNormReport, MultiplierKind, SpectralMultiplier};
