//! lensforge: design maximum-gain dielectric-lens antenna systems.
//!
//! The pipeline locates a radiator's phase center by least-squares
//! minimization of a phase functional over a solid-angle-limited
//! sampling plane, synthesizes an extended-hemispherical lens, and
//! verifies the gain peak with a geometrical-optics / physical-optics
//! propagation model (ray tracing through the lens body, scalar
//! aperture integration above it).
//!
//! Modules:
//! - [`emcore`] wave constants, vectors, Snell/Fresnel, phase unwrapping
//! - [`radiators`] patch synthesis, element pattern, array field model
//! - [`phasecenter`] measurement plane, phase functional, center fit
//! - [`lens`] lens synthesis, ray tracer, aperture and far field
//! - [`sweep`] gain-vs-separation experiment and comparisons
//! - [`config`] / [`cli`] JSON-driven batch front-end
//!
//! See the `examples/` directory for one runnable program per
//! capability; the `lensforge` binary wraps the same calls behind
//! subcommands.

pub mod cli;
pub mod config;
pub mod emcore;
pub mod error;
pub mod lens;
pub mod phasecenter;
pub mod radiators;
pub mod report;
pub mod search;
pub mod sweep;

pub use emcore::{ComplexAmp, Vec3, WaveSpec};
pub use error::{Error, Result};
