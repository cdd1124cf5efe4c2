//! Wave constants, geometry primitives, refraction physics and
//! phase-unwrapping utilities shared by every other module.
//!
//! Unit conventions, used everywhere in this crate: lengths in
//! millimeters, angles in radians (degrees only at CLI boundaries),
//! frequencies in GHz. Field amplitudes are linear and unnormalized.

mod optics;
mod unwrap;
mod vec3;
mod wave;

pub use optics::{fresnel_transmission, snell_refract, FresnelTransmission, Refraction};
pub use unwrap::{unwrap_phase_radial, wrap_to_pi};
pub use vec3::Vec3;
pub use wave::{wave_from_frequency, WaveSpec, C_MM_GHZ};

/// Complex field amplitude; phase convention is `atan2(im, re)` in (-pi, pi].
pub type ComplexAmp = num_complex::Complex64;
