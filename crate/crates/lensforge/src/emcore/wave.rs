use crate::error::{Error, Result};

/// Speed of light in mm*GHz (equivalently mm/ns).
pub const C_MM_GHZ: f64 = 299.792458;

/// Operating-frequency context: frequency, free-space wavelength and
/// wavenumber. All downstream phase arithmetic uses `wavenumber`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveSpec {
    /// Frequency in GHz.
    pub frequency: f64,
    /// Free-space wavelength in mm.
    pub wavelength: f64,
    /// Free-space wavenumber in rad/mm.
    pub wavenumber: f64,
}

/// Builds a [`WaveSpec`] from a frequency in GHz.
pub fn wave_from_frequency(frequency: f64) -> Result<WaveSpec> {
    if frequency.is_nan() || frequency <= 0.0 || !frequency.is_finite() {
        return Err(Error::invalid(format!(
            "frequency must be > 0 GHz, got {frequency}"
        )));
    }
    let wavelength = C_MM_GHZ / frequency;
    Ok(WaveSpec {
        frequency,
        wavelength,
        wavenumber: 2.0 * std::f64::consts::PI / wavelength,
    })
}
