//! Scalar aperture integration: far-field pattern and gain figures from
//! the exit-aperture samples.

use rayon::prelude::*;

use crate::emcore::{ComplexAmp, Vec3, WaveSpec};
use crate::error::{Error, Result};
use crate::radiators::ArrayAntenna;

use super::aperture::{
    aperture_from_rays, ApertureField, RayBundleOptions, SourcePattern, SourceSpec,
};
use super::LensPlacement;

/// Angular grid for the radiated pattern.
#[derive(Debug, Clone, Copy)]
pub struct PatternGridSpec {
    /// theta step, rad; theta spans [0, 90) degrees.
    pub theta_step: f64,
    /// phi step, rad; phi spans [0, 360) degrees.
    pub phi_step: f64,
}

impl Default for PatternGridSpec {
    fn default() -> Self {
        PatternGridSpec {
            theta_step: 0.25f64.to_radians(),
            phi_step: 3.0f64.to_radians(),
        }
    }
}

/// Far-field result of the lens pipeline.
#[derive(Debug, Clone)]
pub struct FarFieldPattern {
    pub theta_step: f64,
    pub phi_step: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Radiated intensity |E(theta, phi)|^2, linear, row-major
    /// `[i_theta][i_phi]`; relative scale.
    pub intensity: Vec<f64>,
    pub boresight_directivity_dbi: f64,
    pub spillover_efficiency: f64,
    pub transmission_efficiency: f64,
    /// directivity + 10*log10(spillover * transmission), dBi.
    pub gain_estimate_dbi: f64,
}

impl FarFieldPattern {
    /// Gain in dBi at a pattern cell, pinning the intensity peak to the
    /// gain estimate.
    pub fn gain_dbi_at(&self, i_theta: usize, i_phi: usize) -> f64 {
        let peak = self.intensity.iter().cloned().fold(0.0f64, f64::max);
        let u = self.intensity[i_theta * self.n_phi + i_phi];
        if u <= 0.0 || peak <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.gain_estimate_dbi + 10.0 * (u / peak).log10()
    }
}

/// Evaluates the radiation pattern and gain figures of an exit aperture.
///
/// The boresight directivity uses the exact broadside-aperture identity
/// D = 4*pi*|sum E dA|^2 / (lambda^2 * sum |E|^2 dA); the angular
/// pattern is the discrete Fourier sum of the aperture samples.
pub fn far_field_from_aperture(
    aperture: &ApertureField,
    wave: &WaveSpec,
) -> Result<FarFieldPattern> {
    far_field_with_grid(aperture, wave, Some(PatternGridSpec::default()))
}

/// Same with an explicit pattern grid; `None` skips the angular pattern
/// and fills only the gain figures.
pub fn far_field_with_grid(
    aperture: &ApertureField,
    wave: &WaveSpec,
    grid: Option<PatternGridSpec>,
) -> Result<FarFieldPattern> {
    if aperture.cell_size > wave.wavelength / 2.0 + 1e-12 {
        return Err(Error::invalid(
            "aperture cell size must be at most lambda/2 for far-field evaluation",
        ));
    }
    let da = aperture.cell_size * aperture.cell_size;
    let mut coherent = ComplexAmp::new(0.0, 0.0);
    let mut power = 0.0;
    let mut occupied: Vec<(f64, f64, ComplexAmp)> = Vec::new();
    for iy in 0..aperture.n_cells {
        for ix in 0..aperture.n_cells {
            let c = aperture.cells[iy * aperture.n_cells + ix];
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let x = -aperture.half_extent + (ix as f64 + 0.5) * aperture.cell_size;
            let y = -aperture.half_extent + (iy as f64 + 0.5) * aperture.cell_size;
            coherent += c * da;
            power += c.norm_sqr() * da;
            occupied.push((x, y, c));
        }
    }
    if power <= 0.0 {
        return Err(Error::DegenerateGeometry("empty aperture".into()));
    }
    // the ray-traced path carries the coherent integral in ray-tube form,
    // which is free of deposition-grid bias; hand-built apertures fall
    // back to the cell sums
    let (num, den) = match aperture.ray_coherent_sum {
        Some(s) => (s.norm_sqr(), aperture.power_transmitted),
        None => (coherent.norm_sqr(), power),
    };
    let lambda2 = wave.wavelength * wave.wavelength;
    let d_lin = 4.0 * std::f64::consts::PI * num / (lambda2 * den);
    let directivity_dbi = 10.0 * d_lin.log10();
    let spill = aperture.spillover_efficiency();
    let trans = aperture.transmission_efficiency();
    let gain = directivity_dbi + 10.0 * (spill * trans).log10();

    let (n_theta, n_phi, theta_step, phi_step, intensity) = match grid {
        Some(g) => {
            let n_theta = (std::f64::consts::FRAC_PI_2 / g.theta_step).ceil() as usize;
            let n_phi = ((2.0 * std::f64::consts::PI) / g.phi_step).ceil() as usize;
            let k = wave.wavenumber;
            let intensity: Vec<f64> = (0..n_theta * n_phi)
                .into_par_iter()
                .map(|idx| {
                    let theta = (idx / n_phi) as f64 * g.theta_step;
                    let phi = (idx % n_phi) as f64 * g.phi_step;
                    let ux = k * theta.sin() * phi.cos();
                    let uy = k * theta.sin() * phi.sin();
                    let mut e = ComplexAmp::new(0.0, 0.0);
                    for &(x, y, c) in &occupied {
                        e += c * ComplexAmp::from_polar(da, ux * x + uy * y);
                    }
                    e.norm_sqr()
                })
                .collect();
            (n_theta, n_phi, g.theta_step, g.phi_step, intensity)
        }
        None => (0, 0, 0.0, 0.0, Vec::new()),
    };

    Ok(FarFieldPattern {
        theta_step,
        phi_step,
        n_theta,
        n_phi,
        intensity,
        boresight_directivity_dbi: directivity_dbi,
        spillover_efficiency: spill,
        transmission_efficiency: trans,
        gain_estimate_dbi: gain,
    })
}

/// How the radiator feeds the lens in the gain pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainMode {
    /// Point radiator at the fitted phase center carrying the antenna's
    /// far-field pattern. Refuses placements with the phase center above
    /// the flat face (a point source inside the dielectric is
    /// unphysical here).
    PointSource { phase_center: f64 },
    /// Near-field sampling over the lens flat face with launch
    /// directions radial from the fitted phase center.
    SampledField { phase_center: f64 },
}

/// Full gain pipeline: ray bundle, aperture assembly, far-field
/// evaluation. The pattern grid is skipped (gain figures only) when
/// `grid` is None.
pub fn lens_gain_with(
    antenna: &ArrayAntenna,
    placement: &LensPlacement,
    wave: &WaveSpec,
    mode: GainMode,
    opts: &RayBundleOptions,
    grid: Option<PatternGridSpec>,
) -> Result<FarFieldPattern> {
    let aperture = match mode {
        GainMode::PointSource { phase_center } => {
            if placement.d_gap < phase_center - 1e-9 {
                return Err(Error::invalid(format!(
                    "point-source mode needs the lens face at or above the phase center \
                     (D = {} mm < d_star = {phase_center} mm); use sampled-field mode",
                    placement.d_gap
                )));
            }
            let src = SourceSpec::Point {
                position: Vec3::new(0.0, 0.0, phase_center.min(placement.face_z())),
                pattern: SourcePattern::Antenna(antenna),
                immersed: false,
            };
            aperture_from_rays(placement, &src, wave, opts)?
        }
        GainMode::SampledField { phase_center } => {
            let src = SourceSpec::SampledField {
                source: antenna,
                phase_center,
            };
            aperture_from_rays(placement, &src, wave, opts)?
        }
    };
    far_field_with_grid(&aperture, wave, grid)
}

/// [`lens_gain_with`] at default ray-bundle options and default grid.
pub fn lens_gain(
    antenna: &ArrayAntenna,
    placement: &LensPlacement,
    wave: &WaveSpec,
    mode: GainMode,
) -> Result<FarFieldPattern> {
    lens_gain_with(
        antenna,
        placement,
        wave,
        mode,
        &RayBundleOptions::default(),
        Some(PatternGridSpec::default()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emcore::wave_from_frequency;

    /// Builds a uniform aperture over the disk of radius `r` by hand.
    fn uniform_disk_aperture(r: f64, cell: f64, _wave: &WaveSpec) -> ApertureField {
        let n_cells = (2.0 * (r + 4.0 * cell) / cell).ceil() as usize;
        let half = 0.5 * n_cells as f64 * cell;
        let mut cells = vec![ComplexAmp::new(0.0, 0.0); n_cells * n_cells];
        for iy in 0..n_cells {
            for ix in 0..n_cells {
                let x = -half + (ix as f64 + 0.5) * cell;
                let y = -half + (iy as f64 + 0.5) * cell;
                if x.hypot(y) <= r {
                    cells[iy * n_cells + ix] = ComplexAmp::new(1.0, 0.0);
                }
            }
        }
        ApertureField {
            plane_z: 0.0,
            cell_size: cell,
            n_cells,
            half_extent: half,
            cells,
            power_in_rays: 1.0,
            power_exited: 1.0,
            power_tir: 0.0,
            power_side_wall: 0.0,
            power_missed: 0.0,
            total_source_power: 1.0,
            power_transmitted: 1.0,
            ray_coherent_sum: None,
        }
    }

    #[test]
    fn uniform_disk_matches_airy() {
        let w = wave_from_frequency(30.2).unwrap();
        let ap = uniform_disk_aperture(17.27, w.wavelength / 8.0, &w);
        let grid = PatternGridSpec {
            theta_step: 0.1f64.to_radians(),
            phi_step: 30f64.to_radians(),
        };
        let ff = far_field_with_grid(&ap, &w, Some(grid)).unwrap();
        // analytic uniform circular aperture: 20.773 dBi
        assert!(
            (ff.boresight_directivity_dbi - 20.773168919095937).abs() < 0.2,
            "directivity {}",
            ff.boresight_directivity_dbi
        );
        // first sidelobe of the Airy pattern: -17.57 dB at 28.0 deg
        let cut: Vec<f64> = (0..ff.n_theta)
            .map(|i| ff.intensity[i * ff.n_phi])
            .collect();
        let peak = cut[0];
        // find the first local max after the first null
        let mut sidelobe = f64::NEG_INFINITY;
        let mut past_null = false;
        for i in 1..cut.len() - 1 {
            if !past_null && cut[i] < cut[i - 1] && cut[i] < cut[i + 1] {
                past_null = true;
            }
            if past_null && cut[i] > cut[i - 1] && cut[i] > cut[i + 1] {
                sidelobe = 10.0 * (cut[i] / peak).log10();
                break;
            }
        }
        assert!(
            (sidelobe - (-17.57)).abs() < 0.5,
            "first sidelobe {sidelobe} dB"
        );
    }

    #[test]
    fn uniform_square_matches_area_identity() {
        let w = wave_from_frequency(30.2).unwrap();
        let cell = w.wavelength / 8.0;
        // side chosen as an exact multiple of the cell size
        let m = 24usize;
        let side = m as f64 * cell;
        let n_cells = m;
        let mut cells = vec![ComplexAmp::new(1.0, 0.0); n_cells * n_cells];
        cells.iter_mut().for_each(|_| {});
        let ap = ApertureField {
            plane_z: 0.0,
            cell_size: cell,
            n_cells,
            half_extent: side / 2.0,
            cells,
            power_in_rays: 1.0,
            power_exited: 1.0,
            power_tir: 0.0,
            power_side_wall: 0.0,
            power_missed: 0.0,
            total_source_power: 1.0,
            power_transmitted: 1.0,
            ray_coherent_sum: None,
        };
        let ff = far_field_with_grid(&ap, &w, None).unwrap();
        let want = 10.0
            * (4.0 * std::f64::consts::PI * side * side / (w.wavelength * w.wavelength)).log10();
        assert!(
            (ff.boresight_directivity_dbi - want).abs() < 0.2,
            "{} vs {want}",
            ff.boresight_directivity_dbi
        );
    }

    #[test]
    fn linear_phase_ramp_squints_the_beam() {
        let w = wave_from_frequency(30.2).unwrap();
        let cell = w.wavelength / 8.0;
        let r = 17.27;
        let mut ap = uniform_disk_aperture(r, cell, &w);
        // ramp slope: 0.15k in x => squint at asin(0.15) = 8.63 deg
        let slope = 0.15 * w.wavenumber;
        let n = ap.n_cells;
        for iy in 0..n {
            for ix in 0..n {
                let x = -ap.half_extent + (ix as f64 + 0.5) * cell;
                let c = &mut ap.cells[iy * n + ix];
                if c.norm_sqr() > 0.0 {
                    *c *= ComplexAmp::from_polar(1.0, slope * x);
                }
            }
        }
        let g = PatternGridSpec {
            theta_step: 0.1f64.to_radians(),
            phi_step: 180f64.to_radians(),
        };
        let ff = far_field_with_grid(&ap, &w, Some(g)).unwrap();
        // the ramp beams along -x: scan the whole grid for the peak
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &u) in ff.intensity.iter().enumerate() {
            if u > best.1 {
                best = (i, u);
            }
        }
        let theta_peak = (best.0 / ff.n_phi) as f64 * g.theta_step;
        let want = 0.15f64.asin();
        assert!(
            (theta_peak - want).abs() <= g.theta_step,
            "squint {theta_peak} vs {want}"
        );
        // the coherent peak moves but its height stays within 0.1 dB
        let unsquinted =
            far_field_with_grid(&uniform_disk_aperture(r, cell, &w), &w, Some(g)).unwrap();
        let peak_ratio = 10.0 * (best.1 / unsquinted.intensity[0]).log10();
        assert!(peak_ratio.abs() < 0.1, "peak changed by {peak_ratio} dB");
    }

    #[test]
    fn oversized_cells_rejected() {
        let w = wave_from_frequency(30.2).unwrap();
        let ap = uniform_disk_aperture(17.27, 0.6 * w.wavelength, &w);
        assert!(far_field_with_grid(&ap, &w, None).is_err());
    }
}
