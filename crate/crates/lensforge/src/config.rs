//! Run configuration: one JSON document with every default pinned to
//! the reference design (30.2 GHz patch array on 0.127 mm Duroid, an
//! eps_r 2.4 lens of 17.27 mm radius, a 22.5-degree sampling cone and
//! the [-30, 30] mm center scan), so `--default` reproduces the whole
//! experiment end to end.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::emcore::{wave_from_frequency, WaveSpec};
use crate::error::{Error, Result};
use crate::lens::{synthesize_lens, LensShape, LensSpec, RayBundleOptions};
use crate::phasecenter::{build_plane, MeasurementPlane};
use crate::radiators::{synthesize_patch, ArrayAntenna, PatchGeometry, SubstrateSpec};

fn config_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaKind {
    Single,
    Array2x2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedMode {
    PointSource,
    SampledField,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SubstrateConfig {
    pub eps_r: f64,
    pub height_mm: f64,
}

impl Default for SubstrateConfig {
    fn default() -> Self {
        SubstrateConfig {
            eps_r: 2.2,
            height_mm: 0.127,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchConfig {
    pub width_mm: f64,
    pub length_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AntennaConfig {
    pub kind: AntennaKind,
    pub frequency_ghz: f64,
    pub substrate: SubstrateConfig,
    /// Explicit patch dimensions; omitted means synthesis.
    pub patch: Option<PatchConfig>,
    pub spacing_wavelengths: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        AntennaConfig {
            kind: AntennaKind::Array2x2,
            frequency_ghz: 30.2,
            substrate: SubstrateConfig::default(),
            patch: None,
            spacing_wavelengths: 0.7,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LensConfig {
    pub eps_r: f64,
    pub radius_mm: f64,
    /// Explicit extension height; omitted means synthesis.
    pub extension_mm: Option<f64>,
}

impl Default for LensConfig {
    fn default() -> Self {
        LensConfig {
            eps_r: 2.4,
            radius_mm: 17.27,
            extension_mm: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseCenterConfig {
    pub delta_theta_deg: f64,
    pub plane_z_wavelengths: f64,
    pub grid_n: usize,
    pub d_min_mm: f64,
    pub d_max_mm: f64,
    pub d_step_mm: f64,
}

impl Default for PhaseCenterConfig {
    fn default() -> Self {
        PhaseCenterConfig {
            delta_theta_deg: 22.5,
            plane_z_wavelengths: 10.0,
            grid_n: 41,
            d_min_mm: -30.0,
            d_max_mm: 30.0,
            d_step_mm: 0.2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub d_lo_mm: f64,
    pub d_hi_mm: f64,
    pub step_mm: f64,
    /// Omitted: sampled-field for the array, point-source for the
    /// single element (whose fitted center sits at the surface).
    pub mode: Option<FeedMode>,
    pub ray_count: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            d_lo_mm: 0.0,
            d_hi_mm: 10.0,
            step_mm: 0.5,
            mode: None,
            ray_count: 20_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub emit_plots: bool,
    pub emit_rays: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            emit_plots: false,
            emit_rays: false,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub antenna: AntennaConfig,
    pub lens: LensConfig,
    pub phasecenter: PhaseCenterConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

/// Everything a subcommand needs, with all module preconditions already
/// enforced.
pub struct ValidatedRun {
    pub wave: WaveSpec,
    pub patch: PatchGeometry,
    pub patch_was_synthesized: bool,
    pub antenna: ArrayAntenna,
    pub lens: LensSpec,
    pub plane: MeasurementPlane,
    /// (d_min, d_max, d_step) of the center scan, mm.
    pub scan: (f64, f64, f64),
    pub sweep_d: Vec<f64>,
    pub sampled_mode: bool,
    pub ray_opts: RayBundleOptions,
    pub out_dir: PathBuf,
    pub emit_plots: bool,
    pub emit_rays: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| config_err("<document>", e.to_string()))
    }

    pub fn validate(&self) -> Result<ValidatedRun> {
        if self.antenna.frequency_ghz <= 0.0 {
            return Err(config_err("antenna.frequency_ghz", "must be > 0"));
        }
        let wave = wave_from_frequency(self.antenna.frequency_ghz)?;
        if self.antenna.substrate.eps_r < 1.0 {
            return Err(config_err("antenna.substrate.eps_r", "must be >= 1"));
        }
        if self.antenna.substrate.height_mm <= 0.0 {
            return Err(config_err("antenna.substrate.height_mm", "must be > 0"));
        }
        let substrate = SubstrateSpec::new(
            self.antenna.substrate.eps_r,
            self.antenna.substrate.height_mm,
        )?;
        let synthesized = synthesize_patch(&wave, &substrate)?;
        let (patch, patch_was_synthesized) = match &self.antenna.patch {
            Some(p) => {
                if p.width_mm <= 0.0 || p.length_mm <= 0.0 {
                    return Err(config_err("antenna.patch", "dimensions must be > 0"));
                }
                // explicit dimensions pass through verbatim; the fringing
                // quantities still come from the substrate formulas
                (
                    PatchGeometry {
                        width: p.width_mm,
                        length: p.length_mm,
                        eps_eff: synthesized.eps_eff,
                        delta_l: synthesized.delta_l,
                    },
                    false,
                )
            }
            None => (synthesized, true),
        };
        if self.antenna.spacing_wavelengths <= 0.0 {
            return Err(config_err("antenna.spacing_wavelengths", "must be > 0"));
        }
        let antenna = match self.antenna.kind {
            AntennaKind::Single => ArrayAntenna::single(patch, substrate, wave)?,
            AntennaKind::Array2x2 => ArrayAntenna::uniform_2x2(
                patch,
                substrate,
                wave,
                self.antenna.spacing_wavelengths * wave.wavelength,
            )?,
        };

        if self.lens.eps_r <= 1.0 {
            return Err(config_err("lens.eps_r", "must be > 1"));
        }
        if self.lens.radius_mm <= 0.0 {
            return Err(config_err("lens.radius_mm", "must be > 0"));
        }
        let mut lens = synthesize_lens(self.lens.radius_mm, self.lens.eps_r)?;
        if let Some(ext) = self.lens.extension_mm {
            if ext <= 0.0 {
                return Err(config_err("lens.extension_mm", "must be > 0"));
            }
            lens = LensSpec {
                extension_l: ext,
                shape: LensShape::ExtendedHemispherical,
                ..lens
            };
        }

        let pc = &self.phasecenter;
        if pc.delta_theta_deg <= 0.0 || pc.delta_theta_deg >= 90.0 || pc.delta_theta_deg.is_nan() {
            return Err(config_err(
                "phasecenter.delta_theta_deg",
                "must be in (0, 90)",
            ));
        }
        if pc.plane_z_wavelengths <= 0.0 {
            return Err(config_err("phasecenter.plane_z_wavelengths", "must be > 0"));
        }
        if pc.grid_n < 21 || pc.grid_n.is_multiple_of(2) {
            return Err(config_err("phasecenter.grid_n", "must be odd and >= 21"));
        }
        let z_plane = pc.plane_z_wavelengths * wave.wavelength;
        if pc.d_min_mm >= pc.d_max_mm {
            return Err(config_err(
                "phasecenter.d_min_mm",
                "scan range must be non-empty",
            ));
        }
        if pc.d_step_mm <= 0.0 {
            return Err(config_err("phasecenter.d_step_mm", "must be > 0"));
        }
        if pc.d_max_mm >= z_plane {
            return Err(config_err(
                "phasecenter.d_max_mm",
                "must lie below the probe plane",
            ));
        }
        let plane = build_plane(&wave, pc.delta_theta_deg.to_radians(), z_plane, pc.grid_n)?;

        let sw = &self.sweep;
        if sw.d_lo_mm >= sw.d_hi_mm {
            return Err(config_err("sweep.d_lo_mm", "sweep range must be non-empty"));
        }
        if sw.d_lo_mm < 0.0 {
            return Err(config_err("sweep.d_lo_mm", "must be >= 0"));
        }
        if sw.step_mm <= 0.0 {
            return Err(config_err("sweep.step_mm", "must be > 0"));
        }
        if sw.ray_count < 10_000 {
            return Err(config_err("sweep.ray_count", "must be at least 10000"));
        }
        let n = ((sw.d_hi_mm - sw.d_lo_mm) / sw.step_mm).floor() as usize + 1;
        let sweep_d: Vec<f64> = (0..n).map(|i| sw.d_lo_mm + i as f64 * sw.step_mm).collect();
        let sampled_mode = match sw.mode {
            Some(FeedMode::SampledField) => true,
            Some(FeedMode::PointSource) => false,
            None => matches!(self.antenna.kind, AntennaKind::Array2x2),
        };

        Ok(ValidatedRun {
            wave,
            patch,
            patch_was_synthesized,
            antenna,
            lens,
            plane,
            scan: (pc.d_min_mm, pc.d_max_mm, pc.d_step_mm),
            sweep_d,
            sampled_mode,
            ray_opts: RayBundleOptions {
                ray_count: sw.ray_count,
                ..Default::default()
            },
            out_dir: self.output.directory.clone(),
            emit_plots: self.output.emit_plots,
            emit_rays: self.output.emit_rays,
        })
    }
}
