//! Phase-center estimation: build the solid-angle-limited measurement
//! plane, sample and unwrap the radiated phase on it, evaluate the
//! phase functional S(D) against an ideal spherical wave from a
//! candidate center height D, and locate the height that minimizes S.
//!
//! The probe plane stays fixed while the candidate center sweeps: the
//! ideal phase for candidate height D is the spherical phase from
//! (0, 0, D). A least-squares-optimal constant offset (the mean
//! residual) is removed before squaring, since phase centers are
//! defined only up to a reference phase.

use rayon::prelude::*;

use crate::emcore::WaveSpec;
use crate::emcore::{unwrap_phase_radial, Vec3};
use crate::error::{Error, Result};
use crate::radiators::FieldSource;
use crate::search::golden_section_min;

/// Maximum tolerated phase error for a "well formed" front, degrees.
pub const WELL_FORMED_LIMIT_DEG: f64 = 22.5;

/// The xy sampling plane cut to the solid-angle disk.
#[derive(Debug, Clone)]
pub struct MeasurementPlane {
    /// Height of the probe plane above the antenna surface, mm.
    pub z_plane: f64,
    /// Half-cone solid-angle parameter, rad.
    pub delta_theta: f64,
    /// Lattice samples per side (odd, >= 21).
    pub grid_n: usize,
    /// Lattice spacing, mm.
    pub spacing: f64,
    /// Free-space wavenumber carried from the wave context, rad/mm.
    pub wavenumber: f64,
    /// Retained (x, y) sample points inside the disk, lattice order.
    pub points: Vec<(f64, f64)>,
    /// Disk mask over the full grid_n x grid_n lattice, row-major.
    mask: Vec<bool>,
}

impl MeasurementPlane {
    /// Disk radius z_plane * tan(delta_theta), mm.
    pub fn disk_radius(&self) -> f64 {
        self.z_plane * self.delta_theta.tan()
    }
}

/// Unwrapped phase and amplitude samples over a measurement plane.
#[derive(Debug, Clone)]
pub struct PhaseGrid {
    pub plane: MeasurementPlane,
    /// Unwrapped phase per retained point, rad.
    pub phase: Vec<f64>,
    /// Linear amplitude per retained point.
    pub amplitude: Vec<f64>,
}

/// Result of a phase-center scan.
#[derive(Debug, Clone)]
pub struct PhaseCenterResult {
    /// Phase-center height above the antenna surface, mm.
    pub d_star: f64,
    /// (D, S) over the scan grid, ascending D; S in rad^2.
    pub s_curve: Vec<(f64, f64)>,
    /// Max |residual| after offset removal at d_star, degrees.
    pub max_phase_error_deg: f64,
    /// True when max_phase_error_deg <= 22.5.
    pub well_formed: bool,
}

/// Builds the solid-angle-limited sampling plane: a grid_n x grid_n
/// lattice over the bounding square of the disk of radius
/// z_plane*tan(delta_theta), masked to the disk.
pub fn build_plane(
    wave: &WaveSpec,
    delta_theta: f64,
    z_plane: f64,
    grid_n: usize,
) -> Result<MeasurementPlane> {
    if delta_theta <= 0.0 || delta_theta >= std::f64::consts::FRAC_PI_2 || delta_theta.is_nan() {
        return Err(Error::invalid(format!(
            "delta_theta must be in (0, pi/2), got {delta_theta}"
        )));
    }
    if z_plane <= 0.0 {
        return Err(Error::invalid("z_plane must be > 0"));
    }
    if grid_n < 21 || grid_n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "grid_n must be odd and >= 21, got {grid_n}"
        )));
    }
    let radius = z_plane * delta_theta.tan();
    let spacing = 2.0 * radius / (grid_n - 1) as f64;
    let half = (grid_n / 2) as isize;
    let mut points = Vec::new();
    let mut mask = vec![false; grid_n * grid_n];
    for row in 0..grid_n {
        for col in 0..grid_n {
            let x = (col as isize - half) as f64 * spacing;
            let y = (row as isize - half) as f64 * spacing;
            if x.hypot(y).atan2(z_plane) <= delta_theta + 1e-12 {
                mask[row * grid_n + col] = true;
                points.push((x, y));
            }
        }
    }
    Ok(MeasurementPlane {
        z_plane,
        delta_theta,
        grid_n,
        spacing,
        wavenumber: wave.wavenumber,
        points,
        mask,
    })
}

/// Samples the source field over the plane and unwraps the phase.
pub fn sample_phase(source: &dyn FieldSource, plane: &MeasurementPlane) -> Result<PhaseGrid> {
    let fields: Vec<_> = plane
        .points
        .par_iter()
        .map(|&(x, y)| source.field_at(Vec3::new(x, y, plane.z_plane)))
        .collect::<Result<_>>()?;
    let n = plane.grid_n;
    let mut lattice = vec![0.0; n * n];
    let mut amp = Vec::with_capacity(fields.len());
    let mut it = fields.iter();
    for (cell, &masked) in lattice.iter_mut().zip(&plane.mask) {
        if masked {
            let f = it.next().expect("mask/point count mismatch");
            *cell = f.arg();
            amp.push(f.norm());
        }
    }
    let c = n / 2;
    unwrap_phase_radial(n, (c, c), &plane.mask, &mut lattice);
    let phase: Vec<f64> = lattice
        .iter()
        .zip(&plane.mask)
        .filter_map(|(&p, &masked)| masked.then_some(p))
        .collect();
    Ok(PhaseGrid {
        plane: plane.clone(),
        phase,
        amplitude: amp,
    })
}

fn check_candidate(measured: &PhaseGrid, d: f64) -> Result<()> {
    if d >= measured.plane.z_plane {
        return Err(Error::invalid(format!(
            "candidate center D = {d} must lie below the probe plane z = {}",
            measured.plane.z_plane
        )));
    }
    Ok(())
}

/// Residuals (measured minus ideal spherical phase from height `d`)
/// after removing the least-squares-optimal constant offset.
fn offset_free_residuals(measured: &PhaseGrid, d: f64) -> Vec<f64> {
    let k = measured.plane.wavenumber;
    let z = measured.plane.z_plane;
    let mut res: Vec<f64> = measured
        .plane
        .points
        .iter()
        .zip(&measured.phase)
        .map(|(&(x, y), &ph)| {
            let ideal = -k * (x * x + y * y + (z - d) * (z - d)).sqrt();
            ph - ideal
        })
        .collect();
    let mean = res.iter().sum::<f64>() / res.len() as f64;
    for r in &mut res {
        *r -= mean;
    }
    res
}

/// The phase functional S(D): sum of squared offset-free residuals
/// between the measured phase and the ideal spherical phase referenced
/// to a center at height `d_candidate`. Units rad^2.
pub fn phase_function_s(measured: &PhaseGrid, d_candidate: f64) -> Result<f64> {
    check_candidate(measured, d_candidate)?;
    Ok(offset_free_residuals(measured, d_candidate)
        .iter()
        .map(|r| r * r)
        .sum())
}

/// Maximum |offset-free residual| at candidate height `d`, in degrees.
pub fn max_phase_error(measured: &PhaseGrid, d: f64) -> Result<f64> {
    check_candidate(measured, d)?;
    Ok(offset_free_residuals(measured, d)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()))
        .to_degrees())
}

/// Scans S(D) over [d_min, d_max] in steps of d_step, refines the
/// discrete minimizer by golden-section search, and reports the fitted
/// phase center with its well-formedness flag.
pub fn find_phase_center(
    source: &dyn FieldSource,
    plane: &MeasurementPlane,
    d_min: f64,
    d_max: f64,
    d_step: f64,
) -> Result<PhaseCenterResult> {
    if d_min >= d_max || d_step <= 0.0 {
        return Err(Error::invalid("require d_min < d_max and d_step > 0"));
    }
    if d_max >= plane.z_plane {
        return Err(Error::invalid("d_max must lie below the probe plane"));
    }
    let measured = sample_phase(source, plane)?;
    find_phase_center_of_grid(&measured, d_min, d_max, d_step)
}

/// Same scan on an already sampled grid.
pub fn find_phase_center_of_grid(
    measured: &PhaseGrid,
    d_min: f64,
    d_max: f64,
    d_step: f64,
) -> Result<PhaseCenterResult> {
    if d_min >= d_max || d_step <= 0.0 {
        return Err(Error::invalid("require d_min < d_max and d_step > 0"));
    }
    let n_steps = ((d_max - d_min) / d_step).floor() as usize + 1;
    let ds: Vec<f64> = (0..n_steps).map(|i| d_min + i as f64 * d_step).collect();
    if ds.is_empty() {
        return Err(Error::invalid("empty scan grid"));
    }
    let s_curve: Vec<(f64, f64)> = ds
        .par_iter()
        .map(|&d| Ok((d, phase_function_s(measured, d)?)))
        .collect::<Result<_>>()?;
    let (i_min, &(d_disc, s_disc)) = s_curve
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty scan");
    let lo = if i_min == 0 {
        d_disc
    } else {
        s_curve[i_min - 1].0
    };
    let hi = if i_min + 1 == s_curve.len() {
        d_disc
    } else {
        s_curve[i_min + 1].0
    };
    let mut d_star = d_disc;
    if hi > lo {
        let (d_ref, s_ref) = golden_section_min(
            |d| phase_function_s(measured, d).unwrap_or(f64::INFINITY),
            lo,
            hi,
            1e-3,
        );
        // refinement never increases S
        if s_ref <= s_disc {
            d_star = d_ref;
        }
    }
    let max_err = max_phase_error(measured, d_star)?;
    Ok(PhaseCenterResult {
        d_star,
        s_curve,
        max_phase_error_deg: max_err,
        well_formed: max_err <= WELL_FORMED_LIMIT_DEG,
    })
}
