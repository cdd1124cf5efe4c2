//! Far-field evaluation: the Airy pattern of an ideal uniform circular
//! aperture, then the full traced pattern of the lens fed by the 2x2
//! array at its fitted phase center.
//!
//! ```bash
//! cargo run --release --example aperture_pattern
//! ```

use lensforge::emcore::{wave_from_frequency, ComplexAmp};
use lensforge::lens::{
    far_field_with_grid, lens_gain_with, synthesize_lens, ApertureField, GainMode, LensPlacement,
    PatternGridSpec, RayBundleOptions,
};
use lensforge::phasecenter::{build_plane, find_phase_center};
use lensforge::radiators::{synthesize_patch, ArrayAntenna, SubstrateSpec};

fn main() -> lensforge::Result<()> {
    let wave = wave_from_frequency(30.2)?;

    // hand-built uniform disk: the Airy reference
    let r = 17.27;
    let cell = wave.wavelength / 8.0;
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
    let aperture = ApertureField {
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
    };
    let grid = PatternGridSpec {
        theta_step: 0.2f64.to_radians(),
        phi_step: 45f64.to_radians(),
    };
    let ff = far_field_with_grid(&aperture, &wave, Some(grid))?;
    println!(
        "uniform disk R = {r} mm: directivity {:.2} dBi; E-cut (dB rel. peak):",
        ff.boresight_directivity_dbi
    );
    let peak = ff.intensity[0];
    for i in (0..ff.n_theta).step_by(25) {
        let theta = (i as f64 * ff.theta_step).to_degrees();
        let level = 10.0 * (ff.intensity[i * ff.n_phi] / peak).log10();
        println!("  theta {theta:5.1} deg: {level:7.2} dB");
    }

    // the real pipeline: array + lens at the fitted phase center
    let substrate = SubstrateSpec::new(2.2, 0.127)?;
    let patch = synthesize_patch(&wave, &substrate)?;
    let array = ArrayAntenna::uniform_2x2(patch, substrate, wave, 0.7 * wave.wavelength)?;
    let plane = build_plane(&wave, 22.5f64.to_radians(), 10.0 * wave.wavelength, 41)?;
    let pc = find_phase_center(&array, &plane, -30.0, 30.0, 0.2)?;
    let lens = synthesize_lens(17.27, 2.4)?;
    let placement = LensPlacement::new(lens, pc.d_star.max(0.0))?;
    let ff = lens_gain_with(
        &array,
        &placement,
        &wave,
        GainMode::PointSource {
            phase_center: pc.d_star,
        },
        &RayBundleOptions::default(),
        Some(PatternGridSpec::default()),
    )?;
    println!(
        "array + lens at D = {:.2} mm: gain {:.2} dBi (directivity {:.2}, spillover {:.3}, transmission {:.3})",
        placement.d_gap,
        ff.gain_estimate_dbi,
        ff.boresight_directivity_dbi,
        ff.spillover_efficiency,
        ff.transmission_efficiency
    );
    Ok(())
}
