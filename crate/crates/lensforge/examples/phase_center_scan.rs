//! Locate phase centers by least-squares fitting of the phase
//! functional S(D) over the 22.5-degree sampling cone: first for an
//! ideal point source (exact recovery), then for the 2x2 patch array.
//!
//! ```bash
//! cargo run --release --example phase_center_scan
//! ```

use lensforge::emcore::{wave_from_frequency, Vec3};
use lensforge::phasecenter::{build_plane, find_phase_center};
use lensforge::radiators::{synthesize_patch, ArrayAntenna, PointSource, SubstrateSpec};

fn main() -> lensforge::Result<()> {
    let wave = wave_from_frequency(30.2)?;
    let plane = build_plane(&wave, 22.5f64.to_radians(), 10.0 * wave.wavelength, 41)?;
    println!(
        "sampling plane: z = {:.2} mm, disk radius {:.2} mm, {} points",
        plane.z_plane,
        plane.disk_radius(),
        plane.points.len()
    );

    // exact oracle: a spherical wave from 5 mm above the surface
    let source = PointSource {
        position: Vec3::new(0.0, 0.0, 5.0),
        wave,
    };
    let fit = find_phase_center(&source, &plane, -30.0, 30.0, 0.2)?;
    println!(
        "point source at 5 mm -> d_star = {:.3} mm, max phase error {:.2e} deg",
        fit.d_star, fit.max_phase_error_deg
    );

    // the reference array
    let substrate = SubstrateSpec::new(2.2, 0.127)?;
    let patch = synthesize_patch(&wave, &substrate)?;
    let array = ArrayAntenna::uniform_2x2(patch, substrate, wave, 0.7 * wave.wavelength)?;
    let fit = find_phase_center(&array, &plane, -30.0, 30.0, 0.2)?;
    println!(
        "2x2 array -> d_star = {:.3} mm, max phase error {:.3} deg, well formed: {}",
        fit.d_star, fit.max_phase_error_deg, fit.well_formed
    );
    // a short stretch of the S curve around the minimum
    for (d, s) in fit.s_curve.iter().filter(|(d, _)| (-2.0..=2.0).contains(d)) {
        if (d / 0.4).fract().abs() < 1e-9 {
            println!("  S({d:5.1} mm) = {s:.4} rad^2");
        }
    }
    Ok(())
}
