//! Contrast the lens benefit for a single patch against the 2x2 array.
//! The single element's phase center sits at the antenna surface, so
//! its curve is flat near contact; the array gains much more from
//! repositioning.
//!
//! ```bash
//! cargo run --release --example single_vs_array
//! ```

use lensforge::emcore::wave_from_frequency;
use lensforge::lens::{synthesize_lens, RayBundleOptions};
use lensforge::phasecenter::build_plane;
use lensforge::radiators::{synthesize_patch, ArrayAntenna, SubstrateSpec};
use lensforge::sweep::gain_vs_separation;

fn main() -> lensforge::Result<()> {
    let wave = wave_from_frequency(30.2)?;
    let substrate = SubstrateSpec::new(2.2, 0.127)?;
    let patch = synthesize_patch(&wave, &substrate)?;
    let lens = synthesize_lens(17.27, 2.4)?;
    let plane = build_plane(&wave, 22.5f64.to_radians(), 10.0 * wave.wavelength, 41)?;
    let scan = (-30.0, 30.0, 0.2);
    let opts = RayBundleOptions::default();
    let d_values: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();

    let single = ArrayAntenna::single(patch, substrate, wave)?;
    // the single element radiates a well-formed spherical front, so the
    // point-source model applies
    let s = gain_vs_separation(&single, &lens, &wave, &plane, &d_values, false, &opts, scan)?;
    println!(
        "single patch: no lens {:.2} dBi; with lens {:.2} dBi at contact, peak {:.2} dBi at D = {:.1} mm (rise {:.2} dB)",
        s.no_lens_gain_dbi, s.gain_at_zero_dbi, s.gain_peak_dbi, s.d_peak, s.improvement_db
    );

    let array = ArrayAntenna::uniform_2x2(patch, substrate, wave, 0.7 * wave.wavelength)?;
    let a = gain_vs_separation(&array, &lens, &wave, &plane, &d_values, true, &opts, scan)?;
    println!(
        "2x2 array:    no lens {:.2} dBi; with lens {:.2} dBi at contact, peak {:.2} dBi at D = {:.1} mm (rise {:.2} dB)",
        a.no_lens_gain_dbi, a.gain_at_zero_dbi, a.gain_peak_dbi, a.d_peak, a.improvement_db
    );

    println!(
        "repositioning the lens buys the array {:.2} dB but the single element only {:.2} dB",
        a.improvement_db, s.improvement_db
    );
    Ok(())
}
