//! Synthesize the reference design: a 30.2 GHz patch on 0.127 mm
//! Duroid and an eps_r = 2.4 extended-hemispherical lens of 17.27 mm
//! radius.
//!
//! ```bash
//! cargo run --release --example design_report
//! ```

use lensforge::emcore::wave_from_frequency;
use lensforge::lens::{synthesize_lens, theoretical_max_gain};
use lensforge::radiators::{synthesize_patch, SubstrateSpec};

fn main() -> lensforge::Result<()> {
    let wave = wave_from_frequency(30.2)?;
    println!(
        "wave: f = {} GHz, lambda = {:.4} mm, k = {:.5} rad/mm",
        wave.frequency, wave.wavelength, wave.wavenumber
    );

    let substrate = SubstrateSpec::new(2.2, 0.127)?;
    let patch = synthesize_patch(&wave, &substrate)?;
    println!(
        "patch: width {:.3} mm, length {:.3} mm (eps_eff {:.4}, fringing {:.4} mm)",
        patch.width, patch.length, patch.eps_eff, patch.delta_l
    );

    let lens = synthesize_lens(17.27, 2.4)?;
    println!(
        "lens:  n = {:.4}, b = {:.3} mm, extension L = {:.3} mm, apex at L + R = {:.3} mm",
        lens.n,
        lens.b,
        lens.extension_l,
        lens.apex_height()
    );
    println!(
        "uniform-aperture gain ceiling: {:.2} dBi",
        theoretical_max_gain(&lens, &wave)
    );
    Ok(())
}
