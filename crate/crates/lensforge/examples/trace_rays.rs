//! Trace ray fans through the synthesized extended-hemispherical lens
//! and through the exact elliptical reference: exit angles, path
//! lengths, and the status census of a wide bundle.
//!
//! ```bash
//! cargo run --release --example trace_rays
//! ```

use lensforge::emcore::Vec3;
use lensforge::lens::{
    elliptical_oracle, synthesize_lens, trace_bundle_rows, trace_ray, trace_ray_immersed,
    LensPlacement, RayStatus,
};

fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

fn main() -> lensforge::Result<()> {
    let lens = synthesize_lens(17.27, 2.4)?;
    let placement = LensPlacement::new(lens, 0.0)?;

    println!("extended hemisphere, base-fed, air-side launch angles:");
    for deg in [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 35.0, 50.0] {
        let t = deg_to_rad(deg);
        let ray = trace_ray(&placement, Vec3::ZERO, Vec3::new(t.sin(), 0.0, t.cos()))?;
        match ray.status {
            RayStatus::Exited => {
                let e = ray.exit.unwrap();
                println!(
                    "  {deg:5.1} deg -> exit {:6.3} deg off boresight at rho = {:5.2} mm, path {:.2} mm, amp {:.3}",
                    e.exit_direction.rho().atan2(e.exit_direction.z).to_degrees(),
                    e.exit_point.rho(),
                    ray.optical_path,
                    ray.amplitude_factor
                );
            }
            status => println!("  {deg:5.1} deg -> {status:?}"),
        }
    }

    println!("elliptical reference, immersed rays from the focus:");
    let ell = elliptical_oracle(17.27, 2.4)?;
    let epl = LensPlacement::new(ell, 0.0)?;
    for deg in [10.0, 30.0, 45.0, 49.5] {
        let t = deg_to_rad(deg);
        let ray = trace_ray_immersed(&epl, Vec3::ZERO, Vec3::new(t.sin(), 0.0, t.cos()))?;
        let e = ray.exit.unwrap();
        println!(
            "  {deg:5.1} deg -> off boresight {:9.2e} rad, path {:.6} mm",
            e.exit_direction.rho().atan2(e.exit_direction.z),
            ray.optical_path
        );
    }

    println!("status census of a 20k bundle from 2 mm below the face:");
    let placement = LensPlacement::new(lens, 2.0)?;
    let rows = trace_bundle_rows(&placement, Vec3::ZERO, 20_000)?;
    let mut counts = [0usize; 4];
    for (_, ray) in &rows {
        counts[match ray.status {
            RayStatus::Exited => 0,
            RayStatus::SpilloverMissed => 1,
            RayStatus::TotalInternalReflection => 2,
            RayStatus::SideWall => 3,
        }] += 1;
    }
    println!(
        "  exited {}, missed {}, TIR {}, side wall {} (of {})",
        counts[0],
        counts[1],
        counts[2],
        counts[3],
        rows.len()
    );
    Ok(())
}
