//! First-order geometrical-optics ray tracing through a placed lens:
//! air gap, refraction at the flat face, one dielectric segment, exit
//! refraction at the spherical (or ellipsoidal) surface, air to the
//! output plane. Side-wall hits and total internal reflection terminate
//! a ray; no internal reflections are followed.

use crate::emcore::{fresnel_transmission, snell_refract, Refraction, Vec3};
use crate::error::{Error, Result};

use super::{LensPlacement, LensShape};

const T_EPS: f64 = 1e-9;

/// Where a ray ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayStatus {
    /// Left through the curved surface and reached the output plane.
    Exited,
    /// Never entered the lens, or exited below the aperture horizon.
    SpilloverMissed,
    /// Terminated at the curved surface beyond the critical angle.
    TotalInternalReflection,
    /// Hit the cylindrical side wall; discarded.
    SideWall,
}

/// Exit data for rays with status `Exited`.
#[derive(Debug, Clone, Copy)]
pub struct RayExit {
    /// Intersection with the output plane z = d_gap + L + R, mm.
    pub exit_point: Vec3,
    /// Unit direction after the exit refraction.
    pub exit_direction: Vec3,
}

/// One traced ray.
#[derive(Debug, Clone, Copy)]
pub struct TracedRay {
    pub launch_direction: Vec3,
    pub status: RayStatus,
    /// Populated exactly when status is `Exited`.
    pub exit: Option<RayExit>,
    /// Geometric path with in-dielectric segments weighted by n, up to
    /// the output plane (or the terminating surface), mm.
    pub optical_path: f64,
    /// Product of the per-interface amplitude factors sqrt(T); in (0, 1].
    pub amplitude_factor: f64,
}

/// Traces one ray from `source_point` (strictly below the flat face, or
/// exactly on it) along the air-side `launch_direction`.
///
/// A source on the face plane enters the dielectric at the source point
/// itself: the air segment has zero length but the interface refraction
/// and Fresnel factor still apply, which reproduces the beam
/// compression a radiator pressed against the face experiences.
pub fn trace_ray(
    placement: &LensPlacement,
    source_point: Vec3,
    launch_direction: Vec3,
) -> Result<TracedRay> {
    if !launch_direction.is_unit(1e-9) {
        return Err(Error::invalid("launch_direction must be unit-norm"));
    }
    if launch_direction.z <= 0.0 {
        return Err(Error::invalid("launch_direction must point upward (z > 0)"));
    }
    let face_z = placement.face_z();
    if source_point.z > face_z + 1e-12 {
        return Err(Error::invalid(
            "source_point must lie below or on the lens flat face",
        ));
    }
    let t_air = (face_z - source_point.z) / launch_direction.z;
    let entry = source_point + t_air * launch_direction;
    if entry.rho() > placement.lens.face_radius() + 1e-9 {
        return Ok(TracedRay {
            launch_direction,
            status: RayStatus::SpilloverMissed,
            exit: None,
            optical_path: t_air,
            amplitude_factor: 1.0,
        });
    }
    let n = placement.lens.n;
    let internal = match snell_refract(launch_direction, Vec3::new(0.0, 0.0, -1.0), 1.0, n)? {
        Refraction::Refracted(d) => d,
        // air into the denser medium cannot reflect totally
        Refraction::TotalInternalReflection => unreachable!("TIR entering a denser medium"),
    };
    let theta_in = launch_direction.rho().atan2(launch_direction.z);
    let t1 = fresnel_transmission(theta_in, 1.0, n)?.power_transmittance;
    let mut ray = trace_inside(placement, entry, internal, t_air, t1.sqrt());
    ray.launch_direction = launch_direction;
    Ok(ray)
}

/// Traces a ray already inside the dielectric (immersed feed): starts
/// at `point` (on the face plane or inside the body) along the
/// in-dielectric `direction`; only the exit interface applies.
pub fn trace_ray_immersed(
    placement: &LensPlacement,
    point: Vec3,
    direction: Vec3,
) -> Result<TracedRay> {
    if !direction.is_unit(1e-9) {
        return Err(Error::invalid("direction must be unit-norm"));
    }
    if direction.z <= 0.0 {
        return Err(Error::invalid("direction must point upward (z > 0)"));
    }
    if point.z < placement.face_z() - 1e-12 || point.rho() > placement.lens.face_radius() + 1e-9 {
        return Err(Error::invalid(
            "immersed launch point must lie inside the lens body",
        ));
    }
    Ok(trace_inside(placement, point, direction, 0.0, 1.0))
}

/// Dielectric traversal from an interior boundary point onward.
pub(crate) fn trace_inside(
    placement: &LensPlacement,
    entry: Vec3,
    direction: Vec3,
    path_before: f64,
    amp_before: f64,
) -> TracedRay {
    let lens = &placement.lens;
    let n = lens.n;
    let cz = placement.center_z();

    let (t_hit, on_wall) = match lens.shape {
        LensShape::ExtendedHemispherical => {
            first_surface_extended(entry, direction, lens.radius_r, placement.face_z(), cz)
        }
        LensShape::EllipticalOracle => {
            let t = ellipsoid_exit(entry, direction, lens.radius_r, lens.semi_major(), cz);
            // the zone below the equator is the truncated body's lateral
            // boundary, the analogue of the cylinder side wall
            let wall = t.is_some_and(|t| entry.z + t * direction.z < cz - 1e-9);
            (t, wall)
        }
    };
    let Some(t_hit) = t_hit else {
        // numerically failed to find the boundary; treat as lost
        return TracedRay {
            launch_direction: direction,
            status: RayStatus::SpilloverMissed,
            exit: None,
            optical_path: path_before,
            amplitude_factor: amp_before,
        };
    };
    let hit = entry + t_hit * direction;
    let path_to_surface = path_before + n * t_hit;
    if on_wall {
        return TracedRay {
            launch_direction: direction,
            status: RayStatus::SideWall,
            exit: None,
            optical_path: path_to_surface,
            amplitude_factor: amp_before,
        };
    }
    let normal = match lens.shape {
        LensShape::ExtendedHemispherical => (hit - Vec3::new(0.0, 0.0, cz)) / lens.radius_r,
        LensShape::EllipticalOracle => {
            let r2 = lens.radius_r * lens.radius_r;
            let a2 = lens.semi_major() * lens.semi_major();
            Vec3::new(hit.x / r2, hit.y / r2, (hit.z - cz) / a2).normalized()
        }
    };
    let outgoing = match snell_refract(direction, normal, n, 1.0) {
        Ok(Refraction::Refracted(d)) => d,
        Ok(Refraction::TotalInternalReflection) => {
            return TracedRay {
                launch_direction: direction,
                status: RayStatus::TotalInternalReflection,
                exit: None,
                optical_path: path_to_surface,
                amplitude_factor: amp_before,
            };
        }
        Err(_) => unreachable!("tracer constructs unit directions"),
    };
    let cos_i = direction.dot(normal).clamp(-1.0, 1.0);
    let theta_i = cos_i.acos();
    let t2 = match fresnel_transmission(theta_i, n, 1.0) {
        Ok(f) => f.power_transmittance,
        Err(_) => {
            return TracedRay {
                launch_direction: direction,
                status: RayStatus::TotalInternalReflection,
                exit: None,
                optical_path: path_to_surface,
                amplitude_factor: amp_before,
            };
        }
    };
    if outgoing.z <= 1e-9 {
        // exits at or below the aperture horizon; never reaches the plane
        return TracedRay {
            launch_direction: direction,
            status: RayStatus::SpilloverMissed,
            exit: None,
            optical_path: path_to_surface,
            amplitude_factor: amp_before * t2.sqrt(),
        };
    }
    let z_out = placement.output_plane_z();
    let t_out = (z_out - hit.z) / outgoing.z;
    let exit_point = hit + t_out * outgoing;
    TracedRay {
        launch_direction: direction,
        status: RayStatus::Exited,
        exit: Some(RayExit {
            exit_point,
            exit_direction: outgoing,
        }),
        optical_path: path_to_surface + t_out,
        amplitude_factor: amp_before * t2.sqrt(),
    }
}

/// First boundary crossing inside the extended-hemispherical body:
/// returns (t, hit_is_side_wall).
fn first_surface_extended(
    o: Vec3,
    d: Vec3,
    radius: f64,
    face_z: f64,
    cz: f64,
) -> (Option<f64>, bool) {
    // immediate wall exit for rim entries pointing outward
    let c_cyl = o.x * o.x + o.y * o.y - radius * radius;
    let b_cyl = o.x * d.x + o.y * d.y;
    if c_cyl >= -1e-9 && b_cyl > 0.0 {
        return (Some(0.0), true);
    }
    let mut best: Option<(f64, bool)> = None;
    let mut consider = |t: f64, wall: bool| {
        if t > T_EPS && best.is_none_or(|(bt, _)| t < bt) {
            best = Some((t, wall));
        }
    };
    // spherical cap: roots with hit z >= cz
    let oc = o - Vec3::new(0.0, 0.0, cz);
    let b = oc.dot(d);
    let c = oc.dot(oc) - radius * radius;
    let disc = b * b - c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        for t in [-b - s, -b + s] {
            if t > T_EPS && o.z + t * d.z >= cz - 1e-9 {
                consider(t, false);
            }
        }
    }
    // cylinder wall: roots with z in the extension span
    let a = d.x * d.x + d.y * d.y;
    if a > 1e-14 {
        let disc = b_cyl * b_cyl - a * c_cyl;
        if disc >= 0.0 {
            let s = disc.sqrt();
            for t in [(-b_cyl - s) / a, (-b_cyl + s) / a] {
                let z = o.z + t * d.z;
                if t > T_EPS && z >= face_z - 1e-9 && z <= cz + 1e-9 {
                    consider(t, true);
                }
            }
        }
    }
    match best {
        Some((t, wall)) => (Some(t), wall),
        None => (None, false),
    }
}

/// Forward exit through the ellipsoid with semi-axes (r, r, a) centered
/// at (0, 0, cz).
fn ellipsoid_exit(o: Vec3, d: Vec3, r: f64, a: f64, cz: f64) -> Option<f64> {
    let sx = 1.0 / r;
    let sz = 1.0 / a;
    let ox = o.x * sx;
    let oy = o.y * sx;
    let oz = (o.z - cz) * sz;
    let dx = d.x * sx;
    let dy = d.y * sx;
    let dz = d.z * sz;
    let qa = dx * dx + dy * dy + dz * dz;
    let qb = ox * dx + oy * dy + oz * dz;
    let qc = ox * ox + oy * oy + oz * oz - 1.0;
    let disc = qb * qb - qa * qc;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    [(-qb - s) / qa, (-qb + s) / qa]
        .into_iter()
        .find(|&t| t > T_EPS)
}
