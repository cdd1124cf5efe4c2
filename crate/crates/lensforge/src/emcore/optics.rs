use super::Vec3;
use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-9;

/// Outcome of refraction at a dielectric interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Refraction {
    /// Transmitted unit direction.
    Refracted(Vec3),
    /// No transmitted ray: n_in*sin(theta_in) > n_out.
    TotalInternalReflection,
}

/// Refracts `incident` at an interface with unit `surface_normal`
/// (either orientation), going from index `n_in` into `n_out`.
///
/// Vector Snell form: the transmitted direction is unit-norm, coplanar
/// with the incident ray and the normal, and satisfies
/// n_out*sin(theta_out) = n_in*sin(theta_in).
pub fn snell_refract(
    incident: Vec3,
    surface_normal: Vec3,
    n_in: f64,
    n_out: f64,
) -> Result<Refraction> {
    if !incident.is_unit(UNIT_TOL) || !surface_normal.is_unit(UNIT_TOL) {
        return Err(Error::invalid(
            "snell_refract requires unit-norm incident and normal directions",
        ));
    }
    if n_in < 1.0 || n_out < 1.0 {
        return Err(Error::invalid("refractive indices must be >= 1"));
    }
    // Orient the normal against the ray so cos_i >= 0.
    let n_hat = if incident.dot(surface_normal) > 0.0 {
        -surface_normal
    } else {
        surface_normal
    };
    let cos_i = -incident.dot(n_hat);
    let eta = n_in / n_out;
    let sin2_t = eta * eta * (1.0 - cos_i * cos_i);
    if sin2_t > 1.0 {
        return Ok(Refraction::TotalInternalReflection);
    }
    let cos_t = (1.0 - sin2_t).sqrt();
    let t = eta * incident + (eta * cos_i - cos_t) * n_hat;
    Ok(Refraction::Refracted(t.normalized()))
}

/// Fresnel amplitude transmission coefficients and the unpolarized
/// power transmittance for a planar dielectric interface.
#[derive(Debug, Clone, Copy)]
pub struct FresnelTransmission {
    /// Perpendicular (s) amplitude transmission coefficient.
    pub t_perp: f64,
    /// Parallel (p) amplitude transmission coefficient.
    pub t_par: f64,
    /// 1 - mean of the s/p power reflectances; in [0, 1].
    pub power_transmittance: f64,
}

/// Fresnel coefficients at incidence angle `theta_in` (rad), going from
/// `n_in` into `n_out`. Errors with `TotalInternalReflection` beyond the
/// critical angle.
pub fn fresnel_transmission(theta_in: f64, n_in: f64, n_out: f64) -> Result<FresnelTransmission> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&theta_in) {
        return Err(Error::invalid(format!(
            "theta_in must be in [0, pi/2), got {theta_in}"
        )));
    }
    if n_in < 1.0 || n_out < 1.0 {
        return Err(Error::invalid("refractive indices must be >= 1"));
    }
    let sin_ratio = n_in * theta_in.sin() / n_out;
    if sin_ratio > 1.0 {
        return Err(Error::TotalInternalReflection { sin_ratio });
    }
    let cos_i = theta_in.cos();
    let cos_t = (1.0 - sin_ratio * sin_ratio).sqrt();
    let r_perp = (n_in * cos_i - n_out * cos_t) / (n_in * cos_i + n_out * cos_t);
    let r_par = (n_out * cos_i - n_in * cos_t) / (n_out * cos_i + n_in * cos_t);
    let t_perp = 2.0 * n_in * cos_i / (n_in * cos_i + n_out * cos_t);
    let t_par = 2.0 * n_in * cos_i / (n_out * cos_i + n_in * cos_t);
    let reflectance = 0.5 * (r_perp * r_perp + r_par * r_par);
    Ok(FresnelTransmission {
        t_perp,
        t_par,
        power_transmittance: 1.0 - reflectance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const N_LENS: f64 = 1.5491933384829668; // sqrt(2.4)

    #[test]
    fn normal_incidence_passes_through() {
        let d = Vec3::new(0.0, 0.0, 1.0);
        let n = Vec3::new(0.0, 0.0, -1.0);
        match snell_refract(d, n, 1.0, 2.3).unwrap() {
            Refraction::Refracted(t) => {
                assert!((t - d).norm() < 1e-12);
            }
            _ => panic!("unexpected TIR"),
        }
    }

    #[test]
    fn snell_law_satisfied_at_30_degrees() {
        let th = 30f64.to_radians();
        let d = Vec3::new(th.sin(), 0.0, th.cos());
        let n = Vec3::new(0.0, 0.0, -1.0);
        match snell_refract(d, n, 1.0, N_LENS).unwrap() {
            Refraction::Refracted(t) => {
                let theta_out = t.rho().atan2(t.z);
                // hand evaluation: asin(sin 30 deg / 1.5492) = 18.82923 deg
                assert!((theta_out.to_degrees() - 18.82923100310392).abs() < 1e-9);
                assert!(t.is_unit(1e-12));
                // coplanar: no y component appears
                assert!(t.y.abs() < 1e-15);
                // exact Snell within 1e-10
                assert!((N_LENS * theta_out.sin() - th.sin()).abs() < 1e-10);
            }
            _ => panic!("unexpected TIR"),
        }
    }

    #[test]
    fn tir_beyond_critical_angle() {
        // critical angle asin(1/sqrt(2.4)) = 40.203 deg < 45 deg
        let th = 45f64.to_radians();
        let d = Vec3::new(th.sin(), 0.0, th.cos());
        let n = Vec3::new(0.0, 0.0, -1.0);
        assert_eq!(
            snell_refract(d, n, N_LENS, 1.0).unwrap(),
            Refraction::TotalInternalReflection
        );
        // just below critical still refracts
        let th = 40.2f64.to_radians();
        let d = Vec3::new(th.sin(), 0.0, th.cos());
        assert!(matches!(
            snell_refract(d, n, N_LENS, 1.0).unwrap(),
            Refraction::Refracted(_)
        ));
    }

    #[test]
    fn snell_reciprocity() {
        let th = 33.7f64.to_radians();
        let d = Vec3::new(th.sin(), 0.2, th.cos()).normalized();
        let n = Vec3::new(0.1, 0.0, -1.0).normalized();
        let t = match snell_refract(d, n, 1.0, N_LENS).unwrap() {
            Refraction::Refracted(t) => t,
            _ => panic!(),
        };
        let back = match snell_refract(-t, n, N_LENS, 1.0).unwrap() {
            Refraction::Refracted(b) => b,
            _ => panic!(),
        };
        assert!((back + d).norm() < 1e-9);
    }

    #[test]
    fn non_unit_inputs_rejected() {
        let bad = Vec3::new(0.0, 0.0, 2.0);
        let n = Vec3::new(0.0, 0.0, 1.0);
        assert!(snell_refract(bad, n, 1.0, 1.5).is_err());
        assert!(snell_refract(n, bad, 1.0, 1.5).is_err());
    }

    #[test]
    fn fresnel_index_matched() {
        let f = fresnel_transmission(0.0, 1.0, 1.0).unwrap();
        assert!((f.t_perp - 1.0).abs() < 1e-15);
        assert!((f.t_par - 1.0).abs() < 1e-15);
        assert!((f.power_transmittance - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fresnel_normal_incidence_lens_exit() {
        let f = fresnel_transmission(0.0, N_LENS, 1.0).unwrap();
        // ((n1-n2)/(n1+n2))^2 = 0.0464136
        assert!((f.power_transmittance - 0.9535864302899734).abs() < 1e-12);
    }

    #[test]
    fn brewster_angle_kills_parallel_reflection() {
        // glass -> air Brewster: atan(n_out/n_in)
        let brewster = (1.0 / N_LENS).atan();
        let f = fresnel_transmission(brewster, N_LENS, 1.0).unwrap();
        let cos_i = brewster.cos();
        let sin_t = N_LENS * brewster.sin();
        let cos_t = (1.0 - sin_t * sin_t).sqrt();
        let r_par = (cos_i - N_LENS * cos_t) / (cos_i + N_LENS * cos_t);
        assert!(r_par.abs() < 1e-10);
        assert!(f.power_transmittance > 0.9);
    }

    #[test]
    fn fresnel_tir_is_error() {
        let e = fresnel_transmission(45f64.to_radians(), N_LENS, 1.0);
        assert!(matches!(e, Err(Error::TotalInternalReflection { .. })));
    }

    #[test]
    fn transmittance_plus_reflectance_is_one() {
        for deg in [0.0f64, 10.0, 25.0, 39.0, 60.0, 80.0] {
            let f = fresnel_transmission(deg.to_radians(), 1.0, N_LENS).unwrap();
            let cos_i = deg.to_radians().cos();
            let sin_t = deg.to_radians().sin() / N_LENS;
            let cos_t = (1.0 - sin_t * sin_t).sqrt();
            let r_perp = (cos_i - N_LENS * cos_t) / (cos_i + N_LENS * cos_t);
            let r_par = (N_LENS * cos_i - cos_t) / (N_LENS * cos_i + cos_t);
            let refl = 0.5 * (r_perp * r_perp + r_par * r_par);
            assert!((f.power_transmittance + refl - 1.0).abs() < 1e-12);
        }
    }
}
