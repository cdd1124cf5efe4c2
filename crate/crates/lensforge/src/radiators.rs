//! Analytic radiator models: single inset-fed microstrip patch and a
//! uniformly excited 2x2 array of them.
//!
//! Elements are point radiators at z = 0 carrying the two-slot
//! cavity-model pattern; the ground plane is taken infinite, so the
//! field is identically zero below the antenna plane and hemisphere
//! integrals capture all radiated power. The point-radiator
//! superposition is used at every z > 0; reactive near-field terms are
//! not modeled, which is a documented limitation very close to the
//! elements.

use crate::emcore::{ComplexAmp, Vec3, WaveSpec, C_MM_GHZ};
use crate::error::{Error, Result};

/// Dielectric substrate the patches sit on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubstrateSpec {
    /// Relative permittivity (unitless), >= 1.
    pub eps_r: f64,
    /// Substrate height in mm, > 0.
    pub height: f64,
}

impl SubstrateSpec {
    pub fn new(eps_r: f64, height: f64) -> Result<Self> {
        if eps_r < 1.0 {
            return Err(Error::invalid(format!(
                "substrate eps_r must be >= 1, got {eps_r}"
            )));
        }
        if height <= 0.0 {
            return Err(Error::invalid(format!(
                "substrate height must be > 0, got {height}"
            )));
        }
        Ok(SubstrateSpec { eps_r, height })
    }
}

/// Rectangular patch dimensions with the fringing-field quantities used
/// by the element pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchGeometry {
    /// Width (non-resonant side) in mm.
    pub width: f64,
    /// Resonant length in mm.
    pub length: f64,
    /// Effective permittivity of the quasi-TEM line.
    pub eps_eff: f64,
    /// Fringing length extension in mm.
    pub delta_l: f64,
}

impl PatchGeometry {
    /// Effective resonant length (slot separation): length + 2*delta_l.
    pub fn effective_length(&self) -> f64 {
        self.length + 2.0 * self.delta_l
    }
}

/// Synthesizes patch dimensions with the standard transmission-line
/// design procedure: width from the radiation-efficiency compromise,
/// effective permittivity from the closed-form microstrip expression,
/// fringing extension from the Hammerstad formula, and resonant length
/// as the half-wave line shortened by the fringing on both edges.
pub fn synthesize_patch(wave: &WaveSpec, substrate: &SubstrateSpec) -> Result<PatchGeometry> {
    let f = wave.frequency;
    let width = C_MM_GHZ / (2.0 * f) * (2.0 / (substrate.eps_r + 1.0)).sqrt();
    let w_h = width / substrate.height;
    let eps_eff =
        (substrate.eps_r + 1.0) / 2.0 + (substrate.eps_r - 1.0) / 2.0 / (1.0 + 12.0 / w_h).sqrt();
    let delta_l = 0.412 * substrate.height * (eps_eff + 0.3) * (w_h + 0.264)
        / ((eps_eff - 0.258) * (w_h + 0.8));
    let length = C_MM_GHZ / (2.0 * f * eps_eff.sqrt()) - 2.0 * delta_l;
    if length <= 0.0 {
        return Err(Error::invalid("synthesized patch length is non-positive"));
    }
    Ok(PatchGeometry {
        width,
        length,
        eps_eff,
        delta_l,
    })
}

/// Co-polar two-slot cavity-model element pattern, normalized to 1 at
/// boresight: the slot factor times the two-slot array factor, with the
/// obliquity of the theta/phi field components folded in. Real-valued;
/// zero phase at boresight.
pub fn element_pattern(
    patch: &PatchGeometry,
    wave: &WaveSpec,
    theta: f64,
    phi: f64,
) -> Result<ComplexAmp> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::invalid(format!(
            "element_pattern requires theta in [0, pi/2], got {theta}"
        )));
    }
    Ok(ComplexAmp::new(
        element_pattern_amp(patch, wave, theta, phi),
        0.0,
    ))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

fn element_pattern_amp(patch: &PatchGeometry, wave: &WaveSpec, theta: f64, phi: f64) -> f64 {
    let k = wave.wavenumber;
    let st = theta.sin();
    let ct = theta.cos();
    let slot = sinc(k * patch.width / 2.0 * st * phi.sin());
    let two_slot = (k * patch.effective_length() / 2.0 * st * phi.cos()).cos();
    let f = slot * two_slot;
    let e_theta = f * phi.cos();
    let e_phi = -f * ct * phi.sin();
    let amp = (e_theta * e_theta + e_phi * e_phi).sqrt();
    // carry the sign of the pattern function so phase reversals survive
    if f < 0.0 {
        -amp
    } else {
        amp
    }
}

/// Anything that radiates: evaluates the complex field at a point in the
/// upper half-space and the far-field amplitude (1/r removed) per
/// direction. Implementations must be pure and Sync so grids can be
/// sampled from parallel loops.
pub trait FieldSource: Sync {
    /// Complex field at `point` (requires point.z > 0 for antennas).
    fn field_at(&self, point: Vec3) -> Result<ComplexAmp>;
    /// Far-field complex amplitude in direction (theta, phi); the common
    /// exp(-jkR)/R spherical factor is removed.
    fn far_field(&self, theta: f64, phi: f64) -> ComplexAmp;
    /// Free-space wavenumber, rad/mm.
    fn wavenumber(&self) -> f64;
    /// Total radiated power: upper-hemisphere integral of |far_field|^2.
    fn total_radiated_power(&self) -> f64 {
        integrate_hemisphere(|t, p| self.far_field(t, p).norm_sqr(), 0.5f64.to_radians())
    }
}

/// Ideal isotropic point radiator, usable anywhere in space. Serves as
/// the exact oracle for phase-center recovery and lens focusing tests.
#[derive(Debug, Clone, Copy)]
pub struct PointSource {
    pub position: Vec3,
    pub wave: WaveSpec,
}

impl FieldSource for PointSource {
    fn field_at(&self, point: Vec3) -> Result<ComplexAmp> {
        let r = (point - self.position).norm();
        if r == 0.0 {
            return Err(Error::invalid("field requested at the source point"));
        }
        Ok(ComplexAmp::from_polar(1.0 / r, -self.wave.wavenumber * r))
    }

    fn far_field(&self, theta: f64, phi: f64) -> ComplexAmp {
        let rhat = Vec3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        );
        ComplexAmp::from_polar(1.0, self.wave.wavenumber * rhat.dot(self.position))
    }

    fn wavenumber(&self) -> f64 {
        self.wave.wavenumber
    }

    fn total_radiated_power(&self) -> f64 {
        2.0 * std::f64::consts::PI
    }
}

/// Patch antenna or array: identical elements at z = 0 with complex
/// excitations. Immutable after construction; all evaluations are pure.
#[derive(Debug, Clone)]
pub struct ArrayAntenna {
    pub element: PatchGeometry,
    pub substrate: SubstrateSpec,
    pub wave: WaveSpec,
    pub element_positions: Vec<Vec3>,
    pub excitations: Vec<ComplexAmp>,
}

impl ArrayAntenna {
    pub fn new(
        element: PatchGeometry,
        substrate: SubstrateSpec,
        wave: WaveSpec,
        element_positions: Vec<Vec3>,
        excitations: Vec<ComplexAmp>,
    ) -> Result<Self> {
        if element_positions.is_empty() || element_positions.len() != excitations.len() {
            return Err(Error::invalid(
                "element positions and excitations must have equal length >= 1",
            ));
        }
        if element_positions.iter().any(|p| p.z != 0.0) {
            return Err(Error::invalid(
                "all element positions must lie in the z = 0 plane",
            ));
        }
        if element_positions.len() == 1 && element_positions[0].rho() != 0.0 {
            return Err(Error::invalid("a single element must sit at the origin"));
        }
        Ok(ArrayAntenna {
            element,
            substrate,
            wave,
            element_positions,
            excitations,
        })
    }

    /// Single patch at the origin, unit excitation.
    pub fn single(
        element: PatchGeometry,
        substrate: SubstrateSpec,
        wave: WaveSpec,
    ) -> Result<Self> {
        ArrayAntenna::new(
            element,
            substrate,
            wave,
            vec![Vec3::ZERO],
            vec![ComplexAmp::new(1.0, 0.0)],
        )
    }

    /// 2x2 array, centers at (+-s/2, +-s/2), uniform unit excitation
    /// modeling an ideal corporate feed. `spacing` is center-to-center
    /// in mm.
    pub fn uniform_2x2(
        element: PatchGeometry,
        substrate: SubstrateSpec,
        wave: WaveSpec,
        spacing: f64,
    ) -> Result<Self> {
        if spacing <= 0.0 {
            return Err(Error::invalid("array spacing must be > 0"));
        }
        let h = spacing / 2.0;
        let positions = vec![
            Vec3::new(h, h, 0.0),
            Vec3::new(h, -h, 0.0),
            Vec3::new(-h, h, 0.0),
            Vec3::new(-h, -h, 0.0),
        ];
        let excitations = vec![ComplexAmp::new(1.0, 0.0); 4];
        ArrayAntenna::new(element, substrate, wave, positions, excitations)
    }

    /// Complex field at `point`: spherical-spreading superposition of
    /// every element as a point radiator weighted by its pattern,
    /// sum_i exc_i * pattern(theta_i, phi_i) * exp(-j k r_i)/r_i.
    pub fn field_at_point(&self, point: Vec3) -> Result<ComplexAmp> {
        if point.z <= 0.0 {
            return Err(Error::invalid(format!(
                "field_at_point requires z > 0, got z = {}",
                point.z
            )));
        }
        let k = self.wave.wavenumber;
        let mut total = ComplexAmp::new(0.0, 0.0);
        for (pos, exc) in self.element_positions.iter().zip(&self.excitations) {
            let d = point - *pos;
            let r = d.norm();
            if r == 0.0 {
                return Err(Error::invalid("point coincides with an element position"));
            }
            let theta = d.rho().atan2(d.z);
            let phi = d.y.atan2(d.x);
            let pat = element_pattern_amp(&self.element, &self.wave, theta, phi);
            total += exc * pat * ComplexAmp::from_polar(1.0 / r, -k * r);
        }
        Ok(total)
    }

    /// Far-field complex amplitude (element pattern times array factor).
    pub fn far_field_amplitude(&self, theta: f64, phi: f64) -> ComplexAmp {
        let k = self.wave.wavenumber;
        let rhat = Vec3::new(
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        );
        let pat = element_pattern_amp(&self.element, &self.wave, theta, phi);
        let mut af = ComplexAmp::new(0.0, 0.0);
        for (pos, exc) in self.element_positions.iter().zip(&self.excitations) {
            af += exc * ComplexAmp::from_polar(1.0, k * rhat.dot(*pos));
        }
        af * pat
    }
}

impl FieldSource for ArrayAntenna {
    fn field_at(&self, point: Vec3) -> Result<ComplexAmp> {
        self.field_at_point(point)
    }

    fn far_field(&self, theta: f64, phi: f64) -> ComplexAmp {
        self.far_field_amplitude(theta, phi)
    }

    fn wavenumber(&self) -> f64 {
        self.wave.wavenumber
    }
}

/// Radiation pattern over the upper hemisphere on a regular
/// (theta, phi) grid, in dBi (normalized so the peak equals the
/// directivity).
#[derive(Debug, Clone)]
pub struct HemispherePattern {
    pub theta_step: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Directive gain in dBi, row-major `[i_theta][i_phi]`.
    pub gain_dbi: Vec<f64>,
    pub directivity_dbi: f64,
}

/// Trapezoidal quadrature of `u(theta, phi) * sin(theta)` over the upper
/// hemisphere with angular step `step` in both coordinates.
pub fn integrate_hemisphere(u: impl Fn(f64, f64) -> f64, step: f64) -> f64 {
    let n_theta = (std::f64::consts::FRAC_PI_2 / step).ceil() as usize + 1;
    let n_phi = (2.0 * std::f64::consts::PI / step).ceil() as usize;
    let dt = std::f64::consts::FRAC_PI_2 / (n_theta - 1) as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut total = 0.0;
    for it in 0..n_theta {
        let theta = it as f64 * dt;
        let st = theta.sin();
        // phi is periodic: uniform sum is the trapezoid rule exactly
        let mut ring = 0.0;
        for ip in 0..n_phi {
            ring += u(theta, ip as f64 * dp);
        }
        let w = if it == 0 || it == n_theta - 1 {
            0.5
        } else {
            1.0
        };
        total += w * ring * st * dp * dt;
    }
    total
}

/// Boresight directivity and the hemisphere pattern by trapezoidal
/// quadrature: D = 4*pi*U_max / integral(U dOmega), no back radiation.
/// `grid_resolution` must be <= 2 degrees.
pub fn far_field_directivity(
    antenna: &ArrayAntenna,
    grid_resolution: f64,
) -> Result<(HemispherePattern, f64)> {
    if grid_resolution > 2.0f64.to_radians() + 1e-12 || grid_resolution <= 0.0 {
        return Err(Error::invalid(
            "grid_resolution must be positive and at most 2 degrees",
        ));
    }
    let n_theta = (std::f64::consts::FRAC_PI_2 / grid_resolution).ceil() as usize + 1;
    let n_phi = (2.0 * std::f64::consts::PI / grid_resolution).ceil() as usize;
    let dt = std::f64::consts::FRAC_PI_2 / (n_theta - 1) as f64;
    let dp = 2.0 * std::f64::consts::PI / n_phi as f64;

    let mut intensity = vec![0.0; n_theta * n_phi];
    let mut u_max: f64 = 0.0;
    let mut total = 0.0;
    for it in 0..n_theta {
        let theta = it as f64 * dt;
        let st = theta.sin();
        let w = if it == 0 || it == n_theta - 1 {
            0.5
        } else {
            1.0
        };
        let mut ring = 0.0;
        for ip in 0..n_phi {
            let u = antenna
                .far_field_amplitude(theta, ip as f64 * dp)
                .norm_sqr();
            intensity[it * n_phi + ip] = u;
            ring += u;
            u_max = u_max.max(u);
        }
        total += w * ring * st * dp * dt;
    }
    let d_lin = 4.0 * std::f64::consts::PI * u_max / total;
    let d_dbi = 10.0 * d_lin.log10();
    let gain_dbi = intensity
        .iter()
        .map(|&u| {
            if u > 0.0 {
                10.0 * (u / u_max).log10() + d_dbi
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    Ok((
        HemispherePattern {
            theta_step: dt,
            n_theta,
            n_phi,
            gain_dbi,
            directivity_dbi: d_dbi,
        },
        d_dbi,
    ))
}
