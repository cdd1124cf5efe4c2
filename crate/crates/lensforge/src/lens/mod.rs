//! Extended-hemispherical lens synthesis, geometrical-optics ray
//! tracing through the lens body, exit-aperture assembly and scalar
//! physical-optics far-field evaluation.

mod aperture;
mod farfield;
mod trace;

pub use aperture::{
    aperture_from_rays, launch_grid, trace_bundle_rows, ApertureField, LaunchRay, RayBundleOptions,
    SourcePattern, SourceSpec,
};
pub use farfield::{
    far_field_from_aperture, far_field_with_grid, lens_gain, lens_gain_with, FarFieldPattern,
    GainMode, PatternGridSpec,
};
pub use trace::{trace_ray, trace_ray_immersed, RayExit, RayStatus, TracedRay};

use crate::emcore::WaveSpec;
use crate::error::{Error, Result};

/// Lens shape: the synthesized extended hemisphere, or the exact
/// ellipsoid used as a collimation oracle in tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LensShape {
    ExtendedHemispherical,
    /// Ellipsoid with eccentricity 1/n; rays from its lower focus exit
    /// exactly collimated. The focus sits on the flat-face plane.
    EllipticalOracle,
}

/// Geometry and material of a lens.
///
/// For the extended hemisphere: a spherical cap of radius `radius_r`
/// on a cylindrical extension of height `extension_l`; the synthesis
/// sets `b = R*(1 + 1/(3n^2))` (semi-minor axis of the matched ellipse)
/// and `L = b*(1 + 1/n)/sqrt(1 - 1/n^2) - R`, which places the matched
/// ellipse's far focus at the flat base.
///
/// For the elliptical oracle: semi-minor axis `radius_r`, semi-major
/// `a = R/sqrt(1 - 1/n^2)`, center `c = a/n` above the base, and
/// `extension_l` chosen so the apex sits at base + L + R like the
/// extended shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSpec {
    pub eps_r: f64,
    /// Refractive index, sqrt(eps_r).
    pub n: f64,
    /// Hemisphere (or semi-minor) radius R, mm.
    pub radius_r: f64,
    /// Matched-ellipse semi-minor axis b, mm.
    pub b: f64,
    /// Extension height L, mm.
    pub extension_l: f64,
    pub shape: LensShape,
}

impl LensSpec {
    /// Semi-major axis of the matched/exact ellipse, mm.
    pub fn semi_major(&self) -> f64 {
        match self.shape {
            LensShape::ExtendedHemispherical => self.b / (1.0 - 1.0 / (self.n * self.n)).sqrt(),
            LensShape::EllipticalOracle => self.radius_r / (1.0 - 1.0 / (self.n * self.n)).sqrt(),
        }
    }

    /// Height of the apex above the flat base, mm.
    pub fn apex_height(&self) -> f64 {
        self.extension_l + self.radius_r
    }

    /// Radius of the flat entry face, mm.
    pub fn face_radius(&self) -> f64 {
        match self.shape {
            LensShape::ExtendedHemispherical => self.radius_r,
            // ellipse cross-section at the focus plane
            LensShape::EllipticalOracle => self.radius_r * (1.0 - 1.0 / (self.n * self.n)).sqrt(),
        }
    }
}

/// Synthesizes the extended-hemispherical lens for a hemisphere radius
/// and relative permittivity.
pub fn synthesize_lens(radius_r: f64, eps_r: f64) -> Result<LensSpec> {
    if eps_r <= 1.0 {
        return Err(Error::invalid(format!(
            "lens eps_r must be > 1 (extension is singular at n = 1), got {eps_r}"
        )));
    }
    if radius_r <= 0.0 {
        return Err(Error::invalid("lens radius must be > 0"));
    }
    let n = eps_r.sqrt();
    let b = radius_r * (1.0 + 1.0 / (3.0 * n * n));
    let extension_l = b * (1.0 + 1.0 / n) / (1.0 - 1.0 / (n * n)).sqrt() - radius_r;
    Ok(LensSpec {
        eps_r,
        n,
        radius_r,
        b,
        extension_l,
        shape: LensShape::ExtendedHemispherical,
    })
}

/// Exact elliptical lens with eccentricity 1/n and semi-minor axis
/// `radius_r`; the test oracle for collimation.
pub fn elliptical_oracle(radius_r: f64, eps_r: f64) -> Result<LensSpec> {
    if eps_r <= 1.0 {
        return Err(Error::invalid("lens eps_r must be > 1"));
    }
    if radius_r <= 0.0 {
        return Err(Error::invalid("lens radius must be > 0"));
    }
    let n = eps_r.sqrt();
    let a = radius_r / (1.0 - 1.0 / (n * n)).sqrt();
    let c = a / n;
    Ok(LensSpec {
        eps_r,
        n,
        radius_r,
        b: radius_r,
        extension_l: a + c - radius_r,
        shape: LensShape::EllipticalOracle,
    })
}

/// Uniform-circular-aperture directivity 10*log10(4*pi*(pi R^2)/lambda^2),
/// the theoretical gain ceiling of the lens aperture.
pub fn theoretical_max_gain(lens: &LensSpec, wave: &WaveSpec) -> f64 {
    let area = std::f64::consts::PI * lens.radius_r * lens.radius_r;
    10.0 * (4.0 * std::f64::consts::PI * area / (wave.wavelength * wave.wavelength)).log10()
}

/// A lens positioned `d_gap` mm above the antenna surface: flat face at
/// z = d_gap, cylinder side wall for z in [d_gap, d_gap + L], sphere
/// (or ellipsoid) center on the axis at z = d_gap + L, cap above, and
/// the output plane tangent to the apex at z = d_gap + L + R.
#[derive(Debug, Clone, Copy)]
pub struct LensPlacement {
    pub lens: LensSpec,
    /// Air gap between antenna surface and lens flat face (the design
    /// separation D), mm; >= 0.
    pub d_gap: f64,
}

impl LensPlacement {
    pub fn new(lens: LensSpec, d_gap: f64) -> Result<Self> {
        if d_gap < 0.0 {
            return Err(Error::invalid(format!("d_gap must be >= 0, got {d_gap}")));
        }
        Ok(LensPlacement { lens, d_gap })
    }

    /// z of the flat face.
    pub fn face_z(&self) -> f64 {
        self.d_gap
    }

    /// z of the sphere/ellipsoid center.
    pub fn center_z(&self) -> f64 {
        match self.lens.shape {
            LensShape::ExtendedHemispherical => self.d_gap + self.lens.extension_l,
            LensShape::EllipticalOracle => self.d_gap + self.lens.semi_major() / self.lens.n,
        }
    }

    /// z of the output plane (apex).
    pub fn output_plane_z(&self) -> f64 {
        self.d_gap + self.lens.apex_height()
    }
}
