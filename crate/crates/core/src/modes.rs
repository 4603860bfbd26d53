//! Resonator geometry and fundamental whispering-gallery-mode descriptors.
//!
//! Mode profiles come either from asymptotic estimates (azimuthal index from
//! the sphere dispersion relation, Gaussian widths from power-law scalings)
//! or verbatim from tabulated parameters.

use std::f64::consts::PI;

use thiserror::Error;

use crate::constants::SPEED_OF_LIGHT;

/// Magnitude of the first zero of the Airy function Ai.
pub const AIRY_ZERO_1: f64 = 2.338107410459767;

/// Smallest size parameter 2 pi R n / lambda for which the asymptotic
/// dispersion relation is accepted.
pub const MIN_SIZE_PARAMETER: f64 = 50.0;

#[derive(Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("size parameter 2*pi*R*n/lambda = {0:.1} too small for the asymptotic estimate (needs > 50)")]
    AsymptoticValidity(f64),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("mode invariant violated: {0}")]
    Invariant(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Sphere,
    /// Disk whose rim is a circular arc of vertical radius of curvature
    /// `curvature` centred on the equatorial plane, truncated by flat faces
    /// at z = +/- thickness/2.
    Disk { curvature: f64, thickness: f64 },
}

/// Axisymmetric resonator body, symmetric about the equatorial plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorGeometry {
    /// Major (equatorial) radius R, m.
    pub radius: f64,
    pub shape: Shape,
}

impl ResonatorGeometry {
    pub fn sphere(radius: f64) -> Result<Self, ModeError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(ModeError::Geometry(format!("radius {radius} m must be positive")));
        }
        Ok(ResonatorGeometry { radius, shape: Shape::Sphere })
    }

    /// Disk with rim curvature `curvature`. Thickness defaults to
    /// `min(radius, 2 * curvature)`: a fully rounded rim where the rim is
    /// thin enough, otherwise as thick as it is wide.
    pub fn disk(radius: f64, curvature: f64, thickness: Option<f64>) -> Result<Self, ModeError> {
        let thickness = thickness.unwrap_or(radius.min(2.0 * curvature));
        if !(radius > 0.0 && curvature > 0.0 && thickness > 0.0) {
            return Err(ModeError::Geometry(format!(
                "radius {radius}, curvature {curvature} and thickness {thickness} must be positive"
            )));
        }
        let half = 0.5 * thickness;
        if half > curvature {
            return Err(ModeError::Geometry(format!(
                "half-thickness {half} m exceeds rim curvature radius {curvature} m"
            )));
        }
        let geom = ResonatorGeometry { radius, shape: Shape::Disk { curvature, thickness } };
        if geom.disk_rim_top().map_or(true, |(rho, _)| !(rho > 0.0)) {
            return Err(ModeError::Geometry(format!(
                "rim arc of curvature {curvature} m does not reach the flat face inside radius {radius} m"
            )));
        }
        Ok(geom)
    }

    pub fn curvature(&self) -> Option<f64> {
        match self.shape {
            Shape::Sphere => None,
            Shape::Disk { curvature, .. } => Some(curvature),
        }
    }

    pub fn thickness(&self) -> Option<f64> {
        match self.shape {
            Shape::Sphere => None,
            Shape::Disk { thickness, .. } => Some(thickness),
        }
    }

    pub fn shape_name(&self) -> &'static str {
        match self.shape {
            Shape::Sphere => "sphere",
            Shape::Disk { .. } => "disk",
        }
    }

    /// Point (rho, z) where the rim arc meets the upper flat face.
    pub(crate) fn disk_rim_top(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Sphere => None,
            Shape::Disk { curvature, thickness } => {
                let half = 0.5 * thickness;
                let rho = self.radius - curvature + (curvature * curvature - half * half).sqrt();
                Some((rho, half))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Polarization {
    #[default]
    Te,
    Tm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSource {
    Estimated,
    Supplied,
}

/// Fundamental whispering-gallery mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeProfile {
    /// Optical frequency, Hz.
    pub frequency: f64,
    pub azimuthal_index: u64,
    /// Polar intensity 1/e^2 half-width, m.
    pub w_z: f64,
    /// Radial intensity 1/e^2 half-width, m.
    pub w_rho: f64,
    /// Radial position of the mode centre, m.
    pub rho0: f64,
    /// Vacuum wavelength, m.
    pub wavelength: f64,
    pub polarization: Polarization,
    pub source: ModeSource,
}

/// Effective minor radius and mode volume of the mode tube.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometrySummary {
    pub minor_radius: f64,
    pub mode_volume: f64,
}

/// Tuning of the asymptotic mode estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorSettings {
    pub polarization: Polarization,
    /// w_rho = coefficient * R * m^(-2/3). Empirical.
    pub w_rho_coefficient: f64,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        EstimatorSettings { polarization: Polarization::Te, w_rho_coefficient: 0.80 }
    }
}

fn polarization_term(n: f64, polarization: Polarization) -> f64 {
    let p = match polarization {
        Polarization::Te => n,
        Polarization::Tm => 1.0 / n,
    };
    p / (n * n - 1.0).sqrt()
}

/// Dimensionless bracket of the dispersion relation for a continuous index.
fn dispersion_bracket(m: f64, n: f64, polarization: Polarization) -> f64 {
    let q = m + 0.5;
    q + AIRY_ZERO_1 * (0.5 * q).cbrt() - polarization_term(n, polarization)
}

/// Frequency of the fundamental mode with azimuthal index `m` on a sphere of
/// radius `radius` and index `n`.
pub fn dispersion_frequency(m: u64, radius: f64, n: f64, polarization: Polarization) -> f64 {
    SPEED_OF_LIGHT / (2.0 * PI * n * radius) * dispersion_bracket(m as f64, n, polarization)
}

/// Nearest azimuthal index whose dispersion frequency matches `frequency`.
pub fn azimuthal_index_for(frequency: f64, radius: f64, n: f64, polarization: Polarization) -> u64 {
    let target = frequency * 2.0 * PI * n * radius / SPEED_OF_LIGHT;
    // Newton on the monotone bracket
    let mut m = target;
    for _ in 0..50 {
        let f = dispersion_bracket(m, n, polarization) - target;
        let q = (0.5 * (m + 0.5)).max(1e-12);
        let df = 1.0 + AIRY_ZERO_1 / 6.0 * q.powf(-2.0 / 3.0);
        let step = f / df;
        m -= step;
        if step.abs() < 1e-10 * m.abs().max(1.0) {
            break;
        }
    }
    let lo = m.floor().max(1.0) as u64;
    let hi = lo + 1;
    let err = |k: u64| (dispersion_frequency(k, radius, n, polarization) - frequency).abs();
    if err(hi) < err(lo) { hi } else { lo }
}

/// Asymptotic estimate of the fundamental TE (default) mode nearest to
/// vacuum wavelength `wavelength`.
pub fn estimate_fundamental_mode(
    geom: &ResonatorGeometry,
    wavelength: f64,
    n: f64,
) -> Result<ModeProfile, ModeError> {
    estimate_fundamental_mode_with(geom, wavelength, n, &EstimatorSettings::default())
}

pub fn estimate_fundamental_mode_with(
    geom: &ResonatorGeometry,
    wavelength: f64,
    n: f64,
    settings: &EstimatorSettings,
) -> Result<ModeProfile, ModeError> {
    if !(wavelength > 0.0 && n > 1.0) {
        return Err(ModeError::Invariant(format!(
            "wavelength {wavelength} m must be positive and index {n} above 1"
        )));
    }
    let r = geom.radius;
    let size = 2.0 * PI * r * n / wavelength;
    if !(size > MIN_SIZE_PARAMETER) {
        return Err(ModeError::AsymptoticValidity(size));
    }
    let m = azimuthal_index_for(SPEED_OF_LIGHT / wavelength, r, n, settings.polarization);
    let frequency = dispersion_frequency(m, r, n, settings.polarization);
    let mf = m as f64;
    let w_z = match geom.shape {
        Shape::Sphere => r / mf.sqrt(),
        Shape::Disk { curvature, .. } => {
            (r.powi(3) * curvature).powf(0.125) * (wavelength / (2.0 * PI * n)).sqrt()
        }
    };
    let w_rho = settings.w_rho_coefficient * r * mf.powf(-2.0 / 3.0);
    let profile = ModeProfile {
        frequency,
        azimuthal_index: m,
        w_z,
        w_rho,
        rho0: r - w_rho,
        wavelength: SPEED_OF_LIGHT / frequency,
        polarization: settings.polarization,
        source: ModeSource::Estimated,
    };
    validate_profile(geom, n, &profile)?;
    Ok(profile)
}

/// Tabulated mode parameters, stored unmodified after validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuppliedMode {
    pub frequency: f64,
    pub azimuthal_index: u64,
    pub w_z: f64,
    pub w_rho: f64,
    pub rho0: f64,
    pub wavelength: f64,
}

/// Builds a profile from supplied parameters; `n` is needed for the
/// frequency/radius consistency check.
pub fn mode_from_parameters(
    geom: &ResonatorGeometry,
    n: f64,
    params: SuppliedMode,
) -> Result<ModeProfile, ModeError> {
    let profile = ModeProfile {
        frequency: params.frequency,
        azimuthal_index: params.azimuthal_index,
        w_z: params.w_z,
        w_rho: params.w_rho,
        rho0: params.rho0,
        wavelength: params.wavelength,
        polarization: Polarization::Te,
        source: ModeSource::Supplied,
    };
    validate_profile(geom, n, &profile)?;
    Ok(profile)
}

/// Checks the ModeProfile invariants against a geometry.
pub fn validate_profile(geom: &ResonatorGeometry, n: f64, p: &ModeProfile) -> Result<(), ModeError> {
    let r = geom.radius;
    let fail = |msg: String| Err(ModeError::Invariant(msg));
    if !(p.w_rho > 0.0) {
        return fail(format!("w_rho = {} m must be positive", p.w_rho));
    }
    if !(p.w_rho <= p.w_z) {
        return fail(format!("w_rho = {} m exceeds w_z = {} m", p.w_rho, p.w_z));
    }
    if !(p.w_z < r) {
        return fail(format!("w_z = {} m must be below R = {r} m", p.w_z));
    }
    if !(p.rho0 > 0.0 && p.rho0 < r) {
        return fail(format!("rho0 = {} m must lie in (0, R = {r} m)", p.rho0));
    }
    if p.azimuthal_index < 1 {
        return fail("azimuthal index must be at least 1".into());
    }
    if !(p.frequency > 0.0 && p.wavelength > 0.0) {
        return fail("frequency and wavelength must be positive".into());
    }
    let ray = p.azimuthal_index as f64 * SPEED_OF_LIGHT / (2.0 * PI * n * p.rho0);
    if ((p.frequency - ray) / p.frequency).abs() > 0.02 {
        return fail(format!(
            "frequency {:.6e} Hz inconsistent with m c / (2 pi n rho0) = {ray:.6e} Hz (> 2%)",
            p.frequency
        ));
    }
    Ok(())
}

/// Mode volume V_m = 3.4 pi^(3/2) (lambda / (2 pi n))^(7/6) R^(11/6).
pub fn mode_volume(radius: f64, wavelength: f64, n: f64) -> f64 {
    3.4 * PI.powf(1.5) * (wavelength / (2.0 * PI * n)).powf(7.0 / 6.0) * radius.powf(11.0 / 6.0)
}

/// Minor radius of a mode tube of volume `mode_volume(..)` on a ring of radius R.
pub fn minor_radius_from_volume(radius: f64, volume: f64) -> f64 {
    (volume / (2.0 * PI * PI * radius)).sqrt()
}

/// r = sqrt(w_rho w_z); V_m = 2 pi^2 rho0 r^2.
pub fn minor_radius(profile: &ModeProfile) -> ModeGeometrySummary {
    let r = (profile.w_rho * profile.w_z).sqrt();
    ModeGeometrySummary { minor_radius: r, mode_volume: 2.0 * PI * PI * profile.rho0 * r * r }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const N: f64 = 1.43;

    fn table_sphere(r_mm: f64, m: u64, nu14: f64, w_z_um: f64, w_rho_um: f64, rho0_mm: f64) -> (ResonatorGeometry, SuppliedMode) {
        let geom = ResonatorGeometry::sphere(r_mm * 1e-3).unwrap();
        let nu = nu14 * 1e14;
        (
            geom,
            SuppliedMode {
                frequency: nu,
                azimuthal_index: m,
                w_z: w_z_um * 1e-6,
                w_rho: w_rho_um * 1e-6,
                rho0: rho0_mm * 1e-3,
                wavelength: SPEED_OF_LIGHT / nu,
            },
        )
    }

    #[test]
    fn sphere_1mm_estimate() {
        let geom = ResonatorGeometry::sphere(1e-3).unwrap();
        let p = estimate_fundamental_mode(&geom, 1.565e-6, N).unwrap();
        // tabulated index 5706 comes from a full field solve; the asymptotic index
        // with n = 1.43 lands within a few units
        assert!(p.azimuthal_index.abs_diff(5706) <= 4, "m = {}", p.azimuthal_index);
        assert_relative_eq!(p.frequency, 1.9152e14, max_relative = 1e-3);
        assert_relative_eq!(p.w_z, 13.2e-6, max_relative = 0.01);
        assert_relative_eq!(p.w_z, 13.5e-6, max_relative = 0.05);
        assert_relative_eq!(p.w_rho, 2.5e-6, max_relative = 0.30);
        assert_eq!(p.source, ModeSource::Estimated);
    }

    #[test]
    fn sphere_small_and_large() {
        let small = estimate_fundamental_mode(&ResonatorGeometry::sphere(1e-4).unwrap(), 1.565e-6, N).unwrap();
        assert!(small.azimuthal_index.abs_diff(559) <= 2, "m = {}", small.azimuthal_index);
        assert_relative_eq!(small.w_z, 4.23e-6, max_relative = 0.01);
        assert_relative_eq!(small.w_z, 4.25e-6, max_relative = 0.05);
        assert_relative_eq!(small.w_rho, 1.1e-6, max_relative = 0.30);

        let large = estimate_fundamental_mode(&ResonatorGeometry::sphere(1e-2).unwrap(), 1.565e-6, N).unwrap();
        assert_relative_eq!(large.w_z, 41.8e-6, max_relative = 0.01);
        assert_relative_eq!(large.w_z, 42.0e-6, max_relative = 0.05);
        assert_relative_eq!(large.w_rho, 5.0e-6, max_relative = 0.30);
        assert_relative_eq!(large.frequency, 1.9149e14, max_relative = 1e-3);
    }

    #[test]
    fn tabulated_indices_reproduce_frequency() {
        for (r, m, nu) in [(1e-4, 559u64, 1.9164e14), (1e-3, 5706, 1.9152e14)] {
            // tabulated indices sit a few mode spacings from ours
            let f = dispersion_frequency(m, r, N, Polarization::Te);
            assert_relative_eq!(f, nu, max_relative = 2e-3);
        }
    }

    #[test]
    fn index_round_trip() {
        for r in [1e-4, 3e-4, 1e-3, 1e-2] {
            for m in [300u64, 559, 5706, 57320] {
                let f = dispersion_frequency(m, r, N, Polarization::Te);
                assert_eq!(azimuthal_index_for(f, r, N, Polarization::Te), m);
                assert!(dispersion_frequency(m + 1, r, N, Polarization::Te) > f);
            }
        }
    }

    #[test]
    fn asymptotic_guard() {
        let geom = ResonatorGeometry::sphere(5e-6).unwrap();
        assert!(matches!(
            estimate_fundamental_mode(&geom, 1.565e-6, N),
            Err(ModeError::AsymptoticValidity(_))
        ));
    }

    #[test]
    fn disk_estimate_within_documented_error() {
        let geom = ResonatorGeometry::disk(1e-3, 0.15e-3, None).unwrap();
        let p = estimate_fundamental_mode(&geom, 1.565e-6, N).unwrap();
        assert!((p.w_z / 8.2e-6 - 1.0).abs() < 0.5);
    }

    #[test]
    fn supplied_rows() {
        let geom = ResonatorGeometry::disk(1e-3, 0.15e-3, None).unwrap();
        let nu = 1.9152e14;
        let params = SuppliedMode {
            frequency: nu,
            azimuthal_index: 5706,
            w_z: 8.2e-6,
            w_rho: 2.5e-6,
            rho0: 0.997e-3,
            wavelength: SPEED_OF_LIGHT / nu,
        };
        let p = mode_from_parameters(&geom, N, params).unwrap();
        assert_eq!(p.w_z, 8.2e-6);
        assert_eq!(p.source, ModeSource::Supplied);

        let bad = SuppliedMode { w_rho: 9e-6, ..params };
        assert!(matches!(mode_from_parameters(&geom, N, bad), Err(ModeError::Invariant(m)) if m.contains("w_rho")));
        let bad = SuppliedMode { rho0: 1e-3, ..params };
        assert!(matches!(mode_from_parameters(&geom, N, bad), Err(ModeError::Invariant(m)) if m.contains("rho0")));
        let bad = SuppliedMode { frequency: 2.0e14, ..params };
        assert!(mode_from_parameters(&geom, N, bad).is_err());

        let (g, s) = table_sphere(1.0, 5706, 1.9152, 13.5, 2.5, 0.996);
        assert!(mode_from_parameters(&g, N, s).is_ok());
        let (g, s) = table_sphere(0.1, 559, 1.9164, 4.25, 1.1, 0.0986);
        assert!(mode_from_parameters(&g, N, s).is_ok());
    }

    #[test]
    fn minor_radius_values() {
        let p = ModeProfile {
            frequency: 1.9152e14,
            azimuthal_index: 5706,
            w_z: 13.5e-6,
            w_rho: 2.5e-6,
            rho0: 0.996e-3,
            wavelength: 1.565e-6,
            polarization: Polarization::Te,
            source: ModeSource::Supplied,
        };
        let s = minor_radius(&p);
        assert_relative_eq!(s.minor_radius, 5.809e-6, max_relative = 1e-3);
        assert_relative_eq!(s.mode_volume, 2.0 * PI * PI * 0.996e-3 * 2.5e-6 * 13.5e-6, max_relative = 1e-12);
        let sym = ModeProfile { w_z: 3e-6, w_rho: 3e-6, ..p };
        assert_relative_eq!(minor_radius(&sym).minor_radius, 3e-6, max_relative = 1e-15);
        let big = ModeProfile { w_z: 42.0e-6, w_rho: 5.0e-6, ..p };
        assert_relative_eq!(minor_radius(&big).minor_radius, 14.49e-6, max_relative = 1e-3);
    }

    #[test]
    fn mode_volume_scaling_and_minor_radius() {
        let (r, lambda) = (1e-3, 1.56e-6);
        assert_relative_eq!(mode_volume(2.0 * r, lambda, N) / mode_volume(r, lambda, N), 2f64.powf(11.0 / 6.0), max_relative = 1e-12);
        // hand evaluation of the closed form with lambda/(2 pi n) = 0.1736236 um
        let expected = 3.4 * PI.powf(1.5) * (0.173623574e-6f64).powf(7.0 / 6.0) * r.powf(11.0 / 6.0);
        assert_relative_eq!(mode_volume(r, lambda, N), expected, max_relative = 1e-7);
        let minor = minor_radius_from_volume(r, mode_volume(r, lambda, N));
        let quoted = 0.335 * (lambda / N).powf(7.0 / 12.0) * r.powf(5.0 / 12.0);
        assert_relative_eq!(minor, quoted, max_relative = 2e-3);
    }

    #[test]
    fn disk_geometry_validation() {
        assert!(ResonatorGeometry::disk(1e-3, 1e-3, None).is_ok());
        assert!(ResonatorGeometry::disk(1e-4, 1.5e-4, None).is_ok());
        assert!(ResonatorGeometry::disk(1e-2, 1.5e-4, None).is_ok());
        assert!(ResonatorGeometry::disk(1e-3, 1e-4, Some(1e-3)).is_err());
        assert!(ResonatorGeometry::sphere(0.0).is_err());
    }
}
