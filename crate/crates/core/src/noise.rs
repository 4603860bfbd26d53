//! Fluctuation-dissipation noise: spectra, Allan deviations and closed-form estimates.

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::BOLTZMANN;
use crate::materials::MaterialProperties;

/// Default thermorefractive spectral factor.
pub const DEFAULT_GAMMA: f64 = 0.847;

#[derive(Debug, Error, PartialEq)]
pub enum NoiseError {
    #[error("noise input {name} must be {requirement}, got {value}")]
    InvalidInput { name: &'static str, requirement: &'static str, value: f64 },
    #[error("unknown EO combination mode '{0}' (expected neglect_dR, linear or quadrature)")]
    UnknownEoMode(String),
}

fn check(name: &'static str, value: f64, allow_zero: bool) -> Result<f64, NoiseError> {
    let ok = value.is_finite() && (value > 0.0 || (allow_zero && value == 0.0));
    if ok {
        Ok(value)
    } else {
        let requirement = if allow_zero { "non-negative and finite" } else { "positive and finite" };
        Err(NoiseError::InvalidInput { name, requirement, value })
    }
}

/// Inputs of the structural-damping fluctuation-dissipation relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdtInput {
    /// Strain energy under the conjugate load, J.
    pub energy: f64,
    /// Conjugate force, N.
    pub force: f64,
    /// Coordinate normaliser (R for BB, minor radius for EO), m.
    pub x_scale: f64,
    pub temperature: f64,
    pub loss_angle: f64,
}

impl FdtInput {
    pub fn new(energy: f64, force: f64, x_scale: f64, temperature: f64, loss_angle: f64) -> Result<Self, NoiseError> {
        Ok(FdtInput {
            energy: check("U", energy, false)?,
            force: check("F", force, false)?,
            x_scale: check("x", x_scale, false)?,
            temperature: check("T", temperature, false)?,
            loss_angle: check("phi", loss_angle, true)?,
        })
    }
}

/// One-sided spectral density of the relative coordinate fluctuation, 1/Hz.
pub fn fdt_psd(input: &FdtInput, frequency: f64) -> f64 {
    4.0 / PI * BOLTZMANN * input.temperature * input.energy * input.loss_angle
        / (input.x_scale.powi(2) * frequency * input.force.powi(2))
}

/// `sqrt(8 ln 2 / pi)`: Allan deviation of a unit-amplitude 1/f spectrum
/// with the (4/pi) prefactor folded in.
pub fn flicker_allan_factor() -> f64 {
    (8.0 * LN_2 / PI).sqrt()
}

/// Allan deviation of the relative coordinate for structural damping;
/// independent of the averaging time.
pub fn allan_structural(input: &FdtInput) -> f64 {
    flicker_allan_factor() * (BOLTZMANN * input.temperature * input.energy * input.loss_angle).sqrt()
        / (input.x_scale * input.force)
}

/// How the major- and minor-radius terms are combined into the EO deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum EoMode {
    /// Drop the major-radius term.
    #[default]
    #[serde(rename = "neglect_dR")]
    NeglectDr,
    /// Fully correlated: terms add linearly.
    #[serde(rename = "linear")]
    Linear,
    /// Uncorrelated: terms add in quadrature.
    #[serde(rename = "quadrature")]
    Quadrature,
}

impl EoMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EoMode::NeglectDr => "neglect_dR",
            EoMode::Linear => "linear",
            EoMode::Quadrature => "quadrature",
        }
    }
}

impl fmt::Display for EoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EoMode {
    type Err = NoiseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "neglect_dR" | "neglect_dr" => Ok(EoMode::NeglectDr),
            "linear" => Ok(EoMode::Linear),
            "quadrature" => Ok(EoMode::Quadrature),
            other => Err(NoiseError::UnknownEoMode(other.to_string())),
        }
    }
}

/// `(p11 + 2 p12) / 3 * n^2`: fractional frequency shift per unit dilatation.
pub fn elasto_optic_factor(n: f64, p11: f64, p12: f64) -> f64 {
    (p11 + 2.0 * p12) / 3.0 * n * n
}

/// Elasto-optic Allan deviation from the relative major-radius
/// (`sigma_dr_major`) and minor-radius (`sigma_dr_minor`) deviations.
pub fn allan_eo(sigma_dr_major: f64, sigma_dr_minor: f64, n: f64, p11: f64, p12: f64, mode: EoMode) -> f64 {
    let half_major = 0.5 * sigma_dr_major;
    let strain = match mode {
        EoMode::NeglectDr => sigma_dr_minor,
        EoMode::Linear => half_major + sigma_dr_minor,
        EoMode::Quadrature => half_major.hypot(sigma_dr_minor),
    };
    strain * elasto_optic_factor(n, p11, p12)
}

/// Thermorefractive Allan deviation at averaging time `tau`.
pub fn allan_tr(radius: f64, temperature: f64, props: &MaterialProperties, gamma: f64, tau: f64) -> f64 {
    2.0 * temperature / PI * (BOLTZMANN * gamma / (props.thermal_conductivity * radius * tau)).sqrt()
        * props.dn_dt_over_n.abs()
}

/// Closed-form BB deviation of a sphere under uniform pressure.
pub fn estimate_bb_sphere(radius: f64, temperature: f64, loss_angle: f64, kappa: f64) -> f64 {
    (2.0 / 3.0 * LN_2 / PI).sqrt() * (BOLTZMANN * temperature * loss_angle / (kappa * radius.powi(3))).sqrt()
}

/// Closed-form relative minor-radius deviation of a plane-strain tube of
/// minor radius `r` on a ring of radius `radius`.
pub fn estimate_dr_over_r_tube(r: f64, radius: f64, temperature: f64, loss_angle: f64, kappa: f64, shear: f64) -> f64 {
    (6.0 * LN_2).sqrt() / (2.0 * PI.powf(1.5))
        * (BOLTZMANN * temperature * loss_angle / (r * r * radius * (3.0 * kappa + shear))).sqrt()
}

/// Closed-form relative minor-radius deviation with the mode tube radius
/// `0.335 (lambda / n)^(7/12) R^(5/12)` substituted.
pub fn estimate_dr_over_r(
    radius: f64,
    wavelength: f64,
    n: f64,
    temperature: f64,
    loss_angle: f64,
    kappa: f64,
    shear: f64,
) -> f64 {
    0.55 * (n / wavelength).powf(7.0 / 12.0)
        * radius.powf(-11.0 / 12.0)
        * (BOLTZMANN * temperature * loss_angle / (3.0 * kappa + shear)).sqrt()
}

/// Closed-form elasto-optic deviation.
#[allow(clippy::too_many_arguments)]
pub fn estimate_eo(
    radius: f64,
    wavelength: f64,
    n: f64,
    temperature: f64,
    loss_angle: f64,
    kappa: f64,
    shear: f64,
    p11: f64,
    p12: f64,
) -> f64 {
    estimate_dr_over_r(radius, wavelength, n, temperature, loss_angle, kappa, shear) * elasto_optic_factor(n, p11, p12)
}

/// Noise terms for one (geometry, temperature, averaging time) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseBudget {
    pub id: String,
    pub temperature: f64,
    pub tau: f64,
    pub sigma_tr: f64,
    /// Relative major-radius deviation (BB).
    pub sigma_bb: f64,
    /// Relative minor-radius deviation.
    pub sigma_dr_over_r: f64,
    pub sigma_eo: f64,
    pub gamma: f64,
    pub eo_mode: EoMode,
    /// `(p11 + 2 p12) / 3 * n^2` used for `sigma_eo`.
    pub eo_factor: f64,
}

impl NoiseBudget {
    /// Recomputes the EO deviation from the stored components.
    pub fn recombined_eo(&self) -> f64 {
        let half_major = 0.5 * self.sigma_bb;
        let strain = match self.eo_mode {
            EoMode::NeglectDr => self.sigma_dr_over_r,
            EoMode::Linear => half_major + self.sigma_dr_over_r,
            EoMode::Quadrature => half_major.hypot(self.sigma_dr_over_r),
        };
        strain * self.eo_factor
    }
}
