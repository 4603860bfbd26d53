//! Mode profile to noise budget: two elastostatic solves, then the
//! fluctuation-dissipation formulas.

use thiserror::Error;

use crate::elastostatics::{
    bb_surface_load, build_mesh, eo_volumetric_load, solve_static, LoadError, MeshError, RefinementDescriptor,
    SolveError, SolveSettings, StrainEnergyResult,
};
use crate::materials::{IsotropicModuli, MaterialProperties};
use crate::modes::{minor_radius, ModeProfile, ResonatorGeometry};
use crate::noise::{allan_eo, allan_structural, allan_tr, elasto_optic_factor, EoMode, FdtInput, NoiseBudget, NoiseError};

/// BB surface-load amplitude, Pa.
pub const DEFAULT_BB_AMPLITUDE: f64 = 1e6;
/// EO body-force amplitude, N/m^3.
pub const DEFAULT_EO_AMPLITUDE: f64 = 1e12;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

impl PipelineError {
    /// Short status code used in scan output.
    pub fn code(&self) -> &'static str {
        match self {
            PipelineError::Mesh(MeshError::BudgetExceeded { .. }) => "mesh_budget",
            PipelineError::Mesh(_) => "mesh_failed",
            PipelineError::Load(_) => "bad_load",
            PipelineError::Solve(SolveError::NonConvergent { .. }) => "not_converged",
            PipelineError::Solve(SolveError::SingularSystem(_)) => "singular",
            PipelineError::Solve(_) => "solver_failed",
            PipelineError::Noise(_) => "bad_noise_input",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineSettings {
    pub bb_amplitude: f64,
    pub eo_amplitude: f64,
    pub refinement: RefinementDescriptor,
    pub solve: SolveSettings,
    pub eo_mode: EoMode,
    pub gamma: f64,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            bb_amplitude: DEFAULT_BB_AMPLITUDE,
            eo_amplitude: DEFAULT_EO_AMPLITUDE,
            refinement: RefinementDescriptor::default(),
            solve: SolveSettings::default(),
            eo_mode: EoMode::default(),
            gamma: crate::noise::DEFAULT_GAMMA,
        }
    }
}

/// Temperature-independent mechanical part of a budget.
#[derive(Debug, Clone)]
pub struct MechanicalResponse {
    pub geometry: ResonatorGeometry,
    pub profile: ModeProfile,
    pub bb: StrainEnergyResult,
    pub eo: StrainEnergyResult,
    /// Normaliser of the EO coordinate, sqrt(w_rho w_z), m.
    pub minor_radius: f64,
}

pub fn mechanical_response(
    geometry: &ResonatorGeometry,
    profile: &ModeProfile,
    moduli: &IsotropicModuli,
    settings: &PipelineSettings,
) -> Result<MechanicalResponse, PipelineError> {
    let mesh = build_mesh(geometry, Some(profile), &settings.refinement)?;
    let bb = solve_static(&mesh, moduli, &bb_surface_load(profile, settings.bb_amplitude)?, &settings.solve)?;
    let eo = solve_static(&mesh, moduli, &eo_volumetric_load(profile, settings.eo_amplitude)?, &settings.solve)?;
    Ok(MechanicalResponse {
        geometry: *geometry,
        profile: *profile,
        bb,
        eo,
        minor_radius: minor_radius(profile).minor_radius,
    })
}

impl MechanicalResponse {
    /// Relative major-radius deviation.
    pub fn sigma_bb(&self, temperature: f64, loss_angle: f64) -> Result<f64, NoiseError> {
        let input = FdtInput::new(self.bb.energy, self.bb.force, self.geometry.radius, temperature, loss_angle)?;
        Ok(allan_structural(&input))
    }

    /// Relative minor-radius deviation.
    pub fn sigma_dr_over_r(&self, temperature: f64, loss_angle: f64) -> Result<f64, NoiseError> {
        let input = FdtInput::new(self.eo.energy, self.eo.force, self.minor_radius, temperature, loss_angle)?;
        Ok(allan_structural(&input))
    }

    /// Full budget at one temperature and averaging time. `props` must be
    /// evaluated at `temperature`.
    pub fn budget(
        &self,
        id: &str,
        props: &MaterialProperties,
        temperature: f64,
        tau: f64,
        settings: &PipelineSettings,
    ) -> Result<NoiseBudget, NoiseError> {
        let sigma_bb = self.sigma_bb(temperature, props.loss_angle)?;
        let sigma_dr = self.sigma_dr_over_r(temperature, props.loss_angle)?;
        let n = props.refractive_index;
        Ok(NoiseBudget {
            id: id.to_string(),
            temperature,
            tau,
            sigma_tr: allan_tr(self.geometry.radius, temperature, props, settings.gamma, tau),
            sigma_bb,
            sigma_dr_over_r: sigma_dr,
            sigma_eo: allan_eo(sigma_bb, sigma_dr, n, props.p11, props.p12, settings.eo_mode),
            gamma: settings.gamma,
            eo_mode: settings.eo_mode,
            eo_factor: elasto_optic_factor(n, props.p11, props.p12),
        })
    }
}
