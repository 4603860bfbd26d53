//! Scan configuration file.
//!
//! ```toml
//! material = "caf2.toml"        # optional, bundled CaF2 otherwise
//! temperatures = [5.0, 300.0]
//! taus = [1.0]
//! mode_source = "table"         # estimate | table | supplied
//!
//! [[geometry]]
//! shape = "sphere"
//! radius = 1e-3
//!
//! [[sweep]]
//! shape = "disk"
//! radius = [1e-3]
//! curvature = [1e-4, 1e-3, 1e-2]
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use wgnoise::elastostatics::{RefinementDescriptor, SolveSettings};
use wgnoise::materials::{Extrapolation, MaterialTable};
use wgnoise::modes::{ResonatorGeometry, SuppliedMode};
use wgnoise::noise::{EoMode, DEFAULT_GAMMA};
use wgnoise::pipeline::{PipelineSettings, DEFAULT_BB_AMPLITUDE, DEFAULT_EO_AMPLITUDE};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("material: {0}")]
    Material(#[from] wgnoise::materials::MaterialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSourceKind {
    /// Asymptotic estimator.
    Estimate,
    /// Bundled published mode parameters.
    #[default]
    Table,
    /// `[geometry.mode]` tables in the config.
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Sphere,
    Disk,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub frequency: f64,
    pub azimuthal_index: u64,
    pub w_z: f64,
    pub w_rho: f64,
    pub rho0: f64,
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryEntry {
    pub id: Option<String>,
    pub shape: ShapeKind,
    pub radius: f64,
    pub curvature: Option<f64>,
    pub thickness: Option<f64>,
    pub mode: Option<ModeEntry>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepEntry {
    pub shape: ShapeKind,
    pub radius: Vec<f64>,
    #[serde(default)]
    pub curvature: Vec<f64>,
    pub thickness: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FemSection {
    pub mode_size_fraction: f64,
    pub grading: f64,
    pub max_size_fraction: f64,
    pub arc_resolution: f64,
    pub subdivisions: u32,
    pub max_nodes: usize,
    pub tolerance: f64,
    pub max_refinements: u32,
    pub bb_amplitude: f64,
    pub eo_amplitude: f64,
}

impl Default for FemSection {
    fn default() -> Self {
        let r = RefinementDescriptor::default();
        let s = SolveSettings::default();
        FemSection {
            mode_size_fraction: r.mode_size_fraction,
            grading: r.grading,
            max_size_fraction: r.max_size_fraction,
            arc_resolution: r.arc_resolution,
            subdivisions: r.subdivisions,
            max_nodes: r.max_nodes,
            tolerance: s.tolerance,
            max_refinements: s.max_refinements,
            bb_amplitude: DEFAULT_BB_AMPLITUDE,
            eo_amplitude: DEFAULT_EO_AMPLITUDE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationKind {
    /// Hold end values outside the tabulated range.
    #[default]
    Clamp,
    Error,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    material: Option<PathBuf>,
    #[serde(default)]
    geometry: Vec<GeometryEntry>,
    #[serde(default)]
    sweep: Vec<SweepEntry>,
    temperatures: Vec<f64>,
    #[serde(default = "default_taus")]
    taus: Vec<f64>,
    #[serde(default)]
    mode_source: ModeSourceKind,
    #[serde(default = "default_wavelength")]
    wavelength: f64,
    #[serde(default)]
    eo_mode: EoMode,
    #[serde(default = "default_gamma")]
    gamma: f64,
    #[serde(default)]
    extrapolation: ExtrapolationKind,
    #[serde(default)]
    fem: FemSection,
    output: Option<PathBuf>,
}

fn default_taus() -> Vec<f64> {
    vec![1.0]
}

fn default_wavelength() -> f64 {
    1.565e-6
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

/// A geometry ready for the scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGeometry {
    pub id: String,
    pub geometry: ResonatorGeometry,
    pub mode: Option<SuppliedMode>,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Material file; `None` selects the bundled CaF2 table.
    pub material: Option<PathBuf>,
    pub geometries: Vec<ScanGeometry>,
    pub temperatures: Vec<f64>,
    pub taus: Vec<f64>,
    pub mode_source: ModeSourceKind,
    pub wavelength: f64,
    pub extrapolation: Extrapolation,
    pub pipeline: PipelineSettings,
    pub output: Option<PathBuf>,
}

fn positive(name: &str, v: f64) -> Result<f64, ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::Invalid(format!("{name} must be positive, got {v}")))
    }
}

fn geometry_id(shape: ShapeKind, r: f64, s: Option<f64>) -> String {
    match (shape, s) {
        (ShapeKind::Sphere, _) => format!("sphere-R{}mm", r * 1e3),
        (ShapeKind::Disk, Some(s)) => format!("disk-R{}mm-S{}mm", r * 1e3, s * 1e3),
        (ShapeKind::Disk, None) => format!("disk-R{}mm", r * 1e3),
    }
}

fn make_geometry(shape: ShapeKind, r: f64, s: Option<f64>, t: Option<f64>) -> Result<ResonatorGeometry, ConfigError> {
    let g = match shape {
        ShapeKind::Sphere => {
            if s.is_some() || t.is_some() {
                return Err(ConfigError::Invalid("spheres take no curvature or thickness".into()));
            }
            ResonatorGeometry::sphere(r)
        }
        ShapeKind::Disk => {
            let s = s.ok_or_else(|| ConfigError::Invalid(format!("disk R = {r} m needs a curvature")))?;
            ResonatorGeometry::disk(r, s, t)
        }
    };
    g.map_err(|e| ConfigError::Invalid(e.to_string()))
}

impl ScanConfig {
    pub fn from_toml_str(text: &str, base_dir: Option<&Path>) -> Result<ScanConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let mut geometries = Vec::new();
        for g in &raw.geometry {
            positive("geometry radius", g.radius)?;
            let geometry = make_geometry(g.shape, g.radius, g.curvature, g.thickness)?;
            let mode = g.mode.map(|m| SuppliedMode {
                frequency: m.frequency,
                azimuthal_index: m.azimuthal_index,
                w_z: m.w_z,
                w_rho: m.w_rho,
                rho0: m.rho0,
                wavelength: m.wavelength.unwrap_or(wgnoise::constants::SPEED_OF_LIGHT / m.frequency),
            });
            let id = g.id.clone().unwrap_or_else(|| geometry_id(g.shape, g.radius, g.curvature));
            geometries.push(ScanGeometry { id, geometry, mode });
        }
        for sw in &raw.sweep {
            if sw.radius.is_empty() {
                return Err(ConfigError::Invalid("sweep radius list is empty".into()));
            }
            let curvatures: Vec<Option<f64>> = match sw.shape {
                ShapeKind::Sphere => {
                    if !sw.curvature.is_empty() {
                        return Err(ConfigError::Invalid("sphere sweeps take no curvature".into()));
                    }
                    vec![None]
                }
                ShapeKind::Disk if sw.curvature.is_empty() => {
                    return Err(ConfigError::Invalid("disk sweep curvature list is empty".into()))
                }
                ShapeKind::Disk => sw.curvature.iter().map(|&s| Some(s)).collect(),
            };
            for &r in &sw.radius {
                positive("sweep radius", r)?;
                for &s in &curvatures {
                    if let Some(s) = s {
                        positive("sweep curvature", s)?;
                    }
                    let geometry = make_geometry(sw.shape, r, s, sw.thickness)?;
                    geometries.push(ScanGeometry { id: geometry_id(sw.shape, r, s), geometry, mode: None });
                }
            }
        }
        if geometries.is_empty() {
            return Err(ConfigError::Invalid("no geometries: add [[geometry]] or [[sweep]] entries".into()));
        }
        if raw.temperatures.is_empty() {
            return Err(ConfigError::Invalid("temperature list is empty".into()));
        }
        if raw.taus.is_empty() {
            return Err(ConfigError::Invalid("tau list is empty".into()));
        }
        for &t in &raw.temperatures {
            positive("temperature", t)?;
        }
        for &t in &raw.taus {
            positive("tau", t)?;
        }
        positive("wavelength", raw.wavelength)?;
        positive("gamma", raw.gamma)?;
        let f = raw.fem;
        for (name, v) in [
            ("fem.mode_size_fraction", f.mode_size_fraction),
            ("fem.grading", f.grading),
            ("fem.max_size_fraction", f.max_size_fraction),
            ("fem.arc_resolution", f.arc_resolution),
            ("fem.tolerance", f.tolerance),
            ("fem.bb_amplitude", f.bb_amplitude),
            ("fem.eo_amplitude", f.eo_amplitude),
        ] {
            positive(name, v)?;
        }
        if raw.mode_source == ModeSourceKind::Supplied {
            if let Some(g) = geometries.iter().find(|g| g.mode.is_none()) {
                return Err(ConfigError::Invalid(format!(
                    "mode_source = \"supplied\" but geometry {} has no [geometry.mode] table",
                    g.id
                )));
            }
        }
        let resolve = |p: PathBuf| match base_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        };
        let material = raw.material.map(resolve);
        if let Some(path) = &material {
            if !path.is_file() {
                return Err(ConfigError::Invalid(format!("material file {} does not exist", path.display())));
            }
        }
        let pipeline = PipelineSettings {
            bb_amplitude: f.bb_amplitude,
            eo_amplitude: f.eo_amplitude,
            refinement: RefinementDescriptor {
                mode_size_fraction: f.mode_size_fraction,
                grading: f.grading,
                max_size_fraction: f.max_size_fraction,
                arc_resolution: f.arc_resolution,
                subdivisions: f.subdivisions,
                max_nodes: f.max_nodes,
                ..RefinementDescriptor::default()
            },
            solve: SolveSettings { tolerance: f.tolerance, max_refinements: f.max_refinements, ..SolveSettings::default() },
            eo_mode: raw.eo_mode,
            gamma: raw.gamma,
        };
        Ok(ScanConfig {
            material,
            geometries,
            temperatures: raw.temperatures,
            taus: raw.taus,
            mode_source: raw.mode_source,
            wavelength: raw.wavelength,
            extrapolation: match raw.extrapolation {
                ExtrapolationKind::Clamp => Extrapolation::Clamp,
                ExtrapolationKind::Error => Extrapolation::None,
            },
            pipeline,
            output: raw.output.map(resolve),
        })
    }

    pub fn from_path(path: &Path) -> Result<ScanConfig, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        ScanConfig::from_toml_str(&text, path.parent())
    }

    /// Config with bundled defaults for the given geometries and temperatures.
    pub fn with_geometries(geometries: Vec<ScanGeometry>, temperatures: Vec<f64>) -> ScanConfig {
        ScanConfig {
            material: None,
            geometries,
            temperatures,
            taus: default_taus(),
            mode_source: ModeSourceKind::Table,
            wavelength: default_wavelength(),
            extrapolation: Extrapolation::Clamp,
            pipeline: PipelineSettings::default(),
            output: None,
        }
    }

    pub fn load_material(&self) -> Result<MaterialTable, ConfigError> {
        match &self.material {
            Some(p) => Ok(MaterialTable::from_path(p)?),
            None => Ok(MaterialTable::bundled_caf2()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
temperatures = [5.0, 300.0]
[[geometry]]
shape = "sphere"
radius = 1e-3
[[sweep]]
shape = "disk"
radius = [1e-3]
curvature = [1e-4, 1e-3, 1e-2]
"#;

    #[test]
    fn parses_geometries_and_sweeps() {
        let c = ScanConfig::from_toml_str(BASE, None).unwrap();
        assert_eq!(c.geometries.len(), 4);
        assert_eq!(c.geometries[0].id, "sphere-R1mm");
        assert_eq!(c.geometries[3].id, "disk-R1mm-S10mm");
        assert_eq!(c.taus, vec![1.0]);
        assert_eq!(c.mode_source, ModeSourceKind::Table);
        assert_eq!(c.pipeline.eo_mode, EoMode::NeglectDr);
    }

    #[test]
    fn rejects_empty_lists_and_unknown_keys() {
        let e = ScanConfig::from_toml_str(&BASE.replace("[5.0, 300.0]", "[]"), None).unwrap_err();
        assert!(e.to_string().contains("temperature list is empty"), "{e}");
        assert!(ScanConfig::from_toml_str("temperatures = [5.0]", None).is_err());
        assert!(ScanConfig::from_toml_str(&format!("{BASE}\ncolour = 1"), None).is_err());
        assert!(ScanConfig::from_toml_str(&BASE.replace("1e-3\n[[sweep]]", "-1e-3\n[[sweep]]"), None).is_err());
    }

    #[test]
    fn supplied_mode_required_when_selected() {
        let text = format!("mode_source = \"supplied\"\n{BASE}");
        assert!(ScanConfig::from_toml_str(&text, None).is_err());
    }

    #[test]
    fn bundled_summary_config_parses() {
        let c = ScanConfig::from_toml_str(include_str!("../configs/summary.toml"), None).unwrap();
        assert_eq!(c.geometries.len(), 9);
        assert_eq!(c.extrapolation, Extrapolation::Clamp);
        assert_eq!(c.pipeline.solve.max_refinements, 3);
    }

    #[test]
    fn missing_material_file_is_an_error() {
        let text = format!("material = \"/nonexistent/mat.toml\"\n{BASE}");
        let e = ScanConfig::from_toml_str(&text, None).unwrap_err();
        assert!(e.to_string().contains("does not exist"));
    }
}
