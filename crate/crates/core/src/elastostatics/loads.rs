//! Conjugate loads and their consistent nodal forces on the half section.
//!
//! Nodal force vectors cover only the meshed upper half (z >= 0); conjugate
//! forces are totals over the full revolved body.

use std::f64::consts::PI;

use thiserror::Error;

use crate::modes::ModeProfile;

use super::element::{edge_shape, edge_shape_derivative, map_point, LINE_RULE, TRIANGLE_RULE};
use super::mesh::Mesh;
use super::section::{BoundaryKind, Point};

#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("load parameter {name} must be positive and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoadKind {
    /// Outward traction `amplitude * exp(-(s / w_z)^2)` with `s` the surface
    /// arc length from the equator. Amplitude in Pa.
    BbSurface { amplitude: f64, w_z: f64 },
    /// Body force of magnitude `amplitude * exp(-[(d_rho / w_rho)^2 + (z / w_z)^2])`
    /// pointing at the mode centre (rho0, 0). Amplitude in N/m^3.
    EoVolumetric { amplitude: f64, w_z: f64, w_rho: f64, rho0: f64 },
    /// Inward normal pressure on the whole outer surface, Pa.
    UniformPressure { pressure: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadSpec {
    pub kind: LoadKind,
}

fn positive(name: &'static str, value: f64) -> Result<f64, LoadError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(LoadError::InvalidParameter { name, value })
    }
}

pub fn bb_surface_load(profile: &ModeProfile, amplitude: f64) -> Result<LoadSpec, LoadError> {
    Ok(LoadSpec {
        kind: LoadKind::BbSurface { amplitude: positive("amplitude", amplitude)?, w_z: positive("w_z", profile.w_z)? },
    })
}

pub fn eo_volumetric_load(profile: &ModeProfile, sigma0: f64) -> Result<LoadSpec, LoadError> {
    Ok(LoadSpec {
        kind: LoadKind::EoVolumetric {
            amplitude: positive("Sigma0", sigma0)?,
            w_z: positive("w_z", profile.w_z)?,
            w_rho: positive("w_rho", profile.w_rho)?,
            rho0: positive("rho0", profile.rho0)?,
        },
    })
}

pub fn uniform_pressure_load(pressure: f64) -> Result<LoadSpec, LoadError> {
    Ok(LoadSpec { kind: LoadKind::UniformPressure { pressure: positive("pressure", pressure)? } })
}

/// Closed-form conjugate force of the BB load on a body of radius `radius`,
/// neglecting surface curvature over the Gaussian.
pub fn bb_force_analytic(amplitude: f64, radius: f64, w_z: f64) -> f64 {
    2.0 * PI.powf(1.5) * amplitude * radius * w_z
}

/// Nodal forces and bookkeeping for one load on one mesh.
#[derive(Debug, Clone)]
pub struct AppliedLoad {
    /// Consistent nodal forces on the half section, index `2 * node + component`.
    pub forces: Vec<f64>,
    /// Conjugate total force over the full body, N.
    pub conjugate_force: f64,
    /// Signed volume integral of the body-force components (EO only).
    pub signed_integral: Option<f64>,
    pub warnings: Vec<String>,
}

/// Reference-coordinate corners of the four children of the reference triangle.
const SUB_TRIANGLES: [[[f64; 2]; 3]; 4] = [
    [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]],
    [[0.5, 0.0], [1.0, 0.0], [0.5, 0.5]],
    [[0.0, 0.5], [0.5, 0.5], [0.0, 1.0]],
    [[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]],
];

/// Subdivisions of each boundary edge when integrating tractions.
const EDGE_PANELS: usize = 4;

impl LoadSpec {
    pub fn amplitude(&self) -> f64 {
        match self.kind {
            LoadKind::BbSurface { amplitude, .. } | LoadKind::EoVolumetric { amplitude, .. } => amplitude,
            LoadKind::UniformPressure { pressure } => pressure,
        }
    }

    /// Same load with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> LoadSpec {
        let kind = match self.kind {
            LoadKind::BbSurface { amplitude, w_z } => LoadKind::BbSurface { amplitude: amplitude * factor, w_z },
            LoadKind::EoVolumetric { amplitude, w_z, w_rho, rho0 } => {
                LoadKind::EoVolumetric { amplitude: amplitude * factor, w_z, w_rho, rho0 }
            }
            LoadKind::UniformPressure { pressure } => LoadKind::UniformPressure { pressure: pressure * factor },
        };
        LoadSpec { kind }
    }

    /// Body force density at `p` (EO only), N/m^3.
    pub fn body_force(&self, p: Point) -> [f64; 2] {
        match self.kind {
            LoadKind::EoVolumetric { amplitude, w_z, w_rho, rho0 } => {
                let d = [p[0] - rho0, p[1]];
                let r = d[0].hypot(d[1]);
                if r == 0.0 {
                    return [0.0, 0.0];
                }
                let g = amplitude * (-((d[0] / w_rho).powi(2) + (d[1] / w_z).powi(2))).exp();
                [-g * d[0] / r, -g * d[1] / r]
            }
            _ => [0.0, 0.0],
        }
    }

    /// Surface traction at `p` with outward unit normal `n`, Pa.
    fn traction(&self, mesh: &Mesh, p: Point, n: [f64; 2]) -> [f64; 2] {
        match self.kind {
            LoadKind::BbSurface { amplitude, w_z } => {
                let s = mesh.section.surface_arclength(p);
                let t = amplitude * (-(s / w_z).powi(2)).exp();
                [t * n[0], t * n[1]]
            }
            LoadKind::UniformPressure { pressure } => [-pressure * n[0], -pressure * n[1]],
            LoadKind::EoVolumetric { .. } => [0.0, 0.0],
        }
    }

    /// Assembles consistent nodal forces and the conjugate force on `mesh`.
    pub fn apply(&self, mesh: &Mesh) -> AppliedLoad {
        let mut forces = vec![0.0; 2 * mesh.node_count()];
        let mut warnings = Vec::new();
        match self.kind {
            LoadKind::EoVolumetric { w_z, w_rho, rho0, .. } => {
                let (force, signed) = self.apply_body_force(mesh, &mut forces);
                if let Some(w) = truncation_warning(mesh, rho0, w_rho, w_z) {
                    warnings.push(w);
                }
                AppliedLoad { forces, conjugate_force: force, signed_integral: Some(signed), warnings }
            }
            _ => {
                let force = self.apply_traction(mesh, &mut forces);
                AppliedLoad { forces, conjugate_force: force, signed_integral: None, warnings }
            }
        }
    }

    fn apply_traction(&self, mesh: &Mesh, forces: &mut [f64]) -> f64 {
        let mut magnitude = 0.0;
        for edge in mesh.boundary.iter().filter(|e| e.kind == BoundaryKind::Surface) {
            let pts = edge.nodes.map(|n| mesh.nodes[n]);
            for panel in 0..EDGE_PANELS {
                for &(tq, wq) in &LINE_RULE {
                    let t = (panel as f64 + tq) / EDGE_PANELS as f64;
                    let w = wq / EDGE_PANELS as f64;
                    let n = edge_shape(t);
                    let dn = edge_shape_derivative(t);
                    let mut x = [0.0; 2];
                    let mut dx = [0.0; 2];
                    for a in 0..3 {
                        for d in 0..2 {
                            x[d] += n[a] * pts[a][d];
                            dx[d] += dn[a] * pts[a][d];
                        }
                    }
                    let jac = dx[0].hypot(dx[1]);
                    // the loop runs counter-clockwise, so the outward normal is the tangent turned clockwise
                    let normal = [dx[1] / jac, -dx[0] / jac];
                    let tr = self.traction(mesh, x, normal);
                    let scale = w * jac * 2.0 * PI * x[0];
                    for a in 0..3 {
                        forces[2 * edge.nodes[a]] += scale * n[a] * tr[0];
                        forces[2 * edge.nodes[a] + 1] += scale * n[a] * tr[1];
                    }
                    magnitude += scale * tr[0].hypot(tr[1]);
                }
            }
        }
        2.0 * magnitude
    }

    /// Returns the conjugate force from component magnitudes and the signed
    /// component integral, both over the full body.
    fn apply_body_force(&self, mesh: &Mesh, forces: &mut [f64]) -> (f64, f64) {
        let mut magnitude = 0.0;
        let mut signed = 0.0;
        for e in 0..mesh.element_count() {
            let coords = mesh.element_coords(e);
            let nodes = mesh.elements[e];
            for sub in &SUB_TRIANGLES {
                for &(xi, eta, w) in &TRIANGLE_RULE {
                    let r = [
                        sub[0][0] + xi * (sub[1][0] - sub[0][0]) + eta * (sub[2][0] - sub[0][0]),
                        sub[0][1] + xi * (sub[1][1] - sub[0][1]) + eta * (sub[2][1] - sub[0][1]),
                    ];
                    let p = map_point(&coords, r[0], r[1]);
                    let b = self.body_force(p.x);
                    if b == [0.0, 0.0] {
                        continue;
                    }
                    let scale = 0.25 * w * p.det_j * 2.0 * PI * p.x[0];
                    for a in 0..6 {
                        forces[2 * nodes[a]] += scale * p.n[a] * b[0];
                        forces[2 * nodes[a] + 1] += scale * p.n[a] * b[1];
                    }
                    magnitude += scale * (b[0].abs() + b[1].abs());
                    // the axial component is odd in z and cancels over the full body
                    signed += scale * b[0];
                }
            }
        }
        (2.0 * magnitude, 2.0 * signed)
    }
}

/// Warns when the three-half-width ellipse around the mode centre leaves the section.
fn truncation_warning(mesh: &Mesh, rho0: f64, w_rho: f64, w_z: f64) -> Option<String> {
    let tol = 1e-9 * mesh.section.feature_size();
    let outside = (0..=64).any(|k| {
        let a = PI * k as f64 / 64.0;
        let p = [rho0 + 3.0 * w_rho * a.cos(), 3.0 * w_z * a.sin()];
        mesh.section.signed_distance(p) > tol
    });
    outside.then(|| {
        format!(
            "EO load support truncated: 3-half-width ellipse around rho0 = {rho0:e} m (w_rho = {w_rho:e}, w_z = {w_z:e}) extends outside the body"
        )
    })
}
