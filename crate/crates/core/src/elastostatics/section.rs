//! Upper half (z >= 0) of the meridional cross-section of a resonator.
//!
//! The boundary is a counter-clockwise loop: equatorial symmetry line, outer
//! surface (one or more curves), then the rotation axis back to the origin.

use std::f64::consts::FRAC_PI_2;

use crate::modes::{ResonatorGeometry, Shape};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Equatorial plane z = 0.
    Symmetry,
    /// Rotation axis rho = 0.
    Axis,
    /// Free outer surface.
    Surface,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Segment { from: Point, to: Point },
    /// Counter-clockwise arc between two polar angles.
    Arc { center: Point, radius: f64, start: f64, end: f64 },
}

impl Curve {
    pub fn length(&self) -> f64 {
        match *self {
            Curve::Segment { from, to } => dist(from, to),
            Curve::Arc { radius, start, end, .. } => radius * (end - start),
        }
    }

    /// Point at normalised parameter t in [0, 1].
    pub fn point_at(&self, t: f64) -> Point {
        match *self {
            Curve::Segment { from, to } => [from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])],
            Curve::Arc { center, radius, start, end } => {
                let a = start + t * (end - start);
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            }
        }
    }

    /// Nearest point on the (unbounded) carrier line or circle.
    pub fn project(&self, p: Point) -> Point {
        match *self {
            Curve::Segment { from, to } => {
                let d = [to[0] - from[0], to[1] - from[1]];
                let len2 = d[0] * d[0] + d[1] * d[1];
                let t = ((p[0] - from[0]) * d[0] + (p[1] - from[1]) * d[1]) / len2;
                [from[0] + t * d[0], from[1] + t * d[1]]
            }
            Curve::Arc { center, radius, .. } => {
                let v = [p[0] - center[0], p[1] - center[1]];
                let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                [center[0] + radius * v[0] / r, center[1] + radius * v[1] / r]
            }
        }
    }

    pub fn radius_of_curvature(&self) -> f64 {
        match *self {
            Curve::Segment { .. } => f64::INFINITY,
            Curve::Arc { radius, .. } => radius,
        }
    }
}

pub(crate) fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub geometry: ResonatorGeometry,
    pub pieces: Vec<(Curve, BoundaryKind)>,
}

impl Section {
    pub fn new(geometry: &ResonatorGeometry) -> Self {
        let r = geometry.radius;
        let mut pieces = vec![(Curve::Segment { from: [0.0, 0.0], to: [r, 0.0] }, BoundaryKind::Symmetry)];
        match geometry.shape {
            Shape::Sphere => {
                pieces.push((Curve::Arc { center: [0.0, 0.0], radius: r, start: 0.0, end: FRAC_PI_2 }, BoundaryKind::Surface));
                pieces.push((Curve::Segment { from: [0.0, r], to: [0.0, 0.0] }, BoundaryKind::Axis));
            }
            Shape::Disk { curvature, thickness } => {
                let half = 0.5 * thickness;
                let c = r - curvature;
                let end = (half / curvature).min(1.0).asin();
                let top = [c + curvature * end.cos(), half];
                pieces.push((Curve::Arc { center: [c, 0.0], radius: curvature, start: 0.0, end }, BoundaryKind::Surface));
                pieces.push((Curve::Segment { from: top, to: [0.0, half] }, BoundaryKind::Surface));
                pieces.push((Curve::Segment { from: [0.0, half], to: [0.0, 0.0] }, BoundaryKind::Axis));
            }
        }
        Section { geometry: *geometry, pieces }
    }

    /// Largest z of the section.
    pub fn height(&self) -> f64 {
        match self.geometry.shape {
            Shape::Sphere => self.geometry.radius,
            Shape::Disk { thickness, .. } => 0.5 * thickness,
        }
    }

    /// Smallest geometric length scale (radius, rim curvature, half-thickness).
    pub fn feature_size(&self) -> f64 {
        match self.geometry.shape {
            Shape::Sphere => self.geometry.radius,
            Shape::Disk { curvature, thickness } => self.geometry.radius.min(curvature).min(thickness),
        }
    }

    /// Negative inside; exact distance to the nearest boundary for interior
    /// points, a lower bound of the distance outside.
    pub fn signed_distance(&self, p: Point) -> f64 {
        let [rho, z] = p;
        let r = self.geometry.radius;
        let outer = match self.geometry.shape {
            Shape::Sphere => rho.hypot(z) - r,
            Shape::Disk { curvature, thickness } => {
                let c = r - curvature;
                let arc = (rho - c).max(0.0).hypot(z) - curvature;
                arc.max(z - 0.5 * thickness)
            }
        };
        outer.max(-rho).max(-z)
    }

    /// Arc length along the outer surface from the equator (R, 0) to the
    /// surface point nearest `p`.
    pub fn surface_arclength(&self, p: Point) -> f64 {
        match self.geometry.shape {
            Shape::Sphere => self.geometry.radius * p[1].atan2(p[0]).max(0.0),
            Shape::Disk { curvature, thickness } => {
                let c = self.geometry.radius - curvature;
                let end = (0.5 * thickness / curvature).min(1.0).asin();
                let angle = p[1].atan2(p[0] - c);
                if p[0] >= c && angle <= end {
                    curvature * angle.max(0.0)
                } else {
                    let top_rho = c + curvature * end.cos();
                    curvature * end + (top_rho - p[0]).max(0.0)
                }
            }
        }
    }

    /// Surface area of the full (both halves) revolved outer surface.
    pub fn revolved_surface_area(&self) -> f64 {
        use std::f64::consts::PI;
        let mut area = 0.0;
        for (curve, kind) in &self.pieces {
            if *kind != BoundaryKind::Surface {
                continue;
            }
            area += match *curve {
                Curve::Segment { from, to } => PI * (from[0] + to[0]) * dist(from, to),
                Curve::Arc { center, radius, start, end } => {
                    2.0 * PI * radius * (center[0] * (end - start) + radius * (end.sin() - start.sin()))
                }
            };
        }
        2.0 * area
    }
}
