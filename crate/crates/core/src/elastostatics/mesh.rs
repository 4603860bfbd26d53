//! Graded quadratic-triangle meshes of the resonator half cross-section.
//!
//! Vertices come from two sources: boundary points marched along each
//! boundary curve at the local target size, and the centres of a quadtree
//! whose cells are split until they match a size field that is finest in a
//! box around the optical mode and grows linearly away from it. The vertices
//! are triangulated with a constrained Delaunay triangulation whose
//! constraint loop is the section boundary; mid-side nodes on the outer
//! surface are projected onto the exact boundary curve.

use std::collections::HashMap;
use std::io::{self, Write};

use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};
use thiserror::Error;

use crate::modes::{ModeProfile, ResonatorGeometry, Shape};

use super::element::{map_point, map_position, TRIANGLE_RULE};
use super::section::{dist, BoundaryKind, Curve, Point, Section};

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("meshing failed: {0}")]
    Meshing(String),
    #[error("refinement budget exceeded: {nodes} nodes requested, limit {limit}")]
    BudgetExceeded { nodes: usize, limit: usize },
    #[error("element {element} is inverted or degenerate (det J = {det:e})")]
    InvertedElement { element: usize, det: f64 },
}

/// Controls element sizes. Lengths are relative to the mode widths or to
/// the smallest geometric feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementDescriptor {
    /// Target size in the mode region as a fraction of min(w_z, w_rho).
    pub mode_size_fraction: f64,
    /// Growth of the target size per unit distance from the mode region.
    pub grading: f64,
    /// Largest element size as a fraction of the smallest geometric feature.
    pub max_size_fraction: f64,
    /// Boundary points per radius of curvature along curved boundaries.
    pub arc_resolution: f64,
    /// Extent of the mode region in Gaussian half-widths.
    pub focus_halfwidths: f64,
    /// Uniform 1:4 subdivisions applied after generation.
    pub subdivisions: u32,
    /// Upper bound on the vertex count before subdivision.
    pub max_nodes: usize,
}

impl Default for RefinementDescriptor {
    fn default() -> Self {
        RefinementDescriptor {
            mode_size_fraction: 1.0 / 6.0,
            grading: 0.3,
            max_size_fraction: 0.25,
            arc_resolution: 8.0,
            focus_halfwidths: 3.0,
            subdivisions: 0,
            max_nodes: 2_000_000,
        }
    }
}

impl RefinementDescriptor {
    /// Same grading with every target size multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        RefinementDescriptor {
            mode_size_fraction: self.mode_size_fraction * factor,
            max_size_fraction: self.max_size_fraction * factor,
            arc_resolution: self.arc_resolution / factor,
            ..*self
        }
    }
}

/// Axis-aligned box (in the upper half) around the optical mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusBox {
    pub rho_min: f64,
    pub rho_max: f64,
    pub z_max: f64,
}

impl FocusBox {
    fn distance(&self, p: Point) -> f64 {
        let dr = (self.rho_min - p[0]).max(p[0] - self.rho_max).max(0.0);
        let dz = (p[1] - self.z_max).max(0.0);
        dr.hypot(dz)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.rho_min && p[0] <= self.rho_max && p[1] <= self.z_max
    }
}

#[derive(Debug, Clone, Copy)]
struct SizeField {
    h_min: f64,
    h_max: f64,
    grading: f64,
    focus: Option<FocusBox>,
}

impl SizeField {
    fn at(&self, p: Point) -> f64 {
        match self.focus {
            Some(b) => (self.h_min + self.grading * b.distance(p)).min(self.h_max),
            None => self.h_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    /// End nodes in boundary-loop order, then the mid-side node.
    pub nodes: [usize; 3],
    pub kind: BoundaryKind,
    /// Index of the boundary curve in the section.
    pub piece: usize,
}

/// Conforming T6 triangulation of the half cross-section.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    pub elements: Vec<[usize; 6]>,
    pub boundary: Vec<BoundaryEdge>,
    pub section: Section,
    pub focus: Option<FocusBox>,
    pub refinement: RefinementDescriptor,
    /// Number of uniform subdivisions applied since generation.
    pub level: u32,
}

/// Builds the mesh. `profile` centres the graded refinement on the mode;
/// without it the mesh is quasi-uniform.
pub fn build_mesh(
    geom: &ResonatorGeometry,
    profile: Option<&ModeProfile>,
    refinement: &RefinementDescriptor,
) -> Result<Mesh, MeshError> {
    let section = Section::new(geom);
    let h_max = refinement.max_size_fraction * section.feature_size();
    let focus = profile.map(|p| focus_box(geom, p, refinement.focus_halfwidths));
    let h_min = profile.map_or(h_max, |p| (refinement.mode_size_fraction * p.w_z.min(p.w_rho)).min(h_max));
    let field = SizeField { h_min, h_max, grading: refinement.grading, focus };

    let mut points: Vec<Point> = Vec::new();
    let mut loop_edges: Vec<(usize, usize, BoundaryKind, usize)> = Vec::new();
    for (piece, (curve, kind)) in section.pieces.iter().enumerate() {
        let cap = curve.radius_of_curvature() / refinement.arc_resolution;
        let params = march(curve, |p| field.at(p).min(cap));
        // the last point of each curve is the first of the next one
        for w in params.windows(2) {
            let a = points.len();
            points.push(curve.point_at(w[0]));
            loop_edges.push((a, a + 1, *kind, piece));
        }
        check_budget(points.len(), refinement.max_nodes)?;
    }
    let n_loop = points.len();
    if let Some(last) = loop_edges.last_mut() {
        last.1 = 0;
    }

    interior_points(&section, &field, refinement.max_nodes, &mut points)?;

    let vertices: Vec<Point2<f64>> = points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let edges: Vec<[usize; 2]> = loop_edges.iter().map(|e| [e.0, e.1]).collect();
    let cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(vertices, edges)
        .map_err(|e| MeshError::Meshing(format!("triangulation failed: {e:?}")))?;
    if cdt.num_vertices() != points.len() {
        return Err(MeshError::Meshing(format!(
            "{} duplicate vertices removed by the triangulation",
            points.len() - cdt.num_vertices()
        )));
    }

    let tol = 1e-9 * section.feature_size();
    let mut corners: Vec<[usize; 3]> = Vec::with_capacity(cdt.num_inner_faces());
    for face in cdt.inner_faces() {
        let [a, b, c] = face.vertices().map(|v| v.fix().index());
        let (pa, pb, pc) = (points[a], points[b], points[c]);
        let area = 0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]));
        let centroid = [(pa[0] + pb[0] + pc[0]) / 3.0, (pa[1] + pb[1] + pc[1]) / 3.0];
        if section.signed_distance(centroid) > tol {
            return Err(MeshError::Meshing(format!("triangle outside the section at {centroid:?}")));
        }
        corners.push(if area > 0.0 { [a, b, c] } else { [a, c, b] });
    }

    let boundary_lookup: HashMap<(usize, usize), (BoundaryKind, usize)> = loop_edges
        .iter()
        .map(|&(a, b, kind, piece)| (edge_key(a, b), (kind, piece)))
        .collect();
    debug_assert_eq!(boundary_lookup.len(), n_loop);

    let mut nodes = points;
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut mid_node = |a: usize, b: usize, nodes: &mut Vec<Point>| -> usize {
        *mids.entry(edge_key(a, b)).or_insert_with(|| {
            let m = [0.5 * (nodes[a][0] + nodes[b][0]), 0.5 * (nodes[a][1] + nodes[b][1])];
            let m = match boundary_lookup.get(&edge_key(a, b)) {
                Some(&(BoundaryKind::Surface, piece)) => section.pieces[piece].0.project(m),
                _ => m,
            };
            nodes.push(m);
            nodes.len() - 1
        })
    };
    let mut elements = Vec::with_capacity(corners.len());
    for [a, b, c] in corners {
        let ab = mid_node(a, b, &mut nodes);
        let bc = mid_node(b, c, &mut nodes);
        let ca = mid_node(c, a, &mut nodes);
        elements.push([a, b, c, ab, bc, ca]);
    }
    let boundary = loop_edges
        .iter()
        .map(|&(a, b, kind, piece)| BoundaryEdge { nodes: [a, b, mid_node(a, b, &mut nodes)], kind, piece })
        .collect();

    let mut mesh = Mesh { nodes, elements, boundary, section, focus, refinement: *refinement, level: 0 };
    mesh.check_jacobians()?;
    for _ in 0..refinement.subdivisions {
        mesh = mesh.refine_uniform();
    }
    Ok(mesh)
}

fn focus_box(geom: &ResonatorGeometry, p: &ModeProfile, halfwidths: f64) -> FocusBox {
    let r = geom.radius;
    let surface_curvature = match geom.shape {
        Shape::Sphere => r,
        Shape::Disk { curvature, .. } => curvature,
    };
    let z_max = halfwidths * p.w_z;
    // the surface load band bends inward by s^2 / (2 S) over its extent
    let sag = z_max * z_max / (2.0 * surface_curvature);
    FocusBox { rho_min: (p.rho0 - halfwidths * p.w_rho).min(r - sag - p.w_rho), rho_max: r, z_max }
}

fn check_budget(nodes: usize, limit: usize) -> Result<(), MeshError> {
    if nodes > limit {
        Err(MeshError::BudgetExceeded { nodes, limit })
    } else {
        Ok(())
    }
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b { (a, b) } else { (b, a) }
}

/// Normalised curve parameters of boundary points, spaced by `size`.
fn march(curve: &Curve, size: impl Fn(Point) -> f64) -> Vec<f64> {
    let length = curve.length();
    let mut params = vec![0.0];
    let mut s = 0.0;
    loop {
        let h1 = size(curve.point_at(s / length));
        let h2 = size(curve.point_at(((s + h1) / length).min(1.0)));
        let step = h1.min(h2);
        s += step;
        if s >= length - 0.5 * step {
            break;
        }
        params.push(s / length);
    }
    params.push(1.0);
    params
}

fn interior_points(
    section: &Section,
    field: &SizeField,
    limit: usize,
    points: &mut Vec<Point>,
) -> Result<(), MeshError> {
    const HALF_DIAGONAL: f64 = std::f64::consts::FRAC_1_SQRT_2;
    let root = section.geometry.radius.max(section.height());
    let floor = 1e-3 * field.h_min;
    let mut stack = vec![(0.0f64, 0.0f64, root)];
    while let Some((x0, y0, size)) = stack.pop() {
        let c = [x0 + 0.5 * size, y0 + 0.5 * size];
        let sd = section.signed_distance(c);
        if sd > HALF_DIAGONAL * size {
            continue;
        }
        let h = field.at(c);
        let h_lower = match field.focus {
            Some(_) => h - field.grading * HALF_DIAGONAL * size,
            None => h,
        };
        if size > h_lower && size > floor {
            let s = 0.5 * size;
            stack.extend([(x0, y0, s), (x0 + s, y0, s), (x0, y0 + s, s), (x0 + s, y0 + s, s)]);
            continue;
        }
        if sd < -0.5 * h.min(2.0 * size) {
            points.push(c);
            if points.len() > limit {
                return Err(MeshError::BudgetExceeded { nodes: points.len(), limit });
            }
        }
    }
    Ok(())
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn element_coords(&self, e: usize) -> [Point; 6] {
        self.elements[e].map(|n| self.nodes[n])
    }

    fn check_jacobians(&self) -> Result<(), MeshError> {
        const CORNERS: [(f64, f64); 3] = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        for e in 0..self.elements.len() {
            let coords = self.element_coords(e);
            let points = TRIANGLE_RULE.iter().map(|q| (q.0, q.1)).chain(CORNERS);
            for (xi, eta) in points {
                let det = map_point(&coords, xi, eta).det_j;
                if !(det > 0.0) {
                    return Err(MeshError::InvertedElement { element: e, det });
                }
            }
        }
        Ok(())
    }

    /// Smallest Jacobian determinant relative to the straight-sided value,
    /// sampled at the quadrature points.
    pub fn min_jacobian_ratio(&self) -> f64 {
        let mut worst = f64::INFINITY;
        for e in 0..self.elements.len() {
            let c = self.element_coords(e);
            let straight = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
            for q in &TRIANGLE_RULE {
                worst = worst.min(map_point(&c, q.0, q.1).det_j / straight);
            }
        }
        worst
    }

    /// Smallest interior angle over all elements (corner triangle), degrees.
    pub fn min_angle_degrees(&self) -> f64 {
        let mut worst = 180.0f64;
        for el in &self.elements {
            let p = [self.nodes[el[0]], self.nodes[el[1]], self.nodes[el[2]]];
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                worst = worst.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        worst
    }

    /// Longest corner-to-corner edge among elements whose centroid lies in
    /// the mode region. `None` without a mode region.
    pub fn mode_region_max_edge(&self) -> Option<f64> {
        let focus = self.focus?;
        let mut longest: f64 = 0.0;
        for el in &self.elements {
            let p = [self.nodes[el[0]], self.nodes[el[1]], self.nodes[el[2]]];
            let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
            if focus.contains(centroid) {
                for i in 0..3 {
                    longest = longest.max(dist(p[i], p[(i + 1) % 3]));
                }
            }
        }
        Some(longest)
    }

    /// Largest distance between the curved surface edges and the exact
    /// boundary curve, sampled along every edge.
    pub fn surface_chord_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for edge in self.boundary.iter().filter(|e| e.kind == BoundaryKind::Surface) {
            let curve = self.section.pieces[edge.piece].0;
            let pts = edge.nodes.map(|n| self.nodes[n]);
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let n = super::element::edge_shape(t);
                let x = [
                    n[0] * pts[0][0] + n[1] * pts[1][0] + n[2] * pts[2][0],
                    n[0] * pts[0][1] + n[1] * pts[1][1] + n[2] * pts[2][1],
                ];
                worst = worst.max(dist(x, curve.project(x)));
            }
        }
        worst
    }

    /// Area of the half cross-section covered by the mesh.
    pub fn area(&self) -> f64 {
        let mut area = 0.0;
        for e in 0..self.elements.len() {
            let c = self.element_coords(e);
            for q in &TRIANGLE_RULE {
                area += q.2 * map_point(&c, q.0, q.1).det_j;
            }
        }
        area
    }

    /// Splits every element into four. Mid-side nodes on the outer surface
    /// are projected onto the exact boundary curve.
    pub fn refine_uniform(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut boundary = Vec::with_capacity(2 * self.boundary.len());
        for edge in &self.boundary {
            let [a, b, m] = edge.nodes;
            let pts = edge.nodes.map(|n| self.nodes[n]);
            let mut child = |from: usize, to: usize, t: f64, nodes: &mut Vec<Point>| {
                let n = super::element::edge_shape(t);
                let mut x = [
                    n[0] * pts[0][0] + n[1] * pts[1][0] + n[2] * pts[2][0],
                    n[0] * pts[0][1] + n[1] * pts[1][1] + n[2] * pts[2][1],
                ];
                if edge.kind == BoundaryKind::Surface {
                    x = self.section.pieces[edge.piece].0.project(x);
                }
                nodes.push(x);
                let id = nodes.len() - 1;
                mids.insert(edge_key(from, to), id);
                BoundaryEdge { nodes: [from, to, id], kind: edge.kind, piece: edge.piece }
            };
            boundary.push(child(a, m, 0.25, &mut nodes));
            boundary.push(child(m, b, 0.75, &mut nodes));
        }

        // children as local indices into [c0, c1, c2, m01, m12, m20]
        const CHILDREN: [[usize; 3]; 4] = [[0, 3, 5], [3, 1, 4], [5, 4, 2], [3, 4, 5]];
        const REF: [[f64; 2]; 6] = super::element::REFERENCE_NODES;
        let mut elements = Vec::with_capacity(4 * self.elements.len());
        for (e, el) in self.elements.iter().enumerate() {
            let coords = self.element_coords(e);
            for child in CHILDREN {
                let g = child.map(|l| el[l]);
                let mut mid = |i: usize, j: usize, nodes: &mut Vec<Point>| -> usize {
                    *mids.entry(edge_key(g[i], g[j])).or_insert_with(|| {
                        let (ri, rj) = (REF[child[i]], REF[child[j]]);
                        nodes.push(map_position(&coords, 0.5 * (ri[0] + rj[0]), 0.5 * (ri[1] + rj[1])));
                        nodes.len() - 1
                    })
                };
                let m01 = mid(0, 1, &mut nodes);
                let m12 = mid(1, 2, &mut nodes);
                let m20 = mid(2, 0, &mut nodes);
                elements.push([g[0], g[1], g[2], m01, m12, m20]);
            }
        }
        Mesh {
            nodes,
            elements,
            boundary,
            section: self.section.clone(),
            focus: self.focus,
            refinement: self.refinement,
            level: self.level + 1,
        }
    }

    /// Writes nodes (with optional displacements) and element connectivity
    /// in the plain-text nodal format described in `docs/nodal-format.md`.
    pub fn write_nodal_text<W: Write>(&self, displacement: Option<&[f64]>, mut w: W) -> io::Result<()> {
        writeln!(w, "# wgnoise nodal field v1")?;
        writeln!(w, "# shape {} R {:e}", self.section.geometry.shape_name(), self.section.geometry.radius)?;
        writeln!(w, "nodes {}", self.nodes.len())?;
        for (i, p) in self.nodes.iter().enumerate() {
            match displacement {
                Some(u) => writeln!(w, "{i} {:.9e} {:.9e} {:.9e} {:.9e}", p[0], p[1], u[2 * i], u[2 * i + 1])?,
                None => writeln!(w, "{i} {:.9e} {:.9e}", p[0], p[1])?,
            }
        }
        writeln!(w, "elements {}", self.elements.len())?;
        for (i, el) in self.elements.iter().enumerate() {
            writeln!(w, "{i} {} {} {} {} {} {}", el[0], el[1], el[2], el[3], el[4], el[5])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{estimate_fundamental_mode, ModeSource, Polarization};
    use approx::assert_relative_eq;

    fn sphere_mode(r: f64) -> (ResonatorGeometry, ModeProfile) {
        let g = ResonatorGeometry::sphere(r).unwrap();
        let p = estimate_fundamental_mode(&g, 1.565e-6, 1.43).unwrap();
        (g, p)
    }

    fn disk_mode() -> (ResonatorGeometry, ModeProfile) {
        let g = ResonatorGeometry::disk(1e-3, 0.15e-3, None).unwrap();
        let p = ModeProfile {
            frequency: 1.9152e14,
            azimuthal_index: 5706,
            w_z: 8.2e-6,
            w_rho: 2.5e-6,
            rho0: 0.9975e-3,
            wavelength: 1.5653e-6,
            polarization: Polarization::Te,
            source: ModeSource::Supplied,
        };
        (g, p)
    }

    #[test]
    fn sphere_area_and_mode_region_size() {
        let (g, p) = sphere_mode(1e-3);
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        assert_relative_eq!(mesh.area(), std::f64::consts::PI * 1e-6 / 4.0, max_relative = 1e-6);
        let h = mesh.mode_region_max_edge().unwrap();
        assert!(h <= 0.6e-6, "mode-region edge {h:e}");
        assert!(h <= p.w_rho.min(p.w_z) / 4.0);
        assert!(mesh.min_angle_degrees() > 20.0, "min angle {}", mesh.min_angle_degrees());
    }

    #[test]
    fn halving_size_quadruples_elements() {
        let g = ResonatorGeometry::sphere(1e-3).unwrap();
        let base = RefinementDescriptor::default();
        let coarse = build_mesh(&g, None, &base).unwrap().element_count() as f64;
        let fine = build_mesh(&g, None, &base.scaled(0.25)).unwrap().element_count() as f64;
        let finer = build_mesh(&g, None, &base.scaled(0.125)).unwrap().element_count() as f64;
        let ratio = finer / fine;
        assert!(ratio > 3.0 && ratio < 5.0, "ratio {ratio} (coarse {coarse}, fine {fine})");
    }

    #[test]
    fn disk_boundary_follows_profile() {
        let (g, p) = disk_mode();
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        let err = mesh.surface_chord_error();
        assert!(err < 10e-9, "chord error {err:e}");
        assert!(mesh.mode_region_max_edge().unwrap() <= p.w_rho / 4.0);
    }

    #[test]
    fn uniform_refinement_is_conforming() {
        let (g, p) = disk_mode();
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        let fine = mesh.refine_uniform();
        assert_eq!(fine.element_count(), 4 * mesh.element_count());
        assert_eq!(fine.boundary.len(), 2 * mesh.boundary.len());
        assert_relative_eq!(fine.area(), mesh.area(), max_relative = 1e-6);
        // every interior edge is shared by exactly two elements
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for el in &fine.elements {
            for (a, b) in [(el[0], el[1]), (el[1], el[2]), (el[2], el[0])] {
                *count.entry(edge_key(a, b)).or_default() += 1;
            }
        }
        let boundary: usize = count.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary, fine.boundary.len());
        assert!(count.values().all(|&c| c <= 2));
        assert!(fine.surface_chord_error() < mesh.surface_chord_error() + 1e-15);
    }

    #[test]
    fn large_and_thin_geometries_mesh() {
        let (g, p) = sphere_mode(1e-2);
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        assert!(mesh.mode_region_max_edge().unwrap() <= p.w_rho / 4.0);
        let g = ResonatorGeometry::disk(1e-2, 0.15e-3, None).unwrap();
        let p = ModeProfile { w_z: 14.1e-6, w_rho: 5.3e-6, rho0: 1e-2 - 5.3e-6, ..disk_mode().1 };
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        assert!(mesh.min_jacobian_ratio() > 0.5);
        let expected_area = {
            let s = &mesh.section;
            // rectangle to the rim-top plus the arc segment region, by fine quadrature of the boundary
            let mut a = 0.0;
            for (curve, _) in &s.pieces {
                let n = 20000;
                for k in 0..n {
                    let p0 = curve.point_at(k as f64 / n as f64);
                    let p1 = curve.point_at((k + 1) as f64 / n as f64);
                    a += 0.5 * (p0[0] * p1[1] - p1[0] * p0[1]);
                }
            }
            a
        };
        assert_relative_eq!(mesh.area(), expected_area, max_relative = 1e-6);
    }

    #[test]
    fn budget_is_enforced() {
        let (g, p) = sphere_mode(1e-3);
        let tiny = RefinementDescriptor { max_nodes: 100, ..Default::default() };
        assert!(matches!(build_mesh(&g, Some(&p), &tiny), Err(MeshError::BudgetExceeded { .. })));
    }

    #[test]
    fn nodal_export_format() {
        let g = ResonatorGeometry::sphere(1.0).unwrap();
        let mesh = build_mesh(&g, None, &RefinementDescriptor::default()).unwrap();
        let mut out = Vec::new();
        mesh.write_nodal_text(None, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains(&format!("nodes {}", mesh.node_count())));
        assert!(text.contains(&format!("elements {}", mesh.element_count())));
        assert_eq!(text.lines().count(), 4 + mesh.node_count() + mesh.element_count());
    }
}
