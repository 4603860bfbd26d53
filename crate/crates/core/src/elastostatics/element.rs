//! Six-node (quadratic) axisymmetric triangle.
//!
//! Local node order: three corners, then the mid-side nodes of edges
//! (0,1), (1,2), (2,0). Degrees of freedom per node are (u_rho, u_z).
//! Strain vector order is (eps_rho, eps_z, eps_theta, gamma_rhoz).

use std::f64::consts::PI;

use crate::materials::IsotropicModuli;

use super::section::Point;

/// 7-point degree-5 rule on the reference triangle; weights sum to 1/2.
pub const TRIANGLE_RULE: [(f64, f64, f64); 7] = {
    const A1: f64 = 0.059715871789770;
    const B1: f64 = 0.470142064105115;
    const W1: f64 = 0.066197076394253;
    const A2: f64 = 0.797426985353087;
    const B2: f64 = 0.101286507323456;
    const W2: f64 = 0.062969590272414;
    [
        (1.0 / 3.0, 1.0 / 3.0, 0.1125),
        (B1, B1, W1),
        (A1, B1, W1),
        (B1, A1, W1),
        (B2, B2, W2),
        (A2, B2, W2),
        (B2, A2, W2),
    ]
};

/// 6-point Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
pub const LINE_RULE: [(f64, f64); 6] = {
    const X: [f64; 3] = [0.238619186083197, 0.661209386466265, 0.932469514203152];
    const W: [f64; 3] = [0.467913934572691, 0.360761573048139, 0.171324492379170];
    [
        (0.5 - 0.5 * X[2], 0.5 * W[2]),
        (0.5 - 0.5 * X[1], 0.5 * W[1]),
        (0.5 - 0.5 * X[0], 0.5 * W[0]),
        (0.5 + 0.5 * X[0], 0.5 * W[0]),
        (0.5 + 0.5 * X[1], 0.5 * W[1]),
        (0.5 + 0.5 * X[2], 0.5 * W[2]),
    ]
};

/// Reference coordinates of the six nodes.
pub const REFERENCE_NODES: [[f64; 2]; 6] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];

pub fn shape(xi: f64, eta: f64) -> [f64; 6] {
    let l1 = 1.0 - xi - eta;
    [
        l1 * (2.0 * l1 - 1.0),
        xi * (2.0 * xi - 1.0),
        eta * (2.0 * eta - 1.0),
        4.0 * l1 * xi,
        4.0 * xi * eta,
        4.0 * eta * l1,
    ]
}

/// Derivatives with respect to (xi, eta).
pub fn shape_gradients(xi: f64, eta: f64) -> [[f64; 2]; 6] {
    let l1 = 1.0 - xi - eta;
    [
        [1.0 - 4.0 * l1, 1.0 - 4.0 * l1],
        [4.0 * xi - 1.0, 0.0],
        [0.0, 4.0 * eta - 1.0],
        [4.0 * (l1 - xi), -4.0 * xi],
        [4.0 * eta, 4.0 * xi],
        [-4.0 * eta, 4.0 * (l1 - eta)],
    ]
}

/// Shape functions of a 3-node edge (ends, then middle) at t in [0, 1].
pub fn edge_shape(t: f64) -> [f64; 3] {
    [(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)]
}

pub fn edge_shape_derivative(t: f64) -> [f64; 3] {
    [4.0 * t - 3.0, 4.0 * t - 1.0, 4.0 - 8.0 * t]
}

/// Isoparametric map evaluated at a reference point.
#[derive(Debug, Clone, Copy)]
pub struct MappedPoint {
    pub x: Point,
    pub n: [f64; 6],
    /// Physical gradients d N / d(rho, z).
    pub grad: [[f64; 2]; 6],
    pub det_j: f64,
}

pub fn map_point(coords: &[Point; 6], xi: f64, eta: f64) -> MappedPoint {
    let n = shape(xi, eta);
    let dn = shape_gradients(xi, eta);
    let mut x = [0.0; 2];
    let mut j = [[0.0; 2]; 2];
    for a in 0..6 {
        for d in 0..2 {
            x[d] += n[a] * coords[a][d];
            j[d][0] += dn[a][0] * coords[a][d];
            j[d][1] += dn[a][1] * coords[a][d];
        }
    }
    // j[d][k] = d x_d / d ref_k
    let det_j = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    let inv = [[j[1][1] / det_j, -j[0][1] / det_j], [-j[1][0] / det_j, j[0][0] / det_j]];
    let mut grad = [[0.0; 2]; 6];
    for a in 0..6 {
        // dN/dx_d = sum_k dN/dref_k * dref_k/dx_d
        grad[a][0] = dn[a][0] * inv[0][0] + dn[a][1] * inv[1][0];
        grad[a][1] = dn[a][0] * inv[0][1] + dn[a][1] * inv[1][1];
    }
    MappedPoint { x, n, grad, det_j }
}

/// Physical position of a reference point.
pub fn map_position(coords: &[Point; 6], xi: f64, eta: f64) -> Point {
    let n = shape(xi, eta);
    let mut x = [0.0; 2];
    for a in 0..6 {
        x[0] += n[a] * coords[a][0];
        x[1] += n[a] * coords[a][1];
    }
    x
}

/// Isotropic constitutive matrix in (rho, z, theta, rho-z) strain order.
pub fn constitutive(moduli: &IsotropicModuli) -> [[f64; 4]; 4] {
    let l = moduli.lame_lambda();
    let g = moduli.shear;
    let d = l + 2.0 * g;
    [[d, l, l, 0.0], [l, d, l, 0.0], [l, l, d, 0.0], [0.0, 0.0, 0.0, g]]
}

/// Strain-displacement rows for node `a`: columns (u_rho, u_z).
fn b_columns(p: &MappedPoint, a: usize) -> [[f64; 2]; 4] {
    let [dr, dz] = p.grad[a];
    [[dr, 0.0], [0.0, dz], [p.n[a] / p.x[0], 0.0], [dz, dr]]
}

/// Element stiffness (12 x 12, row-major) including the 2 pi rho revolution factor.
pub fn stiffness(coords: &[Point; 6], d: &[[f64; 4]; 4]) -> [f64; 144] {
    let mut k = [0.0; 144];
    for &(xi, eta, w) in &TRIANGLE_RULE {
        let p = map_point(coords, xi, eta);
        let scale = w * p.det_j * 2.0 * PI * p.x[0];
        let b: [[[f64; 2]; 4]; 6] = std::array::from_fn(|a| b_columns(&p, a));
        // db[a] = D * B_a
        let mut db = [[[0.0; 2]; 4]; 6];
        for a in 0..6 {
            for i in 0..4 {
                for c in 0..2 {
                    let mut s = 0.0;
                    for j in 0..4 {
                        s += d[i][j] * b[a][j][c];
                    }
                    db[a][i][c] = s;
                }
            }
        }
        for a in 0..6 {
            for ca in 0..2 {
                let row = 2 * a + ca;
                for bn in 0..6 {
                    for cb in 0..2 {
                        let col = 2 * bn + cb;
                        let mut s = 0.0;
                        for i in 0..4 {
                            s += b[a][i][ca] * db[bn][i][cb];
                        }
                        k[row * 12 + col] += scale * s;
                    }
                }
            }
        }
    }
    k
}

/// Strain at a reference point from element nodal displacements (u_rho, u_z per node).
pub fn strain(coords: &[Point; 6], u: &[f64; 12], xi: f64, eta: f64) -> [f64; 4] {
    let p = map_point(coords, xi, eta);
    let mut e = [0.0; 4];
    for a in 0..6 {
        let b = b_columns(&p, a);
        for i in 0..4 {
            e[i] += b[i][0] * u[2 * a] + b[i][1] * u[2 * a + 1];
        }
    }
    e
}
