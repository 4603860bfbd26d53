//! Assembly and solution of the axisymmetric static problem.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, SymbolicSparseColMat};
use faer::{Mat, Side};
use rayon::prelude::*;
use thiserror::Error;

use crate::materials::IsotropicModuli;

use super::element::{constitutive, stiffness};
use super::loads::LoadSpec;
use super::mesh::{Mesh, MeshError};
use super::section::BoundaryKind;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("refinement did not converge: estimated relative error {estimate:e} above tolerance {tolerance:e} after {levels} levels")]
    NonConvergent { estimate: f64, tolerance: f64, levels: usize, energy: f64 },
    #[error("linear solver failed: {0}")]
    SolverFailure(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Kinematic constraints of the half-section model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Constraints {
    /// u_z = 0 on the equatorial plane.
    pub symmetry_plane: bool,
    /// u_rho = 0 on the rotation axis.
    pub axis: bool,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints { symmetry_plane: true, axis: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinearSolver {
    /// Sparse Cholesky factorisation.
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Iterative { relative_tolerance: f64, max_iterations: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveSettings {
    /// Target relative discretisation error of U.
    pub tolerance: f64,
    /// Maximum number of uniform refinements beyond the input mesh.
    pub max_refinements: u32,
    pub solver: LinearSolver,
    pub constraints: Constraints,
}

impl Default for SolveSettings {
    fn default() -> Self {
        SolveSettings { tolerance: 5e-3, max_refinements: 3, solver: LinearSolver::Direct, constraints: Constraints::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelRecord {
    pub level: u32,
    pub dofs: usize,
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct StrainEnergyResult {
    /// Strain energy of the full body, J.
    pub energy: f64,
    /// Conjugate force of the load, N.
    pub force: f64,
    pub dofs: usize,
    /// Relative residual of the finest solve.
    pub residual: f64,
    /// Richardson estimate of the relative error of `energy`.
    pub estimated_error: f64,
    /// Energies are non-decreasing over the last two levels.
    pub monotone: bool,
    pub levels: Vec<LevelRecord>,
    pub signed_integral: Option<f64>,
    pub warnings: Vec<String>,
}

impl StrainEnergyResult {
    /// U / F^2, independent of load amplitude.
    pub fn compliance_ratio(&self) -> f64 {
        self.energy / (self.force * self.force)
    }
}

/// Equation numbering of the unconstrained degrees of freedom.
#[derive(Debug, Clone)]
pub struct DofMap {
    /// Equation index of dof `2 * node + component`.
    pub equation: Vec<Option<usize>>,
    pub count: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, constraints: Constraints) -> Result<DofMap, SolveError> {
        if !constraints.symmetry_plane {
            return Err(SolveError::SingularSystem(
                "no constraint removes the axial rigid-body translation; enable the symmetry-plane constraint".into(),
            ));
        }
        let mut fixed = vec![false; 2 * mesh.node_count()];
        for edge in &mesh.boundary {
            let component = match edge.kind {
                BoundaryKind::Symmetry => 1,
                BoundaryKind::Axis if constraints.axis => 0,
                _ => continue,
            };
            for n in edge.nodes {
                fixed[2 * n + component] = true;
            }
        }
        let mut count = 0;
        let equation = fixed
            .iter()
            .map(|&f| {
                (!f).then(|| {
                    count += 1;
                    count - 1
                })
            })
            .collect();
        Ok(DofMap { equation, count })
    }
}

/// Lower triangle of the global stiffness matrix in compressed-column form.
#[derive(Debug, Clone)]
pub struct Stiffness {
    pub n: usize,
    pub col_ptr: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub values: Vec<f64>,
}

const ASSEMBLY_CHUNK: usize = 4096;

impl Stiffness {
    /// Element matrices are computed in parallel and scattered in element
    /// order, so the result is bitwise independent of the thread count.
    pub fn assemble(mesh: &Mesh, moduli: &IsotropicModuli, dofs: &DofMap) -> Stiffness {
        let n = dofs.count;
        let element_eqs = |el: &[usize; 6]| -> [Option<usize>; 12] {
            std::array::from_fn(|i| dofs.equation[2 * el[i / 2] + i % 2])
        };

        // sparsity pattern: lower triangle, sorted rows within each column
        let mut columns: Vec<Vec<usize>> = vec![Vec::new(); n];
        for el in &mesh.elements {
            let eqs = element_eqs(el);
            for &c in eqs.iter().flatten() {
                for &r in eqs.iter().flatten() {
                    if r >= c {
                        columns[c].push(r);
                    }
                }
            }
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        col_ptr.push(0);
        let mut row_idx = Vec::new();
        for col in &mut columns {
            col.sort_unstable();
            col.dedup();
            row_idx.extend_from_slice(col);
            col_ptr.push(row_idx.len());
            *col = Vec::new();
        }
        drop(columns);

        let d = constitutive(moduli);
        let mut values = vec![0.0; row_idx.len()];
        for chunk in mesh.elements.chunks(ASSEMBLY_CHUNK).enumerate() {
            let (ci, els) = chunk;
            let matrices: Vec<[f64; 144]> = (0..els.len())
                .into_par_iter()
                .map(|i| stiffness(&mesh.element_coords(ci * ASSEMBLY_CHUNK + i), &d))
                .collect();
            for (el, k) in els.iter().zip(&matrices) {
                let eqs = element_eqs(el);
                for (b, cb) in eqs.iter().enumerate() {
                    let Some(c) = *cb else { continue };
                    let rows = &row_idx[col_ptr[c]..col_ptr[c + 1]];
                    for (a, ra) in eqs.iter().enumerate() {
                        let Some(r) = *ra else { continue };
                        if r < c {
                            continue;
                        }
                        let pos = rows.binary_search(&r).expect("entry in pattern");
                        values[col_ptr[c] + pos] += k[a * 12 + b];
                    }
                }
            }
        }
        Stiffness { n, col_ptr, row_idx, values }
    }

    /// y = K x using the symmetric lower-triangle storage.
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                let r = self.row_idx[k];
                let v = self.values[k];
                y[r] += v * x[c];
                if r != c {
                    y[c] += v * x[r];
                }
            }
        }
        y
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|c| self.values[self.col_ptr[c]]).collect()
    }

    pub fn solve_direct(&self, rhs: &[f64]) -> Result<Vec<f64>, SolveError> {
        let symbolic = SymbolicSparseColMat::<usize>::new_checked(
            self.n,
            self.n,
            self.col_ptr.clone(),
            None,
            self.row_idx.clone(),
        );
        let matrix = SparseColMat::<usize, f64>::new(symbolic, self.values.clone());
        let llt = matrix
            .sp_cholesky(Side::Lower)
            .map_err(|e| SolveError::SingularSystem(format!("Cholesky factorisation failed: {e:?}")))?;
        let mut x = Mat::<f64>::from_fn(self.n, 1, |i, _| rhs[i]);
        llt.solve_in_place(x.as_mut());
        let out: Vec<f64> = (0..self.n).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::SolverFailure("non-finite displacement".into()));
        }
        Ok(out)
    }

    pub fn solve_pcg(&self, rhs: &[f64], relative_tolerance: f64, max_iterations: usize) -> Result<Vec<f64>, SolveError> {
        let inv_diag: Vec<f64> = self.diagonal().iter().map(|d| 1.0 / d).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let norm_b = dot(rhs, rhs).sqrt();
        let mut x = vec![0.0; self.n];
        if norm_b == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.to_vec();
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..max_iterations {
            let q = self.mul(&p);
            let alpha = rz / dot(&p, &q);
            for i in 0..self.n {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if dot(&r, &r).sqrt() <= relative_tolerance * norm_b {
                return Ok(x);
            }
            for i in 0..self.n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..self.n {
                p[i] = z[i] + beta * p[i];
            }
        }
        Err(SolveError::SolverFailure(format!(
            "conjugate gradients did not reach {relative_tolerance:e} in {max_iterations} iterations (residual {:e})",
            dot(&r, &r).sqrt() / norm_b
        )))
    }

    pub fn relative_residual(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let kx = self.mul(x);
        let num: f64 = kx.iter().zip(rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let den: f64 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if den == 0.0 { 0.0 } else { num / den }
    }
}

/// Displacements and energy on a single mesh without refinement.
#[derive(Debug, Clone)]
pub struct SingleSolve {
    /// Nodal displacements, index `2 * node + component`.
    pub displacement: Vec<f64>,
    pub energy: f64,
    pub force: f64,
    pub dofs: usize,
    pub residual: f64,
    pub signed_integral: Option<f64>,
    pub warnings: Vec<String>,
}

pub fn solve_once(
    mesh: &Mesh,
    moduli: &IsotropicModuli,
    load: &LoadSpec,
    settings: &SolveSettings,
) -> Result<SingleSolve, SolveError> {
    let dofs = DofMap::new(mesh, settings.constraints)?;
    let applied = load.apply(mesh);
    let k = Stiffness::assemble(mesh, moduli, &dofs);
    let mut rhs = vec![0.0; dofs.count];
    for (g, eq) in dofs.equation.iter().enumerate() {
        if let Some(i) = eq {
            rhs[*i] = applied.forces[g];
        }
    }
    let x = match settings.solver {
        LinearSolver::Direct => k.solve_direct(&rhs)?,
        LinearSolver::Iterative { relative_tolerance, max_iterations } => {
            k.solve_pcg(&rhs, relative_tolerance, max_iterations)?
        }
    };
    let residual = k.relative_residual(&x, &rhs);
    // U = 2 * (1/2) f.u : the half-section work doubled for the full body
    let energy: f64 = rhs.iter().zip(&x).map(|(f, u)| f * u).sum();
    if !(energy > 0.0) {
        return Err(SolveError::SolverFailure(format!("non-positive strain energy {energy:e}")));
    }
    let mut displacement = vec![0.0; dofs.equation.len()];
    for (g, eq) in dofs.equation.iter().enumerate() {
        if let Some(i) = eq {
            displacement[g] = x[*i];
        }
    }
    Ok(SingleSolve {
        displacement,
        energy,
        force: applied.conjugate_force,
        dofs: dofs.count,
        residual,
        signed_integral: applied.signed_integral,
        warnings: applied.warnings,
    })
}

/// Richardson-style relative error estimate from two successive levels,
/// assuming at least second-order energy convergence.
pub fn richardson_estimate(coarse: f64, fine: f64) -> f64 {
    (fine - coarse).abs() / (3.0 * fine.abs())
}

/// Solves on `mesh`, then refines uniformly until two successive levels
/// agree within `settings.tolerance`. Reports the finest level.
pub fn solve_static(
    mesh: &Mesh,
    moduli: &IsotropicModuli,
    load: &LoadSpec,
    settings: &SolveSettings,
) -> Result<StrainEnergyResult, SolveError> {
    let mut current = mesh.clone();
    let mut solve = solve_once(&current, moduli, load, settings)?;
    let mut levels = vec![LevelRecord { level: current.level, dofs: solve.dofs, energy: solve.energy }];
    let mut estimate = f64::INFINITY;
    for _ in 0..settings.max_refinements {
        current = current.refine_uniform();
        solve = solve_once(&current, moduli, load, settings)?;
        levels.push(LevelRecord { level: current.level, dofs: solve.dofs, energy: solve.energy });
        let n = levels.len();
        estimate = richardson_estimate(levels[n - 2].energy, levels[n - 1].energy);
        if estimate <= settings.tolerance {
            break;
        }
    }
    if estimate > settings.tolerance {
        return Err(SolveError::NonConvergent {
            estimate,
            tolerance: settings.tolerance,
            levels: levels.len(),
            energy: solve.energy,
        });
    }
    let n = levels.len();
    let monotone = levels[n - 1].energy >= levels[n - 2].energy;
    Ok(StrainEnergyResult {
        energy: solve.energy,
        force: solve.force,
        dofs: solve.dofs,
        residual: solve.residual,
        estimated_error: estimate,
        monotone,
        levels,
        signed_integral: solve.signed_integral,
        warnings: solve.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elastostatics::loads::{bb_surface_load, uniform_pressure_load};
    use crate::elastostatics::mesh::{build_mesh, RefinementDescriptor};
    use crate::modes::{estimate_fundamental_mode, ResonatorGeometry};
    use approx::assert_relative_eq;

    fn moduli() -> IsotropicModuli {
        IsotropicModuli::new(90e9, 41.2e9).unwrap()
    }

    #[test]
    fn missing_symmetry_constraint_is_singular() {
        let g = ResonatorGeometry::sphere(1e-3).unwrap();
        let mesh = build_mesh(&g, None, &RefinementDescriptor::default()).unwrap();
        let settings = SolveSettings { constraints: Constraints { symmetry_plane: false, axis: true }, ..Default::default() };
        let r = solve_once(&mesh, &moduli(), &uniform_pressure_load(1e6).unwrap(), &settings);
        assert!(matches!(r, Err(SolveError::SingularSystem(_))));
    }

    #[test]
    fn direct_and_iterative_agree() {
        let g = ResonatorGeometry::sphere(1e-3).unwrap();
        let mesh = build_mesh(&g, None, &RefinementDescriptor::default()).unwrap();
        let load = uniform_pressure_load(1e6).unwrap();
        let direct = solve_once(&mesh, &moduli(), &load, &SolveSettings::default()).unwrap();
        let settings = SolveSettings {
            solver: LinearSolver::Iterative { relative_tolerance: 1e-12, max_iterations: 20_000 },
            ..Default::default()
        };
        let iterative = solve_once(&mesh, &moduli(), &load, &settings).unwrap();
        assert_relative_eq!(direct.energy, iterative.energy, max_relative = 1e-8);
        assert!(direct.residual < 1e-10);
    }

    #[test]
    fn uniform_pressure_energy_is_half_the_pressure_work() {
        // Lame solution: u_r = -P r / (3 kappa), so U = P dV / 2 = (2 pi / 3) P^2 R^3 / kappa
        let g = ResonatorGeometry::sphere(1e-3).unwrap();
        let mesh = build_mesh(&g, None, &RefinementDescriptor::default()).unwrap();
        let r = solve_static(&mesh, &moduli(), &uniform_pressure_load(1e6).unwrap(), &SolveSettings::default()).unwrap();
        let lame = 2.0 * std::f64::consts::PI / 3.0 * 1e12 * 1e-9 / 90e9;
        assert_relative_eq!(r.energy, lame, max_relative = 1e-4);
    }

    #[test]
    fn stiffness_is_symmetric_under_reciprocity() {
        let g = ResonatorGeometry::sphere(1e-3).unwrap();
        let p = estimate_fundamental_mode(&g, 1.565e-6, 1.43).unwrap();
        let mesh = build_mesh(&g, Some(&p), &RefinementDescriptor::default()).unwrap();
        let s = SolveSettings::default();
        let a = bb_surface_load(&p, 1e6).unwrap();
        let b = uniform_pressure_load(1e5).unwrap();
        let ua = solve_once(&mesh, &moduli(), &a, &s).unwrap().displacement;
        let ub = solve_once(&mesh, &moduli(), &b, &s).unwrap().displacement;
        let fa = a.apply(&mesh).forces;
        let fb = b.apply(&mesh).forces;
        let dofs = DofMap::new(&mesh, Constraints::default()).unwrap();
        let dot = |u: &[f64], f: &[f64]| -> f64 {
            (0..u.len()).filter(|&g| dofs.equation[g].is_some()).map(|g| u[g] * f[g]).sum()
        };
        assert_relative_eq!(dot(&ua, &fb), dot(&ub, &fa), max_relative = 1e-8);
    }
}
