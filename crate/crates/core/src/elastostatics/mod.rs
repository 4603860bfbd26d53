//! Axisymmetric linear elastostatics with quadratic triangles.

pub mod analytic;
pub mod element;
pub mod loads;
pub mod mesh;
pub mod section;
pub mod solver;

pub use analytic::{
    analytic_tube_energy, analytic_uniform_sphere_energy, lame_sphere_strain_energy, uniform_sphere_force, TubeSolution,
};
pub use loads::{
    bb_force_analytic, bb_surface_load, eo_volumetric_load, uniform_pressure_load, AppliedLoad, LoadError, LoadKind,
    LoadSpec,
};
pub use mesh::{build_mesh, BoundaryEdge, FocusBox, Mesh, MeshError, RefinementDescriptor};
pub use section::{BoundaryKind, Curve, Section};
pub use solver::{
    solve_once, solve_static, Constraints, LevelRecord, LinearSolver, SingleSolve, SolveError, SolveSettings,
    StrainEnergyResult,
};
