//! Closed-form strain energies used as oracles for the finite-element path.

use std::f64::consts::PI;

/// `(4 pi / 3) P^2 R^3 / kappa`, the pressure work P dV on a sphere under
/// uniform pressure `p`.
pub fn analytic_uniform_sphere_energy(p: f64, radius: f64, kappa: f64) -> f64 {
    4.0 * PI / 3.0 * p * p * radius.powi(3) / kappa
}

/// Stored strain energy of the Lame solution for a sphere under uniform
/// pressure: half the pressure work, `(2 pi / 3) P^2 R^3 / kappa`.
pub fn lame_sphere_strain_energy(p: f64, radius: f64, kappa: f64) -> f64 {
    0.5 * analytic_uniform_sphere_energy(p, radius, kappa)
}

/// Total normal force on a sphere under uniform pressure, `4 pi R^2 P`.
pub fn uniform_sphere_force(p: f64, radius: f64) -> f64 {
    4.0 * PI * radius * radius * p
}

/// Plane-strain solution for a torus tube of minor radius `r` and major
/// radius `big_r` pinched by uniform pressure `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSolution {
    pub energy: f64,
    pub force: f64,
    pub sigma_rr: f64,
    pub sigma_thetatheta: f64,
    pub sigma_zz: f64,
}

pub fn analytic_tube_energy(p: f64, r: f64, big_r: f64, kappa: f64, shear: f64, poisson: f64) -> TubeSolution {
    TubeSolution {
        energy: PI * PI * r * r * big_r * p * p * 3.0 / (3.0 * kappa + shear),
        force: (2.0 * PI).powi(2) * r * big_r * p,
        sigma_rr: -p,
        sigma_thetatheta: -p,
        sigma_zz: -2.0 * poisson * p,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_values() {
        // 4.18879 * 1e12 * 1e-9 / 9e10
        assert_relative_eq!(analytic_uniform_sphere_energy(1e6, 1e-3, 90e9), 4.6542e-8, max_relative = 1e-4);
        assert_relative_eq!(
            analytic_uniform_sphere_energy(1e6, 2e-3, 90e9),
            8.0 * analytic_uniform_sphere_energy(1e6, 1e-3, 90e9),
            max_relative = 1e-14
        );
        assert_relative_eq!(uniform_sphere_force(1e6, 1e-3), 12.566, max_relative = 1e-4);
    }

    #[test]
    fn tube_values_and_limits() {
        let t = analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 45e9, 0.3);
        let hand = PI * PI * 5.81e-6f64.powi(2) * 1e-3 * 1e12 * (3.0 / 3.15e11);
        assert_relative_eq!(t.energy, hand, max_relative = 1e-14);
        let t2 = analytic_tube_energy(2e6, 5.81e-6, 1e-3, 90e9, 45e9, 0.3);
        assert_relative_eq!(t2.force, 2.0 * t.force, max_relative = 1e-14);
        assert_relative_eq!(t2.energy, 4.0 * t.energy, max_relative = 1e-14);
        let g0 = analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 0.0, 0.3);
        assert_relative_eq!(g0.energy, PI * PI * 5.81e-6f64.powi(2) * 1e-3 * 1e12 / 90e9, max_relative = 1e-14);
        assert_eq!(t.sigma_zz, -0.6e6);
    }
}
