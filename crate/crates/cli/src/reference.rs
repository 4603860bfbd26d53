//! Published CaF2 reference data: mode parameters, energy/force
//! tables and the summary noise table.

use wgnoise::constants::SPEED_OF_LIGHT;
use wgnoise::modes::{
    azimuthal_index_for, ModeError, Polarization, ResonatorGeometry, Shape, SuppliedMode,
};

const MM: f64 = 1e-3;
const UM: f64 = 1e-6;

/// Tabulated fundamental-mode parameters of one resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableMode {
    pub radius: f64,
    /// Rim curvature; `None` for spheres.
    pub curvature: Option<f64>,
    /// Missing in the source for the largest sphere.
    pub azimuthal_index: Option<u64>,
    pub frequency: f64,
    pub w_z: f64,
    pub w_rho: f64,
    /// Spheres use the tabulated centre; disks use R - w_rho.
    pub rho0: f64,
}

pub const TABLE_MODES: [TableMode; 9] = [
    TableMode { radius: 0.1 * MM, curvature: None, azimuthal_index: Some(559), frequency: 1.9164e14, w_z: 4.25 * UM, w_rho: 1.1 * UM, rho0: 0.0986 * MM },
    TableMode { radius: 1.0 * MM, curvature: None, azimuthal_index: Some(5706), frequency: 1.9152e14, w_z: 13.5 * UM, w_rho: 2.5 * UM, rho0: 0.996 * MM },
    TableMode { radius: 10.0 * MM, curvature: None, azimuthal_index: None, frequency: 1.9149e14, w_z: 42.0 * UM, w_rho: 5.0 * UM, rho0: 9.99 * MM },
    TableMode { radius: 0.1 * MM, curvature: Some(0.15 * MM), azimuthal_index: Some(559), frequency: 1.9156e14, w_z: 4.6 * UM, w_rho: 1.1 * UM, rho0: 0.1 * MM - 1.1 * UM },
    TableMode { radius: 1.0 * MM, curvature: Some(0.15 * MM), azimuthal_index: Some(5706), frequency: 1.9152e14, w_z: 8.2 * UM, w_rho: 2.5 * UM, rho0: 1.0 * MM - 2.5 * UM },
    TableMode { radius: 10.0 * MM, curvature: Some(0.15 * MM), azimuthal_index: Some(57320), frequency: 1.9151e14, w_z: 14.1 * UM, w_rho: 5.3 * UM, rho0: 10.0 * MM - 5.3 * UM },
    TableMode { radius: 1.0 * MM, curvature: Some(0.1 * MM), azimuthal_index: Some(5707), frequency: 1.9151e14, w_z: 6.7 * UM, w_rho: 2.5 * UM, rho0: 1.0 * MM - 2.5 * UM },
    TableMode { radius: 1.0 * MM, curvature: Some(1.0 * MM), azimuthal_index: Some(5707), frequency: 1.9151e14, w_z: 11.3 * UM, w_rho: 2.5 * UM, rho0: 1.0 * MM - 2.5 * UM },
    TableMode { radius: 1.0 * MM, curvature: Some(10.0 * MM), azimuthal_index: Some(5708), frequency: 1.9155e14, w_z: 13.0 * UM, w_rho: 2.5 * UM, rho0: 1.0 * MM - 2.5 * UM },
];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// Tabulated mode for a geometry, matched on R and (for disks) S.
pub fn table_mode(geom: &ResonatorGeometry) -> Option<&'static TableMode> {
    TABLE_MODES.iter().find(|t| {
        close(t.radius, geom.radius)
            && match (geom.shape, t.curvature) {
                (Shape::Sphere, None) => true,
                (Shape::Disk { curvature, .. }, Some(s)) => close(curvature, s),
                _ => false,
            }
    })
}

impl TableMode {
    pub fn geometry(&self) -> Result<ResonatorGeometry, ModeError> {
        match self.curvature {
            None => ResonatorGeometry::sphere(self.radius),
            Some(s) => ResonatorGeometry::disk(self.radius, s, None),
        }
    }

    /// Supplied-mode parameters; a missing index is filled from the
    /// dispersion relation at the tabulated frequency.
    pub fn supplied(&self, n: f64) -> SuppliedMode {
        let m = self
            .azimuthal_index
            .unwrap_or_else(|| azimuthal_index_for(self.frequency, self.radius, n, Polarization::Te));
        SuppliedMode {
            frequency: self.frequency,
            azimuthal_index: m,
            w_z: self.w_z,
            w_rho: self.w_rho,
            rho0: self.rho0,
            wavelength: SPEED_OF_LIGHT / self.frequency,
        }
    }

    pub fn label(&self) -> String {
        match self.curvature {
            None => format!("sphere R={} mm", self.radius / MM),
            Some(s) => format!("disk R={} mm S={} mm", self.radius / MM, s / MM),
        }
    }
}

/// One row of the energy/force tables, values as printed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyForceRow {
    pub label: &'static str,
    pub energy: &'static str,
    pub force: &'static str,
    /// Coordinate normaliser: R for BB rows, sqrt(w_z w_rho) for EO rows.
    pub x: Normaliser,
    pub sigma: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normaliser {
    /// Major radius in metres (exact).
    Radius(f64),
    /// Printed widths (w_z, w_rho) in micrometres.
    Widths(&'static str, &'static str),
}

/// Temperature and loss angle of the energy/force tables.
pub const TABLE_TEMPERATURE: f64 = 5.5;
pub const TABLE_LOSS_ANGLE: f64 = 2e-8;

pub const BB_ROWS: [EnergyForceRow; 9] = [
    EnergyForceRow { label: "BB sphere 0.1", energy: "3.2e-13", force: "0.0047", x: Normaliser::Radius(0.1 * MM), sigma: "2.0e-15" },
    EnergyForceRow { label: "BB sphere 1", energy: "4.4e-11", force: "0.15", x: Normaliser::Radius(1.0 * MM), sigma: "7.2e-17" },
    EnergyForceRow { label: "BB sphere 10", energy: "5.3e-9", force: "4.7", x: Normaliser::Radius(10.0 * MM), sigma: "2.6e-18" },
    EnergyForceRow { label: "BB disk 0.1, 0.15", energy: "3.8e-13", force: "0.0051", x: Normaliser::Radius(0.1 * MM), sigma: "2.0e-15" },
    EnergyForceRow { label: "BB disk 1, 0.15", energy: "1.9e-11", force: "0.091", x: Normaliser::Radius(1.0 * MM), sigma: "7.7e-17" },
    EnergyForceRow { label: "BB disk 10, 0.15", energy: "1.8e-9", force: "1.6", x: Normaliser::Radius(10.0 * MM), sigma: "4.5e-18" },
    EnergyForceRow { label: "BB disk 1, 0.1", energy: "1.3e-11", force: "0.075", x: Normaliser::Radius(1.0 * MM), sigma: "7.9e-17" },
    EnergyForceRow { label: "BB disk 1, 1", energy: "3.3e-11", force: "0.13", x: Normaliser::Radius(1.0 * MM), sigma: "7.5e-17" },
    EnergyForceRow { label: "BB disk 1, 10", energy: "4.2e-11", force: "0.14", x: Normaliser::Radius(1.0 * MM), sigma: "7.3e-17" },
];

pub const EO_ROWS: [EnergyForceRow; 9] = [
    EnergyForceRow { label: "EO sphere 0.1", energy: "7.1e-14", force: "0.0088", x: Normaliser::Widths("4.25", "1.1"), sigma: "2.3e-14" },
    EnergyForceRow { label: "EO sphere 1", energy: "4.6e-11", force: "0.65", x: Normaliser::Widths("13.5", "2.5"), sigma: "2.9e-15" },
    EnergyForceRow { label: "EO sphere 10", energy: "2.3e-8", force: "41", x: Normaliser::Widths("42.0", "5.0"), sigma: "4.2e-16" },
    EnergyForceRow { label: "EO disk 0.1, 0.15", energy: "8.8e-14", force: "0.0094", x: Normaliser::Widths("4.6", "1.1"), sigma: "2.3e-14" },
    EnergyForceRow { label: "EO disk 1, 0.15", energy: "1.2e-11", force: "0.39", x: Normaliser::Widths("8.2", "2.5"), sigma: "3.3e-15" },
    EnergyForceRow { label: "EO disk 10, 0.15", energy: "1.5e-9", force: "14", x: Normaliser::Widths("14.1", "5.3"), sigma: "5.2e-16" },
    EnergyForceRow { label: "EO disk 1, 0.1", energy: "6.7e-12", force: "0.31", x: Normaliser::Widths("6.7", "2.5"), sigma: "3.3e-15" },
    EnergyForceRow { label: "EO disk 1, 1", energy: "2.9e-11", force: "0.53", x: Normaliser::Widths("11.3", "2.5"), sigma: "3.1e-15" },
    EnergyForceRow { label: "EO disk 1, 10", energy: "4.2e-11", force: "0.61", x: Normaliser::Widths("13.0", "2.5"), sigma: "3.0e-15" },
];

/// A printed decimal and half a unit in its last place.
pub fn parse_rounded(text: &str) -> (f64, f64) {
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().expect("exponent")),
        None => (text, 0),
    };
    let decimals = mantissa.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
    let value: f64 = text.parse().expect("number");
    (value, 0.5 * 10f64.powi(exponent - decimals))
}

impl EnergyForceRow {
    /// Normaliser value and its (lower, upper) bounds from printed rounding.
    pub fn x_bounds(&self) -> (f64, f64, f64) {
        match self.x {
            Normaliser::Radius(r) => (r, r, r),
            Normaliser::Widths(wz, wr) => {
                let (a, da) = parse_rounded(wz);
                let (b, db) = parse_rounded(wr);
                (
                    (a * b).sqrt() * UM,
                    ((a - da) * (b - db)).sqrt() * UM,
                    ((a + da) * (b + db)).sqrt() * UM,
                )
            }
        }
    }
}

/// One row of the summary table of Allan deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub mode: &'static TableMode,
    pub sigma_bb_rt: f64,
    pub sigma_eo_rt: f64,
    pub sigma_bb_5k: f64,
    pub sigma_eo_5k: f64,
}

/// Room temperature of the summary table, K.
pub const ROOM_TEMPERATURE: f64 = 300.0;
/// Cryogenic temperature of the summary table, K.
pub const CRYO_TEMPERATURE: f64 = 5.0;

pub const SUMMARY_ROWS: [SummaryRow; 9] = [
    SummaryRow { mode: &TABLE_MODES[0], sigma_bb_rt: 2e-14, sigma_eo_rt: 9e-14, sigma_bb_5k: 2e-15, sigma_eo_5k: 8e-15 },
    SummaryRow { mode: &TABLE_MODES[1], sigma_bb_rt: 8e-16, sigma_eo_rt: 1e-14, sigma_bb_5k: 7e-17, sigma_eo_5k: 1e-15 },
    SummaryRow { mode: &TABLE_MODES[2], sigma_bb_rt: 3e-17, sigma_eo_rt: 2e-15, sigma_bb_5k: 3e-18, sigma_eo_5k: 1e-16 },
    SummaryRow { mode: &TABLE_MODES[3], sigma_bb_rt: 2e-14, sigma_eo_rt: 9e-14, sigma_bb_5k: 2e-15, sigma_eo_5k: 8e-15 },
    SummaryRow { mode: &TABLE_MODES[4], sigma_bb_rt: 9e-16, sigma_eo_rt: 1e-14, sigma_bb_5k: 8e-17, sigma_eo_5k: 1e-15 },
    SummaryRow { mode: &TABLE_MODES[5], sigma_bb_rt: 5e-17, sigma_eo_rt: 2e-15, sigma_bb_5k: 4e-18, sigma_eo_5k: 2e-16 },
    SummaryRow { mode: &TABLE_MODES[6], sigma_bb_rt: 9e-16, sigma_eo_rt: 1e-14, sigma_bb_5k: 8e-17, sigma_eo_5k: 1e-15 },
    SummaryRow { mode: &TABLE_MODES[7], sigma_bb_rt: 9e-16, sigma_eo_rt: 1e-14, sigma_bb_5k: 8e-17, sigma_eo_5k: 1e-15 },
    SummaryRow { mode: &TABLE_MODES[8], sigma_bb_rt: 9e-16, sigma_eo_rt: 1e-14, sigma_bb_5k: 7e-17, sigma_eo_5k: 1e-15 },
];

#[cfg(test)]
mod tests {
    use super::*;
    use wgnoise::modes::mode_from_parameters;

    #[test]
    fn rounding_intervals() {
        assert_eq!(parse_rounded("0.0047"), (0.0047, 0.5e-4));
        let (v, h) = parse_rounded("4.4e-11");
        assert_eq!(v, 4.4e-11);
        assert!((h - 0.05e-11).abs() < 1e-27);
        assert_eq!(parse_rounded("41"), (41.0, 0.5));
    }

    #[test]
    fn all_table_modes_validate() {
        for t in &TABLE_MODES {
            let g = t.geometry().unwrap();
            assert_eq!(table_mode(&g).unwrap(), t);
            mode_from_parameters(&g, 1.43, t.supplied(1.43)).unwrap_or_else(|e| panic!("{}: {e}", t.label()));
        }
        // q + 2.338 (q/2)^(1/3) - n/sqrt(n^2-1) = 57390.67 at q = m + 1/2
        assert_eq!(TABLE_MODES[2].supplied(1.43).azimuthal_index, 57320);
    }
}
