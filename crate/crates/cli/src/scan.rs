//! Budget scans over (geometry, temperature, averaging time) cells.

use std::io::Write;

use rayon::prelude::*;

use wgnoise::materials::{IsotropicModuli, MaterialProperties, MaterialTable};
use wgnoise::modes::{estimate_fundamental_mode, mode_from_parameters, ModeProfile, ResonatorGeometry};
use wgnoise::noise::{EoMode, NoiseBudget};
use wgnoise::pipeline::{mechanical_response, MechanicalResponse, PipelineError};

use crate::config::{ModeSourceKind, ScanConfig, ScanGeometry};
use crate::reference::table_mode;

/// Temperature at which the refractive index for mode construction is read.
const MODE_TEMPERATURE: f64 = 300.0;

pub const CSV_HEADER: [&str; 17] = [
    "id", "shape", "R_m", "S_m", "T_K", "tau_s", "sigma_TR", "sigma_BB", "sigma_dr_r", "sigma_EO", "U_bb_J", "F_bb_N",
    "U_eo_J", "F_eo_N", "eo_mode", "gamma", "status",
];

/// Energy and conjugate force of one static solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadResult {
    pub energy: f64,
    pub force: f64,
}

/// One output row. `budget` is `None` when the cell failed; `status` then
/// holds the error code.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetRow {
    pub id: String,
    pub geometry: ResonatorGeometry,
    pub temperature: f64,
    pub tau: f64,
    pub budget: Option<NoiseBudget>,
    pub bb: Option<LoadResult>,
    pub eo: Option<LoadResult>,
    pub eo_mode: EoMode,
    pub gamma: f64,
    pub status: String,
    pub message: Option<String>,
}

impl BudgetRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Mode for a geometry under the configured source. Table lookups fall back
/// to the estimator for geometries without bundled parameters.
pub fn resolve_mode(
    geom: &ScanGeometry,
    source: ModeSourceKind,
    wavelength: f64,
    n: f64,
) -> Result<ModeProfile, String> {
    let estimate = || estimate_fundamental_mode(&geom.geometry, wavelength, n).map_err(|e| e.to_string());
    match source {
        ModeSourceKind::Estimate => estimate(),
        ModeSourceKind::Supplied => {
            let m = geom.mode.ok_or_else(|| format!("no supplied mode for {}", geom.id))?;
            mode_from_parameters(&geom.geometry, n, m).map_err(|e| e.to_string())
        }
        ModeSourceKind::Table => match (geom.mode, table_mode(&geom.geometry)) {
            (Some(m), _) => mode_from_parameters(&geom.geometry, n, m).map_err(|e| e.to_string()),
            (None, Some(t)) => mode_from_parameters(&geom.geometry, n, t.supplied(n)).map_err(|e| e.to_string()),
            (None, None) => estimate(),
        },
    }
}

struct Cell {
    geometry: usize,
    temperature: usize,
    props: Result<(MaterialProperties, IsotropicModuli), String>,
    job: Option<usize>,
}

fn same_moduli(a: &IsotropicModuli, b: &IsotropicModuli) -> bool {
    a.bulk.to_bits() == b.bulk.to_bits() && a.shear.to_bits() == b.shear.to_bits()
}

/// Runs every (geometry, T, tau) cell of the config. Rows come back in
/// geometry, then temperature, then tau order regardless of scheduling.
pub fn run_budget(config: &ScanConfig, material: &MaterialTable) -> Vec<BudgetRow> {
    let settings = &config.pipeline;
    let index = material
        .properties_at_with(MODE_TEMPERATURE, wgnoise::materials::Extrapolation::Clamp)
        .map(|p| p.refractive_index);
    let modes: Vec<Result<ModeProfile, String>> = config
        .geometries
        .iter()
        .map(|g| match &index {
            Ok(n) => resolve_mode(g, config.mode_source, config.wavelength, *n),
            Err(e) => Err(e.to_string()),
        })
        .collect();

    // one mechanical solve per distinct (geometry, moduli)
    let mut jobs: Vec<(usize, IsotropicModuli)> = Vec::new();
    let mut cells = Vec::new();
    for (gi, _) in config.geometries.iter().enumerate() {
        for (ti, &t) in config.temperatures.iter().enumerate() {
            let props = material
                .properties_at_with(t, config.extrapolation)
                .and_then(|p| material.moduli(&p).map(|m| (p, m)))
                .map_err(|e| e.to_string());
            let job = match (&props, &modes[gi]) {
                (Ok((_, m)), Ok(_)) => Some(
                    jobs.iter().position(|(g, jm)| *g == gi && same_moduli(jm, m)).unwrap_or_else(|| {
                        jobs.push((gi, *m));
                        jobs.len() - 1
                    }),
                ),
                _ => None,
            };
            cells.push(Cell { geometry: gi, temperature: ti, props, job });
        }
    }
    let responses: Vec<Result<MechanicalResponse, PipelineError>> = jobs
        .par_iter()
        .map(|(gi, m)| {
            let profile = modes[*gi].as_ref().expect("jobs only exist for resolved modes");
            mechanical_response(&config.geometries[*gi].geometry, profile, m, settings)
        })
        .collect();

    let mut rows = Vec::with_capacity(cells.len() * config.taus.len());
    for cell in &cells {
        let g = &config.geometries[cell.geometry];
        let t = config.temperatures[cell.temperature];
        for &tau in &config.taus {
            let mut row = BudgetRow {
                id: g.id.clone(),
                geometry: g.geometry,
                temperature: t,
                tau,
                budget: None,
                bb: None,
                eo: None,
                eo_mode: settings.eo_mode,
                gamma: settings.gamma,
                status: "ok".into(),
                message: None,
            };
            match (&modes[cell.geometry], &cell.props, cell.job.map(|j| &responses[j])) {
                (Err(e), _, _) => {
                    row.status = "mode_failed".into();
                    row.message = Some(e.clone());
                }
                (_, Err(e), _) => {
                    row.status = "material_failed".into();
                    row.message = Some(e.clone());
                }
                (_, _, Some(Err(e))) => {
                    row.status = e.code().into();
                    row.message = Some(e.to_string());
                }
                (Ok(_), Ok((props, _)), Some(Ok(resp))) => {
                    row.bb = Some(LoadResult { energy: resp.bb.energy, force: resp.bb.force });
                    row.eo = Some(LoadResult { energy: resp.eo.energy, force: resp.eo.force });
                    match resp.budget(&g.id, props, t, tau, settings) {
                        Ok(b) => row.budget = Some(b),
                        Err(e) => {
                            row.status = PipelineError::from(e).code().into();
                        }
                    }
                }
                (Ok(_), Ok(_), None) => unreachable!("a cell with mode and properties always has a job"),
            }
            rows.push(row);
        }
    }
    rows
}

/// Runs the scan on a pool of `threads` workers (0 selects the rayon default).
pub fn run_budget_with_threads(
    config: &ScanConfig,
    material: &MaterialTable,
    threads: usize,
) -> Result<Vec<BudgetRow>, rayon::ThreadPoolBuildError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| run_budget(config, material)))
}

pub fn fmt_num(v: f64) -> String {
    format!("{v:.5e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

/// Writes rows with the fixed column schema of [`CSV_HEADER`].
pub fn write_csv<W: Write>(rows: &[BudgetRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let b = r.budget.as_ref();
        w.write_record([
            r.id.clone(),
            r.geometry.shape_name().to_string(),
            fmt_num(r.geometry.radius),
            opt(r.geometry.curvature()),
            fmt_num(r.temperature),
            fmt_num(r.tau),
            opt(b.map(|b| b.sigma_tr)),
            opt(b.map(|b| b.sigma_bb)),
            opt(b.map(|b| b.sigma_dr_over_r)),
            opt(b.map(|b| b.sigma_eo)),
            opt(r.bb.map(|l| l.energy)),
            opt(r.bb.map(|l| l.force)),
            opt(r.eo.map(|l| l.energy)),
            opt(r.eo.map(|l| l.force)),
            r.eo_mode.as_str().to_string(),
            fmt_num(r.gamma),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
