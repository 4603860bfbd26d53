//! Plot-ready series: noise against temperature for the 1 mm sphere, and
//! disk noise against R and S.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use wgnoise::materials::MaterialTable;
use wgnoise::modes::ResonatorGeometry;

use crate::config::{ScanConfig, ScanGeometry};
use crate::reference::{CRYO_TEMPERATURE, ROOM_TEMPERATURE};
use crate::scan::{fmt_num, run_budget, BudgetRow};

const MM: f64 = 1e-3;

pub const TEMPERATURE_MIN: f64 = 5.5;
pub const TEMPERATURE_MAX: f64 = 300.0;
/// Temperature of the dn/dT sign change in the bundled CaF2 data.
pub const DN_DT_ZERO: f64 = 33.0;

/// Log-spaced temperatures over the plotted span, plus the dn/dT zero.
pub fn temperature_grid(points: usize) -> Vec<f64> {
    let (a, b) = (TEMPERATURE_MIN.ln(), TEMPERATURE_MAX.ln());
    let mut t: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    t[0] = TEMPERATURE_MIN;
    t[points - 1] = TEMPERATURE_MAX;
    t.push(DN_DT_ZERO);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

fn geometry(id: &str, g: ResonatorGeometry) -> ScanGeometry {
    ScanGeometry { id: id.into(), geometry: g, mode: None }
}

/// Temperature series for the 1 mm sphere at tau = 1 s.
pub fn fig2_config(base: &ScanConfig) -> ScanConfig {
    let mut c = base.clone();
    c.geometries = vec![geometry("sphere-R1mm", ResonatorGeometry::sphere(MM).expect("valid sphere"))];
    c.temperatures = temperature_grid(60);
    c.taus = vec![1.0];
    c
}

/// Disks at S = 0.15 mm over R, and at R = 1 mm over S.
pub fn fig3_config(base: &ScanConfig) -> ScanConfig {
    let mut c = base.clone();
    let mut g = Vec::new();
    for r in [0.1, 1.0, 10.0] {
        g.push(geometry("vs-R", ResonatorGeometry::disk(r * MM, 0.15 * MM, None).expect("valid disk")));
    }
    for s in [0.1, 1.0, 10.0] {
        g.push(geometry("vs-S", ResonatorGeometry::disk(MM, s * MM, None).expect("valid disk")));
    }
    c.geometries = g;
    c.temperatures = vec![CRYO_TEMPERATURE, ROOM_TEMPERATURE];
    c.taus = vec![1.0];
    c
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn write_fig2<W: Write>(rows: &[BudgetRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["T_K", "sigma_TR", "sigma_BB", "sigma_EO", "status"])?;
    for r in rows {
        let b = r.budget.as_ref();
        w.write_record([
            fmt_num(r.temperature),
            cell(b.map(|b| b.sigma_tr)),
            cell(b.map(|b| b.sigma_bb)),
            cell(b.map(|b| b.sigma_eo)),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fig3<W: Write>(rows: &[BudgetRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["series", "R_m", "S_m", "T_K", "sigma_BB", "sigma_EO", "status"])?;
    for r in rows {
        let b = r.budget.as_ref();
        w.write_record([
            r.id.clone(),
            fmt_num(r.geometry.radius),
            cell(r.geometry.curvature()),
            fmt_num(r.temperature),
            cell(b.map(|b| b.sigma_bb)),
            cell(b.map(|b| b.sigma_eo)),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows and output paths of one figure-data run.
#[derive(Debug)]
pub struct FigureData {
    pub fig2: Vec<BudgetRow>,
    pub fig3: Vec<BudgetRow>,
    pub paths: Vec<PathBuf>,
}

fn to_io(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes `fig2.csv` and `fig3.csv` into `out_dir`.
pub fn emit_figure_data(base: &ScanConfig, material: &MaterialTable, out_dir: &Path) -> io::Result<FigureData> {
    std::fs::create_dir_all(out_dir)?;
    let fig2 = run_budget(&fig2_config(base), material);
    let fig3 = run_budget(&fig3_config(base), material);
    let p2 = out_dir.join("fig2.csv");
    let p3 = out_dir.join("fig3.csv");
    write_fig2(&fig2, BufWriter::new(File::create(&p2)?)).map_err(to_io)?;
    write_fig3(&fig3, BufWriter::new(File::create(&p3)?)).map_err(to_io)?;
    Ok(FigureData { fig2, fig3, paths: vec![p2, p3] })
}
