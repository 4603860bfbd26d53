use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wgnoise::elastostatics::{
    bb_surface_load, build_mesh, eo_volumetric_load, solve_once, solve_static, uniform_pressure_load, LoadSpec,
};
use wgnoise::materials::MaterialTable;
use wgnoise::modes::{minor_radius, ModeProfile, ResonatorGeometry};
use wgnoise::noise::EoMode;
use wgnoise::pipeline::mechanical_response;
use wgnoise_cli::config::{ModeSourceKind, ScanConfig, ScanGeometry};
use wgnoise_cli::figdata::emit_figure_data;
use wgnoise_cli::fit::fit_power_law;
use wgnoise_cli::scan::{fmt_num, resolve_mode, run_budget, write_csv};
use wgnoise_cli::validate::{validate, Context};

const EXIT_CONFIG: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "wgnoise", version, about = "Thermal-noise budgets for whispering-gallery resonators")]
struct Cli {
    /// Material property file (bundled CaF2 when omitted).
    #[arg(long, global = true)]
    material: Option<PathBuf>,
    /// Scan configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra uniform refinements of the initial mesh.
    #[arg(long, global = true)]
    refine: Option<u32>,
    /// Combination of minor- and major-radius strain in the EO term.
    #[arg(long, global = true, value_parser = parse_eo_mode)]
    eo_mode: Option<EoMode>,
    /// Thermorefractive spectral-shape constant.
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

fn parse_eo_mode(s: &str) -> Result<EoMode, String> {
    s.parse().map_err(|e: wgnoise::noise::NoiseError| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Print the fundamental mode of a geometry.
    Mode(GeometryArgs),
    /// One elastostatic solve; print strain energy and conjugate force.
    Strain {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, value_enum, default_value = "bb")]
        load: LoadChoice,
        /// Load amplitude (Pa for bb and pressure, N/m^3 for eo).
        #[arg(long)]
        amplitude: Option<f64>,
        /// Write the finest mesh and displacement field to this file.
        #[arg(long)]
        nodal: Option<PathBuf>,
    },
    /// Noise budget of one geometry at one temperature.
    Budget {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Temperature, K.
        #[arg(long, default_value_t = 300.0)]
        temperature: f64,
        /// Averaging time, s.
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
    },
    /// Run the sweep in --config and write a CSV.
    Scan,
    /// Write temperature and disk-size series for plotting.
    Figdata,
    /// Run the oracle suite.
    Validate,
    /// Power-law fit of one CSV column against another.
    Fit {
        csv: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeChoice {
    Sphere,
    Disk,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceChoice {
    Estimate,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum LoadChoice {
    Bb,
    Eo,
    Pressure,
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long, value_enum, default_value = "sphere")]
    shape: ShapeChoice,
    /// Major radius, m.
    #[arg(long)]
    radius: f64,
    /// Disk rim curvature radius, m.
    #[arg(long)]
    curvature: Option<f64>,
    /// Disk thickness, m.
    #[arg(long)]
    thickness: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    source: SourceChoice,
    /// Vacuum wavelength for the estimator, m.
    #[arg(long, default_value_t = 1.565e-6)]
    wavelength: f64,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Validation,
    Partial(usize),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.to_string())
    }
}

fn base_config(cli: &Cli) -> Result<ScanConfig, Failure> {
    let mut c = match &cli.config {
        Some(p) => ScanConfig::from_path(p)?,
        None => ScanConfig::with_geometries(Vec::new(), Vec::new()),
    };
    if let Some(m) = &cli.material {
        c.material = Some(m.clone());
    }
    if let Some(r) = cli.refine {
        c.pipeline.refinement.subdivisions = r;
    }
    if let Some(m) = cli.eo_mode {
        c.pipeline.eo_mode = m;
    }
    if let Some(g) = cli.gamma {
        if !(g > 0.0) {
            return Err(Failure::Config(format!("gamma must be positive, got {g}")));
        }
        c.pipeline.gamma = g;
    }
    Ok(c)
}

fn scan_geometry(a: &GeometryArgs) -> Result<ScanGeometry, Failure> {
    let geometry = match a.shape {
        ShapeChoice::Sphere => ResonatorGeometry::sphere(a.radius)?,
        ShapeChoice::Disk => {
            let s = a.curvature.ok_or_else(|| Failure::Config("--curvature is required for disks".into()))?;
            ResonatorGeometry::disk(a.radius, s, a.thickness)?
        }
    };
    Ok(ScanGeometry { id: "cli".into(), geometry, mode: None })
}

fn mode_for(a: &GeometryArgs, g: &ScanGeometry, material: &MaterialTable) -> Result<ModeProfile, Failure> {
    let n = material
        .properties_at_with(300.0, wgnoise::materials::Extrapolation::Clamp)?
        .refractive_index;
    let source = match a.source {
        SourceChoice::Estimate => ModeSourceKind::Estimate,
        SourceChoice::Table => ModeSourceKind::Table,
    };
    Ok(resolve_mode(g, source, a.wavelength, n).map_err(Failure::Config)?)
}

fn print_mode(out: &mut impl Write, p: &ModeProfile) -> io::Result<()> {
    let s = minor_radius(p);
    writeln!(out, "frequency_Hz = {}", fmt_num(p.frequency))?;
    writeln!(out, "wavelength_m = {}", fmt_num(p.wavelength))?;
    writeln!(out, "azimuthal_index = {}", p.azimuthal_index)?;
    writeln!(out, "w_z_m = {}", fmt_num(p.w_z))?;
    writeln!(out, "w_rho_m = {}", fmt_num(p.w_rho))?;
    writeln!(out, "rho0_m = {}", fmt_num(p.rho0))?;
    writeln!(out, "minor_radius_m = {}", fmt_num(s.minor_radius))?;
    writeln!(out, "mode_volume_m3 = {}", fmt_num(s.mode_volume))?;
    writeln!(out, "source = {:?}", p.source)
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build()?;
    Ok(pool.install(f))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let config = base_config(cli)?;
    let material = config.load_material()?;
    let settings = config.pipeline;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Mode(a) => {
            let g = scan_geometry(a)?;
            print_mode(&mut out, &mode_for(a, &g, &material)?)?;
        }
        Command::Strain { geometry: a, load, amplitude, nodal } => {
            let g = scan_geometry(a)?;
            let (profile, spec): (Option<ModeProfile>, LoadSpec) = match load {
                LoadChoice::Pressure => (None, uniform_pressure_load(amplitude.unwrap_or(settings.bb_amplitude))?),
                LoadChoice::Bb => {
                    let p = mode_for(a, &g, &material)?;
                    (Some(p), bb_surface_load(&p, amplitude.unwrap_or(settings.bb_amplitude))?)
                }
                LoadChoice::Eo => {
                    let p = mode_for(a, &g, &material)?;
                    (Some(p), eo_volumetric_load(&p, amplitude.unwrap_or(settings.eo_amplitude))?)
                }
            };
            let props = material.properties_at_with(300.0, config.extrapolation)?;
            let moduli = material.moduli(&props)?;
            let mesh = build_mesh(&g.geometry, profile.as_ref(), &settings.refinement)?;
            let res = with_pool(cli.threads, || solve_static(&mesh, &moduli, &spec, &settings.solve))??;
            writeln!(out, "energy_J = {}", fmt_num(res.energy))?;
            writeln!(out, "force_N = {}", fmt_num(res.force))?;
            writeln!(out, "compliance_J_per_N2 = {}", fmt_num(res.compliance_ratio()))?;
            writeln!(out, "dofs = {}", res.dofs)?;
            writeln!(out, "levels = {}", res.levels.len())?;
            writeln!(out, "estimated_error = {}", fmt_num(res.estimated_error))?;
            for w in &res.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(path) = nodal {
                let mut fine = mesh.clone();
                for _ in 1..res.levels.len() {
                    fine = fine.refine_uniform();
                }
                let solved = with_pool(cli.threads, || solve_once(&fine, &moduli, &spec, &settings.solve))??;
                fine.write_nodal_text(Some(&solved.displacement), create(path)?)?;
            }
        }
        Command::Budget { geometry: a, temperature, tau } => {
            let g = scan_geometry(a)?;
            let profile = mode_for(a, &g, &material)?;
            let props = material.properties_at_with(*temperature, config.extrapolation)?;
            let moduli = material.moduli(&props)?;
            let resp = with_pool(cli.threads, || mechanical_response(&g.geometry, &profile, &moduli, &settings))??;
            let b = resp.budget(&g.id, &props, *temperature, *tau, &settings)?;
            writeln!(out, "T_K = {}", fmt_num(b.temperature))?;
            writeln!(out, "tau_s = {}", fmt_num(b.tau))?;
            writeln!(out, "sigma_TR = {}", fmt_num(b.sigma_tr))?;
            writeln!(out, "sigma_BB = {}", fmt_num(b.sigma_bb))?;
            writeln!(out, "sigma_dr_r = {}", fmt_num(b.sigma_dr_over_r))?;
            writeln!(out, "sigma_EO = {}", fmt_num(b.sigma_eo))?;
            writeln!(out, "U_bb_J = {}", fmt_num(resp.bb.energy))?;
            writeln!(out, "F_bb_N = {}", fmt_num(resp.bb.force))?;
            writeln!(out, "U_eo_J = {}", fmt_num(resp.eo.energy))?;
            writeln!(out, "F_eo_N = {}", fmt_num(resp.eo.force))?;
            writeln!(out, "eo_mode = {}", b.eo_mode)?;
            writeln!(out, "gamma = {}", fmt_num(b.gamma))?;
        }
        Command::Scan => {
            if cli.config.is_none() {
                return Err(Failure::Config("scan needs --config".into()));
            }
            let rows = with_pool(cli.threads, || run_budget(&config, &material))?;
            let path = match (&cli.out, &config.output) {
                (Some(dir), _) => Some(dir.join("scan.csv")),
                (None, Some(p)) => Some(p.clone()),
                (None, None) => None,
            };
            match &path {
                Some(p) => write_csv(&rows, create(p)?)?,
                None => write_csv(&rows, &mut out)?,
            }
            let failed: Vec<_> = rows.iter().filter(|r| !r.is_ok()).collect();
            for r in &failed {
                eprintln!(
                    "{} T={} K tau={} s: {} {}",
                    r.id,
                    r.temperature,
                    r.tau,
                    r.status,
                    r.message.as_deref().unwrap_or("")
                );
            }
            if !failed.is_empty() {
                return Err(Failure::Partial(failed.len()));
            }
        }
        Command::Figdata => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let data = with_pool(cli.threads, || emit_figure_data(&config, &material, &dir))??;
            for p in &data.paths {
                writeln!(out, "wrote {}", p.display())?;
            }
            let failed = data.fig2.iter().chain(&data.fig3).filter(|r| !r.is_ok()).count();
            if failed > 0 {
                return Err(Failure::Partial(failed));
            }
        }
        Command::Validate => {
            let report = with_pool(cli.threads, || Context::new(material, settings).map(|ctx| validate(&ctx)))?
                .map_err(Failure::Config)?;
            report.write(&mut out)?;
            if let Some(dir) = &cli.out {
                report.write(create(&dir.join("validate.txt"))?)?;
            }
            if !report.passed() {
                return Err(Failure::Validation);
            }
        }
        Command::Fit { csv: path, x, y } => {
            let mut reader = csv::Reader::from_path(path)?;
            let headers = reader.headers()?.clone();
            let col = |name: &str| {
                headers.iter().position(|h| h == name).ok_or_else(|| Failure::Config(format!("no column {name:?}")))
            };
            let (ix, iy, status) = (col(x)?, col(y)?, headers.iter().position(|h| h == "status"));
            let mut points = Vec::new();
            for rec in reader.records() {
                let rec = rec?;
                if status.is_some_and(|s| &rec[s] != "ok") {
                    continue;
                }
                points.push((rec[ix].parse::<f64>()?, rec[iy].parse::<f64>()?));
            }
            let fit = fit_power_law(&points)?;
            writeln!(out, "exponent = {:.6}", fit.exponent)?;
            writeln!(out, "prefactor = {}", fmt_num(fit.intercept.exp()))?;
            writeln!(out, "residual = {}", fmt_num(fit.residual))?;
            writeln!(out, "points = {}", fit.points.len())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors share the config-error code; clap's own code 2 means validation failure here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Validation) => {
            eprintln!("validation failed");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Partial(n)) => {
            eprintln!("{n} row(s) failed");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
