//! Resolved run descriptions and their execution. A [`RunFile`] holds
//! everything that affects outputs, so replaying it reproduces them exactly;
//! thread count and output directory are deliberately not part of it.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sgrf_core::heat::{trajectory, write_trajectory_csv};
use sgrf_core::specfun::gauss_legendre;
use sgrf_core::spectrum::{
    deriv_norm_spectral, regularity_report, sobolev_equiv_norm, weighted_deriv_norm_quadrature,
};
use sgrf_core::{
    draw_coefficients, emit_report, export_deformed_mesh, lognormal_transform, run_experiment,
    synthesize, AngularPowerSpectrum, BandLimit, ExperimentConfig, FieldSample, GridSpec,
    KernelView, ModeState, QWienerSpec, RngStream, SphereGrid, SynthesisPlan, TimeGrid,
};

/// Invalid input that the core library does not see (exit code 2).
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub fn usage(msg: String) -> anyhow::Error {
    Usage(msg).into()
}

/// 3 when any cause is an I/O failure, 2 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    let io = e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>().is_some()
            || c.downcast_ref::<sgrf_core::Error>().is_some_and(|e| e.is_io())
    });
    if io {
        3
    } else {
        2
    }
}

pub enum SpectrumSource {
    PowerLaw { c: f64, alpha: f64 },
    Csv(PathBuf),
}

pub fn resolve_spectrum(src: SpectrumSource) -> Result<AngularPowerSpectrum> {
    Ok(match src {
        SpectrumSource::PowerLaw { c, alpha } => AngularPowerSpectrum::power_law(c, alpha)?,
        SpectrumSource::Csv(path) => AngularPowerSpectrum::from_csv_path(&path)?,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunFile {
    pub seed: u64,
    pub command: Command,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Command {
    Sample(SampleConfig),
    Kernel(KernelConfig),
    Regularity(RegularityConfig),
    Heat(HeatConfig),
    Converge(ExperimentConfig),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SampleConfig {
    pub spectrum: AngularPowerSpectrum,
    pub kappa: usize,
    pub grid: GridSpec,
    pub binary: bool,
    pub index: u64,
    pub lognormal: bool,
    pub mesh: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KernelConfig {
    pub spectrum: AngularPowerSpectrum,
    pub band: usize,
    pub n: usize,
    pub sobolev_eta: Option<f64>,
    pub points: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RegularityConfig {
    pub spectrum: AngularPowerSpectrum,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct HeatConfig {
    pub spectrum: AngularPowerSpectrum,
    pub kappa: usize,
    pub t_final: f64,
    pub steps: usize,
    pub grid: GridSpec,
    pub binary: bool,
    pub index: u64,
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn save_field(field: &FieldSample, path: &Path, binary: bool) -> Result<()> {
    if binary {
        field.save_binary(path)?;
    } else {
        field.save_csv(path)?;
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn ext(binary: bool) -> &'static str {
    if binary {
        "bin"
    } else {
        "csv"
    }
}

pub fn execute(run: &RunFile, out_dir: &Path) -> Result<()> {
    validate(run)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let echo = serde_json::to_string_pretty(run).expect("run description serializes");
    write(&out_dir.join("run.json"), echo + "\n")?;
    match &run.command {
        Command::Sample(c) => sample(c, run.seed, out_dir),
        Command::Kernel(c) => kernel(c, out_dir),
        Command::Regularity(c) => regularity(c, out_dir),
        Command::Heat(c) => heat(c, run.seed, out_dir),
        Command::Converge(c) => converge(c, out_dir),
    }
}

/// Checks that need no work, so a rejected run leaves no files behind.
fn validate(run: &RunFile) -> Result<()> {
    match &run.command {
        Command::Sample(c) => {
            SphereGrid::new(c.grid)?;
        }
        Command::Kernel(c) => {
            if c.points < 2 {
                return Err(usage(format!("--points must be at least 2, got {}", c.points)));
            }
            if let Some(eta) = c.sobolev_eta {
                if !eta.is_finite() {
                    return Err(usage(format!("--sobolev-eta must be finite, got {eta}")));
                }
            }
        }
        Command::Regularity(_) => {}
        Command::Heat(c) => {
            SphereGrid::new(c.grid)?;
            TimeGrid::uniform(c.t_final, c.steps)?;
        }
        Command::Converge(c) => {
            c.validate()?;
            if c.seed != run.seed {
                return Err(usage(format!(
                    "experiment seed {} disagrees with run seed {}",
                    c.seed, run.seed
                )));
            }
        }
    }
    Ok(())
}

fn sample(c: &SampleConfig, seed: u64, out_dir: &Path) -> Result<()> {
    let grid = Arc::new(SphereGrid::new(c.grid)?);
    let draw = draw_coefficients(BandLimit(c.kappa), &RngStream::new(seed), c.index);
    let field = synthesize(&draw, &c.spectrum, &grid);
    save_field(&field, &out_dir.join(format!("field.{}", ext(c.binary))), c.binary)?;
    if c.lognormal || c.mesh.is_some() {
        let exp = lognormal_transform(&field)?;
        if c.lognormal {
            save_field(&exp, &out_dir.join(format!("lognormal.{}", ext(c.binary))), c.binary)?;
        }
        if let Some(mesh) = &c.mesh {
            let path = out_dir.join(mesh);
            export_deformed_mesh(&exp, &path)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn kernel(c: &KernelConfig, out_dir: &Path) -> Result<()> {
    let band = BandLimit(c.band);
    let view = KernelView::new(c.spectrum.clone(), band)?;
    let mut csv = String::from("r,k,tail_bound\n");
    println!("r,k");
    for i in 0..c.points {
        let r = std::f64::consts::PI * i as f64 / (c.points - 1) as f64;
        let k = view.k(r)?;
        csv.push_str(&format!("{r},{},{}\n", k.value, k.tail_bound));
        println!("{r},{}", k.value);
    }
    println!("tail bound beyond band {}: {}", c.band, view.tail_bound);
    let path = out_dir.join("kernel.csv");
    write(&path, csv)?;

    let rule = gauss_legendre(c.band + c.n + 1);
    let quad = weighted_deriv_norm_quadrature(&c.spectrum, c.n, band, &rule)?;
    let spectral = deriv_norm_spectral(&c.spectrum, c.n, band);
    let residual = if spectral == 0.0 {
        quad.abs()
    } else {
        (quad - spectral).abs() / spectral
    };
    println!("derivative order n = {}", c.n);
    println!("quadrature  {quad}");
    println!("spectral    {spectral}");
    println!("residual    {residual}");
    if let Some(eta) = c.sobolev_eta {
        let norm = sobolev_equiv_norm(&c.spectrum, eta);
        if norm.is_finite() {
            println!("sobolev norm (eta = {eta}) {norm}");
        } else {
            println!("sobolev norm (eta = {eta}) diverges");
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn regularity(c: &RegularityConfig, out_dir: &Path) -> Result<()> {
    let json = regularity_report(&c.spectrum).to_json();
    println!("{json}");
    write(&out_dir.join("regularity.json"), json + "\n")
}

fn heat(c: &HeatConfig, seed: u64, out_dir: &Path) -> Result<()> {
    let kappa = BandLimit(c.kappa);
    let times = TimeGrid::uniform(c.t_final, c.steps)?;
    let qspec = QWienerSpec::new(c.spectrum.clone());
    let states = trajectory(
        &ModeState::zeros(kappa),
        &times,
        &qspec,
        &RngStream::new(seed),
        c.index,
    )?;

    let path = out_dir.join("heat_trajectory.csv");
    let mut buf = Vec::new();
    write_trajectory_csv(&states, &mut buf)?;
    write(&path, buf)?;
    println!("wrote {}", path.display());

    let last = states.last().expect("trajectory includes the initial state");
    let grid = Arc::new(SphereGrid::new(c.grid)?);
    let field = SynthesisPlan::new(grid, kappa).par_synthesize_band(&last.coeffs, 0..=c.kappa);
    save_field(&field, &out_dir.join(format!("heat_field.{}", ext(c.binary))), c.binary)
}

fn fmt_slope(s: Option<f64>) -> String {
    s.map_or_else(|| "n/a".into(), |v| v.to_string())
}

fn converge(c: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let table = run_experiment(c)?;
    println!("kappa,err_sup,err_l2,stderr_l2");
    for r in &table.rows {
        println!("{},{},{},{}", r.kappa, r.err_sup, r.err_l2, r.stderr_l2);
    }
    println!("fitted slope (L2)  {}", fmt_slope(table.fitted_slope_l2()));
    println!("fitted slope (sup) {}", fmt_slope(table.fitted_slope_sup()));
    println!("theoretical slope  {}", fmt_slope(table.theoretical_slope));
    let paths = emit_report(&table, c, out_dir.join("converge"))?;
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.svg.display());
    Ok(())
}
