//! `sgrf`: sample isotropic Gaussian random fields on the sphere, inspect
//! kernels and regularity, solve the stochastic heat equation and run
//! truncation-error experiments.
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 3 for I/O failures.
//! Every run writes `run.json` to the output directory; `sgrf replay
//! run.json` reproduces the run byte for byte.

mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sgrf_core::{ExperimentKind, GridSpec};

use run::{Command, RunFile, SpectrumSource};

#[derive(Debug, Parser)]
#[command(name = "sgrf", version, about = "Gaussian random fields on the sphere")]
struct Cli {
    /// Seed of the counter-based random stream.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Directory for all outputs, created if missing.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Worker threads; changes wall time only.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Power-law decay: A_l = c (l + 1)^-alpha.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    alpha: f64,

    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    c: f64,

    /// Two-column `l,A_l` CSV, replacing the power law.
    #[arg(long)]
    spectrum_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Bin,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    spectrum: SpectrumArgs,

    #[arg(long, default_value_t = 100, allow_negative_numbers = true)]
    kappa: i64,

    /// Equiangular `NthetaxNphi` grid.
    #[arg(long, default_value = "64x128")]
    grid: GridSpec,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Index of the sample within the seed's stream.
    #[arg(long, default_value_t = 0)]
    index: u64,

    /// Also write exp(T).
    #[arg(long)]
    lognormal: bool,

    /// Deformed-sphere OBJ with radius exp(T), relative to the output directory.
    #[arg(long)]
    mesh: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    GrfMs,
    GrfPath,
    HeatMs,
    HeatPath,
}

impl From<KindArg> for ExperimentKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::GrfMs => Self::GrfMs,
            KindArg::GrfPath => Self::GrfPath,
            KindArg::HeatMs => Self::HeatMs,
            KindArg::HeatPath => Self::HeatPath,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Draw one field on a grid.
    Sample(SampleArgs),

    /// Draw one field and write its lognormal transform.
    Lognormal(SampleArgs),

    /// Kernel values, the weighted derivative norm identity and Sobolev norms.
    Kernel {
        #[command(flatten)]
        spectrum: SpectrumArgs,

        #[arg(long, default_value_t = 64, allow_negative_numbers = true)]
        band: i64,

        /// Derivative order of the norm identity.
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
        n: u8,

        #[arg(long)]
        sobolev_eta: Option<f64>,

        /// Number of distances in [0, pi].
        #[arg(long, default_value_t = 9)]
        points: usize,
    },

    /// Regularity exponents implied by a spectrum, as JSON.
    Regularity {
        #[command(flatten)]
        spectrum: SpectrumArgs,
    },

    /// Stochastic heat equation from zero initial data.
    Heat {
        #[command(flatten)]
        spectrum: SpectrumArgs,

        #[arg(long, default_value_t = 32, allow_negative_numbers = true)]
        kappa: i64,

        #[arg(long, default_value_t = 1.0)]
        t: f64,

        #[arg(long, default_value_t = 1)]
        steps: usize,

        #[arg(long, default_value = "64x128")]
        grid: GridSpec,

        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,

        #[arg(long, default_value_t = 0)]
        index: u64,
    },

    /// Truncation-error experiment with fitted and theoretical rates.
    Converge {
        #[arg(long, value_enum)]
        kind: KindArg,

        #[command(flatten)]
        spectrum: SpectrumArgs,

        /// Comma-separated band limits.
        #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64", allow_negative_numbers = true)]
        kappas: Vec<i64>,

        #[arg(long, default_value_t = 128, allow_negative_numbers = true)]
        kappa_ref: i64,

        /// Monte Carlo samples; defaults to 1000 (grf-ms), 100 (heat-ms), 1 (paths).
        #[arg(long)]
        samples: Option<usize>,

        #[arg(long, default_value = "64x128")]
        grid: GridSpec,

        #[arg(long, default_value_t = 1.0)]
        t: f64,

        #[arg(long, default_value_t = 1)]
        steps: usize,
    },

    /// Rerun a recorded run.json.
    Replay { run_json: PathBuf },
}

fn band(name: &str, v: i64) -> anyhow::Result<usize> {
    usize::try_from(v).map_err(|_| run::usage(format!("--{name} must be a nonnegative integer, got {v}")))
}

fn spectrum_source(a: SpectrumArgs) -> SpectrumSource {
    match a.spectrum_csv {
        Some(path) => SpectrumSource::Csv(path),
        None => SpectrumSource::PowerLaw { c: a.c, alpha: a.alpha },
    }
}

fn sample_command(a: SampleArgs, lognormal: bool) -> anyhow::Result<Command> {
    Ok(Command::Sample(run::SampleConfig {
        spectrum: run::resolve_spectrum(spectrum_source(a.spectrum))?,
        kappa: band("kappa", a.kappa)?,
        grid: a.grid,
        binary: matches!(a.format, Format::Bin),
        index: a.index,
        lognormal: lognormal || a.lognormal,
        mesh: a.mesh,
    }))
}

fn resolve(cli: Cli) -> anyhow::Result<RunFile> {
    let command = match cli.command {
        Cmd::Sample(a) => sample_command(a, false)?,
        Cmd::Lognormal(a) => sample_command(a, true)?,
        Cmd::Kernel {
            spectrum,
            band: b,
            n,
            sobolev_eta,
            points,
        } => Command::Kernel(run::KernelConfig {
            spectrum: run::resolve_spectrum(spectrum_source(spectrum))?,
            band: band("band", b)?,
            n: n as usize,
            sobolev_eta,
            points,
        }),
        Cmd::Regularity { spectrum } => Command::Regularity(run::RegularityConfig {
            spectrum: run::resolve_spectrum(spectrum_source(spectrum))?,
        }),
        Cmd::Heat {
            spectrum,
            kappa,
            t,
            steps,
            grid,
            format,
            index,
        } => Command::Heat(run::HeatConfig {
            spectrum: run::resolve_spectrum(spectrum_source(spectrum))?,
            kappa: band("kappa", kappa)?,
            t_final: t,
            steps,
            grid,
            binary: matches!(format, Format::Bin),
            index,
        }),
        Cmd::Converge {
            kind,
            spectrum,
            kappas,
            kappa_ref,
            samples,
            grid,
            t,
            steps,
        } => {
            let kind = ExperimentKind::from(kind);
            let mut config = sgrf_core::ExperimentConfig::new(kind, 1.0, 3.0, cli.seed)?;
            config.spectrum = run::resolve_spectrum(spectrum_source(spectrum))?;
            config.kappas = kappas
                .into_iter()
                .map(|k| band("kappas", k))
                .collect::<anyhow::Result<_>>()?;
            config.kappa_ref = band("kappa-ref", kappa_ref)?;
            if let Some(n) = samples {
                config.n_samples = n;
            }
            config.grid = grid;
            config.t_final = t;
            config.steps = steps;
            Command::Converge(config)
        }
        Cmd::Replay { run_json } => {
            let text = std::fs::read_to_string(&run_json)
                .with_context(|| format!("reading {}", run_json.display()))?;
            return serde_json::from_str(&text)
                .map_err(|e| run::usage(format!("{}: {e}", run_json.display())));
        }
    };
    Ok(RunFile {
        seed: cli.seed,
        command,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("global pool is configured once");
    }
    let out_dir = cli.out_dir.clone();
    match resolve(cli).and_then(|r| run::execute(&r, &out_dir)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(run::exit_code(&e))
        }
    }
}
