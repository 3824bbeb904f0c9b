//! `dressage`: build dressing kernels, run gauge-invariance suites and emit
//! observables.
//!
//! The Coulomb kernel is the backward gradient of the inverse lattice
//! Laplacian of a point source, i.e. the denominator of Dirac's dressing is
//! read as the Laplacian.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! configuration or module errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dressage::dressing::KernelKind;
use dressage_cli::commands::{self, EField, EntangleDemo, GaugeTest, MakeKernel, Overlap};
use dressage_cli::config::{parse_dims, AnchorSpec, ConfigError, KernelChoice, RunConfig};
use dressage_cli::report::Report;
use dressage_cli::suite::SuiteConfig;

#[derive(Parser)]
#[command(
    name = "dressage",
    version,
    about = "Gauge-invariant dressed qubits on U(1) lattice backgrounds",
    after_help = "Coulomb kernels use the inverse lattice Laplacian for the inverse gradient in Dirac's dressing.\n\
                  Exit status: 0 all checks pass, 1 a check failed, 2 invalid input or library error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Lattice extents, comma separated
    #[arg(long, default_value = "8,8,8")]
    dims: String,
    /// Base seed for background fields and gauge transforms
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coupling e
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Spectral low-pass strength for random fields
    #[arg(long, default_value_t = 0.5)]
    smoothness: f64,
    /// Override the main pass/fail tolerance
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report here ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct KernelArgs {
    /// Kernel kind: coulomb or path
    #[arg(long)]
    kind: Option<String>,
    /// Path steps for path kernels, e.g. +x,+x,-y
    #[arg(long)]
    path: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dressing kernel and write it with its JSON sidecar
    MakeKernel {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = "kernel.txt")]
        out: PathBuf,
    },
    /// Validate a kernel file against its divergence law
    CheckKernel {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        kernel: PathBuf,
        #[arg(long)]
        kind: Option<String>,
    },
    /// Apply seeded gauge transforms to a dressed charge and compare with the bare charge
    GaugeTest {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel_args: KernelArgs,
        /// Kernel file; built in memory from --kind/--path when absent
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Number of gauge transforms
        #[arg(long, default_value_t = 100)]
        transforms: usize,
        /// Charge sign, +1 or -1
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        charge: i32,
        /// Constant added to every gauge function
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        offset: f64,
        /// Anchor sites: all, sample:N, or coordinates "x,y,z;x,y,z"
        #[arg(long)]
        anchors: Option<String>,
        /// Pair the string-dressed charge with an opposite charge at the string's end
        #[arg(long)]
        neutral_pair: bool,
    },
    /// Electric field of a dressed charge: Gauss residual and radial profile CSV
    Efield {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        kernel_args: KernelArgs,
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Charge position, comma separated
        #[arg(long, allow_hyphen_values = true)]
        anchors: Option<String>,
        #[arg(long)]
        bins: Option<usize>,
        /// CSV output: r,mean_E,count,continuum_E,rel_dev
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gauge stability of the overlap between a Coulomb dressing and Coulomb plus a loop
    Overlap {
        #[command(flatten)]
        common: Common,
        #[arg(long = "path", default_value = "+x,+y,-x,-y")]
        loop_path: String,
        #[arg(long, default_value_t = 20)]
        transforms: usize,
    },
    /// Entangled pair of Coulomb-dressed charges: entropy and charge-2 phase law
    EntangleDemo {
        #[command(flatten)]
        common: Common,
        /// Use (|00> + |11>)/sqrt(2)
        #[arg(long)]
        bell: bool,
        /// Real amplitudes a00,a01,a10,a11
        #[arg(long, conflicts_with = "bell", allow_hyphen_values = true)]
        amplitudes: Option<String>,
        #[arg(long, default_value_t = 5)]
        transforms: usize,
        #[arg(long, default_value_t = 0.4, allow_hyphen_values = true)]
        offset: f64,
    },
    /// Run every check group
    Report {
        #[command(flatten)]
        common: Common,
        /// Run all groups (the only mode)
        #[arg(long)]
        all: bool,
    },
}

fn run_config(
    common: &Common,
    kernel: Option<&KernelArgs>,
    anchors: Option<&str>,
) -> Result<RunConfig, ConfigError> {
    let kernel = match kernel {
        Some(KernelArgs { kind: Some(kind), path }) => Some(KernelChoice::parse(kind, path.as_deref())?),
        Some(KernelArgs { kind: None, path: Some(path) }) => {
            Some(KernelChoice::parse("path", Some(path))?)
        }
        _ => None,
    };
    Ok(RunConfig {
        dims: parse_dims(&common.dims)?,
        seed: common.seed,
        coupling: common.coupling,
        smoothness: common.smoothness,
        kernel,
        anchors: anchors.map(AnchorSpec::parse).transpose()?,
        tolerance: common.tolerance,
    })
}

fn parse_coords(text: &str) -> Result<Vec<i64>, ConfigError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("bad coordinate {t:?}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(Report, Option<PathBuf>), ConfigError> {
    match cli.command {
        Command::MakeKernel { common, kernel, out } => {
            if kernel.kind.is_none() && kernel.path.is_none() {
                return Err(ConfigError::Invalid("--kind is required".into()));
            }
            let config = run_config(&common, Some(&kernel), None)?;
            let report = commands::make_kernel(&MakeKernel { config, out })?;
            Ok((report, common.json))
        }
        Command::CheckKernel { common, kernel, kind } => {
            let kind = kind.map(|k| k.parse::<KernelKind>()).transpose()?;
            Ok((commands::check_kernel(&kernel, kind)?, common.json))
        }
        Command::GaugeTest {
            common,
            kernel_args,
            kernel,
            transforms,
            charge,
            offset,
            anchors,
            neutral_pair,
        } => {
            let config = run_config(&common, Some(&kernel_args), anchors.as_deref())?;
            let report = commands::gauge_test(&GaugeTest {
                config,
                kernel_file: kernel,
                transforms,
                charge,
                offset,
                neutral_pair,
            })?;
            Ok((report, common.json))
        }
        Command::Efield {
            common,
            kernel_args,
            kernel,
            anchors,
            bins,
            out,
        } => {
            let config = run_config(&common, Some(&kernel_args), None)?;
            let anchor = anchors.as_deref().map(parse_coords).transpose()?.unwrap_or_default();
            let report = commands::efield(&EField {
                config,
                kernel_file: kernel,
                anchor,
                bins,
                out,
            })?;
            Ok((report, common.json))
        }
        Command::Overlap {
            common,
            loop_path,
            transforms,
        } => {
            let config = run_config(&common, None, None)?;
            let report = commands::overlap(&Overlap {
                config,
                loop_path,
                transforms,
            })?;
            Ok((report, common.json))
        }
        Command::EntangleDemo {
            common,
            bell,
            amplitudes,
            transforms,
            offset,
        } => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let amplitudes = match (bell, amplitudes) {
                (_, Some(text)) => {
                    let v: Vec<f64> = text
                        .split(',')
                        .map(|t| {
                            t.trim()
                                .parse()
                                .map_err(|_| ConfigError::Invalid(format!("bad amplitude {t:?}")))
                        })
                        .collect::<Result<_, _>>()?;
                    <[f64; 4]>::try_from(v)
                        .map_err(|_| ConfigError::Invalid("need four amplitudes".into()))?
                }
                (true, None) => [h, 0.0, 0.0, h],
                (false, None) => {
                    return Err(ConfigError::Invalid(
                        "pass --bell or --amplitudes a00,a01,a10,a11".into(),
                    ))
                }
            };
            let config = run_config(&common, None, None)?;
            let report = commands::entangle_demo(&EntangleDemo {
                config,
                amplitudes,
                transforms,
                offset,
            })?;
            Ok((report, common.json))
        }
        Command::Report { common, all } => {
            if !all {
                return Err(ConfigError::Invalid("report currently requires --all".into()));
            }
            let config = run_config(&common, None, None)?;
            config.validate()?;
            let cfg = SuiteConfig {
                seed: config.seed,
                coupling: config.coupling,
                smoothness: config.smoothness,
            };
            Ok((commands::full_report(&cfg)?, common.json))
        }
    }
}

fn configure_threads() {
    if let Ok(value) = std::env::var("DRESSAGE_THREADS") {
        if let Ok(n) = value.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok((mut report, json)) => {
            report.stamp();
            let to_stdout = json.as_ref().is_some_and(|p| p.as_os_str() == "-");
            if to_stdout {
                eprint!("{}", report.summary());
            } else {
                print!("{}", report.summary());
            }
            if let Some(path) = json {
                let text = report.to_json();
                if path.as_os_str() == "-" {
                    print!("{text}");
                } else if let Err(e) = fs::write(&path, text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
