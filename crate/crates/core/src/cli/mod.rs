//! Command-line front end. [`parse_args`] turns `argv` into a validated
//! [`JobSpec`]; [`run`] executes it, writes artifacts to the output directory
//! and returns the process exit code.

mod roundtrip;
mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::characterize::ConditionThresholds;

pub use roundtrip::{roundtrip, RoundtripOptions, RoundtripReport, StageError};
pub use run::run;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FORWARD: i32 = 3;
pub const EXIT_INVERSE: i32 = 4;
pub const EXIT_RIEMANN: i32 = 5;
pub const EXIT_VALIDATION: i32 = 6;

/// Environment variable read when `--threads` is absent.
pub const THREADS_ENV: &str = "HALFLINE_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Forward,
    Invert,
    Extract,
    Riemann,
    Validate,
    Roundtrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

/// How `roundtrip` scores the recovered potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum PotentialMetric {
    /// `sup |q_rec - q|`.
    #[default]
    Sup,
    /// `∫|q_rec - q| / ∫|q|`.
    RelL1,
}

/// Grid settings; `None` picks the subcommand's default.
#[derive(Debug, Clone, Copy, PartialEq, Default, Args)]
pub struct GridOverrides {
    /// Radial extent of the reconstruction.
    #[arg(long = "xmax")]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long = "kmax")]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub dk: Option<f64>,
}

/// Acceptance tolerances for `roundtrip`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub potential: f64,
    pub kernel: f64,
    pub scattering: f64,
    pub riemann: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            potential: 5e-3,
            kernel: 1e-5,
            scattering: 1e-3,
            riemann: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    /// Potential CSV, scattering JSON or `F` CSV, depending on the command.
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub grid: GridOverrides,
    pub tolerances: Tolerances,
    pub thresholds: ConditionThresholds,
    pub potential_metric: PotentialMetric,
    pub force: bool,
    pub richardson: bool,
    pub tail_correction: bool,
    pub kappa_shift: Option<f64>,
    pub window_fraction: Option<f64>,
    pub write_kernel: bool,
    pub kernel_stride: usize,
    pub format: ReportFormat,
    pub threads: Option<usize>,
}

/// Usage failure: message for stderr (or stdout for `--help`) and exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError {
    pub code: i32,
    pub message: String,
}

#[derive(Debug, Parser)]
#[command(name = "halfline", version, about = "Half-line inverse scattering: forward, inverse, Riemann and validation")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Common {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Format of the report file.
    #[arg(long, value_enum, default_value_t)]
    format: ReportFormat,
    /// Worker threads; defaults to $HALFLINE_THREADS, then all cores.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    unitarity_tol: Option<f64>,
    #[arg(long)]
    symmetry_tol: Option<f64>,
    #[arg(long)]
    tail_tol: Option<f64>,
    #[arg(long)]
    index_confidence: Option<f64>,
}

impl ThresholdArgs {
    fn resolve(&self) -> ConditionThresholds {
        let d = ConditionThresholds::default();
        ConditionThresholds {
            unitarity_tol: self.unitarity_tol.unwrap_or(d.unitarity_tol),
            symmetry_tol: self.symmetry_tol.unwrap_or(d.symmetry_tol),
            tail_tol: self.tail_tol.unwrap_or(d.tail_tol),
            index_confidence: self.index_confidence.unwrap_or(d.index_confidence),
            ..d
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Potential to scattering data, phase shift and Jost function.
    Forward {
        #[arg(long)]
        potential: PathBuf,
        #[command(flatten)]
        grid: GridOverrides,
        /// Also write the transformation kernel.
        #[arg(long)]
        kernel: bool,
        #[arg(long, default_value_t = 10)]
        kernel_stride: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scattering data to potential through the Marchenko equation.
    Invert {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        grid: GridOverrides,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        /// Invert even if the data fail validation.
        #[arg(long)]
        force: bool,
        /// Plain trapezoid solve without extrapolation.
        #[arg(long)]
        no_richardson: bool,
        #[arg(long, default_value_t = 10)]
        kernel_stride: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Scattering data from samples of F on a window around 0.
    Extract {
        #[arg(long)]
        f_data: PathBuf,
        #[command(flatten)]
        grid: GridOverrides,
        #[arg(long)]
        window_fraction: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Jost function from S by factorization.
    Riemann {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        kappa_shift: Option<f64>,
        #[arg(long)]
        no_tail_correction: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check the characterization conditions; exit 0 iff all pass.
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Every arrow of the pipeline on one potential; exit 0 iff all stages pass.
    Roundtrip {
        #[arg(long)]
        potential: PathBuf,
        /// Tolerance on the recovered potential.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t)]
        metric: PotentialMetric,
        #[arg(long)]
        kernel_tol: Option<f64>,
        #[arg(long)]
        scattering_tol: Option<f64>,
        #[arg(long)]
        riemann_tol: Option<f64>,
        #[command(flatten)]
        grid: GridOverrides,
        #[command(flatten)]
        common: Common,
    },
}

fn base(command: Command, input: PathBuf, common: Common) -> JobSpec {
    JobSpec {
        command,
        input,
        out_dir: common.out,
        grid: GridOverrides::default(),
        tolerances: Tolerances::default(),
        thresholds: ConditionThresholds::default(),
        potential_metric: PotentialMetric::Sup,
        force: false,
        richardson: true,
        tail_correction: true,
        kappa_shift: None,
        window_fraction: None,
        write_kernel: false,
        kernel_stride: 10,
        format: common.format,
        threads: common.threads,
    }
}

fn usage(message: impl Into<String>) -> UsageError {
    UsageError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Parses `argv` (program name first) and checks that the input exists and
/// the output directory can be created.
pub fn parse_args<I, T>(argv: I) -> Result<JobSpec, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| UsageError {
        code: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
        message: e.render().to_string(),
    })?;
    let job = match cli.command {
        Cmd::Forward {
            potential,
            grid,
            kernel,
            kernel_stride,
            common,
        } => JobSpec {
            grid,
            write_kernel: kernel,
            kernel_stride,
            ..base(Command::Forward, potential, common)
        },
        Cmd::Invert {
            data,
            grid,
            thresholds,
            force,
            no_richardson,
            kernel_stride,
            common,
        } => JobSpec {
            grid,
            thresholds: thresholds.resolve(),
            force,
            richardson: !no_richardson,
            write_kernel: true,
            kernel_stride,
            ..base(Command::Invert, data, common)
        },
        Cmd::Extract {
            f_data,
            grid,
            window_fraction,
            common,
        } => JobSpec {
            grid,
            window_fraction,
            ..base(Command::Extract, f_data, common)
        },
        Cmd::Riemann {
            data,
            kappa_shift,
            no_tail_correction,
            common,
        } => JobSpec {
            kappa_shift,
            tail_correction: !no_tail_correction,
            ..base(Command::Riemann, data, common)
        },
        Cmd::Validate {
            data,
            thresholds,
            common,
        } => JobSpec {
            thresholds: thresholds.resolve(),
            ..base(Command::Validate, data, common)
        },
        Cmd::Roundtrip {
            potential,
            tol,
            metric,
            kernel_tol,
            scattering_tol,
            riemann_tol,
            grid,
            common,
        } => {
            let d = Tolerances::default();
            JobSpec {
                grid,
                potential_metric: metric,
                tolerances: Tolerances {
                    potential: tol.unwrap_or(d.potential),
                    kernel: kernel_tol.unwrap_or(d.kernel),
                    scattering: scattering_tol.unwrap_or(d.scattering),
                    riemann: riemann_tol.unwrap_or(d.riemann),
                },
                ..base(Command::Roundtrip, potential, common)
            }
        }
    };
    check(&job)?;
    Ok(job)
}

fn check(job: &JobSpec) -> Result<(), UsageError> {
    if !job.input.is_file() {
        return Err(usage(format!("input file not found: {}", job.input.display())));
    }
    if job.out_dir.exists() {
        let meta = std::fs::metadata(&job.out_dir).map_err(|e| usage(format!("{}: {e}", job.out_dir.display())))?;
        if !meta.is_dir() {
            return Err(usage(format!("output path is not a directory: {}", job.out_dir.display())));
        }
        if meta.permissions().readonly() {
            return Err(usage(format!("output directory is read-only: {}", job.out_dir.display())));
        }
    }
    for (name, v) in [
        ("--xmax", job.grid.x_max),
        ("--dx", job.grid.dx),
        ("--kmax", job.grid.k_max),
        ("--dk", job.grid.dk),
        ("--tol", Some(job.tolerances.potential)),
        ("--kernel-tol", Some(job.tolerances.kernel)),
        ("--scattering-tol", Some(job.tolerances.scattering)),
        ("--riemann-tol", Some(job.tolerances.riemann)),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(usage(format!("{name} must be positive, got {v}")));
            }
        }
    }
    if job.kernel_stride == 0 {
        return Err(usage("--kernel-stride must be at least 1"));
    }
    if job.threads == Some(0) {
        return Err(usage("--threads must be at least 1"));
    }
    Ok(())
}
