//! Command-line front end: every subcommand runs a deterministic experiment and
//! returns a JSON [`Report`] whose checks decide the exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod commands;
pub mod report;

pub use report::{Check, Report};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hodge_core::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for bad invocations and geometry, 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use hodge_core::Error as E;
        match self {
            Self::Usage(_) | Self::Io { .. } => 2,
            Self::Core(
                E::InvalidGrid(_)
                | E::InvalidInput(_)
                | E::Infeasible(_)
                | E::Unsupported(_)
                | E::DegreeOutOfRange { .. },
            ) => 2,
            Self::Core(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "hodge", version, about = "Hodge decomposition and cohomology experiments on periodic grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Serialize, Clone, Debug, Default)]
pub struct Common {
    /// Points per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Replaces the built-in tolerance of every check.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long = "json-out", global = true)]
    #[serde(skip)]
    pub json_out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub metric: Option<MetricArg>,
    /// Major radius of the embedded torus.
    #[arg(long = "R", global = true)]
    #[serde(rename = "R")]
    pub major: Option<f64>,
    /// Minor radius of the embedded torus.
    #[arg(long = "r", global = true)]
    #[serde(rename = "r")]
    pub minor: Option<f64>,
    /// Vacuum permeability; SI when omitted
    #[arg(long, global = true)]
    pub mu0: Option<f64>,
    /// Speed of light; SI when omitted
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Add per-phase wall-clock timings to the report.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub timings: bool,
}

impl Common {
    pub fn radii(&self) -> (f64, f64) {
        (self.major.unwrap_or(2.0), self.minor.unwrap_or(1.0))
    }

    pub fn units(&self) -> hodge_core::em::Units {
        let si = hodge_core::em::Units::si();
        hodge_core::em::Units { mu0: self.mu0.unwrap_or(si.mu0), c: self.c.unwrap_or(si.c) }
    }

    pub fn embedded(&self) -> bool {
        self.metric == Some(MetricArg::EmbeddedTorus)
    }

    fn report(&self, command: &str, inputs: impl Serialize) -> Report {
        #[derive(Serialize)]
        struct Echo<'a, T> {
            #[serde(flatten)]
            common: &'a Common,
            #[serde(flatten)]
            command: T,
        }
        Report::new(command, Echo { common: self, command: inputs })
            .with_tol_override(self.tol)
            .with_timings(self.timings)
    }
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    Flat,
    EmbeddedTorus,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Cohomology,
    Decompose,
    Em,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TorusMode {
    Flat,
    Embedded,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DecomposePreset {
    /// `3γ₁ + 4γ₂` on the flat 2-torus.
    HarmonicT2,
    /// `3γ₁ + 4γ₂` plus exact and coexact parts on the flat 2-torus.
    MixedT2,
    /// Seeded random trigonometric 1-form on the 2-torus selected by `--metric`.
    RandomT2,
    /// Mixed 1-form on the embedded torus.
    Embedded,
    /// Seeded random 1-form on the flat 3-torus.
    T3,
}

#[derive(ValueEnum, Serialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum EmPreset {
    /// `μ₀c Σ q γ` from `--charges`.
    Topological,
    /// `dA` for a smooth potential.
    Exact,
    /// `dAᴱ − ★dAᴹ` plus the `--charges` field.
    Mixed,
}

#[derive(Subcommand, Serialize, Clone, Debug)]
#[serde(tag = "subcommand", rename_all = "lowercase")]
pub enum Command {
    /// Run the invariant battery of one module.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Cohomology matrices of the 2-torus.
    Torus2 {
        #[arg(long, value_enum, default_value = "flat")]
        mode: TorusMode,
    },
    /// Matrix solutions for a middle-degree Betti number of two.
    Taxonomy {
        /// Middle degree.
        #[arg(long)]
        m: usize,
        /// Number of negative metric entries.
        #[arg(long)]
        s: usize,
        #[arg(long)]
        betti: Option<usize>,
        /// Group label such as S2.1.1; lists all admissible groups when absent.
        #[arg(long)]
        group: Option<String>,
        /// Free parameters, e.g. `e12=1,l11=3/2,sign=-1`.
        #[arg(long)]
        params: Option<String>,
        /// Random feasible draws per group.
        #[arg(long, default_value_t = 1)]
        draws: usize,
    },
    /// Hodge decomposition and norm budget of a preset form.
    Decompose {
        #[arg(long, value_enum, default_value = "mixed-t2")]
        preset: DecomposePreset,
        /// Random forms for the random presets.
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
    /// Charges, potentials and action on the Minkowski 4-torus.
    Em {
        #[arg(long, value_enum, default_value = "topological")]
        preset: EmPreset,
        /// Magnetic charges as `value@axes`, e.g. `1@01,2@23`.
        #[arg(long, default_value = "1@01")]
        charges: String,
    },
}

pub fn run(cli: &Cli) -> CliResult<Report> {
    let c = &cli.common;
    let name = match &cli.command {
        Command::Verify { .. } => "verify",
        Command::Torus2 { .. } => "torus2",
        Command::Taxonomy { .. } => "taxonomy",
        Command::Decompose { .. } => "decompose",
        Command::Em { .. } => "em",
    };
    let mut report = c.report(name, &cli.command);
    match &cli.command {
        Command::Verify { suite } => commands::verify::run(c, *suite, &mut report)?,
        Command::Torus2 { mode } => commands::torus2::run(c, *mode, &mut report)?,
        Command::Taxonomy { m, s, betti, group, params, draws } => {
            let args = commands::taxonomy::TaxonomyArgs {
                m: *m,
                s: *s,
                betti: betti.unwrap_or(2),
                group: group.as_deref(),
                params: params.as_deref(),
                draws: *draws,
            };
            commands::taxonomy::run(c, &args, &mut report)?
        }
        Command::Decompose { preset, samples } => commands::decompose::run(c, *preset, *samples, &mut report)?,
        Command::Em { preset, charges } => commands::em::run(c, *preset, charges, &mut report)?,
    }
    Ok(report)
}

/// Parses argv-style arguments and runs the command.
pub fn run_args<I, T>(args: I) -> CliResult<Report>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli)
}
