//! Command-line surface and the validated [`RunConfig`] it produces.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crossing_core::series::Truncation;
use crossing_core::WeightSequence;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "crossing", version, about = "Expected first-passage index of weighted uniform sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate f(t, a) on its analytic branch.
    Eval {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        series: SeriesArgs,
        /// Fail with exit code 3 instead of falling back to the volume oracle.
        #[arg(long)]
        no_fallback: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate the stopping procedure and print the convergence trace.
    Simulate {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sum exact region volumes to a certified tail.
    Oracle {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        series: SeriesArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact volume p_m(t) of {x in [0,1]^m : a.x <= t}.
    Volume {
        #[arg(long, default_value = "const:1")]
        seq: String,
        #[arg(long)]
        m: usize,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Tabulate analytic, oracle and Monte Carlo values over a t-grid.
    Compare {
        #[command(flatten)]
        seq: SeqArg,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        no_fallback: bool,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Dense analytic curve on [t-min, t] plus the Monte Carlo trace at t.
    Curve {
        #[command(flatten)]
        seq: SeqArg,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[command(flatten)]
        series: SeriesArgs,
        #[arg(long)]
        no_fallback: bool,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct SeqArg {
    /// const:<c> | power:<s> | qgeom:<q> | list:<a1>,<a2>,...
    #[arg(long)]
    pub seq: String,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long, env = "CROSSING_REL_TOL", default_value_t = 1e-14)]
    pub rel_tol: f64,
    #[arg(long, env = "CROSSING_MAX_TERMS", default_value_t = 10_000)]
    pub max_terms: usize,
    /// Oracle tail tolerance.
    #[arg(long, env = "CROSSING_EPS", default_value_t = 1e-12)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, env = "CROSSING_TRIALS", default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, env = "CROSSING_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, env = "CROSSING_BLOCK", default_value_t = 500)]
    pub block: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, env = "CROSSING_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub t_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 31)]
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Shorthand for --format json.
    #[arg(long)]
    pub json: bool,
    /// Write to this path instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl TRange {
    pub fn single(t: f64) -> Self {
        Self { min: t, max: t, steps: 1 }
    }

    /// Evenly spaced points; a single step yields `max` alone.
    pub fn points(&self) -> Vec<f64> {
        if self.steps <= 1 {
            return vec![self.max];
        }
        let span = self.max - self.min;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.max } else { self.min + span * i as f64 / last })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Eval,
    Simulate,
    Oracle,
    Volume,
    Compare,
    Curve,
}

/// Fully validated inputs for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seq: WeightSequence,
    pub t: TRange,
    pub m: usize,
    pub trials: u64,
    pub seed: u64,
    pub block: u64,
    pub workers: usize,
    pub truncation: Truncation,
    pub eps: f64,
    pub fallback: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn check_t(t: f64) -> Result<f64, CliError> {
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(CliError::Invalid(format!("t = {t} must be finite and nonnegative")))
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl RunConfig {
    fn base(command: CommandKind, seq: &str, t: TRange, output: &OutputArgs) -> Result<Self, CliError> {
        let seq: WeightSequence = seq.parse()?;
        check_t(t.min)?;
        check_t(t.max)?;
        if t.min > t.max {
            return Err(CliError::Invalid(format!("t-min {} exceeds t-max {}", t.min, t.max)));
        }
        if t.steps == 0 {
            return Err(CliError::Invalid("steps must be at least 1".into()));
        }
        Ok(Self {
            command,
            seq,
            t,
            m: 0,
            trials: 100_000,
            seed: 42,
            block: 500,
            workers: 1,
            truncation: Truncation::default(),
            eps: 1e-12,
            fallback: true,
            format: output.format(),
            out: output.out.clone(),
        })
    }

    fn with_series(mut self, s: &SeriesArgs) -> Result<Self, CliError> {
        self.truncation = Truncation::new(s.rel_tol, s.max_terms).map_err(|e| CliError::Invalid(e.to_string()))?;
        if !(s.eps > 0.0 && s.eps.is_finite()) {
            return Err(CliError::Invalid(format!("eps = {} must be positive", s.eps)));
        }
        self.eps = s.eps;
        Ok(self)
    }

    fn with_mc(mut self, mc: &McArgs) -> Result<Self, CliError> {
        if mc.trials == 0 {
            return Err(CliError::Invalid("trials must be at least 1".into()));
        }
        if mc.block == 0 {
            return Err(CliError::Invalid("block must be at least 1".into()));
        }
        let workers = mc.workers.unwrap_or_else(default_workers);
        if workers == 0 {
            return Err(CliError::Invalid("workers must be at least 1".into()));
        }
        self.trials = mc.trials;
        self.seed = mc.seed;
        self.block = mc.block;
        self.workers = workers;
        Ok(self)
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        match &cli.command {
            Command::Eval {
                seq,
                t,
                series,
                no_fallback,
                output,
            } => {
                let mut c = Self::base(CommandKind::Eval, &seq.seq, TRange::single(*t), output)?.with_series(series)?;
                c.fallback = !no_fallback;
                Ok(c)
            }
            Command::Simulate { seq, t, mc, output } => {
                Self::base(CommandKind::Simulate, &seq.seq, TRange::single(*t), output)?.with_mc(mc)
            }
            Command::Oracle { seq, t, series, output } => {
                Self::base(CommandKind::Oracle, &seq.seq, TRange::single(*t), output)?.with_series(series)
            }
            Command::Volume { seq, m, t, output } => {
                if !t.is_finite() {
                    return Err(CliError::Invalid(format!("t = {t} must be finite")));
                }
                // Volumes are defined for any real t.
                let mut c = Self::base(CommandKind::Volume, seq, TRange::single(t.max(0.0)), output)?;
                c.t = TRange::single(*t);
                c.m = *m;
                Ok(c)
            }
            Command::Compare {
                seq,
                grid,
                series,
                no_fallback,
                mc,
                output,
            } => {
                let range = TRange {
                    min: grid.t_min,
                    max: grid.t_max,
                    steps: grid.steps,
                };
                let mut c = Self::base(CommandKind::Compare, &seq.seq, range, output)?
                    .with_series(series)?
                    .with_mc(mc)?;
                c.fallback = !no_fallback;
                Ok(c)
            }
            Command::Curve {
                seq,
                t,
                t_min,
                steps,
                series,
                no_fallback,
                mc,
                output,
            } => {
                let range = TRange {
                    min: *t_min,
                    max: *t,
                    steps: *steps,
                };
                let mut c = Self::base(CommandKind::Curve, &seq.seq, range, output)?
                    .with_series(series)?
                    .with_mc(mc)?;
                c.fallback = !no_fallback;
                Ok(c)
            }
        }
    }
}
