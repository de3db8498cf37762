//! Command implementations. Each renders into caller-supplied writers so
//! the same code backs the binary and the integration tests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crossing_core::analytic::{expected_crossings, EvalOptions, EvalReport, DEFAULT_MAX_N};
use crossing_core::montecarlo::{Experiment, ExperimentResult};
use crossing_core::volume::{oracle_expectation, region_volume};

use crate::config::{CommandKind, Format, RunConfig};
use crate::error::CliError;
use crate::format::*;
use crate::parallel::McRunner;

fn eval_options(config: &RunConfig) -> EvalOptions {
    EvalOptions {
        truncation: config.truncation,
        fallback: config.fallback,
        max_n: DEFAULT_MAX_N,
        oracle_eps: config.eps,
    }
}

fn analytic(config: &RunConfig, t: f64) -> Result<EvalReport, CliError> {
    Ok(expected_crossings(&config.seq, t, &eval_options(config))?)
}

fn simulate(config: &RunConfig, runner: &McRunner, t: f64, seed: u64) -> Result<ExperimentResult, CliError> {
    let exp = Experiment::new(&config.seq, t, config.trials, seed, config.block)?;
    Ok(runner.run(&exp)?)
}

/// Path of the trace file written beside a curve file.
pub fn trace_path(curve: &Path) -> PathBuf {
    let stem = curve.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    curve.with_file_name(format!("{stem}.trace.csv"))
}

fn open(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Runs `config`, writing to `stdout` unless an output path is set.
/// Diagnostics go to `stderr`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let mut file;
    let out: &mut dyn Write = match &config.out {
        Some(path) => {
            file = open(path)?;
            &mut file
        }
        None => stdout,
    };
    match config.command {
        CommandKind::Eval => cmd_eval(config, out),
        CommandKind::Simulate => cmd_simulate(config, out, stderr),
        CommandKind::Oracle => cmd_oracle(config, out),
        CommandKind::Volume => cmd_volume(config, out),
        CommandKind::Compare => cmd_compare(config, out),
        CommandKind::Curve => {
            if let Some(path) = &config.out {
                let mut trace = open(&trace_path(path))?;
                cmd_curve(config, out, Some(&mut trace))?;
                trace.flush()?;
            } else {
                cmd_curve(config, out, None)?;
            }
            Ok(())
        }
    }?;
    out.flush()?;
    Ok(())
}

pub fn cmd_eval(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let t = config.t.max;
    let r = analytic(config, t)?;
    match config.format {
        Format::Csv => write_table(
            out,
            &EVAL_HEADER,
            &[vec![
                real(t),
                real(r.value),
                r.branch.to_string(),
                real(r.error_bound),
                r.subsets_evaluated.to_string(),
                r.subsets_pruned.to_string(),
                r.series_terms.to_string(),
                r.head_corrected.to_string(),
            ]],
        ),
        Format::Json => write_json(
            out,
            &EvalJson {
                seq: config.seq.to_string(),
                t,
                value: r.value,
                branch: r.branch.to_string(),
                error_bound: r.error_bound,
                subsets_evaluated: r.subsets_evaluated,
                subsets_pruned: r.subsets_pruned,
                series_terms: r.series_terms,
                head_corrected: r.head_corrected,
            },
        ),
    }
}

pub fn cmd_simulate(config: &RunConfig, out: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let t = config.t.max;
    let runner = McRunner::new(config.workers);
    let r = simulate(config, &runner, t, config.seed)?;
    let s = r.stats;
    match config.format {
        Format::Csv => {
            write_table(out, &TRACE_HEADER, &trace_rows(&r.trace.rows))?;
            writeln!(
                stderr,
                "trials={} mean={} stderr={} variance={} min_n={} max_n={}",
                s.trials,
                real(s.mean),
                real(s.stderr),
                real(s.variance),
                s.min_n,
                s.max_n
            )?;
            Ok(())
        }
        Format::Json => write_json(
            out,
            &StatsJson {
                seq: config.seq.to_string(),
                t,
                seed: config.seed,
                block: config.block,
                trials: s.trials,
                mean: s.mean,
                variance: s.variance,
                stderr: s.stderr,
                min_n: s.min_n,
                max_n: s.max_n,
            },
        ),
    }
}

pub fn cmd_oracle(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let t = config.t.max;
    let o = oracle_expectation(&config.seq, t, config.eps)?;
    match config.format {
        Format::Csv => write_table(
            out,
            &ORACLE_HEADER,
            &[vec![real(t), real(o.value), real(o.tail_bound), o.dims_used.to_string()]],
        ),
        Format::Json => write_json(
            out,
            &OracleJson {
                seq: config.seq.to_string(),
                t,
                value: o.value,
                tail_bound: o.tail_bound,
                dims_used: o.dims_used,
            },
        ),
    }
}

pub fn cmd_volume(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let t = config.t.max;
    let v = region_volume(&config.seq, config.m, t)?;
    match config.format {
        Format::Csv => write_table(
            out,
            &VOLUME_HEADER,
            &[vec![
                config.m.to_string(),
                real(t),
                real(v.value),
                real(v.cancellation),
                v.reflected.to_string(),
            ]],
        ),
        Format::Json => write_json(
            out,
            &VolumeJson {
                seq: config.seq.to_string(),
                m: config.m,
                t,
                value: v.value,
                cancellation: v.cancellation,
                reflected: v.reflected,
            },
        ),
    }
}

fn z_score(mean: f64, truth: f64, stderr: f64) -> f64 {
    let diff = mean - truth;
    if stderr > 0.0 {
        diff / stderr
    } else if diff.abs() <= 1e-12 * truth.abs().max(1.0) {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    }
}

/// Rows of the comparison table; point `i` simulates with seed `seed + i`.
pub fn compare_rows(config: &RunConfig) -> Result<Vec<CompareRow>, CliError> {
    let runner = McRunner::new(config.workers);
    config
        .t
        .points()
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            let a = analytic(config, t)?;
            let o = oracle_expectation(&config.seq, t, config.eps)?;
            let mc = simulate(config, &runner, t, config.seed.wrapping_add(i as u64))?.stats;
            Ok(CompareRow {
                t,
                analytic: a.value,
                branch: a.branch.to_string(),
                oracle: o.value,
                mc_mean: mc.mean,
                mc_stderr: mc.stderr,
                abs_diff: (a.value - o.value).abs(),
                z: z_score(mc.mean, a.value, mc.stderr),
            })
        })
        .collect()
}

pub fn cmd_compare(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = compare_rows(config)?;
    match config.format {
        Format::Csv => write_table(out, &COMPARE_HEADER, &rows.iter().map(CompareRow::fields).collect::<Vec<_>>()),
        Format::Json => write_json(out, &rows),
    }
}

pub struct CurveData {
    pub curve: Vec<CurvePoint>,
    pub trace: Vec<TracePoint>,
}

pub fn curve_data(config: &RunConfig) -> Result<CurveData, CliError> {
    let curve = config
        .t
        .points()
        .into_iter()
        .map(|t| {
            let r = analytic(config, t)?;
            Ok(CurvePoint {
                t,
                f: r.value,
                branch: r.branch.to_string(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let runner = McRunner::new(config.workers);
    let mc = simulate(config, &runner, config.t.max, config.seed)?;
    Ok(CurveData {
        curve,
        trace: mc.trace.rows.iter().map(TracePoint::from).collect(),
    })
}

/// Curve CSV then trace CSV. Without a separate trace sink both go to
/// `out`, separated by one empty line.
pub fn cmd_curve(config: &RunConfig, out: &mut dyn Write, trace_out: Option<&mut dyn Write>) -> Result<(), CliError> {
    let data = curve_data(config)?;
    if config.format == Format::Json {
        return write_json(
            out,
            &CurveJson {
                seq: config.seq.to_string(),
                curve: data.curve,
                trace_t: config.t.max,
                trace: data.trace,
            },
        );
    }
    let curve_rows: Vec<Vec<String>> = data
        .curve
        .iter()
        .map(|p| vec![real(p.t), real(p.f), p.branch.clone()])
        .collect();
    let trace_rows: Vec<Vec<String>> = data
        .trace
        .iter()
        .map(|r| vec![r.trials.to_string(), real(r.running_mean), real(r.running_stderr)])
        .collect();
    write_table(&mut *out, &CURVE_HEADER, &curve_rows)?;
    match trace_out {
        Some(w) => write_table(w, &TRACE_HEADER, &trace_rows),
        None => {
            out.write_all(b"\n")?;
            write_table(out, &TRACE_HEADER, &trace_rows)
        }
    }
}

/// Splits the combined curve output back into its two CSV sections.
pub fn split_sections(text: &str) -> (&str, &str) {
    text.split_once("\n\n").map_or((text, ""), |(a, b)| (a, b))
}
