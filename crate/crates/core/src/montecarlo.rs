//! Direct simulation of the stopping index
//! `N = min{n : a_1 x_1 + ... + a_n x_n > t}`.
//!
//! Trials are grouped into blocks. Block `b` draws from substream `b` of
//! the seed, so a block's summary depends only on `(seed, block size, b)`.
//! Summaries are merged in block order, which makes every reported number
//! independent of how blocks were scheduled across workers.

use alloc::vec::Vec;

use crate::rng::Substream;
use crate::sequence::WeightSequence;
use crate::stats::{RunningStats, TrialStats};

pub const DEFAULT_BLOCK: u64 = 500;
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum McError {
    #[error("trial in block {block} did not stop within {cap} steps")]
    Diverging { block: u64, cap: u64 },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("block size must be at least 1")]
    EmptyBlock,
    #[error("threshold {0} must be finite and nonnegative")]
    InvalidThreshold(f64),
}

/// One row of the running-mean trace, recorded after each block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub trials: u64,
    pub running_mean: f64,
    pub running_stderr: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub stats: TrialStats,
    pub trace: ConvergenceTrace,
}

/// Runs one trial: draws until the weighted sum exceeds `t` and returns
/// the number of draws, or `None` past `cap` steps.
#[inline]
pub fn stopping_index(stream: &mut Substream, seq: &WeightSequence, t: f64, cap: u64) -> Option<u64> {
    let mut n = 0u64;
    let mut sum = 0.0;
    loop {
        if n >= cap {
            return None;
        }
        n += 1;
        sum += seq.at(n as usize) * stream.uniform();
        if sum > t {
            return Some(n);
        }
    }
}

/// A planned experiment; blocks can be run in any order.
#[derive(Debug, Clone)]
pub struct Experiment<'a> {
    seq: &'a WeightSequence,
    t: f64,
    trials: u64,
    seed: u64,
    block: u64,
    step_cap: u64,
}

impl<'a> Experiment<'a> {
    pub fn new(seq: &'a WeightSequence, t: f64, trials: u64, seed: u64, block: u64) -> Result<Self, McError> {
        if trials == 0 {
            return Err(McError::NoTrials);
        }
        if block == 0 {
            return Err(McError::EmptyBlock);
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(McError::InvalidThreshold(t));
        }
        Ok(Self {
            seq,
            t,
            trials,
            seed,
            block,
            step_cap: DEFAULT_STEP_CAP,
        })
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn block_count(&self) -> u64 {
        self.trials.div_ceil(self.block)
    }

    /// Trials in block `index`; only the last block can be short.
    pub fn block_len(&self, index: u64) -> u64 {
        let start = index * self.block;
        self.block.min(self.trials.saturating_sub(start))
    }

    pub fn run_block(&self, index: u64) -> Result<RunningStats, McError> {
        let mut stream = Substream::new(self.seed, index);
        let mut stats = RunningStats::new();
        for _ in 0..self.block_len(index) {
            let n = stopping_index(&mut stream, self.seq, self.t, self.step_cap).ok_or(McError::Diverging {
                block: index,
                cap: self.step_cap,
            })?;
            stats.push(n as f64);
        }
        Ok(stats)
    }

    /// Merges block summaries in the order given, which must be block order.
    pub fn assemble(&self, blocks: impl IntoIterator<Item = RunningStats>) -> ExperimentResult {
        let mut total = RunningStats::new();
        let mut rows = Vec::with_capacity(self.block_count() as usize);
        for block in blocks {
            total.merge(&block);
            rows.push(TraceRow {
                trials: total.count(),
                running_mean: total.mean(),
                running_stderr: total.stderr(),
            });
        }
        ExperimentResult {
            stats: TrialStats::from(&total),
            trace: ConvergenceTrace { rows },
        }
    }

    /// Sequential run over all blocks.
    pub fn run(&self) -> Result<ExperimentResult, McError> {
        let blocks = (0..self.block_count())
            .map(|b| self.run_block(b))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.assemble(blocks))
    }
}

pub fn run_experiment(
    seq: &WeightSequence,
    t: f64,
    trials: u64,
    seed: u64,
    block: u64,
) -> Result<ExperimentResult, McError> {
    Experiment::new(seq, t, trials, seed, block)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_threshold_stops_after_one_draw() {
        let s = WeightSequence::power(1.0).unwrap();
        let r = run_experiment(&s, 0.0, 2000, 5, 500).unwrap();
        assert_eq!(r.stats.mean, 1.0);
        assert_eq!(r.stats.variance, 0.0);
        assert_eq!((r.stats.min_n, r.stats.max_n), (1, 1));
    }

    #[test]
    fn trace_rows_advance_by_block() {
        let s = WeightSequence::constant(1.0).unwrap();
        let r = run_experiment(&s, 1.0, 1250, 1, 500).unwrap();
        let counts: Vec<u64> = r.trace.rows.iter().map(|row| row.trials).collect();
        assert_eq!(counts, alloc::vec![500, 1000, 1250]);
        assert_eq!(r.trace.rows.last().unwrap().running_mean, r.stats.mean);
    }

    #[test]
    fn block_order_of_execution_does_not_matter() {
        let s = WeightSequence::power(1.0).unwrap();
        let exp = Experiment::new(&s, 2.5, 3000, 77, 400).unwrap();
        let sequential = exp.run().unwrap();
        let mut blocks: Vec<(u64, RunningStats)> = (0..exp.block_count())
            .rev()
            .map(|b| (b, exp.run_block(b).unwrap()))
            .collect();
        blocks.sort_by_key(|&(b, _)| b);
        let shuffled = exp.assemble(blocks.into_iter().map(|(_, s)| s));
        assert_eq!(sequential, shuffled);
    }

    #[test]
    fn step_cap_reports_divergence() {
        let s = WeightSequence::constant(1.0).unwrap();
        let exp = Experiment::new(&s, 100.0, 10, 1, 5).unwrap().with_step_cap(20);
        assert_eq!(exp.run(), Err(McError::Diverging { block: 0, cap: 20 }));
    }

    #[test]
    fn rejects_bad_plans() {
        let s = WeightSequence::constant(1.0).unwrap();
        assert_eq!(Experiment::new(&s, 1.0, 0, 1, 5).unwrap_err(), McError::NoTrials);
        assert_eq!(Experiment::new(&s, 1.0, 10, 1, 0).unwrap_err(), McError::EmptyBlock);
        assert!(matches!(Experiment::new(&s, -1.0, 10, 1, 5), Err(McError::InvalidThreshold(_))));
    }
}
