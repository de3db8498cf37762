//! Block-parallel Monte Carlo on a fixed-size thread pool.

use crossing_core::montecarlo::{ExperimentResult, Experiment, McError};
use rayon::prelude::*;

pub struct McRunner {
    pool: rayon::ThreadPool,
}

impl McRunner {
    pub fn new(workers: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .expect("failed to start worker threads");
        Self { pool }
    }

    pub fn workers(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs every block on the pool; the summaries are merged in block
    /// order, so the result matches [`Experiment::run`] exactly.
    pub fn run(&self, exp: &Experiment<'_>) -> Result<ExperimentResult, McError> {
        let blocks = self.pool.install(|| {
            (0..exp.block_count())
                .into_par_iter()
                .map(|b| exp.run_block(b))
                .collect::<Result<Vec<_>, _>>()
        })?;
        Ok(exp.assemble(blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crossing_core::WeightSequence;

    #[test]
    fn matches_sequential_run() {
        let seq = WeightSequence::power(1.0).unwrap();
        let exp = Experiment::new(&seq, 2.5, 20_000, 7, 500).unwrap();
        let sequential = exp.run().unwrap();
        for workers in [1, 3, 8] {
            assert_eq!(McRunner::new(workers).run(&exp).unwrap(), sequential);
        }
    }
}
