//! Streaming mean and variance with an exact pairwise merge.

/// Welford accumulator; `merge` uses the Chan et al. combination so block
/// summaries can be reduced in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
    min: f64,
    max: f64,
}

impl Default for RunningStats {
    fn default() -> Self {
        Self::new()
    }
}

impl RunningStats {
    pub const fn new() -> Self {
        Self {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * (n_b / n);
        self.m2 += other.m2 + delta * delta * (n_a * n_b / n);
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.count as f64)
        }
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}

/// Summary of a stopping-index experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialStats {
    pub trials: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub min_n: u64,
    pub max_n: u64,
}

impl From<&RunningStats> for TrialStats {
    fn from(s: &RunningStats) -> Self {
        Self {
            trials: s.count,
            mean: s.mean,
            variance: s.variance(),
            stderr: s.stderr(),
            min_n: if s.count == 0 { 0 } else { s.min as u64 },
            max_n: if s.count == 0 { 0 } else { s.max as u64 },
        }
    }
}
