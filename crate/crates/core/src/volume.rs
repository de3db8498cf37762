//! Exact volumes `p_m = |{x ∈ [0,1]^m : a_1 x_1 + ... + a_m x_m <= t}|` and
//! the oracle `f(t, a) = Σ_m p_m`.
//!
//! `p_m` is evaluated by inclusion-exclusion over the box corners,
//!
//! ```text
//! p_m(t) = 1/(m! a_1...a_m) Σ_{S ⊆ {1..m}} (-1)^{|S|} (t - Σ_S a)_+^m,
//! ```
//!
//! and `p_m = P(N > m)` for the stopping index `N`, so summing it gives
//! `E[N]`.

use crate::rng::Substream;
use crate::sequence::WeightSequence;
use crate::subsets::{for_each_subset, Stop};
use crate::sum::CompensatedSum;

pub const DEFAULT_MAX_DIM: usize = 512;
pub const DEFAULT_SUBSET_BUDGET: u64 = 1 << 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeLimits {
    pub max_dim: usize,
    /// Maximum number of subset-tree nodes visited for one `p_m`.
    pub subset_budget: u64,
}

impl Default for VolumeLimits {
    fn default() -> Self {
        Self {
            max_dim: DEFAULT_MAX_DIM,
            subset_budget: DEFAULT_SUBSET_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeResult {
    pub value: f64,
    pub m: usize,
    /// `Σ|terms| / value`; the relative error is about this times epsilon.
    pub cancellation: f64,
    /// Whether the complement `1 - p_m(A_m - t)` was evaluated.
    pub reflected: bool,
    pub subsets_evaluated: u64,
    pub subsets_pruned: u64,
}

impl VolumeResult {
    fn exact(value: f64, m: usize) -> Self {
        Self {
            value,
            m,
            cancellation: 1.0,
            reflected: false,
            subsets_evaluated: 0,
            subsets_pruned: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum VolumeError {
    #[error("dimension {m} exceeds the cap of {cap}")]
    DimensionCap { m: usize, cap: usize },
    #[error("inclusion-exclusion for m = {m} exceeds the subset budget")]
    SubsetBudget { m: usize },
    #[error("oracle tail not certified below {eps} within {dims} dimensions (bound {tail_bound})")]
    NotCertified { eps: f64, dims: usize, tail_bound: f64 },
    #[error("threshold is not finite")]
    NonFinite,
}

/// `p_m(t)` with default limits.
pub fn region_volume(seq: &WeightSequence, m: usize, t: f64) -> Result<VolumeResult, VolumeError> {
    region_volume_with(seq, m, t, &VolumeLimits::default())
}

pub fn region_volume_with(
    seq: &WeightSequence,
    m: usize,
    t: f64,
    limits: &VolumeLimits,
) -> Result<VolumeResult, VolumeError> {
    if t.is_nan() {
        return Err(VolumeError::NonFinite);
    }
    if m == 0 {
        return Ok(VolumeResult::exact(1.0, 0));
    }
    if t <= 0.0 {
        return Ok(VolumeResult::exact(0.0, m));
    }
    let total = seq.prefix_sum(m);
    if t >= total {
        return Ok(VolumeResult::exact(1.0, m));
    }
    if m > limits.max_dim {
        return Err(VolumeError::DimensionCap {
            m,
            cap: limits.max_dim,
        });
    }
    // The map x -> 1 - x sends {Σ a x <= t} onto {Σ a x >= A_m - t}.
    let reflected = t > seq.at(1) && total - t < t;
    let x = if reflected { total - t } else { t };

    let weights = seq.leading(m);
    let mut sum = CompensatedSum::new();
    let mut magnitude = CompensatedSum::new();
    let stats = for_each_subset::<_, core::convert::Infallible>(
        &weights,
        x,
        true,
        limits.subset_budget,
        |s, signed| {
            let r = x - s;
            let mut term = signed;
            for (j, &a) in weights.iter().enumerate() {
                term *= r / ((j + 1) as f64 * a);
            }
            sum.add(term);
            magnitude.add(term.abs());
            Ok(())
        },
    )
    .map_err(|e| match e {
        Stop::Budget => VolumeError::SubsetBudget { m },
        Stop::Visit(never) => match never {},
    })?;

    let raw = sum.value().clamp(0.0, 1.0);
    let value = if reflected { 1.0 - raw } else { raw };
    let cancellation = if value > 0.0 {
        (magnitude.value() / value).max(1.0)
    } else {
        1.0
    };
    Ok(VolumeResult {
        value,
        m,
        cancellation,
        reflected,
        subsets_evaluated: stats.evaluated,
        subsets_pruned: stats.pruned,
    })
}

/// Oracle value of `f(t, a)` with its certified truncation bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub tail_bound: f64,
    /// Number of `p_m` terms summed (including `p_0`).
    pub dims_used: usize,
    /// Largest `cancellation` among the summed volumes.
    pub worst_cancellation: f64,
}

/// `f(t, a) = Σ_{m>=0} p_m`, summed until the simplex bound
/// `p_m <= t^m / (m! a_1...a_m)` certifies a remainder below `eps`.
pub fn oracle_expectation(seq: &WeightSequence, t: f64, eps: f64) -> Result<OracleValue, VolumeError> {
    oracle_expectation_with(seq, t, eps, &VolumeLimits::default())
}

pub fn oracle_expectation_with(
    seq: &WeightSequence,
    t: f64,
    eps: f64,
    limits: &VolumeLimits,
) -> Result<OracleValue, VolumeError> {
    if !t.is_finite() {
        return Err(VolumeError::NonFinite);
    }
    let t_pos = t.max(0.0);
    let mut total = CompensatedSum::new();
    // u_m = t^m / (m! a_1...a_m)
    let mut simplex = 1.0;
    let mut worst = 1.0f64;
    let mut tail_bound = f64::INFINITY;
    for m in 0..=limits.max_dim {
        let p = region_volume_with(seq, m, t, limits)?;
        total.add(p.value);
        worst = worst.max(p.cancellation);

        let next = simplex * t_pos / ((m + 1) as f64 * seq.at(m + 1));
        let rho = t_pos / ((m + 2) as f64 * seq.at(m + 2));
        if rho < 1.0 {
            tail_bound = next / (1.0 - rho);
            if tail_bound < eps {
                return Ok(OracleValue {
                    value: total.value(),
                    tail_bound,
                    dims_used: m + 1,
                    worst_cancellation: worst,
                });
            }
        }
        simplex = next;
    }
    Err(VolumeError::NotCertified {
        eps,
        dims: limits.max_dim + 1,
        tail_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McVolume {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
}

/// Hit-or-miss estimate of `p_m(t)`; deterministic for a fixed seed.
pub fn mc_volume(seq: &WeightSequence, m: usize, t: f64, trials: u64, seed: u64) -> McVolume {
    assert!(trials >= 1, "at least one trial is required");
    let weights = seq.leading(m);
    let mut stream = Substream::new(seed, 0);
    let mut hits = 0u64;
    for _ in 0..trials {
        let s: f64 = weights.iter().map(|&a| a * stream.uniform()).sum();
        if s <= t {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    McVolume {
        estimate: p,
        stderr: libm::sqrt(p * (1.0 - p) / trials as f64),
        hits,
        trials,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(seq: &WeightSequence, m: usize, t: f64) -> f64 {
        region_volume(seq, m, t).unwrap().value
    }

    #[test]
    fn low_dimensional_closed_forms() {
        let c1 = WeightSequence::constant(1.0).unwrap();
        assert_eq!(p(&c1, 1, 1.5), 1.0);
        assert!((p(&c1, 3, 1.0) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(p(&c1, 0, 0.3), 1.0);
        assert_eq!(p(&c1, 0, -1.0), 1.0);
        assert_eq!(p(&c1, 2, 0.0), 0.0);
        // (2.25 - 0.25) / 4
        let l = WeightSequence::explicit(vec![1.0, 2.0]).unwrap();
        assert!((p(&l, 2, 1.5) - 0.5).abs() < 1e-16);
        assert_eq!(p(&l, 2, 3.0), 1.0);
        assert_eq!(p(&l, 2, 7.0), 1.0);
    }

    #[test]
    fn power_one_partials() {
        // Inclusion-exclusion by hand for a = (1, 2, 3, ...) at t = 2.5.
        let s = WeightSequence::power(1.0).unwrap();
        let expected = [1.0, 1.0, 0.9375, 0.336_805_555_555_555_6, 0.058_919_270_833_333_336];
        for (m, &e) in expected.iter().enumerate() {
            assert!((p(&s, m, 2.5) - e).abs() < 1e-15, "m={m}");
        }
    }

    #[test]
    fn dimension_cap() {
        let s = WeightSequence::power(1.0).unwrap();
        let limits = VolumeLimits {
            max_dim: 4,
            ..VolumeLimits::default()
        };
        assert!(region_volume_with(&s, 4, 3.0, &limits).is_ok());
        assert_eq!(
            region_volume_with(&s, 5, 3.0, &limits),
            Err(VolumeError::DimensionCap { m: 5, cap: 4 })
        );
        // t >= A_m short-circuits before the cap.
        assert!(region_volume_with(&s, 5, 15.0, &limits).is_ok());
    }

    #[test]
    fn oracle_values() {
        let c1 = WeightSequence::constant(1.0).unwrap();
        let e = oracle_expectation(&c1, 1.0, 1e-13).unwrap();
        assert!((e.value - core::f64::consts::E).abs() < 1e-12);
        assert!(e.tail_bound < 1e-13);
        assert_eq!(oracle_expectation(&c1, 0.0, 1e-12).unwrap().value, 1.0);
        // mpmath reference.
        let p1 = WeightSequence::power(1.0).unwrap();
        let v = oracle_expectation(&p1, 2.5, 1e-13).unwrap();
        assert!((v.value - 3.339_950_251_387_591).abs() < 1e-12, "{}", v.value);
    }

    #[test]
    fn oracle_reports_missing_certificate() {
        let c1 = WeightSequence::constant(1.0).unwrap();
        let limits = VolumeLimits {
            max_dim: 3,
            ..VolumeLimits::default()
        };
        assert!(matches!(
            oracle_expectation_with(&c1, 1.0, 1e-12, &limits),
            Err(VolumeError::NotCertified { .. })
        ));
    }

    #[test]
    fn mc_volume_trivial_cases() {
        let s = WeightSequence::power(1.0).unwrap();
        let v = mc_volume(&s, 1, 1.0, 1000, 9);
        assert_eq!(v.estimate, 1.0);
        assert_eq!(v.stderr, 0.0);
        assert_eq!(mc_volume(&s, 3, 2.0, 5000, 1), mc_volume(&s, 3, 2.0, 5000, 1));
    }
}
