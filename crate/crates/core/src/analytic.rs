//! Piecewise-analytic evaluation of `f(t, a) = E[N]`.
//!
//! * `t <= a_1`: every `p_m` is a plain simplex volume and
//!   `f = f_0(t; a_1)`.
//! * `a_n < t <= a_{n+1}`: only corners built from `a_1..a_n` lie below
//!   the hyperplane, so
//!
//!   ```text
//!   f = Σ_{m<n} p_m + Σ_{S ⊆ {1..n}} (-1)^{|S|} f_{n,+}(t - Σ_S a; a_1).
//!   ```
//!
//!   The head `Σ_{m<n} p_m` equals `n` whenever `t >= a_1 + ... + a_{n-1}`,
//!   which always holds for `n <= 2`. Below that threshold the head is
//!   evaluated exactly.

use alloc::vec::Vec;
use core::fmt;

use crate::sequence::{Bracket, WeightSequence};
use crate::series::{laguerre_e, tail_series, tail_series_plus, SeriesError, Truncation};
use crate::subsets::{for_each_subset, Stop};
use crate::sum::CompensatedSum;
use crate::volume::{oracle_expectation, region_volume, VolumeError};

pub const DEFAULT_MAX_N: usize = 30;
pub const DEFAULT_ORACLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Series,
    Theorem(usize),
    OracleFallback,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Series => f.write_str("series"),
            Branch::Theorem(n) => write!(f, "theorem({n})"),
            Branch::OracleFallback => f.write_str("oracle_fallback"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub value: f64,
    pub branch: Branch,
    /// Sum of the truncation bounds of every series evaluated.
    pub error_bound: f64,
    pub subsets_evaluated: u64,
    pub subsets_pruned: u64,
    pub series_terms: usize,
    /// The head `Σ_{m<n} p_m` differed from `n` and was computed exactly.
    pub head_corrected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub truncation: Truncation,
    pub fallback: bool,
    pub max_n: usize,
    pub oracle_eps: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            truncation: Truncation::default(),
            fallback: true,
            max_n: DEFAULT_MAX_N,
            oracle_eps: DEFAULT_ORACLE_EPS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadTerm {
    /// `Σ_{m<n} p_m`, equal to `n` when `t >= A_{n-1}`.
    Exact,
    /// The constant `n`, valid only for `t >= A_{n-1}`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremConfig {
    pub prune: bool,
    pub head: HeadTerm,
    pub max_n: usize,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            prune: true,
            head: HeadTerm::Exact,
            max_n: DEFAULT_MAX_N,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum AnalyticError {
    #[error("analytic formula does not cover t = {t} for this sequence")]
    Uncovered { t: f64 },
    #[error("theorem branch n = {n} exceeds the cap of {cap}; use the volume oracle")]
    TooManySubsets { n: usize, cap: usize },
    #[error("t = {t} is not in (a_{n}, a_{next}]", next = n + 1)]
    NotInInterval { n: usize, t: f64 },
    #[error("t = {t} is outside the corollary domain for s = {s}")]
    CorollaryDomain { s: u32, t: f64 },
    #[error("threshold {0} must be finite and nonnegative")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
}

/// `f(t, a)` on whichever branch covers `t`.
pub fn expected_crossings(seq: &WeightSequence, t: f64, opts: &EvalOptions) -> Result<EvalReport, AnalyticError> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(AnalyticError::InvalidThreshold(t));
    }
    match seq.bracket(t) {
        Bracket::Below => {
            let v = tail_series(seq, 0, 1, t, &opts.truncation)?;
            Ok(EvalReport {
                value: v.value,
                branch: Branch::Series,
                error_bound: v.tail_bound,
                subsets_evaluated: 1,
                subsets_pruned: 0,
                series_terms: v.terms_used,
                head_corrected: false,
            })
        }
        Bracket::Interval(n) => {
            let config = TheoremConfig {
                max_n: opts.max_n,
                ..TheoremConfig::default()
            };
            match theorem_sum_with(seq, n, t, &opts.truncation, &config) {
                Err(AnalyticError::TooManySubsets { .. }) if opts.fallback => oracle_report(seq, t, opts),
                other => other,
            }
        }
        Bracket::Uncovered if opts.fallback => oracle_report(seq, t, opts),
        Bracket::Uncovered => Err(AnalyticError::Uncovered { t }),
    }
}

fn oracle_report(seq: &WeightSequence, t: f64, opts: &EvalOptions) -> Result<EvalReport, AnalyticError> {
    let o = oracle_expectation(seq, t, opts.oracle_eps)?;
    Ok(EvalReport {
        value: o.value,
        branch: Branch::OracleFallback,
        error_bound: o.tail_bound,
        subsets_evaluated: 0,
        subsets_pruned: 0,
        series_terms: o.dims_used,
        head_corrected: false,
    })
}

/// Inclusion-exclusion branch for `a_n < t <= a_{n+1}`.
pub fn theorem_sum(seq: &WeightSequence, n: usize, t: f64, tr: &Truncation) -> Result<EvalReport, AnalyticError> {
    theorem_sum_with(seq, n, t, tr, &TheoremConfig::default())
}

pub fn theorem_sum_with(
    seq: &WeightSequence,
    n: usize,
    t: f64,
    tr: &Truncation,
    config: &TheoremConfig,
) -> Result<EvalReport, AnalyticError> {
    if n == 0 || !(seq.at(n) < t && t <= seq.at(n + 1)) {
        return Err(AnalyticError::NotInInterval { n, t });
    }
    if n > config.max_n {
        return Err(AnalyticError::TooManySubsets { n, cap: config.max_n });
    }

    let mut total = CompensatedSum::new();
    let exact_head = t >= seq.prefix_sum(n - 1);
    let head_corrected = config.head == HeadTerm::Exact && !exact_head;
    if head_corrected {
        for m in 0..n {
            total.add(region_volume(seq, m, t)?.value);
        }
    } else {
        total.add(n as f64);
    }

    let weights = seq.leading(n);
    let mut error_bound = 0.0;
    let mut series_terms = 0;
    let stats = for_each_subset(&weights, t, config.prune, u64::MAX, |s, signed| {
        let v = tail_series_plus(seq, n, t - s, tr)?;
        total.add(signed * v.value);
        error_bound += signed.abs() * v.tail_bound;
        series_terms += v.terms_used;
        Ok::<(), SeriesError>(())
    })
    .map_err(|e| match e {
        Stop::Visit(e) => AnalyticError::Series(e),
        Stop::Budget => AnalyticError::TooManySubsets { n, cap: config.max_n },
    })?;

    Ok(EvalReport {
        value: total.value(),
        branch: Branch::Theorem(n),
        error_bound,
        subsets_evaluated: stats.evaluated,
        subsets_pruned: stats.pruned,
        series_terms,
        head_corrected,
    })
}

/// One signed term `(-1)^{|S|} f_{n,+}(t - Σ_S a; a_1)` of the theorem
/// branch, listed by the 1-based indices in `S`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedSubset {
    pub sign: i8,
    pub indices: Vec<usize>,
}

/// Every term of the theorem branch for `n`, in depth-first order.
pub fn theorem_terms(n: usize) -> Vec<SignedSubset> {
    fn walk(next: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<SignedSubset>) {
        out.push(SignedSubset {
            sign: if current.len().is_multiple_of(2) { 1 } else { -1 },
            indices: current.clone(),
        });
        for i in next..=n {
            current.push(i);
            walk(i + 1, n, current, out);
            current.pop();
        }
    }
    let mut out = Vec::with_capacity(1 << n.min(20));
    walk(1, n, &mut Vec::new(), &mut out);
    out
}

/// Closed form for `a_k = k^s`: `e_s(t)` on `[0, 1]` and
/// `e_s(t) - e_s(t - 1) + 1` on `(1, 2^s]`.
pub fn corollary_dattoli(s: u32, t: f64, tr: &Truncation) -> Result<f64, AnalyticError> {
    let upper = if s == 0 { 1.0 } else { libm::exp2(s as f64) };
    if !(t >= 0.0 && t <= upper) {
        return Err(AnalyticError::CorollaryDomain { s, t });
    }
    let e_t = laguerre_e(s, t, tr)?.value;
    if t <= 1.0 {
        Ok(e_t)
    } else {
        Ok(e_t - laguerre_e(s, t - 1.0, tr)?.value + 1.0)
    }
}
