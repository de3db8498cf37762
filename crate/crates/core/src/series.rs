//! Tail series `f_n(t; a_k) = Σ_{i>=n} t^i / (i! a_k a_{k+1} ... a_{i+k-1})`
//! with a certified truncation bound, and the special functions that
//! arise for power and q-geometric weights.
//!
//! Every series here has a nonincreasing term ratio once it starts to
//! converge, so after a term `u_i` with ratio `r < 1/2` the remainder is
//! at most `u_i r / (1 - r)`.

use crate::sequence::WeightSequence;
use crate::sum::CompensatedSum;

/// Stopping policy for the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    /// Stop once a term falls below `rel_tol` times the partial sum.
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 10_000,
        }
    }
}

impl Truncation {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self, SeriesError> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) || max_terms == 0 {
            return Err(SeriesError::InvalidTruncation { rel_tol, max_terms });
        }
        Ok(Self { rel_tol, max_terms })
    }
}

/// Partial sum of a series together with a bound on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

impl SeriesValue {
    pub const ZERO: SeriesValue = SeriesValue {
        value: 0.0,
        tail_bound: 0.0,
        terms_used: 0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum SeriesError {
    #[error("series not converged after {terms_used} terms (partial value {partial})")]
    TruncationFailure { partial: f64, terms_used: usize },
    #[error("invalid truncation policy: rel_tol={rel_tol}, max_terms={max_terms}")]
    InvalidTruncation { rel_tol: f64, max_terms: usize },
    #[error("argument {0} must be nonnegative")]
    NegativeArgument(f64),
    #[error("argument is not finite")]
    NonFinite,
    #[error("q = {0} must lie in [0, 1)")]
    QOutOfRange(f64),
}

/// `(x)_+ = max(x, 0)`.
#[inline]
pub fn clip_plus(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Sums `Σ_{i>=start} u_i` where `u_start = first` and
/// `u_{i+1} = u_i * ratio(i)`. `ratio` must be nonincreasing from the
/// point where it drops below 1/2.
fn ratio_series(
    first: f64,
    start: usize,
    ratio: impl Fn(usize) -> f64,
    tr: &Truncation,
) -> Result<SeriesValue, SeriesError> {
    let mut sum = CompensatedSum::new();
    let mut term = first;
    let mut i = start;
    let mut used = 0;
    loop {
        sum.add(term);
        used += 1;
        let r = ratio(i);
        if r < 0.5 && term <= tr.rel_tol * sum.value() {
            return Ok(SeriesValue {
                value: sum.value(),
                tail_bound: term * r / (1.0 - r),
                terms_used: used,
            });
        }
        if used >= tr.max_terms {
            return Err(SeriesError::TruncationFailure {
                partial: sum.value(),
                terms_used: used,
            });
        }
        term *= r;
        i += 1;
    }
}

/// `f_n(t; a_k)`, identically zero for `t < 0`.
///
/// Terms follow the recurrence `u_{i+1} = u_i t / ((i + 1) a_{i+k})`; no
/// factorial or weight product is formed explicitly.
pub fn tail_series(
    seq: &WeightSequence,
    n: usize,
    k: usize,
    t: f64,
    tr: &Truncation,
) -> Result<SeriesValue, SeriesError> {
    assert!(k >= 1, "weight offset k must be at least 1");
    if !t.is_finite() {
        return Err(SeriesError::NonFinite);
    }
    if t < 0.0 {
        return Ok(SeriesValue::ZERO);
    }
    let ratio = |i: usize| t / ((i + 1) as f64 * seq.at(i + k));
    let mut first = 1.0;
    for i in 0..n {
        first *= ratio(i);
    }
    ratio_series(first, n, ratio, tr)
}

/// `f_{n,+}(x; a_1)`: the tail series with a nonpositive argument mapped
/// to zero. For `n >= 1` this is continuous at 0 since `f_n(0) = 0`.
pub fn tail_series_plus(
    seq: &WeightSequence,
    n: usize,
    x: f64,
    tr: &Truncation,
) -> Result<SeriesValue, SeriesError> {
    if x <= 0.0 && n >= 1 {
        return Ok(SeriesValue::ZERO);
    }
    tail_series(seq, n, 1, clip_plus(x), tr)
}

/// Laguerre-type exponential `e_s(t) = Σ t^n / (n!)^{s+1}`.
pub fn laguerre_e(s: u32, t: f64, tr: &Truncation) -> Result<SeriesValue, SeriesError> {
    if !t.is_finite() {
        return Err(SeriesError::NonFinite);
    }
    if t < 0.0 {
        return Err(SeriesError::NegativeArgument(t));
    }
    let exponent = s as f64 + 1.0;
    ratio_series(1.0, 0, |i| t / libm::pow((i + 1) as f64, exponent), tr)
}

/// `(q; q)_n = (1 - q)(1 - q^2)...(1 - q^n)`, with `(q; q)_0 = 1`.
pub fn q_pochhammer(q: f64, n: usize) -> f64 {
    let mut product = 1.0;
    let mut power = 1.0;
    for _ in 0..n {
        power *= q;
        product *= 1.0 - power;
    }
    product
}

/// q-exponential `e_{1,q}(t) = Σ t^n / (n! (q; q)_n)`.
///
/// The series converges for every `t >= 0`; branch validity is left to the
/// caller.
pub fn q_exponential(q: f64, t: f64, tr: &Truncation) -> Result<SeriesValue, SeriesError> {
    if !(0.0..1.0).contains(&q) {
        return Err(SeriesError::QOutOfRange(q));
    }
    if !t.is_finite() {
        return Err(SeriesError::NonFinite);
    }
    if t < 0.0 {
        return Err(SeriesError::NegativeArgument(t));
    }
    // Computed from q directly rather than through the sequence cache.
    let ratio = |i: usize| {
        let qp = libm::pow(q, (i + 1) as f64);
        t / ((i + 1) as f64 * (1.0 - qp))
    };
    ratio_series(1.0, 0, ratio, tr)
}
