//! Weight sequences `0 < a_1 <= a_2 <= ...` and the analytic bracket of a
//! threshold.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::sum::CompensatedSum;

/// Number of leading terms (and prefix sums) cached at construction.
pub const CACHE_LEN: usize = 1024;

/// Probe depth used by [`WeightSequence::new`] for generated kinds.
pub const DEFAULT_PROBE_DEPTH: usize = 4096;

/// Upper limit on the index searched by [`WeightSequence::bracket`].
pub const BRACKET_PROBE_LIMIT: usize = 1_000_000;

/// Generator for the weights.
#[derive(Debug, Clone, PartialEq)]
pub enum SeqKind {
    /// `a_k = c`.
    Constant(f64),
    /// `a_k = k^s`.
    Power(f64),
    /// `a_k = 1 - q^k`.
    QGeometric(f64),
    /// Listed weights; the last entry repeats indefinitely.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ViolationReason {
    NonPositive(f64),
    NonFinite,
    Decreasing { previous: f64, next: f64 },
    Empty,
}

/// First index (1-based) at which a generator breaks positivity or
/// monotonicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub reason: ViolationReason,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reason {
            ViolationReason::NonPositive(v) => write!(f, "a_{} = {} is not positive", self.index, v),
            ViolationReason::NonFinite => write!(f, "a_{} is not finite", self.index),
            ViolationReason::Decreasing { previous, next } => write!(
                f,
                "a_{} = {} is smaller than a_{} = {}",
                self.index,
                next,
                self.index - 1,
                previous
            ),
            ViolationReason::Empty => f.write_str("explicit list is empty"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SequenceError {
    #[error("weight index must be at least 1")]
    ZeroIndex,
    #[error("invalid weight sequence: {0}")]
    Invalid(Violation),
    #[error("cannot parse sequence `{spec}`: {reason}")]
    Syntax { spec: String, reason: String },
}

/// Where a threshold falls relative to the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    /// `t <= a_1`.
    Below,
    /// `a_n < t <= a_{n+1}`.
    Interval(usize),
    /// No interval `(a_n, a_{n+1}]` contains `t`.
    Uncovered,
}

impl SeqKind {
    /// Closed-form `a_k` for `k >= 1`.
    fn closed_form(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            SeqKind::Constant(c) => *c,
            SeqKind::Power(s) => {
                if *s == 0.0 {
                    1.0
                } else {
                    libm::pow(k as f64, *s)
                }
            }
            SeqKind::QGeometric(q) => {
                if *q == 0.0 {
                    1.0
                } else {
                    -libm::expm1(k as f64 * libm::log(*q))
                }
            }
            SeqKind::Explicit(values) => *values.get(k - 1).unwrap_or_else(|| values.last().unwrap()),
        }
    }

    /// Checks positivity and monotonicity over the first `probe_depth`
    /// terms. Explicit lists are checked in full.
    pub fn validate(&self, probe_depth: usize) -> Result<(), Violation> {
        let depth = match self {
            SeqKind::Explicit(values) => {
                if values.is_empty() {
                    return Err(Violation {
                        index: 1,
                        reason: ViolationReason::Empty,
                    });
                }
                values.len()
            }
            SeqKind::QGeometric(q) if !(0.0..1.0).contains(q) => {
                // 1 - q^k is nonpositive (q >= 1) or oscillates (q < 0).
                let a1 = 1.0 - q;
                return Err(Violation {
                    index: if a1 > 0.0 { 2 } else { 1 },
                    reason: if a1 > 0.0 {
                        ViolationReason::Decreasing {
                            previous: a1,
                            next: 1.0 - q * q,
                        }
                    } else if a1.is_nan() {
                        ViolationReason::NonFinite
                    } else {
                        ViolationReason::NonPositive(a1)
                    },
                });
            }
            _ => probe_depth.max(1),
        };
        let mut previous = 0.0;
        for k in 1..=depth {
            let a = self.closed_form(k);
            if !a.is_finite() {
                return Err(Violation {
                    index: k,
                    reason: ViolationReason::NonFinite,
                });
            }
            if a <= 0.0 {
                return Err(Violation {
                    index: k,
                    reason: ViolationReason::NonPositive(a),
                });
            }
            if k > 1 && a < previous {
                return Err(Violation {
                    index: k,
                    reason: ViolationReason::Decreasing { previous, next: a },
                });
            }
            previous = a;
        }
        Ok(())
    }

    /// Supremum of the sequence when it is known to be bounded.
    fn supremum(&self) -> Option<f64> {
        match self {
            SeqKind::Constant(c) => Some(*c),
            SeqKind::Power(s) if *s == 0.0 => Some(1.0),
            SeqKind::Power(_) => None,
            SeqKind::QGeometric(_) => Some(1.0),
            SeqKind::Explicit(values) => values.last().copied(),
        }
    }
}

impl fmt::Display for SeqKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqKind::Constant(c) => write!(f, "const:{c}"),
            SeqKind::Power(s) => write!(f, "power:{s}"),
            SeqKind::QGeometric(q) => write!(f, "qgeom:{q}"),
            SeqKind::Explicit(values) => {
                f.write_str("list:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// A validated weight sequence with cached leading terms and prefix sums.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: SeqKind,
    terms: Vec<f64>,
    prefix: Vec<f64>,
}

impl WeightSequence {
    pub fn new(kind: SeqKind) -> Result<Self, SequenceError> {
        kind.validate(DEFAULT_PROBE_DEPTH)
            .map_err(SequenceError::Invalid)?;
        let terms: Vec<f64> = (1..=CACHE_LEN).map(|k| kind.closed_form(k)).collect();
        let mut prefix = Vec::with_capacity(CACHE_LEN + 1);
        let mut acc = CompensatedSum::new();
        prefix.push(0.0);
        for &a in &terms {
            acc.add(a);
            prefix.push(acc.value());
        }
        Ok(Self {
            kind,
            terms,
            prefix,
        })
    }

    pub fn constant(c: f64) -> Result<Self, SequenceError> {
        Self::new(SeqKind::Constant(c))
    }

    pub fn power(s: f64) -> Result<Self, SequenceError> {
        Self::new(SeqKind::Power(s))
    }

    pub fn qgeom(q: f64) -> Result<Self, SequenceError> {
        Self::new(SeqKind::QGeometric(q))
    }

    pub fn explicit(values: impl Into<Vec<f64>>) -> Result<Self, SequenceError> {
        Self::new(SeqKind::Explicit(values.into()))
    }

    pub fn kind(&self) -> &SeqKind {
        &self.kind
    }

    /// `a_k` for `k >= 1`.
    pub fn term(&self, k: usize) -> Result<f64, SequenceError> {
        if k == 0 {
            return Err(SequenceError::ZeroIndex);
        }
        Ok(self.at(k))
    }

    /// `a_k` without the index check; `k` must be at least 1.
    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        match self.terms.get(k.wrapping_sub(1)) {
            Some(&a) => a,
            None => {
                assert!(k >= 1, "weight index must be at least 1");
                self.kind.closed_form(k)
            }
        }
    }

    /// `A_n = a_1 + ... + a_n`, with `A_0 = 0`.
    pub fn prefix_sum(&self, n: usize) -> f64 {
        if let Some(&s) = self.prefix.get(n) {
            return s;
        }
        let mut acc = CompensatedSum::new();
        acc.add(self.prefix[CACHE_LEN]);
        for k in CACHE_LEN + 1..=n {
            acc.add(self.kind.closed_form(k));
        }
        acc.value()
    }

    /// The first `n` weights.
    pub fn leading(&self, n: usize) -> Vec<f64> {
        (1..=n).map(|k| self.at(k)).collect()
    }

    pub fn validate(&self, probe_depth: usize) -> Result<(), Violation> {
        self.kind.validate(probe_depth)
    }

    /// Locates `t` among the weights using half-open intervals
    /// `(a_n, a_{n+1}]`. Plateaus give empty intervals and are skipped.
    pub fn bracket(&self, t: f64) -> Bracket {
        if t <= self.at(1) {
            return Bracket::Below;
        }
        if let Some(sup) = self.kind.supremum() {
            // Bounded generators never reach their supremum except for
            // constant tails, which are stored exactly.
            let reaches = matches!(self.kind, SeqKind::Explicit(_) | SeqKind::Constant(_))
                || matches!(self.kind, SeqKind::Power(s) if s == 0.0)
                || matches!(self.kind, SeqKind::QGeometric(q) if q == 0.0);
            if t > sup || (t == sup && !reaches) {
                return Bracket::Uncovered;
            }
        }
        // Smallest j with a_j >= t, by exponential then binary search.
        let mut hi = 2usize;
        while self.at(hi) < t {
            if hi >= BRACKET_PROBE_LIMIT {
                return Bracket::Uncovered;
            }
            hi = (hi * 2).min(BRACKET_PROBE_LIMIT);
        }
        let mut lo = hi / 2; // a_lo < t
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.at(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Bracket::Interval(hi - 1)
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

fn parse_real(spec: &str, text: &str) -> Result<f64, SequenceError> {
    text.trim().parse::<f64>().map_err(|_| SequenceError::Syntax {
        spec: spec.to_string(),
        reason: alloc::format!("`{}` is not a decimal number", text.trim()),
    })
}

impl FromStr for SeqKind {
    type Err = SequenceError;

    /// `const:<c>` | `power:<s>` | `qgeom:<q>` | `list:<a1>,<a2>,...`
    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let (tag, body) = spec.split_once(':').ok_or_else(|| SequenceError::Syntax {
            spec: spec.to_string(),
            reason: "expected `<kind>:<parameters>`".to_string(),
        })?;
        match tag.trim() {
            "const" => Ok(SeqKind::Constant(parse_real(spec, body)?)),
            "power" => Ok(SeqKind::Power(parse_real(spec, body)?)),
            "qgeom" => Ok(SeqKind::QGeometric(parse_real(spec, body)?)),
            "list" => body
                .split(',')
                .map(|v| parse_real(spec, v))
                .collect::<Result<Vec<_>, _>>()
                .map(SeqKind::Explicit),
            other => Err(SequenceError::Syntax {
                spec: spec.to_string(),
                reason: alloc::format!("unknown kind `{other}` (expected const, power, qgeom or list)"),
            }),
        }
    }
}

impl FromStr for WeightSequence {
    type Err = SequenceError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        WeightSequence::new(spec.parse()?)
    }
}
