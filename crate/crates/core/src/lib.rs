//! Expected first-passage index of weighted sums of uniform draws.
//!
//! For a positive nondecreasing weight sequence `a` and a threshold `t > 0`,
//! draw `x_1, x_2, ...` uniformly from `[0, 1]` and stop at the first `n`
//! with `a_1 x_1 + ... + a_n x_n > t`. This crate computes `f(t, a) = E[n]`
//! three independent ways:
//!
//! * [`analytic`]: a tail-series branch on `[0, a_1]` and an
//!   inclusion-exclusion branch on each interval `(a_n, a_{n+1}]`;
//! * [`volume`]: exact region volumes `p_m = P(N > m)` summed to a
//!   certified tail, used as ground truth;
//! * [`montecarlo`]: direct simulation on reproducible counter-keyed
//!   random substreams.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod montecarlo;
pub mod rng;
pub mod sequence;
pub mod series;
pub mod stats;
pub mod volume;

mod subsets;
mod sum;

pub use analytic::{expected_crossings, Branch, EvalOptions, EvalReport};
pub use sequence::{Bracket, SeqKind, WeightSequence};
pub use series::{SeriesValue, Truncation};
pub use stats::{RunningStats, TrialStats};
pub use sum::CompensatedSum;
