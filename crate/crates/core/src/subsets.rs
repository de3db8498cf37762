//! Depth-first enumeration of weight subsets `S` with `Σ_S a < limit`.
//!
//! Weights are sorted ascending and equal weights are grouped, so a node
//! whose running sum reaches the limit is pruned together with every
//! superset below it. Each visited leaf stands for `C(c_1, j_1) ... C(c_g, j_g)`
//! subsets of the same sum and parity.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Group {
    weight: f64,
    count: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct Enumeration {
    pub evaluated: u64,
    pub pruned: u64,
}

#[derive(Debug)]
pub(crate) enum Stop<E> {
    Budget,
    Visit(E),
}

fn group(weights: &[f64]) -> Vec<Group> {
    let mut sorted: Vec<f64> = weights.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut groups: Vec<Group> = Vec::new();
    for w in sorted {
        match groups.last_mut() {
            Some(g) if g.weight == w => g.count += 1,
            _ => groups.push(Group { weight: w, count: 1 }),
        }
    }
    groups
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    libm::round(c)
}

struct Walker<'a, F> {
    groups: &'a [Group],
    suffix: Vec<usize>,
    limit: f64,
    prune: bool,
    budget: u64,
    work: u64,
    stats: Enumeration,
    visit: F,
}

impl<F, E> Walker<'_, F>
where
    F: FnMut(f64, f64) -> Result<(), E>,
{
    fn descend(&mut self, g: usize, sum: f64, sign: f64, mult: f64) -> Result<(), Stop<E>> {
        self.work += 1;
        if self.work > self.budget {
            return Err(Stop::Budget);
        }
        if g == self.groups.len() {
            self.stats.evaluated = self.stats.evaluated.saturating_add(mult as u64);
            return (self.visit)(sum, sign * mult).map_err(Stop::Visit);
        }
        let Group { weight, count } = self.groups[g];
        let rest = self.suffix[g + 1];
        for j in 0..=count {
            let s = if j == 0 { sum } else { sum + j as f64 * weight };
            if self.prune && s >= self.limit {
                let skipped: f64 = (j..=count).map(|i| binomial(count, i)).sum::<f64>()
                    * libm::exp2(rest as f64)
                    * mult;
                self.stats.pruned = self.stats.pruned.saturating_add(skipped as u64);
                break;
            }
            let parity = if j % 2 == 0 { sign } else { -sign };
            self.descend(g + 1, s, parity, mult * binomial(count, j))?;
        }
        Ok(())
    }
}

/// Calls `visit(Σ_S a, (-1)^{|S|} · multiplicity)` for every subset class
/// with sum below `limit` (all classes when `prune` is false), in a fixed
/// depth-first order. `budget` caps the number of tree nodes.
pub(crate) fn for_each_subset<F, E>(
    weights: &[f64],
    limit: f64,
    prune: bool,
    budget: u64,
    visit: F,
) -> Result<Enumeration, Stop<E>>
where
    F: FnMut(f64, f64) -> Result<(), E>,
{
    let groups = group(weights);
    let mut suffix = alloc::vec![0usize; groups.len() + 1];
    for g in (0..groups.len()).rev() {
        suffix[g] = suffix[g + 1] + groups[g].count;
    }
    let mut walker = Walker {
        groups: &groups,
        suffix,
        limit,
        prune,
        budget,
        work: 0,
        stats: Enumeration::default(),
        visit,
    };
    if prune && 0.0 >= limit {
        walker.stats.pruned = libm::exp2(weights.len() as f64) as u64;
        return Ok(walker.stats);
    }
    walker.descend(0, 0.0, 1.0, 1.0)?;
    Ok(walker.stats)
}
