use rayon::prelude::*;

use super::{chunks, OracleLimits, RatioMin, StabilityReport, ValueBest};
use crate::error::{Error, Result};
use crate::graph::{
    exact, multiway_cost, rational_zero, validate_terminals, MultiwayPartition, Rational,
    WeightedGraph,
};

struct Space<'a> {
    g: &'a WeightedGraph,
    terminals: &'a [usize],
    free: Vec<usize>,
    k: usize,
    count: u64,
}

impl<'a> Space<'a> {
    fn new(g: &'a WeightedGraph, terminals: &'a [usize], limits: &OracleLimits) -> Result<Self> {
        validate_terminals(g.n(), terminals)?;
        let k = terminals.len();
        let mut is_terminal = vec![false; g.n()];
        for &t in terminals {
            is_terminal[t] = true;
        }
        let free: Vec<usize> = (0..g.n()).filter(|&v| !is_terminal[v]).collect();
        if free.len() > limits.multiway_free_vertices {
            return Err(Error::SizeCap {
                what: "n - k",
                value: free.len(),
                cap: limits.multiway_free_vertices,
            });
        }
        let count = (k as u64)
            .checked_pow(free.len() as u32)
            .ok_or(Error::SizeCap {
                what: "k^(n-k)",
                value: usize::MAX,
                cap: u64::MAX as usize,
            })?;
        Ok(Self {
            g,
            terminals,
            free,
            k,
            count,
        })
    }

    fn base(&self) -> Vec<usize> {
        let mut part_of = vec![0; self.g.n()];
        for (i, &t) in self.terminals.iter().enumerate() {
            part_of[t] = i;
        }
        part_of
    }

    /// Writes the assignment with index `idx` into `part_of`; the last free
    /// vertex is the least significant digit so that index order is
    /// lexicographic order of `part_of`.
    fn decode(&self, mut idx: u64, part_of: &mut [usize]) {
        for &v in self.free.iter().rev() {
            part_of[v] = (idx % self.k as u64) as usize;
            idx /= self.k as u64;
        }
    }

    fn cost(&self, part_of: &[usize]) -> f64 {
        self.g
            .edges()
            .iter()
            .filter(|e| part_of[e.u] != part_of[e.v])
            .map(|e| e.w)
            .sum()
    }

    fn cost_exact(&self, part_of: &[usize]) -> Rational {
        self.g
            .edges()
            .iter()
            .filter(|e| part_of[e.u] != part_of[e.v])
            .fold(rational_zero(), |acc, e| acc + exact(e.w))
    }

    fn optimum(&self) -> (Vec<usize>, usize) {
        let best = chunks(self.count)
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut part_of = self.base();
                let mut b = ValueBest::new(true);
                for idx in lo..hi {
                    self.decode(idx, &mut part_of);
                    b.push(|| part_of.clone(), self.cost(&part_of));
                }
                b
            })
            .reduce(|| ValueBest::new(true), ValueBest::merge);
        let (p, _, ties) = best
            .finish(|p| self.cost_exact(p))
            .expect("at least one assignment");
        (p, ties)
    }

    fn partition(&self, part_of: Vec<usize>) -> MultiwayPartition {
        MultiwayPartition::new(part_of, self.terminals.to_vec()).expect("valid by construction")
    }
}

fn difference(g: &WeightedGraph, star: &[usize], other: &[usize]) -> (f64, f64) {
    let mut only_other = 0.0;
    let mut only_star = 0.0;
    for e in g.edges() {
        match (star[e.u] != star[e.v], other[e.u] != other[e.v]) {
            (false, true) => only_other += e.w,
            (true, false) => only_star += e.w,
            _ => {}
        }
    }
    (only_other, only_star)
}

fn difference_exact(g: &WeightedGraph, star: &[usize], other: &[usize]) -> (Rational, Rational) {
    let mut only_other = rational_zero();
    let mut only_star = rational_zero();
    for e in g.edges() {
        match (star[e.u] != star[e.v], other[e.u] != other[e.v]) {
            (false, true) => only_other += exact(e.w),
            (true, false) => only_star += exact(e.w),
            _ => {}
        }
    }
    (only_other, only_star)
}

/// Exact minimum multiway cut by enumerating the `k^(n-k)` assignments of
/// the non-terminals. Ties go to the lexicographically smallest `part_of`.
pub fn brute_multiway_cut(
    g: &WeightedGraph,
    terminals: &[usize],
    limits: &OracleLimits,
) -> Result<(MultiwayPartition, f64)> {
    let space = Space::new(g, terminals, limits)?;
    let (p, _) = space.optimum();
    let part = space.partition(p);
    let cost = multiway_cost(g, &part)?;
    Ok((part, cost))
}

/// Stability margin of the minimum multiway cut `E*` against every other
/// partition: the minimum of `w(E' ∖ E*) / w(E* ∖ E')`.
pub fn multiway_stability_report(
    g: &WeightedGraph,
    terminals: &[usize],
    limits: &OracleLimits,
) -> Result<StabilityReport<MultiwayPartition>> {
    let space = Space::new(g, terminals, limits)?;
    let (star, ties) = space.optimum();
    let scan = chunks(space.count)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut part_of = space.base();
            let mut acc = RatioMin::new();
            for idx in lo..hi {
                space.decode(idx, &mut part_of);
                if part_of == star {
                    continue;
                }
                let (num, den) = difference(g, &star, &part_of);
                acc.push(|| part_of.clone(), num, den);
            }
            acc
        })
        .reduce(RatioMin::new, RatioMin::merge);
    let (margin, witness) = scan.finish(|p| difference_exact(g, &star, p));
    let optimum = space.partition(star);
    Ok(StabilityReport {
        optimum_value: multiway_cost(g, &optimum)?,
        optimum,
        margin,
        witness: witness.map(|p| space.partition(p)),
        unique_optimum: ties == 1,
    })
}
