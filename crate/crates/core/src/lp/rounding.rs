//! Kleinberg–Tardos rounding of a CKR solution and Monte-Carlo estimates of
//! its pairwise separation probabilities.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::LpSolution;
use crate::graph::MultiwayPartition;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KtSample {
    pub partition: MultiwayPartition,
    pub iterations: usize,
    /// The iteration cap was hit and the leftover vertices were sent to
    /// their largest coordinate.
    pub capped: bool,
}

/// Iteration cap `⌈64·k·(ln n + 4)⌉`.
pub fn kt_cap(n: usize, k: usize) -> usize {
    (64.0 * k as f64 * ((n.max(1) as f64).ln() + 4.0)).ceil() as usize
}

/// Repeats: draw `i` uniformly from the parts and `r` uniformly from
/// `(0, 1)`, and put every unassigned `u` with `r ≤ ū_i` into part `i`.
pub fn kt_round<R: Rng + ?Sized>(sol: &LpSolution, rng: &mut R) -> KtSample {
    let n = sol.n();
    let k = sol.k();
    let cap = kt_cap(n, k);
    let mut part_of: Vec<Option<usize>> = vec![None; n];
    let mut left = n;
    let mut iterations = 0;
    while left > 0 && iterations < cap {
        iterations += 1;
        let i = rng.gen_range(0..k);
        let r = loop {
            let r: f64 = rng.gen();
            if r > 0.0 {
                break r;
            }
        };
        for (u, slot) in part_of.iter_mut().enumerate() {
            if slot.is_none() && r <= sol.points[u][i] {
                *slot = Some(i);
                left -= 1;
            }
        }
    }
    let capped = left > 0;
    let part_of = part_of
        .into_iter()
        .enumerate()
        .map(|(u, p)| {
            p.unwrap_or_else(|| {
                sol.points[u]
                    .iter()
                    .enumerate()
                    .fold((0, f64::NEG_INFINITY), |a, (i, &x)| if x > a.1 { (i, x) } else { a })
                    .0
            })
        })
        .collect();
    KtSample {
        partition: MultiwayPartition::new(part_of, sol.terminals.clone())
            .expect("pinned terminals land in their own parts"),
        iterations,
        capped,
    }
}

pub fn kt_round_seeded(sol: &LpSolution, seed: u64) -> KtSample {
    kt_round(sol, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Empirical separation frequency of one vertex pair against the two
/// rounding bounds `2d/(1+d)` and `(1−d)/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairStatistics {
    pub u: usize,
    pub v: usize,
    pub d: f64,
    pub separated: u64,
    pub p_hat: f64,
    pub stderr: f64,
    pub separation_bound: f64,
    pub non_separation_bound: f64,
    /// `p̂ ≤ 2d/(1+d) + 5·stderr`.
    pub separation_ok: bool,
    /// `1 − p̂ ≥ (1−d)/2 − 5·stderr`.
    pub non_separation_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationStatistics {
    pub samples: u64,
    pub streams: usize,
    pub base_seed: u64,
    pub capped: u64,
    /// Samples in which some terminal left its own part.
    pub terminal_violations: u64,
    pub pairs: Vec<PairStatistics>,
}

impl SeparationStatistics {
    pub fn all_within_bounds(&self) -> bool {
        self.terminal_violations == 0
            && self
                .pairs
                .iter()
                .all(|p| p.separation_ok && p.non_separation_ok)
    }
}

struct Counts {
    separated: Vec<u64>,
    capped: u64,
    terminal_violations: u64,
}

/// Draws `samples` roundings split over `streams` independent streams;
/// stream `s` is seeded with `base_seed ⊕ s`. Results depend only on
/// `(sol, samples, base_seed, streams)`.
pub fn separation_statistics(
    sol: &LpSolution,
    samples: u64,
    base_seed: u64,
    streams: usize,
) -> SeparationStatistics {
    let n = sol.n();
    let streams = streams.max(1);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let per = samples / streams as u64;
    let extra = samples % streams as u64;
    let counts = (0..streams)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ s as u64);
            let mut c = Counts {
                separated: vec![0; pairs.len()],
                capped: 0,
                terminal_violations: 0,
            };
            let count = per + u64::from((s as u64) < extra);
            for _ in 0..count {
                let sample = kt_round(sol, &mut rng);
                let p = &sample.partition;
                c.capped += u64::from(sample.capped);
                if sol.terminals.iter().enumerate().any(|(i, &t)| p.part(t) != i) {
                    c.terminal_violations += 1;
                }
                for (slot, &(u, v)) in c.separated.iter_mut().zip(&pairs) {
                    *slot += u64::from(p.part(u) != p.part(v));
                }
            }
            c
        })
        .reduce(
            || Counts {
                separated: vec![0; pairs.len()],
                capped: 0,
                terminal_violations: 0,
            },
            |mut a, b| {
                for (x, y) in a.separated.iter_mut().zip(&b.separated) {
                    *x += y;
                }
                a.capped += b.capped;
                a.terminal_violations += b.terminal_violations;
                a
            },
        );
    let total = samples.max(1) as f64;
    let pairs = pairs
        .iter()
        .zip(&counts.separated)
        .map(|(&(u, v), &separated)| {
            let d = sol.distance(u, v);
            let p_hat = separated as f64 / total;
            let stderr = (p_hat * (1.0 - p_hat) / total).sqrt();
            let separation_bound = 2.0 * d / (1.0 + d);
            let non_separation_bound = (1.0 - d) / 2.0;
            PairStatistics {
                u,
                v,
                d,
                separated,
                p_hat,
                stderr,
                separation_bound,
                non_separation_bound,
                separation_ok: p_hat <= separation_bound + 5.0 * stderr + 1e-12,
                non_separation_ok: 1.0 - p_hat >= non_separation_bound - 5.0 * stderr - 1e-12,
            }
        })
        .collect();
    SeparationStatistics {
        samples,
        streams,
        base_seed,
        capped: counts.capped,
        terminal_violations: counts.terminal_violations,
        pairs,
    }
}

/// Number of distinct partitions among `samples` roundings seeded `seed ⊕ s`.
pub fn distinct_partitions(sol: &LpSolution, samples: u64, seed: u64) -> usize {
    (0..samples)
        .map(|s| kt_round_seeded(sol, seed ^ s).partition.part_of().to_vec())
        .collect::<HashSet<_>>()
        .len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;

    fn two_point() -> LpSolution {
        // Terminals 0 and 1, u = (1, 0) is terminal 0, v = (½, ½).
        let g = WeightedGraph::new(3, [(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        LpSolution::from_points(&g, &[0, 1], vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]])
            .unwrap()
    }

    #[test]
    fn half_point_separation() {
        let sol = two_point();
        let stats = separation_statistics(&sol, 100_000, 11, 8);
        assert!(stats.all_within_bounds());
        let p = stats.pairs.iter().find(|p| (p.u, p.v) == (0, 2)).unwrap();
        assert_eq!(p.d, 0.5);
        assert!((p.separation_bound - 2.0 / 3.0).abs() < 1e-15);
        // The exact separation probability of this pair is 1/2.
        assert!((p.p_hat - 0.5).abs() < 5.0 * p.stderr + 1e-3);
    }

    #[test]
    fn integral_solution_rounds_to_itself() {
        let g = WeightedGraph::new(3, [(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let sol =
            LpSolution::from_points(&g, &[0, 1], vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 1.0]])
                .unwrap();
        for seed in 0..200 {
            assert_eq!(kt_round_seeded(&sol, seed).partition.part_of(), &[0, 1, 1]);
        }
    }

    #[test]
    fn identical_points_stay_together() {
        let g = WeightedGraph::new(4, []).unwrap();
        let sol = LpSolution::from_points(
            &g,
            &[0, 1],
            vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.7], vec![0.3, 0.7]],
        )
        .unwrap();
        for seed in 0..500 {
            let p = kt_round_seeded(&sol, seed).partition;
            assert_eq!(p.part(2), p.part(3));
        }
        assert!(distinct_partitions(&sol, 1000, 3) >= 2);
    }

    #[test]
    fn streams_are_reproducible() {
        let sol = two_point();
        assert_eq!(
            separation_statistics(&sol, 5000, 9, 4),
            separation_statistics(&sol, 5000, 9, 4)
        );
    }
}
