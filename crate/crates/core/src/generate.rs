//! Seeded generators of instances whose stability is verified by the
//! exhaustive oracles. Every generator is a pure function of its
//! parameters and seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{exact, Cut, MultiwayPartition, WeightedGraph};
use crate::oracle::{
    brute_sparsest_cut, maxcut_stability_report, multiway_stability_report, weak_stability_check, Margin,
    OracleLimits, SparsestCutInstance,
};
use crate::reduce::{sc_to_maxcut, Gadget, ReductionArtifact};

/// Halvings of the demands allowed before giving up.
pub const MAX_HALVINGS: usize = 40;
/// Rejection-sampling attempts per generator call.
pub const ATTEMPT_BUDGET: u64 = 4096;
const BATCH: u64 = 64;

/// Attempt `a` draws from stream `a` of the generator seeded with `seed`;
/// the lowest accepted attempt wins.
fn first_accepted<T: Send>(
    seed: u64,
    what: &str,
    attempt: impl Fn(&mut ChaCha8Rng) -> Result<Option<T>> + Sync,
) -> Result<T> {
    let mut start = 0;
    while start < ATTEMPT_BUDGET {
        let found = (start..start + BATCH)
            .into_par_iter()
            .map(|a| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(a);
                attempt(&mut rng)
            })
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            Some(Ok(Some(t))) => return Ok(t),
            Some(Err(e)) => return Err(e),
            _ => start += BATCH,
        }
    }
    Err(Error::GenerationFailed(format!(
        "no {what} accepted within {ATTEMPT_BUDGET} attempts"
    )))
}

/// `G(n, p)` with integer weights in `1..=9`; at least one edge.
pub fn random_graph(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    if n < 2 || !(0.0..=1.0).contains(&density) {
        return Err(Error::Validation(format!("need n >= 2 and density in [0, 1], got {n}, {density}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                edges.push((u, v, rng.gen_range(1..=9) as f64));
            }
        }
    }
    if edges.is_empty() {
        edges.push((0, 1, rng.gen_range(1..=9) as f64));
    }
    WeightedGraph::new(n, edges)
}

/// A reduced Max Cut instance whose planted cut is the verified optimum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableMaxCut {
    pub source: SparsestCutInstance,
    pub gamma: f64,
    pub artifact: ReductionArtifact,
    pub margin: Margin,
}

/// Random connected capacity graph with integer capacities in `1..=10` and
/// random integer demands in `1..=10`.
pub fn random_sparsest_cut_instance(n: usize, rng: &mut ChaCha8Rng) -> Result<SparsestCutInstance> {
    if n < 2 {
        return Err(Error::Validation("a sparsest-cut instance needs at least 2 vertices".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut caps = Vec::new();
    let mut linked = vec![vec![false; n]; n];
    for i in 1..n {
        let (u, v) = (order[i], order[rng.gen_range(0..i)]);
        linked[u][v] = true;
        linked[v][u] = true;
        caps.push((u.min(v), u.max(v), rng.gen_range(1..=10) as f64));
    }
    let mut dems = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if !linked[u][v] && rng.gen_bool(0.3) {
                caps.push((u, v, rng.gen_range(1..=10) as f64));
            }
            if rng.gen_bool(0.5) {
                dems.push((u, v, rng.gen_range(1..=10) as f64));
            }
        }
    }
    if dems.is_empty() {
        let u = rng.gen_range(0..n);
        let v = (u + rng.gen_range(1..n)) % n;
        dems.push((u.min(v), u.max(v), rng.gen_range(1..=10) as f64));
    }
    SparsestCutInstance::new(n, caps, dems)
}

/// Halves `inst`'s demands until the exact sparsest cut exceeds `gamma`.
pub fn rescale_demands(
    inst: &SparsestCutInstance,
    gamma: f64,
    limits: &OracleLimits,
) -> Result<SparsestCutInstance> {
    let mut cur = inst.clone();
    for _ in 0..=MAX_HALVINGS {
        if brute_sparsest_cut(&cur, limits)?.phi_exact > exact(gamma) {
            return Ok(cur);
        }
        let caps = cur.capacities().iter().map(|e| (e.u, e.v, e.w));
        let dems = cur.demands().iter().map(|e| (e.u, e.v, e.w / 2.0));
        cur = SparsestCutInstance::new(cur.n(), caps, dems)?;
    }
    Err(Error::GenerationFailed(format!(
        "sparsest cut still at most {gamma} after {MAX_HALVINGS} halvings"
    )))
}

/// Draws a sparsest-cut instance on `n/2` vertices, rescales it to
/// `φ* > γ`, reduces it and re-verifies the reduced graph with the oracle.
pub fn generate_stable_maxcut(
    n: usize,
    gamma: f64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<StableMaxCut> {
    generate_stable_maxcut_with(n, gamma, seed, Gadget::Symmetric, limits)
}

/// As [`generate_stable_maxcut`] with an explicit capacity gadget. The
/// literal gadget fails verification more often, which is reported as
/// [`Error::GenerationFailed`].
pub fn generate_stable_maxcut_with(
    n: usize,
    gamma: f64,
    seed: u64,
    gadget: Gadget,
    limits: &OracleLimits,
) -> Result<StableMaxCut> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Validation(format!("n must be even and at least 4, got {n}")));
    }
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::Validation(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    limits.check_cut(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let drawn = random_sparsest_cut_instance(n / 2, &mut rng)?;
    let source = rescale_demands(&drawn, gamma, limits)?;
    let artifact = sc_to_maxcut(&source, gamma, gadget)?;
    let report = maxcut_stability_report(&artifact.graph, limits)?;
    if !report.is_stable(gamma) || !report.optimum.same_bipartition(&artifact.planted) {
        return Err(Error::GenerationFailed(format!(
            "reduced instance has margin {} at gamma {gamma}",
            report.margin
        )));
    }
    Ok(StableMaxCut {
        source,
        gamma,
        artifact,
        margin: report.margin,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeaklyStableMaxCut {
    pub graph: WeightedGraph,
    /// The planted cut, which is also the exact optimum.
    pub planted: Cut,
    pub gamma: f64,
    pub delta: f64,
}

/// Plants a cut with heavy crossing edges and light inner edges, then
/// weakens the crossing edges of `⌊δn⌋` vertices so that moving them is
/// nearly free. Accepted only if the planted cut is the optimum and the
/// weak-stability oracle passes.
pub fn generate_weakly_stable_maxcut(
    n: usize,
    gamma: f64,
    delta: f64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<WeaklyStableMaxCut> {
    if n < 2 {
        return Err(Error::Validation(format!("n must be at least 2, got {n}")));
    }
    limits.check_cut(n)?;
    let soft_count = (exact(delta) * exact(n as f64)).floor();
    let soft_count: usize = soft_count.to_integer().try_into().unwrap_or(0);
    first_accepted(seed, "weakly stable instance", |rng| {
        let mut side: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        side[0] = true;
        if side.iter().all(|&x| x) {
            side[n - 1] = false;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut soft = vec![false; n];
        for &v in order.iter().take(soft_count) {
            soft[v] = true;
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if side[u] != side[v] {
                    if rng.gen_bool(0.6) {
                        let w = if soft[u] || soft[v] {
                            rng.gen_range(1..=3)
                        } else {
                            rng.gen_range(8..=20)
                        };
                        edges.push((u, v, w as f64));
                    }
                } else if rng.gen_bool(0.4) {
                    edges.push((u, v, rng.gen_range(1..=2) as f64));
                }
            }
        }
        if edges.is_empty() {
            return Ok(None);
        }
        let graph = WeightedGraph::new(n, edges)?;
        let planted = Cut::new(side);
        let check = weak_stability_check(&graph, gamma, delta, limits)?;
        Ok((check.stable && check.optimum.same_bipartition(&planted)).then(|| WeaklyStableMaxCut {
            graph,
            planted,
            gamma,
            delta,
        }))
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableMultiway {
    pub graph: WeightedGraph,
    pub terminals: Vec<usize>,
    pub planted: MultiwayPartition,
    pub margin: Margin,
}

/// Terminals are `0..k`. Plants a partition, draws heavy integer weights
/// inside parts and light ones across, and accepts when the oracle margin
/// exceeds `gamma` and the planted partition is the optimum.
pub fn generate_stable_multiway(
    n: usize,
    k: usize,
    gamma: f64,
    seed: u64,
    limits: &OracleLimits,
) -> Result<StableMultiway> {
    if k < 2 || n < k {
        return Err(Error::Validation(format!("need 2 <= k <= n, got n = {n}, k = {k}")));
    }
    if n - k > limits.multiway_free_vertices {
        return Err(Error::SizeCap {
            what: "free vertices",
            value: n - k,
            cap: limits.multiway_free_vertices,
        });
    }
    let terminals: Vec<usize> = (0..k).collect();
    first_accepted(seed, "stable multiway instance", |rng| {
        let part_of: Vec<usize> = (0..n).map(|v| if v < k { v } else { rng.gen_range(0..k) }).collect();
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u.max(k - 1) + 1..n {
                if part_of[u] == part_of[v] {
                    if u < k || rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen_range(4..=12) as f64));
                    }
                } else if rng.gen_bool(0.3) {
                    edges.push((u, v, 1.0));
                }
            }
        }
        let graph = WeightedGraph::new(n, edges)?;
        let planted = MultiwayPartition::new(part_of, terminals.clone())?;
        let report = multiway_stability_report(&graph, &terminals, limits)?;
        Ok((report.is_stable(gamma) && report.optimum == planted).then(|| StableMultiway {
            graph,
            terminals: terminals.clone(),
            planted,
            margin: report.margin,
        }))
    })
}

/// Star with center `0` and terminals `1, 2, 3`; the edge to terminal `1`
/// has weight `w1` and the others weight 1.
pub fn star_fixture(w1: f64) -> Result<(WeightedGraph, Vec<usize>)> {
    Ok((
        WeightedGraph::new(4, [(0, 1, w1), (0, 2, 1.0), (0, 3, 1.0)])?,
        vec![1, 2, 3],
    ))
}

/// The canonical 3-terminal fixture `star_fixture(5)` with its verified
/// margin of 5.
pub fn canonical_star() -> Result<StableMultiway> {
    let (graph, terminals) = star_fixture(5.0)?;
    let report = multiway_stability_report(&graph, &terminals, &OracleLimits::default())?;
    Ok(StableMultiway {
        planted: report.optimum,
        margin: report.margin,
        graph,
        terminals,
    })
}
