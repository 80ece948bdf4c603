//! Local search for weakly stable instances: the ω-grid cut-improvement
//! loop for Max Cut and the reweight, solve, sample improver for Multiway
//! Cut.

mod sparsest;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{cut_weight_exact, exact, rational_zero, Cut, MultiwayPartition, Rational, WeightedGraph};
use crate::lp::{build_ckr_lp, kt_round_seeded, solve_lp};
use crate::oracle::SparsestCutInstance;

pub use sparsest::{solve_sparsest, ExactSparsestCut, SparsestCutSolver, SpectralSweep};

/// One accepted improvement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    /// The ω that produced the step (Max Cut only).
    pub omega: Option<f64>,
    /// Position of ω in the descending grid Ω (Max Cut only).
    pub level: Option<usize>,
    pub before: f64,
    pub after: f64,
}

/// Outcome of the final, non-improving call of the multiway loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CertifiedStop {
    pub trials: usize,
    /// Distinct partitions among the samples.
    pub distinct: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ImprovementTrace {
    pub steps: Vec<TraceStep>,
    /// Sweeps for Max Cut (accepted steps plus the final failing sweep),
    /// improvement rounds for Multiway.
    pub iterations: usize,
    /// The bound the iteration count is checked against.
    pub bound: f64,
    pub stop: Option<CertifiedStop>,
}

/// Auxiliary sparsest-cut instance of `improve_cut`: capacities are the
/// edges cut by `t`, demands are the uncut edges of weight at least `2ω`.
pub fn auxiliary_instance(g: &WeightedGraph, t: &Cut, omega: f64) -> Result<SparsestCutInstance> {
    g.check_vertex_count(t.n())?;
    let side = t.side();
    let caps = g
        .edges()
        .iter()
        .filter(|e| e.crosses(side) && e.w > 0.0)
        .map(|e| (e.u, e.v, e.w));
    let dems = g
        .edges()
        .iter()
        .filter(|e| !e.crosses(side) && e.w >= 2.0 * omega)
        .map(|e| (e.u, e.v, e.w));
    SparsestCutInstance::relaxed(g.n(), caps, dems)
}

/// `T′ = (T ∩ A) ∪ (T̄ ∩ Ā)`: flips the cut status of every edge crossing `A`.
pub fn recombine(t: &Cut, a: &Cut) -> Cut {
    Cut::new(t.side().iter().zip(a.side()).map(|(&x, &y)| x == y).collect())
}

/// Returns a cut of value at least `w(T) + ω`, or `None`.
pub fn improve_cut(
    g: &WeightedGraph,
    t: &Cut,
    omega: f64,
    sc: &dyn SparsestCutSolver,
) -> Result<Option<Cut>> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Validation(format!("ω must be positive, got {omega}")));
    }
    let inst = auxiliary_instance(g, t, omega)?;
    if inst.demands().is_empty() {
        return Ok(None);
    }
    let a = match solve_sparsest(sc, &inst) {
        Ok((a, _)) => a,
        Err(Error::Infeasible(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let next = recombine(t, &a);
    let gain = cut_weight_exact(g, &next)? - cut_weight_exact(g, t)?;
    Ok((gain >= exact(omega)).then_some(next))
}

/// The grid `Ω = {w_e / 4m}` over positive weights, descending, deduplicated.
pub fn omega_grid(g: &WeightedGraph) -> Vec<f64> {
    let m = g.m() as f64;
    let mut grid: Vec<f64> = g
        .edges()
        .iter()
        .filter(|e| e.w > 0.0)
        .map(|e| e.w / (4.0 * m))
        .collect();
    grid.sort_by(|a, b| b.total_cmp(a));
    grid.dedup();
    grid
}

/// `4m³ + m`.
pub fn maxcut_iteration_bound(m: usize) -> f64 {
    let m = m as f64;
    4.0 * m * m * m + m
}

/// Sweeps Ω in descending order, restarting from the top after every
/// accepted improvement, until a full sweep fails.
pub fn weakly_stable_max_cut(
    g: &WeightedGraph,
    sc: &dyn SparsestCutSolver,
    start: Option<Cut>,
) -> Result<(Cut, ImprovementTrace)> {
    if g.m() == 0 {
        return Err(Error::Validation("local search needs at least one edge".into()));
    }
    let mut t = start.unwrap_or_else(|| Cut::empty(g.n()));
    g.check_vertex_count(t.n())?;
    let grid = omega_grid(g);
    let mut trace = ImprovementTrace {
        bound: maxcut_iteration_bound(g.m()),
        ..ImprovementTrace::default()
    };
    let mut value = cut_weight_exact(g, &t)?;
    'sweep: loop {
        trace.iterations += 1;
        if trace.iterations as f64 > trace.bound {
            return Err(Error::Internal(format!(
                "improvement loop exceeded {} iterations",
                trace.bound
            )));
        }
        for (level, &omega) in grid.iter().enumerate() {
            if let Some(next) = improve_cut(g, &t, omega, sc)? {
                let after = cut_weight_exact(g, &next)?;
                trace.steps.push(TraceStep {
                    omega: Some(omega),
                    level: Some(level),
                    before: to_f64(&value),
                    after: to_f64(&after),
                });
                t = next;
                value = after;
                continue 'sweep;
            }
        }
        return Ok((t, trace));
    }
}

fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn multiway_cost_exact(g: &WeightedGraph, p: &MultiwayPartition) -> Result<Rational> {
    g.check_vertex_count(p.n())?;
    Ok(g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| p.separates(e.u, e.v))
        .fold(rational_zero(), |acc, (i, _)| acc + g.exact_weight(i)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum MultiwayStep {
    Improved {
        partition: MultiwayPartition,
        cost: f64,
        /// Index of the first improving sample.
        trial: usize,
    },
    CertifiedStop(CertifiedStop),
}

/// Solves the relaxation under `w′ = w` on edges cut by `current` and
/// `w′ = 4w` elsewhere, draws `trials` roundings seeded `seed ⊕ s`, and
/// returns the lowest-index sample with strictly smaller cost.
pub fn improve_multiway(
    g: &WeightedGraph,
    terminals: &[usize],
    current: &MultiwayPartition,
    trials: usize,
    seed: u64,
    solver_tol: f64,
) -> Result<MultiwayStep> {
    if trials == 0 {
        return Err(Error::Validation("trials must be at least 1".into()));
    }
    g.check_vertex_count(current.n())?;
    if current.terminals() != terminals {
        return Err(Error::Validation("partition terminals differ from the instance terminals".into()));
    }
    let weights: Vec<f64> = g
        .edges()
        .iter()
        .map(|e| if current.separates(e.u, e.v) { e.w } else { 4.0 * e.w })
        .collect();
    let reweighted = g.with_weights(&weights)?;
    let sol = solve_lp(&build_ckr_lp(&reweighted, terminals)?, solver_tol)?;
    let cost = multiway_cost_exact(g, current)?;
    let samples: Vec<MultiwayPartition> = (0..trials)
        .into_par_iter()
        .map(|s| kt_round_seeded(&sol, seed ^ s as u64).partition)
        .collect();
    for (trial, p) in samples.iter().enumerate() {
        let c = multiway_cost_exact(g, p)?;
        if c < cost {
            return Ok(MultiwayStep::Improved {
                partition: p.clone(),
                cost: to_f64(&c),
                trial,
            });
        }
    }
    let distinct = samples.iter().map(|p| p.part_of()).collect::<HashSet<_>>().len();
    Ok(MultiwayStep::CertifiedStop(CertifiedStop { trials, distinct }))
}

/// Iterates `improve_multiway` from the all-to-part-0 start until a
/// certified stop. Round `r` uses seeds `(seed + r·2³²) ⊕ s`.
pub fn weakly_stable_multiway(
    g: &WeightedGraph,
    terminals: &[usize],
    trials_per_round: usize,
    seed: u64,
    solver_tol: f64,
) -> Result<(MultiwayPartition, ImprovementTrace)> {
    if !g.has_integer_weights() {
        return Err(Error::Validation("the multiway improvement loop needs integer weights".into()));
    }
    let mut p = MultiwayPartition::all_in_first(g.n(), terminals)?;
    let mut cost = multiway_cost_exact(g, &p)?;
    let mut trace = ImprovementTrace {
        bound: to_f64(&cost),
        ..ImprovementTrace::default()
    };
    loop {
        let round_seed = seed.wrapping_add((trace.iterations as u64) << 32);
        match improve_multiway(g, terminals, &p, trials_per_round, round_seed, solver_tol)? {
            MultiwayStep::Improved { partition, .. } => {
                let next = multiway_cost_exact(g, &partition)?;
                trace.steps.push(TraceStep {
                    omega: None,
                    level: None,
                    before: to_f64(&cost),
                    after: to_f64(&next),
                });
                trace.iterations += 1;
                if trace.iterations as f64 > trace.bound {
                    return Err(Error::Internal(format!(
                        "improvement loop exceeded the initial cost {}",
                        trace.bound
                    )));
                }
                p = partition;
                cost = next;
            }
            MultiwayStep::CertifiedStop(stop) => {
                trace.stop = Some(stop);
                return Ok((p, trace));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn star(w: f64) -> WeightedGraph {
        WeightedGraph::new(4, [(0, 1, w), (0, 2, 1.0), (0, 3, 1.0)]).unwrap()
    }

    #[test]
    fn path_improvement_step() {
        let g = path();
        let t = Cut::from_members(3, &[0]).unwrap();
        let inst = auxiliary_instance(&g, &t, 0.125).unwrap();
        assert_eq!(inst.capacities().len(), 1);
        assert_eq!(inst.demands().len(), 1);
        let next = improve_cut(&g, &t, 0.125, &ExactSparsestCut::default())
            .unwrap()
            .unwrap();
        assert!(next.same_bipartition(&Cut::from_members(3, &[0, 2]).unwrap()));
    }

    #[test]
    fn light_demands_give_bottom() {
        let g = path();
        let t = Cut::from_members(3, &[0]).unwrap();
        assert_eq!(improve_cut(&g, &t, 0.6, &ExactSparsestCut::default()).unwrap(), None);
    }

    #[test]
    fn optimum_is_a_fixed_point() {
        let g = path();
        let t = Cut::from_members(3, &[1]).unwrap();
        for omega in omega_grid(&g) {
            assert_eq!(improve_cut(&g, &t, omega, &ExactSparsestCut::default()).unwrap(), None);
        }
        let (out, trace) = weakly_stable_max_cut(&g, &ExactSparsestCut::default(), Some(t.clone())).unwrap();
        assert_eq!(out, t);
        assert_eq!(trace.iterations, 1);
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn path_from_single_vertex() {
        let g = path();
        let start = Cut::from_members(3, &[0]).unwrap();
        let (out, trace) = weakly_stable_max_cut(&g, &ExactSparsestCut::default(), Some(start)).unwrap();
        assert!(out.same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
        assert_eq!(trace.steps.last().unwrap().after, 2.0);
    }

    #[test]
    fn star_suboptimal_start_improves() {
        let g = star(5.0);
        let p = MultiwayPartition::new(vec![1, 0, 1, 2], vec![1, 2, 3]).unwrap();
        match improve_multiway(&g, &[1, 2, 3], &p, 20, 0, 1e-9).unwrap() {
            MultiwayStep::Improved { partition, cost, .. } => {
                assert_eq!(cost, 2.0);
                assert_eq!(partition.part(0), 0);
            }
            other => panic!("expected an improvement, got {other:?}"),
        }
    }

    #[test]
    fn star_optimum_is_certified() {
        let g = star(5.0);
        let p = MultiwayPartition::new(vec![0, 0, 1, 2], vec![1, 2, 3]).unwrap();
        let step = improve_multiway(&g, &[1, 2, 3], &p, 50, 7, 1e-9).unwrap();
        assert_eq!(step, MultiwayStep::CertifiedStop(CertifiedStop { trials: 50, distinct: 1 }));
    }

    #[test]
    fn star_loop_reaches_optimum() {
        let g = star(5.0);
        let (p, trace) = weakly_stable_multiway(&g, &[1, 2, 3], 50, 0, 1e-9).unwrap();
        assert_eq!(p.part(0), 0);
        assert!(trace.iterations <= 4);
        assert!(trace.stop.is_some());
    }

    #[test]
    fn fractional_weights_are_rejected() {
        let g = star(4.5);
        assert!(weakly_stable_multiway(&g, &[1, 2, 3], 10, 0, 1e-9).is_err());
    }
}
