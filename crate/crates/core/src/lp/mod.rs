//! The CKR relaxation of Minimum Multiway Cut: every vertex is a point of
//! the simplex `Δ_k`, terminal `s_i` is pinned to `e_i`, and the objective is
//! `½·Σ w_uv ‖ū − v̄‖₁`.

mod rounding;
mod simplex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{multiway_cost, validate_terminals, Edge, MultiwayPartition, WeightedGraph};

pub use rounding::{
    distinct_partitions, kt_cap, kt_round, kt_round_seeded, separation_statistics, KtSample,
    PairStatistics, SeparationStatistics,
};

/// Variables: `x_{u,i}` at `u·k + i`, then for every edge `e` and coordinate
/// `i` the pair `p_{e,i}, q_{e,i}` with `x_{u,i} − x_{v,i} = p − q`.
/// Rows: one simplex row per vertex, one difference row per (edge,
/// coordinate), and `k` pin rows per terminal.
#[derive(Clone, Debug, PartialEq)]
pub struct CkrLpProblem {
    n: usize,
    terminals: Vec<usize>,
    edges: Vec<Edge>,
}

impl CkrLpProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `n·k + 2·m·k`.
    pub fn variable_count(&self) -> usize {
        let k = self.k();
        self.n * k + 2 * self.edges.len() * k
    }

    pub fn row_count(&self) -> usize {
        let k = self.k();
        self.n + self.edges.len() * k + k * k
    }

    fn standard_form(&self) -> simplex::StandardLp {
        let (n, k, m) = (self.n, self.k(), self.edges.len());
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.variable_count()];
        let mut c = vec![0.0; self.variable_count()];
        let mut b = Vec::with_capacity(self.row_count());
        for u in 0..n {
            for i in 0..k {
                cols[u * k + i].push((u, 1.0));
            }
            b.push(1.0);
        }
        for (e, edge) in self.edges.iter().enumerate() {
            for i in 0..k {
                let row = n + e * k + i;
                let p = n * k + 2 * (e * k + i);
                cols[edge.u * k + i].push((row, 1.0));
                cols[edge.v * k + i].push((row, -1.0));
                cols[p].push((row, -1.0));
                cols[p + 1].push((row, 1.0));
                c[p] = 0.5 * edge.w;
                c[p + 1] = 0.5 * edge.w;
                b.push(0.0);
            }
        }
        for (t, &s) in self.terminals.iter().enumerate() {
            for i in 0..k {
                let row = n + m * k + t * k + i;
                cols[s * k + i].push((row, 1.0));
                b.push(if i == t { 1.0 } else { 0.0 });
            }
        }
        simplex::StandardLp {
            rows: b.len(),
            cols,
            b,
            c,
        }
    }

    fn points(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let k = self.k();
        (0..self.n).map(|u| x[u * k..(u + 1) * k].to_vec()).collect()
    }
}

/// Builds the relaxation. Requires distinct terminals and `2 ≤ k ≤ n`.
pub fn build_ckr_lp(g: &WeightedGraph, terminals: &[usize]) -> Result<CkrLpProblem> {
    validate_terminals(g.n(), terminals)?;
    if terminals.len() < 2 {
        return Err(Error::Validation(format!(
            "multiway cut needs at least two terminals, got {}",
            terminals.len()
        )));
    }
    Ok(CkrLpProblem {
        n: g.n(),
        terminals: terminals.to_vec(),
        edges: g.edges().to_vec(),
    })
}

/// One simplex point per vertex.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub points: Vec<Vec<f64>>,
    pub objective: f64,
    /// Whether the point is a basic solution returned by the simplex method.
    pub basic: bool,
    pub terminals: Vec<usize>,
    pub pivots: usize,
}

impl LpSolution {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    /// `‖ū − v̄‖₁ / 2`.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        0.5 * self.points[u]
            .iter()
            .zip(&self.points[v])
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// `½·Σ w_uv ‖ū − v̄‖₁` under the weights of `g`.
    pub fn objective_for(&self, g: &WeightedGraph) -> f64 {
        g.edges().iter().map(|e| e.w * self.distance(e.u, e.v)).sum()
    }

    /// A solution from explicit points; checks that they lie in the simplex
    /// and that terminals are pinned.
    pub fn from_points(g: &WeightedGraph, terminals: &[usize], points: Vec<Vec<f64>>) -> Result<Self> {
        validate_terminals(g.n(), terminals)?;
        g.check_vertex_count(points.len())?;
        let k = terminals.len();
        for (u, p) in points.iter().enumerate() {
            let sum: f64 = p.iter().sum();
            if p.len() != k || p.iter().any(|&x| !(x >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Validation(format!("point of vertex {u} is not in the simplex")));
            }
        }
        for (i, &s) in terminals.iter().enumerate() {
            if (0..k).any(|j| points[s][j] != if i == j { 1.0 } else { 0.0 }) {
                return Err(Error::Validation(format!("terminal {s} is not pinned to e_{i}")));
            }
        }
        let mut sol = LpSolution {
            points,
            objective: 0.0,
            basic: false,
            terminals: terminals.to_vec(),
            pivots: 0,
        };
        sol.objective = sol.objective_for(g);
        Ok(sol)
    }
}

/// Snaps coordinates within `tol` of 0 or 1 and renormalizes each point.
fn clean(points: &mut [Vec<f64>], tol: f64) {
    for p in points.iter_mut() {
        for x in p.iter_mut() {
            if *x < tol {
                *x = 0.0;
            } else if *x > 1.0 - tol {
                *x = 1.0;
            }
        }
        let sum: f64 = p.iter().sum();
        if sum > 0.0 {
            for x in p.iter_mut() {
                *x /= sum;
            }
        }
    }
}

fn max_pivots(p: &CkrLpProblem) -> usize {
    200 * (p.variable_count() + p.row_count()) + 10_000
}

/// Solves the relaxation to a basic optimal solution.
pub fn solve_lp(p: &CkrLpProblem, tol: f64) -> Result<LpSolution> {
    if !(tol > 0.0) {
        return Err(Error::Validation(format!("tolerance must be positive, got {tol}")));
    }
    let r = simplex::solve(&p.standard_form(), tol, max_pivots(p))?;
    let mut points = p.points(&r.x);
    clean(&mut points, tol);
    let mut sol = LpSolution {
        points,
        objective: 0.0,
        basic: true,
        terminals: p.terminals.clone(),
        pivots: r.pivots,
    };
    sol.objective = p
        .edges
        .iter()
        .map(|e| e.w * sol.distance(e.u, e.v))
        .sum();
    Ok(sol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LpWitness {
    pub vertex: usize,
    pub coordinate: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LpIntegrality {
    Integral { partition: MultiwayPartition },
    NonIntegral { witness: LpWitness },
}

/// A vertex is integral when one coordinate is at least `1 − eps`, strictly
/// larger than every other, and every other coordinate is at most `eps`.
/// The witness is the coordinate farthest from `{0, 1}`.
pub fn check_lp_integrality(sol: &LpSolution, eps: f64) -> LpIntegrality {
    let mut part_of = Vec::with_capacity(sol.n());
    let mut worst: Option<LpWitness> = None;
    let mut integral = true;
    for (u, p) in sol.points.iter().enumerate() {
        let (arg, max) = p
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        let others_small = p.iter().enumerate().all(|(i, &x)| i == arg || (x <= eps && x < max));
        if !(max >= 1.0 - eps && others_small) {
            integral = false;
        }
        part_of.push(arg);
        for (i, &x) in p.iter().enumerate() {
            let frac = x.min(1.0 - x);
            if worst.is_none_or(|w| frac > w.value.min(1.0 - w.value)) {
                worst = Some(LpWitness {
                    vertex: u,
                    coordinate: i,
                    value: x,
                });
            }
        }
    }
    if integral {
        match MultiwayPartition::new(part_of, sol.terminals.clone()) {
            Ok(partition) => LpIntegrality::Integral { partition },
            Err(_) => LpIntegrality::NonIntegral {
                witness: worst.expect("nonempty"),
            },
        }
    } else {
        LpIntegrality::NonIntegral {
            witness: worst.expect("nonempty"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MultiwayStatus {
    #[serde(rename = "OPTIMAL")]
    Optimal,
    #[serde(rename = "NOT_4STABLE_CERTIFICATE")]
    NotFourStableCertificate,
}

/// Why a non-stability certificate was issued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiwayEvidence {
    /// The basic optimum is fractional.
    FractionalOptimum,
    /// The basic optimum is integral but another optimal point exists.
    AlternativeOptimum,
    /// The integral cost disagrees with the LP value.
    CertificateFailed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobustMultiway {
    pub status: MultiwayStatus,
    pub partition: Option<MultiwayPartition>,
    pub value: Option<f64>,
    pub witness: Option<LpWitness>,
    pub evidence: Option<MultiwayEvidence>,
    pub lp: LpSolution,
}

/// Tolerances of the robust multiway algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LpTolerances {
    /// Pivot and reduced-cost tolerance of the simplex method.
    pub solver: f64,
    /// Integrality threshold on coordinates.
    pub int: f64,
    /// Relative objective slack allowed in the uniqueness probe.
    pub probe_slack: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        Self {
            solver: 1e-9,
            int: 1e-6,
            probe_slack: 1e-9,
        }
    }
}

/// Minimizes `Σ_{u non-terminal} x_{u, P(u)}` over the optimal face, i.e.
/// subject to the objective staying within `slack·(1 + OPT)` of `OPT`. The
/// value stays at the number of non-terminals iff `P` is the only optimum.
fn uniqueness_probe(
    p: &CkrLpProblem,
    partition: &MultiwayPartition,
    opt: f64,
    tol: &LpTolerances,
) -> Result<Option<LpWitness>> {
    let mut lp = p.standard_form();
    let k = p.k();
    let row = lp.rows;
    lp.rows += 1;
    for (j, &cj) in lp.c.iter().enumerate() {
        if cj != 0.0 {
            lp.cols[j].push((row, cj));
        }
    }
    lp.cols.push(vec![(row, 1.0)]);
    lp.b.push(opt + tol.probe_slack * (1.0 + opt.abs()));
    let mut is_terminal = vec![false; p.n];
    for &s in &p.terminals {
        is_terminal[s] = true;
    }
    let mut c = vec![0.0; lp.cols.len()];
    let mut count = 0.0;
    for u in (0..p.n).filter(|&u| !is_terminal[u]) {
        c[u * k + partition.part(u)] = 1.0;
        count += 1.0;
    }
    lp.c = c;
    let r = simplex::solve(&lp, tol.solver, max_pivots(p))?;
    if r.objective >= count - 1e-6 {
        return Ok(None);
    }
    let (vertex, value) = (0..p.n)
        .filter(|&u| !is_terminal[u])
        .map(|u| (u, r.x[u * k + partition.part(u)]))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    Ok(Some(LpWitness {
        vertex,
        coordinate: partition.part(vertex),
        value,
    }))
}

/// Returns the optimal partition when the relaxation has a unique optimum
/// and it is integral; otherwise a certificate that the instance is not
/// 4-stable.
pub fn robust_multiway_cut(
    g: &WeightedGraph,
    terminals: &[usize],
    tol: &LpTolerances,
) -> Result<RobustMultiway> {
    let p = build_ckr_lp(g, terminals)?;
    let lp = solve_lp(&p, tol.solver)?;
    let not_stable = |lp: LpSolution, witness: LpWitness, evidence: MultiwayEvidence| RobustMultiway {
        status: MultiwayStatus::NotFourStableCertificate,
        partition: None,
        value: None,
        witness: Some(witness),
        evidence: Some(evidence),
        lp,
    };
    match check_lp_integrality(&lp, tol.int) {
        LpIntegrality::NonIntegral { witness } => {
            Ok(not_stable(lp, witness, MultiwayEvidence::FractionalOptimum))
        }
        LpIntegrality::Integral { partition } => {
            let cost = multiway_cost(g, &partition)?;
            if (cost - lp.objective).abs() > 1e-6 * (1.0 + g.total_weight()) {
                let witness = LpWitness {
                    vertex: partition.terminals()[0],
                    coordinate: 0,
                    value: 1.0,
                };
                return Ok(not_stable(lp, witness, MultiwayEvidence::CertificateFailed));
            }
            if let Some(witness) = uniqueness_probe(&p, &partition, lp.objective, tol)? {
                return Ok(not_stable(lp, witness, MultiwayEvidence::AlternativeOptimum));
            }
            Ok(RobustMultiway {
                status: MultiwayStatus::Optimal,
                value: Some(cost),
                partition: Some(partition),
                witness: None,
                evidence: None,
                lp,
            })
        }
    }
}
