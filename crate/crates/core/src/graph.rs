//! Instance and solution data model shared by every solver.
//!
//! Weights are stored as `f64`. Every finite `f64` is a dyadic rational, so
//! the `*_exact` helpers evaluate the same quantities without rounding by
//! lifting each weight into a [`Rational`]. The oracles use the exact path
//! to decide strict inequalities.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Exact rational value of a finite float.
pub fn exact(x: f64) -> Rational {
    BigRational::from_float(x).expect("finite weight")
}

pub fn rational_zero() -> Rational {
    BigRational::from_integer(BigInt::zero())
}

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    #[inline]
    pub fn crosses(&self, side: &[bool]) -> bool {
        side[self.u] != side[self.v]
    }

    #[inline]
    pub fn crosses_mask(&self, mask: u64) -> bool {
        ((mask >> self.u) ^ (mask >> self.v)) & 1 == 1
    }
}

/// Undirected graph with nonnegative edge weights and no parallel edges.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    total_weight: f64,
}

impl WeightedGraph {
    /// Builds a graph, canonicalizing every edge to `u < v`.
    ///
    /// Self-loops, out-of-range endpoints, negative or non-finite weights and
    /// repeated unordered pairs are rejected. Parallel edges are never merged.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (index, (a, b, w)) in edges.into_iter().enumerate() {
            for vertex in [a, b] {
                if vertex >= n {
                    return Err(Error::VertexOutOfRange { index, vertex, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop { index, vertex: a });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { index, weight: w });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !seen.insert((u, v)) {
                return Err(Error::DuplicateEdge { index, u, v });
            }
            out.push(Edge { u, v, w });
        }
        let total_weight = out.iter().map(|e| e.w).sum();
        Ok(Self {
            n,
            edges: out,
            total_weight,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn exact_weight(&self, index: usize) -> Rational {
        exact(self.edges[index].w)
    }

    /// Same topology, new weights (one per edge, in edge order).
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.edges.len() {
            return Err(Error::Validation(format!(
                "expected {} weights, got {}",
                self.edges.len(),
                weights.len()
            )));
        }
        Self::new(
            self.n,
            self.edges
                .iter()
                .zip(weights)
                .map(|(e, &w)| (e.u, e.v, w)),
        )
    }

    /// All weights multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let w: Vec<f64> = self.edges.iter().map(|e| e.w * c).collect();
        self.with_weights(&w)
    }

    /// Position of edge `{a, b}` in the edge list.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges.iter().position(|e| e.u == u && e.v == v)
    }

    pub fn is_connected(&self) -> bool {
        connected(self.n, self.edges.iter().map(|e| (e.u, e.v)))
    }

    /// True if every weight is a nonnegative integer.
    pub fn has_integer_weights(&self) -> bool {
        self.edges.iter().all(|e| e.w.fract() == 0.0)
    }

    pub(crate) fn check_vertex_count(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::VertexCountMismatch {
                expected: self.n,
                found,
            });
        }
        Ok(())
    }
}

pub(crate) fn connected(n: usize, pairs: impl Iterator<Item = (usize, usize)>) -> bool {
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut components = n;
    for (a, b) in pairs {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// A bipartition `(S, S̄)`; `side[v]` is true for `v ∈ S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    side: Vec<bool>,
}

impl Cut {
    pub fn new(side: Vec<bool>) -> Self {
        Self { side }
    }

    /// The cut whose side `S` is exactly `members`.
    pub fn from_members(n: usize, members: &[usize]) -> Result<Self> {
        let mut side = vec![false; n];
        for &v in members {
            if v >= n {
                return Err(Error::Validation(format!(
                    "cut member {v} out of range for n = {n}"
                )));
            }
            side[v] = true;
        }
        Ok(Self { side })
    }

    /// Bit `i` of `mask` marks vertex `i` as a member of `S`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self {
            side: (0..n).map(|i| (mask >> i) & 1 == 1).collect(),
        }
    }

    /// The empty side: every vertex in `S̄`.
    pub fn empty(n: usize) -> Self {
        Self {
            side: vec![false; n],
        }
    }

    pub fn n(&self) -> usize {
        self.side.len()
    }

    pub fn side(&self) -> &[bool] {
        &self.side
    }

    pub fn contains(&self, v: usize) -> bool {
        self.side[v]
    }

    pub fn members(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v]).collect()
    }

    pub fn mask(&self) -> Option<u64> {
        if self.side.len() > 64 {
            return None;
        }
        Some(
            self.side
                .iter()
                .enumerate()
                .fold(0u64, |m, (i, &b)| if b { m | (1 << i) } else { m }),
        )
    }

    pub fn complement(&self) -> Self {
        Self {
            side: self.side.iter().map(|b| !b).collect(),
        }
    }

    /// Representative with vertex 0 on side `S`.
    pub fn canonical(&self) -> Self {
        match self.side.first() {
            Some(false) => self.complement(),
            _ => self.clone(),
        }
    }

    /// Whether the two cuts denote the same bipartition.
    pub fn same_bipartition(&self, other: &Cut) -> bool {
        self.canonical() == other.canonical()
    }

    /// `|S Δ T|`.
    pub fn symmetric_difference(&self, other: &Cut) -> usize {
        self.side
            .iter()
            .zip(&other.side)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// `min(|S Δ T|, |S Δ T̄|)`: distance between the bipartitions.
    pub fn bipartition_distance(&self, other: &Cut) -> usize {
        let d = self.symmetric_difference(other);
        d.min(self.n() - d)
    }

    /// Whether a nonempty proper subset is on each side.
    pub fn is_proper(&self) -> bool {
        self.side.iter().any(|&b| b) && self.side.iter().any(|&b| !b)
    }
}

impl Serialize for Cut {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            side: Vec<usize>,
        }
        Repr {
            n: self.n(),
            side: self.members(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cut {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            n: usize,
            side: Vec<usize>,
        }
        let r = Repr::deserialize(d)?;
        Cut::from_members(r.n, &r.side).map_err(serde::de::Error::custom)
    }
}

/// A k-way partition with terminal `terminals[i]` in part `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiwayPartition {
    part_of: Vec<usize>,
    terminals: Vec<usize>,
}

impl MultiwayPartition {
    pub fn new(part_of: Vec<usize>, terminals: Vec<usize>) -> Result<Self> {
        let k = terminals.len();
        let n = part_of.len();
        validate_terminals(n, &terminals)?;
        if let Some(v) = part_of.iter().position(|&p| p >= k) {
            return Err(Error::Validation(format!(
                "vertex {v} assigned to part {} but k = {k}",
                part_of[v]
            )));
        }
        for (i, &s) in terminals.iter().enumerate() {
            if part_of[s] != i {
                return Err(Error::Validation(format!(
                    "terminal {s} must lie in part {i}, found part {}",
                    part_of[s]
                )));
            }
        }
        Ok(Self { part_of, terminals })
    }

    /// Every non-terminal in part 0.
    pub fn all_in_first(n: usize, terminals: &[usize]) -> Result<Self> {
        validate_terminals(n, terminals)?;
        let mut part_of = vec![0; n];
        for (i, &s) in terminals.iter().enumerate() {
            part_of[s] = i;
        }
        Self::new(part_of, terminals.to_vec())
    }

    pub fn n(&self) -> usize {
        self.part_of.len()
    }

    pub fn k(&self) -> usize {
        self.terminals.len()
    }

    pub fn part_of(&self) -> &[usize] {
        &self.part_of
    }

    pub fn part(&self, v: usize) -> usize {
        self.part_of[v]
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    #[inline]
    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.part_of[a] != self.part_of[b]
    }
}

pub(crate) fn validate_terminals(n: usize, terminals: &[usize]) -> Result<()> {
    let mut seen = HashSet::new();
    for &s in terminals {
        if s >= n {
            return Err(Error::Validation(format!(
                "terminal {s} out of range for n = {n}"
            )));
        }
        if !seen.insert(s) {
            return Err(Error::Validation(format!("duplicate terminal {s}")));
        }
    }
    Ok(())
}

/// Per-edge multipliers of a γ-perturbation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub multipliers: Vec<f64>,
    pub gamma: f64,
}

impl Perturbation {
    pub fn identity(m: usize) -> Self {
        Self {
            multipliers: vec![1.0; m],
            gamma: 1.0,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if !(self.gamma >= 1.0) || !self.gamma.is_finite() {
            return Err(Error::Validation(format!(
                "perturbation bound must be a finite value >= 1, got {}",
                self.gamma
            )));
        }
        if self.multipliers.len() != m {
            return Err(Error::Validation(format!(
                "perturbation covers {} edges, graph has {m}",
                self.multipliers.len()
            )));
        }
        if let Some((i, &f)) = self
            .multipliers
            .iter()
            .enumerate()
            .find(|(_, &f)| !(1.0..=self.gamma).contains(&f))
        {
            return Err(Error::Validation(format!(
                "multiplier {f} on edge {i} outside [1, {}]",
                self.gamma
            )));
        }
        Ok(())
    }

    /// Exact perturbed weights `multiplier(e) · w(e)`.
    pub fn exact_weights(&self, g: &WeightedGraph) -> Vec<Rational> {
        g.edges()
            .iter()
            .zip(&self.multipliers)
            .map(|(e, &f)| exact(e.w) * exact(f))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// A weighted graph with a `+`/`-` label on every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedGraph {
    graph: WeightedGraph,
    labels: Vec<Sign>,
}

impl SignedGraph {
    pub fn new(graph: WeightedGraph, labels: Vec<Sign>) -> Result<Self> {
        if labels.len() != graph.m() {
            return Err(Error::Validation(format!(
                "{} labels for {} edges",
                labels.len(),
                graph.m()
            )));
        }
        Ok(Self { graph, labels })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn labels(&self) -> &[Sign] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Weight of agreements of the 2-clustering given by `side`: `+` edges
    /// inside a cluster and `-` edges between clusters.
    pub fn agreement(&self, side: &[bool]) -> f64 {
        self.agreeing_edges(side).map(|e| e.w).sum()
    }

    pub fn agreement_exact(&self, side: &[bool]) -> Rational {
        self.agreeing_edges(side)
            .fold(rational_zero(), |acc, e| acc + exact(e.w))
    }

    fn agreeing_edges<'a>(&'a self, side: &'a [bool]) -> impl Iterator<Item = &'a Edge> + 'a {
        self.graph
            .edges()
            .iter()
            .zip(&self.labels)
            .filter(move |(e, l)| match l {
                Sign::Plus => !e.crosses(side),
                Sign::Minus => e.crosses(side),
            })
            .map(|(e, _)| e)
    }
}

/// Serialized as `{"n": .., "edges": [[u, v, w], ..]}`.
impl Serialize for WeightedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize, f64)>,
        }
        Raw {
            n: self.n,
            edges: self.edges.iter().map(|e| (e.u, e.v, e.w)).collect(),
        }
        .serialize(s)
    }
}

/// `w(E(S, S̄))`.
pub fn cut_weight(g: &WeightedGraph, s: &Cut) -> Result<f64> {
    g.check_vertex_count(s.n())?;
    Ok(g.edges()
        .iter()
        .filter(|e| e.crosses(s.side()))
        .map(|e| e.w)
        .sum())
}

pub fn cut_weight_exact(g: &WeightedGraph, s: &Cut) -> Result<Rational> {
    g.check_vertex_count(s.n())?;
    Ok(g.edges()
        .iter()
        .filter(|e| e.crosses(s.side()))
        .fold(rational_zero(), |acc, e| acc + exact(e.w)))
}

/// `(w(E(S,S̄) ∖ E(T,T̄)), w(E(T,T̄) ∖ E(S,S̄)))`.
pub fn symmetric_difference_weights(g: &WeightedGraph, s: &Cut, t: &Cut) -> Result<(f64, f64)> {
    g.check_vertex_count(s.n())?;
    g.check_vertex_count(t.n())?;
    let mut only_s = 0.0;
    let mut only_t = 0.0;
    for e in g.edges() {
        match (e.crosses(s.side()), e.crosses(t.side())) {
            (true, false) => only_s += e.w,
            (false, true) => only_t += e.w,
            _ => {}
        }
    }
    Ok((only_s, only_t))
}

pub fn symmetric_difference_weights_exact(
    g: &WeightedGraph,
    s: &Cut,
    t: &Cut,
) -> Result<(Rational, Rational)> {
    g.check_vertex_count(s.n())?;
    g.check_vertex_count(t.n())?;
    let mut only_s = rational_zero();
    let mut only_t = rational_zero();
    for e in g.edges() {
        match (e.crosses(s.side()), e.crosses(t.side())) {
            (true, false) => only_s += exact(e.w),
            (false, true) => only_t += exact(e.w),
            _ => {}
        }
    }
    Ok((only_s, only_t))
}

/// Applies a γ-perturbation: `w'(e) = multiplier(e) · w(e)`.
pub fn perturb(g: &WeightedGraph, p: &Perturbation) -> Result<WeightedGraph> {
    p.validate(g.m())?;
    let w: Vec<f64> = g
        .edges()
        .iter()
        .zip(&p.multipliers)
        .map(|(e, f)| e.w * f)
        .collect();
    g.with_weights(&w)
}

/// Indices of the edges cut by `p` and their total weight.
pub fn multiway_cut_edges(g: &WeightedGraph, p: &MultiwayPartition) -> Result<(Vec<usize>, f64)> {
    g.check_vertex_count(p.n())?;
    let cut: Vec<usize> = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| p.separates(e.u, e.v))
        .map(|(i, _)| i)
        .collect();
    let weight = cut.iter().map(|&i| g.edges()[i].w).sum();
    Ok((cut, weight))
}

pub fn multiway_cost(g: &WeightedGraph, p: &MultiwayPartition) -> Result<f64> {
    multiway_cut_edges(g, p).map(|(_, w)| w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn triangle421() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 4.0), (0, 2, 2.0), (1, 2, 1.0)]).unwrap()
    }

    fn star(w1: f64) -> (WeightedGraph, Vec<usize>) {
        // center 0, terminals 1..=3
        let g = WeightedGraph::new(4, [(0, 1, w1), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        (g, vec![1, 2, 3])
    }

    #[test]
    fn cut_weight_examples() {
        let p = path3();
        assert_eq!(cut_weight(&p, &Cut::from_members(3, &[1]).unwrap()).unwrap(), 2.0);
        assert_eq!(cut_weight(&p, &Cut::empty(3)).unwrap(), 0.0);
        let t = triangle421();
        assert_eq!(cut_weight(&t, &Cut::from_members(3, &[0]).unwrap()).unwrap(), 6.0);
    }

    #[test]
    fn cut_weight_rejects_mismatch() {
        let err = cut_weight(&path3(), &Cut::empty(4)).unwrap_err();
        assert!(matches!(err, Error::VertexCountMismatch { expected: 3, found: 4 }));
    }

    #[test]
    fn symmetric_difference_examples() {
        let t = triangle421();
        let s = Cut::from_members(3, &[0]).unwrap();
        assert_eq!(symmetric_difference_weights(&t, &s, &s).unwrap(), (0.0, 0.0));
        let other = Cut::from_members(3, &[1]).unwrap();
        assert_eq!(symmetric_difference_weights(&t, &s, &other).unwrap(), (2.0, 1.0));
        let p = path3();
        let s = Cut::from_members(3, &[1]).unwrap();
        let t = Cut::from_members(3, &[0]).unwrap();
        assert_eq!(symmetric_difference_weights(&p, &s, &t).unwrap(), (1.0, 0.0));
    }

    #[test]
    fn perturb_examples() {
        let t = triangle421();
        let same = perturb(&t, &Perturbation::identity(3)).unwrap();
        assert_eq!(same, t);

        let single = WeightedGraph::new(2, [(0, 1, 2.0)]).unwrap();
        let p = Perturbation {
            multipliers: vec![3.0],
            gamma: 3.0,
        };
        assert_eq!(perturb(&single, &p).unwrap().edges()[0].w, 6.0);

        let p = Perturbation {
            multipliers: vec![1.0, 2.0, 2.0],
            gamma: 2.0,
        };
        let w: Vec<f64> = perturb(&t, &p).unwrap().edges().iter().map(|e| e.w).collect();
        assert_eq!(w, vec![4.0, 4.0, 2.0]);
    }

    #[test]
    fn perturb_rejects_out_of_range_multiplier() {
        let t = triangle421();
        let p = Perturbation {
            multipliers: vec![1.0, 2.5, 1.0],
            gamma: 2.0,
        };
        assert!(matches!(perturb(&t, &p), Err(Error::Validation(_))));
        let p = Perturbation {
            multipliers: vec![0.5, 1.0, 1.0],
            gamma: 2.0,
        };
        assert!(perturb(&t, &p).is_err());
    }

    #[test]
    fn multiway_examples() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let p = MultiwayPartition::new(vec![0, 0, 0], vec![0]).unwrap();
        assert_eq!(multiway_cut_edges(&g, &p).unwrap(), (vec![], 0.0));

        let (g, terminals) = star(1.0);
        let p = MultiwayPartition::new(vec![0, 0, 1, 2], terminals.clone()).unwrap();
        let (edges, w) = multiway_cut_edges(&g, &p).unwrap();
        assert_eq!(w, 2.0);
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&i| (g.edges()[i].u, g.edges()[i].v)).collect();
        assert_eq!(pairs, vec![(0, 2), (0, 3)]);

        let p = MultiwayPartition::new(vec![1, 0, 1, 2], terminals).unwrap();
        assert_eq!(multiway_cost(&g, &p).unwrap(), 2.0);
    }

    #[test]
    fn partition_requires_terminals_in_own_part() {
        assert!(MultiwayPartition::new(vec![1, 1, 0, 2], vec![1, 2, 3]).is_err());
        assert!(MultiwayPartition::new(vec![0, 0, 0], vec![0, 0]).is_err());
    }

    #[test]
    fn construction_errors_are_distinct() {
        assert!(matches!(
            WeightedGraph::new(2, [(0, 0, 1.0)]),
            Err(Error::SelfLoop { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 2, 1.0)]),
            Err(Error::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, -1.0)]),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]),
            Err(Error::DuplicateEdge { .. })
        ));
    }

    #[test]
    fn zero_weight_edges_never_change_cut_weights() {
        let g = WeightedGraph::new(3, [(0, 1, 0.0), (1, 2, 1.0)]).unwrap();
        for mask in 0..8 {
            let c = Cut::from_mask(3, mask);
            let w = cut_weight(&g, &c).unwrap();
            assert_eq!(w, if c.contains(1) != c.contains(2) { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn canonical_form_identifies_complements() {
        let c = Cut::from_members(4, &[1, 2]).unwrap();
        assert!(c.same_bipartition(&c.complement()));
        assert!(c.canonical().contains(0));
        assert_eq!(c.bipartition_distance(&c.complement()), 0);
    }

    #[test]
    fn agreement_counts_plus_inside_and_minus_across() {
        let g = WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 3.0)]).unwrap();
        let sg = SignedGraph::new(g, vec![Sign::Plus, Sign::Minus]).unwrap();
        assert_eq!(sg.agreement(&[true, true, false]), 5.0);
        assert_eq!(sg.agreement(&[true, false, false]), 0.0);
    }

    // Rebuilding T from S and A as in the integrality argument: the cut
    // edges of S not cut by T are exactly the S-edges crossing A.
    #[test]
    fn crossing_identity_exhaustive_small() {
        for n in 2..=6usize {
            let full = (1u64 << n) - 1;
            for s in 0..=full {
                for a in 0..=full {
                    let t = (s & a) | (!s & !a & full);
                    for u in 0..n {
                        for v in (u + 1)..n {
                            let e = Edge { u, v, w: 1.0 };
                            let in_s_not_t = e.crosses_mask(s) && !e.crosses_mask(t);
                            assert_eq!(in_s_not_t, e.crosses_mask(s) && e.crosses_mask(a));
                            let bit = |m: u64, x: usize| (m >> x) & 1 == 1;
                            let region = |x: usize| (bit(s, x), bit(t, x));
                            let quad = [region(u), region(v)];
                            let literal = (quad.contains(&(true, true)) && quad.contains(&(false, true)))
                                || (quad.contains(&(true, false)) && quad.contains(&(false, false)));
                            assert_eq!(in_s_not_t, literal);
                            let in_t_not_s = e.crosses_mask(t) && !e.crosses_mask(s);
                            assert_eq!(in_t_not_s, !e.crosses_mask(s) && e.crosses_mask(a));
                        }
                    }
                }
            }
        }
    }
}
