use rayon::prelude::*;
use serde::Serialize;

use super::maxcut::canonical_mask;
use super::{chunks, Margin, OracleLimits, RatioMin};
use crate::error::{Error, Result};
use crate::graph::{exact, rational_zero, Cut, Edge, Rational, WeightedGraph};

/// Capacity edges plus demand pairs over the same vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsestCutInstance {
    capacity: WeightedGraph,
    demand: WeightedGraph,
}

/// Serialized as `{"n": .., "edges": [..], "demands": [..]}`.
impl Serialize for SparsestCutInstance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize, f64)>,
            demands: Vec<(usize, usize, f64)>,
        }
        let triples = |es: &[Edge]| es.iter().map(|e| (e.u, e.v, e.w)).collect();
        Raw {
            n: self.n(),
            edges: triples(self.capacities()),
            demands: triples(self.demands()),
        }
        .serialize(s)
    }
}

impl SparsestCutInstance {
    /// Builds an instance with a connected capacity graph, at least one
    /// demand pair, and strictly positive capacities and demands.
    pub fn new<C, D>(n: usize, capacities: C, demands: D) -> Result<Self>
    where
        C: IntoIterator<Item = (usize, usize, f64)>,
        D: IntoIterator<Item = (usize, usize, f64)>,
    {
        let inst = Self::relaxed(n, capacities, demands)?;
        if let Some((i, e)) = inst.capacity.edges().iter().enumerate().find(|(_, e)| e.w <= 0.0) {
            return Err(Error::InvalidWeight { index: i, weight: e.w });
        }
        if let Some(e) = inst.demand.edges().iter().find(|e| e.w <= 0.0) {
            return Err(Error::Validation(format!(
                "demand ({}, {}) must be positive, got {}",
                e.u, e.v, e.w
            )));
        }
        if inst.demand.m() == 0 {
            return Err(Error::Validation("at least one demand pair is required".into()));
        }
        if !inst.capacity.is_connected() {
            return Err(Error::Validation("capacity graph must be connected".into()));
        }
        Ok(inst)
    }

    /// Builds an instance checking only the edge-list invariants. Used for
    /// auxiliary instances whose capacity graph may be disconnected or
    /// whose demand set may be empty.
    pub fn relaxed<C, D>(n: usize, capacities: C, demands: D) -> Result<Self>
    where
        C: IntoIterator<Item = (usize, usize, f64)>,
        D: IntoIterator<Item = (usize, usize, f64)>,
    {
        let capacity = WeightedGraph::new(n, capacities)?;
        let demand = WeightedGraph::new(n, demands).map_err(|e| match e {
            Error::InvalidWeight { index, weight } => {
                Error::Validation(format!("demand {index}: invalid value {weight}"))
            }
            other => other,
        })?;
        Ok(Self { capacity, demand })
    }

    pub fn n(&self) -> usize {
        self.capacity.n()
    }

    pub fn capacities(&self) -> &[Edge] {
        self.capacity.edges()
    }

    pub fn demands(&self) -> &[Edge] {
        self.demand.edges()
    }

    pub fn capacity_graph(&self) -> &WeightedGraph {
        &self.capacity
    }

    pub fn demand_graph(&self) -> &WeightedGraph {
        &self.demand
    }

    /// Whether some bipartition separates a demand pair with positive demand.
    pub fn is_feasible(&self) -> bool {
        self.demand.edges().iter().any(|e| e.w > 0.0)
    }

    /// `(cap(E_c(A, Ā)), dem(E_d(A, Ā)))`.
    pub fn separated(&self, a: &Cut) -> Result<(f64, f64)> {
        self.capacity.check_vertex_count(a.n())?;
        let sum = |g: &WeightedGraph| -> f64 {
            g.edges().iter().filter(|e| e.crosses(a.side())).map(|e| e.w).sum()
        };
        Ok((sum(&self.capacity), sum(&self.demand)))
    }

    pub fn separated_exact(&self, a: &Cut) -> Result<(Rational, Rational)> {
        self.capacity.check_vertex_count(a.n())?;
        let sum = |g: &WeightedGraph| -> Rational {
            g.edges()
                .iter()
                .filter(|e| e.crosses(a.side()))
                .fold(rational_zero(), |acc, e| acc + exact(e.w))
        };
        Ok((sum(&self.capacity), sum(&self.demand)))
    }

    /// `φ(A)`, or `None` when `A` separates no demand.
    pub fn sparsity(&self, a: &Cut) -> Result<Option<f64>> {
        let (cap, dem) = self.separated(a)?;
        Ok((dem > 0.0).then(|| cap / dem))
    }

    fn mask_separated(&self, mask: u64) -> (f64, f64) {
        let sum = |g: &WeightedGraph| -> f64 {
            g.edges().iter().filter(|e| e.crosses_mask(mask)).map(|e| e.w).sum()
        };
        (sum(&self.capacity), sum(&self.demand))
    }
}

/// A minimizer of `φ` and its value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparsestCutResult {
    pub cut: Cut,
    pub phi: f64,
    #[serde(skip)]
    pub phi_exact: Rational,
}

/// Exact minimum-sparsity cut over all bipartitions separating some demand.
/// Ties go to the lexicographically smallest canonical membership vector.
pub fn brute_sparsest_cut(
    inst: &SparsestCutInstance,
    limits: &OracleLimits,
) -> Result<SparsestCutResult> {
    let n = inst.n();
    if n < 2 {
        return Err(Error::Infeasible("fewer than two vertices".into()));
    }
    limits.check_cut(n)?;
    // Canonical masks minus the full vertex set.
    let count = (1u64 << (n - 1)) - 1;
    let scan = chunks(count)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = RatioMin::new();
            for r in lo..hi {
                let mask = canonical_mask(r);
                let (cap, dem) = inst.mask_separated(mask);
                if dem > 0.0 {
                    acc.push(|| Cut::from_mask(n, mask), cap, dem);
                }
            }
            acc
        })
        .reduce(RatioMin::new, RatioMin::merge);
    let (margin, cut) = scan.finish(|a| inst.separated_exact(a).expect("same n"));
    match (margin, cut) {
        (Margin::Finite(phi_exact), Some(cut)) => {
            let (cap, dem) = inst.separated(&cut)?;
            Ok(SparsestCutResult {
                cut,
                phi: cap / dem,
                phi_exact,
            })
        }
        _ => Err(Error::Infeasible("no cut separates a demand pair".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pair() {
        let inst = SparsestCutInstance::new(2, [(0, 1, 3.0)], [(0, 1, 1.0)]).unwrap();
        let r = brute_sparsest_cut(&inst, &OracleLimits::default()).unwrap();
        assert_eq!(r.phi, 3.0);
        assert_eq!(r.cut, Cut::from_members(2, &[0]).unwrap());
    }

    #[test]
    fn four_cycle_with_disjoint_demand() {
        // Capacity 4-cycle 0-1-2-3-0; demands on the diagonal (0, 2) only.
        let inst = SparsestCutInstance::new(
            4,
            [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)],
            [(0, 2, 1.0)],
        )
        .unwrap();
        let r = brute_sparsest_cut(&inst, &OracleLimits::default()).unwrap();
        // Independent enumeration over the 7 bipartitions.
        let mut best = f64::INFINITY;
        for mask in 1u64..15 {
            let a = Cut::from_mask(4, mask);
            if let Some(phi) = inst.sparsity(&a).unwrap() {
                best = best.min(phi);
            }
        }
        assert_eq!(r.phi, best);
        assert_eq!(r.phi, 2.0);
    }

    #[test]
    fn demand_scaling_divides_phi() {
        let caps = [(0, 1, 2.0), (1, 2, 1.0), (0, 2, 5.0)];
        let base = SparsestCutInstance::new(3, caps, [(0, 2, 1.0), (1, 2, 3.0)]).unwrap();
        let scaled = SparsestCutInstance::new(3, caps, [(0, 2, 4.0), (1, 2, 12.0)]).unwrap();
        let a = brute_sparsest_cut(&base, &OracleLimits::default()).unwrap();
        let b = brute_sparsest_cut(&scaled, &OracleLimits::default()).unwrap();
        assert_eq!(b.phi_exact * exact(4.0), a.phi_exact);
    }

    #[test]
    fn validation() {
        assert!(SparsestCutInstance::new(3, [(0, 1, 1.0)], [(0, 2, 1.0)]).is_err());
        assert!(SparsestCutInstance::new(2, [(0, 1, 1.0)], []).is_err());
        assert!(SparsestCutInstance::new(2, [(0, 1, 0.0)], [(0, 1, 1.0)]).is_err());
        assert!(SparsestCutInstance::new(2, [(0, 1, 1.0)], [(0, 1, 0.0)]).is_err());
        let aux = SparsestCutInstance::relaxed(3, [], [(0, 2, 1.0)]).unwrap();
        let r = brute_sparsest_cut(&aux, &OracleLimits::default()).unwrap();
        assert_eq!(r.phi, 0.0);
        let empty = SparsestCutInstance::relaxed(3, [(0, 1, 1.0)], []).unwrap();
        assert!(matches!(
            brute_sparsest_cut(&empty, &OracleLimits::default()),
            Err(Error::Infeasible(_))
        ));
    }
}
