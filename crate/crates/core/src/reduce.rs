//! Reductions to Max Cut: non-uniform sparsest cut with a planted stable
//! cut, and 2-correlation clustering.

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{exact, rational_zero, Cut, Rational, Sign, SignedGraph, WeightedGraph};
use crate::io::{serialize_instance, Instance};
use crate::oracle::{Margin, OracleLimits, SparsestCutInstance};

/// How a capacity edge `(u, v)` enters the reduced graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gadget {
    /// `(u₁, v₂)` and `(u₂, v₁)`, each with weight `cap(u, v)`.
    #[default]
    Symmetric,
    /// `(u₁, v₂)` only.
    Literal,
}

/// Vertex `u` of the source instance becomes `u₁ = u` and `u₂ = n + u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionArtifact {
    pub graph: WeightedGraph,
    /// `{u₁ : u ∈ V₀}`.
    pub planted: Cut,
    pub w_inf: f64,
    pub gadget: Gadget,
    pub provenance: Value,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::Validation(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    Ok(())
}

/// Heavy pairs `(u₁, u₂)` carry `W∞ = 2γ·(total light weight) + 1`.
pub fn sc_to_maxcut(inst: &SparsestCutInstance, gamma: f64, gadget: Gadget) -> Result<ReductionArtifact> {
    check_gamma(gamma)?;
    let n = inst.n();
    let mut edges = Vec::new();
    for e in inst.capacities().iter().filter(|e| e.w > 0.0) {
        edges.push((e.u, n + e.v, e.w));
        if gadget == Gadget::Symmetric {
            edges.push((n + e.u, e.v, e.w));
        }
    }
    for e in inst.demands().iter().filter(|e| e.w > 0.0) {
        edges.push((e.u, e.v, e.w));
        edges.push((n + e.u, n + e.v, e.w));
    }
    let light: f64 = edges.iter().map(|e| e.2).sum();
    let w_inf = 2.0 * gamma * light + 1.0;
    edges.extend((0..n).map(|u| (u, n + u, w_inf)));
    let graph = WeightedGraph::new(2 * n, edges)?;
    let planted = Cut::new((0..2 * n).map(|v| v < n).collect());
    let source: Value = serde_json::from_str(&serialize_instance(&Instance::SparsestCut(inst.clone())))
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(ReductionArtifact {
        graph,
        planted,
        w_inf,
        gadget,
        provenance: json!({
            "reduction": "sparsest_cut_to_max_cut",
            "gamma": gamma,
            "gadget": gadget,
            "w_inf": w_inf,
            "source": source,
        }),
    })
}

/// The doubled graph of a signed graph: vertex `u` stays `u`, its copy
/// `u′` is `n + u`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cc2Reduction {
    pub graph: WeightedGraph,
    pub w_inf: f64,
    n: usize,
}

impl Cc2Reduction {
    /// `S′ = {u : u ∈ S} ∪ {u′ : u ∈ S̄}`.
    pub fn cut_of(&self, clustering: &[bool]) -> Result<Cut> {
        if clustering.len() != self.n {
            return Err(Error::VertexCountMismatch {
                expected: self.n,
                found: clustering.len(),
            });
        }
        Ok(Cut::new(
            clustering.iter().copied().chain(clustering.iter().map(|&x| !x)).collect(),
        ))
    }

    /// The clustering read off the original vertices, when the cut
    /// separates every pair `(u, u′)`.
    pub fn clustering_of(&self, cut: &Cut) -> Option<Vec<bool>> {
        let side = cut.side();
        if side.len() != 2 * self.n || (0..self.n).any(|u| side[u] == side[self.n + u]) {
            return None;
        }
        Some(side[..self.n].to_vec())
    }

    /// `Agree(C) = w(mapped cut) − n·W∞`, exactly.
    pub fn agreement_from_cut(&self, cut_value: &Rational) -> Rational {
        cut_value - exact(self.w_inf) * exact(self.n as f64)
    }
}

/// Minus-edges stay as `(u, v)`, plus-edges become `(u′, v)` and `(u, v′)`
/// with half the weight each, and `(u, u′)` gets `W∞ = 2γ·Σw`.
pub fn cc2_to_maxcut(sg: &SignedGraph, gamma: f64) -> Result<Cc2Reduction> {
    check_gamma(gamma)?;
    let n = sg.n();
    let g = sg.graph();
    let mut edges = Vec::new();
    for (e, l) in g.edges().iter().zip(sg.labels()) {
        match l {
            Sign::Minus => edges.push((e.u, e.v, e.w)),
            Sign::Plus => {
                edges.push((n + e.u, e.v, e.w / 2.0));
                edges.push((e.u, n + e.v, e.w / 2.0));
            }
        }
    }
    let w_inf = 2.0 * gamma * g.total_weight();
    edges.extend((0..n).map(|u| (u, n + u, w_inf)));
    Ok(Cc2Reduction {
        graph: WeightedGraph::new(2 * n, edges)?,
        w_inf,
        n,
    })
}

/// Best 2-clustering by agreement and its stability margin: the minimum
/// over other clusterings `C` of `w(A* ∖ A_C) / w(A_C ∖ A*)`, where `A` is
/// the set of agreeing edges.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusteringReport {
    pub clustering: Vec<bool>,
    pub agreement: f64,
    pub margin: Margin,
}

impl ClusteringReport {
    /// Strict: `γ < margin`.
    pub fn is_stable_at(&self, gamma: f64) -> bool {
        self.margin.exceeds(gamma)
    }
}

pub fn cc2_stability_report(sg: &SignedGraph, limits: &OracleLimits) -> Result<ClusteringReport> {
    let n = sg.n();
    limits.check_cut(n)?;
    if n == 0 {
        return Err(Error::Validation("signed graph has no vertices".into()));
    }
    let g = sg.graph();
    let weights: Vec<Rational> = (0..g.m()).map(|i| g.exact_weight(i)).collect();
    let agrees = |mask: u64| -> Vec<bool> {
        g.edges()
            .iter()
            .zip(sg.labels())
            .map(|(e, l)| {
                let cut = e.crosses_mask(mask);
                match l {
                    Sign::Plus => !cut,
                    Sign::Minus => cut,
                }
            })
            .collect()
    };
    let total = |a: &[bool]| {
        a.iter()
            .zip(&weights)
            .filter(|(x, _)| **x)
            .fold(rational_zero(), |acc, (_, w)| acc + w)
    };
    let masks: Vec<u64> = (0..1u64 << (n - 1)).map(|r| 1 | (r << 1)).collect();
    let mut best: Option<(u64, Rational)> = None;
    for &mask in &masks {
        let v = total(&agrees(mask));
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((mask, v));
        }
    }
    let (star, value) = best.expect("at least one clustering");
    let a_star = agrees(star);
    let mut margin = Margin::Infinite;
    for &mask in masks.iter().filter(|&&m| m != star) {
        let a = agrees(mask);
        let (mut num, mut den) = (rational_zero(), rational_zero());
        for ((x, y), w) in a_star.iter().zip(&a).zip(&weights) {
            match (x, y) {
                (true, false) => num += w,
                (false, true) => den += w,
                _ => {}
            }
        }
        let r = if den.is_zero() {
            if num.is_zero() {
                Margin::Finite(rational_zero())
            } else {
                Margin::Infinite
            }
        } else {
            Margin::Finite(num / den)
        };
        margin = margin.min(r);
    }
    Ok(ClusteringReport {
        clustering: (0..n).map(|v| star >> v & 1 == 1).collect(),
        agreement: value.to_f64().unwrap_or(f64::NAN),
        margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::cut_weight_exact;
    use crate::oracle::{brute_max_cut, maxcut_stability_report};

    #[test]
    fn literal_two_vertex_example() {
        let inst = SparsestCutInstance::new(2, [(0, 1, 3.0)], [(0, 1, 1.0)]).unwrap();
        let r = sc_to_maxcut(&inst, 2.0, Gadget::Literal).unwrap();
        assert_eq!(r.w_inf, 21.0);
        assert_eq!(r.graph.n(), 4);
        assert_eq!(r.graph.m(), 5);
        let (cut, _) = brute_max_cut(&r.graph, &OracleLimits::default()).unwrap();
        assert!(cut.same_bipartition(&r.planted));
        // One capacity orientation leaves only half the capacity in the ratio.
        let report = maxcut_stability_report(&r.graph, &OracleLimits::default()).unwrap();
        assert_eq!(report.margin.to_f64(), 1.5);
    }

    #[test]
    fn symmetric_two_vertex_example() {
        let inst = SparsestCutInstance::new(2, [(0, 1, 3.0)], [(0, 1, 1.0)]).unwrap();
        let r = sc_to_maxcut(&inst, 2.0, Gadget::Symmetric).unwrap();
        assert_eq!(r.w_inf, 33.0);
        let report = maxcut_stability_report(&r.graph, &OracleLimits::default()).unwrap();
        assert!(report.optimum.same_bipartition(&r.planted));
        assert!(report.is_stable(2.0));
        assert_eq!(report.margin.to_f64(), 3.0);
    }

    #[test]
    fn demand_free_pairs_add_no_gadget() {
        let inst = SparsestCutInstance::new(3, [(0, 1, 1.0), (1, 2, 1.0)], [(0, 2, 1.0)]).unwrap();
        let r = sc_to_maxcut(&inst, 1.0, Gadget::Symmetric).unwrap();
        assert_eq!(r.graph.m(), 4 + 2 + 3);
        assert!(r.graph.edge_index(0, 1).is_none());
        assert!(r.graph.edge_index(0, 2).is_some());
    }

    #[test]
    fn single_plus_edge_agreement_identity() {
        let g = WeightedGraph::new(2, [(0, 1, 1.0)]).unwrap();
        let sg = SignedGraph::new(g, vec![Sign::Plus]).unwrap();
        let r = cc2_to_maxcut(&sg, 1.0).unwrap();
        assert_eq!(r.graph.n(), 4);
        for side in [[true, true], [true, false], [false, true], [false, false]] {
            let cut = r.cut_of(&side).unwrap();
            let value = cut_weight_exact(&r.graph, &cut).unwrap();
            assert_eq!(r.agreement_from_cut(&value), sg.agreement_exact(&side));
            assert_eq!(r.clustering_of(&cut).unwrap(), side.to_vec());
        }
        let (best, _) = brute_max_cut(&r.graph, &OracleLimits::default()).unwrap();
        let c = r.clustering_of(&best).unwrap();
        assert_eq!(c[0], c[1]);
    }

    #[test]
    fn all_minus_keeps_the_graph() {
        let g = WeightedGraph::new(3, [(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let sg = SignedGraph::new(g, vec![Sign::Minus; 2]).unwrap();
        let r = cc2_to_maxcut(&sg, 1.0).unwrap();
        assert_eq!(r.graph.m(), 2 + 3);
        assert_eq!(r.graph.edges()[0].w, 2.0);
        assert_eq!(r.w_inf, 6.0);
    }

    #[test]
    fn clustering_margin_of_a_path() {
        // A plus edge of weight 3 and a minus edge of weight 1.
        let g = WeightedGraph::new(3, [(0, 1, 3.0), (1, 2, 1.0)]).unwrap();
        let sg = SignedGraph::new(g, vec![Sign::Plus, Sign::Minus]).unwrap();
        let r = cc2_stability_report(&sg, &OracleLimits::default()).unwrap();
        assert_eq!(r.agreement, 4.0);
        assert_eq!(r.clustering, vec![true, true, false]);
        assert!(r.margin.is_infinite());
    }
}
