use rayon::prelude::*;

use super::{chunks, OracleLimits, RatioMin, StabilityReport, ValueBest};
use crate::error::{Error, Result};
use crate::graph::{exact, rational_zero, Cut, Rational, WeightedGraph};

pub(crate) fn canonical_count(n: usize) -> u64 {
    1u64 << (n - 1)
}

/// The `r`-th canonical mask: vertex 0 always on side `S`.
#[inline]
pub(crate) fn canonical_mask(r: u64) -> u64 {
    1 | (r << 1)
}

#[inline]
pub(crate) fn mask_cut_value(g: &WeightedGraph, mask: u64) -> f64 {
    g.edges()
        .iter()
        .filter(|e| e.crosses_mask(mask))
        .map(|e| e.w)
        .sum()
}

pub(crate) fn mask_cut_exact(g: &WeightedGraph, mask: u64) -> Rational {
    g.edges()
        .iter()
        .filter(|e| e.crosses_mask(mask))
        .fold(rational_zero(), |acc, e| acc + exact(e.w))
}

pub(crate) fn check_graph(g: &WeightedGraph, limits: &OracleLimits) -> Result<()> {
    if g.n() == 0 {
        return Err(Error::Validation("graph has no vertices".into()));
    }
    limits.check_cut(g.n())
}

/// Optimal canonical mask (lexicographically smallest canonical bitset on
/// exact ties), its exact value and the number of exactly tied optima.
pub(crate) fn optimum_mask(g: &WeightedGraph) -> (u64, Rational, usize) {
    let n = g.n();
    let best = chunks(canonical_count(n))
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut b = ValueBest::new(false);
            for r in lo..hi {
                let mask = canonical_mask(r);
                b.push(|| Cut::from_mask(n, mask), mask_cut_value(g, mask));
            }
            b
        })
        .reduce(|| ValueBest::new(false), ValueBest::merge);
    let (cut, value, count) = best
        .finish(|c| mask_cut_exact(g, c.mask().expect("n < 64")))
        .expect("at least one canonical cut");
    (cut.mask().expect("n < 64"), value, count)
}

/// Exact maximum cut by enumerating the `2^(n-1)` canonical cuts.
///
/// Ties are broken towards the lexicographically smallest canonical
/// membership vector.
pub fn brute_max_cut(g: &WeightedGraph, limits: &OracleLimits) -> Result<(Cut, f64)> {
    check_graph(g, limits)?;
    let (mask, _, _) = optimum_mask(g);
    Ok((Cut::from_mask(g.n(), mask), mask_cut_value(g, mask)))
}

/// Stability margin of the maximum cut against every other bipartition.
pub fn maxcut_stability_report(
    g: &WeightedGraph,
    limits: &OracleLimits,
) -> Result<StabilityReport<Cut>> {
    check_graph(g, limits)?;
    let n = g.n();
    let (s, _, ties) = optimum_mask(g);
    let scan = chunks(canonical_count(n))
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = RatioMin::new();
            for r in lo..hi {
                let t = canonical_mask(r);
                if t == s {
                    continue;
                }
                let (num, den) = mask_difference(g, s, t);
                acc.push(|| Cut::from_mask(n, t), num, den);
            }
            acc
        })
        .reduce(RatioMin::new, RatioMin::merge);
    let (margin, witness) = scan.finish(|t| mask_difference_exact(g, s, t.mask().expect("n < 64")));
    Ok(StabilityReport {
        optimum: Cut::from_mask(n, s),
        optimum_value: mask_cut_value(g, s),
        margin,
        witness,
        unique_optimum: ties == 1,
    })
}

/// `(w(E(S)∖E(T)), w(E(T)∖E(S)))` for masks.
#[inline]
pub(crate) fn mask_difference(g: &WeightedGraph, s: u64, t: u64) -> (f64, f64) {
    let mut only_s = 0.0;
    let mut only_t = 0.0;
    for e in g.edges() {
        match (e.crosses_mask(s), e.crosses_mask(t)) {
            (true, false) => only_s += e.w,
            (false, true) => only_t += e.w,
            _ => {}
        }
    }
    (only_s, only_t)
}

pub(crate) fn mask_difference_exact(g: &WeightedGraph, s: u64, t: u64) -> (Rational, Rational) {
    let mut only_s = rational_zero();
    let mut only_t = rational_zero();
    for e in g.edges() {
        match (e.crosses_mask(s), e.crosses_mask(t)) {
            (true, false) => only_s += exact(e.w),
            (false, true) => only_t += exact(e.w),
            _ => {}
        }
    }
    (only_s, only_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Margin;

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    // Vertices 1, 2, 3 of the worked examples are 0, 1, 2 here.
    fn weighted_triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 4.0), (0, 2, 2.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn path_max_cut() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let (cut, value) = brute_max_cut(&g, &limits()).unwrap();
        assert_eq!(value, 2.0);
        assert!(cut.same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
    }

    #[test]
    fn unit_triangle_tie_break() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let (cut, value) = brute_max_cut(&g, &limits()).unwrap();
        assert_eq!(value, 2.0);
        // Canonical cuts with vertex 0 in S: {0}, {0,1}, {0,2}; smallest is {0}.
        assert_eq!(cut, Cut::from_members(3, &[0]).unwrap());
        let report = maxcut_stability_report(&g, &limits()).unwrap();
        assert!(!report.unique_optimum);
        assert!(report.margin <= Margin::Finite(exact(1.0)));
    }

    #[test]
    fn weighted_triangle_margin() {
        let g = weighted_triangle();
        let (cut, value) = brute_max_cut(&g, &limits()).unwrap();
        assert_eq!(value, 6.0);
        assert!(cut.same_bipartition(&Cut::from_members(3, &[0]).unwrap()));
        let report = maxcut_stability_report(&g, &limits()).unwrap();
        assert_eq!(report.margin, Margin::Finite(exact(2.0)));
        assert!(report
            .witness
            .as_ref()
            .unwrap()
            .same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
        assert!(report.unique_optimum);
        assert!(report.is_stable(1.5));
        assert!(!report.is_stable(2.0));
    }

    #[test]
    fn bipartite_margin_is_infinite() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5)]).unwrap();
        let report = maxcut_stability_report(&g, &limits()).unwrap();
        assert_eq!(report.margin, Margin::Infinite);
        assert!(report.witness.is_none());
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = WeightedGraph::new(5, [(0, 1, 1.0)]).unwrap();
        let tight = OracleLimits {
            max_cut_vertices: 4,
            ..OracleLimits::default()
        };
        assert!(matches!(
            brute_max_cut(&g, &tight),
            Err(Error::SizeCap { value: 5, cap: 4, .. })
        ));
    }

    #[test]
    fn zero_weight_competitor_gives_zero_margin() {
        // Vertex 2 is attached only by a zero-weight edge: moving it changes
        // nothing, so the ratio is 0/0 = 0.
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 0.0)]).unwrap();
        let report = maxcut_stability_report(&g, &limits()).unwrap();
        assert_eq!(report.margin, Margin::Finite(exact(0.0)));
        assert!(!report.unique_optimum);
    }
}
