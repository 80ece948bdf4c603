use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::maxcut::{canonical_count, canonical_mask, check_graph, optimum_mask};
use super::{chunks, OracleLimits};
use crate::error::{Error, Result};
use crate::graph::{exact, rational_zero, Cut, Perturbation, WeightedGraph};

/// Outcome of the (γ, δ) weak-stability certification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakStabilityResult {
    pub stable: bool,
    pub optimum: Cut,
    /// The first canonical cut outside the neighborhood that violates the
    /// strict inequality.
    pub violating: Option<Cut>,
}

/// Outcome of checking the optimum against explicit γ-perturbations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub consistent: bool,
    pub perturbations_checked: usize,
    /// A perturbation together with a cut outside the neighborhood that is
    /// at least as heavy as the optimum under it.
    pub counterexample: Option<(Perturbation, Cut)>,
}

fn check_params(gamma: f64, delta: f64) -> Result<()> {
    if !(gamma >= 1.0 && gamma.is_finite()) {
        return Err(Error::Validation(format!("gamma must be finite and >= 1, got {gamma}")));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Validation(format!("delta must lie in [0, 1], got {delta}")));
    }
    Ok(())
}

/// `outside[d]` tells whether a cut at Hamming distance `d` from `S` lies
/// outside the δ-neighborhood, i.e. `d > δn` and `n − d > δn` (exactly).
fn outside_table(n: usize, delta: f64) -> Vec<bool> {
    let radius = exact(delta) * exact(n as f64);
    let far: Vec<bool> = (0..=n).map(|d| exact(d as f64) > radius).collect();
    (0..=n).map(|d| far[d] && far[n - d]).collect()
}

/// Decides `a > b` where the float values are close approximations of
/// nonnegative exact values produced on demand.
fn strictly_greater(
    a: f64,
    b: f64,
    exact_pair: impl FnOnce() -> (crate::graph::Rational, crate::graph::Rational),
) -> bool {
    let slack = 1e-9 * (a.abs() + b.abs());
    if a - b > slack {
        true
    } else if b - a > slack {
        false
    } else {
        let (x, y) = exact_pair();
        x > y
    }
}

/// Checks whether every cut `T` with `|S Δ T| > δn` and `|S Δ T̄| > δn`
/// satisfies `w(E(S)∖E(T)) > γ·w(E(T)∖E(S))`, where `S` is the exact
/// maximum cut.
pub fn weak_stability_check(
    g: &WeightedGraph,
    gamma: f64,
    delta: f64,
    limits: &OracleLimits,
) -> Result<WeakStabilityResult> {
    check_params(gamma, delta)?;
    check_graph(g, limits)?;
    let n = g.n();
    let (s, _, _) = optimum_mask(g);
    let outside = outside_table(n, delta);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let gamma_exact = exact(gamma);
    let violating = chunks(canonical_count(n))
        .into_par_iter()
        .filter_map(|(lo, hi)| {
            (lo..hi).map(canonical_mask).find(|&t| {
                let d = ((s ^ t) & full).count_ones() as usize;
                if !outside[d] {
                    return false;
                }
                let (num, den) = super::maxcut::mask_difference(g, s, t);
                !strictly_greater(num, gamma * den, || {
                    let (x, y) = super::maxcut::mask_difference_exact(g, s, t);
                    (x, y * &gamma_exact)
                })
            })
        })
        .min();
    Ok(WeakStabilityResult {
        stable: violating.is_none(),
        optimum: Cut::from_mask(n, s),
        violating: violating.map(|t| Cut::from_mask(n, t)),
    })
}

/// Applies the identity, `trials` uniform γ-perturbations, and for every
/// cut `T` outside the δ-neighborhood the perturbation that multiplies the
/// edges cut by `T` by γ; under each, checks `w'(S) > w'(T)` for every `T`
/// outside the neighborhood. `delta = 0` gives the strong form.
pub fn perturbation_cross_check(
    g: &WeightedGraph,
    gamma: f64,
    delta: f64,
    trials: usize,
    seed: u64,
    limits: &OracleLimits,
) -> Result<CrossCheck> {
    check_params(gamma, delta)?;
    check_graph(g, limits)?;
    let n = g.n();
    let m = g.m();
    let (s, _, _) = optimum_mask(g);
    let outside = outside_table(n, delta);
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let candidates: Vec<u64> = (0..canonical_count(n))
        .map(canonical_mask)
        .filter(|&t| outside[((s ^ t) & full).count_ones() as usize])
        .collect();

    let mut perturbations = vec![Perturbation::identity(m)];
    perturbations[0].gamma = gamma;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        perturbations.push(Perturbation {
            multipliers: (0..m).map(|_| rng.gen_range(1.0..=gamma)).collect(),
            gamma,
        });
    }
    for &t in &candidates {
        perturbations.push(Perturbation {
            multipliers: g
                .edges()
                .iter()
                .map(|e| if e.crosses_mask(t) { gamma } else { 1.0 })
                .collect(),
            gamma,
        });
    }

    let checked = perturbations.len();
    for p in perturbations {
        let w: Vec<f64> = g.edges().iter().zip(&p.multipliers).map(|(e, f)| e.w * f).collect();
        let beaten = candidates.iter().copied().find(|&t| {
            let mut only_s = 0.0;
            let mut only_t = 0.0;
            for (e, we) in g.edges().iter().zip(&w) {
                match (e.crosses_mask(s), e.crosses_mask(t)) {
                    (true, false) => only_s += we,
                    (false, true) => only_t += we,
                    _ => {}
                }
            }
            !strictly_greater(only_s, only_t, || {
                let mut x = rational_zero();
                let mut y = rational_zero();
                for (e, f) in g.edges().iter().zip(&p.multipliers) {
                    match (e.crosses_mask(s), e.crosses_mask(t)) {
                        (true, false) => x += exact(e.w) * exact(*f),
                        (false, true) => y += exact(e.w) * exact(*f),
                        _ => {}
                    }
                }
                (x, y)
            })
        });
        if let Some(t) = beaten {
            return Ok(CrossCheck {
                consistent: false,
                perturbations_checked: checked,
                counterexample: Some((p, Cut::from_mask(n, t))),
            });
        }
    }
    Ok(CrossCheck {
        consistent: true,
        perturbations_checked: checked,
        counterexample: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn weighted_triangle() -> WeightedGraph {
        WeightedGraph::new(3, [(0, 1, 4.0), (0, 2, 2.0), (1, 2, 1.0)]).unwrap()
    }

    fn limits() -> OracleLimits {
        OracleLimits::default()
    }

    #[test]
    fn delta_zero_matches_strict_stability() {
        let g = weighted_triangle();
        assert!(weak_stability_check(&g, 1.5, 0.0, &limits()).unwrap().stable);
        let r = weak_stability_check(&g, 2.0, 0.0, &limits()).unwrap();
        assert!(!r.stable);
        assert!(r
            .violating
            .unwrap()
            .same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
    }

    #[test]
    fn delta_one_is_vacuous() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(!weak_stability_check(&g, 1.0, 0.0, &limits()).unwrap().stable);
        assert!(weak_stability_check(&g, 1.0, 1.0, &limits()).unwrap().stable);
    }

    #[test]
    fn triangle_perturbations() {
        let g = weighted_triangle();
        let ok = perturbation_cross_check(&g, 1.5, 0.0, 200, 7, &limits()).unwrap();
        assert!(ok.consistent);
        let bad = perturbation_cross_check(&g, 2.5, 0.0, 0, 7, &limits()).unwrap();
        assert!(!bad.consistent);
        let (p, t) = bad.counterexample.unwrap();
        p.validate(g.m()).unwrap();
        assert!(t.same_bipartition(&Cut::from_members(3, &[1]).unwrap()));
    }

    #[test]
    fn identity_only() {
        let g = weighted_triangle();
        let r = perturbation_cross_check(&g, 1.0, 0.0, 0, 0, &limits()).unwrap();
        assert!(r.consistent);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = weighted_triangle();
        assert!(weak_stability_check(&g, 0.5, 0.0, &limits()).is_err());
        assert!(weak_stability_check(&g, 1.0, 1.5, &limits()).is_err());
    }
}
