mod common;

use common::nonempty_graph;
use proptest::prelude::*;
use stablecut::graph::{multiway_cost, WeightedGraph};
use stablecut::lp::{
    build_ckr_lp, kt_round_seeded, robust_multiway_cut, solve_lp, LpTolerances, MultiwayStatus,
};
use stablecut::oracle::{brute_max_cut, brute_multiway_cut, multiway_stability_report, OracleLimits};
use stablecut::sdp::{robust_max_cut, MaxCutStatus, SdpTolerances};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sdp_bounds_and_soundness(g in nonempty_graph(2..=8)) {
        let (_, best) = brute_max_cut(&g, &OracleLimits::default()).unwrap();
        let r = robust_max_cut(&g, &SdpTolerances::default()).unwrap();
        prop_assert!(r.sdp.objective >= best - 1e-6 * g.total_weight());
        if r.status == MaxCutStatus::Optimal {
            prop_assert!((r.value.unwrap() - best).abs() <= 1e-9 * g.total_weight());
        }
    }

    #[test]
    fn lp_bounds_and_soundness(g in nonempty_graph(3..=9), k in 2usize..=3) {
        let k = k.min(g.n());
        let terminals: Vec<usize> = (0..k).collect();
        let limits = OracleLimits::default();
        let report = multiway_stability_report(&g, &terminals, &limits).unwrap();
        let r = robust_multiway_cut(&g, &terminals, &LpTolerances::default()).unwrap();
        prop_assert!(r.lp.objective <= report.optimum_value + 1e-7);
        if r.status == MultiwayStatus::Optimal {
            prop_assert_eq!(r.partition.as_ref(), Some(&report.optimum));
        }
        if report.is_stable(4.0) {
            prop_assert_eq!(r.status, MultiwayStatus::Optimal);
        }
    }

    #[test]
    fn rounding_keeps_terminals(g in nonempty_graph(3..=9), seed in any::<u64>()) {
        let terminals = [0, 1, 2];
        let sol = solve_lp(&build_ckr_lp(&g, &terminals).unwrap(), 1e-9).unwrap();
        let p = kt_round_seeded(&sol, seed).partition;
        for (i, &t) in terminals.iter().enumerate() {
            prop_assert_eq!(p.part(t), i);
        }
        let (_, best) = brute_multiway_cut(&g, &terminals, &OracleLimits::default()).unwrap();
        prop_assert!(multiway_cost(&g, &p).unwrap() >= best);
    }
}

#[test]
fn path_and_triangle_fixtures() {
    let path = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    let r = robust_max_cut(&path, &SdpTolerances::default()).unwrap();
    assert_eq!(r.status, MaxCutStatus::Optimal);
    assert_eq!(r.value, Some(2.0));

    let tri = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap();
    let r = robust_max_cut(&tri, &SdpTolerances::default()).unwrap();
    assert_eq!(r.status, MaxCutStatus::NotStableCertificate);
    assert!((r.sdp.objective - 2.0).abs() < 1e-5);
}

#[test]
fn unit_star_is_not_four_stable() {
    let g = WeightedGraph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
    let r = robust_multiway_cut(&g, &[1, 2, 3], &LpTolerances::default()).unwrap();
    assert_eq!(r.status, MultiwayStatus::NotFourStableCertificate);
}
