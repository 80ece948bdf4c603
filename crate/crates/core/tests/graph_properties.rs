mod common;

use common::{graph, graph_and_cut};
use proptest::prelude::*;
use stablecut::graph::{cut_weight, cut_weight_exact, symmetric_difference_weights_exact, Cut};
use stablecut::io::{parse_instance, serialize_instance, Instance};
use stablecut::oracle::{brute_max_cut, maxcut_stability_report, OracleLimits};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_has_the_same_weight((g, s) in graph_and_cut(2..=9)) {
        prop_assert_eq!(cut_weight_exact(&g, &s).unwrap(), cut_weight_exact(&g, &s.complement()).unwrap());
    }

    #[test]
    fn difference_identity((g, s) in graph_and_cut(2..=9), flips in prop::collection::vec(any::<bool>(), 9)) {
        let t = Cut::new(s.side().iter().zip(&flips).map(|(&a, &b)| a ^ b).collect());
        let (only_s, only_t) = symmetric_difference_weights_exact(&g, &s, &t).unwrap();
        let lhs = cut_weight_exact(&g, &s).unwrap() - cut_weight_exact(&g, &t).unwrap();
        prop_assert_eq!(lhs, only_s - only_t);
    }

    #[test]
    fn json_round_trip(g in graph(1..=9), with_terminals in any::<bool>()) {
        let terminals = (with_terminals && g.n() >= 2).then(|| vec![0, g.n() - 1]);
        let inst = Instance::Graph { graph: g, terminals };
        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(text.as_bytes()).unwrap(), inst);
    }

    #[test]
    fn brute_optimum_dominates((g, s) in graph_and_cut(2..=9)) {
        let (_, best) = brute_max_cut(&g, &OracleLimits::default()).unwrap();
        prop_assert!(cut_weight(&g, &s).unwrap() <= best);
    }

    #[test]
    fn margin_bounds_every_competitor((g, t) in graph_and_cut(2..=8)) {
        let report = maxcut_stability_report(&g, &OracleLimits::default()).unwrap();
        if !t.same_bipartition(&report.optimum) {
            let (num, den) = symmetric_difference_weights_exact(&g, &report.optimum, &t).unwrap();
            if let stablecut::oracle::Margin::Finite(m) = &report.margin {
                prop_assert!(num >= den * m);
            }
        }
    }
}
