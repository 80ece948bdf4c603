use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stablecut::generate::{
    generate_stable_maxcut, generate_stable_multiway, generate_weakly_stable_maxcut, random_sparsest_cut_instance,
    rescale_demands,
};
use stablecut::graph::{cut_weight_exact, Sign, SignedGraph, WeightedGraph};
use stablecut::lp::{robust_multiway_cut, LpTolerances, MultiwayStatus};
use stablecut::oracle::{maxcut_stability_report, OracleLimits};
use stablecut::reduce::{cc2_stability_report, cc2_to_maxcut, sc_to_maxcut, Gadget};

fn signed_graph(seed: u64, n: usize) -> SignedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(0.7) {
                edges.push((u, v, rng.gen_range(1..8) as f64));
                labels.push(if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus });
            }
        }
    }
    SignedGraph::new(WeightedGraph::new(n, edges).unwrap(), labels).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn reduced_optimum_is_planted_and_separates_heavy_pairs(seed in any::<u64>(), base in 2usize..=6, gi in 0usize..3) {
        let limits = OracleLimits::default();
        let gamma = [1.5, 2.0, 3.0][gi];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inst = rescale_demands(&random_sparsest_cut_instance(base, &mut rng).unwrap(), gamma, &limits).unwrap();
        let r = sc_to_maxcut(&inst, gamma, Gadget::Symmetric).unwrap();
        let report = maxcut_stability_report(&r.graph, &limits).unwrap();
        prop_assert!(report.is_stable(gamma));
        prop_assert!(report.optimum.same_bipartition(&r.planted));
        let side = report.optimum.side();
        for u in 0..base {
            prop_assert_ne!(side[u], side[base + u]);
        }
    }

    #[test]
    fn cc2_agreement_identity(seed in any::<u64>(), n in 1usize..=6, gamma in 1.0f64..4.0) {
        let sg = signed_graph(seed, n);
        let r = cc2_to_maxcut(&sg, gamma).unwrap();
        for mask in 0..1u32 << n {
            let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            let cut = r.cut_of(&side).unwrap();
            let diff = r.agreement_from_cut(&cut_weight_exact(&r.graph, &cut).unwrap()) - sg.agreement_exact(&side);
            prop_assert!(diff.is_zero());
        }
    }
}

/// The clustering margin exceeds γ exactly when the reduced graph's does.
#[test]
fn clustering_stability_transfers() {
    let limits = OracleLimits::default();
    for seed in 0..40u64 {
        let n = 2 + (seed % 4) as usize;
        let sg = signed_graph(seed, n);
        if sg.graph().m() == 0 {
            continue;
        }
        for gamma in [1.0, 1.5, 3.0] {
            let cc = cc2_stability_report(&sg, &limits).unwrap();
            let r = cc2_to_maxcut(&sg, gamma).unwrap();
            let mc = maxcut_stability_report(&r.graph, &limits).unwrap();
            assert_eq!(cc.is_stable_at(gamma), mc.is_stable(gamma), "seed {seed}, γ = {gamma}");
        }
    }
}

#[test]
fn generators_are_deterministic() {
    let limits = OracleLimits::default();
    assert_eq!(
        generate_stable_maxcut(8, 2.0, 4, &limits).unwrap(),
        generate_stable_maxcut(8, 2.0, 4, &limits).unwrap()
    );
    assert_eq!(
        generate_weakly_stable_maxcut(8, 5.0, 0.2, 4, &limits).unwrap(),
        generate_weakly_stable_maxcut(8, 5.0, 0.2, 4, &limits).unwrap()
    );
    assert_eq!(
        generate_stable_multiway(8, 3, 4.0, 4, &limits).unwrap(),
        generate_stable_multiway(8, 3, 4.0, 4, &limits).unwrap()
    );
}

#[test]
fn gamma_one_always_succeeds() {
    let limits = OracleLimits::default();
    for seed in 0..20 {
        let g = generate_stable_maxcut(6, 1.0, seed, &limits).unwrap();
        assert!(g.margin.exceeds(1.0));
    }
}

#[test]
fn delta_zero_gives_strict_stability() {
    let limits = OracleLimits::default();
    let w = generate_weakly_stable_maxcut(7, 2.0, 0.0, 1, &limits).unwrap();
    assert!(maxcut_stability_report(&w.graph, &limits).unwrap().is_stable(2.0));
}

#[test]
fn stable_multiway_fixtures_are_integral() {
    let limits = OracleLimits::default();
    for seed in 0..10 {
        let s = generate_stable_multiway(8, 3, 4.0, seed, &limits).unwrap();
        let r = robust_multiway_cut(&s.graph, &s.terminals, &LpTolerances::default()).unwrap();
        assert_eq!(r.status, MultiwayStatus::Optimal);
        assert_eq!(r.partition.unwrap(), s.planted);
    }
}
