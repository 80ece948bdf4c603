#![allow(dead_code)]

use proptest::prelude::*;
use stablecut::graph::{Cut, WeightedGraph};

/// Graphs on `n ∈ range` vertices with integer weights in `1..10`.
pub fn graph(range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = WeightedGraph> {
    range.prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(prop::option::weighted(0.6, 1u32..10), pairs).prop_map(move |ws| {
            let mut edges = Vec::new();
            let mut i = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if let Some(w) = ws[i] {
                        edges.push((u, v, w as f64));
                    }
                    i += 1;
                }
            }
            WeightedGraph::new(n, edges).unwrap()
        })
    })
}

/// Graphs with at least one edge.
pub fn nonempty_graph(range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = WeightedGraph> {
    graph(range).prop_filter("needs an edge", |g| g.m() > 0)
}

/// A graph together with an arbitrary cut of its vertices.
pub fn graph_and_cut(range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (WeightedGraph, Cut)> {
    graph(range).prop_flat_map(|g| {
        let n = g.n();
        (Just(g), prop::collection::vec(any::<bool>(), n).prop_map(Cut::new))
    })
}
