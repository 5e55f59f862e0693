mod common;

use std::collections::HashSet;

use common::*;
use esc_toolkit::graph::{KgNode, KnowledgeGraph, NodeType};
use esc_toolkit::retrieval::{
    brute_force_retrieve, build_query_graph, candidate_subgraphs, rank_order, retrieve, score_subgraph,
    CommonsenseRelation, ConstantSimilarity, LexicalSimilarity, QueryGraph, RetrievalConfig, RetrievalError,
    TieBreak,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_query(rng: &mut ChaCha8Rng) -> QueryGraph {
    let words = |rng: &mut ChaCha8Rng| {
        let n = rng.gen_range(1..=3);
        (0..n).map(|_| *TOY_WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ")
    };
    let mut expansions = Vec::new();
    for r in CommonsenseRelation::ALL {
        if rng.gen_bool(0.6) {
            expansions.push((r, words(rng)));
        }
    }
    build_query_graph(&words(rng), expansions).unwrap()
}

fn setup(seed: u64) -> (KnowledgeGraph, QueryGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(&mut rng, 1000);
    let q = random_query(&mut rng);
    (g, q)
}

fn full_k(g: &KnowledgeGraph) -> usize {
    NodeType::ALL.iter().map(|&t| g.nodes_of(t).len()).max().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn full_k_matches_exhaustive_reference(seed in any::<u64>()) {
        let (g, q) = setup(seed);
        let f = LexicalSimilarity::default();
        let all = naive_subgraphs(&g);
        // reference ranking: score desc, then (expectation, stressor, affect, response) ids asc
        let mut reference: Vec<(f64, [String; 4])> = all
            .iter()
            .map(|ids| {
                let score: f64 = [NodeType::Expectation, NodeType::AffectiveState, NodeType::Stressor, NodeType::Response]
                    .iter()
                    .zip(ids)
                    .filter_map(|(&t, id)| {
                        q.description(t).map(|d| f.dice(&d, &g.node(g.lookup(id).unwrap()).text))
                    })
                    .fold(0.0, |a, x| a + x);
                (score, ids.clone())
            })
            .collect();
        reference.sort_by(|a, b| {
            b.0.total_cmp(&a.0).then_with(|| {
                let key = |x: &[String; 4]| (x[0].clone(), x[2].clone(), x[1].clone(), x[3].clone());
                key(&a.1).cmp(&key(&b.1))
            })
        });
        let n = all.len().max(1);
        let out = retrieve(&q, &g, &f, &RetrievalConfig::new(full_k(&g), n).unwrap()).unwrap();
        prop_assert_eq!(out.results.len(), all.len());
        for (r, (score, ids)) in out.results.iter().zip(&reference) {
            let got = [r.subgraph.expectation, r.subgraph.affective_state, r.subgraph.stressor, r.subgraph.response]
                .map(|i| g.node(i).id.clone());
            prop_assert_eq!(&got, ids);
            prop_assert_eq!(r.score, *score);
        }
    }

    #[test]
    fn matches_brute_force_for_any_n(seed in any::<u64>(), n in 1usize..8) {
        let (g, q) = setup(seed);
        let f = LexicalSimilarity::default();
        let fast = retrieve(&q, &g, &f, &RetrievalConfig::new(full_k(&g), n).unwrap()).unwrap();
        let slow = brute_force_retrieve(&q, &g, &f, n, 1000).unwrap();
        prop_assert_eq!(fast.results, slow.results);
    }

    #[test]
    fn candidates_grow_with_k(seed in any::<u64>(), k1 in 1usize..7, extra in 0usize..4) {
        let (g, q) = setup(seed);
        let f = LexicalSimilarity::default();
        let small: HashSet<_> = candidate_subgraphs(&q, &g, &f, k1).unwrap().into_iter().map(|s| s.subgraph).collect();
        let large: HashSet<_> = candidate_subgraphs(&q, &g, &f, k1 + extra).unwrap().into_iter().map(|s| s.subgraph).collect();
        prop_assert!(small.is_subset(&large));

        let best = |k| retrieve(&q, &g, &f, &RetrievalConfig::new(k, 1).unwrap()).unwrap().results.first().map(|r| r.score);
        if let Some(s) = best(k1) {
            prop_assert!(best(k1 + extra).unwrap() >= s);
        }
    }

    #[test]
    fn results_are_valid_ranked_and_bounded(seed in any::<u64>(), k in 1usize..5, n in 1usize..6) {
        let (g, q) = setup(seed);
        let f = LexicalSimilarity::default();
        let out = retrieve(&q, &g, &f, &RetrievalConfig::new(k, n).unwrap()).unwrap();
        prop_assert!(out.results.len() <= n);
        // unfiltered slots admit every neighbour of a hub
        let bound: usize = [NodeType::AffectiveState, NodeType::Stressor, NodeType::Response]
            .iter()
            .map(|&t| match q.description(t) {
                Some(_) => k,
                None => g.nodes_of(NodeType::Expectation).iter().map(|&e| g.neighbors(e, t).len()).max().unwrap_or(0),
            })
            .product::<usize>()
            * k;
        prop_assert!(out.stats.candidates_scored <= bound);
        prop_assert_eq!(out.results.is_empty(), out.stats.candidates_scored == 0);
        prop_assert_eq!(out.diagnostics.is_empty(), out.stats.candidates_scored > 0);
        for w in out.results.windows(2) {
            prop_assert_eq!(rank_order(&w[0], &w[1], TieBreak::LexicographicIds), std::cmp::Ordering::Less);
        }
        for r in &out.results {
            prop_assert!(r.subgraph.is_valid(&g));
            let rescored = score_subgraph(&q, &r.subgraph, &g, &f).unwrap();
            prop_assert_eq!(rescored.score, r.score);
            prop_assert_eq!(rescored.components, r.components);
        }
    }

    #[test]
    fn node_order_does_not_matter(seed in any::<u64>()) {
        let (g, q) = setup(seed);
        let f = LexicalSimilarity::default();
        let mut nodes: Vec<KgNode> = g.nodes().map(|(_, n)| n.clone()).collect();
        let mut edges: Vec<(String, String)> = g.edges().map(|(a, b)| (g.node(b).id.clone(), g.node(a).id.clone())).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        nodes.shuffle(&mut rng);
        edges.shuffle(&mut rng);
        let h = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
        let cfg = RetrievalConfig::new(3, 4).unwrap();
        let ids = |g: &KnowledgeGraph, out: &[esc_toolkit::retrieval::ScoredSubgraph]| {
            out.iter()
                .map(|r| (r.score, NodeType::ALL.map(|t| g.node(r.subgraph.node(t)).id.clone())))
                .collect::<Vec<_>>()
        };
        let a = retrieve(&q, &g, &f, &cfg).unwrap();
        let b = retrieve(&q, &h, &f, &cfg).unwrap();
        prop_assert_eq!(ids(&g, &a.results), ids(&h, &b.results));
        prop_assert_eq!(a, retrieve(&q, &g, &f, &cfg).unwrap());
    }
}

#[test]
fn ties_are_broken_by_ids() {
    let nodes = vec![
        KgNode::new("e1", NodeType::Expectation, ""),
        KgNode::new("e2", NodeType::Expectation, ""),
        KgNode::new("a", NodeType::AffectiveState, ""),
        KgNode::new("s1", NodeType::Stressor, ""),
        KgNode::new("s2", NodeType::Stressor, ""),
        KgNode::new("r", NodeType::Response, ""),
    ];
    let edges: Vec<(String, String)> = [("e2", "s1"), ("e2", "a"), ("e2", "r"), ("e1", "s2"), ("e1", "s1"), ("e1", "a"), ("e1", "r")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    let g = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
    let q = build_query_graph("anything", []).unwrap();
    let out = retrieve(&q, &g, &ConstantSimilarity(0.5), &RetrievalConfig::new(10, 3).unwrap()).unwrap();
    let order: Vec<(&str, &str)> = out
        .results
        .iter()
        .map(|r| (g.node(r.subgraph.expectation).id.as_str(), g.node(r.subgraph.stressor).id.as_str()))
        .collect();
    assert_eq!(order, vec![("e1", "s1"), ("e1", "s2"), ("e2", "s1")]);
}

#[test]
fn oracle_refuses_large_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_graph(&mut rng, 1000);
    let q = random_query(&mut rng);
    let count = esc_toolkit::graph::count_subgraphs(&g);
    if count > 0 {
        let err = brute_force_retrieve(&q, &g, &ConstantSimilarity(1.0), 1, count - 1).unwrap_err();
        assert!(matches!(err, RetrievalError::CapExceeded { .. }));
        assert!(err.to_string().contains("indexed"));
    }
}

#[test]
fn provider_errors_carry_the_node() {
    struct Failing;
    impl esc_toolkit::retrieval::SimilarityProvider for Failing {
        fn similarity(&self, _: NodeType, _: &str, node: &KgNode) -> Result<f64, String> {
            if node.id == "a" { Err("boom".into()) } else { Ok(0.0) }
        }
    }
    let nodes = vec![
        KgNode::new("e", NodeType::Expectation, ""),
        KgNode::new("a", NodeType::AffectiveState, ""),
    ];
    let g = KnowledgeGraph::from_parts(nodes, &[("e".into(), "a".into())]).unwrap();
    let q = build_query_graph("u", [(CommonsenseRelation::XReact, "sad".to_string())]).unwrap();
    let err = retrieve(&q, &g, &Failing, &RetrievalConfig::default()).unwrap_err();
    assert_eq!(err, RetrievalError::Provider { node: "a".into(), message: "boom".into() });
}
