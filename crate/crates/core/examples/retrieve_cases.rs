//! Builds a query graph from a seeker utterance and its commonsense
//! expansions, then ranks case subgraphs with lexical similarity and checks
//! the result against exhaustive search.
//!
//!     cargo run --example retrieve_cases

use esc_toolkit::graph::load_graph;
use esc_toolkit::retrieval::{
    brute_force_retrieve, build_query_graph, ranked_cases, retrieve, CommonsenseRelation, LexicalSimilarity,
    RetrievalConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");
    let g = load_graph(format!("{dir}/toy_nodes.jsonl"), format!("{dir}/toy_edges.tsv"))?;

    let query = build_query_graph(
        "I lost my job and I need to find a new one",
        [
            (CommonsenseRelation::XReact, "sad, hopeless and anxious".to_string()),
            (CommonsenseRelation::XIntent, "to keep the job and the money".to_string()),
        ],
    )?;
    let sim = LexicalSimilarity::default();
    let cfg = RetrievalConfig::new(2, 3)?;
    let out = retrieve(&query, &g, &sim, &cfg)?;
    println!(
        "scored {} candidates with {} similarity calls",
        out.stats.candidates_scored, out.stats.similarity_calls
    );
    for case in ranked_cases(&out.results, &g) {
        println!("{}", serde_json::to_string(&case)?);
    }

    let exhaustive = brute_force_retrieve(&query, &g, &sim, 3, 10_000)?;
    println!("agrees with exhaustive search: {}", exhaustive.results == out.results);
    Ok(())
}
