//! Retrieval with precomputed embeddings: node vectors live in the graph and
//! query vectors come from a sidecar keyed by utterance, xReact, xIntent and
//! response.
//!
//!     cargo run --example embedding_retrieval

use esc_toolkit::graph::{KgNode, KnowledgeGraph, NodeType};
use esc_toolkit::retrieval::{
    build_query_graph, ranked_cases, retrieve, CommonsenseRelation, EmbeddingSimilarity, RetrievalConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let nodes = vec![
        KgNode::new("e-job", NodeType::Expectation, "find a job").with_embedding(vec![1.0, 0.0, 0.0]),
        KgNode::new("e-exam", NodeType::Expectation, "pass the exam").with_embedding(vec![0.0, 1.0, 0.0]),
        KgNode::new("a-worried", NodeType::AffectiveState, "worried").with_embedding(vec![0.6, 0.8, 0.0]),
        KgNode::new("a-hopeless", NodeType::AffectiveState, "hopeless").with_embedding(vec![0.9, 0.1, 0.4]),
        KgNode::new("s-layoff", NodeType::Stressor, "laid off").with_embedding(vec![1.0, 0.0, 0.1]),
        KgNode::new("s-grades", NodeType::Stressor, "bad grades").with_embedding(vec![0.0, 1.0, 0.1]),
        KgNode::new("r-plan", NodeType::Response, "let's plan the search").with_embedding(vec![0.8, 0.0, 0.6]),
        KgNode::new("r-study", NodeType::Response, "a study schedule helps").with_embedding(vec![0.0, 0.7, 0.7]),
    ];
    let edges: Vec<(String, String)> = [
        ("e-job", "a-worried"),
        ("e-job", "a-hopeless"),
        ("e-job", "s-layoff"),
        ("e-job", "r-plan"),
        ("e-exam", "a-worried"),
        ("e-exam", "s-grades"),
        ("e-exam", "r-study"),
    ]
    .iter()
    .map(|(a, b)| (a.to_string(), b.to_string()))
    .collect();
    let g = KnowledgeGraph::from_parts(nodes, &edges)?;

    let sidecar = r#"{"utterance": [1.0, 0.05, 0.0], "xReact": [0.9, 0.1, 0.3],
                      "xIntent": [1.0, 0.0, 0.0], "response": [0.7, 0.0, 0.7]}"#;
    let sim = EmbeddingSimilarity::from_sidecar(sidecar)?;
    // the expansion texts mark which slots are scored; the vectors above stand in for them
    let query = build_query_graph(
        "I was laid off",
        [
            (CommonsenseRelation::XReact, "hopeless".to_string()),
            (CommonsenseRelation::XIntent, "to keep working".to_string()),
            (CommonsenseRelation::XWant, "to find work".to_string()),
        ],
    )?;
    let out = retrieve(&query, &g, &sim, &RetrievalConfig::new(2, 2)?)?;
    for case in ranked_cases(&out.results, &g) {
        println!("{}", serde_json::to_string_pretty(&case)?);
    }
    Ok(())
}
