//! Loads a knowledge graph, prints node and edge statistics and the first few
//! case subgraphs.
//!
//!     cargo run --example graph_index [nodes.jsonl edges.tsv]

use esc_toolkit::graph::{count_subgraphs, enumerate_subgraphs, graph_stats, load_graph, NodeType};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (nodes, edges) = match args.as_slice() {
        [n, e] => (n.clone(), e.clone()),
        _ => (
            concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/toy_nodes.jsonl").to_string(),
            concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/toy_edges.tsv").to_string(),
        ),
    };
    let g = load_graph(&nodes, &edges)?;
    let stats = graph_stats(&g);
    print!("{}", stats.to_table_csv());
    println!("edges: {}, duplicates ignored: {}", stats.total_edges(), stats.duplicate_edges);
    println!("case subgraphs: {}", count_subgraphs(&g));

    for s in enumerate_subgraphs(&g, Some(5)) {
        let ids = NodeType::ALL.map(|t| g.node(s.node(t)).id.as_str());
        println!("  {}", ids.join(" | "));
    }
    Ok(())
}
