//! Typed mental-health knowledge graph with expectation, affective-state,
//! stressor and response nodes.
//!
//! Nodes are stored sorted by id, so comparing [`NodeIdx`] values compares ids
//! lexicographically. Edges are undirected; adjacency lists are split by the
//! neighbor's type and kept sorted.
//!
//! File formats:
//! * nodes: JSON lines, `{"id": str, "type": str, "text": str, "embedding"?: [f32]}`
//! * edges: one `id<TAB>id` pair per line; blank lines and `#` comments are skipped.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeType {
    Expectation,
    AffectiveState,
    Stressor,
    Response,
}

impl NodeType {
    pub const ALL: [NodeType; 4] = [
        NodeType::Expectation,
        NodeType::AffectiveState,
        NodeType::Stressor,
        NodeType::Response,
    ];

    /// Row/column order of the published statistics table.
    pub const TABLE_ORDER: [NodeType; 4] = [
        NodeType::Stressor,
        NodeType::Expectation,
        NodeType::Response,
        NodeType::AffectiveState,
    ];

    pub fn index(self) -> usize {
        match self {
            NodeType::Expectation => 0,
            NodeType::AffectiveState => 1,
            NodeType::Stressor => 2,
            NodeType::Response => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NodeType::Expectation => "expectation",
            NodeType::AffectiveState => "affective_state",
            NodeType::Stressor => "stressor",
            NodeType::Response => "response",
        }
    }

    pub fn table_label(self) -> &'static str {
        match self {
            NodeType::Expectation => "Expectation",
            NodeType::AffectiveState => "Affect. State",
            NodeType::Stressor => "Stressor",
            NodeType::Response => "Response",
        }
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeType {
    type Err = IssueKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace([' ', '-'], "_").as_str() {
            "expectation" => Ok(NodeType::Expectation),
            "affective_state" | "affect" | "affective" => Ok(NodeType::AffectiveState),
            "stressor" => Ok(NodeType::Stressor),
            "response" => Ok(NodeType::Response),
            "feedback" => Err(IssueKind::FeedbackType),
            _ => Err(IssueKind::UnknownType(s.to_string())),
        }
    }
}

/// Whether an undirected edge between the two node types is permitted.
pub fn allowed_pair(a: NodeType, b: NodeType) -> bool {
    use NodeType::*;
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    matches!(
        (a, b),
        (Stressor, Stressor)
            | (Expectation, Stressor)
            | (Expectation, Expectation)
            | (Expectation, Response)
            | (Expectation, AffectiveState)
            | (Response, Response)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFile {
    Nodes,
    Edges,
}

impl fmt::Display for GraphFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphFile::Nodes => "nodes",
            GraphFile::Edges => "edges",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IssueKind {
    #[error("malformed record: {0}")]
    Malformed(String),
    #[error("unknown node type {0:?}")]
    UnknownType(String),
    #[error("feedback nodes are not supported; only expectation, affective_state, stressor and response are")]
    FeedbackType,
    #[error("duplicate node id {0:?}")]
    DuplicateNode(String),
    #[error("embedding has dimension {found}, expected {expected}")]
    EmbeddingDim { expected: usize, found: usize },
    #[error("edge endpoint {0:?} does not exist")]
    DanglingEndpoint(String),
    #[error("edge type pair {0}-{1} is not allowed")]
    DisallowedPair(NodeType, NodeType),
    #[error("self loop on {0:?}")]
    SelfLoop(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{file} line {line}: {kind}")]
pub struct LineIssue {
    pub file: GraphFile,
    /// 1-based line number.
    pub line: usize,
    pub kind: IssueKind,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{} validation issue(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<LineIssue>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeIdx(u32);

impl NodeIdx {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgNode {
    pub id: String,
    #[serde(rename = "type")]
    pub node_type: NodeType,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<f32>>,
}

impl KgNode {
    pub fn new(id: impl Into<String>, node_type: NodeType, text: impl Into<String>) -> Self {
        KgNode {
            id: id.into(),
            node_type,
            text: text.into(),
            embedding: None,
        }
    }

    pub fn with_embedding(mut self, e: Vec<f32>) -> Self {
        self.embedding = Some(e);
        self
    }
}

#[derive(Debug, Clone)]
pub struct KnowledgeGraph {
    nodes: Vec<KgNode>,
    ids: HashMap<String, NodeIdx>,
    adjacency: Vec<[Vec<NodeIdx>; 4]>,
    by_type: [Vec<NodeIdx>; 4],
    embedding_dim: Option<usize>,
    duplicate_edges: usize,
}

impl KnowledgeGraph {
    /// Builds and validates a graph. Edge issues are reported with the
    /// 1-based position of the pair in `edges`.
    pub fn from_parts(nodes: Vec<KgNode>, edges: &[(String, String)]) -> Result<Self, GraphError> {
        let numbered: Vec<(usize, &str, &str)> = edges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (i + 1, a.as_str(), b.as_str()))
            .collect();
        let numbered_nodes = nodes.into_iter().enumerate().map(|(i, n)| (i + 1, n)).collect();
        Self::build(numbered_nodes, &numbered, Vec::new())
    }

    fn build(
        nodes: Vec<(usize, KgNode)>,
        edges: &[(usize, &str, &str)],
        mut issues: Vec<LineIssue>,
    ) -> Result<Self, GraphError> {
        let mut embedding_dim = None;
        let mut kept: Vec<KgNode> = Vec::with_capacity(nodes.len());
        let mut seen: HashMap<String, ()> = HashMap::with_capacity(nodes.len());
        for (line, node) in nodes {
            let issue = |kind| LineIssue {
                file: GraphFile::Nodes,
                line,
                kind,
            };
            if seen.insert(node.id.clone(), ()).is_some() {
                issues.push(issue(IssueKind::DuplicateNode(node.id)));
                continue;
            }
            if let Some(e) = &node.embedding {
                match embedding_dim {
                    None => embedding_dim = Some(e.len()),
                    Some(d) if d != e.len() => {
                        issues.push(issue(IssueKind::EmbeddingDim {
                            expected: d,
                            found: e.len(),
                        }));
                        continue;
                    }
                    _ => {}
                }
            }
            kept.push(node);
        }
        kept.sort_by(|a, b| a.id.cmp(&b.id));
        let ids: HashMap<String, NodeIdx> = kept
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.clone(), NodeIdx(i as u32)))
            .collect();

        let mut adjacency: Vec<[Vec<NodeIdx>; 4]> = vec![Default::default(); kept.len()];
        for &(line, a, b) in edges {
            let issue = |kind| LineIssue {
                file: GraphFile::Edges,
                line,
                kind,
            };
            let (Some(&ia), Some(&ib)) = (ids.get(a), ids.get(b)) else {
                let missing = if ids.contains_key(a) { b } else { a };
                issues.push(issue(IssueKind::DanglingEndpoint(missing.to_string())));
                continue;
            };
            if ia == ib {
                issues.push(issue(IssueKind::SelfLoop(a.to_string())));
                continue;
            }
            let (ta, tb) = (kept[ia.index()].node_type, kept[ib.index()].node_type);
            if !allowed_pair(ta, tb) {
                issues.push(issue(IssueKind::DisallowedPair(ta, tb)));
                continue;
            }
            adjacency[ia.index()][tb.index()].push(ib);
            adjacency[ib.index()][ta.index()].push(ia);
        }
        if !issues.is_empty() {
            issues.sort_by_key(|i| (i.file == GraphFile::Edges, i.line));
            return Err(GraphError::Invalid(issues));
        }

        let mut duplicate_edges = 0;
        for lists in adjacency.iter_mut() {
            for list in lists.iter_mut() {
                let before = list.len();
                list.sort_unstable();
                list.dedup();
                duplicate_edges += before - list.len();
            }
        }
        let mut by_type: [Vec<NodeIdx>; 4] = Default::default();
        for (i, n) in kept.iter().enumerate() {
            by_type[n.node_type.index()].push(NodeIdx(i as u32));
        }
        Ok(KnowledgeGraph {
            nodes: kept,
            ids,
            adjacency,
            by_type,
            embedding_dim,
            // each duplicate shows up once in each endpoint's list
            duplicate_edges: duplicate_edges / 2,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, idx: NodeIdx) -> &KgNode {
        &self.nodes[idx.index()]
    }

    pub fn lookup(&self, id: &str) -> Option<NodeIdx> {
        self.ids.get(id).copied()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeIdx, &KgNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeIdx(i as u32), n))
    }

    /// Nodes of one type in id order.
    pub fn nodes_of(&self, t: NodeType) -> &[NodeIdx] {
        &self.by_type[t.index()]
    }

    /// Neighbors of `idx` having type `t`, in id order.
    pub fn neighbors(&self, idx: NodeIdx, t: NodeType) -> &[NodeIdx] {
        &self.adjacency[idx.index()][t.index()]
    }

    pub fn has_edge(&self, a: NodeIdx, b: NodeIdx) -> bool {
        let t = self.node(b).node_type;
        self.neighbors(a, t).binary_search(&b).is_ok()
    }

    pub fn embedding_dim(&self) -> Option<usize> {
        self.embedding_dim
    }

    /// Repeated edges that were collapsed at load.
    pub fn duplicate_edges(&self) -> usize {
        self.duplicate_edges
    }

    /// Undirected edges, each once, as `(lower idx, higher idx)` in order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeIdx, NodeIdx)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, lists)| {
            let a = NodeIdx(i as u32);
            let mut out: Vec<NodeIdx> = lists.iter().flatten().copied().filter(|&b| b > a).collect();
            out.sort_unstable();
            out.into_iter().map(move |b| (a, b))
        })
    }

    pub fn nodes_to_jsonl(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&serde_json::to_string(n).expect("node serializes"));
            out.push('\n');
        }
        out
    }

    pub fn edges_to_tsv(&self) -> String {
        let mut out = String::new();
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{}\t{}", self.node(a).id, self.node(b).id);
        }
        out
    }
}

/// Parses node JSON lines and edge TSV held in memory.
pub fn parse_graph(nodes_jsonl: &str, edges_tsv: &str) -> Result<KnowledgeGraph, GraphError> {
    let mut issues = Vec::new();
    let mut nodes = Vec::new();
    for (i, line) in nodes_jsonl.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_node(line) {
            Ok(n) => nodes.push((line_no, n)),
            Err(kind) => issues.push(LineIssue {
                file: GraphFile::Nodes,
                line: line_no,
                kind,
            }),
        }
    }
    let mut edges = Vec::new();
    for (i, raw) in edges_tsv.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        match fields.as_slice() {
            [a, b] if !a.is_empty() && !b.is_empty() => edges.push((line_no, *a, *b)),
            _ => issues.push(LineIssue {
                file: GraphFile::Edges,
                line: line_no,
                kind: IssueKind::Malformed(format!("expected two tab-separated ids, got {line:?}")),
            }),
        }
    }
    KnowledgeGraph::build(nodes, &edges, issues)
}

#[derive(Deserialize)]
struct RawNode {
    id: String,
    #[serde(rename = "type")]
    node_type: String,
    text: String,
    embedding: Option<Vec<f32>>,
}

fn parse_node(line: &str) -> Result<KgNode, IssueKind> {
    let raw: RawNode = serde_json::from_str(line).map_err(|e| IssueKind::Malformed(e.to_string()))?;
    Ok(KgNode {
        id: raw.id,
        node_type: raw.node_type.parse()?,
        text: raw.text,
        embedding: raw.embedding,
    })
}

pub fn load_graph(nodes: impl AsRef<Path>, edges: impl AsRef<Path>) -> Result<KnowledgeGraph, GraphError> {
    let read = |p: &Path| {
        std::fs::read_to_string(p).map_err(|source| GraphError::Io {
            path: p.display().to_string(),
            source,
        })
    };
    parse_graph(&read(nodes.as_ref())?, &read(edges.as_ref())?)
}

/// One node of each type joined through the expectation hub.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseSubgraph {
    pub expectation: NodeIdx,
    pub affective_state: NodeIdx,
    pub stressor: NodeIdx,
    pub response: NodeIdx,
}

impl CaseSubgraph {
    /// Ranking tie-break key: (expectation, stressor, affective state, response) ids.
    pub fn tie_key(&self) -> (NodeIdx, NodeIdx, NodeIdx, NodeIdx) {
        (self.expectation, self.stressor, self.affective_state, self.response)
    }

    pub fn node(&self, t: NodeType) -> NodeIdx {
        match t {
            NodeType::Expectation => self.expectation,
            NodeType::AffectiveState => self.affective_state,
            NodeType::Stressor => self.stressor,
            NodeType::Response => self.response,
        }
    }

    /// Node types match and the three hub edges exist.
    pub fn is_valid(&self, g: &KnowledgeGraph) -> bool {
        NodeType::ALL.iter().all(|&t| g.node(self.node(t)).node_type == t)
            && g.has_edge(self.expectation, self.stressor)
            && g.has_edge(self.expectation, self.affective_state)
            && g.has_edge(self.expectation, self.response)
    }
}

/// Every case subgraph in `tie_key` order, optionally truncated to `limit`.
pub fn enumerate_subgraphs(
    g: &KnowledgeGraph,
    limit: Option<usize>,
) -> impl Iterator<Item = CaseSubgraph> + '_ {
    g.nodes_of(NodeType::Expectation)
        .iter()
        .flat_map(move |&e| {
            g.neighbors(e, NodeType::Stressor).iter().flat_map(move |&s| {
                g.neighbors(e, NodeType::AffectiveState).iter().flat_map(move |&a| {
                    g.neighbors(e, NodeType::Response).iter().map(move |&r| CaseSubgraph {
                        expectation: e,
                        affective_state: a,
                        stressor: s,
                        response: r,
                    })
                })
            })
        })
        .take(limit.unwrap_or(usize::MAX))
}

/// Closed-form subgraph count: sum over expectations of the product of their
/// stressor, affective-state and response degrees.
pub fn count_subgraphs(g: &KnowledgeGraph) -> u128 {
    g.nodes_of(NodeType::Expectation)
        .iter()
        .map(|&e| {
            [NodeType::Stressor, NodeType::AffectiveState, NodeType::Response]
                .iter()
                .map(|&t| g.neighbors(e, t).len() as u128)
                .product::<u128>()
        })
        .sum()
}

/// Node counts per type and undirected edge counts per type pair.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GraphStats {
    pub node_counts: [usize; 4],
    /// Symmetric, indexed by [`NodeType::index`].
    pub edge_counts: [[usize; 4]; 4],
    pub duplicate_edges: usize,
}

impl GraphStats {
    pub fn nodes(&self, t: NodeType) -> usize {
        self.node_counts[t.index()]
    }

    pub fn edges(&self, a: NodeType, b: NodeType) -> usize {
        self.edge_counts[a.index()][b.index()]
    }

    pub fn total_edges(&self) -> usize {
        let mut total = 0;
        for (i, row) in self.edge_counts.iter().enumerate() {
            total += row[i..].iter().sum::<usize>();
        }
        total
    }

    /// Statistics in the published table layout: node counts on the diagonal,
    /// cross-type edge counts off the diagonal, `-` where the pair is not allowed.
    pub fn to_table_csv(&self) -> String {
        let mut out = String::from("");
        for t in NodeType::TABLE_ORDER {
            out.push(',');
            out.push_str(t.table_label());
        }
        out.push('\n');
        for row in NodeType::TABLE_ORDER {
            out.push_str(row.table_label());
            for col in NodeType::TABLE_ORDER {
                out.push(',');
                if row == col {
                    out.push_str(&self.nodes(row).to_string());
                } else if allowed_pair(row, col) {
                    out.push_str(&self.edges(row, col).to_string());
                } else {
                    out.push('-');
                }
            }
            out.push('\n');
        }
        out
    }

    /// Long-format `type_a,type_b,edges` rows for every allowed pair, same-type pairs included.
    pub fn to_edge_csv(&self) -> String {
        let mut out = String::from("type_a,type_b,edges\n");
        for (i, &a) in NodeType::TABLE_ORDER.iter().enumerate() {
            for &b in &NodeType::TABLE_ORDER[i..] {
                if allowed_pair(a, b) {
                    let _ = writeln!(out, "{},{},{}", a.as_str(), b.as_str(), self.edges(a, b));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: serde_json::Map<_, _> = NodeType::TABLE_ORDER
            .iter()
            .map(|t| (t.as_str().to_string(), serde_json::json!(self.nodes(*t))))
            .collect();
        let mut edges = Vec::new();
        for (i, &a) in NodeType::TABLE_ORDER.iter().enumerate() {
            for &b in &NodeType::TABLE_ORDER[i..] {
                if allowed_pair(a, b) {
                    edges.push(serde_json::json!({"a": a, "b": b, "edges": self.edges(a, b)}));
                }
            }
        }
        serde_json::json!({
            "nodes": nodes,
            "edges": edges,
            "total_nodes": self.node_counts.iter().sum::<usize>(),
            "total_edges": self.total_edges(),
            "duplicate_edges": self.duplicate_edges,
        })
    }
}

pub fn graph_stats(g: &KnowledgeGraph) -> GraphStats {
    let mut stats = GraphStats {
        duplicate_edges: g.duplicate_edges(),
        ..Default::default()
    };
    for t in NodeType::ALL {
        stats.node_counts[t.index()] = g.nodes_of(t).len();
    }
    for (a, b) in g.edges() {
        let (ta, tb) = (g.node(a).node_type.index(), g.node(b).node_type.index());
        stats.edge_counts[ta][tb] += 1;
        if ta != tb {
            stats.edge_counts[tb][ta] += 1;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> KnowledgeGraph {
        let nodes = vec![
            KgNode::new("e", NodeType::Expectation, "how do I cope"),
            KgNode::new("a", NodeType::AffectiveState, "anxious"),
            KgNode::new("s", NodeType::Stressor, "job loss"),
            KgNode::new("r", NodeType::Response, "take a breath"),
        ];
        let edges = vec![("s".into(), "e".into()), ("e".into(), "a".into()), ("e".into(), "r".into())];
        KnowledgeGraph::from_parts(nodes, &edges).unwrap()
    }

    #[test]
    fn minimal_graph_has_one_case() {
        let g = minimal();
        let subs: Vec<_> = enumerate_subgraphs(&g, None).collect();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_valid(&g));
        assert_eq!(count_subgraphs(&g), 1);
    }

    #[test]
    fn minimal_stats() {
        let s = graph_stats(&minimal());
        assert_eq!(s.edges(NodeType::Stressor, NodeType::Expectation), 1);
        assert_eq!(s.edges(NodeType::Expectation, NodeType::AffectiveState), 1);
        assert_eq!(s.edges(NodeType::Expectation, NodeType::Response), 1);
        assert_eq!(s.total_edges(), 3);
        assert_eq!(
            s.to_table_csv(),
            ",Stressor,Expectation,Response,Affect. State\n\
             Stressor,1,1,-,-\n\
             Expectation,1,1,1,1\n\
             Response,-,1,1,-\n\
             Affect. State,-,1,-,1\n"
        );
    }

    #[test]
    fn empty_graph_stats() {
        let g = parse_graph("", "").unwrap();
        assert_eq!(graph_stats(&g), GraphStats::default());
        assert_eq!(enumerate_subgraphs(&g, None).count(), 0);
    }

    #[test]
    fn hub_with_two_of_each() {
        let mut nodes = vec![KgNode::new("e", NodeType::Expectation, "")];
        let mut edges = Vec::new();
        for t in [NodeType::Stressor, NodeType::AffectiveState, NodeType::Response] {
            for k in 0..2 {
                let id = format!("{}{k}", t.as_str());
                nodes.push(KgNode::new(id.clone(), t, ""));
                edges.push(("e".to_string(), id));
            }
        }
        let g = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
        let subs: Vec<_> = enumerate_subgraphs(&g, None).collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.windows(2).all(|w| w[0].tie_key() < w[1].tie_key()));
        assert_eq!(enumerate_subgraphs(&g, Some(3)).count(), 3);
    }

    #[test]
    fn expectation_without_response_yields_nothing() {
        let nodes = vec![
            KgNode::new("e", NodeType::Expectation, ""),
            KgNode::new("a", NodeType::AffectiveState, ""),
            KgNode::new("s", NodeType::Stressor, ""),
        ];
        let edges = vec![("s".into(), "e".into()), ("e".into(), "a".into())];
        let g = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
        assert_eq!(enumerate_subgraphs(&g, None).count(), 0);
    }

    #[test]
    fn disallowed_pair_rejected() {
        let nodes = "{\"id\":\"s\",\"type\":\"stressor\",\"text\":\"x\"}\n{\"id\":\"r\",\"type\":\"response\",\"text\":\"y\"}\n";
        let err = parse_graph(nodes, "s\tr\n").unwrap_err();
        let GraphError::Invalid(issues) = err else { panic!() };
        assert_eq!(issues[0].line, 1);
        assert_eq!(
            issues[0].kind,
            IssueKind::DisallowedPair(NodeType::Stressor, NodeType::Response)
        );
        assert!(issues[0].to_string().contains("stressor-response"));
    }

    #[test]
    fn dangling_edge_names_line() {
        let nodes = "{\"id\":\"e\",\"type\":\"expectation\",\"text\":\"x\"}\n";
        let err = parse_graph(nodes, "# header\ne\tz\n").unwrap_err();
        let GraphError::Invalid(issues) = err else { panic!() };
        assert_eq!(issues[0].line, 2);
        assert_eq!(issues[0].kind, IssueKind::DanglingEndpoint("z".into()));
    }

    #[test]
    fn feedback_type_rejected() {
        let nodes = "{\"id\":\"f\",\"type\":\"feedback\",\"text\":\"x\"}\n";
        let GraphError::Invalid(issues) = parse_graph(nodes, "").unwrap_err() else { panic!() };
        assert_eq!(issues[0].kind, IssueKind::FeedbackType);
    }

    #[test]
    fn embedding_dimension_must_be_uniform() {
        let nodes = "{\"id\":\"a\",\"type\":\"expectation\",\"text\":\"x\",\"embedding\":[1,2]}\n\
                     {\"id\":\"b\",\"type\":\"expectation\",\"text\":\"x\",\"embedding\":[1,2,3]}\n";
        let GraphError::Invalid(issues) = parse_graph(nodes, "").unwrap_err() else { panic!() };
        assert_eq!(issues[0].line, 2);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let nodes = vec![
            KgNode::new("e", NodeType::Expectation, ""),
            KgNode::new("s", NodeType::Stressor, ""),
        ];
        let edges = vec![("s".into(), "e".into()), ("e".into(), "s".into())];
        let g = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
        assert_eq!(g.duplicate_edges(), 1);
        assert_eq!(graph_stats(&g).total_edges(), 1);
    }

    #[test]
    fn jsonl_tsv_round_trip() {
        let g = minimal();
        let back = parse_graph(&g.nodes_to_jsonl(), &g.edges_to_tsv()).unwrap();
        assert_eq!(graph_stats(&back), graph_stats(&g));
        assert_eq!(back.nodes_to_jsonl(), g.nodes_to_jsonl());
    }
}
