//! Query-graph construction and top-N case subgraph retrieval.
//!
//! A query graph holds the user utterance and up to five commonsense
//! expansions. Each knowledge-graph node type is targeted by one slot:
//!
//! | slot                          | node type       |
//! |-------------------------------|-----------------|
//! | utterance                     | expectation     |
//! | xReact                        | affective state |
//! | xIntent                       | stressor        |
//! | xWant + xNeed + xEffect       | response        |
//!
//! A subgraph's score is the sum of its four slot similarities. [`retrieve`]
//! keeps the top-K nodes per slot, joins them through expectation hubs and
//! ranks the joined candidates; [`brute_force_retrieve`] scores every subgraph
//! in the graph and serves as the reference ranking.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{count_subgraphs, enumerate_subgraphs, CaseSubgraph, KgNode, KnowledgeGraph, NodeIdx, NodeType};
use crate::text::TextPipeline;

/// Default cap on enumerable subgraphs for [`brute_force_retrieve`].
pub const DEFAULT_ORACLE_CAP: u128 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetrievalError {
    #[error("query utterance is empty")]
    EmptyUtterance,
    #[error("similarity provider failed on node {node}: {message}")]
    Provider { node: String, message: String },
    #[error("similarity provider returned a non-finite score for node {node}")]
    NonFinite { node: String },
    #[error("graph has {count} subgraphs, above the brute-force cap of {cap}; use the indexed retrieval path")]
    CapExceeded { count: u128, cap: u128 },
    #[error("invalid retrieval config: {0}")]
    Config(String),
    #[error("malformed query: {0}")]
    Query(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CommonsenseRelation {
    #[serde(rename = "xReact")]
    XReact,
    #[serde(rename = "xIntent")]
    XIntent,
    #[serde(rename = "xWant")]
    XWant,
    #[serde(rename = "xNeed")]
    XNeed,
    #[serde(rename = "xEffect")]
    XEffect,
}

impl CommonsenseRelation {
    pub const ALL: [CommonsenseRelation; 5] = [
        CommonsenseRelation::XReact,
        CommonsenseRelation::XIntent,
        CommonsenseRelation::XWant,
        CommonsenseRelation::XNeed,
        CommonsenseRelation::XEffect,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CommonsenseRelation::XReact => "xReact",
            CommonsenseRelation::XIntent => "xIntent",
            CommonsenseRelation::XWant => "xWant",
            CommonsenseRelation::XNeed => "xNeed",
            CommonsenseRelation::XEffect => "xEffect",
        }
    }

    pub fn definition(self) -> &'static str {
        match self {
            CommonsenseRelation::XReact => "The reaction that Person X would have to the event.",
            CommonsenseRelation::XIntent => "The reason why X would cause the event.",
            CommonsenseRelation::XWant => "What Person X may want to do after the event.",
            CommonsenseRelation::XNeed => "What Person X might need to do before the event.",
            CommonsenseRelation::XEffect => "The effect that the event would have on Person X.",
        }
    }

    /// Node type whose descriptions this relation is matched against.
    pub fn target(self) -> NodeType {
        match self {
            CommonsenseRelation::XReact => NodeType::AffectiveState,
            CommonsenseRelation::XIntent => NodeType::Stressor,
            CommonsenseRelation::XWant | CommonsenseRelation::XNeed | CommonsenseRelation::XEffect => {
                NodeType::Response
            }
        }
    }
}

impl fmt::Display for CommonsenseRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Slots in score order: expectation, affective state, stressor, response.
pub const SLOT_ORDER: [NodeType; 4] = [
    NodeType::Expectation,
    NodeType::AffectiveState,
    NodeType::Stressor,
    NodeType::Response,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryGraph {
    utterance: String,
    expansions: BTreeMap<CommonsenseRelation, String>,
}

/// Builds a query graph. Blank expansions are treated as absent.
pub fn build_query_graph(
    utterance: &str,
    expansions: impl IntoIterator<Item = (CommonsenseRelation, String)>,
) -> Result<QueryGraph, RetrievalError> {
    if utterance.trim().is_empty() {
        return Err(RetrievalError::EmptyUtterance);
    }
    Ok(QueryGraph {
        utterance: utterance.to_string(),
        expansions: expansions
            .into_iter()
            .filter(|(_, text)| !text.trim().is_empty())
            .collect(),
    })
}

impl QueryGraph {
    pub fn utterance(&self) -> &str {
        &self.utterance
    }

    pub fn expansion(&self, r: CommonsenseRelation) -> Option<&str> {
        self.expansions.get(&r).map(String::as_str)
    }

    /// Description matched against nodes of type `slot`, if the query has one.
    pub fn description(&self, slot: NodeType) -> Option<String> {
        match slot {
            NodeType::Expectation => Some(self.utterance.clone()),
            NodeType::AffectiveState => self.expansion(CommonsenseRelation::XReact).map(str::to_string),
            NodeType::Stressor => self.expansion(CommonsenseRelation::XIntent).map(str::to_string),
            NodeType::Response => {
                let parts: Vec<&str> = [
                    CommonsenseRelation::XWant,
                    CommonsenseRelation::XNeed,
                    CommonsenseRelation::XEffect,
                ]
                .iter()
                .filter_map(|&r| self.expansion(r))
                .collect();
                (!parts.is_empty()).then(|| parts.join(" "))
            }
        }
    }

    pub fn descriptions(&self) -> [Option<String>; 4] {
        SLOT_ORDER.map(|t| self.description(t))
    }
}

/// On-disk query: `{"utterance": .., "xReact"?: .., "xIntent"?: .., "xWant"?: .., "xNeed"?: .., "xEffect"?: ..}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryFile {
    pub utterance: String,
    #[serde(rename = "xReact", default, skip_serializing_if = "Option::is_none")]
    pub x_react: Option<String>,
    #[serde(rename = "xIntent", default, skip_serializing_if = "Option::is_none")]
    pub x_intent: Option<String>,
    #[serde(rename = "xWant", default, skip_serializing_if = "Option::is_none")]
    pub x_want: Option<String>,
    #[serde(rename = "xNeed", default, skip_serializing_if = "Option::is_none")]
    pub x_need: Option<String>,
    #[serde(rename = "xEffect", default, skip_serializing_if = "Option::is_none")]
    pub x_effect: Option<String>,
}

impl QueryFile {
    pub fn to_query_graph(&self) -> Result<QueryGraph, RetrievalError> {
        use CommonsenseRelation::*;
        let pairs = [
            (XReact, &self.x_react),
            (XIntent, &self.x_intent),
            (XWant, &self.x_want),
            (XNeed, &self.x_need),
            (XEffect, &self.x_effect),
        ];
        build_query_graph(
            &self.utterance,
            pairs.into_iter().filter_map(|(r, t)| t.clone().map(|t| (r, t))),
        )
    }
}

pub fn parse_query(json: &str) -> Result<QueryGraph, RetrievalError> {
    let file: QueryFile = serde_json::from_str(json).map_err(|e| RetrievalError::Query(e.to_string()))?;
    file.to_query_graph()
}

/// Semantic similarity between a slot description and a node; higher is
/// more similar. Must be deterministic for fixed inputs.
pub trait SimilarityProvider: Sync {
    fn similarity(&self, slot: NodeType, description: &str, node: &KgNode) -> Result<f64, String>;
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantSimilarity(pub f64);

impl SimilarityProvider for ConstantSimilarity {
    fn similarity(&self, _: NodeType, _: &str, _: &KgNode) -> Result<f64, String> {
        Ok(self.0)
    }
}

/// Dice coefficient over the distinct stems of the two texts.
#[derive(Debug)]
pub struct LexicalSimilarity {
    pipeline: TextPipeline,
    cache: RwLock<HashMap<String, Vec<String>>>,
}

impl Default for LexicalSimilarity {
    fn default() -> Self {
        Self::new(TextPipeline::default())
    }
}

impl LexicalSimilarity {
    pub fn new(pipeline: TextPipeline) -> Self {
        LexicalSimilarity {
            pipeline,
            cache: RwLock::new(HashMap::new()),
        }
    }

    fn stems(&self, text: &str) -> Vec<String> {
        if let Some(s) = self.cache.read().expect("cache lock").get(text) {
            return s.clone();
        }
        let mut stems = self.pipeline.preprocess(text);
        stems.sort_unstable();
        stems.dedup();
        self.cache
            .write()
            .expect("cache lock")
            .insert(text.to_string(), stems.clone());
        stems
    }

    pub fn dice(&self, a: &str, b: &str) -> f64 {
        let (a, b) = (self.stems(a), self.stems(b));
        if a.is_empty() && b.is_empty() {
            return 0.0;
        }
        let shared = a.iter().filter(|s| b.binary_search(s).is_ok()).count();
        2.0 * shared as f64 / (a.len() + b.len()) as f64
    }
}

impl SimilarityProvider for LexicalSimilarity {
    fn similarity(&self, _: NodeType, description: &str, node: &KgNode) -> Result<f64, String> {
        Ok(self.dice(description, &node.text))
    }
}

/// Cosine similarity between precomputed query-slot vectors and node embeddings.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingSimilarity {
    query: HashMap<NodeType, Vec<f32>>,
}

impl EmbeddingSimilarity {
    pub fn new(query: HashMap<NodeType, Vec<f32>>) -> Self {
        EmbeddingSimilarity { query }
    }

    /// Parses the sidecar `{"utterance": [..], "xReact": [..], "xIntent": [..], "response": [..]}`.
    pub fn from_sidecar(json: &str) -> Result<Self, RetrievalError> {
        let raw: BTreeMap<String, Vec<f32>> =
            serde_json::from_str(json).map_err(|e| RetrievalError::Query(e.to_string()))?;
        let mut query = HashMap::new();
        for (key, v) in raw {
            let slot = match key.as_str() {
                "utterance" => NodeType::Expectation,
                "xReact" => NodeType::AffectiveState,
                "xIntent" => NodeType::Stressor,
                "response" => NodeType::Response,
                other => return Err(RetrievalError::Query(format!("unknown embedding slot {other:?}"))),
            };
            query.insert(slot, v);
        }
        Ok(EmbeddingSimilarity { query })
    }
}

pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

impl SimilarityProvider for EmbeddingSimilarity {
    fn similarity(&self, slot: NodeType, _: &str, node: &KgNode) -> Result<f64, String> {
        let q = self
            .query
            .get(&slot)
            .ok_or_else(|| format!("no query embedding for the {slot} slot"))?;
        let e = node.embedding.as_ref().ok_or("node has no embedding")?;
        if e.len() != q.len() {
            return Err(format!("dimension mismatch: query {} vs node {}", q.len(), e.len()));
        }
        Ok(cosine(q, e))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Ascending (expectation, stressor, affective state, response) ids.
    #[default]
    LexicographicIds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetrievalConfig {
    pub k_per_type: usize,
    pub n_subgraphs: usize,
    pub tie_break: TieBreak,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig {
            k_per_type: 10,
            n_subgraphs: 1,
            tie_break: TieBreak::LexicographicIds,
        }
    }
}

impl RetrievalConfig {
    pub fn new(k_per_type: usize, n_subgraphs: usize) -> Result<Self, RetrievalError> {
        let cfg = RetrievalConfig {
            k_per_type,
            n_subgraphs,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RetrievalError> {
        if self.k_per_type == 0 {
            return Err(RetrievalError::Config("k_per_type must be at least 1".into()));
        }
        if self.n_subgraphs == 0 {
            return Err(RetrievalError::Config("n_subgraphs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-slot similarity; `None` when the query has no description for the slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComponentScores {
    pub expectation: Option<f64>,
    pub affective_state: Option<f64>,
    pub stressor: Option<f64>,
    pub response: Option<f64>,
}

impl ComponentScores {
    pub fn get(&self, t: NodeType) -> Option<f64> {
        match t {
            NodeType::Expectation => self.expectation,
            NodeType::AffectiveState => self.affective_state,
            NodeType::Stressor => self.stressor,
            NodeType::Response => self.response,
        }
    }

    fn set(&mut self, t: NodeType, v: Option<f64>) {
        match t {
            NodeType::Expectation => self.expectation = v,
            NodeType::AffectiveState => self.affective_state = v,
            NodeType::Stressor => self.stressor = v,
            NodeType::Response => self.response = v,
        }
    }

    /// Sum in slot order; absent components contribute nothing.
    pub fn total(&self) -> f64 {
        SLOT_ORDER.iter().filter_map(|&t| self.get(t)).fold(0.0, |acc, x| acc + x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSubgraph {
    pub subgraph: CaseSubgraph,
    pub score: f64,
    pub components: ComponentScores,
}

impl ScoredSubgraph {
    fn new(subgraph: CaseSubgraph, components: ComponentScores) -> Self {
        ScoredSubgraph {
            subgraph,
            score: components.total(),
            components,
        }
    }
}

/// Ranking order: higher score first, then the tie-break key ascending.
pub fn rank_order(a: &ScoredSubgraph, b: &ScoredSubgraph, tie: TieBreak) -> Ordering {
    match tie {
        TieBreak::LexicographicIds => b
            .score
            .total_cmp(&a.score)
            .then_with(|| a.subgraph.tie_key().cmp(&b.subgraph.tie_key())),
    }
}

/// Keeps the best `n` items seen so far, sorted by [`rank_order`].
struct TopN {
    n: usize,
    tie: TieBreak,
    items: Vec<ScoredSubgraph>,
}

impl TopN {
    fn new(n: usize, tie: TieBreak) -> Self {
        TopN {
            n,
            tie,
            items: Vec::with_capacity(n.min(1024) + 1),
        }
    }

    fn push(&mut self, s: ScoredSubgraph) {
        if self.items.len() == self.n
            && rank_order(&s, self.items.last().expect("n >= 1"), self.tie) != Ordering::Less
        {
            return;
        }
        let pos = self
            .items
            .partition_point(|x| rank_order(x, &s, self.tie) == Ordering::Less);
        self.items.insert(pos, s);
        self.items.truncate(self.n);
    }
}

fn call(
    f: &dyn SimilarityProvider,
    slot: NodeType,
    description: &str,
    node: &KgNode,
) -> Result<f64, RetrievalError> {
    let v = f.similarity(slot, description, node).map_err(|message| RetrievalError::Provider {
        node: node.id.clone(),
        message,
    })?;
    if !v.is_finite() {
        return Err(RetrievalError::NonFinite { node: node.id.clone() });
    }
    Ok(v)
}

/// Scores one subgraph by calling the provider on each present slot.
pub fn score_subgraph(
    q: &QueryGraph,
    sub: &CaseSubgraph,
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
) -> Result<ScoredSubgraph, RetrievalError> {
    let mut components = ComponentScores::default();
    for slot in SLOT_ORDER {
        if let Some(desc) = q.description(slot) {
            components.set(slot, Some(call(f, slot, &desc, g.node(sub.node(slot)))?));
        }
    }
    Ok(ScoredSubgraph::new(*sub, components))
}

/// Counters describing the work a retrieval did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RetrievalStats {
    pub similarity_calls: usize,
    pub candidates_scored: usize,
    /// Nodes kept per slot in [`SLOT_ORDER`]; `None` for unfiltered slots.
    pub selected: [Option<usize>; 4],
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalOutcome {
    pub results: Vec<ScoredSubgraph>,
    pub diagnostics: Vec<String>,
    pub stats: RetrievalStats,
}

/// Top-K nodes of one type for one slot, keyed by node.
fn select_top_k(
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
    slot: NodeType,
    description: &str,
    k: usize,
) -> Result<HashMap<NodeIdx, f64>, RetrievalError> {
    let mut scored: Vec<(NodeIdx, f64)> = g
        .nodes_of(slot)
        .par_iter()
        .map(|&n| call(f, slot, description, g.node(n)).map(|s| (n, s)))
        .collect::<Result<_, _>>()?;
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored.into_iter().collect())
}

struct Selection {
    /// Per slot in [`SLOT_ORDER`]: `None` = no filter.
    slots: [Option<HashMap<NodeIdx, f64>>; 4],
    calls: usize,
}

fn select(
    q: &QueryGraph,
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
    k: usize,
) -> Result<Selection, RetrievalError> {
    let mut calls = 0;
    let mut slots: [Option<HashMap<NodeIdx, f64>>; 4] = Default::default();
    for (i, slot) in SLOT_ORDER.iter().enumerate() {
        if let Some(desc) = q.description(*slot) {
            calls += g.nodes_of(*slot).len();
            slots[i] = Some(select_top_k(g, f, *slot, &desc, k)?);
        }
    }
    Ok(Selection { slots, calls })
}

fn admitted<'a>(
    g: &'a KnowledgeGraph,
    hub: NodeIdx,
    slot: NodeType,
    filter: &'a Option<HashMap<NodeIdx, f64>>,
) -> Vec<(NodeIdx, Option<f64>)> {
    let neighbors = g.neighbors(hub, slot);
    match filter {
        Some(sel) => neighbors
            .iter()
            .filter_map(|n| sel.get(n).map(|&s| (*n, Some(s))))
            .collect(),
        None => neighbors.iter().map(|&n| (n, None)).collect(),
    }
}

/// Joins the per-slot selections through expectation hubs, feeding every
/// candidate to `sink`. Returns the number of candidates produced.
fn induce(
    g: &KnowledgeGraph,
    sel: &Selection,
    mut sink: impl FnMut(ScoredSubgraph),
) -> usize {
    let [exp_sel, aff_sel, str_sel, resp_sel] = &sel.slots;
    let mut hubs: Vec<(NodeIdx, Option<f64>)> = match exp_sel {
        Some(s) if !s.is_empty() => s.iter().map(|(&n, &v)| (n, Some(v))).collect(),
        _ => g.nodes_of(NodeType::Expectation).iter().map(|&n| (n, None)).collect(),
    };
    hubs.sort_by_key(|h| h.0);

    let mut produced = 0;
    for (e, e_score) in hubs {
        let stressors = admitted(g, e, NodeType::Stressor, str_sel);
        let affects = admitted(g, e, NodeType::AffectiveState, aff_sel);
        let responses = admitted(g, e, NodeType::Response, resp_sel);
        for &(s, s_score) in &stressors {
            for &(a, a_score) in &affects {
                for &(r, r_score) in &responses {
                    produced += 1;
                    let sub = CaseSubgraph {
                        expectation: e,
                        affective_state: a,
                        stressor: s,
                        response: r,
                    };
                    let components = ComponentScores {
                        expectation: e_score,
                        affective_state: a_score,
                        stressor: s_score,
                        response: r_score,
                    };
                    sink(ScoredSubgraph::new(sub, components));
                }
            }
        }
    }
    produced
}

/// All candidate subgraphs admitted by top-`k` slot selection, scored, in
/// no particular order.
pub fn candidate_subgraphs(
    q: &QueryGraph,
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
    k: usize,
) -> Result<Vec<ScoredSubgraph>, RetrievalError> {
    let sel = select(q, g, f, k)?;
    let mut out = Vec::new();
    induce(g, &sel, |s| out.push(s));
    Ok(out)
}

/// Indexed retrieval: per-slot top-K selection, hub join, top-N ranking.
pub fn retrieve(
    q: &QueryGraph,
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
    cfg: &RetrievalConfig,
) -> Result<RetrievalOutcome, RetrievalError> {
    cfg.validate()?;
    let sel = select(q, g, f, cfg.k_per_type)?;
    let mut top = TopN::new(cfg.n_subgraphs, cfg.tie_break);
    let produced = induce(g, &sel, |s| top.push(s));

    let mut diagnostics = Vec::new();
    if produced == 0 {
        diagnostics.push(no_candidate_diagnostic(g, &sel, cfg.k_per_type));
    }
    Ok(RetrievalOutcome {
        results: top.items,
        diagnostics,
        stats: RetrievalStats {
            similarity_calls: sel.calls,
            candidates_scored: produced,
            selected: [0, 1, 2, 3].map(|i| sel.slots[i].as_ref().map(HashMap::len)),
        },
    })
}

fn no_candidate_diagnostic(g: &KnowledgeGraph, sel: &Selection, k: usize) -> String {
    if g.nodes_of(NodeType::Expectation).is_empty() {
        return "no candidate subgraph: the graph has no expectation nodes".into();
    }
    let mut missing = Vec::new();
    for (i, slot) in SLOT_ORDER.iter().enumerate().skip(1) {
        let hubs_ok = sel.slots[0]
            .as_ref()
            .map(|s| s.keys().copied().collect::<Vec<_>>())
            .unwrap_or_else(|| g.nodes_of(NodeType::Expectation).to_vec())
            .into_iter()
            .any(|e| !admitted(g, e, *slot, &sel.slots[i]).is_empty());
        if !hubs_ok {
            missing.push(slot.as_str());
        }
    }
    format!(
        "no candidate subgraph: no selected expectation (K={k}) connects to an admitted {} node; \
         try a larger K",
        if missing.is_empty() { "stressor/affective_state/response".to_string() } else { missing.join("/") }
    )
}

/// Reference ranking over every subgraph in the graph.
pub fn brute_force_retrieve(
    q: &QueryGraph,
    g: &KnowledgeGraph,
    f: &dyn SimilarityProvider,
    n: usize,
    cap: u128,
) -> Result<RetrievalOutcome, RetrievalError> {
    if n == 0 {
        return Err(RetrievalError::Config("n_subgraphs must be at least 1".into()));
    }
    let count = count_subgraphs(g);
    if count > cap {
        return Err(RetrievalError::CapExceeded { count, cap });
    }
    let mut top = TopN::new(n, TieBreak::LexicographicIds);
    let mut calls = 0;
    let present = SLOT_ORDER.iter().filter(|&&t| q.description(t).is_some()).count();
    for sub in enumerate_subgraphs(g, None) {
        top.push(score_subgraph(q, &sub, g, f)?);
        calls += present;
    }
    let mut diagnostics = Vec::new();
    if count == 0 {
        diagnostics.push("no candidate subgraph: the graph contains no complete case".into());
    }
    Ok(RetrievalOutcome {
        results: top.items,
        diagnostics,
        stats: RetrievalStats {
            similarity_calls: calls,
            candidates_scored: count as usize,
            selected: [None; 4],
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRef {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseNodes {
    pub expectation: NodeRef,
    pub affective_state: NodeRef,
    pub stressor: NodeRef,
    pub response: NodeRef,
}

/// Serialized form of one ranked subgraph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedCase {
    pub rank: usize,
    pub score: f64,
    pub components: ComponentScores,
    pub nodes: CaseNodes,
}

pub fn ranked_cases(results: &[ScoredSubgraph], g: &KnowledgeGraph) -> Vec<RankedCase> {
    let node_ref = |idx: NodeIdx| {
        let n = g.node(idx);
        NodeRef {
            id: n.id.clone(),
            text: n.text.clone(),
        }
    };
    results
        .iter()
        .enumerate()
        .map(|(i, r)| RankedCase {
            rank: i + 1,
            score: r.score,
            components: r.components,
            nodes: CaseNodes {
                expectation: node_ref(r.subgraph.expectation),
                affective_state: node_ref(r.subgraph.affective_state),
                stressor: node_ref(r.subgraph.stressor),
                response: node_ref(r.subgraph.response),
            },
        })
        .collect()
}
