//! Shared helpers for the integration suites: naive reference
//! implementations, seeded generators and fixture paths.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use esc_toolkit::dialogue::{
    Dialogue, EmotionIntensity, InitiativeType, SpeakerRole, Utterance,
};
use esc_toolkit::graph::{KgNode, KnowledgeGraph, NodeType};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden").join(name)
}

/// Words that are not stopwords and that the stemmer maps to themselves, so
/// the reference side can tokenize by splitting on whitespace.
pub const FIXED_POINT_WORDS: [&str; 20] = [
    "dog", "cat", "bird", "job", "money", "sleep", "exam", "club", "run", "friend",
    "work", "home", "book", "plan", "call", "talk", "help", "fear", "walk", "sad",
];

/// Reference values of one dialogue: per class (init, non, unlabeled) sums
/// and counts, straight from the definitions.
#[derive(Debug, Clone, Default)]
pub struct NaiveMetrics {
    pub proactivity: Option<f64>,
    /// [init, non, unlabeled] (sum, count).
    pub information: [(f64, usize); 3],
    pub repetition: [(f64, usize); 3],
    pub relaxation: [(f64, usize); 3],
    pub relaxation_skipped: usize,
}

fn class(u: &Utterance) -> usize {
    match u.initiative {
        Some(InitiativeType::Initiative) => 0,
        Some(InitiativeType::NonInitiative) => 1,
        None => 2,
    }
}

/// Direct transcription of the four metric definitions. `tokens[i]` is the
/// preprocessed token list of utterance `i`.
pub fn naive_metrics(d: &Dialogue, tokens: &[Vec<String>]) -> NaiveMetrics {
    let n = d.utterances.len();
    let vocab: Vec<String> = tokens.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let total = |k: &str| tokens.iter().flatten().filter(|t| *t == k).count();
    // v[i][k] = 1 iff term k occurs in utterance i
    let v: Vec<Vec<u32>> = (0..n)
        .map(|i| vocab.iter().map(|k| tokens[i].iter().any(|t| t == k) as u32).collect())
        .collect();
    let is_s = |i: usize| d.utterances[i].role == SpeakerRole::System;
    let is_u = |i: usize| d.utterances[i].role == SpeakerRole::User;

    let mut out = NaiveMetrics::default();

    let sys: Vec<usize> = (0..n).filter(|&i| is_s(i)).collect();
    if !sys.is_empty() && sys.iter().all(|&i| d.utterances[i].initiative.is_some()) {
        let init = sys
            .iter()
            .filter(|&&i| d.utterances[i].initiative == Some(InitiativeType::Initiative))
            .count();
        out.proactivity = Some(init as f64 / sys.len() as f64);
    }

    for i in 0..n {
        if !is_s(i) {
            continue;
        }
        let c = class(&d.utterances[i]);
        let mut inf = 0.0;
        let mut rep = 0.0;
        for (k, term) in vocab.iter().enumerate() {
            if total(term) <= 1 || v[i][k] != 1 {
                continue;
            }
            let prior: u32 = (0..i).map(|j| v[j][k]).sum();
            if prior == 0 {
                inf += 1.0;
            }
            let prior_user: u32 = (0..i).filter(|&j| is_u(j)).map(|j| v[j][k]).sum();
            if prior_user > 0 {
                rep += 1.0;
            }
        }
        out.information[c].0 += inf;
        out.information[c].1 += 1;
        out.repetition[c].0 += rep;
        out.repetition[c].1 += 1;

        let before = (0..i).rev().find(|&j| is_u(j) && d.utterances[j].intensity.is_some());
        let after = (i + 1..n).find(|&j| is_u(j) && d.utterances[j].intensity.is_some());
        match (before, after) {
            (Some(b), Some(a)) => {
                let e = |j: usize| d.utterances[j].intensity.unwrap().level() as f64;
                out.relaxation[c].0 += e(b) - e(a);
                out.relaxation[c].1 += 1;
            }
            _ => out.relaxation_skipped += 1,
        }
    }
    out
}

/// (init, non, all) means of pooled per-class sums. Class means are absent
/// whenever any counted utterance is unlabeled.
pub fn class_means(parts: &[(f64, usize); 3]) -> (Option<f64>, Option<f64>, Option<f64>) {
    let mean = |s: f64, c: usize| (c > 0).then(|| s / c as f64);
    let all = mean(parts.iter().map(|p| p.0).sum(), parts.iter().map(|p| p.1).sum());
    if parts[2].1 > 0 {
        (None, None, all)
    } else {
        (mean(parts[0].0, parts[0].1), mean(parts[1].0, parts[1].1), all)
    }
}

pub fn pool(into: &mut [(f64, usize); 3], from: &[(f64, usize); 3]) {
    for (a, b) in into.iter_mut().zip(from) {
        a.0 += b.0;
        a.1 += b.1;
    }
}

pub fn close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= tol,
        _ => false,
    }
}

/// Random dialogue of 1..=max_len utterances over `words`, with random roles
/// and random, sometimes missing, annotations.
pub fn random_dialogue(rng: &mut ChaCha8Rng, id: &str, max_len: usize, words: &[&str]) -> Dialogue {
    let n = rng.gen_range(1..=max_len);
    let utts = (0..n)
        .map(|i| {
            let role = if rng.gen_bool(0.5) { SpeakerRole::User } else { SpeakerRole::System };
            let len = rng.gen_range(0..=6);
            let text: Vec<&str> = (0..len).map(|_| *words.choose(rng).unwrap()).collect();
            let mut u = Utterance::new(i, role, text.join(" "));
            if rng.gen_bool(0.9) {
                u.initiative = Some(if rng.gen_bool(0.5) {
                    InitiativeType::Initiative
                } else {
                    InitiativeType::NonInitiative
                });
            }
            if role == SpeakerRole::User && rng.gen_bool(0.7) {
                u.intensity = Some(EmotionIntensity::new(rng.gen_range(1..=5)).unwrap());
            }
            u
        })
        .collect();
    Dialogue::new(id, "", utts).unwrap()
}

pub const TOY_WORDS: [&str; 12] = [
    "job", "money", "exam", "sleep", "friend", "city", "lonely", "sad", "work", "plan", "help", "fear",
];

/// Random graph whose nodes carry short texts over `TOY_WORDS`. Cross-type
/// edges always attach to an expectation; a few same-type edges are mixed in.
pub fn random_graph(rng: &mut ChaCha8Rng, max_subgraphs: u128) -> KnowledgeGraph {
    loop {
        let mut nodes = Vec::new();
        let mut by_type: Vec<Vec<String>> = vec![Vec::new(); 4];
        for t in NodeType::ALL {
            for i in 0..rng.gen_range(1..=6) {
                let id = format!("{}{i:02}", &t.as_str()[..3]);
                let len = rng.gen_range(1..=3);
                let text: Vec<&str> = (0..len).map(|_| *TOY_WORDS.choose(rng).unwrap()).collect();
                nodes.push(KgNode::new(id.clone(), t, text.join(" ")));
                by_type[t.index()].push(id);
            }
        }
        let mut edges = Vec::new();
        let exp = &by_type[NodeType::Expectation.index()];
        for e in exp {
            for t in [NodeType::Stressor, NodeType::AffectiveState, NodeType::Response] {
                for other in &by_type[t.index()] {
                    if rng.gen_bool(0.6) {
                        edges.push((e.clone(), other.clone()));
                    }
                }
            }
        }
        for t in [NodeType::Stressor, NodeType::Expectation, NodeType::Response] {
            let ids = &by_type[t.index()];
            if ids.len() >= 2 && rng.gen_bool(0.5) {
                edges.push((ids[0].clone(), ids[1].clone()));
            }
        }
        nodes.shuffle(rng);
        let g = KnowledgeGraph::from_parts(nodes, &edges).unwrap();
        if esc_toolkit::graph::count_subgraphs(&g) <= max_subgraphs {
            return g;
        }
    }
}

/// Every (e, a, s, r) quadruple joined through `e`, found by testing all
/// node combinations for edges.
pub fn naive_subgraphs(g: &KnowledgeGraph) -> Vec<[String; 4]> {
    let ids = |t: NodeType| -> Vec<_> { g.nodes().filter(|(_, n)| n.node_type == t).map(|(i, _)| i).collect() };
    let mut out = Vec::new();
    for &e in &ids(NodeType::Expectation) {
        for &a in &ids(NodeType::AffectiveState) {
            for &s in &ids(NodeType::Stressor) {
                for &r in &ids(NodeType::Response) {
                    if g.has_edge(e, a) && g.has_edge(e, s) && g.has_edge(e, r) {
                        out.push([e, a, s, r].map(|i| g.node(i).id.clone()));
                    }
                }
            }
        }
    }
    out
}
