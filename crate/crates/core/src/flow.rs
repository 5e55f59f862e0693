//! Dialogue-flow transitions and conversation-progress phases.
//!
//! Greeting ("Hi") and farewell ("Bye") utterances are detected with small
//! editable lexicons. They become their own flow nodes and are left out of the
//! progress phases. Metric computation elsewhere is unaffected by this tagging.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::dialogue::{eafr_label, Corpus, Dialogue, EafrLabel, InitiativeType};
use crate::metrics::{relaxation_terms, Tally};
use crate::text::tokenize;

pub const DEFAULT_GREETINGS: &str = include_str!("../data/greetings.txt");
pub const DEFAULT_FAREWELLS: &str = include_str!("../data/farewells.txt");

/// Number of conversation-progress phases.
pub const PHASES: usize = 5;

/// Recorded in flow and progress reports.
pub const GREETING_NOTE: &str =
    "greeting and farewell utterances become Hi/Bye flow states and are left out of progress phases; corpus metrics still include them";

/// Phrases matched as whole-token runs against tokenized utterances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    phrases: Vec<Vec<String>>,
}

impl Lexicon {
    /// One phrase per line; blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Self {
        let phrases = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(tokenize)
            .filter(|p| !p.is_empty())
            .collect();
        Lexicon { phrases }
    }

    pub fn from_file(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn greetings() -> Self {
        Self::parse(DEFAULT_GREETINGS)
    }

    pub fn farewells() -> Self {
        Self::parse(DEFAULT_FAREWELLS)
    }

    pub fn matches(&self, text: &str) -> bool {
        let tokens = tokenize(text);
        self.phrases.iter().any(|p| {
            tokens
                .windows(p.len())
                .any(|w| w.iter().zip(p).all(|(a, b)| a == b))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowConfig {
    pub greetings: Lexicon,
    pub farewells: Lexicon,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            greetings: Lexicon::greetings(),
            farewells: Lexicon::farewells(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GreetingTag {
    Hi,
    Body,
    Bye,
}

/// Tags the maximal greeting prefix as `Hi` and the maximal farewell suffix as
/// `Bye`. At least one utterance always stays `Body`; when the two runs would
/// cover the whole dialogue, the body utterance is the one nearest the middle.
pub fn tag_greetings(d: &Dialogue, cfg: &FlowConfig) -> Vec<GreetingTag> {
    let n = d.len();
    let prefix = d
        .utterances
        .iter()
        .take_while(|u| cfg.greetings.matches(&u.text))
        .count();
    let suffix = d
        .utterances
        .iter()
        .rev()
        .take_while(|u| cfg.farewells.matches(&u.text))
        .count();

    let (hi_end, bye_start) = if prefix + suffix < n {
        (prefix, n - suffix)
    } else {
        // Hi = [0, m), Bye = (m, n); m must satisfy n-suffix-1 <= m <= prefix.
        let lo = (n - suffix).saturating_sub(1);
        let hi = prefix.min(n - 1);
        let m = ((n - 1) / 2).clamp(lo, hi);
        (m, m + 1)
    };
    (0..n)
        .map(|i| {
            if i < hi_end {
                GreetingTag::Hi
            } else if i >= bye_start {
                GreetingTag::Bye
            } else {
                GreetingTag::Body
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FlowNode {
    Hi,
    Bye,
    Expression,
    Action,
    Feedback,
    Reflection,
}

impl From<EafrLabel> for FlowNode {
    fn from(l: EafrLabel) -> Self {
        match l {
            EafrLabel::Expression => FlowNode::Expression,
            EafrLabel::Action => FlowNode::Action,
            EafrLabel::Feedback => FlowNode::Feedback,
            EafrLabel::Reflection => FlowNode::Reflection,
        }
    }
}

/// States of the transition matrix: the six flow nodes framed by Start and End.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlowState {
    Start,
    Node(FlowNode),
    End,
}

impl FlowState {
    pub const ALL: [FlowState; 8] = [
        FlowState::Start,
        FlowState::Node(FlowNode::Hi),
        FlowState::Node(FlowNode::Bye),
        FlowState::Node(FlowNode::Expression),
        FlowState::Node(FlowNode::Action),
        FlowState::Node(FlowNode::Feedback),
        FlowState::Node(FlowNode::Reflection),
        FlowState::End,
    ];

    pub fn index(self) -> usize {
        match self {
            FlowState::Start => 0,
            FlowState::Node(FlowNode::Hi) => 1,
            FlowState::Node(FlowNode::Bye) => 2,
            FlowState::Node(FlowNode::Expression) => 3,
            FlowState::Node(FlowNode::Action) => 4,
            FlowState::Node(FlowNode::Feedback) => 5,
            FlowState::Node(FlowNode::Reflection) => 6,
            FlowState::End => 7,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowState::Start => "Start",
            FlowState::Node(FlowNode::Hi) => "Hi",
            FlowState::Node(FlowNode::Bye) => "Bye",
            FlowState::Node(FlowNode::Expression) => "Expression",
            FlowState::Node(FlowNode::Action) => "Action",
            FlowState::Node(FlowNode::Feedback) => "Feedback",
            FlowState::Node(FlowNode::Reflection) => "Reflection",
            FlowState::End => "End",
        }
    }

    /// One-letter label used in flow diagrams.
    pub fn short(self) -> &'static str {
        match self {
            FlowState::Start => "Start",
            FlowState::Node(FlowNode::Hi) => "H",
            FlowState::Node(FlowNode::Bye) => "B",
            FlowState::Node(FlowNode::Expression) => "E",
            FlowState::Node(FlowNode::Action) => "A",
            FlowState::Node(FlowNode::Feedback) => "F",
            FlowState::Node(FlowNode::Reflection) => "R",
            FlowState::End => "End",
        }
    }
}

const STATES: usize = FlowState::ALL.len();

/// Flow nodes of one dialogue plus the number of body utterances dropped for
/// lacking an initiative annotation.
pub fn dialogue_flow(d: &Dialogue, cfg: &FlowConfig) -> (Vec<FlowNode>, usize) {
    let tags = tag_greetings(d, cfg);
    let mut excluded = 0;
    let nodes = d
        .utterances
        .iter()
        .zip(tags)
        .filter_map(|(u, tag)| match tag {
            GreetingTag::Hi => Some(FlowNode::Hi),
            GreetingTag::Bye => Some(FlowNode::Bye),
            GreetingTag::Body => {
                let label = eafr_label(u).map(FlowNode::from);
                if label.is_none() {
                    excluded += 1;
                }
                label
            }
        })
        .collect();
    (nodes, excluded)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionMatrix {
    /// `counts[from][to]` indexed by [`FlowState::index`].
    pub counts: [[u64; STATES]; STATES],
    pub dialogues: u64,
    /// Body utterances skipped because their EAFR label is unknown.
    pub excluded_unlabeled: u64,
}

impl Default for TransitionMatrix {
    fn default() -> Self {
        TransitionMatrix {
            counts: [[0; STATES]; STATES],
            dialogues: 0,
            excluded_unlabeled: 0,
        }
    }
}

impl TransitionMatrix {
    pub fn from_dialogue(d: &Dialogue, cfg: &FlowConfig) -> Self {
        let (nodes, excluded) = dialogue_flow(d, cfg);
        let mut m = TransitionMatrix {
            dialogues: 1,
            excluded_unlabeled: excluded as u64,
            ..Default::default()
        };
        let mut prev = FlowState::Start;
        for node in nodes {
            let next = FlowState::Node(node);
            m.counts[prev.index()][next.index()] += 1;
            prev = next;
        }
        m.counts[prev.index()][FlowState::End.index()] += 1;
        m
    }

    pub fn merge(&mut self, other: &TransitionMatrix) {
        for (row, other_row) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(other_row) {
                *c += o;
            }
        }
        self.dialogues += other.dialogues;
        self.excluded_unlabeled += other.excluded_unlabeled;
    }

    pub fn count(&self, from: FlowState, to: FlowState) -> u64 {
        self.counts[from.index()][to.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Row-normalized proportions; all-zero rows stay zero.
    pub fn proportions(&self) -> [[f64; STATES]; STATES] {
        let mut p = [[0.0; STATES]; STATES];
        for (row, counts) in p.iter_mut().zip(&self.counts) {
            let total: u64 = counts.iter().sum();
            if total > 0 {
                for (v, &c) in row.iter_mut().zip(counts) {
                    *v = c as f64 / total as f64;
                }
            }
        }
        p
    }

    /// Occurrences of each flow node (incoming transitions).
    pub fn node_counts(&self) -> [u64; STATES] {
        let mut out = [0; STATES];
        for row in &self.counts {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }

    /// Share of dialogues opening with each state.
    pub fn start_distribution(&self) -> [f64; STATES] {
        self.proportions()[FlowState::Start.index()]
    }

    /// Share of dialogues closing with each state.
    pub fn end_distribution(&self) -> [f64; STATES] {
        let mut out = [0.0; STATES];
        if self.dialogues > 0 {
            for (o, row) in out.iter_mut().zip(&self.counts) {
                *o = row[FlowState::End.index()] as f64 / self.dialogues as f64;
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let names: Vec<&str> = FlowState::ALL.iter().map(|s| s.name()).collect();
        let node_counts = self.node_counts();
        serde_json::json!({
            "states": names,
            "dialogues": self.dialogues,
            "excluded_unlabeled": self.excluded_unlabeled,
            "counts": self.counts,
            "proportions": self.proportions(),
            "node_counts": FlowState::ALL[1..7]
                .iter()
                .map(|s| (s.name().to_string(), serde_json::json!(node_counts[s.index()])))
                .collect::<serde_json::Map<_, _>>(),
            "start_distribution": self.start_distribution(),
            "end_distribution": self.end_distribution(),
            "note": GREETING_NOTE,
        })
    }

    /// Long-format rows `from,to,count,proportion` for every observed transition.
    pub fn to_csv(&self) -> String {
        let p = self.proportions();
        let mut out = String::from("from,to,count,proportion\n");
        for from in FlowState::ALL {
            for to in FlowState::ALL {
                let c = self.count(from, to);
                if c > 0 {
                    let _ = writeln!(
                        out,
                        "{},{},{},{}",
                        from.name(),
                        to.name(),
                        c,
                        p[from.index()][to.index()]
                    );
                }
            }
        }
        out
    }

    /// Graphviz rendering with edge weights set to transition proportions.
    pub fn to_dot(&self) -> String {
        let p = self.proportions();
        let nodes = self.node_counts();
        let mut out = String::from("digraph flow {\n  rankdir=LR;\n");
        for s in FlowState::ALL {
            let shape = match s {
                FlowState::Start | FlowState::End => "circle",
                FlowState::Node(_) => "box",
            };
            let _ = writeln!(
                out,
                "  \"{}\" [shape={shape}, label=\"{}\\n{}\"];",
                s.name(),
                s.short(),
                nodes[s.index()]
            );
        }
        for from in FlowState::ALL {
            for to in FlowState::ALL {
                let c = self.count(from, to);
                if c > 0 {
                    let w = p[from.index()][to.index()];
                    let _ = writeln!(
                        out,
                        "  \"{}\" -> \"{}\" [label=\"{w:.3}\", penwidth={:.3}];",
                        from.name(),
                        to.name(),
                        1.0 + 4.0 * w
                    );
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn transition_matrix(c: &Corpus, cfg: &FlowConfig) -> TransitionMatrix {
    c.dialogues
        .par_iter()
        .map(|d| TransitionMatrix::from_dialogue(d, cfg))
        .collect::<Vec<_>>()
        .iter()
        .fold(TransitionMatrix::default(), |mut acc, m| {
            acc.merge(m);
            acc
        })
}

/// Phase of the `i`-th of `n` body utterances.
pub fn phase_of(i: usize, n: usize) -> usize {
    (PHASES * i / n).min(PHASES - 1)
}

/// Pooled counts for one conversation phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub body_utterances: u64,
    pub system_init: u64,
    pub system_non: u64,
    pub system_unlabeled: u64,
    pub relaxation_init: Tally,
    pub relaxation_non: Tally,
    pub relaxation_unlabeled: Tally,
}

impl PhaseStats {
    fn merge(&mut self, o: &PhaseStats) {
        self.body_utterances += o.body_utterances;
        self.system_init += o.system_init;
        self.system_non += o.system_non;
        self.system_unlabeled += o.system_unlabeled;
        self.relaxation_init.merge(o.relaxation_init);
        self.relaxation_non.merge(o.relaxation_non);
        self.relaxation_unlabeled.merge(o.relaxation_unlabeled);
    }

    /// (initiative, non-initiative) shares among annotated system utterances.
    pub fn initiative_proportions(&self) -> Option<(f64, f64)> {
        let labeled = self.system_init + self.system_non;
        (labeled > 0).then(|| {
            (
                self.system_init as f64 / labeled as f64,
                self.system_non as f64 / labeled as f64,
            )
        })
    }

    pub fn relaxation_all(&self) -> Tally {
        let mut t = self.relaxation_init;
        t.merge(self.relaxation_non);
        t.merge(self.relaxation_unlabeled);
        t
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgressProfile {
    pub phases: [PhaseStats; PHASES],
    pub dialogues: u64,
}

impl ProgressProfile {
    pub fn from_dialogue(d: &Dialogue, cfg: &FlowConfig) -> Self {
        let tags = tag_greetings(d, cfg);
        let rel = relaxation_terms(d);
        let body: Vec<usize> = (0..d.len()).filter(|&i| tags[i] == GreetingTag::Body).collect();
        let mut profile = ProgressProfile {
            dialogues: 1,
            ..Default::default()
        };
        for (bi, &i) in body.iter().enumerate() {
            let phase = &mut profile.phases[phase_of(bi, body.len())];
            phase.body_utterances += 1;
            let u = &d.utterances[i];
            if !u.is_system() {
                continue;
            }
            let (count, tally) = match u.initiative {
                Some(InitiativeType::Initiative) => (&mut phase.system_init, &mut phase.relaxation_init),
                Some(InitiativeType::NonInitiative) => (&mut phase.system_non, &mut phase.relaxation_non),
                None => (&mut phase.system_unlabeled, &mut phase.relaxation_unlabeled),
            };
            *count += 1;
            if let Some(r) = rel[i] {
                tally.add(r);
            }
        }
        profile
    }

    pub fn merge(&mut self, other: &ProgressProfile) {
        for (p, o) in self.phases.iter_mut().zip(&other.phases) {
            p.merge(o);
        }
        self.dialogues += other.dialogues;
    }

    pub fn to_json(&self) -> serde_json::Value {
        let phases: Vec<_> = self
            .phases
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let props = p.initiative_proportions();
                serde_json::json!({
                    "phase": k,
                    "body_utterances": p.body_utterances,
                    "system": {
                        "init": p.system_init,
                        "non": p.system_non,
                        "unlabeled": p.system_unlabeled,
                    },
                    "initiative_proportion": {
                        "init": props.map(|x| x.0),
                        "non": props.map(|x| x.1),
                    },
                    "intensity_change": {
                        "init": p.relaxation_init.mean(),
                        "non": p.relaxation_non.mean(),
                        "all": p.relaxation_all().mean(),
                    },
                    "intensity_change_samples": {
                        "init": p.relaxation_init.count,
                        "non": p.relaxation_non.count,
                        "all": p.relaxation_all().count,
                    },
                })
            })
            .collect();
        serde_json::json!({ "dialogues": self.dialogues, "phases": phases, "note": GREETING_NOTE })
    }

    /// Long-format `phase,series,value` rows for plotting; undefined values are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("phase,series,value\n");
        let fmt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for (k, p) in self.phases.iter().enumerate() {
            let props = p.initiative_proportions();
            let rows = [
                ("initiative_proportion_init", fmt(props.map(|x| x.0))),
                ("initiative_proportion_non", fmt(props.map(|x| x.1))),
                ("intensity_change_init", fmt(p.relaxation_init.mean())),
                ("intensity_change_non", fmt(p.relaxation_non.mean())),
                ("intensity_change_all", fmt(p.relaxation_all().mean())),
                ("system_utterances", (p.system_init + p.system_non + p.system_unlabeled).to_string()),
                ("body_utterances", p.body_utterances.to_string()),
            ];
            for (series, value) in rows {
                let _ = writeln!(out, "{k},{series},{value}");
            }
        }
        out
    }
}

pub fn progress_profile(c: &Corpus, cfg: &FlowConfig) -> ProgressProfile {
    c.dialogues
        .par_iter()
        .map(|d| ProgressProfile::from_dialogue(d, cfg))
        .collect::<Vec<_>>()
        .iter()
        .fold(ProgressProfile::default(), |mut acc, p| {
            acc.merge(p);
            acc
        })
}
