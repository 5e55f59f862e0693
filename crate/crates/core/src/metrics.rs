//! Emotional support metrics: Proactivity, Information, Repetition and
//! Relaxation, each split by the initiative class of the system utterance.
//!
//! Per-dialogue results are kept as integer tallies (sum, count) so corpus
//! aggregation is an exact, order-independent pooled sum. The corpus "micro"
//! values normalize by system utterances across the whole corpus; "macro"
//! values average per-dialogue results and are reported separately.

use rayon::prelude::*;
use thiserror::Error;

use crate::dialogue::{Corpus, Dialogue, EmotionIntensity, InitiativeType, Utterance};
use crate::text::{build_vocabulary, frequent_terms, TextPipeline};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("dialogue {dialogue}: system utterance {index} has no initiative annotation")]
    MissingInitiative { dialogue: String, index: usize },
    #[error("dialogue {dialogue}: no system utterances")]
    NoSystemUtterances { dialogue: String },
    #[error("dialogue {dialogue}: position {position} is outside the dialogue")]
    PositionOutOfRange { dialogue: String, position: usize },
    #[error("dialogue {dialogue}: no user utterance with an estimable intensity before position {position}")]
    NoPriorIntensity { dialogue: String, position: usize },
    #[error("dialogue {dialogue}: feedback for position {position} has no estimable intensity")]
    FeedbackNotEstimable { dialogue: String, position: usize },
    #[error("dialogue {dialogue}, position {position}: {stage} failed: {source}")]
    Provider {
        dialogue: String,
        position: usize,
        stage: &'static str,
        #[source]
        source: ProviderError,
    },
}

/// Failure reported by a pluggable estimator or feedback provider.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct ProviderError(pub String);

/// Sum and count for one initiative class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub sum: i64,
    pub count: usize,
}

impl Tally {
    pub(crate) fn add(&mut self, value: i64) {
        self.sum += value;
        self.count += 1;
    }

    pub fn merge(&mut self, other: Tally) {
        self.sum += other.sum;
        self.count += other.count;
    }

    pub fn mean(self) -> Option<f64> {
        (self.count > 0).then(|| self.sum as f64 / self.count as f64)
    }
}

/// Init./Non./All values of one metric. Empty classes are `None`, never zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassValues {
    pub init: Option<f64>,
    pub non_init: Option<f64>,
    pub all: Option<f64>,
}

/// Per-class tallies of one metric.
///
/// Class columns are only defined when every counted system utterance has an
/// initiative annotation; otherwise [`ClassTally::values`] leaves them `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassTally {
    pub init: Tally,
    pub non_init: Tally,
    pub unlabeled: Tally,
    /// System utterances left out of the tally (Relaxation only).
    pub skipped: usize,
}

impl ClassTally {
    fn add(&mut self, initiative: Option<InitiativeType>, value: i64) {
        match initiative {
            Some(InitiativeType::Initiative) => self.init.add(value),
            Some(InitiativeType::NonInitiative) => self.non_init.add(value),
            None => self.unlabeled.add(value),
        }
    }

    pub fn merge(&mut self, other: &ClassTally) {
        self.init.merge(other.init);
        self.non_init.merge(other.non_init);
        self.unlabeled.merge(other.unlabeled);
        self.skipped += other.skipped;
    }

    pub fn total(&self) -> Tally {
        let mut t = self.init;
        t.merge(self.non_init);
        t.merge(self.unlabeled);
        t
    }

    pub fn has_class_columns(&self) -> bool {
        self.unlabeled.count == 0
    }

    pub fn values(&self) -> ClassValues {
        let classed = self.has_class_columns();
        ClassValues {
            init: if classed { self.init.mean() } else { None },
            non_init: if classed { self.non_init.mean() } else { None },
            all: self.total().mean(),
        }
    }
}

/// Ratio of system utterances that take the initiative.
pub fn proactivity(d: &Dialogue) -> Result<f64, MetricError> {
    let counts = system_counts(d);
    if let Some(index) = counts.first_unlabeled {
        return Err(MetricError::MissingInitiative {
            dialogue: d.id.clone(),
            index,
        });
    }
    if counts.total() == 0 {
        return Err(MetricError::NoSystemUtterances {
            dialogue: d.id.clone(),
        });
    }
    Ok(counts.init as f64 / counts.total() as f64)
}

/// System utterance counts by initiative class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SystemCounts {
    pub init: usize,
    pub non_init: usize,
    pub unlabeled: usize,
    first_unlabeled: Option<usize>,
}

impl SystemCounts {
    pub fn total(&self) -> usize {
        self.init + self.non_init + self.unlabeled
    }

    fn merge(&mut self, other: &SystemCounts) {
        self.init += other.init;
        self.non_init += other.non_init;
        self.unlabeled += other.unlabeled;
        self.first_unlabeled = self.first_unlabeled.or(other.first_unlabeled);
    }
}

pub fn system_counts(d: &Dialogue) -> SystemCounts {
    let mut c = SystemCounts::default();
    for u in d.system_utterances() {
        match u.initiative {
            Some(InitiativeType::Initiative) => c.init += 1,
            Some(InitiativeType::NonInitiative) => c.non_init += 1,
            None => {
                c.unlabeled += 1;
                c.first_unlabeled.get_or_insert(u.index);
            }
        }
    }
    c
}

/// Information and Repetition tallies from one pass over the dialogue.
///
/// For each system utterance, Information counts frequent terms it contains
/// that occur in no earlier utterance (either role); Repetition counts frequent
/// terms it contains that occurred in an earlier user utterance.
pub fn term_metrics(pipeline: &TextPipeline, d: &Dialogue) -> (ClassTally, ClassTally) {
    let (vocab, sets) = build_vocabulary(pipeline, d);
    let frequent = frequent_terms(&vocab);
    let mut is_frequent = vec![false; vocab.len()];
    for id in &frequent {
        is_frequent[id.index()] = true;
    }
    let mut seen = vec![false; vocab.len()];
    let mut seen_by_user = vec![false; vocab.len()];
    let mut information = ClassTally::default();
    let mut repetition = ClassTally::default();

    for (u, set) in d.utterances.iter().zip(&sets) {
        if u.is_system() {
            let mut new_terms = 0;
            let mut repeated = 0;
            for id in set.iter().filter(|id| is_frequent[id.index()]) {
                if !seen[id.index()] {
                    new_terms += 1;
                }
                if seen_by_user[id.index()] {
                    repeated += 1;
                }
            }
            information.add(u.initiative, new_terms);
            repetition.add(u.initiative, repeated);
        }
        for id in set.iter() {
            seen[id.index()] = true;
            if u.is_user() {
                seen_by_user[id.index()] = true;
            }
        }
    }
    (information, repetition)
}

pub fn information(pipeline: &TextPipeline, d: &Dialogue) -> ClassTally {
    term_metrics(pipeline, d).0
}

pub fn repetition(pipeline: &TextPipeline, d: &Dialogue) -> ClassTally {
    term_metrics(pipeline, d).1
}

/// Intensity change around each utterance: `Some(before - after)` for system
/// utterances with an annotated user utterance on both sides, else `None`.
///
/// "Before" and "after" are the nearest intensity-annotated user utterances.
pub fn relaxation_terms(d: &Dialogue) -> Vec<Option<i64>> {
    let n = d.len();
    let level = |u: &Utterance| {
        u.is_user()
            .then_some(u.intensity)
            .flatten()
            .map(|e| e.level() as i64)
    };
    let mut before = vec![None; n];
    let mut last = None;
    for (i, u) in d.utterances.iter().enumerate() {
        before[i] = last;
        if let Some(e) = level(u) {
            last = Some(e);
        }
    }
    let mut after = vec![None; n];
    let mut next = None;
    for (i, u) in d.utterances.iter().enumerate().rev() {
        after[i] = next;
        if let Some(e) = level(u) {
            next = Some(e);
        }
    }
    d.utterances
        .iter()
        .enumerate()
        .map(|(i, u)| match (u.is_system(), before[i], after[i]) {
            (true, Some(b), Some(a)) => Some(b - a),
            _ => None,
        })
        .collect()
}

pub fn relaxation(d: &Dialogue) -> ClassTally {
    let mut tally = ClassTally::default();
    for (u, rel) in d.utterances.iter().zip(relaxation_terms(d)) {
        if !u.is_system() {
            continue;
        }
        match rel {
            Some(r) => tally.add(u.initiative, r),
            None => tally.skipped += 1,
        }
    }
    tally
}

/// Input handed to an [`IntensityEstimator`].
#[derive(Debug, Clone, Copy)]
pub struct EstimateInput<'a> {
    pub text: &'a str,
    pub dialogue: &'a Dialogue,
    /// Index of the recorded utterance the text came from, if any.
    pub source: Option<usize>,
}

/// Maps a user utterance to an emotion intensity level.
///
/// `Ok(None)` means "no estimate available" (for example an unannotated
/// utterance); errors abort the computation.
pub trait IntensityEstimator {
    fn estimate(&self, input: &EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError>;
}

/// Reads the intensity annotation of the source utterance.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnnotatedIntensity;

impl IntensityEstimator for AnnotatedIntensity {
    fn estimate(&self, input: &EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError> {
        Ok(input
            .source
            .and_then(|i| input.dialogue.utterances.get(i))
            .and_then(|u| u.intensity))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantIntensity(pub EmotionIntensity);

impl IntensityEstimator for ConstantIntensity {
    fn estimate(&self, _: &EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError> {
        Ok(Some(self.0))
    }
}

impl<F> IntensityEstimator for F
where
    F: Fn(&EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError>,
{
    fn estimate(&self, input: &EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError> {
        self(input)
    }
}

/// User reply to a system response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feedback {
    pub text: String,
    /// Index of the recorded utterance replayed as feedback, if any.
    pub source: Option<usize>,
}

/// Produces the user's reply to `response` given the situation and the
/// utterances preceding the response.
pub trait FeedbackProvider {
    fn feedback(
        &self,
        situation: &str,
        context: &[Utterance],
        response: &str,
    ) -> Result<Feedback, ProviderError>;
}

/// Replays the recorded user utterance that follows the response position.
#[derive(Debug, Clone, Copy)]
pub struct ReplayFeedback<'a> {
    pub dialogue: &'a Dialogue,
}

impl FeedbackProvider for ReplayFeedback<'_> {
    fn feedback(&self, _: &str, context: &[Utterance], _: &str) -> Result<Feedback, ProviderError> {
        let position = context.len();
        self.dialogue
            .utterances
            .iter()
            .skip(position + 1)
            .find(|u| u.is_user())
            .map(|u| Feedback {
                text: u.text.clone(),
                source: Some(u.index),
            })
            .ok_or_else(|| ProviderError(format!("no recorded user utterance after position {position}")))
    }
}

/// Relaxation of a (possibly generated) response placed at `position`:
/// the estimated intensity of the nearest earlier user utterance minus the
/// estimated intensity of the simulated user feedback.
pub fn simulated_relaxation(
    d: &Dialogue,
    position: usize,
    response: &str,
    estimator: &dyn IntensityEstimator,
    feedback: &dyn FeedbackProvider,
) -> Result<f64, MetricError> {
    if position > d.len() {
        return Err(MetricError::PositionOutOfRange {
            dialogue: d.id.clone(),
            position,
        });
    }
    let provider_err = |stage, source| MetricError::Provider {
        dialogue: d.id.clone(),
        position,
        stage,
        source,
    };

    let mut before = None;
    for u in d.utterances[..position].iter().rev().filter(|u| u.is_user()) {
        let input = EstimateInput {
            text: &u.text,
            dialogue: d,
            source: Some(u.index),
        };
        if let Some(e) = estimator
            .estimate(&input)
            .map_err(|e| provider_err("intensity estimation", e))?
        {
            before = Some(e);
            break;
        }
    }
    let before = before.ok_or_else(|| MetricError::NoPriorIntensity {
        dialogue: d.id.clone(),
        position,
    })?;

    let reply = feedback
        .feedback(&d.situation, &d.utterances[..position], response)
        .map_err(|e| provider_err("user feedback", e))?;
    let input = EstimateInput {
        text: &reply.text,
        dialogue: d,
        source: reply.source,
    };
    let after = estimator
        .estimate(&input)
        .map_err(|e| provider_err("feedback intensity estimation", e))?
        .ok_or_else(|| MetricError::FeedbackNotEstimable {
            dialogue: d.id.clone(),
            position,
        })?;
    Ok(before.level() as f64 - after.level() as f64)
}

/// All metric tallies of one dialogue.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DialogueMetrics {
    pub id: String,
    pub system: SystemCounts,
    pub proactivity: Option<f64>,
    pub information: ClassTally,
    pub repetition: ClassTally,
    pub relaxation: ClassTally,
    pub issues: Vec<MetricError>,
}

pub fn dialogue_metrics(pipeline: &TextPipeline, d: &Dialogue) -> DialogueMetrics {
    let (information, repetition) = term_metrics(pipeline, d);
    let mut issues = Vec::new();
    let proactivity = proactivity(d).map_err(|e| issues.push(e)).ok();
    DialogueMetrics {
        id: d.id.clone(),
        system: system_counts(d),
        proactivity,
        information,
        repetition,
        relaxation: relaxation(d),
        issues,
    }
}

/// Per-dialogue averages of the "all" columns.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MacroAverages {
    pub proactivity: Option<f64>,
    pub information: Option<f64>,
    pub repetition: Option<f64>,
    pub relaxation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub corpus: String,
    pub dialogues: usize,
    /// Pooled initiative ratio over dialogues whose system utterances are all annotated.
    pub proactivity: Option<f64>,
    pub information: ClassValues,
    pub repetition: ClassValues,
    pub relaxation: ClassValues,
    pub counts: SystemCounts,
    /// System utterances excluded from Relaxation.
    pub skipped: usize,
    pub macro_average: MacroAverages,
    pub issues: Vec<MetricError>,
}

/// Aggregates every metric over a corpus (micro-average over system utterances).
pub fn corpus_report(pipeline: &TextPipeline, c: &Corpus) -> MetricsReport {
    let per_dialogue: Vec<DialogueMetrics> = c
        .dialogues
        .par_iter()
        .map(|d| dialogue_metrics(pipeline, d))
        .collect();
    report_from_dialogues(&c.name, &per_dialogue)
}

pub fn report_from_dialogues(name: &str, per_dialogue: &[DialogueMetrics]) -> MetricsReport {
    let mut counts = SystemCounts::default();
    let mut pro = (0usize, 0usize);
    let mut information = ClassTally::default();
    let mut repetition = ClassTally::default();
    let mut relaxation = ClassTally::default();
    let mut issues = Vec::new();
    for m in per_dialogue {
        counts.merge(&m.system);
        if m.proactivity.is_some() {
            pro.0 += m.system.init;
            pro.1 += m.system.total();
        }
        information.merge(&m.information);
        repetition.merge(&m.repetition);
        relaxation.merge(&m.relaxation);
        issues.extend(m.issues.iter().cloned());
    }

    let macro_of = |f: &dyn Fn(&DialogueMetrics) -> Option<f64>| {
        // Sorting makes the floating-point sum independent of dialogue order.
        let mut vals: Vec<f64> = per_dialogue.iter().filter_map(f).collect();
        vals.sort_by(f64::total_cmp);
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    };
    let macro_average = MacroAverages {
        proactivity: macro_of(&|m| m.proactivity),
        information: macro_of(&|m| m.information.total().mean()),
        repetition: macro_of(&|m| m.repetition.total().mean()),
        relaxation: macro_of(&|m| m.relaxation.total().mean()),
    };

    MetricsReport {
        corpus: name.to_string(),
        dialogues: per_dialogue.len(),
        proactivity: (pro.1 > 0).then(|| pro.0 as f64 / pro.1 as f64),
        information: information.values(),
        repetition: repetition.values(),
        relaxation: relaxation.values(),
        counts,
        skipped: relaxation.skipped,
        macro_average,
        issues,
    }
}

impl MetricsReport {
    fn rows(&self) -> Vec<(&'static str, &'static str, &'static str, Option<f64>)> {
        let mut rows = vec![("micro", "proactivity", "all", self.proactivity)];
        for (name, v) in [
            ("information", self.information),
            ("repetition", self.repetition),
            ("relaxation", self.relaxation),
        ] {
            rows.push(("micro", name, "init", v.init));
            rows.push(("micro", name, "non", v.non_init));
            rows.push(("micro", name, "all", v.all));
        }
        let m = self.macro_average;
        rows.push(("macro", "proactivity", "all", m.proactivity));
        rows.push(("macro", "information", "all", m.information));
        rows.push(("macro", "repetition", "all", m.repetition));
        rows.push(("macro", "relaxation", "all", m.relaxation));
        rows
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut micro = serde_json::Map::new();
        let mut macro_avg = serde_json::Map::new();
        for (avg, metric, class, v) in self.rows() {
            let target = if avg == "micro" { &mut micro } else { &mut macro_avg };
            target
                .entry(metric)
                .or_insert_with(|| serde_json::json!({}))
                .as_object_mut()
                .expect("object")
                .insert(class.to_string(), serde_json::json!(v));
        }
        serde_json::json!({
            "corpus": self.corpus,
            "dialogues": self.dialogues,
            "system_utterances": {
                "init": self.counts.init,
                "non": self.counts.non_init,
                "unlabeled": self.counts.unlabeled,
            },
            "relaxation_skipped": self.skipped,
            "micro": micro,
            "macro": macro_avg,
            "issues": self.issues.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        })
    }

    /// Long-format `averaging,metric,class,value` rows; undefined values are empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("averaging,metric,class,value\n");
        for (avg, metric, class, v) in self.rows() {
            out.push_str(&format!(
                "{avg},{metric},{class},{}\n",
                v.map(|x| x.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}
