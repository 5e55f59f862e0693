//! Preprocessing and per-dialogue term statistics.
//!
//! The pipeline lowercases, turns every Unicode punctuation character into a
//! separator, splits on whitespace, drops stopwords and Snowball-stems the
//! remaining tokens. A [`Vocabulary`] is built per dialogue; each utterance is
//! reduced to the binary [`TermSet`] of stems it contains.

pub mod stemmer;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;

use crate::dialogue::Dialogue;

/// Bundled English stopword list (one token per line).
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en_v1.txt");
pub const DEFAULT_STOPWORDS_VERSION: &str = "stopwords_en_v1";

#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// Parses one token per line; blank lines are ignored and entries lowercased.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::to_lowercase)
            .collect();
        StopwordList { words }
    }

    pub fn from_file(path: impl AsRef<Path>) -> io::Result<Self> {
        Ok(Self::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

static PUNCTUATION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{P}").expect("static regex"));

/// Lowercases, replaces Unicode punctuation with spaces and splits on whitespace.
pub fn tokenize(text: &str) -> Vec<String> {
    let lowered = text.to_lowercase();
    PUNCTUATION
        .replace_all(&lowered, " ")
        .split_whitespace()
        .map(str::to_string)
        .collect()
}

#[derive(Debug, Clone)]
pub struct TextPipeline {
    stopwords: StopwordList,
}

impl Default for TextPipeline {
    fn default() -> Self {
        Self::new(StopwordList::default())
    }
}

impl TextPipeline {
    pub fn new(stopwords: StopwordList) -> Self {
        TextPipeline { stopwords }
    }

    pub fn stopwords(&self) -> &StopwordList {
        &self.stopwords
    }

    /// Ordered stems of `text` with stopwords removed.
    pub fn preprocess(&self, text: &str) -> Vec<String> {
        tokenize(text)
            .into_iter()
            .filter(|t| !self.stopwords.contains(t))
            .map(|t| stemmer::stem(&t))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Per-dialogue stem table. Ids are assigned in order of first occurrence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    stems: Vec<String>,
    ids: HashMap<String, TermId>,
    counts: Vec<usize>,
}

impl Vocabulary {
    fn intern(&mut self, stem: &str) -> TermId {
        if let Some(&id) = self.ids.get(stem) {
            self.counts[id.index()] += 1;
            return id;
        }
        let id = TermId(self.stems.len() as u32);
        self.stems.push(stem.to_string());
        self.ids.insert(stem.to_string(), id);
        self.counts.push(1);
        id
    }

    pub fn len(&self) -> usize {
        self.stems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stems.is_empty()
    }

    pub fn id(&self, stem: &str) -> Option<TermId> {
        self.ids.get(stem).copied()
    }

    pub fn stem(&self, id: TermId) -> &str {
        &self.stems[id.index()]
    }

    /// Total token occurrences of the term across the dialogue.
    pub fn count(&self, id: TermId) -> usize {
        self.counts[id.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermId, &str, usize)> {
        self.stems
            .iter()
            .zip(&self.counts)
            .enumerate()
            .map(|(i, (s, &c))| (TermId(i as u32), s.as_str(), c))
    }

    pub fn frequent_terms(&self) -> BTreeSet<TermId> {
        frequent_terms(self)
    }
}

/// Distinct terms of one utterance, sorted by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TermSet(Vec<TermId>);

impl TermSet {
    fn from_ids(mut ids: Vec<TermId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        TermSet(ids)
    }

    pub fn contains(&self, id: TermId) -> bool {
        self.0.binary_search(&id).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = TermId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Builds the dialogue's vocabulary and the term set of each utterance,
/// aligned with utterance indices.
pub fn build_vocabulary(pipeline: &TextPipeline, d: &Dialogue) -> (Vocabulary, Vec<TermSet>) {
    let mut vocab = Vocabulary::default();
    let sets = d
        .utterances
        .iter()
        .map(|u| {
            let ids = pipeline
                .preprocess(&u.text)
                .iter()
                .map(|s| vocab.intern(s))
                .collect();
            TermSet::from_ids(ids)
        })
        .collect();
    (vocab, sets)
}

/// Terms occurring more than once in the dialogue.
pub fn frequent_terms(v: &Vocabulary) -> BTreeSet<TermId> {
    v.iter().filter(|&(_, _, c)| c >= 2).map(|(id, _, _)| id).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialogue::{SpeakerRole, Utterance};

    fn dialogue(texts: &[&str]) -> Dialogue {
        let utts = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Utterance::new(i, SpeakerRole::User, *t))
            .collect();
        Dialogue::new("d", "", utts).unwrap()
    }

    #[test]
    fn preprocess_examples() {
        let p = TextPipeline::default();
        assert!(p.preprocess("").is_empty());
        assert_eq!(p.preprocess("I am SO frustrated!!"), vec!["frustrat"]);
        assert_eq!(p.preprocess("dogs and dog"), vec!["dog", "dog"]);
    }

    #[test]
    fn contractions_split_into_stopwords() {
        let p = TextPipeline::default();
        assert_eq!(p.preprocess("I don't know, I'm lost"), vec!["know", "lost"]);
    }

    #[test]
    fn unicode_punctuation_is_a_separator() {
        assert_eq!(tokenize("job\u{2014}loss «fear»"), vec!["job", "loss", "fear"]);
    }

    #[test]
    fn vocabulary_counts() {
        let p = TextPipeline::default();
        let (v, sets) = build_vocabulary(&p, &dialogue(&["dog dog", "dog cat", "cat bird"]));
        let count = |s| v.count(v.id(s).unwrap());
        assert_eq!((count("dog"), count("cat"), count("bird")), (3, 2, 1));
        assert_eq!(sets.len(), 3);
        assert_eq!(sets[0].len(), 1);
        let frequent: Vec<&str> = frequent_terms(&v).into_iter().map(|id| v.stem(id)).collect();
        assert_eq!(frequent, vec!["dog", "cat"]);
    }

    #[test]
    fn empty_utterance_gives_empty_vocabulary() {
        let p = TextPipeline::default();
        let (v, sets) = build_vocabulary(&p, &dialogue(&[""]));
        assert!(v.is_empty());
        assert_eq!(sets, vec![TermSet::default()]);
        assert!(frequent_terms(&v).is_empty());
    }

    #[test]
    fn repeated_term_in_one_utterance_counts_twice_but_is_binary() {
        let p = TextPipeline::default();
        let (v, sets) = build_vocabulary(&p, &dialogue(&["cat cat"]));
        let cat = v.id("cat").unwrap();
        assert_eq!(v.count(cat), 2);
        assert_eq!(sets[0].iter().collect::<Vec<_>>(), vec![cat]);
        assert!(frequent_terms(&v).contains(&cat));
    }

    #[test]
    fn custom_stopwords() {
        let p = TextPipeline::new(StopwordList::parse("Dog\n\ncat\n"));
        assert_eq!(p.preprocess("dog cat birds"), vec!["bird"]);
    }
}
