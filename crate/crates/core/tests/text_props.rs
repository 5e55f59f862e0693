use std::collections::HashMap;

use esc_toolkit::dialogue::{Dialogue, SpeakerRole, Utterance};
use esc_toolkit::text::stemmer::stem;
use esc_toolkit::text::{build_vocabulary, frequent_terms, tokenize, StopwordList, TextPipeline};
use proptest::prelude::*;

fn text() -> impl Strategy<Value = String> {
    prop_oneof!["[A-Za-z ,.!?'-]{0,60}", any::<String>()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tokens_are_lowercase_and_punctuation_free(t in text()) {
        for tok in tokenize(&t) {
            prop_assert!(!tok.is_empty());
            prop_assert!(!tok.chars().any(|c| c.is_whitespace()));
            prop_assert_eq!(tok.to_lowercase(), tok.clone());
            prop_assert!(tokenize(&tok) == vec![tok.clone()]);
        }
    }

    #[test]
    fn preprocess_drops_stopwords_and_stems(t in text()) {
        let p = TextPipeline::default();
        let expected: Vec<String> = tokenize(&t)
            .into_iter()
            .filter(|w| !p.stopwords().contains(w))
            .map(|w| stem(&w))
            .collect();
        prop_assert_eq!(p.preprocess(&t), expected);
    }

    #[test]
    fn stemming_is_stable(w in "[a-z]{1,15}") {
        let s = stem(&w);
        prop_assert!(s.len() <= w.len() + 1);
        prop_assert_eq!(stem(&w), s);
    }

    #[test]
    fn vocabulary_counts_every_occurrence(texts in prop::collection::vec(text(), 1..8)) {
        let p = TextPipeline::default();
        let utts = texts.iter().enumerate().map(|(i, t)| Utterance::new(i, SpeakerRole::User, t.clone())).collect();
        let d = Dialogue::new("d", "", utts).unwrap();
        let (vocab, sets) = build_vocabulary(&p, &d);
        prop_assert_eq!(sets.len(), texts.len());

        let mut counts: HashMap<String, usize> = HashMap::new();
        let mut first: Vec<String> = Vec::new();
        for t in &texts {
            for s in p.preprocess(t) {
                if !counts.contains_key(&s) {
                    first.push(s.clone());
                }
                *counts.entry(s).or_default() += 1;
            }
        }
        prop_assert_eq!(vocab.len(), counts.len());
        let stems: Vec<&str> = vocab.iter().map(|(_, s, _)| s).collect();
        prop_assert_eq!(stems, first.iter().map(String::as_str).collect::<Vec<_>>());
        for (id, s, c) in vocab.iter() {
            prop_assert_eq!(c, counts[s]);
            prop_assert_eq!(vocab.id(s), Some(id));
            prop_assert_eq!(frequent_terms(&vocab).contains(&id), c >= 2);
        }
        for (t, set) in texts.iter().zip(&sets) {
            let mut distinct = p.preprocess(t);
            distinct.sort();
            distinct.dedup();
            prop_assert_eq!(set.len(), distinct.len());
            prop_assert!(distinct.iter().all(|s| set.contains(vocab.id(s).unwrap())));
        }
    }
}

#[test]
fn punctuation_splits_words() {
    assert_eq!(tokenize("I'm fine,really!"), vec!["i", "m", "fine", "really"]);
    assert_eq!(tokenize("  \t\n"), Vec::<String>::new());
}

#[test]
fn custom_stopwords() {
    let p = TextPipeline::new(StopwordList::parse("# comment\njob\n\n"));
    assert_eq!(p.preprocess("the job hunting"), vec!["the", "hunt"]);
}

#[test]
fn stopwords_are_removed_before_stemming() {
    let p = TextPipeline::default();
    // "others" is not a stopword, its stem "other" is
    assert_eq!(p.preprocess("the others were willing"), vec!["other", "will"]);
    assert!(p.stopwords().contains("other"));
}
