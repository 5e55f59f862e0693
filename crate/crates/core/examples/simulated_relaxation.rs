//! Relaxation of a candidate response, using an intensity estimator and a
//! user simulator. Here the simulator replays the recorded reply and the
//! estimator is a keyword rule.
//!
//!     cargo run --example simulated_relaxation

use esc_toolkit::dialogue::{load_corpus, CorpusFormat, EmotionIntensity};
use esc_toolkit::metrics::{
    relaxation_terms, simulated_relaxation, AnnotatedIntensity, EstimateInput, ProviderError, ReplayFeedback,
};

fn keyword_estimate(input: &EstimateInput<'_>) -> Result<Option<EmotionIntensity>, ProviderError> {
    let t = input.text.to_lowercase();
    let level = if ["awful", "terrible", "hopeless"].iter().any(|w| t.contains(w)) {
        5
    } else if ["thanks", "better", "helps"].iter().any(|w| t.contains(w)) {
        2
    } else {
        3
    };
    Ok(Some(EmotionIntensity::new(level).map_err(|e| ProviderError(e.to_string()))?))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/support_corpus.json");
    let corpus = load_corpus(path, CorpusFormat::Native)?;
    let d = &corpus.dialogues[0];
    let recorded = relaxation_terms(d);
    let replay = ReplayFeedback { dialogue: d };

    println!("{:>3}  {:>8}  {:>8}  {:>8}", "pos", "recorded", "replayed", "keyword");
    for (i, u) in d.utterances.iter().enumerate().filter(|(_, u)| u.is_system()) {
        let replayed = simulated_relaxation(d, i, &u.text, &AnnotatedIntensity, &replay).ok();
        let keyword = simulated_relaxation(d, i, &u.text, &keyword_estimate, &replay).ok();
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:+.0}"));
        println!(
            "{i:>3}  {:>8}  {:>8}  {:>8}",
            recorded[i].map_or("-".to_string(), |x| format!("{x:+}")),
            show(replayed),
            show(keyword)
        );
    }
    Ok(())
}
