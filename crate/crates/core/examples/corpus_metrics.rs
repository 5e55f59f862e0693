//! Proactivity, information, repetition and relaxation for the fixture corpus,
//! per dialogue and pooled.
//!
//!     cargo run --example corpus_metrics

use esc_toolkit::dialogue::{load_corpus, CorpusFormat};
use esc_toolkit::metrics::{corpus_report, dialogue_metrics};
use esc_toolkit::text::TextPipeline;

fn fmt(v: Option<f64>) -> String {
    v.map_or("-".into(), |x| format!("{x:.3}"))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/support_corpus.json");
    let corpus = load_corpus(path, CorpusFormat::Native)?;
    let pipeline = TextPipeline::default();

    println!("{:<14} {:>6} {:>6} {:>6} {:>6}", "dialogue", "pro", "inf", "rep", "rel");
    for d in &corpus.dialogues {
        let m = dialogue_metrics(&pipeline, d);
        println!(
            "{:<14} {:>6} {:>6} {:>6} {:>6}",
            d.id,
            fmt(m.proactivity),
            fmt(m.information.values().all),
            fmt(m.repetition.values().all),
            fmt(m.relaxation.values().all),
        );
    }

    let report = corpus_report(&pipeline, &corpus);
    println!("\n{}", serde_json::to_string_pretty(&report.to_json())?);
    Ok(())
}
