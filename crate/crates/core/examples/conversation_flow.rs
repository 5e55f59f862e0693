//! Flow transitions between greeting, farewell and EAFR states, and how
//! initiative and relaxation shift over five conversation phases.
//!
//!     cargo run --example conversation_flow

use esc_toolkit::dialogue::{load_corpus, CorpusFormat};
use esc_toolkit::flow::{progress_profile, transition_matrix, FlowConfig, FlowState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/support_corpus.json");
    let corpus = load_corpus(path, CorpusFormat::Native)?;
    let cfg = FlowConfig::default();

    let m = transition_matrix(&corpus, &cfg);
    let p = m.proportions();
    print!("{:>6}", "");
    for s in FlowState::ALL {
        print!("{:>6}", s.short());
    }
    println!();
    for from in FlowState::ALL {
        print!("{:>6}", from.short());
        for to in FlowState::ALL {
            print!("{:>6.2}", p[from.index()][to.index()]);
        }
        println!();
    }

    println!("\nphase  init   non    relaxation");
    let profile = progress_profile(&corpus, &cfg);
    for (i, phase) in profile.phases.iter().enumerate() {
        let (init, non) = phase.initiative_proportions().unwrap_or((f64::NAN, f64::NAN));
        let rel = phase.relaxation_all();
        let mean = if rel.count > 0 { rel.sum as f64 / rel.count as f64 } else { f64::NAN };
        println!("{i:>5}  {init:.2}   {non:.2}   {mean:.2}");
    }

    println!("\n{}", m.to_dot());
    Ok(())
}
