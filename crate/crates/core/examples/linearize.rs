//! Turns a dialogue prefix plus retrieved knowledge into tagged model input,
//! and a strategy plus response into tagged target text, then parses both back.
//!
//!     cargo run --example linearize

use esc_toolkit::dialogue::SpeakerRole;
use esc_toolkit::seq::{encode_input, encode_output, parse_input, parse_output, ContextTurn, KnowledgeEntry};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let context = [
        ContextTurn::new(SpeakerRole::User, "Hi, I got laid off last week."),
        ContextTurn::new(SpeakerRole::System, "I'm sorry to hear that. How are you holding up?"),
        ContextTurn::new(SpeakerRole::User, "Not great [honestly], money is tight."),
    ];
    let knowledge = KnowledgeEntry {
        commonsense: ["worried", "to pay the bills", "a new job", "to apply", "feels anxious"].map(String::from),
        case: ["find a new job", "anxious", "lost my job", "let's make a plan"].map(String::from),
    };

    for budget in [80, 60] {
        let x = encode_input("job loss", &context, std::slice::from_ref(&knowledge), budget)?;
        println!("budget {budget}, dropped {} turn(s):\n{}\n", x.dropped, x.text);
        let back = parse_input(&x.text)?;
        assert_eq!(back.context.last(), context.last());
    }

    let y = encode_output("Providing Suggestions", "Would updating your resume together help?");
    println!("{y}");
    let parsed = parse_output(&y)?;
    println!("strategy = {:?}, response = {:?}", parsed.strategy, parsed.response);
    Ok(())
}
