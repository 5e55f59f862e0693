use esc_toolkit::dialogue::SpeakerRole;
use esc_toolkit::seq::{
    encode_input, encode_output, escape, parse_input, parse_output, unescape, ContextTurn, FormatError,
    KnowledgeEntry, LinearizedInput, SpecialToken,
};
use proptest::prelude::*;

fn payload() -> impl Strategy<Value = String> {
    prop_oneof![
        "[a-z \\[\\]\\.]{0,24}",
        "(\\[(usr|sys|CLS|know\\.|xR\\.|Resp\\.|strategy|response)\\]| |word)*",
        any::<String>(),
    ]
}

fn turn() -> impl Strategy<Value = ContextTurn> {
    (any::<bool>(), payload()).prop_map(|(u, t)| ContextTurn::new(if u { SpeakerRole::User } else { SpeakerRole::System }, t))
}

fn entry() -> impl Strategy<Value = KnowledgeEntry> {
    (prop::array::uniform5(payload()), prop::array::uniform4(payload()))
        .prop_map(|(commonsense, case)| KnowledgeEntry { commonsense, case })
}

fn input() -> impl Strategy<Value = LinearizedInput> {
    (payload(), prop::collection::vec(turn(), 1..8), prop::collection::vec(entry(), 0..3))
        .prop_map(|(situation, context, knowledge)| LinearizedInput { situation, context, knowledge })
}

fn units(s: &str) -> usize {
    s.split_whitespace().count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn escape_round_trips(s in payload()) {
        prop_assert_eq!(unescape(&escape(&s)), s);
    }

    #[test]
    fn input_round_trips(x in input()) {
        let text = x.encode();
        prop_assert_eq!(units(&text), x.units());
        prop_assert_eq!(parse_input(&text).unwrap(), x);
    }

    #[test]
    fn output_round_trips(s in payload(), r in payload()) {
        let out = parse_output(&encode_output(&s, &r)).unwrap();
        prop_assert_eq!(out.strategy, s.trim());
        prop_assert_eq!(out.response, r);
    }

    #[test]
    fn budget_drops_only_the_oldest_turns(x in input(), budget in 0usize..120) {
        match encode_input(&x.situation, &x.context, &x.knowledge, budget) {
            Ok(enc) => {
                prop_assert!(units(&enc.text) <= budget);
                let back = parse_input(&enc.text).unwrap();
                prop_assert!(enc.dropped < x.context.len());
                prop_assert_eq!(&back.context[..], &x.context[enc.dropped..]);
                prop_assert_eq!(&back.knowledge, &x.knowledge);
                prop_assert_eq!(&back.situation, &x.situation);
                // keeping one more turn would not have fit
                if enc.dropped > 0 {
                    let kept = LinearizedInput { context: x.context[enc.dropped - 1..].to_vec(), ..x.clone() };
                    prop_assert!(kept.units() > budget);
                }
            }
            Err(FormatError::BudgetTooSmall { required, budget: b }) => {
                prop_assert_eq!(b, budget);
                prop_assert!(required > budget);
                let minimal = LinearizedInput { context: x.context[x.context.len() - 1..].to_vec(), ..x.clone() };
                prop_assert_eq!(minimal.units(), required);
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn knowledge_tags_keep_their_order(x in input()) {
        let text = x.encode();
        let order: Vec<&str> = SpecialToken::COMMONSENSE
            .iter()
            .chain(&SpecialToken::CASE)
            .map(|t| t.surface())
            .collect();
        let tags: Vec<&str> = text
            .split(' ')
            .filter(|w| order.contains(w) || *w == SpecialToken::Knowledge.surface())
            .collect();
        // escaped payloads never contain a bare tag surface
        prop_assert_eq!(tags.len(), x.knowledge.len() * 10);
        for section in tags.chunks(10) {
            prop_assert_eq!(section[0], SpecialToken::Knowledge.surface());
            prop_assert_eq!(&section[1..], &order[..]);
        }
    }
}

#[test]
fn empty_context_is_rejected() {
    assert_eq!(encode_input("s", &[], &[], 100), Err(FormatError::EmptyContext));
}

#[test]
fn generated_text_without_markers() {
    assert!(matches!(parse_output("just words"), Err(FormatError::MissingStrategy { .. })));
    assert!(matches!(parse_output("[strategy] Question"), Err(FormatError::MissingResponse { .. })));
    let out = parse_output("noise [strategy]  Question  [response] How are you? [strategy] x").unwrap();
    assert_eq!(out.strategy, "Question");
    assert_eq!(out.response, "How are you? [strategy] x");
}
