//! Tagged text linearization for sequence-to-sequence models.
//!
//! Input:  `[CLS] [situ.] S [usr] U1 [sys] U2 ... [know.] [xR.] .. [xE.] .. [Exp.] .. [Resp.] ..`
//! Output: `[strategy] Y [response] R`
//!
//! Tags and payloads are separated by single spaces. Brackets inside a payload
//! are doubled (`[` becomes `[[`), so no payload can be mistaken for a tag.
//! Each retrieved case becomes its own `[know.]` section, in rank order.
//! See `FORMAT.md` for the full grammar.

use std::fmt;

use thiserror::Error;

use crate::dialogue::{SpeakerRole, Utterance};
use crate::retrieval::{CommonsenseRelation, QueryGraph, RankedCase};

pub const FORMAT_VERSION: &str = "esc-seq-v1";
pub const DEFAULT_BUDGET: usize = 160;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpecialToken {
    Cls,
    Situation,
    User,
    System,
    Knowledge,
    XReact,
    XIntent,
    XWant,
    XNeed,
    XEffect,
    Expectation,
    AffectiveState,
    Stressor,
    Response,
    Strategy,
    ResponseText,
}

impl SpecialToken {
    pub const ALL: [SpecialToken; 16] = [
        SpecialToken::Cls,
        SpecialToken::Situation,
        SpecialToken::User,
        SpecialToken::System,
        SpecialToken::Knowledge,
        SpecialToken::XReact,
        SpecialToken::XIntent,
        SpecialToken::XWant,
        SpecialToken::XNeed,
        SpecialToken::XEffect,
        SpecialToken::Expectation,
        SpecialToken::AffectiveState,
        SpecialToken::Stressor,
        SpecialToken::Response,
        SpecialToken::Strategy,
        SpecialToken::ResponseText,
    ];

    pub const COMMONSENSE: [SpecialToken; 5] = [
        SpecialToken::XReact,
        SpecialToken::XIntent,
        SpecialToken::XWant,
        SpecialToken::XNeed,
        SpecialToken::XEffect,
    ];

    pub const CASE: [SpecialToken; 4] = [
        SpecialToken::Expectation,
        SpecialToken::AffectiveState,
        SpecialToken::Stressor,
        SpecialToken::Response,
    ];

    pub fn surface(self) -> &'static str {
        match self {
            SpecialToken::Cls => "[CLS]",
            SpecialToken::Situation => "[situ.]",
            SpecialToken::User => "[usr]",
            SpecialToken::System => "[sys]",
            SpecialToken::Knowledge => "[know.]",
            SpecialToken::XReact => "[xR.]",
            SpecialToken::XIntent => "[xI.]",
            SpecialToken::XWant => "[xW.]",
            SpecialToken::XNeed => "[xN.]",
            SpecialToken::XEffect => "[xE.]",
            SpecialToken::Expectation => "[Exp.]",
            SpecialToken::AffectiveState => "[Aff.]",
            SpecialToken::Stressor => "[Str.]",
            SpecialToken::Response => "[Resp.]",
            SpecialToken::Strategy => "[strategy]",
            SpecialToken::ResponseText => "[response]",
        }
    }

    fn role(role: SpeakerRole) -> Self {
        match role {
            SpeakerRole::User => SpecialToken::User,
            SpeakerRole::System => SpecialToken::System,
        }
    }
}

impl fmt::Display for SpecialToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.surface())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("context is empty")]
    EmptyContext,
    #[error("budget of {budget} units cannot hold situation, last utterance and knowledge ({required} units)")]
    BudgetTooSmall { required: usize, budget: usize },
    #[error("malformed sequence: {reason}")]
    Malformed { reason: String, raw: String },
    #[error("generated text has no [strategy] marker")]
    MissingStrategy { raw: String },
    #[error("generated text has no [response] marker after [strategy]")]
    MissingResponse { raw: String },
}

pub fn escape(payload: &str) -> String {
    payload.replace('[', "[[").replace(']', "]]")
}

/// Inverse of [`escape`]. Lone brackets are kept as they are.
pub fn unescape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars().peekable();
    while let Some(c) = chars.next() {
        out.push(c);
        if (c == '[' || c == ']') && chars.peek() == Some(&c) {
            chars.next();
        }
    }
    out
}

/// Splits `text` into the raw text before the first tag and `(tag, raw text
/// up to the next tag)` pairs. Doubled brackets never start a tag; a single
/// `[` that does not open a known surface is plain text.
fn lex(text: &str) -> (&str, Vec<(SpecialToken, &str)>) {
    let bytes = text.as_bytes();
    let mut tags: Vec<(SpecialToken, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'[' | b']' if bytes.get(i + 1) == Some(&bytes[i]) => i += 2,
            b'[' => {
                let rest = &text[i..];
                match SpecialToken::ALL.iter().find(|t| rest.starts_with(t.surface())) {
                    Some(&t) => {
                        tags.push((t, i, i + t.surface().len()));
                        i += t.surface().len();
                    }
                    None => i += 1,
                }
            }
            _ => i += 1,
        }
    }
    let lead = &text[..tags.first().map_or(text.len(), |t| t.1)];
    let segments = tags
        .iter()
        .enumerate()
        .map(|(n, &(t, _, end))| {
            let stop = tags.get(n + 1).map_or(text.len(), |next| next.1);
            (t, &text[end..stop])
        })
        .collect();
    (lead, segments)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextTurn {
    pub role: SpeakerRole,
    pub text: String,
}

impl ContextTurn {
    pub fn new(role: SpeakerRole, text: impl Into<String>) -> Self {
        ContextTurn { role, text: text.into() }
    }
}

impl From<&Utterance> for ContextTurn {
    fn from(u: &Utterance) -> Self {
        ContextTurn::new(u.role, u.text.clone())
    }
}

/// One `[know.]` section. Absent slots are empty strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnowledgeEntry {
    /// xReact, xIntent, xWant, xNeed, xEffect.
    pub commonsense: [String; 5],
    /// Expectation, affective state, stressor, response.
    pub case: [String; 4],
}

impl KnowledgeEntry {
    pub fn from_case(query: Option<&QueryGraph>, case: Option<&RankedCase>) -> Self {
        let commonsense = CommonsenseRelation::ALL
            .map(|r| query.and_then(|q| q.expansion(r)).unwrap_or_default().to_string());
        let case = match case {
            Some(c) => [
                c.nodes.expectation.text.clone(),
                c.nodes.affective_state.text.clone(),
                c.nodes.stressor.text.clone(),
                c.nodes.response.text.clone(),
            ],
            None => Default::default(),
        };
        KnowledgeEntry { commonsense, case }
    }
}

/// One knowledge section per ranked case; a single commonsense-only section
/// when nothing was retrieved.
pub fn knowledge_sections(query: Option<&QueryGraph>, cases: &[RankedCase]) -> Vec<KnowledgeEntry> {
    if cases.is_empty() {
        return match query {
            Some(q) => vec![KnowledgeEntry::from_case(Some(q), None)],
            None => Vec::new(),
        };
    }
    cases.iter().map(|c| KnowledgeEntry::from_case(query, Some(c))).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearizedInput {
    pub situation: String,
    pub context: Vec<ContextTurn>,
    pub knowledge: Vec<KnowledgeEntry>,
}

fn units(s: &str) -> usize {
    s.split_whitespace().count()
}

impl LinearizedInput {
    pub fn encode(&self) -> String {
        let mut parts: Vec<String> = vec![SpecialToken::Cls.surface().into()];
        let mut tagged = |t: SpecialToken, payload: &str| {
            parts.push(t.surface().into());
            parts.push(escape(payload));
        };
        tagged(SpecialToken::Situation, &self.situation);
        for turn in &self.context {
            tagged(SpecialToken::role(turn.role), &turn.text);
        }
        for k in &self.knowledge {
            parts.push(SpecialToken::Knowledge.surface().into());
            for (t, p) in SpecialToken::COMMONSENSE.iter().zip(&k.commonsense) {
                parts.push(t.surface().into());
                parts.push(escape(p));
            }
            for (t, p) in SpecialToken::CASE.iter().zip(&k.case) {
                parts.push(t.surface().into());
                parts.push(escape(p));
            }
        }
        parts.join(" ")
    }

    /// Whitespace-delimited units of [`encode`](Self::encode), computed without encoding.
    pub fn units(&self) -> usize {
        self.fixed_units() + self.context.iter().map(|t| 1 + units(&t.text)).sum::<usize>()
    }

    fn fixed_units(&self) -> usize {
        2 + units(&self.situation)
            + self
                .knowledge
                .iter()
                .map(|k| {
                    10 + k.commonsense.iter().chain(&k.case).map(|p| units(p)).sum::<usize>()
                })
                .sum::<usize>()
    }

    /// Drops the oldest context turns until the sequence fits `budget`.
    /// Returns the number of dropped turns.
    pub fn fit_to_budget(&mut self, budget: usize) -> Result<usize, FormatError> {
        let last = self.context.last().ok_or(FormatError::EmptyContext)?;
        let required = self.fixed_units() + 1 + units(&last.text);
        if required > budget {
            return Err(FormatError::BudgetTooSmall { required, budget });
        }
        let mut total = self.units();
        let mut dropped = 0;
        while total > budget {
            total -= 1 + units(&self.context[dropped].text);
            dropped += 1;
        }
        self.context.drain(..dropped);
        Ok(dropped)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedInput {
    pub text: String,
    pub dropped: usize,
}

/// Serializes the context and knowledge, dropping the oldest turns to stay
/// within `budget` whitespace units.
pub fn encode_input(
    situation: &str,
    context: &[ContextTurn],
    knowledge: &[KnowledgeEntry],
    budget: usize,
) -> Result<EncodedInput, FormatError> {
    let mut x = LinearizedInput {
        situation: situation.to_string(),
        context: context.to_vec(),
        knowledge: knowledge.to_vec(),
    };
    let dropped = x.fit_to_budget(budget)?;
    Ok(EncodedInput { text: x.encode(), dropped })
}

/// Removes the separator spaces around a payload.
fn payload(raw: &str, last: bool) -> String {
    let raw = raw.strip_prefix(' ').unwrap_or(raw);
    let raw = if last { raw } else { raw.strip_suffix(' ').unwrap_or(raw) };
    unescape(raw)
}

struct Cursor<'a> {
    raw: &'a str,
    segments: Vec<(SpecialToken, &'a str)>,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn malformed(&self, reason: impl Into<String>) -> FormatError {
        FormatError::Malformed {
            reason: reason.into(),
            raw: self.raw.to_string(),
        }
    }

    fn peek(&self) -> Option<SpecialToken> {
        self.segments.get(self.pos).map(|s| s.0)
    }

    fn expect(&mut self, t: SpecialToken) -> Result<&'a str, FormatError> {
        match self.segments.get(self.pos) {
            Some(&(found, raw)) if found == t => {
                self.pos += 1;
                Ok(raw)
            }
            Some(&(found, _)) => Err(self.malformed(format!("expected {t}, found {found}"))),
            None => Err(self.malformed(format!("expected {t}, found end of input"))),
        }
    }

    fn payload_of(&mut self, t: SpecialToken) -> Result<String, FormatError> {
        let raw = self.expect(t)?;
        Ok(payload(raw, self.pos == self.segments.len()))
    }

    fn bare(&mut self, t: SpecialToken) -> Result<(), FormatError> {
        let raw = self.expect(t)?;
        let ok = if self.pos == self.segments.len() { raw.is_empty() } else { raw == " " };
        if ok {
            Ok(())
        } else {
            Err(self.malformed(format!("unexpected text after {t}")))
        }
    }
}

pub fn parse_input(text: &str) -> Result<LinearizedInput, FormatError> {
    let (lead, segments) = lex(text);
    let mut c = Cursor { raw: text, segments, pos: 0 };
    if !lead.is_empty() {
        return Err(c.malformed("text before [CLS]"));
    }
    c.bare(SpecialToken::Cls)?;
    let situation = c.payload_of(SpecialToken::Situation)?;

    let mut context = Vec::new();
    while let Some(t @ (SpecialToken::User | SpecialToken::System)) = c.peek() {
        let role = if t == SpecialToken::User { SpeakerRole::User } else { SpeakerRole::System };
        context.push(ContextTurn::new(role, c.payload_of(t)?));
    }
    if context.is_empty() {
        return Err(c.malformed("no context utterance"));
    }

    let mut knowledge = Vec::new();
    while c.peek() == Some(SpecialToken::Knowledge) {
        c.bare(SpecialToken::Knowledge)?;
        let mut k = KnowledgeEntry::default();
        for (i, t) in SpecialToken::COMMONSENSE.iter().enumerate() {
            k.commonsense[i] = c.payload_of(*t)?;
        }
        for (i, t) in SpecialToken::CASE.iter().enumerate() {
            k.case[i] = c.payload_of(*t)?;
        }
        knowledge.push(k);
    }
    if let Some(t) = c.peek() {
        return Err(c.malformed(format!("unexpected {t}")));
    }
    Ok(LinearizedInput { situation, context, knowledge })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedOutput {
    pub strategy: String,
    pub response: String,
}

pub fn encode_output(strategy: &str, response: &str) -> String {
    format!(
        "{} {} {} {}",
        SpecialToken::Strategy,
        escape(strategy),
        SpecialToken::ResponseText,
        escape(response)
    )
}

/// Splits generated text on the first `[strategy]` and the first `[response]`
/// after it. The strategy is trimmed; the response loses only its separator space.
pub fn parse_output(text: &str) -> Result<LinearizedOutput, FormatError> {
    let (_, segments) = lex(text);
    let start = segments
        .iter()
        .position(|s| s.0 == SpecialToken::Strategy)
        .ok_or_else(|| FormatError::MissingStrategy { raw: text.to_string() })?;
    let split = segments[start + 1..]
        .iter()
        .position(|s| s.0 == SpecialToken::ResponseText)
        .map(|p| p + start + 1)
        .ok_or_else(|| FormatError::MissingResponse { raw: text.to_string() })?;

    let offset = |s: &str| s.as_ptr() as usize - text.as_ptr() as usize;
    let strategy_start = offset(segments[start].1);
    let response_tag = offset(segments[split].1) - SpecialToken::ResponseText.surface().len();
    let strategy = unescape(&text[strategy_start..response_tag]).trim().to_string();
    let response_raw = &text[offset(segments[split].1)..];
    let response = unescape(response_raw.strip_prefix(' ').unwrap_or(response_raw));
    Ok(LinearizedOutput { strategy, response })
}
