//! EAFR-annotated dialogues and corpora.
//!
//! Every utterance carries a speaker role and, when annotated, an initiative
//! type, a negative-emotion intensity level (1 to 5) and a support strategy.
//! Consecutive utterances from the same speaker stay separate; all metrics
//! index utterances, not turns.
//!
//! Two on-disk layouts are understood:
//!
//! * [`CorpusFormat::Native`]: `{"name": .., "dialogues": [{"id", "situation",
//!   "utterances": [{"text", "role", "initiative"?, "intensity"?, "strategy"?}]}]}`
//!   where `role` is `"user"`/`"system"` and `initiative` is `"init"`/`"non"`.
//! * [`CorpusFormat::EsConv`]: the ESConv release layout, a top-level array of
//!   dialogues with `situation` and a `dialog` list of
//!   `{"speaker": "seeker"|"supporter", "content", "annotation": {"strategy"}}`.
//!   `seeker` maps to the user role and `supporter` to the system role.
//!   Optional per-turn `initiative`/`intensity` keys are read with the native
//!   spellings. Dialogues get ids `esconv-<position>` unless an `id` key exists.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read corpus {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("corpus is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("dialogue {dialogue}, utterance {utterance}: {reason}")]
    Utterance {
        dialogue: String,
        utterance: usize,
        reason: String,
    },
    #[error("dialogue {dialogue}: {reason}")]
    Dialogue { dialogue: String, reason: String },
    #[error("malformed corpus: {0}")]
    Layout(String),
    #[error("duplicate dialogue id {0}")]
    DuplicateId(String),
    #[error("unknown role {0:?} (expected \"user\" or \"system\")")]
    UnknownRole(String),
    #[error("unknown initiative {0:?} (expected \"init\" or \"non\")")]
    UnknownInitiative(String),
    #[error("emotion intensity {0} outside 1..=5")]
    IntensityOutOfRange(i64),
    #[error("unknown corpus format {0:?} (expected \"native\" or \"esconv\")")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpeakerRole {
    User,
    System,
}

impl SpeakerRole {
    pub fn as_str(self) -> &'static str {
        match self {
            SpeakerRole::User => "user",
            SpeakerRole::System => "system",
        }
    }
}

impl FromStr for SpeakerRole {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "user" => Ok(SpeakerRole::User),
            "system" => Ok(SpeakerRole::System),
            other => Err(CorpusError::UnknownRole(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InitiativeType {
    #[serde(rename = "init")]
    Initiative,
    #[serde(rename = "non")]
    NonInitiative,
}

impl InitiativeType {
    pub fn as_str(self) -> &'static str {
        match self {
            InitiativeType::Initiative => "init",
            InitiativeType::NonInitiative => "non",
        }
    }
}

impl FromStr for InitiativeType {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "init" => Ok(InitiativeType::Initiative),
            "non" => Ok(InitiativeType::NonInitiative),
            other => Err(CorpusError::UnknownInitiative(other.to_string())),
        }
    }
}

/// The four-way utterance schema crossing speaker role with initiative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EafrLabel {
    /// User takes the initiative.
    Expression,
    /// System takes the initiative.
    Action,
    /// User responds without initiative.
    Feedback,
    /// System responds without initiative.
    Reflection,
}

impl EafrLabel {
    pub const ALL: [EafrLabel; 4] = [
        EafrLabel::Expression,
        EafrLabel::Action,
        EafrLabel::Feedback,
        EafrLabel::Reflection,
    ];

    pub fn from_parts(role: SpeakerRole, initiative: InitiativeType) -> Self {
        use InitiativeType::*;
        use SpeakerRole::*;
        match (role, initiative) {
            (User, Initiative) => EafrLabel::Expression,
            (System, Initiative) => EafrLabel::Action,
            (User, NonInitiative) => EafrLabel::Feedback,
            (System, NonInitiative) => EafrLabel::Reflection,
        }
    }

    pub fn role(self) -> SpeakerRole {
        match self {
            EafrLabel::Expression | EafrLabel::Feedback => SpeakerRole::User,
            EafrLabel::Action | EafrLabel::Reflection => SpeakerRole::System,
        }
    }

    pub fn initiative(self) -> InitiativeType {
        match self {
            EafrLabel::Expression | EafrLabel::Action => InitiativeType::Initiative,
            EafrLabel::Feedback | EafrLabel::Reflection => InitiativeType::NonInitiative,
        }
    }
}

/// Negative emotion intensity on the 1 (mild) to 5 (severe) scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct EmotionIntensity(u8);

impl EmotionIntensity {
    pub const MIN: u8 = 1;
    pub const MAX: u8 = 5;

    pub fn new(level: i64) -> Result<Self, CorpusError> {
        if (Self::MIN as i64..=Self::MAX as i64).contains(&level) {
            Ok(EmotionIntensity(level as u8))
        } else {
            Err(CorpusError::IntensityOutOfRange(level))
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for EmotionIntensity {
    type Error = CorpusError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        EmotionIntensity::new(v)
    }
}

impl From<EmotionIntensity> for i64 {
    fn from(e: EmotionIntensity) -> i64 {
        e.0 as i64
    }
}

impl fmt::Display for EmotionIntensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub index: usize,
    pub text: String,
    pub role: SpeakerRole,
    pub initiative: Option<InitiativeType>,
    /// Only user-side intensities feed the metrics; system-side values are kept verbatim.
    pub intensity: Option<EmotionIntensity>,
    pub strategy: Option<String>,
}

impl Utterance {
    pub fn new(index: usize, role: SpeakerRole, text: impl Into<String>) -> Self {
        Utterance {
            index,
            text: text.into(),
            role,
            initiative: None,
            intensity: None,
            strategy: None,
        }
    }

    pub fn with_initiative(mut self, t: InitiativeType) -> Self {
        self.initiative = Some(t);
        self
    }

    pub fn with_intensity(mut self, e: EmotionIntensity) -> Self {
        self.intensity = Some(e);
        self
    }

    pub fn with_strategy(mut self, s: impl Into<String>) -> Self {
        self.strategy = Some(s.into());
        self
    }

    pub fn is_user(&self) -> bool {
        self.role == SpeakerRole::User
    }

    pub fn is_system(&self) -> bool {
        self.role == SpeakerRole::System
    }
}

/// EAFR label of an utterance; `None` when its initiative is unannotated.
pub fn eafr_label(u: &Utterance) -> Option<EafrLabel> {
    u.initiative.map(|t| EafrLabel::from_parts(u.role, t))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub id: String,
    pub situation: String,
    pub utterances: Vec<Utterance>,
}

impl Dialogue {
    /// Builds a dialogue, renumbering utterance indices by position.
    pub fn new(
        id: impl Into<String>,
        situation: impl Into<String>,
        mut utterances: Vec<Utterance>,
    ) -> Result<Self, CorpusError> {
        let id = id.into();
        if utterances.is_empty() {
            return Err(CorpusError::Dialogue {
                dialogue: id,
                reason: "dialogue has no utterances".into(),
            });
        }
        for (i, u) in utterances.iter_mut().enumerate() {
            u.index = i;
        }
        Ok(Dialogue {
            id,
            situation: situation.into(),
            utterances,
        })
    }

    pub fn len(&self) -> usize {
        self.utterances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.utterances.is_empty()
    }

    pub fn system_utterances(&self) -> impl Iterator<Item = &Utterance> {
        self.utterances.iter().filter(|u| u.is_system())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub name: String,
    pub dialogues: Vec<Dialogue>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, dialogues: Vec<Dialogue>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for d in &dialogues {
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
        Ok(Corpus {
            name: name.into(),
            dialogues,
        })
    }

    pub fn utterance_count(&self) -> usize {
        self.dialogues.iter().map(Dialogue::len).sum()
    }

    pub fn get(&self, id: &str) -> Option<&Dialogue> {
        self.dialogues.iter().find(|d| d.id == id)
    }

    /// Dialogues of `self` followed by those of `other`; ids must stay unique.
    pub fn concat(&self, other: &Corpus) -> Result<Corpus, CorpusError> {
        let mut all = self.dialogues.clone();
        all.extend(other.dialogues.iter().cloned());
        Corpus::new(format!("{}+{}", self.name, other.name), all)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorpusFormat {
    #[default]
    Native,
    EsConv,
}

impl FromStr for CorpusFormat {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" => Ok(CorpusFormat::Native),
            "esconv" => Ok(CorpusFormat::EsConv),
            other => Err(CorpusError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_corpus(&text, format, &default_name)
}

/// Parses corpus JSON held in memory. `default_name` is used when the
/// document does not carry a name of its own.
pub fn parse_corpus(
    text: &str,
    format: CorpusFormat,
    default_name: &str,
) -> Result<Corpus, CorpusError> {
    let doc: Value = serde_json::from_str(text)?;
    match format {
        CorpusFormat::Native => parse_native(doc, default_name),
        CorpusFormat::EsConv => parse_esconv(doc, default_name),
    }
}

#[derive(Deserialize)]
struct RawUtterance {
    text: Option<String>,
    role: Option<String>,
    initiative: Option<String>,
    intensity: Option<i64>,
    strategy: Option<String>,
}

fn parse_native(doc: Value, default_name: &str) -> Result<Corpus, CorpusError> {
    let Value::Object(mut top) = doc else {
        return Err(CorpusError::Layout("top level must be an object".into()));
    };
    let name = match top.remove("name") {
        Some(Value::String(s)) => s,
        None | Some(Value::Null) => default_name.to_string(),
        Some(_) => return Err(CorpusError::Layout("\"name\" must be a string".into())),
    };
    let Some(Value::Array(raw_dialogues)) = top.remove("dialogues") else {
        return Err(CorpusError::Layout("missing \"dialogues\" array".into()));
    };
    let mut dialogues = Vec::with_capacity(raw_dialogues.len());
    for (pos, raw) in raw_dialogues.into_iter().enumerate() {
        let Value::Object(mut obj) = raw else {
            return Err(CorpusError::Layout(format!("dialogue #{pos} is not an object")));
        };
        let id = match obj.remove("id") {
            Some(Value::String(s)) => s,
            Some(Value::Number(n)) => n.to_string(),
            _ => {
                return Err(CorpusError::Layout(format!(
                    "dialogue #{pos} has no string \"id\""
                )))
            }
        };
        let situation = match obj.remove("situation") {
            Some(Value::String(s)) => s,
            None | Some(Value::Null) => String::new(),
            Some(_) => {
                return Err(CorpusError::Dialogue {
                    dialogue: id,
                    reason: "\"situation\" must be a string".into(),
                })
            }
        };
        let Some(Value::Array(raw_utts)) = obj.remove("utterances") else {
            return Err(CorpusError::Dialogue {
                dialogue: id,
                reason: "missing \"utterances\" array".into(),
            });
        };
        let mut utterances = Vec::with_capacity(raw_utts.len());
        for (i, v) in raw_utts.into_iter().enumerate() {
            let raw: RawUtterance =
                serde_json::from_value(v).map_err(|e| CorpusError::Utterance {
                    dialogue: id.clone(),
                    utterance: i,
                    reason: e.to_string(),
                })?;
            utterances.push(convert_utterance(&id, i, raw)?);
        }
        dialogues.push(Dialogue::new(id, situation, utterances)?);
    }
    Corpus::new(name, dialogues)
}

fn convert_utterance(dialogue: &str, i: usize, raw: RawUtterance) -> Result<Utterance, CorpusError> {
    let ctx = |e: CorpusError| CorpusError::Utterance {
        dialogue: dialogue.to_string(),
        utterance: i,
        reason: e.to_string(),
    };
    let missing = |field: &str| CorpusError::Utterance {
        dialogue: dialogue.to_string(),
        utterance: i,
        reason: format!("missing \"{field}\""),
    };
    let text = raw.text.ok_or_else(|| missing("text"))?;
    let role: SpeakerRole = raw.role.ok_or_else(|| missing("role"))?.parse().map_err(ctx)?;
    let initiative = raw
        .initiative
        .map(|s| s.parse::<InitiativeType>())
        .transpose()
        .map_err(ctx)?;
    let intensity = raw.intensity.map(EmotionIntensity::new).transpose().map_err(ctx)?;
    Ok(Utterance {
        index: i,
        text,
        role,
        initiative,
        intensity,
        strategy: raw.strategy,
    })
}

#[derive(Deserialize)]
struct RawEsConvTurn {
    speaker: Option<String>,
    content: Option<String>,
    #[serde(default)]
    annotation: Option<RawEsConvAnnotation>,
    initiative: Option<String>,
    intensity: Option<i64>,
}

#[derive(Deserialize)]
struct RawEsConvAnnotation {
    strategy: Option<String>,
}

fn parse_esconv(doc: Value, default_name: &str) -> Result<Corpus, CorpusError> {
    let Value::Array(raw_dialogues) = doc else {
        return Err(CorpusError::Layout(
            "ESConv layout expects a top-level array of dialogues".into(),
        ));
    };
    let mut dialogues = Vec::with_capacity(raw_dialogues.len());
    for (pos, raw) in raw_dialogues.into_iter().enumerate() {
        let Value::Object(mut obj) = raw else {
            return Err(CorpusError::Layout(format!("dialogue #{pos} is not an object")));
        };
        let id = match obj.remove("id") {
            Some(Value::String(s)) => s,
            Some(Value::Number(n)) => n.to_string(),
            _ => format!("esconv-{pos}"),
        };
        let situation = match obj.remove("situation") {
            Some(Value::String(s)) => s,
            _ => String::new(),
        };
        let Some(Value::Array(turns)) = obj.remove("dialog") else {
            return Err(CorpusError::Dialogue {
                dialogue: id,
                reason: "missing \"dialog\" array".into(),
            });
        };
        let mut utterances = Vec::with_capacity(turns.len());
        for (i, v) in turns.into_iter().enumerate() {
            let turn: RawEsConvTurn =
                serde_json::from_value(v).map_err(|e| CorpusError::Utterance {
                    dialogue: id.clone(),
                    utterance: i,
                    reason: e.to_string(),
                })?;
            let role = match turn.speaker.as_deref() {
                Some("seeker") | Some("usr") => "user",
                Some("supporter") | Some("sys") => "system",
                Some(other) => other,
                None => {
                    return Err(CorpusError::Utterance {
                        dialogue: id.clone(),
                        utterance: i,
                        reason: "missing \"speaker\"".into(),
                    })
                }
            };
            let raw = RawUtterance {
                text: turn.content,
                role: Some(role.to_string()),
                initiative: turn.initiative,
                intensity: turn.intensity,
                strategy: turn.annotation.and_then(|a| a.strategy),
            };
            utterances.push(convert_utterance(&id, i, raw)?);
        }
        dialogues.push(Dialogue::new(id, situation, utterances)?);
    }
    Corpus::new(default_name, dialogues)
}

#[derive(Serialize)]
struct NativeCorpusOut<'a> {
    name: &'a str,
    dialogues: Vec<NativeDialogueOut<'a>>,
}

#[derive(Serialize)]
struct NativeDialogueOut<'a> {
    id: &'a str,
    situation: &'a str,
    utterances: Vec<NativeUtteranceOut<'a>>,
}

#[derive(Serialize)]
struct NativeUtteranceOut<'a> {
    text: &'a str,
    role: SpeakerRole,
    #[serde(skip_serializing_if = "Option::is_none")]
    initiative: Option<InitiativeType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intensity: Option<EmotionIntensity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<&'a str>,
}

/// Serializes a corpus in the native layout (pretty-printed JSON).
pub fn corpus_to_json(c: &Corpus) -> String {
    let out = NativeCorpusOut {
        name: &c.name,
        dialogues: c
            .dialogues
            .iter()
            .map(|d| NativeDialogueOut {
                id: &d.id,
                situation: &d.situation,
                utterances: d
                    .utterances
                    .iter()
                    .map(|u| NativeUtteranceOut {
                        text: &u.text,
                        role: u.role,
                        initiative: u.initiative,
                        intensity: u.intensity,
                        strategy: u.strategy.as_deref(),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&out).expect("corpus serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_corpus_loads() {
        let json = r#"{"name":"mini","dialogues":[{"id":"d1","situation":"s",
            "utterances":[{"text":"hi","role":"user"},{"text":"hello","role":"system"}]}]}"#;
        let c = parse_corpus(json, CorpusFormat::Native, "x").unwrap();
        assert_eq!(c.name, "mini");
        let d = &c.dialogues[0];
        assert_eq!(d.len(), 2);
        assert_eq!(
            d.utterances.iter().map(|u| u.role).collect::<Vec<_>>(),
            vec![SpeakerRole::User, SpeakerRole::System]
        );
        assert_eq!(d.utterances[1].index, 1);
    }

    #[test]
    fn missing_text_names_dialogue() {
        let json = r#"{"dialogues":[{"id":"abc","utterances":[{"role":"user"}]}]}"#;
        let err = parse_corpus(json, CorpusFormat::Native, "x").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("abc") && msg.contains("text"), "{msg}");
        assert!(matches!(err, CorpusError::Utterance { utterance: 0, .. }));
    }

    #[test]
    fn unknown_role_rejected() {
        let json = r#"{"dialogues":[{"id":"d","utterances":[{"text":"x","role":"bot"}]}]}"#;
        let err = parse_corpus(json, CorpusFormat::Native, "x").unwrap_err();
        assert!(err.to_string().contains("bot"));
    }

    #[test]
    fn intensity_range_enforced() {
        let json =
            r#"{"dialogues":[{"id":"d","utterances":[{"text":"x","role":"user","intensity":6}]}]}"#;
        assert!(parse_corpus(json, CorpusFormat::Native, "x").is_err());
        assert!(EmotionIntensity::new(0).is_err());
        assert_eq!(EmotionIntensity::new(5).unwrap().level(), 5);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let json = r#"{"dialogues":[
            {"id":"d","utterances":[{"text":"x","role":"user"}]},
            {"id":"d","utterances":[{"text":"y","role":"user"}]}]}"#;
        assert!(matches!(
            parse_corpus(json, CorpusFormat::Native, "x"),
            Err(CorpusError::DuplicateId(_))
        ));
    }

    #[test]
    fn empty_dialogue_rejected() {
        let json = r#"{"dialogues":[{"id":"d","utterances":[]}]}"#;
        assert!(parse_corpus(json, CorpusFormat::Native, "x").is_err());
    }

    #[test]
    fn esconv_adapter_maps_fields() {
        let json = r#"[{"situation":"lost job","dialog":[
            {"speaker":"supporter","content":"Hello","annotation":{"strategy":"Question"}},
            {"speaker":"seeker","content":"I lost my job","annotation":{},"intensity":4,"initiative":"init"}]}]"#;
        let c = parse_corpus(json, CorpusFormat::EsConv, "esconv").unwrap();
        let d = &c.dialogues[0];
        assert_eq!(d.id, "esconv-0");
        assert_eq!(d.situation, "lost job");
        assert_eq!(d.utterances[0].role, SpeakerRole::System);
        assert_eq!(d.utterances[0].strategy.as_deref(), Some("Question"));
        assert_eq!(d.utterances[1].intensity.map(|e| e.level()), Some(4));
        assert_eq!(
            eafr_label(&d.utterances[1]),
            Some(EafrLabel::Expression)
        );
    }

    #[test]
    fn eafr_mapping() {
        let u = Utterance::new(0, SpeakerRole::System, "x").with_initiative(InitiativeType::Initiative);
        assert_eq!(eafr_label(&u), Some(EafrLabel::Action));
        let u = Utterance::new(0, SpeakerRole::User, "x").with_initiative(InitiativeType::NonInitiative);
        assert_eq!(eafr_label(&u), Some(EafrLabel::Feedback));
        let u = Utterance::new(0, SpeakerRole::User, "x");
        assert_eq!(eafr_label(&u), None);
    }

    #[test]
    fn eafr_is_bijective() {
        let mut seen = HashSet::new();
        for role in [SpeakerRole::User, SpeakerRole::System] {
            for t in [InitiativeType::Initiative, InitiativeType::NonInitiative] {
                let l = EafrLabel::from_parts(role, t);
                assert_eq!((l.role(), l.initiative()), (role, t));
                seen.insert(l);
            }
        }
        assert_eq!(seen.len(), 4);
    }
}
