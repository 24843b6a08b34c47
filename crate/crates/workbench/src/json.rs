//! Canonical JSON text for conditions.
//!
//! Keys come in a fixed order (`kind` first, then the kind's fields), index
//! keys are decimal strings in numeric order, and the text is compact, so
//! parsing and re-serializing reproduces the input byte for byte.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value};
use thiserror::Error;

use semicohen_core::iteration::{Environment, FlatIterCondition, QCondition};
use semicohen_core::product::RCondition;
use semicohen_core::seq::ConditionError;
use semicohen_core::{CohenCondition, Index, Mode, SeqCondition};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected kind `{expected}`, found `{found}`")]
    Kind { expected: &'static str, found: String },
    #[error("unknown kind `{0}`")]
    UnknownKind(String),
    #[error("field `{0}` is missing or has the wrong type")]
    Field(&'static str),
    #[error("`{0}` is not a canonical index")]
    Index(String),
    #[error("{0} is not a value in range")]
    Value(String),
    #[error(transparent)]
    Condition(#[from] ConditionError),
}

/// Every condition kind the workbench reads and writes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyCondition {
    Seq(Mode, SeqCondition),
    Cohen(CohenCondition),
    R(RCondition),
    Q(QCondition),
    Flat(FlatIterCondition),
}

pub trait Canonical: Sized {
    fn to_value(&self) -> Value;

    fn to_json(&self) -> String {
        serde_json::to_string(&self.to_value()).expect("values built here always serialize")
    }
}

fn seq_value(s: &[u32]) -> Value {
    Value::Array(s.iter().map(|&v| Value::from(v)).collect())
}

fn index_map<T>(m: &BTreeMap<Index, T>, f: impl Fn(&T) -> Value) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), f(v))).collect())
}

fn with_kind(kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), Value::from(kind));
    m
}

pub fn seq_to_value(mode: Mode, p: &SeqCondition) -> Value {
    let mut m = with_kind(mode.name());
    m.insert("n".into(), Value::from(p.n()));
    m.insert("entries".into(), index_map(p.entries(), |s| seq_value(s)));
    Value::Object(m)
}

impl Canonical for CohenCondition {
    fn to_value(&self) -> Value {
        let mut m = with_kind("cohen");
        m.insert(
            "entries".into(),
            index_map(self.entries(), |&b| Value::from(u8::from(b))),
        );
        Value::Object(m)
    }
}

impl Canonical for RCondition {
    fn to_value(&self) -> Value {
        let mut m = with_kind("r");
        m.insert("seqs".into(), index_map(self.seqs(), |s| seq_value(s)));
        m.insert("cutoffs".into(), index_map(self.cutoffs(), |&c| Value::from(c)));
        let coder = self
            .coder()
            .iter()
            .map(|(k, &v)| Value::Array(vec![seq_value(k), Value::from(v)]))
            .collect();
        m.insert("coder".into(), Value::Array(coder));
        Value::Object(m)
    }
}

fn q_fields(m: &mut Map<String, Value>, q: &QCondition) {
    m.insert("s".into(), seq_value(&q.s));
    m.insert("a".into(), Value::Array(q.a.iter().map(|&g| Value::from(g)).collect()));
}

impl Canonical for QCondition {
    fn to_value(&self) -> Value {
        let mut m = with_kind("q");
        q_fields(&mut m, self);
        Value::Object(m)
    }
}

impl Canonical for FlatIterCondition {
    fn to_value(&self) -> Value {
        let mut m = with_kind("flat");
        m.insert("n".into(), Value::from(self.n()));
        let entries = index_map(self.entries(), |q| {
            let mut e = Map::new();
            q_fields(&mut e, q);
            Value::Object(e)
        });
        m.insert("entries".into(), entries);
        Value::Object(m)
    }
}

impl Canonical for Environment {
    fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("L".into(), Value::from(self.len()));
        m.insert("tables".into(), index_map(self.tables(), |s| seq_value(s)));
        Value::Object(m)
    }
}

impl Canonical for AnyCondition {
    fn to_value(&self) -> Value {
        match self {
            AnyCondition::Seq(mode, p) => seq_to_value(*mode, p),
            AnyCondition::Cohen(p) => p.to_value(),
            AnyCondition::R(r) => r.to_value(),
            AnyCondition::Q(q) => q.to_value(),
            AnyCondition::Flat(f) => f.to_value(),
        }
    }
}

fn field<'a>(m: &'a Map<String, Value>, name: &'static str) -> Result<&'a Value, FormatError> {
    m.get(name).ok_or(FormatError::Field(name))
}

fn as_u32(v: &Value) -> Result<u32, FormatError> {
    v.as_u64()
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| FormatError::Value(v.to_string()))
}

fn as_usize(v: &Value) -> Result<usize, FormatError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| FormatError::Value(v.to_string()))
}

fn parse_seq(v: &Value, name: &'static str) -> Result<Vec<u32>, FormatError> {
    v.as_array()
        .ok_or(FormatError::Field(name))?
        .iter()
        .map(as_u32)
        .collect()
}

fn parse_index(k: &str) -> Result<Index, FormatError> {
    match k.parse::<Index>() {
        Ok(i) if i.to_string() == k => Ok(i),
        _ => Err(FormatError::Index(k.to_string())),
    }
}

fn parse_index_map<T>(
    v: &Value,
    name: &'static str,
    f: impl Fn(&Value) -> Result<T, FormatError>,
) -> Result<BTreeMap<Index, T>, FormatError> {
    v.as_object()
        .ok_or(FormatError::Field(name))?
        .iter()
        .map(|(k, v)| Ok((parse_index(k)?, f(v)?)))
        .collect()
}

fn parse_q_fields(m: &Map<String, Value>) -> Result<QCondition, FormatError> {
    let s = parse_seq(field(m, "s")?, "s")?;
    let a = field(m, "a")?
        .as_array()
        .ok_or(FormatError::Field("a"))?
        .iter()
        .map(as_u32)
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(QCondition { s, a })
}

pub fn from_value(v: &Value) -> Result<AnyCondition, FormatError> {
    let m = v.as_object().ok_or(FormatError::Field("kind"))?;
    let kind = field(m, "kind")?.as_str().ok_or(FormatError::Field("kind"))?;
    match kind {
        "scale" | "evdiff" => {
            let mode = if kind == "scale" { Mode::Scale } else { Mode::EvDiff };
            let n = as_usize(field(m, "n")?)?;
            let entries = parse_index_map(field(m, "entries")?, "entries", |s| parse_seq(s, "entries"))?;
            Ok(AnyCondition::Seq(mode, SeqCondition::new(entries, n)?))
        }
        "cohen" => {
            let bits = parse_index_map(field(m, "entries")?, "entries", |b| match b.as_u64() {
                Some(0) => Ok(false),
                Some(1) => Ok(true),
                _ => Err(FormatError::Value(b.to_string())),
            })?;
            Ok(AnyCondition::Cohen(CohenCondition::from_bits(bits)))
        }
        "r" => {
            let seqs = parse_index_map(field(m, "seqs")?, "seqs", |s| parse_seq(s, "seqs"))?;
            let cutoffs = parse_index_map(field(m, "cutoffs")?, "cutoffs", as_usize)?;
            let mut coder = BTreeMap::new();
            for pair in field(m, "coder")?.as_array().ok_or(FormatError::Field("coder"))? {
                match pair.as_array().map(Vec::as_slice) {
                    Some([k, v]) => {
                        coder.insert(parse_seq(k, "coder")?, as_u32(v)?);
                    }
                    _ => return Err(FormatError::Field("coder")),
                }
            }
            Ok(AnyCondition::R(RCondition::new(seqs, cutoffs, coder)?))
        }
        "q" => Ok(AnyCondition::Q(parse_q_fields(m)?)),
        "flat" => {
            let n = as_usize(field(m, "n")?)?;
            let entries = parse_index_map(field(m, "entries")?, "entries", |e| {
                parse_q_fields(e.as_object().ok_or(FormatError::Field("entries"))?)
            })?;
            Ok(AnyCondition::Flat(FlatIterCondition::new(entries, n)?))
        }
        other => Err(FormatError::UnknownKind(other.to_string())),
    }
}

pub fn parse(text: &str) -> Result<AnyCondition, FormatError> {
    from_value(&serde_json::from_str(text)?)
}

/// Parses a sequence condition of the given mode.
pub fn parse_seq_condition(text: &str, mode: Mode) -> Result<SeqCondition, FormatError> {
    match parse(text)? {
        AnyCondition::Seq(m, p) if m == mode => Ok(p),
        other => Err(FormatError::Kind {
            expected: mode.name(),
            found: other.to_value()["kind"].as_str().unwrap_or_default().to_string(),
        }),
    }
}

pub fn parse_environment(text: &str) -> Result<Environment, FormatError> {
    let v: Value = serde_json::from_str(text)?;
    let m = v.as_object().ok_or(FormatError::Field("L"))?;
    let len = as_usize(field(m, "L")?)?;
    let tables = parse_index_map(field(m, "tables")?, "tables", |s| parse_seq(s, "tables"))?;
    Ok(Environment::new(len, tables)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_form() {
        let p = SeqCondition::from_entries([(0, vec![1, 3]), (4, vec![0, 2])]).unwrap();
        let text = AnyCondition::Seq(Mode::Scale, p.clone()).to_json();
        assert_eq!(text, r#"{"kind":"scale","n":2,"entries":{"0":[1,3],"4":[0,2]}}"#);
        assert_eq!(parse(&text).unwrap(), AnyCondition::Seq(Mode::Scale, p));
    }

    #[test]
    fn numeric_key_order() {
        let p = SeqCondition::from_entries([(10, vec![1]), (9, vec![0])]).unwrap();
        assert_eq!(
            seq_to_value(Mode::EvDiff, &p).to_string(),
            r#"{"kind":"evdiff","n":1,"entries":{"9":[0],"10":[1]}}"#
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            parse(r#"{"kind":"scale","n":1,"entries":{"01":[1]}}"#),
            Err(FormatError::Index(_))
        ));
        assert!(matches!(
            parse(r#"{"kind":"scale","n":2,"entries":{"0":[1]}}"#),
            Err(FormatError::Condition(_))
        ));
        assert!(matches!(
            parse(r#"{"kind":"cohen","entries":{"0":2}}"#),
            Err(FormatError::Value(_))
        ));
        assert!(matches!(parse(r#"{"kind":"tree"}"#), Err(FormatError::UnknownKind(_))));
        assert!(matches!(
            parse(r#"{"kind":"r","seqs":{},"cutoffs":{},"coder":[[[0],1],[[1],1]]}"#),
            Err(FormatError::Condition(_))
        ));
        assert!(matches!(parse("[1"), Err(FormatError::Json(_))));
        assert!(matches!(
            parse_seq_condition(r#"{"kind":"scale","n":0,"entries":{}}"#, Mode::EvDiff),
            Err(FormatError::Kind { expected: "evdiff", .. })
        ));
    }

    #[test]
    fn other_forms_round_trip() {
        for text in [
            r#"{"kind":"cohen","entries":{"0":1,"2":0}}"#,
            r#"{"kind":"r","seqs":{"0":[1,2]},"cutoffs":{"0":1},"coder":[[[],0],[[1],0],[[1,2],4]]}"#,
            r#"{"kind":"q","s":[3,1],"a":[0,5]}"#,
            r#"{"kind":"flat","n":1,"entries":{"0":{"s":[2],"a":[]},"3":{"s":[4],"a":[0]}}}"#,
            r#"{"kind":"evdiff","n":0,"entries":{}}"#,
        ] {
            assert_eq!(parse(text).unwrap().to_json(), text);
        }
        let env = r#"{"L":2,"tables":{"0":[4,1],"1":[4,1]}}"#;
        assert_eq!(parse_environment(env).unwrap().to_json(), env);
    }
}
