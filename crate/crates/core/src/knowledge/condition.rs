//! World assertions in `(subject predicate object)` form.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An identifier matching `[A-Za-z_][A-Za-z0-9_-]*`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(String);

pub type TaskId = Ident;
pub type NodeId = Ident;

impl Ident {
    pub fn new(s: impl Into<String>) -> Result<Self> {
        let s = s.into();
        if Self::is_valid(&s) {
            Ok(Ident(s))
        } else {
            Err(Error::Schema(format!("invalid identifier `{s}`")))
        }
    }

    pub fn is_valid(s: &str) -> bool {
        let mut chars = s.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Ident {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::borrow::Borrow<str> for Ident {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for Ident {
    type Error = Error;
    fn try_from(s: &str) -> Result<Self> {
        Ident::new(s)
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Ident {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ident::new(s).map_err(de::Error::custom)
    }
}

/// Object position of a condition.
///
/// Booleans compare case-insensitively at parse time (both `true` and
/// `"True"` become `Bool(true)`), numbers compare by value and identifiers
/// compare case-sensitively.
#[derive(Debug, Clone)]
pub enum Literal {
    Bool(bool),
    Number(f64),
    Ident(Ident),
}

impl Literal {
    /// Canonicalizes a textual object.
    pub fn parse(text: &str) -> Result<Self> {
        if text.eq_ignore_ascii_case("true") {
            return Ok(Literal::Bool(true));
        }
        if text.eq_ignore_ascii_case("false") {
            return Ok(Literal::Bool(false));
        }
        if let Ok(n) = text.trim().parse::<f64>() {
            return Literal::number(n);
        }
        Ident::new(text).map(Literal::Ident)
    }

    pub fn number(n: f64) -> Result<Self> {
        if n.is_finite() {
            // -0.0 and 0.0 must hash alike
            Ok(Literal::Number(if n == 0.0 { 0.0 } else { n }))
        } else {
            Err(Error::Schema(format!("non-finite number {n} in condition")))
        }
    }

    pub fn as_ident(&self) -> Option<&Ident> {
        match self {
            Literal::Ident(id) => Some(id),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Literal::Bool(_) => 0,
            Literal::Number(_) => 1,
            Literal::Ident(_) => 2,
        }
    }
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Literal {}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Literal::Bool(a), Literal::Bool(b)) => a.cmp(b),
            (Literal::Number(a), Literal::Number(b)) => a.total_cmp(b),
            (Literal::Ident(a), Literal::Ident(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Literal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Literal::Bool(b) => b.hash(state),
            Literal::Number(n) => n.to_bits().hash(state),
            Literal::Ident(id) => id.hash(state),
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Number(n) => write!(f, "{n}"),
            Literal::Ident(id) => write!(f, "{id}"),
        }
    }
}

impl From<bool> for Literal {
    fn from(b: bool) -> Self {
        Literal::Bool(b)
    }
}

impl From<Ident> for Literal {
    fn from(id: Ident) -> Self {
        Literal::Ident(id)
    }
}

/// A `(subject predicate object)` triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Condition {
    pub subject: Ident,
    pub predicate: Ident,
    pub object: Literal,
}

pub type ConditionSet = BTreeSet<Condition>;

impl Condition {
    pub fn new(subject: Ident, predicate: Ident, object: Literal) -> Self {
        Condition {
            subject,
            predicate,
            object,
        }
    }

    /// Builds a condition from three textual parts, canonicalizing the object.
    pub fn parse(subject: &str, predicate: &str, object: &str) -> Result<Self> {
        Ok(Condition {
            subject: Ident::new(subject)?,
            predicate: Ident::new(predicate)?,
            object: Literal::parse(object)?,
        })
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.predicate, self.object)
    }
}

/// Two conditions conflict when they share subject and predicate but
/// disagree on the object.
pub fn condition_conflict(c1: &Condition, c2: &Condition) -> bool {
    c1.subject == c2.subject && c1.predicate == c2.predicate && c1.object != c2.object
}

/// True iff some cross pair of the two sets conflicts.
pub fn condition_set_conflict<'a, A, B>(s1: A, s2: B) -> bool
where
    A: IntoIterator<Item = &'a Condition>,
    B: IntoIterator<Item = &'a Condition> + Clone,
{
    first_conflict(s1, s2).is_some()
}

/// The first conflicting cross pair, in iteration order.
pub fn first_conflict<'a, A, B>(s1: A, s2: B) -> Option<(&'a Condition, &'a Condition)>
where
    A: IntoIterator<Item = &'a Condition>,
    B: IntoIterator<Item = &'a Condition> + Clone,
{
    s1.into_iter().find_map(|c1| {
        s2.clone()
            .into_iter()
            .find(|c2| condition_conflict(c1, c2))
            .map(|c2| (c1, c2))
    })
}

// Wire form: ["subject", "predicate", object] with booleans and numbers
// unquoted.
impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(self.subject.as_str())?;
        t.serialize_element(self.predicate.as_str())?;
        match &self.object {
            Literal::Bool(b) => t.serialize_element(b)?,
            Literal::Number(n) => t.serialize_element(n)?,
            Literal::Ident(id) => t.serialize_element(id.as_str())?,
        }
        t.end()
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        d.deserialize_seq(ConditionVisitor)
    }
}

struct ConditionVisitor;

impl<'de> Visitor<'de> for ConditionVisitor {
    type Value = Condition;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a [subject, predicate, object] triple")
    }

    fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Condition, A::Error> {
        let subject: Ident = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(0, &self))?;
        let predicate: Ident = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(1, &self))?;
        let raw: serde_json::Value = seq
            .next_element()?
            .ok_or_else(|| de::Error::invalid_length(2, &self))?;
        if seq.next_element::<serde_json::Value>()?.is_some() {
            return Err(de::Error::invalid_length(4, &self));
        }
        let object = match raw {
            serde_json::Value::Bool(b) => Literal::Bool(b),
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| de::Error::custom("unrepresentable number"))
                .and_then(|n| Literal::number(n).map_err(de::Error::custom))?,
            serde_json::Value::String(s) => Literal::parse(&s).map_err(de::Error::custom)?,
            other => {
                return Err(de::Error::custom(format!(
                    "condition object must be an identifier, boolean or number, got {other}"
                )))
            }
        };
        Ok(Condition {
            subject,
            predicate,
            object,
        })
    }
}
