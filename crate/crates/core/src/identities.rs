//! The six Birkhoff identities and satisfaction checking on finite algebras.
//!
//! Canonical tags, in their fixed order:
//!
//! | tag | identity            |
//! |-----|---------------------|
//! | A   | `x*(x\y) = y`       |
//! | C   | `(y/x)*x = y`       |
//! | B   | `x\(x*y) = y`       |
//! | D   | `(y*x)/x = y`       |
//! | T   | `x/(y\x) = y`       |
//! | R   | `(x/y)\x = y`       |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::terms::{evaluate, parse_term, Assignment, Interpretation, ParseError, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    A,
    C,
    B,
    D,
    T,
    R,
}

impl Tag {
    /// All tags in canonical order.
    pub const ALL: [Tag; 6] = [Tag::A, Tag::C, Tag::B, Tag::D, Tag::T, Tag::R];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Tag::A => 'A',
            Tag::C => 'C',
            Tag::B => 'B',
            Tag::D => 'D',
            Tag::T => 'T',
            Tag::R => 'R',
        }
    }

    pub fn from_letter(c: char) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.letter() == c)
    }

    fn sides(self) -> (&'static str, &'static str) {
        match self {
            Tag::A => ("(x*(x\\y))", "y"),
            Tag::C => ("((y/x)*x)", "y"),
            Tag::B => ("(x\\(x*y))", "y"),
            Tag::D => ("((y*x)/x)", "y"),
            Tag::T => ("(x/(y\\x))", "y"),
            Tag::R => ("((x/y)\\x)", "y"),
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("unknown identity tag `{0}`")]
    Unknown(String),
}

impl FromStr for Tag {
    type Err = TagError;

    fn from_str(s: &str) -> Result<Tag, TagError> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Tag::from_letter(c).ok_or_else(|| TagError::Unknown(s.to_string())),
            _ => Err(TagError::Unknown(s.to_string())),
        }
    }
}

impl Serialize for Tag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Tag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Tag, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A subset of the six canonical tags, stored as a 6-bit mask
/// (bit `i` is `Tag::ALL[i]`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdentitySet(u8);

impl IdentitySet {
    pub const EMPTY: IdentitySet = IdentitySet(0);
    pub const ALL: IdentitySet = IdentitySet(0b11_1111);

    pub fn from_mask(mask: u8) -> Option<IdentitySet> {
        (mask <= Self::ALL.0).then_some(IdentitySet(mask))
    }

    pub fn mask(self) -> u8 {
        self.0
    }

    pub const fn of(tags: &[Tag]) -> IdentitySet {
        let mut mask = 0u8;
        let mut i = 0;
        while i < tags.len() {
            mask |= 1 << tags[i] as u8;
            i += 1;
        }
        IdentitySet(mask)
    }

    /// All 64 subsets in mask order.
    pub fn all_subsets() -> impl Iterator<Item = IdentitySet> {
        (0..=Self::ALL.0).map(IdentitySet)
    }

    pub fn contains(self, t: Tag) -> bool {
        self.0 & (1 << t.index()) != 0
    }

    pub fn insert(&mut self, t: Tag) -> bool {
        let had = self.contains(t);
        self.0 |= 1 << t.index();
        !had
    }

    pub fn with(mut self, t: Tag) -> IdentitySet {
        self.insert(t);
        self
    }

    pub fn is_subset(self, other: IdentitySet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: IdentitySet) -> IdentitySet {
        IdentitySet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_all(self) -> bool {
        self == Self::ALL
    }

    /// Members in canonical order.
    pub fn tags(self) -> impl Iterator<Item = Tag> {
        Tag::ALL.into_iter().filter(move |t| self.contains(*t))
    }

    /// Tags outside the set, in canonical order.
    pub fn complement(self) -> impl Iterator<Item = Tag> {
        Tag::ALL.into_iter().filter(move |t| !self.contains(*t))
    }

    /// Letters in canonical order, e.g. `"ACBD"`; empty set is `""`.
    pub fn letters(self) -> String {
        self.tags().map(Tag::letter).collect()
    }

    /// Parses a string of tag letters such as `"ACBD"`. Order is irrelevant;
    /// repeated letters and `-` (the empty set) are accepted.
    pub fn parse_letters(s: &str) -> Result<IdentitySet, TagError> {
        let s = s.trim();
        if s == "-" {
            return Ok(IdentitySet::EMPTY);
        }
        s.chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| Tag::from_letter(c).ok_or_else(|| TagError::Unknown(c.to_string())))
            .collect()
    }
}

impl FromIterator<Tag> for IdentitySet {
    fn from_iter<I: IntoIterator<Item = Tag>>(iter: I) -> IdentitySet {
        let mut s = IdentitySet::EMPTY;
        for t in iter {
            s.insert(t);
        }
        s
    }
}

/// Brace form, e.g. `{C,T}`.
impl fmt::Display for IdentitySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, t) in self.tags().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for IdentitySet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.tags())
    }
}

impl<'de> Deserialize<'de> for IdentitySet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<IdentitySet, D::Error> {
        Ok(Vec::<Tag>::deserialize(deserializer)?.into_iter().collect())
    }
}

/// An equation between two terms, optionally labelled.
///
/// The label is either a canonical tag letter or any user string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Identity {
    pub label: Option<String>,
    pub lhs: Term,
    pub rhs: Term,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        Identity { label: None, lhs, rhs }
    }

    pub fn labelled(label: impl Into<String>, lhs: Term, rhs: Term) -> Identity {
        Identity { label: Some(label.into()), lhs, rhs }
    }

    pub fn canonical(tag: Tag) -> Identity {
        let (l, r) = tag.sides();
        Identity {
            label: Some(tag.to_string()),
            lhs: parse_term(l).expect("canonical term"),
            rhs: parse_term(r).expect("canonical term"),
        }
    }

    /// The canonical tag when the label is one.
    pub fn tag(&self) -> Option<Tag> {
        self.label.as_deref().and_then(|l| l.parse().ok())
    }

    /// Distinct variables of both sides, sorted alphabetically.
    pub fn vars(&self) -> Vec<Var> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v.sort();
        v.dedup();
        v
    }

    /// Same equation with the label dropped.
    pub fn unlabelled(&self) -> Identity {
        Identity::new(self.lhs.clone(), self.rhs.clone())
    }

    pub fn parse(text: &str) -> Result<Identity, IdentityParseError> {
        text.parse()
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            write!(f, "{l}: ")?;
        }
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IdentityParseError {
    #[error("identity must have the form `<term> = <term>`")]
    MissingEquals,
    #[error("left-hand side: {0}")]
    Lhs(ParseError),
    #[error("right-hand side: {0}")]
    Rhs(ParseError),
    #[error("empty label before `:`")]
    EmptyLabel,
}

impl FromStr for Identity {
    type Err = IdentityParseError;

    /// `"<term> = <term>"`, optionally prefixed by `"<label>:"`.
    fn from_str(text: &str) -> Result<Identity, IdentityParseError> {
        let (label, body) = match text.split_once(':') {
            Some((l, b)) => {
                let l = l.trim();
                if l.is_empty() {
                    return Err(IdentityParseError::EmptyLabel);
                }
                (Some(l.to_string()), b)
            }
            None => (None, text),
        };
        let (l, r) = body.split_once('=').ok_or(IdentityParseError::MissingEquals)?;
        Ok(Identity {
            label,
            lhs: parse_term(l).map_err(IdentityParseError::Lhs)?,
            rhs: parse_term(r).map_err(IdentityParseError::Rhs)?,
        })
    }
}

impl Serialize for Identity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Identity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Identity, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// The six canonical identities in order A, C, B, D, T, R.
pub fn canonical_identities() -> Vec<Identity> {
    Tag::ALL.into_iter().map(Identity::canonical).collect()
}

/// Iterates all assignments of `vars` into `0..n` in lexicographic order,
/// the first variable being most significant.
pub(crate) fn assignments(vars: &[Var], n: usize) -> impl Iterator<Item = Assignment> + '_ {
    let total = n.checked_pow(vars.len() as u32).expect("assignment space overflows");
    (0..total).map(move |mut k| {
        let mut a = Assignment::new();
        for v in vars.iter().rev() {
            a.set(*v, k % n);
            k /= n;
        }
        a
    })
}

/// Least violating assignment (variables alphabetical, elements ascending),
/// or `None` when the identity holds.
pub fn violating_assignment<I: Interpretation + ?Sized>(id: &Identity, alg: &I) -> Option<Assignment> {
    let vars = id.vars();
    let found = assignments(&vars, alg.order()).find(|a| {
        let l = evaluate(&id.lhs, alg, a).expect("all variables assigned");
        let r = evaluate(&id.rhs, alg, a).expect("all variables assigned");
        l != r
    });
    found
}

/// Exhaustive check over all `n^k` assignments.
pub fn holds<I: Interpretation + ?Sized>(id: &Identity, alg: &I) -> bool {
    violating_assignment(id, alg).is_none()
}

pub fn satisfied_identities(alg: &FiniteAlgebra) -> IdentitySet {
    Tag::ALL
        .into_iter()
        .filter(|&t| holds(&Identity::canonical(t), alg))
        .collect()
}
