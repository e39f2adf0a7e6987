//! Terms over the signature `{*, \, /}`.
//!
//! Terms are written fully parenthesized: every compound subterm carries its
//! own pair of parentheses, so `(x*(x\y))` is a term while `x*y` is not. There
//! is no operator precedence to remember.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Variable alphabet, in the order used to index assignments.
pub const ALPHABET: [char; 6] = ['x', 'y', 'z', 'u', 'v', 'w'];

/// A variable drawn from [`ALPHABET`].
///
/// Ordering is alphabetical on the letter (`u < v < w < x < y < z`), which is
/// the order used when enumerating assignments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(char);

impl Var {
    pub const X: Var = Var('x');
    pub const Y: Var = Var('y');
    pub const Z: Var = Var('z');

    pub fn new(name: char) -> Option<Var> {
        ALPHABET.contains(&name).then_some(Var(name))
    }

    pub fn name(self) -> char {
        self.0
    }

    /// Slot of this variable in [`ALPHABET`].
    pub fn slot(self) -> usize {
        ALPHABET.iter().position(|&c| c == self.0).expect("variable outside alphabet")
    }

    pub fn all() -> impl Iterator<Item = Var> {
        ALPHABET.iter().map(|&c| Var(c))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The three binary operation symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Op {
    /// Multiplication `x*y`.
    Mul,
    /// Left division `x\y`.
    LDiv,
    /// Right division `x/y`.
    RDiv,
}

impl Op {
    pub const ALL: [Op; 3] = [Op::Mul, Op::LDiv, Op::RDiv];

    pub fn ascii(self) -> char {
        match self {
            Op::Mul => '*',
            Op::LDiv => '\\',
            Op::RDiv => '/',
        }
    }

    pub fn unicode(self) -> char {
        match self {
            Op::Mul => '·',
            Op::LDiv => '\\',
            Op::RDiv => '/',
        }
    }

    fn from_char(c: char) -> Option<Op> {
        match c {
            '*' | '·' => Some(Op::Mul),
            '\\' => Some(Op::LDiv),
            '/' => Some(Op::RDiv),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Op, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn app(op: Op, left: Term, right: Term) -> Term {
        Term::App(op, Box::new(left), Box::new(right))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(left: Term, right: Term) -> Term {
        Term::app(Op::Mul, left, right)
    }

    pub fn ldiv(left: Term, right: Term) -> Term {
        Term::app(Op::LDiv, left, right)
    }

    pub fn rdiv(left: Term, right: Term) -> Term {
        Term::app(Op::RDiv, left, right)
    }

    pub fn parse(text: &str) -> Result<Term, ParseError> {
        parse_term(text)
    }

    /// Distinct variables of the term, sorted.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => out.push(*v),
            Term::App(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    /// Every valid position of the term, in pre-order.
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Vec<Step>, out: &mut Vec<Position>) {
        out.push(Position(path.clone()));
        if let Term::App(_, l, r) = self {
            path.push(Step::Left);
            l.collect_positions(path, out);
            path.pop();
            path.push(Step::Right);
            r.collect_positions(path, out);
            path.pop();
        }
    }

    pub fn substitute(&self, s: &Substitution) -> Term {
        substitute(self, s)
    }

    pub fn subterm_at(&self, p: &Position) -> Result<&Term, PositionError> {
        subterm_at(self, p)
    }

    pub fn replace_at(&self, p: &Position, r: Term) -> Result<Term, PositionError> {
        replace_at(self, p, r)
    }

    /// Pretty form using `·` for multiplication; documentation only, the
    /// parser reads it back but files and the CLI use the ASCII form.
    pub fn unicode(&self) -> String {
        let mut s = String::new();
        self.write_with(&mut s, Op::unicode);
        s
    }

    fn write_with(&self, out: &mut String, sym: fn(Op) -> char) {
        match self {
            Term::Var(v) => out.push(v.0),
            Term::App(op, l, r) => {
                out.push('(');
                l.write_with(out, sym);
                out.push(sym(*op));
                r.write_with(out, sym);
                out.push(')');
            }
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Term {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_with(&mut s, Op::ascii);
        f.write_str(&s)
    }
}

impl FromStr for Term {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Term, ParseError> {
        parse_term(s)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Term, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_term(&text).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: {kind}")]
pub struct ParseError {
    /// Zero-based character offset into the input.
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(char),
    #[error("expected an operand, found `{0}`")]
    MissingOperand(char),
    #[error("expected an operator, found `{0}`")]
    MissingOperator(char),
    #[error("expected `)`, found `{0}`")]
    Unbalanced(char),
    #[error("compound terms must be parenthesized")]
    Unparenthesized,
    #[error("trailing input `{0}`")]
    Trailing(char),
}

/// Parses a fully parenthesized term.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(t),
        Some((col, c)) if Op::from_char(c).is_some() => Err(ParseError {
            column: col,
            kind: ParseErrorKind::Unparenthesized,
        }),
        Some((col, ')')) => Err(ParseError {
            column: col,
            kind: ParseErrorKind::Trailing(')'),
        }),
        Some((col, c)) => Err(ParseError {
            column: col,
            kind: ParseErrorKind::Trailing(c),
        }),
    }
}

struct Parser {
    chars: Vec<char>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Parser {
        Parser {
            chars: text.chars().collect(),
            at: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.at < self.chars.len() && self.chars[self.at].is_whitespace() {
            self.at += 1;
        }
    }

    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.at).map(|&c| (self.at, c))
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            column: self.at,
            kind,
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.skip_ws();
        let Some((_, c)) = self.peek() else {
            return Err(self.err(ParseErrorKind::UnexpectedEnd));
        };
        if c == '(' {
            self.at += 1;
            let left = self.term()?;
            self.skip_ws();
            let op = match self.peek() {
                None => return Err(self.err(ParseErrorKind::UnexpectedEnd)),
                Some((_, c)) => match Op::from_char(c) {
                    Some(op) => op,
                    None if c == ')' || Var::new(c).is_some() || c == '(' => {
                        return Err(self.err(ParseErrorKind::MissingOperator(c)))
                    }
                    None => return Err(self.err(ParseErrorKind::UnknownSymbol(c))),
                },
            };
            self.at += 1;
            let right = self.term()?;
            self.skip_ws();
            match self.peek() {
                Some((_, ')')) => {
                    self.at += 1;
                    Ok(Term::app(op, left, right))
                }
                Some((_, c)) if Op::from_char(c).is_some() => {
                    Err(self.err(ParseErrorKind::Unparenthesized))
                }
                Some((_, c)) => Err(self.err(ParseErrorKind::Unbalanced(c))),
                None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
            }
        } else if let Some(v) = Var::new(c) {
            self.at += 1;
            Ok(Term::Var(v))
        } else if Op::from_char(c).is_some() || c == ')' {
            Err(self.err(ParseErrorKind::MissingOperand(c)))
        } else {
            Err(self.err(ParseErrorKind::UnknownSymbol(c)))
        }
    }
}

// ---------------------------------------------------------------------------
// Positions

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Left,
    Right,
}

impl Step {
    pub fn flip(self) -> Step {
        match self {
            Step::Left => Step::Right,
            Step::Right => Step::Left,
        }
    }
}

impl Serialize for Step {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(match self {
            Step::Left => "L",
            Step::Right => "R",
        })
    }
}

impl<'de> Deserialize<'de> for Step {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Step, D::Error> {
        match String::deserialize(deserializer)?.as_str() {
            "L" => Ok(Step::Left),
            "R" => Ok(Step::Right),
            other => Err(serde::de::Error::custom(format!(
                "position step must be \"L\" or \"R\", got {other:?}"
            ))),
        }
    }
}

/// Path from the root; the empty path is the root itself.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<Step>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn steps(&self) -> &[Step] {
        &self.0
    }
}

impl From<Vec<Step>> for Position {
    fn from(steps: Vec<Step>) -> Position {
        Position(steps)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(match s {
                Step::Left => "L",
                Step::Right => "R",
            })?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("position {position} is not valid: step {depth} descends into a variable")]
pub struct PositionError {
    pub position: Position,
    pub depth: usize,
}

pub fn subterm_at<'t>(t: &'t Term, p: &Position) -> Result<&'t Term, PositionError> {
    let mut cur = t;
    for (depth, step) in p.0.iter().enumerate() {
        match cur {
            Term::App(_, l, r) => {
                cur = match step {
                    Step::Left => l,
                    Step::Right => r,
                }
            }
            Term::Var(_) => {
                return Err(PositionError {
                    position: p.clone(),
                    depth,
                })
            }
        }
    }
    Ok(cur)
}

pub fn replace_at(t: &Term, p: &Position, r: Term) -> Result<Term, PositionError> {
    fn go(t: &Term, steps: &[Step], r: Term, depth: usize, p: &Position) -> Result<Term, PositionError> {
        let Some((first, rest)) = steps.split_first() else {
            return Ok(r);
        };
        match t {
            Term::App(op, a, b) => Ok(match first {
                Step::Left => Term::app(*op, go(a, rest, r, depth + 1, p)?, (**b).clone()),
                Step::Right => Term::app(*op, (**a).clone(), go(b, rest, r, depth + 1, p)?),
            }),
            Term::Var(_) => Err(PositionError {
                position: p.clone(),
                depth,
            }),
        }
    }
    go(t, &p.0, r, 0, p)
}

// ---------------------------------------------------------------------------
// Substitutions

/// Finite map from variables to terms; unmapped variables stay put.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn with(mut self, v: Var, t: Term) -> Substitution {
        self.0.insert(v, t);
        self
    }

    pub fn insert(&mut self, v: Var, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.0.get(&v)
    }

    /// Image of `v`, which is `v` itself when unmapped.
    pub fn apply_var(&self, v: Var) -> Term {
        self.0.get(&v).cloned().unwrap_or(Term::Var(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.0.iter().map(|(v, t)| (*v, t))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `then`: applying the result equals applying `self`
    /// and then `then`.
    pub fn compose(&self, then: &Substitution) -> Substitution {
        let mut out = BTreeMap::new();
        for (v, t) in &self.0 {
            out.insert(*v, substitute(t, then));
        }
        for (v, t) in &then.0 {
            out.entry(*v).or_insert_with(|| t.clone());
        }
        Substitution(out)
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Substitution {
        Substitution(iter.into_iter().collect())
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_char(self.0)
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Var, D::Error> {
        let s = String::deserialize(deserializer)?;
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => {
                Var::new(c).ok_or_else(|| serde::de::Error::custom(format!("unknown variable `{c}`")))
            }
            _ => Err(serde::de::Error::custom(format!("bad variable name {s:?}"))),
        }
    }
}

/// Simultaneous replacement of variables.
pub fn substitute(t: &Term, s: &Substitution) -> Term {
    match t {
        Term::Var(v) => s.apply_var(*v),
        Term::App(op, l, r) => Term::app(*op, substitute(l, s), substitute(r, s)),
    }
}

// ---------------------------------------------------------------------------
// Assignments and evaluation

/// Variables mapped to carrier elements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment([Option<usize>; ALPHABET.len()]);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn with(mut self, v: Var, value: usize) -> Assignment {
        self.set(v, value);
        self
    }

    pub fn set(&mut self, v: Var, value: usize) {
        self.0[v.slot()] = Some(value);
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.0[v.slot()]
    }

    /// Bound variables in alphabetical order.
    pub fn bindings(&self) -> Vec<(Var, usize)> {
        let mut out: Vec<_> = Var::all().filter_map(|v| self.get(v).map(|e| (v, e))).collect();
        out.sort();
        out
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, e)) in self.bindings().into_iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={e}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Assignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, usize> = self
            .bindings()
            .into_iter()
            .map(|(v, e)| (v.to_string(), e))
            .collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Assignment, D::Error> {
        let map = BTreeMap::<Var, usize>::deserialize(deserializer)?;
        let mut a = Assignment::new();
        for (v, e) in map {
            a.set(v, e);
        }
        Ok(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not assigned")]
    Unassigned(Var),
    #[error("element {value} is outside the carrier 0..{n}")]
    OutOfRange { value: usize, n: usize },
}

/// Anything that can interpret the three operation symbols on `0..n`.
pub trait Interpretation {
    fn order(&self) -> usize;
    fn apply(&self, op: Op, a: usize, b: usize) -> usize;
}

/// Evaluates `t` by recursive table lookup.
pub fn evaluate<I: Interpretation + ?Sized>(t: &Term, alg: &I, a: &Assignment) -> Result<usize, EvalError> {
    let n = alg.order();
    match t {
        Term::Var(v) => {
            let value = a.get(*v).ok_or(EvalError::Unassigned(*v))?;
            if value >= n {
                return Err(EvalError::OutOfRange { value, n });
            }
            Ok(value)
        }
        Term::App(op, l, r) => {
            let lv = evaluate(l, alg, a)?;
            let rv = evaluate(r, alg, a)?;
            Ok(alg.apply(*op, lv, rv))
        }
    }
}
