//! Infinite algebras on the integers that separate identity sets where no
//! finite algebra can.
//!
//! The registered witness `example1` has `x*y = floor(x/2) - y`. Its left
//! division is the same formula and its right division is `y/x = 2(x+y)`.
//! It satisfies A, B, C and R but not D or T, so `{A,C,B,R}` does not entail
//! D. On a finite carrier that separation cannot be seen: C makes every
//! right translation surjective, hence bijective, which forces D.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::identities::{Identity, IdentitySet, Tag};
use crate::terms::{Op, Term, Var};

/// `floor(x / 2)`, rounding toward negative infinity.
pub fn half_floor(x: i64) -> i64 {
    x.div_euclid(2)
}

pub fn example1_op(x: i64, y: i64) -> i64 {
    half_floor(x) - y
}

/// The unique `z` with `x * z = y`.
pub fn example1_ldiv(x: i64, y: i64) -> i64 {
    half_floor(x) - y
}

/// One `z` with `z * x = y`; `2(x + y) + 1` would do as well.
pub fn example1_rdiv(y: i64, x: i64) -> i64 {
    2 * (x + y)
}

type IntOp = fn(i64, i64) -> i64;

/// A total algebra on the integers with documented identity behaviour.
#[derive(Clone, Copy)]
pub struct IntegerWitness {
    pub name: &'static str,
    pub op: IntOp,
    pub ldiv: IntOp,
    /// Called as `rdiv(y, x)` for `y/x`.
    pub rdiv: IntOp,
    /// Identities that hold on all of the integers.
    pub satisfies: IdentitySet,
    /// Identities that fail, each with an `(x, y)` witness.
    pub violations: &'static [(Tag, i64, i64)],
}

impl fmt::Debug for IntegerWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntegerWitness")
            .field("name", &self.name)
            .field("satisfies", &self.satisfies)
            .field("violations", &self.violations)
            .finish()
    }
}

impl IntegerWitness {
    pub fn apply(&self, op: Op, a: i64, b: i64) -> i64 {
        match op {
            Op::Mul => (self.op)(a, b),
            Op::LDiv => (self.ldiv)(a, b),
            Op::RDiv => (self.rdiv)(a, b),
        }
    }

    /// Evaluates a term in `x` and `y`. Other variables are not supported.
    pub fn eval(&self, t: &Term, x: i64, y: i64) -> i64 {
        match t {
            Term::Var(v) if *v == Var::X => x,
            Term::Var(v) if *v == Var::Y => y,
            Term::Var(v) => panic!("integer witnesses only bind x and y, found {v}"),
            Term::App(op, l, r) => self.apply(*op, self.eval(l, x, y), self.eval(r, x, y)),
        }
    }

    pub fn violates_at(&self, id: &Identity, x: i64, y: i64) -> bool {
        self.eval(&id.lhs, x, y) != self.eval(&id.rhs, x, y)
    }
}

pub const EXAMPLE1: IntegerWitness = IntegerWitness {
    name: "example1",
    op: example1_op,
    ldiv: example1_ldiv,
    rdiv: example1_rdiv,
    satisfies: IdentitySet::of(&[Tag::A, Tag::C, Tag::B, Tag::R]),
    violations: &[(Tag::D, 0, 1), (Tag::T, 0, 1)],
};

/// `(x, y) -> 0` for every operation; only meaningful on the window `{0}`.
pub const ZERO: IntegerWitness = IntegerWitness {
    name: "zero",
    op: |_, _| 0,
    ldiv: |_, _| 0,
    rdiv: |_, _| 0,
    satisfies: IdentitySet::EMPTY,
    violations: &[],
};

/// All registered witnesses.
pub fn registry() -> &'static [IntegerWitness] {
    &[EXAMPLE1]
}

pub fn lookup(name: &str) -> Option<IntegerWitness> {
    registry().iter().chain([&ZERO]).find(|w| w.name == name).copied()
}

/// A registered witness refuting `premises |- goal`, if any.
pub fn refuting_witness(premises: IdentitySet, goal: Tag) -> Option<&'static IntegerWitness> {
    registry().iter().find(|w| {
        premises.is_subset(w.satisfies) && w.violations.iter().any(|(t, _, _)| *t == goal)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WindowStatus {
    HeldOnWindow,
    Violated { x: i64, y: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub tag: Tag,
    #[serde(flatten)]
    pub status: WindowStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub witness: String,
    pub window: i64,
    pub identities: Vec<IdentityCheck>,
}

impl WitnessReport {
    pub fn status(&self, tag: Tag) -> WindowStatus {
        self.identities.iter().find(|c| c.tag == tag).expect("all six checked").status
    }

    pub fn held(&self) -> IdentitySet {
        self.identities
            .iter()
            .filter(|c| c.status == WindowStatus::HeldOnWindow)
            .map(|c| c.tag)
            .collect()
    }
}

impl fmt::Display for WitnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "witness {} on |x|,|y| <= {}", self.witness, self.window)?;
        writeln!(f, "{:<4} {:<22} status", "id", "identity")?;
        for c in &self.identities {
            let id = Identity::canonical(c.tag);
            let shown = format!("{} = {}", id.lhs, id.rhs);
            match c.status {
                WindowStatus::HeldOnWindow => writeln!(f, "{:<4} {:<22} held on window", c.tag, shown)?,
                WindowStatus::Violated { x, y } => {
                    writeln!(f, "{:<4} {:<22} violated at (x={x}, y={y})", c.tag, shown)?
                }
            }
        }
        Ok(())
    }
}

/// The window `-window..=window` ordered by `|v|`, positives first:
/// `0, 1, -1, 2, -2, ...`.
fn window_values(window: i64) -> impl Iterator<Item = i64> + Clone {
    std::iter::once(0).chain((1..=window).flat_map(|k| [k, -k]))
}

/// Checks all six canonical identities on every `(x, y)` with `|x|, |y| <= window`.
///
/// Each violation is reported with its least witness: smallest `|x| + |y|`,
/// then lexicographic on `(x, y)` with values ordered `0, 1, -1, 2, -2, ...`.
pub fn check_witness(w: &IntegerWitness, window: i64) -> WitnessReport {
    let window = window.max(0);
    let key = |v: i64| (v.unsigned_abs(), v < 0);
    let mut pairs: Vec<(i64, i64)> = window_values(window)
        .flat_map(|x| window_values(window).map(move |y| (x, y)))
        .collect();
    pairs.sort_by_key(|&(x, y)| (x.unsigned_abs() + y.unsigned_abs(), key(x), key(y)));

    let identities = Tag::ALL
        .into_iter()
        .map(|tag| {
            let id = Identity::canonical(tag);
            let status = pairs
                .iter()
                .find(|&&(x, y)| w.violates_at(&id, x, y))
                .map_or(WindowStatus::HeldOnWindow, |&(x, y)| WindowStatus::Violated { x, y });
            IdentityCheck { tag, status }
        })
        .collect();
    WitnessReport {
        witness: w.name.to_string(),
        window,
        identities,
    }
}
