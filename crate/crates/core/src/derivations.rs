//! Checkable equational derivations between canonical identities.
//!
//! A derivation instantiates one premise, rewrites one side of the resulting
//! equation with further premises, and ends at the goal up to a renaming of
//! variables. Steps are checked by exact syntactic equality.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identities::{Identity, IdentitySet, Tag};
use crate::terms::{replace_at, subterm_at, substitute, Position, PositionError, Step, Substitution, Term, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "LHS->RHS")]
    LhsToRhs,
    #[serde(rename = "RHS->LHS")]
    RhsToLhs,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::LhsToRhs => Direction::RhsToLhs,
            Direction::RhsToLhs => Direction::LhsToRhs,
        }
    }

    /// (source, target) sides of `id` in this direction.
    fn orient(self, id: &Identity) -> (&Term, &Term) {
        match self {
            Direction::LhsToRhs => (&id.lhs, &id.rhs),
            Direction::RhsToLhs => (&id.rhs, &id.lhs),
        }
    }
}

/// Which side of the working equation a step rewrites.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Lhs,
    Rhs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub rule: Tag,
    pub direction: Direction,
    #[serde(default)]
    pub side: Side,
    pub position: Position,
    pub substitution: Substitution,
    pub before: Term,
    pub after: Term,
}

/// The instantiated premise a derivation starts from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StartInstance {
    pub premise: Tag,
    pub substitution: Substitution,
    pub equation: Identity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Derivation {
    pub name: String,
    pub premises: IdentitySet,
    pub goal: Identity,
    pub start: StartInstance,
    pub steps: Vec<RewriteStep>,
}

impl Derivation {
    /// Lines of the proof: the instantiation, each rewrite, and the closing
    /// comparison with the goal.
    pub fn proof_length(&self) -> usize {
        self.steps.len() + 2
    }

    pub fn goal_tag(&self) -> Option<Tag> {
        self.goal.tag()
    }

    pub fn from_json(text: &str) -> Result<Derivation, serde_json::Error> {
        serde_json::from_str(text)
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let goal = match self.goal.tag() {
            Some(t) => t.to_string(),
            None => self.goal.to_string(),
        };
        write!(f, "{} ⊢ {}", self.premises, goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StepFailure {
    #[error("rule {0} is not among the premises")]
    RuleNotInPremises(Tag),
    #[error(transparent)]
    InvalidPosition(#[from] PositionError),
    #[error("subterm {found} does not match the instantiated rule side {expected}")]
    SourceMismatch { expected: Term, found: Term },
    #[error("rewriting gives {expected}, but the step records {found}")]
    TargetMismatch { expected: Term, found: Term },
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("start premise {0} is not among the premises")]
    StartNotInPremises(Tag),
    #[error("start equation {found} is not the stated instance {expected}")]
    StartMismatch { expected: Box<Identity>, found: Box<Identity> },
    #[error("step {index}: rewrites {found}, but the current {side:?} side is {expected}")]
    Discontinuous { index: usize, side: Side, expected: Term, found: Term },
    #[error("step {index}: {failure}")]
    Step { index: usize, failure: StepFailure },
    #[error("derived {reached}, which is not {goal} up to renaming")]
    GoalMismatch { reached: Box<Identity>, goal: Box<Identity> },
}

/// Checks one rewrite step against the premise set.
pub fn verify_step(s: &RewriteStep, premises: IdentitySet) -> Result<(), StepFailure> {
    if !premises.contains(s.rule) {
        return Err(StepFailure::RuleNotInPremises(s.rule));
    }
    let rule = Identity::canonical(s.rule);
    let (source, target) = s.direction.orient(&rule);
    let expected_source = substitute(source, &s.substitution);
    let found = subterm_at(&s.before, &s.position)?;
    if *found != expected_source {
        return Err(StepFailure::SourceMismatch {
            expected: expected_source,
            found: found.clone(),
        });
    }
    let expected_after = replace_at(&s.before, &s.position, substitute(target, &s.substitution))?;
    if expected_after != s.after {
        return Err(StepFailure::TargetMismatch {
            expected: expected_after,
            found: s.after.clone(),
        });
    }
    Ok(())
}

pub fn verify_derivation(d: &Derivation) -> Result<(), DerivationError> {
    let start = &d.start;
    if !d.premises.contains(start.premise) {
        return Err(DerivationError::StartNotInPremises(start.premise));
    }
    let premise = Identity::canonical(start.premise);
    let instance = Identity::new(
        substitute(&premise.lhs, &start.substitution),
        substitute(&premise.rhs, &start.substitution),
    );
    if instance != start.equation.unlabelled() {
        return Err(DerivationError::StartMismatch {
            expected: Box::new(instance),
            found: Box::new(start.equation.clone()),
        });
    }

    let mut lhs = instance.lhs;
    let mut rhs = instance.rhs;
    for (index, step) in d.steps.iter().enumerate() {
        let current = match step.side {
            Side::Lhs => &mut lhs,
            Side::Rhs => &mut rhs,
        };
        if *current != step.before {
            return Err(DerivationError::Discontinuous {
                index,
                side: step.side,
                expected: current.clone(),
                found: step.before.clone(),
            });
        }
        verify_step(step, d.premises).map_err(|failure| DerivationError::Step { index, failure })?;
        *current = step.after.clone();
    }

    let reached = Identity::new(lhs, rhs);
    if !equal_up_to_renaming(&reached, &d.goal) {
        return Err(DerivationError::GoalMismatch {
            reached: Box::new(reached),
            goal: Box::new(d.goal.clone()),
        });
    }
    Ok(())
}

/// Whether a bijective renaming of variables maps `a` onto `b`.
pub fn equal_up_to_renaming(a: &Identity, b: &Identity) -> bool {
    fn walk(s: &Term, t: &Term, fwd: &mut BTreeMap<Var, Var>, back: &mut BTreeMap<Var, Var>) -> bool {
        match (s, t) {
            (Term::Var(u), Term::Var(v)) => {
                *fwd.entry(*u).or_insert(*v) == *v && *back.entry(*v).or_insert(*u) == *u
            }
            (Term::App(o1, l1, r1), Term::App(o2, l2, r2)) => {
                o1 == o2 && walk(l1, l2, fwd, back) && walk(r1, r2, fwd, back)
            }
            _ => false,
        }
    }
    let mut fwd = BTreeMap::new();
    let mut back = BTreeMap::new();
    walk(&a.lhs, &b.lhs, &mut fwd, &mut back) && walk(&a.rhs, &b.rhs, &mut fwd, &mut back)
}

const BUILTIN_SOURCES: [&str; 6] = [
    include_str!("../data/derivations/lemma_DA_T.json"),
    include_str!("../data/derivations/lemma_BC_R.json"),
    include_str!("../data/derivations/lemma_CT_A.json"),
    include_str!("../data/derivations/lemma_BT_D.json"),
    include_str!("../data/derivations/lemma_RD_B.json"),
    include_str!("../data/derivations/lemma_AR_C.json"),
];

fn builtins() -> &'static [Derivation] {
    static BUILTINS: OnceLock<Vec<Derivation>> = OnceLock::new();
    BUILTINS.get_or_init(|| {
        BUILTIN_SOURCES
            .iter()
            .map(|src| {
                let d = Derivation::from_json(src).expect("builtin derivation parses");
                if let Err(e) = verify_derivation(&d) {
                    panic!("builtin derivation {} fails verification: {e}", d.name);
                }
                assert!(d.goal_tag().is_some(), "builtin {} must prove a canonical identity", d.name);
                d
            })
            .collect()
    })
}

/// The six shipped derivations, each verified when first loaded:
/// `{A,D} ⊢ T`, `{C,B} ⊢ R`, `{C,T} ⊢ A`, `{B,T} ⊢ D`, `{D,R} ⊢ B`, `{A,R} ⊢ C`.
pub fn builtin_derivations() -> Vec<Derivation> {
    builtins().to_vec()
}

pub fn builtin(name: &str) -> Option<Derivation> {
    builtins().iter().find(|d| d.name == name).cloned()
}

/// One application of a builtin during [`closure_trace`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureStep {
    pub derivation: String,
    pub premises: IdentitySet,
    pub derived: Tag,
}

/// Saturates `premises` under the builtins, recording each new identity.
///
/// Builtins are scanned in their fixed order, repeatedly, until nothing new
/// is added.
pub fn closure_trace(premises: IdentitySet) -> (IdentitySet, Vec<ClosureStep>) {
    let mut set = premises;
    let mut trace = Vec::new();
    loop {
        let mut grew = false;
        for d in builtins() {
            let goal = d.goal_tag().expect("canonical goal");
            if d.premises.is_subset(set) && set.insert(goal) {
                trace.push(ClosureStep {
                    derivation: d.name.clone(),
                    premises: d.premises,
                    derived: goal,
                });
                grew = true;
            }
        }
        if !grew {
            return (set, trace);
        }
    }
}

pub fn closure(premises: IdentitySet) -> IdentitySet {
    closure_trace(premises).0
}

/// The field a [`mutate`] perturbation touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    Rule,
    Direction,
    Position,
    Binding,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [Mutation::Rule, Mutation::Direction, Mutation::Position, Mutation::Binding];
}

/// Perturbs one field of the first rewrite step of `d`.
///
/// The rule moves to another premise when there is one (otherwise the next
/// canonical tag), the direction flips, the last position step flips (the
/// root moves to `[L]`), and the alphabetically first substitution binding is
/// rebound to a different variable. Returns `None` when `d` has no steps or
/// the first step has no bindings.
pub fn mutate(d: &Derivation, m: Mutation) -> Option<Derivation> {
    let mut out = d.clone();
    let step = out.steps.first_mut()?;
    match m {
        Mutation::Rule => {
            let other = d
                .premises
                .tags()
                .find(|&t| t != step.rule)
                .unwrap_or(Tag::ALL[(step.rule.index() + 1) % Tag::ALL.len()]);
            step.rule = other;
        }
        Mutation::Direction => step.direction = step.direction.flip(),
        Mutation::Position => {
            let mut steps = step.position.steps().to_vec();
            match steps.last_mut() {
                Some(last) => *last = last.flip(),
                None => steps.push(Step::Left),
            }
            step.position = Position(steps);
        }
        Mutation::Binding => {
            let (v, t) = step.substitution.iter().next().map(|(v, t)| (v, t.clone()))?;
            let replacement = [Var::Z, Var::X]
                .into_iter()
                .map(Term::Var)
                .find(|r| *r != t)
                .expect("two candidates differ");
            step.substitution.insert(v, replacement);
        }
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Term {
        s.parse().unwrap()
    }

    fn set(s: &str) -> IdentitySet {
        IdentitySet::parse_letters(s).unwrap()
    }

    fn identity_sub() -> Substitution {
        Substitution::new().with(Var::X, t("x")).with(Var::Y, t("y"))
    }

    fn lemma1_step(rule: Tag) -> RewriteStep {
        RewriteStep {
            rule,
            direction: Direction::LhsToRhs,
            side: Side::Lhs,
            position: Position(vec![Step::Left]),
            substitution: identity_sub(),
            before: t("((x*(x\\y))/(x\\y))"),
            after: t("(y/(x\\y))"),
        }
    }

    #[test]
    fn rewrite_by_a_inside_instantiated_d() {
        assert_eq!(verify_step(&lemma1_step(Tag::A), set("AD")), Ok(()));
    }

    #[test]
    fn wrong_rule_is_rejected() {
        assert!(matches!(
            verify_step(&lemma1_step(Tag::B), set("ABD")),
            Err(StepFailure::SourceMismatch { .. })
        ));
        assert_eq!(
            verify_step(&lemma1_step(Tag::B), set("AD")),
            Err(StepFailure::RuleNotInPremises(Tag::B))
        );
    }

    #[test]
    fn rewrite_by_b_on_the_right() {
        let step = RewriteStep {
            rule: Tag::B,
            direction: Direction::LhsToRhs,
            side: Side::Lhs,
            position: Position(vec![Step::Right]),
            substitution: identity_sub(),
            before: t("((x·y)/(x\\(x·y)))"),
            after: t("((x*y)/y)"),
        };
        assert_eq!(verify_step(&step, set("BT")), Ok(()));
    }

    #[test]
    fn wrong_after_is_rejected() {
        let mut step = lemma1_step(Tag::A);
        step.after = t("(x/(x\\y))");
        assert!(matches!(verify_step(&step, set("AD")), Err(StepFailure::TargetMismatch { .. })));
    }

    #[test]
    fn invalid_position_is_rejected() {
        let mut step = lemma1_step(Tag::A);
        step.position = Position(vec![Step::Left, Step::Left, Step::Left]);
        assert!(matches!(verify_step(&step, set("AD")), Err(StepFailure::InvalidPosition(_))));
    }

    #[test]
    fn reverse_direction_step() {
        // y  ~>  (x*(x\y)) using A right-to-left at the root.
        let step = RewriteStep {
            rule: Tag::A,
            direction: Direction::RhsToLhs,
            side: Side::Rhs,
            position: Position::root(),
            substitution: identity_sub(),
            before: t("y"),
            after: t("(x*(x\\y))"),
        };
        assert_eq!(verify_step(&step, set("A")), Ok(()));
    }

    #[test]
    fn builtins_verify() {
        let all = builtin_derivations();
        assert_eq!(all.len(), 6);
        for d in &all {
            assert_eq!(verify_derivation(d), Ok(()), "{}", d.name);
            assert_eq!(d.proof_length(), 3);
        }
        let names: Vec<_> = all.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(names, ["lemma_DA_T", "lemma_BC_R", "lemma_CT_A", "lemma_BT_D", "lemma_RD_B", "lemma_AR_C"]);
        assert_eq!(builtin("lemma_BT_D").unwrap().premises, set("BT"));
        assert_eq!(builtin("lemma_CT_A").unwrap().to_string(), "{C,T} ⊢ A");
    }

    #[test]
    fn perturbed_start_substitution_is_rejected() {
        let mut d = builtin("lemma_DA_T").unwrap();
        d.start.substitution.insert(Var::Y, t("y"));
        assert!(matches!(verify_derivation(&d), Err(DerivationError::StartMismatch { .. })));
    }

    #[test]
    fn step_must_continue_from_current_side() {
        let mut d = builtin("lemma_AR_C").unwrap();
        d.steps[0].side = Side::Rhs;
        assert!(matches!(verify_derivation(&d), Err(DerivationError::Discontinuous { index: 0, .. })));
    }

    #[test]
    fn wrong_goal_is_rejected() {
        let mut d = builtin("lemma_RD_B").unwrap();
        d.goal = Identity::canonical(Tag::A);
        assert!(matches!(verify_derivation(&d), Err(DerivationError::GoalMismatch { .. })));
    }

    #[test]
    fn every_mutation_is_rejected() {
        for d in builtin_derivations() {
            for m in Mutation::ALL {
                let bad = mutate(&d, m).unwrap();
                assert_ne!(bad, d);
                assert!(verify_derivation(&bad).is_err(), "{} survived {m:?}", d.name);
            }
        }
    }

    #[test]
    fn renaming_must_be_bijective() {
        let a: Identity = "(x*y) = x".parse().unwrap();
        let b: Identity = "(y*x) = y".parse().unwrap();
        let c: Identity = "(x*x) = x".parse().unwrap();
        assert!(equal_up_to_renaming(&a, &b));
        assert!(!equal_up_to_renaming(&a, &c));
        assert!(!equal_up_to_renaming(&c, &a));
    }

    #[test]
    fn closure_examples() {
        assert_eq!(closure(set("ACBD")), IdentitySet::ALL);
        assert_eq!(closure(set("CBT")), IdentitySet::ALL);
        assert_eq!(closure(set("ADR")), IdentitySet::ALL);
        assert_eq!(closure(set("A")), set("A"));
        assert_eq!(closure(set("ACB")), set("ACBR"));
    }

    #[test]
    fn closure_trace_records_derived_tags() {
        let (s, trace) = closure_trace(set("CBT"));
        assert_eq!(s, IdentitySet::ALL);
        let derived: IdentitySet = trace.iter().map(|c| c.derived).collect();
        assert_eq!(derived, set("ADR"));
        for step in &trace {
            assert!(!set("CBT").contains(step.derived));
        }
    }

    #[test]
    fn derivation_json_round_trip() {
        let d = builtin("lemma_BC_R").unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(Derivation::from_json(&text).unwrap(), d);
        assert!(text.contains(r#""position":["R"]"#));
        assert!(text.contains(r#""direction":"LHS->RHS""#));
    }
}
