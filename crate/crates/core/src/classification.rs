//! Status of every subset of the six identities: defining, not defining, or
//! undetermined by finite search.

use std::fmt;
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::derivations::{builtin, closure_trace, verify_derivation, ClosureStep};
use crate::identities::{holds, Identity, IdentitySet, Tag};
use crate::model_search::{entailed_finitely, FiniteEntailment, SearchError};
use crate::witness::refuting_witness;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyParams {
    pub max_order: usize,
    /// Budget per (subset, goal, order) search, in milliseconds.
    pub budget_ms: u64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            max_order: 4,
            budget_ms: 10_000,
        }
    }
}

impl ClassifyParams {
    pub fn budget(&self) -> Duration {
        Duration::from_millis(self.budget_ms)
    }
}

/// Reference to a registered integer witness refuting `subset |- goal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteWitnessRef {
    pub witness: String,
    pub goal: Tag,
}

impl fmt::Display for InfiniteWitnessRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violates {}", self.witness, self.goal)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Defining {
        closure_trace: Vec<ClosureStep>,
    },
    NotDefining {
        violated: Tag,
        order: usize,
        countermodel: FiniteAlgebra,
    },
    UndeterminedFinite {
        max_order: usize,
        /// Canonical identities neither derived nor refuted.
        unresolved: IdentitySet,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        infinite_witness: Option<InfiniteWitnessRef>,
    },
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Defining { .. } => "DEFINING",
            Status::NotDefining { .. } => "NOT_DEFINING",
            Status::UndeterminedFinite { .. } => "UNDETERMINED_FINITE",
        }
    }

    pub fn is_defining(&self) -> bool {
        matches!(self, Status::Defining { .. })
    }
}

/// A search that hit its time budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedOut {
    pub goal: Tag,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub subset: IdentitySet,
    pub mask: u8,
    pub closure: IdentitySet,
    #[serde(flatten)]
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub timeouts: Vec<TimedOut>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvidenceError {
    #[error("closure of {subset} is {closure}, not all six")]
    ClosureIncomplete { subset: IdentitySet, closure: IdentitySet },
    #[error("closure trace names unknown derivation {0}")]
    UnknownDerivation(String),
    #[error("derivation {0} does not verify")]
    Unverified(String),
    #[error("trace step {derivation} needs {needed} but only {available} is available")]
    TraceOutOfOrder { derivation: String, needed: IdentitySet, available: IdentitySet },
    #[error("countermodel violates required identity {0}")]
    CountermodelFailsPremise(Tag),
    #[error("countermodel satisfies {0}, which it should violate")]
    CountermodelSatisfiesGoal(Tag),
    #[error("violated identity {0} belongs to the subset")]
    GoalInSubset(Tag),
}

impl ClassificationEntry {
    /// Builds an entry after re-checking its evidence.
    pub fn new(subset: IdentitySet, status: Status, timeouts: Vec<TimedOut>) -> Result<Self, EvidenceError> {
        let closure = crate::derivations::closure(subset);
        let entry = ClassificationEntry {
            subset,
            mask: subset.mask(),
            closure,
            status,
            timeouts,
        };
        entry.recheck()?;
        Ok(entry)
    }

    /// Re-verifies the evidence: every trace derivation through the
    /// derivation checker, every countermodel through `holds`.
    pub fn recheck(&self) -> Result<(), EvidenceError> {
        match &self.status {
            Status::Defining { closure_trace } => {
                let mut have = self.subset;
                for step in closure_trace {
                    let d = builtin(&step.derivation)
                        .ok_or_else(|| EvidenceError::UnknownDerivation(step.derivation.clone()))?;
                    verify_derivation(&d).map_err(|_| EvidenceError::Unverified(d.name.clone()))?;
                    if !d.premises.is_subset(have) {
                        return Err(EvidenceError::TraceOutOfOrder {
                            derivation: d.name.clone(),
                            needed: d.premises,
                            available: have,
                        });
                    }
                    have.insert(step.derived);
                }
                if !have.is_all() {
                    return Err(EvidenceError::ClosureIncomplete {
                        subset: self.subset,
                        closure: have,
                    });
                }
            }
            Status::NotDefining { violated, countermodel, .. } => {
                if self.subset.contains(*violated) {
                    return Err(EvidenceError::GoalInSubset(*violated));
                }
                for t in self.subset.tags() {
                    if !holds(&Identity::canonical(t), countermodel) {
                        return Err(EvidenceError::CountermodelFailsPremise(t));
                    }
                }
                if holds(&Identity::canonical(*violated), countermodel) {
                    return Err(EvidenceError::CountermodelSatisfiesGoal(*violated));
                }
            }
            Status::UndeterminedFinite { .. } => {}
        }
        Ok(())
    }

    pub fn evidence_summary(&self) -> String {
        match &self.status {
            Status::Defining { closure_trace } => {
                if closure_trace.is_empty() {
                    "all six given".to_string()
                } else {
                    closure_trace
                        .iter()
                        .map(|s| format!("{}→{}", s.derivation, s.derived))
                        .collect::<Vec<_>>()
                        .join(", ")
                }
            }
            Status::NotDefining { violated, order, .. } => {
                format!("order-{order} countermodel violates {violated}")
            }
            Status::UndeterminedFinite { max_order, unresolved, infinite_witness } => {
                let mut s = format!("no countermodel up to order {max_order} for {unresolved}");
                if let Some(w) = infinite_witness {
                    s.push_str(&format!("; infinite witness: {w}"));
                }
                if !self.timeouts.is_empty() {
                    s.push_str(" (budget exhausted)");
                }
                s
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub defining: usize,
    pub not_defining: usize,
    pub undetermined_finite: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub parameters: ClassifyParams,
    pub summary: Summary,
    pub entries: Vec<ClassificationEntry>,
}

impl ClassificationReport {
    pub fn entry(&self, subset: IdentitySet) -> &ClassificationEntry {
        &self.entries[subset.mask() as usize]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "classification of 64 subsets (max order {}, budget {} ms per search)",
            self.parameters.max_order, self.parameters.budget_ms
        )?;
        writeln!(f, "{:<6}  {:<6}  {:<20}  evidence", "mask", "subset", "status")?;
        for e in &self.entries {
            let letters = if e.subset.is_empty() { "-".to_string() } else { e.subset.letters() };
            writeln!(
                f,
                "{:06b}  {:<6}  {:<20}  {}",
                e.mask,
                letters,
                e.status.label(),
                e.evidence_summary()
            )?;
        }
        write!(
            f,
            "DEFINING {}, NOT_DEFINING {}, UNDETERMINED_FINITE {}",
            self.summary.defining, self.summary.not_defining, self.summary.undetermined_finite
        )
    }
}

/// Classifies one subset. Goals outside the closure are tried in canonical
/// order and the first countermodel wins.
pub fn classify_subset(subset: IdentitySet, params: ClassifyParams) -> Result<ClassificationEntry, SearchError> {
    let (closure, trace) = closure_trace(subset);
    if closure.is_all() {
        let entry = ClassificationEntry::new(subset, Status::Defining { closure_trace: trace }, Vec::new());
        return Ok(entry.expect("closure evidence re-verifies"));
    }
    let mut timeouts = Vec::new();
    let mut unresolved = IdentitySet::EMPTY;
    for goal in closure.complement() {
        match entailed_finitely(subset, &Identity::canonical(goal), params.max_order, params.budget())? {
            FiniteEntailment::No { order, countermodel } => {
                let status = Status::NotDefining {
                    violated: goal,
                    order,
                    countermodel,
                };
                let entry = ClassificationEntry::new(subset, status, timeouts);
                return Ok(entry.expect("countermodel evidence re-verifies"));
            }
            FiniteEntailment::Unrefuted { timed_out, .. } => {
                unresolved.insert(goal);
                timeouts.extend(timed_out.into_iter().map(|order| TimedOut { goal, order }));
            }
        }
    }
    let infinite_witness = unresolved.tags().find_map(|goal| {
        refuting_witness(subset, goal).map(|w| InfiniteWitnessRef {
            witness: w.name.to_string(),
            goal,
        })
    });
    let status = Status::UndeterminedFinite {
        max_order: params.max_order,
        unresolved,
        infinite_witness,
    };
    Ok(ClassificationEntry::new(subset, status, timeouts).expect("no evidence to check"))
}

/// Classifies all 64 subsets, in mask order. Subsets run in parallel.
pub fn classify_all(params: ClassifyParams) -> Result<ClassificationReport, SearchError> {
    if params.max_order < 2 {
        return Err(SearchError::InfeasibleOrder(params.max_order));
    }
    if params.budget_ms == 0 {
        return Err(SearchError::ZeroBudget);
    }
    let subsets: Vec<IdentitySet> = IdentitySet::all_subsets().collect();
    let entries = subsets
        .into_par_iter()
        .map(|s| classify_subset(s, params))
        .collect::<Result<Vec<_>, _>>()?;
    let mut summary = Summary::default();
    for e in &entries {
        match e.status {
            Status::Defining { .. } => summary.defining += 1,
            Status::NotDefining { .. } => summary.not_defining += 1,
            Status::UndeterminedFinite { .. } => summary.undetermined_finite += 1,
        }
    }
    Ok(ClassificationReport {
        parameters: params,
        summary,
        entries,
    })
}

/// The eight four-identity defining sets.
pub fn corollary_sets() -> Vec<IdentitySet> {
    use Tag::*;
    [
        [A, C, B, T],
        [C, B, D, T],
        [A, C, D, R],
        [A, B, D, R],
        [A, B, T, R],
        [A, D, T, R],
        [C, B, T, R],
        [C, D, T, R],
    ]
    .iter()
    .map(|s| IdentitySet::of(s))
    .collect()
}
