//! Finite model search over table triples.
//!
//! Every cell of the three tables carries a domain (a bitmask over `0..n`).
//! The search assigns cells in a fixed order (`mul` row-major, then `ldiv`,
//! then `rdiv`), trying values in ascending order. After every decision the
//! required identities are propagated to a fixpoint.
//!
//! Each canonical identity has the shape `outer(inner(a, b), c) = r` (or with
//! the inner term on the right), so an instance ties one inner cell to one of
//! `n` outer cells chosen by the inner value. Propagation keeps an inner
//! value `z` only if the outer cell selected by `z` can still take the value
//! `r`, and once the inner cell is fixed it fixes the outer cell. When `A`
//! and `B` are both required this forces `ldiv` from the rows of `mul`, and
//! `C` with `D` forces `rdiv` from its columns.
//!
//! Because pruning only removes non-models and the decision order is fixed,
//! the model returned by [`find_model`] is the least one in the cell order,
//! with or without propagation.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{BinaryTable, FiniteAlgebra};
use crate::identities::{holds, Identity, IdentitySet, Tag};
use crate::terms::{Op, Term, Var};

/// Largest carrier the cell domains can represent.
pub const MAX_ORDER: usize = 16;

/// `count_models` refuses unconstrained counts above this order.
pub const MAX_UNCONSTRAINED_COUNT_ORDER: usize = 5;

const CHECK_INTERVAL: u64 = 256;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("order must be between 1 and {MAX_ORDER}, got {0}")]
    InfeasibleOrder(usize),
    #[error("time budget must be positive")]
    ZeroBudget,
    #[error("refusing to count unconstrained algebras of order {0} (limit {MAX_UNCONSTRAINED_COUNT_ORDER})")]
    CountTooLarge(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub satisfy: IdentitySet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violate: Option<Identity>,
    pub order: usize,
    /// Wall-clock budget in milliseconds.
    pub time_budget_ms: u64,
}

impl SearchQuery {
    pub fn new(satisfy: IdentitySet, violate: Option<Identity>, order: usize, time_budget: Duration) -> SearchQuery {
        SearchQuery {
            satisfy,
            violate,
            order,
            time_budget_ms: time_budget.as_millis().try_into().unwrap_or(u64::MAX),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.order == 0 || self.order > MAX_ORDER {
            return Err(SearchError::InfeasibleOrder(self.order));
        }
        if self.time_budget_ms == 0 {
            return Err(SearchError::ZeroBudget);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    Found { algebra: FiniteAlgebra },
    Exhausted,
    Timeout,
}

impl Outcome {
    pub fn model(&self) -> Option<&FiniteAlgebra> {
        match self {
            Outcome::Found { algebra } => Some(algebra),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    /// Not serialized, so that JSON output is reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub outcome: Outcome,
    #[serde(flatten)]
    pub stats: SearchStats,
}

/// Knobs for testing the search itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// With `false`, only instances whose cells are all decided are checked.
    pub propagate: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { propagate: true }
    }
}

pub fn find_model(q: &SearchQuery) -> Result<SearchResult, SearchError> {
    find_model_with(q, SearchOptions::default())
}

pub fn find_model_with(q: &SearchQuery, opts: SearchOptions) -> Result<SearchResult, SearchError> {
    q.validate()?;
    if let Some(v) = &q.violate {
        // Asked to violate a required identity: nothing to search.
        let required = q.satisfy.tags().map(Identity::canonical);
        if required.into_iter().any(|c| c.lhs == v.lhs && c.rhs == v.rhs) {
            return Ok(SearchResult { outcome: Outcome::Exhausted, stats: SearchStats::default() });
        }
    }
    let mut search = Search::new(q.satisfy, q.order, opts, Some(Duration::from_millis(q.time_budget_ms)));
    let mut found = None;
    let flow = search.run(&mut |alg| {
        if let Some(v) = &q.violate {
            if holds(v, &alg) {
                return Flow::Continue;
            }
        }
        for t in q.satisfy.tags() {
            assert!(holds(&Identity::canonical(t), &alg), "search produced a model violating {t}");
        }
        found = Some(alg);
        Flow::Stop
    });
    let outcome = match (flow, found) {
        (_, Some(algebra)) => Outcome::Found { algebra },
        (Flow::Timeout, None) => Outcome::Timeout,
        _ => Outcome::Exhausted,
    };
    Ok(SearchResult {
        outcome,
        stats: search.stats(),
    })
}

/// Labelled number of algebras of order `n` satisfying every identity in `satisfy`.
pub fn count_models(satisfy: IdentitySet, n: usize) -> Result<u64, SearchError> {
    count_models_with(satisfy, n, SearchOptions::default())
}

pub fn count_models_with(satisfy: IdentitySet, n: usize, opts: SearchOptions) -> Result<u64, SearchError> {
    if n == 0 || n > MAX_ORDER {
        return Err(SearchError::InfeasibleOrder(n));
    }
    if satisfy.is_empty() && n > MAX_UNCONSTRAINED_COUNT_ORDER {
        return Err(SearchError::CountTooLarge(n));
    }
    let mut search = Search::new(satisfy, n, opts, None);
    let mut count = 0u64;
    search.run(&mut |_| {
        count += 1;
        Flow::Continue
    });
    Ok(count)
}

/// Calls `visit` on every algebra of order `n` satisfying `satisfy`, in
/// search order.
pub fn for_each_model(satisfy: IdentitySet, n: usize, mut visit: impl FnMut(&FiniteAlgebra)) -> Result<(), SearchError> {
    if n == 0 || n > MAX_ORDER {
        return Err(SearchError::InfeasibleOrder(n));
    }
    let mut search = Search::new(satisfy, n, SearchOptions::default(), None);
    search.run(&mut |alg| {
        visit(&alg);
        Flow::Continue
    });
    Ok(())
}

/// Answer of the finite entailment check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "answer", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FiniteEntailment {
    /// A countermodel of the given order exists.
    No { order: usize, countermodel: FiniteAlgebra },
    /// No countermodel up to `max_order`. This is not a proof of entailment.
    Unrefuted {
        max_order: usize,
        /// Orders at which the search ran out of time.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        timed_out: Vec<usize>,
    },
}

impl FiniteEntailment {
    pub fn is_refuted(&self) -> bool {
        matches!(self, FiniteEntailment::No { .. })
    }
}

/// Looks for the smallest countermodel to `premises |- conclusion`, trying
/// orders `1..=max_order` with `budget` per order.
pub fn entailed_finitely(
    premises: IdentitySet,
    conclusion: &Identity,
    max_order: usize,
    budget: Duration,
) -> Result<FiniteEntailment, SearchError> {
    let mut timed_out = Vec::new();
    for order in 1..=max_order {
        let q = SearchQuery::new(premises, Some(conclusion.clone()), order, budget);
        match find_model(&q)?.outcome {
            Outcome::Found { algebra } => {
                return Ok(FiniteEntailment::No { order, countermodel: algebra });
            }
            Outcome::Timeout => timed_out.push(order),
            Outcome::Exhausted => {}
        }
    }
    Ok(FiniteEntailment::Unrefuted { max_order, timed_out })
}

// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
    Timeout,
}

/// One ground instance `outer(.., inner, ..) = r` of a required identity.
#[derive(Clone, Copy, Debug)]
struct Instance {
    inner: usize,
    /// Outer cell for inner value `z` is `outer_base + z * outer_stride`.
    outer_base: usize,
    outer_stride: usize,
    result: u16,
}

/// The two-level shape shared by all canonical identities.
struct Pattern {
    inner_op: Op,
    inner_args: (Var, Var),
    outer_op: Op,
    /// The variable argument of the outer operation.
    outer_var: Var,
    /// Whether the inner term is the left argument of the outer operation.
    inner_on_left: bool,
    result: Var,
}

impl Pattern {
    fn of(id: &Identity) -> Option<Pattern> {
        let Term::Var(result) = id.rhs else { return None };
        let Term::App(outer_op, l, r) = &id.lhs else { return None };
        let (inner, outer_var, inner_on_left) = match (&**l, &**r) {
            (inner @ Term::App(..), Term::Var(c)) => (inner, *c, true),
            (Term::Var(c), inner @ Term::App(..)) => (inner, *c, false),
            _ => return None,
        };
        let Term::App(inner_op, a, b) = inner else { return None };
        let (Term::Var(a), Term::Var(b)) = (&**a, &**b) else { return None };
        Some(Pattern {
            inner_op: *inner_op,
            inner_args: (*a, *b),
            outer_op: *outer_op,
            outer_var,
            inner_on_left,
            result,
        })
    }
}

fn table_offset(op: Op, n: usize) -> usize {
    match op {
        Op::Mul => 0,
        Op::LDiv => n * n,
        Op::RDiv => 2 * n * n,
    }
}

fn instances(tag: Tag, n: usize) -> Vec<Instance> {
    let id = Identity::canonical(tag);
    let p = Pattern::of(&id).expect("canonical identities have two-level shape");
    let vars = id.vars();
    crate::identities::assignments(&vars, n)
        .map(|a| {
            let val = |v: Var| a.get(v).expect("assigned");
            let inner = table_offset(p.inner_op, n) + val(p.inner_args.0) * n + val(p.inner_args.1);
            let outer = table_offset(p.outer_op, n);
            let c = val(p.outer_var);
            let (outer_base, outer_stride) = if p.inner_on_left {
                (outer + c, n)
            } else {
                (outer + c * n, 1)
            };
            Instance {
                inner,
                outer_base,
                outer_stride,
                result: 1 << val(p.result),
            }
        })
        .collect()
}

struct Search {
    n: usize,
    instances: Vec<Instance>,
    propagate: bool,
    budget: Option<Duration>,
    start: Instant,
    nodes: u64,
}

impl Search {
    fn new(satisfy: IdentitySet, n: usize, opts: SearchOptions, budget: Option<Duration>) -> Search {
        Search {
            n,
            instances: satisfy.tags().flat_map(|t| instances(t, n)).collect(),
            propagate: opts.propagate,
            budget,
            start: Instant::now(),
            nodes: 0,
        }
    }

    fn stats(&self) -> SearchStats {
        SearchStats {
            nodes: self.nodes,
            elapsed: self.start.elapsed(),
        }
    }

    fn run(&mut self, on_model: &mut dyn FnMut(FiniteAlgebra) -> Flow) -> Flow {
        self.start = Instant::now();
        let full: u16 = ((1u32 << self.n) - 1) as u16;
        let domains = vec![full; 3 * self.n * self.n];
        self.dfs(domains, on_model)
    }

    fn dfs(&mut self, mut dom: Vec<u16>, on_model: &mut dyn FnMut(FiniteAlgebra) -> Flow) -> Flow {
        self.nodes += 1;
        if let Some(budget) = self.budget {
            if self.nodes.is_multiple_of(CHECK_INTERVAL) && self.start.elapsed() > budget {
                return Flow::Timeout;
            }
        }
        let consistent = if self.propagate {
            self.propagate(&mut dom)
        } else {
            self.check(&dom)
        };
        if !consistent {
            return Flow::Continue;
        }
        let Some(cell) = dom.iter().position(|d| !d.is_power_of_two()) else {
            return on_model(self.algebra(&dom));
        };
        let mut values = dom[cell];
        while values != 0 {
            let bit = values & values.wrapping_neg();
            values &= !bit;
            let mut child = dom.clone();
            child[cell] = bit;
            match self.dfs(child, on_model) {
                Flow::Continue => {}
                stop => return stop,
            }
        }
        Flow::Continue
    }

    /// Generalized arc consistency over all instances, to a fixpoint.
    fn propagate(&self, dom: &mut [u16]) -> bool {
        loop {
            let mut changed = false;
            for inst in &self.instances {
                let d = dom[inst.inner];
                let mut keep = 0u16;
                let mut rest = d;
                while rest != 0 {
                    let bit = rest & rest.wrapping_neg();
                    rest &= !bit;
                    let z = bit.trailing_zeros() as usize;
                    if dom[inst.outer_base + z * inst.outer_stride] & inst.result != 0 {
                        keep |= bit;
                    }
                }
                if keep == 0 {
                    return false;
                }
                if keep != d {
                    dom[inst.inner] = keep;
                    changed = true;
                }
                if keep.is_power_of_two() {
                    let outer = inst.outer_base + keep.trailing_zeros() as usize * inst.outer_stride;
                    if dom[outer] != inst.result {
                        dom[outer] = inst.result;
                        changed = true;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    /// Only fully decided instances are checked.
    fn check(&self, dom: &[u16]) -> bool {
        self.instances.iter().all(|inst| {
            let d = dom[inst.inner];
            if !d.is_power_of_two() {
                return true;
            }
            let outer = dom[inst.outer_base + d.trailing_zeros() as usize * inst.outer_stride];
            !outer.is_power_of_two() || outer == inst.result
        })
    }

    fn algebra(&self, dom: &[u16]) -> FiniteAlgebra {
        let nn = self.n * self.n;
        let table = |k: usize| {
            BinaryTable::from_cells(
                self.n,
                dom[k * nn..(k + 1) * nn].iter().map(|d| d.trailing_zeros() as usize).collect(),
            )
        };
        FiniteAlgebra::new(table(0), table(1), table(2)).expect("tables share one order")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SECOND: Duration = Duration::from_secs(1);

    fn query(satisfy: &str, violate: Option<Tag>, order: usize) -> SearchQuery {
        SearchQuery::new(
            IdentitySet::parse_letters(satisfy).unwrap(),
            violate.map(Identity::canonical),
            order,
            Duration::from_secs(30),
        )
    }

    #[test]
    fn every_canonical_identity_has_two_level_shape() {
        for t in Tag::ALL {
            assert!(Pattern::of(&Identity::canonical(t)).is_some(), "{t}");
        }
        assert!(Pattern::of(&"(x*y) = (y*x)".parse().unwrap()).is_none());
    }

    #[test]
    fn trivial_algebra_is_found() {
        let r = find_model(&query("ACBDTR", None, 1)).unwrap();
        assert_eq!(r.outcome, Outcome::Found { algebra: FiniteAlgebra::trivial() });
    }

    #[test]
    fn ab_without_c_at_order_two() {
        let r = find_model(&query("AB", Some(Tag::C), 2)).unwrap();
        let alg = r.outcome.model().expect("model exists");
        assert!(holds(&Identity::canonical(Tag::A), alg));
        assert!(holds(&Identity::canonical(Tag::B), alg));
        assert!(!holds(&Identity::canonical(Tag::C), alg));
    }

    #[test]
    fn evans_quasigroups_satisfy_t() {
        for order in 1..=4 {
            let r = find_model(&query("ACBD", Some(Tag::T), order)).unwrap();
            assert_eq!(r.outcome, Outcome::Exhausted, "order {order}");
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_models(IdentitySet::ALL, 1), Ok(1));
        assert_eq!(count_models(IdentitySet::parse_letters("ACBD").unwrap(), 2), Ok(2));
        // Every triple of order 1 and 2 satisfies the empty set.
        assert_eq!(count_models(IdentitySet::EMPTY, 1), Ok(1));
        assert_eq!(count_models(IdentitySet::EMPTY, 2), Ok(4096));
    }

    #[test]
    fn guards() {
        assert_eq!(count_models(IdentitySet::EMPTY, 6), Err(SearchError::CountTooLarge(6)));
        assert_eq!(count_models(IdentitySet::ALL, 0), Err(SearchError::InfeasibleOrder(0)));
        let mut q = query("A", None, 0);
        assert_eq!(find_model(&q).unwrap_err(), SearchError::InfeasibleOrder(0));
        q.order = 2;
        q.time_budget_ms = 0;
        assert_eq!(find_model(&q).unwrap_err(), SearchError::ZeroBudget);
    }

    #[test]
    fn entailment_examples() {
        let ct = IdentitySet::parse_letters("CT").unwrap();
        assert_eq!(
            entailed_finitely(ct, &Identity::canonical(Tag::A), 4, SECOND * 10).unwrap(),
            FiniteEntailment::Unrefuted { max_order: 4, timed_out: vec![] }
        );
        let ab = IdentitySet::parse_letters("AB").unwrap();
        match entailed_finitely(ab, &Identity::canonical(Tag::C), 2, SECOND).unwrap() {
            FiniteEntailment::No { order, .. } => assert_eq!(order, 2),
            other => panic!("expected countermodel, got {other:?}"),
        }
        let acb = IdentitySet::parse_letters("ACB").unwrap();
        assert!(!entailed_finitely(acb, &Identity::canonical(Tag::D), 4, SECOND * 10)
            .unwrap()
            .is_refuted());
    }

    #[test]
    fn tiny_budget_times_out() {
        // Unconstrained order 5 with an unsatisfiable violation target.
        let q = SearchQuery {
            satisfy: IdentitySet::EMPTY,
            violate: Some("x = x".parse().unwrap()),
            order: 5,
            time_budget_ms: 1,
        };
        assert_eq!(find_model(&q).unwrap().outcome, Outcome::Timeout);
    }

    #[test]
    fn result_json_shape() {
        let r = find_model(&query("ACBDTR", None, 1)).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(
            text,
            format!(r#"{{"outcome":"FOUND","algebra":{},"nodes":{}}}"#, FiniteAlgebra::trivial().to_json(), r.stats.nodes)
        );
        let back: SearchResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back.outcome, r.outcome);
    }
}
