use birkhoff_core::classification::{classify_all, ClassificationReport, ClassifyParams, Status};
use birkhoff_core::identities::{satisfied_identities, IdentitySet};
use std::sync::OnceLock;

fn report() -> &'static ClassificationReport {
    static R: OnceLock<ClassificationReport> = OnceLock::new();
    R.get_or_init(|| classify_all(ClassifyParams { max_order: 3, budget_ms: 10_000 }).unwrap())
}

fn rank(s: &Status) -> u8 {
    match s {
        Status::NotDefining { .. } => 0,
        Status::UndeterminedFinite { .. } => 1,
        Status::Defining { .. } => 2,
    }
}

#[test]
fn every_entry_carries_valid_evidence() {
    let r = report();
    assert_eq!(r.entries.len(), 64);
    for e in &r.entries {
        e.recheck().unwrap_or_else(|err| panic!("{}: {err}", e.subset));
        assert!(e.timeouts.is_empty(), "{}", e.subset);
    }
}

#[test]
fn countermodels_violate_the_named_identity_only_beyond_the_subset() {
    for e in &report().entries {
        if let Status::NotDefining { violated, countermodel, .. } = &e.status {
            let sat = satisfied_identities(countermodel);
            assert!(e.subset.is_subset(sat));
            assert!(!sat.contains(*violated));
        }
    }
}

#[test]
fn status_is_monotone_in_the_subset() {
    let r = report();
    for s in IdentitySet::all_subsets() {
        for t in IdentitySet::all_subsets().filter(|t| s.is_subset(*t)) {
            assert!(
                rank(&r.entry(s).status) <= rank(&r.entry(t).status),
                "{s} is {} but its superset {t} is {}",
                r.entry(s).status.label(),
                r.entry(t).status.label()
            );
        }
    }
}

#[test]
fn summary_counts_add_up() {
    let r = report();
    let s = &r.summary;
    assert_eq!(s.defining + s.not_defining + s.undetermined_finite, 64);
}

#[test]
fn json_report_round_trips() {
    let r = report();
    let back: ClassificationReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(&back, r);
}

#[test]
fn no_small_set_is_defining() {
    for s in IdentitySet::all_subsets().filter(|s| s.len() <= 2) {
        assert!(!report().entry(s).status.is_defining(), "{s}");
    }
}
