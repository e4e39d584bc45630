//! The refined process semantics against the ordinary one.
//!
//! Refined labels carry enough structure to be reversible; forgetting
//! that structure must give back exactly the ordinary labelled semantics,
//! state for state. Random closed processes provide the population, and
//! the ordinary semantics is computed by its own direct recursion, not
//! through the refined one.

mod common;

use std::collections::BTreeSet;

use rand::rngs::StdRng;
use rand::SeedableRng;

use common::HANDSHAKE;
use revlts::ccs::{
    enumerate_refined, enumerate_standard, interpret_label, parse_label, parse_process, pretty,
    random_process, CcsLts, GenConfig, StandardCcs,
};
use revlts::reversible::{backward, forward};
use revlts::{check_theory, reachable, Configuration, Lts};

fn population(count: usize) -> Vec<revlts::ccs::Process> {
    let config = GenConfig::default();
    (0..count)
        .map(|seed| {
            let mut rng = StdRng::seed_from_u64(seed as u64);
            random_process(&mut rng, &config)
        })
        .collect()
}

fn refined_image(p: &revlts::ccs::Process) -> BTreeSet<(String, String)> {
    let std_ccs = StandardCcs;
    enumerate_refined(p)
        .into_iter()
        .map(|(u, target)| {
            let action = interpret_label(&u).expect("enumerated labels are interpretable");
            (std_ccs.encode_label(&action), pretty(&target))
        })
        .collect()
}

fn standard_image(p: &revlts::ccs::Process) -> BTreeSet<(String, String)> {
    let std_ccs = StandardCcs;
    enumerate_standard(p)
        .into_iter()
        .map(|(action, target)| (std_ccs.encode_label(&action), pretty(&target)))
        .collect()
}

#[test]
fn forgetting_refined_labels_recovers_the_standard_semantics() {
    for p in population(40) {
        assert_eq!(refined_image(&p), standard_image(&p), "on {}", pretty(&p));
    }
}

#[test]
fn the_agreement_persists_under_exploration() {
    let lts = CcsLts;
    for p in population(15) {
        let fragment = reachable(&lts, &p, 3, 500);
        for state in &fragment.states {
            assert_eq!(refined_image(state), standard_image(state), "on {}", pretty(state));
        }
    }
}

#[test]
fn random_processes_satisfy_the_interface_conditions() {
    let lts = CcsLts;
    for p in population(30) {
        let report = check_theory(&lts, std::slice::from_ref(&p), 4, 2_000);
        assert!(report.ok(), "{} violates: {report:?}", pretty(&p));
    }
}

#[test]
fn the_standard_semantics_is_not_codeterministic() {
    let lts = StandardCcs;
    let roots = vec![
        parse_process("a.0").unwrap(),
        parse_process("a.0 + b.0").unwrap(),
    ];
    let report = check_theory(&lts, &roots, 2, 100);
    assert!(
        !report.codeterminism.is_empty(),
        "both roots reach 0 by `a`, which refined labels would keep apart"
    );
    assert!(report.determinism.is_empty());
}

#[test]
fn refined_labels_repair_the_codeterminism_failure() {
    let lts = CcsLts;
    let roots = vec![
        parse_process("a.0").unwrap(),
        parse_process("a.0 + b.0").unwrap(),
    ];
    let report = check_theory(&lts, &roots, 2, 100);
    assert!(report.ok(), "{report:?}");
}

#[test]
fn duplicate_summands_do_not_break_determinism() {
    let lts = CcsLts;
    let p = parse_process("a.0 + a.0").unwrap();
    let report = check_theory(&lts, std::slice::from_ref(&p), 2, 100);
    assert!(report.ok(), "{report:?}");
    // the two picks are distinct labels with distinct indices
    let labels: BTreeSet<String> =
        enumerate_refined(&p).iter().map(|(u, _)| lts.encode_label(u)).collect();
    assert_eq!(labels.len(), 2);
}

#[test]
fn handshake_transitions_undo_exactly() {
    let lts = CcsLts;
    let p = parse_process(HANDSHAKE).unwrap();
    let fragment = reachable(&lts, &p, 6, 1_000);
    assert!(fragment.is_complete());
    for (src, u, tgt) in &fragment.transitions {
        let r = Configuration::init(fragment.states[*src].clone());
        let taken = forward(&lts, &r, u).unwrap();
        assert_eq!(taken.project(), &fragment.states[*tgt]);
        assert_eq!(backward(&lts, &taken, u).unwrap(), r);
    }
}

#[test]
fn enumerated_labels_round_trip_through_their_encoding() {
    let lts = CcsLts;
    for p in population(25) {
        let fragment = reachable(&lts, &p, 2, 300);
        for (_, u, _) in &fragment.transitions {
            let text = lts.encode_label(u);
            let parsed = parse_label(&text)
                .unwrap_or_else(|e| panic!("cannot reparse {text}: {e}"));
            assert_eq!(&parsed, u, "through {text}");
        }
    }
}

#[test]
fn generated_processes_round_trip_through_their_printing() {
    for p in population(60) {
        let text = pretty(&p);
        let reparsed = parse_process(&text)
            .unwrap_or_else(|e| panic!("cannot reparse {text}: {e}"));
        assert_eq!(reparsed, p, "through {text}");
    }
}

#[test]
fn sync_labels_stay_independent_of_disjoint_moves() {
    // in u | (v | w), a sync across the outer bar involving only u and v
    // is independent of a pure w move
    let lts = CcsLts;
    let p = parse_process("a.0 | (~a.0 | b.0)").unwrap();
    let steps = enumerate_refined(&p);
    let sync = steps
        .iter()
        .map(|(u, _)| u)
        .find(|u| lts.encode_label(u) == "(pick(1){a.0}|(pick(1){~a.0}|*))")
        .expect("the handshake across the bar");
    let w_move = steps
        .iter()
        .map(|(u, _)| u)
        .find(|u| lts.encode_label(u) == "(*|(*|pick(1){b.0}))")
        .expect("the pure right move");
    assert!(lts.independent(sync, w_move));
    assert!(!lts.independent(sync, sync));
}
