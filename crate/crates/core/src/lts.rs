//! The contract a transition system must satisfy to be made reversible,
//! plus bounded exploration and a checker for the contract itself.
//!
//! An instance provides its transition relation through [`Lts::enumerate`]
//! and an independence relation on labels through [`Lts::independent`].
//! The reversible construction is sound when three properties hold:
//!
//! * determinism: a term has at most one successor per label;
//! * co-determinism: a term has at most one predecessor per label;
//! * co-diamond: if `M1 -u-> M2 -v-> M3` and `u` is independent of `v`,
//!   then `M1 -v-> M2' -u-> M3` for some `M2'`.
//!
//! None of these are assumed: [`check_theory`] explores a bounded fragment
//! and reports every violation it can find, so untrusted instances (for
//! example models loaded from a file) can be vetted before use.

use std::collections::{HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

/// Default exploration depth for [`reachable`] and [`check_theory`].
pub const DEFAULT_DEPTH: usize = 6;

/// Default soft cap on the number of explored states.
pub const DEFAULT_STATE_CAP: usize = 10_000;

/// A labelled transition system with an independence relation on labels.
///
/// `enumerate` and `independent` must be pure: the same inputs always give
/// the same results. `independent` must be symmetric. Labels must encode
/// injectively; the encoding doubles as the total order used wherever a
/// deterministic ordering is needed, and `parse_label` must round-trip it.
pub trait Lts {
    type Term: Clone + Eq + Hash + Debug;
    type Label: Clone + Eq + Hash + Debug;

    /// All transitions enabled in `m`, as (label, successor) pairs.
    /// Duplicate pairs are allowed and are treated as a set.
    fn enumerate(&self, m: &Self::Term) -> Vec<(Self::Label, Self::Term)>;

    /// Whether two labels are independent.
    fn independent(&self, u: &Self::Label, v: &Self::Label) -> bool;

    /// Canonical textual encoding of a label.
    fn encode_label(&self, u: &Self::Label) -> String;

    /// Canonical textual encoding of a term.
    fn encode_term(&self, m: &Self::Term) -> String;

    /// Parses a label back from its canonical encoding.
    fn parse_label(&self, text: &str) -> Result<Self::Label, String>;
}

/// Errors from single-step execution.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    /// `enumerate` offered more than one distinct successor for one label.
    #[error("determinism violation: {label} has {} successors from {term}", successors.len())]
    DeterminismViolation {
        term: String,
        label: String,
        successors: Vec<String>,
    },
}

/// Follows the unique `u`-transition from `m`, if there is one.
///
/// Returns `Ok(None)` when `u` is not enabled and an error when the
/// instance violates determinism at this term and label.
pub fn step<I: Lts>(lts: &I, m: &I::Term, u: &I::Label) -> Result<Option<I::Term>, StepError> {
    let mut hits: Vec<I::Term> = Vec::new();
    for (label, target) in lts.enumerate(m) {
        if label == *u && !hits.contains(&target) {
            hits.push(target);
        }
    }
    match hits.len() {
        0 => Ok(None),
        1 => Ok(hits.pop().map(Some).unwrap()),
        _ => Err(StepError::DeterminismViolation {
            term: lts.encode_term(m),
            label: lts.encode_label(u),
            successors: hits.iter().map(|t| lts.encode_term(t)).collect(),
        }),
    }
}

/// A bounded fragment of the state space, produced by [`reachable`].
///
/// `states` lists every discovered term in discovery order; `transitions`
/// refer to states by index and cover exactly the expanded states; the
/// `frontier` indexes states that were discovered but not expanded because
/// the depth or state cap was reached.
#[derive(Debug, Clone)]
pub struct Fragment<T, L> {
    pub states: Vec<T>,
    pub transitions: Vec<(usize, L, usize)>,
    pub frontier: Vec<usize>,
}

impl<T, L> Fragment<T, L> {
    /// True when every discovered state was expanded, i.e. the fragment is
    /// the full reachable state space.
    pub fn is_complete(&self) -> bool {
        self.frontier.is_empty()
    }
}

/// Explores breadth-first from `root`, expanding states up to `depth` steps
/// away, stopping early once `cap` states have been discovered.
pub fn reachable<I: Lts>(
    lts: &I,
    root: &I::Term,
    depth: usize,
    cap: usize,
) -> Fragment<I::Term, I::Label> {
    explore(lts, std::slice::from_ref(root), depth, cap)
}

fn explore<I: Lts>(lts: &I, roots: &[I::Term], depth: usize, cap: usize) -> Fragment<I::Term, I::Label> {
    let mut states: Vec<I::Term> = Vec::new();
    let mut index: HashMap<I::Term, usize> = HashMap::new();
    let mut transitions: Vec<(usize, I::Label, usize)> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();

    for root in roots {
        if !index.contains_key(root) {
            let id = states.len();
            index.insert(root.clone(), id);
            states.push(root.clone());
            queue.push_back((id, 0));
        }
    }

    while let Some((id, dist)) = queue.pop_front() {
        if dist > depth || states.len() >= cap {
            frontier.push(id);
            continue;
        }
        let mut succs = lts.enumerate(&states[id]);
        succs.sort_by_key(|(label, _)| lts.encode_label(label));
        succs.dedup();
        for (label, target) in succs {
            let tid = match index.get(&target) {
                Some(&tid) => tid,
                None => {
                    let tid = states.len();
                    index.insert(target.clone(), tid);
                    states.push(target);
                    queue.push_back((tid, dist + 1));
                    tid
                }
            };
            let edge = (id, label, tid);
            if !transitions.contains(&edge) {
                transitions.push(edge);
            }
        }
    }

    frontier.sort_unstable();
    frontier.dedup();
    Fragment { states, transitions, frontier }
}

/// A determinism counterexample: one label, several successors.
#[derive(Debug, Clone, Serialize)]
pub struct DeterminismViolation {
    pub term: String,
    pub label: String,
    pub successors: Vec<String>,
}

/// A co-determinism counterexample: several sources reach the same target
/// under the same label.
#[derive(Debug, Clone, Serialize)]
pub struct CodeterminismViolation {
    pub label: String,
    pub target: String,
    pub sources: Vec<String>,
}

/// A co-diamond counterexample: independent labels that do not commute.
#[derive(Debug, Clone, Serialize)]
pub struct CodiamondViolation {
    pub first: String,
    pub label_u: String,
    pub mid: String,
    pub label_v: String,
    pub last: String,
}

/// Result of vetting an instance over a bounded fragment.
///
/// `truncated` is set when the exploration hit the depth or state cap, in
/// which case an empty violation list is evidence but not proof.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryReport {
    pub states: usize,
    pub transitions: usize,
    pub truncated: bool,
    pub determinism: Vec<DeterminismViolation>,
    pub codeterminism: Vec<CodeterminismViolation>,
    pub codiamond: Vec<CodiamondViolation>,
}

impl TheoryReport {
    /// True when no violation of any of the three properties was found.
    pub fn ok(&self) -> bool {
        self.determinism.is_empty() && self.codeterminism.is_empty() && self.codiamond.is_empty()
    }
}

/// Explores from `roots` and checks determinism, co-determinism and the
/// co-diamond property on the explored fragment.
///
/// The co-diamond check may step outside the fragment: when the completing
/// path runs through an unexpanded state the missing transitions are
/// enumerated on demand.
pub fn check_theory<I: Lts>(lts: &I, roots: &[I::Term], depth: usize, cap: usize) -> TheoryReport {
    let fragment = explore(lts, roots, depth, cap);
    let n = fragment.states.len();

    let mut by_source: Vec<Vec<(&I::Label, usize)>> = vec![Vec::new(); n];
    for (src, label, tgt) in &fragment.transitions {
        by_source[*src].push((label, *tgt));
    }

    let mut determinism = Vec::new();
    for (src, outgoing) in by_source.iter().enumerate() {
        let mut by_label: HashMap<&I::Label, Vec<usize>> = HashMap::new();
        for (label, tgt) in outgoing {
            by_label.entry(label).or_default().push(*tgt);
        }
        let mut offenders: Vec<_> = by_label.into_iter().filter(|(_, ts)| ts.len() > 1).collect();
        offenders.sort_by_key(|(label, _)| lts.encode_label(label));
        for (label, mut targets) in offenders {
            targets.sort_by_key(|&t| lts.encode_term(&fragment.states[t]));
            determinism.push(DeterminismViolation {
                term: lts.encode_term(&fragment.states[src]),
                label: lts.encode_label(label),
                successors: targets.iter().map(|&t| lts.encode_term(&fragment.states[t])).collect(),
            });
        }
    }

    let mut by_label_target: HashMap<(&I::Label, usize), Vec<usize>> = HashMap::new();
    for (src, label, tgt) in &fragment.transitions {
        by_label_target.entry((label, *tgt)).or_default().push(*src);
    }
    let mut codeterminism = Vec::new();
    let mut codet_offenders: Vec<_> =
        by_label_target.into_iter().filter(|(_, srcs)| srcs.len() > 1).collect();
    codet_offenders.sort_by_key(|((label, tgt), _)| (lts.encode_label(label), *tgt));
    for ((label, tgt), mut sources) in codet_offenders {
        sources.sort_by_key(|&s| lts.encode_term(&fragment.states[s]));
        codeterminism.push(CodeterminismViolation {
            label: lts.encode_label(label),
            target: lts.encode_term(&fragment.states[tgt]),
            sources: sources.iter().map(|&s| lts.encode_term(&fragment.states[s])).collect(),
        });
    }

    let unexpanded: std::collections::HashSet<usize> = fragment.frontier.iter().copied().collect();
    let mut codiamond = Vec::new();
    for (m1, u, m2) in &fragment.transitions {
        for (v, m3) in &by_source[*m2] {
            if !lts.independent(u, v) {
                continue;
            }
            debug_assert!(lts.independent(v, u), "independence must be symmetric");
            let mid = by_source[*m1].iter().find(|(label, _)| *label == *v).map(|(_, t)| *t);
            let completes = match mid {
                Some(m2p) if unexpanded.contains(&m2p) => {
                    let m3_term = &fragment.states[*m3];
                    lts.enumerate(&fragment.states[m2p]).iter().any(|(l, t)| l == u && t == m3_term)
                }
                Some(m2p) => by_source[m2p].iter().any(|(l, t)| *l == u && *t == *m3),
                None => false,
            };
            if !completes {
                codiamond.push(CodiamondViolation {
                    first: lts.encode_term(&fragment.states[*m1]),
                    label_u: lts.encode_label(u),
                    mid: lts.encode_term(&fragment.states[*m2]),
                    label_v: lts.encode_label(v),
                    last: lts.encode_term(&fragment.states[*m3]),
                });
            }
        }
    }

    TheoryReport {
        states: fragment.states.len(),
        transitions: fragment.transitions.len(),
        truncated: !fragment.frontier.is_empty(),
        determinism,
        codeterminism,
        codiamond,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A finite graph with explicitly listed edges and independence.
    struct Graph {
        edges: Vec<(u32, &'static str, u32)>,
        indep: Vec<(&'static str, &'static str)>,
    }

    impl Lts for Graph {
        type Term = u32;
        type Label = &'static str;

        fn enumerate(&self, m: &u32) -> Vec<(&'static str, u32)> {
            self.edges.iter().filter(|(s, _, _)| s == m).map(|(_, l, t)| (*l, *t)).collect()
        }

        fn independent(&self, u: &&'static str, v: &&'static str) -> bool {
            self.indep.iter().any(|(a, b)| (a == u && b == v) || (a == v && b == u))
        }

        fn encode_label(&self, u: &&'static str) -> String {
            (*u).to_string()
        }

        fn encode_term(&self, m: &u32) -> String {
            m.to_string()
        }

        fn parse_label(&self, text: &str) -> Result<&'static str, String> {
            self.edges
                .iter()
                .map(|(_, l, _)| *l)
                .find(|l| *l == text)
                .ok_or_else(|| format!("unknown label {text}"))
        }
    }

    fn diamond() -> Graph {
        Graph {
            edges: vec![(0, "u", 1), (0, "v", 2), (1, "v", 3), (2, "u", 3)],
            indep: vec![("u", "v")],
        }
    }

    #[test]
    fn step_follows_unique_successor() {
        let g = diamond();
        assert_eq!(step(&g, &0, &"u").unwrap(), Some(1));
        assert_eq!(step(&g, &3, &"u").unwrap(), None);
    }

    #[test]
    fn step_reports_determinism_violation() {
        let g = Graph { edges: vec![(0, "u", 1), (0, "u", 2)], indep: vec![] };
        let err = step(&g, &0, &"u").unwrap_err();
        match err {
            StepError::DeterminismViolation { successors, .. } => assert_eq!(successors.len(), 2),
        }
    }

    #[test]
    fn step_collapses_duplicate_transitions() {
        let g = Graph { edges: vec![(0, "u", 1), (0, "u", 1)], indep: vec![] };
        assert_eq!(step(&g, &0, &"u").unwrap(), Some(1));
    }

    #[test]
    fn reachable_expands_to_depth_and_flags_frontier() {
        let g = Graph {
            edges: vec![(0, "a", 1), (1, "b", 2), (2, "c", 3)],
            indep: vec![],
        };
        let all = reachable(&g, &0, 6, DEFAULT_STATE_CAP);
        assert_eq!(all.states.len(), 4);
        assert_eq!(all.transitions.len(), 3);
        assert!(all.is_complete());

        let cut = reachable(&g, &0, 1, DEFAULT_STATE_CAP);
        assert_eq!(cut.states.len(), 3);
        assert_eq!(cut.transitions.len(), 2);
        assert_eq!(cut.frontier, vec![2]);
    }

    #[test]
    fn reachable_respects_state_cap() {
        let g = Graph {
            edges: vec![(0, "a", 1), (0, "b", 2), (1, "c", 3), (2, "d", 4)],
            indep: vec![],
        };
        let cut = reachable(&g, &0, 6, 3);
        assert!(cut.states.len() <= 4);
        assert!(!cut.is_complete());
    }

    #[test]
    fn check_theory_accepts_a_commuting_diamond() {
        let report = check_theory(&diamond(), &[0], 6, DEFAULT_STATE_CAP);
        assert!(report.ok(), "{report:?}");
        assert_eq!(report.states, 4);
        assert_eq!(report.transitions, 4);
        assert!(!report.truncated);
    }

    #[test]
    fn check_theory_reports_missing_codiamond_completion() {
        // u and v declared independent but v·u from 0 does not close the square
        let g = Graph {
            edges: vec![(0, "u", 1), (0, "v", 2), (1, "v", 3), (2, "u", 4)],
            indep: vec![("u", "v")],
        };
        let report = check_theory(&g, &[0], 6, DEFAULT_STATE_CAP);
        assert_eq!(report.codiamond.len(), 2);
        assert!(report.determinism.is_empty());
    }

    #[test]
    fn check_theory_reports_codeterminism_collision() {
        let g = Graph { edges: vec![(0, "a", 2), (1, "a", 2)], indep: vec![] };
        let report = check_theory(&g, &[0, 1], 6, DEFAULT_STATE_CAP);
        assert_eq!(report.codeterminism.len(), 1);
        assert_eq!(report.codeterminism[0].sources, vec!["0", "1"]);
    }

    #[test]
    fn check_theory_completes_codiamond_through_frontier() {
        // depth 1 leaves state 2 unexpanded; the completion 2 -u-> 3 is
        // found by enumerating on demand
        let g = diamond();
        let report = check_theory(&g, &[0], 1, DEFAULT_STATE_CAP);
        assert!(report.ok(), "{report:?}");
        assert!(report.truncated);
    }
}
