//! Fixtures and independent oracles shared by the integration tests.
//!
//! The oracles deliberately avoid the library's own machinery: trace
//! equivalence is decided by closing under adjacent swaps, and valid
//! signed sequences are found by brute-force enumeration. Tests compare
//! the implementation against these definitions.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};
use std::hash::Hash;

use revlts::reversible::{
    backward, enabled_backward, enabled_forward, forward, ValidSequence,
};
use revlts::trace::canonicalize;
use revlts::xmachine::{make_add_assign, make_assign, make_test, Machine, Memory, SharedSystem};
use revlts::{Configuration, Lts, SignedLabel};

/// A transition-less system whose independence relation is an explicit
/// symmetric table over small integer labels. Only the trace layer can be
/// exercised on it.
pub struct TableLts {
    indep: Vec<Vec<bool>>,
}

impl TableLts {
    pub fn new(labels: usize) -> TableLts {
        TableLts { indep: vec![vec![false; labels]; labels] }
    }

    pub fn relate(&mut self, a: u8, b: u8) {
        self.indep[a as usize][b as usize] = true;
        self.indep[b as usize][a as usize] = true;
    }

    pub fn labels(&self) -> std::ops::Range<u8> {
        0..self.indep.len() as u8
    }
}

impl Lts for TableLts {
    type Term = ();
    type Label = u8;

    fn enumerate(&self, _: &()) -> Vec<(u8, ())> {
        Vec::new()
    }

    fn independent(&self, u: &u8, v: &u8) -> bool {
        self.indep[*u as usize][*v as usize]
    }

    fn encode_label(&self, u: &u8) -> String {
        format!("l{u}")
    }

    fn encode_term(&self, _: &()) -> String {
        "()".to_string()
    }

    fn parse_label(&self, text: &str) -> Result<u8, String> {
        text.strip_prefix('l')
            .and_then(|rest| rest.parse().ok())
            .ok_or_else(|| format!("unknown label {text}"))
    }
}

/// The monoid of equivalence classes itself, as a transition system:
/// every label is always enabled and appends to the class. Right
/// cancellation makes it deterministic and co-deterministic, and
/// commuting independent labels is the defining equation, so it is a
/// model of the whole interface with as rich an independence relation as
/// the table allows.
pub struct TraceMonoid {
    pub table: TableLts,
}

impl TraceMonoid {
    pub fn new(table: TableLts) -> TraceMonoid {
        TraceMonoid { table }
    }
}

impl Lts for TraceMonoid {
    type Term = Vec<u8>;
    type Label = u8;

    fn enumerate(&self, m: &Vec<u8>) -> Vec<(u8, Vec<u8>)> {
        self.table
            .labels()
            .map(|l| {
                let mut seq = m.clone();
                seq.push(l);
                (l, canonicalize(&self.table, &seq))
            })
            .collect()
    }

    fn independent(&self, u: &u8, v: &u8) -> bool {
        self.table.independent(u, v)
    }

    fn encode_label(&self, u: &u8) -> String {
        self.table.encode_label(u)
    }

    fn encode_term(&self, m: &Vec<u8>) -> String {
        format!("{m:?}")
    }

    fn parse_label(&self, text: &str) -> Result<u8, String> {
        self.table.parse_label(text)
    }
}

/// Everything reachable from `seq` by swapping adjacent occurrences of
/// distinct independent labels: the defining closure of trace
/// equivalence, computed without reference to normal forms.
pub fn swap_closure<L, F>(independent: F, seq: &[L]) -> HashSet<Vec<L>>
where
    L: Clone + Eq + Hash,
    F: Fn(&L, &L) -> bool,
{
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(seq.to_vec());
    queue.push_back(seq.to_vec());
    while let Some(s) = queue.pop_front() {
        for k in 0..s.len().saturating_sub(1) {
            if s[k] != s[k + 1] && independent(&s[k], &s[k + 1]) {
                let mut t = s.clone();
                t.swap(k, k + 1);
                if seen.insert(t.clone()) {
                    queue.push_back(t);
                }
            }
        }
    }
    seen
}

/// Every valid signed sequence of length at most `max_len` from `r`,
/// paired with its endpoint, found by following every enabled forward
/// and undoable backward label at every prefix.
pub fn all_valid_sequences<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    max_len: usize,
) -> Vec<(Vec<SignedLabel<I::Label>>, Configuration<I::Term, I::Label>)> {
    let mut out = vec![(Vec::new(), r.clone())];
    let mut layer = out.clone();
    for _ in 0..max_len {
        let mut next_layer = Vec::new();
        for (seq, end) in &layer {
            for (u, _) in enabled_forward(lts, end) {
                let next = forward(lts, end, &u).expect("enabled label must step");
                let mut extended = seq.clone();
                extended.push(SignedLabel::Forward(u));
                next_layer.push((extended, next));
            }
            for u in enabled_backward(lts, end) {
                let next = backward(lts, end, &u).expect("maximal label must undo");
                let mut extended = seq.clone();
                extended.push(SignedLabel::Backward(u));
                next_layer.push((extended, next));
            }
        }
        out.extend(next_layer.iter().cloned());
        layer = next_layer;
    }
    out
}

/// [`all_valid_sequences`] packaged as checked [`ValidSequence`] values.
pub fn all_valid_sequences_checked<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    max_len: usize,
) -> Vec<ValidSequence<I::Term, I::Label>> {
    all_valid_sequences(lts, r, max_len)
        .into_iter()
        .map(|(seq, end)| ValidSequence::new(lts, seq, end).expect("enumerated sequence is valid"))
        .collect()
}

fn one_edge_machine(action: &str) -> Machine {
    Machine {
        states: vec!["q0".to_string(), "q1".to_string()],
        initial: vec!["q0".to_string()],
        finals: vec!["q1".to_string()],
        delta: vec![("q0".to_string(), action.to_string(), "q1".to_string())],
    }
}

/// Two one-shot machines copying the first register into the second and
/// third respectively. Their actions read and write disjoint registers,
/// so every pair of cross-machine labels is independent.
pub fn copy_system(initial: &[(&str, u64)]) -> SharedSystem {
    let a = make_assign("a", "x2", "x1", &["x1"]).unwrap();
    let b = make_assign("b", "x3", "x1", &["x1"]).unwrap();
    SharedSystem::new(
        vec![a, b],
        vec![one_edge_machine("a"), one_edge_machine("b")],
        Memory::from_pairs(initial.iter().map(|(k, v)| (k.to_string(), *v))),
    )
    .unwrap()
}

/// Two small imperative programs over one memory: the first increments
/// `x` and then snapshots it into `w`, the second copies `z` into `y` and
/// then tests `z`. Cross-machine actions have disjoint footprints except
/// where both touch nothing shared, so the system exercises genuine
/// concurrency with guards, cumulative updates and assignments at once.
pub fn imperative_system() -> SharedSystem {
    let actions = vec![
        make_add_assign("incx", "x", "1", &[]).unwrap(),
        make_assign("setw", "w", "x", &["x"]).unwrap(),
        make_assign("sety", "y", "z", &["z"]).unwrap(),
        make_test("testz", &["z"], "z == 2").unwrap(),
    ];
    let first = Machine {
        states: vec!["a0".to_string(), "a1".to_string(), "a2".to_string()],
        initial: vec!["a0".to_string()],
        finals: vec!["a2".to_string()],
        delta: vec![
            ("a0".to_string(), "incx".to_string(), "a1".to_string()),
            ("a1".to_string(), "setw".to_string(), "a2".to_string()),
        ],
    };
    let second = Machine {
        states: vec!["b0".to_string(), "b1".to_string(), "b2".to_string()],
        initial: vec!["b0".to_string()],
        finals: vec!["b2".to_string()],
        delta: vec![
            ("b0".to_string(), "sety".to_string(), "b1".to_string()),
            ("b1".to_string(), "testz".to_string(), "b2".to_string()),
        ],
    };
    SharedSystem::new(
        actions,
        vec![first, second],
        Memory::from_pairs([("z".to_string(), 2)]),
    )
    .unwrap()
}

/// Every memory over `vars` with values drawn from `values`.
pub fn memory_grid(vars: &[&str], values: &[u64]) -> Vec<Memory> {
    let mut out = vec![Memory::new()];
    for var in vars {
        let mut next = Vec::new();
        for memory in &out {
            for &value in values {
                next.push(memory.set(var, value));
            }
        }
        out = next;
    }
    out
}

/// The two-component handshake process used throughout the executable
/// examples.
pub const HANDSHAKE: &str = "a.b.0 | ~b.c.0";
