//! CCS with guarded choice, parallel composition, restriction and
//! recursion, refined so that the transition system is co-deterministic.
//!
//! Plain CCS labels (`a`, `~a`, `tau`) lose too much information to run
//! backwards: knowing that `a` happened does not say which summand of a
//! choice fired or which side of a parallel moved. The labels here record
//! the full derivation instead: a choice label carries the whole summand
//! list and the index taken, parallel labels mark the moving side, and
//! recursion unfolds under a label that is the unfolded process itself.
//! Projecting a refined label back to the action it performs is
//! [`interpret_label`]; forgetting refinement recovers the standard
//! semantics ([`enumerate_standard`]), which [`StandardCcs`] exposes as an
//! ordinary instance for cross-checking.
//!
//! Processes use nameless (de Bruijn) binders for both restriction and
//! recursion variables, so structural equality is exactly alpha
//! equivalence. Free channels and free process variables keep their names.

mod gen;
mod parse;
mod print;
mod semantics;

pub use gen::{random_process, GenConfig};
pub use parse::{parse_label, parse_process, ParseError};
pub use print::{encode_label, pretty};
pub use semantics::{
    enumerate_refined, enumerate_standard, independent, interpret_label,
};

/// A channel: free by name, or bound by the nesting depth of `nu` binders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Chan {
    Free(String),
    Bound(u32),
}

/// An input or output action on a channel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Act {
    In(Chan),
    Out(Chan),
}

impl Act {
    pub fn chan(&self) -> &Chan {
        match self {
            Act::In(c) | Act::Out(c) => c,
        }
    }
}

/// A process variable: free by name, or bound by `rec` nesting depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PVar {
    Free(String),
    Bound(u32),
}

/// A CCS process in nameless form.
///
/// Sums always have at least one summand; the inert process is [`Process::Nil`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Process {
    Nil,
    Sum(Vec<(Act, Process)>),
    Par(Box<Process>, Box<Process>),
    New(Box<Process>),
    Var(PVar),
    Rec(Box<Process>),
}

/// The label of a refined transition; see the module docs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RefinedLabel {
    /// Firing summand `index` (1-based) of the recorded summand list.
    Pick { summands: Vec<(Act, Process)>, index: usize },
    /// The left side of a parallel moved.
    Left(Box<RefinedLabel>),
    /// The right side of a parallel moved.
    Right(Box<RefinedLabel>),
    /// Both sides moved together on complementary actions.
    Sync(Box<RefinedLabel>, Box<RefinedLabel>),
    /// A move under a restriction.
    New(Box<RefinedLabel>),
    /// A recursion unfolded; the payload is the `rec` process itself.
    Unfold(Box<Process>),
}

/// What a transition does, refinement forgotten.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CcsAction {
    In(Chan),
    Out(Chan),
    Tau,
}

/// Substitutes process `q` for every free occurrence of the process
/// variable `x` in `p`.
///
/// Both `p` and `q` are nameless, so bound variables of `p` can never
/// capture names free in `q`.
pub fn substitute(p: &Process, x: &str, q: &Process) -> Process {
    match p {
        Process::Nil => Process::Nil,
        Process::Var(PVar::Free(y)) if y == x => q.clone(),
        Process::Var(v) => Process::Var(v.clone()),
        Process::Sum(summands) => Process::Sum(
            summands.iter().map(|(a, cont)| (a.clone(), substitute(cont, x, q))).collect(),
        ),
        Process::Par(l, r) => {
            Process::Par(Box::new(substitute(l, x, q)), Box::new(substitute(r, x, q)))
        }
        Process::New(body) => Process::New(Box::new(substitute(body, x, q))),
        Process::Rec(body) => Process::Rec(Box::new(substitute(body, x, q))),
    }
}

/// Replaces the variable bound by the removed `rec` binder with `rec_term`
/// and shifts the remaining indices down.
pub(crate) fn open_rec(body: &Process, rec_term: &Process) -> Process {
    fn go(p: &Process, rec_term: &Process, depth: u32) -> Process {
        match p {
            Process::Nil => Process::Nil,
            Process::Var(PVar::Bound(k)) if *k == depth => rec_term.clone(),
            Process::Var(PVar::Bound(k)) if *k > depth => Process::Var(PVar::Bound(k - 1)),
            Process::Var(v) => Process::Var(v.clone()),
            Process::Sum(summands) => Process::Sum(
                summands.iter().map(|(a, cont)| (a.clone(), go(cont, rec_term, depth))).collect(),
            ),
            Process::Par(l, r) => {
                Process::Par(Box::new(go(l, rec_term, depth)), Box::new(go(r, rec_term, depth)))
            }
            Process::New(body) => Process::New(Box::new(go(body, rec_term, depth))),
            Process::Rec(body) => Process::Rec(Box::new(go(body, rec_term, depth + 1))),
        }
    }
    go(body, rec_term, 0)
}

/// Free channel names of a process.
pub fn free_channels(p: &Process) -> std::collections::BTreeSet<String> {
    let mut out = std::collections::BTreeSet::new();
    collect_free_channels(p, &mut out);
    out
}

pub(crate) fn collect_free_channels(p: &Process, out: &mut std::collections::BTreeSet<String>) {
    match p {
        Process::Nil | Process::Var(_) => {}
        Process::Sum(summands) => {
            for (act, cont) in summands {
                if let Chan::Free(name) = act.chan() {
                    out.insert(name.clone());
                }
                collect_free_channels(cont, out);
            }
        }
        Process::Par(l, r) => {
            collect_free_channels(l, out);
            collect_free_channels(r, out);
        }
        Process::New(body) | Process::Rec(body) => collect_free_channels(body, out),
    }
}

/// The refined CCS instance: terms are processes, labels are refined
/// labels, independence says the labels touched disjoint sides of
/// parallels.
#[derive(Debug, Clone, Copy, Default)]
pub struct CcsLts;

impl crate::lts::Lts for CcsLts {
    type Term = Process;
    type Label = RefinedLabel;

    fn enumerate(&self, m: &Process) -> Vec<(RefinedLabel, Process)> {
        enumerate_refined(m)
    }

    fn independent(&self, u: &RefinedLabel, v: &RefinedLabel) -> bool {
        independent(u, v)
    }

    fn encode_label(&self, u: &RefinedLabel) -> String {
        encode_label(u)
    }

    fn encode_term(&self, m: &Process) -> String {
        pretty(m)
    }

    fn parse_label(&self, text: &str) -> Result<RefinedLabel, String> {
        parse_label(text).map_err(|e| e.to_string())
    }
}

/// The standard (unrefined) CCS semantics as an instance of its own.
///
/// Useful as an oracle and as a counterexample generator: with plain
/// action labels the semantics is deterministic only by accident and
/// usually not co-deterministic. No labels are independent here.
#[derive(Debug, Clone, Copy, Default)]
pub struct StandardCcs;

impl crate::lts::Lts for StandardCcs {
    type Term = Process;
    type Label = CcsAction;

    fn enumerate(&self, m: &Process) -> Vec<(CcsAction, Process)> {
        enumerate_standard(m)
    }

    fn independent(&self, _: &CcsAction, _: &CcsAction) -> bool {
        false
    }

    fn encode_label(&self, u: &CcsAction) -> String {
        print::encode_action(u)
    }

    fn encode_term(&self, m: &Process) -> String {
        pretty(m)
    }

    fn parse_label(&self, text: &str) -> Result<CcsAction, String> {
        match text {
            "tau" => Ok(CcsAction::Tau),
            t if t.starts_with('~') => Ok(CcsAction::Out(Chan::Free(t[1..].to_string()))),
            t if !t.is_empty() => Ok(CcsAction::In(Chan::Free(t.to_string()))),
            _ => Err("empty action".to_string()),
        }
    }
}
