//! Shared-memory machine systems with reversible refined actions.
//!
//! A system is a finite set of machines over one memory. Each transition
//! carries a refined action: a partial function on memories indexed so
//! that every applied step can be undone exactly. Assignments record the
//! overwritten value as the index, guarded tests and cumulative updates
//! need no record at all, and table actions spell out their behaviour
//! piece by piece.
//!
//! System labels name the machine, the edge, and the chosen index, which
//! makes the whole system deterministic and co-deterministic whenever the
//! individual actions are honest about what they read and write.

mod expr;
mod model;

pub use expr::{parse_expr, parse_pred, CmpOp, Expr, ExprError, Pred};
pub use model::{parse_system, ModelError};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lts::Lts;

/// Finite-support valuation of registers; unmentioned registers are 0.
///
/// Zero entries are pruned on construction so memories compare and hash
/// by the valuation they denote, not by which registers happen to be
/// spelled out.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Memory {
    entries: BTreeMap<String, u64>,
}

impl Memory {
    pub fn new() -> Memory {
        Memory::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (String, u64)>) -> Memory {
        let mut memory = Memory::new();
        for (var, value) in pairs {
            if value != 0 {
                memory.entries.insert(var, value);
            }
        }
        memory
    }

    pub fn get(&self, var: &str) -> u64 {
        self.entries.get(var).copied().unwrap_or(0)
    }

    /// A copy of this memory with `var` set to `value`.
    pub fn set(&self, var: &str, value: u64) -> Memory {
        let mut next = self.clone();
        if value == 0 {
            next.entries.remove(var);
        } else {
            next.entries.insert(var.to_string(), value);
        }
        next
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn encode(&self) -> String {
        let body: Vec<String> =
            self.entries.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        format!("{{{}}}", body.join(","))
    }
}

/// What a step had to remember to stay invertible.
///
/// `Unit` is the trivial record for actions that are injective on their
/// own; `Nat` stores one natural, e.g. the value an assignment destroyed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Unit,
    Nat(u64),
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Unit => write!(f, "_"),
            Index::Nat(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum ActionKind {
    /// `target := expr`; the index remembers the overwritten value.
    Assign { target: String, expr: Expr, sources: Vec<String> },
    /// `target += expr` where `expr` must not read `target`; inverted by
    /// subtracting the same amount.
    AddAssign { target: String, expr: Expr, sources: Vec<String> },
    /// Identity on memories satisfying the predicate, undefined elsewhere.
    Test { sources: Vec<String>, pred: Pred },
    /// Explicit graph, one injective piece per index.
    Table { pieces: BTreeMap<u64, Vec<(Memory, Memory)>> },
}

/// An invertible indexed update of the shared memory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RefinedAction {
    id: String,
    kind: ActionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("malformed expression: {0}")]
    MalformedExpression(ExprError),
    #[error("malformed predicate: {0}")]
    MalformedPredicate(ExprError),
    #[error("`{target}` is listed among its own sources; a cumulative update must not read its target")]
    TargetInSources { target: String },
    #[error("piece {index} is not invertible: two entries share the same {side} memory")]
    PieceNotInjective { index: u64, side: &'static str },
}

/// `target := expr`. The declared `sources` are trusted to cover every
/// register the expression reads; nothing checks them here, and a wrong
/// declaration surfaces later as a failed commutation or theory check.
pub fn make_assign(
    id: &str,
    target: &str,
    expr: &str,
    sources: &[&str],
) -> Result<RefinedAction, ActionError> {
    let expr = parse_expr(expr).map_err(ActionError::MalformedExpression)?;
    Ok(RefinedAction {
        id: id.to_string(),
        kind: ActionKind::Assign {
            target: target.to_string(),
            expr,
            sources: sources.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// `target += expr`. Rejects a `sources` list containing the target,
/// since the inverse relies on the added amount being recomputable after
/// the update.
pub fn make_add_assign(
    id: &str,
    target: &str,
    expr: &str,
    sources: &[&str],
) -> Result<RefinedAction, ActionError> {
    if sources.contains(&target) {
        return Err(ActionError::TargetInSources { target: target.to_string() });
    }
    let expr = parse_expr(expr).map_err(ActionError::MalformedExpression)?;
    Ok(RefinedAction {
        id: id.to_string(),
        kind: ActionKind::AddAssign {
            target: target.to_string(),
            expr,
            sources: sources.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// A guard: the identity on memories where `pred` holds.
pub fn make_test(id: &str, sources: &[&str], pred: &str) -> Result<RefinedAction, ActionError> {
    let pred = parse_pred(pred).map_err(ActionError::MalformedPredicate)?;
    Ok(RefinedAction {
        id: id.to_string(),
        kind: ActionKind::Test {
            sources: sources.iter().map(|s| s.to_string()).collect(),
            pred,
        },
    })
}

/// An action given extensionally: for each index a list of
/// (before, after) pairs. Every piece must be injective in both
/// directions so the action stays invertible. Table actions declare no
/// read/write sets, so nothing is ever syntactically independent of them.
pub fn make_table(
    id: &str,
    pieces: impl IntoIterator<Item = (u64, Vec<(Memory, Memory)>)>,
) -> Result<RefinedAction, ActionError> {
    let pieces: BTreeMap<u64, Vec<(Memory, Memory)>> = pieces.into_iter().collect();
    for (&index, entries) in &pieces {
        let mut froms = BTreeSet::new();
        let mut tos = BTreeSet::new();
        for (from, to) in entries {
            if !froms.insert(from) {
                return Err(ActionError::PieceNotInjective { index, side: "before" });
            }
            if !tos.insert(to) {
                return Err(ActionError::PieceNotInjective { index, side: "after" });
            }
        }
    }
    Ok(RefinedAction { id: id.to_string(), kind: ActionKind::Table { pieces } })
}

impl RefinedAction {
    pub fn id(&self) -> &str {
        &self.id
    }

    /// Run the piece named by `index` at `memory`, if defined there.
    pub fn apply(&self, index: &Index, memory: &Memory) -> Option<Memory> {
        match &self.kind {
            ActionKind::Assign { target, expr, .. } => match index {
                Index::Nat(overwritten) if memory.get(target) == *overwritten => {
                    Some(memory.set(target, expr.eval(memory)))
                }
                _ => None,
            },
            ActionKind::AddAssign { target, expr, .. } => match index {
                Index::Unit => {
                    let sum = memory.get(target).saturating_add(expr.eval(memory));
                    Some(memory.set(target, sum))
                }
                _ => None,
            },
            ActionKind::Test { pred, .. } => match index {
                Index::Unit if pred.eval(memory) => Some(memory.clone()),
                _ => None,
            },
            ActionKind::Table { pieces } => match index {
                Index::Nat(i) => pieces
                    .get(i)?
                    .iter()
                    .find(|(from, _)| from == memory)
                    .map(|(_, to)| to.clone()),
                Index::Unit => None,
            },
        }
    }

    /// Invert the piece named by `index` at `memory`, if `memory` is in
    /// its range. For every action built here,
    /// `unapply(i, apply(i, m)) == m` and `apply(i, unapply(i, m)) == m`
    /// whenever the inner call is defined.
    pub fn unapply(&self, index: &Index, memory: &Memory) -> Option<Memory> {
        match &self.kind {
            ActionKind::Assign { target, expr, .. } => match index {
                Index::Nat(overwritten) => {
                    let candidate = memory.set(target, *overwritten);
                    (expr.eval(&candidate) == memory.get(target)).then_some(candidate)
                }
                _ => None,
            },
            ActionKind::AddAssign { target, expr, .. } => match index {
                Index::Unit => {
                    let added = expr.eval(memory);
                    let current = memory.get(target);
                    (current >= added).then(|| memory.set(target, current - added))
                }
                _ => None,
            },
            ActionKind::Test { .. } => self.apply(index, memory),
            ActionKind::Table { pieces } => match index {
                Index::Nat(i) => pieces
                    .get(i)?
                    .iter()
                    .find(|(_, to)| to == memory)
                    .map(|(from, _)| from.clone()),
                Index::Unit => None,
            },
        }
    }

    /// The indices whose piece might be defined at `memory`. Finite for
    /// every kind: an assignment's index is forced to the current target
    /// value, the others are fixed up front.
    pub fn applicable_indices(&self, memory: &Memory) -> Vec<Index> {
        match &self.kind {
            ActionKind::Assign { target, .. } => vec![Index::Nat(memory.get(target))],
            ActionKind::AddAssign { .. } | ActionKind::Test { .. } => vec![Index::Unit],
            ActionKind::Table { pieces } => pieces
                .iter()
                .filter(|(_, entries)| entries.iter().any(|(from, _)| from == memory))
                .map(|(&i, _)| Index::Nat(i))
                .collect(),
        }
    }

    /// Declared read set, absent for table actions.
    pub fn read_vars(&self) -> Option<BTreeSet<String>> {
        match &self.kind {
            ActionKind::Assign { sources, .. }
            | ActionKind::AddAssign { sources, .. }
            | ActionKind::Test { sources, .. } => {
                Some(sources.iter().cloned().collect())
            }
            ActionKind::Table { .. } => None,
        }
    }

    /// Declared write set, absent for table actions.
    pub fn write_vars(&self) -> Option<BTreeSet<String>> {
        match &self.kind {
            ActionKind::Assign { target, .. } | ActionKind::AddAssign { target, .. } => {
                Some(BTreeSet::from([target.clone()]))
            }
            ActionKind::Test { .. } => Some(BTreeSet::new()),
            ActionKind::Table { .. } => None,
        }
    }
}

/// Disjointness of declared footprints: neither action reads what the
/// other writes, and they write disjoint registers. False whenever either
/// action lacks declared sets.
pub fn syntactic_independent(a: &RefinedAction, b: &RefinedAction) -> bool {
    match (a.read_vars(), a.write_vars(), b.read_vars(), b.write_vars()) {
        (Some(ra), Some(wa), Some(rb), Some(wb)) => {
            ra.is_disjoint(&wb) && rb.is_disjoint(&wa) && wa.is_disjoint(&wb)
        }
        _ => false,
    }
}

/// A memory on which the two composition orders disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationWitness {
    pub memory: Memory,
    pub a_then_b: Option<Memory>,
    pub b_then_a: Option<Memory>,
}

/// Compare `b∘a` against `a∘b` (as partial functions, undefined included)
/// pointwise over `memories`. `Ok(())` means the two orders agree
/// everywhere in the sample.
pub fn commutation_check(
    a: &RefinedAction,
    i: &Index,
    b: &RefinedAction,
    j: &Index,
    memories: &[Memory],
) -> Result<(), Vec<CommutationWitness>> {
    let mut witnesses = Vec::new();
    for memory in memories {
        let a_then_b = a.apply(i, memory).and_then(|m| b.apply(j, &m));
        let b_then_a = b.apply(j, memory).and_then(|m| a.apply(i, &m));
        if a_then_b != b_then_a {
            witnesses.push(CommutationWitness {
                memory: memory.clone(),
                a_then_b,
                b_then_a,
            });
        }
    }
    if witnesses.is_empty() {
        Ok(())
    } else {
        Err(witnesses)
    }
}

/// Control component: a finite automaton whose edges name actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub finals: Vec<String>,
    pub delta: Vec<(String, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SystemError {
    #[error("two actions share the id `{0}`")]
    DuplicateAction(String),
    #[error("machine {machine}: state `{state}` is not declared")]
    UnknownState { machine: usize, state: String },
    #[error("machine {machine}: transition names unknown action `{action}`")]
    UnknownAction { machine: usize, action: String },
    #[error("machine {machine}: state `{state}` is declared twice")]
    DuplicateState { machine: usize, state: String },
}

/// A fixed action vocabulary, a list of machines over it, and the memory
/// they start from.
#[derive(Debug, Clone)]
pub struct SharedSystem {
    actions: Vec<RefinedAction>,
    machines: Vec<Machine>,
    initial_memory: Memory,
}

impl SharedSystem {
    pub fn new(
        actions: Vec<RefinedAction>,
        machines: Vec<Machine>,
        initial_memory: Memory,
    ) -> Result<SharedSystem, SystemError> {
        let mut ids = BTreeSet::new();
        for action in &actions {
            if !ids.insert(action.id.as_str()) {
                return Err(SystemError::DuplicateAction(action.id.clone()));
            }
        }
        for (k, machine) in machines.iter().enumerate() {
            let machine_no = k + 1;
            let mut states = BTreeSet::new();
            for state in &machine.states {
                if !states.insert(state.as_str()) {
                    return Err(SystemError::DuplicateState {
                        machine: machine_no,
                        state: state.clone(),
                    });
                }
            }
            let check_state = |state: &String| {
                if states.contains(state.as_str()) {
                    Ok(())
                } else {
                    Err(SystemError::UnknownState {
                        machine: machine_no,
                        state: state.clone(),
                    })
                }
            };
            machine.initial.iter().try_for_each(check_state)?;
            machine.finals.iter().try_for_each(check_state)?;
            for (from, action, to) in &machine.delta {
                check_state(from)?;
                check_state(to)?;
                if !ids.contains(action.as_str()) {
                    return Err(SystemError::UnknownAction {
                        machine: machine_no,
                        action: action.clone(),
                    });
                }
            }
        }
        Ok(SharedSystem { actions, machines, initial_memory })
    }

    pub fn action(&self, id: &str) -> Option<&RefinedAction> {
        self.actions.iter().find(|a| a.id == id)
    }

    pub fn machines(&self) -> &[Machine] {
        &self.machines
    }

    pub fn initial_memory(&self) -> &Memory {
        &self.initial_memory
    }

    /// Every combination of initial control states, over the initial
    /// memory.
    pub fn initial_terms(&self) -> Vec<SystemTerm> {
        let mut combos = vec![Vec::new()];
        for machine in &self.machines {
            let mut next = Vec::new();
            for combo in &combos {
                for state in &machine.initial {
                    let mut extended = combo.clone();
                    extended.push(state.clone());
                    next.push(extended);
                }
            }
            combos = next;
        }
        combos
            .into_iter()
            .map(|states| SystemTerm { states, memory: self.initial_memory.clone() })
            .collect()
    }

    /// Whether every machine sits in one of its final states. Finality
    /// never blocks further steps; it is reported, not enforced.
    pub fn in_final_states(&self, term: &SystemTerm) -> bool {
        self.machines
            .iter()
            .zip(&term.states)
            .all(|(machine, state)| machine.finals.contains(state))
    }

    /// All steps available at `term`: for each machine, each outgoing
    /// edge of its current state, each applicable index of the edge's
    /// action that is actually defined at the current memory.
    pub fn enumerate_system(&self, term: &SystemTerm) -> Vec<(SystemLabel, SystemTerm)> {
        let mut out = Vec::new();
        for (k, machine) in self.machines.iter().enumerate() {
            let here = &term.states[k];
            for (from, action_id, to) in &machine.delta {
                if from != here {
                    continue;
                }
                let action = self
                    .action(action_id)
                    .expect("validated at construction");
                for index in action.applicable_indices(&term.memory) {
                    if let Some(memory) = action.apply(&index, &term.memory) {
                        let mut states = term.states.clone();
                        states[k] = to.clone();
                        out.push((
                            SystemLabel {
                                machine: k,
                                from: from.clone(),
                                action: action_id.clone(),
                                to: to.clone(),
                                index,
                            },
                            SystemTerm { states, memory },
                        ));
                    }
                }
            }
        }
        out
    }

    /// Labels of different machines whose actions have disjoint declared
    /// footprints.
    pub fn independent_labels(&self, u: &SystemLabel, v: &SystemLabel) -> bool {
        if u.machine == v.machine {
            return false;
        }
        match (self.action(&u.action), self.action(&v.action)) {
            (Some(a), Some(b)) => syntactic_independent(a, b),
            _ => false,
        }
    }
}

/// One control state per machine plus the shared memory.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemTerm {
    pub states: Vec<String>,
    pub memory: Memory,
}

impl SystemTerm {
    pub fn encode(&self) -> String {
        let mut parts = self.states.clone();
        parts.push(self.memory.encode());
        format!("({})", parts.join(","))
    }
}

/// A step record: which machine moved along which edge, and the index
/// its action consumed. Machines are numbered from 1 in the encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemLabel {
    pub machine: usize,
    pub from: String,
    pub action: String,
    pub to: String,
    pub index: Index,
}

impl SystemLabel {
    pub fn encode(&self) -> String {
        format!(
            "({},{},{},{},{})",
            self.machine + 1,
            self.from,
            self.action,
            self.to,
            self.index
        )
    }
}

impl Lts for SharedSystem {
    type Term = SystemTerm;
    type Label = SystemLabel;

    fn enumerate(&self, term: &SystemTerm) -> Vec<(SystemLabel, SystemTerm)> {
        self.enumerate_system(term)
    }

    fn independent(&self, u: &SystemLabel, v: &SystemLabel) -> bool {
        self.independent_labels(u, v)
    }

    fn encode_label(&self, label: &SystemLabel) -> String {
        label.encode()
    }

    fn encode_term(&self, term: &SystemTerm) -> String {
        term.encode()
    }

    fn parse_label(&self, text: &str) -> Result<SystemLabel, String> {
        let trimmed = text.trim();
        let body = trimmed
            .strip_prefix('(')
            .and_then(|rest| rest.strip_suffix(')'))
            .ok_or_else(|| format!("expected a parenthesised label, found `{trimmed}`"))?;
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(format!(
                "expected 5 comma-separated fields in `{trimmed}`, found {}",
                parts.len()
            ));
        }
        let machine_no: usize = parts[0]
            .parse()
            .map_err(|_| format!("`{}` is not a machine number", parts[0]))?;
        if machine_no == 0 || machine_no > self.machines.len() {
            return Err(format!(
                "machine number {machine_no} is out of range 1..={}",
                self.machines.len()
            ));
        }
        let index = if parts[4] == "_" {
            Index::Unit
        } else {
            Index::Nat(
                parts[4]
                    .parse()
                    .map_err(|_| format!("`{}` is not an index", parts[4]))?,
            )
        };
        let machine = &self.machines[machine_no - 1];
        let edge = (
            parts[1].to_string(),
            parts[2].to_string(),
            parts[3].to_string(),
        );
        if !machine.delta.contains(&edge) {
            return Err(format!(
                "machine {machine_no} has no transition {} -{}-> {}",
                parts[1], parts[2], parts[3]
            ));
        }
        Ok(SystemLabel {
            machine: machine_no - 1,
            from: edge.0,
            action: edge.1,
            to: edge.2,
            index,
        })
    }
}
