//! JSON model files for machine systems.
//!
//! A model declares its action vocabulary, its machines, and the initial
//! memory:
//!
//! ```json
//! {
//!   "actions": [
//!     {"id": "a", "kind": "assign", "target": "x2", "sources": ["x1"], "expr": "x1"},
//!     {"id": "inc", "kind": "addassign", "target": "x1", "sources": [], "expr": "1"},
//!     {"id": "done", "kind": "test", "sources": ["x1"], "expr": "x1 == 3"}
//!   ],
//!   "machines": [
//!     {
//!       "states": ["q0", "q1"],
//!       "initial": ["q0"],
//!       "finals": ["q1"],
//!       "transitions": [{"from": "q0", "action": "a", "to": "q1"}]
//!     }
//!   ],
//!   "memory": {"x1": 1, "x2": 2}
//! }
//! ```
//!
//! For `test` actions the `expr` field holds the predicate and `target`
//! is omitted. Registers absent from `memory` start at 0.

use std::collections::BTreeMap;

use serde::Deserialize;

use super::{
    make_add_assign, make_assign, make_test, ActionError, Machine, Memory, RefinedAction,
    SharedSystem, SystemError,
};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    actions: Vec<ActionSpec>,
    machines: Vec<MachineSpec>,
    #[serde(default)]
    memory: BTreeMap<String, u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionSpec {
    id: String,
    kind: String,
    #[serde(default)]
    target: Option<String>,
    #[serde(default)]
    sources: Vec<String>,
    expr: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineSpec {
    states: Vec<String>,
    initial: Vec<String>,
    #[serde(default)]
    finals: Vec<String>,
    transitions: Vec<TransitionSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionSpec {
    from: String,
    action: String,
    to: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("action `{id}`: {source}")]
    Action { id: String, source: ActionError },
    #[error("action `{id}`: kind `{kind}` needs a target")]
    MissingTarget { id: String, kind: String },
    #[error("action `{id}`: unknown kind `{kind}` (expected assign, addassign or test)")]
    UnknownKind { id: String, kind: String },
    #[error("{0}")]
    System(#[from] SystemError),
}

pub fn parse_system(text: &str) -> Result<SharedSystem, ModelError> {
    let file: ModelFile = serde_json::from_str(text)?;
    let mut actions = Vec::new();
    for spec in file.actions {
        actions.push(build_action(spec)?);
    }
    let machines = file
        .machines
        .into_iter()
        .map(|m| Machine {
            states: m.states,
            initial: m.initial,
            finals: m.finals,
            delta: m
                .transitions
                .into_iter()
                .map(|t| (t.from, t.action, t.to))
                .collect(),
        })
        .collect();
    let memory = Memory::from_pairs(file.memory);
    Ok(SharedSystem::new(actions, machines, memory)?)
}

fn build_action(spec: ActionSpec) -> Result<RefinedAction, ModelError> {
    let sources: Vec<&str> = spec.sources.iter().map(String::as_str).collect();
    let target = || {
        spec.target.as_deref().ok_or_else(|| ModelError::MissingTarget {
            id: spec.id.clone(),
            kind: spec.kind.clone(),
        })
    };
    let wrap = |source: ActionError, id: &str| ModelError::Action {
        id: id.to_string(),
        source,
    };
    match spec.kind.as_str() {
        "assign" => make_assign(&spec.id, target()?, &spec.expr, &sources)
            .map_err(|e| wrap(e, &spec.id)),
        "addassign" => make_add_assign(&spec.id, target()?, &spec.expr, &sources)
            .map_err(|e| wrap(e, &spec.id)),
        "test" => make_test(&spec.id, &sources, &spec.expr).map_err(|e| wrap(e, &spec.id)),
        _ => Err(ModelError::UnknownKind { id: spec.id, kind: spec.kind }),
    }
}
