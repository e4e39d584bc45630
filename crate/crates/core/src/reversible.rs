//! The reversible layer over an [`Lts`] instance.
//!
//! A [`Configuration`] pairs the trace of what has happened with the term
//! reached. Forward steps extend the trace; a label can be undone exactly
//! when it is maximal in the trace, i.e. when no later action depends on
//! it. Undoing replays the shortened history from the initial term, so the
//! instance itself is never asked to invert a transition.
//!
//! Runs mixing forward and backward steps are signed sequences. Every
//! signed sequence valid from a configuration normalizes to a backward
//! prefix followed by a forward suffix ([`normalize`]), and two valid
//! coinitial sequences are causally equivalent exactly when they are also
//! cofinal ([`causally_equivalent`]). The latter equivalence can be
//! verified independently by [`equiv_oracle`], a bounded search over the
//! defining rewrites themselves.

use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::lts::{step, Lts, StepError};
use crate::trace::Trace;

/// A label with a direction: executed forward or undone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignedLabel<L> {
    Forward(L),
    Backward(L),
}

impl<L> SignedLabel<L> {
    pub fn label(&self) -> &L {
        match self {
            SignedLabel::Forward(u) | SignedLabel::Backward(u) => u,
        }
    }

    pub fn is_forward(&self) -> bool {
        matches!(self, SignedLabel::Forward(_))
    }

    pub fn inverse(self) -> Self {
        match self {
            SignedLabel::Forward(u) => SignedLabel::Backward(u),
            SignedLabel::Backward(u) => SignedLabel::Forward(u),
        }
    }

    /// The label encoding, with `^-1` marking backward labels.
    pub fn encode<I: Lts<Label = L>>(&self, lts: &I) -> String {
        match self {
            SignedLabel::Forward(u) => lts.encode_label(u),
            SignedLabel::Backward(u) => format!("{}^-1", lts.encode_label(u)),
        }
    }
}

/// Reverses a signed sequence and flips every direction.
pub fn inverse_sequence<L: Clone>(seq: &[SignedLabel<L>]) -> Vec<SignedLabel<L>> {
    seq.iter().rev().map(|sl| sl.clone().inverse()).collect()
}

/// Bracketed, comma-separated encoding of a signed sequence.
pub fn encode_sequence<I: Lts>(lts: &I, seq: &[SignedLabel<I::Label>]) -> String {
    let parts: Vec<String> = seq.iter().map(|sl| sl.encode(lts)).collect();
    format!("[{}]", parts.join(", "))
}

/// Errors from the reversible layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReversibleError {
    #[error("label {label} is not enabled")]
    NotEnabled { label: String },
    #[error("label {label} is not undoable")]
    NotUndoable { label: String },
    #[error("step {index}: {source}")]
    StepFailed {
        index: usize,
        source: Box<ReversibleError>,
    },
    #[error("history does not replay: {label} not enabled after {index} steps")]
    BrokenHistory { index: usize, label: String },
    #[error(transparent)]
    Determinism(#[from] StepError),
}

/// A term together with the trace that produced it.
///
/// Equality and hashing use the trace and the current term; the initial
/// term is determined by them and is only sanity-checked in debug builds.
#[derive(Debug, Clone)]
pub struct Configuration<T, L> {
    trace: Trace<L>,
    current: T,
    initial: T,
}

impl<T: PartialEq, L: PartialEq> PartialEq for Configuration<T, L> {
    fn eq(&self, other: &Self) -> bool {
        let eq = self.trace == other.trace && self.current == other.current;
        debug_assert!(!eq || self.initial == other.initial);
        eq
    }
}

impl<T: Eq, L: Eq> Eq for Configuration<T, L> {}

impl<T: Hash, L: Hash> Hash for Configuration<T, L> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.trace.hash(state);
        self.current.hash(state);
    }
}

impl<T: Clone + Eq + Hash, L: Clone + Eq + Hash> Configuration<T, L> {
    /// The configuration with no history.
    pub fn init(m: T) -> Self {
        Configuration { trace: Trace::empty(), current: m.clone(), initial: m }
    }

    pub fn trace(&self) -> &Trace<L> {
        &self.trace
    }

    /// Forgets the history, leaving the current term.
    pub fn project(&self) -> &T {
        &self.current
    }

    pub fn initial_term(&self) -> &T {
        &self.initial
    }
}

/// Performs `u` forward from `r`.
pub fn forward<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    u: &I::Label,
) -> Result<Configuration<I::Term, I::Label>, ReversibleError> {
    match step(lts, &r.current, u)? {
        Some(next) => Ok(Configuration {
            trace: r.trace.append(lts, u),
            current: next,
            initial: r.initial.clone(),
        }),
        None => Err(ReversibleError::NotEnabled { label: lts.encode_label(u) }),
    }
}

fn replay<I: Lts>(lts: &I, from: &I::Term, labels: &[I::Label]) -> Result<I::Term, ReversibleError> {
    let mut at = from.clone();
    for (index, u) in labels.iter().enumerate() {
        match step(lts, &at, u)? {
            Some(next) => at = next,
            None => {
                return Err(ReversibleError::BrokenHistory {
                    index,
                    label: lts.encode_label(u),
                })
            }
        }
    }
    Ok(at)
}

/// Undoes `u` from `r`. Only labels maximal in the trace qualify; the
/// predecessor term is recovered by replaying the shortened history from
/// the initial term.
pub fn backward<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    u: &I::Label,
) -> Result<Configuration<I::Term, I::Label>, ReversibleError> {
    let shortened = match r.trace.remove_last(lts, u) {
        Some(t) => t,
        None => return Err(ReversibleError::NotUndoable { label: lts.encode_label(u) }),
    };
    let previous = replay(lts, &r.initial, shortened.canonical())?;
    debug_assert_eq!(
        step(lts, &previous, u).ok().flatten().as_ref(),
        Some(&r.current),
        "undone label must lead back to the current term"
    );
    Ok(Configuration { trace: shortened, current: previous, initial: r.initial.clone() })
}

/// The forward labels enabled at `r`, with their successors, sorted by
/// label encoding.
pub fn enabled_forward<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
) -> Vec<(I::Label, I::Term)> {
    let mut succs = lts.enumerate(&r.current);
    succs.sort_by_key(|(u, _)| lts.encode_label(u));
    succs.dedup();
    succs
}

/// The labels undoable at `r`, sorted by label encoding.
pub fn enabled_backward<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
) -> Vec<I::Label> {
    r.trace.maximal_labels(lts)
}

/// Applies a signed sequence to `r`, failing at the first step that is not
/// enabled (forward) or not undoable (backward).
pub fn apply_signed<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    seq: &[SignedLabel<I::Label>],
) -> Result<Configuration<I::Term, I::Label>, ReversibleError> {
    let mut at = r.clone();
    for (index, sl) in seq.iter().enumerate() {
        let next = match sl {
            SignedLabel::Forward(u) => forward(lts, &at, u),
            SignedLabel::Backward(u) => backward(lts, &at, u),
        };
        at = next.map_err(|e| ReversibleError::StepFailed { index, source: Box::new(e) })?;
    }
    Ok(at)
}

/// Rewrites a signed sequence into a backward prefix followed by a forward
/// suffix: cancels adjacent inverse pairs eagerly and pushes forward steps
/// past later backward steps of a different label. Returns the number of
/// rewrites applied.
fn parabolic<L: Clone + Eq>(seq: &[SignedLabel<L>]) -> (Vec<SignedLabel<L>>, usize) {
    let mut out: Vec<SignedLabel<L>> = seq.to_vec();
    let mut steps = 0;
    loop {
        let cancel = out.windows(2).position(|w| {
            w[0].label() == w[1].label() && w[0].is_forward() != w[1].is_forward()
        });
        if let Some(k) = cancel {
            out.drain(k..k + 2);
            steps += 1;
            continue;
        }
        let swap = out.windows(2).position(|w| {
            w[0].is_forward() && !w[1].is_forward() && w[0].label() != w[1].label()
        });
        if let Some(k) = swap {
            out.swap(k, k + 1);
            steps += 1;
            continue;
        }
        return (out, steps);
    }
}

/// Normalizes a signed sequence valid from `r` into the pair `(L1, L2)`
/// such that undoing `L1` (last label first) and then performing `L2` is
/// valid from `r` and reaches the same configuration.
pub fn normalize<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    seq: &[SignedLabel<I::Label>],
) -> Result<(Vec<I::Label>, Vec<I::Label>), ReversibleError> {
    normalize_counting(lts, r, seq).map(|(pair, _)| pair)
}

/// [`normalize`], also reporting how many rewrites were applied.
pub fn normalize_counting<I: Lts>(
    lts: &I,
    r: &Configuration<I::Term, I::Label>,
    seq: &[SignedLabel<I::Label>],
) -> Result<((Vec<I::Label>, Vec<I::Label>), usize), ReversibleError> {
    let expected = apply_signed(lts, r, seq)?;
    let (flat, steps) = parabolic(seq);
    let split = flat.iter().position(|sl| sl.is_forward()).unwrap_or(flat.len());
    // L1 is reported in forward orientation: its reverse is what was undone
    let backward_part: Vec<I::Label> =
        flat[..split].iter().rev().map(|sl| sl.label().clone()).collect();
    let forward_part: Vec<I::Label> =
        flat[split..].iter().map(|sl| sl.label().clone()).collect();
    debug_assert_eq!(apply_signed(lts, r, &flat).as_ref(), Ok(&expected));
    Ok(((backward_part, forward_part), steps))
}

/// A signed sequence paired with the configuration it ends in, validated
/// on construction by running the inverse sequence from that endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidSequence<T, L> {
    seq: Vec<SignedLabel<L>>,
    end: Configuration<T, L>,
}

impl<T: Clone + Eq + Hash, L: Clone + Eq + Hash> ValidSequence<T, L> {
    pub fn new<I: Lts<Term = T, Label = L>>(
        lts: &I,
        seq: Vec<SignedLabel<L>>,
        end: Configuration<T, L>,
    ) -> Result<Self, ReversibleError> {
        apply_signed(lts, &end, &inverse_sequence(&seq))?;
        Ok(ValidSequence { seq, end })
    }

    pub fn seq(&self) -> &[SignedLabel<L>] {
        &self.seq
    }

    pub fn end(&self) -> &Configuration<T, L> {
        &self.end
    }

    /// The configuration the sequence started from.
    pub fn start<I: Lts<Term = T, Label = L>>(
        &self,
        lts: &I,
    ) -> Result<Configuration<T, L>, ReversibleError> {
        apply_signed(lts, &self.end, &inverse_sequence(&self.seq))
    }
}

/// Whether two valid sequences are causally equivalent: coinitial and
/// cofinal.
pub fn causally_equivalent<I: Lts>(
    lts: &I,
    s1: &ValidSequence<I::Term, I::Label>,
    s2: &ValidSequence<I::Term, I::Label>,
) -> Result<bool, ReversibleError> {
    Ok(s1.start(lts)? == s2.start(lts)? && s1.end == s2.end)
}

/// Outcome of the bounded rewrite search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    /// A rewrite path within the bound was found.
    Equivalent,
    /// The whole rewrite closure (under the length cap) was explored and
    /// the target is not in it.
    NotEquivalent,
    /// The bound was exhausted with unexplored sequences remaining.
    Unknown,
}

/// Searches for a chain of at most `bound` validity-preserving rewrites
/// (swaps of adjacent independent labels in any direction combination,
/// cancellation of adjacent inverse pairs, and insertion of enabled
/// inverse pairs) turning `s1` into `s2`.
///
/// Insertions never grow a sequence beyond the longer input plus two, so
/// the closure is finite and exhausting it without a witness is a definite
/// [`OracleVerdict::NotEquivalent`].
pub fn equiv_oracle<I: Lts>(
    lts: &I,
    s1: &ValidSequence<I::Term, I::Label>,
    s2: &ValidSequence<I::Term, I::Label>,
    bound: usize,
) -> Result<OracleVerdict, ReversibleError> {
    let start1 = s1.start(lts)?;
    let start2 = s2.start(lts)?;
    if start1 != start2 {
        // rewrites never change the starting configuration
        return Ok(OracleVerdict::NotEquivalent);
    }
    let cap = s1.seq.len().max(s2.seq.len()) + 2;
    let mut session = Session::new(lts);
    let a = session.intern_walk(&start1, &s1.seq)?;
    let b = session.intern_walk(&start2, &s2.seq)?;
    Ok(session.bidirectional_search(a, b, bound, cap))
}

type Node = Vec<(u32, bool)>;

/// Interned view of the configuration graph, grown on demand while the
/// oracle searches. Configurations and labels are mapped to small ids so
/// candidate sequences can be validated by hash lookups instead of replays.
struct Session<'a, I: Lts> {
    lts: &'a I,
    labels: Vec<I::Label>,
    label_ids: HashMap<I::Label, u32>,
    cfgs: Vec<Configuration<I::Term, I::Label>>,
    cfg_ids: HashMap<Configuration<I::Term, I::Label>, u32>,
    fwd: HashMap<(u32, u32), Option<u32>>,
    bwd: HashMap<(u32, u32), Option<u32>>,
    en_fwd: HashMap<u32, Vec<u32>>,
    en_bwd: HashMap<u32, Vec<u32>>,
}

struct Walk {
    node: Node,
    cfgs: Vec<u32>,
}

impl<'a, I: Lts> Session<'a, I> {
    fn new(lts: &'a I) -> Self {
        Session {
            lts,
            labels: Vec::new(),
            label_ids: HashMap::new(),
            cfgs: Vec::new(),
            cfg_ids: HashMap::new(),
            fwd: HashMap::new(),
            bwd: HashMap::new(),
            en_fwd: HashMap::new(),
            en_bwd: HashMap::new(),
        }
    }

    fn label_id(&mut self, u: &I::Label) -> u32 {
        if let Some(&id) = self.label_ids.get(u) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(u.clone());
        self.label_ids.insert(u.clone(), id);
        id
    }

    fn cfg_id(&mut self, c: Configuration<I::Term, I::Label>) -> u32 {
        if let Some(&id) = self.cfg_ids.get(&c) {
            return id;
        }
        let id = self.cfgs.len() as u32;
        self.cfg_ids.insert(c.clone(), id);
        self.cfgs.push(c);
        id
    }

    fn step_fwd(&mut self, cfg: u32, label: u32) -> Option<u32> {
        if let Some(&cached) = self.fwd.get(&(cfg, label)) {
            return cached;
        }
        let next = forward(self.lts, &self.cfgs[cfg as usize], &self.labels[label as usize])
            .ok()
            .map(|c| self.cfg_id(c));
        self.fwd.insert((cfg, label), next);
        next
    }

    fn step_bwd(&mut self, cfg: u32, label: u32) -> Option<u32> {
        if let Some(&cached) = self.bwd.get(&(cfg, label)) {
            return cached;
        }
        let next = backward(self.lts, &self.cfgs[cfg as usize], &self.labels[label as usize])
            .ok()
            .map(|c| self.cfg_id(c));
        self.bwd.insert((cfg, label), next);
        next
    }

    fn enabled_fwd_ids(&mut self, cfg: u32) -> Vec<u32> {
        if let Some(ids) = self.en_fwd.get(&cfg) {
            return ids.clone();
        }
        let labels: Vec<I::Label> = enabled_forward(self.lts, &self.cfgs[cfg as usize])
            .into_iter()
            .map(|(u, _)| u)
            .collect();
        let ids: Vec<u32> = labels.iter().map(|u| self.label_id(u)).collect();
        self.en_fwd.insert(cfg, ids.clone());
        ids
    }

    fn enabled_bwd_ids(&mut self, cfg: u32) -> Vec<u32> {
        if let Some(ids) = self.en_bwd.get(&cfg) {
            return ids.clone();
        }
        let labels = enabled_backward(self.lts, &self.cfgs[cfg as usize]);
        let ids: Vec<u32> = labels.iter().map(|u| self.label_id(u)).collect();
        self.en_bwd.insert(cfg, ids.clone());
        ids
    }

    fn apply(&mut self, cfg: u32, entry: (u32, bool)) -> Option<u32> {
        if entry.1 {
            self.step_fwd(cfg, entry.0)
        } else {
            self.step_bwd(cfg, entry.0)
        }
    }

    /// Interns a validated sequence together with its trajectory.
    fn intern_walk(
        &mut self,
        start: &Configuration<I::Term, I::Label>,
        seq: &[SignedLabel<I::Label>],
    ) -> Result<Walk, ReversibleError> {
        let mut cfgs = vec![self.cfg_id(start.clone())];
        let mut node = Vec::with_capacity(seq.len());
        for (index, sl) in seq.iter().enumerate() {
            let entry = match sl {
                SignedLabel::Forward(u) => (self.label_id(u), true),
                SignedLabel::Backward(u) => (self.label_id(u), false),
            };
            let at = *cfgs.last().unwrap();
            match self.apply(at, entry) {
                Some(next) => cfgs.push(next),
                None => {
                    let label = self.lts.encode_label(sl.label());
                    let source = if entry.1 {
                        ReversibleError::NotEnabled { label }
                    } else {
                        ReversibleError::NotUndoable { label }
                    };
                    return Err(ReversibleError::StepFailed { index, source: Box::new(source) });
                }
            }
            node.push(entry);
        }
        Ok(Walk { node, cfgs })
    }

    fn independent_ids(&self, u: u32, v: u32) -> bool {
        self.lts.independent(&self.labels[u as usize], &self.labels[v as usize])
    }

    /// All sequences one validity-preserving rewrite away.
    fn neighbors(&mut self, walk: &Walk, cap: usize) -> Vec<Walk> {
        let n = walk.node.len();
        let mut out = Vec::new();

        for k in 0..n.saturating_sub(1) {
            let (l1, d1) = walk.node[k];
            let (l2, d2) = walk.node[k + 1];
            if l1 == l2 && d1 != d2 {
                debug_assert_eq!(walk.cfgs[k], walk.cfgs[k + 2]);
                let mut node = walk.node.clone();
                node.drain(k..k + 2);
                let mut cfgs = walk.cfgs.clone();
                cfgs.drain(k + 1..k + 3);
                out.push(Walk { node, cfgs });
            }
            if self.independent_ids(l1, l2) {
                // swap the pair, keeping the window endpoints: valid only
                // if the swapped window reconverges
                let here = walk.cfgs[k];
                if let Some(mid) = self.apply(here, (l2, d2)) {
                    if let Some(end) = self.apply(mid, (l1, d1)) {
                        if end == walk.cfgs[k + 2] {
                            let mut node = walk.node.clone();
                            node.swap(k, k + 1);
                            let mut cfgs = walk.cfgs.clone();
                            cfgs[k + 1] = mid;
                            out.push(Walk { node, cfgs });
                        }
                    }
                }
            }
        }

        if n + 2 <= cap {
            for k in 0..=n {
                let here = walk.cfgs[k];
                for l in self.enabled_fwd_ids(here) {
                    if let Some(mid) = self.step_fwd(here, l) {
                        let mut node = walk.node.clone();
                        node.splice(k..k, [(l, true), (l, false)]);
                        let mut cfgs = walk.cfgs.clone();
                        cfgs.splice(k + 1..k + 1, [mid, here]);
                        out.push(Walk { node, cfgs });
                    }
                }
                for l in self.enabled_bwd_ids(here) {
                    if let Some(mid) = self.step_bwd(here, l) {
                        let mut node = walk.node.clone();
                        node.splice(k..k, [(l, false), (l, true)]);
                        let mut cfgs = walk.cfgs.clone();
                        cfgs.splice(k + 1..k + 1, [mid, here]);
                        out.push(Walk { node, cfgs });
                    }
                }
            }
        }

        out
    }

    /// Level-synchronized bidirectional breadth-first search; the rewrite
    /// relation is symmetric, so meeting in the middle is sound and the
    /// first meeting gives the exact distance.
    fn bidirectional_search(&mut self, a: Walk, b: Walk, bound: usize, cap: usize) -> OracleVerdict {
        if a.node == b.node {
            return OracleVerdict::Equivalent;
        }
        let mut dist: [HashMap<Node, usize>; 2] = [HashMap::new(), HashMap::new()];
        let mut frontier: [Vec<Walk>; 2] = [vec![], vec![]];
        dist[0].insert(a.node.clone(), 0);
        dist[1].insert(b.node.clone(), 0);
        frontier[0].push(a);
        frontier[1].push(b);
        let mut depth = [0usize, 0usize];

        while depth[0] + depth[1] < bound {
            if frontier[0].is_empty() || frontier[1].is_empty() {
                // one component is fully explored without a meeting, so the
                // other sequence lies outside it
                return OracleVerdict::NotEquivalent;
            }
            let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
            let other = 1 - side;
            let level = std::mem::take(&mut frontier[side]);
            depth[side] += 1;
            for walk in level {
                for next in self.neighbors(&walk, cap) {
                    if dist[side].contains_key(&next.node) {
                        continue;
                    }
                    dist[side].insert(next.node.clone(), depth[side]);
                    if dist[other].contains_key(&next.node) {
                        // per-side levels are exact distances, so any
                        // meeting inside the loop is within the bound
                        return OracleVerdict::Equivalent;
                    }
                    frontier[side].push(next);
                }
            }
        }
        if frontier[0].is_empty() || frontier[1].is_empty() {
            OracleVerdict::NotEquivalent
        } else {
            OracleVerdict::Unknown
        }
    }
}
