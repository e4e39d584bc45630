//! Label sequences up to commutation of adjacent independent labels.
//!
//! Two sequences are equivalent when one can be turned into the other by
//! repeatedly swapping adjacent independent labels. Each equivalence class
//! is represented by a canonical form built greedily: labels are packed
//! into maximal blocks of pairwise-independent, pairwise-distinct labels,
//! every label landing in the earliest block after its last dependent
//! predecessor, and each block is sorted by the label encoding. Equality of
//! canonical forms then decides equivalence.
//!
//! An occurrence of a label is always treated as dependent on earlier
//! occurrences of the same label, even if an instance declares its
//! independence relation reflexively. Duplicate labels therefore stay
//! ordered and removing the last occurrence is well-defined.

use std::hash::Hash;

use crate::lts::Lts;

/// Rewrites `seq` into the canonical form of its equivalence class.
pub fn canonicalize<I: Lts>(lts: &I, seq: &[I::Label]) -> Vec<I::Label> {
    let mut blocks: Vec<Vec<I::Label>> = Vec::new();
    for u in seq {
        let mut at = 0;
        for (i, block) in blocks.iter().enumerate() {
            if block.iter().any(|v| v == u || !lts.independent(u, v)) {
                at = i + 1;
            }
        }
        if at == blocks.len() {
            blocks.push(Vec::new());
        }
        blocks[at].push(u.clone());
    }
    for block in &mut blocks {
        block.sort_by_key(|u| lts.encode_label(u));
    }
    blocks.concat()
}

/// Whether two sequences are equivalent up to swaps of adjacent
/// independent labels.
pub fn equivalent<I: Lts>(lts: &I, left: &[I::Label], right: &[I::Label]) -> bool {
    left.len() == right.len() && canonicalize(lts, left) == canonicalize(lts, right)
}

/// An equivalence class of label sequences, stored as its canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace<L> {
    canonical: Vec<L>,
}

impl<L: Clone + Eq + Hash> Trace<L> {
    /// The class of the empty sequence.
    pub fn empty() -> Self {
        Trace { canonical: Vec::new() }
    }

    /// The class of an arbitrary representative.
    pub fn from_seq<I: Lts<Label = L>>(lts: &I, seq: &[L]) -> Self {
        Trace { canonical: canonicalize(lts, seq) }
    }

    /// The canonical representative.
    pub fn canonical(&self) -> &[L] {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    /// The class of `self` extended by `u`.
    pub fn append<I: Lts<Label = L>>(&self, lts: &I, u: &L) -> Self {
        let mut seq = self.canonical.clone();
        seq.push(u.clone());
        Trace { canonical: canonicalize(lts, &seq) }
    }

    /// The distinct labels that can appear last in some representative,
    /// sorted by their encoding.
    ///
    /// A label qualifies exactly when everything after its final occurrence
    /// is a distinct, independent label, so it can be bubbled to the end.
    pub fn maximal_labels<I: Lts<Label = L>>(&self, lts: &I) -> Vec<L> {
        let mut out: Vec<L> = Vec::new();
        for (p, u) in self.canonical.iter().enumerate() {
            let movable = self.canonical[p + 1..]
                .iter()
                .all(|v| v != u && lts.independent(u, v));
            if movable && !out.contains(u) {
                out.push(u.clone());
            }
        }
        out.sort_by_key(|u| lts.encode_label(u));
        out
    }

    /// The class with the final occurrence of `u` removed, or `None` when
    /// `u` is not maximal in this class.
    pub fn remove_last<I: Lts<Label = L>>(&self, lts: &I, u: &L) -> Option<Self> {
        let p = self.canonical.iter().rposition(|v| v == u)?;
        let movable = self.canonical[p + 1..]
            .iter()
            .all(|v| v != u && lts.independent(u, v));
        if !movable {
            return None;
        }
        let mut seq = self.canonical.clone();
        seq.remove(p);
        Some(Trace { canonical: canonicalize(lts, &seq) })
    }

    /// Bracketed, comma-separated list of the canonical representative.
    pub fn encode<I: Lts<Label = L>>(&self, lts: &I) -> String {
        let parts: Vec<String> = self.canonical.iter().map(|u| lts.encode_label(u)).collect();
        format!("[{}]", parts.join(", "))
    }
}
