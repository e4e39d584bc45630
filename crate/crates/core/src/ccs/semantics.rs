//! Refined and standard transition relations, label interpretation, and
//! independence of refined labels.

use super::{open_rec, Act, CcsAction, Chan, Process, RefinedLabel};

/// The action a refined label performs, if any.
///
/// Returns `None` when the label is not derivable in its position:
/// a restriction over a label whose action is the restricted channel, or a
/// synchronisation of non-complementary actions. Labels produced by
/// [`enumerate_refined`] always interpret.
pub fn interpret_label(u: &RefinedLabel) -> Option<CcsAction> {
    match u {
        RefinedLabel::Pick { summands, index } => {
            let (act, _) = summands.get(index.checked_sub(1)?)?;
            Some(match act {
                Act::In(c) => CcsAction::In(c.clone()),
                Act::Out(c) => CcsAction::Out(c.clone()),
            })
        }
        RefinedLabel::Left(inner) | RefinedLabel::Right(inner) => interpret_label(inner),
        RefinedLabel::Sync(l, r) => {
            let a = interpret_label(l)?;
            let b = interpret_label(r)?;
            complementary(&a, &b).then_some(CcsAction::Tau)
        }
        RefinedLabel::New(inner) => {
            let action = interpret_label(inner)?;
            let pop = |c: &Chan| match c {
                Chan::Bound(0) => None,
                Chan::Bound(k) => Some(Chan::Bound(k - 1)),
                Chan::Free(n) => Some(Chan::Free(n.clone())),
            };
            match action {
                CcsAction::Tau => Some(CcsAction::Tau),
                CcsAction::In(c) => Some(CcsAction::In(pop(&c)?)),
                CcsAction::Out(c) => Some(CcsAction::Out(pop(&c)?)),
            }
        }
        RefinedLabel::Unfold(_) => Some(CcsAction::Tau),
    }
}

fn complementary(a: &CcsAction, b: &CcsAction) -> bool {
    match (a, b) {
        (CcsAction::In(c), CcsAction::Out(d)) | (CcsAction::Out(c), CcsAction::In(d)) => c == d,
        _ => false,
    }
}

/// All refined transitions out of `p`.
pub fn enumerate_refined(p: &Process) -> Vec<(RefinedLabel, Process)> {
    match p {
        Process::Nil | Process::Var(_) => Vec::new(),
        Process::Sum(summands) => summands
            .iter()
            .enumerate()
            .map(|(i, (_, cont))| {
                let label = RefinedLabel::Pick { summands: summands.clone(), index: i + 1 };
                (label, cont.clone())
            })
            .collect(),
        Process::Par(l, r) => {
            let left = enumerate_refined(l);
            let right = enumerate_refined(r);
            let mut out = Vec::new();
            for (u, l2) in &left {
                out.push((
                    RefinedLabel::Left(Box::new(u.clone())),
                    Process::Par(Box::new(l2.clone()), r.clone()),
                ));
            }
            for (v, r2) in &right {
                out.push((
                    RefinedLabel::Right(Box::new(v.clone())),
                    Process::Par(l.clone(), Box::new(r2.clone())),
                ));
            }
            for (u, l2) in &left {
                for (v, r2) in &right {
                    let (Some(a), Some(b)) = (interpret_label(u), interpret_label(v)) else {
                        continue;
                    };
                    if complementary(&a, &b) {
                        out.push((
                            RefinedLabel::Sync(Box::new(u.clone()), Box::new(v.clone())),
                            Process::Par(Box::new(l2.clone()), Box::new(r2.clone())),
                        ));
                    }
                }
            }
            out
        }
        Process::New(body) => enumerate_refined(body)
            .into_iter()
            .filter_map(|(u, b2)| {
                let wrapped = RefinedLabel::New(Box::new(u));
                interpret_label(&wrapped)?;
                Some((wrapped, Process::New(Box::new(b2))))
            })
            .collect(),
        Process::Rec(body) => {
            vec![(RefinedLabel::Unfold(Box::new(p.clone())), open_rec(body, p))]
        }
    }
}

/// Whether two refined labels are independent: they act on disjoint sides
/// of the parallel structure (after peeling matching restrictions).
///
/// Each label of parallel shape occupies the left slot, the right slot, or
/// both; slots the label does not occupy constrain nothing. Labels that
/// are not parallel-shaped — picks and unfoldings — consume the whole
/// position and are dependent on everything that shares it.
pub fn independent(u: &RefinedLabel, v: &RefinedLabel) -> bool {
    slots_independent(Some(u), Some(v))
}

fn slots_independent(a: Option<&RefinedLabel>, b: Option<&RefinedLabel>) -> bool {
    let (Some(u), Some(v)) = (a, b) else {
        return true;
    };
    if let (RefinedLabel::New(u1), RefinedLabel::New(v1)) = (u, v) {
        return slots_independent(Some(u1), Some(v1));
    }
    match (par_slots(u), par_slots(v)) {
        (Some((ul, ur)), Some((vl, vr))) => {
            slots_independent(ul, vl) && slots_independent(ur, vr)
        }
        _ => false,
    }
}

fn par_slots(u: &RefinedLabel) -> Option<(Option<&RefinedLabel>, Option<&RefinedLabel>)> {
    match u {
        RefinedLabel::Left(inner) => Some((Some(inner), None)),
        RefinedLabel::Right(inner) => Some((None, Some(inner))),
        RefinedLabel::Sync(l, r) => Some((Some(l), Some(r))),
        _ => None,
    }
}

/// All standard transitions out of `p`, labels unrefined.
///
/// Duplicates are kept as they derive: `a.0 + a.0` has two `a` transitions
/// to the same target.
pub fn enumerate_standard(p: &Process) -> Vec<(CcsAction, Process)> {
    match p {
        Process::Nil | Process::Var(_) => Vec::new(),
        Process::Sum(summands) => summands
            .iter()
            .map(|(act, cont)| {
                let action = match act {
                    Act::In(c) => CcsAction::In(c.clone()),
                    Act::Out(c) => CcsAction::Out(c.clone()),
                };
                (action, cont.clone())
            })
            .collect(),
        Process::Par(l, r) => {
            let left = enumerate_standard(l);
            let right = enumerate_standard(r);
            let mut out = Vec::new();
            for (a, l2) in &left {
                out.push((a.clone(), Process::Par(Box::new(l2.clone()), r.clone())));
            }
            for (b, r2) in &right {
                out.push((b.clone(), Process::Par(l.clone(), Box::new(r2.clone()))));
            }
            for (a, l2) in &left {
                for (b, r2) in &right {
                    if complementary(a, b) {
                        out.push((
                            CcsAction::Tau,
                            Process::Par(Box::new(l2.clone()), Box::new(r2.clone())),
                        ));
                    }
                }
            }
            out
        }
        Process::New(body) => enumerate_standard(body)
            .into_iter()
            .filter_map(|(action, b2)| {
                let pop = |c: Chan| match c {
                    Chan::Bound(0) => None,
                    Chan::Bound(k) => Some(Chan::Bound(k - 1)),
                    free => Some(free),
                };
                let outside = match action {
                    CcsAction::Tau => CcsAction::Tau,
                    CcsAction::In(c) => CcsAction::In(pop(c)?),
                    CcsAction::Out(c) => CcsAction::Out(pop(c)?),
                };
                Some((outside, Process::New(Box::new(b2))))
            })
            .collect(),
        Process::Rec(body) => vec![(CcsAction::Tau, open_rec(body, p))],
    }
}
