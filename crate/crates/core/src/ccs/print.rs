//! Canonical concrete syntax for processes, refined labels and actions.
//!
//! Binders are nameless internally, so printing invents names: lowercase
//! for channels, uppercase for process variables, skipping anything free
//! in the printed term and anything bound in an enclosing scope. The
//! output parses back to the same nameless term, and alpha-equivalent
//! terms print identically.
//!
//! Precedence is prefix over `+` over `|`; `nu` and `rec` extend as far
//! right as possible. Parentheses appear exactly where the reparse would
//! otherwise differ, and trailing `.0` is always written out.

use std::collections::BTreeSet;

use super::{collect_free_channels, Act, CcsAction, Chan, PVar, Process, RefinedLabel};

pub fn pretty(p: &Process) -> String {
    let mut free_chans = BTreeSet::new();
    collect_free_channels(p, &mut free_chans);
    let mut free_vars = BTreeSet::new();
    collect_free_vars(p, &mut free_vars);
    Printer::new(free_chans, free_vars).process(p, Ctx::Top)
}

pub fn encode_label(u: &RefinedLabel) -> String {
    let mut free_chans = BTreeSet::new();
    let mut free_vars = BTreeSet::new();
    label_free_names(u, &mut free_chans, &mut free_vars);
    Printer::new(free_chans, free_vars).label(u, true)
}

pub(crate) fn encode_action(a: &CcsAction) -> String {
    let chan = |c: &Chan| match c {
        Chan::Free(name) => name.clone(),
        Chan::Bound(k) => format!("?{k}"),
    };
    match a {
        CcsAction::In(c) => chan(c),
        CcsAction::Out(c) => format!("~{}", chan(c)),
        CcsAction::Tau => "tau".to_string(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// The whole term, or the body of a binder (which reaches to the end
    /// of its enclosing scope anyway).
    Top,
    ParLeft,
    ParRight,
    /// Continuation of an action prefix.
    Cont,
}

struct Printer {
    free_chans: BTreeSet<String>,
    free_vars: BTreeSet<String>,
    chan_env: Vec<String>,
    var_env: Vec<String>,
}

impl Printer {
    fn new(free_chans: BTreeSet<String>, free_vars: BTreeSet<String>) -> Self {
        Printer { free_chans, free_vars, chan_env: Vec::new(), var_env: Vec::new() }
    }

    fn process(&mut self, p: &Process, ctx: Ctx) -> String {
        match p {
            Process::Nil => "0".to_string(),
            Process::Var(PVar::Free(name)) => name.clone(),
            Process::Var(PVar::Bound(k)) => lookup(&self.var_env, *k),
            Process::Sum(summands) if summands.len() == 1 => self.summand(&summands[0]),
            Process::Sum(summands) => {
                let body = summands
                    .iter()
                    .map(|s| self.summand(s))
                    .collect::<Vec<_>>()
                    .join(" + ");
                if ctx == Ctx::Cont {
                    format!("({body})")
                } else {
                    body
                }
            }
            Process::Par(l, r) => {
                let body = format!(
                    "{} | {}",
                    self.process(l, Ctx::ParLeft),
                    self.process(r, Ctx::ParRight)
                );
                if matches!(ctx, Ctx::ParRight | Ctx::Cont) {
                    format!("({body})")
                } else {
                    body
                }
            }
            Process::New(inner) => {
                let name = self.fresh_chan();
                self.chan_env.push(name.clone());
                let body = self.process(inner, Ctx::Top);
                self.chan_env.pop();
                let text = format!("nu {name}. {body}");
                if ctx == Ctx::Top {
                    text
                } else {
                    format!("({text})")
                }
            }
            Process::Rec(inner) => {
                let name = self.fresh_var();
                self.var_env.push(name.clone());
                let body = self.process(inner, Ctx::Top);
                self.var_env.pop();
                let text = format!("rec {name}. {body}");
                if ctx == Ctx::Top {
                    text
                } else {
                    format!("({text})")
                }
            }
        }
    }

    fn summand(&mut self, (act, cont): &(Act, Process)) -> String {
        format!("{}.{}", self.act(act), self.process(cont, Ctx::Cont))
    }

    fn act(&self, act: &Act) -> String {
        match act {
            Act::In(c) => self.chan(c),
            Act::Out(c) => format!("~{}", self.chan(c)),
        }
    }

    fn chan(&self, c: &Chan) -> String {
        match c {
            Chan::Free(name) => name.clone(),
            Chan::Bound(k) => lookup(&self.chan_env, *k),
        }
    }

    /// `delimited` means the label is followed by a closing delimiter or
    /// the end of input, so a maximal-right `rec` label can stay bare.
    fn label(&mut self, u: &RefinedLabel, delimited: bool) -> String {
        match u {
            RefinedLabel::Pick { summands, index } => {
                let body = summands
                    .iter()
                    .map(|s| self.summand(s))
                    .collect::<Vec<_>>()
                    .join(" + ");
                format!("pick({index}){{{body}}}")
            }
            RefinedLabel::Left(inner) => format!("({}|*)", self.label(inner, false)),
            RefinedLabel::Right(inner) => format!("(*|{})", self.label(inner, true)),
            RefinedLabel::Sync(l, r) => {
                format!("({}|{})", self.label(l, false), self.label(r, true))
            }
            RefinedLabel::New(inner) => {
                let name = self.fresh_chan();
                self.chan_env.push(name.clone());
                let body = self.label(inner, true);
                self.chan_env.pop();
                format!("nu {name}.({body})")
            }
            RefinedLabel::Unfold(p) => {
                let body = self.process(p, Ctx::Top);
                if delimited {
                    body
                } else {
                    format!("({body})")
                }
            }
        }
    }

    fn fresh_chan(&self) -> String {
        let pool = (0u32..).map(|i| {
            let letter = (b'a' + (i % 26) as u8) as char;
            if i < 26 {
                letter.to_string()
            } else {
                format!("{}{}", letter, i / 26)
            }
        });
        self.pick_fresh(pool, &self.free_chans, &self.chan_env)
    }

    fn fresh_var(&self) -> String {
        let pool = (0u32..).map(|i| match i {
            0 => "X".to_string(),
            1 => "Y".to_string(),
            2 => "Z".to_string(),
            _ => format!("X{}", i - 2),
        });
        self.pick_fresh(pool, &self.free_vars, &self.var_env)
    }

    fn pick_fresh(
        &self,
        mut pool: impl Iterator<Item = String>,
        free: &BTreeSet<String>,
        env: &[String],
    ) -> String {
        pool.find(|n| !free.contains(n) && !env.iter().any(|e| e == n))
            .expect("name pool is infinite")
    }
}

fn lookup(env: &[String], index: u32) -> String {
    env.len()
        .checked_sub(1 + index as usize)
        .map(|i| env[i].clone())
        .unwrap_or_else(|| format!("?{index}"))
}

fn collect_free_vars(p: &Process, out: &mut BTreeSet<String>) {
    match p {
        Process::Nil | Process::Var(PVar::Bound(_)) => {}
        Process::Var(PVar::Free(name)) => {
            out.insert(name.clone());
        }
        Process::Sum(summands) => {
            for (_, cont) in summands {
                collect_free_vars(cont, out);
            }
        }
        Process::Par(l, r) => {
            collect_free_vars(l, out);
            collect_free_vars(r, out);
        }
        Process::New(body) | Process::Rec(body) => collect_free_vars(body, out),
    }
}

fn label_free_names(u: &RefinedLabel, chans: &mut BTreeSet<String>, vars: &mut BTreeSet<String>) {
    match u {
        RefinedLabel::Pick { summands, .. } => {
            for (act, cont) in summands {
                if let Chan::Free(name) = act.chan() {
                    chans.insert(name.clone());
                }
                collect_free_channels(cont, chans);
                collect_free_vars(cont, vars);
            }
        }
        RefinedLabel::Left(inner) | RefinedLabel::Right(inner) | RefinedLabel::New(inner) => {
            label_free_names(inner, chans, vars)
        }
        RefinedLabel::Sync(l, r) => {
            label_free_names(l, chans, vars);
            label_free_names(r, chans, vars);
        }
        RefinedLabel::Unfold(p) => {
            collect_free_channels(p, chans);
            collect_free_vars(p, vars);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum1(act: Act, cont: Process) -> Process {
        Process::Sum(vec![(act, cont)])
    }

    fn input(name: &str) -> Act {
        Act::In(Chan::Free(name.to_string()))
    }

    #[test]
    fn inert_process_prints_zero() {
        assert_eq!(pretty(&Process::Nil), "0");
    }

    #[test]
    fn trailing_nil_is_explicit() {
        let p = sum1(input("a"), sum1(input("b"), Process::Nil));
        assert_eq!(pretty(&p), "a.b.0");
    }

    #[test]
    fn parentheses_follow_precedence() {
        let par = Process::Par(
            Box::new(sum1(input("b"), Process::Nil)),
            Box::new(sum1(input("c"), Process::Nil)),
        );
        assert_eq!(pretty(&sum1(input("a"), par.clone())), "a.(b.0 | c.0)");

        let sum = Process::Sum(vec![
            (input("b"), Process::Nil),
            (input("c"), Process::Nil),
        ]);
        assert_eq!(pretty(&sum1(input("a"), sum.clone())), "a.(b.0 + c.0)");
        assert_eq!(
            pretty(&Process::Par(Box::new(sum), Box::new(Process::Nil))),
            "b.0 + c.0 | 0"
        );
    }

    #[test]
    fn parallel_prints_left_associated() {
        let a = sum1(input("a"), Process::Nil);
        let b = sum1(input("b"), Process::Nil);
        let c = sum1(input("c"), Process::Nil);
        let left_nested = Process::Par(
            Box::new(Process::Par(Box::new(a.clone()), Box::new(b.clone()))),
            Box::new(c.clone()),
        );
        assert_eq!(pretty(&left_nested), "a.0 | b.0 | c.0");
        let right_nested =
            Process::Par(Box::new(a), Box::new(Process::Par(Box::new(b), Box::new(c))));
        assert_eq!(pretty(&right_nested), "a.0 | (b.0 | c.0)");
    }

    #[test]
    fn binder_needs_parentheses_beside_parallel() {
        let nu = Process::New(Box::new(sum1(Act::In(Chan::Bound(0)), Process::Nil)));
        let b = sum1(input("b"), Process::Nil);
        assert_eq!(
            pretty(&Process::Par(Box::new(nu), Box::new(b))),
            "(nu a. a.0) | b.0"
        );
    }

    #[test]
    fn generated_names_avoid_free_names() {
        // nu _. (_ used alongside a free "a") must not reuse "a"
        let body = Process::Par(
            Box::new(sum1(Act::In(Chan::Bound(0)), Process::Nil)),
            Box::new(sum1(input("a"), Process::Nil)),
        );
        assert_eq!(pretty(&Process::New(Box::new(body))), "nu b. b.0 | a.0");
    }

    #[test]
    fn nested_binders_get_distinct_names() {
        let inner = Process::Sum(vec![(
            Act::In(Chan::Bound(1)),
            sum1(Act::In(Chan::Bound(0)), Process::Nil),
        )]);
        let p = Process::New(Box::new(Process::New(Box::new(inner.clone()))));
        assert_eq!(pretty(&p), "nu a. nu b. a.b.0");

        let label = RefinedLabel::New(Box::new(RefinedLabel::New(Box::new(
            RefinedLabel::Pick { summands: vec![(Act::In(Chan::Bound(1)), sum1(Act::In(Chan::Bound(0)), Process::Nil))], index: 1 },
        ))));
        assert_eq!(encode_label(&label), "nu a.(nu b.(pick(1){a.b.0}))");
    }

    #[test]
    fn unfold_labels_parenthesise_only_inside_composites() {
        let rec = Process::Rec(Box::new(sum1(input("a"), Process::Var(PVar::Bound(0)))));
        let unfold = RefinedLabel::Unfold(Box::new(rec));
        assert_eq!(encode_label(&unfold), "rec X. a.X");
        assert_eq!(
            encode_label(&RefinedLabel::Left(Box::new(unfold.clone()))),
            "((rec X. a.X)|*)"
        );
        assert_eq!(
            encode_label(&RefinedLabel::Right(Box::new(unfold))),
            "(*|rec X. a.X)"
        );
    }
}
