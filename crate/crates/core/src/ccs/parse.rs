//! Parsers for the concrete process and label syntax.
//!
//! Processes: `0`, action prefixes `a.P` / `~a.P` (a bare action means
//! `.0`), guarded sums `P + Q`, parallel `P | Q`, restriction `nu a. P`,
//! recursion `rec X. P` and process variables. Prefix binds tighter than
//! `+`, which binds tighter than `|`; the binders take everything to
//! their right. Channel names start lowercase, process variables start
//! uppercase, and `#` comments run to end of line.
//!
//! Labels: `pick(i){...summands...}`, `(u|*)`, `(*|u)`, `(u|v)`,
//! `nu a.(u)`, `rec X. P`, and `(u)` as plain grouping.
//!
//! Binders are resolved to indices during the parse, so the output is in
//! nameless form and never needs a separate scope-checking pass.

use super::{Act, Chan, PVar, Process, RefinedLabel};

/// Where a parse failed and what would have been acceptable there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at offset {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

pub fn parse_process(input: &str) -> Result<Process, ParseError> {
    let mut parser = Parser::new(input)?;
    let process = parser.par()?;
    parser.expect_eof()?;
    Ok(process)
}

pub fn parse_label(input: &str) -> Result<RefinedLabel, ParseError> {
    let mut parser = Parser::new(input)?;
    let label = parser.label()?;
    parser.expect_eof()?;
    Ok(label)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LowerIdent(String),
    UpperIdent(String),
    Num(usize),
    Tilde,
    Dot,
    Plus,
    Bar,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Nu,
    Rec,
    Pick,
    Eof,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::LowerIdent(n) | Tok::UpperIdent(n) => format!("`{n}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Tilde => "`~`".to_string(),
        Tok::Dot => "`.`".to_string(),
        Tok::Plus => "`+`".to_string(),
        Tok::Bar => "`|`".to_string(),
        Tok::Star => "`*`".to_string(),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::LBrace => "`{`".to_string(),
        Tok::RBrace => "`}`".to_string(),
        Tok::Nu => "`nu`".to_string(),
        Tok::Rec => "`rec`".to_string(),
        Tok::Pick => "`pick`".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

fn tokenize(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let mut it = input.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '#' => {
                while let Some(&(_, c)) = it.peek() {
                    if c == '\n' {
                        break;
                    }
                    it.next();
                }
            }
            '~' => {
                it.next();
                out.push((i, Tok::Tilde));
            }
            '.' => {
                it.next();
                out.push((i, Tok::Dot));
            }
            '+' => {
                it.next();
                out.push((i, Tok::Plus));
            }
            '|' => {
                it.next();
                out.push((i, Tok::Bar));
            }
            '*' => {
                it.next();
                out.push((i, Tok::Star));
            }
            '(' => {
                it.next();
                out.push((i, Tok::LParen));
            }
            ')' => {
                it.next();
                out.push((i, Tok::RParen));
            }
            '{' => {
                it.next();
                out.push((i, Tok::LBrace));
            }
            '}' => {
                it.next();
                out.push((i, Tok::RBrace));
            }
            c if c.is_ascii_digit() => {
                let mut text = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    text.push(d);
                    it.next();
                }
                let value = text.parse().map_err(|_| ParseError {
                    position: i,
                    expected: "a smaller number".to_string(),
                    found: format!("`{text}`"),
                })?;
                out.push((i, Tok::Num(value)));
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    name.push(d);
                    it.next();
                }
                let tok = match name.as_str() {
                    "nu" => Tok::Nu,
                    "rec" => Tok::Rec,
                    "pick" => Tok::Pick,
                    _ if c.is_ascii_lowercase() => Tok::LowerIdent(name),
                    _ => Tok::UpperIdent(name),
                };
                out.push((i, tok));
            }
            other => {
                return Err(ParseError {
                    position: i,
                    expected: "a token".to_string(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((input.len(), Tok::Eof));
    Ok(out)
}

/// A parsed sum element: either an action prefix or a bare process, which
/// is only legal when it is the whole sum.
enum Item {
    Guarded(Act, Process),
    Plain(Process),
}

impl Item {
    fn into_process(self) -> Process {
        match self {
            Item::Guarded(act, cont) => Process::Sum(vec![(act, cont)]),
            Item::Plain(p) => p,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    chans: Vec<String>,
    vars: Vec<String>,
}

impl Parser {
    fn new(input: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: tokenize(input)?, pos: 0, chans: Vec::new(), vars: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn err(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.into(),
            found: describe(self.peek()),
        }
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(what))
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    fn lower_name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::LowerIdent(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.err(what)),
        }
    }

    fn upper_name(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::UpperIdent(name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.err(what)),
        }
    }

    fn resolve_chan(&self, name: String) -> Chan {
        match self.chans.iter().rev().position(|n| n == &name) {
            Some(depth) => Chan::Bound(depth as u32),
            None => Chan::Free(name),
        }
    }

    fn resolve_var(&self, name: String) -> PVar {
        match self.vars.iter().rev().position(|n| n == &name) {
            Some(depth) => PVar::Bound(depth as u32),
            None => PVar::Free(name),
        }
    }

    fn par(&mut self) -> Result<Process, ParseError> {
        let mut acc = self.sum()?;
        while self.peek() == &Tok::Bar {
            self.bump();
            let rhs = self.sum()?;
            acc = Process::Par(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn sum(&mut self) -> Result<Process, ParseError> {
        let mut items = vec![(self.offset(), self.item()?)];
        while self.peek() == &Tok::Plus {
            self.bump();
            items.push((self.offset(), self.item()?));
        }
        if items.len() == 1 {
            return Ok(items.pop().expect("one item").1.into_process());
        }
        let mut summands = Vec::with_capacity(items.len());
        for (offset, item) in items {
            match item {
                Item::Guarded(act, cont) => summands.push((act, cont)),
                Item::Plain(_) => {
                    return Err(ParseError {
                        position: offset,
                        expected: "an action-prefixed summand".to_string(),
                        found: "an unguarded process".to_string(),
                    })
                }
            }
        }
        Ok(Process::Sum(summands))
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        match self.peek() {
            Tok::Tilde | Tok::LowerIdent(_) => {
                let act = self.act()?;
                let cont = if self.peek() == &Tok::Dot {
                    self.bump();
                    self.item()?.into_process()
                } else {
                    Process::Nil
                };
                Ok(Item::Guarded(act, cont))
            }
            _ => Ok(Item::Plain(self.atom()?)),
        }
    }

    fn act(&mut self) -> Result<Act, ParseError> {
        let out = if self.peek() == &Tok::Tilde {
            self.bump();
            true
        } else {
            false
        };
        let name = self.lower_name("a channel name")?;
        let chan = self.resolve_chan(name);
        Ok(if out { Act::Out(chan) } else { Act::In(chan) })
    }

    fn atom(&mut self) -> Result<Process, ParseError> {
        match self.peek().clone() {
            Tok::Num(0) => {
                self.bump();
                Ok(Process::Nil)
            }
            Tok::UpperIdent(name) => {
                self.bump();
                Ok(Process::Var(self.resolve_var(name)))
            }
            Tok::Nu => {
                self.bump();
                let name = self.lower_name("a lowercase channel name")?;
                self.eat(Tok::Dot, "`.`")?;
                self.chans.push(name);
                let body = self.par()?;
                self.chans.pop();
                Ok(Process::New(Box::new(body)))
            }
            Tok::Rec => {
                self.bump();
                let name = self.upper_name("an uppercase recursion variable")?;
                self.eat(Tok::Dot, "`.`")?;
                self.vars.push(name);
                let body = self.par()?;
                self.vars.pop();
                Ok(Process::Rec(Box::new(body)))
            }
            Tok::LParen => {
                self.bump();
                let body = self.par()?;
                self.eat(Tok::RParen, "`)`")?;
                Ok(body)
            }
            _ => Err(self.err("a process")),
        }
    }

    fn label(&mut self) -> Result<RefinedLabel, ParseError> {
        match self.peek().clone() {
            Tok::Pick => {
                self.bump();
                self.eat(Tok::LParen, "`(`")?;
                let index_offset = self.offset();
                let index = match self.peek() {
                    &Tok::Num(n) => {
                        self.bump();
                        n
                    }
                    _ => return Err(self.err("a summand index")),
                };
                self.eat(Tok::RParen, "`)`")?;
                self.eat(Tok::LBrace, "`{`")?;
                let mut summands = vec![self.label_summand()?];
                while self.peek() == &Tok::Plus {
                    self.bump();
                    summands.push(self.label_summand()?);
                }
                self.eat(Tok::RBrace, "`}`")?;
                if index == 0 || index > summands.len() {
                    return Err(ParseError {
                        position: index_offset,
                        expected: format!("a summand index between 1 and {}", summands.len()),
                        found: format!("`{index}`"),
                    });
                }
                Ok(RefinedLabel::Pick { summands, index })
            }
            Tok::Nu => {
                self.bump();
                let name = self.lower_name("a lowercase channel name")?;
                self.eat(Tok::Dot, "`.`")?;
                self.eat(Tok::LParen, "`(`")?;
                self.chans.push(name);
                let inner = self.label()?;
                self.chans.pop();
                self.eat(Tok::RParen, "`)`")?;
                Ok(RefinedLabel::New(Box::new(inner)))
            }
            Tok::Rec => {
                self.bump();
                let name = self.upper_name("an uppercase recursion variable")?;
                self.eat(Tok::Dot, "`.`")?;
                self.vars.push(name);
                let body = self.par()?;
                self.vars.pop();
                Ok(RefinedLabel::Unfold(Box::new(Process::Rec(Box::new(body)))))
            }
            Tok::LParen => {
                self.bump();
                if self.peek() == &Tok::Star {
                    self.bump();
                    self.eat(Tok::Bar, "`|`")?;
                    let right = self.label()?;
                    self.eat(Tok::RParen, "`)`")?;
                    return Ok(RefinedLabel::Right(Box::new(right)));
                }
                let first = self.label()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(first)
                    }
                    Tok::Bar => {
                        self.bump();
                        if self.peek() == &Tok::Star {
                            self.bump();
                            self.eat(Tok::RParen, "`)`")?;
                            Ok(RefinedLabel::Left(Box::new(first)))
                        } else {
                            let second = self.label()?;
                            self.eat(Tok::RParen, "`)`")?;
                            Ok(RefinedLabel::Sync(Box::new(first), Box::new(second)))
                        }
                    }
                    _ => Err(self.err("`|` or `)`")),
                }
            }
            _ => Err(self.err("a label")),
        }
    }

    fn label_summand(&mut self) -> Result<(Act, Process), ParseError> {
        match self.item()? {
            Item::Guarded(act, cont) => Ok((act, cont)),
            Item::Plain(_) => Err(self.err("an action-prefixed summand")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ccs::{encode_label, pretty};

    fn roundtrip(src: &str) {
        let p = parse_process(src).expect(src);
        assert_eq!(pretty(&p), src, "process round trip for {src}");
        assert_eq!(parse_process(&pretty(&p)).unwrap(), p);
    }

    #[test]
    fn processes_round_trip() {
        for src in [
            "0",
            "a.b.0",
            "~a.0",
            "a.0 + ~b.c.0",
            "a.b.0 | ~b.c.0",
            "a.0 | b.0 | c.0",
            "a.0 | (b.0 | c.0)",
            "a.(b.0 + c.0)",
            "a.(b.0 | c.0)",
            "nu a. a.0 | ~a.0",
            "(nu a. a.0) | b.0",
            "rec X. a.X",
            "rec X. a.X | b.X",
            "a.(rec X. a.X)",
            "nu a. nu b. a.b.0",
            "X",
            "a.X + b.Y",
        ] {
            roundtrip(src);
        }
    }

    #[test]
    fn bare_actions_mean_prefixing_nil() {
        assert_eq!(parse_process("a").unwrap(), parse_process("a.0").unwrap());
        assert_eq!(
            parse_process("a + ~b").unwrap(),
            parse_process("a.0 + ~b.0").unwrap()
        );
        assert_eq!(
            parse_process("a | b").unwrap(),
            parse_process("a.0 | b.0").unwrap()
        );
    }

    #[test]
    fn precedence_prefix_then_sum_then_par() {
        assert_eq!(
            parse_process("a.b.0 + c.0 | d.0").unwrap(),
            Process::Par(
                Box::new(parse_process("a.b.0 + c.0").unwrap()),
                Box::new(parse_process("d.0").unwrap()),
            )
        );
    }

    #[test]
    fn binders_reach_as_far_right_as_possible() {
        assert_eq!(
            parse_process("nu a. a.0 | b.0").unwrap(),
            parse_process("nu a. (a.0 | b.0)").unwrap()
        );
        assert_eq!(
            parse_process("rec X. a.X | b.0").unwrap(),
            parse_process("rec X. (a.X | b.0)").unwrap()
        );
    }

    #[test]
    fn binders_resolve_to_indices() {
        let p = parse_process("nu a. a.0").unwrap();
        assert_eq!(
            p,
            Process::New(Box::new(Process::Sum(vec![(
                Act::In(Chan::Bound(0)),
                Process::Nil
            )])))
        );
        let q = parse_process("rec X. a.X").unwrap();
        assert_eq!(
            q,
            Process::Rec(Box::new(Process::Sum(vec![(
                Act::In(Chan::Free("a".to_string())),
                Process::Var(PVar::Bound(0))
            )])))
        );
    }

    #[test]
    fn shadowing_picks_the_nearest_binder() {
        let p = parse_process("nu a. nu a. a.0").unwrap();
        match &p {
            Process::New(outer) => match outer.as_ref() {
                Process::New(inner) => assert_eq!(
                    inner.as_ref(),
                    &Process::Sum(vec![(Act::In(Chan::Bound(0)), Process::Nil)])
                ),
                other => panic!("unexpected {other:?}"),
            },
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unguarded_sum_operands_are_rejected() {
        for src in ["a.0 + 0", "0 + a.0", "a.0 + (b.0 | c.0)", "a.0 + X"] {
            let err = parse_process(src).unwrap_err();
            assert_eq!(err.expected, "an action-prefixed summand", "{src}");
        }
    }

    #[test]
    fn case_conventions_are_enforced() {
        assert!(parse_process("nu A. 0").is_err());
        assert!(parse_process("rec x. 0").is_err());
        assert!(parse_process("~A.0").is_err());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_process("a..0").unwrap_err();
        assert_eq!(err.position, 2);
        assert_eq!(err.expected, "a process");
        assert_eq!(err.found, "`.`");

        let err = parse_process("a.0 |").unwrap_err();
        assert_eq!(err.position, 5);
        assert_eq!(err.found, "end of input");
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let src = "# a tiny system\na.0 | # left sends\n  ~a.b.0\n";
        assert_eq!(
            parse_process(src).unwrap(),
            parse_process("a.0 | ~a.b.0").unwrap()
        );
    }

    #[test]
    fn labels_round_trip() {
        for src in [
            "pick(1){a.0}",
            "pick(2){a.b.0 + ~c.0}",
            "(pick(1){a.b.0}|*)",
            "(*|pick(1){~b.c.0})",
            "(pick(1){b.0}|pick(1){~b.c.0})",
            "nu a.((pick(1){a.0}|pick(1){~a.0}))",
            "nu a.(pick(1){b.a.0})",
            "rec X. a.X",
            "((rec X. a.X)|*)",
            "(*|rec X. a.X)",
            "(*|(*|pick(1){b.0}))",
        ] {
            let u = parse_label(src).expect(src);
            assert_eq!(encode_label(&u), src, "label round trip for {src}");
            assert_eq!(parse_label(&encode_label(&u)).unwrap(), u);
        }
    }

    #[test]
    fn label_grouping_parens_are_transparent() {
        assert_eq!(
            parse_label("(pick(1){a.0})").unwrap(),
            parse_label("pick(1){a.0}").unwrap()
        );
    }

    #[test]
    fn label_binders_bind_their_channels() {
        let u = parse_label("nu a.(pick(1){a.0})").unwrap();
        assert_eq!(
            u,
            RefinedLabel::New(Box::new(RefinedLabel::Pick {
                summands: vec![(Act::In(Chan::Bound(0)), Process::Nil)],
                index: 1,
            }))
        );
    }

    #[test]
    fn pick_index_must_name_a_summand() {
        for src in ["pick(0){a.0}", "pick(3){a.0 + b.0}"] {
            let err = parse_label(src).unwrap_err();
            assert!(err.expected.starts_with("a summand index between"), "{src}");
            assert_eq!(err.position, 5);
        }
    }

    #[test]
    fn trailing_input_is_rejected() {
        assert!(parse_process("a.0 b").is_err());
        assert!(parse_label("pick(1){a.0} extra").is_err());
    }
}
