//! Arithmetic expressions and predicates over natural-valued registers.
//!
//! Arithmetic stays inside the naturals: `-` is truncated subtraction
//! (monus) and overflow saturates, so every expression is total on every
//! memory. Predicates are comparisons combined with `&&`, `||` and `!`.

use std::collections::BTreeSet;

use super::Memory;

/// Where an expression parse failed and what was acceptable there.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at offset {position}: expected {expected}, found {found}")]
pub struct ExprError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(u64),
    Var(String),
    Add(Box<Expr>, Box<Expr>),
    Monus(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, memory: &Memory) -> u64 {
        match self {
            Expr::Const(n) => *n,
            Expr::Var(x) => memory.get(x),
            Expr::Add(a, b) => a.eval(memory).saturating_add(b.eval(memory)),
            Expr::Monus(a, b) => a.eval(memory).saturating_sub(b.eval(memory)),
            Expr::Mul(a, b) => a.eval(memory).saturating_mul(b.eval(memory)),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(x) => {
                out.insert(x.clone());
            }
            Expr::Add(a, b) | Expr::Monus(a, b) | Expr::Mul(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn holds(self, l: u64, r: u64) -> bool {
        match self {
            CmpOp::Eq => l == r,
            CmpOp::Ne => l != r,
            CmpOp::Lt => l < r,
            CmpOp::Le => l <= r,
            CmpOp::Gt => l > r,
            CmpOp::Ge => l >= r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pred {
    Cmp(Expr, CmpOp, Expr),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
    Not(Box<Pred>),
}

impl Pred {
    pub fn eval(&self, memory: &Memory) -> bool {
        match self {
            Pred::Cmp(l, op, r) => op.holds(l.eval(memory), r.eval(memory)),
            Pred::And(a, b) => a.eval(memory) && b.eval(memory),
            Pred::Or(a, b) => a.eval(memory) || b.eval(memory),
            Pred::Not(p) => !p.eval(memory),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Pred::Cmp(l, _, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
            Pred::And(a, b) | Pred::Or(a, b) => {
                a.collect_variables(out);
                b.collect_variables(out);
            }
            Pred::Not(p) => p.collect_variables(out),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut parser = Parser::new(text)?;
    let expr = parser.expr()?;
    parser.expect_eof()?;
    Ok(expr)
}

pub fn parse_pred(text: &str) -> Result<Pred, ExprError> {
    let mut parser = Parser::new(text)?;
    let pred = parser.pred()?;
    parser.expect_eof()?;
    Ok(pred)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    Cmp(CmpOp),
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(n) => format!("`{n}`"),
        Tok::Ident(x) => format!("`{x}`"),
        Tok::Plus => "`+`".to_string(),
        Tok::Minus => "`-`".to_string(),
        Tok::Star => "`*`".to_string(),
        Tok::LParen => "`(`".to_string(),
        Tok::RParen => "`)`".to_string(),
        Tok::Cmp(op) => match op {
            CmpOp::Eq => "`==`".to_string(),
            CmpOp::Ne => "`!=`".to_string(),
            CmpOp::Lt => "`<`".to_string(),
            CmpOp::Le => "`<=`".to_string(),
            CmpOp::Gt => "`>`".to_string(),
            CmpOp::Ge => "`>=`".to_string(),
        },
        Tok::AndAnd => "`&&`".to_string(),
        Tok::OrOr => "`||`".to_string(),
        Tok::Bang => "`!`".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(i, c)) = it.peek() {
        match c {
            c if c.is_whitespace() => {
                it.next();
            }
            '+' => {
                it.next();
                out.push((i, Tok::Plus));
            }
            '-' => {
                it.next();
                out.push((i, Tok::Minus));
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
            '=' | '!' | '<' | '>' | '&' | '|' => {
                it.next();
                let second = it.peek().map(|&(_, d)| d);
                let tok = match (c, second) {
                    ('=', Some('=')) => {
                        it.next();
                        Tok::Cmp(CmpOp::Eq)
                    }
                    ('!', Some('=')) => {
                        it.next();
                        Tok::Cmp(CmpOp::Ne)
                    }
                    ('<', Some('=')) => {
                        it.next();
                        Tok::Cmp(CmpOp::Le)
                    }
                    ('>', Some('=')) => {
                        it.next();
                        Tok::Cmp(CmpOp::Ge)
                    }
                    ('&', Some('&')) => {
                        it.next();
                        Tok::AndAnd
                    }
                    ('|', Some('|')) => {
                        it.next();
                        Tok::OrOr
                    }
                    ('<', _) => Tok::Cmp(CmpOp::Lt),
                    ('>', _) => Tok::Cmp(CmpOp::Gt),
                    ('!', _) => Tok::Bang,
                    _ => {
                        return Err(ExprError {
                            position: i,
                            expected: "an operator".to_string(),
                            found: format!("`{c}`"),
                        })
                    }
                };
                out.push((i, tok));
            }
            c if c.is_ascii_digit() => {
                let mut digits = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    digits.push(d);
                    it.next();
                }
                let value = digits.parse().map_err(|_| ExprError {
                    position: i,
                    expected: "a smaller number".to_string(),
                    found: format!("`{digits}`"),
                })?;
                out.push((i, Tok::Num(value)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, d)) = it.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    name.push(d);
                    it.next();
                }
                out.push((i, Tok::Ident(name)));
            }
            other => {
                return Err(ExprError {
                    position: i,
                    expected: "a token".to_string(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((text.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, ExprError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn bump(&mut self) {
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
    }

    fn err(&self, expected: impl Into<String>) -> ExprError {
        ExprError {
            position: self.toks[self.pos].0,
            expected: expected.into(),
            found: describe(self.peek()),
        }
    }

    fn expect_eof(&self) -> Result<(), ExprError> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.err("end of input"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::Monus(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.factor()?;
        while self.peek() == &Tok::Star {
            self.bump();
            acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::Ident(x) => {
                self.bump();
                Ok(Expr::Var(x))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() == &Tok::RParen {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(self.err("`)`"))
                }
            }
            _ => Err(self.err("a value")),
        }
    }

    fn pred(&mut self) -> Result<Pred, ExprError> {
        let mut acc = self.conjunction()?;
        while self.peek() == &Tok::OrOr {
            self.bump();
            acc = Pred::Or(Box::new(acc), Box::new(self.conjunction()?));
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Pred, ExprError> {
        let mut acc = self.pred_atom()?;
        while self.peek() == &Tok::AndAnd {
            self.bump();
            acc = Pred::And(Box::new(acc), Box::new(self.pred_atom()?));
        }
        Ok(acc)
    }

    /// A `(` here is ambiguous: it may group a predicate or open the left
    /// expression of a comparison. Try the comparison first and fall back.
    fn pred_atom(&mut self) -> Result<Pred, ExprError> {
        if self.peek() == &Tok::Bang {
            self.bump();
            return Ok(Pred::Not(Box::new(self.pred_atom()?)));
        }
        let save = self.pos;
        match self.comparison() {
            Ok(p) => Ok(p),
            Err(cmp_err) => {
                self.pos = save;
                if self.peek() == &Tok::LParen {
                    self.bump();
                    let inner = self.pred()?;
                    if self.peek() == &Tok::RParen {
                        self.bump();
                        Ok(inner)
                    } else {
                        Err(self.err("`)`"))
                    }
                } else {
                    Err(cmp_err)
                }
            }
        }
    }

    fn comparison(&mut self) -> Result<Pred, ExprError> {
        let left = self.expr()?;
        let op = match self.peek() {
            &Tok::Cmp(op) => op,
            _ => return Err(self.err("a comparison operator")),
        };
        self.bump();
        let right = self.expr()?;
        Ok(Pred::Cmp(left, op, right))
    }
}
