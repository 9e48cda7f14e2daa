//! A small expression language for complex functions of `z`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' ['-' | '+'] INTEGER)*
//! primary := NUMBER ['i'] | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `z` is the variable, names from [`ElemKind`] plus `powi`/`powc` are
//! functions, and every other identifier is a parameter bound through a
//! [`ParamEnv`]. There is no implicit multiplication.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::jets::{ElemKind, Jet3, JetError, POLE_THRESHOLD};

/// Half-open byte range into the source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at column {} (byte {offset}): expected {}", offset + 1, .expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<&'static str>,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("empty or non-ASCII input")]
    BadInput,
}

impl ParseError {
    /// 0-based byte offset of the failure.
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownFunction { offset, .. } => {
                Some(*offset)
            }
            ParseError::BadInput => None,
        }
    }

    /// 1-based column, as shown to users.
    pub fn column(&self) -> Option<usize> {
        self.offset().map(|o| o + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("parameter `{0}` has no binding")]
    MissingParameter(String),
    #[error("{source} in `{snippet}` (bytes {}..{})", span.start, span.end)]
    Jet {
        source: JetError,
        span: Span,
        snippet: String,
    },
}

impl EvalError {
    pub fn jet_error(&self) -> Option<JetError> {
        match self {
            EvalError::Jet { source, .. } => Some(*source),
            EvalError::MissingParameter(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Elem(ElemKind),
    /// `powi(a, n)` with an integer literal `n`.
    Powi,
    /// `powc(a, w) = exp(w·log a)`, principal branch.
    Powc,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        match name {
            "powi" => Some(Func::Powi),
            "powc" => Some(Func::Powc),
            _ => ElemKind::from_name(name).map(Func::Elem),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Elem(k) => k.name(),
            Func::Powi => "powi",
            Func::Powc => "powc",
        }
    }

    fn arity(self) -> usize {
        match self {
            Func::Elem(_) => 1,
            Func::Powi | Func::Powc => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub enum NodeKind {
    Num(Complex64),
    Var,
    Param(String),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Vec<Node>),
}

/// Expression tree node. Equality compares structure only, never spans.
#[derive(Debug, Clone)]
pub struct Node {
    pub kind: NodeKind,
    pub span: Span,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        use NodeKind::*;
        match (&self.kind, &other.kind) {
            (Num(a), Num(b)) => a == b,
            (Var, Var) => true,
            (Param(a), Param(b)) => a == b,
            (Neg(a), Neg(b)) => a == b,
            (Bin(o1, a1, b1), Bin(o2, a2, b2)) => o1 == o2 && a1 == a2 && b1 == b2,
            (Pow(a, n), Pow(b, m)) => n == m && a == b,
            (Call(f, a), Call(g, b)) => f == g && a == b,
            _ => false,
        }
    }
}

/// A parsed function of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FnExpr {
    root: Node,
    params: BTreeSet<String>,
    source: String,
}

/// Parameter bindings for evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamEnv(BTreeMap<String, Complex64>);

impl ParamEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: impl Into<Complex64>) -> Self {
        self.insert(name, value);
        self
    }

    pub fn insert(&mut self, name: &str, value: impl Into<Complex64>) {
        self.0.insert(name.to_string(), value.into());
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Complex64)> {
        self.0.iter()
    }

    /// Parses a `name=value` binding; the value may be any constant
    /// expression, e.g. `c=0.3`, `c=0.1+0.2i`, `c=1/3`.
    pub fn parse_binding(text: &str) -> Result<(String, Complex64), String> {
        let (name, value) = text
            .split_once('=')
            .ok_or_else(|| format!("expected name=value, got `{text}`"))?;
        let name = name.trim();
        if name.is_empty() || !is_ident_start(name.as_bytes()[0]) || !name.bytes().all(is_ident_char) {
            return Err(format!("invalid parameter name `{name}`"));
        }
        let e = parse(value.trim()).map_err(|e| format!("in value of `{name}`: {e}"))?;
        if !e.params().is_empty() || e.mentions_z() {
            return Err(format!("value of `{name}` must be a constant"));
        }
        let v = e
            .eval(Complex64::new(0.0, 0.0), &ParamEnv::new())
            .map_err(|e| e.to_string())?;
        Ok((name.to_string(), v))
    }
}

impl FnExpr {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn params(&self) -> &BTreeSet<String> {
        &self.params
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn mentions_z(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match &n.kind {
                NodeKind::Var => true,
                NodeKind::Num(_) | NodeKind::Param(_) => false,
                NodeKind::Neg(a) | NodeKind::Pow(a, _) => walk(a),
                NodeKind::Bin(_, a, b) => walk(a) || walk(b),
                NodeKind::Call(_, args) => args.iter().any(walk),
            }
        }
        walk(&self.root)
    }

    fn check_env(&self, env: &ParamEnv) -> Result<(), EvalError> {
        match self.params.iter().find(|p| env.get(p).is_none()) {
            Some(p) => Err(EvalError::MissingParameter(p.clone())),
            None => Ok(()),
        }
    }

    fn jet_err(&self, source: JetError, span: Span) -> EvalError {
        EvalError::Jet {
            source,
            span,
            snippet: self.source.get(span.start..span.end).unwrap_or("").to_string(),
        }
    }

    /// `(f, f', f'', f''')` at `z0`.
    pub fn eval_jet(&self, z0: Complex64, env: &ParamEnv) -> Result<Jet3, EvalError> {
        self.check_env(env)?;
        self.jet_node(&self.root, z0, env)
    }

    fn jet_node(&self, n: &Node, z0: Complex64, env: &ParamEnv) -> Result<Jet3, EvalError> {
        let wrap = |r: Result<Jet3, JetError>| r.map_err(|e| self.jet_err(e, n.span));
        Ok(match &n.kind {
            NodeKind::Num(v) => Jet3::constant(*v),
            NodeKind::Var => Jet3::var(z0),
            NodeKind::Param(p) => Jet3::constant(env.get(p).expect("checked by check_env")),
            NodeKind::Neg(a) => -self.jet_node(a, z0, env)?,
            NodeKind::Bin(op, a, b) => {
                let (a, b) = (self.jet_node(a, z0, env)?, self.jet_node(b, z0, env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => wrap(a.checked_div(b))?,
                }
            }
            NodeKind::Pow(a, k) => wrap(self.jet_node(a, z0, env)?.powi(*k))?,
            NodeKind::Call(f, args) => match f {
                Func::Elem(kind) => wrap(self.jet_node(&args[0], z0, env)?.elem(*kind))?,
                Func::Powi => {
                    let k = integer_literal(&args[1]).expect("validated by parser");
                    wrap(self.jet_node(&args[0], z0, env)?.powi(k))?
                }
                Func::Powc => {
                    let base = self.jet_node(&args[0], z0, env)?;
                    let w = self.jet_node(&args[1], z0, env)?;
                    wrap(base.powc(w))?
                }
            },
        })
    }

    /// Plain value `f(z0)`, with the same pole and branch guards as [`eval_jet`](Self::eval_jet).
    pub fn eval(&self, z0: Complex64, env: &ParamEnv) -> Result<Complex64, EvalError> {
        self.check_env(env)?;
        self.value_node(&self.root, z0, env)
    }

    fn value_node(&self, n: &Node, z0: Complex64, env: &ParamEnv) -> Result<Complex64, EvalError> {
        let wrap = |r: Result<Complex64, JetError>| r.map_err(|e| self.jet_err(e, n.span));
        let div = |a: Complex64, b: Complex64| {
            if b.norm() <= POLE_THRESHOLD {
                Err(JetError::DivisionByZero { at: z0 })
            } else {
                Ok(a / b)
            }
        };
        Ok(match &n.kind {
            NodeKind::Num(v) => *v,
            NodeKind::Var => z0,
            NodeKind::Param(p) => env.get(p).expect("checked by check_env"),
            NodeKind::Neg(a) => -self.value_node(a, z0, env)?,
            NodeKind::Bin(op, a, b) => {
                let (a, b) = (self.value_node(a, z0, env)?, self.value_node(b, z0, env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => wrap(div(a, b))?,
                }
            }
            NodeKind::Pow(a, k) => {
                let a = self.value_node(a, z0, env)?;
                if *k < 0 {
                    wrap(div(Complex64::new(1.0, 0.0), a.powi(-k)))?
                } else {
                    a.powi(*k)
                }
            }
            NodeKind::Call(f, args) => {
                let a = self.value_node(&args[0], z0, env)?;
                match f {
                    Func::Elem(kind) => wrap(kind.apply(a))?,
                    Func::Powi => {
                        let k = integer_literal(&args[1]).expect("validated by parser");
                        if k < 0 {
                            wrap(div(Complex64::new(1.0, 0.0), a.powi(-k)))?
                        } else {
                            a.powi(k)
                        }
                    }
                    Func::Powc => {
                        let w = self.value_node(&args[1], z0, env)?;
                        let l = wrap(ElemKind::Log.apply(a))?;
                        (w * l).exp()
                    }
                }
            }
        })
    }
}

impl fmt::Display for FnExpr {
    /// Fully parenthesized form; re-parsing it yields the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NodeKind::Num(v) => match (v.re, v.im) {
                (re, im) if im == 0.0 => write!(f, "{re}"),
                (re, im) if re == 0.0 => write!(f, "{im}i"),
                (re, im) => write!(f, "({re}+{im}i)"),
            },
            NodeKind::Var => f.write_str("z"),
            NodeKind::Param(p) => f.write_str(p),
            NodeKind::Neg(a) => write!(f, "(-{a})"),
            NodeKind::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            NodeKind::Pow(a, k) => write!(f, "({a}^{k})"),
            NodeKind::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn integer_literal(n: &Node) -> Option<i32> {
    match &n.kind {
        NodeKind::Num(v) if v.im == 0.0 && v.re.fract() == 0.0 && v.re.abs() <= i32::MAX as f64 => {
            Some(v.re as i32)
        }
        NodeKind::Neg(a) => integer_literal(a).map(|k| -k),
        _ => None,
    }
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num { value: f64, imag: bool, integral: bool },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(Tok, Span), ParseError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = self.src.get(start) else {
            return Ok((Tok::Eof, Span { start, end: start }));
        };
        let single = |t| (t, Span { start, end: start + 1 });
        let tok = match b {
            b'+' => single(Tok::Plus),
            b'-' => single(Tok::Minus),
            b'*' => single(Tok::Star),
            b'/' => single(Tok::Slash),
            b'^' => single(Tok::Caret),
            b'(' => single(Tok::LParen),
            b')' => single(Tok::RParen),
            b',' => single(Tok::Comma),
            b'0'..=b'9' | b'.' => return self.number(),
            b if is_ident_start(b) => {
                let mut end = start + 1;
                while end < self.src.len() && is_ident_char(self.src[end]) {
                    end += 1;
                }
                let name = std::str::from_utf8(&self.src[start..end]).expect("ascii");
                self.pos = end;
                return Ok((Tok::Ident(name.to_string()), Span { start, end }));
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: vec!["number", "identifier", "operator", "("],
                })
            }
        };
        self.pos += 1;
        Ok(tok)
    }

    fn number(&mut self) -> Result<(Tok, Span), ParseError> {
        let start = self.pos;
        let digits = |s: &Self, mut p: usize| {
            while p < s.src.len() && s.src[p].is_ascii_digit() {
                p += 1;
            }
            p
        };
        let mut end = digits(self, start);
        let mut integral = true;
        if self.src.get(end) == Some(&b'.') {
            integral = false;
            end = digits(self, end + 1);
        }
        if end == start + 1 && self.src[start] == b'.' {
            return Err(ParseError::Syntax { offset: start + 1, expected: vec!["digit"] });
        }
        if matches!(self.src.get(end), Some(b'e' | b'E')) {
            let mut p = end + 1;
            if matches!(self.src.get(p), Some(b'+' | b'-')) {
                p += 1;
            }
            let q = digits(self, p);
            if q == p {
                return Err(ParseError::Syntax { offset: p, expected: vec!["exponent digits"] });
            }
            integral = false;
            end = q;
        }
        let text = std::str::from_utf8(&self.src[start..end]).expect("ascii");
        let value: f64 = text
            .parse()
            .map_err(|_| ParseError::Syntax { offset: start, expected: vec!["number"] })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax { offset: start, expected: vec!["finite number"] });
        }
        let imag = self.src.get(end) == Some(&b'i')
            && !self.src.get(end + 1).copied().is_some_and(is_ident_char);
        if imag {
            end += 1;
        }
        self.pos = end;
        Ok((Tok::Num { value, imag, integral }, Span { start, end }))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    span: Span,
    params: BTreeSet<String>,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, s) = self.lexer.next()?;
        self.tok = t;
        self.span = s;
        Ok(())
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.span.start, expected })
    }

    fn expect(&mut self, t: Tok, name: &'static str) -> Result<Span, ParseError> {
        if self.tok == t {
            let s = self.span;
            self.bump()?;
            Ok(s)
        } else {
            self.fail(vec![name])
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.tok == Tok::Minus {
            let start = self.span.start;
            self.bump()?;
            let inner = self.unary()?;
            let span = Span { start, end: inner.span.end };
            return Ok(Node { kind: NodeKind::Neg(Box::new(inner)), span });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.primary()?;
        while self.tok == Tok::Caret {
            self.bump()?;
            let (exp, end) = self.int_exponent()?;
            let span = Span { start: base.span.start, end };
            base = Node { kind: NodeKind::Pow(Box::new(base), exp), span };
        }
        Ok(base)
    }

    fn int_exponent(&mut self) -> Result<(i32, usize), ParseError> {
        let sign = match self.tok {
            Tok::Minus => {
                self.bump()?;
                -1
            }
            Tok::Plus => {
                self.bump()?;
                1
            }
            _ => 1,
        };
        match self.tok {
            Tok::Num { value, imag: false, integral: true } if value <= i32::MAX as f64 => {
                let end = self.span.end;
                self.bump()?;
                Ok((sign * value as i32, end))
            }
            _ => self.fail(vec!["integer exponent"]),
        }
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let span = self.span;
        match self.tok.clone() {
            Tok::Num { value, imag, .. } => {
                self.bump()?;
                let v = if imag { Complex64::new(0.0, value) } else { Complex64::new(value, 0.0) };
                Ok(Node { kind: NodeKind::Num(v), span })
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let func = Func::from_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        offset: span.start,
                    })?;
                    return self.call(func, span);
                }
                if Func::from_name(&name).is_some() {
                    return self.fail(vec!["("]);
                }
                let kind = if name == "z" {
                    NodeKind::Var
                } else {
                    self.params.insert(name.clone());
                    NodeKind::Param(name)
                };
                Ok(Node { kind, span })
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            _ => self.fail(vec!["number", "identifier", "("]),
        }
    }

    fn call(&mut self, func: Func, name_span: Span) -> Result<Node, ParseError> {
        self.expect(Tok::LParen, "(")?;
        let mut args = vec![self.expr()?];
        while args.len() < func.arity() {
            self.expect(Tok::Comma, ",")?;
            let arg_start = self.span.start;
            let arg = self.expr()?;
            if func == Func::Powi && integer_literal(&arg).is_none() {
                return Err(ParseError::Syntax { offset: arg_start, expected: vec!["integer literal"] });
            }
            args.push(arg);
        }
        let close = self.expect(Tok::RParen, ")")?;
        Ok(Node {
            kind: NodeKind::Call(func, args),
            span: Span { start: name_span.start, end: close.end },
        })
    }
}

fn binary(op: BinOp, lhs: Node, rhs: Node) -> Node {
    let span = Span { start: lhs.span.start, end: rhs.span.end };
    Node { kind: NodeKind::Bin(op, Box::new(lhs), Box::new(rhs)), span }
}

pub fn parse(text: &str) -> Result<FnExpr, ParseError> {
    if text.trim().is_empty() || !text.is_ascii() {
        return Err(ParseError::BadInput);
    }
    let mut p = Parser {
        lexer: Lexer { src: text.as_bytes(), pos: 0 },
        tok: Tok::Eof,
        span: Span::default(),
        params: BTreeSet::new(),
    };
    p.bump()?;
    let root = p.expr()?;
    if p.tok != Tok::Eof {
        let expected = match p.tok {
            Tok::RParen => vec!["end of input"],
            _ => vec!["operator", "end of input"],
        };
        return p.fail(expected);
    }
    Ok(FnExpr { root, params: p.params, source: text.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn num(v: f64) -> Node {
        Node { kind: NodeKind::Num(c(v, 0.0)), span: Span::default() }
    }

    fn var() -> Node {
        Node { kind: NodeKind::Var, span: Span::default() }
    }

    #[test]
    fn precedence_and_associativity() {
        let e = parse("1/z + 0.5*z").unwrap();
        let want = binary(BinOp::Add, binary(BinOp::Div, num(1.0), var()), binary(BinOp::Mul, num(0.5), var()));
        assert_eq!(e.root(), &want);

        let e = parse("z - 1 - 2").unwrap();
        let want = binary(BinOp::Sub, binary(BinOp::Sub, var(), num(1.0)), num(2.0));
        assert_eq!(e.root(), &want);

        // unary minus binds looser than ^
        let e = parse("-z^2").unwrap();
        assert!(matches!(&e.root().kind, NodeKind::Neg(inner) if matches!(inner.kind, NodeKind::Pow(_, 2))));
    }

    #[test]
    fn parameters_are_collected() {
        let e = parse("sqrt(c)*cot(sqrt(c)*z)").unwrap();
        assert_eq!(e.params().iter().cloned().collect::<Vec<_>>(), vec!["c".to_string()]);
    }

    #[test]
    fn unbalanced_parenthesis() {
        let err = parse("z/(1 - c*z").unwrap_err();
        assert_eq!(err, ParseError::Syntax { offset: 10, expected: vec![")"] });
        assert_eq!(err.column(), Some(11));
    }

    #[test]
    fn parse_failures() {
        assert!(matches!(parse("foo(z)"), Err(ParseError::UnknownFunction { offset: 0, .. })));
        assert!(matches!(parse("2 z"), Err(ParseError::Syntax { offset: 2, .. })));
        assert!(matches!(parse("z^0.5"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("sin"), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("powi(z, c)"), Err(ParseError::Syntax { .. })));
        assert_eq!(parse("  "), Err(ParseError::BadInput));
        assert!(matches!(parse("z)"), Err(ParseError::Syntax { offset: 1, .. })));
    }

    #[test]
    fn imaginary_literals() {
        let e = parse("z + 2.5i").unwrap();
        assert_eq!(e.eval(c(1.0, 0.0), &ParamEnv::new()).unwrap(), c(1.0, 2.5));
        // `i` alone is an ordinary parameter name
        assert!(parse("i*z").unwrap().params().contains("i"));
    }

    #[test]
    fn mobius_jet() {
        let e = parse("z/(1-c*z)").unwrap();
        let env = ParamEnv::new().with("c", 0.3);
        let j = e.eval_jet(c(0.0, 0.0), &env).unwrap();
        // Taylor z + cz² + c²z³: d2 = 2c, d3 = 6c²
        let want = [c(0.0, 0.0), c(1.0, 0.0), c(0.6, 0.0), c(0.54, 0.0)];
        for (a, b) in j.components().iter().zip(want) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
    }

    #[test]
    fn evaluation_errors() {
        let e = parse("1/z").unwrap();
        let err = e.eval_jet(c(0.0, 0.0), &ParamEnv::new()).unwrap_err();
        assert!(matches!(err.jet_error(), Some(JetError::DivisionByZero { .. })));
        match err {
            EvalError::Jet { span, snippet, .. } => {
                assert_eq!(span, Span { start: 0, end: 3 });
                assert_eq!(snippet, "1/z");
            }
            other => panic!("{other:?}"),
        }
        let e = parse("z + c").unwrap();
        assert_eq!(
            e.eval_jet(c(0.0, 0.0), &ParamEnv::new()),
            Err(EvalError::MissingParameter("c".into()))
        );
        let j = parse("exp(z)").unwrap().eval_jet(c(0.0, 0.0), &ParamEnv::new()).unwrap();
        assert_eq!(j.components(), [c(1.0, 0.0); 4]);
    }

    #[test]
    fn value_and_jet_agree() {
        let env = ParamEnv::new().with("a", c(0.2, -0.1));
        for text in ["powc(z + 2, a)", "powi(z, -3) + z^2", "tanh(a*z)/(1 + z)", "log(1 + z) - inv(2 - z)"] {
            let e = parse(text).unwrap();
            let z = c(0.3, 0.4);
            let v = e.eval(z, &env).unwrap();
            let j = e.eval_jet(z, &env).unwrap();
            assert!((v - j.d0).norm() < 1e-14, "{text}");
        }
    }

    #[test]
    fn bindings() {
        assert_eq!(ParamEnv::parse_binding("c=0.4").unwrap(), ("c".into(), c(0.4, 0.0)));
        assert_eq!(ParamEnv::parse_binding("c = 0.1+0.2i").unwrap().1, c(0.1, 0.2));
        assert!(ParamEnv::parse_binding("c=z").is_err());
        assert!(ParamEnv::parse_binding("1c=2").is_err());
        assert!(ParamEnv::parse_binding("c").is_err());
    }

    #[test]
    fn display_round_trip() {
        for text in ["1/z + 0.5*z", "-z^-2 + 3i*sin(z)", "powc(z+1, 0.5) - powi(z, 3)", "z/(1 - c*z)"] {
            let e = parse(text).unwrap();
            let again = parse(&e.to_string()).unwrap();
            assert_eq!(again.root(), e.root(), "{text} -> {e}");
        }
    }
}
