//! Expression language for algebra elements.
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | postfix
//! postfix := primary ('^' '*')*
//! primary := INT | 'i' | atom | '[' sum ',' sum ']' | '(' sum ')'
//! atom    := ('B' | 'Bh') '[' index ',' index ']' ('@' symbol ('.' symbol)*)?
//! index   := '-'? INT
//! symbol  := IDENT '~'?
//! ```
//!
//! `B` atoms are RHPWN generators, `Bh` atoms belong to `w∞` (or to the Witt
//! subalgebra when [`Options::witt`] is set).

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use rhpwn_core::lie::{bracket, AlgebraKind, Element, Generator, LieError};
use rhpwn_core::scalar::CScalar;
use rhpwn_core::testfn::{FnLabel, FnSymbol};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Accept out-of-domain generator indices.
    pub relaxed: bool,
    /// Interpret `Bh` atoms as Witt generators.
    pub witt: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", .expected.join(" | "))]
    Syntax { offset: usize, expected: Vec<&'static str>, found: String },
    #[error("domain error at byte {offset}: {kind} has no generator [{n},{k}]")]
    Domain { offset: usize, kind: AlgebraKind, n: i64, k: i64 },
    #[error("type error at byte {offset}: {message}")]
    Type { offset: usize, message: String },
    #[error("error at byte {offset}: {source}")]
    Lie { offset: usize, source: LieError },
}

impl DslError {
    pub fn offset(&self) -> usize {
        match self {
            DslError::Syntax { offset, .. }
            | DslError::Domain { offset, .. }
            | DslError::Type { offset, .. }
            | DslError::Lie { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "integer {v}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, DslError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v: BigInt = input[start..i].parse().expect("digits");
            out.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(input[start..i].to_string())));
        } else if "+-*/^[](),@.~".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            let found = input[i..].chars().next().map(|ch| format!("'{ch}'")).unwrap_or_default();
            return Err(DslError::Syntax { offset: i, expected: vec!["token"], found });
        }
    }
    out.push((input.len(), Tok::End));
    Ok(out)
}

/// Parsed expression; every node records the byte offset where it starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(usize, BigInt),
    ImagUnit(usize),
    Atom { offset: usize, hat: bool, n: i64, k: i64, label: Option<Vec<FnSymbol>> },
    Add(usize, Box<Expr>, Box<Expr>),
    Sub(usize, Box<Expr>, Box<Expr>),
    Mul(usize, Box<Expr>, Box<Expr>),
    Div(usize, Box<Expr>, Box<Expr>),
    Neg(usize, Box<Expr>),
    Star(usize, Box<Expr>),
    Bracket(usize, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn offset(&self) -> usize {
        match self {
            Expr::Int(o, _) | Expr::ImagUnit(o) => *o,
            Expr::Atom { offset, .. } => *offset,
            Expr::Add(o, ..)
            | Expr::Sub(o, ..)
            | Expr::Mul(o, ..)
            | Expr::Div(o, ..)
            | Expr::Neg(o, _)
            | Expr::Star(o, _)
            | Expr::Bracket(o, ..) => *o,
        }
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: Vec<&'static str>) -> Result<T, DslError> {
        Err(DslError::Syntax { offset: self.offset(), expected, found: self.peek().to_string() })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char, name: &'static str) -> Result<(), DslError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(vec![name])
        }
    }

    fn sum(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.product()?;
        loop {
            let at = self.offset();
            if self.eat('+') {
                lhs = Expr::Add(at, Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(at, Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, DslError> {
        let mut lhs = self.unary()?;
        loop {
            let at = self.offset();
            if self.eat('*') {
                lhs = Expr::Mul(at, Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(at, Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, DslError> {
        let at = self.offset();
        if self.eat('-') {
            return Ok(Expr::Neg(at, Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, DslError> {
        let mut e = self.primary()?;
        loop {
            let at = self.offset();
            if self.eat('^') {
                self.expect('*', "'*'")?;
                e = Expr::Star(at, Box::new(e));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Expr, DslError> {
        const START: [&str; 6] = ["integer", "'i'", "'B'", "'Bh'", "'['", "'('"];
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(at, v))
            }
            Tok::Ident(name) if name == "i" => {
                self.bump();
                Ok(Expr::ImagUnit(at))
            }
            Tok::Ident(name) if name == "B" || name == "Bh" => {
                self.bump();
                self.atom(at, name == "Bh")
            }
            Tok::Sym('[') => {
                self.bump();
                let x = self.sum()?;
                self.expect(',', "','")?;
                let y = self.sum()?;
                self.expect(']', "']'")?;
                Ok(Expr::Bracket(at, Box::new(x), Box::new(y)))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.sum()?;
                self.expect(')', "')'")?;
                Ok(e)
            }
            _ => self.fail(START.to_vec()),
        }
    }

    fn atom(&mut self, offset: usize, hat: bool) -> Result<Expr, DslError> {
        self.expect('[', "'['")?;
        let n = self.index()?;
        self.expect(',', "','")?;
        let k = self.index()?;
        self.expect(']', "']'")?;
        let label = if self.eat('@') {
            let mut symbols = vec![self.symbol()?];
            while self.eat('.') {
                symbols.push(self.symbol()?);
            }
            Some(symbols)
        } else {
            None
        };
        Ok(Expr::Atom { offset, hat, n, k, label })
    }

    fn index(&mut self) -> Result<i64, DslError> {
        let negative = self.eat('-');
        let at = self.offset();
        match self.peek().clone() {
            Tok::Int(v) => {
                let v = i64::try_from(&v).map_err(|_| DslError::Syntax {
                    offset: at,
                    expected: vec!["index within 64-bit range"],
                    found: format!("integer {v}"),
                })?;
                self.bump();
                Ok(if negative { -v } else { v })
            }
            _ => self.fail(if negative { vec!["integer"] } else { vec!["integer", "'-'"] }),
        }
    }

    fn symbol(&mut self) -> Result<FnSymbol, DslError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                let mut s = FnSymbol::new(name);
                if self.eat('~') {
                    s = s.conj();
                }
                Ok(s)
            }
            _ => self.fail(vec!["test function name"]),
        }
    }
}

pub fn parse(input: &str) -> Result<Expr, DslError> {
    let mut p = Parser { toks: lex(input)?, pos: 0 };
    let e = p.sum()?;
    if *p.peek() != Tok::End {
        return p.fail(vec!["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]);
    }
    Ok(e)
}

/// Parses a `.`-separated label such as `f.g~`.
pub fn parse_label(input: &str) -> Result<FnLabel, DslError> {
    let mut p = Parser { toks: lex(input)?, pos: 0 };
    let mut symbols = vec![p.symbol()?];
    while p.eat('.') {
        symbols.push(p.symbol()?);
    }
    if *p.peek() != Tok::End {
        return p.fail(vec!["'.'", "end of input"]);
    }
    Ok(FnLabel::formal(symbols))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Scalar(CScalar),
    Element(Element),
}

impl Value {
    fn describe(&self) -> String {
        match self {
            Value::Scalar(_) => "scalar".into(),
            Value::Element(e) => format!("{} element", e.kind()),
        }
    }
}

fn lie_at(offset: usize) -> impl Fn(LieError) -> DslError {
    move |source| match source {
        LieError::Domain { kind, n, k } => DslError::Domain { offset, kind, n, k },
        LieError::KindMismatch(a, b) => {
            DslError::Type { offset, message: format!("cannot combine {a} and {b} elements") }
        }
        source => DslError::Lie { offset, source },
    }
}

fn type_error(offset: usize, message: String) -> DslError {
    DslError::Type { offset, message }
}

pub fn evaluate(e: &Expr, opts: Options) -> Result<Value, DslError> {
    use Value::{Element as El, Scalar as Sc};
    Ok(match e {
        Expr::Int(_, v) => Sc(CScalar::from_bigint(v.clone())),
        Expr::ImagUnit(_) => Sc(CScalar::i()),
        Expr::Atom { offset, hat, n, k, label } => {
            let kind = match (hat, opts.witt) {
                (false, _) => AlgebraKind::Rhpwn,
                (true, false) => AlgebraKind::Winfinity,
                (true, true) => AlgebraKind::Witt,
            };
            let mut g = if opts.relaxed {
                Generator::relaxed(kind, *n, *k)
            } else {
                Generator::new(kind, *n, *k).map_err(lie_at(*offset))?
            };
            if let Some(symbols) = label {
                g = g.with_label(FnLabel::formal(symbols.clone()));
            }
            El(Element::basis(g))
        }
        Expr::Add(at, x, y) | Expr::Sub(at, x, y) => {
            let subtract = matches!(e, Expr::Sub(..));
            match (evaluate(x, opts)?, evaluate(y, opts)?) {
                (Sc(a), Sc(b)) => Sc(if subtract { &a - &b } else { &a + &b }),
                (El(a), El(b)) => {
                    let r = if subtract { a.sub(&b) } else { a.add(&b) };
                    El(r.map_err(lie_at(*at))?)
                }
                (a, b) => return Err(type_error(*at, format!("cannot add {} and {}", a.describe(), b.describe()))),
            }
        }
        Expr::Mul(at, x, y) => match (evaluate(x, opts)?, evaluate(y, opts)?) {
            (Sc(a), Sc(b)) => Sc(&a * &b),
            (Sc(c), El(v)) | (El(v), Sc(c)) => El(v.scale(&c)),
            (El(_), El(_)) => {
                return Err(type_error(*at, "product of two elements; use [X, Y] for the bracket".into()))
            }
        },
        Expr::Div(at, x, y) => {
            let d = match evaluate(y, opts)? {
                Sc(d) => d,
                other => return Err(type_error(*at, format!("cannot divide by {}", other.describe()))),
            };
            let inv = d.recip().map_err(|_| type_error(*at, "division by zero".into()))?;
            match evaluate(x, opts)? {
                Sc(a) => Sc(&a * &inv),
                El(v) => El(v.scale(&inv)),
            }
        }
        Expr::Neg(_, x) => match evaluate(x, opts)? {
            Sc(a) => Sc(-a),
            El(v) => El(v.neg()),
        },
        Expr::Star(_, x) => match evaluate(x, opts)? {
            Sc(a) => Sc(a.conj()),
            El(v) => El(v.involution()),
        },
        Expr::Bracket(at, x, y) => match (evaluate(x, opts)?, evaluate(y, opts)?) {
            (El(a), El(b)) => El(bracket(&a, &b).map_err(lie_at(*at))?),
            (a, b) => {
                return Err(type_error(
                    *at,
                    format!("bracket needs two elements, got {} and {}", a.describe(), b.describe()),
                ))
            }
        },
    })
}

/// Parses and evaluates; a bare scalar is rejected.
pub fn eval_element(input: &str, opts: Options) -> Result<Element, DslError> {
    match evaluate(&parse(input)?, opts)? {
        Value::Element(e) => Ok(e),
        Value::Scalar(_) => Err(type_error(0, "expression is a scalar, not an element".into())),
    }
}

/// Reads back rendered text of an element of a known kind; `0` is the zero element.
pub fn parse_element(input: &str, kind: AlgebraKind, relaxed: bool) -> Result<Element, DslError> {
    let opts = Options { relaxed, witt: kind == AlgebraKind::Witt };
    match evaluate(&parse(input)?, opts)? {
        Value::Element(e) if e.kind() == kind => Ok(e),
        Value::Element(e) => Err(type_error(0, format!("expected {kind}, found {}", e.kind()))),
        Value::Scalar(c) if c.is_zero() => Ok(Element::zero(kind)),
        Value::Scalar(_) => Err(type_error(0, "expression is a scalar, not an element".into())),
    }
}
