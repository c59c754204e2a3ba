//! Arithmetic expressions over `x1..xn`, `u1..um`, `d1..dp`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := NUMBER | IDENT | ('min' | 'max') '(' expr (',' expr)+ ')' | '(' expr ')'
//! IDENT   := ('x' | 'u' | 'd') DIGITS        (1-based)
//! NUMBER  := DIGITS ('.' DIGITS?)? ([eE] [+-]? DIGITS)?  |  '.' DIGITS ...
//! ```

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    State,
    Input,
    Disturbance,
}

impl VarKind {
    fn prefix(self) -> char {
        match self {
            VarKind::State => 'x',
            VarKind::Input => 'u',
            VarKind::Disturbance => 'd',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index.
    Var(VarKind, usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
}

/// How many variables of each kind are in scope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arity {
    pub states: usize,
    pub inputs: usize,
    pub disturbances: usize,
}

/// Parse failure with a 1-based character column into the source text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    chars: Vec<(usize, char)>,
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.char_indices().collect(),
            src,
            pos: 0,
        }
    }

    fn err(&self, at: usize, message: impl Into<String>) -> ExprError {
        ExprError {
            column: at + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    /// Returns (column index, token).
    fn next(&mut self) -> Result<(usize, Tok), ExprError> {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((start, Tok::End));
        };
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            c if c.is_ascii_digit() || c == '.' => return self.number(start),
            c if c.is_ascii_alphabetic() || c == '_' => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                return Ok((start, Tok::Ident(self.slice(start, self.pos))));
            }
            other => return Err(self.err(start, format!("unexpected character {other:?}"))),
        };
        self.pos += 1;
        Ok((start, tok))
    }

    fn slice(&self, from: usize, to: usize) -> String {
        let a = self.chars[from].0;
        let b = self.chars.get(to).map_or(self.src.len(), |(i, _)| *i);
        self.src[a..b].to_string()
    }

    fn number(&mut self, start: usize) -> Result<(usize, Tok), ExprError> {
        // Greedily take everything that could belong to a literal, then let
        // the float parser decide; "1.2.3" or "1e" fail as malformed.
        while let Some(c) = self.peek() {
            let prev = if self.pos > start { self.chars[self.pos - 1].1 } else { ' ' };
            let sign_in_exponent = (c == '+' || c == '-') && (prev == 'e' || prev == 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || sign_in_exponent {
                self.pos += 1;
            } else {
                break;
            }
        }
        if matches!(self.peek(), Some(c) if c.is_ascii_alphabetic() || c == '_') {
            return Err(self.err(start, "malformed numeric literal"));
        }
        let text = self.slice(start, self.pos);
        text.parse::<f64>()
            .map(|v| (start, Tok::Num(v)))
            .map_err(|_| self.err(start, format!("malformed numeric literal {text:?}")))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    cur: (usize, Tok),
    arity: Arity,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(usize, Tok), ExprError> {
        let next = self.lex.next()?;
        Ok(std::mem::replace(&mut self.cur, next))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ExprError> {
        if self.cur.1 == want {
            self.bump()?;
            Ok(())
        } else {
            Err(self.lex.err(self.cur.0, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.cur.1 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.cur.1 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.cur.1 == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let (at, tok) = self.bump()?;
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident(name) if name == "min" || name == "max" => {
                self.expect(Tok::LParen, &format!("'(' after {name}"))?;
                let mut args = vec![self.expr()?];
                while self.cur.1 == Tok::Comma {
                    self.bump()?;
                    args.push(self.expr()?);
                }
                self.expect(Tok::RParen, "')'")?;
                if args.len() < 2 {
                    return Err(self.lex.err(at, format!("{name} takes at least 2 arguments, got 1")));
                }
                Ok(if name == "min" { Expr::Min(args) } else { Expr::Max(args) })
            }
            Tok::Ident(name) => self.variable(at, &name),
            Tok::End => Err(self.lex.err(at, "unexpected end of expression")),
            other => Err(self.lex.err(at, format!("unexpected token {other:?}"))),
        }
    }

    fn variable(&self, at: usize, name: &str) -> Result<Expr, ExprError> {
        let unknown = || self.lex.err(at, format!("unknown identifier {name:?}"));
        let mut chars = name.chars();
        let kind = match chars.next() {
            Some('x') => VarKind::State,
            Some('u') => VarKind::Input,
            Some('d') => VarKind::Disturbance,
            _ => return Err(unknown()),
        };
        let idx: usize = chars.as_str().parse().map_err(|_| unknown())?;
        let limit = match kind {
            VarKind::State => self.arity.states,
            VarKind::Input => self.arity.inputs,
            VarKind::Disturbance => self.arity.disturbances,
        };
        if idx == 0 || idx > limit || chars.as_str().starts_with('0') {
            return Err(unknown());
        }
        Ok(Expr::Var(kind, idx - 1))
    }
}

impl Expr {
    pub fn parse(src: &str, arity: Arity) -> Result<Expr, ExprError> {
        let mut lex = Lexer::new(src);
        let cur = lex.next()?;
        let mut p = Parser { lex, cur, arity };
        let e = p.expr()?;
        if p.cur.1 != Tok::End {
            return Err(p.lex.err(p.cur.0, "unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64], u: &[f64], d: &[f64]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Var(VarKind::State, i) => x[*i],
            Expr::Var(VarKind::Input, i) => u[*i],
            Expr::Var(VarKind::Disturbance, i) => d[*i],
            Expr::Neg(e) => -e.eval(x, u, d),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, u, d), b.eval(x, u, d));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Min(args) => args.iter().map(|e| e.eval(x, u, d)).fold(f64::INFINITY, f64::min),
            Expr::Max(args) => args
                .iter()
                .map(|e| e.eval(x, u, d))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Fully parenthesized; reparses to an expression with identical values.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{})", -v),
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(k, i) => write!(f, "{}{}", k.prefix(), i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({a} {sym} {b})")
            }
            Expr::Min(args) | Expr::Max(args) => {
                f.write_str(if matches!(self, Expr::Min(_)) { "min(" } else { "max(" })?;
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

#[cfg(test)]
mod tests {
    use super::*;

    const A2: Arity = Arity {
        states: 2,
        inputs: 1,
        disturbances: 1,
    };

    #[test]
    fn evaluates_affine_expression() {
        let e = Expr::parse("1.2*x1 + 0.1*x2 + d1", A2).unwrap();
        let v = e.eval(&[50.0, 25.0], &[0.0], &[0.2]);
        assert!((v - 62.7).abs() < 1e-12, "{v}");
    }

    #[test]
    fn precedence_and_unary() {
        let e = Expr::parse("-x1 + 2*3 - 4/2", A2).unwrap();
        assert_eq!(e.eval(&[1.0, 0.0], &[0.0], &[0.0]), 3.0);
        let e = Expr::parse("max(x1, -x2, 0) * min(u1, 1e1)", A2).unwrap();
        assert_eq!(e.eval(&[-1.0, -3.0], &[2.0], &[0.0]), 6.0);
    }

    #[test]
    fn trailing_operator_is_an_error() {
        let err = Expr::parse("x1 +", A2).unwrap_err();
        assert_eq!(err.column, 5);
        assert!(err.message.contains("end"));
    }

    #[test]
    fn unknown_identifier() {
        let err = Expr::parse("x3", A2).unwrap_err();
        assert!(err.message.contains("unknown identifier"));
        assert_eq!(err.column, 1);
        assert!(Expr::parse("y1", A2).is_err());
        assert!(Expr::parse("x0", A2).is_err());
        assert!(Expr::parse("x01", A2).is_err());
    }

    #[test]
    fn arity_and_literals() {
        assert!(Expr::parse("min(x1)", A2).unwrap_err().message.contains("at least 2"));
        let err = Expr::parse("1.2.3 + x1", A2).unwrap_err();
        assert!(err.message.contains("malformed"));
        assert!(Expr::parse("2x1", A2).is_err());
        assert_eq!(Expr::parse("1.5e-1", A2).unwrap(), Expr::Const(0.15));
    }

    #[test]
    fn display_reparses() {
        let src = "max(x1 - -2.5, 0) / (1 + d1) - u1*x2";
        let e = Expr::parse(src, A2).unwrap();
        let again = Expr::parse(&e.to_string(), A2).unwrap();
        assert_eq!(e, again);
    }
}
