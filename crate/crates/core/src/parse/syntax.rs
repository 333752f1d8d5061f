//! Tokenizer and Pratt parser producing a span-annotated syntax tree.

use num_bigint::BigInt;

use crate::error::{Error, Result};

/// Byte range `start..end` in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    fn join(self, o: Span) -> Span {
        Span { start: self.start.min(o.start), end: self.end.max(o.end) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Number(BigInt),
    ImagUnit,
    Variable,
    /// `y` followed by this many primes.
    Derivative(usize),
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    /// `lhs = rhs`, only at the top level.
    Equation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprAst {
    pub kind: ExprKind,
    pub children: Vec<ExprAst>,
    pub span: Span,
}

impl ExprAst {
    fn leaf(kind: ExprKind, span: Span) -> Self {
        ExprAst { kind, children: Vec::new(), span }
    }

    fn node(kind: ExprKind, children: Vec<ExprAst>) -> Self {
        let span = children.iter().skip(1).fold(children[0].span, |s, c| s.join(c.span));
        ExprAst { kind, children, span }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Imag,
    Var,
    Y(usize),
    Op(char),
    LParen,
    RParen,
    Eq,
}

pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Error {
    Error::Syntax { start: span.start, end: span.end, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, Span)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                let mut end = i + 1;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                return Err(syntax(Span { start, end }, "decimal literals are not exact; write a fraction p/q"));
            }
            out.push((Tok::Int(text[start..i].parse().unwrap()), Span { start, end: i }));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let tok = match &text[start..i] {
                "i" | "I" => Tok::Imag,
                "X" | "x" | "z" => Tok::Var,
                "y" => {
                    let mut primes = 0;
                    while i < bytes.len() && bytes[i] == b'\'' {
                        primes += 1;
                        i += 1;
                    }
                    Tok::Y(primes)
                }
                other => return Err(syntax(Span { start, end: i }, format!("unknown identifier {other:?}"))),
            };
            out.push((tok, Span { start, end: i }));
            continue;
        }
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'=' => Tok::Eq,
            b'.' => return Err(syntax(Span { start, end: i + 1 }, "decimal literals are not exact; write a fraction p/q")),
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(syntax(Span { start, end: i + ch.len_utf8() }, format!("unexpected character {ch:?}")));
            }
        };
        i += 1;
        out.push((tok, Span { start, end: i }));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    end: usize,
}

const PREFIX_BP: u8 = 30;

fn infix_bp(op: char) -> (u8, u8) {
    match op {
        '+' | '-' => (10, 11),
        '*' | '/' => (20, 21),
        // right associative and tighter than unary minus: -X^2 = -(X^2)
        _ => (41, 40),
    }
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, Span)> {
        self.toks.get(self.pos)
    }

    fn eof_span(&self) -> Span {
        Span { start: self.end, end: self.end }
    }

    fn expr(&mut self, min_bp: u8) -> Result<ExprAst> {
        let (tok, span) = self.peek().cloned().ok_or_else(|| syntax(self.eof_span(), "unexpected end of input"))?;
        self.pos += 1;
        let mut lhs = match tok {
            Tok::Int(n) => ExprAst::leaf(ExprKind::Number(n), span),
            Tok::Imag => ExprAst::leaf(ExprKind::ImagUnit, span),
            Tok::Var => ExprAst::leaf(ExprKind::Variable, span),
            Tok::Y(k) => ExprAst::leaf(ExprKind::Derivative(k), span),
            Tok::Op('-') => {
                let inner = self.expr(PREFIX_BP)?;
                let s = span.join(inner.span);
                ExprAst { kind: ExprKind::Neg, children: vec![inner], span: s }
            }
            Tok::Op('+') => {
                let inner = self.expr(PREFIX_BP)?;
                ExprAst { span: span.join(inner.span), ..inner }
            }
            Tok::LParen => {
                let inner = self.expr(0)?;
                match self.peek() {
                    Some((Tok::RParen, close)) => {
                        let close = *close;
                        self.pos += 1;
                        ExprAst { span: span.join(close), ..inner }
                    }
                    Some((_, s)) => return Err(syntax(*s, "expected ')'")),
                    None => return Err(syntax(span, "unclosed '('")),
                }
            }
            _ => return Err(syntax(span, "expected an operand")),
        };
        loop {
            let op = match self.peek() {
                Some((Tok::Op(op), _)) => *op,
                Some((Tok::RParen | Tok::Eq, _)) | None => break,
                Some((_, s)) => return Err(syntax(*s, "expected an operator (multiplication must be written with '*')")),
            };
            let (l, r) = infix_bp(op);
            if l < min_bp {
                break;
            }
            self.pos += 1;
            let rhs = self.expr(r)?;
            let kind = match op {
                '+' => ExprKind::Add,
                '-' => ExprKind::Sub,
                '*' => ExprKind::Mul,
                '/' => ExprKind::Div,
                _ => ExprKind::Pow,
            };
            lhs = ExprAst::node(kind, vec![lhs, rhs]);
        }
        Ok(lhs)
    }
}

/// Parses an expression, or an equation `lhs = rhs` when `allow_equation`.
pub fn parse_expr(text: &str, allow_equation: bool) -> Result<ExprAst> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let lhs = p.expr(0)?;
    let ast = match p.peek().cloned() {
        None => return Ok(lhs),
        Some((Tok::Eq, s)) if allow_equation => {
            p.pos += 1;
            let rhs = p.expr(0)?;
            let _ = s;
            ExprAst::node(ExprKind::Equation, vec![lhs, rhs])
        }
        Some((Tok::Eq, s)) => return Err(syntax(s, "'=' is only allowed in equations")),
        Some((_, s)) => return Err(syntax(s, "unbalanced ')'")),
    };
    match p.peek() {
        None => Ok(ast),
        Some((Tok::Eq, s)) => Err(syntax(*s, "more than one '='")),
        Some((_, s)) => Err(syntax(*s, "unbalanced ')'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let a = parse_expr("-X^2", false).unwrap();
        assert_eq!(a.kind, ExprKind::Neg);
        assert_eq!(a.children[0].kind, ExprKind::Pow);
        let b = parse_expr("1 - 2*X + 3", false).unwrap();
        assert_eq!(b.kind, ExprKind::Add);
        assert_eq!(b.children[0].kind, ExprKind::Sub);
        let c = parse_expr("2^3^2", false).unwrap();
        assert_eq!(c.children[1].kind, ExprKind::Pow);
    }

    #[test]
    fn spans() {
        let a = parse_expr("  (X + 1) * 3", false).unwrap();
        assert_eq!(a.span, Span { start: 2, end: 13 });
        assert_eq!(a.children[0].span, Span { start: 2, end: 9 });
        match parse_expr("X + 0.5", false) {
            Err(Error::Syntax { start: 4, end: 7, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_expr("X + + ", false) {
            Err(Error::Syntax { start: 6, end: 6, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_expr("2 X", false) {
            Err(Error::Syntax { start: 2, end: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("(X", false), Err(Error::Syntax { start: 0, end: 1, .. })));
        assert!(matches!(parse_expr("X)", false), Err(Error::Syntax { start: 1, end: 2, .. })));
        assert!(matches!(parse_expr("sin(X)", false), Err(Error::Syntax { start: 0, end: 3, .. })));
    }

    #[test]
    fn derivatives_and_equations() {
        let a = parse_expr("y''' = y", true).unwrap();
        assert_eq!(a.kind, ExprKind::Equation);
        assert_eq!(a.children[0].kind, ExprKind::Derivative(3));
        assert!(parse_expr("y = 0", false).is_err());
        assert!(parse_expr("y = 0 = 1", true).is_err());
    }
}
