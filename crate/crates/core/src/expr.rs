//! Text syntax for [`RegularFn`] trees.
//!
//! ```text
//! expr   := term { ("+" | "-") term } ;
//! term   := factor { "*" factor } ;
//! factor := base [ "^" integer ] ;
//! base   := "q" | real-literal | "exp" "(" expr ")" | "recip" "(" expr ")" | "(" expr ")" ;
//! ```
//!
//! Tree mapping:
//! - `q^n` is `Power(n)`; any other `base^n` is `Compose(Power(n), base)`.
//! - `exp(x)` is `Compose(Exp, x)` and `recip(x)` is `Reciprocal(x)`.
//! - `a - b` is `Sum(a, Scale(-1, b))`.
//! - A term that starts with a bare literal, `c * x`, is `Scale(c, x)`;
//!   a parenthesized `(c) * x` is `Product(Const(c), x)`.
//! - A literal may carry a leading `-` where a base is expected.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::axial::RegularFn;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("arity error at byte {offset}: {name}() takes exactly one argument, got {got}")]
    Arity {
        offset: usize,
        name: String,
        got: usize,
    },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::Arity { offset, .. } => *offset,
        }
    }
}

/// Expression text with an optional `file:line` origin for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprSource {
    pub text: String,
    pub origin: Option<String>,
}

impl ExprSource {
    pub fn new(text: impl Into<String>) -> Self {
        ExprSource {
            text: text.into(),
            origin: None,
        }
    }

    pub fn parse(&self) -> Result<RegularFn, ParseError> {
        parse(&self.text)
    }

    /// A one-line diagnostic with a caret under the failing byte.
    pub fn describe(&self, err: &ParseError) -> String {
        let origin = self
            .origin
            .as_deref()
            .map(|o| format!("{o}: "))
            .unwrap_or_default();
        let col = self.text[..err.offset().min(self.text.len())]
            .chars()
            .count();
        format!("{origin}{err}\n  {}\n  {}^", self.text, " ".repeat(col))
    }
}

/// Splits a corpus file into one source per non-empty line; `#` starts a comment.
pub fn corpus_sources(text: &str, file: &str) -> Vec<ExprSource> {
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then(|| ExprSource {
                text: body.to_string(),
                origin: Some(format!("{file}:{}", n + 1)),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Int(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn syntax(offset: usize, expected: &[&str], found: String) -> ParseError {
    ParseError::Syntax {
        offset,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let tok = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                let mut integral = true;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    integral = false;
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        integral = false;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                i = j;
                let value: f64 = text
                    .parse()
                    .map_err(|_| syntax(start, &["number"], format!("'{text}'")))?;
                let tok = match text.parse::<i64>() {
                    Ok(n) if integral => Tok::Int(n),
                    _ => Tok::Num(value),
                };
                out.push((start, tok));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                out.push((start, Tok::Ident(src[i..j].to_string())));
                i = j;
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(syntax(start, &["expression"], format!("'{ch}'")));
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const BASE_START: &[&str] = &["'q'", "number", "'exp'", "'recip'", "'('"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        syntax(self.offset(), expected, self.peek().describe())
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<RegularFn, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = RegularFn::Sum(Box::new(acc), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = RegularFn::Scale(-1.0, Box::new(self.term()?));
                    acc = RegularFn::Sum(Box::new(acc), Box::new(rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RegularFn, ParseError> {
        let (mut acc, bare_literal) = self.factor()?;
        if let (Some(c), Tok::Star) = (bare_literal, self.peek()) {
            self.bump();
            let (rhs, _) = self.factor()?;
            acc = RegularFn::Scale(c, Box::new(rhs));
        }
        while *self.peek() == Tok::Star {
            self.bump();
            let (rhs, _) = self.factor()?;
            acc = RegularFn::Product(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    /// Returns the factor and, when it is a bare literal, its value.
    fn factor(&mut self) -> Result<(RegularFn, Option<f64>), ParseError> {
        let (base, kind) = self.base()?;
        if *self.peek() != Tok::Caret {
            let lit = match (&kind, &base) {
                (BaseKind::Literal, RegularFn::Const(c)) => Some(*c),
                _ => None,
            };
            return Ok((base, lit));
        }
        self.bump();
        let at = self.offset();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let n = match self.bump() {
            Tok::Int(n) => {
                let n = if negative { -n } else { n };
                i32::try_from(n).map_err(|_| syntax(at, &["integer exponent"], format!("{n}")))?
            }
            other => return Err(syntax(at, &["integer"], other.describe())),
        };
        if *self.peek() == Tok::Caret {
            return Err(self.unexpected(&["'*'", "'+'", "'-'", "')'", "end of input"]));
        }
        let powered = match kind {
            BaseKind::BareQ => RegularFn::Power(n),
            _ => RegularFn::Compose(Box::new(RegularFn::Power(n)), Box::new(base)),
        };
        Ok((powered, None))
    }

    fn base(&mut self) -> Result<(RegularFn, BaseKind), ParseError> {
        let start = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) if name == "q" => {
                self.bump();
                Ok((RegularFn::Identity, BaseKind::BareQ))
            }
            Tok::Ident(name) if name == "exp" || name == "recip" => {
                self.bump();
                let arg = self.call_argument(&name, start)?;
                let node = if name == "exp" {
                    RegularFn::Compose(Box::new(RegularFn::Exp), Box::new(arg))
                } else {
                    RegularFn::Reciprocal(Box::new(arg))
                };
                Ok((node, BaseKind::Other))
            }
            Tok::Num(_) | Tok::Int(_) => Ok((RegularFn::Const(self.literal()?), BaseKind::Literal)),
            Tok::Minus => {
                self.bump();
                Ok((RegularFn::Const(-self.literal()?), BaseKind::Literal))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok((inner, BaseKind::Other))
            }
            _ => Err(self.unexpected(BASE_START)),
        }
    }

    fn literal(&mut self) -> Result<f64, ParseError> {
        match *self.peek() {
            Tok::Num(x) => {
                self.bump();
                Ok(x)
            }
            Tok::Int(n) => {
                self.bump();
                Ok(n as f64)
            }
            _ => Err(self.unexpected(&["number"])),
        }
    }

    fn call_argument(&mut self, name: &str, start: usize) -> Result<RegularFn, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        if *self.peek() == Tok::RParen {
            return Err(ParseError::Arity {
                offset: start,
                name: name.to_string(),
                got: 0,
            });
        }
        let arg = self.expr()?;
        let mut got = 1;
        while *self.peek() == Tok::Comma {
            self.bump();
            self.expr()?;
            got += 1;
        }
        if got != 1 {
            return Err(ParseError::Arity {
                offset: start,
                name: name.to_string(),
                got,
            });
        }
        self.expect(Tok::RParen, "')'")?;
        Ok(arg)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum BaseKind {
    BareQ,
    Literal,
    Other,
}

pub fn parse(src: &str) -> Result<RegularFn, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let f = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["'+'", "'-'", "'*'", "'^'", "end of input"]));
    }
    Ok(f)
}

/// Canonical text for a tree. Trees produced by [`parse`] print to text that
/// re-parses to the same tree; other trees print to an equivalent expression.
pub fn print(f: &RegularFn) -> String {
    let mut out = String::new();
    write_expr(&mut out, f, "q");
    out
}

fn write_expr(out: &mut String, f: &RegularFn, var: &str) {
    match f {
        RegularFn::Sum(a, b) => {
            write_expr(out, a, var);
            match b.as_ref() {
                RegularFn::Scale(c, x) if *c == -1.0 => {
                    out.push_str(" - ");
                    write_term(out, x, var);
                }
                _ => {
                    out.push_str(" + ");
                    write_term(out, b, var);
                }
            }
        }
        _ => write_term(out, f, var),
    }
}

fn write_term(out: &mut String, f: &RegularFn, var: &str) {
    match f {
        RegularFn::Product(a, b) => {
            match a.as_ref() {
                RegularFn::Const(c) => out.push_str(&format!("({})", fmt_num(*c))),
                _ => write_term(out, a, var),
            }
            out.push_str(" * ");
            write_factor(out, b, var);
        }
        RegularFn::Scale(c, x) => {
            out.push_str(&fmt_num(*c));
            out.push_str(" * ");
            match x.as_ref() {
                RegularFn::Const(d) => out.push_str(&format!("({})", fmt_num(*d))),
                _ => write_factor(out, x, var),
            }
        }
        RegularFn::Sum(..) => {
            out.push('(');
            write_expr(out, f, var);
            out.push(')');
        }
        _ => write_factor(out, f, var),
    }
}

fn write_factor(out: &mut String, f: &RegularFn, var: &str) {
    match f {
        RegularFn::Power(n) => out.push_str(&format!("{var}^{n}")),
        RegularFn::Compose(g, inner) if matches!(g.as_ref(), RegularFn::Power(_)) => {
            let RegularFn::Power(n) = g.as_ref() else {
                unreachable!()
            };
            write_power_base(out, inner, var);
            out.push_str(&format!("^{n}"));
        }
        RegularFn::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
            out.push_str(&format!("({})", fmt_num(*c)));
        }
        RegularFn::Sum(..) | RegularFn::Product(..) | RegularFn::Scale(..) => {
            out.push('(');
            write_expr(out, f, var);
            out.push(')');
        }
        _ => write_base(out, f, var),
    }
}

/// Writes `f` so that a following `^n` applies to all of it.
fn write_power_base(out: &mut String, f: &RegularFn, var: &str) {
    match f {
        RegularFn::Const(c) if !c.is_sign_negative() => out.push_str(&fmt_num(*c)),
        RegularFn::Compose(g, _) if matches!(g.as_ref(), RegularFn::Exp) => write_base(out, f, var),
        RegularFn::Reciprocal(_) => write_base(out, f, var),
        _ => {
            out.push('(');
            write_expr(out, f, var);
            out.push(')');
        }
    }
}

fn write_base(out: &mut String, f: &RegularFn, var: &str) {
    match f {
        RegularFn::Identity => out.push_str(var),
        RegularFn::Const(c) => out.push_str(&fmt_num(*c)),
        RegularFn::Exp => out.push_str(&format!("exp({var})")),
        RegularFn::Reciprocal(x) => {
            out.push_str("recip(");
            write_expr(out, x, var);
            out.push(')');
        }
        RegularFn::Compose(g, inner) => {
            let mut arg = String::new();
            write_expr(&mut arg, inner, var);
            match g.as_ref() {
                RegularFn::Exp => out.push_str(&format!("exp({arg})")),
                _ => {
                    // substitute the inner function for the variable of the outer one
                    out.push('(');
                    write_expr(out, g, &format!("({arg})"));
                    out.push(')');
                }
            }
        }
        _ => write_factor(out, f, var),
    }
}

fn fmt_num(c: f64) -> String {
    format!("{c}")
}

impl fmt::Display for RegularFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// A random tree from the image of [`parse`], at most `depth` levels deep.
///
/// With `tame` set, literals come from a small pool of moderate values and
/// exponents stay in `-3..=3`, which keeps values of nested trees in range
/// for numerical checks; otherwise literals are arbitrary finite reals.
pub fn random_tree<R: Rng + ?Sized>(rng: &mut R, depth: usize, tame: bool) -> RegularFn {
    const POOL: [f64; 8] = [0.5, 1.0, 2.0, 1.5, -1.0, -0.5, 3.0, 0.25];
    let literal = |rng: &mut R| {
        if tame {
            POOL[rng.gen_range(0..POOL.len())]
        } else {
            let x: f64 = rng.gen_range(-1e3..1e3);
            if rng.gen_bool(0.3) {
                x.round()
            } else {
                x
            }
        }
    };
    let exponent = |rng: &mut R| {
        if tame {
            rng.gen_range(-3..=3)
        } else {
            rng.gen_range(-12..=12)
        }
    };
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => RegularFn::Identity,
            1 => RegularFn::Const(literal(rng)),
            _ => RegularFn::Power(exponent(rng)),
        };
    }
    let sub = |rng: &mut R| Box::new(random_tree(rng, depth - 1, tame));
    match rng.gen_range(0..8) {
        0 => RegularFn::Sum(sub(rng), sub(rng)),
        1 => {
            let a = sub(rng);
            RegularFn::Sum(a, Box::new(RegularFn::Scale(-1.0, sub(rng))))
        }
        2 => RegularFn::Scale(literal(rng), sub(rng)),
        3 => RegularFn::Product(sub(rng), sub(rng)),
        4 => RegularFn::Reciprocal(sub(rng)),
        5 => RegularFn::Compose(Box::new(RegularFn::Exp), sub(rng)),
        6 => RegularFn::Compose(Box::new(RegularFn::Power(exponent(rng))), sub(rng)),
        _ => RegularFn::Identity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axial::{compose, product, reciprocal, AxialPair};
    use crate::quat::Quaternion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use RegularFn::*;

    fn b(f: RegularFn) -> Box<RegularFn> {
        Box::new(f)
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("q^2 + 1").unwrap(), Sum(b(Power(2)), b(Const(1.0))));
        assert_eq!(parse("exp(q^3)").unwrap(), Compose(b(Exp), b(Power(3))));
        assert_eq!(
            parse("recip(q)*q").unwrap(),
            Product(b(Reciprocal(b(Identity))), b(Identity))
        );
    }

    #[test]
    fn recip_times_q_is_one() {
        let f = parse("recip(q)*q").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let q = Quaternion::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)));
            assert!(f.eval(q).unwrap().max_abs_diff(&Quaternion::ONE) <= 1e-12);
        }
    }

    #[test]
    fn print_examples() {
        assert_eq!(print(&parse("q^2+1").unwrap()), "q^2 + 1");
        assert_eq!(print(&Power(-3)), "q^-3");
        assert_eq!(print(&Compose(b(Exp), b(Identity))), "exp(q)");
    }

    #[test]
    fn operator_mapping() {
        assert_eq!(
            parse("q - 2").unwrap(),
            Sum(b(Identity), b(Scale(-1.0, b(Const(2.0)))))
        );
        assert_eq!(
            parse("2 * q * q").unwrap(),
            Product(b(Scale(2.0, b(Identity))), b(Identity))
        );
        assert_eq!(
            parse("(2) * q").unwrap(),
            Product(b(Const(2.0)), b(Identity))
        );
        assert_eq!(parse("q * 2").unwrap(), Product(b(Identity), b(Const(2.0))));
        assert_eq!(parse("-1.5e-3").unwrap(), Const(-1.5e-3));
        assert_eq!(parse("(q)^2").unwrap(), Compose(b(Power(2)), b(Identity)));
        assert_eq!(parse("q^1").unwrap(), Power(1));
        assert_eq!(parse("q").unwrap(), Identity);
        assert_eq!(
            parse("exp(q)^-2").unwrap(),
            Compose(b(Power(-2)), b(Compose(b(Exp), b(Identity))))
        );
        assert_eq!(
            parse("1 + q + q").unwrap(),
            Sum(b(Sum(b(Const(1.0)), b(Identity))), b(Identity))
        );
    }

    #[test]
    fn syntax_errors_point_at_offending_byte() {
        let cases = [
            ("q^2^3", 3),
            ("q +", 3),
            ("sin(q)", 0),
            ("q ^ 1.5", 4),
            ("(q", 2),
            ("2q", 1),
            ("q $ 1", 2),
            ("", 0),
            ("- q", 2),
        ];
        for (src, at) in cases {
            match parse(src) {
                Err(e @ ParseError::Syntax { .. }) => assert_eq!(e.offset(), at, "{src}: {e}"),
                other => panic!("{src}: expected syntax error, got {other:?}"),
            }
        }
    }

    #[test]
    fn arity_errors() {
        assert_eq!(
            parse("exp()").unwrap_err(),
            ParseError::Arity {
                offset: 0,
                name: "exp".into(),
                got: 0
            }
        );
        assert_eq!(
            parse("1 + recip(q, q)").unwrap_err(),
            ParseError::Arity {
                offset: 4,
                name: "recip".into(),
                got: 2
            }
        );
    }

    #[test]
    fn diagnostics_carry_origin() {
        let src = corpus_sources("# header\nq^2\n\nexp(q) + # trailing\n", "funcs.txt");
        assert_eq!(src.len(), 2);
        assert_eq!(src[1].origin.as_deref(), Some("funcs.txt:4"));
        let err = src[1].parse().unwrap_err();
        let msg = src[1].describe(&err);
        assert!(
            msg.starts_with("funcs.txt:4: syntax error at byte 8"),
            "{msg}"
        );
    }

    #[test]
    fn non_parser_trees_print_equivalently() {
        let q = Quaternion::new(0.4, -0.3, 0.8, 0.2);
        let trees = [
            Exp,
            compose(product(Identity, Exp), reciprocal(Power(2))),
            compose(Power(2), Identity),
            compose(Identity, Power(3)),
        ];
        for f in trees {
            let text = print(&f);
            let g = parse(&text).unwrap();
            let (a, c) = (f.eval(q).unwrap(), g.eval(q).unwrap());
            assert!(a.max_abs_diff(&c) < 1e-12, "{text}");
        }
    }

    #[test]
    fn print_parse_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 0..2000 {
            let t = random_tree(&mut rng, 6, n % 2 == 0);
            let text = print(&t);
            let back = parse(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
            assert_eq!(back, t, "{text}");
            assert_eq!(print(&back), text);
        }
    }
}
