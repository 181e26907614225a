//! Textual term language ("wzdsl-1"): `z=<rational> * poch(...;n|k)`
//! products, plus a rational-function reader for R and S. Parser and
//! deterministic printer round-trip structurally.

use crate::hyperterm::{HyperTerm, Var, YVal};
use crate::numbers::{Int, Rat};
use crate::polyalg::{Affine, Poly2};
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at line {}, column {}: expected {}, found {found}",
    span.line, span.column, expected.join(" | "))]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    Num,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eq,
    LParen,
    RParen,
    Semi,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    text: String,
    span: SourceSpan,
}

fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let bytes = input.as_bytes();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        let (sl, sc) = (line, col);
        let single = |kind: TokKind| Token {
            kind,
            text: c.to_string(),
            span: SourceSpan { start, end: start + 1, line: sl, column: sc },
        };
        match c {
            ' ' | '\t' => {
                i += 1;
                col += 1;
                continue;
            }
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            '+' => out.push(single(TokKind::Plus)),
            '-' => out.push(single(TokKind::Minus)),
            '*' => out.push(single(TokKind::Star)),
            '/' => out.push(single(TokKind::Slash)),
            '^' => out.push(single(TokKind::Caret)),
            '=' => out.push(single(TokKind::Eq)),
            '(' => out.push(single(TokKind::LParen)),
            ')' => out.push(single(TokKind::RParen)),
            ';' => out.push(single(TokKind::Semi)),
            '0'..='9' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                out.push(Token {
                    kind: TokKind::Num,
                    text: input[i..j].to_string(),
                    span: SourceSpan { start: i, end: j, line: sl, column: sc },
                });
                col += (j - i) as u32 - 1;
                i = j - 1;
            }
            'a'..='z' | 'A'..='Z' => {
                let mut j = i;
                while j < bytes.len() && (bytes[j] as char).is_ascii_alphabetic() {
                    j += 1;
                }
                out.push(Token {
                    kind: TokKind::Ident,
                    text: input[i..j].to_string(),
                    span: SourceSpan { start: i, end: j, line: sl, column: sc },
                });
                col += (j - i) as u32 - 1;
                i = j - 1;
            }
            _ => {
                return Err(ParseError {
                    span: SourceSpan { start, end: start + 1, line: sl, column: sc },
                    expected: vec!["token".into()],
                    found: c.to_string(),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token {
        kind: TokKind::Eof,
        text: "<end of input>".into(),
        span: SourceSpan { start: input.len(), end: input.len(), line, column: col },
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(input)?, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_is(&self, kind: TokKind) -> bool {
        self.peek().kind == kind
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            span: t.span,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.text.clone(),
        }
    }

    fn expect(&mut self, kind: TokKind, what: &str) -> Result<Token, ParseError> {
        if self.peek_is(kind) {
            Ok(self.bump())
        } else {
            Err(self.err(&[what]))
        }
    }

    fn expect_ident(&mut self, name: &str) -> Result<(), ParseError> {
        if self.peek_is(TokKind::Ident) && self.peek().text == name {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[name]))
        }
    }

    fn uint(&mut self) -> Result<Int, ParseError> {
        let t = self.expect(TokKind::Num, "number")?;
        Ok(t.text.parse().expect("lexer produced digits"))
    }

    /// ["-"] digits ["/" digits]
    fn rational(&mut self) -> Result<Rat, ParseError> {
        let neg = if self.peek_is(TokKind::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let num = self.uint()?;
        let den = if self.peek_is(TokKind::Slash) {
            self.bump();
            self.uint()?
        } else {
            Int::one()
        };
        if den.is_zero() {
            return Err(self.err(&["nonzero denominator"]));
        }
        let r = Rat::new(num, den);
        Ok(if neg { -r } else { r })
    }

    fn var(&mut self) -> Result<Var, ParseError> {
        if self.peek_is(TokKind::Ident) {
            match self.peek().text.as_str() {
                "n" => {
                    self.bump();
                    return Ok(Var::N);
                }
                "k" => {
                    self.bump();
                    return Ok(Var::K);
                }
                _ => {}
            }
        }
        Err(self.err(&["n", "k"]))
    }

    /// Sum of signed monomials over {1, n, k} with rational coefficients
    /// written as `c`, `c*v`, `v/q`, or `c*v/q`.
    fn affine(&mut self) -> Result<Affine, ParseError> {
        let mut acc = Affine::constant(Rat::zero());
        let mut first = true;
        loop {
            let sign = if self.peek_is(TokKind::Plus) {
                self.bump();
                Rat::one()
            } else if self.peek_is(TokKind::Minus) {
                self.bump();
                -Rat::one()
            } else if first {
                Rat::one()
            } else {
                break;
            };
            first = false;
            let mut coef = Rat::one();
            let mut has_coef = false;
            if self.peek_is(TokKind::Num) {
                has_coef = true;
                let num = self.uint()?;
                coef = Rat::from_integer(num);
                if self.peek_is(TokKind::Slash) {
                    self.bump();
                    let den = self.uint()?;
                    if den.is_zero() {
                        return Err(self.err(&["nonzero denominator"]));
                    }
                    coef /= Rat::from_integer(den);
                }
                if self.peek_is(TokKind::Star) {
                    self.bump();
                }
            }
            let var = if self.peek_is(TokKind::Ident)
                && matches!(self.peek().text.as_str(), "n" | "k")
            {
                Some(self.var()?)
            } else if has_coef {
                None
            } else {
                return Err(self.err(&["number", "n", "k"]));
            };
            if var.is_some() && self.peek_is(TokKind::Slash) {
                self.bump();
                let den = self.uint()?;
                if den.is_zero() {
                    return Err(self.err(&["nonzero denominator"]));
                }
                coef /= Rat::from_integer(den);
            }
            let c = sign * coef;
            match var {
                None => acc.c0 += c,
                Some(Var::N) => acc.cn += c,
                Some(Var::K) => acc.ck += c,
            }
        }
        Ok(acc)
    }

    /// signed exponent after '^'
    fn exponent(&mut self) -> Result<i64, ParseError> {
        let neg = if self.peek_is(TokKind::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let t = self.expect(TokKind::Num, "exponent")?;
        let v: i64 = t.text.parse().map_err(|_| ParseError {
            span: t.span,
            expected: vec!["small integer exponent".into()],
            found: t.text.clone(),
        })?;
        Ok(if neg { -v } else { v })
    }

    /// product := atom (("*" | "/") atom)*
    fn product(&mut self, term: &mut HyperTerm, sign: i64) -> Result<(), ParseError> {
        self.atom(term, sign)?;
        loop {
            if self.peek_is(TokKind::Star) {
                self.bump();
                self.atom(term, sign)?;
            } else if self.peek_is(TokKind::Slash) {
                self.bump();
                self.atom(term, -sign)?;
            } else {
                break;
            }
        }
        Ok(())
    }

    fn atom(&mut self, term: &mut HyperTerm, sign: i64) -> Result<(), ParseError> {
        if self.peek_is(TokKind::LParen) {
            self.bump();
            self.product(term, sign)?;
            self.expect(TokKind::RParen, ")")?;
            return Ok(());
        }
        if self.peek_is(TokKind::Num) && self.peek().text == "1" {
            // the unit atom
            self.bump();
            return Ok(());
        }
        self.expect_ident("poch")?;
        self.expect(TokKind::LParen, "(")?;
        let base = self.affine()?;
        self.expect(TokKind::Semi, ";")?;
        let var = self.var()?;
        self.expect(TokKind::RParen, ")")?;
        let exp = if self.peek_is(TokKind::Caret) {
            self.bump();
            self.exponent()?
        } else {
            1
        };
        let own = match var {
            Var::N => &base.cn,
            Var::K => &base.ck,
        };
        if !own.is_zero() {
            return Err(self.err(&["base free of the raising variable"]));
        }
        term.push_factor(var, base, sign * exp);
        Ok(())
    }

    fn eof(&mut self) -> Result<(), ParseError> {
        if self.peek_is(TokKind::Eof) {
            Ok(())
        } else {
            Err(self.err(&["end of input"]))
        }
    }
}

/// Parse a term in the wzdsl-1 grammar; y is left unknown.
pub fn parse_term(text: &str) -> Result<HyperTerm, ParseError> {
    let mut p = Parser::new(text)?;
    p.expect_ident("z")?;
    p.expect(TokKind::Eq, "=")?;
    let z = p.rational()?;
    if z.is_zero() {
        return Err(p.err(&["nonzero z"]));
    }
    p.expect(TokKind::Star, "*")?;
    let mut term = HyperTerm::new(z, YVal::Unknown);
    p.product(&mut term, 1)?;
    p.eof()?;
    Ok(term)
}

fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

fn fmt_affine(a: &Affine) -> String {
    let mut out = String::new();
    if !a.c0.is_zero() || (a.cn.is_zero() && a.ck.is_zero()) {
        out.push_str(&fmt_rat(&a.c0));
    }
    for (coef, sym) in [(&a.cn, "n"), (&a.ck, "k")] {
        if coef.is_zero() {
            continue;
        }
        if !out.is_empty() {
            out.push(if coef.is_negative() { '-' } else { '+' });
        } else if coef.is_negative() {
            out.push('-');
        }
        let mag = coef.abs();
        let piece = if mag.is_one() {
            sym.to_string()
        } else if mag.numer().is_one() {
            format!("{sym}/{}", mag.denom())
        } else if mag.is_integer() {
            format!("{}*{sym}", mag.numer())
        } else {
            format!("{}*{sym}/{}", mag.numer(), mag.denom())
        };
        out.push_str(&piece);
    }
    out
}

/// Deterministic canonical form; parse_term(print_term(t)) == t.
pub fn print_term(t: &HyperTerm) -> String {
    let mut pos: Vec<String> = Vec::new();
    let mut neg: Vec<String> = Vec::new();
    for ((var, base), e) in t.factors() {
        let atom = format!("poch({};{})", fmt_affine(base), var.symbol());
        let mag = e.unsigned_abs();
        let atom = if mag == 1 { atom } else { format!("{atom}^{mag}") };
        if *e > 0 {
            pos.push(atom);
        } else {
            neg.push(atom);
        }
    }
    let mut body = if pos.is_empty() {
        "1".to_string()
    } else {
        pos.join("*")
    };
    for d in neg {
        body.push('/');
        body.push_str(&d);
    }
    format!("z={} * {}", fmt_rat(&t.z), body)
}

/// Rational-function expressions in n and k; returns (num, den).
pub fn parse_rational_function(text: &str) -> Result<(Poly2, Poly2), ParseError> {
    let mut p = Parser::new(text)?;
    let rf = rf_expr(&mut p)?;
    p.eof()?;
    Ok(rf)
}

type RatFunc = (Poly2, Poly2);

fn rf_add(a: &RatFunc, b: &RatFunc) -> RatFunc {
    (a.0.mul(&b.1).add(&b.0.mul(&a.1)), a.1.mul(&b.1))
}

fn rf_expr(p: &mut Parser) -> Result<RatFunc, ParseError> {
    let neg = if p.peek_is(TokKind::Minus) {
        p.bump();
        true
    } else {
        if p.peek_is(TokKind::Plus) {
            p.bump();
        }
        false
    };
    let mut acc = rf_term(p)?;
    if neg {
        acc.0 = acc.0.neg();
    }
    loop {
        if p.peek_is(TokKind::Plus) {
            p.bump();
            let t = rf_term(p)?;
            acc = rf_add(&acc, &t);
        } else if p.peek_is(TokKind::Minus) {
            p.bump();
            let mut t = rf_term(p)?;
            t.0 = t.0.neg();
            acc = rf_add(&acc, &t);
        } else {
            break;
        }
    }
    Ok(acc)
}

fn rf_term(p: &mut Parser) -> Result<RatFunc, ParseError> {
    let mut acc = rf_factor(p)?;
    loop {
        if p.peek_is(TokKind::Star) {
            p.bump();
            let f = rf_factor(p)?;
            acc = (acc.0.mul(&f.0), acc.1.mul(&f.1));
        } else if p.peek_is(TokKind::Slash) {
            p.bump();
            let f = rf_factor(p)?;
            if f.0.is_zero() {
                return Err(p.err(&["nonzero divisor"]));
            }
            acc = (acc.0.mul(&f.1), acc.1.mul(&f.0));
        } else {
            break;
        }
    }
    Ok(acc)
}

fn rf_factor(p: &mut Parser) -> Result<RatFunc, ParseError> {
    let base = rf_primary(p)?;
    if p.peek_is(TokKind::Caret) {
        p.bump();
        let t = p.expect(TokKind::Num, "exponent")?;
        let e: u32 = t.text.parse().map_err(|_| ParseError {
            span: t.span,
            expected: vec!["small exponent".into()],
            found: t.text.clone(),
        })?;
        return Ok((base.0.pow(e), base.1.pow(e)));
    }
    Ok(base)
}

fn rf_primary(p: &mut Parser) -> Result<RatFunc, ParseError> {
    if p.peek_is(TokKind::LParen) {
        p.bump();
        let e = rf_expr(p)?;
        p.expect(TokKind::RParen, ")")?;
        return Ok(e);
    }
    if p.peek_is(TokKind::Num) {
        let n = p.uint()?;
        return Ok((Poly2::constant(Rat::from_integer(n)), Poly2::one()));
    }
    if p.peek_is(TokKind::Ident) {
        match p.peek().text.as_str() {
            "n" => {
                p.bump();
                return Ok((Poly2::var_n(), Poly2::one()));
            }
            "k" => {
                p.bump();
                return Ok((Poly2::var_k(), Poly2::one()));
            }
            _ => {}
        }
    }
    Err(p.err(&["number", "n", "k", "("]))
}

impl fmt::Display for HyperTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_term(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    const GOOD1: &str = "z=-1/16 * poch(1/2-k;n)*poch(1/2+k;n)*poch(1/3;n)*poch(2/3;n) / (poch(1/2+k/2;n)*poch(1+k/2;n)*poch(1+k;n)*poch(1;n)) * poch(1/3;k)*poch(2/3;k)/poch(1;k)^2";

    #[test]
    fn parse_worked_example_term() {
        let t = parse_term(GOOD1).unwrap();
        assert_eq!(t.z, rat(-1, 16));
        assert_eq!(t.factors().count(), 11);
        let qn = t.shift_quotient(Var::N).unwrap();
        assert_eq!(qn.ratio.scale, rat(-1, 144));
    }

    #[test]
    fn round_trip_is_stable() {
        for src in [
            GOOD1,
            "z=1 * poch(1/2;n)/poch(1;n)",
            "z=-1 * poch(1/2-k;n)^2*poch(1/2;n)/(poch(1+k;n)^2*poch(1;n)) * poch(1/4;k)*poch(3/4;k)/poch(1;k)^2",
        ] {
            let t = parse_term(src).unwrap();
            let printed = print_term(&t);
            let t2 = parse_term(&printed).unwrap();
            assert_eq!(t, t2, "round trip changed {src}");
            assert_eq!(print_term(&t2), printed);
        }
    }

    #[test]
    fn unit_term_prints_one() {
        let t = parse_term("z=1 * poch(1;n)/poch(1;n)").unwrap();
        assert_eq!(print_term(&t), "z=1 * 1");
        let back = parse_term("z=1 * 1").unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn error_reports_position_and_expectation() {
        let err = parse_term("z=1 * poch(1/2;q)").unwrap_err();
        assert_eq!(err.found, "q");
        assert!(err.expected.contains(&"n".to_string()));
        assert_eq!(err.span.start, 15);
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn error_after_deleted_token() {
        let err = parse_term("z=1 poch(1;n)").unwrap_err();
        assert!(err.span.start >= 4);
    }

    #[test]
    fn rational_function_fixture() {
        let (num, den) =
            parse_rational_function("((51*n+7)*(2*n+1)+k*(90*n+24*k+28))/(2*n+k+1)").unwrap();
        // 102n^2 + 65n + 7 + 90nk + 24k^2 + 28k
        assert_eq!(num.coeff(2, 0), rat(102, 1));
        assert_eq!(num.coeff(1, 1), rat(90, 1));
        assert_eq!(num.coeff(0, 2), rat(24, 1));
        assert_eq!(num.coeff(1, 0), rat(65, 1));
        assert_eq!(num.coeff(0, 1), rat(28, 1));
        assert_eq!(num.coeff(0, 0), rat(7, 1));
        assert_eq!(den.coeff(1, 0), rat(2, 1));
        assert_eq!(den.coeff(0, 1), rat(1, 1));
        assert_eq!(den.coeff(0, 0), rat(1, 1));
    }

    #[test]
    fn rational_function_trivia() {
        let (num, den) = parse_rational_function("0/1").unwrap();
        assert!(num.is_zero());
        assert_eq!(den, Poly2::one());
        let (n2, d2) = parse_rational_function("16*n*(6*n-3*k-2)/(2*n-2*k-1)").unwrap();
        assert_eq!(n2.coeff(2, 0), rat(96, 1));
        assert_eq!(n2.coeff(1, 1), rat(-48, 1));
        assert_eq!(n2.coeff(1, 0), rat(-32, 1));
        assert_eq!(d2.coeff(0, 1), rat(-2, 1));
    }
}
