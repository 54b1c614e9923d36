//! Parser and evaluator for explicit polynomials written in the LaTeX form
//! `NAME = 2(&&\psi_{0111}\psi_{1000} - …)^2 \nonumber\\ \times (…)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Psi(Vec<usize>),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn eval(&self, psi: &dyn Fn(&[usize]) -> Complex64) -> Complex64 {
        match self {
            Expr::Num(v) => Complex64::new(*v, 0.0),
            Expr::Psi(idx) => psi(idx),
            Expr::Sum(items) => items.iter().map(|e| e.eval(psi)).sum(),
            Expr::Product(items) => items.iter().map(|e| e.eval(psi)).product(),
            Expr::Neg(e) => -e.eval(psi),
            Expr::Pow(e, k) => e.eval(psi).powu(*k),
        }
    }

    /// Number of indices on the first coefficient found.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Expr::Psi(idx) => Some(idx.len()),
            Expr::Num(_) => None,
            Expr::Sum(v) | Expr::Product(v) => v.iter().find_map(|e| e.arity()),
            Expr::Neg(e) | Expr::Pow(e, _) => e.arity(),
        }
    }

    /// Count of `\psi` occurrences.
    pub fn psi_count(&self) -> usize {
        match self {
            Expr::Psi(_) => 1,
            Expr::Num(_) => 0,
            Expr::Sum(v) | Expr::Product(v) => v.iter().map(|e| e.psi_count()).sum(),
            Expr::Neg(e) | Expr::Pow(e, _) => e.psi_count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Psi(Vec<usize>),
    Plus,
    Minus,
    Times,
    Open,
    Close,
    Square,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let body = match src.find('=') {
        Some(i) => &src[i + 1..],
        None => src,
    };
    let cleaned = body
        .replace("\\nonumber", " ")
        .replace("\\\\", " ")
        .replace('&', " ");
    let s: Vec<char> = cleaned.chars().filter(|c| !c.is_whitespace()).collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let rest = |i: usize| s[i..].iter().collect::<String>();
    while i < s.len() {
        let c = s[i];
        match c {
            '+' => { toks.push(Tok::Plus); i += 1; }
            '-' => { toks.push(Tok::Minus); i += 1; }
            '(' => { toks.push(Tok::Open); i += 1; }
            ')' => { toks.push(Tok::Close); i += 1; }
            ',' | '.' if i + 1 == s.len() => i += 1,
            '^' => {
                if s.get(i + 1) == Some(&'2') {
                    toks.push(Tok::Square);
                    i += 2;
                } else {
                    return Err(Error::Parse(format!("only squares are supported near `{}`", rest(i))));
                }
            }
            '\\' if rest(i).starts_with("\\times") => { toks.push(Tok::Times); i += 6; }
            '\\' if rest(i).starts_with("\\psi_{") => {
                let start = i + 6;
                let end = s[start..].iter().position(|&c| c == '}').ok_or_else(|| Error::Parse("unclosed \\psi".into()))? + start;
                let idx = s[start..end]
                    .iter()
                    .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::Parse(format!("bad index digit `{c}`"))))
                    .collect::<Result<Vec<_>>>()?;
                toks.push(Tok::Psi(idx));
                i = end + 1;
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                let v: String = s[start..i].iter().collect();
                toks.push(Tok::Num(v.parse().expect("digits")));
            }
            _ => return Err(Error::Parse(format!("unexpected input near `{}`", rest(i).chars().take(20).collect::<String>()))),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negative = false;
        loop {
            match self.peek() {
                Some(Tok::Plus) => { self.pos += 1; }
                Some(Tok::Minus) => { self.pos += 1; negative = !negative; }
                _ => {}
            }
            let t = self.term()?;
            terms.push(if negative { Expr::Neg(Box::new(t)) } else { t });
            negative = false;
            match self.peek() {
                Some(Tok::Plus) | Some(Tok::Minus) => continue,
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one term") } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(Tok::Times) => { self.pos += 1; factors.push(self.factor()?); }
                Some(Tok::Num(_)) | Some(Tok::Psi(_)) | Some(Tok::Open) => factors.push(self.factor()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { Expr::Product(factors) })
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => { self.pos += 1; Expr::Num(v) }
            Some(Tok::Psi(idx)) => { self.pos += 1; Expr::Psi(idx) }
            Some(Tok::Open) => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::Parse(format!("expected `)` at token {}", self.pos)));
                }
                self.pos += 1;
                e
            }
            other => return Err(Error::Parse(format!("unexpected token {other:?} at {}", self.pos))),
        };
        if self.peek() == Some(&Tok::Square) {
            self.pos += 1;
            return Ok(Expr::Pow(Box::new(base), 2));
        }
        Ok(base)
    }
}

/// Parses everything after the first `=` of a printed polynomial.
pub fn parse_formula(src: &str) -> Result<Expr> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {} of {}", p.pos, p.toks.len())));
    }
    Ok(e)
}
