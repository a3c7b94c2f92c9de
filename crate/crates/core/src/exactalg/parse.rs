//! Recursive-descent reader for polynomial text.
//!
//! Accepts the canonical rendering (`-21/8 * ε^2 * ĝ^5`) plus decimals and
//! parentheses. Products must be written with `*`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := ('+' | '-') unary | power
//! power := atom ('^' ['-'] int)?
//! atom  := number | ident | '(' expr ')'
//! ```

use super::{int, AlgebraError, MultiPoly, Rational, Var};
use num_bigint::BigInt;
use num_traits::{One, Zero};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn err(pos: usize, msg: impl Into<String>) -> AlgebraError {
    AlgebraError::Parse { pos, msg: msg.into() }
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let mut out = Vec::new();
    let mut it = s.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
        } else if c.is_ascii_digit() || c == '.' {
            let mut text = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_ascii_digit() || d == '.' {
                    text.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            // optional exponent: only when followed by a digit or sign+digit
            let mut exp = 0i64;
            let rest = &s[pos + text.len()..];
            if let Some(tail) = rest.strip_prefix(['e', 'E']) {
                let sign_len = usize::from(tail.starts_with(['+', '-']));
                let digits: String = tail[sign_len..].chars().take_while(|d| d.is_ascii_digit()).collect();
                if !digits.is_empty() {
                    let v: i64 = digits.parse().map_err(|_| err(pos, "bad exponent"))?;
                    exp = if tail.starts_with('-') { -v } else { v };
                    for _ in 0..(1 + sign_len + digits.len()) {
                        it.next();
                    }
                }
            }
            out.push((pos, Tok::Num(decimal(&text, exp).ok_or_else(|| err(pos, "bad number"))?)));
        } else if c.is_alphabetic() {
            let mut text = String::new();
            while let Some(&(_, d)) = it.peek() {
                if d.is_alphanumeric() || d == '_' {
                    text.push(d);
                    it.next();
                } else {
                    break;
                }
            }
            out.push((pos, Tok::Ident(text)));
        } else if "+-*/^()".contains(c) {
            out.push((pos, Tok::Op(c)));
            it.next();
        } else {
            return Err(err(pos, format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

fn decimal(text: &str, exp: i64) -> Option<Rational> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() && frac.is_empty() || frac.contains('.') {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac.len() as i64;
    let ten = int(10);
    let mut q = Rational::from_integer(n);
    q *= super::poly::rational_pow(&ten, scale as i32);
    Some(q)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    at: usize,
    vars: Vec<Var>,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.try_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.try_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.try_mul(&self.unary()?)?;
            } else if self.eat('/') {
                let pos = self.pos();
                let d = self.unary()?;
                match d.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => return Err(err(pos, "division only by a nonzero constant")),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly, AlgebraError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<MultiPoly, AlgebraError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Num(q)) if q.is_integer() => {
                let k: i32 = q.numer().try_into().map_err(|_| err(pos, "exponent too large"))?;
                self.at += 1;
                k
            }
            _ => return Err(err(pos, "expected integer exponent")),
        };
        if !neg {
            return Ok(base.pow(k as u32));
        }
        // Negative powers only for a bare monomial in a Laurent variable.
        let mut it = base.terms();
        match (it.next(), it.next()) {
            (Some((e, c)), None) if c.is_one() => {
                let nz: Vec<usize> = (0..e.len()).filter(|&i| e[i] != 0).collect();
                if let [i] = nz[..] {
                    let v = base.vars()[i];
                    if v.is_laurent() {
                        return MultiPoly::monomial(&self.vars, &[(v, -k * e[i])], Rational::one());
                    }
                    return Err(AlgebraError::NegativeExponent(v.name()));
                }
                Err(err(pos, "negative exponent needs a single variable"))
            }
            _ => Err(err(pos, "negative exponent needs a single variable")),
        }
    }

    fn atom(&mut self) -> Result<MultiPoly, AlgebraError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.at += 1;
                Ok(MultiPoly::constant(&self.vars, q))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let v = Var::from_name(&name).ok_or_else(|| err(pos, format!("unknown variable {name}")))?;
                MultiPoly::var(&self.vars, v)
            }
            Some(Tok::Op('(')) => {
                self.at += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(err(self.pos(), "expected ')'"));
                }
                Ok(inner)
            }
            _ => Err(err(pos, "expected number, variable or '('")),
        }
    }
}

pub(super) fn parse(s: &str, vars: Option<&[Var]>) -> Result<MultiPoly, AlgebraError> {
    let toks = lex(s)?;
    let vars = match vars {
        Some(v) => v.to_vec(),
        None => {
            let mut v = Vec::new();
            for (pos, t) in &toks {
                if let Tok::Ident(name) = t {
                    v.push(Var::from_name(name).ok_or_else(|| err(*pos, format!("unknown variable {name}")))?);
                }
            }
            v
        }
    };
    let zero = MultiPoly::zero(&vars);
    let mut p = Parser { toks: &toks, at: 0, vars: zero.vars().to_vec(), end: s.len() };
    if toks.is_empty() {
        return Err(err(0, "empty input"));
    }
    let out = p.expr()?;
    if p.at != toks.len() {
        return Err(err(p.pos(), "trailing input"));
    }
    Ok(out)
}
