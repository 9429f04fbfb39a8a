//! Parser for the prefix expression grammar.
//!
//! ```text
//! expr     := rational | variable | "(" head ... ")"
//! head     := "+" expr expr*      n-ary sum
//!           | "-" expr [expr]     negation / subtraction
//!           | "*" expr expr*      n-ary product
//!           | "/" expr expr       quotient
//!           | "^" expr rational   power (integer or rational exponent)
//!           | "sin" | "cos" | "exp" | "log"   (one argument)
//!           | "normpow" rational expr+        |v|^k = (Σ vᵢ²)^{k/2}
//! rational := "-"? digits ("/" digits)?
//! variable := x<i> | z | p<i> | r<i><j> | r<i>_<j> | theta | phi
//! ```
//!
//! The parser is hardened against untrusted input: bounded recursion depth,
//! arity, literal size, exponents and intermediate polynomial size. It never
//! panics; malformed input yields a `ParseError` with a byte offset.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Expr, Rat, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

const MAX_DEPTH: usize = 64;
const MAX_ARITY: usize = 64;
const MAX_DIGITS: usize = 64;
const MAX_EXPONENT: u32 = 1024;
const MAX_TERMS: u128 = 100_000;
const MAX_VAR_INDEX: u32 = 99;

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Word(&'a str),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<(usize, Tok<'a>)> {
        let save = self.pos;
        let out = self.next_tok();
        self.pos = save;
        out
    }

    fn next_tok(&mut self) -> Option<(usize, Tok<'a>)> {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        if self.pos >= bytes.len() {
            return None;
        }
        let start = self.pos;
        match bytes[self.pos] {
            b'(' => {
                self.pos += 1;
                Some((start, Tok::Open))
            }
            b')' => {
                self.pos += 1;
                Some((start, Tok::Close))
            }
            _ => {
                while self.pos < bytes.len()
                    && !bytes[self.pos].is_ascii_whitespace()
                    && bytes[self.pos] != b'('
                    && bytes[self.pos] != b')'
                {
                    self.pos += 1;
                }
                Some((start, Tok::Word(&self.src[start..self.pos])))
            }
        }
    }
}

fn parse_rational(pos: usize, word: &str) -> Result<Rat, ParseError> {
    let (num_str, den_str) = match word.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (word, None),
    };
    let num_digits = num_str.strip_prefix('-').unwrap_or(num_str);
    if num_digits.is_empty()
        || num_digits.len() > MAX_DIGITS
        || !num_digits.bytes().all(|b| b.is_ascii_digit())
    {
        return err(pos, format!("malformed number `{word}`"));
    }
    let num: BigInt = num_str.parse().map_err(|_| ParseError {
        pos,
        msg: format!("malformed number `{word}`"),
    })?;
    let den: BigInt = match den_str {
        None => BigInt::from(1),
        Some(d) => {
            if d.is_empty() || d.len() > MAX_DIGITS || !d.bytes().all(|b| b.is_ascii_digit()) {
                return err(pos, format!("malformed denominator in `{word}`"));
            }
            d.parse().map_err(|_| ParseError {
                pos,
                msg: format!("malformed denominator in `{word}`"),
            })?
        }
    };
    if den.is_zero() {
        return err(pos, "zero denominator");
    }
    Ok(Rat::new(num, den))
}

fn parse_index(pos: usize, s: &str, what: &str) -> Result<u32, ParseError> {
    if s.is_empty() || s.len() > 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return err(pos, format!("malformed {what} index `{s}`"));
    }
    let i: u32 = s.parse().map_err(|_| ParseError {
        pos,
        msg: format!("malformed {what} index `{s}`"),
    })?;
    if i == 0 || i > MAX_VAR_INDEX {
        return err(pos, format!("{what} index out of range: {i}"));
    }
    Ok(i)
}

fn parse_var(pos: usize, word: &str) -> Result<Var, ParseError> {
    match word {
        "z" => return Ok(Var::Z),
        "theta" => return Ok(Var::Param(0)),
        "phi" => return Ok(Var::Param(1)),
        _ => {}
    }
    if let Some(rest) = word.strip_prefix('x') {
        return Ok(Var::X(parse_index(pos, rest, "variable")?));
    }
    if let Some(rest) = word.strip_prefix('p') {
        return Ok(Var::P(parse_index(pos, rest, "gradient slot")?));
    }
    if let Some(rest) = word.strip_prefix('r') {
        if let Some((i, j)) = rest.split_once('_') {
            return Ok(Var::R(
                parse_index(pos, i, "hessian slot")?,
                parse_index(pos, j, "hessian slot")?,
            ));
        }
        if rest.len() == 2 {
            return Ok(Var::R(
                parse_index(pos, &rest[..1], "hessian slot")?,
                parse_index(pos, &rest[1..], "hessian slot")?,
            ));
        }
        return err(pos, format!("malformed hessian slot `{word}`"));
    }
    err(pos, format!("unknown symbol `{word}`"))
}

/// Upper bound on the number of monomials of `base^n` for a `t`-term base:
/// C(n + t - 1, t - 1), saturating.
fn pow_term_bound(t: usize, n: u32) -> u128 {
    let t = t as u128;
    let n = u128::from(n);
    if t <= 1 {
        return 1;
    }
    let mut acc: u128 = 1;
    for k in 1..t {
        acc = match acc.checked_mul(n + k) {
            Some(v) => v / k,
            None => return u128::MAX,
        };
        if acc > MAX_TERMS {
            return u128::MAX;
        }
    }
    acc
}

struct Parser<'a> {
    lex: Lexer<'a>,
}

impl<'a> Parser<'a> {
    fn expect_tok(&mut self) -> Result<(usize, Tok<'a>), ParseError> {
        self.lex.next_tok().ok_or_else(|| ParseError {
            pos: self.lex.pos,
            msg: "unexpected end of input".into(),
        })
    }

    fn checked_mul(&self, pos: usize, a: &Expr, b: &Expr) -> Result<Expr, ParseError> {
        let bound = (a.term_count() as u128).saturating_mul(b.term_count() as u128);
        if bound > MAX_TERMS {
            return err(pos, "expression too large");
        }
        Ok(a.mul(b))
    }

    fn expr(&mut self, depth: usize) -> Result<Expr, ParseError> {
        if depth > MAX_DEPTH {
            return err(self.lex.pos, "nesting too deep");
        }
        let (pos, tok) = self.expect_tok()?;
        match tok {
            Tok::Close => err(pos, "unexpected `)`"),
            Tok::Word(w) => {
                let first = w.as_bytes().first().copied().unwrap_or(b' ');
                if first == b'-' || first.is_ascii_digit() {
                    Ok(Expr::constant(parse_rational(pos, w)?))
                } else {
                    Ok(Expr::var(parse_var(pos, w)?))
                }
            }
            Tok::Open => {
                let (hpos, head) = self.expect_tok()?;
                let head = match head {
                    Tok::Word(w) => w,
                    _ => return err(hpos, "expected operator after `(`"),
                };
                let out = self.form(hpos, head, depth)?;
                let (cpos, close) = self.expect_tok()?;
                if close != Tok::Close {
                    return err(cpos, "expected `)`");
                }
                Ok(out)
            }
        }
    }

    fn args(&mut self, depth: usize, min: usize, max: usize) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        loop {
            match self.lex.peek() {
                Some((_, Tok::Close)) | None => break,
                _ => {
                    if out.len() >= max {
                        return err(self.lex.pos, "too many arguments");
                    }
                    out.push(self.expr(depth + 1)?);
                }
            }
        }
        if out.len() < min {
            return err(self.lex.pos, "too few arguments");
        }
        Ok(out)
    }

    fn rational_arg(&mut self) -> Result<Rat, ParseError> {
        let (pos, tok) = self.expect_tok()?;
        match tok {
            Tok::Word(w) => parse_rational(pos, w),
            _ => err(pos, "expected a rational literal"),
        }
    }

    fn form(&mut self, pos: usize, head: &str, depth: usize) -> Result<Expr, ParseError> {
        match head {
            "+" => {
                let args = self.args(depth, 1, MAX_ARITY)?;
                let mut acc = Expr::zero();
                for a in &args {
                    acc = acc.add(a);
                }
                Ok(acc)
            }
            "-" => {
                let args = self.args(depth, 1, 2)?;
                match args.len() {
                    1 => Ok(args[0].neg()),
                    _ => Ok(args[0].sub(&args[1])),
                }
            }
            "*" => {
                let args = self.args(depth, 1, MAX_ARITY)?;
                let mut acc = Expr::one();
                for a in &args {
                    acc = self.checked_mul(pos, &acc, a)?;
                }
                Ok(acc)
            }
            "/" => {
                let args = self.args(depth, 2, 2)?;
                Ok(args[0].div(&args[1]))
            }
            "^" => {
                let base = self.expr(depth + 1)?;
                let q = self.rational_arg()?;
                if q.numer()
                    .magnitude()
                    .to_u32()
                    .is_none_or(|n| n > MAX_EXPONENT)
                    && q.is_integer()
                {
                    return err(pos, "exponent too large");
                }
                if q.is_integer() && !q.is_negative() {
                    let n = q.numer().to_u32().unwrap_or(u32::MAX);
                    if n > MAX_EXPONENT || pow_term_bound(base.term_count(), n) > MAX_TERMS {
                        return err(pos, "exponent too large for this base");
                    }
                }
                Ok(base.pow_rat(&q))
            }
            "sin" | "cos" | "exp" | "log" => {
                let args = self.args(depth, 1, 1)?;
                Ok(match head {
                    "sin" => args[0].sin(),
                    "cos" => args[0].cos(),
                    "exp" => args[0].exp(),
                    _ => args[0].log(),
                })
            }
            "normpow" => {
                let k = self.rational_arg()?;
                let parts = self.args(depth, 1, MAX_ARITY)?;
                let mut s = Expr::zero();
                for p in &parts {
                    s = s.add(&self.checked_mul(pos, p, p)?);
                }
                Ok(s.pow_rat(&(k / super::rat_int(2))))
            }
            _ => err(pos, format!("unknown operator `{head}`")),
        }
    }
}

/// Parse a single expression; trailing input is an error.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    if src.len() > 1 << 20 {
        return err(0, "input too long");
    }
    let mut p = Parser {
        lex: Lexer::new(src),
    };
    let e = p.expr(0)?;
    if let Some((pos, _)) = p.lex.next_tok() {
        return err(pos, "trailing input");
    }
    Ok(e)
}

/// Parse `(vec e1 ... en)` into a list of expressions.
pub fn parse_vector(src: &str) -> Result<Vec<Expr>, ParseError> {
    if src.len() > 1 << 20 {
        return err(0, "input too long");
    }
    let mut p = Parser {
        lex: Lexer::new(src),
    };
    let (pos, tok) = p.expect_tok()?;
    if tok != Tok::Open {
        return err(pos, "expected `(vec ...)`");
    }
    let (hpos, head) = p.expect_tok()?;
    if head != Tok::Word("vec") {
        return err(hpos, "expected `vec`");
    }
    let parts = p.args(0, 1, MAX_ARITY)?;
    let (cpos, close) = p.expect_tok()?;
    if close != Tok::Close {
        return err(cpos, "expected `)`");
    }
    if let Some((tpos, _)) = p.lex.next_tok() {
        return err(tpos, "trailing input");
    }
    Ok(parts)
}
