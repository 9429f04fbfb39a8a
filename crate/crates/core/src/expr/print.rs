//! Canonical prefix-grammar serialization, e.g. `(+ (* 2 (^ x1 2)) (sin x2))`.
//! Rationals print as `num` or `num/den`. `Display` output always re-parses
//! to the same canonical expression.

use std::fmt;

use num_traits::One;

use super::{Atom, Expr, Gen, Rat};

fn write_rat(f: &mut fmt::Formatter<'_>, r: &Rat) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

fn write_gen(f: &mut fmt::Formatter<'_>, g: &Gen) -> fmt::Result {
    match g {
        Gen::V(v) => write!(f, "{}", v.name()),
        Gen::A(a) => match &**a {
            Atom::Sin(u) => write!(f, "(sin {u})"),
            Atom::Cos(u) => write!(f, "(cos {u})"),
            Atom::Exp(u) => write!(f, "(exp {u})"),
            Atom::Log(u) => write!(f, "(log {u})"),
            Atom::Pow(u, q) => {
                write!(f, "(^ {u} ")?;
                write_rat(f, q)?;
                write!(f, ")")
            }
        },
    }
}

fn write_factor(f: &mut fmt::Formatter<'_>, g: &Gen, e: u32) -> fmt::Result {
    if e == 1 {
        write_gen(f, g)
    } else {
        write!(f, "(^ ")?;
        write_gen(f, g)?;
        write!(f, " {e})")
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, mono: &super::Mono, c: &Rat) -> fmt::Result {
    let fs = mono.factors();
    if fs.is_empty() {
        return write_rat(f, c);
    }
    if c.is_one() && fs.len() == 1 {
        return write_factor(f, &fs[0].0, fs[0].1);
    }
    write!(f, "(*")?;
    if !c.is_one() {
        write!(f, " ")?;
        write_rat(f, c)?;
    }
    for (g, e) in fs {
        write!(f, " ")?;
        write_factor(f, g, *e)?;
    }
    write!(f, ")")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terms.len() {
            0 => write!(f, "0"),
            1 => write_term(f, &self.terms[0].0, &self.terms[0].1),
            _ => {
                write!(f, "(+")?;
                for (m, c) in &self.terms {
                    write!(f, " ")?;
                    write_term(f, m, c)?;
                }
                write!(f, ")")
            }
        }
    }
}
