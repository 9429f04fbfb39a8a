//! Evaluation: an exact rational path (the contract of `Expr::evaluate`),
//! a plain f64 path, and a compiled form for quadrature inner loops.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::{Atom, Expr, Gen, Rat, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("evaluation singularity: {0}")]
    Singularity(String),
    #[error("expression is not polynomial: {0}")]
    NotPolynomial(String),
}

fn rat_from_f64(x: f64, what: &str) -> Result<Rat, EvalError> {
    BigRational::from_float(x)
        .ok_or_else(|| EvalError::Singularity(format!("non-finite value for {what}")))
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn apply_atom_f64(a: &Atom, arg: f64, q_as_f64: impl Fn(&Rat) -> f64) -> Result<f64, EvalError> {
    match a {
        Atom::Sin(_) => Ok(arg.sin()),
        Atom::Cos(_) => Ok(arg.cos()),
        Atom::Exp(_) => Ok(arg.exp()),
        Atom::Log(_) => {
            if arg <= 0.0 {
                Err(EvalError::Singularity("log of non-positive value".into()))
            } else {
                Ok(arg.ln())
            }
        }
        Atom::Pow(_, q) => {
            let qf = q_as_f64(q);
            if arg < 0.0 {
                Err(EvalError::Singularity("real power of negative base".into()))
            } else if arg == 0.0 {
                if qf > 0.0 {
                    Ok(0.0)
                } else {
                    Err(EvalError::Singularity(
                        "zero base with non-positive exponent".into(),
                    ))
                }
            } else if q.is_integer() {
                match q.numer().to_i32() {
                    Some(n) => Ok(arg.powi(n)),
                    None => Ok(arg.powf(qf)),
                }
            } else {
                Ok(arg.powf(qf))
            }
        }
    }
}

/// Exact evaluation: variables convert to exact rationals (every finite f64
/// is one), polynomial arithmetic is exact, and each elementary call rounds
/// exactly once through f64. The final sum rounds once at the end.
pub(super) fn evaluate_exact<F>(e: &Expr, bind: &F) -> Result<f64, EvalError>
where
    F: Fn(&Var) -> Option<f64>,
{
    Ok(rat_to_f64(&eval_rat_inner(e, bind)?))
}

fn eval_rat_inner<F>(e: &Expr, bind: &F) -> Result<Rat, EvalError>
where
    F: Fn(&Var) -> Option<f64>,
{
    let mut sum = Rat::zero();
    for (m, c) in &e.terms {
        let mut prod = c.clone();
        for (g, exp) in m.factors() {
            let val: Rat = match g {
                Gen::V(v) => {
                    let x = bind(v).ok_or_else(|| EvalError::UnboundVariable(v.name()))?;
                    rat_from_f64(x, &v.name())?
                }
                Gen::A(a) => {
                    let arg = rat_to_f64(&eval_rat_inner(atom_arg(a), bind)?);
                    let v = apply_atom_f64(a, arg, rat_to_f64)?;
                    rat_from_f64(v, "elementary function value")?
                }
            };
            prod *= rat_pow(&val, *exp);
        }
        sum += prod;
    }
    Ok(sum)
}

fn atom_arg(a: &Atom) -> &Expr {
    match a {
        Atom::Sin(u) | Atom::Cos(u) | Atom::Exp(u) | Atom::Log(u) => u,
        Atom::Pow(u, _) => u,
    }
}

fn rat_pow(r: &Rat, e: u32) -> Rat {
    let mut out = Rat::from_integer(1.into());
    let mut base = r.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    out
}

/// Exact evaluation of a polynomial expression at a rational point.
pub(super) fn eval_rat_poly<F>(e: &Expr, bind: &F) -> Result<Rat, EvalError>
where
    F: Fn(&Var) -> Option<Rat>,
{
    let mut sum = Rat::zero();
    for (m, c) in &e.terms {
        let mut prod = c.clone();
        for (g, exp) in m.factors() {
            match g {
                Gen::V(v) => {
                    let x = bind(v).ok_or_else(|| EvalError::UnboundVariable(v.name()))?;
                    prod *= rat_pow(&x, *exp);
                }
                Gen::A(_) => {
                    return Err(EvalError::NotPolynomial(
                        "exact rational evaluation requires a polynomial".into(),
                    ))
                }
            }
        }
        sum += prod;
    }
    Ok(sum)
}

/// Plain f64 evaluation.
pub(super) fn eval_f64<F>(e: &Expr, bind: &F) -> Result<f64, EvalError>
where
    F: Fn(&Var) -> Option<f64>,
{
    let mut sum = 0.0;
    for (m, c) in &e.terms {
        let mut prod = rat_to_f64(c);
        for (g, exp) in m.factors() {
            let val = match g {
                Gen::V(v) => bind(v).ok_or_else(|| EvalError::UnboundVariable(v.name()))?,
                Gen::A(a) => {
                    let arg = eval_f64(atom_arg(a), bind)?;
                    apply_atom_f64(a, arg, rat_to_f64)?
                }
            };
            prod *= val.powi(*exp as i32);
        }
        sum += prod;
    }
    Ok(sum)
}

/// Mapping from variables to slots of a flat `&[f64]` point.
#[derive(Debug, Clone, Default)]
pub struct VarLayout {
    slots: BTreeMap<Var, usize>,
}

impl VarLayout {
    pub fn new(vars: impl IntoIterator<Item = Var>) -> Self {
        let mut slots = BTreeMap::new();
        for (i, v) in vars.into_iter().enumerate() {
            slots.insert(v, i);
        }
        VarLayout { slots }
    }

    /// Layout over the spatial variables `x1..=xn`.
    pub fn spatial(n: usize) -> Self {
        VarLayout::new((1..=n as u32).map(Var::X))
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slot(&self, v: &Var) -> Option<usize> {
        self.slots.get(v).copied()
    }
}

enum CKind {
    Sin,
    Cos,
    Exp,
    Log,
    Pow {
        exp_f: f64,
        exp_i: Option<i32>,
        positive: bool,
    },
}

struct CAtom {
    kind: CKind,
    arg: Compiled,
}

enum Slot {
    Var(usize),
    Atom(usize),
}

struct CTerm {
    coeff: f64,
    factors: Vec<(Slot, u32)>,
}

/// Expression compiled against a fixed variable layout; pure f64 arithmetic,
/// no hashing in the hot loop.
pub struct Compiled {
    terms: Vec<CTerm>,
    atoms: Vec<CAtom>,
}

pub(super) fn compile(e: &Expr, layout: &VarLayout) -> Result<Compiled, EvalError> {
    let mut atoms: Vec<CAtom> = Vec::new();
    let mut atom_keys: Vec<*const Atom> = Vec::new();
    let mut terms = Vec::with_capacity(e.terms.len());
    for (m, c) in &e.terms {
        let mut factors = Vec::with_capacity(m.factors().len());
        for (g, exp) in m.factors() {
            let slot = match g {
                Gen::V(v) => Slot::Var(
                    layout
                        .slot(v)
                        .ok_or_else(|| EvalError::UnboundVariable(v.name()))?,
                ),
                Gen::A(a) => {
                    let key: *const Atom = std::sync::Arc::as_ptr(a);
                    let idx = match atom_keys.iter().position(|k| *k == key) {
                        Some(i) => i,
                        None => {
                            let kind = match &**a {
                                Atom::Sin(_) => CKind::Sin,
                                Atom::Cos(_) => CKind::Cos,
                                Atom::Exp(_) => CKind::Exp,
                                Atom::Log(_) => CKind::Log,
                                Atom::Pow(_, q) => CKind::Pow {
                                    exp_f: rat_to_f64(q),
                                    exp_i: if q.is_integer() {
                                        q.numer().to_i32()
                                    } else {
                                        None
                                    },
                                    positive: q.is_positive(),
                                },
                            };
                            let arg = compile(atom_arg(a), layout)?;
                            atoms.push(CAtom { kind, arg });
                            atom_keys.push(key);
                            atoms.len() - 1
                        }
                    };
                    Slot::Atom(idx)
                }
            };
            factors.push((slot, *exp));
        }
        terms.push(CTerm {
            coeff: rat_to_f64(c),
            factors,
        });
    }
    Ok(Compiled { terms, atoms })
}

impl Compiled {
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        let mut avals = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            let arg = a.arg.eval(point)?;
            let v = match &a.kind {
                CKind::Sin => arg.sin(),
                CKind::Cos => arg.cos(),
                CKind::Exp => arg.exp(),
                CKind::Log => {
                    if arg <= 0.0 {
                        return Err(EvalError::Singularity("log of non-positive value".into()));
                    }
                    arg.ln()
                }
                CKind::Pow {
                    exp_f,
                    exp_i,
                    positive,
                } => {
                    if arg < 0.0 {
                        return Err(EvalError::Singularity("real power of negative base".into()));
                    }
                    if arg == 0.0 {
                        if *positive {
                            0.0
                        } else {
                            return Err(EvalError::Singularity(
                                "zero base with non-positive exponent".into(),
                            ));
                        }
                    } else {
                        match exp_i {
                            Some(n) => arg.powi(*n),
                            None => arg.powf(*exp_f),
                        }
                    }
                }
            };
            avals.push(v);
        }
        let mut sum = 0.0;
        for t in &self.terms {
            let mut prod = t.coeff;
            for (slot, exp) in &t.factors {
                let v = match slot {
                    Slot::Var(i) => point[*i],
                    Slot::Atom(i) => avals[*i],
                };
                prod *= v.powi(*exp as i32);
            }
            sum += prod;
        }
        Ok(sum)
    }
}
