//! Exact scalar expressions: canonical multivariate polynomials over
//! arbitrary-precision rationals whose generators are either variables or a
//! closed catalog of elementary-function atoms (sin, cos, exp, log, real
//! powers).
//!
//! Every `Expr` is kept in canonical form at all times: a sorted list of
//! monomials (graded lexicographic, leading term first) with non-zero exact
//! rational coefficients. Polynomial subtrees therefore never need a separate
//! normalization pass, and `e.sub(&e)` is the zero expression by
//! construction.
//!
//! Real powers `u^q` (`q` rational, not a non-negative integer) assume a
//! non-negative base: they arise from norms `|v|^k = (Σ vᵢ²)^{k/2}`, and
//! evaluation at a negative base reports a singularity. Under that convention
//! exponents of a common base merge exactly during multiplication, which is
//! what makes e.g. `⟨|p|^{k-2} p, p⟩` collapse to `|p|^k` symbolically.

mod diff;
mod eval;
mod parse;
mod print;

pub use eval::{Compiled, EvalError, VarLayout};
pub use parse::{parse_expr, parse_vector, ParseError};

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar used for all coefficients and exponents.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A named indeterminate. The fixed kinds give a stable, deterministic
/// ordering: spatial variables first, then the state slots `z`, `p_i`,
/// `r_{ij}` of a functional, then boundary parameters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Spatial coordinate `x_i`, 1-based.
    X(u32),
    /// Function value slot `z`.
    Z,
    /// Gradient slot `p_i`, 1-based.
    P(u32),
    /// Hessian slot `r_{ij}`, 1-based.
    R(u32, u32),
    /// Boundary parameter: 0 = theta, 1 = phi.
    Param(u8),
}

impl Var {
    pub fn name(&self) -> String {
        match self {
            Var::X(i) => format!("x{i}"),
            Var::Z => "z".into(),
            Var::P(i) => format!("p{i}"),
            Var::R(i, j) => {
                if *i <= 9 && *j <= 9 {
                    format!("r{i}{j}")
                } else {
                    format!("r{i}_{j}")
                }
            }
            Var::Param(0) => "theta".into(),
            Var::Param(1) => "phi".into(),
            Var::Param(k) => format!("param{k}"),
        }
    }
}

/// Elementary-function node. `Pow` holds a rational exponent that is never a
/// non-negative integer (those powers are expanded into the polynomial).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Atom {
    Sin(Expr),
    Cos(Expr),
    Exp(Expr),
    Log(Expr),
    Pow(Expr, Rat),
}

/// Monomial generator: a variable or a shared elementary-function atom.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Gen {
    V(Var),
    A(Arc<Atom>),
}

/// Product of generator powers, sorted by generator; all exponents >= 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Mono {
    factors: Vec<(Gen, u32)>,
}

impl Mono {
    fn unit() -> Self {
        Mono {
            factors: Vec::new(),
        }
    }

    fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.factors.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub fn factors(&self) -> &[(Gen, u32)] {
        &self.factors
    }
}

// Graded lexicographic: higher total degree first; ties broken by the
// exponent vector read along the generator order (a positive exponent on an
// earlier generator wins).
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.factors.iter();
        let mut b = other.factors.iter();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ga, ea)), Some((gb, eb))) => match ga.cmp(gb) {
                    // The smaller generator carries a positive exponent only
                    // on one side: that side is lexicographically larger.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match ea.cmp(eb) {
                        Ordering::Equal => {}
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical expression: sorted monomials with non-zero rational
/// coefficients, leading (graded-lex largest) term first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Expr {
    terms: Vec<(Mono, Rat)>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr {
                terms: vec![(Mono::unit(), c)],
            }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Expr::constant(rat_int(n))
    }

    pub fn var(v: Var) -> Self {
        Expr {
            terms: vec![(
                Mono {
                    factors: vec![(Gen::V(v), 1)],
                },
                Rat::one(),
            )],
        }
    }

    /// Spatial variable `x_i` (1-based).
    pub fn x(i: u32) -> Self {
        Expr::var(Var::X(i))
    }

    fn single_atom(a: Atom) -> Self {
        Expr {
            terms: vec![(
                Mono {
                    factors: vec![(Gen::A(Arc::new(a)), 1)],
                },
                Rat::one(),
            )],
        }
    }

    fn from_term_map(map: BTreeMap<Mono, Rat>) -> Self {
        let mut terms: Vec<(Mono, Rat)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse(); // BTreeMap ascends; canonical order is descending
        Expr { terms }
    }

    pub fn terms(&self) -> &[(Mono, Rat)] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero_expr(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map(|c| c.is_one()).unwrap_or(false)
    }

    /// `Some(c)` iff the expression is the constant `c` (zero included).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 if self.terms[0].0.is_unit() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    /// `Some(gen)` iff the expression is a single generator to the first
    /// power with coefficient one.
    fn as_single_gen(&self) -> Option<Gen> {
        if self.terms.len() == 1 && self.terms[0].1.is_one() {
            let f = &self.terms[0].0.factors;
            if f.len() == 1 && f[0].1 == 1 {
                return Some(f[0].0.clone());
            }
        }
        None
    }

    /// `Some((base, q))` iff the expression is exactly `base^q` for a real
    /// power atom (coefficient one, single factor).
    fn as_pure_pow(&self) -> Option<(Expr, Rat)> {
        if self.terms.len() == 1 && self.terms[0].1.is_one() {
            let f = &self.terms[0].0.factors;
            if f.len() == 1 {
                if let Gen::A(a) = &f[0].0 {
                    if let Atom::Pow(b, q) = &**a {
                        return Some((b.clone(), q * rat_int(i64::from(f[0].1))));
                    }
                }
            }
        }
        None
    }

    /// True iff no elementary-function atoms occur (pure polynomial).
    pub fn is_polynomial(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, _)| m.factors.iter().all(|(g, _)| matches!(g, Gen::V(_))))
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for (m, _) in &self.terms {
            for (g, _) in &m.factors {
                match g {
                    Gen::V(v) => {
                        out.insert(*v);
                    }
                    Gen::A(a) => match &**a {
                        Atom::Sin(e) | Atom::Cos(e) | Atom::Exp(e) | Atom::Log(e) => {
                            e.collect_vars(out)
                        }
                        Atom::Pow(e, _) => e.collect_vars(out),
                    },
                }
            }
        }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        // Merge of two canonically sorted term lists.
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap().clone()),
                (Some((ma, _)), Some((mb, _))) => match ma.cmp(mb) {
                    Ordering::Greater => out.push(a.next().unwrap().clone()),
                    Ordering::Less => out.push(b.next().unwrap().clone()),
                    Ordering::Equal => {
                        let (m, ca) = a.next().unwrap();
                        let (_, cb) = b.next().unwrap();
                        let c = ca + cb;
                        if !c.is_zero() {
                            out.push((m.clone(), c));
                        }
                    }
                },
            }
        }
        Expr { terms: out }
    }

    pub fn neg(&self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rat) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        let mut acc: BTreeMap<Mono, Rat> = BTreeMap::new();
        let mut extras = Expr::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let prod = term_mul(m1, c1, m2, c2);
                // The common case is a single plain monomial; route it into
                // the accumulator map, otherwise fold the whole sub-sum.
                if prod.terms.len() == 1 {
                    let (m, c) = prod.terms.into_iter().next().unwrap();
                    let entry = acc.entry(m).or_insert_with(Rat::zero);
                    *entry += c;
                } else {
                    extras = extras.add(&prod);
                }
            }
        }
        Expr::from_term_map(acc).add(&extras)
    }

    /// Integer power by repeated squaring; always expands polynomially.
    pub fn powi(&self, n: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Real power with rational exponent. Non-negative integer exponents are
    /// expanded; everything else becomes a `Pow` atom (nested powers of a
    /// `Pow` atom merge, constants with integer exponents fold exactly).
    pub fn pow_rat(&self, q: &Rat) -> Expr {
        if q.is_zero() {
            return Expr::one();
        }
        if self.is_zero_expr() {
            if q.is_positive() {
                return Expr::zero();
            }
            // 0^q with q < 0: keep the atom; evaluation reports the
            // singularity.
            return Expr::single_atom(Atom::Pow(Expr::zero(), q.clone()));
        }
        if q.is_integer() {
            let n = &q.numer().clone();
            if !n.is_negative() {
                if let Some(n) = n.to_u32() {
                    return self.powi(n);
                }
            }
            if let Some(c) = self.as_constant() {
                // c != 0 here; negative integer powers of constants are exact.
                if let Some(n) = n.to_i32() {
                    return Expr::constant(num_traits::pow::Pow::pow(&c, n));
                }
            }
        }
        if let Some(c) = self.as_constant() {
            if c.is_one() {
                return Expr::one();
            }
            return Expr::single_atom(Atom::Pow(Expr::constant(c), q.clone()));
        }
        if let Some((b, q0)) = self.as_pure_pow() {
            return b.pow_rat(&(q0 * q));
        }
        Expr::single_atom(Atom::Pow(self.clone(), q.clone()))
    }

    /// Quotient. Division by a non-zero constant is exact; otherwise the
    /// divisor enters as a `Pow(-1)` atom.
    pub fn div(&self, other: &Expr) -> Expr {
        if let Some(c) = other.as_constant() {
            if !c.is_zero() {
                return self.scale(&c.recip());
            }
        }
        self.mul(&other.pow_rat(&rat_int(-1)))
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero_expr() {
            return Expr::zero();
        }
        Expr::single_atom(Atom::Sin(self.clone()))
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero_expr() {
            return Expr::one();
        }
        Expr::single_atom(Atom::Cos(self.clone()))
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero_expr() {
            return Expr::one();
        }
        Expr::single_atom(Atom::Exp(self.clone()))
    }

    pub fn log(&self) -> Expr {
        if self.is_one() {
            return Expr::zero();
        }
        Expr::single_atom(Atom::Log(self.clone()))
    }

    /// `|v|^k` for a vector of components, represented as `(Σ vᵢ²)^{k/2}`.
    pub fn norm_pow(parts: &[Expr], k: &Rat) -> Expr {
        let mut s = Expr::zero();
        for p in parts {
            s = s.add(&p.mul(p));
        }
        s.pow_rat(&(k / rat_int(2)))
    }

    /// Replace variables by expressions; unmapped variables stay themselves.
    /// Atoms are rebuilt through the smart constructors, so the result is
    /// canonical.
    pub fn substitute<F>(&self, map: &F) -> Expr
    where
        F: Fn(&Var) -> Option<Expr>,
    {
        let mut acc = Expr::zero();
        for (m, c) in &self.terms {
            let mut t = Expr::constant(c.clone());
            for (g, e) in &m.factors {
                let ge = match g {
                    Gen::V(v) => match map(v) {
                        Some(repl) => repl,
                        None => Expr::var(*v),
                    },
                    Gen::A(a) => match &**a {
                        Atom::Sin(u) => u.substitute(map).sin(),
                        Atom::Cos(u) => u.substitute(map).cos(),
                        Atom::Exp(u) => u.substitute(map).exp(),
                        Atom::Log(u) => u.substitute(map).log(),
                        Atom::Pow(u, q) => u.substitute(map).pow_rat(q),
                    },
                };
                t = t.mul(&ge.powi(*e));
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Exact structural zero test for polynomials; randomized numeric probe
    /// (32 seeded sample points, sound only up to the declared caveat) for
    /// expressions containing elementary functions.
    pub fn is_zero(&self) -> bool {
        if self.is_zero_expr() {
            return true;
        }
        if self.is_polynomial() {
            return false;
        }
        self.probably_zero(32)
    }

    /// Randomized zero test at `n` sample points in [-1,1]^vars. Points that
    /// hit a singularity are skipped (with a bounded number of retries).
    pub fn probably_zero(&self, n: usize) -> bool {
        use rand::{Rng, SeedableRng};
        let vars: Vec<Var> = self.free_vars().into_iter().collect();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e3779b97f4a7c15);
        let mut checked = 0;
        let mut attempts = 0;
        while checked < n && attempts < 8 * n {
            attempts += 1;
            let vals: Vec<f64> = (0..vars.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let bind = |v: &Var| vars.iter().position(|w| w == v).map(|i| vals[i]);
            match self.eval_f64(&bind) {
                Ok(v) => {
                    if v.abs() > 1e-9 {
                        return false;
                    }
                    checked += 1;
                }
                Err(_) => continue,
            }
        }
        checked > 0
    }

    /// Exact partial derivative; see the module docs for the atom rules.
    pub fn differentiate(&self, v: Var) -> Expr {
        diff::differentiate(self, v)
    }

    /// Exact evaluation: every input is converted to an exact rational,
    /// polynomial arithmetic is exact, and each elementary-function call
    /// rounds exactly once. The final result rounds once to f64.
    pub fn evaluate<F>(&self, bind: &F) -> Result<f64, EvalError>
    where
        F: Fn(&Var) -> Option<f64>,
    {
        eval::evaluate_exact(self, bind)
    }

    /// Fast f64 evaluation used by quadrature inner loops.
    pub fn eval_f64<F>(&self, bind: &F) -> Result<f64, EvalError>
    where
        F: Fn(&Var) -> Option<f64>,
    {
        eval::eval_f64(self, bind)
    }

    /// Exact evaluation at a rational point. Fails with `NotPolynomial` if
    /// the expression contains elementary-function atoms.
    pub fn eval_rat<F>(&self, bind: &F) -> Result<Rat, EvalError>
    where
        F: Fn(&Var) -> Option<Rat>,
    {
        eval::eval_rat_poly(self, bind)
    }

    /// Compile against a fixed variable layout for fast repeated evaluation.
    pub fn compile(&self, layout: &VarLayout) -> Result<Compiled, EvalError> {
        eval::compile(self, layout)
    }

    /// Sum of `σ`-weighted degrees of the x-variables in each monomial, if
    /// the expression is a polynomial in x-variables and every monomial has
    /// the same weighted degree. Constants (zero included) return None.
    pub fn uniform_delta_degree(&self, sigma: &[u32]) -> Option<u64> {
        let mut deg: Option<u64> = None;
        if self.terms.is_empty() {
            return None;
        }
        for (m, _) in &self.terms {
            let mut d: u64 = 0;
            for (g, e) in &m.factors {
                match g {
                    Gen::V(Var::X(i)) => {
                        let idx = (*i as usize).checked_sub(1)?;
                        d += u64::from(*sigma.get(idx)?) * u64::from(*e);
                    }
                    _ => return None,
                }
            }
            match deg {
                None => deg = Some(d),
                Some(prev) if prev == d => {}
                Some(_) => return None,
            }
        }
        deg
    }
}

/// Multiply two coefficiented monomials. Exponents of a common base are
/// merged (variables, atoms and real-power atoms uniformly), and any net
/// non-negative integer power of a non-trivial base is expanded back into
/// the polynomial, so the result is a full expression.
fn term_mul(m1: &Mono, c1: &Rat, m2: &Mono, c2: &Rat) -> Expr {
    let mut net: BTreeMap<Expr, Rat> = BTreeMap::new();
    for (g, e) in m1.factors.iter().chain(m2.factors.iter()) {
        let (base, q) = match g {
            Gen::V(v) => (Expr::var(*v), rat_int(i64::from(*e))),
            Gen::A(a) => match &**a {
                Atom::Pow(b, q) => (b.clone(), q * rat_int(i64::from(*e))),
                _ => (Expr::single_atom((**a).clone()), rat_int(i64::from(*e))),
            },
        };
        let entry = net.entry(base).or_insert_with(Rat::zero);
        *entry += q;
    }
    let mut factors: Vec<(Gen, u32)> = Vec::new();
    let mut poly_factors: Vec<Expr> = Vec::new();
    for (base, q) in net {
        if q.is_zero() {
            continue;
        }
        if q.is_integer() && q.is_positive() {
            if let Some(n) = q.numer().to_u32() {
                if let Some(g) = base.as_single_gen() {
                    factors.push((g, n));
                } else {
                    poly_factors.push(base.powi(n));
                }
                continue;
            }
        }
        factors.push((Gen::A(Arc::new(Atom::Pow(base, q))), 1));
    }
    factors.sort_by(|a, b| a.0.cmp(&b.0));
    let mut acc = Expr {
        terms: vec![(Mono { factors }, c1 * c2)],
    };
    for p in poly_factors {
        acc = acc.mul(&p);
    }
    acc
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::add(self, rhs)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sub(self, rhs)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::mul(self, rhs)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[cfg(test)]
mod tests;
