//! Intrinsic differential operators built from a family `X = {X_1,…,X_m}`:
//! X-gradient, X-divergence, X-Hessian, sub-Laplacian, horizontal
//! k-Laplacian, the generator action, and the Euler–Lagrange residuals of
//! first- and second-order functionals.
//!
//! Sign conventions (kept verbatim throughout the crate):
//! - `div_X F = -Σ X_i F_i` — the minus sign is built in;
//! - `Δ_X u = div_X(∇_X u) = -Σ X_i² u` is the positive sub-Laplacian;
//! - `Δ_{X,k} u = div_X(|∇_X u|^{k-2} ∇_X u)`.
//!
//! Functional state substitution order: the partial derivatives of
//! `F(x, z, p, r)` are taken first in the slot variables, then
//! `(z, p, r) ← (u, ∇_X u, H_X u)` is substituted symbolically, and only
//! then do outer fields act.

use thiserror::Error;

use crate::expr::{rat_int, Expr, Rat, Var};
use crate::fields::{DilationFamily, VectorField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("functional uses variable {0} outside its declared arity")]
    ArityViolation(String),
    #[error("horizontal k-laplacian requires k > 1, got {0}")]
    InvalidExponent(String),
}

/// `∇_X u = (X_1 u, …, X_m u)`.
pub fn x_gradient(x: &[VectorField], u: &Expr) -> Vec<Expr> {
    x.iter().map(|f| f.apply(u)).collect()
}

/// `div_X F = -Σ X_i F_i` (note the sign).
pub fn x_divergence(x: &[VectorField], f: &[Expr]) -> Expr {
    assert_eq!(x.len(), f.len(), "one component per field");
    let mut out = Expr::zero();
    for (xi, fi) in x.iter().zip(f) {
        out = out.sub(&xi.apply(fi));
    }
    out
}

/// X-Hessian: entry `(i, j)` is `X_j(X_i u)`. Not symmetric in general.
pub fn x_hessian(x: &[VectorField], u: &Expr) -> Vec<Vec<Expr>> {
    let grad = x_gradient(x, u);
    grad.iter()
        .map(|xiu| x.iter().map(|xj| xj.apply(xiu)).collect())
        .collect()
}

/// `Δ_X u = -Σ X_i² u`, as the X-divergence of the X-gradient.
pub fn sub_laplacian(x: &[VectorField], u: &Expr) -> Expr {
    x_divergence(x, &x_gradient(x, u))
}

/// `Δ_{X,k} u = div_X(|∇_X u|^{k-2} ∇_X u)` for `k > 1`. Construction is
/// always symbolic; evaluation where `∇_X u = 0` with `k < 2` reports a
/// singularity.
pub fn horizontal_k_laplacian(x: &[VectorField], u: &Expr, k: &Rat) -> Result<Expr, CalculusError> {
    if *k <= rat_int(1) {
        return Err(CalculusError::InvalidExponent(format!("{k}")));
    }
    let grad = x_gradient(x, u);
    let weight = Expr::norm_pow(&grad, &(k - rat_int(2)));
    let flux: Vec<Expr> = grad.iter().map(|g| weight.mul(g)).collect();
    Ok(x_divergence(x, &flux))
}

/// `T u` for the generator of the dilation family.
pub fn t_action(d: &DilationFamily, u: &Expr) -> Expr {
    d.generator().apply(u)
}

/// Nonlinearity `G(z)` of the shipped functional presets.
#[derive(Debug, Clone, PartialEq)]
pub enum GSpec {
    Zero,
    /// `G(z) = z^s / s` with integer `s >= 2`.
    Power {
        s: u32,
    },
    /// Arbitrary expression in `z` alone.
    Custom(Expr),
}

impl GSpec {
    pub fn expr(&self) -> Expr {
        match self {
            GSpec::Zero => Expr::zero(),
            GSpec::Power { s } => Expr::var(Var::Z)
                .powi(*s)
                .scale(&rat_int(i64::from(*s)).recip()),
            GSpec::Custom(e) => e.clone(),
        }
    }
}

/// Which preset a functional came from; drives the closed-form branches of
/// the non-existence audits.
#[derive(Debug, Clone, PartialEq)]
pub enum F1Kind {
    Generic,
    /// `F = |p|^k/k - G(z)`.
    PNormMinusG {
        k: Rat,
        g: GSpec,
    },
}

/// First-order integrand `F(x, z, p)` with cached exact partials.
#[derive(Debug, Clone)]
pub struct Functional1 {
    pub n: usize,
    pub m: usize,
    pub f: Expr,
    pub f_x: Vec<Expr>,
    pub f_z: Expr,
    pub f_p: Vec<Expr>,
    pub kind: F1Kind,
}

fn check_arity(f: &Expr, n: usize, m: usize, allow_r: bool) -> Result<(), CalculusError> {
    for v in f.free_vars() {
        let ok = match v {
            Var::X(i) => (i as usize) <= n,
            Var::Z => true,
            Var::P(i) => (i as usize) <= m,
            Var::R(i, j) => allow_r && (i as usize) <= m && (j as usize) <= m,
            Var::Param(_) => false,
        };
        if !ok {
            return Err(CalculusError::ArityViolation(v.name()));
        }
    }
    Ok(())
}

impl Functional1 {
    pub fn new(n: usize, m: usize, f: Expr) -> Result<Self, CalculusError> {
        check_arity(&f, n, m, false)?;
        Ok(Self::with_kind(n, m, f, F1Kind::Generic))
    }

    fn with_kind(n: usize, m: usize, f: Expr, kind: F1Kind) -> Self {
        let f_x = (1..=n as u32).map(|i| f.differentiate(Var::X(i))).collect();
        let f_z = f.differentiate(Var::Z);
        let f_p = (1..=m as u32).map(|i| f.differentiate(Var::P(i))).collect();
        Functional1 {
            n,
            m,
            f,
            f_x,
            f_z,
            f_p,
            kind,
        }
    }

    /// Preset `F(x,z,p) = |p|^k/k - G(z)`, `k > 1`.
    pub fn p_norm_minus_g(n: usize, m: usize, k: Rat, g: GSpec) -> Result<Self, CalculusError> {
        if k <= rat_int(1) {
            return Err(CalculusError::InvalidExponent(format!("{k}")));
        }
        let p: Vec<Expr> = (1..=m as u32).map(|i| Expr::var(Var::P(i))).collect();
        let f = Expr::norm_pow(&p, &k).scale(&k.recip()).sub(&g.expr());
        check_arity(&f, n, m, false)?;
        Ok(Self::with_kind(n, m, f, F1Kind::PNormMinusG { k, g }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum F2Kind {
    Generic,
    /// `F = (Σ r_ii)²/2 - G(z)` — the horizontal-biharmonic integrand.
    TraceSquaredMinusG {
        g: GSpec,
    },
}

/// Second-order integrand `F(x, z, p, r)` with cached exact partials. The
/// `r` block is a full m×m matrix of independent slots; no symmetry, since
/// the X-Hessian it receives is not symmetric.
#[derive(Debug, Clone)]
pub struct Functional2 {
    pub n: usize,
    pub m: usize,
    pub f: Expr,
    pub f_x: Vec<Expr>,
    pub f_z: Expr,
    pub f_p: Vec<Expr>,
    /// `f_r[i][j] = ∂F/∂r_{ij}` (0-based storage of 1-based slots).
    pub f_r: Vec<Vec<Expr>>,
    pub kind: F2Kind,
}

impl Functional2 {
    pub fn new(n: usize, m: usize, f: Expr) -> Result<Self, CalculusError> {
        check_arity(&f, n, m, true)?;
        Ok(Self::with_kind(n, m, f, F2Kind::Generic))
    }

    fn with_kind(n: usize, m: usize, f: Expr, kind: F2Kind) -> Self {
        let f_x = (1..=n as u32).map(|i| f.differentiate(Var::X(i))).collect();
        let f_z = f.differentiate(Var::Z);
        let f_p = (1..=m as u32).map(|i| f.differentiate(Var::P(i))).collect();
        let f_r = (1..=m as u32)
            .map(|i| {
                (1..=m as u32)
                    .map(|j| f.differentiate(Var::R(i, j)))
                    .collect()
            })
            .collect();
        Functional2 {
            n,
            m,
            f,
            f_x,
            f_z,
            f_p,
            f_r,
            kind,
        }
    }

    /// Preset `F(x,z,p,r) = (Σ r_ii)²/2 - G(z)`; its Euler–Lagrange operator
    /// is `Δ_X² u - G'(u)`.
    pub fn horizontal_biharmonic(n: usize, m: usize, g: GSpec) -> Result<Self, CalculusError> {
        let mut trace = Expr::zero();
        for i in 1..=m as u32 {
            trace = trace.add(&Expr::var(Var::R(i, i)));
        }
        let f = trace.powi(2).scale(&crate::expr::rat(1, 2)).sub(&g.expr());
        check_arity(&f, n, m, true)?;
        Ok(Self::with_kind(n, m, f, F2Kind::TraceSquaredMinusG { g }))
    }
}

/// The state `(u, ∇_X u, H_X u)` substituted for `(z, p, r)`.
pub struct StateBindings<'a> {
    pub u: &'a Expr,
    pub grad: &'a [Expr],
    pub hess: Option<&'a [Vec<Expr>]>,
}

pub fn substitute_state(e: &Expr, b: &StateBindings<'_>) -> Expr {
    e.substitute(&|v: &Var| match v {
        Var::Z => Some(b.u.clone()),
        Var::P(i) => b.grad.get(*i as usize - 1).cloned(),
        Var::R(i, j) => b
            .hess
            .and_then(|h| h.get(*i as usize - 1))
            .and_then(|row| row.get(*j as usize - 1).cloned()),
        _ => None,
    })
}

/// Residual of `div_X(F_p(x, u, ∇_X u)) + ∂_z F(x, u, ∇_X u)`; `u` solves
/// the Euler–Lagrange equation iff this is the zero function on the domain.
pub fn euler_lagrange_1(f1: &Functional1, x: &[VectorField], u: &Expr) -> Expr {
    assert_eq!(
        f1.m,
        x.len(),
        "functional p-arity must match the family size"
    );
    let grad = x_gradient(x, u);
    let b = StateBindings {
        u,
        grad: &grad,
        hess: None,
    };
    let fp_sub: Vec<Expr> = f1.f_p.iter().map(|e| substitute_state(e, &b)).collect();
    x_divergence(x, &fp_sub).add(&substitute_state(&f1.f_z, &b))
}

/// Residual of
/// `Σ_{ij} X_i(X_j(F_{r_{ij}}(…))) + div_X(F_p(…)) + ∂_z F(…)`.
pub fn euler_lagrange_2(f2: &Functional2, x: &[VectorField], u: &Expr) -> Expr {
    assert_eq!(
        f2.m,
        x.len(),
        "functional p-arity must match the family size"
    );
    let grad = x_gradient(x, u);
    let hess = x_hessian(x, u);
    let b = StateBindings {
        u,
        grad: &grad,
        hess: Some(&hess),
    };
    let fp_sub: Vec<Expr> = f2.f_p.iter().map(|e| substitute_state(e, &b)).collect();
    let mut out = x_divergence(x, &fp_sub).add(&substitute_state(&f2.f_z, &b));
    for i in 0..f2.m {
        for j in 0..f2.m {
            let frij = substitute_state(&f2.f_r[i][j], &b);
            out = out.add(&x[i].apply(&x[j].apply(&frij)));
        }
    }
    out
}

#[cfg(test)]
#[path = "calculus_tests.rs"]
mod tests;
