//! Symbolic-numeric toolkit for the calculus of homogeneous Hörmander vector
//! fields: exact expression algebra, Lie brackets and homogeneity tests,
//! intrinsic differential operators, boundary quadrature, and term-by-term
//! verification of Pohozaev-type integral identities together with audits of
//! the hypotheses of the associated non-existence theorems.
//!
//! Modules:
//! - [`expr`]: canonical rational-coefficient expressions, exact
//!   differentiation, evaluation, prefix-grammar (de)serialization.
//! - [`fields`]: vector fields, anisotropic dilations, brackets, homogeneity
//!   and Hörmander rank checks.
//! - [`calculus`]: X-gradient/-divergence/-Hessian, horizontal k-Laplacian,
//!   Euler–Lagrange residuals of first- and second-order functionals.
//! - [`geometry`]: bounded domains with analytic boundaries, outward normals,
//!   volume and surface quadrature, star-shapedness.
//! - [`identities`]: assembly of the integral identities, residual reports
//!   and non-existence hypothesis audits.
//!
//! Sign conventions used throughout:
//! `div_X F = -Σ X_i F_i`, so the sub-Laplacian `Δ_X = -Σ X_i²` is the
//! positive operator, and `Δ_{X,k} u = div_X(|∇_X u|^{k-2} ∇_X u)`.

pub mod calculus;
pub mod expr;
pub mod fields;
pub mod geometry;
pub mod identities;

pub use expr::{Expr, Rat, Var};
