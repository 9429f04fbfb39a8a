//! Vector fields with polynomial coefficients, anisotropic dilations, Lie
//! brackets, homogeneity tests and Hörmander rank checks.
//!
//! A field `Y = Σ a_i(x) ∂_{x_i}` is homogeneous of degree `α` with respect
//! to the dilation `δ_λ(x) = (λ^{σ_1} x_1, …, λ^{σ_n} x_n)` iff
//! `[Y, T] = α Y` for the generator `T = Σ σ_i x_i ∂_{x_i}`, or equivalently
//! iff every coefficient `a_i` is `δ_λ`-homogeneous of degree `σ_i - α`.
//! Both routes are computed exactly and cross-checked.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::expr::{rat_int, Expr, Rat, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldsError {
    #[error("vector field coefficient {index} is not polynomial")]
    NonPolynomialCoefficient { index: usize },
    #[error("vector field coefficient {index} uses variables outside x1..x{dim}")]
    ForeignVariable { index: usize, dim: usize },
    #[error("dilation exponents must start at 1 and be non-decreasing, got {0:?}")]
    InvalidDilation(Vec<u32>),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bracket step cap exceeded: {requested} > {cap}")]
    StepCapExceeded { requested: usize, cap: usize },
}

/// First-order differential operator `Σ a_i(x) ∂_{x_i}` with polynomial
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    dim: usize,
    coeffs: Vec<Expr>,
}

impl VectorField {
    pub fn new(coeffs: Vec<Expr>) -> Result<Self, FieldsError> {
        let dim = coeffs.len();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_polynomial() {
                return Err(FieldsError::NonPolynomialCoefficient { index: i });
            }
            for v in c.free_vars() {
                match v {
                    Var::X(k) if (k as usize) <= dim => {}
                    _ => return Err(FieldsError::ForeignVariable { index: i, dim }),
                }
            }
        }
        Ok(VectorField { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        VectorField {
            dim,
            coeffs: vec![Expr::zero(); dim],
        }
    }

    /// `∂_{x_i}` in dimension `dim` (1-based `i`).
    pub fn partial(dim: usize, i: usize) -> Self {
        let mut coeffs = vec![Expr::zero(); dim];
        coeffs[i - 1] = Expr::one();
        VectorField { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Expr {
        &self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero_expr())
    }

    /// Apply the field to a scalar expression: `Yu = Σ a_i ∂_{x_i} u`.
    pub fn apply(&self, u: &Expr) -> Expr {
        let mut out = Expr::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero_expr() {
                continue;
            }
            out = out.add(&a.mul(&u.differentiate(Var::X(i as u32 + 1))));
        }
        out
    }

    /// Divergence `Σ ∂_{x_i} a_i` (the plain Euclidean one; the intrinsic
    /// X-divergence with its sign lives in the calculus module).
    pub fn divergence(&self) -> Expr {
        let mut out = Expr::zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            out = out.add(&a.differentiate(Var::X(i as u32 + 1)));
        }
        out
    }

    /// Coefficient `a_k` of `∂_{x_k}` may only depend on `x_1..x_{k-1}`.
    pub fn is_pyramid(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(k, a)| {
            a.free_vars()
                .iter()
                .all(|v| matches!(v, Var::X(i) if (*i as usize) <= k))
        })
    }

    /// Exact coefficient vector at a rational point.
    pub fn value_at(&self, point: &[Rat]) -> Result<Vec<Rat>, FieldsError> {
        if point.len() != self.dim {
            return Err(FieldsError::DimensionMismatch(format!(
                "point has {} coordinates, field has dimension {}",
                point.len(),
                self.dim
            )));
        }
        let bind = |v: &Var| match v {
            Var::X(i) => point.get(*i as usize - 1).cloned(),
            _ => None,
        };
        Ok(self
            .coeffs
            .iter()
            .map(|c| c.eval_rat(&bind).expect("polynomial coefficient"))
            .collect())
    }

    pub fn scale(&self, c: &Rat) -> Self {
        VectorField {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "field dimensions must match");
        VectorField {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }
}

/// True iff `b = r·a` for a non-zero rational `r` (both fields non-zero).
fn proportional(a: &VectorField, b: &VectorField) -> bool {
    let mut ratio: Option<Rat> = None;
    for k in 0..a.dim {
        let (ak, bk) = (&a.coeffs[k], &b.coeffs[k]);
        match (ak.is_zero_expr(), bk.is_zero_expr()) {
            (true, true) => continue,
            (true, false) | (false, true) => return false,
            (false, false) => {}
        }
        if ratio.is_none() {
            let (m, ca) = &ak.terms()[0];
            let cb = match bk.terms().iter().find(|(mb, _)| mb == m) {
                Some((_, c)) => c.clone(),
                None => return false,
            };
            ratio = Some(cb / ca);
        }
        let r = ratio.as_ref().unwrap();
        if !bk.sub(&ak.scale(r)).is_zero_expr() {
            return false;
        }
    }
    ratio.is_some()
}

/// Exact Lie bracket `[Y, Z] = Y∘Z - Z∘Y`, again a first-order operator with
/// coefficients `Y(b_k) - Z(a_k)`.
pub fn lie_bracket(y: &VectorField, z: &VectorField) -> VectorField {
    assert_eq!(y.dim, z.dim, "field dimensions must match");
    let coeffs = (0..y.dim)
        .map(|k| y.apply(&z.coeffs[k]).sub(&z.apply(&y.coeffs[k])))
        .collect();
    VectorField { dim: y.dim, coeffs }
}

/// Anisotropic dilation family `δ_λ(x) = (λ^{σ_1} x_1, …, λ^{σ_n} x_n)`
/// with `1 = σ_1 ≤ … ≤ σ_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DilationFamily {
    sigma: Vec<u32>,
}

impl DilationFamily {
    pub fn new(sigma: Vec<u32>) -> Result<Self, FieldsError> {
        if sigma.is_empty() || sigma[0] != 1 || sigma.windows(2).any(|w| w[0] > w[1]) {
            return Err(FieldsError::InvalidDilation(sigma));
        }
        Ok(DilationFamily { sigma })
    }

    pub fn isotropic(n: usize) -> Self {
        DilationFamily { sigma: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[u32] {
        &self.sigma
    }

    /// Homogeneous dimension `q = Σ σ_k ≥ n`.
    pub fn homogeneous_dimension(&self) -> u64 {
        self.sigma.iter().map(|s| u64::from(*s)).sum()
    }

    /// Infinitesimal generator `T = Σ σ_i x_i ∂_{x_i}`; `div T = q`.
    pub fn generator(&self) -> VectorField {
        let coeffs = self
            .sigma
            .iter()
            .enumerate()
            .map(|(i, s)| Expr::x(i as u32 + 1).scale(&rat_int(i64::from(*s))))
            .collect();
        VectorField {
            dim: self.sigma.len(),
            coeffs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Homogeneity {
    Degree(Rat),
    NotHomogeneous,
}

impl Homogeneity {
    pub fn degree(&self) -> Option<&Rat> {
        match self {
            Homogeneity::Degree(d) => Some(d),
            Homogeneity::NotHomogeneous => None,
        }
    }
}

/// Degree via the coefficient test: every monomial of `a_i` must have
/// σ-weighted degree `σ_i - α` for one common `α`.
pub fn degree_via_coefficients(y: &VectorField, d: &DilationFamily) -> Homogeneity {
    assert_eq!(y.dim, d.n(), "field and dilation dimensions must match");
    let mut alpha: Option<Rat> = None;
    let mut any = false;
    for (i, a) in y.coeffs.iter().enumerate() {
        if a.is_zero_expr() {
            continue;
        }
        any = true;
        let Some(deg) = a.uniform_delta_degree(d.sigma()) else {
            return Homogeneity::NotHomogeneous;
        };
        let cand = rat_int(i64::from(d.sigma()[i])) - rat_int(deg as i64);
        match &alpha {
            None => alpha = Some(cand),
            Some(prev) if *prev == cand => {}
            Some(_) => return Homogeneity::NotHomogeneous,
        }
    }
    if !any {
        // The zero field has no unique degree.
        return Homogeneity::NotHomogeneous;
    }
    Homogeneity::Degree(alpha.unwrap())
}

/// Degree via the generator bracket: the unique `α` with `[Y, T] = α Y`,
/// verified coefficient-wise by exact equality.
pub fn degree_via_generator_bracket(y: &VectorField, d: &DilationFamily) -> Homogeneity {
    assert_eq!(y.dim, d.n(), "field and dilation dimensions must match");
    let t = d.generator();
    let b = lie_bracket(y, &t);
    // Candidate α from the first non-zero coefficient of Y, then check
    // [Y,T] - α·Y = 0 exactly.
    let mut cand: Option<Rat> = None;
    for k in 0..y.dim {
        let (bk, yk) = (&b.coeffs[k], &y.coeffs[k]);
        if yk.is_zero_expr() {
            if !bk.is_zero_expr() {
                return Homogeneity::NotHomogeneous;
            }
            continue;
        }
        let (m, cy) = &yk.terms()[0];
        let cb = bk
            .terms()
            .iter()
            .find(|(mb, _)| mb == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rat::zero);
        cand = Some(cb / cy);
        break;
    }
    let Some(alpha) = cand else {
        return Homogeneity::NotHomogeneous;
    };
    for k in 0..y.dim {
        if !b.coeffs[k].sub(&y.coeffs[k].scale(&alpha)).is_zero_expr() {
            return Homogeneity::NotHomogeneous;
        }
    }
    Homogeneity::Degree(alpha)
}

/// Homogeneity degree of `Y` under `d`, or `NotHomogeneous`. Computes both
/// the bracket route and the coefficient route and requires agreement.
pub fn homogeneity_degree(y: &VectorField, d: &DilationFamily) -> Homogeneity {
    let via_bracket = degree_via_generator_bracket(y, d);
    let via_coeffs = degree_via_coefficients(y, d);
    if via_bracket == via_coeffs {
        via_bracket
    } else {
        Homogeneity::NotHomogeneous
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct H1Report {
    pub pass: bool,
    /// Degree of each input field (None when not homogeneous).
    pub degrees: Vec<Option<String>>,
    /// Indices of fields whose degree is not exactly 1.
    pub offenders: Vec<usize>,
    pub linearly_independent: bool,
    pub pyramid_shaped: bool,
}

/// (H.1): every field homogeneous of degree exactly 1 under `d`, and the
/// family linearly independent over the reals (exact rank of stacked
/// coefficient values at 8 seeded rational points).
pub fn check_h1(family: &[VectorField], d: &DilationFamily) -> H1Report {
    let mut degrees = Vec::with_capacity(family.len());
    let mut offenders = Vec::new();
    let one = rat_int(1);
    for (i, y) in family.iter().enumerate() {
        match homogeneity_degree(y, d) {
            Homogeneity::Degree(a) => {
                if a != one {
                    offenders.push(i);
                }
                degrees.push(Some(format!("{a}")));
            }
            Homogeneity::NotHomogeneous => {
                offenders.push(i);
                degrees.push(None);
            }
        }
    }
    let linearly_independent = family_independent(family);
    let pyramid_shaped = family.iter().all(VectorField::is_pyramid);
    H1Report {
        pass: offenders.is_empty() && linearly_independent,
        degrees,
        offenders,
        linearly_independent,
        pyramid_shaped,
    }
}

/// Monte-Carlo-sound independence over ℝ: exact rank of the m×(8n) matrix of
/// coefficient values at 8 seeded rational points equals m. Dependence is
/// always detected; a dependent verdict for an independent family would need
/// all 8 sample points to be degenerate.
fn family_independent(family: &[VectorField]) -> bool {
    if family.is_empty() {
        return true;
    }
    let n = family[0].dim;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x485f_8f1d);
    let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); family.len()];
    for _ in 0..8 {
        let point: Vec<Rat> = (0..n)
            .map(|_| Rat::new(BigInt::from(rng.gen_range(-64i64..=64)), BigInt::from(16)))
            .collect();
        for (row, y) in rows.iter_mut().zip(family) {
            row.extend(y.value_at(&point).expect("dimensions checked"));
        }
    }
    exact_rank(rows) == family.len()
}

/// Exact rank over the rationals by fraction-free (Bareiss) elimination on a
/// denominator-cleared integer matrix.
pub fn exact_rank(rows: Vec<Vec<Rat>>) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows
        .into_iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::from(1), |acc, r| {
                num_integer::lcm(acc, r.denom().clone())
            });
            row.iter().map(|r| r.numer() * (&lcm / r.denom())).collect()
        })
        .collect();
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::from(1);
    let mut row = 0;
    for col in 0..cols {
        if row >= nrows {
            break;
        }
        let Some(piv) = (row..nrows).find(|r| !m[*r][col].is_zero()) else {
            continue;
        };
        m.swap(row, piv);
        for r in (row + 1)..nrows {
            for c in (col + 1)..cols {
                let val = (&m[row][col] * &m[r][c] - &m[r][col] * &m[row][c]) / &prev;
                m[r][c] = val;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[row][col].clone();
        row += 1;
        rank += 1;
    }
    rank
}

/// Rank of a float matrix via one-sided Jacobi orthogonalization with
/// threshold `1e-10 · ‖A‖_max`.
pub fn float_rank(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let n = a.len();
    let norm = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if norm == 0.0 {
        return 0;
    }
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let (mut aij, mut aii, mut ajj) = (0.0, 0.0, 0.0);
                for k in 0..a[i].len() {
                    aij += a[i][k] * a[j][k];
                    aii += a[i][k] * a[i][k];
                    ajj += a[j][k] * a[j][k];
                }
                off = off.max(aij.abs());
                if aij.abs() <= 1e-30 {
                    continue;
                }
                let tau = (ajj - aii) / (2.0 * aij);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..a[i].len() {
                    let (x, y) = (a[i][k], a[j][k]);
                    a[i][k] = c * x - s * y;
                    a[j][k] = s * x + c * y;
                }
            }
        }
        if off < 1e-14 * norm * norm {
            break;
        }
    }
    let tol = 1e-10 * norm;
    a.iter()
        .filter(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt() > tol)
        .count()
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisField {
    /// Bracket word, e.g. `[X1,[X1,X2]]`.
    pub word: String,
    pub length: usize,
    /// Homogeneity degree under the dilation, printed exactly.
    pub degree: Option<String>,
    #[serde(skip)]
    pub field: VectorField,
    /// Coefficient values at the origin.
    pub value_at_origin: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LieBasisReport {
    pub fields: Vec<BasisField>,
    pub max_step: usize,
    pub rank_at_origin: usize,
    pub dim: usize,
    /// How the default bracket-length cutoff was chosen.
    pub cutoff_note: String,
}

pub const STEP_CAP: usize = 12;

/// All iterated left-normed brackets up to length `max_step` (default σ_n),
/// deduplicated by canonical coefficient equality, each annotated with its
/// homogeneity degree. Left-normed brackets span every graded component of
/// the generated Lie algebra, so this is enough for rank checks.
pub fn generate_lie_basis(
    family: &[VectorField],
    d: &DilationFamily,
    max_step: Option<usize>,
) -> Result<LieBasisReport, FieldsError> {
    let max_step = max_step.unwrap_or_else(|| *d.sigma().last().unwrap() as usize);
    if max_step > STEP_CAP {
        return Err(FieldsError::StepCapExceeded {
            requested: max_step,
            cap: STEP_CAP,
        });
    }
    let mut all: Vec<(String, VectorField, usize)> = Vec::new();
    let mut level: Vec<(String, VectorField)> = Vec::new();
    for (i, y) in family.iter().enumerate() {
        let word = format!("X{}", i + 1);
        level.push((word.clone(), y.clone()));
        all.push((word, y.clone(), 1));
    }
    for step in 2..=max_step {
        let mut next = Vec::new();
        for (j, xj) in family.iter().enumerate() {
            for (word, w) in &level {
                let b = lie_bracket(xj, w);
                // Skip zero brackets and anything proportional to an entry
                // already listed (e.g. [X2,X1] = -[X1,X2]): it adds nothing
                // to the span at any point.
                if b.is_zero() || all.iter().any(|(_, f, _)| proportional(f, &b)) {
                    continue;
                }
                let new_word = format!("[X{},{}]", j + 1, word);
                next.push((new_word.clone(), b.clone()));
                all.push((new_word, b, step));
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    let n = d.n();
    let origin = vec![Rat::zero(); n];
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    let mut fields = Vec::new();
    for (word, f, length) in all {
        let value = f.value_at(&origin).expect("dims checked");
        rows.push(value.clone());
        let degree = homogeneity_degree(&f, d).degree().map(|a| format!("{a}"));
        fields.push(BasisField {
            word,
            length,
            degree,
            field: f,
            value_at_origin: value
                .iter()
                .map(|r| r.to_f64().unwrap_or(f64::NAN))
                .collect(),
        });
    }
    let rank_at_origin = exact_rank(rows);
    Ok(LieBasisReport {
        fields,
        max_step,
        rank_at_origin,
        dim: n,
        cutoff_note: format!(
            "bracket length capped at sigma_n = {max_step}: a bracket of length s of \
             degree-1 fields is homogeneous of degree s, and at the origin only \
             components with sigma_i = s survive, so longer brackets add no new \
             directions at 0; raise max_step to probe other points"
        ),
    })
}

/// Where to check the rank for (H.2).
#[derive(Debug, Clone)]
pub enum RankPoint {
    Origin,
    Rational(Vec<Rat>),
    Float(Vec<f64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct RankReport {
    pub point: Vec<f64>,
    pub rank: usize,
    pub dim: usize,
    pub pass: bool,
    /// True when the rank was computed in exact rational arithmetic.
    pub exact: bool,
    pub basis_words: Vec<String>,
}

/// (H.2): the iterated brackets span ℝ^n at the point (default: origin).
/// Rational points use exact fraction-free rank; float points fall back to
/// the Jacobi orthogonalization with threshold `1e-10 · ‖matrix‖`.
pub fn check_h2(
    family: &[VectorField],
    d: &DilationFamily,
    point: &RankPoint,
) -> Result<RankReport, FieldsError> {
    let basis = generate_lie_basis(family, d, None)?;
    let n = d.n();
    let words: Vec<String> = basis.fields.iter().map(|f| f.word.clone()).collect();
    let (rank, exact, pt) = match point {
        RankPoint::Origin => (basis.rank_at_origin, true, vec![0.0; n]),
        RankPoint::Rational(p) => {
            if p.len() != n {
                return Err(FieldsError::DimensionMismatch(format!(
                    "rank point has {} coordinates, dimension is {n}",
                    p.len()
                )));
            }
            let rows = basis
                .fields
                .iter()
                .map(|f| f.field.value_at(p))
                .collect::<Result<Vec<_>, _>>()?;
            (
                exact_rank(rows),
                true,
                p.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect(),
            )
        }
        RankPoint::Float(p) => {
            if p.len() != n {
                return Err(FieldsError::DimensionMismatch(format!(
                    "rank point has {} coordinates, dimension is {n}",
                    p.len()
                )));
            }
            let bind = |v: &Var| match v {
                Var::X(i) => p.get(*i as usize - 1).copied(),
                _ => None,
            };
            let rows: Vec<Vec<f64>> = basis
                .fields
                .iter()
                .map(|f| {
                    f.field
                        .coeffs()
                        .iter()
                        .map(|c| c.eval_f64(&bind).expect("polynomial"))
                        .collect()
                })
                .collect();
            (float_rank(&rows), false, p.clone())
        }
    };
    Ok(RankReport {
        point: pt,
        rank,
        dim: n,
        pass: rank == n,
        exact,
        basis_words: words,
    })
}

/// The three families used throughout: Euclidean partials, Grushin-type
/// fields, and the Bony family.
pub mod presets {
    use super::*;

    /// `X_i = ∂_{x_i}`, isotropic dilation.
    pub fn euclidean(n: usize) -> (Vec<VectorField>, DilationFamily) {
        let fields = (1..=n).map(|i| VectorField::partial(n, i)).collect();
        (fields, DilationFamily::isotropic(n))
    }

    /// On ℝ^{n1+n2} with x = (y, t): `Y_i = ∂_{y_i}` and
    /// `T_{i,j} = y_i^k ∂_{t_j}`, dilation `δ_λ(y,t) = (λ y, λ^{k+1} t)`.
    pub fn grushin(n1: usize, n2: usize, k: u32) -> (Vec<VectorField>, DilationFamily) {
        assert!(n1 >= 1 && n2 >= 1 && k >= 1, "grushin needs n1, n2, k >= 1");
        let n = n1 + n2;
        let mut fields = Vec::new();
        for i in 1..=n1 {
            fields.push(VectorField::partial(n, i));
        }
        for i in 1..=n1 {
            for j in 1..=n2 {
                let mut coeffs = vec![Expr::zero(); n];
                coeffs[n1 + j - 1] = Expr::x(i as u32).powi(k);
                fields.push(VectorField { dim: n, coeffs });
            }
        }
        let mut sigma = vec![1u32; n1];
        sigma.extend(std::iter::repeat_n(k + 1, n2));
        (fields, DilationFamily { sigma })
    }

    /// `X_1 = ∂_{x_1}`, `X_2 = Σ_{j=2}^n x_1^{j-1}/(j-1)! ∂_{x_j}`,
    /// dilation exponents (1, 2, …, n).
    pub fn bony(n: usize) -> (Vec<VectorField>, DilationFamily) {
        assert!(n >= 2, "bony family needs n >= 2");
        let x1 = VectorField::partial(n, 1);
        let mut coeffs = vec![Expr::zero(); n];
        let mut fact = Rat::from_integer(1.into());
        for j in 2..=n {
            fact *= rat_int(j as i64 - 1);
            coeffs[j - 1] = Expr::x(1).powi(j as u32 - 1).scale(&fact.recip());
        }
        let x2 = VectorField { dim: n, coeffs };
        let sigma = (1..=n as u32).collect();
        (vec![x1, x2], DilationFamily { sigma })
    }
}

#[cfg(test)]
#[path = "fields_tests.rs"]
mod tests;
