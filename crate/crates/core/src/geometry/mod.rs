//! Bounded domains with analytic boundary parametrizations in dimensions 2
//! and 3, outward normals, surface measure, volume and boundary quadrature,
//! and the dilation-star-shapedness test.
//!
//! Domain kinds:
//! - `Box`: axis-aligned box, boundary handled facewise (corners are
//!   measure-zero and never hit by the interior Gauss nodes);
//! - `RadialStar2D`: boundary `θ ↦ c + r(θ)(cos θ, sin θ)` with a symbolic
//!   positive radius; volume uses the polar pullback with Jacobian
//!   `s·r(θ)²`, Gauss in `s` times trapezoid in `θ` (spectral for analytic
//!   boundaries);
//! - `ProductRadial3D`: boundary `(θ,φ) ↦ c + ρ(θ,φ)·ê(θ,φ)` in spherical
//!   coordinates; the volume Jacobian is `s²ρ³ sin θ` (the angular
//!   derivatives of ρ cancel exactly), Gauss in `s`,`θ` times trapezoid
//!   in `φ`.

pub mod quad;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expr, Var, VarLayout};
use crate::fields::DilationFamily;
use quad::{gauss_legendre_on, pairwise_sum};

#[derive(Debug, Clone, Error)]
pub enum GeometryError {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),
    #[error("degenerate boundary tangent at parameters {params:?} (jacobian {jacobian:.3e})")]
    DegenerateTangent { params: Vec<f64>, jacobian: f64 },
    #[error("evaluation failed at node {node:?}: {source}")]
    EvalAtNode { node: Vec<f64>, source: EvalError },
    #[error("point is not on the boundary: {0:?}")]
    NotOnBoundary(Vec<f64>),
}

/// Bounded domain with an analytic boundary parametrization.
#[derive(Debug, Clone)]
pub enum Domain {
    Box { bounds: Vec<(f64, f64)> },
    RadialStar2D { radius: Expr, center: [f64; 2] },
    ProductRadial3D { radius: Expr, center: [f64; 3] },
}

const THETA: Var = Var::Param(0);
const PHI: Var = Var::Param(1);

impl Domain {
    pub fn new_box(bounds: Vec<(f64, f64)>) -> Result<Self, GeometryError> {
        if bounds.len() < 2 || bounds.len() > 3 {
            return Err(GeometryError::InvalidDomain(
                "box dimension must be 2 or 3".into(),
            ));
        }
        for (lo, hi) in &bounds {
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(GeometryError::InvalidDomain(format!(
                    "box bounds must be finite with lo < hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(Domain::Box { bounds })
    }

    /// Star-shaped 2D region about `center` with boundary radius `r(θ)`.
    /// Positivity and 2π-periodicity are checked by sampling 256 points.
    pub fn new_radial_star_2d(radius: Expr, center: [f64; 2]) -> Result<Self, GeometryError> {
        for v in radius.free_vars() {
            if v != THETA {
                return Err(GeometryError::InvalidDomain(format!(
                    "radius may only depend on theta, found {}",
                    v.name()
                )));
            }
        }
        let dr = radius.differentiate(THETA);
        let tau = 2.0 * std::f64::consts::PI;
        let eval =
            |e: &Expr, th: f64| e.eval_f64(&|v: &Var| if *v == THETA { Some(th) } else { None });
        for i in 0..256 {
            let th = tau * (i as f64) / 256.0;
            let r = eval(&radius, th).map_err(|source| GeometryError::EvalAtNode {
                node: vec![th],
                source,
            })?;
            if !(r.is_finite() && r > 0.0) {
                return Err(GeometryError::InvalidDomain(format!(
                    "radius must be positive, r({th}) = {r}"
                )));
            }
        }
        for e in [&radius, &dr] {
            let a = eval(e, 0.0).unwrap_or(f64::NAN);
            let b = eval(e, tau).unwrap_or(f64::NAN);
            if !((a - b).abs() <= 1e-9 * (1.0 + a.abs())) {
                return Err(GeometryError::InvalidDomain(
                    "radius is not 2π-periodic".into(),
                ));
            }
        }
        Ok(Domain::RadialStar2D { radius, center })
    }

    /// 3D region about `center` with spherical boundary radius `ρ(θ, φ)`.
    pub fn new_product_radial_3d(radius: Expr, center: [f64; 3]) -> Result<Self, GeometryError> {
        for v in radius.free_vars() {
            if v != THETA && v != PHI {
                return Err(GeometryError::InvalidDomain(format!(
                    "radius may only depend on theta and phi, found {}",
                    v.name()
                )));
            }
        }
        let tau = 2.0 * std::f64::consts::PI;
        for i in 0..24 {
            for j in 0..24 {
                let th = std::f64::consts::PI * (i as f64 + 0.5) / 24.0;
                let ph = tau * (j as f64) / 24.0;
                let r = radius
                    .eval_f64(&|v: &Var| match *v {
                        THETA => Some(th),
                        PHI => Some(ph),
                        _ => None,
                    })
                    .map_err(|source| GeometryError::EvalAtNode {
                        node: vec![th, ph],
                        source,
                    })?;
                if !(r.is_finite() && r > 0.0) {
                    return Err(GeometryError::InvalidDomain(format!(
                        "radius must be positive, rho({th}, {ph}) = {r}"
                    )));
                }
            }
        }
        Ok(Domain::ProductRadial3D { radius, center })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { bounds } => bounds.len(),
            Domain::RadialStar2D { .. } => 2,
            Domain::ProductRadial3D { .. } => 3,
        }
    }
}

/// Domain presets exposed to the config layer.
pub mod presets {
    use super::*;
    use crate::expr::rat_int;
    use num_rational::BigRational;

    fn const_expr(v: f64) -> Expr {
        Expr::constant(BigRational::from_float(v).unwrap_or_else(|| rat_int(1)))
    }

    pub fn disk(center: [f64; 2], r: f64) -> Result<Domain, GeometryError> {
        Domain::new_radial_star_2d(const_expr(r), center)
    }

    pub fn ball3(center: [f64; 3], r: f64) -> Result<Domain, GeometryError> {
        Domain::new_product_radial_3d(const_expr(r), center)
    }

    /// Ellipse with semiaxes (a, b): `r(θ) = ab / sqrt(b²cos²θ + a²sin²θ)`.
    pub fn ellipse(a: f64, b: f64, center: [f64; 2]) -> Result<Domain, GeometryError> {
        if !(a > 0.0 && b > 0.0) {
            return Err(GeometryError::InvalidDomain(
                "ellipse semiaxes must be positive".into(),
            ));
        }
        let th = Expr::var(THETA);
        let denom = th
            .cos()
            .powi(2)
            .mul(&const_expr(b * b))
            .add(&th.sin().powi(2).mul(&const_expr(a * a)));
        let radius = const_expr(a * b).mul(&denom.pow_rat(&crate::expr::rat(-1, 2)));
        Domain::new_radial_star_2d(radius, center)
    }

    pub fn box_domain(bounds: Vec<(f64, f64)>) -> Result<Domain, GeometryError> {
        Domain::new_box(bounds)
    }

    pub fn radial2d(radius: Expr, center: [f64; 2]) -> Result<Domain, GeometryError> {
        Domain::new_radial_star_2d(radius, center)
    }
}

/// Quadrature refinement spec. Level `L ≥ 1` uses `6·2^{L-1}` Gauss points
/// per axis and `16·2^{L-1}` trapezoid points on periodic directions; the
/// error estimate compares against the next-coarser level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadratureSpec {
    pub level: u32,
}

impl QuadratureSpec {
    pub fn new(level: u32) -> Result<Self, GeometryError> {
        if level == 0 || level > 8 {
            return Err(GeometryError::InvalidQuadrature(format!(
                "refinement level must be in 1..=8, got {level}"
            )));
        }
        Ok(QuadratureSpec { level })
    }
}

fn gauss_order(level: u32) -> usize {
    match level {
        0 => 4,
        l => 6 << (l - 1),
    }
}

fn periodic_nodes(level: u32) -> usize {
    match level {
        0 => 10,
        l => 16 << (l - 1),
    }
}

#[derive(Debug, Clone)]
pub struct VolumeNode {
    pub x: Vec<f64>,
    pub w: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryNode {
    pub x: Vec<f64>,
    pub normal: Vec<f64>,
    /// Quadrature weight including the surface Jacobian.
    pub w: f64,
    /// Boundary parameters that generated this node.
    pub params: Vec<f64>,
}

fn radius_fns(radius: &Expr) -> (crate::expr::Compiled, crate::expr::Compiled) {
    let layout = VarLayout::new([THETA, PHI]);
    let r = radius
        .compile(&layout)
        .expect("radius uses only parameters");
    let dth = radius
        .differentiate(THETA)
        .compile(&layout)
        .expect("radius uses only parameters");
    (r, dth)
}

/// Interior quadrature nodes for the domain at the given level.
pub fn volume_nodes(dom: &Domain, level: u32) -> Result<Vec<VolumeNode>, GeometryError> {
    let g = gauss_order(level);
    let m = periodic_nodes(level);
    let tau = 2.0 * std::f64::consts::PI;
    match dom {
        Domain::Box { bounds } => {
            let axes: Vec<(Vec<f64>, Vec<f64>)> = bounds
                .iter()
                .map(|(lo, hi)| gauss_legendre_on(g, *lo, *hi))
                .collect();
            let mut nodes = Vec::new();
            let mut idx = vec![0usize; bounds.len()];
            loop {
                let mut x = Vec::with_capacity(bounds.len());
                let mut w = 1.0;
                for (k, (ns, ws)) in axes.iter().enumerate() {
                    x.push(ns[idx[k]]);
                    w *= ws[idx[k]];
                }
                nodes.push(VolumeNode { x, w });
                let mut k = 0;
                loop {
                    idx[k] += 1;
                    if idx[k] < g {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                    if k == bounds.len() {
                        return Ok(nodes);
                    }
                }
            }
        }
        Domain::RadialStar2D { radius, center } => {
            let (rc, _) = radius_fns(radius);
            let (snodes, sweights) = gauss_legendre_on(g, 0.0, 1.0);
            let wtheta = tau / m as f64;
            let mut nodes = Vec::with_capacity(g * m);
            for j in 0..m {
                let th = tau * j as f64 / m as f64;
                let r = rc
                    .eval(&[th, 0.0])
                    .map_err(|source| GeometryError::EvalAtNode {
                        node: vec![th],
                        source,
                    })?;
                let (ct, st) = (th.cos(), th.sin());
                for (s, ws) in snodes.iter().zip(&sweights) {
                    nodes.push(VolumeNode {
                        x: vec![center[0] + s * r * ct, center[1] + s * r * st],
                        w: ws * wtheta * s * r * r,
                    });
                }
            }
            Ok(nodes)
        }
        Domain::ProductRadial3D { radius, center } => {
            let layout = VarLayout::new([THETA, PHI]);
            let rc = radius
                .compile(&layout)
                .expect("radius uses only parameters");
            let (tnodes, tweights) = gauss_legendre_on(g, 0.0, std::f64::consts::PI);
            let (snodes, sweights) = gauss_legendre_on(g, 0.0, 1.0);
            let wphi = tau / m as f64;
            let mut nodes = Vec::with_capacity(g * g * m);
            for j in 0..m {
                let ph = tau * j as f64 / m as f64;
                for (th, wt) in tnodes.iter().zip(&tweights) {
                    let rho = rc
                        .eval(&[*th, ph])
                        .map_err(|source| GeometryError::EvalAtNode {
                            node: vec![*th, ph],
                            source,
                        })?;
                    let e = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                    for (s, ws) in snodes.iter().zip(&sweights) {
                        nodes.push(VolumeNode {
                            x: vec![
                                center[0] + s * rho * e[0],
                                center[1] + s * rho * e[1],
                                center[2] + s * rho * e[2],
                            ],
                            w: ws * wt * wphi * s * s * rho * rho * rho * th.sin(),
                        });
                    }
                }
            }
            Ok(nodes)
        }
    }
}

fn radial2d_boundary_node(
    radius: &crate::expr::Compiled,
    dradius: &crate::expr::Compiled,
    center: &[f64; 2],
    th: f64,
    w_param: f64,
) -> Result<BoundaryNode, GeometryError> {
    let r = radius
        .eval(&[th, 0.0])
        .map_err(|source| GeometryError::EvalAtNode {
            node: vec![th],
            source,
        })?;
    let dr = dradius
        .eval(&[th, 0.0])
        .map_err(|source| GeometryError::EvalAtNode {
            node: vec![th],
            source,
        })?;
    let (ct, st) = (th.cos(), th.sin());
    // P(θ) = c + r(cos, sin); tangent P' = r'(cos, sin) + r(-sin, cos).
    let tx = dr * ct - r * st;
    let ty = dr * st + r * ct;
    let jac = (tx * tx + ty * ty).sqrt();
    if jac < 1e-12 {
        return Err(GeometryError::DegenerateTangent {
            params: vec![th],
            jacobian: jac,
        });
    }
    // Outward normal for the counterclockwise parametrization.
    Ok(BoundaryNode {
        x: vec![center[0] + r * ct, center[1] + r * st],
        normal: vec![ty / jac, -tx / jac],
        w: w_param * jac,
        params: vec![th],
    })
}

struct Radial3dFns {
    rho: crate::expr::Compiled,
    rho_t: crate::expr::Compiled,
    rho_p: crate::expr::Compiled,
}

impl Radial3dFns {
    fn new(radius: &Expr) -> Self {
        let layout = VarLayout::new([THETA, PHI]);
        Radial3dFns {
            rho: radius
                .compile(&layout)
                .expect("radius uses only parameters"),
            rho_t: radius
                .differentiate(THETA)
                .compile(&layout)
                .expect("radius uses only parameters"),
            rho_p: radius
                .differentiate(PHI)
                .compile(&layout)
                .expect("radius uses only parameters"),
        }
    }
}

fn radial3d_boundary_node(
    fns: &Radial3dFns,
    center: &[f64; 3],
    th: f64,
    ph: f64,
    w_param: f64,
) -> Result<BoundaryNode, GeometryError> {
    let err_at = |source| GeometryError::EvalAtNode {
        node: vec![th, ph],
        source,
    };
    let rho = fns.rho.eval(&[th, ph]).map_err(err_at)?;
    let rho_t = fns
        .rho_t
        .eval(&[th, ph])
        .map_err(|source| GeometryError::EvalAtNode {
            node: vec![th, ph],
            source,
        })?;
    let rho_p = fns
        .rho_p
        .eval(&[th, ph])
        .map_err(|source| GeometryError::EvalAtNode {
            node: vec![th, ph],
            source,
        })?;
    let (st, ct) = (th.sin(), th.cos());
    let (sp, cp) = (ph.sin(), ph.cos());
    let e = [st * cp, st * sp, ct];
    let e_t = [ct * cp, ct * sp, -st];
    let e_p = [-st * sp, st * cp, 0.0];
    let dt: Vec<f64> = (0..3).map(|k| rho_t * e[k] + rho * e_t[k]).collect();
    let dp: Vec<f64> = (0..3).map(|k| rho_p * e[k] + rho * e_p[k]).collect();
    let cross = [
        dt[1] * dp[2] - dt[2] * dp[1],
        dt[2] * dp[0] - dt[0] * dp[2],
        dt[0] * dp[1] - dt[1] * dp[0],
    ];
    let jac = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    if jac < 1e-12 {
        return Err(GeometryError::DegenerateTangent {
            params: vec![th, ph],
            jacobian: jac,
        });
    }
    let orient = if cross[0] * e[0] + cross[1] * e[1] + cross[2] * e[2] >= 0.0 {
        1.0
    } else {
        -1.0
    };
    Ok(BoundaryNode {
        x: vec![
            center[0] + rho * e[0],
            center[1] + rho * e[1],
            center[2] + rho * e[2],
        ],
        normal: cross.iter().map(|c| orient * c / jac).collect(),
        w: w_param * jac,
        params: vec![th, ph],
    })
}

/// Boundary quadrature nodes (weights include the surface measure).
pub fn boundary_nodes(dom: &Domain, level: u32) -> Result<Vec<BoundaryNode>, GeometryError> {
    let g = gauss_order(level);
    let m = periodic_nodes(level);
    let tau = 2.0 * std::f64::consts::PI;
    match dom {
        Domain::Box { bounds } if bounds.len() == 2 => {
            let mut nodes = Vec::new();
            for axis in 0..2 {
                let other = 1 - axis;
                let (tn, tw) = gauss_legendre_on(g, bounds[other].0, bounds[other].1);
                for (side, nrm) in [(bounds[axis].0, -1.0), (bounds[axis].1, 1.0)] {
                    for (t, w) in tn.iter().zip(&tw) {
                        let mut x = vec![0.0; 2];
                        x[axis] = side;
                        x[other] = *t;
                        let mut normal = vec![0.0; 2];
                        normal[axis] = nrm;
                        nodes.push(BoundaryNode {
                            x,
                            normal,
                            w: *w,
                            params: vec![*t],
                        });
                    }
                }
            }
            Ok(nodes)
        }
        Domain::Box { bounds } => {
            let mut nodes = Vec::new();
            for axis in 0..3 {
                let o1 = (axis + 1) % 3;
                let o2 = (axis + 2) % 3;
                let (n1, w1) = gauss_legendre_on(g, bounds[o1].0, bounds[o1].1);
                let (n2, w2) = gauss_legendre_on(g, bounds[o2].0, bounds[o2].1);
                for (side, nrm) in [(bounds[axis].0, -1.0), (bounds[axis].1, 1.0)] {
                    for (t1, wa) in n1.iter().zip(&w1) {
                        for (t2, wb) in n2.iter().zip(&w2) {
                            let mut x = vec![0.0; 3];
                            x[axis] = side;
                            x[o1] = *t1;
                            x[o2] = *t2;
                            let mut normal = vec![0.0; 3];
                            normal[axis] = nrm;
                            nodes.push(BoundaryNode {
                                x,
                                normal,
                                w: wa * wb,
                                params: vec![*t1, *t2],
                            });
                        }
                    }
                }
            }
            Ok(nodes)
        }
        Domain::RadialStar2D { radius, center } => {
            let (rc, drc) = radius_fns(radius);
            let w = tau / m as f64;
            (0..m)
                .map(|j| radial2d_boundary_node(&rc, &drc, center, tau * j as f64 / m as f64, w))
                .collect()
        }
        Domain::ProductRadial3D { radius, center } => {
            let fns = Radial3dFns::new(radius);
            let (tnodes, tweights) = gauss_legendre_on(g, 0.0, std::f64::consts::PI);
            let wphi = tau / m as f64;
            let mut nodes = Vec::with_capacity(g * m);
            for j in 0..m {
                let ph = tau * j as f64 / m as f64;
                for (th, wt) in tnodes.iter().zip(&tweights) {
                    nodes.push(radial3d_boundary_node(&fns, center, *th, ph, wt * wphi)?);
                }
            }
            Ok(nodes)
        }
    }
}

/// Outward unit normal from boundary parameters: `[θ]` for 2D radial
/// domains, `[θ, φ]` for 3D radial domains, and the boundary point itself
/// for boxes (the face is inferred).
pub fn outward_normal(dom: &Domain, params: &[f64]) -> Result<Vec<f64>, GeometryError> {
    match dom {
        Domain::RadialStar2D { radius, center } => {
            let (rc, drc) = radius_fns(radius);
            Ok(radial2d_boundary_node(&rc, &drc, center, params[0], 1.0)?.normal)
        }
        Domain::ProductRadial3D { radius, center } => {
            let fns = Radial3dFns::new(radius);
            Ok(radial3d_boundary_node(&fns, center, params[0], params[1], 1.0)?.normal)
        }
        Domain::Box { bounds } => {
            if params.len() != bounds.len() {
                return Err(GeometryError::NotOnBoundary(params.to_vec()));
            }
            let tol = 1e-9;
            for (axis, (lo, hi)) in bounds.iter().enumerate() {
                if (params[axis] - lo).abs() <= tol * (1.0 + lo.abs()) {
                    let mut n = vec![0.0; bounds.len()];
                    n[axis] = -1.0;
                    return Ok(n);
                }
                if (params[axis] - hi).abs() <= tol * (1.0 + hi.abs()) {
                    let mut n = vec![0.0; bounds.len()];
                    n[axis] = 1.0;
                    return Ok(n);
                }
            }
            Err(GeometryError::NotOnBoundary(params.to_vec()))
        }
    }
}

fn sum_nodes<F>(nodes: &[VolumeNode], f: &F) -> Result<f64, GeometryError>
where
    F: Fn(&[f64]) -> Result<f64, EvalError> + Sync,
{
    pairwise_sum(nodes.len(), &|i| {
        let n = &nodes[i];
        f(&n.x)
            .map(|v| v * n.w)
            .map_err(|source| GeometryError::EvalAtNode {
                node: n.x.clone(),
                source,
            })
    })
}

fn sum_boundary<G>(nodes: &[BoundaryNode], g: &G) -> Result<f64, GeometryError>
where
    G: Fn(&[f64], &[f64]) -> Result<f64, EvalError> + Sync,
{
    pairwise_sum(nodes.len(), &|i| {
        let n = &nodes[i];
        g(&n.x, &n.normal)
            .map(|v| v * n.w)
            .map_err(|source| GeometryError::EvalAtNode {
                node: n.x.clone(),
                source,
            })
    })
}

/// `∫_Ω f dx` with an error estimate `|value(level) - value(level-1)|`.
pub fn volume_integral<F>(
    dom: &Domain,
    spec: &QuadratureSpec,
    f: F,
) -> Result<(f64, f64), GeometryError>
where
    F: Fn(&[f64]) -> Result<f64, EvalError> + Sync,
{
    let fine = sum_nodes(&volume_nodes(dom, spec.level)?, &f)?;
    let coarse = sum_nodes(&volume_nodes(dom, spec.level - 1)?, &f)?;
    Ok((fine, (fine - coarse).abs()))
}

/// `∮_{∂Ω} g(x, ν) dH^{n-1}` with an error estimate as above. The surface
/// measure comes from the parametrization Jacobian.
pub fn boundary_integral<G>(
    dom: &Domain,
    spec: &QuadratureSpec,
    g: G,
) -> Result<(f64, f64), GeometryError>
where
    G: Fn(&[f64], &[f64]) -> Result<f64, EvalError> + Sync,
{
    let fine = sum_boundary(&boundary_nodes(dom, spec.level)?, &g)?;
    let coarse = sum_boundary(&boundary_nodes(dom, spec.level - 1)?, &g)?;
    Ok((fine, (fine - coarse).abs()))
}

#[derive(Debug, Clone, Serialize)]
pub struct StarShapeReport {
    /// Minimum of `⟨T(x), ν⟩` over the boundary samples.
    pub min_pairing: f64,
    /// Sample point attaining the minimum.
    pub argmin: Vec<f64>,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Sampled test of `⟨T(x), ν⟩ ≥ 0` on the boundary (star-shapedness with
/// respect to the origin under the dilations). A pass is evidence at the
/// sampled resolution; the argmin is stored so near-violations can be
/// inspected.
pub fn check_star_shaped(
    dom: &Domain,
    d: &DilationFamily,
    samples: usize,
) -> Result<StarShapeReport, GeometryError> {
    let samples = samples.max(16);
    let nodes = star_samples(dom, samples)?;
    let sigma = d.sigma();
    let tol = 1e-12;
    let mut min_pairing = f64::INFINITY;
    let mut argmin = Vec::new();
    for n in &nodes {
        let pairing: f64 =
            n.x.iter()
                .zip(&n.normal)
                .enumerate()
                .map(|(i, (x, nu))| f64::from(sigma[i]) * x * nu)
                .sum();
        if pairing < min_pairing {
            min_pairing = pairing;
            argmin = n.x.clone();
        }
    }
    Ok(StarShapeReport {
        min_pairing,
        argmin,
        samples: nodes.len(),
        tolerance: tol,
        pass: min_pairing >= -tol,
    })
}

/// Uniform boundary samples with unit weights; used by the star-shape test
/// and the hypothesis audits (positions and normals only, not quadrature).
pub fn boundary_samples(dom: &Domain, samples: usize) -> Result<Vec<BoundaryNode>, GeometryError> {
    star_samples(dom, samples)
}

fn star_samples(dom: &Domain, samples: usize) -> Result<Vec<BoundaryNode>, GeometryError> {
    let tau = 2.0 * std::f64::consts::PI;
    match dom {
        Domain::RadialStar2D { radius, center } => {
            let (rc, drc) = radius_fns(radius);
            (0..samples)
                .map(|j| {
                    radial2d_boundary_node(&rc, &drc, center, tau * j as f64 / samples as f64, 1.0)
                })
                .collect()
        }
        Domain::ProductRadial3D { radius, center } => {
            let fns = Radial3dFns::new(radius);
            let k = ((samples as f64).sqrt().ceil() as usize).max(4);
            let mut nodes = Vec::with_capacity(k * k);
            for i in 0..k {
                let th = std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
                for j in 0..k {
                    let ph = tau * j as f64 / k as f64;
                    nodes.push(radial3d_boundary_node(&fns, center, th, ph, 1.0)?);
                }
            }
            Ok(nodes)
        }
        Domain::Box { bounds } => {
            let nfaces = 2 * bounds.len();
            let per_face = (samples / nfaces).max(4);
            let mut nodes = Vec::new();
            match bounds.len() {
                2 => {
                    for axis in 0..2 {
                        let other = 1 - axis;
                        for (side, nrm) in [(bounds[axis].0, -1.0), (bounds[axis].1, 1.0)] {
                            for j in 0..per_face {
                                let t = bounds[other].0
                                    + (bounds[other].1 - bounds[other].0) * (j as f64 + 0.5)
                                        / per_face as f64;
                                let mut x = vec![0.0; 2];
                                x[axis] = side;
                                x[other] = t;
                                let mut normal = vec![0.0; 2];
                                normal[axis] = nrm;
                                nodes.push(BoundaryNode {
                                    x,
                                    normal,
                                    w: 1.0,
                                    params: vec![t],
                                });
                            }
                        }
                    }
                }
                _ => {
                    let k = ((per_face as f64).sqrt().ceil() as usize).max(2);
                    for axis in 0..3 {
                        let o1 = (axis + 1) % 3;
                        let o2 = (axis + 2) % 3;
                        for (side, nrm) in [(bounds[axis].0, -1.0), (bounds[axis].1, 1.0)] {
                            for a in 0..k {
                                for b in 0..k {
                                    let t1 = bounds[o1].0
                                        + (bounds[o1].1 - bounds[o1].0) * (a as f64 + 0.5)
                                            / k as f64;
                                    let t2 = bounds[o2].0
                                        + (bounds[o2].1 - bounds[o2].0) * (b as f64 + 0.5)
                                            / k as f64;
                                    let mut x = vec![0.0; 3];
                                    x[axis] = side;
                                    x[o1] = t1;
                                    x[o2] = t2;
                                    let mut normal = vec![0.0; 3];
                                    normal[axis] = nrm;
                                    nodes.push(BoundaryNode {
                                        x,
                                        normal,
                                        w: 1.0,
                                        params: vec![t1, t2],
                                    });
                                }
                            }
                        }
                    }
                }
            }
            Ok(nodes)
        }
    }
}

#[cfg(test)]
#[path = "tests.rs"]
mod tests;
