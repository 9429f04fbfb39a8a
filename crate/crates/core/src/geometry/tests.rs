use super::*;
use crate::expr::{rat, rat_int};

const PI: f64 = std::f64::consts::PI;

fn unit_disk() -> Domain {
    presets::disk([0.0, 0.0], 1.0).unwrap()
}

fn spec(level: u32) -> QuadratureSpec {
    QuadratureSpec::new(level).unwrap()
}

#[test]
fn volume_examples() {
    // ∫ 1 over the unit disk = π.
    let (v, _) = volume_integral(&unit_disk(), &spec(3), |_| Ok(1.0)).unwrap();
    assert!((v - PI).abs() < 1e-10, "{v}");

    // ∫ x1^2 over [0,1]^2 = 1/3, exact for Gauss rules of order >= 2.
    let b = presets::box_domain(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let (v, _) = volume_integral(&b, &spec(1), |x| Ok(x[0] * x[0])).unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-14, "{v}");

    // ∫ (1 - |x|^2) over the unit disk = π/2 (polar antiderivative).
    let (v, _) = volume_integral(&unit_disk(), &spec(2), |x| {
        Ok(1.0 - x[0] * x[0] - x[1] * x[1])
    })
    .unwrap();
    assert!((v - PI / 2.0).abs() < 1e-12, "{v}");

    // Ball volume = 4π/3.
    let ball = presets::ball3([0.0, 0.0, 0.0], 1.0).unwrap();
    let (v, _) = volume_integral(&ball, &spec(2), |_| Ok(1.0)).unwrap();
    assert!((v - 4.0 * PI / 3.0).abs() < 1e-10, "{v}");
}

#[test]
fn boundary_examples() {
    // ∮ 1 over the unit circle = 2π.
    let (v, _) = boundary_integral(&unit_disk(), &spec(2), |_, _| Ok(1.0)).unwrap();
    assert!((v - 2.0 * PI).abs() < 1e-10, "{v}");

    // ∮ <x, ν> = ∫ div x = 2 · area = 2π (divergence-theorem oracle).
    let (v, _) = boundary_integral(&unit_disk(), &spec(2), |x, nu| {
        Ok(x[0] * nu[0] + x[1] * nu[1])
    })
    .unwrap();
    assert!((v - 2.0 * PI).abs() < 1e-10, "{v}");

    // ∮ <T(x), ν> with σ = (1,2): div T = q = 3, so 3 · area = 3π.
    let (v, _) = boundary_integral(&unit_disk(), &spec(2), |x, nu| {
        Ok(x[0] * nu[0] + 2.0 * x[1] * nu[1])
    })
    .unwrap();
    assert!((v - 3.0 * PI).abs() < 1e-10, "{v}");

    // Sphere area = 4π.
    let ball = presets::ball3([0.0, 0.0, 0.0], 1.0).unwrap();
    let (v, _) = boundary_integral(&ball, &spec(2), |_, _| Ok(1.0)).unwrap();
    assert!((v - 4.0 * PI).abs() < 1e-10, "{v}");
}

#[test]
fn outward_normal_examples() {
    // Unit circle at θ = 0.
    let n = outward_normal(&unit_disk(), &[0.0]).unwrap();
    assert!((n[0] - 1.0).abs() < 1e-14 && n[1].abs() < 1e-14);

    // Box [0,1]^2 on the face x1 = 1.
    let b = presets::box_domain(vec![(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let n = outward_normal(&b, &[1.0, 0.5]).unwrap();
    assert_eq!(n, vec![1.0, 0.0]);
    assert!(outward_normal(&b, &[0.5, 0.5]).is_err());

    // Ellipse (a,b) = (2,1) at θ = π/2: oracle is the gradient of the
    // implicit form x1²/4 + x2² - 1, i.e. (0, 2y) -> (0, 1).
    let e = presets::ellipse(2.0, 1.0, [0.0, 0.0]).unwrap();
    let n = outward_normal(&e, &[PI / 2.0]).unwrap();
    assert!(n[0].abs() < 1e-12 && (n[1] - 1.0).abs() < 1e-12, "{n:?}");

    // Normals are unit vectors at every quadrature node.
    for dom in [
        unit_disk(),
        e,
        presets::ball3([0.5, 0.0, -0.25], 2.0).unwrap(),
    ] {
        for node in boundary_nodes(&dom, 1).unwrap() {
            let len: f64 = node.normal.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((len - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn pole_of_sphere_is_degenerate() {
    let ball = presets::ball3([0.0, 0.0, 0.0], 1.0).unwrap();
    assert!(matches!(
        outward_normal(&ball, &[0.0, 0.0]),
        Err(GeometryError::DegenerateTangent { .. })
    ));
}

#[test]
fn domain_validation() {
    // Non-positive radius.
    let r = Expr::var(Var::Param(0)).cos();
    assert!(Domain::new_radial_star_2d(r, [0.0, 0.0]).is_err());
    // Non-periodic radius.
    let r = Expr::var(Var::Param(0)).add(&Expr::one());
    assert!(Domain::new_radial_star_2d(r, [0.0, 0.0]).is_err());
    // Wobbly but valid boundary: r = 1 + cos(3θ)/5.
    let r = Expr::var(Var::Param(0))
        .scale(&rat_int(3))
        .cos()
        .scale(&rat(1, 5))
        .add(&Expr::one());
    assert!(Domain::new_radial_star_2d(r, [0.0, 0.0]).is_ok());

    assert!(presets::box_domain(vec![(0.0, 1.0)]).is_err());
    assert!(presets::box_domain(vec![(1.0, 0.0), (0.0, 1.0)]).is_err());
    assert!(QuadratureSpec::new(0).is_err());
}

#[test]
fn divergence_theorem_closure_on_all_kinds() {
    // |∫ div V - ∮ <V, ν>| <= 10 · (error estimate) for polynomial fields.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let domains = [
        presets::box_domain(vec![(-1.0, 1.5), (0.0, 2.0)]).unwrap(),
        presets::ellipse(1.5, 0.75, [0.25, -0.5]).unwrap(),
        presets::ball3([0.0, 0.5, 0.0], 1.25).unwrap(),
    ];
    for dom in &domains {
        let n = dom.dim();
        for _ in 0..3 {
            let comps: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            // V_i = c0 + c1 x1 + c2 x2 (+ c3 x3) + c4 x1^2 + c5 x1 x2
            let field = |x: &[f64], c: &[f64]| {
                let mut v =
                    c[0] + c[1] * x[0] + c[2] * x[1] + c[4] * x[0] * x[0] + c[5] * x[0] * x[1];
                if n == 3 {
                    v += c[3] * x[2];
                }
                v
            };
            let div = |x: &[f64]| {
                // d/dx1 of V_1 + d/dx2 of V_2 (+ d/dx3 of V_3)
                let d1 = comps[0][1] + 2.0 * comps[0][4] * x[0] + comps[0][5] * x[1];
                let d2 = comps[1][2] + comps[1][5] * x[0];
                let d3 = if n == 3 { comps[2][3] } else { 0.0 };
                d1 + d2 + d3
            };
            let sp = spec(3);
            let (vol, e1) = volume_integral(dom, &sp, |x| Ok(div(x))).unwrap();
            let (sur, e2) = boundary_integral(dom, &sp, |x, nu| {
                Ok((0..n).map(|i| field(x, &comps[i]) * nu[i]).sum())
            })
            .unwrap();
            let defect = (vol - sur).abs();
            assert!(
                defect <= 10.0 * (e1 + e2) + 1e-10,
                "defect {defect} vs estimates {e1} {e2}"
            );
        }
    }
}

#[test]
fn refinement_improves_error_estimate() {
    // Smooth non-polynomial integrand: the estimate at least halves per level.
    let dom = unit_disk();
    let f = |x: &[f64]| Ok((x[0] * 1.3 + 0.7 * x[1]).exp());
    let mut prev = f64::INFINITY;
    for level in 1..=3 {
        let (_, err) = volume_integral(&dom, &spec(level), f).unwrap();
        let floor = 1e-15;
        assert!(
            err <= prev / 2.0 || err < floor,
            "level {level}: {err} vs prev {prev}"
        );
        prev = err.max(floor);
    }
}

#[test]
fn star_shapedness_examples() {
    let d12 = DilationFamily::new(vec![1, 2]).unwrap();
    let iso2 = DilationFamily::isotropic(2);

    // Origin-centered disk passes for any dilation.
    let rep = check_star_shaped(&unit_disk(), &d12, 2048).unwrap();
    assert!(rep.pass, "{rep:?}");

    // Disk centered at (3, 0) with σ = (1,2) fails with a stored witness.
    let far = presets::disk([3.0, 0.0], 1.0).unwrap();
    let rep = check_star_shaped(&far, &d12, 2048).unwrap();
    assert!(!rep.pass);
    assert!(rep.min_pairing < -0.5);
    assert!(
        rep.argmin[0] < 3.0,
        "witness on the near side: {:?}",
        rep.argmin
    );

    // Box [-1,1]^2 with isotropic dilations passes (facewise sign check).
    let b = presets::box_domain(vec![(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
    assert!(check_star_shaped(&b, &iso2, 2048).unwrap().pass);

    // Ball about the origin passes for σ = (1,1,2).
    let ball = presets::ball3([0.0, 0.0, 0.0], 1.0).unwrap();
    let d112 = DilationFamily::new(vec![1, 1, 2]).unwrap();
    assert!(check_star_shaped(&ball, &d112, 2048).unwrap().pass);
}
