use super::presets::{bony, euclidean, grushin};
use super::*;
use crate::expr::rat;

fn x(i: u32) -> Expr {
    Expr::x(i)
}

#[test]
fn apply_field_examples() {
    // X2 = x1 ∂_{x2} applied to x2^2 -> 2 x1 x2
    let f = VectorField::new(vec![Expr::zero(), x(1)]).unwrap();
    assert_eq!(f.apply(&x(2).powi(2)), x(1).mul(&x(2)).scale(&rat_int(2)));

    // T = x1 ∂_1 + 2 x2 ∂_2 applied to x1^2 x2 -> 4 x1^2 x2 (Euler relation)
    let d = DilationFamily::new(vec![1, 2]).unwrap();
    let u = x(1).powi(2).mul(&x(2));
    assert_eq!(d.generator().apply(&u), u.scale(&rat_int(4)));

    // Bony X2 applied to x3 in R^3 -> x1^2/2
    let (b, _) = bony(3);
    assert_eq!(b[1].apply(&x(3)), x(1).powi(2).scale(&rat(1, 2)));
}

#[test]
fn bracket_examples() {
    // Commuting partials.
    let (e, _) = euclidean(2);
    assert!(lie_bracket(&e[0], &e[1]).is_zero());

    // Grushin k=1: [∂_y, y ∂_t] = ∂_t.
    let (g, _) = grushin(1, 1, 1);
    let b = lie_bracket(&g[0], &g[1]);
    assert_eq!(b, VectorField::partial(2, 2));

    // Bony R^3: [X1, X2] = ∂_2 + x1 ∂_3, then [X1, [X1, X2]] = ∂_3.
    let (bf, _) = bony(3);
    let y1 = lie_bracket(&bf[0], &bf[1]);
    let expected = VectorField::new(vec![Expr::zero(), Expr::one(), x(1)]).unwrap();
    assert_eq!(y1, expected);
    assert_eq!(lie_bracket(&bf[0], &y1), VectorField::partial(3, 3));
}

#[test]
fn grushin_iterated_bracket_is_k_factorial() {
    for k in 1..=3u32 {
        let (g, _) = grushin(1, 1, k);
        let mut w = g[1].clone();
        for _ in 0..k {
            w = lie_bracket(&g[0], &w);
        }
        let mut fact = 1i64;
        for i in 2..=i64::from(k) {
            fact *= i;
        }
        assert_eq!(w, VectorField::partial(2, 2).scale(&rat_int(fact)));
    }
}

/// Direct numeric check of the vector homogeneity identity
/// `δ_λ(Y(x)) = λ^α Y(δ_λ(x))` at sample points.
fn vector_homogeneity_holds(y: &VectorField, sigma: &[u32], alpha: f64) -> bool {
    let pts: [[f64; 2]; 3] = [[0.7, -0.4], [1.3, 0.2], [-0.5, 0.9]];
    let lambdas: [f64; 3] = [0.5, 2.0, 3.7];
    for p in pts {
        for lam in lambdas {
            let bind = |v: &Var| match v {
                Var::X(i) => Some(p[*i as usize - 1]),
                _ => None,
            };
            let scaled: Vec<f64> = p
                .iter()
                .zip(sigma)
                .map(|(xi, s)| lam.powi(*s as i32) * xi)
                .collect();
            let bind_scaled = |v: &Var| match v {
                Var::X(i) => Some(scaled[*i as usize - 1]),
                _ => None,
            };
            for (i, c) in y.coeffs().iter().enumerate() {
                let lhs = lam.powi(sigma[i] as i32) * c.eval_f64(&bind).unwrap();
                let rhs = lam.powf(alpha) * c.eval_f64(&bind_scaled).unwrap();
                if (lhs - rhs).abs() > 1e-9 * (1.0 + lhs.abs()) {
                    return false;
                }
            }
        }
    }
    true
}

#[test]
fn homogeneity_degree_examples() {
    // Euclidean partials have degree 1 under the isotropic dilation.
    let (e, d) = euclidean(3);
    for f in &e {
        assert_eq!(homogeneity_degree(f, &d), Homogeneity::Degree(rat_int(1)));
    }

    // ∂_{t} under the Grushin dilation has degree k+1; oracle first.
    for k in 1..=3u32 {
        let (_, d) = grushin(1, 1, k);
        let dt = VectorField::partial(2, 2);
        assert!(vector_homogeneity_holds(&dt, d.sigma(), f64::from(k + 1)));
        assert!(!vector_homogeneity_holds(&dt, d.sigma(), f64::from(k)));
        assert_eq!(
            homogeneity_degree(&dt, &d),
            Homogeneity::Degree(rat_int(i64::from(k + 1)))
        );
    }

    // T itself has degree 0.
    let d = DilationFamily::new(vec![1, 2]).unwrap();
    assert_eq!(
        homogeneity_degree(&d.generator(), &d),
        Homogeneity::Degree(rat_int(0))
    );

    // Both routes agree on every preset generator.
    for (family, d) in [euclidean(3), grushin(2, 1, 2), bony(4)] {
        for f in &family {
            assert_eq!(
                degree_via_coefficients(f, &d),
                degree_via_generator_bracket(f, &d)
            );
        }
    }
}

#[test]
fn h1_examples() {
    let (e, d) = euclidean(3);
    assert!(check_h1(&e, &d).pass);

    let (b, d) = bony(3);
    let rep = check_h1(&b, &d);
    assert!(rep.pass);
    assert!(rep.pyramid_shaped);

    // {∂_1, x1 ∂_2} with isotropic sigma: the second field has degree 0.
    let family = vec![
        VectorField::partial(2, 1),
        VectorField::new(vec![Expr::zero(), x(1)]).unwrap(),
    ];
    let rep = check_h1(&family, &DilationFamily::isotropic(2));
    assert!(!rep.pass);
    assert_eq!(rep.offenders, vec![1]);
    assert_eq!(rep.degrees[1].as_deref(), Some("0"));

    // Linear dependence is detected.
    let dep = vec![
        VectorField::partial(2, 1),
        VectorField::partial(2, 1).scale(&rat_int(3)),
    ];
    assert!(!check_h1(&dep, &DilationFamily::isotropic(2)).linearly_independent);
}

#[test]
fn lie_basis_grushin_k2() {
    // n1 = n2 = 1, k = 2: {∂_y, y^2 ∂_t, 2y ∂_t, 2 ∂_t}.
    let (g, d) = grushin(1, 1, 2);
    let rep = generate_lie_basis(&g, &d, None).unwrap();
    let fields: Vec<&VectorField> = rep.fields.iter().map(|f| &f.field).collect();
    assert_eq!(fields.len(), 4);
    let y2dt = VectorField::new(vec![Expr::zero(), x(1).powi(2)]).unwrap();
    let two_y_dt = VectorField::new(vec![Expr::zero(), x(1).scale(&rat_int(2))]).unwrap();
    let two_dt = VectorField::partial(2, 2).scale(&rat_int(2));
    assert!(fields.contains(&&y2dt));
    assert!(fields.contains(&&two_y_dt));
    assert!(fields.contains(&&two_dt));
    assert_eq!(rep.rank_at_origin, 2);
    // Degrees equal bracket length for degree-1 generators.
    for f in &rep.fields {
        assert_eq!(f.degree.as_deref(), Some(f.length.to_string().as_str()));
    }
}

#[test]
fn lie_basis_bony_adds_the_higher_directions() {
    let (b, d) = bony(3);
    let rep = generate_lie_basis(&b, &d, None).unwrap();
    let y1 = VectorField::new(vec![Expr::zero(), Expr::one(), x(1)]).unwrap();
    let y2 = VectorField::partial(3, 3);
    assert!(rep.fields.iter().any(|f| f.field == y1));
    assert!(rep.fields.iter().any(|f| f.field == y2));
    assert_eq!(rep.rank_at_origin, 3);
}

#[test]
fn step_cap_guard() {
    let (g, d) = grushin(1, 1, 1);
    assert!(matches!(
        generate_lie_basis(&g, &d, Some(13)),
        Err(FieldsError::StepCapExceeded { .. })
    ));
}

#[test]
fn h2_examples() {
    let (e, d) = euclidean(3);
    assert!(check_h2(&e, &d, &RankPoint::Origin).unwrap().pass);

    // A single partial in R^2 has rank 1.
    let family = vec![VectorField::partial(2, 1)];
    let rep = check_h2(&family, &DilationFamily::isotropic(2), &RankPoint::Origin).unwrap();
    assert_eq!(rep.rank, 1);
    assert!(!rep.pass);

    let (b, d) = bony(3);
    assert!(check_h2(&b, &d, &RankPoint::Origin).unwrap().pass);

    // Rank away from the origin: exact at rational points, float otherwise.
    let p = vec![rat(1, 2), rat(-1, 3), rat(2, 1)];
    let rep = check_h2(&b, &d, &RankPoint::Rational(p)).unwrap();
    assert!(rep.pass && rep.exact);
    let rep = check_h2(&b, &d, &RankPoint::Float(vec![0.3, 1.7, -0.2])).unwrap();
    assert!(rep.pass && !rep.exact);
}

#[test]
fn generator_and_dimension_examples() {
    let d = DilationFamily::isotropic(2);
    let t = d.generator();
    assert_eq!(t, VectorField::new(vec![x(1), x(2)]).unwrap());

    let (_, d) = grushin(1, 1, 1);
    assert_eq!(
        d.generator(),
        VectorField::new(vec![x(1), x(2).scale(&rat_int(2))]).unwrap()
    );

    // div T = q, exactly.
    let (_, d) = bony(3);
    assert_eq!(d.generator().divergence(), Expr::from_int(6));
    assert_eq!(d.homogeneous_dimension(), 6);

    assert_eq!(euclidean(4).1.homogeneous_dimension(), 4);
    for (n1, n2, k) in [(1, 1, 1), (2, 1, 3), (1, 2, 2)] {
        let q = grushin(n1, n2, k).1.homogeneous_dimension();
        assert_eq!(q, (n1 as u64) + u64::from(k + 1) * (n2 as u64));
    }
    for n in 2..=5usize {
        assert_eq!(bony(n).1.homogeneous_dimension(), (n * (n + 1) / 2) as u64);
    }
}

#[test]
fn dilation_validation() {
    assert!(DilationFamily::new(vec![2, 1]).is_err());
    assert!(DilationFamily::new(vec![1, 3, 2]).is_err());
    assert!(DilationFamily::new(vec![]).is_err());
    assert!(DilationFamily::new(vec![1, 1, 4]).is_ok());
}

#[test]
fn pyramid_shape_of_h1_families() {
    for (family, d) in [euclidean(3), grushin(2, 2, 2), bony(4)] {
        assert!(check_h1(&family, &d).pass);
        for f in &family {
            assert!(f.is_pyramid());
        }
    }
    // x2 ∂_{x1} is not pyramid-shaped.
    let f = VectorField::new(vec![x(2), Expr::zero()]).unwrap();
    assert!(!f.is_pyramid());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn poly3() -> impl Strategy<Value = Expr> {
        prop::collection::vec(((0u32..2, 0u32..2, 0u32..2), -3i64..=3), 0..3).prop_map(|ms| {
            let mut e = Expr::zero();
            for ((e1, e2, e3), c) in ms {
                e = e.add(
                    &Expr::x(1)
                        .powi(e1)
                        .mul(&Expr::x(2).powi(e2))
                        .mul(&Expr::x(3).powi(e3))
                        .scale(&rat_int(c)),
                );
            }
            e
        })
    }

    fn field3() -> impl Strategy<Value = VectorField> {
        (poly3(), poly3(), poly3()).prop_map(|(a, b, c)| VectorField::new(vec![a, b, c]).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bracket_antisymmetry(y in field3(), z in field3()) {
            let ab = lie_bracket(&y, &z);
            let ba = lie_bracket(&z, &y);
            prop_assert_eq!(ab, ba.scale(&rat_int(-1)));
        }

        #[test]
        fn jacobi_identity(a in field3(), b in field3(), c in field3()) {
            let j = lie_bracket(&a, &lie_bracket(&b, &c))
                .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
                .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
            prop_assert!(j.is_zero());
        }

        #[test]
        fn euler_relation_on_homogeneous_monomials(
            e1 in 0u32..4, e2 in 0u32..4, e3 in 0u32..4, c in 1i64..5
        ) {
            // T u = m u for a monomial of sigma-weighted degree m.
            let d = DilationFamily::new(vec![1, 2, 3]).unwrap();
            let u = Expr::x(1).powi(e1).mul(&Expr::x(2).powi(e2))
                .mul(&Expr::x(3).powi(e3)).scale(&rat_int(c));
            let m = i64::from(e1) + 2 * i64::from(e2) + 3 * i64::from(e3);
            prop_assert_eq!(d.generator().apply(&u), u.scale(&rat_int(m)));
        }
    }

    #[test]
    fn bracket_degrees_add() {
        // [Y, Z] homogeneous of degree α+β when Y, Z are of degrees α, β.
        let (b, d) = bony(4);
        let y1 = lie_bracket(&b[0], &b[1]); // degree 2
        let y2 = lie_bracket(&b[0], &y1); // degree 3
        assert_eq!(homogeneity_degree(&y1, &d), Homogeneity::Degree(rat_int(2)));
        assert_eq!(homogeneity_degree(&y2, &d), Homogeneity::Degree(rat_int(3)));
        let yz = lie_bracket(&y1, &y2);
        if !yz.is_zero() {
            assert_eq!(homogeneity_degree(&yz, &d), Homogeneity::Degree(rat_int(5)));
        }
    }
}
