use super::*;
use crate::expr::rat;
use crate::fields::presets::{bony, euclidean, grushin};

fn x(i: u32) -> Expr {
    Expr::x(i)
}

#[test]
fn x_gradient_examples() {
    // Euclidean: ∇_X u = ∇u; u = x1 x2 -> (x2, x1).
    let (e, _) = euclidean(2);
    let u = x(1).mul(&x(2));
    assert_eq!(x_gradient(&e, &u), vec![x(2), x(1)]);

    // Grushin (1,1,1), u = t -> (0, y).
    let (g, _) = grushin(1, 1, 1);
    assert_eq!(x_gradient(&g, &x(2)), vec![Expr::zero(), x(1)]);

    // Bony R^3, u = x3 -> (0, x1^2/2); oracle is apply_field itself.
    let (b, _) = bony(3);
    assert_eq!(
        x_gradient(&b, &x(3)),
        vec![Expr::zero(), x(1).powi(2).scale(&rat(1, 2))]
    );
}

#[test]
fn x_divergence_examples() {
    let (e, _) = euclidean(2);
    // div_X (x1, x2) = -2 (the sign is part of the definition).
    assert_eq!(x_divergence(&e, &[x(1), x(2)]), Expr::from_int(-2));

    // F = ∇_X u for quadratic u recovers Δ_X u = -Δu.
    let u = x(1).powi(2).add(&x(1).mul(&x(2)));
    let lap = x_divergence(&e, &x_gradient(&e, &u));
    assert_eq!(lap, Expr::from_int(-2));

    assert_eq!(
        x_divergence(&e, &[Expr::zero(), Expr::zero()]),
        Expr::zero()
    );
}

#[test]
fn grushin_sub_laplacian_formula() {
    // Δ_X u = -Δ_y u - (y1^{2k} + ... + y_{n1}^{2k}) Δ_t u, checked exactly
    // against an independent assembly for n1 = n2 = 2, k = 1.
    let (g, _) = grushin(2, 2, 1);
    let u = x(1)
        .powi(2)
        .mul(&x(3))
        .add(&x(2).mul(&x(4)).mul(&x(3)))
        .add(&x(4).powi(3));
    let lhs = sub_laplacian(&g, &u);
    let mut rhs = Expr::zero();
    for i in [1u32, 2] {
        rhs = rhs.sub(&u.differentiate(Var::X(i)).differentiate(Var::X(i)));
    }
    let weight = x(1).powi(2).add(&x(2).powi(2));
    for j in [3u32, 4] {
        let dtt = u.differentiate(Var::X(j)).differentiate(Var::X(j));
        rhs = rhs.sub(&weight.mul(&dtt));
    }
    assert_eq!(lhs, rhs);
}

#[test]
fn x_hessian_examples() {
    // Euclidean Hessian of x1 x2 is the ordinary symmetric one.
    let (e, _) = euclidean(2);
    let h = x_hessian(&e, &x(1).mul(&x(2)));
    assert_eq!(h[0][0], Expr::zero());
    assert_eq!(h[0][1], Expr::one());
    assert_eq!(h[1][0], Expr::one());
    assert_eq!(h[1][1], Expr::zero());

    // Grushin (1,1,1), u = y t: X2(X1 u) = y but X1(X2 u) = 2y.
    let (g, _) = grushin(1, 1, 1);
    let u = x(1).mul(&x(2));
    let h = x_hessian(&g, &u);
    assert_eq!(h[0][1], x(1)); // entry (1,2) = X2(X1 u)
    assert_eq!(h[1][0], x(1).scale(&rat_int(2))); // entry (2,1) = X1(X2 u)
    assert_ne!(h[0][1], h[1][0]);
}

#[test]
fn hessian_trace_is_sub_laplacian() {
    // -Σ_i (H_X u)_{ii} = Δ_X u on a small random suite, exactly.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let (g, _) = grushin(1, 1, 2);
    for _ in 0..10 {
        let mut u = Expr::zero();
        for _ in 0..4 {
            let e1 = rng.gen_range(0..3u32);
            let e2 = rng.gen_range(0..3u32);
            let c = rng.gen_range(-4i64..=4);
            u = u.add(&x(1).powi(e1).mul(&x(2).powi(e2)).scale(&rat_int(c)));
        }
        let h = x_hessian(&g, &u);
        let mut tr = Expr::zero();
        for (i, row) in h.iter().enumerate() {
            tr = tr.add(&row[i]);
        }
        assert_eq!(tr.neg(), sub_laplacian(&g, &u));
    }
}

#[test]
fn hessian_commutator_consistency() {
    // X_j(X_i u) - X_i(X_j u) = [X_j, X_i] u, exactly.
    let (b, _) = bony(3);
    let u = x(1).powi(2).mul(&x(2)).add(&x(3).powi(2));
    let h = x_hessian(&b, &u);
    for i in 0..2 {
        for j in 0..2 {
            let lhs = h[i][j].sub(&h[j][i]); // X_j(X_i u) - X_i(X_j u)
            let rhs = crate::fields::lie_bracket(&b[j], &b[i]).apply(&u);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn k_laplacian_examples() {
    let (e2, _) = euclidean(2);
    // k = 2 is exactly -Δ: u = x1^2 -> -2.
    let lap = horizontal_k_laplacian(&e2, &x(1).powi(2), &rat_int(2)).unwrap();
    assert_eq!(lap, Expr::from_int(-2));

    // Constants map to zero.
    assert_eq!(
        horizontal_k_laplacian(&e2, &Expr::from_int(5), &rat(7, 2)).unwrap(),
        Expr::zero()
    );

    // n = 2, k = 4, u = x1: |∇u|^2 ∇u = (1, 0), divergence 0.
    assert_eq!(
        horizontal_k_laplacian(&e2, &x(1), &rat_int(4)).unwrap(),
        Expr::zero()
    );

    assert!(horizontal_k_laplacian(&e2, &x(1), &rat_int(1)).is_err());
}

#[test]
fn k2_degeneration_is_exact() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (g, _) = grushin(1, 1, 1);
    for _ in 0..10 {
        let mut u = Expr::zero();
        for _ in 0..3 {
            let e1 = rng.gen_range(0..4u32);
            let e2 = rng.gen_range(0..3u32);
            let c = rng.gen_range(-5i64..=5);
            u = u.add(&x(1).powi(e1).mul(&x(2).powi(e2)).scale(&rat_int(c)));
        }
        assert_eq!(
            horizontal_k_laplacian(&g, &u, &rat_int(2)).unwrap(),
            sub_laplacian(&g, &u)
        );
    }
}

#[test]
fn euler_lagrange_1_examples() {
    // F = |p|^2/2, Euclidean, u harmonic -> residual 0.
    let (e, _) = euclidean(2);
    let f1 = Functional1::p_norm_minus_g(2, 2, rat_int(2), GSpec::Zero).unwrap();
    let u = x(1).powi(2).sub(&x(2).powi(2));
    assert_eq!(euler_lagrange_1(&f1, &e, &u), Expr::zero());

    // Grushin (1,1,1), F = |p|^2/2, u = y t: X1^2 u = 0 and X2^2 u = 0.
    let (g, _) = grushin(1, 1, 1);
    let u = x(1).mul(&x(2));
    assert_eq!(euler_lagrange_1(&f1, &g, &u), Expr::zero());
}

#[test]
fn el1_matches_k_laplacian_preset() {
    // F = |p|^k/k - G(z)  =>  residual = Δ_{X,k} u - G'(u);
    // F = |p|^k/k + G(z)  =>  residual = Δ_{X,k} u + G'(u).
    let (g, _) = grushin(1, 1, 1);
    let k = rat_int(4);
    let u = x(1).powi(2).add(&x(2));
    let gz = GSpec::Power { s: 3 };
    let gprime_u = gz.expr().differentiate(Var::Z).substitute(&|v: &Var| {
        if *v == Var::Z {
            Some(u.clone())
        } else {
            None
        }
    });
    let lap_k = horizontal_k_laplacian(&g, &u, &k).unwrap();

    let f_minus = Functional1::p_norm_minus_g(2, 2, k.clone(), gz.clone()).unwrap();
    assert_eq!(euler_lagrange_1(&f_minus, &g, &u), lap_k.sub(&gprime_u));

    let p = [Expr::var(Var::P(1)), Expr::var(Var::P(2))];
    let f_plus = Functional1::new(
        2,
        2,
        Expr::norm_pow(&p, &k).scale(&rat(1, 4)).add(&gz.expr()),
    )
    .unwrap();
    assert_eq!(euler_lagrange_1(&f_plus, &g, &u), lap_k.add(&gprime_u));
}

#[test]
fn euler_lagrange_2_examples() {
    // F = (Σ r_ii)^2/2 - G(z): residual = Δ_X² u - G'(u).
    let (e, _) = euclidean(2);
    let f2 = Functional2::horizontal_biharmonic(2, 2, GSpec::Zero).unwrap();

    // u ≡ 0 with G'(0) = 0.
    assert_eq!(euler_lagrange_2(&f2, &e, &Expr::zero()), Expr::zero());

    // Euclidean biharmonic polynomial: Δ²(x1³ + x2³) = 0.
    let u = x(1).powi(3).add(&x(2).powi(3));
    assert_eq!(euler_lagrange_2(&f2, &e, &u), Expr::zero());

    // Against the composed sub-Laplacian, exactly, including a nonlinearity.
    let (g, _) = grushin(1, 1, 1);
    let gz = GSpec::Power { s: 2 };
    let f2 = Functional2::horizontal_biharmonic(2, 2, gz.clone()).unwrap();
    let u = x(1).powi(4).add(&x(1).mul(&x(2)));
    let expected = sub_laplacian(&g, &sub_laplacian(&g, &u)).sub(&u); // G'(u) = u
    assert_eq!(euler_lagrange_2(&f2, &g, &u), expected);
}

#[test]
fn t_action_examples() {
    let d = DilationFamily::new(vec![1, 2]).unwrap();
    assert_eq!(
        t_action(&d, &x(1).add(&x(2))),
        x(1).add(&x(2).scale(&rat_int(2)))
    );
    // Grushin u = y^2 t with sigma = (1,2): degree 4.
    let u = x(1).powi(2).mul(&x(2));
    assert_eq!(t_action(&d, &u), u.scale(&rat_int(4)));
}

#[test]
fn functional_arity_is_validated() {
    assert!(Functional1::new(2, 1, Expr::var(Var::P(2))).is_err());
    assert!(Functional1::new(1, 1, x(2)).is_err());
    assert!(Functional2::new(2, 2, Expr::var(Var::R(3, 1))).is_err());
    // r slots are rejected in first-order functionals.
    assert!(Functional1::new(2, 2, Expr::var(Var::R(1, 1))).is_err());
}

#[test]
fn functional_caches_are_exact_derivatives() {
    let f = Expr::var(Var::Z)
        .powi(2)
        .mul(&x(1))
        .add(&Expr::var(Var::P(1)).mul(&Expr::var(Var::P(2))));
    let f1 = Functional1::new(2, 2, f.clone()).unwrap();
    assert_eq!(f1.f_z, f.differentiate(Var::Z));
    assert_eq!(f1.f_x[0], f.differentiate(Var::X(1)));
    assert_eq!(f1.f_p[1], f.differentiate(Var::P(2)));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn poly2() -> impl Strategy<Value = Expr> {
        prop::collection::vec(((0u32..3, 0u32..3), -4i64..=4), 0..4).prop_map(|ms| {
            let mut e = Expr::zero();
            for ((e1, e2), c) in ms {
                e = e.add(
                    &Expr::x(1)
                        .powi(e1)
                        .mul(&Expr::x(2).powi(e2))
                        .scale(&rat_int(c)),
                );
            }
            e
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn field_product_rule(u in poly2(), v in poly2()) {
            let (g, _) = grushin(1, 1, 2);
            for xi in &g {
                let lhs = xi.apply(&u.mul(&v));
                let rhs = u.mul(&xi.apply(&v)).add(&v.mul(&xi.apply(&u)));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn order2_reduces_to_order1_when_r_free(u in poly2()) {
            // An r-independent F fed to the order-2 residual gives exactly
            // the order-1 residual.
            let (g, _) = grushin(1, 1, 1);
            let fexpr = Expr::var(Var::Z).powi(2)
                .add(&Expr::var(Var::P(1)).mul(&Expr::var(Var::P(2))));
            let f1 = Functional1::new(2, 2, fexpr.clone()).unwrap();
            let f2 = Functional2::new(2, 2, fexpr).unwrap();
            prop_assert_eq!(
                euler_lagrange_1(&f1, &g, &u),
                euler_lagrange_2(&f2, &g, &u)
            );
        }
    }
}
