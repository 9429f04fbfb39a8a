//! Exact symbolic differentiation.

use super::{rat_int, Atom, Expr, Gen, Var};

pub(super) fn differentiate(e: &Expr, v: Var) -> Expr {
    let mut out = Expr::zero();
    for (m, c) in &e.terms {
        // Product rule over the factors of the monomial.
        for (i, (g, exp)) in m.factors.iter().enumerate() {
            let dg = diff_gen(g, v);
            if dg.is_zero_expr() {
                continue;
            }
            let mut rest = Expr::constant(c * rat_int(i64::from(*exp)));
            for (j, (gj, ej)) in m.factors.iter().enumerate() {
                let pow = if i == j { *ej - 1 } else { *ej };
                if pow == 0 {
                    continue;
                }
                rest = rest.mul(&gen_expr(gj).powi(pow));
            }
            out = out.add(&rest.mul(&dg));
        }
    }
    out
}

fn gen_expr(g: &Gen) -> Expr {
    match g {
        Gen::V(v) => Expr::var(*v),
        Gen::A(a) => Expr::single_atom((**a).clone()),
    }
}

fn diff_gen(g: &Gen, v: Var) -> Expr {
    match g {
        Gen::V(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Gen::A(a) => match &**a {
            Atom::Sin(u) => u.cos().mul(&u.differentiate(v)),
            Atom::Cos(u) => u.sin().neg().mul(&u.differentiate(v)),
            Atom::Exp(u) => u.exp().mul(&u.differentiate(v)),
            Atom::Log(u) => u.pow_rat(&rat_int(-1)).mul(&u.differentiate(v)),
            Atom::Pow(u, q) => {
                let du = u.differentiate(v);
                if du.is_zero_expr() {
                    return Expr::zero();
                }
                u.pow_rat(&(q - rat_int(1))).scale(q).mul(&du)
            }
        },
    }
}
