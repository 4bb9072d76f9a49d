use proptest::prelude::*;
use radflow::expr::random::{euler_identity_trials, small_jet_expr};
use radflow::expr::{
    d_r, d_t, euler_operator, euler_product_identities, euler_rel3_variant, higher_euler, Expr,
    Field, Q,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn jet_expr(max_order: u32) -> impl Strategy<Value = Expr> {
    any::<u64>().prop_map(move |s| small_jet_expr(&mut ChaCha8Rng::seed_from_u64(s), max_order))
}

/// Mixed-time jets so that `D_t` and `D_r` both act nontrivially.
fn spacetime_expr() -> impl Strategy<Value = Expr> {
    (jet_expr(2), 0u32..3, 0usize..3).prop_map(|(e, i, k)| {
        &(&e * &Expr::jet(Field::FLUID[k], i, 1)) + &Expr::t()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn euler_kills_total_derivatives(e in jet_expr(3)) {
        for f in Field::FLUID {
            prop_assert!(euler_operator(&d_r(&e), f).unwrap().is_zero());
        }
    }

    #[test]
    fn total_derivatives_commute(e in spacetime_expr()) {
        prop_assert!((&d_t(&d_r(&e)) - &d_r(&d_t(&e))).is_zero());
    }

    #[test]
    fn operators_are_linear(a in jet_expr(2), b in jet_expr(2), p in -5i64..5, q in 1i64..5) {
        let c = Q::new(p, q);
        let comb = &a.scale(c) + &b;
        prop_assert!((&d_r(&comb) - &(&d_r(&a).scale(c) + &d_r(&b))).is_zero());
        prop_assert!((&d_t(&comb) - &(&d_t(&a).scale(c) + &d_t(&b))).is_zero());
        for f in Field::FLUID {
            for i in 0..2 {
                let lhs = higher_euler(&comb, f, i).unwrap();
                let rhs = &higher_euler(&a, f, i).unwrap().scale(c) + &higher_euler(&b, f, i).unwrap();
                prop_assert!((&lhs - &rhs).is_zero());
            }
        }
    }

    #[test]
    fn print_parse_round_trip(e in jet_expr(2)) {
        let back = radflow::expr::parse(&e.to_string()).unwrap();
        prop_assert!((&back - &e).is_zero());
    }
}

#[test]
fn euler_product_identities_on_random_pairs() {
    let trials = euler_identity_trials(20_240_611, 25, 2).unwrap();
    assert_eq!(trials.len(), 25);
    for t in &trials {
        assert_eq!(t.holds, [true; 3], "a = {}, b = {}, v = {:?}", t.a, t.b, t.field);
    }
}

#[test]
fn third_identity_variant_fails_on_simplest_pair() {
    // a = 1, b = U leaves D_r^2 f(U_r).
    let res = euler_rel3_variant(&Expr::one(), &Expr::u(), Field::U, "f").unwrap();
    let fu = Expr::func("f", vec![Expr::jet(Field::U, 0, 1)]);
    assert!((&res - &d_r(&d_r(&fu))).is_zero());
    let ok = euler_product_identities(&Expr::one(), &Expr::u(), Field::U, "f").unwrap();
    assert!(ok.iter().all(Expr::is_zero));
}
