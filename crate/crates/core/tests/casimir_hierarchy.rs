use radflow::casimir::*;
use radflow::expr::{d_r, d_t, parse, Expr, Field, Restrictor};
use radflow::model::{evaluate_on_fields, Eos};

fn n() -> Expr {
    Expr::sym("n")
}

#[test]
fn recursion_operator_examples() {
    let j1 = recursion_apply(&Expr::s(), &n());
    assert_eq!(j1, parse("diff(S,r)/(rho*r^(n-1))").unwrap());
    assert!(recursion_apply(&Expr::int(7), &n()).is_zero());

    // n = 3, S = r², ρ = 1: J_2 at r = 1, against central differences of J_1.
    let j2 = j_scalar(2, &Expr::int(3));
    let fields = [Expr::zero(), Expr::one(), &Expr::r() * &Expr::r()];
    let v = evaluate_on_fields(&j2, &fields);
    let at1 = radflow::numeric::eval_pointwise(&v, 0.0, 1.0, [0.0, 1.0, 1.0], &[]);
    let j1 = |r: f64| 2.0 * r / (r * r);
    let h = 1e-5;
    let oracle = (j1(1.0 + h) - j1(1.0 - h)) / (2.0 * h);
    assert!((at1 - oracle).abs() < 1e-8);
    assert!((at1 + 2.0).abs() < 1e-12);
}

#[test]
fn hierarchy_is_advected_for_any_eos() {
    for eos in [Eos::general(), Eos::polytropic(Expr::sym("q")), Eos::entropic()] {
        let ctx = eos.context(&n());
        let mut r = Restrictor::new(&ctx);
        for l in 0..=3 {
            let j = j_scalar(l, &n());
            let adv = &d_t(&j) + &(&Expr::u() * &d_r(&j));
            assert!(r.restrict(&adv).is_zero(), "l = {l}");
        }
    }
}

#[test]
fn residual_examples() {
    let rs = &Expr::rho() * &Expr::s();
    assert!(casimir_residuals(&rs, &n()).unwrap().iter().all(Expr::is_zero));
    let j1 = j_scalar(1, &n());
    assert!(is_casimir(&(&Expr::rho() * &(&j1 * &j1)), &n()).unwrap());
    let [a, _] = casimir_residuals(&(&Expr::rho() * &Expr::u()), &n()).unwrap();
    let w = Expr::r().pow(&(&n() - &Expr::one())).unwrap();
    assert_eq!(a, &w * &Expr::rho());
}

#[test]
fn hierarchy_with_opaque_f_up_to_third_order() {
    let rep = verify_casimir_hierarchy(3, &n(), DEFAULT_NODE_BUDGET);
    assert!(rep.pass(), "{rep:?}");
    assert_eq!(rep.orders.len(), 4);
    let tiny = verify_casimir_hierarchy(3, &n(), 2);
    assert_eq!(tiny.budget_exceeded_at, Some(0));
    assert!(!tiny.pass());
}

#[test]
fn split_system_holds() {
    let base = split_system_check(0, 2).unwrap();
    assert!(base.iter().all(|s| s.holds));
    for k in 1..=2 {
        for s in split_system_check(k, 2).unwrap() {
            assert!(s.holds, "k = {k}, i = {}", s.i);
        }
    }
}

#[test]
fn entropic_first_scalar_is_not_a_casimir() {
    // J_(1,1) = U² + (2/n) r p_r/ρ with p = κ(S).
    let p = Expr::func("kappa", vec![Expr::s()]);
    let j11 = &(&Expr::u() * &Expr::u())
        + &(&(&(&Expr::int(2) / &n()) * &Expr::r()) * &(&d_r(&p) / &Expr::rho()));
    let [a, _] = casimir_residuals(&(&Expr::rho() * &j11), &n()).unwrap();
    assert!(!a.is_zero());
}

#[test]
fn first_order_classification() {
    let j1 = j_scalar(1, &n());
    let phi = &(&Expr::rho() * &Expr::s()) * &j1;
    assert_eq!(
        classify_first_order(&phi, &n()).unwrap(),
        FirstOrderVerdict::StatedForm { f: "J0*J1".into() }
    );
    // Mass plus a trivial density of the weighted functional.
    let iw = Expr::r().pow(&(&Expr::one() - &n())).unwrap();
    let trivial = &iw * &d_r(&(&iw * &Expr::s()));
    assert_eq!(
        classify_first_order(&(&Expr::rho() + &trivial), &n()).unwrap(),
        FirstOrderVerdict::EquivalentModuloTrivial
    );
    // D_r(r^(1-n)S) alone is not trivial for the weighted functional.
    let unweighted = d_r(&(&iw * &Expr::s()));
    assert!(matches!(
        classify_first_order(&(&Expr::rho() + &unweighted), &n()).unwrap(),
        FirstOrderVerdict::NotCasimir { first: false }
    ));
    let ru2 = &Expr::rho() * &(&Expr::u() * &Expr::u());
    assert_eq!(
        classify_first_order(&ru2, &n()).unwrap(),
        FirstOrderVerdict::NotCasimir { first: true }
    );
    let second = Expr::jet(Field::S, 0, 2);
    assert!(classify_first_order(&second, &n()).is_err());
}

#[test]
fn nontriviality_gate() {
    let f = parse_f("J0*J1^2", 1).unwrap();
    assert!(is_nontrivial_at_order(&f, 1));
    assert!(!is_nontrivial_at_order(&parse_f("J0^3*J1", 1).unwrap(), 1));
    let phi = instantiate_f(&f, 1, &n());
    assert!(is_casimir(&phi, &n()).unwrap());
}
