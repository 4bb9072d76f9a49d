use radflow::expr::*;

fn p(s: &str) -> Expr {
    Parser::new().parse(s).unwrap()
}

#[test]
fn product_rule_and_jets() {
    let e = d_r(&(&Expr::rho() * &Expr::u()));
    assert_eq!(e, p("diff(rho,r)*U + rho*diff(U,r)"));
    assert_eq!(d_t(&Expr::s()), Expr::jet(Field::S, 1, 0));
}

#[test]
fn chain_rule_through_opaque_function() {
    let e = p("kappa(S)*rho^(1+q)");
    let want = p("kappa[1](S)*diff(S,r)*rho^(1+q) + (1+q)*kappa(S)*rho^q*diff(rho,r)");
    assert_eq!(d_r(&e), want);
    assert!(cross_check_zero(&(&d_r(&e) - &want)));
}

#[test]
fn normalization_examples() {
    assert!(p("U + S - S - U").is_zero());
    assert!(p("diff(r^(1-n),r)*r^(n-1) + (n-1)/r").is_zero());
    assert!(p("diff(rho*U,r) - diff(rho,r)*U - rho*diff(U,r)").is_zero());
}

#[test]
fn syntax_error_position() {
    match Parser::new().parse("2+*3") {
        Err(ExprError::Syntax { pos, .. }) => assert_eq!(pos, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        Parser::new().parse("foo + 1"),
        Err(ExprError::UnknownIdentifier { .. })
    ));
}

#[test]
fn print_round_trip() {
    for s in [
        "kappa(S)*rho^(1+q)",
        "diff(S,r)/(rho*r^(n-1))",
        "exp(S)*ln(rho) - 2/3*sqrt(U^2 + r*rho)",
        "f[1,2](S, diff(S,r)/rho) + 1/(U + rho)",
        "rho^(1+2/n) + (U^2+1)^(-1/2)",
    ] {
        let e = p(s);
        let back = p(&e.to_string());
        assert_eq!(e, back, "{s} -> {e}");
    }
}

#[test]
fn euler_operator_examples() {
    let w = p("r^(n-1)");
    let e = euler_operator(&(&w * &p("rho*U^2/2")), Field::U).unwrap();
    assert_eq!(e, p("r^(n-1)*rho*U"));
    let e = euler_operator(&(&w * &p("rho*S")), Field::Rho).unwrap();
    assert_eq!(e, p("r^(n-1)*S"));
    let x = p("U*diff(rho,r)^2*S + exp(diff(S,r,r))*U");
    assert!(euler_operator(&d_r(&x), Field::S).unwrap().is_zero());
    assert!(euler_operator(&d_r(&x), Field::Rho).unwrap().is_zero());
}

#[test]
fn restriction() {
    let ctx = SystemContext::fluid(Expr::sym("n"), p("kappa(S)*rho^(1+q)"));
    let rt = ctx.restrict(&Expr::jet(Field::Rho, 1, 0));
    assert_eq!(rt, p("-diff(U*rho,r) - (n-1)/r*U*rho"));
    let j1 = p("diff(S,r)/(rho*r^(n-1))");
    let adv = &d_t(&j1) + &(&Expr::u() * &d_r(&j1));
    assert!(ctx.restrict(&adv).is_zero());
}
