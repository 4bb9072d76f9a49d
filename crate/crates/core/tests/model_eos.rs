use radflow::expr::{cross_check_zero, parse, Expr, FuncDef};
use radflow::model::{
    euler_residuals, evaluate_on_fields, gas_equivalence_residual, Eos, EosKind,
};

fn n() -> Expr {
    Expr::sym("n")
}

#[test]
fn closed_form_internal_energies() {
    let poly = Eos::polytropic_critical(&n());
    let expect = parse("(n/2)*kappa(S)*rho^(2/n)").unwrap();
    assert!((poly.internal_energy() - &expect).is_zero());

    let ent = Eos::entropic();
    assert!((ent.internal_energy() + &parse("kappa(S)/rho").unwrap()).is_zero());

    let sq = Eos::custom(parse("rho^2").unwrap()).unwrap();
    assert!((sq.internal_energy() - &Expr::rho()).is_zero());

    let log = Eos::entropic_log(Expr::sym("k"));
    assert!(log.energy_identity().is_zero());
}

#[test]
fn opaque_energy_satisfies_identity() {
    for eos in [Eos::general(), Eos::separable(), Eos::scaled_power(Expr::sym("q")), Eos::log_form(Expr::sym("k"))] {
        assert!(eos.energy_identity().is_zero(), "{:?}", eos.kind);
    }
}

#[test]
fn membership_characterizations() {
    let q = Expr::sym("q");
    let k = Expr::sym("k");
    let poly = Eos::polytropic(q.clone());
    assert!(poly.belongs_to(&EosKind::Polytropic { q: q.clone() }));
    assert!(poly.belongs_to(&EosKind::Separable));
    assert!(poly.belongs_to(&EosKind::ScaledPower { q: q.clone() }));
    assert!(!poly.belongs_to(&EosKind::Additive));
    assert!(!poly.belongs_to(&EosKind::Barotropic));
    assert!(Eos::entropic_log(k.clone()).belongs_to(&EosKind::LogForm { k: k.clone() }));
    assert!(Eos::entropic_log(k.clone()).belongs_to(&EosKind::Additive));
    assert!(Eos::power_law(k.clone(), q.clone()).belongs_to(&EosKind::Barotropic));
    assert!(!Eos::general().belongs_to(&EosKind::Separable));
}

#[test]
fn gas_formulation_is_equivalent() {
    for eos in [Eos::general(), Eos::polytropic_critical(&n()), Eos::entropic(), Eos::additive()] {
        assert!(gas_equivalence_residual(&eos, &n()).is_zero(), "{:?}", eos.kind);
    }
}

#[test]
fn explicit_similarity_solution() {
    // Uniform expansion U = r/t, rho = t^{-n}, S constant.
    let eos = Eos::entropic().instantiate(&[FuncDef::unary("kappa", |x| x * x)]).unwrap();
    let fields = [
        parse("r/t").unwrap(),
        parse("t^(-n)").unwrap(),
        Expr::sym("k"),
    ];
    for res in euler_residuals(&eos, &n()) {
        let v = evaluate_on_fields(&res, &fields);
        assert!(v.is_zero() || cross_check_zero(&v), "{v}");
    }
}
