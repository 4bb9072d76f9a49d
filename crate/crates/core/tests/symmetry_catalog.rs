use radflow::expr::{Expr, Field};
use radflow::symmetry::{
    commutator, generator, negative_controls, verify_case, verify_catalog, Characteristic, PointGenerator,
    CASE_IDS,
};

#[test]
fn every_case_verifies() {
    let reports = verify_catalog().unwrap();
    assert_eq!(reports.len(), CASE_IDS.count());
    for rep in reports {
        assert!(rep.pass, "{}", serde_json::to_string_pretty(&rep).unwrap());
    }
}

#[test]
fn negative_controls_fail() {
    for (label, ok) in negative_controls() {
        assert!(ok, "{label}");
    }
}

#[test]
fn characteristic_forms() {
    let q = Expr::sym("q");
    let x1 = generator("X1", &q).unwrap().to_characteristic();
    assert_eq!(x1.p[0], -Expr::jet(Field::U, 1, 0));
    let xvi = generator("Xvi", &q).unwrap().to_characteristic();
    assert!(xvi.p[0].is_zero() && xvi.p[1].is_zero());
    assert_eq!(xvi.p[2], Expr::func_deriv("kappa", vec![Expr::s()], vec![1]).recip());
}

#[test]
fn unknown_case_is_an_error() {
    assert!(verify_case(99).is_err());
}

#[test]
fn commutator_is_antisymmetric_and_satisfies_jacobi() {
    let q = Expr::sym("q");
    let g: Vec<Characteristic> = ["X1", "X2", "Xv"]
        .iter()
        .map(|s| generator(s, &q).unwrap().to_characteristic())
        .collect();
    let ab = commutator(&g[0], &g[2]);
    let ba = commutator(&g[2], &g[0]);
    assert!(ab.add(&ba).is_zero());
    let jac = commutator(&g[0], &commutator(&g[1], &g[2]))
        .add(&commutator(&g[1], &commutator(&g[2], &g[0])))
        .add(&commutator(&g[2], &commutator(&g[0], &g[1])));
    assert!(jac.is_zero());
    let _ = PointGenerator::new(Expr::one(), Expr::zero(), [Expr::zero(), Expr::zero(), Expr::zero()]);
}
