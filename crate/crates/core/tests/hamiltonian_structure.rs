use radflow::expr::{d_r, Expr, Field, Restrictor};
use radflow::hamiltonian::*;
use radflow::model::Eos;
use radflow::symmetry::Characteristic;

fn n() -> Expr {
    Expr::sym("n")
}

fn jets() -> Vec<Expr> {
    let mut v = vec![Expr::r()];
    for f in Field::FLUID {
        v.push(Expr::jet(f, 0, 0));
        v.push(Expr::jet(f, 0, 1));
    }
    v
}

#[test]
fn gradient_of_kinetic_and_weighted_densities() {
    let eos = Eos::general();
    let g = variational_gradient(&energy_density(&eos), &eos, &n()).unwrap();
    assert_eq!(g.g[0], &Expr::rho() * &Expr::u());
    // r^(1-n) U has gradient (r^(1-n), 0, 0) and Hamiltonian symmetry -J1 d/dS.
    let iw = Expr::r().pow(&(&Expr::one() - &n())).unwrap();
    let phi = &iw * &Expr::u();
    let g = variational_gradient(&phi, &eos, &n()).unwrap();
    assert_eq!(g.g, [iw.clone(), Expr::zero(), Expr::zero()]);
    let p = apply_hamiltonian_operator(&g, &n());
    let j1 = &(&iw * &Expr::jet(Field::S, 0, 1)) / &Expr::rho();
    assert_eq!(p, Characteristic::new([Expr::zero(), Expr::zero(), -j1]));
}

#[test]
fn hamiltonian_flow_reproduces_the_equations() {
    for eos in [
        Eos::general(),
        Eos::polytropic_critical(&n()),
        Eos::polytropic(Expr::sym("q")),
        Eos::entropic(),
        Eos::barotropic(),
    ] {
        let d = equations_of_motion_defect(&eos, &n()).unwrap();
        assert!(d.is_zero(), "{:?}: {:?}", eos.kind, d);
    }
}

#[test]
fn gas_operator_agrees_with_fluid_operator() {
    let h = ["hU", "hrho", "hp"].map(|name| Expr::func(name, jets()));
    for eos in [Eos::polytropic(Expr::sym("q")), Eos::general()] {
        let d = gas_operator_consistency(&eos, &n(), &h);
        assert!(d.is_zero(), "{:?}", d);
    }
}

#[test]
fn gas_operator_generates_polytropic_gas_equations() {
    // e = p/(q rho) in (rho, p) variables; E(r^(n-1) H) = r^(n-1)(rho U, U²/2, 1/q).
    let q = Expr::sym("q");
    let w = Expr::r().pow(&(&n() - &Expr::one())).unwrap();
    let u = Expr::u();
    let p = Expr::field(Field::P);
    let h = [
        &(&w * &Expr::rho()) * &u,
        (&(&w * &u) * &u).scale(radflow::expr::Q::new(1, 2)),
        &w / &q,
    ];
    let a2 = &(&(&Expr::one() + &q) * &p) / &Expr::rho();
    let out = gas_hamiltonian_operator(&h, &a2, &d_r(&p), &n());
    let ctx = radflow::expr::SystemContext::gas(n(), a2.clone());
    let mut r = Restrictor::new(&ctx);
    let rhs = [Field::U, Field::Rho, Field::P].map(|f| r.jet(f, 1, 0));
    assert_eq!(out.p[0], rhs[0]);
    assert_eq!(out.p[1], rhs[1]);
    assert_eq!(out.p[2], rhs[2]);
}

#[test]
fn bracket_is_skew_and_mass_is_conserved() {
    let eos = Eos::general();
    let h = energy_density(&eos);
    let f = &Expr::rho() * &Expr::func("g", vec![Expr::s()]);
    let m = Expr::rho();
    let fh = poisson_bracket_density(&f, &h, &eos, &n()).unwrap();
    let hf = poisson_bracket_density(&h, &f, &eos, &n()).unwrap();
    assert!(is_trivial_density(&(&fh + &hf), &eos).unwrap());
    let mh = poisson_bracket_density(&m, &h, &eos, &n()).unwrap();
    assert!(is_trivial_density(&mh, &eos).unwrap());
    let uu = &Expr::u() * &Expr::u();
    let kh = poisson_bracket_density(&uu, &h, &eos, &n()).unwrap();
    assert!(!is_trivial_density(&kh, &eos).unwrap());
}

#[test]
fn casimir_densities_have_no_symmetry() {
    let eos = Eos::general();
    assert!(is_casimir_density(&Expr::rho(), &eos, &n()).unwrap());
    let f = &Expr::rho() * &Expr::func("f", vec![Expr::s()]);
    assert!(is_casimir_density(&f, &eos, &n()).unwrap());
    assert!(!is_casimir_density(&energy_density(&eos), &eos, &n()).unwrap());
}

#[test]
fn kinematic_fluxes_balance() {
    for ki in kinematic_integrals(&n()) {
        let b = balance_residual(&ki, &ki.flux, &n());
        assert!(b.is_zero(), "{}: {}", ki.name, b);
        if let Some(listed) = &ki.listed_flux {
            assert!(!balance_residual(&ki, listed, &n()).is_zero(), "{}", ki.name);
        }
    }
}

#[test]
fn table_rows_map_to_their_symmetries() {
    let rows = table3_catalog(&n()).unwrap();
    assert_eq!(rows.len(), 5);
    for c in &rows {
        assert!(c.computed_is_symmetry, "{}", c.integral);
        if c.integral == "entropy-weighted energy" {
            assert!(!c.listed_matches);
            assert!(!c.listed_is_symmetry);
            assert_eq!(c.corrected_matches, Some(true));
        } else {
            assert!(c.listed_matches, "{}: {:?}", c.integral, c.mismatch);
            assert!(c.listed_is_symmetry, "{}", c.integral);
        }
    }
}
