use std::f64::consts::FRAC_PI_2;

use radflow::advected::*;
use radflow::expr::{d_r, d_t, parse, sample_points, Expr, Restrictor};
use radflow::model::Eos;
use radflow::symmetry::groups::{scalar, FnSource};
use radflow::symmetry::{Characteristic, PointGenerator};

fn n() -> Expr {
    Expr::sym("n")
}

fn f(text: &str) -> Expr {
    parse_f(text).unwrap()
}

#[test]
fn quadrature_oracles() {
    let a = eval_a(1.0, 0.0, 1.0, 2.0, 1e-10).unwrap();
    assert!((a - FRAC_PI_2).abs() <= 1e-10);
    assert!((eval_a(1.0, 1.0, 0.0, 3.0, 1e-10).unwrap() - 1.0).abs() <= 1e-12);
    assert!((eval_a(3.0, 2.0, 0.0, 3.0, 1e-10).unwrap() - 1.5).abs() <= 1e-12);
    assert!(!radicand_ok(1.0, 0.1, -1.0, 3.0));
    assert!(matches!(
        eval_a(1.0, 0.1, -1.0, 3.0, 1e-10),
        Err(AdvectedError::Domain { .. })
    ));
}

#[test]
fn reduction_identities_hold_numerically() {
    let ap = APartials::new(3.0, 1e-12);
    for (r, u, w) in [(1.0, 0.7, 0.5), (1.3, 1.2, -0.2), (0.6, 2.0, 1.5)] {
        assert!(a_transport_defect(&ap, r, u, w).unwrap().abs() < 1e-8);
        let [h1, h2] = a_homogeneity_defects(&ap, r, u, w).unwrap();
        assert!(h1.abs() < 1e-8 && h2.abs() < 1e-8);
    }
    // For U < 0 the lower limit of the particle-time integral changes branch.
    let d = a_transport_defect(&ap, 0.8, -0.7, 0.5).unwrap();
    assert!((d + 2.0).abs() < 1e-8);
}

#[test]
fn entropic_scalar_examples() {
    let j1 = entropic_scalar(Branch::J1, 1, &n());
    let oracle = parse("U^2 + 2/n*r*kappa[1](S)*diff(S,r)/rho").unwrap();
    assert!((&j1 - &oracle).is_zero());
    let j2 = entropic_scalar(Branch::J2, 1, &n());
    assert!((&(&j2 - &a_node()) + &Expr::t()).is_zero());
}

#[test]
fn first_order_scalars_are_advected() {
    let ctx = Eos::entropic().context(&n());
    let material = |e: &Expr| {
        let m = &d_t(e) + &(&Expr::u() * &d_r(e));
        Restrictor::new(&ctx).restrict(&m)
    };
    assert!(material(&entropic_scalar(Branch::J1, 1, &n())).is_zero());
    assert!(material(&entropic_scalar(Branch::J1, 2, &n())).is_zero());
    let j2 = material(&entropic_scalar(Branch::J2, 1, &n()));
    assert!(!j2.is_zero());
    assert!(apply_a_rules(&j2, &[a_transport_rule(&n())]).is_zero());
}

#[test]
fn first_scalar_generates_time_translation() {
    let c = hamiltonian_characteristic(&f("J1"), 1, &n()).unwrap();
    let x1 = PointGenerator::new(Expr::one(), Expr::zero(), [Expr::zero(), Expr::zero(), Expr::zero()])
        .to_characteristic()
        .scale(radflow::expr::Q::int(-2));
    let ctx = Eos::entropic().context(&n());
    assert!(c.sub(&x1).restrict(&ctx).is_zero());
}

#[test]
fn stated_generators_against_hamiltonian_symmetries() {
    for l in 1..=2 {
        for text in ["J1", "J1^2"] {
            let c = check_theorem51(&f(text), l, &n()).unwrap();
            assert!(c.matches_plain && c.matches && c.matches_corrected, "{text} at l = {l}");
        }
        for text in ["J2", "J1*J2", "J2^2"] {
            let c = check_theorem51(&f(text), l, &n()).unwrap();
            assert!(c.matches_corrected, "{text} at l = {l}");
            assert!(c.residual[1].zero && c.residual[2].zero);
            // At l = 2 a linear f has F2 = (-R) f_J2 = 0.
            assert_eq!(c.matches, l == 2 && text == "J2", "{text} at l = {l}");
        }
    }
}

#[test]
fn stated_second_symmetry_misses_one_term() {
    let ham = hamiltonian_characteristic(&f("J2"), 1, &n()).unwrap();
    let ctx = Eos::entropic().context(&n());
    let diff = ham.sub(&j2_symmetry_literal(&n())).restrict(&ctx);
    // -(n-1) (w/r) A_w in the U component.
    let expected = &(&(&(&Expr::one() - &n()) / &Expr::r()) * &w_entropic()) * &a_partial([0, 0, 1]);
    let target = Characteristic::new([expected, Expr::zero(), Expr::zero()]).restrict(&ctx);
    assert!(diff.sub(&target).is_zero());
}

#[test]
fn first_order_symmetries_commute() {
    assert!(symmetries_commute(&f("J1"), &f("J2"), &n()).unwrap());
}

#[test]
fn commutator_closure_pairs() {
    let cases = [
        ("J1", "J2", "2", true),
        ("J1^2", "J2", "4*J1", true),
        ("J1^2", "J2^2", "8*J1*J2", false),
    ];
    for (a, b, h, linear) in cases {
        let c = commutator_closure(&f(a), &f(b), &n()).unwrap();
        assert!((&closure_h(&f(a), &f(b)) - &f(h)).is_zero());
        assert!(c.closes, "[X_{a}, X_{b}]");
        assert_eq!(c.h_linear, linear);
    }
    // Only constant h gives the zero symmetry; X_{4 J1} = -8 X1.
    let c = commutator_closure(&f("J1"), &f("J2"), &n()).unwrap();
    assert!(c.h_symmetry_zero);
    let c = commutator_closure(&f("J1^2"), &f("J2"), &n()).unwrap();
    assert!(!c.h_symmetry_zero);
}

#[test]
fn proof_expressions_and_lemma() {
    for l in 1..=2 {
        for b in [Branch::J1, Branch::J2] {
            assert_eq!(q_expressions_check(b, l, &n()).unwrap(), [true; 3], "{b:?} l = {l}");
        }
    }
    for l in 0..=2 {
        assert_eq!(lemma_identities(l, &n()).unwrap(), [true; 4], "l = {l}");
    }
}

#[test]
fn integral_representation_of_second_branch() {
    let pts = sample_points(12, 7);
    for l in 1..=2 {
        let c = j2_representation_check(l, &pts);
        assert!(c.points >= 6);
        assert!(c.same_order_diff < 1e-9, "{c:?}");
        assert!(c.shifted_order_diff > 1e-3, "{c:?}");
    }
}

fn s_profile(t: f64, r: f64) -> f64 {
    (0.7 * r).sin() + 0.3 * t
}

#[test]
fn enthalpy_flow_with_unit_density() {
    let src = FnSource(|t: f64, r: f64| Some([0.2, 1.0, s_profile(t, r)]));
    let flow = FirstOrderFlow::Enthalpy { n: 2.0, r_max: 10.0 };
    let eps = 0.1;
    for r in [0.6, 1.0, 2.5] {
        let v = first_order_group_flow(&flow, eps, &src, 0.5, r).unwrap();
        let oracle = s_profile(0.5, (r * r - 2.0 * eps).sqrt());
        assert!((v[2] - oracle).abs() < 1e-9);
        assert_eq!([v[0], v[1]], [0.2, 1.0]);
    }
    assert!(first_order_group_flow(&flow, eps, &src, 0.5, 0.3).is_err());
    let id = first_order_group_flow(&flow, 0.0, &src, 0.5, 1.0).unwrap();
    assert_eq!(id[2], s_profile(0.5, 1.0));
}

#[test]
fn entropy_weighted_flow_with_unit_weight_is_a_time_shift() {
    let src = FnSource(|t: f64, r: f64| Some([0.1 * r + t, 1.0 + 0.1 * t * r, s_profile(t, r)]));
    let flow = FirstOrderFlow::EntropyWeighted {
        f: scalar(|_| 1.0),
        f_prime: scalar(|_| 0.0),
        s_range: (-5.0, 5.0),
        factor: DensityFactor::Corrected,
    };
    let eps = 0.2;
    for r in [0.5, 1.0, 2.0] {
        let v = first_order_group_flow(&flow, eps, &src, 1.0, r).unwrap();
        let want = src.0(1.0 - eps, r).unwrap();
        for k in 0..3 {
            assert!((v[k] - want[k]).abs() < 1e-10, "component {k} at r = {r}");
        }
    }
}

#[test]
fn entropy_weighted_flow_density_factor() {
    // S = t + r with f(S) = S: σ = t - ε S*, S* = σ + r gives S* = (t + r)/(1 + ε).
    let src = FnSource(|t: f64, r: f64| Some([0.0, 2.0, t + r]));
    let flow = FirstOrderFlow::EntropyWeighted {
        f: scalar(|s| s),
        f_prime: scalar(|_| 1.0),
        s_range: (-10.0, 10.0),
        factor: DensityFactor::Corrected,
    };
    let eps = 0.25;
    let v = first_order_group_flow(&flow, eps, &src, 0.4, 1.1).unwrap();
    assert!((v[2] - 1.5 / 1.25).abs() < 1e-10);
    assert!((v[1] - 2.0 / 1.25).abs() < 1e-8);
}
