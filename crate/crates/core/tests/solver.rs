use proptest::prelude::*;

use radflow::solver::*;
use radflow::symmetry::groups::{GroupAction, GroupFunctions, GroupKind};

fn pulse(cells: usize) -> SimConfig {
    SimConfig::polytropic_pulse(cells)
}

#[test]
fn constant_state_at_rest_is_preserved() {
    let mut cfg = pulse(64);
    cfg.u0 = "0".into();
    cfg.rho0 = "1".into();
    cfg.s0 = "1".into();
    cfg.t_end = 0.05;
    let setup = cfg.setup().unwrap();
    let h = setup.run().unwrap();
    let first = &h.states[0].q;
    let last = &h.states.last().unwrap().q;
    for (a, b) in first.iter().zip(last) {
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() <= 1e-14, "{a:?} vs {b:?}");
        }
    }
}

/// Volume-weighted restriction of a fine solution onto the grid of half
/// the resolution.
fn restrict(fine: &State, grid: &Grid) -> Vec<[f64; 3]> {
    let v = grid.volumes();
    fine.q
        .chunks(2)
        .enumerate()
        .map(|(i, c)| {
            let (v0, v1) = (v[2 * i], v[2 * i + 1]);
            [0, 1, 2].map(|k| (v0 * c[0][k] + v1 * c[1][k]) / (v0 + v1))
        })
        .collect()
}

fn l1_density_error(coarse: &State, fine: &State, fine_grid: &Grid, coarse_grid: &Grid) -> f64 {
    restrict(fine, fine_grid)
        .iter()
        .zip(&coarse.q)
        .zip(coarse_grid.volumes())
        .map(|((f, c), v)| v * (f[0] - c[0]).abs())
        .sum()
}

#[test]
fn gaussian_pulse_self_convergence() {
    let runs: Vec<(Grid, State)> = [128, 256, 512]
        .into_iter()
        .map(|n| {
            let s = pulse(n).setup().unwrap();
            let h = s.run().unwrap();
            (h.grid.clone(), h.states.last().unwrap().clone())
        })
        .collect();
    let e128 = l1_density_error(&runs[0].1, &runs[1].1, &runs[1].0, &runs[0].0);
    let e256 = l1_density_error(&runs[1].1, &runs[2].1, &runs[2].0, &runs[1].0);
    let ratio = e128 / e256;
    assert!(ratio > 3.0 && ratio < 5.5, "error ratio {ratio}");
}

/// Constant entropy makes `p = S` uniform, so the flow is pressureless:
/// `U` is constant along `r = r0 + t U0(r0)` and mass in each shell is
/// carried along.
#[test]
fn entropic_uniform_entropy_matches_characteristics() {
    let mut cfg = SimConfig::entropic_ramp(256);
    cfg.s0 = "1".into();
    cfg.t_end = 0.2;
    let u0 = |r: f64| 0.4 + 0.1 * ((r - 1.5) / 0.4).tanh();
    let du0 = |r: f64| 0.1 / 0.4 / ((r - 1.5) / 0.4).cosh().powi(2);
    let rho0 = |r: f64| 1.0 + 0.2 * ((r - 1.5) / 0.4).tanh();
    let h = cfg.setup().unwrap().run().unwrap();
    let t = h.t_end();
    let last = h.snapshots.last().unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..8 {
        let r0 = 1.0 + 0.1 * i as f64;
        let r = r0 + t * u0(r0);
        let rho = rho0(r0) * r0 * r0 / (r * r * (1.0 + t * du0(r0)));
        let v = last.sample(r).unwrap();
        worst = worst.max((v[0] - u0(r0)).abs()).max((v[1] - rho).abs());
    }
    assert!(worst < 2e-4, "deviation {worst}");
}

#[test]
fn full_grid_mass_is_conserved_each_step() {
    let h = pulse(128).setup().unwrap().run().unwrap();
    assert!(h.max_mass_defect() <= 1e-12);
    assert_eq!(h.mass_defects.len(), h.snapshots.len() - 1);
}

#[test]
fn runs_are_deterministic() {
    let a = pulse(64).setup().unwrap().run().unwrap();
    let b = pulse(64).setup().unwrap().run().unwrap();
    let bits = |h: &History| -> Vec<u64> {
        h.states.last().unwrap().q.iter().flatten().map(|x| x.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
}

#[test]
fn cfl_violation_and_vacuum_are_reported() {
    let setup = pulse(64).setup().unwrap();
    let err = setup.solver.step(&setup.initial, 1.0).unwrap_err();
    assert!(matches!(err, SolverError::CflViolation { .. }));
    let mut cfg = pulse(64);
    cfg.rho0 = "r - 1".into();
    assert!(matches!(cfg.setup().err(), Some(SolverError::Vacuum { .. })));
}

#[test]
fn configuration_errors() {
    assert!(matches!(Grid::new(0.0, 1.0, 32, 3.0), Err(SolverError::BadGrid)));
    assert!(matches!(Grid::new(0.1, 1.0, 8, 3.0), Err(SolverError::BadGrid)));
    let mut cfg = pulse(64);
    cfg.cfl = 0.0;
    assert!(matches!(cfg.setup().err(), Some(SolverError::Config(_))));
    let mut cfg = pulse(64);
    cfg.eos = "nonsense".into();
    assert!(matches!(cfg.setup().err(), Some(SolverError::Model(_))));
    let mut cfg = pulse(64);
    cfg.functions.clear();
    assert!(matches!(cfg.setup().err(), Some(SolverError::OpaqueEos(_))));
}

#[test]
fn balance_validity_classes() {
    let poly = pulse(64).setup().unwrap();
    let ent = SimConfig::entropic_ramp(64).setup().unwrap();
    let applies = |s: &Setup| -> Vec<BalanceKind> {
        BalanceKind::ALL.into_iter().filter(|k| k.applies(&s.solver.eos)).collect()
    };
    use BalanceKind::*;
    assert_eq!(applies(&poly), vec![Mass, Entropy, Energy, Dilational, Similarity]);
    assert_eq!(applies(&ent), vec![Mass, Entropy, Energy, EntropyWeighted]);
    let mut baro = pulse(64);
    baro.eos = "barotropic".into();
    baro.functions = [("f".to_string(), "x^2".to_string())].into();
    assert!(applies(&baro.setup().unwrap()).contains(&EnthalpyFlux));

    let h = ent.run().unwrap();
    let dom = TransportedDomain::trace(&h, 1.0, 2.0).unwrap();
    assert!(matches!(
        conserved_report(&h, &dom, &[Similarity]),
        Err(SolverError::Inapplicable { .. })
    ));
}

#[test]
fn barotropic_enthalpy_flux_balance_is_small() {
    let mut cfg = pulse(256);
    cfg.eos = "barotropic".into();
    cfg.functions = [("f".to_string(), "x^2".to_string())].into();
    let h = cfg.setup().unwrap().run().unwrap();
    let dom = TransportedDomain::trace(&h, 1.0, 2.0).unwrap();
    let rep = conserved_report(&h, &dom, &[BalanceKind::EnthalpyFlux, BalanceKind::Energy]).unwrap();
    for b in &rep.balances {
        assert!(b.relative < 1e-4, "{b:?}");
    }
}

#[test]
fn drift_scalars_and_their_errors() {
    let h = pulse(128).setup().unwrap().run().unwrap();
    let rep = advected_drift(&h, &[DriftScalar::J(0), DriftScalar::J(1)], &[1.2, 1.6]).unwrap();
    assert!(rep.scalars[0].max_drift < 1e-4);
    assert!(rep.scalars[1].max_drift < 1e-2);
    assert!(matches!(
        advected_drift(&h, &[DriftScalar::J2(1)], &[1.2]),
        Err(SolverError::Inapplicable { .. })
    ));
    assert!(matches!(
        advected_drift(&h, &[DriftScalar::J(2)], &[1.2]),
        Err(SolverError::ScalarOrder(_))
    ));
    assert!(matches!(
        advected_drift(&h, &[DriftScalar::J(0)], &[2.69]),
        Err(SolverError::CharacteristicExit { .. })
    ));
}

#[test]
fn residual_ratios_for_group_maps() {
    let h = pulse(256).setup().unwrap().run().unwrap();
    let check = |kind, eps| {
        symmetry_residual_check(&h, &GroupAction::new(kind, eps, GroupFunctions::default()))
            .unwrap()
            .ratio
    };
    assert!((check(GroupKind::TimeTranslation, 0.1) - 1.0).abs() < 1e-9);
    assert!(check(GroupKind::Conformal { n: 3.0 }, 0.05) < 1.5);

    let mut cfg = pulse(256);
    cfg.q = Some("1".into());
    let h = cfg.setup().unwrap().run().unwrap();
    let ratio = |eps| {
        symmetry_residual_check(
            &h,
            &GroupAction::new(GroupKind::Conformal { n: 3.0 }, eps, GroupFunctions::default()),
        )
        .unwrap()
        .ratio
    };
    let (a, b) = (ratio(0.02), ratio(0.1));
    assert!(b > a && b > 3.0, "{a} {b}");
}

#[test]
fn observed_order_of_halving_errors() {
    let o = observed_order(&[4.0, 1.0, 0.25]);
    assert_eq!(o, vec![2.0, 2.0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn mass_defect_is_round_off(a in 0.0f64..0.4, b in -0.2f64..0.2, c in -0.3f64..0.3) {
        let mut cfg = pulse(32);
        cfg.rho0 = format!("1 + {a:.6}*exp(-((r-1.5)/0.4)^2)");
        cfg.u0 = format!("{b:.6}*exp(-((r-1.2)/0.5)^2)");
        cfg.s0 = format!("{c:.6}*r");
        cfg.t_end = 0.1;
        let h = cfg.setup().unwrap().run().unwrap();
        prop_assert!(h.max_mass_defect() <= 1e-12);
    }
}
