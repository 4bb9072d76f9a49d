//! The acceptance suite: nine criteria, each a list of checks with the
//! tolerance it was held to.
//!
//! Some statements of the source text are false as printed. Those checks
//! are kept with `literal = true`: they are expected to fail, the corrected
//! statement is checked alongside, and the criterion verdict becomes
//! [`Verdict::Erratum`] rather than a pass.

use std::time::Instant;

use serde::Serialize;

use radflow::advected::{
    check_theorem51, closure_h, commutator_closure, eval_a, first_order_group_flow, parse_f,
    symmetries_commute, DensityFactor, FirstOrderFlow,
};
use radflow::casimir::{casimir_residuals, split_system_check, verify_casimir_hierarchy};
use radflow::expr::random::euler_identity_trials;
use radflow::expr::{d_r, euler_product_identities, euler_rel3_variant, Expr, Field};
use radflow::hamiltonian::{equations_of_motion_defect, gas_operator_consistency, table3_catalog};
use radflow::model::Eos;
use radflow::numeric::{FieldSource, Pchip};
use radflow::solver::{
    advected_drift, conserved_report, observed_order, symmetry_residual_check, BalanceKind,
    DriftScalar, History, SimConfig, SolverError, TransportedDomain,
};
use radflow::symmetry::groups::{scalar, GroupAction, GroupFunctions, GroupKind};
use radflow::symmetry::{negative_controls, verify_catalog};

pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    /// A printed statement fails; its corrected form passes.
    Erratum,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub label: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Checks a statement as printed that is known to be false.
    pub literal: bool,
}

impl Check {
    pub fn new(label: impl Into<String>, ok: bool) -> Check {
        Check {
            label: label.into(),
            ok,
            value: None,
            tolerance: None,
            literal: false,
        }
    }

    pub fn at_most(label: impl Into<String>, value: f64, tol: f64) -> Check {
        Check {
            ok: value <= tol,
            value: Some(value),
            tolerance: Some(tol),
            ..Check::new(label, false)
        }
    }

    pub fn at_least(label: impl Into<String>, value: f64, tol: f64) -> Check {
        Check {
            ok: value >= tol,
            value: Some(value),
            tolerance: Some(tol),
            ..Check::new(label, false)
        }
    }

    fn literal(label: impl Into<String>, ok: bool) -> Check {
        Check {
            literal: true,
            ..Check::new(label, ok)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
}

impl Criterion {
    fn new(id: u32, title: &'static str, checks: Vec<Check>, start: Instant) -> Criterion {
        let failed = checks.iter().any(|c| !c.ok && !c.literal);
        let literal = checks.iter().any(|c| !c.ok && c.literal);
        let verdict = match (failed, literal) {
            (true, _) => Verdict::Fail,
            (false, true) => Verdict::Erratum,
            (false, false) => Verdict::Pass,
        };
        Criterion {
            id,
            title,
            verdict,
            checks,
            elapsed_s: start.elapsed().as_secs_f64(),
        }
    }

    /// One line: number, title, verdict, time.
    pub fn line(&self) -> String {
        let v = match self.verdict {
            Verdict::Pass => "PASS".to_string(),
            Verdict::Fail => {
                let first = self.checks.iter().find(|c| !c.ok && !c.literal);
                format!("FAIL ({})", first.map_or("", |c| c.label.as_str()))
            }
            Verdict::Erratum => {
                let n = self.checks.iter().filter(|c| !c.ok && c.literal).count();
                format!("FAIL as printed: {n} printed statement(s) refuted, corrected forms PASS")
            }
        };
        format!("criterion {} [{}]: {} ({:.1} s)", self.id, self.title, v, self.elapsed_s)
    }

    /// No check failed other than a known misprint.
    pub fn acceptable(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

fn n() -> Expr {
    Expr::sym("n")
}

fn err_check(label: &str, e: impl std::fmt::Display) -> Check {
    Check::new(format!("{label}: {e}"), false)
}

// ------------------------------------------------------------- symbolic

pub fn symmetry_catalog() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    match verify_catalog() {
        Ok(reports) => {
            for r in reports {
                let gens = r.generators.iter().all(|g| g.residual_zero && g.instances_zero);
                checks.push(Check::new(format!("case {}: determining residuals zero", r.case), gens));
                checks.push(Check::new(
                    format!("case {}: commutators as tabulated", r.case),
                    r.commutators_ok,
                ));
                checks.push(Check::new(
                    format!("case {}: relations", r.case),
                    r.relations.iter().all(|x| x.ok),
                ));
            }
        }
        Err(e) => checks.push(err_check("catalog", e)),
    }
    for (label, ok) in negative_controls() {
        checks.push(Check::new(format!("negative control: {label}"), ok));
    }
    checks.push(Check::at_most("runtime in seconds", start.elapsed().as_secs_f64(), 60.0));
    Criterion::new(1, "symmetry catalog", checks, start)
}

pub fn hamiltonian_structure() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    let family = [
        ("polytropic q = 2/n", Eos::polytropic_critical(&n())),
        ("polytropic q", Eos::polytropic(Expr::sym("q"))),
        ("entropic", Eos::entropic()),
        ("barotropic", Eos::barotropic()),
        ("general p(rho, S)", Eos::general()),
    ];
    for (name, eos) in family {
        match equations_of_motion_defect(&eos, &n()) {
            Ok(d) => checks.push(Check::new(format!("H grad H reproduces the equations, {name}"), d.is_zero())),
            Err(e) => checks.push(err_check(name, e)),
        }
    }
    let mut jets = vec![Expr::r()];
    for f in Field::FLUID {
        jets.push(Expr::jet(f, 0, 0));
        jets.push(Expr::jet(f, 0, 1));
    }
    let h = ["hU", "hrho", "hp"].map(|name| Expr::func(name, jets.clone()));
    let d = gas_operator_consistency(&Eos::polytropic(Expr::sym("q")), &n(), &h);
    checks.push(Check::new("gas-dynamics operator consistency, polytropic", d.is_zero()));
    Criterion::new(2, "Hamiltonian structure", checks, start)
}

pub fn kinematic_symmetries() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    match table3_catalog(&n()) {
        Ok(rows) => {
            checks.push(Check::new("five integrals with a listed symmetry", rows.len() == 5));
            for r in rows {
                checks.push(Check::new(
                    format!("{}: H grad of the density is a symmetry", r.integral),
                    r.computed_is_symmetry,
                ));
                match r.corrected_matches {
                    None => checks.push(Check::new(
                        format!("{} -> {}", r.integral, r.symmetry),
                        r.listed_matches,
                    )),
                    Some(corrected) => {
                        checks.push(Check::literal(
                            format!("{} -> {} (as printed)", r.integral, r.symmetry),
                            r.listed_matches,
                        ));
                        checks.push(Check::new(
                            format!("{} -> -f(S) v_t + (0, U rho f'(S) S_r, 0) (corrected)", r.integral),
                            corrected,
                        ));
                    }
                }
            }
        }
        Err(e) => checks.push(err_check("table", e)),
    }
    Criterion::new(3, "Hamiltonian symmetries of kinematic integrals", checks, start)
}

pub fn casimirs() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    let rep = verify_casimir_hierarchy(3, &n(), radflow::casimir::DEFAULT_NODE_BUDGET);
    for o in &rep.orders {
        checks.push(Check::new(format!("rho f(J_0..J_{}) is a Casimir", o.l), o.pass));
    }
    checks.push(Check::new("orders 0 to 3 all reached", rep.orders.len() == 4));
    for k in 0..=2 {
        match split_system_check(k, 2) {
            Ok(ids) => checks.push(Check::new(
                format!("split system, k = {k}, i <= 2"),
                ids.iter().all(|s| s.holds),
            )),
            Err(e) => checks.push(err_check("split system", e)),
        }
    }
    let p = Expr::func("kappa", vec![Expr::s()]);
    let j11 = &(&Expr::u() * &Expr::u()) + &(&(&(&Expr::int(2) / &n()) * &Expr::r()) * &(&d_r(&p) / &Expr::rho()));
    match casimir_residuals(&(&Expr::rho() * &j11), &n()) {
        Ok([a, _]) => checks.push(Check::new("rho J_{1,1} fails the first equation", !a.is_zero())),
        Err(e) => checks.push(err_check("rho J_{1,1}", e)),
    }
    checks.push(Check::at_most("runtime in seconds", start.elapsed().as_secs_f64(), 120.0));
    Criterion::new(4, "Casimirs", checks, start)
}

pub fn first_order_entropic() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    let f = |s: &str| parse_f(s).expect("fixed text parses");
    match check_theorem51(&f("J1"), 1, &n()) {
        Ok(c) => checks.push(Check::new("X from rho J_{1,1} equals the stated generator", c.matches)),
        Err(e) => checks.push(err_check("J1 branch", e)),
    }
    match check_theorem51(&f("J2"), 1, &n()) {
        Ok(c) => {
            checks.push(Check::literal("X from rho J_{2,1} equals the stated generator", c.matches));
            checks.push(Check::new(
                "X from rho J_{2,1} equals the generator with the (n-1)wA_w/r term",
                c.matches_corrected,
            ));
        }
        Err(e) => checks.push(err_check("J2 branch", e)),
    }
    match symmetries_commute(&f("J1"), &f("J2"), &n()) {
        Ok(ok) => checks.push(Check::new("the two first-order symmetries commute", ok)),
        Err(e) => checks.push(err_check("commutator", e)),
    }
    let mut linear_trivial = true;
    for (a, b, h) in [("J1", "J2", "2"), ("J1^2", "J2", "4*J1"), ("J1^2", "J2^2", "8*J1*J2")] {
        let h_ok = (&closure_h(&f(a), &f(b)) - &f(h)).is_zero();
        checks.push(Check::new(format!("h({a}, {b}) = {h}"), h_ok));
        match commutator_closure(&f(a), &f(b), &n()) {
            Ok(c) => {
                checks.push(Check::new(format!("[X_{a}, X_{b}] = X_{h}"), c.closes));
                if c.h_linear {
                    linear_trivial &= c.h_symmetry_zero;
                }
                if h == "2" {
                    checks.push(Check::new("constant h gives X_h = 0", c.h_symmetry_zero));
                }
            }
            Err(e) => checks.push(err_check("closure", e)),
        }
    }
    checks.push(Check::literal("every linear h gives X_h = 0", linear_trivial));
    Criterion::new(5, "first-order entropic symmetries", checks, start)
}

pub fn euler_identities(seed: u64) -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    match euler_identity_trials(seed, 25, 2) {
        Ok(trials) => {
            checks.push(Check::at_least("random pairs", trials.len() as f64, 25.0));
            for k in 0..3 {
                let held = trials.iter().filter(|t| t.holds[k]).count();
                checks.push(Check::new(
                    format!("identity {} on {held}/{} pairs (seed {seed})", k + 1, trials.len()),
                    held == trials.len(),
                ));
            }
        }
        Err(e) => checks.push(err_check("trials", e)),
    }
    match euler_rel3_variant(&Expr::one(), &Expr::u(), Field::U, "f") {
        Ok(v) => checks.push(Check::literal("third identity as printed, a = 1, b = U", v.is_zero())),
        Err(e) => checks.push(err_check("printed third identity", e)),
    }
    match euler_product_identities(&Expr::one(), &Expr::u(), Field::U, "f") {
        Ok(v) => checks.push(Check::new("adjoint form of the third identity, a = 1, b = U", v[2].is_zero())),
        Err(e) => checks.push(err_check("third identity", e)),
    }
    Criterion::new(6, "Euler operator product identities", checks, start)
}

// ------------------------------------------------------------- numerics

/// Runs of one configuration at 128, 256 and 512 cells.
pub struct Study {
    pub histories: Vec<History>,
}

impl Study {
    pub fn run(cfg: &SimConfig) -> Result<Study, SolverError> {
        let histories = [128, 256, 512]
            .into_iter()
            .map(|n| cfg.with_cells(n).setup()?.run())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Study { histories })
    }
}

fn orders(errors: &[f64]) -> f64 {
    observed_order(errors).into_iter().fold(f64::INFINITY, f64::min)
}

pub fn polytropic_numerics(study: &Result<Study, SolverError>, elapsed_runs: f64) -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    let cfg = SimConfig::polytropic_pulse(128);
    let study = match study {
        Ok(s) => s,
        Err(e) => return Criterion::new(7, "polytropic numerics", vec![err_check("run", e)], start),
    };
    let kinds = [
        BalanceKind::Mass,
        BalanceKind::Entropy,
        BalanceKind::Energy,
        BalanceKind::Dilational,
        BalanceKind::Similarity,
    ];
    let mut imbalances = vec![Vec::new(); kinds.len()];
    let [a, b] = cfg.domain.expect("preset has a domain");
    for h in &study.histories {
        checks.push(Check::at_most(
            format!("N = {}: full-grid mass defect per step", h.grid.cells()),
            h.max_mass_defect(),
            1e-12,
        ));
        let report = TransportedDomain::trace(h, a, b).and_then(|d| conserved_report(h, &d, &kinds));
        match report {
            Ok(r) => {
                for (k, bal) in r.balances.iter().enumerate() {
                    imbalances[k].push(bal.imbalance);
                }
            }
            Err(e) => checks.push(err_check("balance", e)),
        }
    }
    for (k, kind) in kinds.iter().enumerate() {
        if imbalances[k].len() == 3 {
            checks.push(Check::at_least(
                format!("{} imbalance order (worst pair)", kind.name()),
                orders(&imbalances[k]),
                1.8,
            ));
        }
    }
    let fine = &study.histories[2];
    match advected_drift(fine, &[DriftScalar::J(0)], &cfg.characteristics) {
        Ok(d) => checks.push(Check::at_most("J_0 drift at N = 512", d.scalars[0].max_drift, 1e-4)),
        Err(e) => checks.push(err_check("drift", e)),
    }
    checks.push(Check::at_most(
        "runtime in seconds",
        elapsed_runs + start.elapsed().as_secs_f64(),
        300.0,
    ));
    let mut c = Criterion::new(7, "polytropic numerics", checks, start);
    c.elapsed_s += elapsed_runs;
    c
}

pub fn entropic_numerics() -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();
    let cfg = SimConfig::entropic_ramp(128);
    match Study::run(&cfg) {
        Ok(study) => {
            let mut drifts = [Vec::new(), Vec::new()];
            for h in &study.histories {
                match advected_drift(h, &[DriftScalar::J1(1), DriftScalar::J2(1)], &cfg.characteristics) {
                    Ok(d) => {
                        checks.push(Check::new(
                            format!("N = {}: 8 characteristics traced", h.grid.cells()),
                            d.scalars[0].drift.len() == 8,
                        ));
                        drifts[0].push(d.scalars[0].max_drift);
                        drifts[1].push(d.scalars[1].max_drift);
                    }
                    Err(e) => checks.push(err_check("drift", e)),
                }
            }
            for (k, name) in ["J_{1,1}", "J_{2,1}"].iter().enumerate() {
                if drifts[k].len() == 3 {
                    checks.push(Check::at_least(format!("{name} drift order (worst pair)"), orders(&drifts[k]), 1.5));
                }
            }
        }
        Err(e) => checks.push(err_check("run", e)),
    }
    match eval_a(1.0, 0.0, 1.0, 2.0, 1e-12) {
        Ok(a) => checks.push(Check::at_most(
            "A(1, 0, 1) in n = 2 against arcsin(1)",
            (a - 1f64.asin()).abs(),
            1e-10,
        )),
        Err(e) => checks.push(err_check("eval_A", e)),
    }
    Criterion::new(8, "entropic drifts", checks, start)
}

/// `S` sampled on a grid in `r` and interpolated, exact in `t`.
struct InterpolatedProfile {
    s: Pchip,
}

fn profile(t: f64, r: f64) -> f64 {
    (0.7 * r).sin() + 0.3 * t
}

impl FieldSource for InterpolatedProfile {
    fn sample(&self, t: f64, r: f64) -> Option<[f64; 3]> {
        Some([0.0, 1.0, self.s.eval(r)? + 0.3 * t])
    }
}

pub fn group_flows(study: &Result<Study, SolverError>) -> Criterion {
    let start = Instant::now();
    let mut checks = Vec::new();

    let xs: Vec<f64> = (0..=2000).map(|i| i as f64 * 0.005).collect();
    let ys: Vec<f64> = xs.iter().map(|r| profile(0.0, *r)).collect();
    let src = InterpolatedProfile {
        s: Pchip::new(&xs, &ys).expect("increasing nodes"),
    };
    let eps = 0.1;
    let flow = FirstOrderFlow::Enthalpy { n: 2.0, r_max: 10.0 };
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let r = 0.6 + 0.2 * k as f64;
        match first_order_group_flow(&flow, eps, &src, 0.5, r) {
            Ok(v) => worst = worst.max((v[2] - profile(0.5, (r * r - 2.0 * eps).sqrt())).abs()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    checks.push(Check::at_most("enthalpy-flux map, rho = 1, n = 2", worst, 1e-6));

    let study = match study {
        Ok(s) => s,
        Err(e) => return Criterion::new(9, "group flows", vec![err_check("run", e)], start),
    };
    let h = &study.histories[2];
    let flow = FirstOrderFlow::EntropyWeighted {
        f: scalar(|_| 1.0),
        f_prime: scalar(|_| 0.0),
        s_range: (-10.0, 10.0),
        factor: DensityFactor::Corrected,
    };
    let eps = 0.05;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let r = 1.0 + 0.05 * k as f64;
        let got = first_order_group_flow(&flow, eps, h, 0.2, r);
        let want = h.sample(0.2 - eps, r);
        match (got, want) {
            (Ok(g), Some(w)) => {
                for i in 0..3 {
                    worst = worst.max((g[i] - w[i]).abs());
                }
            }
            _ => worst = f64::INFINITY,
        }
    }
    checks.push(Check::at_most("entropy-weighted map with f = 1 is a time shift", worst, 1e-9));

    let action = GroupAction::new(GroupKind::Conformal { n: 3.0 }, 0.05, GroupFunctions::default());
    match symmetry_residual_check(h, &action) {
        Ok(r) => checks.push(Check::at_most(
            "conformal map, eps = 0.05, N = 512: residual ratio",
            r.ratio,
            3.0,
        )),
        Err(e) => checks.push(err_check("residual", e)),
    }
    Criterion::new(9, "group flows", checks, start)
}

/// Every criterion, in order.
pub fn run_all(seed: u64) -> Vec<Criterion> {
    let t = Instant::now();
    let poly = Study::run(&SimConfig::polytropic_pulse(128));
    let runs = t.elapsed().as_secs_f64();
    vec![
        symmetry_catalog(),
        hamiltonian_structure(),
        kinematic_symmetries(),
        casimirs(),
        first_order_entropic(),
        euler_identities(seed),
        polytropic_numerics(&poly, runs),
        entropic_numerics(),
        group_flows(&poly),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(checks: Vec<Check>) -> Verdict {
        Criterion::new(0, "t", checks, Instant::now()).verdict
    }

    #[test]
    fn verdicts() {
        assert_eq!(verdict(vec![Check::new("a", true)]), Verdict::Pass);
        assert_eq!(verdict(vec![Check::new("a", true), Check::literal("b", false)]), Verdict::Erratum);
        assert_eq!(verdict(vec![Check::new("a", false), Check::literal("b", false)]), Verdict::Fail);
        assert_eq!(verdict(vec![Check::literal("b", true)]), Verdict::Pass);
        assert!(!Check::at_most("x", f64::NAN, 1.0).ok);
        assert!(Check::at_least("x", 2.0, 1.8).ok);
    }

    #[test]
    fn erratum_line_names_the_printed_statement() {
        let c = Criterion::new(3, "t", vec![Check::literal("b", false)], Instant::now());
        assert!(c.line().contains("FAIL as printed"));
        assert!(c.acceptable());
    }
}
