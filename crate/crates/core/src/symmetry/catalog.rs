//! The maximal point-symmetry algebras, case by case, and their verification.

use std::time::Instant;

use serde::Serialize;

use super::{
    commutator, determining_residuals, Characteristic, PointGenerator, ResidualSummary,
    SymmetryError,
};
use crate::expr::{numerically_zero, sample_points, substitute_functions, Expr, FuncDef, Q};
use crate::model::{Eos, EosKind};

pub const CASE_IDS: std::ops::RangeInclusive<u32> = 1..=13;

fn kappa() -> Expr {
    Expr::func("kappa", vec![Expr::s()])
}

fn kappa_p() -> Expr {
    Expr::func_deriv("kappa", vec![Expr::s()], vec![1])
}

fn big_f() -> Expr {
    Expr::func("F", vec![Expr::s()])
}

fn n() -> Expr {
    Expr::sym("n")
}

/// Generator by its label, with `q` used by the `ii` and `iv` families.
pub fn generator(name: &str, q: &Expr) -> Result<PointGenerator, SymmetryError> {
    let (t, r, u, rho) = (Expr::t(), Expr::r(), Expr::u(), Expr::rho());
    let z = Expr::zero;
    let two = Expr::int(2);
    let entropy_shift = &(&two * &kappa()) / &kappa_p();
    let g = match name {
        "X1" => PointGenerator::new(Expr::one(), z(), [z(), z(), z()]),
        "X2" => PointGenerator::new(t, r, [z(), z(), z()]),
        "Xii" => PointGenerator::new(
            z(),
            q * &r,
            [q * &u, &two * &rho, -entropy_shift],
        ),
        "Xiii" => PointGenerator::new(z(), r, [u, z(), entropy_shift]),
        "Xiv" => PointGenerator::new(z(), q * &r, [q * &u, &two * &rho, z()]),
        "Xiv'" => PointGenerator::new(z(), r, [u, &n() * &rho, z()]),
        "Xv" => PointGenerator::new(
            &t * &t,
            &r * &t,
            [&r - &(&t * &u), -(&(&n() * &t) * &rho), z()],
        ),
        "Xvi" => PointGenerator::new(z(), z(), [z(), z(), kappa_p().recip()]),
        "Xvii" => PointGenerator::new(z(), r, [u, -(&two * &rho), z()]),
        "Xviii" => PointGenerator::new(z(), r, [u, -(&two * &rho), entropy_shift]),
        "Xix" => PointGenerator::new(z(), z(), [z(), z(), big_f()]),
        "Xvvi" => {
            let fk = &big_f() * &kappa_p();
            let coeff = &crate::expr::partial(&fk, crate::expr::Atom::jet(crate::expr::Field::S, 0, 0))
                / &kappa_p();
            PointGenerator::new(z(), z(), [z(), &coeff * &rho, big_f()])
        }
        other => return Err(SymmetryError::UnknownGenerator(other.to_string())),
    };
    Ok(g)
}

#[derive(Clone, Debug)]
pub struct NamedGenerator {
    pub name: String,
    pub generator: PointGenerator,
}

/// `[a, b] = Σ c_i X_i`.
#[derive(Clone, Debug)]
pub struct ExpectedCommutator {
    pub a: String,
    pub b: String,
    pub result: Vec<(Q, String)>,
}

/// A linear relation between generators of different cases, checked as an
/// identity of characteristics.
#[derive(Clone, Debug)]
struct Inheritance {
    label: String,
    lhs: Characteristic,
    rhs: Characteristic,
}

#[derive(Clone, Debug)]
pub struct CatalogCase {
    pub id: u32,
    pub eos: Eos,
    pub generators: Vec<NamedGenerator>,
    pub commutators: Vec<ExpectedCommutator>,
    pub algebra: &'static str,
    /// Concrete choices of the arbitrary functions for numeric cross-checks.
    pub instances: Vec<Vec<FuncDef>>,
    memberships: Vec<(String, EosKind)>,
    inheritance: Vec<Inheritance>,
}

impl CatalogCase {
    pub fn generator(&self, name: &str) -> Option<&PointGenerator> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| &g.generator)
    }
}

fn comm(a: &str, b: &str, result: &[(i64, &str)]) -> ExpectedCommutator {
    ExpectedCommutator {
        a: a.into(),
        b: b.into(),
        result: result.iter().map(|(c, s)| (Q::int(*c), s.to_string())).collect(),
    }
}

fn instances() -> Vec<Vec<FuncDef>> {
    let x = || Expr::sym("x_");
    vec![
        vec![
            FuncDef::unary("kappa", |x| x.exp()),
            FuncDef::unary("f", |x| &(x * &(x * x)) + x),
            FuncDef::unary("F", |_| Expr::one()),
            FuncDef::new(
                "p",
                &["x_", "y_"],
                &(&x() * &x()) * &Expr::sym("y_").exp(),
            ),
        ],
        vec![
            FuncDef::unary("kappa", |x| &(x * x) + &Expr::one()),
            FuncDef::unary("f", |x| x.exp()),
            FuncDef::unary("F", |x| x.clone()),
            FuncDef::new("p", &["x_", "y_"], &x() * &(&Expr::sym("y_") + &x())),
        ],
    ]
}

/// Builds case `id` of the classification.
pub fn case(id: u32) -> Result<CatalogCase, SymmetryError> {
    let q = Expr::sym("q");
    let k = Expr::sym("k");
    let two_over_n = &Expr::int(2) / &n();
    let base = ["X1", "X2"];
    let (eos, extra, algebra): (Eos, Vec<&str>, &'static str) = match id {
        1 => (Eos::general(), vec![], "A_{2,1}"),
        2 => (Eos::separable(), vec!["Xiii"], "A_{2,1}+A_1"),
        3 => (Eos::additive(), vec!["Xvi"], "A_{2,1}+A_1"),
        4 => (Eos::scaled_power(q.clone()), vec!["Xii"], "A_{2,1}+A_1"),
        5 => (Eos::log_form(k.clone()), vec!["Xviii"], "A_{2,1}+A_1"),
        6 => (Eos::polytropic(q.clone()), vec!["Xiii", "Xiv"], "A_{2,1}+2A_1"),
        7 => (Eos::entropic_log(k.clone()), vec!["Xvi", "Xvii"], "A_{2,1}+2A_1"),
        8 => (
            Eos::polytropic_critical(&n()),
            vec!["Xiii", "Xiv'", "Xv"],
            "sl(2,R)+2A_1",
        ),
        9 => (Eos::barotropic(), vec!["Xix"], "A_{2,1}+A_inf"),
        10 => (Eos::entropic(), vec!["Xvii", "Xvvi"], "A_{2,1}+A_1+A_inf"),
        11 => (Eos::log_barotropic(k.clone()), vec!["Xvii", "Xix"], "A_{2,1}+A_1+A_inf"),
        12 => (
            Eos::power_law(k.clone(), q.clone()),
            vec!["Xiv", "Xix"],
            "A_{2,1}+A_1+A_inf",
        ),
        13 => (
            Eos::power_law(k.clone(), two_over_n.clone()),
            vec!["Xv", "Xiv'", "Xix"],
            "sl(2,R)+A_1+A_inf",
        ),
        other => return Err(SymmetryError::UnknownCase(other)),
    };
    let generators = base
        .iter()
        .chain(extra.iter())
        .map(|name| NamedGenerator {
            name: name.to_string(),
            generator: generator(name, &q).expect("catalog generator"),
        })
        .collect();
    let mut commutators = vec![comm("X1", "X2", &[(1, "X1")])];
    if id == 8 || id == 13 {
        commutators.push(comm("X1", "Xv", &[(2, "X2"), (-1, "Xiv'")]));
        commutators.push(comm("X2", "Xv", &[(1, "Xv")]));
    }
    let memberships = match id {
        6 => vec![
            ("case 2".to_string(), EosKind::Separable),
            ("case 5, k=0".to_string(), EosKind::LogForm { k: Expr::zero() }),
        ],
        7 => vec![
            ("case 3".to_string(), EosKind::Additive),
            ("case 4, q=-1".to_string(), EosKind::ScaledPower { q: Expr::int(-1) }),
        ],
        11 => vec![
            ("case 9".to_string(), EosKind::Barotropic),
            ("case 7".to_string(), EosKind::EntropicLog { k: k.clone() }),
        ],
        12 => vec![
            ("case 9".to_string(), EosKind::Barotropic),
            ("case 6".to_string(), EosKind::Polytropic { q: q.clone() }),
        ],
        13 => vec![
            ("case 9".to_string(), EosKind::Barotropic),
            ("case 8".to_string(), EosKind::Polytropic { q: two_over_n }),
        ],
        _ => vec![],
    };
    Ok(CatalogCase {
        id,
        eos,
        generators,
        commutators,
        algebra,
        instances: instances(),
        memberships,
        inheritance: inheritance(id),
    })
}

fn ch(name: &str, q: &Expr) -> Characteristic {
    generator(name, q).unwrap().to_characteristic()
}

fn with_defs(c: &Characteristic, defs: &[FuncDef]) -> Characteristic {
    c.map(|e| substitute_functions(e, defs))
}

fn inheritance(id: u32) -> Vec<Inheritance> {
    match id {
        6 => {
            // q = 1/m - 1 keeps the exponent 1/(q+1) = m polynomial.
            let m = Expr::sym("m");
            let q = &m.recip() - &Expr::one();
            let tilde = [FuncDef::unary("kappa", |x| {
                Expr::func("kappa", vec![x.clone()]).pow(&m).unwrap()
            })];
            let rhs = ch("Xiii", &q)
                .mul(&m.recip())
                .sub(&with_defs(&ch("Xviii", &q), &tilde));
            vec![Inheritance {
                label: "Xiv = (q+1)Xiii - Xviii[kappa -> kappa^(1/(q+1))]".into(),
                lhs: ch("Xiv", &q),
                rhs,
            }]
        }
        7 => {
            let k = Expr::sym("k");
            let tilde = [FuncDef::unary("kappa", |x| {
                (&Expr::func("kappa", vec![x.clone()]) / &k).exp()
            })];
            let rhs = ch("Xvi", &Expr::zero())
                .mul(&(&Expr::int(-2) * &k))
                .sub(&with_defs(&ch("Xii", &Expr::int(-1)), &tilde));
            vec![Inheritance {
                label: "Xvii = -2k Xvi - Xii[kappa -> exp(kappa/k), q=-1]".into(),
                lhs: ch("Xvii", &Expr::zero()),
                rhs,
            }]
        }
        8 => {
            let q = &Expr::int(2) / &n();
            vec![Inheritance {
                label: "Xiv' = (1/q) Xiv at q=2/n".into(),
                lhs: ch("Xiv'", &q),
                rhs: ch("Xiv", &q).mul(&q.recip()),
            }]
        }
        _ => vec![],
    }
}

pub fn catalog() -> Vec<CatalogCase> {
    CASE_IDS.map(|id| case(id).unwrap()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCheck {
    pub generator: String,
    pub residual_zero: bool,
    pub residuals: Vec<ResidualSummary>,
    /// Residuals with the concrete function instances substituted.
    pub instances_zero: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutatorCheck {
    pub a: String,
    pub b: String,
    pub expected: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedCheck {
    pub label: String,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub case: u32,
    pub algebra: String,
    pub pressure: String,
    pub generators: Vec<GeneratorCheck>,
    pub commutators: Vec<CommutatorCheck>,
    pub commutators_ok: bool,
    pub relations: Vec<NamedCheck>,
    pub pass: bool,
    pub elapsed_ms: u128,
}

fn combination(c: &CatalogCase, terms: &[(Q, String)]) -> Characteristic {
    terms.iter().fold(Characteristic::zero(), |acc, (k, name)| {
        acc.add(&c.generator(name).unwrap().to_characteristic().scale(*k))
    })
}

fn describe(terms: &[(Q, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|(k, s)| if k.is_one() { s.clone() } else { format!("{k}*{s}") })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Verifies one case: determining equations for every generator (opaque
/// functions, then concrete instances), all pairwise commutators, and the
/// relations to more general cases.
pub fn verify_case(id: u32) -> Result<CaseReport, SymmetryError> {
    let start = Instant::now();
    let c = case(id)?;
    let nn = n();
    let mut generators = Vec::new();
    for g in &c.generators {
        let ch = g.generator.to_characteristic();
        let res = determining_residuals(&ch, &c.eos, &nn);
        let instances_zero = c.instances.iter().all(|defs| {
            let eos = c.eos.instantiate(defs).expect("instance pressure");
            determining_residuals(&with_defs(&ch, defs), &eos, &nn)
                .iter()
                .all(Expr::is_zero)
        });
        generators.push(GeneratorCheck {
            generator: g.name.clone(),
            residual_zero: res.iter().all(Expr::is_zero),
            residuals: res.iter().map(ResidualSummary::of).collect(),
            instances_zero,
        });
    }
    let mut commutators = Vec::new();
    for (i, a) in c.generators.iter().enumerate() {
        for b in &c.generators[i + 1..] {
            let listed = c.commutators.iter().find(|e| e.a == a.name && e.b == b.name);
            let expected: Vec<(Q, String)> = listed.map(|e| e.result.clone()).unwrap_or_default();
            let got = commutator(
                &a.generator.to_characteristic(),
                &b.generator.to_characteristic(),
            );
            commutators.push(CommutatorCheck {
                a: a.name.clone(),
                b: b.name.clone(),
                expected: describe(&expected),
                ok: got.sub(&combination(&c, &expected)).is_zero(),
            });
        }
    }
    let mut relations: Vec<NamedCheck> = c
        .inheritance
        .iter()
        .map(|inh| NamedCheck {
            label: inh.label.clone(),
            ok: inh.lhs.sub(&inh.rhs).is_zero(),
        })
        .collect();
    for (label, kind) in &c.memberships {
        relations.push(NamedCheck {
            label: format!("pressure lies in {label}"),
            ok: c.eos.belongs_to(kind),
        });
    }
    if id == 8 || id == 13 {
        // X1, X2 - Xiv'/2, Xv span sl(2,R); Xiv' commutes with X1 and Xv.
        let x = |s: &str| c.generator(s).unwrap().to_characteristic();
        let h = x("X2").sub(&x("Xiv'").scale(Q::new(1, 2)));
        let ok = commutator(&x("X1"), &x("Xv")).sub(&h.scale(Q::int(2))).is_zero()
            && commutator(&h, &x("Xv")).sub(&x("Xv")).is_zero()
            && commutator(&x("X1"), &h).sub(&x("X1")).is_zero()
            && commutator(&x("Xiv'"), &x("X1")).is_zero()
            && commutator(&x("Xiv'"), &x("Xv")).is_zero();
        relations.push(NamedCheck {
            label: "sl(2,R) spanned by X1, X2 - Xiv'/2, Xv".into(),
            ok,
        });
    }
    let commutators_ok = commutators.iter().all(|c| c.ok);
    let pass = commutators_ok
        && generators.iter().all(|g| g.residual_zero && g.instances_zero)
        && relations.iter().all(|r| r.ok);
    Ok(CaseReport {
        case: id,
        algebra: c.algebra.to_string(),
        pressure: c.eos.pressure.to_string(),
        generators,
        commutators,
        commutators_ok,
        relations,
        pass,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// Every case of the catalog, checked in parallel and reported in case order.
pub fn verify_catalog() -> Result<Vec<CaseReport>, SymmetryError> {
    use rayon::prelude::*;
    CASE_IDS.collect::<Vec<_>>().into_par_iter().map(verify_case).collect()
}

/// Negative controls: generators that must fail outside their case.
pub fn negative_controls() -> Vec<(String, bool)> {
    let nn = n();
    let q = Expr::sym("q");
    let mut out = Vec::new();

    // Xv for q != 2/n: the residual is non-zero, and vanishes once q = 2/n.
    let xv = generator("Xv", &q).unwrap().to_characteristic();
    let res = determining_residuals(&xv, &Eos::polytropic(q.clone()), &nn);
    let mut pts = sample_points(20, 0x5eed_0001);
    for p in &mut pts {
        let nv = crate::expr::Valuation::sym(p, "n");
        p.set_sym("q", 2.0 / nv);
    }
    let fails = !res.iter().all(Expr::is_zero);
    let vanishes_at_critical = res.iter().all(|e| numerically_zero(e, &pts, 1e-9));
    out.push(("Xv fails for polytropic q != 2/n".into(), fails && vanishes_at_critical));

    let xiii = generator("Xiii", &q).unwrap().to_characteristic();
    let res = determining_residuals(&xiii, &Eos::general(), &nn);
    out.push(("Xiii fails for general p(rho,S)".into(), !res.iter().all(Expr::is_zero)));
    out
}
