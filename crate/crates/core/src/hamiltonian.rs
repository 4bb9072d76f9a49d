//! Hamiltonian structure of the radial system: variational gradients, the
//! co-symplectic operator, the Poisson-bracket density, the kinematic
//! conserved integrals and their Hamiltonian symmetries.
//!
//! Convention: the gradient of `∫ Φ r^(n-1) dr` is stored as
//! `r^(1-n) E_v(r^(n-1) Φ)`. The operator acts on `E_v(r^(n-1) Φ)`, i.e. on
//! `r^(n-1)` times the stored gradient, which is the form that reproduces the
//! equations of motion.

use serde::Serialize;

use crate::expr::{
    d_r, d_t, euler_operator, substitute_functions, Expr, ExprError, Field, FuncDef,
    Restrictor, SystemContext, Q,
};
use crate::model::Eos;
use crate::symmetry::{determining_residuals, Characteristic, ResidualSummary};

fn weight(n: &Expr) -> Expr {
    Expr::r().pow(&(n - &Expr::one())).expect("polynomial exponent")
}

fn inv_weight(n: &Expr) -> Expr {
    Expr::r().pow(&(&Expr::one() - n)).expect("polynomial exponent")
}

/// `(δ/δU, δ/δρ, δ/δS)` of `∫ Φ r^(n-1) dr`, each `r^(1-n) E_v(r^(n-1) Φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationalGradient {
    pub g: [Expr; 3],
}

/// Applies `rules` (opaque energy, antiderivatives) after differentiation.
fn resolve(e: &Expr, eos: &Eos, extra: &[FuncDef]) -> Expr {
    let e = eos.resolve(e);
    if extra.is_empty() {
        e
    } else {
        substitute_functions(&e, extra)
    }
}

pub fn variational_gradient_with(
    phi: &Expr,
    eos: &Eos,
    n: &Expr,
    rules: &[FuncDef],
) -> Result<VariationalGradient, ExprError> {
    let wphi = &weight(n) * phi;
    let iw = inv_weight(n);
    let mut g = Vec::with_capacity(3);
    for f in Field::FLUID {
        g.push(&iw * &resolve(&euler_operator(&wphi, f)?, eos, rules));
    }
    Ok(VariationalGradient {
        g: [g[0].clone(), g[1].clone(), g[2].clone()],
    })
}

pub fn variational_gradient(
    phi: &Expr,
    eos: &Eos,
    n: &Expr,
) -> Result<VariationalGradient, ExprError> {
    variational_gradient_with(phi, eos, n, &[])
}

/// Matrix action of the co-symplectic operator on `E = r^(n-1) ∇`:
/// `(-D_r(r^(1-n) E_ρ) + r^(1-n)(S_r/ρ)E_S, -r^(1-n) D_r E_U, -r^(1-n)(S_r/ρ) E_U)`.
pub fn apply_hamiltonian_operator(g: &VariationalGradient, n: &Expr) -> Characteristic {
    let w = weight(n);
    let iw = inv_weight(n);
    let e: Vec<Expr> = g.g.iter().map(|x| &w * x).collect();
    let j1 = &(&iw * &Expr::jet(Field::S, 0, 1)) / &Expr::rho();
    Characteristic::new([
        &(-d_r(&(&iw * &e[1]))) + &(&j1 * &e[2]),
        -(&iw * &d_r(&e[0])),
        -(&j1 * &e[0]),
    ])
}

/// `H ∇G` for the density `Φ`.
pub fn hamiltonian_symmetry(phi: &Expr, eos: &Eos, n: &Expr) -> Result<Characteristic, ExprError> {
    hamiltonian_symmetry_with(phi, eos, n, &[])
}

pub fn hamiltonian_symmetry_with(
    phi: &Expr,
    eos: &Eos,
    n: &Expr,
    rules: &[FuncDef],
) -> Result<Characteristic, ExprError> {
    let g = variational_gradient_with(phi, eos, n, rules)?;
    Ok(apply_hamiltonian_operator(&g, n).map(|e| resolve(e, eos, rules)))
}

/// A density whose Hamiltonian symmetry vanishes is a Casimir.
pub fn is_casimir_density(phi: &Expr, eos: &Eos, n: &Expr) -> Result<bool, ExprError> {
    Ok(hamiltonian_symmetry(phi, eos, n)?.is_zero())
}

/// `E(r^(n-1)Φ_F) · H E(r^(n-1)Φ_G)`, the `dr`-density of `{F, G}`.
pub fn poisson_bracket_density(
    phi_f: &Expr,
    phi_g: &Expr,
    eos: &Eos,
    n: &Expr,
) -> Result<Expr, ExprError> {
    let gf = variational_gradient(phi_f, eos, n)?;
    let pg = hamiltonian_symmetry(phi_g, eos, n)?;
    let w = weight(n);
    Ok(resolve(
        &(0..3).map(|k| &(&w * &gf.g[k]) * &pg.p[k]).sum::<Expr>(),
        eos,
        &[],
    ))
}

/// True when the density is a total `r`-derivative (all Euler operators
/// vanish).
pub fn is_trivial_density(e: &Expr, eos: &Eos) -> Result<bool, ExprError> {
    for f in Field::FLUID {
        if !eos.resolve(&euler_operator(e, f)?).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Energy density `ρ(U²/2 + e)`.
pub fn energy_density(eos: &Eos) -> Expr {
    let half_u2 = (&Expr::u() * &Expr::u()).scale(Q::new(1, 2));
    &Expr::rho() * &(&half_u2 + eos.internal_energy())
}

/// Right sides of the evolution equations, in r-jets.
pub fn equations_of_motion(eos: &Eos, n: &Expr) -> Characteristic {
    let ctx = eos.context(n);
    let mut r = Restrictor::new(&ctx);
    Characteristic::new([
        r.jet(Field::U, 1, 0),
        r.jet(Field::Rho, 1, 0),
        r.jet(Field::S, 1, 0),
    ])
}

/// `H∇H` minus the equations of motion; zero for a correct structure.
pub fn equations_of_motion_defect(eos: &Eos, n: &Expr) -> Result<Characteristic, ExprError> {
    let p = hamiltonian_symmetry(&energy_density(eos), eos, n)?;
    Ok(p.sub(&equations_of_motion(eos, n)))
}

/// Gas-dynamics operator applied to `h = E(r^(n-1)Φ)` in `(U, ρ, p)`
/// variables. `a2` is the sound speed squared and `p_r` the pressure
/// gradient, both written in whatever variables the caller uses.
pub fn gas_hamiltonian_operator(h: &[Expr; 3], a2: &Expr, p_r: &Expr, n: &Expr) -> Characteristic {
    let iw = inv_weight(n);
    let rho = Expr::rho();
    let inv_rho = rho.recip();
    Characteristic::new([
        &(&(-d_r(&(&iw * &h[1]))) + &(&(&(&iw * p_r) / &rho) * &h[2]))
            - &(&inv_rho * &d_r(&(&(&(&iw * &rho) * a2) * &h[2]))),
        -(&iw * &d_r(&h[0])),
        &(-(&(&(&iw * p_r) / &rho) * &h[0])) - &(&(&(&iw * &rho) * a2) * &d_r(&(&h[0] / &rho))),
    ])
}

/// Consistency of the two formulations for arbitrary gas-variable
/// gradients `h`: transforming `h` to `(U, ρ, S)` gradients, applying the
/// fluid operator and mapping the result to `(U, ρ, p)` evolution must equal
/// the gas operator applied to `h` directly.
pub fn gas_operator_consistency(eos: &Eos, n: &Expr, h: &[Expr; 3]) -> Characteristic {
    let a2 = eos.sound_speed_sq();
    let p_s = eos.p_s();
    let p_r = d_r(&eos.pressure);
    //: E_U, E_ρ + a² E_p, p_S E_p, as stored gradients.
    let iw = inv_weight(n);
    let g = VariationalGradient {
        g: [
            &iw * &h[0],
            &iw * &(&h[1] + &(&a2 * &h[2])),
            &iw * &(&p_s * &h[2]),
        ],
    };
    let fluid = apply_hamiltonian_operator(&g, n);
    let mapped = Characteristic::new([
        fluid.p[0].clone(),
        fluid.p[1].clone(),
        &(&a2 * &fluid.p[1]) + &(&p_s * &fluid.p[2]),
    ]);
    mapped.sub(&gas_hamiltonian_operator(h, &a2, &p_r, n))
}

/// Which EOS class a kinematic integral needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Validity {
    General,
    PolytropicCritical,
    Barotropic,
    Entropic,
}

/// Row of the Hamiltonian-symmetry table: the listed characteristic and how
/// the computed one relates to it, `P = c·P_row + (τD_t + ξD_r)(U, ρ, S)`.
#[derive(Clone, Debug)]
pub struct Table3Row {
    pub listed: Characteristic,
    pub symmetry: &'static str,
    pub c: Q,
    pub tau: Expr,
    pub xi: Expr,
    /// Corrected row when the listed one is not the computed symmetry.
    pub corrected: Option<Characteristic>,
}

/// A kinematic conserved integral `d/dt ∫_V Φ r^(n-1) dr = -Flux|_∂V`.
#[derive(Clone, Debug)]
pub struct KinematicIntegral {
    pub name: &'static str,
    pub validity: Validity,
    pub eos: Eos,
    pub density: Expr,
    pub flux: Expr,
    /// Flux as printed when it differs from the verified one.
    pub listed_flux: Option<Expr>,
    pub rules: Vec<FuncDef>,
    pub row: Option<Table3Row>,
}

fn v_jets(i: u32, j: u32) -> Characteristic {
    Characteristic::new(Field::FLUID.map(|f| Expr::jet(f, i, j)))
}

fn f_s() -> Expr {
    Expr::func("f", vec![Expr::s()])
}

fn f_s_prime() -> Expr {
    Expr::func_deriv("f", vec![Expr::s()], vec![1])
}

/// `K(S) = ∫ f(S) κ'(S) dS` as an opaque function with its derivative rule.
fn k_rule() -> FuncDef {
    let x = Expr::sym("x_");
    FuncDef::partial_rule(
        "K",
        &["x_"],
        0,
        &Expr::func("f", vec![x.clone()]) * &Expr::func_deriv("kappa", vec![x], vec![1]),
    )
}

/// The seven kinematic conserved integrals with their fluxes and Table 3
/// rows.
pub fn kinematic_integrals(n: &Expr) -> Vec<KinematicIntegral> {
    let (t, r, u, rho) = (Expr::t(), Expr::r(), Expr::u(), Expr::rho());
    let w = weight(n);
    let half = |e: Expr| e.scale(Q::new(1, 2));
    let general = Eos::general();
    let poly = Eos::polytropic_critical(n);
    let baro = Eos::barotropic();
    let ent = Eos::entropic();
    let energy = |eos: &Eos| energy_density(eos);
    let p = |eos: &Eos| eos.pressure.clone();

    let mut out = vec![
        KinematicIntegral {
            name: "mass",
            validity: Validity::General,
            eos: general.clone(),
            density: rho.clone(),
            flux: Expr::zero(),
            listed_flux: None,
            rules: vec![],
            row: None,
        },
        KinematicIntegral {
            name: "generalized entropy",
            validity: Validity::General,
            eos: general.clone(),
            density: &rho * &f_s(),
            flux: Expr::zero(),
            listed_flux: None,
            rules: vec![],
            row: None,
        },
        KinematicIntegral {
            name: "energy",
            validity: Validity::General,
            eos: general.clone(),
            density: energy(&general),
            flux: &(&w * &p(&general)) * &u,
            listed_flux: None,
            rules: vec![],
            row: Some(Table3Row {
                listed: v_jets(1, 0).scale(Q::int(-1)),
                symmetry: "time-translation X1",
                c: Q::int(-1),
                tau: Expr::zero(),
                xi: Expr::zero(),
                corrected: None,
            }),
        },
    ];

    // Dilational and similarity energy, polytropic q = 2/n.
    let q = &Expr::int(2) / n;
    let dil_row = Characteristic::new([u.clone(), &(&Expr::int(2) / &q) * &rho, Expr::zero()])
        .sub(&v_jets(0, 1).mul(&r));
    out.push(KinematicIntegral {
        name: "dilational energy",
        validity: Validity::PolytropicCritical,
        eos: poly.clone(),
        density: &(&t * &energy(&poly)) - &half(&(&r * &rho) * &u),
        flux: &(&w * &(&(&t * &u) - &half(r.clone()))) * &p(&poly),
        listed_flux: None,
        rules: vec![],
        row: Some(Table3Row {
            listed: dil_row,
            symmetry: "scaling Xiv",
            c: Q::new(1, 2),
            tau: t.clone(),
            xi: r.clone(),
            corrected: None,
        }),
    });
    let sim_row = Characteristic::new([
        &r - &(&t * &u),
        -(&(n * &t) * &rho),
        Expr::zero(),
    ])
    .sub(&v_jets(1, 0).mul(&(&t * &t)))
    .sub(&v_jets(0, 1).mul(&(&r * &t)));
    out.push(KinematicIntegral {
        name: "similarity energy",
        validity: Validity::PolytropicCritical,
        eos: poly.clone(),
        density: &(&(&(&t * &t) * &energy(&poly)) - &(&(&t * &r) * &(&rho * &u)))
            + &half(&(&r * &r) * &rho),
        flux: &(&(&w * &t) * &(&(&t * &u) - &r)) * &p(&poly),
        listed_flux: None,
        rules: vec![],
        row: Some(Table3Row {
            listed: sim_row,
            symmetry: "conformal similarity Xv",
            c: Q::int(-1),
            tau: Expr::zero(),
            xi: Expr::zero(),
            corrected: None,
        }),
    });

    // Enthalpy flux ∫ U dr, i.e. Φ = r^(1-n) U.
    let j1 = &(&inv_weight(n) * &Expr::jet(Field::S, 0, 1)) / &rho;
    out.push(KinematicIntegral {
        name: "enthalpy flux",
        validity: Validity::Barotropic,
        eos: baro.clone(),
        density: &inv_weight(n) * &u,
        flux: &(baro.internal_energy() + &(&p(&baro) / &rho)) - &half(&u * &u),
        listed_flux: None,
        rules: vec![],
        row: Some(Table3Row {
            listed: Characteristic::new([Expr::zero(), Expr::zero(), -j1]),
            symmetry: "first-order X = -J1 d/dS",
            c: Q::ONE,
            tau: Expr::zero(),
            xi: Expr::zero(),
            corrected: None,
        }),
    });

    // Entropy-weighted energy, entropic EOS.
    let k = Expr::func("K", vec![Expr::s()]);
    let s_r = Expr::jet(Field::S, 0, 1);
    let listed = v_jets(1, 0)
        .mul(&-f_s())
        .add(&Characteristic::new([Expr::zero(), &(&f_s_prime() * &s_r) * &rho, Expr::zero()]));
    let corrected = v_jets(1, 0).mul(&-f_s()).add(&Characteristic::new([
        Expr::zero(),
        &(&(&u * &f_s_prime()) * &s_r) * &rho,
        Expr::zero(),
    ]));
    out.push(KinematicIntegral {
        name: "entropy-weighted energy",
        validity: Validity::Entropic,
        eos: ent,
        density: &half(&(&(&rho * &u) * &u) * &f_s()) - &k,
        flux: &(&w * &u) * &k,
        listed_flux: Some(half(&(&w * &u) * &k)),
        rules: vec![k_rule()],
        row: Some(Table3Row {
            listed,
            symmetry: "first-order X = f(S) d/dt + f'(S) S_r rho d/drho",
            c: Q::int(-1),
            tau: Expr::zero(),
            xi: Expr::zero(),
            corrected: Some(corrected),
        }),
    });
    out
}

/// `D_t(r^(n-1)Φ) + D_r(U r^(n-1)Φ) + D_r(flux)` on the solution space.
pub fn balance_residual(ki: &KinematicIntegral, flux: &Expr, n: &Expr) -> Expr {
    let ctx = ki.eos.context(n);
    let wphi = &weight(n) * &ki.density;
    let e = &(&d_t(&wphi) + &d_r(&(&Expr::u() * &wphi))) + &d_r(flux);
    resolve(&ctx.restrict(&e), &ki.eos, &ki.rules)
}

/// Outcome of comparing a computed Hamiltonian symmetry with its table row.
#[derive(Clone, Debug, Serialize)]
pub struct Table3Check {
    pub integral: String,
    pub symmetry: String,
    pub listed_matches: bool,
    pub corrected_matches: Option<bool>,
    pub computed_is_symmetry: bool,
    pub listed_is_symmetry: bool,
    pub mismatch: Vec<ResidualSummary>,
}

fn compare_row(
    computed: &Characteristic,
    row: &Characteristic,
    spec: &Table3Row,
    ctx: &SystemContext,
) -> Characteristic {
    let shift = v_jets(1, 0).mul(&spec.tau).add(&v_jets(0, 1).mul(&spec.xi));
    let expected = row.scale(spec.c).add(&shift);
    let mut r = Restrictor::new(ctx);
    computed.sub(&expected).map(|e| r.restrict(e))
}

pub fn check_table3_row(ki: &KinematicIntegral, n: &Expr) -> Result<Option<Table3Check>, ExprError> {
    let Some(row) = &ki.row else { return Ok(None) };
    let ctx = ki.eos.context(n);
    let computed = hamiltonian_symmetry_with(&ki.density, &ki.eos, n, &ki.rules)?;
    let diff = compare_row(&computed, &row.listed, row, &ctx).map(|e| resolve(e, &ki.eos, &ki.rules));
    let corrected_matches = row.corrected.as_ref().map(|c| {
        compare_row(&computed, c, row, &ctx)
            .map(|e| resolve(e, &ki.eos, &ki.rules))
            .is_zero()
    });
    let sym = |c: &Characteristic| {
        determining_residuals(c, &ki.eos, n)
            .iter()
            .all(|e| resolve(e, &ki.eos, &ki.rules).is_zero())
    };
    Ok(Some(Table3Check {
        integral: ki.name.to_string(),
        symmetry: row.symmetry.to_string(),
        listed_matches: diff.is_zero(),
        corrected_matches,
        computed_is_symmetry: sym(&computed),
        listed_is_symmetry: sym(&row.listed),
        mismatch: diff.p.iter().map(ResidualSummary::of).collect(),
    }))
}

/// Every row of the table, checked.
pub fn table3_catalog(n: &Expr) -> Result<Vec<Table3Check>, ExprError> {
    let mut out = Vec::new();
    for ki in kinematic_integrals(n) {
        if let Some(c) = check_table3_row(&ki, n)? {
            out.push(c);
        }
    }
    Ok(out)
}
