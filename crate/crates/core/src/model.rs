//! The radial Euler system, the equation-of-state catalog and the
//! equivalence with radial gas dynamics.

use crate::expr::{
    d_r, partial, substitute, substitute_functions, total_derivative_n, Atom, Expr, Exponent,
    Field, FuncDef, Poly, SystemContext, Var, Q,
};

/// Family an equation of state belongs to. `kappa`, `f` are opaque
/// functions unless the EOS has been instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EosKind {
    /// `p(rho, S)`.
    General,
    /// `kappa(S) f(rho)`.
    Separable,
    /// `f(rho) + kappa(S)`.
    Additive,
    /// `f(kappa(S) rho) rho^(1+q)`, `q != -1`.
    ScaledPower { q: Expr },
    /// `f(kappa(S) rho) + k ln(rho)`.
    LogForm { k: Expr },
    /// `f(rho)`.
    Barotropic,
    /// `kappa(S) rho^(1+q)`; `q = 2/n` is the conformally invariant case.
    Polytropic { q: Expr },
    /// `kappa(S)`.
    Entropic,
    /// `kappa(S) + k ln(rho)`.
    EntropicLog { k: Expr },
    /// `k ln(rho)`.
    LogBarotropic { k: Expr },
    /// `k rho^(1+q)`.
    PowerLaw { k: Expr, q: Expr },
    /// Any explicit pressure expression.
    Custom,
}

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("pressure must depend on rho or S")]
    ConstantPressure,
    #[error("pressure may only depend on rho, S and constants")]
    BadPressure,
    #[error("unknown equation of state kind `{0}`")]
    UnknownKind(String),
}

/// Equation of state `p(rho, S)` with its internal energy.
///
/// When `p/rho^2` has no closed-form `rho`-antiderivative the energy keeps
/// an opaque part `e(rho, S)` together with the rule `e_rho = (...)/rho^2`,
/// which [`Eos::resolve`] applies.
#[derive(Clone, Debug)]
pub struct Eos {
    pub kind: EosKind,
    pub pressure: Expr,
    energy: Expr,
    energy_rules: Vec<FuncDef>,
}

fn kappa() -> Expr {
    Expr::func("kappa", vec![Expr::s()])
}

fn f_of(x: Expr) -> Expr {
    Expr::func("f", vec![x])
}

fn one_plus(q: &Expr) -> Expr {
    &Expr::one() + q
}

pub const ENERGY_FN: &str = "e";

impl Eos {
    pub fn new(kind: EosKind, pressure: Expr) -> Result<Eos, ModelError> {
        let rho = Atom::jet(Field::Rho, 0, 0);
        let s = Atom::jet(Field::S, 0, 0);
        for a in pressure.plain_atoms() {
            if a.as_jet().is_some() && a != rho && a != s {
                return Err(ModelError::BadPressure);
            }
            if a.as_sym().is_none() && a.as_jet().is_none() {
                return Err(ModelError::BadPressure);
            }
        }
        if partial(&pressure, rho).is_zero() && partial(&pressure, s).is_zero() {
            return Err(ModelError::ConstantPressure);
        }
        let (energy, energy_rules) = integrate_energy(&pressure);
        Ok(Eos {
            kind,
            pressure,
            energy,
            energy_rules,
        })
    }

    fn catalog(kind: EosKind, pressure: Expr) -> Eos {
        Eos::new(kind, pressure).expect("catalog pressure is valid")
    }

    pub fn general() -> Eos {
        Eos::catalog(EosKind::General, Expr::func("p", vec![Expr::rho(), Expr::s()]))
    }

    pub fn separable() -> Eos {
        Eos::catalog(EosKind::Separable, &kappa() * &f_of(Expr::rho()))
    }

    pub fn additive() -> Eos {
        Eos::catalog(EosKind::Additive, &f_of(Expr::rho()) + &kappa())
    }

    pub fn scaled_power(q: Expr) -> Eos {
        let p = &f_of(&kappa() * &Expr::rho()) * &Expr::rho().pow(&one_plus(&q)).unwrap();
        Eos::catalog(EosKind::ScaledPower { q }, p)
    }

    pub fn log_form(k: Expr) -> Eos {
        let p = &f_of(&kappa() * &Expr::rho()) + &(&k * &Expr::rho().ln());
        Eos::catalog(EosKind::LogForm { k }, p)
    }

    pub fn barotropic() -> Eos {
        Eos::catalog(EosKind::Barotropic, f_of(Expr::rho()))
    }

    pub fn polytropic(q: Expr) -> Eos {
        let p = &kappa() * &Expr::rho().pow(&one_plus(&q)).unwrap();
        Eos::catalog(EosKind::Polytropic { q }, p)
    }

    /// `kappa(S) rho^(1+2/n)`.
    pub fn polytropic_critical(n: &Expr) -> Eos {
        Eos::polytropic(&Expr::int(2) / n)
    }

    pub fn entropic() -> Eos {
        Eos::catalog(EosKind::Entropic, kappa())
    }

    pub fn entropic_log(k: Expr) -> Eos {
        let p = &kappa() + &(&k * &Expr::rho().ln());
        Eos::catalog(EosKind::EntropicLog { k }, p)
    }

    pub fn log_barotropic(k: Expr) -> Eos {
        let p = &k * &Expr::rho().ln();
        Eos::catalog(EosKind::LogBarotropic { k }, p)
    }

    pub fn power_law(k: Expr, q: Expr) -> Eos {
        let p = &k * &Expr::rho().pow(&one_plus(&q)).unwrap();
        Eos::catalog(EosKind::PowerLaw { k, q }, p)
    }

    pub fn custom(pressure: Expr) -> Result<Eos, ModelError> {
        Eos::new(EosKind::Custom, pressure)
    }

    /// Replaces opaque `kappa`, `f`, ... by concrete definitions, keeping the
    /// family tag.
    pub fn instantiate(&self, defs: &[FuncDef]) -> Result<Eos, ModelError> {
        Eos::new(self.kind.clone(), substitute_functions(&self.pressure, defs))
    }

    /// Builds a catalog EOS from a configuration kind name.
    pub fn from_kind_name(kind: &str, q: Option<Expr>, k: Option<Expr>, n: &Expr) -> Result<Eos, ModelError> {
        let q = || q.clone().unwrap_or_else(|| Expr::sym("q"));
        let k = || k.clone().unwrap_or_else(|| Expr::sym("k"));
        Ok(match kind {
            "general" => Eos::general(),
            "separable" => Eos::separable(),
            "additive" => Eos::additive(),
            "scaled_power" => Eos::scaled_power(q()),
            "log_form" => Eos::log_form(k()),
            "barotropic" => Eos::barotropic(),
            "polytropic" => Eos::polytropic(q()),
            "polytropic_critical" => Eos::polytropic_critical(n),
            "entropic" => Eos::entropic(),
            "entropic_log" => Eos::entropic_log(k()),
            "log_barotropic" => Eos::log_barotropic(k()),
            "power_law" => Eos::power_law(k(), q()),
            other => return Err(ModelError::UnknownKind(other.to_string())),
        })
    }

    /// Internal energy per unit mass, `e = ∫ p/rho^2 drho` with zero
    /// integration constant.
    pub fn internal_energy(&self) -> &Expr {
        &self.energy
    }

    /// Applies the derivative rules of any opaque part of `e`.
    pub fn resolve(&self, e: &Expr) -> Expr {
        if self.energy_rules.is_empty() {
            e.clone()
        } else {
            substitute_functions(e, &self.energy_rules)
        }
    }

    pub fn temperature(&self) -> Expr {
        self.resolve(&partial(&self.energy, Atom::jet(Field::S, 0, 0)))
    }

    /// `a^2 = ∂p/∂rho` at fixed `S`.
    pub fn sound_speed_sq(&self) -> Expr {
        partial(&self.pressure, Atom::jet(Field::Rho, 0, 0))
    }

    pub fn p_rho(&self) -> Expr {
        self.sound_speed_sq()
    }

    pub fn p_s(&self) -> Expr {
        partial(&self.pressure, Atom::jet(Field::S, 0, 0))
    }

    /// `rho^2 e_rho - p`, zero for every well-formed EOS.
    pub fn energy_identity(&self) -> Expr {
        let rho = Expr::rho();
        let e_rho = self.resolve(&partial(&self.energy, Atom::jet(Field::Rho, 0, 0)));
        &(&(&rho * &rho) * &e_rho) - &self.pressure
    }

    pub fn context(&self, n: &Expr) -> SystemContext {
        SystemContext::fluid(n.clone(), self.pressure.clone())
    }

    /// Sound speed squared as a function of `(rho, p)` where the EOS allows
    /// eliminating `S` in closed form.
    pub fn gas_sound_speed_sq(&self) -> Option<Expr> {
        let p = Expr::field(Field::P);
        match &self.kind {
            EosKind::Polytropic { q } => Some(&(&one_plus(q) * &p) / &Expr::rho()),
            EosKind::PowerLaw { q, .. } => Some(&(&one_plus(q) * &p) / &Expr::rho()),
            EosKind::Entropic => Some(Expr::zero()),
            _ => None,
        }
    }

    /// Differential relations in `p` alone whose vanishing characterizes the
    /// family.
    pub fn characterization(kind: &EosKind, p: &Expr) -> Vec<Expr> {
        let rho_a = Atom::jet(Field::Rho, 0, 0);
        let s_a = Atom::jet(Field::S, 0, 0);
        let rho = Expr::rho();
        let pr = partial(p, rho_a);
        let ps = partial(p, s_a);
        let prs = partial(&pr, s_a);
        let dilation = |c: &Expr| &(&rho * &pr) - c;
        match kind {
            EosKind::General | EosKind::Custom => vec![],
            EosKind::Separable => vec![&(p * &prs) - &(&pr * &ps)],
            EosKind::Additive => vec![prs],
            EosKind::Barotropic => vec![ps],
            EosKind::Entropic => vec![pr],
            EosKind::Polytropic { q } => vec![dilation(&(&one_plus(q) * p))],
            EosKind::ScaledPower { q } => {
                vec![partial(&(&dilation(&(&one_plus(q) * p)) / &ps), rho_a)]
            }
            EosKind::LogForm { k } => vec![partial(&(&dilation(k) / &ps), rho_a)],
            EosKind::EntropicLog { k } => vec![dilation(k)],
            EosKind::LogBarotropic { k } => vec![dilation(k), ps],
            EosKind::PowerLaw { q, .. } => vec![dilation(&(&one_plus(q) * p)), ps],
        }
    }

    /// Whether this pressure satisfies the characterization of `kind`.
    pub fn belongs_to(&self, kind: &EosKind) -> bool {
        Eos::characterization(kind, &self.pressure)
            .iter()
            .all(|e| e.is_zero())
    }
}

/// Term-wise `∫ p/rho^2 drho`. Terms `c·X·rho^a` and `c·X·rho^a·ln(rho)` with
/// `X` free of `rho` integrate in closed form; the rest goes into an opaque
/// `e(rho, S)` with a derivative rule.
fn integrate_energy(p: &Expr) -> (Expr, Vec<FuncDef>) {
    let rho_a = Atom::jet(Field::Rho, 0, 0);
    let ln_rho = Expr::rho().ln().as_atom();
    let integrand = p / &(&Expr::rho() * &Expr::rho());
    let mut closed = Expr::zero();
    let mut rest = Expr::zero();
    if !integrand.is_polynomial() {
        return opaque_energy(&integrand);
    }
    for (m, c) in integrand.numerator().terms() {
        let mut power = Exponent::int(0);
        let mut has_ln = false;
        let mut others = crate::expr::Mono::new();
        let mut ok = true;
        for (a, e) in m.iter() {
            if *a == rho_a {
                power = e.clone();
            } else if Some(*a) == ln_rho && *e == Exponent::int(1) {
                has_ln = true;
            } else {
                let inner = Expr::atom(*a);
                if inner.plain_atoms().contains(&rho_a) {
                    ok = false;
                }
                others.push((*a, e.clone()));
            }
        }
        let term = Expr::from_poly(Poly::monomial(m.clone(), *c));
        if !ok {
            rest = &rest + &term;
            continue;
        }
        let coeff = Expr::from_poly(Poly::monomial(others, *c));
        let m1 = power.add(&Exponent::int(1));
        let v = match (m1.is_zero(), has_ln) {
            // ∫ rho^-1 = ln rho
            (true, false) => &coeff * &Expr::rho().ln(),
            // ∫ rho^-1 ln rho = (ln rho)^2 / 2
            (true, true) => &coeff * &Expr::rho().ln().powi(2).scale(Q::new(1, 2)),
            (false, false) => &coeff * &(&Expr::rho().pow_exponent(&m1) / &m1.to_expr()),
            (false, true) => {
                let inv = m1.to_expr().recip();
                let lnr = Expr::rho().ln();
                &(&coeff * &Expr::rho().pow_exponent(&m1)) * &(&(&lnr * &inv) - &(&inv * &inv))
            }
        };
        closed = &closed + &v;
    }
    if rest.is_zero() {
        return (closed, Vec::new());
    }
    let (opaque, rules) = opaque_energy(&rest);
    (&closed + &opaque, rules)
}

fn opaque_energy(integrand: &Expr) -> (Expr, Vec<FuncDef>) {
    let x = Expr::sym("rho_");
    let y = Expr::sym("S_");
    let s = Atom::jet(Field::S, 0, 0);
    let body = substitute(
        integrand,
        &[(Atom::jet(Field::Rho, 0, 0), x), (s, y)],
    );
    // Barotropic integrands give e(rho), so e_S vanishes structurally.
    if !integrand.plain_atoms().contains(&s) {
        let rule = FuncDef::partial_rule(ENERGY_FN, &["rho_"], 0, body);
        return (Expr::func(ENERGY_FN, vec![Expr::rho()]), vec![rule]);
    }
    let rule = FuncDef::partial_rule(ENERGY_FN, &["rho_", "S_"], 0, body);
    (
        Expr::func(ENERGY_FN, vec![Expr::rho(), Expr::s()]),
        vec![rule],
    )
}

/// Left sides of the momentum, continuity and entropy equations on
/// arbitrary jets.
pub fn euler_residuals(eos: &Eos, n: &Expr) -> [Expr; 3] {
    let u = Expr::u();
    let rho = Expr::rho();
    let geo = &(n - &Expr::one()) / &Expr::r();
    [
        &(&Expr::jet(Field::U, 1, 0) + &(&u * &Expr::jet(Field::U, 0, 1)))
            + &(&d_r(&eos.pressure) / &rho),
        &(&Expr::jet(Field::Rho, 1, 0) + &d_r(&(&u * &rho))) + &(&(&geo * &u) * &rho),
        &Expr::jet(Field::S, 1, 0) + &(&u * &Expr::jet(Field::S, 0, 1)),
    ]
}

/// Replaces every jet of `U`, `rho`, `S` by the corresponding derivative of
/// explicit fields given as expressions in `(t, r)`.
pub fn evaluate_on_fields(e: &Expr, fields: &[Expr; 3]) -> Expr {
    let pairs: Vec<(Atom, Expr)> = e
        .plain_atoms()
        .into_iter()
        .filter_map(|a| {
            let (f, i, j) = a.as_jet()?;
            let idx = Field::FLUID.iter().position(|x| *x == f)?;
            let v = total_derivative_n(&total_derivative_n(&fields[idx], Var::T, i), Var::R, j);
            Some((a, v))
        })
        .collect();
    substitute(e, &pairs)
}

/// Radial gas-dynamics form of an EOS.
#[derive(Clone, Debug)]
pub struct GasDynamics {
    /// `a^2 = ∂p/∂rho|_S` in terms of `(rho, S)`.
    pub a2: Expr,
    /// `p_t + U p_r + a^2 rho (U_r + (n-1)U/r)` with `p` as a field.
    pub pressure_residual: Expr,
}

pub fn to_gas_dynamics(eos: &Eos, n: &Expr) -> GasDynamics {
    let a2 = eos.sound_speed_sq();
    let u = Expr::u();
    let div = &Expr::jet(Field::U, 0, 1) + &(&(&(n - &Expr::one()) / &Expr::r()) * &u);
    let pressure_residual = &(&Expr::jet(Field::P, 1, 0) + &(&u * &Expr::jet(Field::P, 0, 1)))
        + &(&(&a2 * &Expr::rho()) * &div);
    GasDynamics {
        a2,
        pressure_residual,
    }
}

/// Writes every `p`-jet as the matching total derivative of `p(rho, S)`.
pub fn pressure_jets_to_fluid(e: &Expr, eos: &Eos) -> Expr {
    let pairs: Vec<(Atom, Expr)> = e
        .plain_atoms()
        .into_iter()
        .filter_map(|a| {
            let (f, i, j) = a.as_jet()?;
            (f == Field::P).then(|| {
                let v = total_derivative_n(&total_derivative_n(&eos.pressure, Var::T, i), Var::R, j);
                (a, v)
            })
        })
        .collect();
    substitute(e, &pairs)
}

/// The pressure equation restricted to fluid solutions; zero exactly when
/// the gas-dynamics formulation is equivalent.
pub fn gas_equivalence_residual(eos: &Eos, n: &Expr) -> Expr {
    let gas = to_gas_dynamics(eos, n);
    let fluid = pressure_jets_to_fluid(&gas.pressure_residual, eos);
    eos.context(n).restrict(&fluid)
}
