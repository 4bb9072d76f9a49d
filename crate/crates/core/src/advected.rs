//! Entropic-EOS advected scalars `J_{1,l}`, `J_{2,l}`, the function `A`,
//! the Hamiltonian symmetries they generate and the two first-order group
//! flows of the kinematic integrals.
//!
//! `A(r, U, w) = ∫_0^1 r dy / sqrt(U² + (2/n)(1 - y^n) r w)` with `w = p_r/ρ`
//! stays an opaque three-argument function in symbolic work. Numerically it
//! is evaluated after the substitution `y = 1 - s²`, which removes the
//! `(1 - y^n)^(-1/2)` endpoint singularity at `U = 0`.

use std::sync::{Arc, Mutex};

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::expr::{
    d_r, d_t, partial, substitute, substitute_functions, Atom, Evaluator, Expr, ExprError, Field,
    FuncDef, Restrictor, SamplePoint, Valuation, Var, Q,
};
use crate::hamiltonian::hamiltonian_symmetry_with;
use crate::model::Eos;
use crate::numeric::{bisect, integrate, FieldSource, NumericError, ScalarFn};
use crate::symmetry::{commutator, Characteristic, PointGenerator, ResidualSummary};

pub const A_FN: &str = "A";
pub const DEFAULT_A_TOL: f64 = 1e-10;

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum AdvectedError {
    #[error("radicand of A is not positive on (0, 1) at r = {r}, U = {u}, w = {w}")]
    Domain { r: f64, u: f64, w: f64 },
    #[error("enclosed mass is not strictly increasing (rho <= 0 near r = {0})")]
    MassNotMonotone(f64),
    #[error("target mass {0} is outside the source range")]
    MassOutOfRange(f64),
    #[error("implicit entropy solve did not converge at (t, r) = ({t}, {r})")]
    ImplicitSolve { t: f64, r: f64 },
    #[error("source solution is undefined at (t, r) = ({t}, {r})")]
    OutsideSource { t: f64, r: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

// ---------------------------------------------------------------- numeric A

/// True when `U² + (2/n)(1 - y^n) r w > 0` for every `y` in `(0, 1)`.
pub fn radicand_ok(r: f64, u: f64, w: f64, n: f64) -> bool {
    let c = 2.0 / n * r * w;
    let at_zero = u * u + c;
    let at_one = u * u;
    at_zero > 0.0 && (at_one > 0.0 || c > 0.0)
}

/// `1 - (1 - s²)^n` without cancellation for small `s`.
fn one_minus_pow(s: f64, n: f64) -> f64 {
    -(n * (-s * s).ln_1p()).exp_m1()
}

/// `A(r, U, w)` by adaptive Gauss–Kronrod quadrature to absolute `tol`.
pub fn eval_a(r: f64, u: f64, w: f64, n: f64, tol: f64) -> Result<f64, AdvectedError> {
    if !radicand_ok(r, u, w, n) {
        return Err(AdvectedError::Domain { r, u, w });
    }
    let c = 2.0 / n * r * w;
    let g = |s: f64| {
        if s == 0.0 {
            // Limit of 2 s r / sqrt(U² + c n s²) as s -> 0.
            return if u != 0.0 { 0.0 } else { 2.0 * r / (c * n).sqrt() };
        }
        2.0 * s * r / (u * u + c * one_minus_pow(s, n)).sqrt()
    };
    Ok(integrate(g, 0.0, 1.0, tol)?)
}

/// Partials of `A` from symbolic derivatives of the integrand, integrated
/// numerically. Derivatives in `U` are singular at `U = 0`.
pub struct APartials {
    n: f64,
    tol: f64,
    integrand: Expr,
    cache: Mutex<FxHashMap<Vec<u32>, Expr>>,
}

struct NodeVal {
    r: f64,
    u: f64,
    w: f64,
    y: f64,
    n: f64,
}

impl Valuation for NodeVal {
    fn sym(&self, name: &str) -> f64 {
        match name {
            "r_" => self.r,
            "U_" => self.u,
            "w_" => self.w,
            "y_" => self.y,
            "n_" => self.n,
            _ => f64::NAN,
        }
    }
    fn var(&self, _: Var) -> f64 {
        f64::NAN
    }
    fn jet(&self, _: Field, _: u32, _: u32) -> f64 {
        f64::NAN
    }
    fn func(&self, _: &str, _: &[f64], _: &[u32]) -> f64 {
        f64::NAN
    }
}

/// `r/sqrt(U² + (2/n)(1 - y^n) r w)` in the placeholder symbols.
fn a_integrand_symbolic(r: Expr, u: Expr, w: Expr, n: Expr, y: Expr) -> Expr {
    let yn = y.pow(&n).expect("polynomial exponent");
    let rad = &(&u * &u) + &(&(&(&Expr::int(2) / &n) * &(&Expr::one() - &yn)) * &(&r * &w));
    &r * &rad.powq(Q::new(-1, 2))
}

impl APartials {
    pub fn new(n: f64, tol: f64) -> APartials {
        let s = |x: &str| Expr::sym(x);
        APartials {
            n,
            tol,
            integrand: a_integrand_symbolic(s("r_"), s("U_"), s("w_"), s("n_"), s("y_")),
            cache: Mutex::new(FxHashMap::default()),
        }
    }

    fn derivative(&self, deriv: &[u32]) -> Expr {
        let mut cache = self.cache.lock().expect("cache lock");
        cache
            .entry(deriv.to_vec())
            .or_insert_with(|| {
                let mut e = self.integrand.clone();
                for (slot, name) in ["r_", "U_", "w_"].iter().enumerate() {
                    for _ in 0..deriv.get(slot).copied().unwrap_or(0) {
                        e = partial(&e, Atom::sym(name));
                    }
                }
                e
            })
            .clone()
    }

    /// `∂^deriv A` at `(r, U, w)`.
    pub fn eval(&self, r: f64, u: f64, w: f64, deriv: &[u32]) -> Result<f64, AdvectedError> {
        if deriv.iter().all(|d| *d == 0) {
            return eval_a(r, u, w, self.n, self.tol);
        }
        if !radicand_ok(r, u, w, self.n) {
            return Err(AdvectedError::Domain { r, u, w });
        }
        let e = self.derivative(deriv);
        let n = self.n;
        let g = |s: f64| {
            let v = NodeVal { r, u, w, y: 1.0 - s * s, n };
            2.0 * s * Evaluator::new(&v).eval(&e)
        };
        Ok(integrate(g, 0.0, 1.0, self.tol)?)
    }

    /// As an override for sample-point valuations.
    pub fn as_override(self: &Arc<Self>) -> Arc<dyn Fn(&[f64], &[u32]) -> f64 + Send + Sync> {
        let me = self.clone();
        Arc::new(move |a: &[f64], d: &[u32]| me.eval(a[0], a[1], a[2], d).unwrap_or(f64::NAN))
    }
}

// ------------------------------------------------------------ symbolic side

fn kappa() -> Expr {
    Expr::func("kappa", vec![Expr::s()])
}

/// `w = p_r/ρ` for the entropic EOS `p = κ(S)`.
pub fn w_entropic() -> Expr {
    &d_r(&kappa()) / &Expr::rho()
}

fn a_args() -> Vec<Expr> {
    vec![Expr::r(), Expr::u(), w_entropic()]
}

pub fn a_node() -> Expr {
    Expr::func(A_FN, a_args())
}

pub fn a_partial(d: [u32; 3]) -> Expr {
    Expr::func_deriv(A_FN, a_args(), d.to_vec())
}

/// Transport identity of `A` for `U > 0`,
/// `U A_r - w A_U + (n-1)(U w/r) A_w = 1`, as a rule for `A_r`.
pub fn a_transport_rule(n: &Expr) -> FuncDef {
    let (r, u, w) = (Expr::sym("r_"), Expr::sym("U_"), Expr::sym("w_"));
    let args = vec![r.clone(), u.clone(), w.clone()];
    let a_u = Expr::func_deriv(A_FN, args.clone(), vec![0, 1, 0]);
    let a_w = Expr::func_deriv(A_FN, args, vec![0, 0, 1]);
    let body = &(&(&Expr::one() + &(&w * &a_u))
        - &(&(&(&(n - &Expr::one()) * &u) * &w) / &r * &a_w))
        / &u;
    FuncDef::partial_rule(A_FN, &["r_", "U_", "w_"], 0, body)
}

/// First partials of `A` in terms of `A` itself, from the transport
/// identity and the two homogeneities `r A_r - w A_w = A` and
/// `U A_U + 2 w A_w = -A` of the integral. Valid for `U > 0`, `w != 0`.
pub fn a_reduction_rules(n: &Expr) -> Vec<FuncDef> {
    let (r, u, w) = (Expr::sym("r_"), Expr::sym("U_"), Expr::sym("w_"));
    let a = Expr::func(A_FN, vec![r.clone(), u.clone(), w.clone()]);
    let a_w = &(&(&(&r * &u) - &(&(&u * &u) * &a)) - &(&(&r * &w) * &a))
        / &(&w * &(&(&(n * &u) * &u) + &(&(&Expr::int(2) * &r) * &w)));
    let a_r = &(&a + &(&w * &a_w)) / &r;
    let a_u = -(&(&a + &(&(&Expr::int(2) * &w) * &a_w)) / &u);
    let p = ["r_", "U_", "w_"];
    vec![
        FuncDef::partial_rule(A_FN, &p, 0, a_r),
        FuncDef::partial_rule(A_FN, &p, 1, a_u),
        FuncDef::partial_rule(A_FN, &p, 2, a_w),
    ]
}

/// Applies rules for `A` until no derivative of `A` they cover remains.
pub fn apply_a_rules(e: &Expr, rules: &[FuncDef]) -> Expr {
    let mut cur = e.clone();
    loop {
        let next = substitute_functions(&cur, rules);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Homogeneity defects `r A_r - w A_w - A` and `U A_U + 2 w A_w + A`.
pub fn a_homogeneity_defects(ap: &APartials, r: f64, u: f64, w: f64) -> Result<[f64; 2], AdvectedError> {
    let a = ap.eval(r, u, w, &[0, 0, 0])?;
    let ar = ap.eval(r, u, w, &[1, 0, 0])?;
    let au = ap.eval(r, u, w, &[0, 1, 0])?;
    let aw = ap.eval(r, u, w, &[0, 0, 1])?;
    Ok([r * ar - w * aw - a, u * au + 2.0 * w * aw + a])
}

/// Residual of the transport identity at a numeric point, for checking the
/// quadrature against the rule.
pub fn a_transport_defect(ap: &APartials, r: f64, u: f64, w: f64) -> Result<f64, AdvectedError> {
    let n = ap.n;
    let ar = ap.eval(r, u, w, &[1, 0, 0])?;
    let au = ap.eval(r, u, w, &[0, 1, 0])?;
    let aw = ap.eval(r, u, w, &[0, 0, 1])?;
    Ok(u * ar - w * au + (n - 1.0) * u * w / r * aw - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    J1,
    J2,
}

fn recursion(e: &Expr, n: &Expr) -> Expr {
    crate::casimir::recursion_apply(e, n)
}

/// `J_{1,l} = R^(l-1)(U² + (2/n) r w)` and `J_{2,l} = R^(l-1)(A - t)`.
pub fn entropic_scalar(branch: Branch, l: u32, n: &Expr) -> Expr {
    assert!(l >= 1, "entropic hierarchy starts at l = 1");
    let base = match branch {
        Branch::J1 => {
            &(&Expr::u() * &Expr::u()) + &(&(&(&Expr::int(2) / n) * &Expr::r()) * &w_entropic())
        }
        Branch::J2 => &a_node() - &Expr::t(),
    };
    (1..l).fold(base, |e, _| recursion(&e, n))
}

/// Parses `f` written in the symbols `J1` (for `J_{1,l}`) and `J2`.
pub fn parse_f(text: &str) -> Result<Expr, ExprError> {
    crate::expr::Parser::new().with_symbols(&["J1", "J2"]).parse(text)
}

fn j_syms() -> [Atom; 2] {
    [Atom::sym("J1"), Atom::sym("J2")]
}

/// `f(J_{1,l}, J_{2,l})` with the scalars substituted.
pub fn instantiate(f: &Expr, l: u32, n: &Expr) -> Expr {
    let [a, b] = j_syms();
    substitute(
        f,
        &[
            (a, entropic_scalar(Branch::J1, l, n)),
            (b, entropic_scalar(Branch::J2, l, n)),
        ],
    )
}

fn entropic_on_shell(e: &Expr, n: &Expr, rules: &[FuncDef]) -> Expr {
    let ctx = Eos::entropic().context(n);
    let mut r = Restrictor::new(&ctx);
    let e = r.restrict(e);
    if rules.is_empty() {
        e
    } else {
        apply_a_rules(&e, rules)
    }
}

/// `f^{(i)}_{·,l} = (-R)^i f_{J_{·,l}}` for both branches.
pub fn f_derivatives(f: &Expr, l: u32, i: u32, n: &Expr) -> [Expr; 2] {
    j_syms().map(|a| {
        let d = instantiate(&partial(f, a), l, n);
        (0..i).fold(d, |e, _| -recursion(&e, n))
    })
}

/// The generator stated for `f(J_{1,l}, J_{2,l})`:
/// `τ = -2F1`, `ξ = A_U F2`, `η^U = -A_r F2`,
/// `η^ρ = (2 D_t F1 - D_r(A_U F2) - (n-1)/r A_U F2) ρ`, with
/// `F· = f^{(l-1)}_{·,l}`.
pub fn theorem51_generator(f: &Expr, l: u32, n: &Expr) -> PointGenerator {
    theorem51_generator_with(f, l, n, false)
}

/// As [`theorem51_generator`] but with `η^U = -(A_r + (n-1) w A_w / r) F2`,
/// which is what `H∇(ρ f)` actually produces.
pub fn theorem51_generator_corrected(f: &Expr, l: u32, n: &Expr) -> PointGenerator {
    theorem51_generator_with(f, l, n, true)
}

fn theorem51_generator_with(f: &Expr, l: u32, n: &Expr, corrected: bool) -> PointGenerator {
    let [f1, f2] = f_derivatives(f, l, l - 1, n);
    let a_u = a_partial([0, 1, 0]);
    let geo = &(n - &Expr::one()) / &Expr::r();
    let mut a_r = a_partial([1, 0, 0]);
    if corrected {
        a_r = &a_r + &(&(&geo * &w_entropic()) * &a_partial([0, 0, 1]));
    }
    let au_f2 = &a_u * &f2;
    let eta_rho = &(&(&(&Expr::int(2) * &d_t(&f1)) - &d_r(&au_f2)) - &(&geo * &au_f2)) * &Expr::rho();
    PointGenerator::new(
        &Expr::int(-2) * &f1,
        au_f2.clone(),
        [-(&a_r * &f2), eta_rho, Expr::zero()],
    )
}

/// `H∇` of `∫ ρ f(J_{1,l}, J_{2,l}) r^(n-1) dr`.
pub fn hamiltonian_characteristic(f: &Expr, l: u32, n: &Expr) -> Result<Characteristic, ExprError> {
    let phi = &Expr::rho() * &instantiate(f, l, n);
    hamiltonian_symmetry_with(&phi, &Eos::entropic(), n, &[])
}

fn on_shell(c: &Characteristic, n: &Expr, rules: &[FuncDef]) -> Characteristic {
    c.map(|e| entropic_on_shell(e, n, rules))
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem51Check {
    pub f: String,
    pub l: u32,
    /// Equal without using the transport identity of `A`.
    pub matches_plain: bool,
    /// Equal once `A_r` is eliminated with the transport identity.
    pub matches: bool,
    /// The corrected generator matches (modulo the transport identity).
    pub matches_corrected: bool,
    pub residual: Vec<ResidualSummary>,
}

/// Compares the Hamiltonian symmetry of `ρ f` with the stated generator on
/// the solution space.
pub fn check_theorem51(f: &Expr, l: u32, n: &Expr) -> Result<Theorem51Check, ExprError> {
    let ham = hamiltonian_characteristic(f, l, n)?;
    let stated = theorem51_generator(f, l, n).to_characteristic();
    let diff = ham.sub(&stated);
    let plain = on_shell(&diff, n, &[]);
    let ruled = on_shell(&diff, n, &[a_transport_rule(n)]);
    let corrected = ham.sub(&theorem51_generator_corrected(f, l, n).to_characteristic());
    Ok(Theorem51Check {
        f: f.to_string(),
        l,
        matches_plain: plain.is_zero(),
        matches: ruled.is_zero(),
        matches_corrected: reduces_to_zero(&on_shell(&corrected, n, &[]), n),
        residual: ruled.p.iter().map(ResidualSummary::of).collect(),
    })
}

/// `(P^U, P^ρ, P^S)` of the stated second-order symmetry
/// `A_U ∂_r - A_r ∂_U - ρ(D_r A_U + (n-1)/r A_U) ∂_ρ`.
pub fn j2_symmetry_literal(n: &Expr) -> Characteristic {
    let a_u = a_partial([0, 1, 0]);
    let geo = &(n - &Expr::one()) / &Expr::r();
    PointGenerator::new(
        Expr::zero(),
        a_u.clone(),
        [
            -a_partial([1, 0, 0]),
            -(&Expr::rho() * &(&d_r(&a_u) + &(&geo * &a_u))),
            Expr::zero(),
        ],
    )
    .to_characteristic()
}

/// `h = 2 f_{J1} g_{J2} - 2 f_{J2} g_{J1}`.
pub fn closure_h(f: &Expr, g: &Expr) -> Expr {
    let [a, b] = j_syms();
    let two = Expr::int(2);
    &(&(&two * &partial(f, a)) * &partial(g, b)) - &(&(&two * &partial(f, b)) * &partial(g, a))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureCheck {
    pub f: String,
    pub g: String,
    pub h: String,
    /// `[X_f, X_g] = X_h` on the solution space.
    pub closes: bool,
    /// `X_h` vanishes identically.
    pub h_symmetry_zero: bool,
    /// `h` is affine in `(J1, J2)`.
    pub h_linear: bool,
}

fn is_affine(h: &Expr) -> bool {
    let [a, b] = j_syms();
    [a, b]
        .iter()
        .all(|x| [a, b].iter().all(|y| partial(&partial(h, *x), *y).is_zero()))
}

/// Commutator of the `l = 1` symmetries of `f` and `g` against `X_h`.
pub fn commutator_closure(f: &Expr, g: &Expr, n: &Expr) -> Result<ClosureCheck, ExprError> {
    let transport = [a_transport_rule(n)];
    let ctx = Eos::entropic().context(n);
    let pf = on_shell(&hamiltonian_characteristic(f, 1, n)?, n, &transport);
    let pg = on_shell(&hamiltonian_characteristic(g, 1, n)?, n, &transport);
    let h = closure_h(f, g);
    let ph = on_shell(&hamiltonian_characteristic(&h, 1, n)?, n, &transport);
    let br = commutator(&pf, &pg).restrict(&ctx);
    Ok(ClosureCheck {
        f: f.to_string(),
        g: g.to_string(),
        h: h.to_string(),
        closes: reduces_to_zero(&br.sub(&ph), n),
        h_symmetry_zero: reduces_to_zero(&ph, n),
        h_linear: is_affine(&h),
    })
}

/// Zero test modulo all identities of `A`. The transport rule is applied
/// first since the full reduction introduces rational coefficients.
fn reduces_to_zero(c: &Characteristic, n: &Expr) -> bool {
    let transport = [a_transport_rule(n)];
    let c = c.map(|e| apply_a_rules(e, &transport));
    if c.is_zero() {
        return true;
    }
    let full = a_reduction_rules(n);
    c.map(|e| apply_a_rules(e, &full)).is_zero()
}

/// Whether the `l = 1` symmetries of `f` and `g` commute.
pub fn symmetries_commute(f: &Expr, g: &Expr, n: &Expr) -> Result<bool, ExprError> {
    let transport = [a_transport_rule(n)];
    let ctx = Eos::entropic().context(n);
    let pf = on_shell(&hamiltonian_characteristic(f, 1, n)?, n, &transport);
    let pg = on_shell(&hamiltonian_characteristic(g, 1, n)?, n, &transport);
    Ok(reduces_to_zero(&commutator(&pf, &pg).restrict(&ctx), n))
}

// ------------------------------------------------ proof-level identities

fn weight(n: &Expr) -> Expr {
    Expr::r().pow(&(n - &Expr::one())).expect("polynomial exponent")
}

/// The Euler-operator expressions `Q^U, Q^ρ, Q^S` of
/// `r^(n-1) ρ f(J_{·,l})` with `f` opaque, each compared with its closed
/// form. Returns which of the three hold.
pub fn q_expressions_check(branch: Branch, l: u32, n: &Expr) -> Result<[bool; 3], ExprError> {
    let j = |k: u32| entropic_scalar(branch, k, n);
    let fk = |e: Expr| Expr::func("f", vec![e]);
    let f = fk(j(l));
    let fprime = Expr::func_deriv("f", vec![j(l)], vec![1]);
    let fi: Vec<Expr> = (0..l)
        .scan(fprime.clone(), |acc, _| {
            let cur = acc.clone();
            *acc = -recursion(acc, n);
            Some(cur)
        })
        .collect();
    let top = fi[(l - 1) as usize].clone();
    let w = weight(n);
    let dens = &(&w * &Expr::rho()) * &f;
    let e = |fld| crate::expr::euler_operator(&dens, fld);
    let (u, rho) = (Expr::u(), Expr::rho());
    let kp = Expr::func_deriv("kappa", vec![Expr::s()], vec![1]);
    let a_u = a_partial([0, 1, 0]);
    let a_w = a_partial([0, 0, 1]);
    let (qu, qr, qs) = match branch {
        Branch::J1 => {
            let sum: Expr = (0..l).map(|i| &j(l - i) * &fi[i as usize]).sum();
            (
                &(&(&Expr::int(2) * &w) * &(&rho * &u)) * &top,
                &w * &(&(&(&(&u * &u) * &top) + &f) - &sum),
                -(&(&(&Expr::int(2) / n) * &kp)
                    * &d_r(&(&Expr::r().pow(n).expect("exponent") * &top))),
            )
        }
        Branch::J2 => {
            let sum: Expr = (0..l - 1).map(|i| &j(l - i) * &fi[i as usize]).sum();
            (
                &(&(&w * &rho) * &a_u) * &top,
                &w * &(&(&f - &(&(&w_entropic() * &a_w) * &top)) - &sum),
                -(&kp * &d_r(&(&(&w * &a_w) * &top))),
            )
        }
    };
    Ok([
        (&e(Field::U)? - &qu).is_zero(),
        (&e(Field::Rho)? - &qr).is_zero(),
        (&e(Field::S)? - &qs).is_zero(),
    ])
}

/// The four Lemma identities for `K = J_{1,1}`, `f` opaque and
/// `K_l = R^l K`: Euler operators in `U`, `S`, `ρ`, and
/// `D_r(f - D_l f') = -K D_r f_K^{(l)}`.
pub fn lemma_identities(l: u32, n: &Expr) -> Result<[bool; 4], ExprError> {
    let k0 = entropic_scalar(Branch::J1, 1, n);
    let kl = |i: u32| (0..i).fold(k0.clone(), |e, _| recursion(&e, n));
    let fp = Expr::func_deriv("f", vec![kl(l)], vec![1]);
    let f = Expr::func("f", vec![kl(l)]);
    let fi: Vec<Expr> = (0..=l)
        .scan(fp.clone(), |acc, _| {
            let cur = acc.clone();
            *acc = -recursion(acc, n);
            Some(cur)
        })
        .collect();
    let top = fi[l as usize].clone();
    let w = weight(n);
    let dk = &(&w * &Expr::rho()) * &k0;
    let df = &(&w * &Expr::rho()) * &f;
    let eu = |e: &Expr, fld| crate::expr::euler_operator(e, fld);
    let d_l: Expr = (0..=l).map(|i| &kl(l - i) * &fi[i as usize]).sum();
    let u_id = &eu(&df, Field::U)? - &(&top * &eu(&dk, Field::U)?);
    let s_id = &(&eu(&df, Field::S)? - &(&top * &eu(&dk, Field::S)?))
        + &(&d_r(&top) * &crate::expr::higher_euler(&dk, Field::S, 1)?);
    let r_id = &(&eu(&df, Field::Rho)? - &(&top * &eu(&dk, Field::Rho)?)) - &(&w * &(&f - &d_l));
    let dop = &d_r(&(&f - &d_l)) + &(&k0 * &d_r(&top));
    Ok([u_id.is_zero(), s_id.is_zero(), r_id.is_zero(), dop.is_zero()])
}

// ------------------------------------------------- numeric cross-checks

/// Valuation that evaluates `A` by quadrature and everything else through a
/// sample point.
struct WithA<'a> {
    base: &'a SamplePoint,
    a: Arc<APartials>,
    y: f64,
}

impl Valuation for WithA<'_> {
    fn sym(&self, name: &str) -> f64 {
        if name == "y_" {
            self.y
        } else {
            self.base.sym(name)
        }
    }
    fn var(&self, v: Var) -> f64 {
        self.base.var(v)
    }
    fn jet(&self, f: Field, t: u32, r: u32) -> f64 {
        self.base.jet(f, t, r)
    }
    fn func(&self, name: &str, args: &[f64], d: &[u32]) -> f64 {
        if name == A_FN {
            self.a.eval(args[0], args[1], args[2], d).unwrap_or(f64::NAN)
        } else {
            self.base.func(name, args, d)
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RepresentationCheck {
    pub l: u32,
    pub points: usize,
    /// Max `|R^(l-1)(A - t) - ∫ R^(l-1)(integrand) dy|` (plus `-t` at `l = 1`).
    pub same_order_diff: f64,
    /// Max difference against the form with one more `R` under the integral.
    pub shifted_order_diff: f64,
}

/// Compares `J_{2,l}` built from opaque `A` with the integral of the
/// recursion operator applied under the `y`-integral.
pub fn j2_representation_check(l: u32, points: &[SamplePoint]) -> RepresentationCheck {
    let n_sym = Expr::sym("n");
    let lhs = entropic_scalar(Branch::J2, l, &n_sym);
    let g = a_integrand_symbolic(
        Expr::r(),
        Expr::u(),
        w_entropic(),
        n_sym.clone(),
        Expr::sym("y_"),
    );
    let under = |k: u32| (0..k).fold(g.clone(), |e, _| recursion(&e, &n_sym));
    let (same, shifted) = (under(l - 1), under(l));
    let t_term = if l == 1 { Expr::t() } else { Expr::zero() };
    let mut out = RepresentationCheck {
        l,
        points: 0,
        same_order_diff: 0.0,
        shifted_order_diff: 0.0,
    };
    for p in points {
        let n = p.sym("n");
        let (r, u) = (p.r, p.jet(Field::U, 0, 0));
        let wv = Evaluator::new(p).eval(&w_entropic());
        if !radicand_ok(r, u, wv, n) || u.abs() < 0.2 {
            continue;
        }
        let a = Arc::new(APartials::new(n, 1e-12));
        let val = WithA { base: p, a: a.clone(), y: 0.0 };
        let left = Evaluator::new(&val).eval(&lhs);
        let tv = Evaluator::new(&val).eval(&t_term);
        let quad = |e: &Expr| {
            integrate(
                |s| {
                    let v = WithA { base: p, a: a.clone(), y: 1.0 - s * s };
                    2.0 * s * Evaluator::new(&v).eval(e)
                },
                0.0,
                1.0,
                1e-12,
            )
            .unwrap_or(f64::NAN)
        };
        let d1 = (left - (quad(&same) - tv)).abs();
        let d2 = (left - (quad(&shifted) - tv)).abs();
        out.points += 1;
        out.same_order_diff = out.same_order_diff.max(d1);
        out.shifted_order_diff = out.shifted_order_diff.max(d2);
    }
    out
}

// ------------------------------------------------ first-order group flows

/// Which density factor the entropy-weighted flow uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DensityFactor {
    /// `(1 + ε S_t f'(S*))^(-1)`, the flow of the computed symmetry.
    Corrected,
    /// `(1 + ε S_t f'(S*))^(S_r/S_t)` as printed.
    Printed,
}

/// The group flows generated by the enthalpy-flux and entropy-weighted
/// energy symmetries.
pub enum FirstOrderFlow {
    Enthalpy {
        n: f64,
        r_max: f64,
    },
    EntropyWeighted {
        f: ScalarFn,
        f_prime: ScalarFn,
        s_range: (f64, f64),
        factor: DensityFactor,
    },
}

const MASS_TOL: f64 = 1e-12;
const S_TOL: f64 = 1e-12;

fn sample(src: &dyn FieldSource, t: f64, r: f64) -> Result<[f64; 3], AdvectedError> {
    src.sample(t, r).ok_or(AdvectedError::OutsideSource { t, r })
}

/// `M(t, r) = ∫_0^r ρ y^(n-1) dy`.
pub fn enclosed_mass(src: &dyn FieldSource, t: f64, r: f64, n: f64) -> Result<f64, AdvectedError> {
    let mut bad = None;
    let m = integrate(
        |y| match src.sample(t, y) {
            Some(v) if v[1] > 0.0 => v[1] * y.powf(n - 1.0),
            _ => {
                bad.get_or_insert(y);
                0.0
            }
        },
        0.0,
        r,
        MASS_TOL,
    )?;
    match bad {
        Some(y) => Err(AdvectedError::MassNotMonotone(y)),
        None => Ok(m),
    }
}

fn central(f: impl Fn(f64) -> Option<f64>, x: f64, h: f64) -> Option<f64> {
    Some((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// `(U*, ρ*, S*)` at `(t, r)` for group parameter `eps`.
pub fn first_order_group_flow(
    flow: &FirstOrderFlow,
    eps: f64,
    src: &dyn FieldSource,
    t: f64,
    r: f64,
) -> Result<[f64; 3], AdvectedError> {
    let here = sample(src, t, r)?;
    if eps == 0.0 {
        return Ok(here);
    }
    match flow {
        FirstOrderFlow::Enthalpy { n, r_max } => {
            let target = enclosed_mass(src, t, r, *n)? - eps;
            if target < 0.0 {
                return Err(AdvectedError::MassOutOfRange(target));
            }
            let r0 = bisect(
                |x| enclosed_mass(src, t, x, *n).map(|m| m - target).unwrap_or(f64::NAN),
                0.0,
                *r_max,
                1e-13,
            )
            .map_err(|_| AdvectedError::MassOutOfRange(target))?;
            Ok([here[0], here[1], sample(src, t, r0)?[2]])
        }
        FirstOrderFlow::EntropyWeighted {
            f,
            f_prime,
            s_range,
            factor,
        } => {
            let g = |s: f64| {
                src.sample(t - eps * f(s), r)
                    .map(|v| s - v[2])
                    .unwrap_or(f64::NAN)
            };
            let s_star = bisect(g, s_range.0, s_range.1, S_TOL)
                .map_err(|_| AdvectedError::ImplicitSolve { t, r })?;
            let sigma = t - eps * f(s_star);
            let v = sample(src, sigma, r)?;
            let fp = f_prime(s_star);
            let scale = if fp == 0.0 {
                1.0
            } else {
                let h = 1e-5;
                let st = central(|x| src.sample(x, r).map(|v| v[2]), sigma, h)
                    .ok_or(AdvectedError::OutsideSource { t: sigma, r })?;
                let base = 1.0 + eps * st * fp;
                match factor {
                    DensityFactor::Corrected => 1.0 / base,
                    DensityFactor::Printed => {
                        let sr = central(|x| src.sample(sigma, x).map(|v| v[2]), r, h)
                            .ok_or(AdvectedError::OutsideSource { t: sigma, r })?;
                        base.powf(sr / st)
                    }
                }
            };
            Ok([v[0], v[1] * scale, s_star])
        }
    }
}
