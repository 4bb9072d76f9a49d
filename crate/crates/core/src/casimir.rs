//! The general-EOS advected hierarchy `J_l = R^l S`, the Casimir determining
//! system and its finite-order verification.

use std::time::Instant;

use serde::Serialize;

use crate::expr::{
    d_r, euler_operator, higher_euler, partial, substitute, Atom, Expr, ExprError, Field,
};

/// Default cap on the node count of any intermediate residual.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum CasimirError {
    #[error("density depends on jets above first order")]
    NotFirstOrder,
    #[error("symbolic size budget exceeded ({nodes} > {budget} nodes)")]
    Budget { nodes: usize, budget: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

fn weight(n: &Expr) -> Expr {
    Expr::r().pow(&(n - &Expr::one())).expect("polynomial exponent")
}

fn inv_weight(n: &Expr) -> Expr {
    Expr::r().pow(&(&Expr::one() - n)).expect("polynomial exponent")
}

/// `R e = (r^(1-n)/ρ) D_r e`.
pub fn recursion_apply(e: &Expr, n: &Expr) -> Expr {
    &(&inv_weight(n) * &d_r(e)) / &Expr::rho()
}

/// `J_l = R^l S` in `(U, ρ, S)` jets.
pub fn j_scalar(l: u32, n: &Expr) -> Expr {
    (0..l).fold(Expr::s(), |e, _| recursion_apply(&e, n))
}

/// `J_l` written with the weighted density `ρ~ = r^(n-1)ρ`, where
/// `R = (1/ρ~) D_r` and no explicit `r` appears.
pub fn j_scalar_weighted(l: u32) -> Expr {
    let rt = Expr::field(Field::RhoW);
    (0..l).fold(Expr::s(), |e, _| &d_r(&e) / &rt)
}

/// `(E_U(r^(n-1)Φ), D_r(r^(1-n)E_ρ(r^(n-1)Φ)) − r^(1-n)(S_r/ρ)E_S(r^(n-1)Φ))`.
pub fn casimir_residuals(phi: &Expr, n: &Expr) -> Result<[Expr; 2], ExprError> {
    let wphi = &weight(n) * phi;
    let iw = inv_weight(n);
    let eu = euler_operator(&wphi, Field::U)?;
    let er = euler_operator(&wphi, Field::Rho)?;
    let es = euler_operator(&wphi, Field::S)?;
    let j1 = &(&iw * &Expr::jet(Field::S, 0, 1)) / &Expr::rho();
    Ok([eu, &d_r(&(&iw * &er)) - &(&j1 * &es)])
}

pub fn is_casimir(phi: &Expr, n: &Expr) -> Result<bool, ExprError> {
    Ok(casimir_residuals(phi, n)?.iter().all(Expr::is_zero))
}

/// `ρ f(J_0, …, J_l)` with `f` opaque.
pub fn hierarchy_density(l: u32, f: &str, n: &Expr) -> Expr {
    let args = (0..=l).map(|k| j_scalar(k, n)).collect();
    &Expr::rho() * &Expr::func(f, args)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderReport {
    pub l: u32,
    pub pass: bool,
    pub density_nodes: usize,
    pub residual_terms: [usize; 2],
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct HierarchyReport {
    pub orders: Vec<OrderReport>,
    /// Order at which the budget stopped the run, if any.
    pub budget_exceeded_at: Option<u32>,
    pub elapsed_ms: u128,
}

impl HierarchyReport {
    pub fn pass(&self) -> bool {
        self.budget_exceeded_at.is_none() && self.orders.iter().all(|o| o.pass)
    }
}

/// Checks `ρ f(J_0, …, J_l)` for every `l ≤ l_max` with `f` opaque.
pub fn verify_casimir_hierarchy(l_max: u32, n: &Expr, budget: usize) -> HierarchyReport {
    let start = Instant::now();
    let mut orders = Vec::new();
    let mut budget_exceeded_at = None;
    for l in 0..=l_max {
        let t0 = Instant::now();
        let phi = hierarchy_density(l, "f", n);
        let nodes = phi.node_count();
        if nodes > budget {
            budget_exceeded_at = Some(l);
            break;
        }
        match casimir_residuals(&phi, n) {
            Ok(res) => orders.push(OrderReport {
                l,
                pass: res.iter().all(Expr::is_zero),
                density_nodes: nodes,
                residual_terms: [res[0].term_count(), res[1].term_count()],
                elapsed_ms: t0.elapsed().as_millis(),
            }),
            Err(_) => {
                budget_exceeded_at = Some(l);
                break;
            }
        }
    }
    HierarchyReport {
        orders,
        budget_exceeded_at,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SplitIdentity {
    pub k: u32,
    /// 0 for the first family, `i ≥ 1` for the second.
    pub i: u32,
    pub holds: bool,
}

/// The split system in `ρ~` variables:
/// `J_1 E_S(J_k) = J_(k+1) + D_r E_ρ~(J_k)` and
/// `J_1 E_S^(i)(J_k) = D_r E_ρ~^(i)(J_k) − E_ρ~^(i-1)(J_k)` for `1 ≤ i ≤ i_max`.
pub fn split_system_check(k: u32, i_max: u32) -> Result<Vec<SplitIdentity>, ExprError> {
    let jk = j_scalar_weighted(k);
    let j1 = j_scalar_weighted(1);
    let es = |i| higher_euler(&jk, Field::S, i);
    let er = |i| higher_euler(&jk, Field::RhoW, i);
    let mut out = Vec::new();
    let first = &(&(&j1 * &es(0)?) - &j_scalar_weighted(k + 1)) - &d_r(&er(0)?);
    out.push(SplitIdentity {
        k,
        i: 0,
        holds: first.is_zero(),
    });
    for i in 1..=i_max {
        let e = &(&(&j1 * &es(i)?) - &d_r(&er(i)?)) + &er(i - 1)?;
        out.push(SplitIdentity {
            k,
            i,
            holds: e.is_zero(),
        });
    }
    Ok(out)
}

/// Outcome of the first-order classification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum FirstOrderVerdict {
    /// `Φ = ρ f(J_0, J_1)` literally; `f` is given in the symbols `J0`, `J1`.
    StatedForm { f: String },
    /// Passes the determining system but differs from `ρ f(J_0, J_1)` by a
    /// trivial density.
    EquivalentModuloTrivial,
    /// Fails the determining system; `first` tells whether the `U` equation
    /// already fails.
    NotCasimir { first: bool },
}

/// Decides whether a first-order density is a Casimir, i.e. of the form
/// `ρ f(J_0, J_1)` up to a trivial density.
pub fn classify_first_order(phi: &Expr, n: &Expr) -> Result<FirstOrderVerdict, CasimirError> {
    if phi
        .plain_atoms()
        .iter()
        .any(|a| a.as_jet().is_some_and(|(_, i, j)| i > 0 || j > 1))
    {
        return Err(CasimirError::NotFirstOrder);
    }
    let [a, b] = casimir_residuals(phi, n)?;
    if !a.is_zero() || !b.is_zero() {
        return Ok(FirstOrderVerdict::NotCasimir { first: !a.is_zero() });
    }
    // S_r = ρ r^(n-1) J1, S = J0.
    let j0 = Expr::sym("J0");
    let j1 = Expr::sym("J1");
    let g = substitute(
        &(phi / &Expr::rho()),
        &[
            (
                Atom::jet(Field::S, 0, 1),
                &(&Expr::rho() * &weight(n)) * &j1,
            ),
            (Atom::jet(Field::S, 0, 0), j0.clone()),
        ],
    );
    let allowed = [j0.as_atom(), j1.as_atom()];
    let only_j = g.plain_atoms().iter().all(|a| {
        allowed.contains(&Some(*a)) || (a.is_sym() && a.as_sym().is_some_and(|s| s != "n"))
    });
    Ok(if only_j {
        FirstOrderVerdict::StatedForm { f: g.to_string() }
    } else {
        FirstOrderVerdict::EquivalentModuloTrivial
    })
}

/// `ρ f(J_0, …, J_l)` with `f` given in the symbols `J0..Jl` is non-trivial
/// at order `l ≥ 1` iff `f` is nonlinear in its last argument.
pub fn is_nontrivial_at_order(f: &Expr, l: u32) -> bool {
    let x = Atom::sym(&format!("J{l}"));
    !partial(&partial(f, x), x).is_zero()
}

/// Instantiates `f(J0, …, Jl)` on the hierarchy.
pub fn instantiate_f(f: &Expr, l: u32, n: &Expr) -> Expr {
    let pairs: Vec<(Atom, Expr)> = (0..=l)
        .map(|k| (Atom::sym(&format!("J{k}")), j_scalar(k, n)))
        .collect();
    &Expr::rho() * &substitute(f, &pairs)
}

/// Parses `f` written in the symbols `J0..Jl`.
pub fn parse_f(text: &str, l: u32) -> Result<Expr, ExprError> {
    let names: Vec<String> = (0..=l).map(|k| format!("J{k}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    crate::expr::Parser::new().with_symbols(&refs).parse(text)
}
