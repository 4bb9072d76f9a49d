//! Point and generalized symmetries of the radial system: characteristic
//! form, determining equations, commutators, the classification catalog and
//! the finite group actions.

mod catalog;
pub mod groups;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::expr::{
    d_r, d_t, partial, Atom, Expr, Field, Restrictor, SystemContext, Q,
};
use crate::model::{euler_residuals, Eos};

pub use catalog::{
    case, catalog, generator, verify_case, verify_catalog, CaseReport, CatalogCase, CommutatorCheck,
    ExpectedCommutator, GeneratorCheck, NamedCheck, NamedGenerator, negative_controls, CASE_IDS,
};

#[derive(Clone, Debug, thiserror::Error, PartialEq, Eq)]
pub enum SymmetryError {
    #[error("unknown case {0}")]
    UnknownCase(u32),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
}

/// `τ∂_t + ξ∂_r + η^U∂_U + η^ρ∂_ρ + η^S∂_S` with coefficients in
/// `(t, r, U, rho, S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointGenerator {
    pub tau: Expr,
    pub xi: Expr,
    pub eta: [Expr; 3],
}

impl PointGenerator {
    pub fn new(tau: Expr, xi: Expr, eta: [Expr; 3]) -> PointGenerator {
        PointGenerator { tau, xi, eta }
    }

    /// True when no coefficient involves a derivative of a field.
    pub fn is_point(&self) -> bool {
        [&self.tau, &self.xi]
            .into_iter()
            .chain(self.eta.iter())
            .flat_map(|e| e.plain_atoms())
            .all(|a| a.as_jet().is_none_or(|(_, i, j)| i == 0 && j == 0))
    }

    /// `P^v = η^v − τ v_t − ξ v_r`.
    pub fn to_characteristic(&self) -> Characteristic {
        let comp = |k: usize| {
            let v = Field::FLUID[k];
            &(&self.eta[k] - &(&self.tau * &Expr::jet(v, 1, 0))) - &(&self.xi * &Expr::jet(v, 0, 1))
        };
        Characteristic::new([comp(0), comp(1), comp(2)])
    }
}

/// `P^U∂_U + P^ρ∂_ρ + P^S∂_S` with components in jet space.
#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    pub p: [Expr; 3],
}

impl Characteristic {
    pub fn new(p: [Expr; 3]) -> Characteristic {
        Characteristic { p }
    }

    pub fn zero() -> Characteristic {
        Characteristic::new([Expr::zero(), Expr::zero(), Expr::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.p.iter().all(Expr::is_zero)
    }

    /// Highest total jet order present.
    pub fn order(&self) -> u32 {
        self.p
            .iter()
            .flat_map(|e| e.plain_atoms())
            .filter_map(|a| a.as_jet().map(|(_, i, j)| i + j))
            .max()
            .unwrap_or(0)
    }

    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> Characteristic {
        Characteristic::new([f(&self.p[0]), f(&self.p[1]), f(&self.p[2])])
    }

    pub fn scale(&self, c: Q) -> Characteristic {
        self.map(|e| e.scale(c))
    }

    pub fn mul(&self, c: &Expr) -> Characteristic {
        self.map(|e| e * c)
    }

    pub fn add(&self, o: &Characteristic) -> Characteristic {
        Characteristic::new([&self.p[0] + &o.p[0], &self.p[1] + &o.p[1], &self.p[2] + &o.p[2]])
    }

    pub fn sub(&self, o: &Characteristic) -> Characteristic {
        self.add(&o.scale(Q::int(-1)))
    }

    pub fn restrict(&self, ctx: &SystemContext) -> Characteristic {
        let mut r = Restrictor::new(ctx);
        self.map(|e| r.restrict(e))
    }
}

/// Memoized `D_t^i D_r^j P^v` for the three components.
struct JetTable<'a> {
    base: &'a Characteristic,
    restrictor: Option<Restrictor<'a>>,
    memo: FxHashMap<(usize, u32, u32), Expr>,
}

impl<'a> JetTable<'a> {
    fn new(base: &'a Characteristic, ctx: Option<&'a SystemContext>) -> Self {
        JetTable {
            base,
            restrictor: ctx.map(Restrictor::new),
            memo: FxHashMap::default(),
        }
    }

    fn get(&mut self, k: usize, i: u32, j: u32) -> Expr {
        if let Some(e) = self.memo.get(&(k, i, j)) {
            return e.clone();
        }
        let v = if i == 0 && j == 0 {
            match &mut self.restrictor {
                Some(r) => r.restrict(&self.base.p[k]),
                None => self.base.p[k].clone(),
            }
        } else if j > 0 {
            d_r(&self.get(k, i, j - 1))
        } else {
            let prev = d_t(&self.get(k, i - 1, 0));
            match &mut self.restrictor {
                Some(r) => r.restrict(&prev),
                None => prev,
            }
        };
        self.memo.insert((k, i, j), v.clone());
        v
    }

    /// `pr(P)(e) = Σ ∂e/∂v_{ij} · D_t^i D_r^j P^v` over the fluid fields.
    fn prolong(&mut self, e: &Expr) -> Expr {
        let mut acc = Expr::zero();
        for a in e.plain_atoms() {
            let Some((f, i, j)) = a.as_jet() else { continue };
            let Some(k) = Field::FLUID.iter().position(|x| *x == f) else {
                continue;
            };
            let de = partial(e, a);
            if de.is_zero() {
                continue;
            }
            acc = &acc + &(&de * &self.get(k, i, j));
        }
        acc
    }
}

/// Prolonged action of the evolutionary field `P` on `e`, off shell.
pub fn prolong_apply(c: &Characteristic, e: &Expr) -> Expr {
    JetTable::new(c, None).prolong(e)
}

/// Frechet derivative of the three equations along `c`, restricted to the
/// solution space. `c` is a symmetry iff all three vanish.
pub fn determining_residuals(c: &Characteristic, eos: &Eos, n: &Expr) -> [Expr; 3] {
    let ctx = eos.context(n);
    let eqs = euler_residuals(eos, n);
    let mut table = JetTable::new(c, Some(&ctx));
    let lin: Vec<Expr> = eqs.iter().map(|g| table.prolong(g)).collect();
    let mut r = Restrictor::new(&ctx);
    [r.restrict(&lin[0]), r.restrict(&lin[1]), r.restrict(&lin[2])]
}

pub fn is_symmetry(c: &Characteristic, eos: &Eos, n: &Expr) -> bool {
    determining_residuals(c, eos, n).iter().all(Expr::is_zero)
}

/// Characteristic of the commutator of two evolutionary fields:
/// `pr(a)(Q_b) − pr(b)(Q_a)`, off shell. For point generators this is the
/// characteristic of the vector-field commutator `[a, b]`.
pub fn commutator(a: &Characteristic, b: &Characteristic) -> Characteristic {
    let mut ta = JetTable::new(a, None);
    let mut tb = JetTable::new(b, None);
    let comp = |k: usize, ta: &mut JetTable, tb: &mut JetTable| {
        &ta.prolong(&b.p[k]) - &tb.prolong(&a.p[k])
    };
    Characteristic::new([
        comp(0, &mut ta, &mut tb),
        comp(1, &mut ta, &mut tb),
        comp(2, &mut ta, &mut tb),
    ])
}

/// Commutator on the solution space, for characteristics written in
/// `r`-jets only (after restriction).
pub fn commutator_on_shell(
    a: &Characteristic,
    b: &Characteristic,
    ctx: &SystemContext,
) -> Characteristic {
    let (ra, rb) = (a.restrict(ctx), b.restrict(ctx));
    commutator(&ra, &rb).restrict(ctx)
}

/// Vector-field commutator `[a, b]` of point generators, computed on the
/// coefficients directly.
pub fn point_commutator(a: &PointGenerator, b: &PointGenerator) -> PointGenerator {
    let apply = |g: &PointGenerator, e: &Expr| -> Expr {
        let vars = [
            (Atom::var(crate::expr::Var::T), &g.tau),
            (Atom::var(crate::expr::Var::R), &g.xi),
            (Atom::jet(Field::U, 0, 0), &g.eta[0]),
            (Atom::jet(Field::Rho, 0, 0), &g.eta[1]),
            (Atom::jet(Field::S, 0, 0), &g.eta[2]),
        ];
        vars.iter()
            .map(|(x, c)| &partial(e, *x) * *c)
            .sum()
    };
    let br = |ea: &Expr, eb: &Expr| &apply(a, eb) - &apply(b, ea);
    PointGenerator {
        tau: br(&a.tau, &b.tau),
        xi: br(&a.xi, &b.xi),
        eta: [
            br(&a.eta[0], &b.eta[0]),
            br(&a.eta[1], &b.eta[1]),
            br(&a.eta[2], &b.eta[2]),
        ],
    }
}

/// Serializable summary of a symbolic residual.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualSummary {
    pub zero: bool,
    pub terms: usize,
    pub text: Option<String>,
}

impl ResidualSummary {
    pub fn of(e: &Expr) -> ResidualSummary {
        let zero = e.is_zero();
        ResidualSummary {
            zero,
            terms: e.term_count(),
            text: (!zero).then(|| {
                let s = e.to_string();
                if s.len() > 400 {
                    format!("{}...", &s[..400])
                } else {
                    s
                }
            }),
        }
    }
}
