//! Evolution rules of the radial system and restriction to its solutions.

use rustc_hash::FxHashMap;

use super::atom::{Atom, Field};
use super::calculus::{d_r, d_t};
use super::subst::substitute;
use super::Expr;

/// Which closure of the system supplies the time derivatives.
#[derive(Clone, Debug)]
pub enum EvolutionModel {
    /// `(U, rho, S)` with pressure `p(rho, S)` given as an expression in the
    /// undifferentiated fields.
    Fluid { pressure: Expr },
    /// `(U, rho, p)` with sound speed squared `a2(rho, p)`.
    Gas { a2: Expr },
}

/// Dimension parameter plus the evolution rules for `U_t`, `rho_t` and
/// `S_t` (or `p_t`).
#[derive(Clone, Debug)]
pub struct SystemContext {
    pub n: Expr,
    pub model: EvolutionModel,
}

impl SystemContext {
    pub fn fluid(n: Expr, pressure: Expr) -> SystemContext {
        SystemContext {
            n,
            model: EvolutionModel::Fluid { pressure },
        }
    }

    pub fn gas(n: Expr, a2: Expr) -> SystemContext {
        SystemContext {
            n,
            model: EvolutionModel::Gas { a2 },
        }
    }

    pub fn fields(&self) -> [Field; 3] {
        match self.model {
            EvolutionModel::Fluid { .. } => Field::FLUID,
            EvolutionModel::Gas { .. } => Field::GAS,
        }
    }

    /// `(n - 1)/r`.
    pub fn geometric(&self) -> Expr {
        &(&self.n - &Expr::one()) / &Expr::r()
    }

    /// Right side of the evolution equation for `field`, in r-jets only.
    pub fn rule(&self, field: Field) -> Option<Expr> {
        let (u, rho) = (Expr::u(), Expr::rho());
        let u_r = Expr::jet(Field::U, 0, 1);
        match (field, &self.model) {
            (Field::U, EvolutionModel::Fluid { pressure }) => {
                Some(-(&u * &u_r) - &d_r(pressure) / &rho)
            }
            (Field::U, EvolutionModel::Gas { .. }) => {
                Some(-(&u * &u_r) - &Expr::jet(Field::P, 0, 1) / &rho)
            }
            (Field::Rho, _) => Some(-d_r(&(&u * &rho)) - &self.geometric() * &u * &rho),
            (Field::S, EvolutionModel::Fluid { .. }) => Some(-(&u * &Expr::jet(Field::S, 0, 1))),
            (Field::P, EvolutionModel::Gas { a2 }) => {
                let div = &u_r + &(&self.geometric() * &u);
                Some(-(&u * &Expr::jet(Field::P, 0, 1)) - a2 * &rho * &div)
            }
            _ => None,
        }
    }

    pub fn restrict(&self, e: &Expr) -> Expr {
        Restrictor::new(self).restrict(e)
    }
}

/// Replaces t-derivatives by their values on the solution space. Holds a memo
/// of restricted jets, so reuse one instance for batches of expressions.
pub struct Restrictor<'a> {
    ctx: &'a SystemContext,
    memo: FxHashMap<(Field, u32, u32), Expr>,
}

impl<'a> Restrictor<'a> {
    pub fn new(ctx: &'a SystemContext) -> Self {
        Restrictor {
            ctx,
            memo: FxHashMap::default(),
        }
    }

    /// `∂_t^i ∂_r^j field` on the solution space.
    pub fn jet(&mut self, field: Field, i: u32, j: u32) -> Expr {
        if i == 0 {
            return Expr::jet(field, 0, j);
        }
        if let Some(e) = self.memo.get(&(field, i, j)) {
            return e.clone();
        }
        let v = if j > 0 {
            d_r(&self.jet(field, i, j - 1))
        } else if i == 1 {
            self.ctx
                .rule(field)
                .unwrap_or_else(|| panic!("no evolution rule for {}", field.name()))
        } else {
            let prev = self.jet(field, i - 1, 0);
            self.restrict(&d_t(&prev))
        };
        self.memo.insert((field, i, j), v.clone());
        v
    }

    pub fn restrict(&mut self, e: &Expr) -> Expr {
        let pairs: Vec<(Atom, Expr)> = e
            .plain_atoms()
            .into_iter()
            .filter_map(|a| {
                let (f, i, j) = a.as_jet()?;
                (i > 0).then(|| (a, self.jet(f, i, j)))
            })
            .collect();
        if pairs.is_empty() {
            return e.clone();
        }
        substitute(e, &pairs)
    }
}
