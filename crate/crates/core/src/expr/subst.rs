//! Substitution of plain atoms and of opaque function symbols.

use rustc_hash::FxHashMap;

use super::atom::{Atom, AtomKind};
use super::calculus::partial;
use super::poly::{Mono, Poly};
use super::Expr;

/// Rewrites `e` by replacing plain atoms for which `map` returns a value.
/// Composite atoms are rebuilt from their rewritten contents.
pub struct Substitution<F: FnMut(Atom, &AtomKind) -> Option<Expr>> {
    map: F,
    memo: FxHashMap<Atom, Option<Expr>>,
}

impl<F: FnMut(Atom, &AtomKind) -> Option<Expr>> Substitution<F> {
    pub fn new(map: F) -> Self {
        Substitution {
            map,
            memo: FxHashMap::default(),
        }
    }

    /// `None` when the atom is unchanged.
    fn atom(&mut self, a: Atom) -> Option<Expr> {
        if let Some(v) = self.memo.get(&a) {
            return v.clone();
        }
        let kind = a.kind();
        let v = match &*kind {
            AtomKind::Sym(_) | AtomKind::Var(_) | AtomKind::Jet { .. } => (self.map)(a, &kind),
            AtomKind::Func { name, args, deriv } => {
                let new_args: Vec<Expr> = args.iter().map(|x| self.apply(x)).collect();
                if new_args == *args {
                    None
                } else {
                    Some(Expr::func_deriv(name, new_args, deriv.clone()))
                }
            }
            AtomKind::Ln(x) => {
                let y = self.apply(x);
                (y != *x).then(|| y.ln())
            }
            AtomKind::Exp(x) => {
                let y = self.apply(x);
                (y != *x).then(|| y.exp())
            }
            AtomKind::Pow(b) => {
                let y = self.apply(b);
                // The atom stands for its base; the exponent is reapplied by
                // the caller.
                (y != *b).then_some(y)
            }
        };
        self.memo.insert(a, v.clone());
        v
    }

    fn poly(&mut self, p: &Poly) -> Expr {
        let mut same: Vec<(Mono, super::q::Q)> = Vec::new();
        let mut changed: Vec<Expr> = Vec::new();
        for (m, c) in p.terms() {
            let mut keep = Mono::new();
            let mut factors: Vec<Expr> = Vec::new();
            for (a, e) in m.iter() {
                match self.atom(*a) {
                    None => keep.push((*a, e.clone())),
                    Some(v) => factors.push(v.pow_exponent(e)),
                }
            }
            if factors.is_empty() {
                same.push((keep, *c));
            } else {
                let mut t = Expr::from_poly(Poly::monomial(keep, *c));
                for f in &factors {
                    t = &t * f;
                }
                changed.push(t);
            }
        }
        let base = Expr::from_poly_raw(Poly::from_terms(same));
        &base + &changed.into_iter().sum::<Expr>()
    }

    pub fn apply(&mut self, e: &Expr) -> Expr {
        let n = self.poly(e.numerator());
        if e.is_polynomial() {
            return n;
        }
        let mut acc = n;
        for (f, m) in e.denominator_factors() {
            acc = &acc * &self.poly(f).recip().powi(*m as i64);
        }
        acc
    }
}

/// Replaces plain atoms according to `pairs`.
pub fn substitute(e: &Expr, pairs: &[(Atom, Expr)]) -> Expr {
    let map: FxHashMap<Atom, Expr> = pairs.iter().cloned().collect();
    Substitution::new(|a, _| map.get(&a).cloned()).apply(e)
}

/// Concrete definition of an opaque function: `name(params…) := body`, or,
/// with `partial_of = Some(i)`, a rule for its first partial derivative in
/// argument `i`.
#[derive(Clone, Debug)]
pub struct FuncDef {
    pub name: String,
    pub params: Vec<Atom>,
    pub body: Expr,
    pub partial_of: Option<usize>,
}

impl FuncDef {
    pub fn new(name: &str, params: &[&str], body: Expr) -> FuncDef {
        FuncDef {
            name: name.to_string(),
            params: params.iter().map(|p| Atom::sym(p)).collect(),
            body,
            partial_of: None,
        }
    }

    /// `∂ name / ∂ params[slot] := body`. Occurrences without a derivative in
    /// that slot are left opaque.
    pub fn partial_rule(name: &str, params: &[&str], slot: usize, body: Expr) -> FuncDef {
        FuncDef {
            partial_of: Some(slot),
            ..FuncDef::new(name, params, body)
        }
    }

    /// Single-argument definition using the placeholder symbol `x_`.
    pub fn unary(name: &str, body: impl FnOnce(&Expr) -> Expr) -> FuncDef {
        let x = Expr::sym("x_");
        FuncDef::new(name, &["x_"], body(&x))
    }
}

/// Replaces every occurrence of the defined opaque functions, including
/// their partial derivatives, by the concrete bodies.
pub fn substitute_functions(e: &Expr, defs: &[FuncDef]) -> Expr {
    let mut derived: FxHashMap<(usize, Vec<u32>), Expr> = FxHashMap::default();
    substitute_functions_inner(e, defs, &mut derived)
}

fn substitute_functions_inner(
    e: &Expr,
    defs: &[FuncDef],
    derived: &mut FxHashMap<(usize, Vec<u32>), Expr>,
) -> Expr {
    let mut memo: FxHashMap<Atom, Option<Expr>> = FxHashMap::default();
    let mut rewrite = |a: Atom| -> Option<Expr> {
        if let Some(v) = memo.get(&a) {
            return v.clone();
        }
        let kind = a.kind();
        let v = match &*kind {
            AtomKind::Func { name, args, deriv } => {
                let new_args: Vec<Expr> = args
                    .iter()
                    .map(|x| substitute_functions_inner(x, defs, derived))
                    .collect();
                let applicable = |d: &FuncDef| {
                    d.name == *name && d.partial_of.is_none_or(|slot| deriv[slot] > 0)
                };
                match defs.iter().position(applicable) {
                    Some(i) => {
                        let def = &defs[i];
                        assert_eq!(def.params.len(), args.len(), "arity mismatch for {name}");
                        let mut deriv = deriv.clone();
                        if let Some(slot) = def.partial_of {
                            deriv[slot] -= 1;
                        }
                        let body = derived
                            .entry((i, deriv.clone()))
                            .or_insert_with(|| {
                                let mut b = def.body.clone();
                                for (p, k) in def.params.iter().zip(&deriv) {
                                    for _ in 0..*k {
                                        b = partial(&b, *p);
                                    }
                                }
                                b
                            })
                            .clone();
                        let pairs: Vec<(Atom, Expr)> =
                            def.params.iter().copied().zip(new_args).collect();
                        Some(substitute(&body, &pairs))
                    }
                    None if new_args != *args => Some(Expr::func_deriv(name, new_args, deriv.clone())),
                    None => None,
                }
            }
            AtomKind::Ln(x) => {
                let y = substitute_functions_inner(x, defs, derived);
                (y != *x).then(|| y.ln())
            }
            AtomKind::Exp(x) => {
                let y = substitute_functions_inner(x, defs, derived);
                (y != *x).then(|| y.exp())
            }
            AtomKind::Pow(b) => {
                let y = substitute_functions_inner(b, defs, derived);
                (y != *b).then_some(y)
            }
            _ => None,
        };
        memo.insert(a, v.clone());
        v
    };
    let mut apply_poly = |p: &Poly| -> Expr {
        let mut out = Vec::new();
        let mut same = Vec::new();
        for (m, c) in p.terms() {
            let mut keep = Mono::new();
            let mut factors = Vec::new();
            for (a, ex) in m.iter() {
                match if a.is_plain() { None } else { rewrite(*a) } {
                    None => keep.push((*a, ex.clone())),
                    Some(v) => factors.push(v.pow_exponent(ex)),
                }
            }
            if factors.is_empty() {
                same.push((keep, *c));
            } else {
                let mut t = Expr::from_poly(Poly::monomial(keep, *c));
                for f in &factors {
                    t = &t * f;
                }
                out.push(t);
            }
        }
        &Expr::from_poly_raw(Poly::from_terms(same)) + &out.into_iter().sum::<Expr>()
    };
    let n = apply_poly(e.numerator());
    if e.is_polynomial() {
        return n;
    }
    let mut acc = n;
    for (f, m) in e.denominator_factors() {
        acc = &acc * &apply_poly(f).recip().powi(*m as i64);
    }
    acc
}
