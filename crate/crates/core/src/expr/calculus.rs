//! Derivations on jet space: total derivatives, partial derivatives with
//! respect to jet coordinates, and the (higher) Euler operators.

use rustc_hash::FxHashMap;

use super::atom::{Atom, AtomKind, Field, Var};
use super::poly::{Exponent, Mono, Poly};
use super::q::Q;
use super::{Expr, ExprError};

/// Applies the derivation that acts on plain atoms through `base` and on
/// composite atoms by the chain rule.
pub struct Derivation<F: FnMut(Atom, &AtomKind) -> Expr> {
    base: F,
    memo: FxHashMap<Atom, Expr>,
}

impl<F: FnMut(Atom, &AtomKind) -> Expr> Derivation<F> {
    pub fn new(base: F) -> Self {
        Derivation {
            base,
            memo: FxHashMap::default(),
        }
    }

    fn atom(&mut self, a: Atom) -> Expr {
        if let Some(d) = self.memo.get(&a) {
            return d.clone();
        }
        let kind = a.kind();
        let d = match &*kind {
            AtomKind::Sym(_) | AtomKind::Var(_) | AtomKind::Jet { .. } => (self.base)(a, &kind),
            AtomKind::Func { name, args, deriv } => {
                let mut acc = Vec::new();
                for (i, arg) in args.iter().enumerate() {
                    let da = self.apply(arg);
                    if da.is_zero() {
                        continue;
                    }
                    let mut di = deriv.clone();
                    di[i] += 1;
                    acc.push(&Expr::func_deriv(name, args.clone(), di) * &da);
                }
                acc.into_iter().sum()
            }
            AtomKind::Ln(x) => {
                let dx = self.apply(x);
                if dx.is_zero() {
                    Expr::zero()
                } else {
                    &dx / x
                }
            }
            AtomKind::Exp(x) => {
                let dx = self.apply(x);
                &Expr::atom(a) * &dx
            }
            // The value of a power atom is its base; the exponent sits in
            // the monomial.
            AtomKind::Pow(b) => self.apply(b),
        };
        self.memo.insert(a, d.clone());
        d
    }

    fn poly(&mut self, p: &Poly) -> Expr {
        // Coefficient polynomial of each atom derivative, so rational
        // derivatives are multiplied in once.
        let mut by_atom: FxHashMap<Atom, Vec<(Mono, Q)>> = FxHashMap::default();
        let mut order: Vec<Atom> = Vec::new();
        for (m, c) in p.terms() {
            for (i, (a, e)) in m.iter().enumerate() {
                let mut reduced: Mono = Mono::with_capacity(m.len());
                for (j, (b, f)) in m.iter().enumerate() {
                    if j == i {
                        let f1 = f.sub(&Exponent::int(1));
                        if !f1.is_zero() {
                            reduced.push((*b, f1));
                        }
                    } else {
                        reduced.push((*b, f.clone()));
                    }
                }
                let slot = by_atom.entry(*a).or_insert_with(|| {
                    order.push(*a);
                    Vec::new()
                });
                match e.as_q() {
                    Some(k) => slot.push((reduced, *c * k)),
                    None => slot.extend(e.to_expr().numerator().mul_term(&reduced, *c).into_terms()),
                }
            }
        }
        let mut raw: Vec<(Mono, Q)> = Vec::new();
        let mut extra = Expr::zero();
        for a in order {
            let da = self.atom(a);
            if da.is_zero() {
                continue;
            }
            let coeff = Poly::from_terms(by_atom.remove(&a).unwrap_or_default());
            if coeff.is_zero() {
                continue;
            }
            if da.is_polynomial() {
                raw.extend(coeff.mul_raw(da.numerator()).into_terms());
            } else {
                extra = &extra + &(&Expr::from_poly(coeff) * &da);
            }
        }
        &Expr::from_poly(Poly::from_terms(raw)) + &extra
    }

    pub fn apply(&mut self, e: &Expr) -> Expr {
        let dn = self.poly(e.numerator());
        if e.is_polynomial() {
            return dn;
        }
        // D(N / Π f^m) = (DN Π f − N Σ m_i Df_i Π_{j≠i} f_j) / Π f^(m+1)
        let fs = e.denominator_factors();
        let fe: Vec<Expr> = fs.iter().map(|(f, _)| Expr::from_poly_raw(f.clone())).collect();
        let num = Expr::from_poly_raw(e.numerator().clone());
        let mut top = fe.iter().fold(dn, |acc, f| &acc * f);
        for (i, (f, m)) in fs.iter().enumerate() {
            let others = fe
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .fold(self.poly(f).scale(Q::int(*m as i64)), |acc, (_, g)| &acc * g);
            top = &top - &(&num * &others);
        }
        let raised = fs.iter().map(|(f, m)| (f.clone(), m + 1)).collect();
        &top * &Expr::from_factored(Poly::one(), raised)
    }
}

/// Total derivative `D_t` or `D_r`.
pub fn total_derivative(e: &Expr, var: Var) -> Expr {
    Derivation::new(|a, k| match k {
        AtomKind::Var(v) if *v == var => Expr::one(),
        AtomKind::Jet { field, t, r } => match var {
            Var::T => Expr::jet(*field, t + 1, *r),
            Var::R => Expr::jet(*field, *t, r + 1),
        },
        _ => {
            let _ = a;
            Expr::zero()
        }
    })
    .apply(e)
}

pub fn d_r(e: &Expr) -> Expr {
    total_derivative(e, Var::R)
}

pub fn d_t(e: &Expr) -> Expr {
    total_derivative(e, Var::T)
}

/// Repeated total derivative.
pub fn total_derivative_n(e: &Expr, var: Var, times: u32) -> Expr {
    let mut out = e.clone();
    for _ in 0..times {
        out = total_derivative(&out, var);
    }
    out
}

/// Partial derivative with respect to a plain atom (jet coordinate, variable
/// or constant symbol).
pub fn partial(e: &Expr, x: Atom) -> Expr {
    Derivation::new(move |a, _| if a == x { Expr::one() } else { Expr::zero() }).apply(e)
}

/// Highest `r`-order of `field` among the jets of `e`, or `None` if the field
/// does not occur. Errors if a `t`-derivative of any field occurs.
pub fn max_r_order(e: &Expr, field: Field) -> Result<Option<u32>, ExprError> {
    let mut best = None;
    for a in e.plain_atoms() {
        if let Some((f, t, r)) = a.as_jet() {
            if t > 0 {
                return Err(ExprError::TimeDerivative);
            }
            if f == field {
                best = Some(best.map_or(r, |b: u32| b.max(r)));
            }
        }
    }
    Ok(best)
}

/// Higher Euler operator `E_v^{(i)}` with respect to `r`:
/// `Σ_j binom(i+j, i) (−D_r)^j ∂/∂(∂_r^{i+j} v)`.
pub fn higher_euler(e: &Expr, field: Field, order: u32) -> Result<Expr, ExprError> {
    let Some(top) = max_r_order(e, field)? else {
        return Ok(Expr::zero());
    };
    if order > top {
        return Ok(Expr::zero());
    }
    // Horner form: acc ← c_j ∂_j e − D_r acc, from the top order down.
    let mut acc = Expr::zero();
    for j in (0..=(top - order)).rev() {
        let coeff = Q::binomial((order + j) as u64, order as u64);
        let pj = partial(e, Atom::jet(field, 0, order + j)).scale(coeff);
        acc = &pj - &d_r(&acc);
    }
    Ok(acc)
}

/// Euler operator `E_v`.
pub fn euler_operator(e: &Expr, field: Field) -> Result<Expr, ExprError> {
    higher_euler(e, field, 0)
}

/// True when all three fluid Euler operators annihilate `e`, i.e. `e` is a
/// total `r`-derivative modulo functions of `t` alone.
pub fn is_total_r_derivative(e: &Expr, fields: &[Field]) -> Result<bool, ExprError> {
    for f in fields {
        if !euler_operator(e, *f)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `e, −D_r e, (−D_r)^2 e, …`, computed on demand.
struct NegDrPowers(Vec<Expr>);

impl NegDrPowers {
    fn new(e: Expr) -> Self {
        NegDrPowers(vec![e])
    }

    fn get(&mut self, i: u32) -> &Expr {
        while self.0.len() <= i as usize {
            let next = -d_r(self.0.last().expect("non-empty"));
            self.0.push(next);
        }
        &self.0[i as usize]
    }
}

fn euler_orders(e: &Expr, field: Field) -> Result<Vec<Expr>, ExprError> {
    let top = max_r_order(e, field)?.map_or(0, |t| t + 1);
    (0..top).map(|i| higher_euler(e, field, i)).collect()
}

/// Residuals of the three product identities for the Euler operator with
/// respect to `field`, for jet functions `a`, `b` and the opaque function
/// `f` of one argument, with `b₊₁ = D_r b / a` and `g = D_r f'(b₊₁) / a`:
///
/// 1. `E(a f(b)) − Σ_i [E^(i)(b) (−D_r)^i (a f'(b)) + E^(i)(a) (−D_r)^i f(b)]`
/// 2. `E(a f(b₊₁)) − Σ_i [E^(i)(b) (−D_r)^(i+1) f'(b₊₁)
///    + E^(i)(a) (−D_r)^i (f(b₊₁) − b₊₁ f'(b₊₁))]`
/// 3. `Σ_i E^(i)(b₊₁) (−D_r)^(i+1) f'(b₊₁) + Σ_i E^(i)(b) (−D_r)^(i+1) g
///    − Σ_{i,j} binom(i+j, j) E^(i+j)(a) ((−D_r)^j b₊₁) (−D_r)^i g`
///
/// All three vanish identically. The third is the adjoint of
/// `δb₊₁ = D_r(δb)/a − b₊₁ δa/a` applied to `−D_r f'(b₊₁)`.
pub fn euler_product_identities(
    a: &Expr,
    b: &Expr,
    field: Field,
    f: &str,
) -> Result<[Expr; 3], ExprError> {
    let p = ProductTerms::new(a, b, field, f)?;
    Ok([p.rel1()?, p.rel2()?, p.rel3(false)])
}

/// The third identity with `f(b₊₁)` on the left, `E^(i+1)(b)` in the first
/// sum and the opposite sign on the right:
/// `Σ_i E^(i)(b₊₁) (−D_r)^(i+1) f(b₊₁) − Σ_i E^(i+1)(b) (−D_r)^(i+1) g
/// + Σ_{i,j} binom(i+j, j) E^(i+j)(a) ((−D_r)^j b₊₁) (−D_r)^i g`.
/// It does not vanish in general (`a = 1`, `b = v` leaves `D_r² f(v_r)`).
pub fn euler_rel3_variant(a: &Expr, b: &Expr, field: Field, f: &str) -> Result<Expr, ExprError> {
    Ok(ProductTerms::new(a, b, field, f)?.rel3(true))
}

struct ProductTerms<'a> {
    a: &'a Expr,
    b: &'a Expr,
    bp: Expr,
    field: Field,
    f: &'a str,
    ea: Vec<Expr>,
    eb: Vec<Expr>,
    ebp: Vec<Expr>,
}

impl<'a> ProductTerms<'a> {
    fn new(a: &'a Expr, b: &'a Expr, field: Field, f: &'a str) -> Result<Self, ExprError> {
        let bp = d_r(b).checked_div(a)?;
        Ok(ProductTerms {
            ea: euler_orders(a, field)?,
            eb: euler_orders(b, field)?,
            ebp: euler_orders(&bp, field)?,
            a,
            b,
            bp,
            field,
            f,
        })
    }

    fn fx(&self, x: &Expr, k: u32) -> Expr {
        Expr::func_deriv(self.f, vec![x.clone()], vec![k])
    }

    fn rel1(&self) -> Result<Expr, ExprError> {
        let (a, b) = (self.a, self.b);
        let mut out = euler_operator(&(a * &self.fx(b, 0)), self.field)?;
        let mut afp = NegDrPowers::new(a * &self.fx(b, 1));
        let mut fb = NegDrPowers::new(self.fx(b, 0));
        for (i, e) in self.eb.iter().enumerate() {
            out = &out - &(e * afp.get(i as u32));
        }
        for (i, e) in self.ea.iter().enumerate() {
            out = &out - &(e * fb.get(i as u32));
        }
        Ok(out)
    }

    fn rel2(&self) -> Result<Expr, ExprError> {
        let bp = &self.bp;
        let mut out = euler_operator(&(self.a * &self.fx(bp, 0)), self.field)?;
        let mut fpp = NegDrPowers::new(self.fx(bp, 1));
        let mut legendre = NegDrPowers::new(&self.fx(bp, 0) - &(bp * &self.fx(bp, 1)));
        for (i, e) in self.eb.iter().enumerate() {
            out = &out - &(e * fpp.get(i as u32 + 1));
        }
        for (i, e) in self.ea.iter().enumerate() {
            out = &out - &(e * legendre.get(i as u32));
        }
        Ok(out)
    }

    fn rel3(&self, variant: bool) -> Expr {
        let bp = &self.bp;
        let mut g = NegDrPowers::new(&d_r(&self.fx(bp, 1)) / self.a);
        let mut lhs = NegDrPowers::new(self.fx(bp, if variant { 0 } else { 1 }));
        let mut bpj = NegDrPowers::new(bp.clone());
        let sign = if variant { Q::int(-1) } else { Q::int(1) };
        let mut out = Expr::zero();
        for (i, e) in self.ebp.iter().enumerate() {
            out = &out + &(e * lhs.get(i as u32 + 1));
        }
        let shift = usize::from(variant);
        for (i, e) in self.eb.iter().enumerate().skip(shift) {
            let k = (i - shift) as u32 + 1;
            out = &out + &(e * g.get(k)).scale(sign);
        }
        for (k, e) in self.ea.iter().enumerate() {
            for j in 0..=k as u32 {
                let c = Q::binomial(k as u64, j as u64);
                let term = &(e * bpj.get(j)) * g.get(k as u32 - j);
                out = &out - &term.scale(c * sign);
            }
        }
        out
    }
}
