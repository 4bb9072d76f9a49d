//! The canonical expression value: a quotient of Laurent polynomials.
//!
//! Denominators that are single monomials are folded into the numerator.
//! Other denominators are kept as a list of monic factors with
//! multiplicities, so sums use the least common multiple.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use super::atom::{Atom, AtomKind, Field, Var};
use super::poly::{pow_mono, Exponent, Mono, Poly, SymMono};
use super::q::Q;
use super::ExprError;

/// Denominator factor: a monic, non-monomial polynomial and its multiplicity.
pub type Factor = (Poly, u32);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Rat {
    pub(crate) num: Poly,
    pub(crate) factors: Vec<Factor>,
}

/// Immutable jet-space expression in canonical form.
///
/// Equal values built from the same atoms normalize to the same numerator up
/// to the factoring of the denominator, so `is_zero` is a structural test.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Expr(Arc<Rat>);

fn inv_mono(m: &Mono) -> Mono {
    m.iter().map(|(a, e)| (*a, e.neg())).collect()
}

fn poly_pow(p: &Poly, k: u32) -> Poly {
    (0..k).fold(Poly::one(), |acc, _| acc.mul_raw(p))
}

fn factors_product(fs: &[Factor]) -> Poly {
    fs.iter().fold(Poly::one(), |acc, (f, m)| acc.mul_raw(&poly_pow(f, *m)))
}

fn merge_factors(a: &[Factor], b: &[Factor], combine: impl Fn(u32, u32) -> u32) -> Vec<Factor> {
    let mut out: Vec<Factor> = a.to_vec();
    for (f, m) in b {
        match out.iter_mut().find(|(g, _)| g == f) {
            Some(slot) => slot.1 = combine(slot.1, *m),
            None => out.push((f.clone(), *m)),
        }
    }
    out
}

impl Rat {
    fn poly(num: Poly) -> Rat {
        Rat {
            num,
            factors: Vec::new(),
        }
    }

    /// Builds `num / Π f^m`, folding constant and monomial factors into the
    /// numerator, making factors monic, merging equal factors and cancelling
    /// a numerator equal to a factor.
    fn build(mut num: Poly, raw: Vec<Factor>) -> Expr {
        if num.is_zero() {
            return Expr::from_rat(Rat::poly(num));
        }
        let mut factors: Vec<Factor> = Vec::new();
        for (f, m) in raw {
            assert!(!f.is_zero(), "division by zero expression");
            if m == 0 {
                continue;
            }
            if let Some((mono, c)) = f.as_monomial() {
                let inv = inv_mono(mono);
                for _ in 0..m {
                    num = num.mul_term(&inv, c.recip());
                }
                continue;
            }
            let lead = f.terms()[0].1;
            let monic = if lead.is_one() {
                f
            } else {
                for _ in 0..m {
                    num = num.scale(lead.recip());
                }
                f.scale(lead.recip())
            };
            match factors.iter_mut().find(|(g, _)| *g == monic) {
                Some(slot) => slot.1 += m,
                None => factors.push((monic, m)),
            }
        }
        if num.len() > 1 {
            let lead = num.terms()[0].1;
            let monic = num.scale(lead.recip());
            if let Some(slot) = factors.iter_mut().find(|(g, _)| *g == monic) {
                slot.1 -= 1;
                num = Poly::constant(lead);
                factors.retain(|(_, m)| *m > 0);
            }
        }
        if num.terms().iter().any(|(m, _)| needs_fixup(m)) {
            let e = fixup(num);
            let raw = merge_factors(&e.0.factors, &factors, |a, b| a + b);
            return Rat::build(e.0.num.clone(), raw);
        }
        factors.sort();
        Expr::from_rat(Rat { num, factors })
    }
}

impl Expr {
    pub(crate) fn from_rat(r: Rat) -> Expr {
        Expr(Arc::new(r))
    }

    /// Wraps a polynomial, merging exp atoms and expanding integer powers of
    /// power atoms.
    pub fn from_poly(p: Poly) -> Expr {
        if p.has_special_atoms() {
            return fixup(p);
        }
        Expr::from_rat(Rat::poly(p))
    }

    pub(crate) fn from_poly_raw(p: Poly) -> Expr {
        Expr::from_rat(Rat::poly(p))
    }

    /// `num / Π f^m` for arbitrary nonzero polynomial factors.
    pub fn from_factored(num: Poly, factors: Vec<Factor>) -> Expr {
        Rat::build(num, factors)
    }

    pub fn quotient(num: Poly, den: Poly) -> Result<Expr, ExprError> {
        if den.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Expr::from_poly(num).checked_div(&Expr::from_poly(den))
    }

    pub fn zero() -> Expr {
        Expr::from_poly_raw(Poly::zero())
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn int(v: i64) -> Expr {
        Expr::from_poly_raw(Poly::constant(Q::int(v)))
    }

    pub fn q(v: Q) -> Expr {
        Expr::from_poly_raw(Poly::constant(v))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::q(Q::new(n, d))
    }

    pub fn atom(a: Atom) -> Expr {
        Expr::from_poly_raw(Poly::atom(a))
    }

    pub fn sym(name: &str) -> Expr {
        Expr::atom(Atom::sym(name))
    }

    pub fn t() -> Expr {
        Expr::atom(Atom::var(Var::T))
    }

    pub fn r() -> Expr {
        Expr::atom(Atom::var(Var::R))
    }

    pub fn var(v: Var) -> Expr {
        Expr::atom(Atom::var(v))
    }

    pub fn field(f: Field) -> Expr {
        Expr::jet(f, 0, 0)
    }

    pub fn jet(f: Field, t: u32, r: u32) -> Expr {
        Expr::atom(Atom::jet(f, t, r))
    }

    pub fn u() -> Expr {
        Expr::field(Field::U)
    }

    pub fn rho() -> Expr {
        Expr::field(Field::Rho)
    }

    pub fn s() -> Expr {
        Expr::field(Field::S)
    }

    /// Opaque function symbol applied to arguments.
    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        let deriv = vec![0; args.len()];
        Expr::func_deriv(name, args, deriv)
    }

    /// Partial derivative of an opaque function; `deriv[i]` counts
    /// differentiations in argument `i`.
    pub fn func_deriv(name: &str, args: Vec<Expr>, deriv: Vec<u32>) -> Expr {
        assert_eq!(args.len(), deriv.len(), "derivative index arity mismatch");
        Expr::atom(Atom::intern(AtomKind::Func {
            name: name.to_string(),
            args,
            deriv,
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.factors.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        if !self.is_polynomial() {
            return None;
        }
        self.0.num.as_constant()
    }

    pub fn numerator(&self) -> &Poly {
        &self.0.num
    }

    /// The expanded denominator.
    pub fn denominator(&self) -> Poly {
        factors_product(&self.0.factors)
    }

    /// The denominator as monic factors with multiplicities.
    pub fn denominator_factors(&self) -> &[Factor] {
        &self.0.factors
    }

    /// Single atom with unit coefficient and exponent.
    pub fn as_atom(&self) -> Option<Atom> {
        if !self.is_polynomial() {
            return None;
        }
        let (m, c) = self.0.num.as_monomial()?;
        if !c.is_one() || m.len() != 1 || m[0].1 != Exponent::int(1) {
            return None;
        }
        Some(m[0].0)
    }

    pub fn node_count(&self) -> usize {
        self.0.num.node_count() + self.0.factors.iter().map(|(f, _)| f.node_count()).sum::<usize>()
    }

    pub fn term_count(&self) -> usize {
        self.0.num.len() + self.0.factors.iter().map(|(f, _)| f.len()).sum::<usize>()
    }

    pub fn checked_div(&self, o: &Expr) -> Result<Expr, ExprError> {
        if o.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        if o.is_polynomial() {
            if let Some((m, c)) = o.0.num.as_monomial() {
                let inv = Poly::monomial(inv_mono(m), c.recip());
                return Ok(self.mul_poly(&inv));
            }
        }
        // self.num · Π o.factors / (Π self.factors · o.num)
        let num = Expr::from_poly(self.0.num.mul_raw(&o.denominator()));
        let mut raw = merge_factors(&num.0.factors, &self.0.factors, |a, b| a + b);
        raw.push((o.0.num.clone(), 1));
        Ok(Rat::build(num.0.num.clone(), raw))
    }

    fn mul_poly(&self, p: &Poly) -> Expr {
        let num = Expr::from_poly(self.0.num.mul_raw(p));
        if self.is_polynomial() {
            return num;
        }
        let raw = merge_factors(&num.0.factors, &self.0.factors, |a, b| a + b);
        Rat::build(num.0.num.clone(), raw)
    }

    pub fn scale(&self, k: Q) -> Expr {
        if k.is_zero() {
            return Expr::zero();
        }
        Expr::from_rat(Rat {
            num: self.0.num.scale(k),
            factors: self.0.factors.clone(),
        })
    }

    pub fn powi(&self, k: i64) -> Expr {
        if k == 0 {
            return Expr::one();
        }
        if k < 0 {
            return Expr::one()
                .checked_div(&self.powi(-k))
                .expect("power of zero expression with negative exponent");
        }
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `self^e` for an exponent that is a Laurent polynomial in constant
    /// symbols.
    pub fn pow_exponent(&self, e: &Exponent) -> Expr {
        if e.is_zero() {
            return Expr::one();
        }
        if let Some(k) = e.as_int() {
            return self.powi(k);
        }
        if self.is_zero() {
            return Expr::zero();
        }
        if !self.is_polynomial() {
            let mut acc = Expr::from_poly_raw(self.0.num.clone()).pow_exponent(e);
            for (f, m) in &self.0.factors {
                let ex = e.neg().scale(Q::int(*m as i64));
                acc = &acc * &Expr::from_poly_raw(f.clone()).pow_exponent(&ex);
            }
            return acc;
        }
        if let Some((m, c)) = self.0.num.as_monomial() {
            let mono = Poly::monomial(pow_mono(m, e), Q::ONE);
            let coeff = if c.is_one() {
                Expr::one()
            } else {
                match e.as_q().and_then(|eq| c.pow_rational(eq)) {
                    Some(v) => Expr::q(v),
                    None if c.is_negative() => {
                        // Real powers of negative constants stay opaque.
                        return pow_atom(self.clone(), e);
                    }
                    None => pow_atom(Expr::q(c), e),
                }
            };
            return &coeff * &Expr::from_poly(mono);
        }
        pow_atom(self.clone(), e)
    }

    pub fn pow(&self, e: &Expr) -> Result<Expr, ExprError> {
        let ex = Exponent::from_expr(e).ok_or(ExprError::UnsupportedExponent)?;
        if self.is_zero() && ex.as_q().is_some_and(|q| !q.is_negative() || q.is_zero()) {
            return Ok(if ex.is_zero() { Expr::one() } else { Expr::zero() });
        }
        if self.is_zero() {
            return Err(ExprError::DivisionByZero);
        }
        Ok(self.pow_exponent(&ex))
    }

    pub fn powq(&self, e: Q) -> Expr {
        self.pow_exponent(&Exponent::q(e))
    }

    pub fn sqrt(&self) -> Expr {
        self.powq(Q::new(1, 2))
    }

    pub fn recip(&self) -> Expr {
        Expr::one().checked_div(self).expect("reciprocal of zero")
    }

    pub fn ln(&self) -> Expr {
        if !self.is_polynomial() {
            let mut acc = Expr::from_poly_raw(self.0.num.clone()).ln();
            for (f, m) in &self.0.factors {
                acc = &acc - &Expr::from_poly_raw(f.clone()).ln().scale(Q::int(*m as i64));
            }
            return acc;
        }
        if let Some((m, c)) = self.0.num.as_monomial() {
            let mut acc = if c.is_one() {
                Expr::zero()
            } else {
                Expr::atom(Atom::intern(AtomKind::Ln(Expr::q(c))))
            };
            for (a, e) in m.iter() {
                let inner = match &*a.kind() {
                    AtomKind::Exp(x) => x.clone(),
                    AtomKind::Pow(b) => Expr::atom(Atom::intern(AtomKind::Ln(b.clone()))),
                    _ => Expr::atom(Atom::intern(AtomKind::Ln(Expr::atom(*a)))),
                };
                acc = &acc + &(&e.to_expr() * &inner);
            }
            return acc;
        }
        Expr::atom(Atom::intern(AtomKind::Ln(self.clone())))
    }

    pub fn exp(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        if !self.is_polynomial() {
            return Expr::atom(Atom::intern(AtomKind::Exp(self.clone())));
        }
        // exp(c·ln y + rest) = y^c · exp(rest) for integer c.
        let mut rest = Vec::new();
        let mut factor = Expr::one();
        for (m, c) in self.0.num.terms() {
            if c.is_integer() && m.len() == 1 && m[0].1 == Exponent::int(1) && m[0].0.is_ln() {
                if let AtomKind::Ln(y) = &*m[0].0.kind() {
                    factor = &factor * &y.powi(c.numer());
                    continue;
                }
            }
            rest.push((m.clone(), *c));
        }
        let rest = Poly::from_terms(rest);
        if rest.is_zero() {
            return factor;
        }
        let e = Expr::atom(Atom::intern(AtomKind::Exp(Expr::from_poly_raw(rest))));
        &factor * &e
    }

    /// All atoms appearing at top level (not inside composite atoms).
    pub fn top_atoms(&self) -> Vec<Atom> {
        let mut out: Vec<Atom> = self
            .0
            .num
            .terms()
            .iter()
            .chain(self.0.factors.iter().flat_map(|(f, _)| f.terms().iter()))
            .flat_map(|(m, _)| m.iter().map(|(a, _)| *a))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Plain atoms (symbols, variables, jets) at any depth.
    pub fn plain_atoms(&self) -> Vec<Atom> {
        let mut seen = rustc_hash::FxHashSet::default();
        let mut out = Vec::new();
        collect_plain(self, &mut seen, &mut out);
        out.sort_unstable();
        out
    }

    /// Composite atoms named `name` (opaque functions) at any depth.
    pub fn contains_func(&self, name: &str) -> bool {
        self.top_atoms().into_iter().any(|a| match &*a.kind() {
            AtomKind::Func { name: n, args, .. } => {
                n == name || args.iter().any(|x| x.contains_func(name))
            }
            AtomKind::Ln(x) | AtomKind::Exp(x) | AtomKind::Pow(x) => x.contains_func(name),
            _ => false,
        })
    }
}

fn collect_plain(e: &Expr, seen: &mut rustc_hash::FxHashSet<Atom>, out: &mut Vec<Atom>) {
    for a in e.top_atoms() {
        if !seen.insert(a) {
            continue;
        }
        if a.is_plain() {
            out.push(a);
            continue;
        }
        match &*a.kind() {
            AtomKind::Func { args, .. } => {
                for x in args {
                    collect_plain(x, seen, out);
                }
            }
            AtomKind::Ln(x) | AtomKind::Exp(x) | AtomKind::Pow(x) => collect_plain(x, seen, out),
            _ => {}
        }
    }
}

fn pow_atom(base: Expr, e: &Exponent) -> Expr {
    let a = Atom::intern(AtomKind::Pow(base));
    let mut m = Mono::new();
    m.push((a, e.clone()));
    Expr::from_poly(Poly::monomial(m, Q::ONE))
}

fn needs_fixup(m: &Mono) -> bool {
    let mut exps = 0;
    for (a, e) in m.iter() {
        if a.is_exp() {
            exps += 1;
            if *e != Exponent::int(1) {
                return true;
            }
        }
        if a.is_pow() && e.as_int().is_some() {
            return true;
        }
    }
    exps > 1
}

fn fixup(p: Poly) -> Expr {
    let mut plain = Vec::new();
    let mut fixed = Vec::new();
    for (m, c) in p.into_terms() {
        if needs_fixup(&m) {
            fixed.push((m, c));
        } else {
            plain.push((m, c));
        }
    }
    let mut acc = Expr::from_poly_raw(Poly::from_terms(plain));
    for (m, c) in fixed {
        let mut rest = Mono::new();
        let mut exp_arg = Expr::zero();
        let mut factor = Expr::q(c);
        for (a, e) in m.iter() {
            if a.is_exp() {
                if let AtomKind::Exp(x) = &*a.kind() {
                    exp_arg = &exp_arg + &(&e.to_expr() * x);
                }
            } else if let (true, Some(k)) = (a.is_pow(), e.as_int()) {
                if let AtomKind::Pow(b) = &*a.kind() {
                    factor = &factor * &b.powi(k);
                }
            } else {
                rest.push((*a, e.clone()));
            }
        }
        let term = &Expr::from_poly_raw(Poly::monomial(rest, Q::ONE)) * &factor;
        acc = &acc + &(&term * &exp_arg.exp());
    }
    acc
}

impl Exponent {
    pub fn to_expr(&self) -> Expr {
        let mut terms = vec![(Mono::new(), self.constant())];
        for (sm, c) in self.symbolic_terms() {
            let m: Mono = sm.iter().map(|(a, k)| (*a, Exponent::int(*k as i64))).collect();
            terms.push((m, *c));
        }
        Expr::from_poly_raw(Poly::from_terms(terms))
    }

    /// Accepts Laurent polynomials in constant symbols with integer powers.
    pub fn from_expr(e: &Expr) -> Option<Exponent> {
        if !e.is_polynomial() {
            return None;
        }
        let mut c = Q::ZERO;
        let mut terms = Vec::new();
        for (m, coeff) in e.numerator().terms() {
            if m.is_empty() {
                c = *coeff;
                continue;
            }
            let mut sm = SymMono::new();
            for (a, k) in m.iter() {
                if !a.is_sym() {
                    return None;
                }
                sm.push((*a, k.as_int()? as i32));
            }
            terms.push((sm, *coeff));
        }
        Some(Exponent::from_terms(c, terms))
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        if self.is_polynomial() && o.is_polynomial() {
            return Expr::from_poly_raw(self.0.num.add(&o.0.num));
        }
        if self.0.factors == o.0.factors {
            return Rat::build(self.0.num.add(&o.0.num), self.0.factors.clone());
        }
        let lcm = merge_factors(&self.0.factors, &o.0.factors, u32::max);
        let cofactor = |own: &[Factor]| -> Poly {
            lcm.iter().fold(Poly::one(), |acc, (f, m)| {
                let have = own.iter().find(|(g, _)| g == f).map_or(0, |x| x.1);
                acc.mul_raw(&poly_pow(f, m - have))
            })
        };
        let num = self
            .0
            .num
            .mul_raw(&cofactor(&self.0.factors))
            .add(&o.0.num.mul_raw(&cofactor(&o.0.factors)));
        Rat::build(num, lcm)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        self + &(-o)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_rat(Rat {
            num: self.0.num.neg(),
            factors: self.0.factors.clone(),
        })
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        if self.is_zero() || o.is_zero() {
            return Expr::zero();
        }
        if self.is_polynomial() && o.is_polynomial() {
            return Expr::from_poly(self.0.num.mul_raw(&o.0.num));
        }
        let num = Expr::from_poly(self.0.num.mul_raw(&o.0.num));
        let mut raw = merge_factors(&num.0.factors, &self.0.factors, |a, b| a + b);
        raw = merge_factors(&raw, &o.0.factors, |a, b| a + b);
        Rat::build(num.0.num.clone(), raw)
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, o: &Expr) -> Expr {
        self.checked_div(o).expect("division by zero expression")
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr { (&self).$m(&o) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, o: &Expr) -> Expr { (&self).$m(o) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, o: Expr) -> Expr { self.$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}

impl From<Q> for Expr {
    fn from(v: Q) -> Expr {
        Expr::q(v)
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut terms = Vec::new();
        let mut rest = Expr::zero();
        for e in iter {
            if e.is_polynomial() {
                terms.extend(e.0.num.terms().iter().cloned());
            } else {
                rest = &rest + &e;
            }
        }
        &Expr::from_poly_raw(Poly::from_terms(terms)) + &rest
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
