//! Sparse Laurent polynomials over interned atoms.
//!
//! Exponents are themselves Laurent polynomials in constant symbols with
//! rational coefficients, so `r^(n-1)` and `rho^(1+2/n)` are ordinary
//! monomials.

use std::cmp::Ordering;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::atom::Atom;
use super::q::Q;

pub type SymMono = SmallVec<[(Atom, i32); 2]>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Exponent {
    c: Q,
    sym: Vec<(SymMono, Q)>,
}

fn mul_sym_mono(a: &SymMono, b: &SymMono) -> SymMono {
    let mut out = SymMono::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i]);
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push(b[j]);
            j += 1;
        } else {
            let e = a[i].1 + b[j].1;
            if e != 0 {
                out.push((a[i].0, e));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Exponent {
    pub fn q(c: Q) -> Exponent {
        Exponent { c, sym: Vec::new() }
    }

    pub fn int(v: i64) -> Exponent {
        Exponent::q(Q::int(v))
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero() && self.sym.is_empty()
    }

    pub fn as_q(&self) -> Option<Q> {
        self.sym.is_empty().then_some(self.c)
    }

    pub fn as_int(&self) -> Option<i64> {
        self.as_q().filter(|q| q.is_integer()).map(|q| q.numer())
    }

    pub fn constant(&self) -> Q {
        self.c
    }

    pub fn symbolic_terms(&self) -> &[(SymMono, Q)] {
        &self.sym
    }

    fn from_parts(c: Q, mut map: Vec<(SymMono, Q)>) -> Exponent {
        map.sort_by(|a, b| a.0.cmp(&b.0));
        let mut sym: Vec<(SymMono, Q)> = Vec::with_capacity(map.len());
        let mut c = c;
        for (m, v) in map {
            if m.is_empty() {
                c = c + v;
                continue;
            }
            match sym.last_mut() {
                Some(last) if last.0 == m => last.1 = last.1 + v,
                _ => sym.push((m, v)),
            }
        }
        sym.retain(|(_, v)| !v.is_zero());
        Exponent { c, sym }
    }

    pub fn from_terms(c: Q, terms: Vec<(SymMono, Q)>) -> Exponent {
        Exponent::from_parts(c, terms)
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        if self.sym.is_empty() && o.sym.is_empty() {
            return Exponent::q(self.c + o.c);
        }
        let mut all = self.sym.clone();
        all.extend(o.sym.iter().cloned());
        Exponent::from_parts(self.c + o.c, all)
    }

    pub fn neg(&self) -> Exponent {
        Exponent {
            c: -self.c,
            sym: self.sym.iter().map(|(m, v)| (m.clone(), -*v)).collect(),
        }
    }

    pub fn sub(&self, o: &Exponent) -> Exponent {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: Q) -> Exponent {
        if k.is_zero() {
            return Exponent::default();
        }
        Exponent {
            c: self.c * k,
            sym: self.sym.iter().map(|(m, v)| (m.clone(), *v * k)).collect(),
        }
    }

    pub fn mul(&self, o: &Exponent) -> Exponent {
        if let Some(k) = o.as_q() {
            return self.scale(k);
        }
        if let Some(k) = self.as_q() {
            return o.scale(k);
        }
        let mut terms = Vec::new();
        let lhs: Vec<(SymMono, Q)> = std::iter::once((SymMono::new(), self.c))
            .chain(self.sym.iter().cloned())
            .collect();
        let rhs: Vec<(SymMono, Q)> = std::iter::once((SymMono::new(), o.c))
            .chain(o.sym.iter().cloned())
            .collect();
        for (ma, ca) in &lhs {
            for (mb, cb) in &rhs {
                terms.push((mul_sym_mono(ma, mb), *ca * *cb));
            }
        }
        Exponent::from_parts(Q::ZERO, terms)
    }
}

/// Monomial: sorted atoms with non-zero exponents.
pub type Mono = SmallVec<[(Atom, Exponent); 4]>;

pub fn mul_mono(a: &Mono, b: &Mono) -> Mono {
    if a.is_empty() {
        return b.clone();
    }
    if b.is_empty() {
        return a.clone();
    }
    let mut out = Mono::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push(b[j].clone());
            j += 1;
        } else {
            let e = a[i].1.add(&b[j].1);
            if !e.is_zero() {
                out.push((a[i].0, e));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Monomial raised to an exponent.
pub fn pow_mono(m: &Mono, e: &Exponent) -> Mono {
    m.iter()
        .map(|(a, x)| (*a, x.mul(e)))
        .filter(|(_, x)| !x.is_zero())
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Mono, Q)>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Poly {
    fn cmp(&self, o: &Self) -> Ordering {
        self.terms.cmp(&o.terms)
    }
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Mono::new(), c)],
            }
        }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::ONE)
    }

    pub fn monomial(m: Mono, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn atom(a: Atom) -> Poly {
        let mut m = Mono::new();
        m.push((a, Exponent::int(1)));
        Poly::monomial(m, Q::ONE)
    }

    /// Builds a polynomial from unsorted, possibly repeated terms.
    pub fn from_terms(terms: Vec<(Mono, Q)>) -> Poly {
        let mut acc: FxHashMap<Mono, Q> = FxHashMap::default();
        acc.reserve(terms.len());
        for (m, c) in terms {
            let e = acc.entry(m).or_insert(Q::ZERO);
            *e = *e + c;
        }
        let mut terms: Vec<(Mono, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Mono, Q)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Mono, Q)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::ZERO),
            [(m, c)] if m.is_empty() => Some(*c),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant() == Some(Q::ONE)
    }

    pub fn as_monomial(&self) -> Option<(&Mono, Q)> {
        match self.terms.as_slice() {
            [(m, c)] => Some((m, *c)),
            _ => None,
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1 + b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -*c)).collect(),
        }
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: Q) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), *c * k)).collect(),
        }
    }

    /// Multiplies every term by `c·m`.
    pub fn mul_term(&self, m: &Mono, c: Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let terms: Vec<(Mono, Q)> = self
            .terms
            .iter()
            .map(|(tm, tc)| (mul_mono(tm, m), *tc * c))
            .collect();
        Poly::from_terms(terms)
    }

    /// Raw product without special-atom fix-ups; see `Expr` for those.
    pub fn mul_raw(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = self.as_constant() {
            return o.scale(c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(c);
        }
        let mut acc: FxHashMap<Mono, Q> = FxHashMap::default();
        acc.reserve(self.len() * o.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m = mul_mono(ma, mb);
                let e = acc.entry(m).or_insert(Q::ZERO);
                *e = *e + *ca * *cb;
            }
        }
        let mut terms: Vec<(Mono, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        Poly { terms }
    }

    /// True when some monomial carries an exp atom or a power atom, which
    /// may need merging or expansion after multiplication.
    pub fn has_special_atoms(&self) -> bool {
        self.terms
            .iter()
            .any(|(m, _)| m.iter().any(|(a, _)| a.is_exp() || a.is_pow()))
    }

    /// Total number of atom occurrences, a proxy for expression size.
    pub fn node_count(&self) -> usize {
        self.terms.iter().map(|(m, _)| 1 + m.len()).sum()
    }
}
