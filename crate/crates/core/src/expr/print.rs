//! Pretty-printer emitting the input grammar, so `parse(print(e)) == e`.

use std::fmt::{self, Display, Formatter, Write};

use super::atom::{Atom, AtomKind, Var};
use super::poly::{Exponent, Mono, Poly};
use super::q::Q;
use super::Expr;

fn write_atom(f: &mut Formatter<'_>, a: Atom) -> fmt::Result {
    match &*a.kind() {
        AtomKind::Sym(s) => f.write_str(s),
        AtomKind::Var(v) => f.write_str(v.name()),
        AtomKind::Jet { field, t, r } => {
            if *t == 0 && *r == 0 {
                return f.write_str(field.name());
            }
            write!(f, "diff({}", field.name())?;
            for _ in 0..*t {
                write!(f, ",{}", Var::T.name())?;
            }
            for _ in 0..*r {
                write!(f, ",{}", Var::R.name())?;
            }
            f.write_char(')')
        }
        AtomKind::Func { name, args, deriv } => {
            f.write_str(name)?;
            if deriv.iter().any(|d| *d > 0) {
                f.write_char('[')?;
                for (i, d) in deriv.iter().enumerate() {
                    if i > 0 {
                        f.write_char(',')?;
                    }
                    write!(f, "{d}")?;
                }
                f.write_char(']')?;
            }
            f.write_char('(')?;
            for (i, x) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_char(')')
        }
        AtomKind::Ln(x) => write!(f, "ln({x})"),
        AtomKind::Exp(x) => write!(f, "exp({x})"),
        AtomKind::Pow(b) => write!(f, "({b})"),
    }
}

fn write_exponent(f: &mut Formatter<'_>, e: &Exponent) -> fmt::Result {
    match e.as_q() {
        Some(q) if q.is_integer() && !q.is_negative() => write!(f, "^{q}"),
        _ => write!(f, "^({})", e.to_expr()),
    }
}

/// Writes `|c|·m` and returns nothing; the sign is handled by the caller.
fn write_term(f: &mut Formatter<'_>, m: &Mono, c: Q) -> fmt::Result {
    let c = c.abs();
    if m.is_empty() {
        return write!(f, "{c}");
    }
    let mut first = true;
    if !c.is_one() {
        if c.is_integer() {
            write!(f, "{c}")?;
        } else {
            write!(f, "({c})")?;
        }
        first = false;
    }
    for (a, e) in m.iter() {
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write_atom(f, *a)?;
        if *e != Exponent::int(1) {
            write_exponent(f, e)?;
        }
    }
    Ok(())
}

fn write_poly(f: &mut Formatter<'_>, p: &Poly) -> fmt::Result {
    if p.is_zero() {
        return f.write_char('0');
    }
    for (i, (m, c)) in p.terms().iter().enumerate() {
        match (i, c.is_negative()) {
            (0, true) => f.write_char('-')?,
            (0, false) => {}
            (_, true) => f.write_str(" - ")?,
            (_, false) => f.write_str(" + ")?,
        }
        write_term(f, m, *c)?;
    }
    Ok(())
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write_poly(f, self.numerator());
        }
        f.write_char('(')?;
        write_poly(f, self.numerator())?;
        f.write_str(")/(")?;
        for (i, (p, m)) in self.denominator_factors().iter().enumerate() {
            if i > 0 {
                f.write_char('*')?;
            }
            f.write_char('(')?;
            write_poly(f, p)?;
            f.write_char(')')?;
            if *m > 1 {
                write!(f, "^{m}")?;
            }
        }
        f.write_char(')')
    }
}
