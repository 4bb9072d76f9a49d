//! Hash-consed atoms of the jet-space polynomial algebra.
//!
//! Every distinct atom is interned once in a process-wide table, so atoms
//! compare and hash as integers. The table only ever grows; entries are never
//! mutated after insertion.

use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use rustc_hash::FxHashMap;

use super::Expr;

/// Dependent variables of the radial system. `P` is only used by the
/// gas-dynamics formulation, where pressure replaces entropy. `RhoW` is the
/// weighted density `r^(n-1) rho` used when splitting Casimir equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Field {
    U,
    Rho,
    S,
    P,
    RhoW,
}

impl Field {
    pub const FLUID: [Field; 3] = [Field::U, Field::Rho, Field::S];
    pub const GAS: [Field; 3] = [Field::U, Field::Rho, Field::P];

    pub fn name(self) -> &'static str {
        match self {
            Field::U => "U",
            Field::Rho => "rho",
            Field::S => "S",
            Field::P => "p",
            Field::RhoW => "rhot",
        }
    }

    pub fn from_name(s: &str) -> Option<Field> {
        match s {
            "U" => Some(Field::U),
            "rho" => Some(Field::Rho),
            "S" => Some(Field::S),
            "p" => Some(Field::P),
            "rhot" => Some(Field::RhoW),
            _ => None,
        }
    }
}

/// Independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    R,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::R => "r",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AtomKind {
    /// Constant symbol: parameters such as `n`, `q`, `k`, `eps`, or a
    /// placeholder standing for an argument slot.
    Sym(String),
    Var(Var),
    /// `∂_t^t ∂_r^r field`.
    Jet { field: Field, t: u32, r: u32 },
    /// Opaque function with a partial-derivative count per argument.
    Func {
        name: String,
        args: Vec<Expr>,
        deriv: Vec<u32>,
    },
    Ln(Expr),
    Exp(Expr),
    /// Power of a non-monomial polynomial base. The exponent lives in the
    /// enclosing monomial and is never a non-negative integer.
    Pow(Expr),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(u32);

const TAG_SHIFT: u32 = 29;
const TAG_PLAIN: u32 = 0;
const TAG_FUNC: u32 = 1;
const TAG_LN: u32 = 2;
const TAG_EXP: u32 = 3;
const TAG_POW: u32 = 4;

struct Interner {
    kinds: Vec<Arc<AtomKind>>,
    map: FxHashMap<Arc<AtomKind>, Atom>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(|| {
    RwLock::new(Interner {
        kinds: Vec::new(),
        map: FxHashMap::default(),
    })
});

impl Atom {
    pub fn intern(kind: AtomKind) -> Atom {
        if let Some(a) = INTERNER.read().unwrap().map.get(&kind) {
            return *a;
        }
        let mut w = INTERNER.write().unwrap();
        if let Some(a) = w.map.get(&kind) {
            return *a;
        }
        let tag = match &kind {
            AtomKind::Sym(_) | AtomKind::Var(_) | AtomKind::Jet { .. } => TAG_PLAIN,
            AtomKind::Func { .. } => TAG_FUNC,
            AtomKind::Ln(_) => TAG_LN,
            AtomKind::Exp(_) => TAG_EXP,
            AtomKind::Pow(_) => TAG_POW,
        };
        let idx = w.kinds.len() as u32;
        assert!(idx < (1 << TAG_SHIFT), "atom table exhausted");
        let atom = Atom((tag << TAG_SHIFT) | idx);
        let kind = Arc::new(kind);
        w.kinds.push(kind.clone());
        w.map.insert(kind, atom);
        atom
    }

    pub fn kind(self) -> Arc<AtomKind> {
        let idx = (self.0 & ((1 << TAG_SHIFT) - 1)) as usize;
        INTERNER.read().unwrap().kinds[idx].clone()
    }

    fn tag(self) -> u32 {
        self.0 >> TAG_SHIFT
    }

    /// Sym, Var or Jet: atoms with no inner expression.
    pub fn is_plain(self) -> bool {
        self.tag() == TAG_PLAIN
    }

    pub fn is_exp(self) -> bool {
        self.tag() == TAG_EXP
    }

    pub fn is_pow(self) -> bool {
        self.tag() == TAG_POW
    }

    pub fn is_func(self) -> bool {
        self.tag() == TAG_FUNC
    }

    pub fn is_ln(self) -> bool {
        self.tag() == TAG_LN
    }

    pub fn sym(name: &str) -> Atom {
        Atom::intern(AtomKind::Sym(name.to_string()))
    }

    pub fn var(v: Var) -> Atom {
        Atom::intern(AtomKind::Var(v))
    }

    pub fn jet(field: Field, t: u32, r: u32) -> Atom {
        Atom::intern(AtomKind::Jet { field, t, r })
    }

    pub fn as_jet(self) -> Option<(Field, u32, u32)> {
        if !self.is_plain() {
            return None;
        }
        match &*self.kind() {
            AtomKind::Jet { field, t, r } => Some((*field, *t, *r)),
            _ => None,
        }
    }

    pub fn as_sym(self) -> Option<String> {
        if !self.is_plain() {
            return None;
        }
        match &*self.kind() {
            AtomKind::Sym(s) => Some(s.clone()),
            _ => None,
        }
    }

    pub fn is_sym(self) -> bool {
        self.is_plain() && matches!(&*self.kind(), AtomKind::Sym(_))
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind())
    }
}
