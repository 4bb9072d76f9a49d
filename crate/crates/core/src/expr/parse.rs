//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | '+' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | name | name '(' args ')' | name '[' ints ']' '(' args ')'
//!         | 'diff' '(' expr (',' name)+ ')' | '(' expr ')'
//! ```
//!
//! `diff(e, t)` and `diff(e, r)` are total derivatives; any other name gives
//! the partial derivative with respect to that coordinate. `name[i,j](x, y)`
//! is the `(i, j)` partial derivative of an opaque function.

use rustc_hash::FxHashSet;

use super::atom::{Field, Var};
use super::calculus::{partial, total_derivative};
use super::q::Q;
use super::{Expr, ExprError};

const RESERVED_SYMBOLS: [&str; 4] = ["n", "q", "k", "eps"];

pub struct Parser {
    symbols: FxHashSet<String>,
}

impl Default for Parser {
    fn default() -> Self {
        Parser::new()
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser {
    pub fn new() -> Parser {
        Parser {
            symbols: RESERVED_SYMBOLS.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Declares extra constant symbols (group parameters, placeholders).
    pub fn with_symbols(mut self, names: &[&str]) -> Parser {
        self.symbols.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn parse(&self, text: &str) -> Result<Expr, ExprError> {
        let mut c = Cursor {
            src: text.as_bytes(),
            pos: 0,
        };
        let e = self.expr(&mut c)?;
        c.skip_ws();
        if c.pos < c.src.len() {
            return Err(c.error("unexpected trailing input"));
        }
        Ok(e)
    }

    fn expr(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        let mut acc = self.term(c)?;
        loop {
            match c.peek() {
                Some(b'+') => {
                    c.bump();
                    acc = &acc + &self.term(c)?;
                }
                Some(b'-') => {
                    c.bump();
                    acc = &acc - &self.term(c)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        let mut acc = self.unary(c)?;
        loop {
            match c.peek() {
                Some(b'*') => {
                    c.bump();
                    acc = &acc * &self.unary(c)?;
                }
                Some(b'/') => {
                    c.bump();
                    let at = c.pos;
                    let d = self.unary(c)?;
                    acc = acc.checked_div(&d).map_err(|_| ExprError::Syntax {
                        pos: at,
                        msg: "division by zero".into(),
                    })?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        match c.peek() {
            Some(b'-') => {
                c.bump();
                Ok(-self.unary(c)?)
            }
            Some(b'+') => {
                c.bump();
                self.unary(c)
            }
            _ => self.power(c),
        }
    }

    fn power(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        let base = self.atom(c)?;
        if c.peek() == Some(b'^') {
            c.bump();
            let at = c.pos;
            let e = self.unary(c)?;
            return base.pow(&e).map_err(|err| ExprError::Syntax {
                pos: at,
                msg: err.to_string(),
            });
        }
        Ok(base)
    }

    fn args(&self, c: &mut Cursor) -> Result<Vec<Expr>, ExprError> {
        c.expect(b'(')?;
        let mut out = vec![self.expr(c)?];
        while c.peek() == Some(b',') {
            c.bump();
            out.push(self.expr(c)?);
        }
        c.expect(b')')?;
        Ok(out)
    }

    fn atom(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        match c.peek() {
            Some(b'(') => {
                c.bump();
                let e = self.expr(c)?;
                c.expect(b')')?;
                Ok(e)
            }
            Some(ch) if ch.is_ascii_digit() || ch == b'.' => c.number(),
            Some(ch) if ch.is_ascii_alphabetic() || ch == b'_' => {
                let start = c.pos;
                let name = c.ident();
                self.named(c, &name, start)
            }
            Some(_) => Err(c.error("expected a number, name or '('")),
            None => Err(c.error("unexpected end of input")),
        }
    }

    fn named(&self, c: &mut Cursor, name: &str, start: usize) -> Result<Expr, ExprError> {
        match c.peek() {
            Some(b'(') => {
                if name == "diff" {
                    return self.diff(c);
                }
                let at = c.pos;
                let args = self.args(c)?;
                let one = |args: Vec<Expr>| -> Result<Expr, ExprError> {
                    match <[Expr; 1]>::try_from(args) {
                        Ok([x]) => Ok(x),
                        Err(_) => Err(ExprError::Syntax {
                            pos: at,
                            msg: format!("`{name}` takes one argument"),
                        }),
                    }
                };
                match name {
                    "ln" | "log" => Ok(one(args)?.ln()),
                    "exp" => Ok(one(args)?.exp()),
                    "sqrt" => Ok(one(args)?.sqrt()),
                    "tanh" => {
                        let e2 = one(args)?.scale(Q::int(2)).exp();
                        Ok(&(&e2 - &Expr::one()) / &(&e2 + &Expr::one()))
                    }
                    _ => Ok(Expr::func(name, args)),
                }
            }
            Some(b'[') => {
                c.bump();
                let mut deriv = vec![c.uint()?];
                while c.peek() == Some(b',') {
                    c.bump();
                    deriv.push(c.uint()?);
                }
                c.expect(b']')?;
                let at = c.pos;
                let args = self.args(c)?;
                if args.len() != deriv.len() {
                    return Err(ExprError::Syntax {
                        pos: at,
                        msg: "derivative index and argument counts differ".into(),
                    });
                }
                Ok(Expr::func_deriv(name, args, deriv))
            }
            _ => self.bare(name, start),
        }
    }

    fn bare(&self, name: &str, pos: usize) -> Result<Expr, ExprError> {
        if let Some(f) = Field::from_name(name) {
            return Ok(Expr::field(f));
        }
        match name {
            "t" => Ok(Expr::t()),
            "r" => Ok(Expr::r()),
            _ if self.symbols.contains(name) => Ok(Expr::sym(name)),
            _ => Err(ExprError::UnknownIdentifier {
                name: name.to_string(),
                pos,
            }),
        }
    }

    fn diff(&self, c: &mut Cursor) -> Result<Expr, ExprError> {
        c.expect(b'(')?;
        let mut e = self.expr(c)?;
        let mut any = false;
        while c.peek() == Some(b',') {
            c.bump();
            c.skip_ws();
            let at = c.pos;
            let v = c.ident();
            if v.is_empty() {
                return Err(c.error("expected a variable name"));
            }
            e = match v.as_str() {
                "t" => total_derivative(&e, Var::T),
                "r" => total_derivative(&e, Var::R),
                _ => {
                    let x = self.bare(&v, at)?;
                    let a = x.as_atom().ok_or_else(|| ExprError::Syntax {
                        pos: at,
                        msg: "not a coordinate".into(),
                    })?;
                    partial(&e, a)
                }
            };
            any = true;
        }
        if !any {
            return Err(c.error("diff needs at least one variable"));
        }
        c.expect(b')')?;
        Ok(e)
    }
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn error(&self, msg: &str) -> ExprError {
        ExprError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn expect(&mut self, ch: u8) -> Result<(), ExprError> {
        if self.peek() == Some(ch) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", ch as char)))
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn uint(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(ExprError::Syntax {
                pos: start,
                msg: "expected an unsigned integer".into(),
            })
    }

    /// Integer or decimal literal, kept exact.
    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let mut int: i64 = 0;
        let mut den: i64 = 1;
        let mut seen_dot = false;
        let mut digits = 0;
        while self.pos < self.src.len() {
            let ch = self.src[self.pos];
            if ch.is_ascii_digit() {
                int = int
                    .checked_mul(10)
                    .and_then(|v| v.checked_add((ch - b'0') as i64))
                    .ok_or(ExprError::Syntax {
                        pos: start,
                        msg: "numeric literal too large".into(),
                    })?;
                if seen_dot {
                    den = den.checked_mul(10).ok_or(ExprError::Syntax {
                        pos: start,
                        msg: "numeric literal too long".into(),
                    })?;
                }
                digits += 1;
            } else if ch == b'.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        if digits == 0 {
            return Err(ExprError::Syntax {
                pos: start,
                msg: "malformed number".into(),
            });
        }
        Ok(Expr::q(Q::new(int, den)))
    }
}

/// Parses with the default symbol set.
pub fn parse(text: &str) -> Result<Expr, ExprError> {
    Parser::new().parse(text)
}
