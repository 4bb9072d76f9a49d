//! Exact rational numbers backed by `i64`.
//!
//! Arithmetic goes through `i128` and is reduced before narrowing back; a
//! result that does not fit panics instead of wrapping.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Q {
    num: i64,
    den: i64,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Q {
    pub const ZERO: Q = Q { num: 0, den: 1 };
    pub const ONE: Q = Q { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Q {
        Q::from_i128(num as i128, den as i128)
    }

    pub fn int(v: i64) -> Q {
        Q { num: v, den: 1 }
    }

    fn from_i128(mut num: i128, mut den: i128) -> Q {
        assert!(den != 0, "rational with zero denominator");
        if den < 0 {
            num = -num;
            den = -den;
        }
        let g = gcd(num, den).max(1);
        num /= g;
        den /= g;
        let (Ok(num), Ok(den)) = (i64::try_from(num), i64::try_from(den)) else {
            panic!("rational coefficient overflow");
        };
        Q { num, den }
    }

    pub fn numer(self) -> i64 {
        self.num
    }

    pub fn denom(self) -> i64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == 1 && self.den == 1
    }

    pub fn is_integer(self) -> bool {
        self.den == 1
    }

    pub fn is_negative(self) -> bool {
        self.num < 0
    }

    pub fn recip(self) -> Q {
        Q::from_i128(self.den as i128, self.num as i128)
    }

    pub fn abs(self) -> Q {
        Q { num: self.num.abs(), den: self.den }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Integer power; negative exponents invert.
    pub fn powi(self, e: i64) -> Q {
        let mut base = if e < 0 { self.recip() } else { self };
        let mut e = e.unsigned_abs();
        let mut acc = Q::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Exact `self^(p/q)` when the result is rational.
    pub fn pow_rational(self, e: Q) -> Option<Q> {
        if e.is_integer() {
            return Some(self.powi(e.num));
        }
        if self.num < 0 {
            return None;
        }
        let root = e.den as u32;
        let n = exact_root(self.num as u64, root)?;
        let d = exact_root(self.den as u64, root)?;
        Some(Q::new(n as i64, d as i64).powi(e.num))
    }

    pub fn binomial(n: u64, k: u64) -> Q {
        let mut acc: i128 = 1;
        for i in 0..k {
            acc = acc * (n - i) as i128 / (i + 1) as i128;
        }
        Q::from_i128(acc, 1)
    }
}

fn exact_root(v: u64, k: u32) -> Option<u64> {
    if v <= 1 {
        return Some(v);
    }
    let guess = (v as f64).powf(1.0 / k as f64).round() as u64;
    (guess.saturating_sub(1)..=guess + 1).find(|c| c.checked_pow(k) == Some(v))
}

impl Default for Q {
    fn default() -> Self {
        Q::ZERO
    }
}

impl From<i64> for Q {
    fn from(v: i64) -> Q {
        Q::int(v)
    }
}

impl Add for Q {
    type Output = Q;
    fn add(self, o: Q) -> Q {
        if self.den == 1 && o.den == 1 {
            if let Some(s) = self.num.checked_add(o.num) {
                return Q::int(s);
            }
        }
        Q::from_i128(
            self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128,
            self.den as i128 * o.den as i128,
        )
    }
}

impl Sub for Q {
    type Output = Q;
    fn sub(self, o: Q) -> Q {
        self + (-o)
    }
}

impl Neg for Q {
    type Output = Q;
    fn neg(self) -> Q {
        Q { num: -self.num, den: self.den }
    }
}

impl Mul for Q {
    type Output = Q;
    fn mul(self, o: Q) -> Q {
        if self.den == 1 && o.den == 1 {
            if let Some(p) = self.num.checked_mul(o.num) {
                return Q::int(p);
            }
        }
        Q::from_i128(self.num as i128 * o.num as i128, self.den as i128 * o.den as i128)
    }
}

impl Div for Q {
    type Output = Q;
    fn div(self, o: Q) -> Q {
        self * o.recip()
    }
}

impl Ord for Q {
    fn cmp(&self, o: &Q) -> Ordering {
        (self.num as i128 * o.den as i128).cmp(&(o.num as i128 * self.den as i128))
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, o: &Q) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_orders() {
        assert_eq!(Q::new(4, -6), Q::new(-2, 3));
        assert!(Q::new(1, 3) < Q::new(1, 2));
        assert_eq!(Q::new(1, 2) + Q::new(1, 3), Q::new(5, 6));
    }

    #[test]
    fn rational_powers() {
        assert_eq!(Q::new(4, 9).pow_rational(Q::new(1, 2)), Some(Q::new(2, 3)));
        assert_eq!(Q::int(2).pow_rational(Q::new(1, 2)), None);
        assert_eq!(Q::int(8).pow_rational(Q::new(-2, 3)), Some(Q::new(1, 4)));
        assert_eq!(Q::binomial(5, 2), Q::int(10));
    }
}
