//! Numerical building blocks: monotone cubic interpolation, adaptive
//! Gauss–Kronrod quadrature, bracketed root finding and numeric evaluation
//! of expressions in a single field.

use std::sync::Arc;

use crate::expr::{Evaluator, Expr, Field, Valuation, Var};

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum NumericError {
    #[error("quadrature did not reach tolerance {tol:e} (estimate {err:e})")]
    NoConvergence { tol: f64, err: f64 },
    #[error("integrand is not finite at y = {0}")]
    NonFinite(f64),
    #[error("no sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("interpolation needs at least two strictly increasing nodes")]
    BadNodes,
}

/// Values `(U, rho, S)` of a solution at arbitrary `(t, r)`.
pub trait FieldSource: Sync {
    fn sample(&self, t: f64, r: f64) -> Option<[f64; 3]>;
}

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson slopes, so
/// monotone data stay monotone.
#[derive(Clone, Debug)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Pchip, NumericError> {
        let n = x.len();
        if n < 2 || y.len() != n || x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NumericError::BadNodes);
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip {
            x: x.to_vec(),
            y: y.to_vec(),
            d,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        }
    }

    /// Value at `t`, or `None` outside the node range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let (a, b) = self.domain();
        if !(a..=b).contains(&t) {
            return None;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        Some(
            (2.0 * s3 - 3.0 * s2 + 1.0) * self.y[i]
                + (s3 - 2.0 * s2 + s) * h * self.d[i]
                + (-2.0 * s3 + 3.0 * s2) * self.y[i + 1]
                + (s3 - s2) * h * self.d[i + 1],
        )
    }

    pub fn derivative(&self, t: f64) -> Option<f64> {
        let (a, b) = self.domain();
        if !(a..=b).contains(&t) {
            return None;
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        Some(
            (6.0 * s2 - 6.0 * s) / h * self.y[i]
                + (3.0 * s2 - 4.0 * s + 1.0) * self.d[i]
                + (-6.0 * s2 + 6.0 * s) / h * self.y[i + 1]
                + (3.0 * s2 - 2.0 * s) * self.d[i + 1],
        )
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64), NumericError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = 0.0;
    let mut g = 0.0;
    for (i, x) in GK_NODES.iter().enumerate() {
        let pts: &[f64] = if *x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for s in pts {
            let y = c + s * h * x;
            let v = f(y);
            if !v.is_finite() {
                return Err(NumericError::NonFinite(y));
            }
            k += K15_WEIGHTS[i] * v;
            if i % 2 == 1 {
                g += G7_WEIGHTS[i / 2] * v;
            }
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]` to absolute
/// tolerance `tol`. Panels are bisected in a fixed order, so results are
/// deterministic.
pub fn integrate(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, NumericError> {
    const MAX_PANELS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b)?;
    let mut panels = vec![(a, b, v, e)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.3).sum();
        if total_err <= tol {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        if panels.len() >= MAX_PANELS {
            return Err(NumericError::NoConvergence { tol, err: total_err });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.partial_cmp(&y.1 .3).unwrap())
            .unwrap();
        let (pa, pb, _, _) = panels.swap_remove(idx);
        let m = 0.5 * (pa + pb);
        let (v1, e1) = gk15(&mut f, pa, m)?;
        let (v2, e2) = gk15(&mut f, m, pb)?;
        panels.push((pa, m, v1, e1));
        panels.push((m, pb, v2, e2));
    }
}

/// Bisection for a root of `f` in `[lo, hi]`, to absolute tolerance `tol`
/// in the argument.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64, NumericError> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(NumericError::NoBracket { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scalar function of one real variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

struct Point {
    t: f64,
    r: f64,
    fields: [f64; 3],
    syms: Vec<(String, f64)>,
}

impl Valuation for Point {
    fn sym(&self, name: &str) -> f64 {
        self.syms
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .unwrap_or(f64::NAN)
    }
    fn var(&self, v: Var) -> f64 {
        match v {
            Var::T => self.t,
            Var::R => self.r,
        }
    }
    fn jet(&self, field: Field, t: u32, r: u32) -> f64 {
        if t + r > 0 {
            return f64::NAN;
        }
        match field {
            Field::U => self.fields[0],
            Field::Rho => self.fields[1],
            Field::S => self.fields[2],
            _ => f64::NAN,
        }
    }
    fn func(&self, _: &str, _: &[f64], _: &[u32]) -> f64 {
        f64::NAN
    }
}

/// Evaluates a concrete expression in `(t, r, U, rho, S)`; unknown atoms
/// give NaN.
pub fn eval_pointwise(e: &Expr, t: f64, r: f64, fields: [f64; 3], syms: &[(&str, f64)]) -> f64 {
    let p = Point {
        t,
        r,
        fields,
        syms: syms.iter().map(|(n, v)| (n.to_string(), *v)).collect(),
    };
    Evaluator::new(&p).eval(e)
}

/// Turns an expression in `S` alone into a numeric function.
pub fn scalar_fn_of_s(e: &Expr, syms: &[(&str, f64)]) -> ScalarFn {
    let e = e.clone();
    let syms: Vec<(String, f64)> = syms.iter().map(|(n, v)| (n.to_string(), *v)).collect();
    Arc::new(move |s| {
        let p = Point {
            t: 0.0,
            r: 1.0,
            fields: [0.0, 1.0, s],
            syms: syms.clone(),
        };
        Evaluator::new(&p).eval(&e)
    })
}
