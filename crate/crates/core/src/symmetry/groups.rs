//! Finite one-parameter groups generated by the catalog symmetries, acting
//! on numerical solutions.
//!
//! A point map `(t, r, U, rho, S) -> (t*, r*, U*, rho*, S*)` carries the
//! graph of a solution to the graph of a new one. The new solution is
//! evaluated at `(t*, r*)` by pulling the point back to `(t, r)`, sampling
//! the source and pushing the field values forward.

use std::sync::Arc;

use crate::numeric::{bisect, integrate, FieldSource, NumericError, ScalarFn};

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum GroupError {
    #[error("group parameter outside the domain of the conformal map (1 + eps t* <= 0)")]
    ConformalDomain,
    #[error("kappa is not invertible on the data range")]
    KappaNotInvertible,
    #[error("H is not invertible on the data range")]
    HNotInvertible,
    #[error("the pulled-back point ({t}, {r}) lies outside the source solution")]
    OutsideSource { t: f64, r: f64 },
    #[error("missing function `{0}` for this group")]
    MissingFunction(&'static str),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// The one-parameter groups of the catalog, by generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroupKind {
    /// `X1`: time translation.
    TimeTranslation,
    /// `X2`: dilation of `t` and `r`.
    Dilation,
    /// `Xii`: scaling with entropy shift, parameter `q`.
    ScalingShiftQ { q: f64 },
    /// `Xvii`: scaling with entropy shift.
    ScalingShiftDensity,
    /// `Xiii`: scaling with entropy shift at fixed density.
    ScalingShift,
    /// `Xiv`: scaling, parameter `q`.
    Scaling { q: f64 },
    /// `Xv`: conformal similarity in dimension `n`.
    Conformal { n: f64 },
    /// `Xvi`: `kappa -> kappa + eps`.
    EntropyShift,
    /// `Xix`: `H(S) -> H(S) + eps` with `H' = 1/F`.
    EntropyFlow,
    /// `Xvvi`: entropy flow with the compensating density factor.
    EntropyFlowDensity,
}

impl GroupKind {
    pub fn from_name(name: &str, q: f64, n: f64) -> Option<GroupKind> {
        Some(match name {
            "symm1" | "X1" => GroupKind::TimeTranslation,
            "symm2" | "X2" => GroupKind::Dilation,
            "symm.ii" | "Xii" => GroupKind::ScalingShiftQ { q },
            "symm.vii" | "Xvii" => GroupKind::ScalingShiftDensity,
            "symm4" | "symm.iii" | "Xiii" => GroupKind::ScalingShift,
            "symm.iv" | "Xiv" => GroupKind::Scaling { q },
            "symm.v" | "Xv" => GroupKind::Conformal { n },
            "symm.vi" | "Xvi" => GroupKind::EntropyShift,
            "symm.ix" | "Xix" => GroupKind::EntropyFlow,
            "symm.vvi" | "Xvvi" => GroupKind::EntropyFlowDensity,
            _ => return None,
        })
    }
}

/// Numeric `kappa`, `kappa'` and `F` for the groups that need them, with the
/// entropy range on which inverses are sought.
#[derive(Clone)]
pub struct GroupFunctions {
    pub kappa: Option<ScalarFn>,
    pub kappa_prime: Option<ScalarFn>,
    pub big_f: Option<ScalarFn>,
    pub s_range: (f64, f64),
}

impl Default for GroupFunctions {
    fn default() -> Self {
        GroupFunctions {
            kappa: None,
            kappa_prime: None,
            big_f: None,
            s_range: (-10.0, 10.0),
        }
    }
}

const ROOT_TOL: f64 = 1e-13;
const H_TOL: f64 = 1e-12;

pub struct GroupAction {
    pub kind: GroupKind,
    pub eps: f64,
    funcs: GroupFunctions,
}

impl GroupAction {
    pub fn new(kind: GroupKind, eps: f64, funcs: GroupFunctions) -> GroupAction {
        GroupAction { kind, eps, funcs }
    }

    fn need(&self, f: &Option<ScalarFn>, name: &'static str) -> Result<ScalarFn, GroupError> {
        f.clone().ok_or(GroupError::MissingFunction(name))
    }

    /// Preimage `(t, r)` of the point `(t*, r*)`.
    pub fn pull_back(&self, ts: f64, rs: f64) -> Result<(f64, f64), GroupError> {
        let e = self.eps;
        Ok(match self.kind {
            GroupKind::TimeTranslation => (ts - e, rs),
            GroupKind::Dilation => (ts * (-e).exp(), rs * (-e).exp()),
            GroupKind::ScalingShiftQ { q } | GroupKind::Scaling { q } => (ts, rs * (-q * e).exp()),
            GroupKind::ScalingShiftDensity | GroupKind::ScalingShift => (ts, rs * (-e).exp()),
            GroupKind::Conformal { .. } => {
                let s = 1.0 + e * ts;
                if s <= 0.0 {
                    return Err(GroupError::ConformalDomain);
                }
                (ts / s, rs / s)
            }
            GroupKind::EntropyShift | GroupKind::EntropyFlow | GroupKind::EntropyFlowDensity => {
                (ts, rs)
            }
        })
    }

    fn kappa_inverse(&self, target: f64) -> Result<f64, GroupError> {
        let kappa = self.need(&self.funcs.kappa, "kappa")?;
        let (lo, hi) = self.funcs.s_range;
        bisect(|s| kappa(s) - target, lo, hi, ROOT_TOL).map_err(|_| GroupError::KappaNotInvertible)
    }

    /// `H(b) - H(a) = ∫_a^b dy / F(y)`.
    fn h_increment(&self, a: f64, b: f64) -> Result<f64, GroupError> {
        let f = self.need(&self.funcs.big_f, "F")?;
        Ok(integrate(|y| 1.0 / f(y), a, b, H_TOL)?)
    }

    /// `S*` with `H(S*) = H(S) + eps`.
    fn h_flow(&self, s: f64) -> Result<f64, GroupError> {
        if self.eps == 0.0 {
            return Ok(s);
        }
        let (lo, hi) = self.funcs.s_range;
        let g = |x: f64| self.h_increment(s, x).map(|v| v - self.eps).unwrap_or(f64::NAN);
        bisect(g, lo, hi, ROOT_TOL).map_err(|_| GroupError::HNotInvertible)
    }

    /// Pushes field values at a source point forward.
    pub fn push_fields(&self, t: f64, r: f64, v: [f64; 3]) -> Result<[f64; 3], GroupError> {
        let e = self.eps;
        let [u, rho, s] = v;
        Ok(match self.kind {
            GroupKind::TimeTranslation | GroupKind::Dilation => v,
            GroupKind::ScalingShiftQ { q } => {
                let kappa = self.need(&self.funcs.kappa, "kappa")?;
                [
                    (q * e).exp() * u,
                    (2.0 * e).exp() * rho,
                    self.kappa_inverse((-2.0 * e).exp() * kappa(s))?,
                ]
            }
            GroupKind::ScalingShiftDensity => {
                let kappa = self.need(&self.funcs.kappa, "kappa")?;
                [
                    e.exp() * u,
                    (-2.0 * e).exp() * rho,
                    self.kappa_inverse((2.0 * e).exp() * kappa(s))?,
                ]
            }
            GroupKind::ScalingShift => {
                let kappa = self.need(&self.funcs.kappa, "kappa")?;
                [e.exp() * u, rho, self.kappa_inverse((2.0 * e).exp() * kappa(s))?]
            }
            GroupKind::Scaling { q } => [(q * e).exp() * u, (2.0 * e).exp() * rho, s],
            GroupKind::Conformal { n } => {
                let f = 1.0 - e * t;
                [f * u + e * r, f.powf(n) * rho, s]
            }
            GroupKind::EntropyShift => {
                let kappa = self.need(&self.funcs.kappa, "kappa")?;
                [u, rho, self.kappa_inverse(kappa(s) + e)?]
            }
            GroupKind::EntropyFlow => [u, rho, self.h_flow(s)?],
            GroupKind::EntropyFlowDensity => {
                let kp = self.need(&self.funcs.kappa_prime, "kappa'")?;
                let f = self.need(&self.funcs.big_f, "F")?;
                let s1 = self.h_flow(s)?;
                [u, rho * kp(s1) * f(s1) / (kp(s) * f(s)), s1]
            }
        })
    }

    /// The transformed solution as a new field source.
    pub fn apply<'a>(&'a self, src: &'a dyn FieldSource) -> Transformed<'a> {
        Transformed { action: self, src }
    }

    pub fn eval(&self, src: &dyn FieldSource, ts: f64, rs: f64) -> Result<[f64; 3], GroupError> {
        let (t, r) = self.pull_back(ts, rs)?;
        let v = src.sample(t, r).ok_or(GroupError::OutsideSource { t, r })?;
        self.push_fields(t, r, v)
    }
}

/// Solution obtained by applying a group action to another one.
pub struct Transformed<'a> {
    action: &'a GroupAction,
    src: &'a dyn FieldSource,
}

impl FieldSource for Transformed<'_> {
    fn sample(&self, t: f64, r: f64) -> Option<[f64; 3]> {
        self.action.eval(self.src, t, r).ok()
    }
}

/// Samples a transformed solution on a fixed radial grid at time `t*`.
pub fn apply_group(
    action: &GroupAction,
    src: &dyn FieldSource,
    ts: f64,
    grid: &[f64],
) -> Result<[Vec<f64>; 3], GroupError> {
    let mut out = [
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
    ];
    for &r in grid {
        let v = action.eval(src, ts, r)?;
        for k in 0..3 {
            out[k].push(v[k]);
        }
    }
    Ok(out)
}

/// Wraps a closure as a field source.
pub struct FnSource<F: Fn(f64, f64) -> Option<[f64; 3]> + Sync>(pub F);

impl<F: Fn(f64, f64) -> Option<[f64; 3]> + Sync> FieldSource for FnSource<F> {
    fn sample(&self, t: f64, r: f64) -> Option<[f64; 3]> {
        (self.0)(t, r)
    }
}

pub fn scalar(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ScalarFn {
    Arc::new(f)
}
