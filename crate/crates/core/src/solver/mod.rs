//! Finite-volume solver for the radial Euler system on `r_min <= r <= r_max`,
//! with characteristic tracing and conserved-integral diagnostics.
//!
//! The state holds cell averages of `(rho, rho U, rho S)` weighted by the
//! radial volume element, so that `sum V_i rho_i` is the discrete mass. Faces
//! carry the area `r^(n-1)`; the pressure enters the momentum equation as a
//! face flux balanced by the source `p_i (A_{i+1/2} - A_{i-1/2})`, which
//! keeps states at rest with constant pressure exactly steady.

mod config;
mod history;
mod report;

use rayon::prelude::*;

use crate::expr::{Evaluator, Expr, ExprError, Field, FuncDef, Valuation, Var};
use crate::model::{Eos, EosKind, ModelError};

pub use config::{SimConfig, Setup};
pub use history::{History, Snapshot, TransportedDomain};
pub use report::{
    advected_drift, conserved_report, observed_order, symmetry_residual_check, Balance,
    BalanceKind, ConservedReport, DriftReport, DriftScalar, ResidualReport, ScalarDrift,
};

#[derive(Clone, Debug, thiserror::Error, PartialEq)]
pub enum SolverError {
    #[error("grid needs 0 < r_min < r_max and at least 16 cells")]
    BadGrid,
    #[error("time step {dt:e} violates the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("vacuum: density {rho:e} at r = {r} is below the floor")]
    Vacuum { r: f64, rho: f64 },
    #[error("non-finite state at r = {0}")]
    NonFinite(f64),
    #[error("characteristic from r = {r0} left the grid at t = {t}")]
    CharacteristicExit { r0: f64, t: f64 },
    #[error("integral `{name}` does not apply to this equation of state")]
    Inapplicable { name: String },
    #[error("scalar `{0}` needs r-derivatives of order two or more")]
    ScalarOrder(String),
    #[error("equation of state is not concrete: {0}")]
    OpaqueEos(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Group(#[from] crate::symmetry::groups::GroupError),
}

/// Uniform radial grid in dimension `n`.
#[derive(Clone, Debug)]
pub struct Grid {
    pub r_min: f64,
    pub r_max: f64,
    pub n: f64,
    centers: Vec<f64>,
    edges: Vec<f64>,
    volumes: Vec<f64>,
    areas: Vec<f64>,
}

impl Grid {
    pub fn new(r_min: f64, r_max: f64, cells: usize, n: f64) -> Result<Grid, SolverError> {
        if !(r_min > 0.0 && r_max > r_min && cells >= 16 && n > 0.0) {
            return Err(SolverError::BadGrid);
        }
        let dr = (r_max - r_min) / cells as f64;
        let edges: Vec<f64> = (0..=cells).map(|i| r_min + dr * i as f64).collect();
        let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let volumes = edges
            .windows(2)
            .map(|w| (w[1].powf(n) - w[0].powf(n)) / n)
            .collect();
        let areas = edges.iter().map(|r| r.powf(n - 1.0)).collect();
        Ok(Grid {
            r_min,
            r_max,
            n,
            centers,
            edges,
            volumes,
            areas,
        })
    }

    pub fn cells(&self) -> usize {
        self.centers.len()
    }

    pub fn dr(&self) -> f64 {
        (self.r_max - self.r_min) / self.cells() as f64
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// `∫ r^(n-1) dr` over each cell.
    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// `r^(n-1)` at each edge.
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }
}

/// Values of `t`, `r`, named constants and the first two r-jets of the
/// fields at a point. Opaque `A(r, U, w)` is evaluated by quadrature.
pub(crate) struct JetPoint<'a> {
    pub t: f64,
    pub r: f64,
    /// `[value, d/dr]` of `(U, rho, S)`.
    pub jets: [[f64; 2]; 3],
    pub n: f64,
    pub params: &'a [(String, f64)],
}

impl Valuation for JetPoint<'_> {
    fn sym(&self, name: &str) -> f64 {
        if name == "n" {
            return self.n;
        }
        self.params
            .iter()
            .find(|(k, _)| k == name)
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
        let k = match field {
            Field::U => 0,
            Field::Rho => 1,
            Field::S => 2,
            _ => return f64::NAN,
        };
        if t > 0 || r > 1 {
            return f64::NAN;
        }
        self.jets[k][r as usize]
    }
    fn func(&self, name: &str, args: &[f64], deriv: &[u32]) -> f64 {
        if name == crate::advected::A_FN && args.len() == 3 && deriv.iter().all(|d| *d == 0) {
            return crate::advected::eval_a(args[0], args[1], args[2], self.n, 1e-11)
                .unwrap_or(f64::NAN);
        }
        f64::NAN
    }
}

/// Evaluates a concrete expression in `(t, r, U, rho, S)`.
pub(crate) fn eval_at(e: &Expr, t: f64, r: f64, v: [f64; 3], n: f64, params: &[(String, f64)]) -> f64 {
    let p = JetPoint {
        t,
        r,
        jets: [[v[0], f64::NAN], [v[1], f64::NAN], [v[2], f64::NAN]],
        n,
        params,
    };
    Evaluator::new(&p).eval(e)
}

fn is_concrete(e: &Expr) -> bool {
    e.top_atoms().into_iter().all(|a| {
        if a.is_func() {
            false
        } else if a.is_plain() {
            true
        } else {
            match &*a.kind() {
                crate::expr::AtomKind::Ln(x)
                | crate::expr::AtomKind::Exp(x)
                | crate::expr::AtomKind::Pow(x) => is_concrete(x),
                _ => false,
            }
        }
    })
}

/// A catalog EOS with its opaque functions replaced by concrete ones, with
/// `p`, `a²` and `e` ready for numeric evaluation.
#[derive(Clone)]
pub struct NumericEos {
    pub eos: Eos,
    pub defs: Vec<FuncDef>,
    pub n: f64,
    pub params: Vec<(String, f64)>,
    pressure: Expr,
    sound_speed_sq: Expr,
    energy: Option<Expr>,
}

impl NumericEos {
    /// `family` carries the catalog tag; `defs` define its opaque functions.
    pub fn new(family: &Eos, defs: Vec<FuncDef>, n: f64, params: Vec<(String, f64)>) -> Result<NumericEos, SolverError> {
        let eos = family.instantiate(&defs)?;
        if !is_concrete(&eos.pressure) {
            return Err(SolverError::OpaqueEos(format!("p = {}", eos.pressure)));
        }
        let sound_speed_sq = eos.sound_speed_sq();
        let e = eos.internal_energy().clone();
        let energy = is_concrete(&e).then_some(e);
        Ok(NumericEos {
            pressure: eos.pressure.clone(),
            eos,
            defs,
            n,
            params,
            sound_speed_sq,
            energy,
        })
    }

    fn eval(&self, e: &Expr, rho: f64, s: f64) -> f64 {
        eval_at(e, 0.0, 1.0, [0.0, rho, s], self.n, &self.params)
    }

    pub fn pressure(&self, rho: f64, s: f64) -> f64 {
        self.eval(&self.pressure, rho, s)
    }

    /// `a² = dp/drho` at fixed `S`, clipped at zero.
    pub fn sound_speed_sq(&self, rho: f64, s: f64) -> f64 {
        self.eval(&self.sound_speed_sq, rho, s).max(0.0)
    }

    pub fn pressure_expr(&self) -> &Expr {
        &self.pressure
    }

    /// Closed-form internal energy, when the EOS has one.
    pub fn energy_expr(&self) -> Option<&Expr> {
        self.energy.as_ref()
    }

    /// Whether the concrete pressure is polytropic with `q = 2/n`.
    pub fn is_critical_polytrope(&self) -> bool {
        match &self.eos.kind {
            EosKind::Polytropic { q } => {
                let q = eval_at(q, 0.0, 1.0, [0.0; 3], self.n, &self.params);
                (q - 2.0 / self.n).abs() < 1e-12
            }
            _ => false,
        }
    }

    pub fn is_barotropic(&self) -> bool {
        crate::expr::partial(&self.pressure, crate::expr::Atom::jet(Field::S, 0, 0)).is_zero()
    }

    /// Pressure depends on `S` alone.
    pub fn is_entropic(&self) -> bool {
        crate::expr::partial(&self.pressure, crate::expr::Atom::jet(Field::Rho, 0, 0)).is_zero()
    }
}

/// Cell averages of `(rho, rho U, rho S)` at time `t`.
#[derive(Clone, Debug)]
pub struct State {
    pub t: f64,
    pub q: Vec<[f64; 3]>,
}

impl State {
    /// Cell values of `(U, rho, S)`.
    pub fn primitives(&self) -> Vec<[f64; 3]> {
        self.q.iter().map(|c| [c[1] / c[0], c[0], c[2] / c[0]]).collect()
    }

    pub fn mass(&self, grid: &Grid) -> f64 {
        self.q.iter().zip(grid.volumes()).map(|(c, v)| c[0] * v).sum()
    }
}

/// MC limiter.
fn mc(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else {
        let m = (0.5 * (a + b)).abs().min(2.0 * a.abs()).min(2.0 * b.abs());
        m.copysign(a)
    }
}

/// Time derivative of the cell averages and the net outward mass flux.
struct Rhs {
    dq: Vec<[f64; 3]>,
    mass_outflow: f64,
    max_speed: f64,
}

pub struct Solver {
    pub grid: Grid,
    pub eos: NumericEos,
    pub cfl: f64,
    pub rho_floor: f64,
}

impl Solver {
    pub fn new(grid: Grid, eos: NumericEos, cfl: f64) -> Solver {
        Solver {
            grid,
            eos,
            cfl,
            rho_floor: 1e-10,
        }
    }

    /// Cell averages of given `(U, rho, S)` profiles, by 3-point Gauss
    /// quadrature with the radial weight.
    pub fn project<F: Fn(f64) -> [f64; 3]>(&self, t: f64, init: F) -> Result<State, SolverError> {
        const G: [(f64, f64); 3] = [
            (-0.774_596_669_241_483_4, 5.0 / 9.0),
            (0.0, 8.0 / 9.0),
            (0.774_596_669_241_483_4, 5.0 / 9.0),
        ];
        let n = self.grid.n;
        let mut q = Vec::with_capacity(self.grid.cells());
        for (i, w) in self.grid.edges().windows(2).enumerate() {
            let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            let mut acc = [0.0; 3];
            for (x, g) in G {
                let r = mid + half * x;
                let [u, rho, s] = init(r);
                let wt = g * half * r.powf(n - 1.0);
                acc[0] += wt * rho;
                acc[1] += wt * rho * u;
                acc[2] += wt * rho * s;
            }
            let v = self.grid.volumes()[i];
            q.push([acc[0] / v, acc[1] / v, acc[2] / v]);
        }
        let state = State { t, q };
        self.check(&state.q)?;
        Ok(state)
    }

    fn check(&self, q: &[[f64; 3]]) -> Result<(), SolverError> {
        for (c, r) in q.iter().zip(self.grid.centers()) {
            if !c.iter().all(|v| v.is_finite()) {
                return Err(SolverError::NonFinite(*r));
            }
            if c[0] <= self.rho_floor {
                return Err(SolverError::Vacuum { r: *r, rho: c[0] });
            }
        }
        Ok(())
    }

    /// Largest `|U| + a` over the cells.
    pub fn max_speed(&self, state: &State) -> f64 {
        state
            .primitives()
            .iter()
            .map(|[u, rho, s]| u.abs() + self.eos.sound_speed_sq(*rho, *s).sqrt())
            .fold(0.0, f64::max)
    }

    fn rhs(&self, q: &[[f64; 3]]) -> Result<Rhs, SolverError> {
        self.check(q)?;
        let m = q.len();
        let prim: Vec<[f64; 3]> = q.iter().map(|c| [c[0], c[1] / c[0], c[2] / c[0]]).collect();
        // Two ghost cells per side with zero-gradient extrapolation.
        let ext = |i: isize| prim[i.clamp(0, m as isize - 1) as usize];
        let slopes: Vec<[f64; 3]> = (-1..=m as isize)
            .map(|i| {
                let (a, b, c) = (ext(i - 1), ext(i), ext(i + 1));
                [0, 1, 2].map(|k| mc(b[k] - a[k], c[k] - b[k]))
            })
            .collect();
        // slopes[j] belongs to cell j - 1.
        let face_state = |cell: isize, side: f64| {
            let w = ext(cell);
            let s = slopes[(cell + 1) as usize];
            [0, 1, 2].map(|k| w[k] + 0.5 * side * s[k])
        };
        let faces: Vec<([f64; 3], f64)> = (0..=m as isize)
            .into_par_iter()
            .map(|f| self.rusanov(face_state(f - 1, 1.0), face_state(f, -1.0)))
            .collect();
        let areas = self.grid.areas();
        let vols = self.grid.volumes();
        let mut dq = Vec::with_capacity(m);
        for i in 0..m {
            let (fl, fr) = (&faces[i].0, &faces[i + 1].0);
            let (al, ar) = (areas[i], areas[i + 1]);
            let p = self.eos.pressure(prim[i][0], prim[i][2]);
            let mut d = [0.0; 3];
            for k in 0..3 {
                d[k] = -(ar * fr[k] - al * fl[k]) / vols[i];
            }
            d[1] += p * (ar - al) / vols[i];
            dq.push(d);
        }
        let max_speed = faces.iter().map(|f| f.1).fold(0.0, f64::max);
        Ok(Rhs {
            dq,
            mass_outflow: areas[m] * faces[m].0[0] - areas[0] * faces[0].0[0],
            max_speed,
        })
    }

    /// Rusanov flux between primitive states `(rho, U, S)`, with the local
    /// wave speed.
    fn rusanov(&self, l: [f64; 3], r: [f64; 3]) -> ([f64; 3], f64) {
        let side = |w: [f64; 3]| {
            let [rho, u, s] = w;
            let p = self.eos.pressure(rho, s);
            let a = self.eos.sound_speed_sq(rho, s).sqrt();
            let q = [rho, rho * u, rho * s];
            let f = [rho * u, rho * u * u + p, rho * u * s];
            (q, f, u.abs() + a)
        };
        let (ql, fl, sl) = side(l);
        let (qr, fr, sr) = side(r);
        let alpha = sl.max(sr);
        let flux = [0, 1, 2].map(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * alpha * (qr[k] - ql[k]));
        (flux, alpha)
    }

    /// One SSP-RK2 step. Returns the new state and the mass that left
    /// through the boundaries during the step.
    pub fn step(&self, state: &State, dt: f64) -> Result<(State, f64), SolverError> {
        let k1 = self.rhs(&state.q)?;
        let limit = self.cfl * self.grid.dr() / k1.max_speed.max(f64::MIN_POSITIVE);
        if dt > limit {
            return Err(SolverError::CflViolation { dt, limit });
        }
        let q1: Vec<[f64; 3]> = state
            .q
            .iter()
            .zip(&k1.dq)
            .map(|(q, d)| [0, 1, 2].map(|k| q[k] + dt * d[k]))
            .collect();
        let k2 = self.rhs(&q1)?;
        let q2: Vec<[f64; 3]> = state
            .q
            .iter()
            .zip(q1.iter().zip(&k2.dq))
            .map(|(q0, (q1, d))| [0, 1, 2].map(|k| 0.5 * q0[k] + 0.5 * (q1[k] + dt * d[k])))
            .collect();
        self.check(&q2)?;
        let outflow = 0.5 * dt * (k1.mass_outflow + k2.mass_outflow);
        Ok((
            State {
                t: state.t + dt,
                q: q2,
            },
            outflow,
        ))
    }

    /// Advances to `t_end` with a fixed step chosen from the initial wave
    /// speed, recording every step.
    pub fn run(&self, initial: State, t_end: f64) -> Result<History, SolverError> {
        let speed = self.max_speed(&initial).max(1e-12);
        let dt0 = 0.8 * self.cfl * self.grid.dr() / speed;
        let span = t_end - initial.t;
        let steps = (span / dt0).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let mut history = History::new(self.grid.clone(), self.eos.clone());
        let mut state = initial;
        history.push(&state, 0.0);
        for _ in 0..steps {
            let m0 = state.mass(&self.grid);
            let (next, outflow) = self.step(&state, dt)?;
            let defect = (next.mass(&self.grid) - m0 + outflow).abs() / m0;
            history.push(&next, defect);
            state = next;
        }
        Ok(history)
    }
}
