use crate::numeric::{FieldSource, Pchip};

use super::{Grid, NumericEos, SolverError, State};

/// Primitive fields `(U, rho, S)` at the cell centers at one time, with
/// monotone cubic interpolants.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<[f64; 3]>,
    interp: [Pchip; 3],
}

impl Snapshot {
    fn new(grid: &Grid, state: &State) -> Snapshot {
        let values = state.primitives();
        let column = |k: usize| {
            let y: Vec<f64> = values.iter().map(|v| v[k]).collect();
            Pchip::new(grid.centers(), &y).expect("grid centers increase")
        };
        Snapshot {
            t: state.t,
            interp: [column(0), column(1), column(2)],
            values,
        }
    }

    /// Interpolated `(U, rho, S)`; `None` outside the outermost centers.
    pub fn sample(&self, r: f64) -> Option<[f64; 3]> {
        Some([self.interp[0].eval(r)?, self.interp[1].eval(r)?, self.interp[2].eval(r)?])
    }

    /// `[value, d/dr]` of each field.
    pub fn jets(&self, r: f64) -> Option<[[f64; 2]; 3]> {
        let mut out = [[0.0; 2]; 3];
        for (k, p) in self.interp.iter().enumerate() {
            out[k] = [p.eval(r)?, p.derivative(r)?];
        }
        Some(out)
    }
}

/// Every step of a run, with the per-step relative full-grid mass defect.
#[derive(Clone)]
pub struct History {
    pub grid: Grid,
    pub eos: NumericEos,
    pub snapshots: Vec<Snapshot>,
    pub states: Vec<State>,
    pub mass_defects: Vec<f64>,
}

impl History {
    pub(crate) fn new(grid: Grid, eos: NumericEos) -> History {
        History {
            grid,
            eos,
            snapshots: Vec::new(),
            states: Vec::new(),
            mass_defects: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, state: &State, defect: f64) {
        self.snapshots.push(Snapshot::new(&self.grid, state));
        self.states.push(state.clone());
        if self.snapshots.len() > 1 {
            self.mass_defects.push(defect);
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.snapshots.last().map_or(0.0, |s| s.t)
    }

    pub fn max_mass_defect(&self) -> f64 {
        self.mass_defects.iter().copied().fold(0.0, f64::max)
    }

    /// Four snapshot indices around `t` and their Lagrange weights.
    fn stencil(&self, t: f64) -> Option<([usize; 4], [f64; 4])> {
        let m = self.snapshots.len();
        let (t0, t1) = (self.snapshots[0].t, self.t_end());
        let slack = 1e-12 * (1.0 + t1.abs());
        if m < 4 || t < t0 - slack || t > t1 + slack {
            return None;
        }
        let k = self.snapshots.partition_point(|s| s.t <= t).saturating_sub(1);
        let start = k.saturating_sub(1).min(m - 4);
        let idx = [start, start + 1, start + 2, start + 3];
        let ts = idx.map(|i| self.snapshots[i].t);
        let mut w = [1.0; 4];
        for a in 0..4 {
            for b in 0..4 {
                if a != b {
                    w[a] *= (t - ts[b]) / (ts[a] - ts[b]);
                }
            }
        }
        Some((idx, w))
    }

    /// Jets at arbitrary `(t, r)`, cubic in time.
    pub fn jets(&self, t: f64, r: f64) -> Option<[[f64; 2]; 3]> {
        let (idx, w) = self.stencil(t)?;
        let mut out = [[0.0; 2]; 3];
        for (i, wi) in idx.iter().zip(w) {
            let j = self.snapshots[*i].jets(r)?;
            for k in 0..3 {
                out[k][0] += wi * j[k][0];
                out[k][1] += wi * j[k][1];
            }
        }
        Some(out)
    }

    /// Particle path from `r0` at the first snapshot, one position per
    /// snapshot, by Heun's method on the recorded velocities.
    pub fn trace(&self, r0: f64) -> Result<Vec<f64>, SolverError> {
        let mut path = Vec::with_capacity(self.snapshots.len());
        path.push(r0);
        let exit = |t: f64| SolverError::CharacteristicExit { r0, t };
        let mut r = r0;
        for w in self.snapshots.windows(2) {
            let h = w[1].t - w[0].t;
            let u0 = w[0].sample(r).ok_or_else(|| exit(w[0].t))?[0];
            let u1 = w[1].sample(r + h * u0).ok_or_else(|| exit(w[1].t))?[0];
            r += 0.5 * h * (u0 + u1);
            path.push(r);
        }
        Ok(path)
    }
}

impl FieldSource for History {
    fn sample(&self, t: f64, r: f64) -> Option<[f64; 3]> {
        let (idx, w) = self.stencil(t)?;
        let mut out = [0.0; 3];
        for (i, wi) in idx.iter().zip(w) {
            let v = self.snapshots[*i].sample(r)?;
            for k in 0..3 {
                out[k] += wi * v[k];
            }
        }
        Some(out)
    }
}

/// The interval between two particle paths, at every snapshot.
#[derive(Clone, Debug)]
pub struct TransportedDomain {
    pub r_a: Vec<f64>,
    pub r_b: Vec<f64>,
}

impl TransportedDomain {
    pub fn trace(history: &History, r_a: f64, r_b: f64) -> Result<TransportedDomain, SolverError> {
        if r_a >= r_b {
            return Err(SolverError::Config(format!("domain [{r_a}, {r_b}] is empty")));
        }
        Ok(TransportedDomain {
            r_a: history.trace(r_a)?,
            r_b: history.trace(r_b)?,
        })
    }
}
