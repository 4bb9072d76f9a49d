use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::expr::{parse, Expr, FuncDef, Parser};
use crate::model::Eos;

use super::{eval_at, Grid, History, NumericEos, Solver, SolverError, State};

fn default_cfl() -> f64 {
    0.4
}

/// Everything needed to run one simulation: grid, EOS, initial profiles
/// and horizon. Expressions are text in the usual syntax; profiles are in
/// `r`, function bodies in `x`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Space dimension.
    pub n: f64,
    /// Catalog kind name (`polytropic`, `entropic`, ...) or `custom`.
    pub eos: String,
    #[serde(default)]
    pub q: Option<String>,
    #[serde(default)]
    pub k: Option<String>,
    /// Pressure in `rho` and `S`, for `eos = "custom"`.
    #[serde(default)]
    pub pressure: Option<String>,
    /// Definitions of the opaque functions of the EOS family, e.g.
    /// `kappa = "exp(x)"`.
    #[serde(default)]
    pub functions: BTreeMap<String, String>,
    pub r_min: f64,
    pub r_max: f64,
    pub cells: usize,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    pub u0: String,
    pub rho0: String,
    pub s0: String,
    /// Initial transported domain for balance reports.
    #[serde(default)]
    pub domain: Option<[f64; 2]>,
    /// Starting radii of traced characteristics for drift reports.
    #[serde(default)]
    pub characteristics: Vec<f64>,
}

impl SimConfig {
    /// Polytropic `q = 2/n` gas in `n = 3` with `kappa = exp(S)`: a Gaussian
    /// density pulse on a gentle entropy ramp, stopped well before any shock.
    pub fn polytropic_pulse(cells: usize) -> SimConfig {
        SimConfig {
            n: 3.0,
            eos: "polytropic".into(),
            q: Some("2/3".into()),
            k: None,
            pressure: None,
            functions: BTreeMap::from([("kappa".into(), "exp(x)".into())]),
            r_min: 0.3,
            r_max: 2.7,
            cells,
            t_end: 0.25,
            cfl: default_cfl(),
            u0: "0.1*tanh((r-1.5)/0.4)".into(),
            rho0: "1 + 0.3*exp(-((r-1.5)/0.4)^2)".into(),
            s0: "0.2 + 0.1*tanh((r-1.5)/0.5)".into(),
            domain: Some([1.0, 2.0]),
            characteristics: (0..8).map(|i| 1.0 + i as f64 / 7.0).collect(),
        }
    }

    /// Entropic gas `p = S` in `n = 3`: outward flow with increasing
    /// entropy, so `w = S_r/rho > 0` and `U > 0` along the traced paths.
    pub fn entropic_ramp(cells: usize) -> SimConfig {
        SimConfig {
            n: 3.0,
            eos: "entropic".into(),
            q: None,
            k: None,
            pressure: None,
            functions: BTreeMap::from([("kappa".into(), "x".into())]),
            r_min: 0.5,
            r_max: 2.5,
            cells,
            t_end: 0.2,
            cfl: default_cfl(),
            u0: "0.4 + 0.1*tanh((r-1.5)/0.4)".into(),
            rho0: "1 + 0.2*tanh((r-1.5)/0.4)".into(),
            s0: "1 + 0.3*tanh((r-1.5)/0.4)".into(),
            domain: Some([1.0, 2.0]),
            characteristics: (0..8).map(|i| 1.0 + i as f64 / 7.0).collect(),
        }
    }

    pub fn with_cells(&self, cells: usize) -> SimConfig {
        SimConfig {
            cells,
            ..self.clone()
        }
    }

    fn expr(&self, key: &str, text: &str) -> Result<Expr, SolverError> {
        parse(text).map_err(|e| SolverError::Config(format!("{key}: {e}")))
    }

    pub fn numeric_eos(&self) -> Result<NumericEos, SolverError> {
        let n_expr = if self.n.fract() == 0.0 && self.n.abs() < 1e6 {
            Expr::int(self.n as i64)
        } else {
            Expr::sym("n")
        };
        let q = self.q.as_deref().map(|t| self.expr("q", t)).transpose()?;
        let k = self.k.as_deref().map(|t| self.expr("k", t)).transpose()?;
        let family = if self.eos == "custom" {
            let p = self
                .pressure
                .as_deref()
                .ok_or_else(|| SolverError::Config("custom EOS needs `pressure`".into()))?;
            Eos::custom(self.expr("pressure", p)?)?
        } else {
            Eos::from_kind_name(&self.eos, q, k, &n_expr)?
        };
        let defs = self
            .functions
            .iter()
            .map(|(name, body)| {
                let e = Parser::new()
                    .with_symbols(&["x"])
                    .parse(body)
                    .map_err(|e| SolverError::Config(format!("{name}: {e}")))?;
                Ok(FuncDef::new(name, &["x"], e))
            })
            .collect::<Result<Vec<_>, SolverError>>()?;
        NumericEos::new(&family, defs, self.n, Vec::new())
    }

    pub fn setup(&self) -> Result<Setup, SolverError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::Config(format!("cfl = {} outside (0, 1]", self.cfl)));
        }
        if !(self.t_end > 0.0) {
            return Err(SolverError::Config("t_end must be positive".into()));
        }
        let grid = Grid::new(self.r_min, self.r_max, self.cells, self.n)?;
        let eos = self.numeric_eos()?;
        let profiles = [
            self.expr("u0", &self.u0)?,
            self.expr("rho0", &self.rho0)?,
            self.expr("s0", &self.s0)?,
        ];
        let solver = Solver::new(grid, eos, self.cfl);
        let n = self.n;
        let initial = solver.project(0.0, |r| {
            profiles
                .clone()
                .map(|e| eval_at(&e, 0.0, r, [f64::NAN; 3], n, &[]))
        })?;
        Ok(Setup {
            config: self.clone(),
            solver,
            initial,
        })
    }
}

/// A configured solver with its projected initial state.
pub struct Setup {
    pub config: SimConfig,
    pub solver: Solver,
    pub initial: State,
}

impl Setup {
    pub fn run(&self) -> Result<History, SolverError> {
        self.solver.run(self.initial.clone(), self.config.t_end)
    }
}
