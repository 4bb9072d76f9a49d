use serde::Serialize;

use crate::advected::{entropic_scalar, Branch};
use crate::casimir::j_scalar;
use crate::expr::{max_r_order, partial, substitute_functions, Atom, Evaluator, Expr, Field};
use crate::numeric::{integrate, FieldSource};
use crate::symmetry::groups::GroupAction;

use super::{eval_at, History, JetPoint, NumericEos, SolverError, TransportedDomain};

// ------------------------------------------------------------- balances

/// The kinematic conserved integrals, each `∫ r^(n-1) Φ dr` over a
/// transported domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BalanceKind {
    Mass,
    /// Generalized entropy `rho f(S)` with `f(S) = S`.
    Entropy,
    Energy,
    Dilational,
    Similarity,
    EnthalpyFlux,
    /// Entropy-weighted energy with `f(S) = S`.
    EntropyWeighted,
}

impl BalanceKind {
    pub const ALL: [BalanceKind; 7] = [
        BalanceKind::Mass,
        BalanceKind::Entropy,
        BalanceKind::Energy,
        BalanceKind::Dilational,
        BalanceKind::Similarity,
        BalanceKind::EnthalpyFlux,
        BalanceKind::EntropyWeighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BalanceKind::Mass => "mass",
            BalanceKind::Entropy => "entropy",
            BalanceKind::Energy => "energy",
            BalanceKind::Dilational => "dilational energy",
            BalanceKind::Similarity => "similarity energy",
            BalanceKind::EnthalpyFlux => "enthalpy flux",
            BalanceKind::EntropyWeighted => "entropy-weighted energy",
        }
    }

    pub fn from_name(s: &str) -> Option<BalanceKind> {
        let s = s.replace(['-', '_'], " ");
        BalanceKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.name().split(' ').next() == Some(s.as_str()))
    }

    pub fn applies(self, eos: &NumericEos) -> bool {
        match self {
            BalanceKind::Mass | BalanceKind::Entropy => true,
            BalanceKind::Energy => eos.energy_expr().is_some(),
            BalanceKind::Dilational | BalanceKind::Similarity => {
                eos.is_critical_polytrope() && eos.energy_expr().is_some()
            }
            BalanceKind::EnthalpyFlux => eos.is_barotropic() && eos.energy_expr().is_some(),
            BalanceKind::EntropyWeighted => eos.is_entropic(),
        }
    }
}

type PointFn = Box<dyn Fn(f64, f64, [f64; 3]) -> f64 + Sync>;

/// Unweighted density `Φ` and flux `ψ` with `D_t(wΦ) + D_r(UwΦ + ψ) = 0`.
struct Integrand {
    density: PointFn,
    flux: PointFn,
}

fn expr_fn(e: Expr, eos: &NumericEos) -> PointFn {
    let (n, params) = (eos.n, eos.params.clone());
    Box::new(move |t, r, v| eval_at(&e, t, r, v, n, &params))
}

fn integrand(kind: BalanceKind, eos: &NumericEos) -> Result<Integrand, SolverError> {
    if !kind.applies(eos) {
        return Err(SolverError::Inapplicable {
            name: kind.name().to_string(),
        });
    }
    let (t, r, u, rho, s) = (Expr::t(), Expr::r(), Expr::u(), Expr::rho(), Expr::s());
    let p = eos.pressure_expr().clone();
    let w = r.pow(&(&Expr::sym("n") - &Expr::one()))?;
    let half = |e: &Expr| e.scale(crate::expr::Q::new(1, 2));
    let energy = || {
        let e = eos.energy_expr().expect("checked by applies").clone();
        &rho * &(&half(&(&u * &u)) + &e)
    };
    let zero: PointFn = Box::new(|_, _, _| 0.0);
    Ok(match kind {
        BalanceKind::Mass => Integrand {
            density: expr_fn(rho, eos),
            flux: zero,
        },
        BalanceKind::Entropy => Integrand {
            density: expr_fn(&rho * &s, eos),
            flux: zero,
        },
        BalanceKind::Energy => Integrand {
            density: expr_fn(energy(), eos),
            flux: expr_fn(&(&w * &p) * &u, eos),
        },
        BalanceKind::Dilational => {
            let d = &(&t * &energy()) - &half(&(&(&r * &rho) * &u));
            let f = &(&w * &p) * &(&(&t * &u) - &half(&r));
            Integrand {
                density: expr_fn(d, eos),
                flux: expr_fn(f, eos),
            }
        }
        BalanceKind::Similarity => {
            let d = &(&(&(&t * &t) * &energy()) - &(&(&(&t * &r) * &rho) * &u)) + &half(&(&(&r * &r) * &rho));
            let f = &(&(&w * &p) * &t) * &(&(&t * &u) - &r);
            Integrand {
                density: expr_fn(d, eos),
                flux: expr_fn(f, eos),
            }
        }
        BalanceKind::EnthalpyFlux => {
            let e = eos.energy_expr().expect("checked by applies").clone();
            Integrand {
                density: expr_fn(&u / &w, eos),
                flux: expr_fn(&(&e + &(&p / &rho)) - &half(&(&u * &u)), eos),
            }
        }
        BalanceKind::EntropyWeighted => {
            // K(S) = ∫_0^S f κ' with f(S) = S and κ = p.
            let kp = partial(&p, Atom::jet(Field::S, 0, 0));
            let (n, params) = (eos.n, eos.params.clone());
            let big_k = move |sv: f64| {
                integrate(|x| x * eval_at(&kp, 0.0, 1.0, [0.0, 1.0, x], n, &params), 0.0, sv, 1e-13)
                    .unwrap_or(f64::NAN)
            };
            let big_k2 = big_k.clone();
            let n = eos.n;
            Integrand {
                density: Box::new(move |_, _, [u, rho, s]| 0.5 * rho * u * u * s - big_k(s)),
                flux: Box::new(move |_, r, [u, _, s]| r.powf(n - 1.0) * u * big_k2(s)),
            }
        }
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Balance {
    pub kind: BalanceKind,
    pub name: &'static str,
    pub initial: f64,
    pub final_value: f64,
    /// `∫_0^T [ψ]_{r_a}^{r_b} dt`.
    pub flux_integral: f64,
    /// `I(T) - I(0) + ∫ [ψ] dt`, zero for exact solutions.
    pub imbalance: f64,
    /// Imbalance over the largest of `|I(0)|`, `|I(T)|`, `∫ |ψ| dt`.
    pub relative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservedReport {
    pub cells: usize,
    pub steps: usize,
    pub t_end: f64,
    pub domain_initial: [f64; 2],
    pub domain_final: [f64; 2],
    pub max_mass_defect: f64,
    pub balances: Vec<Balance>,
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// `∫_a^b r^(n-1) Φ dr` at snapshot `k`: cell averages on whole cells,
/// Gauss quadrature of the interpolant on the cut cells.
fn volume_integral(h: &History, k: usize, a: f64, b: f64, phi: &PointFn) -> Result<f64, SolverError> {
    let snap = &h.snapshots[k];
    let g = &h.grid;
    let n = g.n;
    let edges = g.edges();
    let piece = |lo: f64, hi: f64| -> Result<f64, SolverError> {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let mut acc = 0.0;
        for (x, wt) in GAUSS3 {
            let r = mid + half * x;
            let v = snap.sample(r).ok_or(SolverError::CharacteristicExit { r0: r, t: snap.t })?;
            acc += wt * half * r.powf(n - 1.0) * phi(snap.t, r, v);
        }
        Ok(acc)
    };
    let first = edges.partition_point(|e| *e < a);
    let last = edges.partition_point(|e| *e <= b).saturating_sub(1);
    if first > last || first >= edges.len() {
        return piece(a, b);
    }
    let mut sum = piece(a, edges[first])? + piece(edges[last], b)?;
    for i in first..last {
        sum += g.volumes()[i] * phi(snap.t, g.centers()[i], snap.values[i]);
    }
    Ok(sum)
}

fn boundary_flux(h: &History, k: usize, r: f64, psi: &PointFn) -> Result<f64, SolverError> {
    let snap = &h.snapshots[k];
    let v = snap.sample(r).ok_or(SolverError::CharacteristicExit { r0: r, t: snap.t })?;
    Ok(psi(snap.t, r, v))
}

/// Balances of the requested integrals over a transported domain.
pub fn conserved_report(
    history: &History,
    domain: &TransportedDomain,
    kinds: &[BalanceKind],
) -> Result<ConservedReport, SolverError> {
    let m = history.snapshots.len();
    let last = m - 1;
    let mut balances = Vec::new();
    for &kind in kinds {
        let f = integrand(kind, &history.eos)?;
        let initial = volume_integral(history, 0, domain.r_a[0], domain.r_b[0], &f.density)?;
        let final_value = volume_integral(history, last, domain.r_a[last], domain.r_b[last], &f.density)?;
        let mut jumps = Vec::with_capacity(m);
        for k in 0..m {
            let fb = boundary_flux(history, k, domain.r_b[k], &f.flux)?;
            let fa = boundary_flux(history, k, domain.r_a[k], &f.flux)?;
            jumps.push((fb - fa, fb.abs() + fa.abs()));
        }
        let (mut flux_integral, mut flux_scale) = (0.0, 0.0);
        for k in 0..last {
            let dt = history.snapshots[k + 1].t - history.snapshots[k].t;
            flux_integral += 0.5 * dt * (jumps[k].0 + jumps[k + 1].0);
            flux_scale += 0.5 * dt * (jumps[k].1 + jumps[k + 1].1);
        }
        let imbalance = final_value - initial + flux_integral;
        let scale = initial.abs().max(final_value.abs()).max(flux_scale).max(f64::MIN_POSITIVE);
        balances.push(Balance {
            kind,
            name: kind.name(),
            initial,
            final_value,
            flux_integral,
            imbalance,
            relative: imbalance.abs() / scale,
        });
    }
    Ok(ConservedReport {
        cells: history.grid.cells(),
        steps: last,
        t_end: history.t_end(),
        domain_initial: [domain.r_a[0], domain.r_b[0]],
        domain_final: [domain.r_a[last], domain.r_b[last]],
        max_mass_defect: history.max_mass_defect(),
        balances,
    })
}

/// `log2(e_k / e_{k+1})` for errors on grids refined by a factor two.
pub fn observed_order(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0].abs() / w[1].abs()).log2()).collect()
}

// --------------------------------------------------------------- drifts

/// Advected scalars: `J_l = R^l S` and the entropic branches `J_{1,l}`,
/// `J_{2,l}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DriftScalar {
    J(u32),
    J1(u32),
    J2(u32),
}

impl DriftScalar {
    pub fn name(self) -> String {
        match self {
            DriftScalar::J(l) => format!("J_{l}"),
            DriftScalar::J1(l) => format!("J_{{1,{l}}}"),
            DriftScalar::J2(l) => format!("J_{{2,{l}}}"),
        }
    }

    fn expr(self, eos: &NumericEos) -> Result<Expr, SolverError> {
        let n = Expr::sym("n");
        let e = match self {
            DriftScalar::J(l) => j_scalar(l, &n),
            DriftScalar::J1(l) | DriftScalar::J2(l) => {
                if !eos.is_entropic() || l == 0 {
                    return Err(SolverError::Inapplicable { name: self.name() });
                }
                let branch = if matches!(self, DriftScalar::J1(_)) {
                    Branch::J1
                } else {
                    Branch::J2
                };
                entropic_scalar(branch, l, &n)
            }
        };
        let e = substitute_functions(&e, &eos.defs);
        for f in [Field::U, Field::Rho, Field::S] {
            if max_r_order(&e, f)?.unwrap_or(0) > 1 {
                return Err(SolverError::ScalarOrder(self.name()));
            }
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarDrift {
    pub name: String,
    pub starts: Vec<f64>,
    pub initial: Vec<f64>,
    /// `max_t |J(t) - J(0)| / |J(0)|` per characteristic.
    pub drift: Vec<f64>,
    pub max_drift: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftReport {
    pub cells: usize,
    pub t_end: f64,
    pub scalars: Vec<ScalarDrift>,
}

/// Evaluates each scalar along the characteristics starting at `starts`.
pub fn advected_drift(history: &History, scalars: &[DriftScalar], starts: &[f64]) -> Result<DriftReport, SolverError> {
    let eos = &history.eos;
    let exprs = scalars
        .iter()
        .map(|s| s.expr(eos))
        .collect::<Result<Vec<_>, _>>()?;
    let paths = starts
        .iter()
        .map(|r0| history.trace(*r0))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out: Vec<ScalarDrift> = scalars
        .iter()
        .map(|s| ScalarDrift {
            name: s.name(),
            starts: starts.to_vec(),
            initial: Vec::new(),
            drift: Vec::new(),
            max_drift: 0.0,
        })
        .collect();
    for (path, r0) in paths.iter().zip(starts) {
        let mut values = vec![Vec::with_capacity(path.len()); exprs.len()];
        for (snap, &r) in history.snapshots.iter().zip(path) {
            let jets = snap
                .jets(r)
                .ok_or(SolverError::CharacteristicExit { r0: *r0, t: snap.t })?;
            let point = JetPoint {
                t: snap.t,
                r,
                jets,
                n: eos.n,
                params: &eos.params,
            };
            let mut ev = Evaluator::new(&point);
            for (k, e) in exprs.iter().enumerate() {
                values[k].push(ev.eval(e));
            }
        }
        for (k, vals) in values.iter().enumerate() {
            let j0 = vals[0];
            let d = vals
                .iter()
                .map(|v| (v - j0).abs())
                .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
                / j0.abs();
            out[k].initial.push(j0);
            out[k].drift.push(d);
        }
    }
    for s in &mut out {
        s.max_drift = s.drift.iter().copied().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) });
    }
    Ok(DriftReport {
        cells: history.grid.cells(),
        t_end: history.t_end(),
        scalars: out,
    })
}

// ------------------------------------------------------- group residuals

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub eps: f64,
    pub points: usize,
    /// RMS of the momentum, continuity and entropy residuals.
    pub baseline: [f64; 3],
    pub transformed: [f64; 3],
    pub baseline_norm: f64,
    pub transformed_norm: f64,
    pub ratio: f64,
}

/// Solves `g(x) = target` by secant iteration from `x0`.
fn invert(g: impl Fn(f64) -> Option<f64>, target: f64, x0: f64, scale: f64) -> Option<f64> {
    let (mut a, mut b) = (x0, x0 + 1e-3 * scale.max(1e-3));
    let (mut ga, mut gb) = (g(a)? - target, g(b)? - target);
    for _ in 0..60 {
        if gb.abs() <= 1e-14 * scale.max(1.0) {
            return Some(b);
        }
        if gb == ga {
            return None;
        }
        let c = b - gb * (b - a) / (gb - ga);
        (a, ga) = (b, gb);
        b = c;
        gb = g(b)? - target;
    }
    (gb.abs() <= 1e-10 * scale.max(1.0)).then_some(b)
}

struct Residuals {
    sums: [f64; 3],
    points: usize,
}

fn residual_at(
    src: &dyn FieldSource,
    eos: &NumericEos,
    t: f64,
    r: f64,
    ht: f64,
    hr: f64,
) -> Option<[f64; 3]> {
    let c = src.sample(t, r)?;
    let (tp, tm) = (src.sample(t + ht, r)?, src.sample(t - ht, r)?);
    let (rp, rm) = (src.sample(t, r + hr)?, src.sample(t, r - hr)?);
    let dt = |k: usize| (tp[k] - tm[k]) / (2.0 * ht);
    let dr = |k: usize| (rp[k] - rm[k]) / (2.0 * hr);
    let p_r = (eos.pressure(rp[1], rp[2]) - eos.pressure(rm[1], rm[2])) / (2.0 * hr);
    let [u, rho, _] = c;
    let n = eos.n;
    Some([
        dt(0) + u * dr(0) + p_r / rho,
        dt(1) + u * dr(1) + rho * (dr(0) + (n - 1.0) * u / r),
        dt(2) + u * dr(2),
    ])
}

fn accumulate(acc: &mut Residuals, v: [f64; 3]) {
    for k in 0..3 {
        acc.sums[k] += v[k] * v[k];
    }
    acc.points += 1;
}

/// Discrete PDE residuals of the group-transformed solution against those
/// of the solution itself, on corresponding lattices.
///
/// The baseline lattice sits in the middle of the run, offset from cell
/// centers and snapshot times so both lattices sample the interpolants
/// between nodes; the transformed lattice is its image under the map.
pub fn symmetry_residual_check(history: &History, action: &GroupAction) -> Result<ResidualReport, SolverError> {
    let g = &history.grid;
    let big_t = history.t_end();
    let ht = history.snapshots[1].t - history.snapshots[0].t;
    let hr = g.dr();
    let len = g.r_max - g.r_min;
    let times: Vec<f64> = (0..9).map(|j| big_t * (0.3 + 0.05 * j as f64) + 0.37 * ht).collect();
    let radii: Vec<f64> = {
        let (lo, hi) = (g.r_min + 0.3 * len, g.r_max - 0.3 * len);
        let mut r = lo + 0.31 * hr;
        let mut out = Vec::new();
        while r < hi {
            out.push(r);
            r += hr;
        }
        out
    };
    let mut base = Residuals {
        sums: [0.0; 3],
        points: 0,
    };
    let mut tran = Residuals {
        sums: [0.0; 3],
        points: 0,
    };
    let transformed = action.apply(history);
    let eos = &history.eos;
    for &t in &times {
        let ts = invert(|x| action.pull_back(x, 1.0).ok().map(|p| p.0), t, t, big_t)
            .ok_or_else(|| SolverError::Config(format!("cannot invert the group map at t = {t}")))?;
        for &r in &radii {
            let v = residual_at(history, eos, t, r, ht, hr)
                .ok_or(SolverError::CharacteristicExit { r0: r, t })?;
            accumulate(&mut base, v);
            let rs = invert(|x| action.pull_back(ts, x).ok().map(|p| p.1), r, r, len)
                .ok_or_else(|| SolverError::Config(format!("cannot invert the group map at r = {r}")))?;
            let v = residual_at(&transformed, eos, ts, rs, ht, hr).ok_or_else(|| {
                let (t0, r0) = action.pull_back(ts, rs).unwrap_or((ts, rs));
                SolverError::Group(crate::symmetry::groups::GroupError::OutsideSource { t: t0, r: r0 })
            })?;
            accumulate(&mut tran, v);
        }
    }
    let rms = |acc: &Residuals| acc.sums.map(|s| (s / acc.points as f64).sqrt());
    let norm = |v: [f64; 3]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (b, t) = (rms(&base), rms(&tran));
    Ok(ResidualReport {
        eps: action.eps,
        points: base.points,
        baseline: b,
        transformed: t,
        baseline_norm: norm(b),
        transformed_norm: norm(t),
        ratio: norm(t) / norm(b),
    })
}
