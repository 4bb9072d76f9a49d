//! Floating-point evaluation and the randomized zero cross-check.
//!
//! The cross-check is advisory: `Expr::is_zero` is always the verdict. The
//! sampler evaluates fields as degree-4 polynomials in `(t, r)` and opaque
//! functions as positive exponential sums, all drawn from a fixed seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;

use super::atom::{Atom, AtomKind, Field, Var};
use super::poly::{Exponent, Poly};
use super::Expr;

/// Supplies numeric values for plain atoms and opaque functions.
pub trait Valuation {
    fn sym(&self, name: &str) -> f64;
    fn var(&self, v: Var) -> f64;
    fn jet(&self, field: Field, t: u32, r: u32) -> f64;
    fn func(&self, name: &str, args: &[f64], deriv: &[u32]) -> f64;
}

pub struct Evaluator<'a, V: Valuation + ?Sized> {
    val: &'a V,
    memo: FxHashMap<Atom, f64>,
}

impl<'a, V: Valuation + ?Sized> Evaluator<'a, V> {
    pub fn new(val: &'a V) -> Self {
        Evaluator {
            val,
            memo: FxHashMap::default(),
        }
    }

    pub fn atom(&mut self, a: Atom) -> f64 {
        if let Some(v) = self.memo.get(&a) {
            return *v;
        }
        let v = match &*a.kind() {
            AtomKind::Sym(s) => self.val.sym(s),
            AtomKind::Var(x) => self.val.var(*x),
            AtomKind::Jet { field, t, r } => self.val.jet(*field, *t, *r),
            AtomKind::Func { name, args, deriv } => {
                let xs: Vec<f64> = args.iter().map(|x| self.eval(x)).collect();
                self.val.func(name, &xs, deriv)
            }
            AtomKind::Ln(x) => self.eval(x).ln(),
            AtomKind::Exp(x) => self.eval(x).exp(),
            AtomKind::Pow(b) => self.eval(b),
        };
        self.memo.insert(a, v);
        v
    }

    fn exponent(&mut self, e: &Exponent) -> f64 {
        let mut v = e.constant().to_f64();
        for (m, c) in e.symbolic_terms() {
            let mut t = c.to_f64();
            for (a, k) in m.iter() {
                t *= self.atom(*a).powi(*k);
            }
            v += t;
        }
        v
    }

    /// Returns the value and the sum of absolute term magnitudes.
    fn poly(&mut self, p: &Poly) -> (f64, f64) {
        let mut sum = 0.0;
        let mut mag = 0.0;
        for (m, c) in p.terms() {
            let mut t = c.to_f64();
            for (a, e) in m.iter() {
                let x = self.atom(*a);
                t *= match e.as_int() {
                    Some(k) if k.abs() < 64 => x.powi(k as i32),
                    _ => x.powf(self.exponent(e)),
                };
            }
            sum += t;
            mag += t.abs();
        }
        (sum, mag)
    }

    pub fn eval(&mut self, e: &Expr) -> f64 {
        let (n, _) = self.poly(e.numerator());
        if e.is_polynomial() {
            return n;
        }
        e.denominator_factors()
            .iter()
            .fold(n, |acc, (f, m)| acc / self.poly(f).0.powi(*m as i32))
    }

    /// Numerator value and magnitude, used for relative zero tests.
    pub fn eval_numerator(&mut self, e: &Expr) -> (f64, f64) {
        self.poly(e.numerator())
    }
}

pub fn eval(e: &Expr, val: &dyn Valuation) -> f64 {
    Evaluator::new(val).eval(e)
}

/// Positive exponential-sum model for an opaque function of any arity:
/// `f(x) = Σ_s c_s exp(a_s · x)`. All derivatives have closed forms and are
/// strictly positive.
#[derive(Clone, Debug)]
pub struct ExpSumModel {
    coeffs: Vec<f64>,
    rates: Vec<Vec<f64>>,
}

impl ExpSumModel {
    pub fn from_seed(name: &str, arity: usize, seed: u64) -> ExpSumModel {
        let h = name.bytes().fold(0xcbf29ce484222325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x100000001b3)
        });
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h ^ (arity as u64) << 48);
        let terms = 3;
        ExpSumModel {
            coeffs: (0..terms).map(|_| rng.random_range(0.5..1.5)).collect(),
            rates: (0..terms)
                .map(|_| (0..arity).map(|_| rng.random_range(0.05..0.35)).collect())
                .collect(),
        }
    }

    pub fn eval(&self, args: &[f64], deriv: &[u32]) -> f64 {
        self.coeffs
            .iter()
            .zip(&self.rates)
            .map(|(c, a)| {
                let mut factor = *c;
                let mut expo = 0.0;
                for ((ai, xi), k) in a.iter().zip(args).zip(deriv) {
                    factor *= ai.powi(*k as i32);
                    expo += ai * xi;
                }
                factor * expo.exp()
            })
            .sum()
    }
}

/// Random sample point: polynomial fields, sampled `(t, r)`, symbol values
/// and exponential-sum functions. Functions may be overridden by name.
pub struct SamplePoint {
    pub t: f64,
    pub r: f64,
    fields: FxHashMap<Field, [[f64; 5]; 5]>,
    syms: FxHashMap<String, f64>,
    seed: u64,
    overrides: Vec<(String, std::sync::Arc<dyn Fn(&[f64], &[u32]) -> f64 + Send + Sync>)>,
}

impl SamplePoint {
    pub fn random(rng: &mut ChaCha8Rng, seed: u64) -> SamplePoint {
        let mut fields = FxHashMap::default();
        for f in [Field::U, Field::Rho, Field::S, Field::P, Field::RhoW] {
            let mut c = [[0.0; 5]; 5];
            for (i, row) in c.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    if i + j <= 4 {
                        *v = rng.random_range(-0.3..0.3);
                    }
                }
            }
            // Densities and entropy-like fields stay well away from zero.
            c[0][0] = match f {
                Field::U => rng.random_range(-1.0..1.0),
                _ => rng.random_range(2.0..3.0),
            };
            fields.insert(f, c);
        }
        let mut syms = FxHashMap::default();
        syms.insert("n".to_string(), rng.random_range(2.0..4.0));
        syms.insert("q".to_string(), rng.random_range(0.2..1.2));
        syms.insert("k".to_string(), rng.random_range(0.5..1.5));
        SamplePoint {
            t: rng.random_range(0.0..1.0),
            r: rng.random_range(0.5..2.0),
            fields,
            syms,
            seed,
            overrides: Vec::new(),
        }
    }

    pub fn set_sym(&mut self, name: &str, v: f64) {
        self.syms.insert(name.to_string(), v);
    }

    /// Moves the field polynomials so that `field` takes the value `v`
    /// (with zero derivatives unchanged) at the sample point.
    pub fn set_field_value(&mut self, field: Field, v: f64) {
        let cur = self.jet(field, 0, 0);
        self.fields.get_mut(&field).unwrap()[0][0] += v - cur;
    }

    pub fn override_func(
        &mut self,
        name: &str,
        f: std::sync::Arc<dyn Fn(&[f64], &[u32]) -> f64 + Send + Sync>,
    ) {
        self.overrides.push((name.to_string(), f));
    }

    fn poly_deriv(c: &[[f64; 5]; 5], t: f64, r: f64, dt: u32, dr: u32) -> f64 {
        let falling = |p: usize, k: u32| -> f64 {
            if (k as usize) > p {
                return 0.0;
            }
            ((p + 1 - k as usize)..=p).map(|x| x as f64).product()
        };
        let mut s = 0.0;
        for (i, row) in c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if *v == 0.0 || (i as u32) < dt || (j as u32) < dr {
                    continue;
                }
                s += v
                    * falling(i, dt)
                    * falling(j, dr)
                    * t.powi(i as i32 - dt as i32)
                    * r.powi(j as i32 - dr as i32);
            }
        }
        s
    }
}

impl Valuation for SamplePoint {
    fn sym(&self, name: &str) -> f64 {
        if let Some(v) = self.syms.get(name) {
            return *v;
        }
        let h = name.bytes().fold(7u64, |h, b| h.wrapping_mul(31).wrapping_add(b as u64));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ h);
        rng.random_range(0.3..1.3)
    }

    fn var(&self, v: Var) -> f64 {
        match v {
            Var::T => self.t,
            Var::R => self.r,
        }
    }

    fn jet(&self, field: Field, t: u32, r: u32) -> f64 {
        SamplePoint::poly_deriv(&self.fields[&field], self.t, self.r, t, r)
    }

    fn func(&self, name: &str, args: &[f64], deriv: &[u32]) -> f64 {
        if let Some((_, f)) = self.overrides.iter().find(|(n, _)| n == name) {
            return f(args, deriv);
        }
        ExpSumModel::from_seed(name, args.len(), self.seed).eval(args, deriv)
    }
}

/// Sample points drawn from a fixed-seed generator.
pub fn sample_points(count: usize, seed: u64) -> Vec<SamplePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| SamplePoint::random(&mut rng, seed)).collect()
}

pub const CROSS_CHECK_SEED: u64 = 0x5eed_2024;
pub const CROSS_CHECK_POINTS: usize = 20;

/// Randomized zero test: the numerator vanishes at every sample point to
/// relative accuracy `rel_tol` of its term magnitudes.
pub fn numerically_zero(e: &Expr, points: &[SamplePoint], rel_tol: f64) -> bool {
    points.iter().all(|p| {
        let (v, mag) = Evaluator::new(p).eval_numerator(e);
        v.is_finite() && v.abs() <= rel_tol * mag.max(1e-300)
    })
}

/// Zero cross-check with the default sampler settings.
pub fn cross_check_zero(e: &Expr) -> bool {
    let pts = sample_points(CROSS_CHECK_POINTS, CROSS_CHECK_SEED);
    numerically_zero(e, &pts, 1e-9)
}
