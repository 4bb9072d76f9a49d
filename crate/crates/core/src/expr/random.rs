//! Small random jet expressions for identity checks.

use rand::Rng;

use super::{Expr, Field};

/// A random polynomial in `r` and the `r`-jets of `U, ρ, S` up to `max_order`:
/// a nonzero constant plus one or two monomials of degree one or two with
/// small integer coefficients.
pub fn small_jet_expr<R: Rng + ?Sized>(rng: &mut R, max_order: u32) -> Expr {
    let factor = |rng: &mut R| -> Expr {
        if rng.random_ratio(1, 6) {
            return Expr::r();
        }
        let f = Field::FLUID[rng.random_range(0..3)];
        Expr::jet(f, 0, rng.random_range(0..=max_order))
    };
    let mut e = Expr::int(nonzero(rng));
    for _ in 0..rng.random_range(1..=2) {
        let mut m = Expr::int(nonzero(rng));
        for _ in 0..rng.random_range(1..=2) {
            m = &m * &factor(rng);
        }
        e = &e + &m;
    }
    e
}

fn nonzero<R: Rng + ?Sized>(rng: &mut R) -> i64 {
    let k = rng.random_range(1..=3);
    if rng.random_bool(0.5) {
        k
    } else {
        -k
    }
}

/// Outcome of the three product identities on one random pair.
#[derive(Clone, Debug, serde::Serialize)]
pub struct IdentityTrial {
    pub a: String,
    pub b: String,
    pub field: Field,
    pub holds: [bool; 3],
}

/// Checks the Euler-operator product identities on `count` random pairs of
/// jet order at most `max_order`, drawn from a seeded generator. Pairs are
/// checked in parallel; the result order follows the draw order.
pub fn euler_identity_trials(seed: u64, count: usize, max_order: u32) -> Result<Vec<IdentityTrial>, super::ExprError> {
    use rand::SeedableRng;
    use rayon::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(Expr, Expr, Field)> = (0..count)
        .map(|k| {
            let a = small_jet_expr(&mut rng, max_order);
            let b = small_jet_expr(&mut rng, max_order);
            (a, b, Field::FLUID[k % 3])
        })
        .collect();
    pairs
        .par_iter()
        .map(|(a, b, field)| {
            let res = super::euler_product_identities(a, b, *field, "f")?;
            Ok(IdentityTrial {
                a: a.to_string(),
                b: b.to_string(),
                field: *field,
                holds: res.map(|e| e.is_zero()),
            })
        })
        .collect()
}
