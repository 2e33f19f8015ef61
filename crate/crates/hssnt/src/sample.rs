//! Deterministic random sampling of algebra elements for the verification
//! suites. Every sampler takes an explicit RNG so reports are reproducible.

use rand::{Rng, RngExt};

use crate::algebra::{AlgVec, Home};
use crate::space::HermitianSpace;

/// Per-sample RNG derived from a base seed and the sample index, so sample
/// loops can run in parallel yet stay deterministic.
pub fn sample_rng(seed: u64, index: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// Coefficients in the H~ frame with |x_i| in [lo, hi] and random signs.
pub fn abelian_coeffs(sp: &HermitianSpace, rng: &mut impl Rng, lo: f64, hi: f64) -> Vec<f64> {
    (0..sp.rank())
        .map(|_| {
            let mag = lo + (hi - lo) * rng.random::<f64>();
            if rng.random::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

/// Rejection-samples coefficients whose point is principal:
/// min over positive roots of |alpha(v)| > rel * ||v||.
pub fn principal_coeffs(
    sp: &HermitianSpace,
    rng: &mut impl Rng,
    lo: f64,
    hi: f64,
    rel: f64,
) -> Vec<f64> {
    loop {
        let x = abelian_coeffs(sp, rng, lo, hi);
        let v = sp.roots.from_a_coeffs(&sp.model, &x);
        let norm = sp.model.norm(&v);
        let min_root = sp
            .roots
            .roots
            .iter()
            .enumerate()
            .map(|(i, _)| sp.roots.root_value(&sp.model, i, &v).abs())
            .fold(f64::INFINITY, f64::min);
        if min_root > rel * norm {
            return x;
        }
    }
}

/// A random element of k with the given inner norm.
pub fn k_element(sp: &HermitianSpace, rng: &mut impl Rng, norm: f64) -> AlgVec {
    let m = &sp.model;
    let mut z = m.zero(Home::K);
    for i in 0..m.dim_k {
        z.coeffs[i] = rng.random::<f64>() * 2.0 - 1.0;
    }
    let n = m.norm(&z);
    if n > 0.0 {
        crate::algebra::scale(&z, norm / n)
    } else {
        z
    }
}

/// A generic chart point: abelian coefficients conjugated by Ad(exp Z).
pub fn chart_point(sp: &HermitianSpace, rng: &mut impl Rng, lo: f64, hi: f64) -> AlgVec {
    let x = abelian_coeffs(sp, rng, lo, hi);
    let v = sp.roots.from_a_coeffs(&sp.model, &x);
    let norm = 0.2 + 0.8 * rng.random::<f64>();
    let z = k_element(sp, rng, norm);
    sp.model.adjoint_action(&z, &v).expect("Z is in k")
}

/// A principal chart point, for differentiating at regular strata.
pub fn principal_chart_point(
    sp: &HermitianSpace,
    rng: &mut impl Rng,
    lo: f64,
    hi: f64,
    rel: f64,
) -> AlgVec {
    let x = principal_coeffs(sp, rng, lo, hi, rel);
    let v = sp.roots.from_a_coeffs(&sp.model, &x);
    let norm = 0.2 + 0.8 * rng.random::<f64>();
    let z = k_element(sp, rng, norm);
    sp.model.adjoint_action(&z, &v).expect("Z is in k")
}
