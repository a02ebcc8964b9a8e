#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Monic polynomial with the given roots, as coefficients of z⁰, z⁻¹, ...
/// Conjugate pairs `r·e^{±iφ}` contribute `1 − 2r·cos φ·z⁻¹ + r²·z⁻²`.
pub fn ar_from_pole_pairs(pairs: &[(f64, f64)]) -> Vec<f64> {
    let mut a = vec![1.0];
    for &(r, phi) in pairs {
        let section = [1.0, -2.0 * r * phi.cos(), r * r];
        let mut next = vec![0.0; a.len() + 2];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &s) in section.iter().enumerate() {
                next[i + j] += ai * s;
            }
        }
        a = next;
    }
    a
}

pub fn random_stable_ar(rng: &mut ChaCha8Rng, order: usize) -> Vec<f64> {
    assert!(order.is_multiple_of(2));
    let pairs: Vec<(f64, f64)> = (0..order / 2)
        .map(|_| (rng.random_range(0.5..0.95), rng.random_range(0.05..3.0)))
        .collect();
    ar_from_pole_pairs(&pairs)
}

/// `x_n = e_n − Σ_{k≥1} a_k x_{n−k}` driven by Gaussian noise, after a burn-in.
pub fn realization(rng: &mut ChaCha8Rng, a: &[f64], n: usize) -> Vec<f64> {
    let burn = 2000;
    let mut x = vec![0.0; n + burn];
    for i in 0..n + burn {
        // Box–Muller
        let (u1, u2): (f64, f64) = (rng.random_range(f64::EPSILON..1.0), rng.random());
        let e = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
        let mut v = e;
        for k in 1..a.len().min(i + 1) {
            v -= a[k] * x[i - k];
        }
        x[i] = v;
    }
    x.split_off(burn)
}

pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 { num } else { num / den }
}
