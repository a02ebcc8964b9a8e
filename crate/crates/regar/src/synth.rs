//! Synthetic test material: realizations of random stable AR processes.

use anyhow::{ensure, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Coefficients `[1, a_2, …]` of `Π (1 − 2r cos φ z⁻¹ + r² z⁻²)` for the
/// given pole pairs `r·e^{±iφ}`.
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

/// A random minimum-phase AR filter of even `order` with pole radii in
/// `[0.8, 0.99)` and angles spread over `(0, π)`.
pub fn random_stable_ar(rng: &mut ChaCha8Rng, order: usize) -> Result<Vec<f64>> {
    ensure!(order.is_multiple_of(2), "synthetic AR order must be even, got {order}");
    let pairs: Vec<(f64, f64)> = (0..order / 2)
        .map(|_| (rng.random_range(0.8..0.99), rng.random_range(0.02..std::f64::consts::PI - 0.02)))
        .collect();
    Ok(ar_from_pole_pairs(&pairs))
}

/// `x_n = ε_n − Σ_{k≥1} a_k x_{n−k}` with white Gaussian `ε`; the first
/// `burn_in` samples are discarded.
pub fn ar_realization(rng: &mut ChaCha8Rng, a: &[f64], len: usize, burn_in: usize) -> Vec<f64> {
    let total = len + burn_in;
    let mut x = vec![0.0; total];
    for n in 0..total {
        let mut v: f64 = StandardNormal.sample(rng);
        for k in 1..a.len().min(n + 1) {
            v -= a[k] * x[n - k];
        }
        x[n] = v;
    }
    x.split_off(burn_in)
}

/// Scales `x` so that its peak magnitude equals `peak`.
pub fn normalize_peak(x: &mut [f64], peak: f64) {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v *= peak / m);
    }
}

/// A seeded AR(order) signal of `len` samples with peak magnitude `peak`,
/// returned with its generating coefficients.
pub fn synthetic_ar_signal(seed: u64, order: usize, len: usize, peak: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_stable_ar(&mut rng, order)?;
    let mut x = ar_realization(&mut rng, &a, len, 4096);
    normalize_peak(&mut x, peak);
    Ok((x, a))
}
