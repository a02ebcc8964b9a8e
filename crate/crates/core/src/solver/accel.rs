//! Outer-loop accelerations: progressive inner-iteration counts, fixed
//! extrapolation and a sampled line search along the extrapolation ray.

use alloc::vec::Vec;

/// `N⁽ⁱ⁾ = round(10^{n1 + (i−1)/(I−1)·(nI − n1)})`, i.e. `logspace(n1, nI, I)`.
/// A single outer iteration gets `round(10^{nI})`.
pub fn progressive_schedule(n1: f64, n_last: f64, outer: usize) -> Vec<usize> {
    match outer {
        0 => Vec::new(),
        1 => alloc::vec![libm::round(libm::pow(10.0, n_last)) as usize],
        _ => (0..outer)
            .map(|i| {
                let exponent = n1 + i as f64 / (outer - 1) as f64 * (n_last - n1);
                libm::round(libm::pow(10.0, exponent)) as usize
            })
            .collect(),
    }
}

/// `(1 + τ)·u_half − τ·u_prev`.
pub fn extrapolate(u_half: &[f64], u_prev: &[f64], tau: f64) -> Vec<f64> {
    assert_eq!(u_half.len(), u_prev.len(), "extrapolation of mismatched vectors");
    if tau == 0.0 {
        return u_half.to_vec();
    }
    u_half.iter().zip(u_prev).map(|(h, p)| (1.0 + tau) * h - tau * p).collect()
}

/// Coefficient extrapolation; the leading coefficient is reset to 1.
pub fn extrapolate_coefficients(a_half: &[f64], a_prev: &[f64], tau: f64) -> Vec<f64> {
    let mut a = extrapolate(a_half, a_prev, tau);
    a[0] = 1.0;
    a
}

/// Decreasing extrapolation lengths for outer iteration `i` (1-based) of
/// `outer`: `τ_S = (I−i)/(I−1)` and `τ_C = 2(I−i)/(I−1)`; zero when `I = 1`.
pub fn extrapolation_steps(i: usize, outer: usize) -> (f64, f64) {
    if outer <= 1 {
        return (0.0, 0.0);
    }
    let tau_s = (outer - i) as f64 / (outer - 1) as f64;
    (tau_s, 2.0 * tau_s)
}

/// 25 logarithmically spaced step lengths in `[1e-4, 100]`.
pub fn default_tau_grid() -> Vec<f64> {
    (0..25)
        .map(|k| libm::pow(10.0, -4.0 + 6.0 * k as f64 / 24.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchResult {
    pub a: Vec<f64>,
    pub x: Vec<f64>,
    pub tau: f64,
    pub value: f64,
}

/// Samples `Q(a(τ), x(τ))` over `{0} ∪ tau_grid` and keeps the smallest value;
/// ties go to the smaller `τ`.
pub fn line_search(
    a_half: &[f64],
    a_prev: &[f64],
    x_half: &[f64],
    x_prev: &[f64],
    mut objective: impl FnMut(&[f64], &[f64]) -> f64,
    tau_grid: &[f64],
) -> LineSearchResult {
    let mut taus: Vec<f64> = tau_grid.iter().copied().filter(|&t| t > 0.0).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();

    let base = objective(a_half, x_half);
    let mut best = LineSearchResult { a: a_half.to_vec(), x: x_half.to_vec(), tau: 0.0, value: base };
    for tau in taus {
        let a = extrapolate_coefficients(a_half, a_prev, tau);
        let x = extrapolate(x_half, x_prev, tau);
        let value = objective(&a, &x);
        if value < best.value {
            best = LineSearchResult { a, x, tau, value };
        }
    }
    best
}
