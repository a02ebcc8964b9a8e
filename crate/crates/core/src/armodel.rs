//! AR residual, the classic autocorrelation estimator, Toeplitz matrices and
//! the regularized objective
//! `Q(a, x) = ½‖e(a, x)‖² + λ_C‖a‖₁ + λ_S·f_S(x)`.

use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::prox::{consistency_distance_sq, ConsistencySpec, SignalWeight};

/// AR filter `[1, a_2, …, a_{p+1}]`. The leading coefficient is always exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ArCoefficients(Vec<f64>);

impl ArCoefficients {
    /// Wraps a full coefficient vector; the first entry must be exactly 1.
    pub fn new(coefs: Vec<f64>) -> Result<Self> {
        match coefs.first() {
            Some(&1.0) => Ok(Self(coefs)),
            Some(_) => Err(Error::MalformedSpec("leading AR coefficient must be 1")),
            None => Err(Error::EmptySignal),
        }
    }

    /// Builds `[1, free…]`.
    pub fn from_free(free: &[f64]) -> Self {
        let mut a = Vec::with_capacity(free.len() + 1);
        a.push(1.0);
        a.extend_from_slice(free);
        Self(a)
    }

    /// Overwrites the leading entry with 1, whatever it was.
    pub fn anchored(mut coefs: Vec<f64>) -> Self {
        assert!(!coefs.is_empty(), "AR filter needs at least one coefficient");
        coefs[0] = 1.0;
        Self(coefs)
    }

    /// The trivial filter `[1, 0, …, 0]` of the given order.
    pub fn identity(order: usize) -> Self {
        let mut a = alloc::vec![0.0; order + 1];
        a[0] = 1.0;
        Self(a)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Coefficients `a_2 … a_{p+1}`.
    pub fn free(&self) -> &[f64] {
        &self.0[1..]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Deref for ArCoefficients {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// One analysis segment. Non-empty with finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrame(Vec<f64>);

impl TimeFrame {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self(samples))
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for TimeFrame {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Full linear convolution `e = a * x` of length `N + p`.
pub fn residual(a: &[f64], x: &[f64]) -> Vec<f64> {
    convolve(a, x)
}

pub(crate) fn convolve(a: &[f64], x: &[f64]) -> Vec<f64> {
    if a.is_empty() || x.is_empty() {
        return Vec::new();
    }
    let mut e = alloc::vec![0.0; a.len() + x.len() - 1];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (i, &ai) in a.iter().enumerate() {
            e[i + j] += ai * xj;
        }
    }
    e
}

/// Adjoint of `x ↦ a * x`: `(Aᵀe)_n = Σ_k a_k e_{n+k}` for `n < n_out`.
pub(crate) fn correlate(a: &[f64], e: &[f64], n_out: usize) -> Vec<f64> {
    (0..n_out)
        .map(|n| {
            a.iter()
                .enumerate()
                .filter_map(|(k, &ak)| e.get(n + k).map(|&v| ak * v))
                .sum()
        })
        .collect()
}

/// `(q + n_cols − 1) × n_cols` matrix whose column `j` is `filter` shifted down by `j`.
pub fn build_toeplitz(filter: &[f64], n_cols: usize) -> DMatrix<f64> {
    let q = filter.len();
    let rows = (q + n_cols).saturating_sub(1);
    DMatrix::from_fn(rows, n_cols, |r, c| {
        if r >= c && r - c < q {
            filter[r - c]
        } else {
            0.0
        }
    })
}

/// Biased autocorrelation `r_k = Σ_n x_n x_{n+k}` for `k = 0..=max_lag`.
/// Lags at or beyond the signal length are zero.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| {
            if k >= x.len() {
                0.0
            } else {
                x[..x.len() - k].iter().zip(&x[k..]).map(|(a, b)| a * b).sum()
            }
        })
        .collect()
}

/// Autocorrelation method with the Levinson–Durbin recursion.
///
/// When the prediction error vanishes before reaching order `p` (a perfectly
/// predictable frame), the recursion stops and the remaining coefficients are 0.
pub fn levinson_durbin(x: &[f64], order: usize) -> Result<ArCoefficients> {
    if order >= x.len() {
        return Err(Error::OrderTooLarge { order, len: x.len() });
    }
    let r = autocorrelation(x, order);
    if !(r[0] > 0.0) || !r[0].is_finite() {
        return Err(Error::DegenerateAutocorrelation);
    }
    let mut a = alloc::vec![0.0; order + 1];
    a[0] = 1.0;
    let mut prev = a.clone();
    let mut err = r[0];
    for i in 1..=order {
        let acc: f64 = r[i] + (1..i).map(|j| a[j] * r[i - j]).sum::<f64>();
        let k = -acc / err;
        prev[..i].copy_from_slice(&a[..i]);
        for j in 1..i {
            a[j] = prev[j] + k * prev[i - j];
        }
        a[i] = k;
        err *= 1.0 - k * k;
        if !(err > r[0] * 1e-15) {
            break;
        }
    }
    Ok(ArCoefficients(a))
}

/// Terms of `Q(a, x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveValue {
    pub total: f64,
    pub residual_term: f64,
    pub coef_term: f64,
    /// `λ_S·½·d_Γ(x)²`, or 0 for the indicator when `x` is feasible.
    pub signal_term: f64,
    /// False only for the indicator penalty when `x` lies outside Γ; `total` is then `+∞`.
    pub feasible: bool,
}

/// Evaluates `Q(a, x)` with the squared-distance (or indicator) signal prior.
///
/// `‖a‖₁` includes the anchored leading 1. For the indicator, `x` counts as
/// feasible when `d_Γ(x) ≤ 1e-9·√N`.
pub fn objective(
    a: &[f64],
    x: &[f64],
    lambda_c: f64,
    lambda_s: SignalWeight,
    spec: &ConsistencySpec,
) -> ObjectiveValue {
    let e = residual(a, x);
    let residual_term = 0.5 * e.iter().map(|v| v * v).sum::<f64>();
    let coef_term = lambda_c * a.iter().map(|v| v.abs()).sum::<f64>();
    let half_dist_sq = consistency_distance_sq(x, spec);
    let (signal_term, feasible) = match lambda_s {
        SignalWeight::Finite(0.0) => (0.0, true),
        SignalWeight::Finite(w) => (w * half_dist_sq, true),
        SignalWeight::Indicator => {
            let tol = 1e-9 * libm::sqrt(x.len() as f64);
            if libm::sqrt(2.0 * half_dist_sq) <= tol {
                (0.0, true)
            } else {
                (f64::INFINITY, false)
            }
        }
    };
    ObjectiveValue {
        total: residual_term + coef_term + signal_term,
        residual_term,
        coef_term,
        signal_term,
        feasible,
    }
}
