//! Janssen signal update and GLP rectification.

use alloc::vec::Vec;

use crate::armodel::{autocorrelation, convolve, correlate};
use crate::error::{Error, Result};
use crate::prox::ConsistencySpec;
use crate::degrade::SampleClass;

/// Cholesky factor of a symmetric positive-definite band matrix, stored row-wise.
struct BandCholesky {
    n: usize,
    bandwidth: usize,
    /// Row `i` holds `L[i, i−bandwidth ..= i]`.
    rows: Vec<f64>,
}

impl BandCholesky {
    fn factor(n: usize, bandwidth: usize, entry: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let w = bandwidth;
        let stride = w + 1;
        let mut rows = alloc::vec![0.0; n * stride];
        // L[i, j] lives at rows[i * stride + (j + w − i)]
        let at = |i: usize, j: usize| i * stride + j + w - i;
        for i in 0..n {
            let lo = i.saturating_sub(w);
            for j in lo..=i {
                let k0 = lo.max(j.saturating_sub(w));
                let mut s = entry(i, j);
                for k in k0..j {
                    s -= rows[at(i, k)] * rows[at(j, k)];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::DegenerateAutocorrelation);
                    }
                    rows[at(i, i)] = libm::sqrt(s);
                } else {
                    rows[at(i, j)] = s / rows[at(j, j)];
                }
            }
        }
        Ok(Self { n, bandwidth, rows })
    }

    fn solve(&self, rhs: &mut [f64]) {
        let (n, w) = (self.n, self.bandwidth);
        let stride = w + 1;
        let at = |i: usize, j: usize| i * stride + j + w - i;
        for i in 0..n {
            let mut s = rhs[i];
            for k in i.saturating_sub(w)..i {
                s -= self.rows[at(i, k)] * rhs[k];
            }
            rhs[i] = s / self.rows[at(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for k in i + 1..(i + w + 1).min(n) {
                s -= self.rows[at(k, i)] * rhs[k];
            }
            rhs[i] = s / self.rows[at(i, i)];
        }
    }
}

/// Exact minimizer of `‖e(a, x)‖²` subject to `x_n = y_n` on `reliable`.
///
/// Solves the normal equations restricted to the missing coordinates. Their
/// matrix is the principal submatrix of the banded Toeplitz `AᵀA`, which stays
/// banded (bandwidth `p`) when the missing indices are sorted.
pub fn janssen_signal_update(a: &[f64], y: &[f64], reliable: &[usize]) -> Result<Vec<f64>> {
    let mut is_reliable = alloc::vec![false; y.len()];
    for &i in reliable {
        if i >= y.len() {
            return Err(Error::IndexOutOfRange { index: i, len: y.len() });
        }
        is_reliable[i] = true;
    }
    janssen_with_mask(a, y, &is_reliable)
}

pub(crate) fn janssen_with_mask(a: &[f64], y: &[f64], is_reliable: &[bool]) -> Result<Vec<f64>> {
    if a.first() != Some(&1.0) {
        return Err(Error::MalformedSpec("leading AR coefficient must be 1"));
    }
    let missing: Vec<usize> = (0..y.len()).filter(|&i| !is_reliable[i]).collect();
    if missing.is_empty() {
        return Ok(y.to_vec());
    }
    let p = a.len() - 1;
    let r = autocorrelation(a, p);
    let gram = |i: usize, j: usize| {
        let lag = missing[i].abs_diff(missing[j]);
        if lag <= p { r[lag] } else { 0.0 }
    };
    let bandwidth = p.min(missing.len() - 1);
    let chol = BandCholesky::factor(missing.len(), bandwidth, gram)?;

    let known: Vec<f64> = y
        .iter()
        .zip(is_reliable)
        .map(|(&v, &rel)| if rel { v } else { 0.0 })
        .collect();
    let ata_known = correlate(a, &convolve(a, &known), y.len());
    let mut rhs: Vec<f64> = missing.iter().map(|&m| -ata_known[m]).collect();
    chol.solve(&mut rhs);

    let mut x = known;
    for (&m, v) in missing.iter().zip(rhs) {
        x[m] = v;
    }
    Ok(x)
}

/// Restores reliable samples and reflects clipped samples that fell inside
/// `(−θ, θ)` about the respective level: `2θ − x` above, `−2θ − x` below.
pub fn glp_rectify(x: &[f64], spec: &ConsistencySpec) -> Result<Vec<f64>> {
    let ConsistencySpec::Declip { y, theta, masks } = spec else {
        return Err(Error::MalformedSpec("GLP rectification needs a declipping observation"));
    };
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), actual: x.len() });
    }
    let theta = *theta;
    Ok(x.iter()
        .zip(y)
        .zip(masks.labels())
        .map(|((&xi, &yi), class)| match class {
            SampleClass::Reliable => yi,
            SampleClass::ClippedHigh if xi < theta => 2.0 * theta - xi,
            SampleClass::ClippedLow if xi > -theta => -2.0 * theta - xi,
            _ => xi,
        })
        .collect())
}
