//! Circulant embedding of the Toeplitz quadratic prox.
//!
//! A Toeplitz operator `T` (the filter convolved with an `n_head`-long vector)
//! is embedded in an `L × L` circulant `C` with `L ≥ n_head + q − 1`, so that
//! `C` applied to a zero-tailed vector reproduces `T` without wrap-around.
//! `C` is diagonalized by the DFT, and `(I + γCᵀC)⁻¹` becomes an elementwise
//! division in the frequency domain.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft;

/// Circulant matrix stored through the spectrum of its first column.
#[derive(Debug, Clone)]
pub struct CirculantOperator {
    spectrum: Vec<Complex64>,
    filter: Vec<f64>,
    n_head: usize,
    fft: Fft,
}

impl CirculantOperator {
    /// Embedding size `L`.
    pub fn len(&self) -> usize {
        self.spectrum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spectrum.is_empty()
    }

    pub fn n_head(&self) -> usize {
        self.n_head
    }

    /// Length of the valid (non-wrapped) output region, `n_head + q − 1`.
    pub fn n_valid(&self) -> usize {
        self.n_head + self.filter.len() - 1
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn fft(&self) -> &Fft {
        &self.fft
    }

    /// Circular convolution of the filter with `v`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), actual: v.len() });
        }
        let mut buf: Vec<Complex64> = v.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.fft.forward(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.fft.inverse(&mut buf);
        Ok(buf.iter().map(|c| c.re).collect())
    }

    /// The materialized `L × L` circulant; entry `(r, c)` is `filter[(r − c) mod L]`.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let l = self.len();
        DMatrix::from_fn(l, l, |r, c| {
            let k = (r + l - c) % l;
            self.filter.get(k).copied().unwrap_or(0.0)
        })
    }
}

/// Embeds the Toeplitz operator of `filter` acting on `n_head`-long vectors.
/// `L` is the smallest power of two `≥ n_head + filter.len() − 1`.
pub fn circulant_embed_filter(filter: &[f64], n_head: usize) -> CirculantOperator {
    assert!(!filter.is_empty() && n_head >= 1, "empty filter or head");
    let len = (n_head + filter.len() - 1).next_power_of_two();
    let fft = Fft::new(len);
    let mut spectrum = alloc::vec![Complex64::new(0.0, 0.0); len];
    for (s, &f) in spectrum.iter_mut().zip(filter) {
        s.re = f;
    }
    fft.forward(&mut spectrum);
    CirculantOperator { spectrum, filter: filter.to_vec(), n_head, fft }
}

/// Spectral prox of `γ·½‖Cu + offset‖²` with cached per-step denominators
/// and a reusable transform buffer.
#[derive(Debug, Clone)]
pub struct CirculantQuadratic {
    op: CirculantOperator,
    /// Spectrum of `Cᵀ·offset`.
    adjoint_offset: Vec<Complex64>,
    gamma: f64,
    inv_denominator: Vec<f64>,
    scratch: Vec<Complex64>,
    /// Largest `|Im|` left before the last discard.
    last_imag: f64,
}

impl CirculantQuadratic {
    pub fn new(op: CirculantOperator, offset_ext: &[f64]) -> Result<Self> {
        let l = op.len();
        if offset_ext.len() != l {
            return Err(Error::DimensionMismatch { expected: l, actual: offset_ext.len() });
        }
        let adjoint_offset = if offset_ext.iter().all(|&v| v == 0.0) {
            alloc::vec![Complex64::new(0.0, 0.0); l]
        } else {
            let mut buf: Vec<Complex64> =
                offset_ext.iter().map(|&r| Complex64::new(r, 0.0)).collect();
            op.fft.forward(&mut buf);
            buf.iter().zip(&op.spectrum).map(|(b, s)| s.conj() * b).collect()
        };
        Ok(Self {
            adjoint_offset,
            gamma: f64::NAN,
            inv_denominator: Vec::new(),
            scratch: alloc::vec![Complex64::new(0.0, 0.0); l],
            last_imag: 0.0,
            op,
        })
    }

    pub fn operator(&self) -> &CirculantOperator {
        &self.op
    }

    pub fn last_imaginary_residue(&self) -> f64 {
        self.last_imag
    }

    pub fn apply(&mut self, v: &[f64], gamma: f64, out: &mut [f64]) -> Result<()> {
        let l = self.op.len();
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidStep(gamma));
        }
        if v.len() != l || out.len() != l {
            return Err(Error::DimensionMismatch { expected: l, actual: v.len().min(out.len()) });
        }
        if self.gamma != gamma {
            self.inv_denominator =
                self.op.spectrum.iter().map(|s| 1.0 / (1.0 + gamma * s.norm_sqr())).collect();
            self.gamma = gamma;
        }
        for (b, &r) in self.scratch.iter_mut().zip(v) {
            *b = Complex64::new(r, 0.0);
        }
        self.op.fft.forward(&mut self.scratch);
        for ((b, d), c) in self.scratch.iter_mut().zip(&self.inv_denominator).zip(&self.adjoint_offset) {
            *b = (*b - c * gamma) * d;
        }
        self.op.fft.inverse(&mut self.scratch);
        let mut imag = 0.0f64;
        for (o, b) in out.iter_mut().zip(&self.scratch) {
            *o = b.re;
            imag = imag.max(b.im.abs());
        }
        self.last_imag = imag;
        Ok(())
    }
}

/// `(I + γCᵀC)⁻¹(v_ext − γCᵀ·offset_ext)`, evaluated spectrally.
pub fn prox_quadratic_circulant(
    v_ext: &[f64],
    gamma: f64,
    op: &CirculantOperator,
    offset_ext: &[f64],
) -> Result<Vec<f64>> {
    prox_quadratic_circulant_with_residue(v_ext, gamma, op, offset_ext).map(|(out, _)| out)
}

/// As [`prox_quadratic_circulant`], also returning the largest imaginary
/// magnitude discarded after the inverse transform.
pub fn prox_quadratic_circulant_with_residue(
    v_ext: &[f64],
    gamma: f64,
    op: &CirculantOperator,
    offset_ext: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let mut q = CirculantQuadratic::new(op.clone(), offset_ext)?;
    let mut out = alloc::vec![0.0; op.len()];
    q.apply(v_ext, gamma, &mut out)?;
    Ok((out, q.last_imaginary_residue()))
}

/// Prox of the extended regularizer: `head_prox` on the first `n_head`
/// coordinates, the tail forced to zero.
pub fn prox_regularizer_extended(
    u_ext: &mut [f64],
    n_head: usize,
    head_prox: impl FnOnce(&mut [f64]),
) {
    let (head, tail) = u_ext.split_at_mut(n_head);
    head_prox(head);
    tail.fill(0.0);
}
